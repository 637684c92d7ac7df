/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_demo_free: (a: number, b: number) => void;
export const demo_agent_count: (a: number) => number;
export const demo_belief: (a: number) => [number, number];
export const demo_clock: (a: number) => number;
export const demo_found: (a: number) => number;
export const demo_height: (a: number) => number;
export const demo_new: (a: number, b: number, c: number) => [number, number, number];
export const demo_occupancy: (a: number) => [number, number];
export const demo_place_target: (a: number, b: number, c: number) => [number, number];
export const demo_plan_json: (a: number) => [number, number];
export const demo_poses: (a: number) => [number, number];
export const demo_reset: (a: number, b: number) => void;
export const demo_set_agents: (a: number, b: number) => [number, number];
export const demo_step: (a: number, b: number) => number;
export const demo_target: (a: number) => [number, number];
export const demo_total_entropy: (a: number) => number;
export const demo_trajectory: (a: number, b: number) => [number, number];
export const demo_truth: (a: number) => [number, number];
export const demo_width: (a: number) => number;
export const preset: (a: number, b: number) => [number, number];
export const preset_names: () => [number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_start: () => void;
