/* tslint:disable */
/* eslint-disable */

export class Demo {
    free(): void;
    [Symbol.dispose](): void;
    agent_count(): number;
    /**
     * Target belief mass per cell, row major.
     */
    belief(): Float64Array;
    clock(): number;
    found(): boolean;
    height(): number;
    constructor(json: string, seed: number);
    /**
     * Occupancy probability per cell, row major.
     */
    occupancy(): Float64Array;
    place_target(x: number, y: number): void;
    /**
     * Latest planning round as JSON: waypoints and, per agent in rank
     * order, every scored candidate with the selected one flagged.
     */
    plan_json(): string;
    /**
     * `[x, y, heading]` per agent.
     */
    poses(): Float64Array;
    /**
     * Restarts the current setup with another seed.
     */
    reset(seed: number): void;
    set_agents(count: number): void;
    /**
     * Advances up to `n` steps; returns whether the run is over.
     */
    step(n: number): boolean;
    /**
     * `[x, y, found]` of the true target, empty without one. The position
     * is the cell centre.
     */
    target(): Float64Array;
    total_entropy(): number;
    /**
     * Flattened `[x, y, ...]` history of one agent.
     */
    trajectory(agent: number): Float64Array;
    /**
     * 1 for cells that are truly blocked.
     */
    truth(): Uint8Array;
    width(): number;
}

/**
 * Scenario JSON for a bundled preset.
 */
export function preset(name: string): string | undefined;

/**
 * Names of the bundled scenarios, comma separated.
 */
export function preset_names(): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_demo_free: (a: number, b: number) => void;
    readonly demo_agent_count: (a: number) => number;
    readonly demo_belief: (a: number) => [number, number];
    readonly demo_clock: (a: number) => number;
    readonly demo_found: (a: number) => number;
    readonly demo_height: (a: number) => number;
    readonly demo_new: (a: number, b: number, c: number) => [number, number, number];
    readonly demo_occupancy: (a: number) => [number, number];
    readonly demo_place_target: (a: number, b: number, c: number) => [number, number];
    readonly demo_plan_json: (a: number) => [number, number];
    readonly demo_poses: (a: number) => [number, number];
    readonly demo_reset: (a: number, b: number) => void;
    readonly demo_set_agents: (a: number, b: number) => [number, number];
    readonly demo_step: (a: number, b: number) => number;
    readonly demo_target: (a: number) => [number, number];
    readonly demo_total_entropy: (a: number) => number;
    readonly demo_trajectory: (a: number, b: number) => [number, number];
    readonly demo_truth: (a: number) => [number, number];
    readonly demo_width: (a: number) => number;
    readonly preset: (a: number, b: number) => [number, number];
    readonly preset_names: () => [number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_start: () => void;
}

export type SyncInitInput = BufferSource | WebAssembly.Module;

/**
 * Instantiates the given `module`, which can either be bytes or
 * a precompiled `WebAssembly.Module`.
 *
 * @param {{ module: SyncInitInput }} module - Passing `SyncInitInput` directly is deprecated.
 *
 * @returns {InitOutput}
 */
export function initSync(module: { module: SyncInitInput } | SyncInitInput): InitOutput;

/**
 * If `module_or_path` is {RequestInfo} or {URL}, makes a request and
 * for everything else, calls `WebAssembly.instantiate` directly.
 *
 * @param {{ module_or_path: InitInput | Promise<InitInput> }} module_or_path - Passing `InitInput` directly is deprecated.
 *
 * @returns {Promise<InitOutput>}
 */
export default function __wbg_init (module_or_path?: { module_or_path: InitInput | Promise<InitInput> } | InitInput | Promise<InitInput>): Promise<InitOutput>;
