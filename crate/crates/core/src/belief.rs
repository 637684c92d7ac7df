//! Histogram filter over grid cells for the target position.
//!
//! `predict` propagates the belief through the target motion model and
//! `correct` folds in one agent's detection outcome. Joint multi-agent
//! correction factors into per-agent likelihoods, so [`correct_all`] is a
//! sequence of single-agent corrections.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gridworld::{encode_pgm, Cell, FovFootprint, GridDims, OccupancyGrid};

const NORMALIZATION_EPS: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct TargetBelief {
    dims: GridDims,
    mass: Vec<f64>,
}

impl TargetBelief {
    pub fn uniform(dims: GridDims) -> Self {
        let n = dims.len();
        Self { dims, mass: vec![1.0 / n as f64; n] }
    }

    pub fn delta(dims: GridDims, cell: Cell) -> Self {
        let mut mass = vec![0.0; dims.len()];
        mass[dims.index(cell)] = 1.0;
        Self { dims, mass }
    }

    /// Normalizes `mass` before storing it.
    pub fn from_masses(dims: GridDims, mass: Vec<f64>) -> Result<Self> {
        if mass.len() != dims.len() {
            return Err(Error::domain(format!(
                "expected {} masses, got {}",
                dims.len(),
                mass.len()
            )));
        }
        if mass.iter().any(|m| !(m.is_finite() && *m >= 0.0)) {
            return Err(Error::domain("masses must be finite and non-negative"));
        }
        Self::normalized(dims, mass)
    }

    fn normalized(dims: GridDims, mut mass: Vec<f64>) -> Result<Self> {
        let total: f64 = mass.iter().sum();
        if !(total > 0.0 && total.is_finite()) {
            return Err(Error::DegeneratePosterior);
        }
        for m in &mut mass {
            *m /= total;
        }
        Ok(Self { dims, mass })
    }

    pub fn dims(&self) -> &GridDims {
        &self.dims
    }

    pub fn masses(&self) -> &[f64] {
        &self.mass
    }

    pub fn mass(&self, cell: Cell) -> f64 {
        self.mass[self.dims.index(cell)]
    }

    pub fn total(&self) -> f64 {
        self.mass.iter().sum()
    }

    pub fn max_mass(&self) -> f64 {
        self.mass.iter().copied().fold(0.0, f64::max)
    }

    /// Most likely cell; ties go to the lowest row-major index.
    pub fn argmax(&self) -> Cell {
        let mut best = 0;
        for (i, &m) in self.mass.iter().enumerate() {
            if m > self.mass[best] {
                best = i;
            }
        }
        self.dims.cell(best)
    }

    pub fn is_normalized(&self) -> bool {
        (self.total() - 1.0).abs() < NORMALIZATION_EPS
    }

    /// Graymap with masses rescaled by the largest cell mass.
    pub fn to_pgm(&self, binary: bool) -> Vec<u8> {
        let max = self.max_mass();
        let scaled: Vec<f64> = if max > 0.0 {
            self.mass.iter().map(|m| m / max).collect()
        } else {
            self.mass.clone()
        };
        encode_pgm(&self.dims, &scaled, binary)
    }
}

/// Target motion between two consecutive steps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MotionModel {
    /// Target stays put up to isotropic diffusion.
    Static {
        #[serde(default)]
        sigma: f64,
    },
    /// Target drifts `velocity` cells per step, then diffuses.
    ConstVel {
        velocity: [f64; 2],
        #[serde(default)]
        sigma: f64,
    },
}

impl MotionModel {
    pub fn sigma(&self) -> f64 {
        match *self {
            MotionModel::Static { sigma } | MotionModel::ConstVel { sigma, .. } => sigma,
        }
    }

    pub fn velocity(&self) -> [f64; 2] {
        match *self {
            MotionModel::Static { .. } => [0.0, 0.0],
            MotionModel::ConstVel { velocity, .. } => velocity,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let sigma = self.sigma();
        if !(sigma >= 0.0 && sigma.is_finite()) {
            return Err(Error::domain(format!("sigma must be >= 0, got {sigma}")));
        }
        if self.velocity().iter().any(|v| !v.is_finite()) {
            return Err(Error::domain("velocity must be finite"));
        }
        Ok(())
    }
}

impl Default for MotionModel {
    fn default() -> Self {
        MotionModel::Static { sigma: 0.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SensorModel {
    pub p_detect: f64,
    #[serde(default)]
    pub p_false: f64,
}

impl SensorModel {
    pub fn new(p_detect: f64, p_false: f64) -> Result<Self> {
        let s = Self { p_detect, p_false };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0 <= self.p_false && self.p_false < self.p_detect && self.p_detect <= 1.0) {
            return Err(Error::domain(format!(
                "sensor needs 0 <= p_false < p_detect <= 1, got p_false={} p_detect={}",
                self.p_false, self.p_detect
            )));
        }
        Ok(())
    }
}

impl Default for SensorModel {
    fn default() -> Self {
        Self { p_detect: 0.9, p_false: 0.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Detected(Cell),
    NotDetected,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Observation {
    pub agent: usize,
    pub fov: FovFootprint,
    pub outcome: Outcome,
}

/// Motion update. Shift by the drift (bilinear split for fractional
/// velocities, clamped at the border), then blur with a Gaussian truncated to
/// a square window of radius `ceil(3 sigma)`. Each source cell's kernel is
/// renormalized over the in-map cells it reaches, so no mass leaves the map.
pub fn predict(belief: &TargetBelief, model: &MotionModel) -> TargetBelief {
    let sigma = model.sigma();
    let [vx, vy] = model.velocity();
    if sigma == 0.0 && vx == 0.0 && vy == 0.0 {
        return belief.clone();
    }
    let dims = belief.dims;
    let mut mass = if vx != 0.0 || vy != 0.0 {
        shift(&dims, &belief.mass, vx, vy)
    } else {
        belief.mass.clone()
    };
    if sigma > 0.0 {
        mass = blur(&dims, &mass, sigma);
    }
    // Both passes conserve mass; renormalizing only removes rounding drift.
    TargetBelief::normalized(dims, mass).unwrap_or_else(|_| belief.clone())
}

/// Split of a fractional displacement into `(integer offset, weight)` pairs.
fn split_offset(v: f64) -> [(isize, f64); 2] {
    let base = v.floor();
    let frac = v - base;
    [(base as isize, 1.0 - frac), (base as isize + 1, frac)]
}

fn clamp_coord(v: isize, len: usize) -> usize {
    v.clamp(0, len as isize - 1) as usize
}

fn shift(dims: &GridDims, mass: &[f64], vx: f64, vy: f64) -> Vec<f64> {
    let mut out = vec![0.0; mass.len()];
    let xs = split_offset(vx);
    let ys = split_offset(vy);
    for (i, &m) in mass.iter().enumerate() {
        if m == 0.0 {
            continue;
        }
        let src = dims.cell(i);
        for &(dx, wx) in &xs {
            if wx == 0.0 {
                continue;
            }
            for &(dy, wy) in &ys {
                if wy == 0.0 {
                    continue;
                }
                let x = clamp_coord(src.x as isize + dx, dims.width);
                let y = clamp_coord(src.y as isize + dy, dims.height);
                out[dims.index(Cell::new(x, y))] += m * wx * wy;
            }
        }
    }
    out
}

pub(crate) fn kernel_radius(sigma: f64) -> usize {
    (3.0 * sigma).ceil() as usize
}

fn blur(dims: &GridDims, mass: &[f64], sigma: f64) -> Vec<f64> {
    let r = kernel_radius(sigma) as isize;
    let side = (2 * r + 1) as usize;
    let weight = |d: isize| (-(d * d) as f64 / (2.0 * sigma * sigma)).exp();
    let mut kernel = vec![0.0; side * side];
    for dy in -r..=r {
        for dx in -r..=r {
            kernel[((dy + r) as usize) * side + (dx + r) as usize] = weight(dx) * weight(dy);
        }
    }

    let mut out = vec![0.0; mass.len()];
    for (i, &m) in mass.iter().enumerate() {
        if m == 0.0 {
            continue;
        }
        let src = dims.cell(i);
        let x0 = (src.x as isize - r).max(0);
        let x1 = (src.x as isize + r).min(dims.width as isize - 1);
        let y0 = (src.y as isize - r).max(0);
        let y1 = (src.y as isize + r).min(dims.height as isize - 1);
        let k = |x: isize, y: isize| {
            let kx = (x - src.x as isize + r) as usize;
            let ky = (y - src.y as isize + r) as usize;
            kernel[ky * side + kx]
        };
        let mut z = 0.0;
        for y in y0..=y1 {
            for x in x0..=x1 {
                z += k(x, y);
            }
        }
        for y in y0..=y1 {
            for x in x0..=x1 {
                out[y as usize * dims.width + x as usize] += m * k(x, y) / z;
            }
        }
    }
    out
}

/// Per-cell likelihood of `obs` under `sensor`.
fn likelihood(obs: &Observation, sensor: &SensorModel, cell: Cell) -> f64 {
    match obs.outcome {
        Outcome::NotDetected => {
            if obs.fov.contains(cell) {
                1.0 - sensor.p_detect
            } else {
                1.0 - sensor.p_false
            }
        }
        Outcome::Detected(at) => {
            if cell == at {
                sensor.p_detect
            } else {
                sensor.p_false
            }
        }
    }
}

/// Bayes update with one agent's observation.
pub fn correct(belief: &TargetBelief, obs: &Observation, sensor: &SensorModel) -> Result<TargetBelief> {
    if let Outcome::Detected(at) = obs.outcome {
        if !obs.fov.contains(at) {
            return Err(Error::domain(format!("detection at {at:?} lies outside the footprint")));
        }
    }
    let dims = belief.dims;
    let mass = belief
        .mass
        .iter()
        .enumerate()
        .map(|(i, &m)| m * likelihood(obs, sensor, dims.cell(i)))
        .collect();
    TargetBelief::normalized(dims, mass)
}

/// Sequential correction in list order; `sensors[obs.agent]` is used for
/// each observation.
pub fn correct_all(
    belief: &TargetBelief,
    observations: &[Observation],
    sensors: &[SensorModel],
) -> Result<TargetBelief> {
    let mut out = belief.clone();
    for obs in observations {
        let sensor = sensors
            .get(obs.agent)
            .ok_or_else(|| Error::domain(format!("no sensor model for agent {}", obs.agent)))?;
        out = correct(&out, obs, sensor)?;
    }
    Ok(out)
}

/// Uniform belief over unknown cells, or over free cells when nothing is
/// unknown anymore.
pub fn reset_uniform_unknown(grid: &OccupancyGrid) -> Result<TargetBelief> {
    let dims = *grid.dims();
    let pick = |pred: &dyn Fn(Cell) -> bool| -> Vec<f64> {
        dims.cells().map(|c| if pred(c) { 1.0 } else { 0.0 }).collect()
    };
    let unknown = pick(&|c| grid.is_unknown(c));
    if unknown.iter().any(|m| *m > 0.0) {
        return TargetBelief::normalized(dims, unknown);
    }
    let free = pick(&|c| grid.is_free(c));
    if free.iter().any(|m| *m > 0.0) {
        return TargetBelief::normalized(dims, free);
    }
    Err(Error::domain("grid has neither unknown nor free cells"))
}
