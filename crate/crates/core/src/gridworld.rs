//! Occupancy grid, entropy view and square field-of-view geometry.
//!
//! Cells hold the occupancy probability `p(m)`: `0.5` is unknown, observed
//! cells snap to `0.0` (free) or `1.0` (occupied). Continuous search decays
//! observed values back toward `0.5`, so classification uses bands around
//! those three levels (see [`CellState`]).

use std::collections::BTreeSet;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Probability assigned to cells that have never been observed.
pub const UNKNOWN: f64 = 0.5;
pub const FREE: f64 = 0.0;
pub const OCCUPIED: f64 = 1.0;

/// Upper bound (inclusive) of the band classified as known-free.
pub const FREE_BAND: f64 = 0.25;
/// Lower bound (inclusive) of the band classified as known-occupied.
pub const OCCUPIED_BAND: f64 = 0.75;

/// Grid cell index. Ordering is lexicographic on `(x, y)`, which is the
/// tie-breaking order used throughout planning.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Cell {
    pub x: usize,
    pub y: usize,
}

impl Cell {
    pub const fn new(x: usize, y: usize) -> Self {
        Self { x, y }
    }

    pub fn manhattan(self, other: Cell) -> usize {
        self.x.abs_diff(other.x) + self.y.abs_diff(other.y)
    }

    pub fn chebyshev(self, other: Cell) -> usize {
        self.x.abs_diff(other.x).max(self.y.abs_diff(other.y))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridDims {
    pub width: usize,
    pub height: usize,
    /// Meters per cell.
    pub resolution: f64,
}

impl GridDims {
    pub fn new(width: usize, height: usize, resolution: f64) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::domain(format!("grid must be at least 1x1, got {width}x{height}")));
        }
        if !(resolution > 0.0 && resolution.is_finite()) {
            return Err(Error::domain(format!("resolution must be positive, got {resolution}")));
        }
        Ok(Self { width, height, resolution })
    }

    pub fn len(&self) -> usize {
        self.width * self.height
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn contains(&self, cell: Cell) -> bool {
        cell.x < self.width && cell.y < self.height
    }

    pub fn index(&self, cell: Cell) -> usize {
        debug_assert!(self.contains(cell));
        cell.y * self.width + cell.x
    }

    pub fn cell(&self, index: usize) -> Cell {
        Cell::new(index % self.width, index / self.width)
    }

    /// All cells in row-major order.
    pub fn cells(&self) -> impl Iterator<Item = Cell> + '_ {
        (0..self.len()).map(|i| self.cell(i))
    }

    pub fn width_m(&self) -> f64 {
        self.width as f64 * self.resolution
    }

    pub fn height_m(&self) -> f64 {
        self.height as f64 * self.resolution
    }

    /// Cell containing the metric point, or `None` when outside the map.
    pub fn cell_at(&self, x: f64, y: f64) -> Option<Cell> {
        if !(x >= 0.0 && y >= 0.0 && x < self.width_m() && y < self.height_m()) {
            return None;
        }
        let cx = ((x / self.resolution).floor() as usize).min(self.width - 1);
        let cy = ((y / self.resolution).floor() as usize).min(self.height - 1);
        Some(Cell::new(cx, cy))
    }

    pub fn center_of(&self, cell: Cell) -> (f64, f64) {
        (
            (cell.x as f64 + 0.5) * self.resolution,
            (cell.y as f64 + 0.5) * self.resolution,
        )
    }

    /// 4-neighbors inside the grid, in `(x, y)` order.
    pub fn neighbors4(&self, cell: Cell) -> impl Iterator<Item = Cell> + '_ {
        let Cell { x, y } = cell;
        let cands = [
            x.checked_sub(1).map(|nx| Cell::new(nx, y)),
            y.checked_sub(1).map(|ny| Cell::new(x, ny)),
            Some(Cell::new(x, y + 1)),
            Some(Cell::new(x + 1, y)),
        ];
        cands.into_iter().flatten().filter(|c| self.contains(*c))
    }

    /// 8-neighbors inside the grid.
    pub fn neighbors8(&self, cell: Cell) -> impl Iterator<Item = Cell> + '_ {
        let (x, y) = (cell.x as isize, cell.y as isize);
        (-1isize..=1)
            .flat_map(move |dx| (-1isize..=1).map(move |dy| (dx, dy)))
            .filter(|&(dx, dy)| dx != 0 || dy != 0)
            .filter_map(move |(dx, dy)| {
                let (nx, ny) = (x + dx, y + dy);
                (nx >= 0 && ny >= 0).then(|| Cell::new(nx as usize, ny as usize))
            })
            .filter(|c| self.contains(*c))
    }
}

/// Metric pose; heading normalized into `(-pi, pi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pose {
    pub x: f64,
    pub y: f64,
    pub heading: f64,
}

impl Pose {
    pub fn new(x: f64, y: f64, heading: f64) -> Self {
        Self { x, y, heading: normalize_angle(heading) }
    }

    pub fn at_cell(dims: &GridDims, cell: Cell) -> Self {
        let (x, y) = dims.center_of(cell);
        Self::new(x, y, 0.0)
    }

    pub fn cell(&self, dims: &GridDims) -> Option<Cell> {
        dims.cell_at(self.x, self.y)
    }
}

/// Wraps an angle into `(-pi, pi]`.
pub fn normalize_angle(a: f64) -> f64 {
    let mut a = a % (2.0 * PI);
    if a <= -PI {
        a += 2.0 * PI;
    } else if a > PI {
        a -= 2.0 * PI;
    }
    a
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CellState {
    Free,
    Unknown,
    Occupied,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OccupancyGrid {
    dims: GridDims,
    cells: Vec<f64>,
}

impl OccupancyGrid {
    /// Every cell starts unknown.
    pub fn unknown(dims: GridDims) -> Self {
        Self { dims, cells: vec![UNKNOWN; dims.len()] }
    }

    pub fn from_values(dims: GridDims, cells: Vec<f64>) -> Result<Self> {
        if cells.len() != dims.len() {
            return Err(Error::domain(format!(
                "expected {} cell values, got {}",
                dims.len(),
                cells.len()
            )));
        }
        if let Some(bad) = cells.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(Error::domain(format!("occupancy {bad} outside [0, 1]")));
        }
        Ok(Self { dims, cells })
    }

    pub fn dims(&self) -> &GridDims {
        &self.dims
    }

    pub fn values(&self) -> &[f64] {
        &self.cells
    }

    pub fn get(&self, cell: Cell) -> f64 {
        self.cells[self.dims.index(cell)]
    }

    pub fn set(&mut self, cell: Cell, p: f64) {
        debug_assert!((0.0..=1.0).contains(&p));
        let i = self.dims.index(cell);
        self.cells[i] = p;
    }

    pub fn state(&self, cell: Cell) -> CellState {
        classify(self.get(cell))
    }

    pub fn is_unknown(&self, cell: Cell) -> bool {
        self.state(cell) == CellState::Unknown
    }

    pub fn is_free(&self, cell: Cell) -> bool {
        self.state(cell) == CellState::Free
    }

    /// Known-occupied cells are the only ones planners refuse to enter.
    pub fn is_occupied(&self, cell: Cell) -> bool {
        self.state(cell) == CellState::Occupied
    }

    pub fn is_traversable(&self, cell: Cell) -> bool {
        self.dims.contains(cell) && !self.is_occupied(cell)
    }

    pub fn count_state(&self, state: CellState) -> usize {
        self.cells.iter().filter(|p| classify(**p) == state).count()
    }

    /// Snaps every footprint cell to `1.0` if it is a true obstacle, else `0.0`.
    pub fn observe(&mut self, fov: &FovFootprint, truth: &ObstacleSet) {
        for &c in fov.cells() {
            self.set(c, if truth.contains(c) { OCCUPIED } else { FREE });
        }
    }

    /// Relaxes every cell toward unknown: `p <- p + beta (0.5 - p)`.
    pub fn decay_to_unknown(&mut self, beta: f64) -> Result<()> {
        if !(0.0..=1.0).contains(&beta) {
            return Err(Error::domain(format!("decay rate {beta} outside [0, 1]")));
        }
        for p in &mut self.cells {
            *p += beta * (UNKNOWN - *p);
        }
        Ok(())
    }

    pub fn total_entropy(&self) -> f64 {
        self.cells.iter().map(|&p| binary_entropy(p)).sum()
    }

    pub fn entropy(&self, cell: Cell) -> f64 {
        binary_entropy(self.get(cell))
    }

    /// Portable graymap, one pixel per cell, `round(p * 255)`; image row `j`
    /// is grid row `y = j`.
    pub fn to_pgm(&self, binary: bool) -> Vec<u8> {
        encode_pgm(&self.dims, &self.cells, binary)
    }
}

fn classify(p: f64) -> CellState {
    if p <= FREE_BAND {
        CellState::Free
    } else if p >= OCCUPIED_BAND {
        CellState::Occupied
    } else {
        CellState::Unknown
    }
}

/// Encodes values in `[0, 1]` as a PGM image (P5 when `binary`, else P2).
pub fn encode_pgm(dims: &GridDims, values: &[f64], binary: bool) -> Vec<u8> {
    let pixel = |v: f64| (v.clamp(0.0, 1.0) * 255.0).round() as u8;
    let mut out = format!(
        "{}\n{} {}\n255\n",
        if binary { "P5" } else { "P2" },
        dims.width,
        dims.height
    )
    .into_bytes();
    if binary {
        out.extend(values.iter().map(|&v| pixel(v)));
    } else {
        for row in values.chunks(dims.width) {
            let line: Vec<String> = row.iter().map(|&v| pixel(v).to_string()).collect();
            out.extend_from_slice(line.join(" ").as_bytes());
            out.push(b'\n');
        }
    }
    out
}

/// Shannon entropy in bits of a binary variable with `P(occupied) = p`.
pub fn cell_entropy(p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::domain(format!("probability {p} outside [0, 1]")));
    }
    Ok(binary_entropy(p))
}

pub(crate) fn binary_entropy(p: f64) -> f64 {
    fn plogp(p: f64) -> f64 {
        if p <= 0.0 {
            0.0
        } else {
            p * p.log2()
        }
    }
    let h = -(plogp(p) + plogp(1.0 - p));
    h.clamp(0.0, 1.0)
}

/// Ground-truth obstacle mask.
#[derive(Debug, Clone, PartialEq)]
pub struct ObstacleSet {
    dims: GridDims,
    mask: Vec<bool>,
}

impl ObstacleSet {
    pub fn empty(dims: GridDims) -> Self {
        Self { dims, mask: vec![false; dims.len()] }
    }

    pub fn from_cells(dims: GridDims, cells: impl IntoIterator<Item = Cell>) -> Self {
        let mut set = Self::empty(dims);
        for c in cells {
            set.insert(c);
        }
        set
    }

    pub fn insert(&mut self, cell: Cell) {
        if self.dims.contains(cell) {
            let i = self.dims.index(cell);
            self.mask[i] = true;
        }
    }

    pub fn contains(&self, cell: Cell) -> bool {
        self.dims.contains(cell) && self.mask[self.dims.index(cell)]
    }

    pub fn len(&self) -> usize {
        self.mask.iter().filter(|b| **b).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = Cell> + '_ {
        self.mask
            .iter()
            .enumerate()
            .filter(|(_, b)| **b)
            .map(|(i, _)| self.dims.cell(i))
    }
}

/// Cells seen from one pose. Stored sorted by `(x, y)` without duplicates.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FovFootprint {
    cells: Vec<Cell>,
}

impl FovFootprint {
    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn contains(&self, cell: Cell) -> bool {
        self.cells.binary_search(&cell).is_ok()
    }

    pub fn from_cells(cells: impl IntoIterator<Item = Cell>) -> Self {
        let set: BTreeSet<Cell> = cells.into_iter().collect();
        Self { cells: set.into_iter().collect() }
    }
}

/// Square footprint of side `2 range + 1` centered on the pose's cell,
/// clipped to the grid. No occlusion.
pub fn fov_cells(pose: &Pose, range: usize, dims: &GridDims) -> Result<FovFootprint> {
    let center = pose
        .cell(dims)
        .ok_or_else(|| Error::domain(format!("pose ({}, {}) outside map", pose.x, pose.y)))?;
    Ok(fov_around(center, range, dims))
}

/// Same footprint, centered directly on a cell.
pub fn fov_around(center: Cell, range: usize, dims: &GridDims) -> FovFootprint {
    let x0 = center.x.saturating_sub(range);
    let y0 = center.y.saturating_sub(range);
    let x1 = (center.x + range).min(dims.width - 1);
    let y1 = (center.y + range).min(dims.height - 1);
    let cells = (x0..=x1)
        .flat_map(|x| (y0..=y1).map(move |y| Cell::new(x, y)))
        .collect();
    FovFootprint { cells }
}
