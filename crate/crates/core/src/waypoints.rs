//! Candidate goal generation: global waypoints from a vertical cell
//! decomposition of the unknown region, local waypoints from frontier
//! clusters.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::gridworld::{Cell, GridDims, OccupancyGrid};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WaypointKind {
    Global,
    Local,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Waypoint {
    pub cell: Cell,
    pub kind: WaypointKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaypointConfig {
    /// Smallest frontier cluster (cells) that yields a local waypoint.
    pub min_cluster: usize,
    /// Smallest decomposition rectangle (cells) that yields a global waypoint.
    pub min_cell_area: usize,
}

impl Default for WaypointConfig {
    fn default() -> Self {
        Self { min_cluster: 3, min_cell_area: 4 }
    }
}

/// Axis-aligned block of cells, inclusive on both ends.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Rect {
    pub x0: usize,
    pub y0: usize,
    pub x1: usize,
    pub y1: usize,
}

impl Rect {
    pub fn width(&self) -> usize {
        self.x1 - self.x0 + 1
    }

    pub fn height(&self) -> usize {
        self.y1 - self.y0 + 1
    }

    pub fn area(&self) -> usize {
        self.width() * self.height()
    }

    /// Central cell; even sides round up from the lower corner, so a 4x4 block
    /// at the origin yields (2, 2).
    pub fn center(&self) -> Cell {
        Cell::new(self.x0 + self.width() / 2, self.y0 + self.height() / 2)
    }

    pub fn contains(&self, c: Cell) -> bool {
        (self.x0..=self.x1).contains(&c.x) && (self.y0..=self.y1).contains(&c.y)
    }
}

/// Maximal vertical runs `(y0, y1)` of unknown cells in column `x`.
fn column_runs(grid: &OccupancyGrid, x: usize) -> Vec<(usize, usize)> {
    let h = grid.dims().height;
    let mut runs = Vec::new();
    let mut start = None;
    for y in 0..h {
        match (grid.is_unknown(Cell::new(x, y)), start) {
            (true, None) => start = Some(y),
            (false, Some(s)) => {
                runs.push((s, y - 1));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        runs.push((s, h - 1));
    }
    runs
}

/// Left-to-right column sweep over the unknown mask. Runs with identical
/// vertical extent in adjacent columns merge into one rectangle. The result
/// partitions the unknown cells and is sorted by `(x0, y0)`.
pub fn vertical_decomposition(grid: &OccupancyGrid) -> Vec<Rect> {
    let mut closed = Vec::new();
    let mut open: Vec<Rect> = Vec::new();
    for x in 0..grid.dims().width {
        let runs = column_runs(grid, x);
        let mut next = Vec::with_capacity(runs.len());
        for (y0, y1) in runs {
            if let Some(pos) = open.iter().position(|r| r.y0 == y0 && r.y1 == y1) {
                let mut r = open.swap_remove(pos);
                r.x1 = x;
                next.push(r);
            } else {
                next.push(Rect { x0: x, y0, x1: x, y1 });
            }
        }
        closed.append(&mut open);
        open = next;
    }
    closed.append(&mut open);
    closed.sort();
    closed
}

/// One global waypoint per decomposition rectangle of at least
/// `min_cell_area` cells, placed at the rectangle center.
pub fn sample_waypoints_vcd(grid: &OccupancyGrid, min_cell_area: usize) -> Vec<Waypoint> {
    vertical_decomposition(grid)
        .into_iter()
        .filter(|r| r.area() >= min_cell_area)
        .map(|r| Waypoint { cell: r.center(), kind: WaypointKind::Global })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrontierCluster {
    /// Members sorted by `(x, y)`.
    pub cells: Vec<Cell>,
    pub centroid_cell: Cell,
}

impl FrontierCluster {
    pub fn waypoint(&self) -> Waypoint {
        Waypoint { cell: self.centroid_cell, kind: WaypointKind::Local }
    }
}

/// Known-free cell with at least one unknown 4-neighbor.
pub fn is_frontier(grid: &OccupancyGrid, cell: Cell) -> bool {
    grid.is_free(cell) && grid.dims().neighbors4(cell).any(|n| grid.is_unknown(n))
}

/// 8-connected components of the frontier mask with at least `min_cluster`
/// members, ordered by their smallest cell.
pub fn get_frontiers(grid: &OccupancyGrid, min_cluster: usize) -> Vec<FrontierCluster> {
    let dims = *grid.dims();
    let mask: Vec<bool> = dims.cells().map(|c| is_frontier(grid, c)).collect();
    let mut seen = vec![false; dims.len()];
    let mut clusters = Vec::new();

    // Column-major scan so components are discovered in (x, y) order.
    for x in 0..dims.width {
        for y in 0..dims.height {
            let start = Cell::new(x, y);
            let si = dims.index(start);
            if !mask[si] || seen[si] {
                continue;
            }
            let members = flood(&dims, &mask, &mut seen, start);
            if members.len() >= min_cluster.max(1) {
                clusters.push(make_cluster(members));
            }
        }
    }
    clusters
}

fn flood(dims: &GridDims, mask: &[bool], seen: &mut [bool], start: Cell) -> Vec<Cell> {
    let mut members = Vec::new();
    let mut queue = VecDeque::from([start]);
    seen[dims.index(start)] = true;
    while let Some(c) = queue.pop_front() {
        members.push(c);
        for n in dims.neighbors8(c) {
            let ni = dims.index(n);
            if mask[ni] && !seen[ni] {
                seen[ni] = true;
                queue.push_back(n);
            }
        }
    }
    members.sort();
    members
}

fn make_cluster(cells: Vec<Cell>) -> FrontierCluster {
    let n = cells.len() as f64;
    let cx = cells.iter().map(|c| c.x as f64).sum::<f64>() / n;
    let cy = cells.iter().map(|c| c.y as f64).sum::<f64>() / n;
    let dist = |c: &Cell| (c.x as f64 - cx).powi(2) + (c.y as f64 - cy).powi(2);
    // `cells` is sorted, so a strict comparison keeps the lower index on ties.
    let mut centroid_cell = cells[0];
    for c in &cells[1..] {
        if dist(c) < dist(&centroid_cell) {
            centroid_cell = *c;
        }
    }
    FrontierCluster { cells, centroid_cell }
}

/// Both waypoint families for one planning round. Falls back to size-1
/// thresholds when unknown cells remain but the configured minimums filter
/// out every candidate, so small leftover pockets stay reachable.
pub fn collect_waypoints(grid: &OccupancyGrid, config: &WaypointConfig) -> Vec<Waypoint> {
    let gather = |min_area: usize, min_cluster: usize| {
        let mut out = sample_waypoints_vcd(grid, min_area);
        out.extend(get_frontiers(grid, min_cluster).iter().map(FrontierCluster::waypoint));
        out
    };
    let out = gather(config.min_cell_area, config.min_cluster);
    if out.is_empty() && grid.count_state(crate::gridworld::CellState::Unknown) > 0 {
        return gather(1, 1);
    }
    out
}
