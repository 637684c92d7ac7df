//! Grid A* and speed-aware viewpoint sampling along a path.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gridworld::{Cell, OccupancyGrid};
use crate::selection::AgentSpec;

/// 4-connected cell sequence from start to goal, both inclusive.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Path {
    cells: Vec<Cell>,
}

impl Path {
    pub fn new(cells: Vec<Cell>) -> Result<Self> {
        if cells.is_empty() {
            return Err(Error::domain("path needs at least one cell"));
        }
        if cells.windows(2).any(|w| w[0].manhattan(w[1]) != 1) {
            return Err(Error::domain("consecutive path cells must be 4-adjacent"));
        }
        Ok(Self { cells })
    }

    pub fn hold(at: Cell) -> Self {
        Self { cells: vec![at] }
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn steps(&self) -> usize {
        self.cells.len() - 1
    }

    pub fn start(&self) -> Cell {
        self.cells[0]
    }

    pub fn goal(&self) -> Cell {
        *self.cells.last().expect("paths are never empty")
    }

    /// First `steps + 1` cells.
    pub fn prefix(&self, steps: usize) -> Path {
        let end = steps.min(self.steps());
        Path { cells: self.cells[..=end].to_vec() }
    }
}

/// Minimum-step 4-connected path with unit costs and a Manhattan heuristic.
/// Known-occupied cells are blocked; unknown cells are traversable. Among
/// equal `f` the lower `(x, y)` cell is expanded first.
pub fn astar(grid: &OccupancyGrid, start: Cell, goal: Cell) -> Result<Path> {
    let dims = *grid.dims();
    for (what, c) in [("start", start), ("goal", goal)] {
        if !grid.is_traversable(c) {
            return Err(Error::domain(format!("{what} {c:?} is not traversable")));
        }
    }

    let n = dims.len();
    let mut g = vec![usize::MAX; n];
    let mut parent = vec![usize::MAX; n];
    let mut closed = vec![false; n];
    let mut open = BinaryHeap::new();

    let si = dims.index(start);
    g[si] = 0;
    open.push(Reverse((start.manhattan(goal), start.x, start.y)));

    while let Some(Reverse((_, x, y))) = open.pop() {
        let cell = Cell::new(x, y);
        let ci = dims.index(cell);
        if closed[ci] {
            continue;
        }
        closed[ci] = true;
        if cell == goal {
            let mut cells = vec![goal];
            let mut at = ci;
            while at != si {
                at = parent[at];
                cells.push(dims.cell(at));
            }
            cells.reverse();
            return Ok(Path { cells });
        }
        for nb in dims.neighbors4(cell) {
            let ni = dims.index(nb);
            if closed[ni] || grid.is_occupied(nb) {
                continue;
            }
            let cand = g[ci] + 1;
            if cand < g[ni] {
                g[ni] = cand;
                parent[ni] = ci;
                open.push(Reverse((cand + nb.manhattan(goal), nb.x, nb.y)));
            }
        }
    }
    Err(Error::NoPath { from: start, to: goal })
}

/// Path prefix reachable within the horizon plus the viewpoints sampled on it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReparamPath {
    /// Horizon-truncated prefix of the planned path.
    pub source: Path,
    pub viewpoints: Vec<Cell>,
    /// Sampling interval in cells.
    pub ds: usize,
    /// Step count of the untruncated path.
    pub full_steps: usize,
}

impl ReparamPath {
    pub fn steps(&self) -> usize {
        self.source.steps()
    }

    pub fn goal(&self) -> Cell {
        self.source.goal()
    }

    pub fn hold(at: Cell) -> Self {
        Self { source: Path::hold(at), viewpoints: vec![at], ds: 1, full_steps: 0 }
    }
}

/// `max(1, round(speed * sample_period))`.
pub fn sampling_interval(speed: f64, sample_period: f64) -> usize {
    ((speed * sample_period).round() as usize).max(1)
}

/// Truncates `path` to the `floor(speed * horizon)` steps the agent covers
/// within the horizon, then keeps every `ds`-th cell starting at the first.
/// A trailing partial segment contributes no viewpoint.
pub fn reparameterize(path: &Path, spec: &AgentSpec, horizon: usize, sample_period: f64) -> ReparamPath {
    let ds = sampling_interval(spec.speed, sample_period);
    let reach = (spec.speed * horizon as f64).floor() as usize;
    let source = path.prefix(reach);
    let steps = source.steps();
    let count = steps.div_ceil(ds).max(1);
    let viewpoints = (0..count).map(|i| source.cells[i * ds]).collect();
    ReparamPath { source, viewpoints, ds, full_steps: path.steps() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gridworld::GridDims;

    fn spec(speed: f64) -> AgentSpec {
        AgentSpec { speed, ..AgentSpec::default() }
    }

    fn straight(n: usize) -> Path {
        Path::new((0..=n).map(|x| Cell::new(x, 0)).collect()).unwrap()
    }

    #[test]
    fn astar_examples() {
        let g = OccupancyGrid::unknown(GridDims::new(5, 5, 1.0).unwrap());
        let p = astar(&g, Cell::new(2, 2), Cell::new(2, 2)).unwrap();
        assert_eq!(p.steps(), 0);
        let p = astar(&g, Cell::new(0, 0), Cell::new(0, 4)).unwrap();
        assert_eq!(p.steps(), 4);
        assert!(p.cells().iter().all(|c| c.x == 0));
    }

    #[test]
    fn astar_detours_and_fails_cleanly() {
        let d = GridDims::new(5, 5, 1.0).unwrap();
        let mut vals = vec![0.0; 25];
        // Wall at x = 2 except y = 4.
        for y in 0..4 {
            vals[y * 5 + 2] = 1.0;
        }
        let g = OccupancyGrid::from_values(d, vals.clone()).unwrap();
        let p = astar(&g, Cell::new(0, 0), Cell::new(4, 0)).unwrap();
        assert_eq!(p.steps(), 12);
        assert!(p.cells().iter().all(|c| !g.is_occupied(*c)));

        vals[4 * 5 + 2] = 1.0;
        let g = OccupancyGrid::from_values(d, vals).unwrap();
        assert_eq!(
            astar(&g, Cell::new(0, 0), Cell::new(4, 0)),
            Err(Error::NoPath { from: Cell::new(0, 0), to: Cell::new(4, 0) })
        );
        assert!(matches!(astar(&g, Cell::new(2, 0), Cell::new(0, 0)), Err(Error::Domain(_))));
    }

    #[test]
    fn astar_tie_break_is_stable() {
        let g = OccupancyGrid::unknown(GridDims::new(4, 4, 1.0).unwrap());
        let a = astar(&g, Cell::new(0, 0), Cell::new(3, 3)).unwrap();
        let b = astar(&g, Cell::new(0, 0), Cell::new(3, 3)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.steps(), 6);
    }

    #[test]
    fn five_viewpoints_on_ten_steps() {
        let rp = reparameterize(&straight(10), &spec(1.0), 100, 2.0);
        assert_eq!(rp.ds, 2);
        assert_eq!(rp.viewpoints.len(), 5);
        let xs: Vec<usize> = rp.viewpoints.iter().map(|c| c.x).collect();
        assert_eq!(xs, vec![0, 2, 4, 6, 8]);
    }

    #[test]
    fn reparameterize_edge_cases() {
        let single = Path::hold(Cell::new(3, 3));
        assert_eq!(reparameterize(&single, &spec(1.0), 5, 2.0).viewpoints, vec![Cell::new(3, 3)]);

        // speed 1, horizon 4: prefix of 4 steps, ds 2 -> steps 0 and 2.
        let rp = reparameterize(&straight(10), &spec(1.0), 4, 2.0);
        assert_eq!(rp.steps(), 4);
        assert_eq!(rp.full_steps, 10);
        assert_eq!(rp.viewpoints, vec![Cell::new(0, 0), Cell::new(2, 0)]);

        assert_eq!(sampling_interval(0.2, 2.0), 1);
        assert_eq!(sampling_interval(1.6, 2.0), 3);
    }

    #[test]
    fn path_rejects_gaps() {
        assert!(Path::new(vec![]).is_err());
        assert!(Path::new(vec![Cell::new(0, 0), Cell::new(1, 1)]).is_err());
    }
}
