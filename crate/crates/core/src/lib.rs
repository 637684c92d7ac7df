//! Information-theoretic multi-agent target search on occupancy grids.
//!
//! Agents keep a shared occupancy grid and a histogram belief over the target
//! cell. Each planning round samples goal cells from a vertical decomposition
//! of the unknown region and from frontier clusters, plans A* paths to them,
//! and lets agents pick, in hierarchy order, the path whose viewpoints expose
//! the most unclaimed map entropy net of travel cost.

pub mod belief;
pub mod error;
pub mod gridworld;
pub mod planner;
pub mod scenario;
pub mod selection;
pub mod sim;
pub mod waypoints;

pub use error::{Error, Result};
