//! SVG trajectory plot: obstacles, final map state, one colored stroke per
//! agent. Image coordinates match the graymap snapshots (row `y` downward).

use std::fmt::Write as _;

use infosearch::gridworld::{CellState, ObstacleSet, OccupancyGrid, Pose};

const PALETTE: [&str; 10] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf", "#bcbd22", "#7f7f7f",
];

const PX_PER_M: f64 = 24.0;

pub fn agent_color(i: usize) -> &'static str {
    PALETTE[i % PALETTE.len()]
}

pub fn trajectory_svg(
    grid: &OccupancyGrid,
    truth: &ObstacleSet,
    trajectories: &[Vec<Pose>],
    target: Option<(f64, f64)>,
) -> String {
    let dims = grid.dims();
    let res = dims.resolution * PX_PER_M;
    let (w, h) = (dims.width_m() * PX_PER_M, dims.height_m() * PX_PER_M);
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w:.0}" height="{h:.0}" viewBox="0 0 {w:.1} {h:.1}">"#
    );
    let _ = writeln!(svg, r##"<rect width="{w:.1}" height="{h:.1}" fill="#ffffff"/>"##);
    for c in dims.cells() {
        let fill = if truth.contains(c) {
            "#333333"
        } else {
            match grid.state(c) {
                CellState::Unknown => "#e8e8e8",
                CellState::Free => "#fff7c2",
                CellState::Occupied => "#333333",
            }
        };
        let _ = writeln!(
            svg,
            r##"<rect x="{:.1}" y="{:.1}" width="{res:.1}" height="{res:.1}" fill="{fill}" stroke="#cccccc" stroke-width="0.5"/>"##,
            c.x as f64 * res,
            c.y as f64 * res
        );
    }
    for (i, traj) in trajectories.iter().enumerate() {
        if traj.is_empty() {
            continue;
        }
        let color = agent_color(i);
        let points: Vec<String> = traj
            .iter()
            .map(|p| format!("{:.1},{:.1}", p.x * PX_PER_M, p.y * PX_PER_M))
            .collect();
        let _ = writeln!(
            svg,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="2"/>"#,
            points.join(" ")
        );
        let s = traj[0];
        let _ = writeln!(
            svg,
            r#"<circle cx="{:.1}" cy="{:.1}" r="4" fill="{color}"/>"#,
            s.x * PX_PER_M,
            s.y * PX_PER_M
        );
    }
    if let Some((x, y)) = target {
        let _ = writeln!(
            svg,
            r##"<rect x="{:.1}" y="{:.1}" width="{res:.1}" height="{res:.1}" fill="none" stroke="#ff0000" stroke-width="2"/>"##,
            x * res,
            y * res
        );
    }
    svg.push_str("</svg>\n");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;
    use infosearch::gridworld::GridDims;

    #[test]
    fn one_stroke_per_agent() {
        let d = GridDims::new(4, 3, 1.0).unwrap();
        let grid = OccupancyGrid::unknown(d);
        let truth = ObstacleSet::empty(d);
        let trajs = vec![
            vec![Pose::new(0.5, 0.5, 0.0), Pose::new(1.5, 0.5, 0.0)],
            vec![Pose::new(3.5, 2.5, 0.0)],
        ];
        let svg = trajectory_svg(&grid, &truth, &trajs, Some((1.0, 1.0)));
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(svg.contains(agent_color(0)) && svg.contains(agent_color(1)));
        assert!(svg.starts_with("<svg") && svg.ends_with("</svg>\n"));
    }
}
