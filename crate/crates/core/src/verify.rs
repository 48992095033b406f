//! Structural checks recomputed from a configuration: spawner saturation,
//! scan budget, and evaluator window ordering.

use std::fmt;

use serde::Serialize;

use crate::config::RunConfig;
use crate::scan::{ray_budget, scan_geometry, segments_per_tile};
use crate::spawner::{saturation_bound, saturation_bound_exhaustive, saturation_threshold, TileGrid};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub group: &'static str,
    pub name: String,
    pub expected: String,
    pub actual: String,
    pub status: Status,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != Status::Fail)
    }

    fn push(
        &mut self,
        group: &'static str,
        name: &str,
        expected: impl fmt::Display,
        actual: impl fmt::Display,
        ok: bool,
        applies: bool,
    ) {
        let status = match (applies, ok) {
            (false, _) => Status::Skip,
            (true, true) => Status::Pass,
            (true, false) => Status::Fail,
        };
        self.checks.push(Check {
            group,
            name: name.to_string(),
            expected: expected.to_string(),
            actual: actual.to_string(),
            status,
        });
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            let status = match c.status {
                Status::Pass => "PASS",
                Status::Fail => "FAIL",
                Status::Skip => "SKIP",
            };
            write!(f, "{status} {} {}: actual {}", c.group, c.name, c.actual)?;
            match c.status {
                Status::Skip => writeln!(
                    f,
                    " (reference value {} applies to the default geometry only)",
                    c.expected
                )?,
                _ => writeln!(f, ", expected {}", c.expected)?,
            }
        }
        let fails = self.checks.iter().filter(|c| c.status == Status::Fail).count();
        writeln!(f, "{} checks, {} failed", self.checks.len(), fails)
    }
}

fn same(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9
}

pub fn verify(cfg: &RunConfig) -> VerifyReport {
    let d = RunConfig::default();
    let mut r = VerifyReport::default();

    let grid = TileGrid::from_config(cfg);
    let default_grid = same(cfg.x_range[0], d.x_range[0])
        && same(cfg.x_range[1], d.x_range[1])
        && same(cfg.clear_half_width, d.clear_half_width);
    let mis = saturation_bound(&grid);
    let segs = grid.candidate_segments();
    r.push(
        "spawner",
        "lateral width W",
        "17.65",
        format!("{:.2}", grid.width),
        same(grid.width, 17.65),
        default_grid,
    );
    r.push(
        "spawner",
        "grid cells N",
        18,
        grid.cells,
        grid.cells == 18,
        default_grid,
    );
    r.push(
        "spawner",
        "candidate cells",
        14,
        grid.candidate_cells().len(),
        grid.candidate_cells().len() == 14,
        default_grid,
    );
    r.push(
        "spawner",
        "candidate segments",
        "[5, 9]",
        format!("{segs:?}"),
        segs == [5, 9],
        default_grid,
    );
    r.push("spawner", "maximum independent set", 8, mis, mis == 8, default_grid);
    match saturation_bound_exhaustive(&grid) {
        Some(brute) => r.push(
            "spawner",
            "closed form equals exhaustive search",
            brute,
            mis,
            brute == mis,
            true,
        ),
        None => r.push(
            "spawner",
            "closed form equals exhaustive search",
            "<= 26 candidate cells",
            grid.candidate_cells().len(),
            false,
            false,
        ),
    }
    let p_star = saturation_threshold(&grid);
    r.push(
        "spawner",
        "saturation threshold p* (%)",
        format!("{:.4}", 800.0 / 18.0),
        format!("{p_star:.4}"),
        p_star == 800.0 / 18.0,
        default_grid,
    );

    let default_scan = same(cfg.seg_length, d.seg_length)
        && same(cfg.row_gap, d.row_gap)
        && same(cfg.x_step, d.x_step)
        && same(cfg.sweep_width, d.sweep_width)
        && same(cfg.tile_length, d.tile_length);
    let (rows, rays) = scan_geometry(cfg);
    let budget = ray_budget(cfg);
    let per_tile = segments_per_tile(cfg);
    r.push("scan", "rows per segment", 21, rows, rows == 21, default_scan);
    r.push("scan", "rays per row (worst case)", 44, rays, rays == 44, default_scan);
    r.push(
        "scan",
        "ray budget per segment",
        924,
        budget,
        budget == 924,
        default_scan,
    );
    r.push(
        "scan",
        "budget equals rows x rays",
        rows * rays,
        budget,
        rows * rays == budget,
        true,
    );
    r.push("scan", "segments per tile", 10, per_tile, per_tile == 10, default_scan);

    let default_windows = same(cfg.delta_z_aerial, d.delta_z_aerial)
        && same(cfg.d_lookahead_ground, d.d_lookahead_ground)
        && same(cfg.d_ahead, d.d_ahead);
    r.push(
        "windows",
        "aerial offset (m)",
        200,
        cfg.delta_z_aerial,
        same(cfg.delta_z_aerial, 200.0),
        default_windows,
    );
    r.push(
        "windows",
        "ground look-ahead (m)",
        300,
        cfg.d_lookahead_ground,
        same(cfg.d_lookahead_ground, 300.0),
        default_windows,
    );
    r.push(
        "windows",
        "nav window ahead (m)",
        600,
        cfg.d_ahead,
        same(cfg.d_ahead, 600.0),
        default_windows,
    );
    r.push(
        "windows",
        "aerial < ground < window",
        "strictly increasing",
        format!("{} < {} < {}", cfg.delta_z_aerial, cfg.d_lookahead_ground, cfg.d_ahead),
        cfg.delta_z_aerial < cfg.d_lookahead_ground && cfg.d_lookahead_ground < cfg.d_ahead,
        true,
    );
    r
}
