//! Corridor scanning shared by both evaluators.
//!
//! A segment of length `L_seg` is probed by rows of downward rays spaced
//! `row_gap` apart. Each row sweeps `sweep_width` centred on the lane at
//! `x_step` spacing. A ray whose first hit is an obstacle marks the lateral
//! slice `[x - step/2, x + step/2]` as covered; the row is passable when the
//! uncovered remainder of the sweep holds a gap of at least `w_clear`.
//! One overlap box over the whole segment complements the rays.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::geometry::{Aabb, ColliderSet, Layer, LayerMask, Ray, Vec3};
use crate::spawner::{ceil_eps, floor_eps};

/// Gap comparisons tolerate this much rounding.
pub const GAP_EPS: f64 = 1e-9;
/// Height of the overlap box above the ground surface.
pub const OVERLAP_HEIGHT: f64 = 2.5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AgentKind {
    Aerial,
    Ground,
}

impl AgentKind {
    pub fn name(self) -> &'static str {
        match self {
            AgentKind::Aerial => "aerial",
            AgentKind::Ground => "ground",
        }
    }

    /// Aerial rays stop at the terrain; ground rays only see obstacles.
    pub fn ray_mask(self) -> LayerMask {
        match self {
            AgentKind::Aerial => LayerMask::GROUND.with(Layer::Obstacles),
            AgentKind::Ground => LayerMask::OBSTACLES,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockerInfo {
    pub owner_id: u64,
    pub root_name: String,
    pub position: Vec3,
    pub size: Vec3,
    pub layer: Layer,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanSegmentResult {
    pub agent: AgentKind,
    pub segment_index: u64,
    pub segment_z: f64,
    pub rows: usize,
    pub rays: usize,
    pub passable: bool,
    pub blocked_rows: usize,
    /// Obstacle hits summed over all rows.
    pub hit_count: usize,
    pub overlap_queries: usize,
    pub overlap_hits: usize,
    /// Sorted by owner id.
    pub blockers: Vec<BlockerInfo>,
}

/// Rows per segment and worst-case rays per row.
pub fn scan_geometry(cfg: &RunConfig) -> (usize, usize) {
    let rows = ceil_eps(cfg.seg_length / cfg.row_gap) as usize + 1;
    let rays = floor_eps(cfg.sweep_width / cfg.x_step) as usize + 1;
    (rows, rays)
}

pub fn ray_budget(cfg: &RunConfig) -> usize {
    let (rows, rays) = scan_geometry(cfg);
    rows * rays
}

/// Scanner segments needed to cover one tile.
pub fn segments_per_tile(cfg: &RunConfig) -> usize {
    ceil_eps(cfg.tile_length / cfg.seg_length) as usize
}

pub fn segment_z(index: u64, cfg: &RunConfig) -> f64 {
    cfg.start_z() + index as f64 * cfg.seg_length
}

/// Lateral sweep `[lo, hi]` centred on the lane.
pub fn sweep_lane(cfg: &RunConfig) -> (f64, f64) {
    (-cfg.sweep_width / 2.0, cfg.sweep_width / 2.0)
}

/// True iff the part of `lane` not covered by any interval contains a gap
/// of length at least `w_clear`. Intervals are closed and may overlap or
/// stick out of the lane.
pub fn row_passable(hit_intervals: &[(f64, f64)], lane: (f64, f64), w_clear: f64) -> bool {
    let mut iv: Vec<(f64, f64)> = hit_intervals
        .iter()
        .map(|&(a, b)| (a.max(lane.0), b.min(lane.1)))
        .filter(|(a, b)| a <= b)
        .collect();
    iv.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut cursor = lane.0;
    for (a, b) in iv {
        if a - cursor >= w_clear - GAP_EPS {
            return true;
        }
        cursor = cursor.max(b);
    }
    lane.1 - cursor >= w_clear - GAP_EPS
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct RowScan {
    pub rays: usize,
    pub passable: bool,
    pub obstacle_hits: usize,
    pub hit_owners: Vec<u64>,
    pub intervals: Vec<(f64, f64)>,
}

/// Fires one row of rays at `z_row`. With `early_exit` the row stops as
/// soon as the verdict can no longer change.
pub fn scan_row(colliders: &ColliderSet, z_row: f64, agent: AgentKind, cfg: &RunConfig, early_exit: bool) -> RowScan {
    let (_, n) = scan_geometry(cfg);
    let lane = sweep_lane(cfg);
    let half = cfg.x_step / 2.0;
    let y_scan = cfg.aerial_altitude;
    let mask = agent.ray_mask();
    let mut row = RowScan::default();
    // Left edge of the current uncovered run and the widest closed run.
    let mut run_start = lane.0;
    let mut widest = 0.0f64;

    for k in 0..n {
        let x = lane.0 + k as f64 * cfg.x_step;
        row.rays += 1;
        let ray = Ray::down(Vec3::new(x, y_scan, z_row), y_scan + 10.0);
        let hit = colliders
            .raycast(&ray, mask)
            .filter(|h| h.collider.layer == Layer::Obstacles);
        let right = (x + half).min(lane.1);
        if let Some(h) = hit {
            let left = (x - half).max(lane.0);
            row.obstacle_hits += 1;
            row.hit_owners.push(h.collider.owner_id);
            row.intervals.push((x - half, x + half));
            widest = widest.max(left - run_start);
            run_start = run_start.max(right);
        }
        if !early_exit {
            continue;
        }
        // Later intervals start at or beyond `right`, so everything left of
        // it is final.
        let settled = widest.max(right - run_start);
        if settled >= cfg.w_clear - GAP_EPS {
            row.passable = true;
            return row;
        }
        if widest.max(lane.1 - run_start) < cfg.w_clear - GAP_EPS {
            row.passable = false;
            return row;
        }
    }
    row.passable = row_passable(&row.intervals, lane, cfg.w_clear);
    row
}

/// Overlap box covering the segment's corridor window.
pub fn segment_box(index: u64, cfg: &RunConfig) -> Aabb {
    let z0 = segment_z(index, cfg);
    let (lo, hi) = sweep_lane(cfg);
    Aabb::new(
        Vec3::new((lo + hi) / 2.0, OVERLAP_HEIGHT / 2.0, z0 + cfg.seg_length / 2.0),
        Vec3::new(cfg.sweep_width / 2.0, OVERLAP_HEIGHT / 2.0, cfg.seg_length / 2.0),
    )
}

/// Scans segment `index` against the current colliders.
pub fn scan_segment(
    colliders: &ColliderSet,
    index: u64,
    agent: AgentKind,
    cfg: &RunConfig,
    early_exit: bool,
) -> ScanSegmentResult {
    let (rows, _) = scan_geometry(cfg);
    let z0 = segment_z(index, cfg);
    let mut rays = 0;
    let mut hit_count = 0;
    let mut blocked_rows = 0;
    let mut owners: BTreeMap<u64, BlockerInfo> = BTreeMap::new();
    let mut add = |c: &crate::geometry::Collider| {
        owners.entry(c.owner_id).or_insert_with(|| BlockerInfo {
            owner_id: c.owner_id,
            root_name: c.root_name.clone(),
            position: c.aabb.center,
            size: c.aabb.size(),
            layer: c.layer,
        });
    };

    for r in 0..rows {
        let z_row = z0 + r as f64 * cfg.row_gap;
        let row = scan_row(colliders, z_row, agent, cfg, early_exit);
        rays += row.rays;
        hit_count += row.obstacle_hits;
        if !row.passable {
            blocked_rows += 1;
        }
        for id in row.hit_owners {
            if let Some(c) = colliders.get(id) {
                add(c);
            }
        }
    }
    let overlaps = colliders.overlap_box(&segment_box(index, cfg), LayerMask::OBSTACLES);
    let overlap_hits = overlaps.len();
    for c in overlaps {
        add(c);
    }
    ScanSegmentResult {
        agent,
        segment_index: index,
        segment_z: z0,
        rows,
        rays,
        passable: blocked_rows == 0,
        blocked_rows,
        hit_count,
        overlap_queries: 1,
        overlap_hits,
        blockers: owners.into_values().collect(),
    }
}

/// Segments `next..` whose far edge the agent has passed and that start
/// before the finish line.
pub fn due_segments(next: u64, agent_z: f64, cfg: &RunConfig) -> std::ops::Range<u64> {
    let mut end = next;
    loop {
        let z0 = segment_z(end, cfg);
        if z0 >= cfg.finish_z() || z0 + cfg.seg_length > agent_z {
            break;
        }
        end += 1;
    }
    next..end
}
