//! Walkable-surface surrogate for a runtime-baked navigation mesh.
//!
//! A bake snapshots the tiles and obstacle footprints inside a window around
//! the player, then completes `rebake_latency` ticks later. Until then the
//! agents keep querying the previous [`WalkableField`], so tiles spawned or
//! obstacles removed after the snapshot are invisible to navigation.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::RunConfig;
use crate::geometry::{Aabb, Vec3};
use crate::spawner::{floor_eps, SpawnedObject};
use crate::terrain::{Tile, GROUND_Y};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Trigger {
    Time,
    Count,
    Position,
    Initial,
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("a bake job is already in flight (issued at tick {issued_tick})")]
pub struct Busy {
    pub issued_tick: u64,
}

/// Geometry captured when a bake is issued.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NavSnapshot {
    pub player_z: f64,
    pub z_lo: f64,
    pub z_hi: f64,
    pub x_range: [f64; 2],
    /// `[z, z + length]` of every tile touching the window.
    pub tile_spans: Vec<[f64; 2]>,
    pub tile_indices: Vec<u64>,
    /// Obstacle footprints inflated by the agent radius, as
    /// `[x_lo, x_hi, z_lo, z_hi]`.
    pub footprints: Vec<[f64; 4]>,
    pub object_ids: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PendingBake {
    pub issue_tick: u64,
    pub done_tick: u64,
    pub trigger: Trigger,
    pub snapshot: NavSnapshot,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NavWindow {
    pub z_lo: f64,
    pub z_hi: f64,
    pub bake_version: u64,
    pub baked_at_player_z: f64,
    pub tiles_since_bake: u32,
    pub last_bake_time: f64,
    pub last_bake_player_z: f64,
    pub pending_job: Option<PendingBake>,
}

impl NavWindow {
    pub fn new(player_z: f64) -> Self {
        Self {
            z_lo: player_z,
            z_hi: player_z,
            bake_version: 0,
            baked_at_player_z: player_z,
            tiles_since_bake: 0,
            last_bake_time: 0.0,
            last_bake_player_z: player_z,
            pending_job: None,
        }
    }

    pub fn centre(&self) -> f64 {
        (self.z_lo + self.z_hi) / 2.0
    }
}

/// Window around `z_p`: `[z_p - d_behind, z_p + d_ahead]`.
pub fn window_bounds(z_p: f64, cfg: &RunConfig) -> (f64, f64) {
    (z_p - cfg.d_behind, z_p + cfg.d_ahead)
}

pub fn window_centre(z_p: f64, cfg: &RunConfig) -> f64 {
    z_p + (cfg.d_ahead - cfg.d_behind) / 2.0
}

/// First trigger that fires, checked in time, count, position order.
/// Nothing fires while a job is in flight.
pub fn should_rebake(nav: &NavWindow, time: f64, z_p: f64, cfg: &RunConfig) -> Option<Trigger> {
    if nav.pending_job.is_some() {
        return None;
    }
    let advance = z_p - nav.last_bake_player_z;
    if time - nav.last_bake_time > cfg.nav_time_interval {
        Some(Trigger::Time)
    } else if nav.tiles_since_bake >= cfg.nav_tile_count || advance > 2.0 * cfg.tile_length {
        Some(Trigger::Count)
    } else if advance > cfg.nav_move_threshold {
        Some(Trigger::Position)
    } else {
        None
    }
}

pub fn take_snapshot<'a>(
    z_p: f64,
    tiles: &[Tile],
    objects: impl IntoIterator<Item = &'a SpawnedObject>,
    cfg: &RunConfig,
) -> NavSnapshot {
    let (z_lo, z_hi) = window_bounds(z_p, cfg);
    let live: Vec<&Tile> = tiles.iter().filter(|t| t.far_edge() >= z_lo && t.z <= z_hi).collect();
    let r = cfg.agent_radius;
    let mut footprints = Vec::new();
    let mut object_ids = Vec::new();
    for o in objects {
        let (lo, hi) = (o.collider.aabb.min(), o.collider.aabb.max());
        // Objects sunk entirely below the surface do not obstruct walking.
        if hi.y < GROUND_Y || hi.z + r < z_lo || lo.z - r > z_hi {
            continue;
        }
        footprints.push([lo.x - r, hi.x + r, lo.z - r, hi.z + r]);
        object_ids.push(o.id);
    }
    NavSnapshot {
        player_z: z_p,
        z_lo,
        z_hi,
        x_range: cfg.x_range,
        tile_spans: live.iter().map(|t| [t.z, t.far_edge()]).collect(),
        tile_indices: live.iter().map(|t| t.index).collect(),
        footprints,
        object_ids,
    }
}

/// Issues a bake. The job completes `rebake_latency` ticks later.
pub fn begin_rebake(
    nav: &mut NavWindow,
    tick: u64,
    time: f64,
    trigger: Trigger,
    snapshot: NavSnapshot,
    cfg: &RunConfig,
) -> Result<u64, Busy> {
    if let Some(job) = &nav.pending_job {
        return Err(Busy {
            issued_tick: job.issue_tick,
        });
    }
    let done_tick = tick + cfg.rebake_latency;
    nav.tiles_since_bake = 0;
    nav.last_bake_time = time;
    nav.last_bake_player_z = snapshot.player_z;
    nav.pending_job = Some(PendingBake {
        issue_tick: tick,
        done_tick,
        trigger,
        snapshot,
    });
    Ok(done_tick)
}

/// Finishes the in-flight job if it is due, recentring the window on the
/// player position captured at issue.
pub fn complete_rebake(nav: &mut NavWindow, tick: u64, cfg: &RunConfig) -> Option<(WalkableField, PendingBake)> {
    if nav.pending_job.as_ref()?.done_tick > tick {
        return None;
    }
    let job = nav.pending_job.take()?;
    let field = WalkableField::bake(&job.snapshot, cfg.nav_resolution);
    nav.z_lo = job.snapshot.z_lo;
    nav.z_hi = job.snapshot.z_hi;
    nav.baked_at_player_z = job.snapshot.player_z;
    nav.bake_version += 1;
    Some((field, job))
}

/// Indices `k` in `0..n` with `lo <= origin + k * step <= hi`, as an
/// inclusive range.
fn grid_range(origin: f64, step: f64, n: usize, lo: f64, hi: f64) -> Option<(usize, usize)> {
    let at = |k: usize| origin + k as f64 * step;
    let mut a = ((lo - origin) / step).ceil().clamp(0.0, n as f64) as usize;
    while a > 0 && at(a - 1) >= lo {
        a -= 1;
    }
    while a < n && at(a) < lo {
        a += 1;
    }
    let b = ((hi - origin) / step).floor().clamp(-1.0, n as f64 - 1.0);
    if b < 0.0 {
        return None;
    }
    let mut b = b as usize;
    while b + 1 < n && at(b + 1) <= hi {
        b += 1;
    }
    while at(b) > hi {
        if b == 0 {
            return None;
        }
        b -= 1;
    }
    (a <= b && a < n).then_some((a, b))
}

/// Walkable grid points at fixed resolution over the baked window.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct WalkableField {
    pub z_lo: f64,
    pub z_hi: f64,
    pub x_lo: f64,
    pub resolution: f64,
    nx: usize,
    nz: usize,
    cells: Vec<bool>,
}

impl WalkableField {
    pub fn bake(snap: &NavSnapshot, resolution: f64) -> Self {
        let x_lo = snap.x_range[0];
        let nx = floor_eps((snap.x_range[1] - x_lo) / resolution) as usize + 1;
        let nz = floor_eps((snap.z_hi - snap.z_lo) / resolution) as usize + 1;
        let mut cells = vec![false; nx * nz];
        let z_at = |j: usize| snap.z_lo + j as f64 * resolution;
        for j in 0..nz {
            let z = z_at(j);
            if snap.tile_spans.iter().any(|s| s[0] <= z && z <= s[1]) {
                cells[j * nx..(j + 1) * nx].fill(true);
            }
        }
        for fp in &snap.footprints {
            let [fx_lo, fx_hi, fz_lo, fz_hi] = *fp;
            let Some((i0, i1)) = grid_range(x_lo, resolution, nx, fx_lo, fx_hi) else {
                continue;
            };
            let Some((j0, j1)) = grid_range(snap.z_lo, resolution, nz, fz_lo, fz_hi) else {
                continue;
            };
            for j in j0..=j1 {
                cells[j * nx + i0..=j * nx + i1].fill(false);
            }
        }
        Self {
            z_lo: snap.z_lo,
            z_hi: snap.z_hi,
            x_lo,
            resolution,
            nx,
            nz,
            cells,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.nx, self.nz)
    }

    pub fn point(&self, i: usize, j: usize) -> (f64, f64) {
        (
            self.x_lo + i as f64 * self.resolution,
            self.z_lo + j as f64 * self.resolution,
        )
    }

    pub fn cell(&self, i: usize, j: usize) -> bool {
        i < self.nx && j < self.nz && self.cells[j * self.nx + i]
    }

    fn index_of(&self, x: f64, z: f64) -> Option<(usize, usize)> {
        if self.cells.is_empty() || z < self.z_lo || z > self.z_hi {
            return None;
        }
        let fi = ((x - self.x_lo) / self.resolution).round();
        let fj = ((z - self.z_lo) / self.resolution).round();
        if fi < 0.0 || fi >= self.nx as f64 || fj < 0.0 || fj >= self.nz as f64 {
            return None;
        }
        Some((fi as usize, fj as usize))
    }

    /// Walkability of the grid point nearest `(x, z)`.
    pub fn walkable(&self, x: f64, z: f64) -> bool {
        self.index_of(x, z).is_some_and(|(i, j)| self.cell(i, j))
    }

    /// Nearest walkable position within `radius`, or `p` itself when it is
    /// already walkable. Positions outside the baked window return `None`.
    pub fn sample_position(&self, p: Vec3, radius: f64) -> Option<Vec3> {
        if self.cells.is_empty() || p.z < self.z_lo || p.z > self.z_hi {
            return None;
        }
        if self.walkable(p.x, p.z) {
            return Some(Vec3::new(p.x, GROUND_Y, p.z));
        }
        let r = self.resolution;
        let j0 = (((p.z - radius - self.z_lo) / r).floor().max(0.0)) as usize;
        let j1 = (((p.z + radius - self.z_lo) / r).ceil().max(0.0) as usize).min(self.nz - 1);
        let i0 = (((p.x - radius - self.x_lo) / r).floor().max(0.0)) as usize;
        let i1 = (((p.x + radius - self.x_lo) / r).ceil().max(0.0) as usize).min(self.nx - 1);
        let mut best: Option<(f64, usize, usize)> = None;
        for j in j0..=j1 {
            for i in i0..=i1 {
                if !self.cells[j * self.nx + i] {
                    continue;
                }
                let (x, z) = self.point(i, j);
                let d2 = (x - p.x).powi(2) + (z - p.z).powi(2);
                if d2 <= radius * radius && best.is_none_or(|(b, _, _)| d2 < b) {
                    best = Some((d2, i, j));
                }
            }
        }
        best.map(|(_, i, j)| {
            let (x, z) = self.point(i, j);
            Vec3::new(x, GROUND_Y, z)
        })
    }

    /// Walkable lateral intervals (grid points walkable for every row in
    /// `[z0, z1]`), as `(x_start, x_end)` pairs.
    pub fn walkable_spans(&self, z0: f64, z1: f64) -> Vec<(f64, f64)> {
        let (Some((_, j0)), Some((_, j1))) = (self.index_of(self.x_lo, z0), self.index_of(self.x_lo, z1)) else {
            return Vec::new();
        };
        let mut spans = Vec::new();
        let mut start: Option<usize> = None;
        for i in 0..=self.nx {
            let open = i < self.nx && (j0..=j1).all(|j| self.cells[j * self.nx + i]);
            match (open, start) {
                (true, None) => start = Some(i),
                (false, Some(s)) => {
                    spans.push((self.point(s, 0).0, self.point(i - 1, 0).0));
                    start = None;
                }
                _ => {}
            }
        }
        spans
    }
}

/// Convenience for tests and tools: the inflated footprint of a box.
pub fn footprint(aabb: &Aabb, radius: f64) -> [f64; 4] {
    let (lo, hi) = (aabb.min(), aabb.max());
    [lo.x - radius, hi.x + radius, lo.z - radius, hi.z + radius]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> RunConfig {
        RunConfig::default()
    }

    fn tile(index: u64, z: f64) -> Tile {
        Tile {
            index,
            z,
            length: 96.0,
            theme_index: 0,
            spawned_tick: 0,
            destroy_deadline: None,
        }
    }

    #[test]
    fn triggers() {
        let c = cfg();
        let mut nav = NavWindow::new(0.0);
        assert_eq!(should_rebake(&nav, 0.5, 0.0, &c), None);
        assert_eq!(should_rebake(&nav, 1.01, 0.0, &c), Some(Trigger::Time));
        nav.tiles_since_bake = 5;
        assert_eq!(should_rebake(&nav, 0.5, 0.0, &c), Some(Trigger::Count));
        nav.tiles_since_bake = 0;
        assert_eq!(should_rebake(&nav, 0.5, 51.0, &c), Some(Trigger::Position));
        assert_eq!(should_rebake(&nav, 0.5, 193.0, &c), Some(Trigger::Count));
    }

    #[test]
    fn job_lifecycle() {
        let c = RunConfig {
            rebake_latency: 10,
            ..cfg()
        };
        let mut nav = NavWindow::new(1000.0);
        let snap = take_snapshot(1000.0, &[tile(0, 960.0)], [], &c);
        assert_eq!(
            begin_rebake(&mut nav, 100, 2.0, Trigger::Time, snap.clone(), &c),
            Ok(110)
        );
        assert_eq!(
            begin_rebake(&mut nav, 101, 2.02, Trigger::Time, snap, &c),
            Err(Busy { issued_tick: 100 })
        );
        assert_eq!(should_rebake(&nav, 50.0, 5000.0, &c), None);
        assert!(complete_rebake(&mut nav, 109, &c).is_none());
        let (field, _) = complete_rebake(&mut nav, 110, &c).unwrap();
        assert_eq!((nav.z_lo, nav.z_hi), (950.0, 1600.0));
        assert_eq!(nav.centre(), 1275.0);
        assert_eq!(window_centre(1000.0, &c), 1275.0);
        assert_eq!(nav.bake_version, 1);
        assert!(field.walkable(0.0, 1000.0));
        assert!(!field.walkable(0.0, 1100.0));
    }

    #[test]
    fn sample_finds_nearest_free_point() {
        let c = cfg();
        let mut snap = take_snapshot(0.0, &[tile(0, -96.0), tile(1, 0.0)], [], &c);
        // Block x in [-0.75, 0.75] around z = 20.
        snap.footprints.push([-0.75, 0.75, 19.0, 21.0]);
        let field = WalkableField::bake(&snap, 0.25);
        let free = Vec3::new(3.0, 0.0, 5.0);
        assert_eq!(field.sample_position(free, 5.0), Some(free));
        let inside = Vec3::new(-0.25, 0.0, 20.0);
        let got = field.sample_position(inside, 5.0).unwrap();
        // Grid points sit at -7.1 + 0.25 i; the nearest free one is x = -0.85.
        assert!((got.x + 0.85).abs() < 1e-9 && (got.z - 20.0).abs() < 1e-9, "{got:?}");
        assert_eq!(field.sample_position(Vec3::new(0.0, 0.0, 700.0), 5.0), None);
    }

    #[test]
    fn spans_report_gaps() {
        let c = cfg();
        let mut snap = take_snapshot(0.0, &[tile(1, 0.0)], [], &c);
        snap.footprints.push([-1.0, 1.0, 9.0, 11.0]);
        let field = WalkableField::bake(&snap, 0.25);
        let spans = field.walkable_spans(9.5, 10.5);
        assert_eq!(spans.len(), 2);
        assert!((spans[0].1 - (-1.1)).abs() < 0.2);
        assert!(spans[1].0 > 1.0);
    }
}
