//! Constrained obstacle placement on a one-dimensional lateral grid.
//!
//! Each tile's lateral span is split into `N = max(ceil(W), 12)` cells. Cells
//! whose centre lies within the clear half-width of the lane centre never
//! receive objects, and claiming a cell also blocks its two neighbours. The
//! largest number of objects a tile can hold is therefore the maximum
//! independent set of the candidate cells viewed as a path graph.

use std::collections::BTreeMap;
use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::RunConfig;
use crate::geometry::{Aabb, Collider, ColliderSet, Layer, LayerMask, Ray, Vec3};
use crate::rng;
use crate::terrain::Tile;

/// Tolerance for floor/ceil on decimal inputs (17.65, 2.15 / 0.05, ...).
const ROUND_EPS: f64 = 1e-9;

pub fn floor_eps(x: f64) -> f64 {
    (x + ROUND_EPS).floor()
}

pub fn ceil_eps(x: f64) -> f64 {
    (x - ROUND_EPS).ceil()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SnapMode {
    SnapToGround,
    Sink,
    Float,
}

impl SnapMode {
    /// Vertical adjustment relative to resting on the ground.
    pub fn y_offset(self, half_height: f64) -> f64 {
        match self {
            SnapMode::SnapToGround => 0.0,
            SnapMode::Sink => -0.5 * half_height,
            SnapMode::Float => 0.3,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PrefabSpec {
    pub id: String,
    pub theme_index: usize,
    pub half_extents: [f64; 3],
    pub snap_mode: SnapMode,
}

#[derive(Debug, Error)]
pub enum CatalogError {
    #[error("could not read catalog {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("malformed catalog: {0}")]
    Parse(String),
    #[error("invalid catalog: {0}")]
    Invalid(String),
}

/// Obstacle prefabs grouped by theme.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Catalog {
    prefabs: Vec<PrefabSpec>,
}

impl Catalog {
    pub fn new(prefabs: Vec<PrefabSpec>) -> Result<Self, CatalogError> {
        if prefabs.is_empty() {
            return Err(CatalogError::Invalid("catalog is empty".into()));
        }
        for p in &prefabs {
            if p.half_extents.iter().any(|h| !(*h > 0.0)) {
                return Err(CatalogError::Invalid(format!("{}: half extents must be > 0", p.id)));
            }
        }
        let mut ids: Vec<&str> = prefabs.iter().map(|p| p.id.as_str()).collect();
        ids.sort_unstable();
        if ids.windows(2).any(|w| w[0] == w[1]) {
            return Err(CatalogError::Invalid("duplicate prefab id".into()));
        }
        Ok(Self { prefabs })
    }

    pub fn from_json(text: &str) -> Result<Self, CatalogError> {
        let prefabs: Vec<PrefabSpec> = serde_json::from_str(text).map_err(|e| CatalogError::Parse(e.to_string()))?;
        Self::new(prefabs)
    }

    pub fn load(path: &Path) -> Result<Self, CatalogError> {
        let text = std::fs::read_to_string(path).map_err(|source| CatalogError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn prefabs(&self) -> &[PrefabSpec] {
        &self.prefabs
    }

    /// Number of distinct themes (highest theme index + 1).
    pub fn theme_count(&self) -> usize {
        self.prefabs.iter().map(|p| p.theme_index + 1).max().unwrap_or(1)
    }

    /// Prefabs for a theme, falling back to the whole catalog when the
    /// theme has none.
    pub fn for_theme(&self, theme: usize) -> Vec<&PrefabSpec> {
        let themed: Vec<&PrefabSpec> = self.prefabs.iter().filter(|p| p.theme_index == theme).collect();
        if themed.is_empty() {
            self.prefabs.iter().collect()
        } else {
            themed
        }
    }

    /// Built-in three-theme catalog. Each theme carries one wide prefab
    /// (a fallen log) whose lateral extent exceeds a grid cell, so a legally
    /// placed copy next to the clear lane can still intrude into it.
    pub fn builtin() -> Self {
        use SnapMode::*;
        let rows: [(&str, usize, [f64; 3], SnapMode); 15] = [
            ("PF Forest Pine", 0, [0.35, 2.5, 0.35], Sink),
            ("PF Forest Rock", 0, [0.45, 0.4, 0.45], SnapToGround),
            ("PF Forest Bush", 0, [0.4, 0.5, 0.4], SnapToGround),
            ("PF Forest Stump", 0, [0.35, 0.3, 0.35], SnapToGround),
            ("PF Forest Log", 0, [2.3, 0.35, 0.4], SnapToGround),
            ("PF Desert Cactus", 1, [0.3, 1.2, 0.3], SnapToGround),
            ("PF Desert Boulder", 1, [0.45, 0.6, 0.45], SnapToGround),
            ("PF Desert Skull", 1, [0.3, 0.25, 0.35], Float),
            ("PF Desert Crate", 1, [0.4, 0.4, 0.4], SnapToGround),
            ("PF Desert Log", 1, [2.3, 0.3, 0.4], SnapToGround),
            ("PF Snow Spruce", 2, [0.4, 2.8, 0.4], Sink),
            ("PF Snow Rock", 2, [0.45, 0.5, 0.45], SnapToGround),
            ("PF Snow Drift", 2, [0.45, 0.3, 0.5], SnapToGround),
            ("PF Snow Sign", 2, [0.3, 0.8, 0.3], SnapToGround),
            ("PF Snow Log", 2, [2.3, 0.35, 0.4], SnapToGround),
        ];
        let prefabs = rows
            .into_iter()
            .map(|(id, theme_index, half_extents, snap_mode)| PrefabSpec {
                id: id.into(),
                theme_index,
                half_extents,
                snap_mode,
            })
            .collect();
        Self::new(prefabs).expect("builtin catalog is valid")
    }
}

/// Lateral placement grid of one tile.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TileGrid {
    pub x_min: f64,
    pub x_max: f64,
    pub width: f64,
    pub cells: usize,
    pub cell_width: f64,
    pub clear: Vec<bool>,
}

impl TileGrid {
    pub fn build(x_range: [f64; 2], clear_half_width: f64) -> Self {
        let [x_min, x_max] = x_range;
        let width = x_max - x_min;
        let cells = (ceil_eps(width) as usize).max(12);
        let cell_width = width / cells as f64;
        let clear = (0..cells)
            .map(|i| (x_min + (i as f64 + 0.5) * cell_width).abs() < clear_half_width)
            .collect();
        Self {
            x_min,
            x_max,
            width,
            cells,
            cell_width,
            clear,
        }
    }

    pub fn from_config(cfg: &RunConfig) -> Self {
        Self::build(cfg.x_range, cfg.clear_half_width)
    }

    pub fn center(&self, i: usize) -> f64 {
        self.x_min + (i as f64 + 0.5) * self.cell_width
    }

    pub fn clear_cells(&self) -> Vec<usize> {
        (0..self.cells).filter(|&i| self.clear[i]).collect()
    }

    pub fn candidate_cells(&self) -> Vec<usize> {
        (0..self.cells).filter(|&i| !self.clear[i]).collect()
    }

    /// Lengths of the maximal runs of consecutive candidate cells.
    pub fn candidate_segments(&self) -> Vec<usize> {
        let mut out = Vec::new();
        let mut run = 0;
        for &c in &self.clear {
            if c {
                if run > 0 {
                    out.push(run);
                }
                run = 0;
            } else {
                run += 1;
            }
        }
        if run > 0 {
            out.push(run);
        }
        out
    }
}

pub fn intended_count(cells: usize, p_spawn: f64) -> usize {
    let k = floor_eps(cells as f64 * p_spawn / 100.0);
    (k.max(0.0) as usize).min(cells)
}

/// Largest number of objects that can coexist on a tile: a maximum
/// independent set on each run of consecutive candidate cells, which for a
/// path of `n` vertices is `ceil(n / 2)`.
pub fn saturation_bound(grid: &TileGrid) -> usize {
    grid.candidate_segments().iter().map(|n| n.div_ceil(2)).sum()
}

/// Exhaustive counterpart of [`saturation_bound`]: largest subset of
/// candidate cells with no two consecutive indices. Limited to 26 cells.
pub fn saturation_bound_exhaustive(grid: &TileGrid) -> Option<usize> {
    let cand = grid.candidate_cells();
    if cand.len() > 26 {
        return None;
    }
    let mut best = 0;
    for mask in 0u32..(1u32 << cand.len()) {
        let chosen: Vec<usize> = (0..cand.len())
            .filter(|b| mask >> b & 1 == 1)
            .map(|b| cand[b])
            .collect();
        if chosen.windows(2).all(|w| w[1] - w[0] >= 2) {
            best = best.max(chosen.len());
        }
    }
    Some(best)
}

/// Smallest spawn percentage whose intended count reaches the bound.
pub fn saturation_threshold(grid: &TileGrid) -> f64 {
    100.0 * saturation_bound(grid) as f64 / grid.cells as f64
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Reject {
    ClearLane,
    Occupied,
    OutOfRange,
}

/// Per-tile cell occupancy.
#[derive(Clone, Debug)]
pub struct Occupancy {
    clear: Vec<bool>,
    occupied: Vec<bool>,
}

impl Occupancy {
    pub fn new(grid: &TileGrid) -> Self {
        Self {
            clear: grid.clear.clone(),
            occupied: vec![false; grid.cells],
        }
    }

    pub fn check(&self, i: usize) -> Result<(), Reject> {
        match (self.clear.get(i), self.occupied.get(i)) {
            (None, _) | (_, None) => Err(Reject::OutOfRange),
            (Some(true), _) => Err(Reject::ClearLane),
            (_, Some(true)) => Err(Reject::Occupied),
            _ => Ok(()),
        }
    }

    /// Claims cell `i`, marking it and both neighbours occupied.
    pub fn claim(&mut self, i: usize) -> Result<(), Reject> {
        self.check(i)?;
        for j in i.saturating_sub(1)..=(i + 1).min(self.occupied.len() - 1) {
            self.occupied[j] = true;
        }
        Ok(())
    }

    pub fn is_occupied(&self, i: usize) -> bool {
        self.occupied.get(i).copied().unwrap_or(false)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpawnedObject {
    pub id: u64,
    pub prefab_id: String,
    pub position: Vec3,
    pub collider: Collider,
    pub tile_index: u64,
    pub tile_z: f64,
    pub cell_index: usize,
    pub y_offset: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SpawnStats {
    pub tile_index: u64,
    pub intended: usize,
    pub spawned: usize,
    pub attempts: usize,
    pub skipped_no_ground: usize,
}

impl SpawnStats {
    pub fn realisation(&self) -> Option<f64> {
        (self.intended > 0).then(|| self.spawned as f64 / self.intended as f64)
    }
}

/// Places up to `k` objects on `tile`. Each attempt draws a cell and a Z
/// jitter (in that order), then confirms ground with a downward ray. The
/// loop stops after `k` placements or `5 * N` attempts.
#[allow(clippy::too_many_arguments)]
pub fn place_objects(
    grid: &TileGrid,
    k: usize,
    tile: &Tile,
    theme: usize,
    catalog: &Catalog,
    colliders: &ColliderSet,
    cfg: &RunConfig,
    next_id: &mut u64,
) -> (Vec<SpawnedObject>, SpawnStats) {
    let mut rng = rng::stream(cfg.seed, rng::SPAWNER, tile.index);
    let prefabs = catalog.for_theme(theme);
    let mut occupancy = Occupancy::new(grid);
    let mut stats = SpawnStats {
        tile_index: tile.index,
        intended: k,
        ..SpawnStats::default()
    };
    let mut placed = Vec::new();
    let cap = 5 * grid.cells;

    while placed.len() < k && stats.attempts < cap {
        stats.attempts += 1;
        let cell = rng.gen_range(0..grid.cells);
        let jitter = if cfg.z_jitter > 0.0 {
            rng.gen_range(-cfg.z_jitter..=cfg.z_jitter)
        } else {
            0.0
        };
        if occupancy.check(cell).is_err() {
            continue;
        }
        let x = grid.center(cell);
        let z = tile.center_z() + jitter;
        let probe = Ray::down(Vec3::new(x, 100.0, z), 200.0);
        let Some(ground) = colliders.raycast(&probe, LayerMask::GROUND) else {
            stats.skipped_no_ground += 1;
            continue;
        };
        let prefab = prefabs[rng.gen_range(0..prefabs.len())];
        occupancy.claim(cell).expect("checked above");

        let [hx, hy, hz] = prefab.half_extents;
        let y_offset = prefab.snap_mode.y_offset(hy);
        let center = Vec3::new(x, ground.point.y + hy + y_offset, z);
        let id = *next_id;
        *next_id += 1;
        placed.push(SpawnedObject {
            id,
            prefab_id: prefab.id.clone(),
            position: center,
            collider: Collider {
                aabb: Aabb::new(center, Vec3::new(hx, hy, hz)),
                layer: Layer::Obstacles,
                owner_id: id,
                root_name: format!("{} #{id}", prefab.id),
            },
            tile_index: tile.index,
            tile_z: tile.z,
            cell_index: cell,
            y_offset,
        });
    }
    stats.spawned = placed.len();
    (placed, stats)
}

/// Removes every object the player has passed by more than the despawn
/// distance (strict).
pub fn despawn_objects(objects: &mut BTreeMap<u64, SpawnedObject>, z_p: f64, cfg: &RunConfig) -> Vec<SpawnedObject> {
    let gone: Vec<u64> = objects
        .values()
        .filter(|o| z_p - o.position.z > cfg.despawn_distance)
        .map(|o| o.id)
        .collect();
    gone.into_iter().filter_map(|id| objects.remove(&id)).collect()
}
