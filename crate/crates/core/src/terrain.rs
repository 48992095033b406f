//! Tile streaming: speed-coupled spawn interval, proximity suspension,
//! positioning, delayed cleanup, and theme cycling.
//!
//! A tile's anchor `z` is its near edge; it covers `[z, z + length]`.

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::geometry::{Aabb, Collider, Layer, Vec3};
use crate::rng;

/// Surface height of every tile.
pub const GROUND_Y: f64 = 0.0;
const TILE_THICKNESS: f64 = 1.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tile {
    pub index: u64,
    pub z: f64,
    pub length: f64,
    pub theme_index: usize,
    pub spawned_tick: u64,
    pub destroy_deadline: Option<f64>,
}

impl Tile {
    pub fn far_edge(&self) -> f64 {
        self.z + self.length
    }

    pub fn center_z(&self) -> f64 {
        self.z + self.length / 2.0
    }

    pub fn covers_z(&self, z: f64) -> bool {
        self.z <= z && z <= self.far_edge()
    }

    /// Collider ids for tiles live in the upper half of the id space so
    /// they never clash with object ids.
    pub fn collider_id(&self) -> u64 {
        (1 << 63) | self.index
    }

    pub fn collider(&self, cfg: &RunConfig) -> Collider {
        Collider {
            aabb: Aabb::from_min_max(
                Vec3::new(cfg.x_min(), GROUND_Y - TILE_THICKNESS, self.z),
                Vec3::new(cfg.x_max(), GROUND_Y, self.far_edge()),
            ),
            layer: Layer::Ground,
            owner_id: self.collider_id(),
            root_name: format!("GroundTile_{}", self.index),
        }
    }
}

/// Top surface of the tile under `(x, z)`, if any.
pub fn ground_height(x: f64, z: f64, tiles: &[Tile], x_range: [f64; 2]) -> Option<f64> {
    if x < x_range[0] || x > x_range[1] {
        return None;
    }
    tiles.iter().any(|t| t.covers_z(z)).then_some(GROUND_Y)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThemeState {
    pub current_index: usize,
    pub next_change_z: f64,
    pub recent_stack: Vec<usize>,
    pub variant_count: usize,
    pub changes: u64,
}

impl ThemeState {
    pub fn new(variant_count: usize, first_change_z: f64) -> Self {
        Self {
            current_index: 0,
            next_change_z: first_change_z,
            recent_stack: Vec::new(),
            variant_count: variant_count.max(1),
            changes: 0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThemeChange {
    pub from: usize,
    pub to: usize,
}

/// Switches theme once the player crosses the next threshold. Picks
/// uniformly among variants not shown in the current cycle; the stack is
/// cleared once every variant has been shown, and the first pick of a new
/// cycle never repeats the variant on screen.
pub fn advance_theme(theme: &mut ThemeState, z_p: f64, interval: f64, seed: u64) -> Option<ThemeChange> {
    if z_p < theme.next_change_z {
        return None;
    }
    let from = theme.current_index;
    let mut candidates: Vec<usize> = (0..theme.variant_count)
        .filter(|i| !theme.recent_stack.contains(i))
        .collect();
    if theme.recent_stack.is_empty() && candidates.len() > 1 {
        candidates.retain(|&i| i != from);
    }
    let mut rng = rng::stream(seed, rng::TERRAIN, theme.changes);
    let to = *candidates.choose(&mut rng).expect("variant_count >= 1");
    theme.current_index = to;
    theme.recent_stack.push(to);
    if theme.recent_stack.len() >= theme.variant_count {
        theme.recent_stack.clear();
    }
    theme.changes += 1;
    theme.next_change_z += interval;
    Some(ThemeChange { from, to })
}

pub fn spawn_interval(v_p: f64, cfg: &RunConfig) -> f64 {
    (cfg.dt_spawn_max - cfg.gamma * v_p).clamp(cfg.dt_spawn_min, cfg.dt_spawn_max)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TerrainState {
    /// Live tiles sorted by `z`.
    pub tiles: Vec<Tile>,
    pub last_spawn_time: f64,
    pub next_tile_index: u64,
    pub prev_player_z: f64,
    pub theme: ThemeState,
}

impl TerrainState {
    /// Seeds tiles so that `[-L_tile, +L_tile]` is covered.
    pub fn new(cfg: &RunConfig, variant_count: usize) -> Self {
        let tiles = (0..2)
            .map(|i| Tile {
                index: i,
                z: (i as f64 - 1.0) * cfg.tile_length,
                length: cfg.tile_length,
                theme_index: 0,
                spawned_tick: 0,
                destroy_deadline: None,
            })
            .collect();
        Self {
            tiles,
            last_spawn_time: 0.0,
            next_tile_index: 2,
            prev_player_z: cfg.start_z(),
            theme: ThemeState::new(variant_count, cfg.theme_interval),
        }
    }

    /// Anchor of the most recently spawned tile.
    pub fn frontier_z(&self) -> Option<f64> {
        self.tiles.last().map(|t| t.z)
    }

    /// Farthest generated ground position.
    pub fn last_ground_z(&self) -> Option<f64> {
        self.tiles.last().map(Tile::far_edge)
    }

    pub fn tile_containing(&self, z: f64) -> Option<&Tile> {
        self.tiles.iter().find(|t| t.covers_z(z))
    }
}

/// Spawns the next tile when the interval has elapsed and the frontier is
/// not too far ahead of the player.
pub fn maybe_spawn_tile(
    terrain: &mut TerrainState,
    time: f64,
    tick: u64,
    z_p: f64,
    v_p: f64,
    cfg: &RunConfig,
) -> Option<Tile> {
    let z_g = terrain.frontier_z()?;
    if z_g > z_p + cfg.spawn_suspend_distance {
        return None;
    }
    if !(time > terrain.last_spawn_time + spawn_interval(v_p, cfg)) {
        return None;
    }
    let tile = Tile {
        index: terrain.next_tile_index,
        z: z_g + cfg.tile_length,
        length: cfg.tile_length,
        theme_index: terrain.theme.current_index,
        spawned_tick: tick,
        destroy_deadline: None,
    };
    terrain.next_tile_index += 1;
    terrain.last_spawn_time = time;
    terrain.tiles.push(tile.clone());
    Some(tile)
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Cleanup {
    pub scheduled: Vec<u64>,
    pub destroyed: Vec<Tile>,
}

/// Schedules tiles the player has left behind and removes those whose
/// grace period has run out.
pub fn cleanup_tiles(terrain: &mut TerrainState, time: f64, z_p: f64, cfg: &RunConfig) -> Cleanup {
    let mut out = Cleanup::default();
    for tile in terrain.tiles.iter_mut() {
        if tile.destroy_deadline.is_none() && z_p > tile.z + cfg.cleanup_distance {
            tile.destroy_deadline = Some(time + cfg.destroy_delay);
            out.scheduled.push(tile.index);
        }
    }
    let (gone, keep): (Vec<Tile>, Vec<Tile>) = std::mem::take(&mut terrain.tiles)
        .into_iter()
        .partition(|t| t.destroy_deadline.is_some_and(|d| time >= d));
    terrain.tiles = keep;
    out.destroyed = gone;
    out
}
