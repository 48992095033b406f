//! Parameter sweeps: a spawner-only sweep over many tiles and per-run rows
//! for full simulations.

use serde::Serialize;

use crate::config::{ConfigError, RunConfig};
use crate::geometry::ColliderSet;
use crate::sim;
use crate::spawner::{intended_count, place_objects, saturation_bound, Catalog, TileGrid};
use crate::terrain::Tile;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpawnSweepRow {
    pub p_spawn: f64,
    pub seed: u64,
    pub k: usize,
    pub tiles: usize,
    pub mean_realized: f64,
    pub max_realized: usize,
    pub saturation_bound: usize,
    pub rho_spawn: Option<f64>,
    pub per_tile: Vec<usize>,
}

/// Populates `tiles` isolated tiles (indices 1..=tiles) with the run's
/// spawner and reports realized counts.
pub fn spawn_sweep(cfg: &RunConfig, p_spawn: f64, tiles: usize, catalog: &Catalog) -> SpawnSweepRow {
    let cfg = RunConfig { p_spawn, ..cfg.clone() };
    let grid = TileGrid::from_config(&cfg);
    let k = intended_count(grid.cells, p_spawn);
    let mut next_id = 1;
    let per_tile: Vec<usize> = (1..=tiles as u64)
        .map(|index| {
            let tile = Tile {
                index,
                z: (index as f64 - 1.0) * cfg.tile_length,
                length: cfg.tile_length,
                theme_index: 0,
                spawned_tick: 0,
                destroy_deadline: None,
            };
            let mut colliders = ColliderSet::new();
            colliders.insert(tile.collider(&cfg));
            place_objects(&grid, k, &tile, 0, catalog, &colliders, &cfg, &mut next_id)
                .0
                .len()
        })
        .collect();
    let total: usize = per_tile.iter().sum();
    SpawnSweepRow {
        p_spawn,
        seed: cfg.seed,
        k,
        tiles,
        mean_realized: if tiles > 0 { total as f64 / tiles as f64 } else { 0.0 },
        max_realized: per_tile.iter().copied().max().unwrap_or(0),
        saturation_bound: saturation_bound(&grid),
        rho_spawn: (k * tiles > 0).then(|| total as f64 / (k * tiles) as f64),
        per_tile,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunSweepRow {
    pub p_spawn: f64,
    pub seed: u64,
    pub k_per_tile: usize,
    pub tiles: usize,
    pub mean_realized_per_tile: Option<f64>,
    pub max_realized_per_tile: usize,
    pub rho_spawn: Option<f64>,
    pub r_block: Option<f64>,
    pub encountered_blockages: u64,
    pub n_rec: u64,
    pub distance: f64,
}

/// Runs one full simulation with `p_spawn` and `seed` overridden.
pub fn run_row(cfg: &RunConfig, p_spawn: f64, seed: u64) -> Result<RunSweepRow, ConfigError> {
    let out = sim::run(RunConfig {
        p_spawn,
        seed,
        ..cfg.clone()
    })?;
    let s = out.summary;
    Ok(RunSweepRow {
        p_spawn,
        seed,
        k_per_tile: s.generation.k_per_tile,
        tiles: s.generation.tiles,
        mean_realized_per_tile: s.generation.mean_realized_per_tile,
        max_realized_per_tile: s.generation.max_realized_per_tile,
        rho_spawn: s.generation.rho_spawn,
        r_block: s.blockage.r_block,
        encountered_blockages: s.blockage.encountered_blockages,
        n_rec: s.agents.n_rec,
        distance: s.distance,
    })
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "NA".to_string(), |x| format!("{x:.6}"))
}

pub fn run_rows_csv(rows: &[RunSweepRow]) -> String {
    let mut s = String::from(
        "p_spawn,seed,k_per_tile,tiles,mean_realized_per_tile,max_realized_per_tile,rho_spawn,r_block,encountered_blockages,n_rec,distance\n",
    );
    for r in rows {
        s.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{:.3}\n",
            r.p_spawn,
            r.seed,
            r.k_per_tile,
            r.tiles,
            opt(r.mean_realized_per_tile),
            r.max_realized_per_tile,
            opt(r.rho_spawn),
            opt(r.r_block),
            r.encountered_blockages,
            r.n_rec,
            r.distance
        ));
    }
    s
}
