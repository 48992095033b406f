//! Run metrics. The accumulator is driven purely by the event log, so the
//! summary of a run can be recomputed offline from its JSONL; only frame
//! timings are fed separately.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::events::{EventBody, RespawnCause, SimEvent};
use crate::scan::{ray_budget, AgentKind};
use crate::spawner::{intended_count, saturation_bound, Catalog, TileGrid};

pub const TAU_60FPS: f64 = 16.66;
pub const TAU_30FPS: f64 = 33.33;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TileCounts {
    pub intended: usize,
    pub spawned: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MetricsAccumulator {
    pub s_total: u64,
    pub s_blocked: u64,
    pub ground_segments: u64,
    pub ground_blocked: u64,
    pub b_detected: BTreeSet<u64>,
    pub b_removed: BTreeSet<u64>,
    pub n_rec: u64,
    pub unrecoverable: u64,
    pub target_holds: u64,
    pub distance: f64,
    /// Populated tiles keyed by index.
    pub tiles: BTreeMap<u64, TileCounts>,
    pub prefab_histogram: BTreeMap<String, u64>,
    pub themes_shown: BTreeSet<usize>,
    pub aerial_blockers: BTreeSet<u64>,
    pub ground_blockers: BTreeSet<u64>,
    pub encounters: u64,
    pub respawns_fall: u64,
    pub respawns_encounter: u64,
    pub blockages_ahead_of_player: u64,
    pub rays_total: u64,
    pub max_rays_per_segment: usize,
    pub overlap_queries: u64,
    pub max_overlap_queries_per_segment: usize,
    pub rebakes: u64,
    pub finished: bool,
    pub game_over: bool,
    pub frame_samples_ms: Vec<f64>,
}

impl MetricsAccumulator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn observe(&mut self, event: &SimEvent) {
        match &event.body {
            EventBody::TileSpawned {
                index, theme, intended, ..
            } => {
                self.themes_shown.insert(*theme);
                if let Some(k) = intended {
                    self.tiles.insert(
                        *index,
                        TileCounts {
                            intended: *k,
                            spawned: 0,
                        },
                    );
                }
            }
            EventBody::ObjectSpawned { prefab, tile_index, .. } => {
                *self.prefab_histogram.entry(prefab.clone()).or_default() += 1;
                self.tiles.entry(*tile_index).or_default().spawned += 1;
            }
            EventBody::Scan {
                agent,
                rays,
                passable,
                overlap_queries,
                ..
            } => {
                self.rays_total += *rays as u64;
                self.max_rays_per_segment = self.max_rays_per_segment.max(*rays);
                self.overlap_queries += *overlap_queries as u64;
                self.max_overlap_queries_per_segment = self.max_overlap_queries_per_segment.max(*overlap_queries);
                match agent {
                    AgentKind::Aerial => {
                        self.s_total += 1;
                        self.s_blocked += u64::from(!passable);
                    }
                    AgentKind::Ground => {
                        self.ground_segments += 1;
                        self.ground_blocked += u64::from(!passable);
                    }
                }
            }
            EventBody::Blockage {
                agent,
                blockers,
                segment_z,
                player_z,
                ..
            } => match agent {
                AgentKind::Aerial => {
                    self.b_detected.extend(blockers);
                    self.aerial_blockers.extend(blockers);
                    if segment_z > player_z {
                        self.blockages_ahead_of_player += 1;
                    }
                }
                AgentKind::Ground => self.ground_blockers.extend(blockers),
            },
            EventBody::Removal { id, .. } => {
                self.b_removed.insert(*id);
            }
            EventBody::Recovery { recovered, .. } => {
                if *recovered {
                    self.n_rec += 1;
                } else {
                    self.unrecoverable += 1;
                }
            }
            EventBody::TargetHeld { .. } => self.target_holds += 1,
            EventBody::Encounter { .. } => self.encounters += 1,
            EventBody::Respawn { cause, .. } => match cause {
                RespawnCause::Fall => self.respawns_fall += 1,
                RespawnCause::Encounter => self.respawns_encounter += 1,
            },
            EventBody::RebakeDone { .. } => self.rebakes += 1,
            EventBody::GameOver { .. } => self.game_over = true,
            EventBody::RunEnd {
                distance,
                finished,
                game_over,
            } => {
                self.distance = *distance;
                self.finished = *finished;
                self.game_over = *game_over;
            }
            EventBody::ObjectDespawned { .. }
            | EventBody::TileDestroyed { .. }
            | EventBody::RebakeBegin { .. }
            | EventBody::ThemeChange { .. } => {}
        }
    }

    pub fn from_events<'a>(events: impl IntoIterator<Item = &'a SimEvent>) -> Self {
        let mut acc = Self::new();
        for e in events {
            acc.observe(e);
        }
        acc
    }

    pub fn o_intended(&self) -> usize {
        self.tiles.values().map(|t| t.intended).sum()
    }

    pub fn o_spawned(&self) -> usize {
        self.tiles.values().map(|t| t.spawned).sum()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rates {
    pub r_block: Option<f64>,
    pub r_pass: Option<f64>,
    pub r_remove: Option<f64>,
    pub r_recover: Option<f64>,
    pub rho_spawn: Option<f64>,
}

fn ratio(num: f64, den: f64) -> Option<f64> {
    (den > 0.0).then(|| num / den)
}

pub fn rates(acc: &MetricsAccumulator) -> Rates {
    let r_block = ratio(acc.s_blocked as f64, acc.s_total as f64);
    Rates {
        r_block,
        r_pass: r_block.map(|r| 1.0 - r),
        r_remove: ratio(acc.b_removed.len() as f64, acc.b_detected.len() as f64),
        r_recover: ratio(acc.n_rec as f64, acc.distance),
        rho_spawn: ratio(acc.o_spawned() as f64, acc.o_intended() as f64),
    }
}

/// Fraction of samples strictly above `tau` milliseconds.
pub fn frame_violation(samples: &[f64], tau: f64) -> Option<f64> {
    ratio(
        samples.iter().filter(|&&f| f > tau).count() as f64,
        samples.len() as f64,
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Entropy {
    pub h: f64,
    /// `H / log2 K`; absent when `K < 2`.
    pub h_norm: Option<f64>,
}

/// Shannon entropy in bits of the counts, normalised by `log2 k`.
pub fn prefab_entropy(counts: &[u64], k: usize) -> Option<Entropy> {
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return None;
    }
    let h = counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / total as f64;
            -p * p.log2()
        })
        .sum::<f64>()
        .max(0.0);
    let h_norm = (k >= 2).then(|| h / (k as f64).log2());
    Some(Entropy { h, h_norm })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Jaccard {
    pub j: f64,
    pub c_unique: f64,
}

pub fn jaccard(a: &BTreeSet<u64>, g: &BTreeSet<u64>) -> Option<Jaccard> {
    let union = a.union(g).count();
    let inter = a.intersection(g).count();
    ratio(inter as f64, union as f64).map(|j| Jaccard { j, c_unique: 1.0 - j })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TileRealisation {
    pub tile_index: u64,
    pub intended: usize,
    pub spawned: usize,
    pub rho: Option<f64>,
}

/// Blockage and removal (auto-removal effect on the player).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockageSummary {
    pub auto_remove: bool,
    pub s_total: u64,
    pub s_blocked: u64,
    pub r_block: Option<f64>,
    pub r_pass: Option<f64>,
    pub b_detected: usize,
    pub b_removed: usize,
    pub r_remove: Option<f64>,
    pub removed_subset_of_detected: bool,
    pub blockages_ahead_of_player: u64,
    pub encountered_blockages: u64,
    pub respawns: u64,
}

/// Generation controllability and variety.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenerationSummary {
    pub p_spawn: f64,
    pub grid_cells: usize,
    pub k_per_tile: usize,
    pub saturation_bound: usize,
    pub tiles: usize,
    pub o_intended: usize,
    pub o_spawned: usize,
    pub rho_spawn: Option<f64>,
    pub mean_realized_per_tile: Option<f64>,
    pub max_realized_per_tile: usize,
    pub per_tile: Vec<TileRealisation>,
    pub prefab_histogram: BTreeMap<String, u64>,
    pub catalog_classes: usize,
    pub h_prefab: Option<f64>,
    pub h_norm: Option<f64>,
}

/// Ground agent recovery and cross-agent complementarity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AgentSummary {
    pub n_rec: u64,
    pub r_recover: Option<f64>,
    pub unrecoverable: u64,
    pub target_holds: u64,
    pub ground_segments: u64,
    pub ground_blocked: u64,
    pub aerial_blockers: usize,
    pub ground_blockers: usize,
    pub jaccard: Option<f64>,
    pub c_unique: Option<f64>,
}

/// Runtime cost.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CostSummary {
    pub frame_clock: String,
    pub frames: usize,
    pub v_16: Option<f64>,
    pub v_33: Option<f64>,
    pub mean_frame_ms: Option<f64>,
    pub max_frame_ms: Option<f64>,
    pub rays_total: u64,
    pub ray_budget_per_segment: usize,
    pub max_rays_per_segment: usize,
    pub overlap_queries: u64,
    pub max_overlap_queries_per_segment: usize,
    pub rebakes: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub label: String,
    pub seed: u64,
    pub run_length: f64,
    pub distance: f64,
    pub finished: bool,
    pub game_over: bool,
    pub blockage: BlockageSummary,
    pub generation: GenerationSummary,
    pub agents: AgentSummary,
    pub cost: CostSummary,
}

pub fn summarize(acc: &MetricsAccumulator, cfg: &RunConfig, catalog: &Catalog, frame_clock: &str) -> RunSummary {
    let r = rates(acc);
    let grid = TileGrid::from_config(cfg);
    let classes: BTreeSet<&str> = acc
        .themes_shown
        .iter()
        .flat_map(|&t| catalog.for_theme(t))
        .map(|p| p.id.as_str())
        .collect();
    let counts: Vec<u64> = acc.prefab_histogram.values().copied().collect();
    let entropy = prefab_entropy(&counts, classes.len());
    let jac = jaccard(&acc.aerial_blockers, &acc.ground_blockers);
    let per_tile: Vec<TileRealisation> = acc
        .tiles
        .iter()
        .map(|(&i, t)| TileRealisation {
            tile_index: i,
            intended: t.intended,
            spawned: t.spawned,
            rho: ratio(t.spawned as f64, t.intended as f64),
        })
        .collect();
    let samples = &acc.frame_samples_ms;
    RunSummary {
        label: cfg.label.clone(),
        seed: cfg.seed,
        run_length: cfg.run_length,
        distance: acc.distance,
        finished: acc.finished,
        game_over: acc.game_over,
        blockage: BlockageSummary {
            auto_remove: cfg.auto_remove,
            s_total: acc.s_total,
            s_blocked: acc.s_blocked,
            r_block: r.r_block,
            r_pass: r.r_pass,
            b_detected: acc.b_detected.len(),
            b_removed: acc.b_removed.len(),
            r_remove: r.r_remove,
            removed_subset_of_detected: acc.b_removed.is_subset(&acc.b_detected),
            blockages_ahead_of_player: acc.blockages_ahead_of_player,
            encountered_blockages: acc.encounters,
            respawns: acc.respawns_fall + acc.respawns_encounter,
        },
        generation: GenerationSummary {
            p_spawn: cfg.p_spawn,
            grid_cells: grid.cells,
            k_per_tile: intended_count(grid.cells, cfg.p_spawn),
            saturation_bound: saturation_bound(&grid),
            tiles: acc.tiles.len(),
            o_intended: acc.o_intended(),
            o_spawned: acc.o_spawned(),
            rho_spawn: r.rho_spawn,
            mean_realized_per_tile: ratio(acc.o_spawned() as f64, acc.tiles.len() as f64),
            max_realized_per_tile: acc.tiles.values().map(|t| t.spawned).max().unwrap_or(0),
            per_tile,
            prefab_histogram: acc.prefab_histogram.clone(),
            catalog_classes: classes.len(),
            h_prefab: entropy.map(|e| e.h),
            h_norm: entropy.and_then(|e| e.h_norm),
        },
        agents: AgentSummary {
            n_rec: acc.n_rec,
            r_recover: r.r_recover,
            unrecoverable: acc.unrecoverable,
            target_holds: acc.target_holds,
            ground_segments: acc.ground_segments,
            ground_blocked: acc.ground_blocked,
            aerial_blockers: acc.aerial_blockers.len(),
            ground_blockers: acc.ground_blockers.len(),
            jaccard: jac.map(|j| j.j),
            c_unique: jac.map(|j| j.c_unique),
        },
        cost: CostSummary {
            frame_clock: frame_clock.to_string(),
            frames: samples.len(),
            v_16: frame_violation(samples, TAU_60FPS),
            v_33: frame_violation(samples, TAU_30FPS),
            mean_frame_ms: ratio(samples.iter().sum(), samples.len() as f64),
            max_frame_ms: samples.iter().copied().reduce(f64::max),
            rays_total: acc.rays_total,
            ray_budget_per_segment: ray_budget(cfg),
            max_rays_per_segment: acc.max_rays_per_segment,
            overlap_queries: acc.overlap_queries,
            max_overlap_queries_per_segment: acc.max_overlap_queries_per_segment,
            rebakes: acc.rebakes,
        },
    }
}
