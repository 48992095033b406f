//! World state and the fixed-order per-tick pipeline.

use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use chrono::{DateTime, Duration, SecondsFormat, Utc};
use serde::{Deserialize, Serialize};

use crate::aerial::{self, AerialState};
use crate::config::{ConfigError, RunConfig};
use crate::events::{EventBody, RespawnCause, SimEvent};
use crate::geometry::{ColliderSet, LayerMask, Vec3};
use crate::ground::{self, GroundAgentState};
use crate::kinematics::{self, Input, PlayerState, RespawnOutcome};
use crate::metrics::{summarize, MetricsAccumulator, RunSummary};
use crate::navsurface::{self, NavWindow, Trigger, WalkableField};
use crate::pilot;
use crate::reporter::{BlockageReport, BlockingObject, ReportCache};
use crate::scan::{self, AgentKind, ScanSegmentResult};
use crate::spawner::{self, Catalog, SpawnedObject, TileGrid};
use crate::terrain::{self, TerrainState, Tile, GROUND_Y};

/// Forward step used when searching for a free respawn position.
pub const SAFE_STEP: f64 = 0.5;

/// Fixed epoch used for report timestamps unless a wall-clock start is given.
pub fn fixed_epoch() -> DateTime<Utc> {
    DateTime::from_timestamp(1_704_067_200, 0).expect("valid epoch")
}

/// Source of per-tick frame times.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FrameClock {
    /// Measured wall-clock time per tick.
    Wall,
    /// Deterministic cost model from the work done in the tick.
    Modeled,
}

impl FrameClock {
    pub fn name(self) -> &'static str {
        match self {
            FrameClock::Wall => "wall",
            FrameClock::Modeled => "modeled",
        }
    }
}

/// Modeled cost: base frame plus per-ray and per-baked-cell work.
pub fn modeled_frame_ms(rays: usize, baked_cells: usize) -> f64 {
    1.0 + 0.004 * rays as f64 + 0.000_05 * baked_cells as f64
}

#[derive(Clone, Debug)]
pub struct SimOptions {
    pub epoch: DateTime<Utc>,
    pub frame_clock: FrameClock,
    pub catalog: Catalog,
}

impl Default for SimOptions {
    fn default() -> Self {
        Self {
            epoch: fixed_epoch(),
            frame_clock: FrameClock::Modeled,
            catalog: Catalog::builtin(),
        }
    }
}

/// Pipeline stages in their contractual order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Stage {
    Pilot,
    Kinematics,
    Terrain,
    Objects,
    Nav,
    Aerial,
    Ground,
    Encounter,
    Metrics,
}

pub const PIPELINE: [Stage; 9] = [
    Stage::Pilot,
    Stage::Kinematics,
    Stage::Terrain,
    Stage::Objects,
    Stage::Nav,
    Stage::Aerial,
    Stage::Ground,
    Stage::Encounter,
    Stage::Metrics,
];

#[derive(Clone, Debug, Serialize)]
pub struct World {
    pub config: RunConfig,
    #[serde(skip)]
    pub options: SimOptions,
    #[serde(skip)]
    grid: TileGrid,
    pub tick: u64,
    pub player: PlayerState,
    pub input: Input,
    pub terrain: TerrainState,
    pub objects: BTreeMap<u64, SpawnedObject>,
    pub colliders: ColliderSet,
    pub next_object_id: u64,
    /// Tiles spawned but not yet populated with objects.
    pub unpopulated: Vec<Tile>,
    pub nav: NavWindow,
    #[serde(skip)]
    pub field: Option<WalkableField>,
    pub aerial: AerialState,
    pub ground: GroundAgentState,
    pub ground_target_held: bool,
    pub encountered: BTreeSet<u64>,
    pub metrics: MetricsAccumulator,
    pub reports: ReportCache,
    pub finished: bool,
    pub game_over: bool,
    /// Events produced before the first step.
    #[serde(skip)]
    pending: Vec<SimEvent>,
    #[serde(skip)]
    tick_rays: usize,
    #[serde(skip)]
    tick_cells: usize,
}

pub struct RunOutput {
    pub summary: RunSummary,
    pub events: Vec<SimEvent>,
    pub reports: ReportCache,
    pub world: World,
}

/// Fresh world with default options.
pub fn new_run(config: RunConfig) -> Result<World, ConfigError> {
    World::new(config, SimOptions::default())
}

impl World {
    pub fn new(config: RunConfig, options: SimOptions) -> Result<Self, ConfigError> {
        config.validate()?;
        let cfg = &config;
        let terrain = TerrainState::new(cfg, options.catalog.theme_count());
        let mut colliders = ColliderSet::new();
        for t in &terrain.tiles {
            colliders.insert(t.collider(cfg));
        }
        let player = PlayerState::spawn(cfg, GROUND_Y);
        let mut world = World {
            grid: TileGrid::from_config(cfg),
            tick: 0,
            input: Input::default(),
            nav: NavWindow::new(player.position.z),
            field: None,
            aerial: AerialState::new(player.position, cfg),
            ground: GroundAgentState::new(player.position),
            ground_target_held: false,
            unpopulated: terrain.tiles.iter().skip(1).cloned().collect(),
            terrain,
            objects: BTreeMap::new(),
            colliders,
            next_object_id: 1,
            encountered: BTreeSet::new(),
            metrics: MetricsAccumulator::new(),
            reports: ReportCache::new(),
            finished: false,
            game_over: false,
            pending: Vec::new(),
            tick_rays: 0,
            tick_cells: 0,
            player,
            options,
            config,
        };
        let mut events = Vec::new();
        for (i, t) in world.terrain.tiles.iter().enumerate() {
            let intended = (i > 0).then(|| spawner::intended_count(world.grid.cells, world.config.p_spawn));
            events.push(EventBody::TileSpawned {
                index: t.index,
                z: t.z,
                theme: t.theme_index,
                intended,
            });
        }
        let snapshot = navsurface::take_snapshot(
            world.player.position.z,
            &world.terrain.tiles,
            world.objects.values(),
            &world.config,
        );
        events.push(world.begin_bake(Trigger::Initial, snapshot));
        world.pending = events.into_iter().map(|body| SimEvent { tick: 0, body }).collect();
        for e in &world.pending {
            world.metrics.observe(e);
        }
        world.finished = world.player.position.z >= world.config.finish_z();
        Ok(world)
    }

    pub fn time(&self) -> f64 {
        self.tick as f64 * self.config.dt
    }

    pub fn field(&self) -> Option<&WalkableField> {
        self.field.as_ref()
    }

    pub fn is_done(&self) -> bool {
        self.finished || self.game_over
    }

    /// Events emitted while building the world; drained on first call.
    pub fn take_initial_events(&mut self) -> Vec<SimEvent> {
        std::mem::take(&mut self.pending)
    }

    pub fn step(&mut self) -> Vec<SimEvent> {
        self.step_with_order(&PIPELINE)
    }

    /// Advances one tick running `stages` in the given order. Only
    /// [`PIPELINE`] is contractual; other orders exist to show that the
    /// order is observable.
    pub fn step_with_order(&mut self, stages: &[Stage]) -> Vec<SimEvent> {
        let started = Instant::now();
        self.tick += 1;
        self.tick_rays = 0;
        self.tick_cells = 0;
        let mut out = Vec::new();
        for &stage in stages {
            if self.game_over {
                break;
            }
            match stage {
                Stage::Pilot => self.stage_pilot(),
                Stage::Kinematics => self.stage_kinematics(&mut out),
                Stage::Terrain => self.stage_terrain(&mut out),
                Stage::Objects => self.stage_objects(&mut out),
                Stage::Nav => self.stage_nav(&mut out),
                Stage::Aerial => self.stage_aerial(&mut out),
                Stage::Ground => self.stage_ground(&mut out),
                Stage::Encounter => self.stage_encounter(&mut out),
                Stage::Metrics => {}
            }
        }
        let events: Vec<SimEvent> = out.into_iter().map(|body| SimEvent { tick: self.tick, body }).collect();
        for e in &events {
            self.metrics.observe(e);
        }
        let frame = match self.options.frame_clock {
            FrameClock::Wall => started.elapsed().as_secs_f64() * 1e3,
            FrameClock::Modeled => modeled_frame_ms(self.tick_rays, self.tick_cells),
        };
        self.metrics.frame_samples_ms.push(frame);
        events
    }

    fn stage_pilot(&mut self) {
        self.input = pilot::decide(&self.config, &self.player, self.tick, self.time());
    }

    fn stage_kinematics(&mut self, out: &mut Vec<EventBody>) {
        let cfg = &self.config;
        let (p, _) = kinematics::update_velocity(&self.player, self.input, cfg.dt, cfg);
        let mut p = kinematics::integrate(&p, cfg.dt);
        let surface = terrain::ground_height(p.position.x, p.position.z, &self.terrain.tiles, cfg.x_range);
        p = kinematics::resolve_landing(&p, surface);
        let probe = kinematics::ground_probe(&p, &self.colliders);
        p = kinematics::settle(&p, probe);
        let tiles = &self.terrain.tiles;
        let x_range = cfg.x_range;
        let (mut p, outcome) = kinematics::respawn_if_fallen(&p, cfg, |q| safe_position(q.position.z, tiles, x_range));
        match outcome {
            Some(RespawnOutcome::Respawned { from, to }) => out.push(EventBody::Respawn {
                cause: RespawnCause::Fall,
                from,
                to,
                respawns_used: p.respawns_used,
            }),
            Some(RespawnOutcome::GameOver) => {
                self.game_over = true;
                out.push(EventBody::GameOver {
                    player_z: p.position.z,
                    respawns_used: p.respawns_used,
                });
            }
            None => {}
        }
        p.score = kinematics::score(p.position.z, cfg.score_offset);
        self.player = p;
        if self.player.position.z >= cfg.finish_z() {
            self.finished = true;
        }
    }

    fn stage_terrain(&mut self, out: &mut Vec<EventBody>) {
        let cfg = &self.config;
        let z_p = self.player.position.z;
        let time = self.time();
        let themes = self.options.catalog.theme_count();
        if themes > 1 {
            if let Some(c) = terrain::advance_theme(&mut self.terrain.theme, z_p, cfg.theme_interval, cfg.seed) {
                out.push(EventBody::ThemeChange {
                    from: c.from,
                    to: c.to,
                    player_z: z_p,
                });
            }
        }
        if let Some(tile) =
            terrain::maybe_spawn_tile(&mut self.terrain, time, self.tick, z_p, self.player.velocity.z, cfg)
        {
            self.colliders.insert(tile.collider(cfg));
            self.nav.tiles_since_bake += 1;
            out.push(EventBody::TileSpawned {
                index: tile.index,
                z: tile.z,
                theme: tile.theme_index,
                intended: Some(spawner::intended_count(self.grid.cells, cfg.p_spawn)),
            });
            self.unpopulated.push(tile);
        }
        let cleanup = terrain::cleanup_tiles(&mut self.terrain, time, z_p, cfg);
        for tile in cleanup.destroyed {
            self.colliders.remove(tile.collider_id());
            let orphans: Vec<u64> = self
                .objects
                .values()
                .filter(|o| o.tile_index == tile.index)
                .map(|o| o.id)
                .collect();
            for id in orphans {
                self.remove_object(id);
                out.push(EventBody::ObjectDespawned { id });
            }
            self.unpopulated.retain(|t| t.index != tile.index);
            out.push(EventBody::TileDestroyed { index: tile.index });
        }
    }

    fn stage_objects(&mut self, out: &mut Vec<EventBody>) {
        let cfg = &self.config;
        let k = spawner::intended_count(self.grid.cells, cfg.p_spawn);
        for tile in std::mem::take(&mut self.unpopulated) {
            let (placed, _) = spawner::place_objects(
                &self.grid,
                k,
                &tile,
                tile.theme_index,
                &self.options.catalog,
                &self.colliders,
                cfg,
                &mut self.next_object_id,
            );
            for o in placed {
                out.push(EventBody::ObjectSpawned {
                    id: o.id,
                    prefab: o.prefab_id.clone(),
                    tile_index: o.tile_index,
                    cell: o.cell_index,
                    position: o.position,
                });
                self.colliders.insert(o.collider.clone());
                self.objects.insert(o.id, o);
            }
        }
        for o in spawner::despawn_objects(&mut self.objects, self.player.position.z, cfg) {
            self.colliders.remove(o.id);
            out.push(EventBody::ObjectDespawned { id: o.id });
        }
    }

    fn begin_bake(&mut self, trigger: Trigger, snapshot: navsurface::NavSnapshot) -> EventBody {
        let window = [snapshot.z_lo, snapshot.z_hi];
        let (tiles, obstacles) = (snapshot.tile_spans.len(), snapshot.footprints.len());
        let time = self.time();
        let done_tick = navsurface::begin_rebake(&mut self.nav, self.tick, time, trigger, snapshot, &self.config)
            .expect("no bake in flight");
        EventBody::RebakeBegin {
            trigger,
            done_tick,
            window,
            tiles,
            obstacles,
        }
    }

    fn stage_nav(&mut self, out: &mut Vec<EventBody>) {
        let z_p = self.player.position.z;
        if let Some(trigger) = navsurface::should_rebake(&self.nav, self.time(), z_p, &self.config) {
            let snapshot = navsurface::take_snapshot(z_p, &self.terrain.tiles, self.objects.values(), &self.config);
            out.push(self.begin_bake(trigger, snapshot));
        }
        if let Some((field, job)) = navsurface::complete_rebake(&mut self.nav, self.tick, &self.config) {
            let (nx, nz) = field.dims();
            self.tick_cells += nx * nz;
            out.push(EventBody::RebakeDone {
                version: self.nav.bake_version,
                issue_tick: job.issue_tick,
                window: [self.nav.z_lo, self.nav.z_hi],
                cells: nx * nz,
            });
            self.field = Some(field);
            self.ground.idle = false;
        }
    }

    fn stage_aerial(&mut self, out: &mut Vec<EventBody>) {
        let cfg = &self.config;
        let target = aerial::update_target(self.player.position, self.terrain.last_ground_z(), cfg);
        self.aerial = aerial::smooth_move(&self.aerial, target, cfg.dt);
        let due = scan::due_segments(self.aerial.next_segment, self.aerial.position.z, cfg);
        for index in due.clone() {
            let result = scan::scan_segment(&self.colliders, index, AgentKind::Aerial, &self.config, true);
            self.aerial.rays_fired_total += result.rays as u64;
            self.aerial.segments_scanned += 1;
            self.aerial.last_scanned_segment_z = Some(result.segment_z);
            let probe = self.aerial.position;
            self.file_scan(&result, probe, out);
        }
        self.aerial.next_segment = due.end;
    }

    fn stage_ground(&mut self, out: &mut Vec<EventBody>) {
        let cfg = self.config.clone();
        let time = self.time();
        let desired = ground::desired_target(self.player.position, self.terrain.last_ground_z(), &cfg);
        let (target, held) = ground::update_target(self.ground.target, desired, self.field.as_ref(), &cfg);
        if held && !self.ground_target_held {
            out.push(EventBody::TargetHeld {
                desired_z: desired.z,
                held_z: target.z,
            });
        }
        self.ground_target_held = held;
        self.ground.desired = desired;
        self.ground.target = target;
        self.ground.speed = ground::compute_speed(self.player.velocity.z, cfg.v_boost_ground);
        self.ground = ground::steer(&self.ground, self.field.as_ref(), cfg.dt);
        ground::record_sample(&mut self.ground.history, time, self.ground.position.z, cfg.stuck_window);

        // Only time spent stalled short of the goal counts toward stuck.
        let behind = desired.z - self.ground.position.z > cfg.arrival_tolerance;
        if !behind {
            self.ground.history.clear();
        }
        if behind
            && !self.ground.idle
            && ground::detect_stuck(
                &self.ground.history,
                self.ground.velocity.length(),
                time,
                self.ground.cooldown_until,
                &cfg,
            )
        {
            let from_z = self.ground.position.z;
            match ground::recover(&self.ground, self.field.as_ref(), time, &cfg) {
                Ok(next) => {
                    self.ground = next;
                    out.push(EventBody::Recovery {
                        recovered: true,
                        from_z,
                        to_z: self.ground.position.z,
                        recoveries: self.ground.recoveries,
                    });
                }
                Err(_) => {
                    self.ground.idle = true;
                    out.push(EventBody::Recovery {
                        recovered: false,
                        from_z,
                        to_z: from_z,
                        recoveries: self.ground.recoveries,
                    });
                }
            }
        }

        let due = scan::due_segments(self.ground.next_segment, self.ground.position.z, &cfg);
        for index in due.clone() {
            let result = scan::scan_segment(&self.colliders, index, AgentKind::Ground, &cfg, true);
            self.ground.rays_fired_total += result.rays as u64;
            self.ground.segments_scanned += 1;
            let probe = self.ground.position;
            self.file_scan(&result, probe, out);
        }
        self.ground.next_segment = due.end;
    }

    /// Emits the scan event and, for blocked segments, files a report and
    /// applies auto-removal (aerial only).
    fn file_scan(&mut self, result: &ScanSegmentResult, probe: Vec3, out: &mut Vec<EventBody>) {
        self.tick_rays += result.rays;
        let blocker_ids: Vec<u64> = result.blockers.iter().map(|b| b.owner_id).collect();
        out.push(EventBody::Scan {
            agent: result.agent,
            segment_index: result.segment_index,
            segment_z: result.segment_z,
            rows: result.rows,
            rays: result.rays,
            passable: result.passable,
            hit_count: result.hit_count,
            overlap_queries: result.overlap_queries,
            overlap_hits: result.overlap_hits,
            blockers: blocker_ids.clone(),
        });
        if result.passable {
            return;
        }
        let remove = result.agent == AgentKind::Aerial && self.config.auto_remove;
        let report = self.build_report(result, probe, remove);
        let report_index = self.reports.report_blockage(report).expect("report invariants hold");
        out.push(EventBody::Blockage {
            agent: result.agent,
            segment_index: result.segment_index,
            segment_z: result.segment_z,
            report_index,
            player_z: self.player.position.z,
            blockers: blocker_ids.clone(),
        });
        if remove {
            for id in blocker_ids {
                if self.remove_object(id).is_some() {
                    out.push(EventBody::Removal {
                        id,
                        segment_index: result.segment_index,
                    });
                }
            }
        }
    }

    fn build_report(&self, result: &ScanSegmentResult, probe: Vec3, removed: bool) -> BlockageReport {
        let cfg = &self.config;
        let seg_mid = result.segment_z + cfg.seg_length / 2.0;
        // Snap adjustment of the blocker nearest the segment centre.
        let y_offset = result
            .blockers
            .iter()
            .filter_map(|b| self.objects.get(&b.owner_id))
            .min_by(|a, b| {
                (a.position.z - seg_mid)
                    .abs()
                    .total_cmp(&(b.position.z - seg_mid).abs())
            })
            .map_or(0.0, |o| o.y_offset);
        let tile_position = self
            .terrain
            .tile_containing(seg_mid)
            .map_or_else(|| (seg_mid / cfg.tile_length).floor() * cfg.tile_length, |t| t.z);
        let timestamp = self.options.epoch + Duration::nanoseconds((self.time() * 1e9).round() as i64);
        BlockageReport {
            scene_name: cfg.label.clone(),
            timestamp: timestamp.to_rfc3339_opts(SecondsFormat::Millis, true),
            tick: self.tick,
            player_position: self.player.position,
            player_speed: self.player.velocity.length(),
            skybox_variant: self.terrain.theme.current_index,
            latest_ground_z: self.terrain.last_ground_z().unwrap_or(0.0),
            tile_length: cfg.tile_length,
            spawn_percentage: cfg.p_spawn,
            x_range: cfg.x_range,
            clear_width: 2.0 * cfg.clear_half_width,
            jitter: cfg.z_jitter,
            y_offset,
            tile_position,
            agent: result.agent,
            segment_index: result.segment_index,
            segment_z: result.segment_z,
            probe_position: probe,
            ray_spacing: cfg.x_step,
            hit_count: result.hit_count,
            removed,
            blocking_objects: result
                .blockers
                .iter()
                .map(|b| BlockingObject {
                    owner_id: b.owner_id,
                    name: b.root_name.clone(),
                    position: b.position,
                    size: b.size,
                    layer: b.layer.name().to_string(),
                })
                .collect(),
        }
    }

    fn remove_object(&mut self, id: u64) -> Option<SpawnedObject> {
        self.colliders.remove(id);
        self.objects.remove(&id)
    }

    fn stage_encounter(&mut self, out: &mut Vec<EventBody>) {
        let bounds = self.player.bounds();
        let hits: Vec<u64> = self
            .colliders
            .overlap_box(&bounds, LayerMask::OBSTACLES)
            .into_iter()
            .map(|c| c.owner_id)
            .filter(|id| !self.encountered.contains(id))
            .collect();
        if hits.is_empty() {
            return;
        }
        for &id in &hits {
            self.encountered.insert(id);
            out.push(EventBody::Encounter {
                id,
                player_z: self.player.position.z,
            });
        }
        let target = self.clear_position(self.player.position.z);
        let (p, outcome) = kinematics::respawn(&self.player, target, &self.config);
        match outcome {
            RespawnOutcome::Respawned { from, to } => {
                self.player = p;
                out.push(EventBody::Respawn {
                    cause: RespawnCause::Encounter,
                    from,
                    to,
                    respawns_used: self.player.respawns_used,
                });
                if self.player.position.z >= self.config.finish_z() {
                    self.finished = true;
                }
            }
            RespawnOutcome::GameOver => {
                self.game_over = true;
                out.push(EventBody::GameOver {
                    player_z: p.position.z,
                    respawns_used: p.respawns_used,
                });
            }
        }
    }

    /// First lane-centre position at or ahead of `z` where the player box
    /// overlaps no obstacle.
    fn clear_position(&self, z: f64) -> Vec3 {
        let mut probe = self.player.clone();
        probe.position = Vec3::new(0.0, GROUND_Y, z);
        for _ in 0..10_000 {
            if self
                .colliders
                .overlap_box(&probe.bounds(), LayerMask::OBSTACLES)
                .is_empty()
            {
                break;
            }
            probe.position.z += SAFE_STEP;
        }
        probe.position
    }

    fn run_end_event(&self) -> SimEvent {
        SimEvent {
            tick: self.tick,
            body: EventBody::RunEnd {
                distance: self.player.score,
                finished: self.finished,
                game_over: self.game_over,
            },
        }
    }
}

/// Lane centre at `z` on the ground, or the last tile start when `z` is
/// off the generated ground.
pub fn safe_position(z: f64, tiles: &[Tile], x_range: [f64; 2]) -> Vec3 {
    if terrain::ground_height(0.0, z, tiles, x_range).is_some() {
        return Vec3::new(0.0, GROUND_Y, z);
    }
    let fallback = tiles
        .iter()
        .rev()
        .find(|t| t.z <= z)
        .or(tiles.first())
        .map_or(z, |t| t.z);
    Vec3::new(0.0, GROUND_Y, fallback)
}

/// Steps until the finish line or game over, then appends the run-end
/// event and summarises.
pub fn run_to_completion(mut world: World) -> RunOutput {
    let mut events = world.take_initial_events();
    while !world.is_done() {
        events.extend(world.step());
    }
    let end = world.run_end_event();
    world.metrics.observe(&end);
    events.push(end);
    let summary = summarize(
        &world.metrics,
        &world.config,
        &world.options.catalog,
        world.options.frame_clock.name(),
    );
    RunOutput {
        summary,
        events,
        reports: world.reports.clone(),
        world,
    }
}

/// Convenience: validate, run with default options and return the output.
pub fn run(config: RunConfig) -> Result<RunOutput, ConfigError> {
    Ok(run_to_completion(new_run(config)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::events::to_jsonl;

    fn short(seed: u64) -> RunConfig {
        RunConfig {
            run_length: 300.0,
            seed,
            ..RunConfig::default()
        }
    }

    #[test]
    fn new_run_places_player_and_seeds_tiles() {
        let w = new_run(RunConfig::default()).unwrap();
        assert_eq!(w.player.position.z, -45.0);
        let spans: Vec<(f64, f64)> = w.terrain.tiles.iter().map(|t| (t.z, t.far_edge())).collect();
        assert_eq!(spans, vec![(-96.0, 0.0), (0.0, 96.0)]);
        assert_eq!(w.metrics.s_total, 0);
    }

    #[test]
    fn invalid_config_rejected() {
        let bad = RunConfig {
            x_range: [5.0, 1.0],
            ..RunConfig::default()
        };
        assert!(matches!(
            new_run(bad),
            Err(ConfigError::Invalid { field: "x_range", .. })
        ));
    }

    #[test]
    fn identical_seed_identical_world() {
        let a = serde_json::to_string(&new_run(short(1)).unwrap()).unwrap();
        let b = serde_json::to_string(&new_run(short(1)).unwrap()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn zero_length_run() {
        let out = run(RunConfig {
            run_length: 0.0,
            ..RunConfig::default()
        })
        .unwrap();
        assert_eq!(out.summary.distance, 0.0);
        assert_eq!(out.summary.blockage.s_total, 0);
        assert!(out.summary.blockage.r_block.is_none());
    }

    #[test]
    fn clock_is_derived_from_tick() {
        let mut w = new_run(short(1)).unwrap();
        for _ in 0..1234 {
            w.step();
        }
        assert_eq!(w.time(), 1234.0 * 0.02);
    }

    #[test]
    fn short_run_is_deterministic_and_finishes() {
        let a = run(short(3)).unwrap();
        let b = run(short(3)).unwrap();
        assert_eq!(to_jsonl(&a.events), to_jsonl(&b.events));
        assert!(a.summary.finished || a.summary.game_over);
        assert!(a.events.last().is_some_and(|e| e.body.kind() == "run-end"));
    }

    #[test]
    fn offline_metrics_match_live() {
        let out = run(short(5)).unwrap();
        let mut offline = MetricsAccumulator::from_events(&out.events);
        offline.frame_samples_ms = out.world.metrics.frame_samples_ms.clone();
        assert_eq!(offline, out.world.metrics);
    }
}
