//! Ground evaluator bound to the walkable field.
//!
//! The agent chases a goal `D_lookAhead` ahead of the player, moves at a
//! speed coupled to the player's, and is stepped forward when it stalls
//! behind its goal.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::RunConfig;
use crate::geometry::Vec3;
use crate::navsurface::WalkableField;
use crate::terrain::GROUND_Y;

/// Look-ahead depth used when choosing a lateral lane.
pub const STEER_LOOKAHEAD: f64 = 2.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroundAgentState {
    pub position: Vec3,
    pub velocity: Vec3,
    pub speed: f64,
    pub target: Vec3,
    /// Unsampled goal this tick.
    pub desired: Vec3,
    /// Trailing `(time, z)` samples covering the stuck window.
    pub history: VecDeque<(f64, f64)>,
    pub cooldown_until: f64,
    pub recoveries: u32,
    pub next_segment: u64,
    pub segments_scanned: u64,
    pub rays_fired_total: u64,
    /// Set when a recovery found nothing walkable; cleared by the next bake.
    pub idle: bool,
}

impl GroundAgentState {
    pub fn new(player_pos: Vec3) -> Self {
        let position = Vec3::new(player_pos.x, GROUND_Y, player_pos.z);
        Self {
            position,
            velocity: Vec3::ZERO,
            speed: 0.0,
            target: position,
            desired: position,
            history: VecDeque::new(),
            cooldown_until: 0.0,
            recoveries: 0,
            next_segment: 0,
            segments_scanned: 0,
            rays_fired_total: 0,
            idle: false,
        }
    }
}

/// Goal before surface sampling: `[x_p, ground, z_p + D_lookAhead]`, kept a
/// margin behind the generated frontier.
pub fn desired_target(player_pos: Vec3, last_ground_z: Option<f64>, cfg: &RunConfig) -> Vec3 {
    let ahead = player_pos.z + cfg.d_lookahead_ground;
    let z = last_ground_z.map_or(ahead, |g| ahead.min(g - cfg.ground_target_margin));
    Vec3::new(player_pos.x, GROUND_Y, z)
}

/// Samples `desired` on the field. Returns the new target and whether the
/// previous one had to be kept.
pub fn update_target(previous: Vec3, desired: Vec3, field: Option<&WalkableField>, cfg: &RunConfig) -> (Vec3, bool) {
    match field.and_then(|f| f.sample_position(desired, cfg.nav_sample_radius)) {
        Some(p) => (p, false),
        None => (previous, true),
    }
}

/// `max(10, |v_pz|) + v_boost`.
pub fn compute_speed(v_pz: f64, v_boost: f64) -> f64 {
    v_pz.abs().max(10.0) + v_boost
}

/// Appends a sample and drops those older than the window (keeping one at
/// or before the window start).
pub fn record_sample(history: &mut VecDeque<(f64, f64)>, now: f64, z: f64, window: f64) {
    history.push_back((now, z));
    while history.len() >= 2 && history[1].0 <= now - window {
        history.pop_front();
    }
}

/// Stuck iff the history spans the whole window, Z moved less than the
/// threshold across it, speed is below epsilon and no cooldown is running.
pub fn detect_stuck(
    history: &VecDeque<(f64, f64)>,
    speed: f64,
    now: f64,
    cooldown_until: f64,
    cfg: &RunConfig,
) -> bool {
    let (Some(&(t0, z0)), Some(&(_, z1))) = (history.front(), history.back()) else {
        return false;
    };
    t0 <= now - cfg.stuck_window + 1e-9
        && (z1 - z0).abs() < cfg.stuck_z_threshold
        && speed < cfg.speed_epsilon
        && now >= cooldown_until
}

#[derive(Debug, Error, Clone, PartialEq)]
#[error("no walkable position within {horizon} m ahead of z = {from_z}")]
pub struct Unrecoverable {
    pub from_z: f64,
    pub horizon: f64,
}

/// Steps `recovery_step` forward and lands on the nearest walkable point,
/// searching further ahead in step increments up to the window edge.
pub fn recover(
    state: &GroundAgentState,
    field: Option<&WalkableField>,
    now: f64,
    cfg: &RunConfig,
) -> Result<GroundAgentState, Unrecoverable> {
    let from_z = state.position.z;
    let err = Unrecoverable {
        from_z,
        horizon: field.map_or(0.0, |f| (f.z_hi - from_z).max(0.0)),
    };
    let field = field.ok_or_else(|| err.clone())?;
    let step = cfg.recovery_step.max(field.resolution);
    let mut probe = Vec3::new(state.position.x, GROUND_Y, from_z + cfg.recovery_step);
    let landed = loop {
        if probe.z > field.z_hi {
            break None;
        }
        if let Some(p) = field.sample_position(probe, cfg.nav_sample_radius) {
            if p.z > from_z {
                break Some(p);
            }
        }
        probe.z += step;
    };
    let p = landed.ok_or(err)?;
    let mut next = state.clone();
    next.position = p;
    next.velocity = Vec3::ZERO;
    next.history.clear();
    next.cooldown_until = now + cfg.recovery_cooldown;
    next.recoveries += 1;
    next.idle = false;
    Ok(next)
}

/// Lateral goal: stay in the walkable span under the agent, or head for the
/// widest one ahead.
fn lateral_goal(field: &WalkableField, x: f64, z: f64) -> Option<f64> {
    let spans = field.walkable_spans(z, z + STEER_LOOKAHEAD);
    if let Some(&(lo, hi)) = spans.iter().find(|(lo, hi)| *lo <= x && x <= *hi) {
        return Some(x.clamp(lo, hi));
    }
    spans
        .iter()
        .max_by(|a, b| (a.1 - a.0).total_cmp(&(b.1 - b.0)))
        .map(|(lo, hi)| (lo + hi) / 2.0)
}

/// Greedy forward motion toward the target at `speed`, with a lateral
/// nudge. Moves only onto walkable points.
pub fn steer(state: &GroundAgentState, field: Option<&WalkableField>, dt: f64) -> GroundAgentState {
    let mut next = state.clone();
    let Some(field) = field.filter(|_| !state.idle) else {
        next.velocity = Vec3::ZERO;
        return next;
    };
    let p = state.position;
    let budget = state.speed * dt;
    let dz = (state.target.z - p.z).clamp(0.0, budget);
    let x_goal = lateral_goal(field, p.x, p.z).unwrap_or(p.x);
    let dx = (x_goal - p.x).clamp(-budget, budget);

    let candidates = [
        Vec3::new(p.x + dx, GROUND_Y, p.z + dz),
        Vec3::new(p.x, GROUND_Y, p.z + dz),
        Vec3::new(p.x + dx, GROUND_Y, p.z),
    ];
    let moved = candidates
        .into_iter()
        .find(|c| (c.x != p.x || c.z != p.z) && field.walkable(c.x, c.z))
        .unwrap_or(p);
    next.position = moved;
    next.velocity = (moved - p) * (1.0 / dt);
    next
}
