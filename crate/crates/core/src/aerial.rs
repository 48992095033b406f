//! Flying evaluator: smoothed pursuit of a clamped look-ahead target.

use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::geometry::Vec3;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AerialState {
    pub position: Vec3,
    /// Smoothing state carried between ticks.
    pub velocity_ref: Vec3,
    pub target: Vec3,
    /// Index of the next segment to scan.
    pub next_segment: u64,
    pub last_scanned_segment_z: Option<f64>,
    pub rays_fired_total: u64,
    pub segments_scanned: u64,
    pub smooth_time: f64,
    pub max_speed: f64,
}

impl AerialState {
    pub fn new(player_pos: Vec3, cfg: &RunConfig) -> Self {
        let position = Vec3::new(player_pos.x + cfg.aerial_delta_x, cfg.aerial_altitude, player_pos.z);
        Self {
            position,
            velocity_ref: Vec3::ZERO,
            target: position,
            next_segment: 0,
            last_scanned_segment_z: None,
            rays_fired_total: 0,
            segments_scanned: 0,
            smooth_time: cfg.aerial_smooth_time,
            max_speed: cfg.aerial_max_speed,
        }
    }
}

/// `[x_p + dx, h_f, min(z_p + dz, last ground)]`.
pub fn update_target(player_pos: Vec3, last_ground_z: Option<f64>, cfg: &RunConfig) -> Vec3 {
    let ahead = player_pos.z + cfg.delta_z_aerial;
    let z = last_ground_z.map_or(ahead, |g| ahead.min(g));
    Vec3::new(player_pos.x + cfg.aerial_delta_x, cfg.aerial_altitude, z)
}

/// Critically damped approach with a speed clamp. Follows the usual game
/// engine recurrence (omega = 2 / T_s, rational approximation of the
/// exponential) and additionally caps the per-tick displacement at
/// `max_speed * dt`.
pub fn smooth_damp(
    current: Vec3,
    target: Vec3,
    velocity: Vec3,
    smooth_time: f64,
    max_speed: f64,
    dt: f64,
) -> (Vec3, Vec3) {
    let smooth_time = smooth_time.max(1e-4);
    let omega = 2.0 / smooth_time;
    let x = omega * dt;
    let exp = 1.0 / (1.0 + x + 0.48 * x * x + 0.235 * x * x * x);

    let mut change = current - target;
    let max_change = max_speed * smooth_time;
    let len = change.length();
    if len > max_change {
        change = change * (max_change / len);
    }
    let clamped_target = current - change;
    let temp = (velocity + change * omega) * dt;
    let mut vel = (velocity - temp * omega) * exp;
    let mut out = clamped_target + (change + temp) * exp;

    // No overshoot past the original target.
    let to_target = target - current;
    let to_out = out - target;
    if to_target.dot(to_out) > 0.0 {
        out = target;
        vel = Vec3::ZERO;
    }

    let step = out - current;
    let max_step = max_speed * dt;
    let step_len = step.length();
    if step_len > max_step {
        out = current + step * (max_step / step_len);
        let v_len = vel.length();
        if v_len > max_speed {
            vel = vel * (max_speed / v_len);
        }
    }
    (out, vel)
}

pub fn smooth_move(state: &AerialState, target: Vec3, dt: f64) -> AerialState {
    let (position, velocity_ref) = smooth_damp(
        state.position,
        target,
        state.velocity_ref,
        state.smooth_time,
        state.max_speed,
        dt,
    );
    AerialState {
        position,
        velocity_ref,
        target,
        ..state.clone()
    }
}
