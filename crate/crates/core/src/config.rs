//! Run configuration. Every tunable lives here; a `RunConfig` plus its seed
//! fully determines a run.
//!
//! Values marked "implementation default" below have no published figure
//! and were picked to give continuous coverage at the default run speed.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("invalid config: {field}: {reason}")]
    Invalid { field: &'static str, reason: String },
    #[error("could not parse config: {0}")]
    Parse(String),
}

fn invalid(field: &'static str, reason: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        field,
        reason: reason.into(),
    }
}

/// Scripted pilot: always runs, steers toward the lane centre plus a
/// bounded random wander, never jumps unless `jump_interval` is set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PilotConfig {
    pub wander: f64,
    pub wander_interval: f64,
    pub dead_band: f64,
    pub jump_interval: Option<f64>,
}

impl Default for PilotConfig {
    fn default() -> Self {
        Self {
            wander: 0.0,
            wander_interval: 2.0,
            dead_band: 0.1,
            jump_interval: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Scene label written into reports.
    pub label: String,
    pub dt: f64,
    pub run_length: f64,
    pub seed: u64,

    pub tile_length: f64,
    pub x_range: [f64; 2],
    pub p_spawn: f64,
    pub clear_half_width: f64,
    pub z_jitter: f64,
    pub dt_spawn_min: f64,
    pub dt_spawn_max: f64,
    pub gamma: f64,
    pub spawn_suspend_distance: f64,
    pub cleanup_distance: f64,
    pub destroy_delay: f64,
    pub despawn_distance: f64,
    pub theme_interval: f64,

    pub d_ahead: f64,
    pub d_behind: f64,
    pub nav_time_interval: f64,
    pub nav_tile_count: u32,
    pub nav_move_threshold: f64,
    pub rebake_latency: u64,
    pub nav_resolution: f64,
    pub agent_radius: f64,
    pub nav_sample_radius: f64,

    pub delta_z_aerial: f64,
    pub aerial_delta_x: f64,
    pub aerial_altitude: f64,
    pub aerial_smooth_time: f64,
    pub aerial_max_speed: f64,
    pub seg_length: f64,
    pub row_gap: f64,
    pub x_step: f64,
    pub sweep_width: f64,
    pub w_clear: f64,
    pub auto_remove: bool,

    pub d_lookahead_ground: f64,
    pub v_boost_ground: f64,
    pub stuck_window: f64,
    pub stuck_z_threshold: f64,
    pub speed_epsilon: f64,
    pub recovery_step: f64,
    pub recovery_cooldown: f64,
    pub arrival_tolerance: f64,
    /// Distance the ground agent's goal keeps behind the generated frontier.
    pub ground_target_margin: f64,

    pub run_speed: f64,
    pub side_speed: f64,
    pub jump_force: f64,
    pub jump_forward_boost: f64,
    pub gravity: f64,
    pub damping: f64,
    pub accel_rate: f64,
    pub fall_y: f64,
    pub max_respawns: u32,
    pub score_offset: f64,
    /// Teleport to the original spawn point on respawn instead of the
    /// nearest safe lane position at the current z.
    pub respawn_at_origin: bool,
    pub pilot: PilotConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            label: "endless-corridor".into(),
            dt: 0.02,
            run_length: 2000.0,
            seed: 1,

            tile_length: 96.0,
            x_range: [-7.1, 10.55],
            p_spawn: 30.0,
            clear_half_width: 2.0,
            z_jitter: 3.0,
            dt_spawn_min: 0.5,
            dt_spawn_max: 2.0,
            gamma: 0.01,
            spawn_suspend_distance: 1000.0,
            cleanup_distance: 500.0,
            destroy_delay: 5.0,
            despawn_distance: 50.0,
            theme_interval: 2000.0,

            d_ahead: 600.0,
            d_behind: 50.0,
            nav_time_interval: 1.0,
            nav_tile_count: 5,
            nav_move_threshold: 50.0,
            rebake_latency: 25,
            nav_resolution: 0.25,
            agent_radius: 0.5,
            nav_sample_radius: 5.0,

            delta_z_aerial: 200.0,
            aerial_delta_x: 0.0,
            aerial_altitude: 15.0,
            aerial_smooth_time: 0.3,
            aerial_max_speed: 60.0,
            seg_length: 10.0,
            row_gap: 0.5,
            x_step: 0.05,
            sweep_width: 2.15,
            w_clear: 2.0,
            auto_remove: false,

            d_lookahead_ground: 300.0,
            v_boost_ground: 5.0,
            stuck_window: 1.0,
            stuck_z_threshold: 0.1,
            speed_epsilon: 0.01,
            recovery_step: 5.0,
            recovery_cooldown: 2.0,
            arrival_tolerance: 1.0,
            ground_target_margin: 5.0,

            // implementation defaults
            run_speed: 12.0,
            side_speed: 6.0,
            jump_force: 7.0,
            jump_forward_boost: 2.0,
            gravity: 9.81,
            damping: 2.0,
            accel_rate: 10.0,
            fall_y: -8.0,
            max_respawns: 9,
            score_offset: 45.0,
            respawn_at_origin: false,
            pilot: PilotConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn x_min(&self) -> f64 {
        self.x_range[0]
    }

    pub fn x_max(&self) -> f64 {
        self.x_range[1]
    }

    pub fn start_z(&self) -> f64 {
        -self.score_offset
    }

    /// Z at which the run is complete.
    pub fn finish_z(&self) -> f64 {
        self.start_z() + self.run_length
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(invalid("dt", "must be > 0"));
        }
        if !(self.x_min() < self.x_max()) {
            return Err(invalid("x_range", "x_min must be < x_max"));
        }
        if !(0.0..=100.0).contains(&self.p_spawn) {
            return Err(invalid("p_spawn", "must lie in [0, 100]"));
        }
        if self.dt_spawn_min > self.dt_spawn_max {
            return Err(invalid("dt_spawn_min", "must be <= dt_spawn_max"));
        }
        if !(self.clear_half_width < (self.x_max() - self.x_min()) / 2.0) {
            return Err(invalid("clear_half_width", "must be < (x_max - x_min) / 2"));
        }
        let non_negative: [(&'static str, f64); 34] = [
            ("run_length", self.run_length),
            ("clear_half_width", self.clear_half_width),
            ("z_jitter", self.z_jitter),
            ("dt_spawn_min", self.dt_spawn_min),
            ("gamma", self.gamma),
            ("spawn_suspend_distance", self.spawn_suspend_distance),
            ("cleanup_distance", self.cleanup_distance),
            ("destroy_delay", self.destroy_delay),
            ("despawn_distance", self.despawn_distance),
            ("d_ahead", self.d_ahead),
            ("d_behind", self.d_behind),
            ("nav_time_interval", self.nav_time_interval),
            ("nav_move_threshold", self.nav_move_threshold),
            ("agent_radius", self.agent_radius),
            ("nav_sample_radius", self.nav_sample_radius),
            ("delta_z_aerial", self.delta_z_aerial),
            ("aerial_altitude", self.aerial_altitude),
            ("w_clear", self.w_clear),
            ("d_lookahead_ground", self.d_lookahead_ground),
            ("v_boost_ground", self.v_boost_ground),
            ("stuck_window", self.stuck_window),
            ("stuck_z_threshold", self.stuck_z_threshold),
            ("speed_epsilon", self.speed_epsilon),
            ("recovery_step", self.recovery_step),
            ("recovery_cooldown", self.recovery_cooldown),
            ("arrival_tolerance", self.arrival_tolerance),
            ("ground_target_margin", self.ground_target_margin),
            ("run_speed", self.run_speed),
            ("side_speed", self.side_speed),
            ("jump_force", self.jump_force),
            ("jump_forward_boost", self.jump_forward_boost),
            ("gravity", self.gravity),
            ("damping", self.damping),
            ("score_offset", self.score_offset),
        ];
        for (field, v) in non_negative {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(invalid(field, "must be a finite value >= 0"));
            }
        }
        let positive: [(&'static str, f64); 8] = [
            ("tile_length", self.tile_length),
            ("dt_spawn_max", self.dt_spawn_max),
            ("nav_resolution", self.nav_resolution),
            ("aerial_smooth_time", self.aerial_smooth_time),
            ("aerial_max_speed", self.aerial_max_speed),
            ("seg_length", self.seg_length),
            ("row_gap", self.row_gap),
            ("x_step", self.x_step),
        ];
        for (field, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(invalid(field, "must be a finite value > 0"));
            }
        }
        if !(self.sweep_width >= 0.0) {
            return Err(invalid("sweep_width", "must be >= 0"));
        }
        if !(self.accel_rate >= 0.0) {
            return Err(invalid("accel_rate", "must be >= 0"));
        }
        if !(self.pilot.wander >= 0.0) || !(self.pilot.wander_interval > 0.0) {
            return Err(invalid("pilot", "wander must be >= 0 and wander_interval > 0"));
        }
        if let Some(j) = self.pilot.jump_interval {
            if !(j > 0.0) {
                return Err(invalid("pilot", "jump_interval must be > 0"));
            }
        }
        Ok(())
    }
}
