//! Scripted pilot standing in for keyboard input.

use rand::Rng;

use crate::config::RunConfig;
use crate::kinematics::{Input, PlayerState};
use crate::rng;

/// Lateral target for the current wander period: lane centre plus a
/// uniform offset in `[-wander, wander]`.
pub fn lateral_target(cfg: &RunConfig, time: f64) -> f64 {
    let w = cfg.pilot.wander;
    if w == 0.0 {
        return 0.0;
    }
    let period = (time / cfg.pilot.wander_interval).floor() as u64;
    rng::stream(cfg.seed, rng::PILOT, period).gen_range(-w..=w)
}

pub fn decide(cfg: &RunConfig, player: &PlayerState, tick: u64, time: f64) -> Input {
    let err = lateral_target(cfg, time) - player.position.x;
    // Releasing the key still drifts by roughly v_x / damping.
    let drift = if cfg.damping > 0.0 {
        player.velocity.x / cfg.damping
    } else {
        0.0
    };
    let h = if (err - drift).abs() > cfg.pilot.dead_band {
        (err - drift).signum() as i8
    } else {
        0
    };
    let jump = match cfg.pilot.jump_interval {
        Some(every) => {
            let period = ((every / cfg.dt).round() as u64).max(1);
            tick > 0 && tick.is_multiple_of(period)
        }
        None => false,
    };
    Input { run: true, h, jump }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_pilot_runs_straight() {
        let cfg = RunConfig::default();
        let p = PlayerState::spawn(&cfg, 0.0);
        for tick in 0..500 {
            let input = decide(&cfg, &p, tick, tick as f64 * cfg.dt);
            assert_eq!(
                input,
                Input {
                    run: true,
                    h: 0,
                    jump: false
                }
            );
        }
    }

    #[test]
    fn wander_stays_bounded() {
        let mut cfg = RunConfig::default();
        cfg.pilot.wander = 0.3;
        for i in 0..200 {
            let x = lateral_target(&cfg, i as f64 * 0.7);
            assert!(x.abs() <= 0.3);
        }
    }
}
