//! Player state integration: forward velocity lerp, lateral input, jump
//! with forward boost, gravity, linear damping, fall respawn and score.

use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::geometry::{Aabb, ColliderSet, LayerMask, Ray, Vec3};

/// Length of the downward ground probe fired from the feet.
pub const GROUND_PROBE: f64 = 0.3;
/// Half extents of the player's bounding box; `position` is the feet.
pub const PLAYER_HALF_EXTENTS: Vec3 = Vec3::new(0.4, 0.9, 0.4);

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlayerState {
    pub position: Vec3,
    pub velocity: Vec3,
    pub grounded: bool,
    pub jumping: bool,
    pub running: bool,
    pub respawns_used: u32,
    pub spawn_point: Vec3,
    pub score: f64,
}

impl PlayerState {
    pub fn spawn(cfg: &RunConfig, ground_y: f64) -> Self {
        let p = Vec3::new(0.0, ground_y, cfg.start_z());
        Self {
            position: p,
            velocity: Vec3::ZERO,
            grounded: true,
            jumping: false,
            running: false,
            respawns_used: 0,
            spawn_point: p,
            score: score(p.z, cfg.score_offset),
        }
    }

    pub fn bounds(&self) -> Aabb {
        let he = PLAYER_HALF_EXTENTS;
        Aabb::new(self.position + Vec3::new(0.0, he.y, 0.0), he)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Input {
    pub run: bool,
    /// Discrete lateral input in {-1, 0, +1}.
    pub h: i8,
    pub jump: bool,
}

pub fn lerp(a: f64, b: f64, t: f64) -> f64 {
    let t = t.clamp(0.0, 1.0);
    a + (b - a) * t
}

/// Applies one tick of input to the velocity. Returns the new state and
/// whether a jump was started. Jumps are ignored while airborne.
pub fn update_velocity(p: &PlayerState, input: Input, dt: f64, cfg: &RunConfig) -> (PlayerState, bool) {
    let mut next = p.clone();
    next.running = input.run;
    let decay = (-cfg.damping * dt).exp();
    let v = &mut next.velocity;

    if p.grounded && input.run {
        v.z = cfg.run_speed;
    } else if p.grounded {
        v.z = lerp(v.z, 0.0, cfg.accel_rate * dt);
    } else {
        v.z *= decay;
    }

    if input.h != 0 {
        v.x = f64::from(input.h.signum()) * cfg.side_speed;
    } else {
        v.x *= decay;
    }

    let mut jumped = false;
    if input.jump && p.grounded && !p.jumping {
        v.y = cfg.jump_force;
        if input.run {
            v.z += cfg.jump_forward_boost;
        }
        next.jumping = true;
        next.grounded = false;
        jumped = true;
    } else if !p.grounded {
        v.y -= cfg.gravity * dt;
    }
    (next, jumped)
}

pub fn integrate(p: &PlayerState, dt: f64) -> PlayerState {
    let mut next = p.clone();
    next.position = p.position + p.velocity * dt;
    next
}

/// Height of the Ground-layer surface within [`GROUND_PROBE`] below the feet.
pub fn ground_probe(p: &PlayerState, colliders: &ColliderSet) -> Option<f64> {
    colliders
        .raycast(&Ray::down(p.position, GROUND_PROBE), LayerMask::GROUND)
        .map(|hit| hit.point.y)
}

pub fn ground_check(p: &PlayerState, colliders: &ColliderSet) -> bool {
    ground_probe(p, colliders).is_some()
}

/// Updates grounded/jumping flags from a probe result and settles the feet
/// on the surface when not rising.
pub fn settle(p: &PlayerState, ground_y: Option<f64>) -> PlayerState {
    let mut next = p.clone();
    match ground_y {
        Some(y) if p.velocity.y <= 0.0 => {
            next.grounded = true;
            next.jumping = false;
            next.position.y = y;
            next.velocity.y = 0.0;
        }
        Some(_) => next.grounded = !p.jumping,
        None => next.grounded = false,
    }
    next
}

/// Lets a descending player land on a surface it crossed during the tick.
pub fn resolve_landing(p: &PlayerState, surface_y: Option<f64>) -> PlayerState {
    let mut next = p.clone();
    if let Some(top) = surface_y {
        if p.velocity.y <= 0.0 && p.position.y < top && p.position.y > top - 1.0 {
            next.position.y = top;
            next.velocity.y = 0.0;
        }
    }
    next
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RespawnOutcome {
    Respawned { from: Vec3, to: Vec3 },
    GameOver,
}

/// Teleports the player to `target` with zeroed velocity, or reports game
/// over when the respawn budget is spent.
pub fn respawn(p: &PlayerState, target: Vec3, cfg: &RunConfig) -> (PlayerState, RespawnOutcome) {
    if p.respawns_used >= cfg.max_respawns {
        return (p.clone(), RespawnOutcome::GameOver);
    }
    let mut next = p.clone();
    next.position = if cfg.respawn_at_origin { p.spawn_point } else { target };
    next.velocity = Vec3::ZERO;
    next.respawns_used += 1;
    next.grounded = true;
    next.jumping = false;
    next.score = score(next.position.z, cfg.score_offset);
    let to = next.position;
    (next, RespawnOutcome::Respawned { from: p.position, to })
}

pub fn has_fallen(p: &PlayerState, cfg: &RunConfig) -> bool {
    p.position.y < cfg.fall_y
}

pub fn respawn_if_fallen(
    p: &PlayerState,
    cfg: &RunConfig,
    safe_target: impl FnOnce(&PlayerState) -> Vec3,
) -> (PlayerState, Option<RespawnOutcome>) {
    if !has_fallen(p, cfg) {
        return (p.clone(), None);
    }
    let target = safe_target(p);
    let (next, outcome) = respawn(p, target, cfg);
    (next, Some(outcome))
}

pub fn score(z: f64, offset: f64) -> f64 {
    (z + offset).max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Collider, Layer};

    fn cfg() -> RunConfig {
        RunConfig::default()
    }

    fn grounded_at_rest() -> PlayerState {
        PlayerState::spawn(&cfg(), 0.0)
    }

    #[test]
    fn idle_player_stays_still() {
        let (p, jumped) = update_velocity(&grounded_at_rest(), Input::default(), 0.02, &cfg());
        assert_eq!(p.velocity, Vec3::ZERO);
        assert!(!jumped);
    }

    #[test]
    fn running_assigns_speed_directly() {
        let input = Input {
            run: true,
            ..Input::default()
        };
        let (p, _) = update_velocity(&grounded_at_rest(), input, 0.02, &cfg());
        assert_eq!(p.velocity.z, 12.0);
    }

    #[test]
    fn deceleration_recurrence_is_exact() {
        let c = cfg();
        let dt = 1e-3;
        let mut p = grounded_at_rest();
        p.velocity.z = 10.0;
        for n in 1..=200 {
            p = update_velocity(&p, Input::default(), dt, &c).0;
            let exact = 10.0 * (1.0 - 10.0 * dt).powi(n);
            assert!((p.velocity.z - exact).abs() < 1e-9);
        }
    }

    #[test]
    fn lateral_input_sets_side_speed() {
        let input = Input {
            h: -1,
            ..Input::default()
        };
        let (p, _) = update_velocity(&grounded_at_rest(), input, 0.02, &cfg());
        assert_eq!(p.velocity.x, -6.0);
    }

    #[test]
    fn jump_adds_forward_boost_only_when_running() {
        let c = cfg();
        let run_jump = Input {
            run: true,
            h: 0,
            jump: true,
        };
        let (p, jumped) = update_velocity(&grounded_at_rest(), run_jump, 0.02, &c);
        assert!(jumped);
        assert_eq!(p.velocity.y, 7.0);
        assert_eq!(p.velocity.z, 14.0);
        let still_jump = Input {
            run: false,
            h: 0,
            jump: true,
        };
        let (p, _) = update_velocity(&grounded_at_rest(), still_jump, 0.02, &c);
        assert_eq!(p.velocity.z, 0.0);
    }

    #[test]
    fn no_jump_while_airborne() {
        let c = cfg();
        let mut p = grounded_at_rest();
        p.grounded = false;
        p.velocity.y = 1.0;
        let (next, jumped) = update_velocity(
            &p,
            Input {
                run: true,
                h: 0,
                jump: true,
            },
            0.02,
            &c,
        );
        assert!(!jumped);
        assert!(next.velocity.y < 1.0);
    }

    #[test]
    fn zero_velocity_integration_is_identity() {
        let p = grounded_at_rest();
        assert_eq!(integrate(&p, 0.5).position, p.position);
    }

    fn ground() -> ColliderSet {
        let mut set = ColliderSet::new();
        set.insert(Collider {
            aabb: Aabb::from_min_max(Vec3::new(-5.0, -1.0, -50.0), Vec3::new(5.0, 0.0, 50.0)),
            layer: Layer::Ground,
            owner_id: 1,
            root_name: "tile".into(),
        });
        set
    }

    #[test]
    fn ground_check_threshold() {
        let set = ground();
        let mut p = grounded_at_rest();
        p.position = Vec3::new(0.0, 0.1, 0.0);
        assert!(ground_check(&p, &set));
        p.position.y = 0.5;
        assert!(!ground_check(&p, &set));
        p.position.y = 0.3;
        assert!(ground_check(&p, &set));
    }

    #[test]
    fn fall_respawn_and_budget() {
        let c = cfg();
        let mut p = grounded_at_rest();
        p.position.y = -7.99;
        assert!(respawn_if_fallen(&p, &c, |_| Vec3::ZERO).1.is_none());
        p.position.y = -8.01;
        p.velocity = Vec3::new(1.0, -5.0, 3.0);
        let (after, outcome) = respawn_if_fallen(&p, &c, |q| Vec3::new(0.0, 0.0, q.position.z));
        assert!(matches!(outcome, Some(RespawnOutcome::Respawned { .. })));
        assert_eq!(after.velocity, Vec3::ZERO);
        assert_eq!(after.respawns_used, 1);

        p.respawns_used = 9;
        let (_, outcome) = respawn_if_fallen(&p, &c, |_| Vec3::ZERO);
        assert_eq!(outcome, Some(RespawnOutcome::GameOver));
    }

    #[test]
    fn score_offsets_and_clamps() {
        assert_eq!(score(-45.0, 45.0), 0.0);
        assert_eq!(score(0.0, 45.0), 45.0);
        assert_eq!(score(-100.0, 45.0), 0.0);
    }

    #[test]
    fn lerp_clamps_t() {
        assert_eq!(lerp(10.0, 0.0, 5.0), 0.0);
        assert_eq!(lerp(10.0, 0.0, -1.0), 10.0);
    }
}
