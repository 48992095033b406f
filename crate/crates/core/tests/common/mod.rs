//! Brute-force oracles and scenario builders shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeSet;

use corridor_sim::geometry::{Aabb, Collider, ColliderSet, Layer, LayerMask, Ray, Vec3};
use corridor_sim::navsurface::WalkableField;
use corridor_sim::scan::row_passable;
use corridor_sim::spawner::SpawnedObject;
use corridor_sim::terrain::{Tile, GROUND_Y};
use corridor_sim::RunConfig;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

const LAYERS: [Layer; 4] = [Layer::Ground, Layer::Obstacles, Layer::Agent, Layer::Other];

pub fn random_box(r: &mut ChaCha8Rng) -> Aabb {
    let c = Vec3::new(
        r.gen_range(-10.0..10.0),
        r.gen_range(-2.0..6.0),
        r.gen_range(-40.0..40.0),
    );
    let h = Vec3::new(r.gen_range(0.05..3.0), r.gen_range(0.05..3.0), r.gen_range(0.05..20.0));
    Aabb::new(c, h)
}

pub fn random_scene(r: &mut ChaCha8Rng) -> Vec<Collider> {
    let n = r.gen_range(0..=64);
    (0..n)
        .map(|i| Collider {
            aabb: random_box(r),
            layer: LAYERS[r.gen_range(0..LAYERS.len())],
            owner_id: i as u64 + 1,
            root_name: format!("box{i}"),
        })
        .collect()
}

pub fn random_mask(r: &mut ChaCha8Rng) -> LayerMask {
    let mut m = LayerMask::NONE;
    for l in LAYERS {
        if r.gen_bool(0.6) {
            m = m.with(l);
        }
    }
    m
}

fn inside(aabb: &Aabb, p: Vec3, tol: f64) -> bool {
    let (lo, hi) = (aabb.min(), aabb.max());
    (0..3).all(|i| p.axis(i) >= lo.axis(i) - tol && p.axis(i) <= hi.axis(i) + tol)
}

/// Smallest `t` at which the ray is inside the box, found by testing the
/// ray start and every face-plane crossing.
pub fn brute_ray_box(ray: &Ray, aabb: &Aabb) -> Option<f64> {
    const TOL: f64 = 1e-9;
    let mut ts = vec![0.0];
    let (lo, hi) = (aabb.min(), aabb.max());
    for i in 0..3 {
        let d = ray.direction.axis(i);
        if d != 0.0 {
            for plane in [lo.axis(i), hi.axis(i)] {
                ts.push((plane - ray.origin.axis(i)) / d);
            }
        }
    }
    ts.into_iter()
        .filter(|&t| (0.0..=ray.max_distance).contains(&t) && inside(aabb, ray.at(t), TOL))
        .min_by(f64::total_cmp)
}

/// Nearest hit over all colliders, scanning linearly.
pub fn brute_raycast(scene: &[Collider], ray: &Ray, mask: LayerMask) -> Option<(u64, f64)> {
    scene
        .iter()
        .filter(|c| mask.contains(c.layer))
        .filter_map(|c| brute_ray_box(ray, &c.aabb).map(|t| (c.owner_id, t)))
        .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)))
}

pub fn brute_overlap(scene: &[Collider], q: &Aabb, mask: LayerMask) -> BTreeSet<u64> {
    let (qlo, qhi) = (q.min(), q.max());
    scene
        .iter()
        .filter(|c| mask.contains(c.layer))
        .filter(|c| {
            let (lo, hi) = (c.aabb.min(), c.aabb.max());
            (0..3).all(|i| lo.axis(i) <= qhi.axis(i) && qlo.axis(i) <= hi.axis(i))
        })
        .map(|c| c.owner_id)
        .collect()
}

fn random_ray(r: &mut ChaCha8Rng) -> Ray {
    let origin = Vec3::new(
        r.gen_range(-12.0..12.0),
        r.gen_range(-3.0..16.0),
        r.gen_range(-45.0..45.0),
    );
    if r.gen_bool(0.4) {
        // The scanners only ever fire straight down.
        return Ray::down(origin, r.gen_range(0.1..30.0));
    }
    let dir = Vec3::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0));
    Ray::new(origin, dir, r.gen_range(0.1..60.0)).unwrap_or_else(|| Ray::down(origin, 10.0))
}

#[derive(Debug, Default)]
pub struct GeometryTally {
    pub scenes: usize,
    pub rays: usize,
    pub boxes: usize,
    pub ray_hits: usize,
    pub ray_mismatches: usize,
    pub overlap_mismatches: usize,
}

/// Compares `ColliderSet` queries against linear brute force on random
/// scenes.
pub fn geometry_oracle(scenes: usize, queries_per_scene: usize, seed: u64) -> GeometryTally {
    let mut r = rng(seed);
    let mut tally = GeometryTally {
        scenes,
        ..Default::default()
    };
    for _ in 0..scenes {
        let scene = random_scene(&mut r);
        let mut set = ColliderSet::new();
        for c in &scene {
            set.insert(c.clone());
        }
        for _ in 0..queries_per_scene {
            let mask = random_mask(&mut r);
            let ray = random_ray(&mut r);
            tally.rays += 1;
            let fast = set.raycast(&ray, mask).map(|h| (h.collider.owner_id, h.distance));
            let slow = brute_raycast(&scene, &ray, mask);
            let agree = match (fast, slow) {
                (None, None) => true,
                (Some((fid, ft)), Some((sid, st))) => {
                    tally.ray_hits += 1;
                    (ft - st).abs() <= 1e-9
                        && (fid == sid
                            || brute_ray_box(&ray, &scene[fid as usize - 1].aabb)
                                .is_some_and(|t| (t - st).abs() <= 1e-12))
                }
                _ => false,
            };
            if !agree {
                tally.ray_mismatches += 1;
            }

            let q = random_box(&mut r);
            tally.boxes += 1;
            let fast: BTreeSet<u64> = set.overlap_box(&q, mask).iter().map(|c| c.owner_id).collect();
            if fast != brute_overlap(&scene, &q, mask) {
                tally.overlap_mismatches += 1;
            }
        }
    }
    tally
}

/// Passability at 1 mm resolution. Intervals and lane are in integer
/// millimetres; a millimetre cell is blocked when an interval overlaps its
/// interior.
pub fn brute_row_mm(intervals: &[(i64, i64)], lane: (i64, i64), w_clear: i64) -> bool {
    let mut run = 0;
    let mut best = 0;
    for k in lane.0..lane.1 {
        let blocked = intervals.iter().any(|&(a, b)| a < k + 1 && b > k);
        run = if blocked { 0 } else { run + 1 };
        best = best.max(run);
    }
    best >= w_clear
}

#[derive(Debug, Default)]
pub struct RowTally {
    pub trials: usize,
    pub passable: usize,
    pub mismatches: usize,
}

pub fn row_oracle(trials: usize, seed: u64) -> RowTally {
    let mut r = rng(seed);
    let lane = (-1075, 1075);
    let mut tally = RowTally {
        trials,
        ..Default::default()
    };
    for _ in 0..trials {
        let n = r.gen_range(0..=6);
        let iv: Vec<(i64, i64)> = (0..n)
            .map(|_| {
                let a = r.gen_range(-1300..1300);
                (a, a + r.gen_range(1..400))
            })
            .collect();
        let w = if r.gen_bool(0.5) { 2000 } else { r.gen_range(1..=2200) };
        let fast = row_passable(
            &iv.iter()
                .map(|&(a, b)| (a as f64 / 1000.0, b as f64 / 1000.0))
                .collect::<Vec<_>>(),
            (lane.0 as f64 / 1000.0, lane.1 as f64 / 1000.0),
            w as f64 / 1000.0,
        );
        let slow = brute_row_mm(&iv, lane, w);
        tally.passable += usize::from(slow);
        if fast != slow {
            tally.mismatches += 1;
        }
    }
    tally
}

/// Walkability of every grid point of `field`, recomputed point by point
/// from tiles and objects.
pub fn field_mismatches<'a>(
    field: &WalkableField,
    tiles: &[Tile],
    objects: impl IntoIterator<Item = &'a SpawnedObject>,
    cfg: &RunConfig,
) -> usize {
    let r = cfg.agent_radius;
    let boxes: Vec<Aabb> = objects
        .into_iter()
        .map(|o| o.collider.aabb)
        .filter(|b| b.max().y >= GROUND_Y)
        .collect();
    let (nx, nz) = field.dims();
    let mut bad = 0;
    for j in 0..nz {
        for i in 0..nx {
            let (x, z) = field.point(i, j);
            let on_tile = tiles.iter().any(|t| t.z <= z && z <= t.z + t.length);
            let blocked = boxes.iter().any(|b| {
                let (lo, hi) = (b.min(), b.max());
                lo.x - r <= x && x <= hi.x + r && lo.z - r <= z && z <= hi.z + r
            });
            if field.cell(i, j) != (on_tile && !blocked) {
                bad += 1;
            }
        }
    }
    bad
}

/// Obstacle-free run whose tiles arrive slowly enough that the ground
/// agent reaches each new seam before the walkable map catches up.
pub fn seam_config(rebake_latency: u64) -> RunConfig {
    RunConfig {
        run_length: 2000.0,
        seed: 7,
        p_spawn: 0.0,
        dt_spawn_min: 8.0,
        dt_spawn_max: 8.0,
        rebake_latency,
        ..RunConfig::default()
    }
}

pub type Geometry = (f64, Vec<Tile>, std::collections::BTreeMap<u64, SpawnedObject>);

fn geometry(world: &corridor_sim::World) -> Geometry {
    (
        world.player.position.z,
        world.terrain.tiles.clone(),
        world.objects.clone(),
    )
}

/// Steps a run and calls `check` at every completed bake with the issue
/// tick and the geometry captured when that bake was issued.
pub fn for_each_bake(cfg: &RunConfig, mut check: impl FnMut(&corridor_sim::World, u64, &Geometry)) -> usize {
    use corridor_sim::EventBody;
    let mut world = corridor_sim::new_run(cfg.clone()).unwrap();
    let mut at_issue = world
        .take_initial_events()
        .iter()
        .any(|e| matches!(e.body, EventBody::RebakeBegin { .. }))
        .then(|| geometry(&world));
    let mut bakes = 0;
    while !world.is_done() {
        for e in world.step() {
            match e.body {
                EventBody::RebakeBegin { .. } => at_issue = Some(geometry(&world)),
                EventBody::RebakeDone { issue_tick, .. } => {
                    check(
                        &world,
                        issue_tick,
                        at_issue.as_ref().expect("bake issued before completion"),
                    );
                    bakes += 1;
                }
                _ => {}
            }
        }
    }
    bakes
}

/// Recovery events of the seam scenario as `(tick, recovered, from_z)`.
pub fn seam_recoveries(latency: u64) -> Vec<(u64, bool, f64)> {
    use corridor_sim::EventBody;
    corridor_sim::run(seam_config(latency))
        .unwrap()
        .events
        .iter()
        .filter_map(|e| match e.body {
            EventBody::Recovery { recovered, from_z, .. } => Some((e.tick, recovered, from_z)),
            _ => None,
        })
        .collect()
}

pub mod kin {
    use corridor_sim::geometry::Vec3;
    use corridor_sim::kinematics::{integrate, respawn, update_velocity, Input, PlayerState, RespawnOutcome};
    use corridor_sim::RunConfig;

    fn cfg(dt: f64) -> RunConfig {
        RunConfig {
            dt,
            ..RunConfig::default()
        }
    }

    pub fn grounded(v_z: f64) -> PlayerState {
        let mut p = PlayerState::spawn(&RunConfig::default(), 0.0);
        p.velocity.z = v_z;
        p
    }

    /// Largest absolute deviation from `v0 (1 - 10 dt)^n` over 200 coasting
    /// ticks at several step sizes.
    pub fn decel_recurrence_error() -> f64 {
        let mut worst = 0.0f64;
        for dt in [0.001, 0.01, 0.02, 0.05] {
            let c = cfg(dt);
            let mut p = grounded(12.0);
            for n in 1..=200 {
                p = update_velocity(&p, Input::default(), dt, &c).0;
                worst = worst.max((p.velocity.z - 12.0 * (1.0 - 10.0 * dt).powi(n)).abs());
            }
        }
        worst
    }

    /// Largest relative deviation from `exp(-10 t)` over 0.5 s at dt 1e-4.
    pub fn decel_exponential_error() -> f64 {
        let dt = 1e-4;
        let c = cfg(dt);
        let mut p = grounded(1.0);
        let mut worst = 0.0f64;
        for n in 1..=5000 {
            p = update_velocity(&p, Input::default(), dt, &c).0;
            worst = worst.max((p.velocity.z / (-10.0 * n as f64 * dt).exp() - 1.0).abs());
        }
        worst
    }

    /// Relative error of the simulated apex gain against `v^2 / 2g` at dt 1e-3.
    pub fn jump_apex_error() -> f64 {
        let dt = 1e-3;
        let c = cfg(dt);
        let mut p = update_velocity(
            &grounded(0.0),
            Input {
                jump: true,
                ..Input::default()
            },
            dt,
            &c,
        )
        .0;
        let (vy, y0) = (p.velocity.y, p.position.y);
        let mut apex = y0;
        while p.velocity.y >= 0.0 {
            p = integrate(&p, dt);
            apex = apex.max(p.position.y);
            p = update_velocity(&p, Input::default(), dt, &c).0;
        }
        ((apex - y0) / (vy * vy / (2.0 * c.gravity)) - 1.0).abs()
    }

    /// Largest relative deviation of airborne forward and lateral speed from
    /// `v0 exp(-2 t)` over 1 s at dt 1e-4.
    pub fn damping_error() -> f64 {
        let dt = 1e-4;
        let c = cfg(dt);
        let mut p = grounded(10.0);
        p.grounded = false;
        p.velocity.x = 6.0;
        let mut worst = 0.0f64;
        for n in 1..=10_000 {
            p = update_velocity(&p, Input::default(), dt, &c).0;
            let k = (-2.0 * n as f64 * dt).exp();
            worst = worst
                .max((p.velocity.z / (10.0 * k) - 1.0).abs())
                .max((p.velocity.x / (6.0 * k) - 1.0).abs());
        }
        worst
    }

    /// Respawns granted before game over.
    pub fn respawns_granted() -> u32 {
        let c = RunConfig::default();
        let mut p = grounded(0.0);
        let mut granted = 0;
        while granted <= 20 {
            p.position.y = -20.0;
            match respawn(&p, Vec3::new(0.0, 0.0, p.position.z), &c) {
                (next, RespawnOutcome::Respawned { .. }) => {
                    granted += 1;
                    p = next;
                }
                (_, RespawnOutcome::GameOver) => break,
            }
        }
        granted
    }
}
