mod common;

use corridor_sim::geometry::{Aabb, Collider, ColliderSet, Layer, Vec3};
use corridor_sim::scan::{scan_row, scan_segment, AgentKind};
use corridor_sim::RunConfig;
use rand::Rng;

#[test]
fn raycast_and_overlap_match_brute_force() {
    let t = common::geometry_oracle(10_000, 4, 11);
    assert_eq!(t.ray_mismatches, 0, "{t:?}");
    assert_eq!(t.overlap_mismatches, 0, "{t:?}");
    assert!(t.ray_hits > t.rays / 10, "too few hits to be meaningful: {t:?}");
}

#[test]
fn row_passable_matches_millimetre_brute_force() {
    let t = common::row_oracle(10_000, 12);
    assert_eq!(t.mismatches, 0, "{t:?}");
    assert!(t.passable > 1000 && t.passable < 9000, "{t:?}");
}

#[test]
fn brute_row_boundary_cases() {
    assert!(common::brute_row_mm(&[], (0, 2000), 2000));
    assert!(!common::brute_row_mm(&[], (0, 1999), 2000));
    assert!(common::brute_row_mm(&[(-50, 0), (2000, 2100)], (-100, 2100), 2000));
    assert!(!common::brute_row_mm(&[(-50, 1), (2000, 2100)], (-100, 2100), 2000));
}

fn corridor_scene(seed: u64, cfg: &RunConfig) -> ColliderSet {
    let mut r = common::rng(seed);
    let mut set = ColliderSet::new();
    set.insert(Collider {
        aabb: Aabb::from_min_max(
            Vec3::new(cfg.x_range[0], -1.0, -50.0),
            Vec3::new(cfg.x_range[1], 0.0, 50.0),
        ),
        layer: Layer::Ground,
        owner_id: 1 << 63,
        root_name: "Ground".into(),
    });
    for id in 1..=r.gen_range(0..12u64) {
        let c = Vec3::new(
            r.gen_range(-2.5..2.5),
            r.gen_range(-0.5..1.5),
            r.gen_range(-45.0..-25.0),
        );
        let h = Vec3::new(r.gen_range(0.05..1.2), r.gen_range(0.1..1.0), r.gen_range(0.05..2.0));
        set.insert(Collider {
            aabb: Aabb::new(c, h),
            layer: Layer::Obstacles,
            owner_id: id,
            root_name: format!("o{id}"),
        });
    }
    set
}

#[test]
fn early_exit_never_changes_a_verdict() {
    let cfg = RunConfig::default();
    let mut saved = 0usize;
    let mut blocked = 0usize;
    for seed in 0..2000 {
        let set = corridor_scene(seed, &cfg);
        for agent in [AgentKind::Aerial, AgentKind::Ground] {
            let z = -45.0 + (seed % 21) as f64;
            let fast = scan_row(&set, z, agent, &cfg, true);
            let full = scan_row(&set, z, agent, &cfg, false);
            assert_eq!(fast.passable, full.passable, "seed {seed} z {z}");
            assert!(fast.rays <= full.rays);
            saved += full.rays - fast.rays;
            blocked += usize::from(!full.passable);
        }
        let a = scan_segment(&set, 0, AgentKind::Aerial, &cfg, true);
        let b = scan_segment(&set, 0, AgentKind::Aerial, &cfg, false);
        assert_eq!(
            (a.passable, a.blocked_rows),
            (b.passable, b.blocked_rows),
            "seed {seed}"
        );
        assert!(a.rays <= 924 && b.rays == 924);
        assert_eq!(a.overlap_queries, 1);
    }
    assert!(saved > 0 && blocked > 0);
}
