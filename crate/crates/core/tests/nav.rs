mod common;

use std::collections::BTreeSet;

use corridor_sim::geometry::{Aabb, Collider, Layer, Vec3};
use corridor_sim::navsurface::{begin_rebake, complete_rebake, take_snapshot, NavWindow, Trigger, WalkableField};
use corridor_sim::spawner::SpawnedObject;
use corridor_sim::terrain::Tile;
use corridor_sim::RunConfig;

fn tile(index: u64, z: f64) -> Tile {
    Tile {
        index,
        z,
        length: 96.0,
        theme_index: 0,
        spawned_tick: 0,
        destroy_deadline: None,
    }
}

fn crate_at(id: u64, x: f64, z: f64) -> SpawnedObject {
    let aabb = Aabb::new(Vec3::new(x, 0.5, z), Vec3::new(0.5, 0.5, 0.5));
    SpawnedObject {
        id,
        prefab_id: "crate".into(),
        position: aabb.center,
        collider: Collider {
            aabb,
            layer: Layer::Obstacles,
            owner_id: id,
            root_name: format!("crate #{id}"),
        },
        tile_index: 1,
        tile_z: 0.0,
        cell_index: 3,
        y_offset: 0.0,
    }
}

#[test]
fn object_spawned_mid_bake_is_absent_from_the_result() {
    let cfg = RunConfig {
        rebake_latency: 10,
        ..RunConfig::default()
    };
    let tiles = vec![tile(0, -96.0), tile(1, 0.0)];
    let mut objects = vec![crate_at(1, -4.0, 20.0)];
    let mut nav = NavWindow::new(-45.0);
    let snap = take_snapshot(0.0, &tiles, &objects, &cfg);
    assert_eq!(begin_rebake(&mut nav, 5, 0.1, Trigger::Time, snap, &cfg), Ok(15));

    objects.push(crate_at(2, 4.0, 40.0));
    assert!(complete_rebake(&mut nav, 14, &cfg).is_none());
    let (field, job) = complete_rebake(&mut nav, 15, &cfg).unwrap();
    assert_eq!(job.snapshot.object_ids, vec![1]);
    assert!(!field.walkable(-4.0, 20.0));
    assert!(field.walkable(4.0, 40.0), "late object must not appear");

    let live = WalkableField::bake(&take_snapshot(0.0, &tiles, &objects, &cfg), cfg.nav_resolution);
    assert!(!live.walkable(4.0, 40.0));
    assert_eq!(common::field_mismatches(&field, &tiles, &objects[..1], &cfg), 0);
    assert!(common::field_mismatches(&field, &tiles, &objects, &cfg) > 0);
}

#[test]
fn zero_latency_field_equals_live_geometry() {
    let cfg = RunConfig {
        rebake_latency: 0,
        run_length: 1500.0,
        p_spawn: 60.0,
        ..RunConfig::default()
    };
    let bakes = common::for_each_bake(&cfg, |world, issue_tick, (z_issue, tiles, objects)| {
        let field = world.field().unwrap();
        assert_eq!((field.z_lo, field.z_hi), (z_issue - 50.0, z_issue + 600.0));
        assert_eq!((world.nav.z_lo, world.nav.z_hi), (field.z_lo, field.z_hi));
        assert_eq!(common::field_mismatches(field, tiles, objects.values(), &cfg), 0);
        // The bake issued at construction completes on the first step,
        // after that step has moved the player and populated tile 1.
        if issue_tick > 0 {
            assert_eq!(*z_issue, world.player.position.z);
            assert_eq!(
                common::field_mismatches(field, &world.terrain.tiles, world.objects.values(), &cfg),
                0,
                "tick {}",
                world.tick
            );
        }
    });
    assert!(bakes > 50);
}

#[test]
fn delayed_bake_uses_issue_time_geometry() {
    let cfg = RunConfig {
        rebake_latency: 40,
        run_length: 1500.0,
        p_spawn: 60.0,
        ..RunConfig::default()
    };
    let mut stale = 0;
    let bakes = common::for_each_bake(&cfg, |world, _, (z_issue, tiles, objects)| {
        let field = world.field().unwrap();
        assert_eq!((field.z_lo, field.z_hi), (z_issue - 50.0, z_issue + 600.0));
        assert_eq!(common::field_mismatches(field, tiles, objects.values(), &cfg), 0);
        let now: BTreeSet<u64> = world.objects.keys().copied().collect();
        let then: BTreeSet<u64> = objects.keys().copied().collect();
        if now != then && common::field_mismatches(field, &world.terrain.tiles, world.objects.values(), &cfg) > 0 {
            stale += 1;
        }
    });
    assert!(bakes > 20);
    assert!(stale > 0, "no bake ever lagged the live world");
}

#[test]
fn seam_staleness_causes_reproducible_stuck_events() {
    assert!(common::seam_recoveries(0).is_empty());
    let stale = common::seam_recoveries(50);
    assert!(stale.len() >= 5, "{stale:?}");
    assert_eq!(stale, common::seam_recoveries(50));
    let cfg = common::seam_config(50);
    for w in stale.windows(2) {
        assert!((w[1].0 - w[0].0) as f64 * cfg.dt >= cfg.recovery_cooldown, "{w:?}");
    }
    // Each stall sits just short of a tile's far edge.
    for (_, _, z) in &stale {
        let into_tile = (z - 0.0).rem_euclid(cfg.tile_length);
        assert!(into_tile >= cfg.tile_length - cfg.ground_target_margin - 1.0, "z {z}");
    }
}
