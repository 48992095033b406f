//! Simulation event log. One JSON object per line with keys `tick`,
//! `kind`, `payload` in that order.

use std::io::{self, BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::geometry::Vec3;
use crate::navsurface::Trigger;
use crate::scan::AgentKind;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimEvent {
    pub tick: u64,
    #[serde(flatten)]
    pub body: EventBody,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "payload", rename_all = "kebab-case")]
pub enum EventBody {
    TileSpawned {
        index: u64,
        z: f64,
        theme: usize,
        /// Objects requested for the tile; `None` for the unpopulated start tile.
        intended: Option<usize>,
    },
    ObjectSpawned {
        id: u64,
        prefab: String,
        tile_index: u64,
        cell: usize,
        position: Vec3,
    },
    ObjectDespawned {
        id: u64,
    },
    TileDestroyed {
        index: u64,
    },
    RebakeBegin {
        trigger: Trigger,
        done_tick: u64,
        window: [f64; 2],
        tiles: usize,
        obstacles: usize,
    },
    RebakeDone {
        version: u64,
        issue_tick: u64,
        window: [f64; 2],
        cells: usize,
    },
    Scan {
        agent: AgentKind,
        segment_index: u64,
        segment_z: f64,
        rows: usize,
        rays: usize,
        passable: bool,
        hit_count: usize,
        overlap_queries: usize,
        overlap_hits: usize,
        blockers: Vec<u64>,
    },
    Blockage {
        agent: AgentKind,
        segment_index: u64,
        segment_z: f64,
        report_index: usize,
        player_z: f64,
        blockers: Vec<u64>,
    },
    Removal {
        id: u64,
        segment_index: u64,
    },
    Recovery {
        recovered: bool,
        from_z: f64,
        to_z: f64,
        recoveries: u32,
    },
    TargetHeld {
        desired_z: f64,
        held_z: f64,
    },
    Respawn {
        cause: RespawnCause,
        from: Vec3,
        to: Vec3,
        respawns_used: u32,
    },
    Encounter {
        id: u64,
        player_z: f64,
    },
    ThemeChange {
        from: usize,
        to: usize,
        player_z: f64,
    },
    GameOver {
        player_z: f64,
        respawns_used: u32,
    },
    RunEnd {
        distance: f64,
        finished: bool,
        game_over: bool,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RespawnCause {
    Fall,
    Encounter,
}

impl EventBody {
    pub fn kind(&self) -> &'static str {
        match self {
            EventBody::TileSpawned { .. } => "tile-spawned",
            EventBody::ObjectSpawned { .. } => "object-spawned",
            EventBody::ObjectDespawned { .. } => "object-despawned",
            EventBody::TileDestroyed { .. } => "tile-destroyed",
            EventBody::RebakeBegin { .. } => "rebake-begin",
            EventBody::RebakeDone { .. } => "rebake-done",
            EventBody::Scan { .. } => "scan",
            EventBody::Blockage { .. } => "blockage",
            EventBody::Removal { .. } => "removal",
            EventBody::Recovery { .. } => "recovery",
            EventBody::TargetHeld { .. } => "target-held",
            EventBody::Respawn { .. } => "respawn",
            EventBody::Encounter { .. } => "encounter",
            EventBody::ThemeChange { .. } => "theme-change",
            EventBody::GameOver { .. } => "game-over",
            EventBody::RunEnd { .. } => "run-end",
        }
    }
}

pub fn to_jsonl(events: &[SimEvent]) -> String {
    let mut s = String::new();
    for e in events {
        s.push_str(&serde_json::to_string(e).expect("events serialize"));
        s.push('\n');
    }
    s
}

pub fn write_jsonl(events: &[SimEvent], mut w: impl Write) -> io::Result<()> {
    w.write_all(to_jsonl(events).as_bytes())
}

pub fn read_jsonl(r: impl BufRead) -> Result<Vec<SimEvent>, String> {
    let mut out = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line.map_err(|e| e.to_string())?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).map_err(|e| format!("line {}: {e}", i + 1))?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn key_order_and_round_trip() {
        let e = SimEvent {
            tick: 3,
            body: EventBody::Removal {
                id: 9,
                segment_index: 2,
            },
        };
        let line = serde_json::to_string(&e).unwrap();
        assert_eq!(
            line,
            r#"{"tick":3,"kind":"removal","payload":{"id":9,"segment_index":2}}"#
        );
        let back = read_jsonl(line.as_bytes()).unwrap();
        assert_eq!(back, vec![e]);
    }

    #[test]
    fn kind_names_match_serialization() {
        let e = EventBody::RunEnd {
            distance: 1.0,
            finished: true,
            game_over: false,
        };
        let v = serde_json::to_value(SimEvent {
            tick: 0,
            body: e.clone(),
        })
        .unwrap();
        assert_eq!(v["kind"], e.kind());
    }
}
