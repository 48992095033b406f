//! Blockage reports: capture, run-lifetime cache, text rendering, JSON and
//! PDF export.

pub mod pdf;

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::Vec3;
use crate::scan::AgentKind;

pub const FALLBACK_TEXT: &str = "Blockage report\n\nThere are no reports to show. Possible reasons: no detected blockages, data loss or cache reset.\n";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlockingObject {
    pub owner_id: u64,
    pub name: String,
    pub position: Vec3,
    pub size: Vec3,
    pub layer: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlockageReport {
    // Game context
    pub scene_name: String,
    pub timestamp: String,
    pub tick: u64,
    // Player state
    pub player_position: Vec3,
    pub player_speed: f64,
    // Environment state
    pub skybox_variant: usize,
    pub latest_ground_z: f64,
    pub tile_length: f64,
    // Generation parameters
    pub spawn_percentage: f64,
    pub x_range: [f64; 2],
    pub clear_width: f64,
    pub jitter: f64,
    pub y_offset: f64,
    pub tile_position: f64,
    // Scanner context
    pub agent: AgentKind,
    pub segment_index: u64,
    pub segment_z: f64,
    pub probe_position: Vec3,
    pub ray_spacing: f64,
    pub hit_count: usize,
    pub removed: bool,
    // Blocking objects
    pub blocking_objects: Vec<BlockingObject>,
}

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("ground reports cannot mark objects as removed (segment {segment_index})")]
    GroundRemoval { segment_index: u64 },
    #[error("I/O error on {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("invalid reports file {path}: {reason}")]
    Schema { path: PathBuf, reason: String },
}

impl BlockageReport {
    pub fn validate(&self) -> Result<(), ReportError> {
        if self.removed && self.agent == AgentKind::Ground {
            return Err(ReportError::GroundRemoval {
                segment_index: self.segment_index,
            });
        }
        Ok(())
    }
}

/// Append-only record of every blockage filed during a run.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ReportCache {
    reports: Vec<BlockageReport>,
}

impl ReportCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn report_blockage(&mut self, report: BlockageReport) -> Result<usize, ReportError> {
        report.validate()?;
        self.reports.push(report);
        Ok(self.reports.len() - 1)
    }

    pub fn reports(&self) -> &[BlockageReport] {
        &self.reports
    }

    pub fn len(&self) -> usize {
        self.reports.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reports.is_empty()
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.reports).expect("reports serialize");
        s.push('\n');
        s
    }

    /// Parses and validates a reports array.
    pub fn from_json(text: &str) -> Result<Self, String> {
        let reports: Vec<BlockageReport> = serde_json::from_str(text).map_err(|e| e.to_string())?;
        let mut cache = ReportCache::new();
        for r in reports {
            cache.report_blockage(r).map_err(|e| e.to_string())?;
        }
        Ok(cache)
    }

    pub fn export_json(&self, path: &Path) -> Result<(), ReportError> {
        fs::write(path, self.to_json()).map_err(|source| ReportError::Io {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn load_json(path: &Path) -> Result<Self, ReportError> {
        let text = fs::read_to_string(path).map_err(|source| ReportError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text).map_err(|reason| ReportError::Schema {
            path: path.to_path_buf(),
            reason,
        })
    }
}

fn v3(v: Vec3) -> String {
    format!("({:.3}, {:.3}, {:.3})", v.x, v.y, v.z)
}

/// Human-readable rendering, one section per report in run order.
pub fn render_text(cache: &ReportCache) -> String {
    if cache.is_empty() {
        return FALLBACK_TEXT.to_string();
    }
    let mut out = String::new();
    let _ = writeln!(out, "Blockage report ({} entries)", cache.len());
    for (i, r) in cache.reports().iter().enumerate() {
        let _ = writeln!(out);
        let _ = writeln!(out, "=== Report {} of {} ===", i + 1, cache.len());
        let _ = writeln!(out, "[Game context]");
        let _ = writeln!(out, "  Scene name: {}", r.scene_name);
        let _ = writeln!(out, "  Timestamp: {} (tick {})", r.timestamp, r.tick);
        let _ = writeln!(out, "[Player state]");
        let _ = writeln!(out, "  Position: {}", v3(r.player_position));
        let _ = writeln!(out, "  Speed: {:.3} m/s", r.player_speed);
        let _ = writeln!(out, "[Environment state]");
        let _ = writeln!(out, "  Skybox variant: {}", r.skybox_variant);
        let _ = writeln!(out, "  Latest ground Z: {:.3}", r.latest_ground_z);
        let _ = writeln!(out, "  Tile length: {:.3}", r.tile_length);
        let _ = writeln!(out, "[Generation parameters]");
        let _ = writeln!(out, "  Spawn percentage: {:.3}", r.spawn_percentage);
        let _ = writeln!(out, "  X range: [{:.3}, {:.3}]", r.x_range[0], r.x_range[1]);
        let _ = writeln!(out, "  Clear width: {:.3}", r.clear_width);
        let _ = writeln!(out, "  Jitter: {:.3}", r.jitter);
        let _ = writeln!(out, "  Y offset: {:.3}", r.y_offset);
        let _ = writeln!(out, "  Tile position: {:.3}", r.tile_position);
        let _ = writeln!(out, "[Scanner context]");
        let _ = writeln!(out, "  Agent: {}", r.agent.name());
        let _ = writeln!(out, "  Segment: {} at Z {:.3}", r.segment_index, r.segment_z);
        let _ = writeln!(out, "  Probe position: {}", v3(r.probe_position));
        let _ = writeln!(out, "  Ray spacing: {:.3}", r.ray_spacing);
        let _ = writeln!(out, "  Hit count: {}", r.hit_count);
        let _ = writeln!(out, "  Removed: {}", if r.removed { "yes" } else { "no" });
        let _ = writeln!(out, "[Blocking objects]");
        if r.blocking_objects.is_empty() {
            let _ = writeln!(out, "  (none)");
        }
        for o in &r.blocking_objects {
            let _ = writeln!(
                out,
                "  - {} (id {}) at {} size {} layer {}",
                o.name,
                o.owner_id,
                v3(o.position),
                v3(o.size),
                o.layer
            );
        }
    }
    out
}

pub const CATEGORY_HEADINGS: [&str; 6] = [
    "[Game context]",
    "[Player state]",
    "[Environment state]",
    "[Generation parameters]",
    "[Scanner context]",
    "[Blocking objects]",
];
