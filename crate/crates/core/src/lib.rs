//! Headless endless-runner corridor simulator with runtime playability
//! evaluators.
//!
//! A run streams ground tiles ahead of a scripted player, places obstacles
//! on each tile under a one-dimensional adjacency rule, and evaluates the
//! corridor with two agents before the player arrives: an aerial scanner
//! that can remove blockers and a ground agent bound to a walkable field.
//! Everything is driven by a [`RunConfig`] and its seed; identical inputs
//! produce byte-identical event logs.

// `!(x > 0.0)` is used on purpose so NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod aerial;
pub mod config;
pub mod events;
pub mod geometry;
pub mod ground;
pub mod kinematics;
pub mod metrics;
pub mod navsurface;
pub mod output;
pub mod pilot;
pub mod reporter;
pub mod rng;
pub mod scan;
pub mod sim;
pub mod spawner;
pub mod sweep;
pub mod terrain;
pub mod verify;

pub use config::{ConfigError, PilotConfig, RunConfig};
pub use events::{EventBody, SimEvent};
pub use metrics::{MetricsAccumulator, RunSummary};
pub use reporter::{BlockageReport, ReportCache};
pub use scan::{AgentKind, ScanSegmentResult};
pub use sim::{new_run, run, run_to_completion, FrameClock, RunOutput, SimOptions, Stage, World, PIPELINE};
