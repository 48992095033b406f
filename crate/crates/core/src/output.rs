//! Writes the artifacts of a finished run to a directory.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use crate::events::to_jsonl;
use crate::reporter::{pdf, render_text};
use crate::sim::RunOutput;

pub const EVENTS_FILE: &str = "events.jsonl";
pub const SUMMARY_FILE: &str = "summary.json";
pub const REPORTS_FILE: &str = "reports.json";
pub const TEXT_FILE: &str = "report.txt";
pub const PDF_FILE: &str = "report.pdf";

pub fn summary_json(out: &RunOutput) -> String {
    let mut s = serde_json::to_string_pretty(&out.summary).expect("summary serializes");
    s.push('\n');
    s
}

fn write(path: PathBuf, bytes: &[u8]) -> io::Result<PathBuf> {
    fs::write(&path, bytes).map_err(|e| io::Error::new(e.kind(), format!("{}: {e}", path.display())))?;
    Ok(path)
}

/// Writes events, summary, reports, text and PDF renderings into `dir`.
pub fn write_run_artifacts(out: &RunOutput, dir: &Path) -> io::Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| io::Error::new(e.kind(), format!("{}: {e}", dir.display())))?;
    let text = render_text(&out.reports);
    Ok(vec![
        write(dir.join(EVENTS_FILE), to_jsonl(&out.events).as_bytes())?,
        write(dir.join(SUMMARY_FILE), summary_json(out).as_bytes())?,
        write(dir.join(REPORTS_FILE), out.reports.to_json().as_bytes())?,
        write(dir.join(TEXT_FILE), text.as_bytes())?,
        write(dir.join(PDF_FILE), &pdf::render_pdf(&text))?,
    ])
}
