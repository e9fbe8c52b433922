//! Artifact writers.

use std::fmt::Write as _;
use std::path::Path;

use combsync_core::stability::write_curve_csv;
use combsync_core::{Error, StabilityCurve};
use serde::Serialize;

use crate::CliError;

fn comment_block(comments: &[String]) -> String {
    comments.iter().map(|c| format!("# {c}\n")).collect()
}

pub(crate) fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

/// Writes `curve` as `tau_s,value,m,variant` CSV sorted by τ, preceded by
/// one `# ` line per entry of `comments`.
pub fn emit_sigma_tau(curve: &StabilityCurve, path: &Path, comments: &[String]) -> Result<(), CliError> {
    if curve.is_empty() {
        return Err(Error::InsufficientData("cannot emit an empty curve".into()).into());
    }
    let mut sorted = curve.clone();
    sorted.points.sort_by(|a, b| a.tau.total_cmp(&b.tau));
    let mut buf = comment_block(comments).into_bytes();
    write_curve_csv(&sorted, &mut buf).map_err(|e| CliError::io(path, e))?;
    std::fs::write(path, buf).map_err(|e| CliError::io(path, e))
}

/// CSV with a header row followed by pre-formatted rows.
pub(crate) fn emit_table(
    path: &Path,
    comments: &[String],
    header: &str,
    rows: impl IntoIterator<Item = String>,
) -> Result<(), CliError> {
    let mut text = comment_block(comments);
    text.push_str(header);
    text.push('\n');
    for row in rows {
        let _ = writeln!(text, "{row}");
    }
    write_file(path, &text)
}

pub(crate) fn emit_summary<T: Serialize>(path: &Path, comments: &[String], summary: &T) -> Result<(), CliError> {
    let body = toml::to_string(summary)
        .map_err(|e| Error::Malformed(format!("cannot serialize summary: {e}")))?;
    write_file(path, &(comment_block(comments) + &body))
}
