//! JSON result documents and their CSV tables.

use crate::commands::CliError;
use serde::Serialize;
use std::path::{Path, PathBuf};

/// One line of the CSV table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub observable: String,
    pub index: String,
    pub exact: f64,
    pub sampled: Option<f64>,
    pub stderr: Option<f64>,
}

impl Row {
    pub fn exact(observable: &str, index: impl ToString, exact: f64) -> Self {
        Row { observable: observable.into(), index: index.to_string(), exact, sampled: None, stderr: None }
    }
}

/// Top-level document shared by all subcommands.
#[derive(Debug, Serialize)]
pub struct ResultDocument<C: Serialize, R: Serialize> {
    pub command: &'static str,
    pub version: &'static str,
    pub seed: u64,
    pub validation_mode: bool,
    /// Effective configuration, after command-line overrides.
    pub config: C,
    pub results: R,
    pub rows: Vec<Row>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub op_count: Option<fermisim::OpCount>,
    pub wall_time_s: f64,
}

pub fn csv_path(json: &Path) -> PathBuf {
    json.with_extension("csv")
}

fn io_error(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

/// Writes `doc` to `output` (stdout when absent) and the rows as CSV next to
/// it.
pub fn emit<C: Serialize, R: Serialize>(doc: &ResultDocument<C, R>, output: Option<&Path>) -> Result<(), CliError> {
    let json = serde_json::to_string_pretty(doc).map_err(|e| CliError::Invariant(e.to_string()))?;
    let Some(path) = output else {
        println!("{json}");
        return Ok(());
    };
    std::fs::write(path, json + "\n").map_err(|e| io_error(path, e))?;
    let csv = csv_path(path);
    let mut w = csv::Writer::from_path(&csv).map_err(|e| io_error(&csv, e))?;
    for row in &doc.rows {
        w.serialize(row).map_err(|e| io_error(&csv, e))?;
    }
    if doc.rows.is_empty() {
        w.write_record(["observable", "index", "exact", "sampled", "stderr"]).map_err(|e| io_error(&csv, e))?;
    }
    w.flush().map_err(|e| io_error(&csv, e))
}
