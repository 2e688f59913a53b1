use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::CliResult;
use crate::settings::Settings;

/// Shortest round-trip text of a float, so CSVs replay bit-exactly.
pub fn f(x: f64) -> String {
    format!("{x:?}")
}

#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Table { name: name.into(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

/// What a command produces before anything touches the disk.
#[derive(Debug)]
pub struct Outcome {
    pub tables: Vec<Table>,
    pub summary: Value,
    /// Extra files (name, contents), e.g. SVG plots.
    pub files: Vec<(String, String)>,
}

impl Outcome {
    pub fn new(tables: Vec<Table>, summary: Value) -> Self {
        Outcome { tables, summary, files: Vec::new() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub version: String,
    /// Subcommand path, e.g. `tarry scan`.
    pub command: String,
    pub params: Value,
    pub seed: u64,
    pub budget: u64,
    pub settings: Settings,
    /// Arguments after the program name, as given.
    pub argv: Vec<String>,
    pub outputs: Vec<PathBuf>,
}

pub const MANIFEST_FILE: &str = "manifest.json";
pub const SUMMARY_FILE: &str = "summary.json";
pub const ERROR_FILE: &str = "error.json";

pub fn write_table(dir: &Path, t: &Table) -> CliResult<PathBuf> {
    let path = dir.join(format!("{}.csv", t.name));
    let mut w = csv::Writer::from_path(&path)?;
    w.write_record(&t.columns)?;
    for r in &t.rows {
        w.write_record(r)?;
    }
    w.flush()?;
    Ok(path)
}

/// Writes tables, summary and extra files, then the manifest listing them.
pub fn write_outcome(dir: &Path, outcome: &Outcome, mut manifest: Manifest) -> CliResult<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut outputs = Vec::new();
    for t in &outcome.tables {
        outputs.push(write_table(dir, t)?);
    }
    for (name, body) in &outcome.files {
        let p = dir.join(name);
        std::fs::write(&p, body)?;
        outputs.push(p);
    }
    let p = dir.join(SUMMARY_FILE);
    std::fs::write(&p, serde_json::to_string_pretty(&outcome.summary)? + "\n")?;
    outputs.push(p);
    manifest.outputs = outputs.iter().filter_map(|p| p.file_name().map(PathBuf::from)).collect();
    let p = dir.join(MANIFEST_FILE);
    std::fs::write(&p, serde_json::to_string_pretty(&manifest)? + "\n")?;
    outputs.push(p);
    Ok(outputs)
}
