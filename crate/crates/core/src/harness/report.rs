use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;

use super::config::ExperimentConfig;
use crate::error::Result;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, Serialize)]
pub struct Assertion {
    pub name: String,
    pub passed: bool,
    pub observed: f64,
    pub limit: f64,
}

impl Assertion {
    /// Passes when `observed <= limit`.
    pub fn at_most(name: impl Into<String>, observed: f64, limit: f64) -> Self {
        Assertion { name: name.into(), passed: observed <= limit, observed, limit }
    }

    /// Passes when `observed >= limit`.
    pub fn at_least(name: impl Into<String>, observed: f64, limit: f64) -> Self {
        Assertion { name: name.into(), passed: observed >= limit, observed, limit }
    }
}

/// One line of the flat export.
#[derive(Clone, Debug, Serialize)]
pub struct TableRow {
    pub item: String,
    pub quantity: String,
    pub value: f64,
}

impl TableRow {
    pub fn new(item: impl Into<String>, quantity: impl Into<String>, value: f64) -> Self {
        TableRow { item: item.into(), quantity: quantity.into(), value }
    }
}

/// The deterministic part of a report.
#[derive(Clone, Debug, Serialize)]
pub struct ReportBody {
    pub version: &'static str,
    pub command: String,
    /// Config with defaults resolved; the output path is omitted.
    pub config: ExperimentConfig,
    pub inputs: Value,
    pub results: Value,
    pub assertions: Vec<Assertion>,
    pub passed: bool,
}

#[derive(Clone, Debug)]
pub struct Report {
    pub body: ReportBody,
    pub rows: Vec<TableRow>,
    pub wall_clock_seconds: f64,
}

#[derive(Serialize)]
struct Timing {
    wall_clock_seconds: f64,
}

#[derive(Serialize)]
struct Document<'a> {
    body: &'a ReportBody,
    timing: Timing,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.body.passed
    }

    pub fn body_json(&self) -> String {
        serde_json::to_string_pretty(&self.body).expect("report body serializes")
    }

    pub fn to_json(&self) -> String {
        let doc = Document { body: &self.body, timing: Timing { wall_clock_seconds: self.wall_clock_seconds } };
        serde_json::to_string_pretty(&doc).expect("report serializes")
    }

    pub fn to_csv(&self) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for row in &self.rows {
            w.serialize(row)?;
        }
        w.flush()?;
        Ok(w.into_inner().map_err(|e| e.into_error())?)
    }

    /// Writes `<command>.json` and `<command>.csv` into `dir`, each through a
    /// temporary file and a rename.
    pub fn write(&self, dir: &Path) -> Result<(PathBuf, PathBuf)> {
        fs::create_dir_all(dir)?;
        let json = dir.join(format!("{}.json", self.body.command));
        let csv = dir.join(format!("{}.csv", self.body.command));
        write_atomic(&json, self.to_json().as_bytes())?;
        write_atomic(&csv, &self.to_csv()?)?;
        Ok((json, csv))
    }
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}
