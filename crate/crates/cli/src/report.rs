//! Run reports: checksums, artifact files and report verification.

use std::fs;
use std::path::{Path, PathBuf};

use apxgrp_core::FinSet;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::config::{Format, RunConfig};
use crate::error::{CliError, CliResult};

/// A CSV-shaped result: fixed header, one row per record.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Table {
        Table {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> CliResult<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| CliError::Report(e.to_string());
        w.write_record(&self.header).map_err(io)?;
        for r in &self.rows {
            w.write_record(r).map_err(io)?;
        }
        w.into_inner().map_err(|e| CliError::Report(e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SetDigest {
    pub name: String,
    pub backend: String,
    pub size: usize,
    pub sha256: String,
}

impl SetDigest {
    pub fn of(name: &str, set: &FinSet) -> SetDigest {
        SetDigest {
            name: name.to_string(),
            backend: set.ctx().descriptor(),
            size: set.len(),
            sha256: hex::encode(Sha256::digest(set.to_text().as_bytes())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub tool_version: String,
    pub wall_time_ms: u64,
    pub config: RunConfig,
    pub command: String,
    /// The input set (absent for corpus runs and full-group comparisons).
    pub input: Option<SetDigest>,
    pub family: String,
    pub outputs: Value,
    pub table: Table,
    pub sets: Vec<SetDigest>,
    pub checksum: String,
}

/// Replaces file paths by their final component so checksums do not depend on where files live.
fn scrub(v: &mut Value) {
    match v {
        Value::Object(m) => {
            for (k, x) in m.iter_mut() {
                if k == "file" {
                    if let Value::String(s) = x {
                        let name = Path::new(s.as_str())
                            .file_name()
                            .map(|n| n.to_string_lossy().into_owned())
                            .unwrap_or_default();
                        *s = name;
                    }
                } else {
                    scrub(x);
                }
            }
        }
        Value::Array(a) => a.iter_mut().for_each(scrub),
        _ => {}
    }
}

impl RunReport {
    /// SHA-256 over everything the run computed, excluding version, wall time and output settings.
    pub fn compute_checksum(&self) -> CliResult<String> {
        let mut command = serde_json::to_value(&self.config.command).map_err(|e| CliError::Report(e.to_string()))?;
        scrub(&mut command);
        let mut input = serde_json::to_value(&self.config.input).map_err(|e| CliError::Report(e.to_string()))?;
        scrub(&mut input);
        let payload = json!({
            "seed": self.config.seed,
            "backend": self.config.backend.as_ref().map(|b| b.group.clone()),
            "command": command,
            "input_config": input,
            "input": self.input,
            "family": self.family,
            "outputs": self.outputs,
            "table": self.table,
            "sets": self.sets,
        });
        let text = serde_json::to_string(&payload).map_err(|e| CliError::Report(e.to_string()))?;
        Ok(hex::encode(Sha256::digest(text.as_bytes())))
    }

    pub fn to_json(&self) -> CliResult<String> {
        let mut s = serde_json::to_string_pretty(self).map_err(|e| CliError::Report(e.to_string()))?;
        s.push('\n');
        Ok(s)
    }

    /// Writes `report.json`, `<command>.csv` and, for growth tables, a plotting script stub.
    pub fn write(&self, dir: &Path, formats: &[Format], extra: &[(String, FinSet)]) -> CliResult<Vec<PathBuf>> {
        fs::create_dir_all(dir)?;
        let mut written = Vec::new();
        if formats.contains(&Format::Json) {
            let p = dir.join("report.json");
            fs::write(&p, self.to_json()?)?;
            written.push(p);
        }
        if formats.contains(&Format::Csv) {
            let p = dir.join(format!("{}.csv", self.command));
            fs::write(&p, self.table.to_csv()?)?;
            written.push(p);
            if let Some((x, y)) = plot_columns(&self.table) {
                let p = dir.join("plot_ratios.py");
                fs::write(&p, plot_stub(&format!("{}.csv", self.command), x, y))?;
                written.push(p);
            }
        }
        for (name, set) in extra {
            let p = dir.join(format!("{name}.finset"));
            fs::write(&p, set.to_text())?;
            written.push(p);
        }
        Ok(written)
    }
}

fn plot_columns(t: &Table) -> Option<(&str, &str)> {
    let has = |c: &str| t.header.iter().any(|h| h == c);
    if has("size") && has("tripling") {
        Some(("size", "tripling"))
    } else if has("size") && has("doubling") {
        Some(("size", "doubling"))
    } else {
        None
    }
}

fn plot_stub(csv: &str, x: &str, y: &str) -> String {
    format!(
        r#"# Ratio against set size from {csv}.
import csv
import sys

import matplotlib.pyplot as plt

path = sys.argv[1] if len(sys.argv) > 1 else "{csv}"
with open(path, newline="") as f:
    rows = list(csv.DictReader(f))
xs = [float(r["{x}"]) for r in rows]
ys = [float(r["{y}"]) for r in rows]
plt.scatter(xs, ys)
plt.xscale("log")
plt.xlabel("|X|")
plt.ylabel("{y}")
plt.savefig(path.rsplit(".", 1)[0] + "_{y}.png", dpi=150)
"#
    )
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verification {
    Pass,
    /// The stored fields no longer hash to the stored checksum.
    Tampered {
        stored: String,
        recomputed: String,
    },
    /// Re-running the embedded config gives a different checksum.
    Drifted {
        stored: String,
        rerun: String,
    },
}

impl Verification {
    pub fn passed(&self) -> bool {
        *self == Verification::Pass
    }
}

pub fn read_report(path: &Path) -> CliResult<RunReport> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Report(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Report(format!("{}: {e}", path.display())))
}

/// Checks the stored checksum against the stored fields, then re-runs the embedded config.
pub fn verify_report(path: &Path) -> CliResult<Verification> {
    let report = read_report(path)?;
    let recomputed = report.compute_checksum()?;
    if recomputed != report.checksum {
        return Ok(Verification::Tampered {
            stored: report.checksum,
            recomputed,
        });
    }
    report.config.validate()?;
    let rerun = crate::run::run(&report.config, &crate::cache::Cache::disabled())?;
    if rerun.report.checksum != report.checksum {
        return Ok(Verification::Drifted {
            stored: report.checksum,
            rerun: rerun.report.checksum,
        });
    }
    Ok(Verification::Pass)
}
