use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};

/// One asserted check. `value` is compared against `threshold` by the
/// command that produced it; the comparison is recorded in `passed`.
#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub value: f64,
    pub threshold: f64,
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub seed: u64,
    pub threads: usize,
    pub passed: bool,
    pub checks: Vec<Check>,
    pub data: Value,
}

impl Report {
    pub fn new(command: &str, seed: u64, threads: usize) -> Self {
        Self {
            command: command.to_string(),
            seed,
            threads,
            passed: true,
            checks: Vec::new(),
            data: json!({}),
        }
    }

    /// Record `value <= threshold`.
    pub fn at_most(&mut self, name: &str, value: f64, threshold: f64) {
        self.push(name, value <= threshold, value, threshold);
    }

    /// Record `value >= threshold`.
    pub fn at_least(&mut self, name: &str, value: f64, threshold: f64) {
        self.push(name, value >= threshold, value, threshold);
    }

    pub fn push(&mut self, name: &str, passed: bool, value: f64, threshold: f64) {
        self.passed &= passed;
        self.checks.push(Check { name: name.to_string(), passed, value, threshold });
    }

    pub fn set(&mut self, key: &str, value: impl Serialize) {
        self.data[key] = serde_json::to_value(value).expect("report data serializes");
    }
}

/// Output directory of a run.
pub struct OutDir {
    root: PathBuf,
}

impl OutDir {
    pub fn create(root: &Path) -> std::io::Result<Self> {
        fs::create_dir_all(root)?;
        Ok(Self { root: root.to_path_buf() })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    pub fn write_json(&self, name: &str, value: &impl Serialize) -> std::io::Result<()> {
        let text = serde_json::to_string_pretty(value).map_err(std::io::Error::other)?;
        fs::write(self.path(name), text + "\n")
    }

    pub fn csv(&self, name: &str, header: &[&str]) -> std::io::Result<Csv> {
        let mut file = std::io::BufWriter::new(fs::File::create(self.path(name))?);
        writeln!(file, "{}", header.join(","))?;
        Ok(Csv { file, columns: header.len() })
    }
}

pub struct Csv {
    file: std::io::BufWriter<fs::File>,
    columns: usize,
}

impl Csv {
    pub fn row(&mut self, values: &[f64]) -> std::io::Result<()> {
        debug_assert_eq!(values.len(), self.columns);
        let cells: Vec<String> = values.iter().map(|v| format!("{v:e}")).collect();
        writeln!(self.file, "{}", cells.join(","))
    }

    pub fn finish(mut self) -> std::io::Result<()> {
        self.file.flush()
    }
}

/// Label used in snapshot file names: `t0.5`, `t2`. Accumulated step
/// roundoff is rounded away.
pub fn time_label(t: f64) -> String {
    format!("t{}", (t * 1e9).round() / 1e9)
}
