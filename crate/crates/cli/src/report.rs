//! Check reports, their rendering and golden-file comparison.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Error,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check_name: String,
    pub params: BTreeMap<String, Value>,
    pub status: Status,
    pub witnesses: Vec<Value>,
    pub duration_ms: u64,
}

impl CheckReport {
    pub fn json_line(&self) -> String {
        serde_json::to_string(self).expect("reports serialize")
    }

    pub fn human_line(&self) -> String {
        let status = match self.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Error => "ERROR",
        };
        let params: Vec<String> = self.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
        let mut out = format!(
            "{status:5} {} [{}] {} ms",
            self.check_name,
            params.join(" "),
            self.duration_ms
        );
        for w in &self.witnesses {
            out.push_str("\n      ");
            out.push_str(&serde_json::to_string(w).expect("witnesses serialize"));
        }
        out
    }

    /// The report with its timing removed, as compared against golden files.
    pub fn stable(&self) -> Value {
        let mut v = serde_json::to_value(self).expect("reports serialize");
        if let Value::Object(m) = &mut v {
            m.remove("duration_ms");
        }
        v
    }
}

fn golden_file(dir: &Path, suite: &str) -> std::path::PathBuf {
    dir.join(format!("{}.jsonl", suite.replace(' ', "_")))
}

/// Writes the stable form of every report, one per line.
pub fn write_golden(dir: &Path, suite: &str, reports: &[CheckReport]) -> Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut text = String::new();
    for r in reports {
        text.push_str(&serde_json::to_string(&r.stable())?);
        text.push('\n');
    }
    let path = golden_file(dir, suite);
    std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))
}

/// Differences between the reports and the stored golden file, one message
/// per mismatching line.
pub fn compare_golden(dir: &Path, suite: &str, reports: &[CheckReport]) -> Result<Vec<String>> {
    let path = golden_file(dir, suite);
    let text =
        std::fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
    let stored: Vec<Value> = text
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(serde_json::from_str)
        .collect::<Result<_, _>>()
        .with_context(|| format!("parsing {}", path.display()))?;
    let mut diffs = Vec::new();
    if stored.len() != reports.len() {
        diffs.push(format!("{} stored reports, {} produced", stored.len(), reports.len()));
    }
    for (i, (want, got)) in stored.iter().zip(reports).enumerate() {
        let got = got.stable();
        if *want != got {
            diffs.push(format!("line {}: expected {want}, got {got}", i + 1));
        }
    }
    Ok(diffs)
}
