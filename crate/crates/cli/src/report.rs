//! JSON and Markdown reports built from the same verdict list.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Serialize;

use condsym::survey::Status;

use crate::config::SuiteConfig;
use crate::suites::SuiteResult;
use crate::CliError;

/// JSON Schema the report file conforms to.
pub const REPORT_SCHEMA: &str = include_str!("../schema/report.schema.json");

#[derive(Clone, Debug, Serialize)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub derived_candidate: usize,
    pub verdict: Status,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub tool: String,
    pub version: String,
    pub config: SuiteConfig,
    pub summary: Summary,
    pub suites: Vec<SuiteResult>,
}

/// Run metadata kept out of the report so the report is reproducible.
#[derive(Clone, Debug, Serialize)]
pub struct RunInfo {
    pub timestamp_unix: u64,
    pub elapsed_ms: BTreeMap<String, u128>,
}

impl Report {
    pub fn new(config: SuiteConfig, suites: Vec<SuiteResult>) -> Report {
        let count = |s: Status| suites.iter().flat_map(|r| &r.checks).filter(|c| c.status == s).count();
        let fail = count(Status::Fail);
        let summary = Summary {
            pass: count(Status::Pass),
            fail,
            derived_candidate: count(Status::DerivedCandidate),
            verdict: Status::from_bool(fail == 0),
        };
        Report { tool: "condsym".into(), version: env!("CARGO_PKG_VERSION").into(), config, summary, suites }
    }

    /// 0 when no check failed; `derived-candidate` results do not count.
    pub fn exit_code(&self) -> i32 {
        if self.summary.fail == 0 {
            0
        } else {
            1
        }
    }

    pub fn run_info(&self) -> RunInfo {
        let timestamp_unix =
            std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        RunInfo {
            timestamp_unix,
            elapsed_ms: self.suites.iter().map(|s| (s.suite.name().to_string(), s.elapsed_ms)).collect(),
        }
    }

    pub fn to_json(&self) -> Result<String, CliError> {
        serde_json::to_string_pretty(self).map(|s| s + "\n").map_err(|e| CliError::Internal(e.to_string()))
    }

    pub fn to_markdown(&self) -> String {
        let s = &self.summary;
        let mut out = format!(
            "# condsym report\n\nVersion {}. Verdict: **{}** ({} pass, {} fail, {} derived-candidate).\n",
            self.version,
            s.verdict.as_str(),
            s.pass,
            s.fail,
            s.derived_candidate
        );
        for suite in &self.suites {
            out.push_str(&format!("\n## {}\n\n| check | verdict | summary |\n|---|---|---|\n", suite.suite.name()));
            for c in &suite.checks {
                out.push_str(&format!("| {} | {} | {} |\n", cell(&c.id), c.status.as_str(), cell(&c.summary)));
            }
            for sec in &suite.sections {
                out.push('\n');
                out.push_str(sec);
            }
        }
        out
    }

    /// Writes `report.json`, `report.md` and `run.json` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>, CliError> {
        let io = |e: std::io::Error| CliError::Internal(format!("writing to {}: {e}", dir.display()));
        std::fs::create_dir_all(dir).map_err(io)?;
        let info = serde_json::to_string_pretty(&self.run_info()).map_err(|e| CliError::Internal(e.to_string()))?;
        let files = [("report.json", self.to_json()?), ("report.md", self.to_markdown()), ("run.json", info + "\n")];
        let mut paths = Vec::new();
        for (name, body) in files {
            let p = dir.join(name);
            std::fs::write(&p, body).map_err(io)?;
            paths.push(p);
        }
        Ok(paths)
    }
}

fn cell(s: &str) -> String {
    s.replace('|', "\\|").replace('\n', " ")
}
