//! Suite jobs. Independent pieces run on the rayon pool; results come back
//! in a fixed order.

use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;

use condsym::catalog::Branch;
use condsym::invariance::Reading;
use condsym::numerics::bridge::BridgeWarning;
use condsym::numerics::checks::{bridge_suite, covariance_suite};
use condsym::numerics::{diffusion_mass, fourier_bridge, unitary_mass, ZetaGrid, C64};
use condsym::survey::{algebra_survey, case_invariance_bound, potential_survey, root_survey, Check, Status};
use condsym::liealg::Gen;

use crate::config::{Suite, SuiteConfig};
use crate::CliError;

#[derive(Clone, Debug, Serialize)]
pub struct SuiteResult {
    pub suite: Suite,
    pub checks: Vec<Check>,
    pub details: Value,
    /// Extra Markdown shown under the verdict table.
    #[serde(skip)]
    pub sections: Vec<String>,
    #[serde(skip)]
    pub elapsed_ms: u128,
}

fn internal(e: impl std::fmt::Display) -> CliError {
    CliError::Internal(e.to_string())
}

fn to_value(v: &impl Serialize) -> Result<Value, CliError> {
    serde_json::to_value(v).map_err(internal)
}

/// Runs the selected suites concurrently, in the order given.
pub fn run_suites(cfg: &SuiteConfig) -> Result<Vec<SuiteResult>, CliError> {
    let mut suites = cfg.suites.clone();
    suites.sort();
    suites.dedup();
    suites.par_iter().map(|s| run_suite(*s, cfg)).collect()
}

pub fn run_suite(suite: Suite, cfg: &SuiteConfig) -> Result<SuiteResult, CliError> {
    let start = Instant::now();
    let (checks, details, sections) = match suite {
        Suite::Algebra => {
            let s = algebra_survey().map_err(internal)?;
            let mut table = String::from("| bracket | value |\n|---|---|\n");
            for e in &s.table {
                table.push_str(&format!("| [{}, {}] | {} |\n", e.a, e.b, e.bracket));
            }
            (s.checks(), to_value(&s)?, vec![table])
        }
        Suite::Roots => {
            let pairs = [(Gen::X0, Gen::N), (Gen::D, Gen::N)];
            let surveys = pairs.par_iter().map(|p| root_survey(*p)).collect::<Result<Vec<_>, _>>().map_err(internal)?;
            let mut sections = Vec::new();
            for s in &surveys {
                let mut t = format!("Cartan pair ({}, {})\n\n| generator | weight |\n|---|---|\n", s.cartan.0, s.cartan.1);
                for w in &s.weights {
                    let tag = if w.derived { " (derived)" } else { "" };
                    t.push_str(&format!("| {}{} | ({}, {}) |\n", w.generator, tag, w.weight.0, w.weight.1));
                }
                sections.push(t);
            }
            (surveys.iter().flat_map(|s| s.checks()).collect(), to_value(&surveys)?, sections)
        }
        Suite::Invariance => invariance(cfg)?,
        Suite::Potentials => {
            let s = potential_survey(&cfg.cases).map_err(internal)?;
            let mut sections = Vec::new();
            for row in &s.rows {
                let Some(rep) = &row.report else { continue };
                let mut t = format!(
                    "Row {} on {}: `{}`\n\n| generator | lambda | vanishes |\n|---|---|---|\n",
                    row.id, row.algebra, rep.form
                );
                for c in &rep.checks {
                    t.push_str(&format!("| {} | {} | {} |\n", c.generator, c.lambda, c.pass));
                }
                sections.push(t);
            }
            (s.checks(), to_value(&s)?, sections)
        }
        Suite::Numeric => {
            let ncfg = cfg.numeric()?;
            let mass = if cfg.real { diffusion_mass(1.0) } else { unitary_mass(1.0) };
            let s = covariance_suite(&ncfg, mass).map_err(internal)?;
            (s.checks(), to_value(&s)?, Vec::new())
        }
        Suite::Bridge => {
            let runs: Vec<_> = [(1.0, 1.0), (0.7, 2.0)].par_iter().map(|&(s, m)| bridge_suite(s, m)).collect();
            let mut checks: Vec<Check> = runs.iter().flat_map(|r| r.checks()).collect();
            let flat = |_z: f64, t: f64, r: f64| C64::new(t + r * r, 0.0);
            let rep = fourier_bridge(&flat, &ZetaGrid::covering(6.0, 64), 1.0, &[(1.0, 0.5)], 1e-2);
            checks.push(Check::new(
                "bridge/zeta-independent-flagged",
                Status::from_bool(rep.warnings.contains(&BridgeWarning::Degenerate)),
                format!("warnings {:?}", rep.warnings),
            ));
            (checks, to_value(&runs)?, Vec::new())
        }
    };
    Ok(SuiteResult { suite, checks, details, sections, elapsed_ms: start.elapsed().as_millis() })
}

type Parts = (Vec<Check>, Value, Vec<String>);

fn invariance(cfg: &SuiteConfig) -> Result<Parts, CliError> {
    let cases: Vec<u8> = if cfg.cases.is_empty() { (1..=8).collect() } else { cfg.cases.clone() };
    let bindings = cfg.bindings()?;
    let jobs: Vec<(u8, Branch)> = cases.iter().flat_map(|&c| cfg.branches().into_iter().map(move |b| (c, b))).collect();
    let results = jobs
        .par_iter()
        .map(|&(c, b)| {
            let mut bound = bindings.clone();
            if b == Branch::Half {
                bound.remove("x");
            }
            case_invariance_bound(c, b, &bound)
        })
        .collect::<Result<Vec<_>, _>>()
        .map_err(internal)?;
    let mut sections = Vec::new();
    for r in &results {
        let mut t = format!(
            "Case {} ({}), operators: {}\n\n| generator | reading | lambda | pass |\n|---|---|---|---|\n",
            r.case,
            r.branch,
            r.operators.iter().map(|o| format!("`{o}`")).collect::<Vec<_>>().join(", ")
        );
        for g in &r.generators {
            let reading = match g.reading {
                Reading::Modulo => "modulo",
                Reading::Simultaneous => "simultaneous",
            };
            t.push_str(&format!("| {} | {} | {} | {} |\n", g.generator, reading, g.lambda.as_deref().unwrap_or("-"), g.pass));
        }
        sections.push(t);
    }
    Ok((results.iter().flat_map(|r| r.checks()).collect(), to_value(&results)?, sections))
}
