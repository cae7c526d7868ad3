//! Command-line front end: suite runner, reports, catalog browsing.

pub mod config;
pub mod explain;
pub mod report;
pub mod suites;

use serde::Serialize;
use thiserror::Error;

use condsym::catalog::{build_case, invariant_operator, Branch, CaseId};

use crate::config::SuiteConfig;

#[derive(Debug, Error)]
pub enum CliError {
    /// Missing required input; the caller prints usage.
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Config(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Config(_) => 2,
            CliError::Internal(_) => 3,
        }
    }

    pub fn message(&self) -> String {
        match self {
            CliError::Usage(m) | CliError::Config(m) | CliError::Internal(m) => m.clone(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CatalogEntry {
    pub id: String,
    pub algebra: String,
    pub variant: String,
    pub generators: Vec<String>,
}

pub fn catalog_list() -> Result<Vec<CatalogEntry>, CliError> {
    CaseId::all()
        .into_iter()
        .map(|id| {
            let rep = build_case(id, Branch::Generic).map_err(|e| CliError::Internal(e.to_string()))?;
            Ok(CatalogEntry {
                id: id.to_string(),
                algebra: rep.label.to_string(),
                variant: format!("{:?}", rep.variant),
                generators: rep.names().iter().map(|g| g.to_string()).collect(),
            })
        })
        .collect()
}

pub fn catalog_list_text(entries: &[CatalogEntry]) -> String {
    let mut out = String::from("| case | algebra | representation | generators |\n|---|---|---|---|\n");
    for e in entries {
        out.push_str(&format!("| {} | {} | {} | {} |\n", e.id, e.algebra, e.variant, e.generators.join(", ")));
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct CatalogView {
    pub id: String,
    pub branch: Branch,
    pub algebra: String,
    /// One generator per line, `name = c_t*Dt + c_r*Dr + c_z*Dz + c_g*Dg + scalar`.
    pub representation: String,
    pub operators: Vec<String>,
}

/// Generators and operators of one catalog entry per selected branch, with
/// the configured parameter values substituted.
pub fn catalog_show(case: &str, cfg: &SuiteConfig) -> Result<Vec<CatalogView>, CliError> {
    let id: CaseId = case.parse().map_err(|e: condsym::catalog::CatalogError| CliError::Config(e.to_string()))?;
    let bindings = cfg.bindings()?;
    let mut out = Vec::new();
    for branch in cfg.branches() {
        let mut b = bindings.clone();
        if branch == Branch::Half {
            b.remove("x");
        }
        let internal = |e: &dyn std::fmt::Display| CliError::Internal(e.to_string());
        let rep = build_case(id, branch).map_err(|e| internal(&e))?.bind(&b).map_err(|e| internal(&e))?;
        let operators = match id {
            CaseId::Row(n) => invariant_operator(n, branch)
                .map_err(|e| internal(&e))?
                .iter()
                .map(|o| o.bind(&b).map(|o| o.to_string()).map_err(|e| internal(&e)))
                .collect::<Result<Vec<_>, _>>()?,
            _ => vec![condsym::catalog::fixed_mass_operator(&condsym::expr::RatFunc::param("M")).to_string()],
        };
        out.push(CatalogView { id: id.to_string(), branch, algebra: rep.label.to_string(), representation: rep.to_text(), operators });
    }
    Ok(out)
}

pub fn catalog_show_text(views: &[CatalogView]) -> String {
    let mut out = String::new();
    for v in views {
        out.push_str(&format!("case {} ({}), {}\n{}", v.id, v.branch, v.algebra, v.representation));
        for op in &v.operators {
            out.push_str(&format!("operator: {op}\n"));
        }
        out.push('\n');
    }
    out
}
