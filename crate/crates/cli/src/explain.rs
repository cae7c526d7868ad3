//! Plain-text description of a catalog entry: generators, operators and the
//! potentials it admits. Items marked `[derived]` are computed here rather
//! than read off the classification.

use std::fmt::Write as _;

use condsym::catalog::{
    build_case, case_variant, fixed_mass_operator, invariant_operator, is_derived_generator, unknowns, Branch, CaseId,
};
use condsym::expr::RatFunc;
use condsym::liealg::{Gen, Representation};
use condsym::potentials::{fixed_mass_potential, table_rows, RowForm};

use crate::CliError;

pub fn explain(case: &str) -> Result<String, CliError> {
    let id: CaseId = case.parse().map_err(|e: condsym::catalog::CatalogError| CliError::Config(e.to_string()))?;
    let mut out = String::new();
    match id {
        CaseId::Row(n) => explain_row(&mut out, n)?,
        other => explain_fixed(&mut out, other)?,
    }
    Ok(out)
}

fn internal(e: impl std::fmt::Display) -> CliError {
    CliError::Internal(e.to_string())
}

fn generators(out: &mut String, rep: &Representation) {
    for (g, f) in &rep.generators {
        let tag = if is_derived_generator(*g) { "  [derived]" } else { "" };
        let _ = writeln!(out, "  {} = {}{}", g.name(), f.to_text(), tag);
    }
}

fn explain_row(out: &mut String, n: u8) -> Result<(), CliError> {
    let rep = build_case(CaseId::Row(n), Branch::Generic).map_err(internal)?;
    let variant = case_variant(n).map_err(internal)?;
    let _ = writeln!(out, "case {n}: {} ({variant:?} representation), classification row {n}", rep.label);
    let _ = writeln!(out, "\ngenerators (x symbolic):");
    generators(out, &rep);
    for branch in Branch::BOTH {
        let u = unknowns(n, branch).map_err(internal)?;
        let _ = writeln!(
            out,
            "\ncoupling functions, {branch}: L = {}, Q = {}, P = {}, K = {}, F = {}",
            u.l, u.q, u.p, u.k, u.f
        );
        if matches!(n, 7 | 8) && branch == Branch::Half {
            let _ = writeln!(out, "  [derived] the brackets close only with P = 2*y*t*g; P = 0 as listed breaks [X-1, X1]");
        }
        let ops = invariant_operator(n, branch).map_err(internal)?;
        let _ = writeln!(out, "invariant operator, {branch}:");
        for (i, op) in ops.iter().enumerate() {
            let role = if i == 0 { "S" } else { "auxiliary" };
            let _ = writeln!(out, "  {role}: {op}");
        }
    }
    let _ = writeln!(out, "\npotentials:");
    for row in table_rows().iter().filter(|r| r.case == n) {
        let cond = if row.condition.is_empty() { String::new() } else { format!(" when {}", row.condition) };
        match &row.form {
            RowForm::Given(f) => {
                let _ = writeln!(out, "  row {}{cond}: F = {f}", row.id);
            }
            RowForm::Undefined(s) => {
                let _ = writeln!(
                    out,
                    "  row {}{cond}: written in the undefined symbol {}  [derived candidate from monomial invariants]",
                    row.id,
                    s.name()
                );
            }
        }
    }
    Ok(())
}

fn explain_fixed(out: &mut String, id: CaseId) -> Result<(), CliError> {
    let rep = build_case(id, Branch::Generic).map_err(internal)?;
    let _ = writeln!(out, "case {id}: {} with fixed mass M", rep.label);
    let _ = writeln!(out, "\ngenerators (x symbolic):");
    generators(out, &rep);
    let _ = writeln!(out, "\ninvariant operator: {}", fixed_mass_operator(&RatFunc::param("M")));
    let (x, y) = (RatFunc::param("x"), RatFunc::param("y"));
    match id {
        CaseId::FixedSch => {
            let _ = writeln!(out, "\npotentials: none, the equation is linear");
        }
        CaseId::FixedSchG => {
            let f = fixed_mass_potential(&x, &y, &RatFunc::zero()).map_err(internal)?;
            let _ = writeln!(out, "\npotential (m0 = 0, invariant under all six generators): F = {f}");
        }
        _ => {
            let f = fixed_mass_potential(&x, &y, &RatFunc::param("m0")).map_err(internal)?;
            let _ = writeln!(out, "\npotential (m0 != 0, no invariance under {}): F = {f}", Gen::Xm1);
        }
    }
    Ok(())
}
