//! Catalog-wide sweeps with serializable outcomes: bracket closure, root
//! weights, conditional invariance with mutation controls, and potentials.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::catalog::{
    build_conformal, build_fixed_mass, build_fixed_mass_with_coupling, build_variable_mass, build_variable_mass_with,
    dilatation_from_cartan, fixed_mass_operator, invariant_operator, is_derived_generator, reference_table, unknowns,
    Branch, CatalogError, UnknownSlot, YHat,
};
use crate::expr::{Expr, RatFunc};
use crate::invariance::{conditional_invariance_with, schroedinger_operator, InvarianceError, Reading};
use crate::liealg::{
    cartan_weights, check_structure, derive_structure_table, format_combination, Gen, LieError, Representation,
    StructureReport, StructureTable,
};
use crate::potentials::{quintic_equation_check, table_rows, verify_fixed_mass_potential, verify_row, PotentialError, RowStatus};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    /// Result for an underdetermined entry; reported, never a failure.
    DerivedCandidate,
}

impl Status {
    pub fn from_bool(ok: bool) -> Status {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::DerivedCandidate => "derived-candidate",
        }
    }
}

/// One verdict line.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub id: String,
    pub status: Status,
    pub summary: String,
}

impl Check {
    pub fn new(id: impl Into<String>, status: Status, summary: impl Into<String>) -> Self {
        Check { id: id.into(), status, summary: summary.into() }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum SurveyError {
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error(transparent)]
    Lie(#[from] LieError),
    #[error(transparent)]
    Potential(#[from] PotentialError),
    #[error(transparent)]
    Expr(#[from] crate::expr::ExprError),
}

#[derive(Clone, Debug, Serialize)]
pub struct TableEntry {
    pub a: Gen,
    pub b: Gen,
    pub bracket: String,
}

fn table_entries(t: &StructureTable) -> Vec<TableEntry> {
    t.entries
        .iter()
        .map(|((a, b), c)| TableEntry { a: *a, b: *b, bracket: format_combination(c) })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct ClosureCheck {
    pub name: String,
    pub generators: Vec<Gen>,
    pub pass: bool,
    pub failures: Vec<String>,
}

impl ClosureCheck {
    fn from_report(name: String, generators: Vec<Gen>, r: &StructureReport) -> Self {
        let failures =
            r.failures().iter().map(|p| format!("[{}, {}]: expected {}, residual {}", p.a, p.b, p.expected, p.residual)).collect();
        ClosureCheck { name, generators, pass: r.pass(), failures }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct AlgebraSurvey {
    pub generator_count: usize,
    pub antisymmetric: bool,
    pub jacobi_violations: usize,
    /// Brackets of the fixed-mass generators.
    pub table: Vec<TableEntry>,
    /// Every representation checked against the table of its algebra.
    pub closures: Vec<ClosureCheck>,
    pub operator_identity: Vec<(String, bool)>,
}

impl AlgebraSurvey {
    pub fn base_pass(&self) -> bool {
        self.generator_count == 6 && self.antisymmetric && self.jacobi_violations == 0
    }

    pub fn checks(&self) -> Vec<Check> {
        let mut out = vec![Check::new(
            "algebra/fixed-mass",
            Status::from_bool(self.base_pass()),
            format!(
                "{} generators, antisymmetric: {}, Jacobi violations: {}",
                self.generator_count, self.antisymmetric, self.jacobi_violations
            ),
        )];
        for c in &self.closures {
            let summary = if c.pass { "all brackets match".to_string() } else { c.failures.join("; ") };
            out.push(Check::new(format!("algebra/{}", c.name), Status::from_bool(c.pass), summary));
        }
        for (name, ok) in &self.operator_identity {
            out.push(Check::new(
                format!("algebra/operator-identity/{name}"),
                Status::from_bool(*ok),
                "2 M0 X-1 - Y-1/2^2 = 2 M Dt - Dr^2",
            ));
        }
        out
    }
}

/// The fixed-mass table, every table row and branch against its algebra,
/// the coupling-extended generators against the fixed-mass table, and the
/// free-operator identity.
pub fn algebra_survey() -> Result<AlgebraSurvey, SurveyError> {
    let fixed = build_fixed_mass(&RatFunc::param("x"), &RatFunc::param("M"));
    let table = derive_structure_table(&fixed)?;
    let mut closures = Vec::new();
    for case in 1..=8u8 {
        for branch in Branch::BOTH {
            let rep = build_variable_mass(case, branch)?;
            let reference = reference_table(rep.label);
            closures.push(ClosureCheck::from_report(
                format!("case-{case}/{branch}"),
                rep.names(),
                &check_structure(&rep, &reference),
            ));
        }
    }
    let mut identity = Vec::new();
    let y = RatFunc::param("y");
    for (name, m0) in [("m0=0", RatFunc::zero()), ("m0!=0", RatFunc::param("m0"))] {
        let rep = build_fixed_mass_with_coupling(&RatFunc::param("x"), &y, &m0, YHat::SameAsY);
        let sub = table.restrict(&rep.names());
        closures.push(ClosureCheck::from_report(format!("coupling/{name}"), rep.names(), &check_structure(&rep, &sub)));
    }
    let target = fixed_mass_operator(&RatFunc::param("M"));
    for (name, rep) in [
        ("plain", fixed.clone()),
        ("coupling", build_fixed_mass_with_coupling(&RatFunc::param("x"), &y, &RatFunc::zero(), YHat::SameAsY)),
    ] {
        let op = free_operator(&rep).expect("M0, X-1 and Y-1/2 present");
        identity.push((name.to_string(), op.sub(&target).is_zero()));
    }
    Ok(AlgebraSurvey {
        generator_count: fixed.generators.len(),
        antisymmetric: table.is_antisymmetric(),
        jacobi_violations: table.jacobi_violations().len(),
        table: table_entries(&table),
        closures,
        operator_identity: identity,
    })
}

/// `2 M0 X-1 - Y-1/2^2` built from a representation.
pub fn free_operator(rep: &Representation) -> Option<crate::invariance::DiffOperator> {
    Some(schroedinger_operator(rep.get(Gen::M0)?, rep.get(Gen::Xm1)?, rep.get(Gen::Ym)?))
}

#[derive(Clone, Debug, Serialize)]
pub struct RootWeight {
    pub generator: Gen,
    pub weight: (String, String),
    /// The generator's formula is derived, not given.
    pub derived: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct RootSurvey {
    pub cartan: (Gen, Gen),
    pub weights: Vec<RootWeight>,
    pub roots: usize,
    pub distinct: bool,
    pub closed_under_negation: bool,
    pub additive: bool,
    pub cartan_weight_zero: bool,
}

impl RootSurvey {
    pub fn pass(&self) -> bool {
        self.roots == 8 && self.distinct && self.closed_under_negation && self.additive && self.cartan_weight_zero
    }

    pub fn checks(&self) -> Vec<Check> {
        let (a, b) = self.cartan;
        let mut out = vec![Check::new(
            format!("roots/{a},{b}"),
            Status::from_bool(self.pass()),
            format!(
                "{} roots, distinct: {}, closed under negation: {}, additive: {}",
                self.roots, self.distinct, self.closed_under_negation, self.additive
            ),
        )];
        for w in self.weights.iter().filter(|w| w.derived) {
            out.push(Check::new(
                format!("roots/{a},{b}/{}", w.generator),
                Status::DerivedCandidate,
                format!("weight ({}, {}) of a derived generator", w.weight.0, w.weight.1),
            ));
        }
        out
    }
}

/// Ad-weights of the conformal generators for a Cartan pair, `(X0, N)` or `(D, N)`.
pub fn root_survey(cartan: (Gen, Gen)) -> Result<RootSurvey, SurveyError> {
    let mut rep = build_conformal(&RatFunc::param("x"));
    if cartan.0 == Gen::D || cartan.1 == Gen::D {
        let d = dilatation_from_cartan(&rep).expect("X0 and N present");
        rep.generators.retain(|(g, _)| *g != Gen::X0);
        rep.generators.push((Gen::D, d));
    }
    let weights = cartan_weights(&rep, cartan)?;
    let table = derive_structure_table(&rep)?;
    let zero = (RatFunc::zero(), RatFunc::zero());
    let is_cartan = |g: &Gen| *g == cartan.0 || *g == cartan.1;
    let roots: Vec<(Gen, (RatFunc, RatFunc))> =
        weights.iter().filter(|(g, _)| !is_cartan(g)).map(|(g, w)| (*g, w.clone())).collect();
    let set: BTreeSet<(RatFunc, RatFunc)> = roots.iter().map(|(_, w)| w.clone()).collect();
    let distinct = set.len() == roots.len() && !set.contains(&zero);
    let closed = set.iter().all(|(a, b)| set.contains(&(a.neg(), b.neg())));
    let mut additive = true;
    for ((a, b), comb) in &table.entries {
        let (wa, wb) = (&weights[a], &weights[b]);
        let sum = (wa.0.add(&wb.0), wa.1.add(&wb.1));
        for (g, c) in comb {
            if !c.is_zero() && weights[g] != sum {
                additive = false;
            }
        }
    }
    let cartan_weight_zero = weights[&cartan.0] == zero && weights[&cartan.1] == zero;
    Ok(RootSurvey {
        cartan,
        weights: weights
            .iter()
            .map(|(g, w)| RootWeight { generator: *g, weight: (w.0.to_string(), w.1.to_string()), derived: is_derived_generator(*g) })
            .collect(),
        roots: roots.len(),
        distinct,
        closed_under_negation: closed,
        additive,
        cartan_weight_zero,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct GeneratorInvariance {
    pub generator: Gen,
    pub reading: Reading,
    pub pass: bool,
    pub lambda: Option<String>,
    pub mu: Vec<String>,
    pub residual: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct MutationControl {
    pub slot: UnknownSlot,
    /// Generators that fail after the mutation and either passed before or
    /// now leave a different residual.
    pub broken: Vec<Gen>,
}

impl MutationControl {
    pub fn detected(&self) -> bool {
        !self.broken.is_empty()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CaseInvariance {
    pub case: u8,
    pub branch: Branch,
    pub operators: Vec<String>,
    pub generators: Vec<GeneratorInvariance>,
    pub mutations: Vec<MutationControl>,
    /// `lambda` of the dilatation generator, if it is a constant.
    pub dilatation_weight: Option<String>,
}

impl CaseInvariance {
    pub fn pass(&self, reading: Reading) -> bool {
        self.generators.iter().filter(|g| g.reading == reading).all(|g| g.pass)
    }

    pub fn mutations_detected(&self) -> usize {
        self.mutations.iter().filter(|m| m.detected()).count()
    }

    pub fn checks(&self) -> Vec<Check> {
        let id = format!("invariance/case-{}/{}", self.case, self.branch);
        let mut out = Vec::new();
        for reading in [Reading::Modulo, Reading::Simultaneous] {
            let failed: Vec<String> = self
                .generators
                .iter()
                .filter(|g| g.reading == reading && !g.pass)
                .map(|g| format!("{}: {}", g.generator, g.residual.as_deref().unwrap_or("")))
                .collect();
            let name = match reading {
                Reading::Modulo => "modulo",
                Reading::Simultaneous => "simultaneous",
            };
            let summary = if failed.is_empty() { "all generators".to_string() } else { failed.join("; ") };
            out.push(Check::new(format!("{id}/{name}"), Status::from_bool(failed.is_empty()), summary));
        }
        out.push(Check::new(
            format!("{id}/mutations"),
            Status::from_bool(self.mutations_detected() >= 3),
            format!("{} of {} mutation controls detected", self.mutations_detected(), self.mutations.len()),
        ));
        out
    }
}

fn invariance_of(rep: &Representation, ops: &[crate::invariance::DiffOperator], reading: Reading) -> Vec<GeneratorInvariance> {
    rep.generators
        .iter()
        .map(|(g, f)| match conditional_invariance_with(ops, f, reading) {
            Ok(d) => GeneratorInvariance {
                generator: *g,
                reading,
                pass: true,
                lambda: Some(d.lambda.to_string()),
                mu: d.mu.iter().map(Expr::to_string).collect(),
                residual: None,
            },
            Err(e) => GeneratorInvariance {
                generator: *g,
                reading,
                pass: false,
                lambda: None,
                mu: Vec::new(),
                residual: Some(match e {
                    InvarianceError::NoDecomposition(r) => r,
                    InvarianceError::Empty => "empty operator list".into(),
                }),
            },
        })
        .collect()
}

/// Conditional invariance of a row's operator list under each of its
/// generators, in both readings, plus sign-flip mutations of `L`, `Q`, `P`.
pub fn case_invariance(case: u8, branch: Branch) -> Result<CaseInvariance, SurveyError> {
    case_invariance_bound(case, branch, &BTreeMap::new())
}

/// [`case_invariance`] with parameter values substituted first.
pub fn case_invariance_bound(
    case: u8,
    branch: Branch,
    bindings: &BTreeMap<String, RatFunc>,
) -> Result<CaseInvariance, SurveyError> {
    let ops = invariant_operator(case, branch)?
        .iter()
        .map(|o| o.bind(bindings))
        .collect::<Result<Vec<_>, _>>()?;
    let rep = build_variable_mass(case, branch)?.bind(bindings)?;
    let mut generators = invariance_of(&rep, &ops, Reading::Modulo);
    generators.extend(invariance_of(&rep, &ops, Reading::Simultaneous));
    let base = unknowns(case, branch)?;
    let mut mutations = Vec::new();
    for slot in [UnknownSlot::L, UnknownSlot::Q, UnknownSlot::P] {
        let mutated = build_variable_mass_with(case, branch, &base.mutated(slot))?.bind(bindings)?;
        let broken = invariance_of(&mutated, &ops, Reading::Modulo)
            .into_iter()
            .zip(&generators)
            .filter(|(m, orig)| !m.pass && (orig.pass || m.residual != orig.residual))
            .map(|(m, _)| m.generator)
            .collect();
        mutations.push(MutationControl { slot, broken });
    }
    let dilatation_weight = generators
        .iter()
        .find(|g| g.reading == Reading::Modulo && matches!(g.generator, Gen::X0 | Gen::D))
        .and_then(|g| g.lambda.as_ref())
        .filter(|l| crate::expr::ex(l).as_constant().is_some())
        .cloned();
    Ok(CaseInvariance {
        case,
        branch,
        operators: ops.iter().map(|o| o.to_string()).collect(),
        generators,
        mutations,
        dilatation_weight,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct PotentialSurvey {
    pub rows: Vec<crate::potentials::RowReport>,
    pub fixed_mass: Vec<crate::potentials::FixedMassReport>,
    pub quintic: Option<crate::potentials::QuinticReport>,
}

impl PotentialSurvey {
    pub fn checks(&self) -> Vec<Check> {
        let mut out = Vec::new();
        for r in &self.rows {
            let status = match r.status {
                RowStatus::Pass => Status::Pass,
                RowStatus::Fail => Status::Fail,
                RowStatus::DerivedCandidate => Status::DerivedCandidate,
            };
            let mut summary = format!("{} ({})", r.algebra, r.condition);
            if let Some(c) = &r.candidate {
                summary = format!(
                    "{summary}; {} = {}",
                    c.symbol.name(),
                    c.value.as_deref().unwrap_or("no invariant")
                );
            }
            if let Some(rep) = r.report.as_ref().filter(|rep| !rep.pass()) {
                let bad: Vec<String> = rep.checks.iter().filter(|c| !c.pass).map(|c| c.generator.to_string()).collect();
                summary = format!("{summary}; failing generators {}", bad.join(", "));
            }
            out.push(Check::new(format!("potentials/row-{}", r.id), status, summary));
        }
        for f in &self.fixed_mass {
            out.push(Check::new(
                format!("potentials/fixed-mass/{}", if f.m0_zero { "m0=0" } else { "m0!=0" }),
                Status::from_bool(f.pass()),
                format!(
                    "{} on {}; X-1 invariant: {}; large-time limits agree: {}",
                    f.report.form, f.report.algebra, f.time_translation.pass, f.limit_agrees
                ),
            ));
        }
        if let Some(q) = &self.quintic {
            out.push(Check::new(
                "potentials/quintic",
                Status::from_bool(q.pass()),
                format!("real field, prefactor exponent {}", q.prefactor_exponent),
            ));
        }
        out
    }
}

/// Rows of the cases in `only`. With `only` empty: every row, the
/// fixed-mass potential for `m0 = 0` and `m0 != 0`, and the real quintic equation.
pub fn potential_survey(only: &[u8]) -> Result<PotentialSurvey, SurveyError> {
    let rows = table_rows()
        .iter()
        .filter(|r| only.is_empty() || only.contains(&r.case))
        .map(verify_row)
        .collect::<Result<Vec<_>, _>>()?;
    if !only.is_empty() {
        return Ok(PotentialSurvey { rows, fixed_mass: Vec::new(), quintic: None });
    }
    let x = RatFunc::param("x");
    let y = RatFunc::param("y");
    let fixed_mass = vec![
        verify_fixed_mass_potential(&x, &y, &RatFunc::zero())?,
        verify_fixed_mass_potential(&x, &y, &RatFunc::param("m0"))?,
    ];
    Ok(PotentialSurvey { rows, fixed_mass, quintic: Some(quintic_equation_check(&y)?) })
}

/// Names of parameters a case's generators depend on.
pub fn case_parameters(rep: &Representation) -> BTreeMap<String, String> {
    rep.params.iter().map(|(k, v)| (k.clone(), v.to_string())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conformal_roots_form_b2() {
        let s = root_survey((Gen::X0, Gen::N)).unwrap();
        assert!(s.pass(), "{s:?}");
        let d = root_survey((Gen::D, Gen::N)).unwrap();
        assert!(d.pass(), "{d:?}");
    }

    #[test]
    fn case_three_half_is_invariant_with_mutations_detected() {
        let c = case_invariance(3, Branch::Half).unwrap();
        assert!(c.pass(Reading::Modulo));
        assert!(c.dilatation_weight.is_some());
        assert!(c.mutations_detected() >= 3, "{:?}", c.mutations);
    }
}
