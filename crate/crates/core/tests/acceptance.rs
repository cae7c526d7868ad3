//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

use std::collections::{BTreeMap, BTreeSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use condsym::catalog::{build_fixed_mass, Branch};
use condsym::expr::{ex, RatFunc, Rational};
use condsym::invariance::Reading;
use condsym::liealg::{derive_structure_table, Gen};
use condsym::numerics::checks::{
    bridge_suite, covariance_suite, NumericConfig, LINEAR_TOLERANCE, MIN_ORDER, SEMILINEAR_TOLERANCE,
};
use condsym::numerics::{unitary_mass, FlowKind};
use condsym::potentials::{RowForm, RowStatus};
use condsym::survey::{algebra_survey, case_invariance, potential_survey, root_survey, Status};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

/// Generator index: `X_n` carries `n`, `Y_m` carries `m`, `M0` carries 0.
fn sch_index(g: Gen) -> Rational {
    let q = |n: i64, d: i64| Rational::new(n.into(), d.into());
    match g {
        Gen::Xm1 => q(-1, 1),
        Gen::X0 | Gen::M0 => q(0, 1),
        Gen::X1 => q(1, 1),
        Gen::Ym => q(-1, 2),
        Gen::Yp => q(1, 2),
        other => panic!("{other} is not in sch1"),
    }
}

fn x_gen(n: &Rational) -> Option<Gen> {
    [Gen::Xm1, Gen::X0, Gen::X1].into_iter().find(|g| &sch_index(*g) == n)
}

fn y_gen(m: &Rational) -> Option<Gen> {
    [Gen::Ym, Gen::Yp].into_iter().find(|g| &sch_index(*g) == m)
}

/// `[X_n, X_m] = (n - m) X_{n+m}`, `[X_n, Y_m] = (n/2 - m) Y_{n+m}`,
/// `[Y_m, Y_m'] = (m - m') M0`, `M0` central.
fn sch_bracket(a: Gen, b: Gen) -> BTreeMap<Gen, Rational> {
    let is_x = |g: Gen| matches!(g, Gen::Xm1 | Gen::X0 | Gen::X1);
    let is_y = |g: Gen| matches!(g, Gen::Ym | Gen::Yp);
    let (n, m) = (sch_index(a), sch_index(b));
    let half = Rational::new(1.into(), 2.into());
    let mut out = BTreeMap::new();
    let mut put = |g: Option<Gen>, c: Rational| {
        if let Some(g) = g {
            if c != Rational::from_integer(0.into()) {
                out.insert(g, c);
            }
        }
    };
    if is_x(a) && is_x(b) {
        put(x_gen(&(&n + &m)), &n - &m);
    } else if is_x(a) && is_y(b) {
        put(y_gen(&(&n + &m)), &n * &half - &m);
    } else if is_y(a) && is_x(b) {
        put(y_gen(&(&n + &m)), -(&m * &half - &n));
    } else if is_y(a) && is_y(b) {
        put(Some(Gen::M0), &n - &m);
    }
    out
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let rep = build_fixed_mass(&RatFunc::param("x"), &RatFunc::param("M"));
    let table = derive_structure_table(&rep).map_err(|e| e.to_string())?;
    let survey = algebra_survey().map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    ensure(rep.generators.len() == 6, format!("{} generators", rep.generators.len()))?;
    ensure(table.is_antisymmetric(), "table not antisymmetric")?;
    ensure(table.jacobi_violations().is_empty(), format!("Jacobi violations {:?}", table.jacobi_violations()))?;
    ensure(survey.base_pass(), "survey reports a failure")?;
    let names = rep.names();
    let mut entries = 0;
    for &a in &names {
        for &b in &names {
            let got: BTreeMap<Gen, Rational> = table
                .get(a, b)
                .ok_or(format!("missing [{a}, {b}]"))?
                .iter()
                .filter(|(_, c)| !c.is_zero())
                .map(|(g, c)| (*g, c.as_constant().expect("numeric structure constant")))
                .collect();
            ensure(got == sch_bracket(a, b), format!("[{a}, {b}] = {got:?}, expected {:?}", sch_bracket(a, b)))?;
            entries += 1;
        }
    }
    ensure(elapsed < Duration::from_secs(5), format!("took {elapsed:?}"))?;
    Ok(format!("6 generators, {entries} brackets match the closed form, Jacobi exact, {elapsed:.2?}"))
}

fn criterion_2() -> Outcome {
    let survey = algebra_survey().map_err(|e| e.to_string())?;
    let mut names = Vec::new();
    for c in survey.closures.iter().filter(|c| c.name.starts_with("coupling/")) {
        ensure(c.pass, format!("{}: {}", c.name, c.failures.join("; ")))?;
        names.push(format!("{} ({} generators)", c.name, c.generators.len()));
    }
    ensure(names.len() == 2, "expected m0 = 0 and m0 != 0")?;
    Ok(format!("brackets kept for {}", names.join(", ")))
}

fn criterion_3() -> Outcome {
    let survey = algebra_survey().map_err(|e| e.to_string())?;
    ensure(survey.operator_identity.len() == 2, "expected two representations")?;
    for (name, ok) in &survey.operator_identity {
        ensure(*ok, format!("identity fails for {name}"))?;
    }
    Ok("2 M0 X-1 - Y-1/2^2 = 2 M Dt - Dr^2 in the plain and coupling representations".into())
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut passed = 0;
    for case in 1..=8u8 {
        for branch in Branch::BOTH {
            let inv = case_invariance(case, branch).map_err(|e| e.to_string())?;
            let bad: Vec<String> = inv
                .generators
                .iter()
                .filter(|g| g.reading == Reading::Modulo && !g.pass)
                .map(|g| g.generator.to_string())
                .collect();
            let detected = inv.mutations_detected();
            if inv.pass(Reading::Modulo) && detected >= 3 {
                passed += 1;
            } else {
                failures.push(format!("case {case} {branch}: failing [{}], {detected} mutations detected", bad.join(" ")));
            }
        }
    }
    let elapsed = start.elapsed();
    if elapsed >= Duration::from_secs(120) {
        failures.push(format!("sweep took {elapsed:?}"));
    }
    if failures.is_empty() {
        Ok(format!("16 case/branch pairs invariant with >= 3 mutations detected, {elapsed:.2?}"))
    } else {
        Err(format!("{passed}/16 pairs pass; {}", failures.join("; ")))
    }
}

fn weight(s: &(String, String)) -> (Rational, Rational) {
    let q = |t: &str| ex(t).as_constant().and_then(|c| c.as_constant()).expect("rational weight");
    (q(&s.0), q(&s.1))
}

fn criterion_5() -> Outcome {
    let mut notes = Vec::new();
    for cartan in [(Gen::X0, Gen::N), (Gen::D, Gen::N)] {
        let survey = root_survey(cartan).map_err(|e| e.to_string())?;
        ensure(survey.pass(), format!("{cartan:?}: survey reports a failure"))?;
        let zero = Rational::from_integer(0.into());
        let roots: BTreeSet<(Rational, Rational)> =
            survey.weights.iter().map(|w| weight(&w.weight)).filter(|w| *w != (zero.clone(), zero.clone())).collect();
        ensure(roots.len() == 8, format!("{} distinct nonzero weights", roots.len()))?;
        let neg = |a: &(Rational, Rational)| (-a.0.clone(), -a.1.clone());
        let add = |a: &(Rational, Rational), b: &(Rational, Rational)| (&a.0 + &b.0, &a.1 + &b.1);
        ensure(roots.iter().all(|a| roots.contains(&neg(a))), "not closed under negation")?;
        // In B2 exactly 12 unordered pairs of roots sum to a root, and some
        // root string has length three.
        let list: Vec<_> = roots.iter().collect();
        let mut pairs = 0;
        let mut long_string = false;
        for i in 0..list.len() {
            for j in i + 1..list.len() {
                let s = add(list[i], list[j]);
                if roots.contains(&s) {
                    pairs += 1;
                    long_string |= roots.contains(&add(&s, list[j])) || roots.contains(&add(&s, list[i]));
                }
            }
        }
        ensure(pairs == 12, format!("{pairs} root pairs sum to a root"))?;
        ensure(long_string, "no root string of length three")?;
        notes.push(format!("({}, {})", cartan.0, cartan.1));
    }
    Ok(format!("8 roots of type B2 for Cartan pairs {}", notes.join(" and ")))
}

fn criterion_6() -> Outcome {
    let survey = potential_survey(&[]).map_err(|e| e.to_string())?;
    let (mut given, mut derived) = (Vec::new(), Vec::new());
    let rows = condsym::potentials::table_rows();
    for r in &survey.rows {
        let row = rows.iter().find(|t| t.id == r.id).expect("row");
        match &row.form {
            RowForm::Given(_) => {
                ensure(r.status == RowStatus::Pass, format!("row {} is {:?}", r.id, r.status))?;
                let report = r.report.as_ref().ok_or(format!("row {} has no report", r.id))?;
                for c in &report.checks {
                    ensure(c.pass && c.residual.is_empty(), format!("row {} {}: residual buckets", r.id, c.generator))?;
                }
                given.push(r.id.clone());
            }
            RowForm::Undefined(_) => {
                ensure(
                    r.status == RowStatus::DerivedCandidate && r.candidate.is_some(),
                    format!("row {} is {:?}", r.id, r.status),
                )?;
                derived.push(r.id.clone());
            }
        }
    }
    let cases: BTreeSet<u8> = survey.rows.iter().filter(|r| given.contains(&r.id)).map(|r| r.case).collect();
    ensure(cases == BTreeSet::from([2, 4, 5, 7, 8]), format!("verified cases {cases:?}"))?;
    Ok(format!("rows {} verified; rows {} derived-candidate", given.join(", "), derived.join(", ")))
}

fn criterion_7() -> Outcome {
    let survey = potential_survey(&[]).map_err(|e| e.to_string())?;
    ensure(survey.fixed_mass.len() == 2, "expected m0 = 0 and m0 != 0")?;
    for f in &survey.fixed_mass {
        ensure(f.report.pass(), format!("{}: not invariant under {}", f.m0, f.report.algebra))?;
        ensure(f.time_translation.pass == f.m0_zero, format!("{}: X-1 invariance {}", f.m0, f.time_translation.pass))?;
        ensure(f.limit_agrees, format!("{}: large-time limit differs", f.m0))?;
        let expected = if f.m0_zero { 6 } else { 5 };
        ensure(f.report.checks.len() == expected, format!("{}: {} generators", f.m0, f.report.checks.len()))?;
    }
    Ok("sch1-invariant for m0 = 0, age1-invariant with X-1 broken for m0 != 0, equal large-time limits".into())
}

fn criterion_8() -> Outcome {
    let survey = potential_survey(&[]).map_err(|e| e.to_string())?;
    let q = survey.quintic.ok_or("no quintic report")?;
    ensure(q.prefactor_exponent == "5", format!("prefactor exponent {}", q.prefactor_exponent))?;
    for c in &q.cases {
        ensure(c.samples.len() == 2 && c.samples[0].form != c.samples[1].form, "two distinct samples")?;
        ensure(c.pass(), format!("case {} fails", c.case))?;
    }
    let gens: Vec<String> = q.cases[0].generic.generators().iter().map(|g| g.to_string()).collect();
    Ok(format!("psi^5 fbar(g psi^(4y)) invariant under {} for both samples", gens.join(", ")))
}

fn criterion_9() -> Outcome {
    let start = Instant::now();
    let suite = covariance_suite(&NumericConfig::default(), unitary_mass(1.0)).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    ensure(suite.config.n == 256, "grid size")?;
    for r in &suite.linear {
        ensure(r.residual < LINEAR_TOLERANCE, format!("linear {}: {:.2e}", r.flow, r.residual))?;
    }
    let flows: BTreeSet<&str> = suite.linear.iter().map(|r| r.flow.as_str()).collect();
    for k in [FlowKind::TimeTranslation, FlowKind::SpaceTranslation, FlowKind::Boost, FlowKind::Dilatation] {
        ensure(flows.contains(k.name()), format!("no linear {} check", k.name()))?;
    }
    let boost = suite.quintic.iter().find(|s| s.flow == FlowKind::Boost.name()).ok_or("no quintic boost")?;
    for s in &suite.quintic {
        ensure(
            s.finest() < SEMILINEAR_TOLERANCE && s.min_order() >= MIN_ORDER,
            format!("quintic {}: {:.2e}, order {:.2}", s.flow, s.finest(), s.min_order()),
        )?;
    }
    let control = &suite.cubic_special;
    ensure(
        control.finest() > 1e-3 && control.orders.iter().all(|o| *o < 0.5),
        format!("cubic control {:?}", control.residuals),
    )?;
    ensure(suite.checks().iter().all(|c| c.status == Status::Pass), "suite reports a failure")?;
    ensure(elapsed < Duration::from_secs(300), format!("took {elapsed:?}"))?;
    let worst = suite.linear.iter().map(|r| r.residual).fold(0.0, f64::max);
    Ok(format!(
        "linear <= {worst:.1e}; quintic boost {:.1e} at order {:.2}; cubic special stalls at {:.1e}; {elapsed:.1?}",
        boost.finest(),
        boost.min_order(),
        control.finest()
    ))
}

fn criterion_10() -> Outcome {
    let suite = bridge_suite(1.0, 1.0);
    let lines: Vec<String> =
        suite.levels.iter().map(|l| format!("h={:.3}: {:.2e}/{:.2e}", l.h, l.defect, l.predicted)).collect();
    ensure(suite.tracks_rate(), format!("defect does not follow the aliasing rate: {}", lines.join(", ")))?;
    let last = suite.levels.last().expect("levels");
    Ok(format!("defect follows the aliasing rate down to {:.1e} at h = {:.3}", last.defect, last.h))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("algebra closure", criterion_1),
        ("commutators kept by the coupling representation", criterion_2),
        ("free operator identity", criterion_3),
        ("conditional invariance of every catalog row", criterion_4),
        ("root diagram", criterion_5),
        ("potential table", criterion_6),
        ("fixed-mass potential", criterion_7),
        ("quintic equation", criterion_8),
        ("numeric covariance", criterion_9),
        ("Fourier bridge", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        match outcome {
            Ok(detail) => println!("PASS criterion {} ({name}): {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {} ({name}): {detail}", i + 1);
            }
        }
    }
    println!("{} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
