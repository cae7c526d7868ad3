//! Constructors for the concrete generator representations and their
//! invariant operators.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::expr::{ex, Expr, RatFunc, Var};
use crate::invariance::DiffOperator;
use crate::liealg::{bracket, derive_structure_table, AlgebraLabel, Gen, Representation, StructureTable, Variant, VectorField};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CatalogError {
    #[error("unknown case `{0}`; valid cases are 1-8, fixed-sch, fixed-sch-g, fixed-age-g")]
    UnknownCase(String),
}

/// A row of the classification table or one of the fixed-mass representations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum CaseId {
    Row(u8),
    /// Free Schrödinger generators with fixed mass.
    FixedSch,
    /// Fixed mass with a dimensionful coupling, `m0 = 0`.
    FixedSchG,
    /// Fixed mass with a dimensionful coupling, `m0 != 0`.
    FixedAgeG,
}

impl CaseId {
    pub const ROWS: [CaseId; 8] = [
        CaseId::Row(1),
        CaseId::Row(2),
        CaseId::Row(3),
        CaseId::Row(4),
        CaseId::Row(5),
        CaseId::Row(6),
        CaseId::Row(7),
        CaseId::Row(8),
    ];

    pub fn all() -> Vec<CaseId> {
        let mut v = CaseId::ROWS.to_vec();
        v.extend([CaseId::FixedSch, CaseId::FixedSchG, CaseId::FixedAgeG]);
        v
    }

    pub fn row(self) -> Option<u8> {
        match self {
            CaseId::Row(n) => Some(n),
            _ => None,
        }
    }
}

impl fmt::Display for CaseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CaseId::Row(n) => write!(f, "{n}"),
            CaseId::FixedSch => f.write_str("fixed-sch"),
            CaseId::FixedSchG => f.write_str("fixed-sch-g"),
            CaseId::FixedAgeG => f.write_str("fixed-age-g"),
        }
    }
}

impl FromStr for CaseId {
    type Err = CatalogError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "fixed-sch" => Ok(CaseId::FixedSch),
            "fixed-sch-g" => Ok(CaseId::FixedSchG),
            "fixed-age-g" => Ok(CaseId::FixedAgeG),
            other => match other.parse::<u8>() {
                Ok(n) if (1..=8).contains(&n) => Ok(CaseId::Row(n)),
                _ => Err(CatalogError::UnknownCase(s.to_string())),
            },
        }
    }
}

/// Which scaling-dimension branch of a row is meant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Branch {
    /// `x = 1/2`, substituted into the generators.
    Half,
    /// Symbolic `x`, understood as `x != 1/2`.
    Generic,
}

impl Branch {
    pub const BOTH: [Branch; 2] = [Branch::Half, Branch::Generic];

    pub fn x(self) -> RatFunc {
        match self {
            Branch::Half => RatFunc::ratio(1, 2),
            Branch::Generic => RatFunc::param("x"),
        }
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Branch::Half => "x=1/2",
            Branch::Generic => "x!=1/2",
        })
    }
}

/// The coupling-dependent coefficient functions of the variable-mass generators:
/// `M0 = -Dz - L Dg`, `Y1/2 = ... - Q Dg`, `X1 = ... - P Dg`, `N = ... - K Dg`,
/// `V+ = ... - F Dg`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Unknowns {
    pub l: Expr,
    pub q: Expr,
    pub p: Expr,
    pub k: Expr,
    pub f: Expr,
}

/// One of the coupling functions, for mutation controls.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum UnknownSlot {
    L,
    Q,
    P,
}

impl Unknowns {
    /// Flips the sign of one function; a vanishing function is replaced by a
    /// nonzero term of the same scaling form instead.
    pub fn mutated(&self, slot: UnknownSlot) -> Unknowns {
        let mut u = self.clone();
        let (target, fallback) = match slot {
            UnknownSlot::L => (&mut u.l, ex("g/zeta")),
            UnknownSlot::Q => (&mut u.q, ex("r*g/zeta")),
            UnknownSlot::P => (&mut u.p, ex("t*g")),
        };
        *target = if target.is_zero() { fallback } else { target.neg() };
        u
    }
}

/// Algebra label, representation family and coefficient functions of a table row.
pub fn unknowns(case: u8, branch: Branch) -> Result<Unknowns, CatalogError> {
    let u = |l: &str, q: &str, p: &str, k: &str, f: &str| Unknowns { l: ex(l), q: ex(q), p: ex(p), k: ex(k), f: ex(f) };
    Ok(match case {
        1 | 2 => u("0", "0", "p01*t*g", "k0*g", "0"),
        3 | 4 => u("-2*y*g/zeta", "-2*y*g*r/zeta", "-y*g*r^2/zeta", "k0*g", "0"),
        5 | 6 => u("s*g/zeta", "s*r*g/zeta", "s*r^2*g/(2*zeta)", "k0p*g", "2*s*r*g"),
        7 | 8 => match branch {
            Branch::Half => u("0", "0", "0", "k0*g", "0"),
            Branch::Generic => u("0", "0", "2*y*t*g", "k0*g", "0"),
        },
        _ => return Err(CatalogError::UnknownCase(case.to_string())),
    })
}

pub fn case_label(case: u8) -> Result<AlgebraLabel, CatalogError> {
    Ok(match case {
        1 | 3 => AlgebraLabel::Age,
        2 | 4 => AlgebraLabel::AgeTilde,
        5 => AlgebraLabel::Alt,
        6 => AlgebraLabel::AltTilde,
        7 => AlgebraLabel::Sch,
        8 => AlgebraLabel::SchTilde,
        _ => return Err(CatalogError::UnknownCase(case.to_string())),
    })
}

pub fn case_variant(case: u8) -> Result<Variant, CatalogError> {
    Ok(match case {
        1 | 2 => Variant::Nmg,
        3 | 4 => Variant::Mmg,
        5 | 6 => Variant::Alt,
        7 | 8 => Variant::Sch,
        _ => return Err(CatalogError::UnknownCase(case.to_string())),
    })
}

/// Even rows contain `N`.
pub fn is_parabolic(case: u8) -> bool {
    case.is_multiple_of(2)
}

fn field(parts: &[(Var, &str)], scalar: &str) -> VectorField {
    VectorField::from_parts(&parts.iter().map(|(v, s)| (*v, ex(s))).collect::<Vec<_>>(), ex(scalar))
}

fn with_x(f: VectorField, x: &RatFunc) -> VectorField {
    let mut b = BTreeMap::new();
    b.insert("x".to_string(), x.clone());
    f.substitute_params(&b).expect("x substitution")
}

fn with_mass(f: VectorField, mass: &RatFunc) -> VectorField {
    let mut b = BTreeMap::new();
    b.insert("M".to_string(), mass.clone());
    f.substitute_params(&b).expect("mass substitution")
}

/// `X_{-1} = -Dt`.
pub fn time_translation() -> VectorField {
    field(&[(Var::T, "-1")], "0")
}

/// The six fixed-mass Schrödinger generators in `t, r` with scaling dimension
/// `x` and mass `M`.
pub fn build_fixed_mass(x: &RatFunc, mass: &RatFunc) -> Representation {
    let gens = vec![
        (Gen::Xm1, time_translation()),
        (Gen::X0, field(&[(Var::T, "-t"), (Var::R, "-r/2")], "-x/2")),
        (Gen::X1, field(&[(Var::T, "-t^2"), (Var::R, "-t*r")], "-M*r^2/2 - x*t")),
        (Gen::Ym, field(&[(Var::R, "-1")], "0")),
        (Gen::Yp, field(&[(Var::R, "-t")], "-M*r")),
        (Gen::M0, field(&[], "-M")),
    ];
    let gens = gens.into_iter().map(|(g, f)| (g, with_mass(with_x(f, x), mass))).collect();
    let mut rep = Representation::new(AlgebraLabel::Sch, Variant::FixedMass, gens);
    rep.params.insert("x".into(), x.clone());
    rep.params.insert("M".into(), mass.clone());
    rep
}

/// How the exponent written `yh` in the generalized special transformation
/// relates to the coupling dimension `y`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum YHat {
    /// `yh` is an independent parameter.
    Distinct,
    /// `yh` is replaced by `y`.
    SameAsY,
}

/// Fixed-mass generators with a dimensionful coupling `g` of dimension `y`.
///
/// `X0` gains `-y g Dg`; `X1` gains `-2 y t g Dg` and, for `m0 != 0`,
/// `-m0 g^(1+1/yh) Dg`. For `m0 = 0` the result carries all six `sch1`
/// generators; otherwise the five `age1` generators.
pub fn build_fixed_mass_with_coupling(x: &RatFunc, y: &RatFunc, m0: &RatFunc, yhat: YHat) -> Representation {
    let base = build_fixed_mass(x, &RatFunc::param("M"));
    let yh = match yhat {
        YHat::Distinct => Expr::param("yh"),
        YHat::SameAsY => Expr::constant(y.clone()),
    };
    let y_e = Expr::constant(y.clone());
    let m0_e = Expr::constant(m0.clone());
    let extra_x0 = y_e.mul(&Expr::g()).neg();
    let mut extra_x1 = y_e.mul(&ex("2*t*g")).neg();
    if !m0.is_zero() {
        let e = RatFunc::one().add(&yh.as_constant().expect("scalar").recip().expect("nonzero exponent"));
        extra_x1 = extra_x1.sub(&m0_e.mul(&Expr::var_pow(Var::G, e)));
    }
    let mut gens = Vec::new();
    for (g, mut f) in base.generators {
        match g {
            Gen::X0 => f.coeffs[3] = f.coeffs[3].add(&extra_x0),
            Gen::X1 => f.coeffs[3] = f.coeffs[3].add(&extra_x1),
            _ => {}
        }
        gens.push((g, f));
    }
    let mut rep = if m0.is_zero() {
        Representation::new(AlgebraLabel::Sch, Variant::FixedMass, gens)
    } else {
        Representation::new(AlgebraLabel::Age, Variant::FixedMass, gens).without(Gen::Xm1, AlgebraLabel::Age)
    };
    rep.params.insert("x".into(), x.clone());
    rep.params.insert("y".into(), y.clone());
    rep.params.insert("m0".into(), m0.clone());
    rep
}

/// Variable-mass generators with explicitly supplied coupling functions.
pub fn build_variable_mass_with(case: u8, branch: Branch, u: &Unknowns) -> Result<Representation, CatalogError> {
    let label = case_label(case)?;
    let variant = case_variant(case)?;
    let all: Vec<(Gen, VectorField)> = vec![
        (Gen::Xm1, time_translation()),
        (Gen::X0, field(&[(Var::T, "-t"), (Var::R, "-r/2"), (Var::G, "-y*g")], "-x/2")),
        (Gen::D, field(&[(Var::T, "-t"), (Var::R, "-r"), (Var::Zeta, "-zeta"), (Var::G, "-s*g")], "-x")),
        (Gen::X1, VectorField::from_parts(
            &[(Var::T, ex("-t^2")), (Var::R, ex("-t*r")), (Var::Zeta, ex("-r^2/2")), (Var::G, u.p.neg())],
            ex("-x*t"),
        )),
        (Gen::Ym, field(&[(Var::R, "-1")], "0")),
        (Gen::Yp, VectorField::from_parts(&[(Var::R, ex("-t")), (Var::Zeta, ex("-r")), (Var::G, u.q.neg())], Expr::zero())),
        (Gen::M0, VectorField::from_parts(&[(Var::Zeta, ex("-1")), (Var::G, u.l.neg())], Expr::zero())),
        (Gen::N, VectorField::from_parts(&[(Var::T, ex("-t")), (Var::Zeta, ex("zeta")), (Var::G, u.k.neg())], Expr::zero())),
        (Gen::Vp, VectorField::from_parts(
            &[
                (Var::T, ex("-2*t*r")),
                (Var::Zeta, ex("-2*zeta*r")),
                (Var::R, ex("-(r^2 + 2*zeta*t)")),
                (Var::G, u.f.neg()),
            ],
            ex("-2*x*r"),
        )),
    ];
    let x = branch.x();
    let gens = label
        .generators()
        .into_iter()
        .map(|g| {
            let f = all.iter().find(|(n, _)| *n == g).map(|(_, f)| f.clone()).expect("generator defined");
            (g, with_x(f, &x))
        })
        .collect();
    let mut rep = Representation::new(label, variant, gens);
    rep.params.insert("x".into(), x);
    Ok(rep)
}

/// Variable-mass generators for a table row with the row's coupling functions.
pub fn build_variable_mass(case: u8, branch: Branch) -> Result<Representation, CatalogError> {
    build_variable_mass_with(case, branch, &unknowns(case, branch)?)
}

/// `2 Dz Dt - Dr^2`.
pub fn s_hat() -> DiffOperator {
    DiffOperator::partials(&[Var::Zeta, Var::T])
        .scale(&RatFunc::int(2))
        .sub(&DiffOperator::partial(Var::R, 2))
}

/// `2 M Dt - Dr^2`.
pub fn fixed_mass_operator(mass: &RatFunc) -> DiffOperator {
    DiffOperator::partial(Var::T, 1)
        .scale(&mass.scale(&crate::expr::rat(2, 1)))
        .sub(&DiffOperator::partial(Var::R, 2))
}

/// The operator list of a row and branch; later entries are auxiliary conditions.
pub fn invariant_operator(case: u8, branch: Branch) -> Result<Vec<DiffOperator>, CatalogError> {
    let dr2 = DiffOperator::partial(Var::R, 2);
    let dgdt = DiffOperator::partials(&[Var::G, Var::T]);
    Ok(match (case, branch) {
        (1 | 2, Branch::Half) => vec![s_hat()],
        (1 | 2, Branch::Generic) => vec![s_hat(), dr2],
        (3 | 4, Branch::Half) => vec![s_hat().sub(&dgdt.times(&ex("4*y*g/zeta")))],
        (3 | 4, Branch::Generic) => vec![s_hat()],
        (5 | 6, Branch::Half) => vec![s_hat().add(&dgdt.times(&ex("2*s*g/zeta")))],
        (5 | 6, Branch::Generic) => vec![DiffOperator::partials(&[Var::Zeta, Var::T])],
        (7 | 8, Branch::Half) => vec![s_hat(), dr2],
        (7 | 8, Branch::Generic) => vec![dr2, s_hat()],
        _ => return Err(CatalogError::UnknownCase(case.to_string())),
    })
}

/// Conformal generators in `t, r, zeta` (no coupling).
///
/// `V-` and `W` do not come with explicit formulas; they are obtained here as
/// `V- = [V+, X-1] / 2` and `W = -[V-, V+] / 2`.
pub fn build_conformal(x: &RatFunc) -> Representation {
    let mut gens: Vec<(Gen, VectorField)> = vec![
        (Gen::Xm1, time_translation()),
        (Gen::X0, field(&[(Var::T, "-t"), (Var::R, "-r/2")], "-x/2")),
        (Gen::X1, field(&[(Var::T, "-t^2"), (Var::R, "-t*r"), (Var::Zeta, "-r^2/2")], "-x*t")),
        (Gen::Ym, field(&[(Var::R, "-1")], "0")),
        (Gen::Yp, field(&[(Var::R, "-t"), (Var::Zeta, "-r")], "0")),
        (Gen::M0, field(&[(Var::Zeta, "-1")], "0")),
        (Gen::N, field(&[(Var::T, "-t"), (Var::Zeta, "zeta")], "0")),
        (Gen::Vp, field(&[(Var::T, "-2*t*r"), (Var::Zeta, "-2*zeta*r"), (Var::R, "-(r^2 + 2*zeta*t)")], "-2*x*r")),
    ];
    let vp = gens[7].1.clone();
    let vm = bracket(&vp, &gens[0].1).scale(&RatFunc::ratio(1, 2));
    let w = bracket(&vm, &vp).scale(&RatFunc::ratio(-1, 2));
    gens.push((Gen::Vm, vm));
    gens.push((Gen::W, w));
    let gens = gens.into_iter().map(|(g, f)| (g, with_x(f, x))).collect();
    let mut rep = Representation::new(AlgebraLabel::Conf3, Variant::Conformal, gens);
    rep.params.insert("x".into(), x.clone());
    rep
}

/// Generators whose formulas are derived rather than given.
pub fn is_derived_generator(g: Gen) -> bool {
    matches!(g, Gen::Vm | Gen::W)
}

/// `D = 2 X0 - N` in a representation containing both.
pub fn dilatation_from_cartan(rep: &Representation) -> Option<VectorField> {
    Some(rep.get(Gen::X0)?.scale(&RatFunc::int(2)).sub(rep.get(Gen::N)?))
}

/// The bracket relations an algebra is expected to satisfy, read off the
/// coupling-free conformal generators (with `D = 2 X0 - N` adjoined).
pub fn reference_table(label: AlgebraLabel) -> StructureTable {
    let mut conf = build_conformal(&RatFunc::param("x"));
    let d = dilatation_from_cartan(&conf).expect("X0 and N present");
    conf.generators.push((Gen::D, d));
    let sub = conf.restrict(&label.generators(), label);
    derive_structure_table(&sub).expect("reference algebras close")
}

/// Any catalog representation by id; rows use the given branch.
pub fn build_case(case: CaseId, branch: Branch) -> Result<Representation, CatalogError> {
    match case {
        CaseId::Row(n) => build_variable_mass(n, branch),
        CaseId::FixedSch => Ok(build_fixed_mass(&branch.x(), &RatFunc::param("M"))),
        CaseId::FixedSchG => Ok(build_fixed_mass_with_coupling(&branch.x(), &RatFunc::param("y"), &RatFunc::zero(), YHat::SameAsY)),
        CaseId::FixedAgeG => Ok(build_fixed_mass_with_coupling(
            &branch.x(),
            &RatFunc::param("y"),
            &RatFunc::param("m0"),
            YHat::Distinct,
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liealg::{check_structure, derive_structure_table};

    #[test]
    fn fixed_mass_boost() {
        let rep = build_fixed_mass(&RatFunc::ratio(1, 2), &RatFunc::param("M"));
        let yp = rep.get(Gen::Yp).unwrap();
        assert_eq!(yp.coeff(Var::R), &ex("-t"));
        assert_eq!(yp.scalar, ex("-M*r"));
    }

    #[test]
    fn zero_mass_is_degenerate_but_closed() {
        let rep = build_fixed_mass(&RatFunc::param("x"), &RatFunc::zero());
        assert!(rep.get(Gen::M0).unwrap().is_zero());
        let table = derive_structure_table(&rep).unwrap();
        assert!(check_structure(&rep, &table).pass());
    }

    #[test]
    fn coupling_reduces_at_zero_dimension() {
        let x = RatFunc::param("x");
        let a = build_fixed_mass_with_coupling(&x, &RatFunc::zero(), &RatFunc::zero(), YHat::Distinct);
        let b = build_fixed_mass(&x, &RatFunc::param("M"));
        assert_eq!(a.generators, b.generators);
    }

    #[test]
    fn case_three_mass_generator() {
        let rep = build_variable_mass(3, Branch::Generic).unwrap();
        let m0 = rep.get(Gen::M0).unwrap();
        assert_eq!(m0.coeff(Var::Zeta), &ex("-1"));
        assert_eq!(m0.coeff(Var::G), &ex("2*y*g/zeta"));
    }

    #[test]
    fn case_five_special_conformal() {
        let rep = build_variable_mass(5, Branch::Generic).unwrap();
        let vp = rep.get(Gen::Vp).unwrap();
        assert_eq!(vp.coeff(Var::T), &ex("-2*t*r"));
        assert_eq!(vp.coeff(Var::Zeta), &ex("-2*zeta*r"));
        assert_eq!(vp.coeff(Var::R), &ex("-r^2 - 2*zeta*t"));
        assert_eq!(vp.coeff(Var::G), &ex("-2*s*r*g"));
        assert_eq!(vp.scalar, ex("-2*x*r"));
    }

    #[test]
    fn case_one_without_coupling_terms() {
        let mut b = BTreeMap::new();
        b.insert("p01".to_string(), RatFunc::zero());
        b.insert("k0".to_string(), RatFunc::zero());
        let rep = build_variable_mass(1, Branch::Generic).unwrap().bind(&b).unwrap();
        assert!(rep.generators.iter().filter(|(g, _)| *g != Gen::X0).all(|(_, f)| f.coeff(Var::G).is_zero()));
    }

    #[test]
    fn parabolic_rows_add_n() {
        for case in [1u8, 3, 5, 7] {
            let odd = build_variable_mass(case, Branch::Generic).unwrap();
            let even = build_variable_mass(case + 1, Branch::Generic).unwrap();
            assert!(!odd.names().contains(&Gen::N));
            assert!(even.names().contains(&Gen::N));
            let stripped = even.without(Gen::N, odd.label);
            assert_eq!(stripped.generators, odd.generators);
        }
    }

    #[test]
    fn unknown_case_rejected() {
        assert!(build_variable_mass(9, Branch::Half).is_err());
        assert!("99".parse::<CaseId>().is_err());
        assert_eq!("fixed-age-g".parse::<CaseId>().unwrap(), CaseId::FixedAgeG);
    }

    #[test]
    fn operator_lists() {
        assert_eq!(invariant_operator(1, Branch::Half).unwrap(), vec![s_hat()]);
        assert_eq!(
            invariant_operator(5, Branch::Generic).unwrap(),
            vec![DiffOperator::partials(&[Var::Zeta, Var::T])]
        );
        let op3 = &invariant_operator(3, Branch::Half).unwrap()[0];
        assert_eq!(op3.get(&[1, 0, 0, 1]), ex("-4*y*g/zeta"));
    }

    #[test]
    fn reference_table_agrees_with_fixed_mass_brackets() {
        let fm = build_fixed_mass(&RatFunc::param("x"), &RatFunc::param("M"));
        let table = derive_structure_table(&fm).unwrap();
        assert_eq!(reference_table(AlgebraLabel::Sch), table);
        for label in [AlgebraLabel::Alt, AlgebraLabel::AltTilde, AlgebraLabel::AgeTilde, AlgebraLabel::Conf3] {
            let t = reference_table(label);
            assert!(t.is_antisymmetric());
            assert!(t.jacobi_violations().is_empty());
        }
    }

    #[test]
    fn derived_conformal_generators() {
        let rep = build_conformal(&RatFunc::param("x"));
        let vm = rep.get(Gen::Vm).unwrap();
        assert_eq!(vm.coeff(Var::T), &ex("-r"));
        assert_eq!(vm.coeff(Var::R), &ex("-zeta"));
        let w = rep.get(Gen::W).unwrap();
        assert_eq!(w.coeff(Var::Zeta), &ex("-zeta^2"));
        assert_eq!(w.coeff(Var::R), &ex("-zeta*r"));
        assert_eq!(w.coeff(Var::T), &ex("-r^2/2"));
        assert_eq!(w.scalar, ex("-x*zeta"));
    }
}
