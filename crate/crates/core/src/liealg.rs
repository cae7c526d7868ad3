//! First-order differential operators with a scalar part, their brackets,
//! structure tables and ad-weights.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::print::{factor, join_terms, scaled};
use crate::expr::{parse, Context, Expr, ExprError, Monomial, ParamKind, RatFunc, Var};
use crate::linsolve;

/// `sum_v coeffs[v] * d/dv + scalar` over the coordinates `t, r, zeta, g`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct VectorField {
    pub coeffs: [Expr; 4],
    pub scalar: Expr,
}

impl VectorField {
    pub fn zero() -> Self {
        VectorField::default()
    }

    pub fn scalar_only(s: Expr) -> Self {
        VectorField { coeffs: Default::default(), scalar: s }
    }

    /// Builds from `(variable, coefficient)` pairs and a scalar part.
    pub fn from_parts(parts: &[(Var, Expr)], scalar: Expr) -> Self {
        let mut f = VectorField::scalar_only(scalar);
        for (v, c) in parts {
            let k = v.coord_index().expect("vector fields act on coordinates only");
            f.coeffs[k] = f.coeffs[k].add(c);
        }
        f
    }

    pub fn coeff(&self, v: Var) -> &Expr {
        &self.coeffs[v.coord_index().expect("coordinate")]
    }

    pub fn is_zero(&self) -> bool {
        self.scalar.is_zero() && self.coeffs.iter().all(Expr::is_zero)
    }

    /// Action of the derivative part on a function.
    pub fn apply(&self, f: &Expr) -> Expr {
        let mut out = Expr::zero();
        for (k, v) in Var::COORDS.iter().enumerate() {
            if !self.coeffs[k].is_zero() {
                out = out.add(&self.coeffs[k].mul(&f.diff(*v)));
            }
        }
        out
    }

    pub fn add(&self, o: &VectorField) -> VectorField {
        VectorField {
            coeffs: std::array::from_fn(|k| self.coeffs[k].add(&o.coeffs[k])),
            scalar: self.scalar.add(&o.scalar),
        }
    }

    pub fn sub(&self, o: &VectorField) -> VectorField {
        self.add(&o.scale(&RatFunc::int(-1)))
    }

    pub fn scale(&self, c: &RatFunc) -> VectorField {
        VectorField {
            coeffs: std::array::from_fn(|k| self.coeffs[k].scale(c)),
            scalar: self.scalar.scale(c),
        }
    }

    /// Multiplies every part by a function.
    pub fn times(&self, f: &Expr) -> VectorField {
        VectorField {
            coeffs: std::array::from_fn(|k| self.coeffs[k].mul(f)),
            scalar: self.scalar.mul(f),
        }
    }

    pub fn lin_comb(terms: &[(RatFunc, &VectorField)]) -> VectorField {
        terms.iter().fold(VectorField::zero(), |acc, (c, f)| acc.add(&f.scale(c)))
    }

    pub fn map(&self, f: impl Fn(&Expr) -> Result<Expr, ExprError>) -> Result<VectorField, ExprError> {
        Ok(VectorField {
            coeffs: [f(&self.coeffs[0])?, f(&self.coeffs[1])?, f(&self.coeffs[2])?, f(&self.coeffs[3])?],
            scalar: f(&self.scalar)?,
        })
    }

    pub fn substitute_params(&self, b: &BTreeMap<String, RatFunc>) -> Result<VectorField, ExprError> {
        self.map(|e| e.substitute(&BTreeMap::new(), b))
    }

    /// Sparse coordinates `(component, monomial) -> coefficient`; component 4 is the scalar.
    pub fn flatten(&self) -> BTreeMap<(usize, Monomial), RatFunc> {
        let mut out = BTreeMap::new();
        for (k, e) in self.coeffs.iter().chain(std::iter::once(&self.scalar)).enumerate() {
            for (m, c) in e.terms() {
                out.insert((k, m.clone()), c.clone());
            }
        }
        out
    }

    /// Replaces the imaginary mass parameter `mass` by the derivative in `zeta`.
    ///
    /// The scalar part must be affine in `mass`; its linear coefficient becomes the
    /// `zeta` component.
    pub fn zeta_lift(&self, mass: &str) -> Result<VectorField, LieError> {
        let at = |v: RatFunc| {
            self.scalar
                .subs_param(mass, v)
                .map_err(|e| LieError::Lift(e.to_string()))
        };
        let s0 = at(RatFunc::zero())?;
        let s1 = at(RatFunc::one())?.sub(&s0);
        let s2 = at(RatFunc::int(2))?.sub(&s0);
        if !s2.equivalent(&s1.scale_int(2)) {
            return Err(LieError::Lift(format!("scalar part is not affine in {mass}")));
        }
        if self.coeffs.iter().any(|c| c.params().contains(mass)) {
            return Err(LieError::Lift(format!("derivative part depends on {mass}")));
        }
        let mut out = self.clone();
        out.scalar = s0;
        out.coeffs[2] = out.coeffs[2].add(&s1);
        Ok(out)
    }

    /// Serializes as `c_t*Dt + c_r*Dr + c_z*Dz + c_g*Dg + scalar`.
    pub fn to_text(&self) -> String {
        let mut parts = Vec::new();
        for (k, d) in ["Dt", "Dr", "Dz", "Dg"].iter().enumerate() {
            if !self.coeffs[k].is_zero() {
                parts.push(scaled(&self.coeffs[k].to_string(), d));
            }
        }
        if !self.scalar.is_zero() || parts.is_empty() {
            parts.push(factor(self.scalar.to_string()));
        }
        join_terms(parts)
    }

    /// Inverse of [`VectorField::to_text`].
    pub fn from_text(text: &str, ctx: &Context) -> Result<VectorField, LieError> {
        let mut c = ctx.clone();
        for d in DERIV_SYMBOLS {
            c.declare_param(d, ParamKind::Constant);
        }
        let e = parse(text, &c).map_err(|e| LieError::Text(e.to_string()))?;
        let zeros: BTreeMap<String, RatFunc> = DERIV_SYMBOLS.iter().map(|d| (d.to_string(), RatFunc::zero())).collect();
        let sub = |b: &BTreeMap<String, RatFunc>| {
            e.substitute(&BTreeMap::new(), b).map_err(|e| LieError::Text(e.to_string()))
        };
        let scalar = sub(&zeros)?;
        let mut f = VectorField::scalar_only(scalar.clone());
        for (k, d) in DERIV_SYMBOLS.iter().enumerate() {
            let mut b = zeros.clone();
            b.insert(d.to_string(), RatFunc::one());
            f.coeffs[k] = sub(&b)?.sub(&scalar);
            if DERIV_SYMBOLS.iter().any(|s| f.coeffs[k].params().contains(*s)) {
                return Err(LieError::Text("not first order in the derivative symbols".into()));
            }
        }
        Ok(f)
    }
}

const DERIV_SYMBOLS: [&str; 4] = ["Dt", "Dr", "Dz", "Dg"];

impl fmt::Display for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Lie bracket `[X, Y] = XY - YX` as operators.
pub fn bracket(x: &VectorField, y: &VectorField) -> VectorField {
    VectorField {
        coeffs: std::array::from_fn(|k| x.apply(&y.coeffs[k]).sub(&y.apply(&x.coeffs[k]))),
        scalar: x.apply(&y.scalar).sub(&y.apply(&x.scalar)),
    }
}

/// Generator names.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Gen {
    #[serde(rename = "X-1")]
    Xm1,
    X0,
    X1,
    #[serde(rename = "Y-1/2")]
    Ym,
    #[serde(rename = "Y1/2")]
    Yp,
    M0,
    N,
    D,
    #[serde(rename = "V+")]
    Vp,
    #[serde(rename = "V-")]
    Vm,
    W,
}

impl Gen {
    pub const ALL: [Gen; 11] =
        [Gen::Xm1, Gen::X0, Gen::X1, Gen::Ym, Gen::Yp, Gen::M0, Gen::N, Gen::D, Gen::Vp, Gen::Vm, Gen::W];

    pub fn name(self) -> &'static str {
        match self {
            Gen::Xm1 => "X-1",
            Gen::X0 => "X0",
            Gen::X1 => "X1",
            Gen::Ym => "Y-1/2",
            Gen::Yp => "Y1/2",
            Gen::M0 => "M0",
            Gen::N => "N",
            Gen::D => "D",
            Gen::Vp => "V+",
            Gen::Vm => "V-",
            Gen::W => "W",
        }
    }
}

impl fmt::Display for Gen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Gen {
    type Err = LieError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let alias = match s {
            "Xm1" | "X_-1" => "X-1",
            "Ym" | "Y-" | "Y_-1/2" => "Y-1/2",
            "Yp" | "Y+" | "Y_1/2" => "Y1/2",
            "Vp" => "V+",
            "Vm" => "V-",
            other => other,
        };
        Gen::ALL
            .iter()
            .copied()
            .find(|g| g.name() == alias)
            .ok_or_else(|| LieError::UnknownGenerator(s.to_string()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum AlgebraLabel {
    #[serde(rename = "sch1")]
    Sch,
    #[serde(rename = "age1")]
    Age,
    #[serde(rename = "alt1")]
    Alt,
    #[serde(rename = "sch1~")]
    SchTilde,
    #[serde(rename = "age1~")]
    AgeTilde,
    #[serde(rename = "alt1~")]
    AltTilde,
    #[serde(rename = "conf3")]
    Conf3,
}

impl AlgebraLabel {
    pub fn name(self) -> &'static str {
        match self {
            AlgebraLabel::Sch => "sch1",
            AlgebraLabel::Age => "age1",
            AlgebraLabel::Alt => "alt1",
            AlgebraLabel::SchTilde => "sch1~",
            AlgebraLabel::AgeTilde => "age1~",
            AlgebraLabel::AltTilde => "alt1~",
            AlgebraLabel::Conf3 => "conf3",
        }
    }

    /// The generator list defining the algebra.
    pub fn generators(self) -> Vec<Gen> {
        use Gen::*;
        match self {
            AlgebraLabel::Sch => vec![Xm1, X0, X1, Ym, Yp, M0],
            AlgebraLabel::Age => vec![X0, X1, Ym, Yp, M0],
            AlgebraLabel::Alt => vec![D, X1, Ym, Yp, M0, Vp],
            AlgebraLabel::SchTilde => vec![Xm1, X0, X1, Ym, Yp, M0, N],
            AlgebraLabel::AgeTilde => vec![X0, X1, Ym, Yp, M0, N],
            AlgebraLabel::AltTilde => vec![D, X1, Ym, Yp, M0, N, Vp],
            AlgebraLabel::Conf3 => vec![Xm1, X0, X1, Ym, Yp, M0, N, Vp, Vm, W],
        }
    }

    /// Drops or adds `N`, moving between an almost-parabolic algebra and its parabolic hull.
    pub fn parabolic(self) -> AlgebraLabel {
        match self {
            AlgebraLabel::Sch => AlgebraLabel::SchTilde,
            AlgebraLabel::Age => AlgebraLabel::AgeTilde,
            AlgebraLabel::Alt => AlgebraLabel::AltTilde,
            other => other,
        }
    }
}

impl fmt::Display for AlgebraLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    FixedMass,
    /// Variable mass with no modification of the mass generator (`L = 0`).
    Nmg,
    /// Variable mass with modified mass generator (`L != 0`).
    Mmg,
    /// Variable mass, `alt1` assignment.
    Alt,
    /// Variable mass, `sch1` assignment.
    Sch,
    /// Full conformal algebra without coupling.
    Conformal,
}

/// A named set of generators.
#[derive(Clone, Debug)]
pub struct Representation {
    pub label: AlgebraLabel,
    pub variant: Variant,
    pub generators: Vec<(Gen, VectorField)>,
    pub params: BTreeMap<String, RatFunc>,
}

impl Representation {
    pub fn new(label: AlgebraLabel, variant: Variant, generators: Vec<(Gen, VectorField)>) -> Self {
        Representation { label, variant, generators, params: BTreeMap::new() }
    }

    pub fn get(&self, g: Gen) -> Option<&VectorField> {
        self.generators.iter().find(|(n, _)| *n == g).map(|(_, f)| f)
    }

    pub fn names(&self) -> Vec<Gen> {
        self.generators.iter().map(|(n, _)| *n).collect()
    }

    /// Keeps only the listed generators, in the listed order.
    pub fn restrict(&self, names: &[Gen], label: AlgebraLabel) -> Representation {
        Representation {
            label,
            variant: self.variant,
            generators: names
                .iter()
                .filter_map(|n| self.get(*n).map(|f| (*n, f.clone())))
                .collect(),
            params: self.params.clone(),
        }
    }

    pub fn without(&self, g: Gen, label: AlgebraLabel) -> Representation {
        let names: Vec<Gen> = self.names().into_iter().filter(|n| *n != g).collect();
        self.restrict(&names, label)
    }

    /// Binds parameters in every generator.
    pub fn bind(&self, b: &BTreeMap<String, RatFunc>) -> Result<Representation, ExprError> {
        let mut params = self.params.clone();
        params.extend(b.iter().map(|(k, v)| (k.clone(), v.clone())));
        Ok(Representation {
            label: self.label,
            variant: self.variant,
            generators: self
                .generators
                .iter()
                .map(|(n, f)| Ok((*n, f.substitute_params(b)?)))
                .collect::<Result<_, ExprError>>()?,
            params,
        })
    }

    /// One generator per line: `name = c_t*Dt + c_r*Dr + c_z*Dz + c_g*Dg + scalar`.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (n, f) in &self.generators {
            s.push_str(&format!("{} = {}\n", n.name(), f.to_text()));
        }
        s
    }

    pub fn from_text(
        text: &str,
        label: AlgebraLabel,
        variant: Variant,
        ctx: &Context,
    ) -> Result<Representation, LieError> {
        let mut gens = Vec::new();
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
            let (name, body) = line
                .split_once('=')
                .ok_or_else(|| LieError::Text(format!("missing `=` in `{line}`")))?;
            gens.push((name.trim().parse::<Gen>()?, VectorField::from_text(body, ctx)?));
        }
        Ok(Representation::new(label, variant, gens))
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LieError {
    #[error("bracket [{0}, {1}] is not in the span of the generators; residual {2}")]
    NotClosed(Gen, Gen, String),
    #[error("{0} is not an ad-eigenvector of the chosen Cartan pair")]
    NotEigenvector(Gen),
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("cannot lift to the zeta representation: {0}")]
    Lift(String),
    #[error("cannot read representation text: {0}")]
    Text(String),
}

/// A linear combination of generators.
pub type Combination = Vec<(Gen, RatFunc)>;

/// Brackets of basis elements expressed in the basis.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct StructureTable {
    pub entries: BTreeMap<(Gen, Gen), Combination>,
}

impl StructureTable {
    pub fn get(&self, a: Gen, b: Gen) -> Option<&Combination> {
        self.entries.get(&(a, b))
    }

    pub fn names(&self) -> Vec<Gen> {
        let mut v: Vec<Gen> = self.entries.keys().flat_map(|(a, b)| [*a, *b]).collect();
        v.sort();
        v.dedup();
        v
    }

    /// `[a, b] + [b, a] = 0` for every stored pair.
    pub fn is_antisymmetric(&self) -> bool {
        self.entries.iter().all(|((a, b), c)| match self.get(*b, *a) {
            Some(d) => normalize(&add_comb(c, d, &RatFunc::one())).is_empty(),
            None => false,
        })
    }

    /// `[a,[b,c]] + [b,[c,a]] + [c,[a,b]] = 0` computed from the table alone.
    pub fn jacobi_violations(&self) -> Vec<(Gen, Gen, Gen)> {
        let names = self.names();
        let mut bad = Vec::new();
        for (i, &a) in names.iter().enumerate() {
            for (j, &b) in names.iter().enumerate().skip(i + 1) {
                for &c in names.iter().skip(j + 1) {
                    let s = add_comb(
                        &add_comb(&self.bracket_comb(a, &self.pair(b, c)), &self.bracket_comb(b, &self.pair(c, a)), &RatFunc::one()),
                        &self.bracket_comb(c, &self.pair(a, b)),
                        &RatFunc::one(),
                    );
                    if !normalize(&s).is_empty() {
                        bad.push((a, b, c));
                    }
                }
            }
        }
        bad
    }

    fn pair(&self, a: Gen, b: Gen) -> Combination {
        self.get(a, b).cloned().unwrap_or_default()
    }

    fn bracket_comb(&self, a: Gen, comb: &Combination) -> Combination {
        let mut out = Vec::new();
        for (g, c) in comb {
            out = add_comb(&out, &self.pair(a, *g), c);
        }
        out
    }

    /// Entries with both indices in `names`.
    pub fn restrict(&self, names: &[Gen]) -> StructureTable {
        StructureTable {
            entries: self
                .entries
                .iter()
                .filter(|((a, b), _)| names.contains(a) && names.contains(b))
                .map(|(k, v)| (*k, v.clone()))
                .collect(),
        }
    }
}

fn add_comb(a: &Combination, b: &Combination, scale: &RatFunc) -> Combination {
    let mut m: BTreeMap<Gen, RatFunc> = a.iter().cloned().collect();
    for (g, c) in b {
        let e = m.entry(*g).or_default();
        *e = e.add(&c.mul(scale));
    }
    m.into_iter().filter(|(_, c)| !c.is_zero()).collect()
}

fn normalize(c: &Combination) -> Combination {
    add_comb(&Vec::new(), c, &RatFunc::one())
}

pub fn format_combination(c: &Combination) -> String {
    if c.is_empty() {
        return "0".into();
    }
    c.iter()
        .map(|(g, k)| if k.is_one() { g.name().to_string() } else { format!("({k})*{}", g.name()) })
        .collect::<Vec<_>>()
        .join(" + ")
}

/// Expresses `target` in the span of the representation's generators.
pub fn express_in_span(rep: &Representation, target: &VectorField) -> Option<Combination> {
    let flats: Vec<_> = rep.generators.iter().map(|(_, f)| f.flatten()).collect();
    let cols: Vec<_> = flats.iter().collect();
    let sol = linsolve::solve(&cols, &target.flatten())?;
    Some(rep.names().into_iter().zip(sol).filter(|(_, c)| !c.is_zero()).collect())
}

/// Computes every pairwise bracket and expresses it in the generator basis.
pub fn derive_structure_table(rep: &Representation) -> Result<StructureTable, LieError> {
    let mut entries = BTreeMap::new();
    for (i, (a, fa)) in rep.generators.iter().enumerate() {
        entries.insert((*a, *a), Vec::new());
        for (b, fb) in rep.generators.iter().skip(i + 1) {
            let br = bracket(fa, fb);
            let comb = express_in_span(rep, &br).ok_or_else(|| LieError::NotClosed(*a, *b, br.to_text()))?;
            let neg = comb.iter().map(|(g, c)| (*g, c.neg())).collect();
            entries.insert((*a, *b), comb);
            entries.insert((*b, *a), neg);
        }
    }
    Ok(StructureTable { entries })
}

#[derive(Clone, Debug, Serialize)]
pub struct PairCheck {
    pub a: Gen,
    pub b: Gen,
    pub pass: bool,
    pub expected: String,
    pub residual: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct StructureReport {
    pub pairs: Vec<PairCheck>,
}

impl StructureReport {
    pub fn pass(&self) -> bool {
        self.pairs.iter().all(|p| p.pass)
    }

    pub fn failures(&self) -> Vec<&PairCheck> {
        self.pairs.iter().filter(|p| !p.pass).collect()
    }
}

/// Compares every bracket of `rep` with the corresponding table entry.
pub fn check_structure(rep: &Representation, table: &StructureTable) -> StructureReport {
    let mut pairs = Vec::new();
    for (i, (a, fa)) in rep.generators.iter().enumerate() {
        for (b, fb) in rep.generators.iter().skip(i + 1) {
            let br = bracket(fa, fb);
            let (pass, expected, residual) = match table.get(*a, *b) {
                None => (false, "missing".to_string(), br.to_text()),
                Some(comb) => {
                    let mut predicted = VectorField::zero();
                    let mut missing = false;
                    for (g, c) in comb {
                        match rep.get(*g) {
                            Some(f) => predicted = predicted.add(&f.scale(c)),
                            None => missing = true,
                        }
                    }
                    let res = br.sub(&predicted);
                    (!missing && is_zero_field(&res), format_combination(comb), res.to_text())
                }
            };
            pairs.push(PairCheck { a: *a, b: *b, pass, expected, residual });
        }
    }
    StructureReport { pairs }
}

fn is_zero_field(f: &VectorField) -> bool {
    f.coeffs.iter().all(|c| c.equivalent(&Expr::zero())) && f.scalar.equivalent(&Expr::zero())
}

/// Simultaneous ad-eigenvalues `[H_i, X] = w_i X` for the Cartan pair.
pub fn cartan_weights(
    rep: &Representation,
    cartan: (Gen, Gen),
) -> Result<BTreeMap<Gen, (RatFunc, RatFunc)>, LieError> {
    let h1 = rep.get(cartan.0).ok_or_else(|| LieError::UnknownGenerator(cartan.0.name().into()))?;
    let h2 = rep.get(cartan.1).ok_or_else(|| LieError::UnknownGenerator(cartan.1.name().into()))?;
    let mut out = BTreeMap::new();
    for (g, f) in &rep.generators {
        let w1 = eigenvalue(h1, f).ok_or(LieError::NotEigenvector(*g))?;
        let w2 = eigenvalue(h2, f).ok_or(LieError::NotEigenvector(*g))?;
        out.insert(*g, (w1, w2));
    }
    Ok(out)
}

fn eigenvalue(h: &VectorField, x: &VectorField) -> Option<RatFunc> {
    let br = bracket(h, x).flatten();
    let xf = x.flatten();
    let (key, xc) = xf.iter().next()?;
    let w = br.get(key).cloned().unwrap_or_default().div(xc)?;
    let scaled: BTreeMap<_, _> = xf.iter().map(|(k, c)| (k.clone(), c.mul(&w))).filter(|(_, c)| !c.is_zero()).collect();
    (scaled == br).then_some(w)
}

/// True iff the brackets of `subset` stay within its span.
pub fn is_subalgebra(rep: &Representation, subset: &[Gen]) -> bool {
    let sub = rep.restrict(subset, rep.label);
    if sub.generators.len() != subset.len() {
        return false;
    }
    derive_structure_table(&sub).is_ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::ex;

    fn vf(parts: &[(Var, &str)], scalar: &str) -> VectorField {
        VectorField::from_parts(&parts.iter().map(|(v, s)| (*v, ex(s))).collect::<Vec<_>>(), ex(scalar))
    }

    #[test]
    fn bracket_of_boosts_is_mass() {
        let yp = vf(&[(Var::R, "-t")], "-M*r");
        let ym = vf(&[(Var::R, "-1")], "0");
        let b = bracket(&yp, &ym);
        assert_eq!(b, VectorField::scalar_only(ex("-M")));
        assert!(bracket(&yp, &yp).is_zero());
    }

    #[test]
    fn text_round_trip() {
        let f = vf(&[(Var::T, "-t^2"), (Var::R, "-t*r"), (Var::G, "-2*y*t*g")], "-M*r^2/2 - x*t");
        let back = VectorField::from_text(&f.to_text(), &Context::standard()).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn generator_names_parse() {
        for g in Gen::ALL {
            assert_eq!(g.name().parse::<Gen>().unwrap(), g);
        }
        assert!("Q".parse::<Gen>().is_err());
    }
}
