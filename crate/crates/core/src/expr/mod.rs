//! Computer-algebra kernel.
//!
//! An [`Expr`] is a finite sum of terms `c * a1^e1 * a2^e2 * ...` where the
//! coefficient `c` and every exponent `e` are rational functions of the
//! parameters ([`RatFunc`]) and the atoms are the base variables, applications
//! of uninterpreted functions, or powers of multi-term sums.
//!
//! Canonical forms are maintained by every constructor. Without powers of sums,
//! structural equality is expression equality. Powers of sums are brought to a
//! common exponent per residue class modulo the integers (a common-denominator
//! form), so vanishing stays decidable, e.g. `B^(e+1) - B * B^e = 0`, but a
//! quotient such as `(t+1)/(t+1)` is not cancelled to `1`; compare such
//! expressions with [`Expr::equivalent`].

pub mod parse;
pub mod poly;
pub(crate) mod print;
pub mod ratfunc;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops;

use num_complex::Complex64;
use num_traits::Zero;
use thiserror::Error;

pub use parse::{parse, ParseError};
pub use poly::{rat, Poly, PowerProduct, Rational, IMAG_UNIT};
pub use ratfunc::{ExpExpr, RatFunc};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExprError {
    #[error("substitution produces a zero denominator")]
    ZeroDenominator,
    #[error("zero raised to a non-positive power")]
    ZeroPower,
    #[error("exponent `{0}` depends on variables; exponents must be parameter expressions")]
    NonScalarExponent(String),
    #[error("parameter `{0}` bound to an expression that depends on variables")]
    NonScalarParamBinding(String),
    #[error("cannot evaluate: {0}")]
    Eval(String),
}

/// Base variables: coordinates `t, r, zeta, g` and the field pair `Psi, PsiS`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Var {
    T,
    R,
    Zeta,
    G,
    Psi,
    PsiStar,
}

impl Var {
    pub const ALL: [Var; 6] = [Var::T, Var::R, Var::Zeta, Var::G, Var::Psi, Var::PsiStar];
    pub const COORDS: [Var; 4] = [Var::T, Var::R, Var::Zeta, Var::G];

    pub fn name(self) -> &'static str {
        match self {
            Var::T => "t",
            Var::R => "r",
            Var::Zeta => "zeta",
            Var::G => "g",
            Var::Psi => "Psi",
            Var::PsiStar => "PsiS",
        }
    }

    pub fn from_name(s: &str) -> Option<Var> {
        Some(match s {
            "t" => Var::T,
            "r" => Var::R,
            "zeta" | "z" => Var::Zeta,
            "g" => Var::G,
            "Psi" | "Phi" => Var::Psi,
            "PsiS" | "PhiS" => Var::PsiStar,
            _ => return None,
        })
    }

    /// Index among the four coordinates, `None` for field variables.
    pub fn coord_index(self) -> Option<usize> {
        match self {
            Var::T => Some(0),
            Var::R => Some(1),
            Var::Zeta => Some(2),
            Var::G => Some(3),
            _ => None,
        }
    }

    pub fn swap_field(self) -> Var {
        match self {
            Var::Psi => Var::PsiStar,
            Var::PsiStar => Var::Psi,
            v => v,
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Formal application of an uninterpreted function, possibly differentiated.
///
/// `derivs[k]` counts derivatives taken with respect to argument `k`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct FuncApp {
    pub name: String,
    pub derivs: Vec<u32>,
    pub args: Vec<Expr>,
}

impl FuncApp {
    pub fn new(name: &str, args: Vec<Expr>) -> Self {
        FuncApp { name: name.to_string(), derivs: vec![0; args.len()], args }
    }

    pub fn derivative(&self, k: usize) -> FuncApp {
        let mut d = self.clone();
        d.derivs[k] += 1;
        d
    }

    pub fn order(&self) -> u32 {
        self.derivs.iter().sum()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Atom {
    Var(Var),
    Func(FuncApp),
    /// A multi-term sum used as a power base.
    Pow(Box<Expr>),
}

impl Atom {
    pub fn is_func(&self) -> bool {
        matches!(self, Atom::Func(_))
    }
}

/// Product of atoms with exponents; absent atoms have exponent zero.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct Monomial(BTreeMap<Atom, RatFunc>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(BTreeMap::new())
    }

    pub fn atom(a: Atom, e: RatFunc) -> Self {
        let mut m = BTreeMap::new();
        if !e.is_zero() {
            m.insert(a, e);
        }
        Monomial(m)
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn factors(&self) -> impl Iterator<Item = (&Atom, &RatFunc)> {
        self.0.iter()
    }

    pub fn exponent(&self, a: &Atom) -> Option<&RatFunc> {
        self.0.get(a)
    }

    pub fn var_exponent(&self, v: Var) -> RatFunc {
        self.0.get(&Atom::Var(v)).cloned().unwrap_or_default()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = self.0.clone();
        for (a, e) in &other.0 {
            match out.get_mut(a) {
                Some(slot) => {
                    let s = slot.add(e);
                    if s.is_zero() {
                        out.remove(a);
                    } else {
                        *slot = s;
                    }
                }
                None => {
                    out.insert(a.clone(), e.clone());
                }
            }
        }
        Monomial(out)
    }

    pub fn pow(&self, e: &RatFunc) -> Monomial {
        if e.is_zero() {
            return Monomial::one();
        }
        Monomial(self.0.iter().map(|(a, k)| (a.clone(), k.mul(e))).collect())
    }

    pub fn without(&self, a: &Atom) -> Monomial {
        let mut m = self.0.clone();
        m.remove(a);
        Monomial(m)
    }

    pub fn with(&self, a: Atom, e: RatFunc) -> Monomial {
        let mut m = self.0.clone();
        if e.is_zero() {
            m.remove(&a);
        } else {
            m.insert(a, e);
        }
        Monomial(m)
    }

    /// Splits into (function atoms, everything else).
    pub fn split_funcs(&self) -> (Monomial, Monomial) {
        let mut f = BTreeMap::new();
        let mut rest = BTreeMap::new();
        for (a, e) in &self.0 {
            if a.is_func() {
                f.insert(a.clone(), e.clone());
            } else {
                rest.insert(a.clone(), e.clone());
            }
        }
        (Monomial(f), Monomial(rest))
    }
}

/// Canonical symbolic expression.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct Expr {
    terms: BTreeMap<Monomial, RatFunc>,
}

/// Evaluator for a function symbol, taking derivative counts and argument values.
pub type FuncEval<'a> = &'a dyn Fn(&[u32], &[Complex64]) -> Complex64;

/// Values used by [`Expr::eval`].
#[derive(Clone)]
pub struct EvalEnv<'a> {
    pub vars: BTreeMap<Var, Complex64>,
    pub params: BTreeMap<String, Complex64>,
    pub funcs: BTreeMap<String, FuncEval<'a>>,
}

impl<'a> EvalEnv<'a> {
    pub fn new() -> Self {
        EvalEnv { vars: BTreeMap::new(), params: BTreeMap::new(), funcs: BTreeMap::new() }
    }

    pub fn var(mut self, v: Var, value: f64) -> Self {
        self.vars.insert(v, Complex64::new(value, 0.0));
        self
    }

    pub fn param(mut self, p: &str, value: f64) -> Self {
        self.params.insert(p.to_string(), Complex64::new(value, 0.0));
        self
    }
}

impl<'a> Default for EvalEnv<'a> {
    fn default() -> Self {
        Self::new()
    }
}

impl Expr {
    pub fn zero() -> Self {
        Expr::default()
    }

    pub fn one() -> Self {
        Expr::constant(RatFunc::one())
    }

    pub fn int(n: i64) -> Self {
        Expr::constant(RatFunc::int(n))
    }

    pub fn ratio(n: i64, d: i64) -> Self {
        Expr::constant(RatFunc::ratio(n, d))
    }

    pub fn constant(c: RatFunc) -> Self {
        Expr::term(Monomial::one(), c)
    }

    pub fn param(name: &str) -> Self {
        Expr::constant(RatFunc::param(name))
    }

    pub fn imag_unit() -> Self {
        Expr::constant(RatFunc::imag_unit())
    }

    pub fn var(v: Var) -> Self {
        Expr::term(Monomial::atom(Atom::Var(v), RatFunc::one()), RatFunc::one())
    }

    pub fn t() -> Self {
        Expr::var(Var::T)
    }
    pub fn r() -> Self {
        Expr::var(Var::R)
    }
    pub fn zeta() -> Self {
        Expr::var(Var::Zeta)
    }
    pub fn g() -> Self {
        Expr::var(Var::G)
    }
    pub fn psi() -> Self {
        Expr::var(Var::Psi)
    }
    pub fn psi_star() -> Self {
        Expr::var(Var::PsiStar)
    }

    /// `v^e` for a base variable.
    pub fn var_pow(v: Var, e: RatFunc) -> Self {
        Expr::term(Monomial::atom(Atom::Var(v), e), RatFunc::one())
    }

    pub fn func(name: &str, args: Vec<Expr>) -> Self {
        Expr::func_app(FuncApp::new(name, args))
    }

    pub fn func_app(app: FuncApp) -> Self {
        Expr::term(Monomial::atom(Atom::Func(app), RatFunc::one()), RatFunc::one())
    }

    /// A single term; the caller guarantees canonical atoms.
    pub fn term(m: Monomial, c: RatFunc) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Expr { terms }
    }

    /// Builds an expression from possibly non-canonical terms.
    pub fn from_terms(raw: impl IntoIterator<Item = (Monomial, RatFunc)>) -> Self {
        canonicalize(merge(raw))
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &RatFunc)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The parameter-only value, if no atom occurs.
    pub fn as_constant(&self) -> Option<RatFunc> {
        match self.terms.len() {
            0 => Some(RatFunc::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    /// Equality up to the cancellations the canonical form does not perform.
    pub fn equivalent(&self, other: &Expr) -> bool {
        self == other || self.sub(other).is_zero()
    }

    pub fn is_constant(&self) -> bool {
        self.as_constant().is_some()
    }

    /// Variables occurring anywhere, including inside function arguments and power bases.
    pub fn vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.visit_atoms(&mut |a| {
            if let Atom::Var(v) = a {
                out.insert(*v);
            }
        });
        out
    }

    pub fn contains_var(&self, v: Var) -> bool {
        self.vars().contains(&v)
    }

    pub fn contains_func(&self) -> bool {
        let mut found = false;
        self.visit_atoms(&mut |a| found |= a.is_func());
        found
    }

    pub fn params(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_params(&mut out);
        out
    }

    fn collect_params(&self, out: &mut BTreeSet<String>) {
        for (m, c) in &self.terms {
            out.extend(c.params());
            for (a, e) in m.factors() {
                out.extend(e.params());
                match a {
                    Atom::Var(_) => {}
                    Atom::Func(app) => app.args.iter().for_each(|x| x.collect_params(out)),
                    Atom::Pow(b) => b.collect_params(out),
                }
            }
        }
    }

    fn visit_atoms(&self, f: &mut dyn FnMut(&Atom)) {
        for m in self.terms.keys() {
            for (a, _) in m.factors() {
                f(a);
                match a {
                    Atom::Var(_) => {}
                    Atom::Func(app) => app.args.iter().for_each(|x| x.visit_atoms(f)),
                    Atom::Pow(b) => b.visit_atoms(f),
                }
            }
        }
    }

    pub fn add(&self, other: &Expr) -> Expr {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let raw = self
            .terms
            .iter()
            .chain(other.terms.iter())
            .map(|(m, c)| (m.clone(), c.clone()));
        let merged = merge(raw);
        if has_composite(&merged) {
            canonicalize(merged)
        } else {
            merged
        }
    }

    pub fn sub(&self, other: &Expr) -> Expr {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Expr {
        Expr { terms: self.terms.iter().map(|(m, c)| (m.clone(), c.neg())).collect() }
    }

    pub fn mul(&self, other: &Expr) -> Expr {
        if self.is_zero() || other.is_zero() {
            return Expr::zero();
        }
        if let Some(c) = other.as_constant() {
            return self.scale(&c);
        }
        if let Some(c) = self.as_constant() {
            return other.scale(&c);
        }
        let mut raw = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                raw.push((ma.mul(mb), ca.mul(cb)));
            }
        }
        canonicalize(merge(raw))
    }

    pub fn scale(&self, c: &RatFunc) -> Expr {
        if c.is_zero() {
            return Expr::zero();
        }
        if c.is_one() {
            return self.clone();
        }
        Expr {
            terms: self
                .terms
                .iter()
                .filter_map(|(m, k)| {
                    let p = k.mul(c);
                    (!p.is_zero()).then(|| (m.clone(), p))
                })
                .collect(),
        }
    }

    pub fn scale_int(&self, n: i64) -> Expr {
        self.scale(&RatFunc::int(n))
    }

    /// `self^e` under the positive-domain conventions `(a*b)^e = a^e*b^e`, `(a^k)^e = a^(k*e)`.
    pub fn pow(&self, e: &RatFunc) -> Result<Expr, ExprError> {
        if e.is_zero() {
            return Ok(Expr::one());
        }
        if e.is_one() {
            return Ok(self.clone());
        }
        if self.is_zero() {
            return match e.as_constant() {
                Some(c) if c > Rational::zero() => Ok(Expr::zero()),
                _ => Err(ExprError::ZeroPower),
            };
        }
        let int = e.as_i64();
        if self.terms.len() == 1 {
            let (m, c) = self.terms.iter().next().unwrap();
            let mono = m.pow(e);
            if let Some(n) = int {
                let cn = c.powi(n).ok_or(ExprError::ZeroPower)?;
                return Ok(Expr::from_terms([(mono, cn)]));
            }
            if c.is_one() {
                return Ok(Expr::from_terms([(mono, RatFunc::one())]));
            }
            let base = Atom::Pow(Box::new(Expr::constant(c.clone())));
            return Ok(Expr::from_terms([(mono.with(base, e.clone()), RatFunc::one())]));
        }
        match int {
            Some(n) if n >= 0 => Ok(self.powi_expand(n as u32)),
            _ => Ok(Expr::from_terms([(
                Monomial::atom(Atom::Pow(Box::new(self.clone())), e.clone()),
                RatFunc::one(),
            )])),
        }
    }

    pub fn powi(&self, n: i64) -> Result<Expr, ExprError> {
        self.pow(&RatFunc::int(n))
    }

    fn powi_expand(&self, n: u32) -> Expr {
        let mut out = Expr::one();
        let mut base = self.clone();
        let mut k = n;
        while k > 0 {
            if k & 1 == 1 {
                out = out.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        out
    }

    pub fn recip(&self) -> Result<Expr, ExprError> {
        self.powi(-1)
    }

    pub fn div(&self, other: &Expr) -> Result<Expr, ExprError> {
        Ok(self.mul(&other.recip()?))
    }

    /// Exact partial derivative with respect to a base variable.
    pub fn diff(&self, v: Var) -> Expr {
        let mut raw: Vec<(Monomial, RatFunc)> = Vec::new();
        let mut extra = Expr::zero();
        for (m, c) in &self.terms {
            for (a, e) in m.factors() {
                let da = diff_atom(a, v);
                if da.is_zero() {
                    continue;
                }
                let lowered = m.with(a.clone(), e.sub(&RatFunc::one()));
                let coef = c.mul(e);
                match da.as_constant() {
                    Some(k) => raw.push((lowered, coef.mul(&k))),
                    None => {
                        extra = extra.add(&Expr::from_terms([(lowered, coef)]).mul(&da));
                    }
                }
            }
        }
        Expr::from_terms(raw).add(&extra)
    }

    /// Simultaneous substitution of variables by expressions and of parameters by
    /// parameter expressions.
    pub fn substitute(
        &self,
        vars: &BTreeMap<Var, Expr>,
        params: &BTreeMap<String, RatFunc>,
    ) -> Result<Expr, ExprError> {
        let mut out = Expr::zero();
        for (m, c) in &self.terms {
            let c2 = c.substitute(params).ok_or(ExprError::ZeroDenominator)?;
            let mut term = Expr::constant(c2);
            for (a, e) in m.factors() {
                let e2 = e.substitute(params).ok_or(ExprError::ZeroDenominator)?;
                let base = match a {
                    Atom::Var(x) => match vars.get(x) {
                        Some(b) => b.clone(),
                        None => Expr::var(*x),
                    },
                    Atom::Func(app) => {
                        let args = app
                            .args
                            .iter()
                            .map(|x| x.substitute(vars, params))
                            .collect::<Result<Vec<_>, _>>()?;
                        Expr::func_app(FuncApp { name: app.name.clone(), derivs: app.derivs.clone(), args })
                    }
                    Atom::Pow(b) => b.substitute(vars, params)?,
                };
                term = term.mul(&base.pow(&e2)?);
            }
            out = out.add(&term);
        }
        Ok(out)
    }

    /// Substitutes parameters by parameter expressions given as `Expr` (must be atom-free).
    pub fn substitute_params(&self, params: &BTreeMap<String, Expr>) -> Result<Expr, ExprError> {
        let mut scalar = BTreeMap::new();
        for (k, v) in params {
            let c = v.as_constant().ok_or_else(|| ExprError::NonScalarParamBinding(k.clone()))?;
            scalar.insert(k.clone(), c);
        }
        self.substitute(&BTreeMap::new(), &scalar)
    }

    pub fn subs_var(&self, v: Var, with: &Expr) -> Result<Expr, ExprError> {
        let mut m = BTreeMap::new();
        m.insert(v, with.clone());
        self.substitute(&m, &BTreeMap::new())
    }

    pub fn subs_param(&self, p: &str, with: RatFunc) -> Result<Expr, ExprError> {
        let mut m = BTreeMap::new();
        m.insert(p.to_string(), with);
        self.substitute(&BTreeMap::new(), &m)
    }

    /// Complex conjugation for real coordinates: flips `i` and the listed
    /// imaginary parameters and exchanges `Psi` with `PsiS`. Function symbols are kept.
    pub fn conj(&self, imaginary_params: &[String]) -> Expr {
        let mut raw = Vec::new();
        for (m, c) in &self.terms {
            let mut mono = Monomial::one();
            for (a, e) in m.factors() {
                let a2 = match a {
                    Atom::Var(v) => Atom::Var(v.swap_field()),
                    Atom::Func(app) => Atom::Func(FuncApp {
                        name: app.name.clone(),
                        derivs: app.derivs.clone(),
                        args: app.args.iter().map(|x| x.conj(imaginary_params)).collect(),
                    }),
                    Atom::Pow(b) => Atom::Pow(Box::new(b.conj(imaginary_params))),
                };
                mono = mono.mul(&Monomial::atom(a2, e.conj(imaginary_params)));
            }
            raw.push((mono, c.conj(imaginary_params)));
        }
        Expr::from_terms(raw)
    }

    /// Numeric evaluation with principal-branch powers.
    pub fn eval(&self, env: &EvalEnv<'_>) -> Result<Complex64, ExprError> {
        let pf = |p: &str| env.params.get(p).copied();
        let mut acc = Complex64::new(0.0, 0.0);
        for (m, c) in &self.terms {
            let mut term = c
                .eval(&pf)
                .ok_or_else(|| ExprError::Eval(format!("coefficient {c}")))?;
            for (a, e) in m.factors() {
                let base = match a {
                    Atom::Var(v) => *env
                        .vars
                        .get(v)
                        .ok_or_else(|| ExprError::Eval(format!("unbound variable {v}")))?,
                    Atom::Func(app) => {
                        let f = env
                            .funcs
                            .get(&app.name)
                            .ok_or_else(|| ExprError::Eval(format!("unbound function {}", app.name)))?;
                        let args = app
                            .args
                            .iter()
                            .map(|x| x.eval(env))
                            .collect::<Result<Vec<_>, _>>()?;
                        f(&app.derivs, &args)
                    }
                    Atom::Pow(b) => b.eval(env)?,
                };
                let factor = match e.as_i64() {
                    Some(n) if n.unsigned_abs() < i32::MAX as u64 => base.powi(n as i32),
                    _ => {
                        let ev = e.eval(&pf).ok_or_else(|| ExprError::Eval(format!("exponent {e}")))?;
                        base.powc(ev)
                    }
                };
                term *= factor;
            }
            acc += term;
        }
        Ok(acc)
    }

    /// Partitions the expression by its uninterpreted-function factor.
    ///
    /// The key is the product of function atoms of a term (the empty monomial for
    /// the remainder bucket); the value is the sum of the cofactors.
    pub fn collect_unknowns(&self) -> BTreeMap<Monomial, Expr> {
        let mut buckets: BTreeMap<Monomial, Vec<(Monomial, RatFunc)>> = BTreeMap::new();
        for (m, c) in &self.terms {
            let (f, rest) = m.split_funcs();
            buckets.entry(f).or_default().push((rest, c.clone()));
        }
        buckets
            .into_iter()
            .map(|(k, v)| (k, Expr::from_terms(v)))
            .filter(|(_, v)| !v.is_zero())
            .collect()
    }

    /// Applies `f` to every coefficient (and nothing else).
    pub fn map_coeffs(&self, f: impl Fn(&RatFunc) -> RatFunc) -> Expr {
        Expr::from_terms(self.terms.iter().map(|(m, c)| (m.clone(), f(c))))
    }
}

fn diff_atom(a: &Atom, v: Var) -> Expr {
    match a {
        Atom::Var(x) => {
            if *x == v {
                Expr::one()
            } else {
                Expr::zero()
            }
        }
        Atom::Func(app) => {
            let mut out = Expr::zero();
            for (k, arg) in app.args.iter().enumerate() {
                let d = arg.diff(v);
                if !d.is_zero() {
                    out = out.add(&Expr::func_app(app.derivative(k)).mul(&d));
                }
            }
            out
        }
        Atom::Pow(b) => b.diff(v),
    }
}

fn merge(raw: impl IntoIterator<Item = (Monomial, RatFunc)>) -> Expr {
    let mut terms: BTreeMap<Monomial, RatFunc> = BTreeMap::new();
    for (m, c) in raw {
        if c.is_zero() {
            continue;
        }
        match terms.get_mut(&m) {
            Some(slot) => {
                let s = slot.add(&c);
                if s.is_zero() {
                    terms.remove(&m);
                } else {
                    *slot = s;
                }
            }
            None => {
                terms.insert(m, c);
            }
        }
    }
    Expr { terms }
}

fn has_composite(e: &Expr) -> bool {
    e.terms.keys().any(|m| m.factors().any(|(a, _)| matches!(a, Atom::Pow(_))))
}

fn canonicalize(mut e: Expr) -> Expr {
    if !has_composite(&e) {
        return e;
    }
    for _ in 0..64 {
        if let Some(next) = expand_integer_powers(&e) {
            e = next;
            continue;
        }
        if let Some(next) = align_exponent_classes(&e) {
            e = next;
            continue;
        }
        break;
    }
    e
}

/// Expands `B^k` for non-negative integer `k`.
fn expand_integer_powers(e: &Expr) -> Option<Expr> {
    let mut changed = false;
    let mut keep = Vec::new();
    let mut extra = Expr::zero();
    for (m, c) in &e.terms {
        let hit = m.factors().find_map(|(a, k)| match (a, k.as_i64()) {
            (Atom::Pow(b), Some(n)) if n >= 0 => Some((a.clone(), b.clone(), n)),
            _ => None,
        });
        match hit {
            Some((a, b, n)) => {
                changed = true;
                let rest = Expr::from_terms([(m.without(&a), c.clone())]);
                extra = extra.add(&rest.mul(&b.powi_expand(n as u32)));
            }
            None => keep.push((m.clone(), c.clone())),
        }
    }
    changed.then(|| merge(keep).add(&extra))
}

/// Rewrites every power of a base within one residue class modulo the integers
/// to the smallest exponent of that class times an expanded integer power.
/// Terms lacking the base count as exponent zero in the integer class.
fn align_exponent_classes(e: &Expr) -> Option<Expr> {
    let mut bases: BTreeSet<Expr> = BTreeSet::new();
    for m in e.terms.keys() {
        for (a, _) in m.factors() {
            if let Atom::Pow(b) = a {
                bases.insert((**b).clone());
            }
        }
    }
    for b in bases {
        let atom = Atom::Pow(Box::new(b.clone()));
        let exps: Vec<RatFunc> = e.terms.keys().map(|m| m.exponent(&atom).cloned().unwrap_or_default()).collect();
        let mut classes: Vec<(RatFunc, Vec<usize>)> = Vec::new();
        for (idx, x) in exps.iter().enumerate() {
            let found = classes.iter_mut().find(|(rep, _)| x.sub(rep).as_integer().is_some());
            match found {
                Some((rep, members)) => {
                    if x.sub(rep).is_negative_constant() {
                        *rep = x.clone();
                    }
                    members.push(idx);
                }
                None => classes.push((x.clone(), vec![idx])),
            }
        }
        for (min, members) in classes {
            if members.iter().all(|&i| exps[i] == min) {
                continue;
            }
            let mut raw = Vec::new();
            let mut extra = Expr::zero();
            for (idx, (m, c)) in e.terms.iter().enumerate() {
                if !members.contains(&idx) || exps[idx] == min {
                    raw.push((m.clone(), c.clone()));
                    continue;
                }
                let shift = exps[idx].sub(&min).as_i64().expect("integer shift within class") as u32;
                let lowered = m.with(atom.clone(), min.clone());
                extra = extra.add(&Expr::term(lowered, c.clone()).mul(&b.powi_expand(shift)));
            }
            return Some(merge(raw).add(&extra));
        }
    }
    None
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        print::write_expr(self, f)
    }
}

impl ops::Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        Expr::add(&self, &rhs)
    }
}

impl<'a> ops::Add<&'a Expr> for &'a Expr {
    type Output = Expr;
    fn add(self, rhs: &Expr) -> Expr {
        Expr::add(self, rhs)
    }
}

impl ops::Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        Expr::sub(&self, &rhs)
    }
}

impl<'a> ops::Sub<&'a Expr> for &'a Expr {
    type Output = Expr;
    fn sub(self, rhs: &Expr) -> Expr {
        Expr::sub(self, rhs)
    }
}

impl ops::Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        Expr::mul(&self, &rhs)
    }
}

impl<'a> ops::Mul<&'a Expr> for &'a Expr {
    type Output = Expr;
    fn mul(self, rhs: &Expr) -> Expr {
        Expr::mul(self, rhs)
    }
}

impl ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::neg(&self)
    }
}

impl ops::Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::neg(self)
    }
}

impl From<RatFunc> for Expr {
    fn from(c: RatFunc) -> Self {
        Expr::constant(c)
    }
}

impl From<Var> for Expr {
    fn from(v: Var) -> Self {
        Expr::var(v)
    }
}

/// How a parameter behaves under conjugation and where it may appear.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum ParamKind {
    /// Real scaling exponents such as `x`, `y`, `s`.
    Exponent,
    /// A purely imaginary mass such as `M` (flips sign under conjugation).
    Mass,
    /// Real constants, including the real mass `m` and group parameters.
    Constant,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Param {
    pub name: String,
    pub kind: ParamKind,
}

/// Declared parameters and function symbols, used by the parser and by conjugation.
#[derive(Clone, Debug)]
pub struct Context {
    params: BTreeMap<String, ParamKind>,
    funcs: BTreeSet<String>,
}

impl Context {
    pub fn empty() -> Self {
        let mut params = BTreeMap::new();
        params.insert(IMAG_UNIT.to_string(), ParamKind::Constant);
        Context { params, funcs: BTreeSet::new() }
    }

    /// The parameters and function symbols used throughout the catalog.
    pub fn standard() -> Self {
        let mut c = Context::empty();
        for p in ["x", "y", "s", "yh"] {
            c.declare_param(p, ParamKind::Exponent);
        }
        c.declare_param("M", ParamKind::Mass);
        for p in ["m", "m0", "k0", "k0p", "p01", "lambda", "c", "v", "tau", "u"] {
            c.declare_param(p, ParamKind::Constant);
        }
        for f in ["f", "fbar", "h"] {
            c.declare_func(f);
        }
        c
    }

    /// Declares a parameter; redeclaration with a different kind replaces it.
    pub fn declare_param(&mut self, name: &str, kind: ParamKind) {
        self.params.insert(name.to_string(), kind);
    }

    pub fn declare_func(&mut self, name: &str) {
        self.funcs.insert(name.to_string());
    }

    pub fn param_kind(&self, name: &str) -> Option<ParamKind> {
        self.params.get(name).copied()
    }

    pub fn is_func(&self, name: &str) -> bool {
        self.funcs.contains(name)
    }

    pub fn params(&self) -> impl Iterator<Item = Param> + '_ {
        self.params.iter().map(|(n, k)| Param { name: n.clone(), kind: *k })
    }

    pub fn imaginary_params(&self) -> Vec<String> {
        self.params
            .iter()
            .filter(|(_, k)| **k == ParamKind::Mass)
            .map(|(n, _)| n.clone())
            .collect()
    }
}

impl Default for Context {
    fn default() -> Self {
        Context::standard()
    }
}

/// Parses with the standard context; panics on malformed input. Intended for
/// literals in constructors and tests.
pub fn ex(text: &str) -> Expr {
    parse(text, &Context::standard()).unwrap_or_else(|e| panic!("bad literal `{text}`: {e}"))
}
