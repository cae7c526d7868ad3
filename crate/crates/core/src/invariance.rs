//! Linear differential operators in `t, r, zeta, g` and the conditional
//! invariance test `[S, X] = lambda * S + sum_i mu_i * A_i`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::expr::print::{factor, join_terms, scaled};
use crate::expr::{Expr, ExprError, RatFunc, Var};
use crate::liealg::VectorField;

/// Multi-index of derivative orders in `(t, r, zeta, g)`.
pub type MultiIndex = [u8; 4];

const DNAMES: [&str; 4] = ["Dt", "Dr", "Dz", "Dg"];

/// `sum_alpha a_alpha(t, r, zeta, g) * d^alpha`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct DiffOperator {
    terms: BTreeMap<MultiIndex, Expr>,
}

impl DiffOperator {
    pub fn zero() -> Self {
        DiffOperator::default()
    }

    pub fn identity() -> Self {
        DiffOperator::term([0; 4], Expr::one())
    }

    pub fn term(idx: MultiIndex, c: Expr) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(idx, c);
        }
        DiffOperator { terms }
    }

    /// `d^k / dv^k`.
    pub fn partial(v: Var, k: u8) -> Self {
        let mut idx = [0; 4];
        idx[v.coord_index().expect("coordinate")] = k;
        DiffOperator::term(idx, Expr::one())
    }

    /// Mixed partial from a list of coordinates, e.g. `[Zeta, T]`.
    pub fn partials(vars: &[Var]) -> Self {
        let mut idx = [0; 4];
        for v in vars {
            idx[v.coord_index().expect("coordinate")] += 1;
        }
        DiffOperator::term(idx, Expr::one())
    }

    pub fn multiplication(c: Expr) -> Self {
        DiffOperator::term([0; 4], c)
    }

    /// A vector field as a first-order operator including its scalar part.
    pub fn from_field(f: &VectorField) -> Self {
        let mut out = DiffOperator::multiplication(f.scalar.clone());
        for (k, c) in f.coeffs.iter().enumerate() {
            let mut idx = [0; 4];
            idx[k] = 1;
            out = out.add(&DiffOperator::term(idx, c.clone()));
        }
        out
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &Expr)> {
        self.terms.iter()
    }

    pub fn get(&self, idx: &MultiIndex) -> Expr {
        self.terms.get(idx).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.values().all(|c| c.equivalent(&Expr::zero()))
    }

    pub fn order(&self) -> u8 {
        self.terms.keys().map(|i| i.iter().sum::<u8>()).max().unwrap_or(0)
    }

    pub fn add(&self, o: &DiffOperator) -> DiffOperator {
        let mut terms = self.terms.clone();
        for (i, c) in &o.terms {
            let s = terms.get(i).map(|a| a.add(c)).unwrap_or_else(|| c.clone());
            if s.is_zero() {
                terms.remove(i);
            } else {
                terms.insert(*i, s);
            }
        }
        DiffOperator { terms }
    }

    pub fn sub(&self, o: &DiffOperator) -> DiffOperator {
        self.add(&o.scale(&RatFunc::int(-1)))
    }

    pub fn scale(&self, c: &RatFunc) -> DiffOperator {
        DiffOperator {
            terms: self
                .terms
                .iter()
                .map(|(i, e)| (*i, e.scale(c)))
                .filter(|(_, e)| !e.is_zero())
                .collect(),
        }
    }

    /// Left multiplication by a function.
    pub fn times(&self, f: &Expr) -> DiffOperator {
        DiffOperator {
            terms: self
                .terms
                .iter()
                .map(|(i, e)| (*i, e.mul(f)))
                .filter(|(_, e)| !e.is_zero())
                .collect(),
        }
    }

    /// Operator product `self ∘ other`, expanding with the Leibniz rule.
    pub fn compose(&self, other: &DiffOperator) -> DiffOperator {
        let mut out: BTreeMap<MultiIndex, Expr> = BTreeMap::new();
        for (alpha, a) in &self.terms {
            for (beta, b) in &other.terms {
                for gamma in sub_indices(alpha) {
                    let binom: i64 = (0..4).map(|k| binomial(alpha[k], gamma[k])).product();
                    let db = diff_multi(b, &gamma);
                    if db.is_zero() {
                        continue;
                    }
                    let idx: MultiIndex = std::array::from_fn(|k| alpha[k] - gamma[k] + beta[k]);
                    let c = a.mul(&db).scale_int(binom);
                    let e = out.entry(idx).or_default();
                    *e = e.add(&c);
                }
            }
        }
        out.retain(|_, c| !c.is_zero());
        DiffOperator { terms: out }
    }

    /// Action on a function.
    pub fn apply(&self, f: &Expr) -> Expr {
        self.terms
            .iter()
            .fold(Expr::zero(), |acc, (i, c)| acc.add(&c.mul(&diff_multi(f, i))))
    }

    /// Substitutes values for parameters in every coefficient.
    pub fn bind(&self, b: &BTreeMap<String, RatFunc>) -> Result<DiffOperator, ExprError> {
        self.terms().try_fold(DiffOperator::zero(), |acc, (i, c)| {
            Ok(acc.add(&DiffOperator::term(*i, c.substitute(&BTreeMap::new(), b)?)))
        })
    }

    /// Parameters appearing in the coefficients.
    pub fn params(&self) -> BTreeSet<String> {
        self.terms.values().flat_map(Expr::params).collect()
    }

    pub fn map(&self, f: impl Fn(&Expr) -> Expr) -> DiffOperator {
        DiffOperator {
            terms: self
                .terms
                .iter()
                .map(|(i, c)| (*i, f(c)))
                .filter(|(_, c)| !c.is_zero())
                .collect(),
        }
    }
}

fn sub_indices(alpha: &MultiIndex) -> Vec<MultiIndex> {
    let mut out = vec![[0u8; 4]];
    for k in 0..4 {
        let mut next = Vec::new();
        for g in &out {
            for j in 0..=alpha[k] {
                let mut h = *g;
                h[k] = j;
                next.push(h);
            }
        }
        out = next;
    }
    out
}

fn binomial(n: u8, k: u8) -> i64 {
    (0..k as i64).fold(1, |acc, i| acc * (n as i64 - i) / (i + 1))
}

fn diff_multi(e: &Expr, idx: &MultiIndex) -> Expr {
    let mut out = e.clone();
    for (k, v) in Var::COORDS.iter().enumerate() {
        for _ in 0..idx[k] {
            out = out.diff(*v);
        }
    }
    out
}

impl fmt::Display for DiffOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let terms = self.terms.iter().rev().map(|(idx, c)| {
            let ds: Vec<String> = idx
                .iter()
                .enumerate()
                .filter(|(_, n)| **n > 0)
                .map(|(k, n)| if *n == 1 { DNAMES[k].to_string() } else { format!("{}^{n}", DNAMES[k]) })
                .collect();
            if ds.is_empty() {
                factor(c.to_string())
            } else {
                scaled(&c.to_string(), &ds.join("*"))
            }
        });
        f.write_str(&join_terms(terms))
    }
}

/// `S ∘ X - X ∘ S` for a vector field with scalar part.
pub fn commute_op(s: &DiffOperator, x: &VectorField) -> DiffOperator {
    let xo = DiffOperator::from_field(x);
    s.compose(&xo).sub(&xo.compose(s))
}

/// How a list of operators is read as a conditional system.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Reading {
    /// `[S_1, X] = lambda S_1 + sum_i mu_i S_{i+1}`.
    Modulo,
    /// Every `[S_j, X]` lies in the function span of all listed operators.
    Simultaneous,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Decomposition {
    pub lambda: Expr,
    pub mu: Vec<Expr>,
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum InvarianceError {
    #[error("no decomposition; residual {0}")]
    NoDecomposition(String),
    #[error("empty operator list")]
    Empty,
}

/// Solves `target = sum_j c_j * ops[j]` for functions `c_j`, exactly.
pub fn decompose(target: &DiffOperator, ops: &[&DiffOperator]) -> Result<Vec<Expr>, DiffOperator> {
    let (coeffs, residual) = eliminate(target, ops);
    if residual.is_zero() {
        Ok(coeffs)
    } else {
        Err(residual)
    }
}

/// Best-effort coefficients and the remaining residual `target - sum_j c_j ops[j]`.
///
/// Elimination runs over the field of rational functions in the coordinates; the
/// residual is recomputed from the candidate, so a zero residual is exact.
pub fn eliminate(target: &DiffOperator, ops: &[&DiffOperator]) -> (Vec<Expr>, DiffOperator) {
    let n = ops.len();
    let mut keys: Vec<MultiIndex> = target.terms.keys().copied().collect();
    for o in ops {
        keys.extend(o.terms.keys().copied());
    }
    keys.sort();
    keys.dedup();
    let mut rows: Vec<Vec<Expr>> = keys
        .iter()
        .map(|k| {
            let mut row: Vec<Expr> = ops.iter().map(|o| o.get(k)).collect();
            row.push(target.get(k));
            row
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..n {
        // Prefer single-term pivots so that division stays exact and cheap.
        let candidates: Vec<usize> = (r..rows.len()).filter(|&i| !rows[i][c].is_zero()).collect();
        let Some(&p) = candidates
            .iter()
            .min_by_key(|&&i| rows[i][c].num_terms())
        else {
            continue;
        };
        rows.swap(r, p);
        let Ok(inv) = rows[r][c].recip() else { continue };
        for v in &mut rows[r][c..=n] {
            *v = v.mul(&inv);
        }
        let prow = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for k in c..=n {
                if !prow[k].is_zero() {
                    row[k] = row[k].sub(&f.mul(&prow[k]));
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    let mut coeffs = vec![Expr::zero(); n];
    for (row, &p) in rows.iter().zip(&pivots) {
        coeffs[p] = row[n].clone();
    }
    let mut residual = target.clone();
    for (c, o) in coeffs.iter().zip(ops) {
        residual = residual.sub(&o.times(c));
    }
    (coeffs, residual)
}

/// The coefficient of `S_1` in `[S_1, X]` and whether the decomposition is exact.
pub fn lambda_candidate(ops: &[DiffOperator], x: &VectorField) -> Option<(Expr, bool)> {
    let first = ops.first()?;
    let refs: Vec<&DiffOperator> = ops.iter().collect();
    let (coeffs, residual) = eliminate(&commute_op(first, x), &refs);
    Some((coeffs[0].clone(), residual.is_zero()))
}

/// Conditional invariance of the operator list under `x`, in the given reading.
///
/// In both readings `lambda` is the coefficient of the first operator in
/// `[S_1, X]`; `mu` holds the coefficients of the remaining operators.
pub fn conditional_invariance_with(
    ops: &[DiffOperator],
    x: &VectorField,
    reading: Reading,
) -> Result<Decomposition, InvarianceError> {
    let first = ops.first().ok_or(InvarianceError::Empty)?;
    let refs: Vec<&DiffOperator> = ops.iter().collect();
    let c1 = commute_op(first, x);
    let coeffs = decompose(&c1, &refs).map_err(|res| InvarianceError::NoDecomposition(res.to_string()))?;
    if reading == Reading::Simultaneous {
        for s in ops.iter().skip(1) {
            let c = commute_op(s, x);
            decompose(&c, &refs).map_err(|res| InvarianceError::NoDecomposition(res.to_string()))?;
        }
    }
    Ok(Decomposition { lambda: coeffs[0].clone(), mu: coeffs[1..].to_vec() })
}

/// [`conditional_invariance_with`] in the [`Reading::Modulo`] reading.
pub fn conditional_invariance(ops: &[DiffOperator], x: &VectorField) -> Result<Decomposition, InvarianceError> {
    conditional_invariance_with(ops, x, Reading::Modulo)
}

/// The free operator `2 M0 X_{-1} - Y_{-1/2}^2` built from generators.
pub fn schroedinger_operator(m0: &VectorField, xm1: &VectorField, ym: &VectorField) -> DiffOperator {
    let m = DiffOperator::from_field(m0);
    let a = DiffOperator::from_field(xm1);
    let y = DiffOperator::from_field(ym);
    m.compose(&a).scale(&RatFunc::int(2)).sub(&y.compose(&y))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::ex;

    fn s_hat() -> DiffOperator {
        DiffOperator::partials(&[Var::Zeta, Var::T])
            .scale(&RatFunc::int(2))
            .sub(&DiffOperator::partial(Var::R, 2))
    }

    #[test]
    fn compose_commutation_rule() {
        let dr = DiffOperator::partial(Var::R, 1);
        let r = DiffOperator::multiplication(ex("r"));
        let expected = DiffOperator::term([0, 1, 0, 0], ex("r")).add(&DiffOperator::identity());
        assert_eq!(dr.compose(&r), expected);
        assert_eq!(
            DiffOperator::partial(Var::Zeta, 1).compose(&DiffOperator::partial(Var::T, 1)),
            DiffOperator::partials(&[Var::Zeta, Var::T])
        );
    }

    #[test]
    fn time_translation_commutes() {
        let x = VectorField::from_parts(&[(Var::T, ex("-1"))], Expr::zero());
        assert!(commute_op(&s_hat(), &x).is_zero());
    }

    #[test]
    fn dilatation_scales_operator() {
        let x0 = VectorField::from_parts(&[(Var::T, ex("-t")), (Var::R, ex("-r/2")), (Var::G, ex("-y*g"))], ex("-x/2"));
        let c = commute_op(&s_hat(), &x0);
        assert_eq!(c, s_hat().scale(&RatFunc::int(-1)));
        let d = conditional_invariance(&[s_hat()], &x0).unwrap();
        assert_eq!(d.lambda, Expr::int(-1));
    }

    #[test]
    fn apply_matches_compose() {
        let a = DiffOperator::term([1, 0, 0, 0], ex("t*r"));
        let b = s_hat();
        let f = ex("t^3*r^2*zeta + g*r");
        assert_eq!(a.compose(&b).apply(&f), a.apply(&b.apply(&f)));
    }

    #[test]
    fn decomposition_failure_reports_residual() {
        let target = DiffOperator::partial(Var::Zeta, 1);
        let err = decompose(&target, &[&s_hat()]).unwrap_err();
        assert_eq!(err, target);
    }
}
