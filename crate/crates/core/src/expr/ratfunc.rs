//! Rational functions in the parameters, used both as coefficients and as exponents.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{Signed, ToPrimitive, Zero};

use super::poly::{gcd, Poly, Rational, IMAG_UNIT};

/// Normalized quotient `num / den`.
///
/// The denominator is free of the imaginary unit and has leading coefficient one;
/// numerator and denominator share no common factor.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct RatFunc {
    num: Poly,
    den: Poly,
}

/// Exponents are rational functions of the parameters.
pub type ExpExpr = RatFunc;

impl Default for RatFunc {
    fn default() -> Self {
        RatFunc::zero()
    }
}

impl RatFunc {
    pub fn zero() -> Self {
        RatFunc { num: Poly::zero(), den: Poly::one() }
    }

    pub fn one() -> Self {
        RatFunc::from_poly(Poly::one())
    }

    pub fn int(n: i64) -> Self {
        RatFunc::from_poly(Poly::int(n))
    }

    pub fn ratio(n: i64, d: i64) -> Self {
        RatFunc::constant(Rational::new(BigInt::from(n), BigInt::from(d)))
    }

    pub fn constant(c: Rational) -> Self {
        RatFunc::from_poly(Poly::constant(c))
    }

    pub fn param(name: &str) -> Self {
        RatFunc::from_poly(Poly::var(name))
    }

    pub fn imag_unit() -> Self {
        RatFunc::param(IMAG_UNIT)
    }

    pub fn from_poly(p: Poly) -> Self {
        RatFunc { num: p, den: Poly::one() }
    }

    /// Builds `num / den`; `None` when `den` vanishes identically.
    pub fn new(num: Poly, den: Poly) -> Option<Self> {
        if den.is_zero() {
            return None;
        }
        Some(Self::normalize(num, den))
    }

    fn normalize(mut num: Poly, mut den: Poly) -> Self {
        if num.is_zero() {
            return RatFunc::zero();
        }
        if den.contains_var(IMAG_UNIT) {
            let conj = den.conj_imag();
            num = num.mul(&conj);
            den = den.mul(&conj);
        }
        if let Some(c) = den.as_constant() {
            return RatFunc { num: num.scale(&c.recip()), den: Poly::one() };
        }
        let (re, im) = num.split_imag();
        let g = gcd(&gcd(&re, &im), &den);
        if !g.is_one() {
            num = num.div_exact(&g).expect("gcd divides numerator");
            den = den.div_exact(&g).expect("gcd divides denominator");
        }
        let lc = den.leading().map(|(_, c)| c.clone()).expect("nonzero denominator");
        let inv = lc.recip();
        RatFunc { num: num.scale(&inv), den: den.scale(&inv) }
    }

    pub fn numer(&self) -> &Poly {
        &self.num
    }

    pub fn denom(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.den.is_one() && self.num.is_one()
    }

    pub fn as_constant(&self) -> Option<Rational> {
        if self.den.is_one() {
            self.num.as_constant()
        } else {
            None
        }
    }

    pub fn as_integer(&self) -> Option<BigInt> {
        self.as_constant().filter(|c| c.is_integer()).map(|c| c.to_integer())
    }

    pub fn as_i64(&self) -> Option<i64> {
        self.as_integer().and_then(|n| n.to_i64())
    }

    pub fn is_negative_constant(&self) -> bool {
        self.as_constant().map(|c| c.is_negative()).unwrap_or(false)
    }

    pub fn contains_param(&self, name: &str) -> bool {
        self.num.contains_var(name) || self.den.contains_var(name)
    }

    pub fn params(&self) -> std::collections::BTreeSet<String> {
        let mut s = self.num.vars();
        s.extend(self.den.vars());
        s
    }

    pub fn add(&self, other: &RatFunc) -> RatFunc {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        if self.den == other.den {
            if self.den.is_one() {
                return RatFunc::from_poly(self.num.add(&other.num));
            }
            return Self::normalize(self.num.add(&other.num), self.den.clone());
        }
        Self::normalize(
            self.num.mul(&other.den).add(&other.num.mul(&self.den)),
            self.den.mul(&other.den),
        )
    }

    pub fn neg(&self) -> RatFunc {
        RatFunc { num: self.num.neg(), den: self.den.clone() }
    }

    pub fn sub(&self, other: &RatFunc) -> RatFunc {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &RatFunc) -> RatFunc {
        if self.is_zero() || other.is_zero() {
            return RatFunc::zero();
        }
        if self.den.is_one() && other.den.is_one() {
            let p = self.num.mul(&other.num);
            return RatFunc::from_poly(p);
        }
        Self::normalize(self.num.mul(&other.num), self.den.mul(&other.den))
    }

    pub fn scale(&self, c: &Rational) -> RatFunc {
        if c.is_zero() {
            return RatFunc::zero();
        }
        RatFunc { num: self.num.scale(c), den: self.den.clone() }
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn recip(&self) -> Option<RatFunc> {
        RatFunc::new(self.den.clone(), self.num.clone())
    }

    pub fn div(&self, other: &RatFunc) -> Option<RatFunc> {
        Some(self.mul(&other.recip()?))
    }

    pub fn powi(&self, n: i64) -> Option<RatFunc> {
        let base = if n < 0 { self.recip()? } else { self.clone() };
        let k = n.unsigned_abs() as u32;
        Some(RatFunc::normalize(base.num.pow(k), base.den.pow(k)))
    }

    /// Flips the sign of the imaginary unit and of the listed parameters.
    pub fn conj(&self, flipped: &[String]) -> RatFunc {
        let mut num = self.num.conj_imag();
        let mut den = self.den.clone();
        for p in flipped {
            num = num.flip_sign_of(p);
            den = den.flip_sign_of(p);
        }
        RatFunc::normalize(num, den)
    }

    /// Simultaneous substitution of parameters; `None` on a zero denominator.
    pub fn substitute(&self, bindings: &BTreeMap<String, RatFunc>) -> Option<RatFunc> {
        if bindings.is_empty() || !self.params().iter().any(|p| bindings.contains_key(p)) {
            return Some(self.clone());
        }
        let n = eval_poly_in(&self.num, bindings);
        let d = eval_poly_in(&self.den, bindings);
        n.div(&d)
    }

    pub fn eval(&self, params: &dyn Fn(&str) -> Option<Complex64>) -> Option<Complex64> {
        let d = eval_poly(&self.den, params)?;
        let n = eval_poly(&self.num, params)?;
        if d == Complex64::new(0.0, 0.0) {
            return None;
        }
        Some(n / d)
    }
}

fn eval_poly_in(p: &Poly, bindings: &BTreeMap<String, RatFunc>) -> RatFunc {
    let mut out = RatFunc::zero();
    for (m, c) in p.terms() {
        let mut term = RatFunc::constant(c.clone());
        for (name, e) in m.factors() {
            let base = bindings.get(name).cloned().unwrap_or_else(|| RatFunc::param(name));
            let pw = base.powi(*e as i64).expect("nonnegative power");
            term = term.mul(&pw);
        }
        out = out.add(&term);
    }
    out
}

pub(crate) fn rational_to_f64(c: &Rational) -> f64 {
    let n = c.numer().to_f64().unwrap_or(f64::NAN);
    let d = c.denom().to_f64().unwrap_or(f64::NAN);
    if n.is_finite() && d.is_finite() {
        n / d
    } else {
        // Very large numerator or denominator; fall back to a scaled division.
        let shift = c.numer().bits().max(c.denom().bits()) as i64 - 900;
        let shift = shift.max(0) as usize;
        let n = (c.numer() >> shift).to_f64().unwrap_or(0.0);
        let d = (c.denom() >> shift).to_f64().unwrap_or(1.0);
        n / d
    }
}

fn eval_poly(p: &Poly, params: &dyn Fn(&str) -> Option<Complex64>) -> Option<Complex64> {
    let mut acc = Complex64::new(0.0, 0.0);
    for (m, c) in p.terms() {
        let mut term = Complex64::new(rational_to_f64(c), 0.0);
        for (name, e) in m.factors() {
            let v = if name == IMAG_UNIT { Complex64::new(0.0, 1.0) } else { params(name)? };
            term *= v.powi(*e as i32);
        }
        acc += term;
    }
    Some(acc)
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            return write!(f, "{}", self.num);
        }
        let wrap = |s: String| if s.contains(' ') || s.contains('*') || s.contains('/') { format!("({s})") } else { s };
        write!(f, "{}/{}", wrap(self.num.to_string()), wrap(self.den.to_string()))
    }
}

impl From<i64> for RatFunc {
    fn from(n: i64) -> Self {
        RatFunc::int(n)
    }
}

impl From<Rational> for RatFunc {
    fn from(c: Rational) -> Self {
        RatFunc::constant(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn y() -> RatFunc {
        RatFunc::param("y")
    }

    #[test]
    fn normalization_cancels_common_factor() {
        // (y^2 - 1) / (2y - 2) = (y + 1)/2
        let num = y().mul(&y()).sub(&RatFunc::one());
        let den = y().scale(&Rational::from_integer(2.into())).sub(&RatFunc::int(2));
        let q = num.div(&den).unwrap();
        assert_eq!(q, y().add(&RatFunc::one()).scale(&Rational::new(1.into(), 2.into())));
        assert!(q.denom().is_one());
    }

    #[test]
    fn exponent_arithmetic() {
        // 1 + 1/y - 1 = 1/y
        let e = RatFunc::one().add(&y().recip().unwrap()).sub(&RatFunc::one());
        assert_eq!(e, y().recip().unwrap());
        assert_eq!(e.mul(&y()), RatFunc::one());
    }

    #[test]
    fn imaginary_denominator_is_rationalized() {
        let i = RatFunc::imag_unit();
        let m = RatFunc::param("m");
        let inv = i.mul(&m).recip().unwrap();
        // 1/(i m) = -i/m
        assert_eq!(inv, i.neg().div(&m).unwrap());
        assert!(!inv.denom().contains_var(IMAG_UNIT));
    }

    #[test]
    fn normalization_is_idempotent() {
        let a = y().add(&RatFunc::int(3)).div(&y().mul(&y()).sub(&RatFunc::int(9))).unwrap();
        let b = RatFunc::new(a.numer().clone(), a.denom().clone()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn zero_denominator_rejected() {
        assert!(RatFunc::new(Poly::one(), Poly::zero()).is_none());
        let mut b = BTreeMap::new();
        b.insert("y".to_string(), RatFunc::zero());
        assert!(y().recip().unwrap().substitute(&b).is_none());
    }
}
