//! Sparse multivariate polynomials over the rationals in named parameters.
//!
//! The parameter named [`IMAG_UNIT`] is treated algebraically: products
//! reduce `i^2` to `-1`, so every polynomial is at most linear in it.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

pub const IMAG_UNIT: &str = "i";

pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// A power product `p1^e1 * p2^e2 * ...`, sorted by parameter name.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct PowerProduct(Vec<(String, u32)>);

impl PowerProduct {
    pub fn one() -> Self {
        PowerProduct(Vec::new())
    }

    pub fn var(name: &str) -> Self {
        PowerProduct(vec![(name.to_string(), 1)])
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn factors(&self) -> &[(String, u32)] {
        &self.0
    }

    pub fn degree_in(&self, name: &str) -> u32 {
        self.0
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, e)| *e)
            .unwrap_or(0)
    }

    fn from_map(map: BTreeMap<String, u32>) -> Self {
        PowerProduct(map.into_iter().filter(|(_, e)| *e > 0).collect())
    }

    fn to_map(&self) -> BTreeMap<String, u32> {
        self.0.iter().cloned().collect()
    }

    pub fn mul(&self, other: &PowerProduct) -> PowerProduct {
        let mut map = self.to_map();
        for (n, e) in &other.0 {
            *map.entry(n.clone()).or_insert(0) += e;
        }
        PowerProduct::from_map(map)
    }

    /// `self / other` when every exponent of `other` is dominated.
    pub fn div(&self, other: &PowerProduct) -> Option<PowerProduct> {
        let mut map = self.to_map();
        for (n, e) in &other.0 {
            let slot = map.get_mut(n)?;
            if *slot < *e {
                return None;
            }
            *slot -= e;
        }
        Some(PowerProduct::from_map(map))
    }

    fn without(&self, name: &str) -> PowerProduct {
        PowerProduct(self.0.iter().filter(|(n, _)| n != name).cloned().collect())
    }
}

/// Lexicographic monomial order; the alphabetically smallest parameter is most significant.
impl Ord for PowerProduct {
    fn cmp(&self, other: &Self) -> Ordering {
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.0, &other.0);
        loop {
            match (a.get(i), b.get(j)) {
                (None, None) => return Ordering::Equal,
                (Some(_), None) => return Ordering::Greater,
                (None, Some(_)) => return Ordering::Less,
                (Some((na, ea)), Some((nb, eb))) => match na.cmp(nb) {
                    Ordering::Equal => {
                        if ea != eb {
                            return ea.cmp(eb);
                        }
                        i += 1;
                        j += 1;
                    }
                    // `na` is absent from `b`, so `a` has the larger exponent there.
                    Ordering::Less => return Ordering::Greater,
                    Ordering::Greater => return Ordering::Less,
                },
            }
        }
    }
}

impl PartialOrd for PowerProduct {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct Poly {
    terms: BTreeMap<PowerProduct, Rational>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn one() -> Self {
        Poly::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(PowerProduct::one(), c);
        }
        Poly { terms }
    }

    pub fn int(n: i64) -> Self {
        Poly::constant(Rational::from_integer(BigInt::from(n)))
    }

    pub fn var(name: &str) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(PowerProduct::var(name), Rational::one());
        Poly { terms }
    }

    pub fn from_terms(iter: impl IntoIterator<Item = (PowerProduct, Rational)>) -> Self {
        let mut p = Poly::zero();
        for (m, c) in iter {
            p.add_term(m, c);
        }
        p
    }

    pub fn terms(&self) -> impl Iterator<Item = (&PowerProduct, &Rational)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.as_constant().map(|c| c.is_one()).unwrap_or(false)
    }

    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn vars(&self) -> BTreeSet<String> {
        self.terms
            .keys()
            .flat_map(|m| m.0.iter().map(|(n, _)| n.clone()))
            .collect()
    }

    pub fn contains_var(&self, name: &str) -> bool {
        self.terms.keys().any(|m| m.degree_in(name) > 0)
    }

    pub fn degree_in(&self, name: &str) -> u32 {
        self.terms.keys().map(|m| m.degree_in(name)).max().unwrap_or(0)
    }

    pub fn leading(&self) -> Option<(&PowerProduct, &Rational)> {
        self.terms.iter().next_back()
    }

    fn add_term(&mut self, m: PowerProduct, c: Rational) {
        if c.is_zero() {
            return;
        }
        let (m, c) = reduce_imag(m, c);
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                let s = o.get() + &c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }

    pub fn scale(&self, c: &Rational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect(),
        }
    }

    pub fn pow(&self, n: u32) -> Poly {
        let mut out = Poly::one();
        for _ in 0..n {
            out = out.mul(self);
        }
        out
    }

    /// Replaces `i` by `-i`.
    pub fn conj_imag(&self) -> Poly {
        self.flip_sign_of(IMAG_UNIT)
    }

    /// Substitutes `name -> -name`.
    pub fn flip_sign_of(&self, name: &str) -> Poly {
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| {
                    if m.degree_in(name) % 2 == 1 {
                        (m.clone(), -c)
                    } else {
                        (m.clone(), c.clone())
                    }
                })
                .collect(),
        }
    }

    /// Splits `p = re + i * im`.
    pub fn split_imag(&self) -> (Poly, Poly) {
        let mut re = Poly::zero();
        let mut im = Poly::zero();
        for (m, c) in &self.terms {
            if m.degree_in(IMAG_UNIT) == 0 {
                re.add_term(m.clone(), c.clone());
            } else {
                im.add_term(m.without(IMAG_UNIT), c.clone());
            }
        }
        (re, im)
    }

    /// Exact division; `None` when `divisor` does not divide `self`.
    pub fn div_exact(&self, divisor: &Poly) -> Option<Poly> {
        let (lm, lc) = divisor.leading()?;
        if let Some(c) = divisor.as_constant() {
            return Some(self.scale(&c.recip()));
        }
        let mut rem = self.clone();
        let mut quot = Poly::zero();
        while let Some((rm, rc)) = rem.leading() {
            let qm = rm.div(lm)?;
            let qc = rc / lc;
            let t = Poly::from_terms([(qm, qc)]);
            rem = rem.sub(&t.mul(divisor));
            quot = quot.add(&t);
        }
        Some(quot)
    }

    /// Divides by the leading coefficient.
    pub fn monic(&self) -> Poly {
        match self.leading() {
            Some((_, c)) => self.scale(&c.recip()),
            None => Poly::zero(),
        }
    }

    fn univariate(&self, v: &str) -> Vec<Poly> {
        let deg = self.degree_in(v) as usize;
        let mut out = vec![Poly::zero(); deg + 1];
        for (m, c) in &self.terms {
            let d = m.degree_in(v) as usize;
            out[d].add_term(m.without(v), c.clone());
        }
        out
    }

    fn from_univariate(coeffs: &[Poly], v: &str) -> Poly {
        let mut out = Poly::zero();
        for (d, c) in coeffs.iter().enumerate() {
            let vp = Poly::from_terms([(
                PowerProduct::from_map([(v.to_string(), d as u32)].into_iter().collect()),
                Rational::one(),
            )]);
            out = out.add(&c.mul(&vp));
        }
        out
    }

    /// Substitutes parameters by polynomials.
    pub fn compose(&self, bindings: &BTreeMap<String, Poly>) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let mut term = Poly::constant(c.clone());
            for (n, e) in &m.0 {
                let base = bindings.get(n).cloned().unwrap_or_else(|| Poly::var(n));
                term = term.mul(&base.pow(*e));
            }
            out = out.add(&term);
        }
        out
    }
}

fn reduce_imag(m: PowerProduct, c: Rational) -> (PowerProduct, Rational) {
    let e = m.degree_in(IMAG_UNIT);
    if e < 2 {
        return (m, c);
    }
    let sign_flip = (e / 2) % 2 == 1;
    let mut map = m.to_map();
    map.insert(IMAG_UNIT.to_string(), e % 2);
    let c = if sign_flip { -c } else { c };
    (PowerProduct::from_map(map), c)
}

fn univariate_content(coeffs: &[Poly]) -> Poly {
    let mut g = Poly::zero();
    for c in coeffs {
        g = gcd(&g, c);
        if g.is_one() {
            break;
        }
    }
    g
}

fn trim(mut coeffs: Vec<Poly>) -> Vec<Poly> {
    while coeffs.len() > 1 && coeffs.last().map(Poly::is_zero).unwrap_or(false) {
        coeffs.pop();
    }
    coeffs
}

/// Pseudo-remainder of univariate polynomials with polynomial coefficients.
fn pseudo_rem(a: &[Poly], b: &[Poly]) -> Vec<Poly> {
    let db = b.len() - 1;
    let lb = &b[db];
    let mut r = trim(a.to_vec());
    while r.len() > db && !(r.len() == 1 && r[0].is_zero()) {
        let dr = r.len() - 1;
        let lr = r[dr].clone();
        let shift = dr - db;
        let mut next: Vec<Poly> = r.iter().map(|c| c.mul(lb)).collect();
        for (k, bk) in b.iter().enumerate() {
            next[k + shift] = next[k + shift].sub(&lr.mul(bk));
        }
        next.pop();
        if next.is_empty() {
            next.push(Poly::zero());
        }
        r = trim(next);
    }
    r
}

/// Greatest common divisor over the rationals, normalized to be monic.
///
/// Both arguments must be free of the imaginary unit.
pub fn gcd(a: &Poly, b: &Poly) -> Poly {
    if a.is_zero() {
        return b.monic();
    }
    if b.is_zero() {
        return a.monic();
    }
    if a.as_constant().is_some() || b.as_constant().is_some() {
        return Poly::one();
    }
    let mut vars = a.vars();
    vars.extend(b.vars());
    let v = vars.into_iter().next().expect("non-constant polynomial has a variable");
    let ua = a.univariate(&v);
    let ub = b.univariate(&v);
    let ca = univariate_content(&ua);
    let cb = univariate_content(&ub);
    let c = gcd(&ca, &cb);
    let pa: Vec<Poly> = ua.iter().map(|p| p.div_exact(&ca).expect("content divides")).collect();
    let pb: Vec<Poly> = ub.iter().map(|p| p.div_exact(&cb).expect("content divides")).collect();
    let (mut p, mut q) = if pa.len() >= pb.len() { (pa, pb) } else { (pb, pa) };
    if q.len() == 1 {
        // `q` is primitive of degree zero, hence a unit.
        return c.monic();
    }
    loop {
        let r = pseudo_rem(&p, &q);
        if r.len() == 1 && r[0].is_zero() {
            break;
        }
        if r.len() == 1 {
            return c.monic();
        }
        let cr = univariate_content(&r);
        let r: Vec<Poly> = r.iter().map(|x| x.div_exact(&cr).expect("content divides")).collect();
        p = q;
        q = r;
    }
    c.mul(&Poly::from_univariate(&q, &v)).monic()
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let terms = self.terms.iter().rev().map(|(m, c)| {
            let c = if c.is_integer() { c.numer().to_string() } else { format!("{}/{}", c.numer(), c.denom()) };
            if m.is_one() {
                return c;
            }
            let factors: Vec<String> =
                m.0.iter().map(|(n, e)| if *e == 1 { n.clone() } else { format!("{n}^{e}") }).collect();
            super::print::scaled(&c, &factors.join("*"))
        });
        f.write_str(&super::print::join_terms(terms))
    }
}
