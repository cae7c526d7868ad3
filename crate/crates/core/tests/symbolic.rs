//! Algebraic laws of the expression engine and vector fields, and sampled
//! floating-point re-checks of the exact invariance computations.

use std::collections::BTreeMap;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use condsym::catalog::{build_variable_mass, invariant_operator, Branch};
use condsym::expr::{ex, parse, Context, EvalEnv, Expr, RatFunc, Var};
use condsym::invariance::{conditional_invariance, DiffOperator};
use condsym::liealg::{bracket, VectorField};
use condsym::numerics::{fd_first, C64};
use condsym::potentials::{derive_invariants, jacobian_rank, prolong, row_setting, table_rows, RowForm};

/// Sums of `c t^a r^b zeta^e g^d s^k` with small exponents; `zeta` may appear inverted.
fn poly() -> impl Strategy<Value = Expr> {
    poly_with(1..5)
}

fn poly_with(terms: std::ops::Range<usize>) -> impl Strategy<Value = Expr> {
    prop::collection::vec((-5i64..=5, 0i64..3, 0i64..3, -1i64..3, 0i64..3, 0i64..2), terms).prop_map(|terms| {
        terms.into_iter().fold(Expr::zero(), |acc, (c, a, b, e, d, k)| {
            let m = [(Var::T, a), (Var::R, b), (Var::Zeta, e), (Var::G, d)]
                .iter()
                .fold(Expr::int(c), |m, (v, p)| m.mul(&Expr::var_pow(*v, RatFunc::int(*p))));
            acc.add(&m.mul(&Expr::param("s").powi(k).unwrap()))
        })
    })
}

fn field() -> impl Strategy<Value = VectorField> {
    field_with(1..5)
}

fn field_with(terms: std::ops::Range<usize>) -> impl Strategy<Value = VectorField> {
    let p = || poly_with(terms.clone());
    (p(), p(), p(), p(), p()).prop_map(|(a, b, c, d, s)| {
        VectorField::from_parts(&[(Var::T, a), (Var::R, b), (Var::Zeta, c), (Var::G, d)], s)
    })
}

fn point(t: f64, r: f64, z: f64, g: f64, s: f64) -> EvalEnv<'static> {
    EvalEnv::new().var(Var::T, t).var(Var::R, r).var(Var::Zeta, z).var(Var::G, g).param("s", s)
}

fn sample_env() -> impl Strategy<Value = (f64, f64, f64, f64, f64)> {
    (0.3f64..2.0, -1.5f64..1.5, 0.4f64..2.0, 0.3f64..2.0, -1.0f64..1.0)
}

fn close(a: C64, b: C64, tol: f64) -> bool {
    (a - b).norm() <= tol * (1.0 + a.norm().max(b.norm()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn evaluation_is_a_ring_homomorphism(a in poly(), b in poly(), p in sample_env()) {
        let env = point(p.0, p.1, p.2, p.3, p.4);
        let (ea, eb) = (a.eval(&env).unwrap(), b.eval(&env).unwrap());
        prop_assert!(close(a.add(&b).eval(&env).unwrap(), ea + eb, 1e-12));
        prop_assert!(close(a.sub(&b).eval(&env).unwrap(), ea - eb, 1e-12));
        prop_assert!(close(a.mul(&b).eval(&env).unwrap(), ea * eb, 1e-12));
        prop_assert!(close(a.powi(3).unwrap().eval(&env).unwrap(), ea * ea * ea, 1e-11));
    }

    #[test]
    fn ring_axioms_hold_exactly(a in poly(), b in poly(), c in poly()) {
        prop_assert_eq!(a.add(&b), b.add(&a));
        prop_assert_eq!(a.mul(&b), b.mul(&a));
        prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        prop_assert!(a.sub(&a).is_zero());
    }

    #[test]
    fn derivatives_obey_leibniz(a in poly(), b in poly()) {
        for v in [Var::T, Var::R, Var::Zeta, Var::G] {
            let lhs = a.mul(&b).diff(v);
            let rhs = a.diff(v).mul(&b).add(&a.mul(&b.diff(v)));
            prop_assert!(lhs.equivalent(&rhs), "{} vs {}", lhs, rhs);
        }
    }

    #[test]
    fn derivatives_match_finite_differences(a in poly(), p in sample_env()) {
        let base = [p.0, p.1, p.2, p.3];
        let at = |k: usize, h: f64| {
            let mut c = base;
            c[k] += h;
            point(c[0], c[1], c[2], c[3], p.4)
        };
        for (k, v) in [Var::T, Var::R, Var::Zeta, Var::G].into_iter().enumerate() {
            let exact = a.diff(v).eval(&at(k, 0.0)).unwrap();
            let numeric = fd_first(|h| a.eval(&at(k, h)).unwrap(), 1e-2);
            prop_assert!(close(exact, numeric, 1e-6), "{:?}: {} vs {}", v, exact, numeric);
        }
    }

    #[test]
    fn printing_round_trips(a in poly(), b in poly()) {
        let ctx = Context::standard();
        prop_assert_eq!(parse(&a.to_string(), &ctx).unwrap(), a.clone());
        let q = a.div(&Expr::var(Var::Zeta).add(&Expr::int(2))).unwrap().add(&b);
        prop_assert_eq!(parse(&q.to_string(), &ctx).unwrap(), q);
    }

    #[test]
    fn vector_field_text_round_trips(x in field()) {
        prop_assert_eq!(VectorField::from_text(&x.to_text(), &Context::standard()).unwrap(), x);
    }

    #[test]
    fn bracket_is_antisymmetric(x in field(), y in field()) {
        prop_assert!(bracket(&x, &y).add(&bracket(&y, &x)).is_zero());
    }

    #[test]
    fn bracket_is_the_operator_commutator(x in field(), y in field()) {
        let (ox, oy) = (DiffOperator::from_field(&x), DiffOperator::from_field(&y));
        let commutator = ox.compose(&oy).sub(&oy.compose(&ox));
        prop_assert_eq!(DiffOperator::from_field(&bracket(&x, &y)), commutator);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn bracket_satisfies_jacobi(x in field_with(1..3), y in field_with(1..3), z in field_with(1..3)) {
        let jacobi = bracket(&x, &bracket(&y, &z))
            .add(&bracket(&y, &bracket(&z, &x)))
            .add(&bracket(&z, &bracket(&x, &y)));
        prop_assert!(jacobi.is_zero());
    }
}

/// `X f` including the scalar part.
fn act(x: &VectorField, f: &Expr) -> Expr {
    x.apply(f).add(&x.scalar.mul(f))
}

fn random_env(rng: &mut ChaCha8Rng, params: impl IntoIterator<Item = String>) -> EvalEnv<'static> {
    let mut env = EvalEnv::new();
    for v in [Var::T, Var::R, Var::Zeta, Var::G] {
        env = env.var(v, rng.gen_range(0.4..1.6));
    }
    for p in params {
        env = env.param(&p, rng.gen_range(0.3..1.3));
    }
    env
}

/// `[S, X] f - lambda S f - sum mu_i A_i f` evaluated in floating point on a
/// concrete test function, with every operator applied directly rather than
/// composed.
#[test]
fn decompositions_hold_at_sampled_points() {
    let f = ex("t^2*r^3*zeta*g^2 + r*zeta^3*g - t*g^3*zeta^(-1) + r^4*t");
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut checked = 0;
    for case in 1..=8u8 {
        let mut b = BTreeMap::new();
        b.insert("p01".to_string(), RatFunc::zero());
        let rep = build_variable_mass(case, Branch::Half).unwrap().bind(&b).unwrap();
        let ops: Vec<DiffOperator> =
            invariant_operator(case, Branch::Half).unwrap().iter().map(|o| o.bind(&b).unwrap()).collect();
        for (g, x) in &rep.generators {
            let Ok(dec) = conditional_invariance(&ops, x) else { continue };
            let s = &ops[0];
            let mut residual = s.apply(&act(x, &f)).sub(&act(x, &s.apply(&f))).sub(&dec.lambda.mul(&s.apply(&f)));
            for (mu, a) in dec.mu.iter().zip(&ops[1..]) {
                residual = residual.sub(&mu.mul(&a.apply(&f)));
            }
            let scale = s.apply(&act(x, &f));
            let params = residual.params().into_iter().chain(scale.params()).filter(|p| p != "i");
            let params: Vec<String> = params.collect();
            for _ in 0..5 {
                let env = random_env(&mut rng, params.clone());
                let r = residual.eval(&env).unwrap();
                let size = scale.eval(&env).unwrap().norm();
                assert!(r.norm() <= 1e-9 * (1.0 + size), "case {case}, {g}: {r} (scale {size})");
            }
            checked += 1;
        }
    }
    assert!(checked >= 36, "{checked}");
}

/// Monomial invariants are annihilated by every prolonged generator, checked by
/// finite differences, and are functionally independent.
#[test]
fn derived_invariants_are_invariant_and_independent() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut seen = 0;
    for row in table_rows().into_iter().filter(|r| matches!(r.form, RowForm::Undefined(_))) {
        let (rep, _) = row_setting(&row).unwrap();
        let invs: Vec<Expr> = derive_invariants(&rep).unwrap().iter().map(|m| m.expr()).collect();
        assert!(!invs.is_empty());
        let mut params: Vec<String> = rep.generators.iter().flat_map(|(_, x)| x.scalar.params()).collect();
        for (_, x) in &rep.generators {
            for c in &x.coeffs {
                params.extend(c.params());
            }
        }
        for inv in &invs {
            params.extend(inv.params());
        }
        params.retain(|p| p != "i");
        params.sort();
        params.dedup();
        for _ in 0..3 {
            let mut env = random_env(&mut rng, params.clone());
            let psi = C64::new(rng.gen_range(0.5..1.2), rng.gen_range(0.1..0.6));
            env.vars.insert(Var::Psi, psi);
            env.vars.insert(Var::PsiStar, psi.conj());
            for (g, x) in &rep.generators {
                let p = prolong(x);
                for inv in &invs {
                    let mut acc = C64::new(0.0, 0.0);
                    let mut size = 0.0f64;
                    let coords = [Var::T, Var::R, Var::Zeta, Var::G];
                    let mut coeff: Vec<(Var, C64)> = coords
                        .iter()
                        .enumerate()
                        .map(|(k, v)| (*v, -p.base.coeffs[k].eval(&env).unwrap()))
                        .collect();
                    coeff.push((Var::Psi, p.psi.eval(&env).unwrap() * psi));
                    coeff.push((Var::PsiStar, p.psi_star.eval(&env).unwrap() * psi.conj()));
                    for (v, c) in coeff {
                        let d = fd_first(
                            |h| {
                                let mut e = env.clone();
                                let base = env.vars[&v];
                                e.vars.insert(v, base + h);
                                inv.eval(&e).unwrap()
                            },
                            1e-3,
                        );
                        acc += c * d;
                        size = size.max((c * d).norm());
                    }
                    assert!(acc.norm() <= 1e-7 * (1.0 + size), "row {}, {g}: {inv} -> {acc}", row.id);
                }
            }
            assert_eq!(jacobian_rank(&invs, &env).unwrap(), invs.len(), "row {}", row.id);
        }
        seen += 1;
    }
    assert!(seen >= 1);
}
