//! Numerical oracles: flows against their generators, solver convergence
//! orders, the first-order perturbative solution, and agreement between the
//! symbolic and the numerical invariance verdicts.

use condsym::catalog::{build_fixed_mass, fixed_mass_operator};
use condsym::expr::{Expr, RatFunc};
use condsym::liealg::Gen;
use condsym::numerics::checks::{semilinear_refinement, NumericConfig};
use condsym::numerics::flow::generator_action;
use condsym::numerics::{
    diffusion_mass, l2_norm, solve_linear, solve_semilinear, unitary_mass, Boundary, Field, FlowKind, FlowSpec,
    GaussianSolution, Grid1D, LinearScheme, Nonlinearity, SpectralSolution, Transformed, C64,
};
use condsym::potentials::{verify_potential, PotentialForm};

fn max_diff(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// A non-stationary, non-symmetric test field.
fn probe(t: f64, r: f64) -> C64 {
    let s = C64::new(1.0 + 0.3 * t, 0.2 * t);
    (-(r - 0.4) * (r - 0.4) / (2.0 * s)).exp() * C64::new(1.0, 0.5 * r) / s.sqrt()
}

#[test]
fn flow_derivatives_match_generators() {
    let rep = build_fixed_mass(&RatFunc::param("x"), &RatFunc::param("M"));
    let x = 0.7;
    for mass in [unitary_mass(1.3), diffusion_mass(0.8)] {
        for kind in FlowKind::ALL {
            let gen = rep.get(kind.generator()).unwrap();
            let l = 1e-4;
            let plus = FlowSpec::new(kind, l, x, mass);
            let minus = FlowSpec::new(kind, -l, x, mass);
            for (t, r) in [(0.6, 0.3), (1.1, -0.8)] {
                let fp = Transformed { flow: &plus, base: &probe }.eval(t, r);
                let fm = Transformed { flow: &minus, base: &probe }.eval(t, r);
                let derivative = (fp - fm) / (2.0 * l);
                let action = generator_action(gen, &probe, t, r, mass, x, 1e-3).unwrap();
                let err = (derivative - action).norm() / action.norm().max(1.0);
                assert!(err < 1e-6, "{kind:?} at ({t}, {r}): {derivative} vs {action}");
            }
        }
    }
}

#[test]
fn flows_compose_additively() {
    let mass = unitary_mass(0.9);
    for kind in [FlowKind::Boost, FlowKind::Dilatation, FlowKind::Special, FlowKind::Phase] {
        let (a, b) = (0.3, -0.45);
        let fa = FlowSpec::new(kind, a, 0.5, mass);
        let fb = FlowSpec::new(kind, b, 0.5, mass);
        let fab = FlowSpec::new(kind, a + b, 0.5, mass);
        let inner = Transformed { flow: &fb, base: &probe };
        let twice = Transformed { flow: &fa, base: &inner };
        let once = Transformed { flow: &fab, base: &probe };
        for (t, r) in [(0.2, 0.1), (0.9, -1.3), (1.4, 2.0)] {
            let (u, v) = (twice.eval(t, r), once.eval(t, r));
            assert!((u - v).norm() < 1e-13 * v.norm().max(1.0), "{kind:?} at ({t}, {r}): {u} vs {v}");
        }
    }
}

#[test]
fn flows_map_solutions_to_solutions() {
    let mass = unitary_mass(1.0);
    let g = GaussianSolution { mass, s0: 1.0 };
    let eq = condsym::numerics::Equation::linear(mass);
    let win = condsym::numerics::Window::uniform((0.3, 1.0, 3), (-2.0, 2.0, 9), 1e-2, 1e-2);
    for kind in FlowKind::ALL {
        let f = FlowSpec::new(kind, 0.35, 0.5, mass);
        let res = condsym::numerics::covariance_residual(&eq, &f, &g, &win).unwrap();
        assert!(res < 1e-9, "{kind:?}: {res}");
    }
}

fn gaussian_init(grid: &Grid1D) -> Vec<C64> {
    grid.sample(|r| C64::new((-r * r / 2.0).exp(), 0.0))
}

#[test]
fn crank_nicolson_is_second_order_in_time() {
    let mass = unitary_mass(1.0);
    let t_end = 0.5;
    let run = |dt: f64| {
        let grid = Grid1D::new(256, 0.125, Boundary::Decaying, dt, (t_end / dt).round() as usize).unwrap();
        solve_linear(&gaussian_init(&grid), 0.0, &grid, mass, LinearScheme::CrankNicolson).unwrap().last().to_vec()
    };
    let reference = run(t_end / 2560.0);
    let errs: Vec<f64> = [0.05, 0.025, 0.0125].iter().map(|&dt| max_diff(&run(dt), &reference)).collect();
    for w in errs.windows(2) {
        let order = (w[0] / w[1]).log2();
        assert!((1.8..=2.2).contains(&order), "{errs:?}");
    }
}

#[test]
fn explicit_scheme_is_second_order_in_space() {
    let mass = diffusion_mass(1.0);
    let length = 24.0;
    let t_end = 0.25;
    let exact = GaussianSolution { mass, s0: 1.0 };
    let errs: Vec<f64> = [64usize, 128, 256]
        .iter()
        .map(|&n| {
            let h = length / n as f64;
            let dt = 0.25 * h * h;
            let nt = (t_end / dt).round() as usize;
            let grid = Grid1D::new(n, h, Boundary::Periodic, t_end / nt as f64, nt).unwrap();
            assert!(grid.explicit_stable(1.0));
            let tr = solve_linear(&grid.sample(|r| exact.eval(0.0, r)), 0.0, &grid, mass, LinearScheme::Explicit).unwrap();
            max_diff(tr.last(), &grid.sample(|r| exact.eval(t_end, r)))
        })
        .collect();
    for w in errs.windows(2) {
        let order = (w[0] / w[1]).log2();
        assert!((1.8..=2.2).contains(&order), "{errs:?}");
    }
}

#[test]
fn strang_splitting_is_second_order() {
    let mass = unitary_mass(1.0);
    let nl = Nonlinearity::density_power(1);
    let t_end = 0.5;
    let run = |dt: f64| {
        let grid = Grid1D::periodic(128, 32.0, dt, (t_end / dt).round() as usize).unwrap();
        solve_semilinear(&gaussian_init(&grid), 0.0, &grid, mass, 1.5, &nl).unwrap().last().to_vec()
    };
    let reference = run(t_end / 1280.0);
    let errs: Vec<f64> = [0.05, 0.025, 0.0125].iter().map(|&dt| max_diff(&run(dt), &reference)).collect();
    for w in errs.windows(2) {
        let order = (w[0] / w[1]).log2();
        assert!((1.8..=2.2).contains(&order), "{errs:?}");
    }
}

#[test]
fn zero_coupling_reproduces_the_linear_solver() {
    let mass = unitary_mass(1.0);
    let grid = Grid1D::periodic(128, 32.0, 0.01, 100).unwrap();
    let init = gaussian_init(&grid);
    let lin = solve_linear(&init, 0.0, &grid, mass, LinearScheme::Spectral).unwrap();
    let semi = solve_semilinear(&init, 0.0, &grid, mass, 0.0, &Nonlinearity::density_power(2)).unwrap();
    for (a, b) in lin.states.iter().zip(&semi.states) {
        assert!(max_diff(a, b) < 1e-12);
    }
}

/// `d Phi / d g` at `g = 0` equals the Duhamel integral
/// `int_0^T exp((T - s) Dr^2 / (2M)) F(Phi_0(s)) / (2M) ds`.
#[test]
fn small_coupling_follows_the_duhamel_integral() {
    let mass = unitary_mass(1.0);
    let nl = Nonlinearity::density_power(1);
    let t_end = 0.4;
    let grid = Grid1D::periodic(128, 32.0, 1e-3, 400).unwrap();
    let init = gaussian_init(&grid);

    let free = SpectralSolution::new(&init, 0.0, &grid, mass).unwrap();
    let quad = 400;
    let ds = t_end / quad as f64;
    let mut first = vec![C64::new(0.0, 0.0); grid.n];
    for k in 0..=quad {
        let s = k as f64 * ds;
        let w = if k == 0 || k == quad { 0.5 } else { 1.0 } * ds;
        let source: Vec<C64> =
            free.state(s).iter().enumerate().map(|(j, &z)| nl.eval(s, grid.r(j), z) / (2.0 * mass)).collect();
        let carried = SpectralSolution::new(&source, s, &grid, mass).unwrap().state(t_end);
        for (acc, v) in first.iter_mut().zip(carried) {
            *acc += w * v;
        }
    }

    let g = 1e-4;
    let up = solve_semilinear(&init, 0.0, &grid, mass, g, &nl).unwrap();
    let down = solve_semilinear(&init, 0.0, &grid, mass, -g, &nl).unwrap();
    let quotient: Vec<C64> = up.last().iter().zip(down.last()).map(|(a, b)| (a - b) / (2.0 * g)).collect();
    let rel = max_diff(&quotient, &first) / first.iter().map(|z| z.norm()).fold(0.0, f64::max);
    assert!(rel < 1e-5, "{rel}");
}

#[test]
fn defocusing_real_quintic_decays() {
    let mass = diffusion_mass(1.0);
    let nl = Nonlinearity::density_power(2);
    let grid = Grid1D::new(128, 0.2, Boundary::Decaying, 2e-3, 500).unwrap();
    let init = grid.sample(|r| C64::new(1.5 * (-r * r).exp(), 0.0));
    let tr = solve_semilinear(&init, 0.0, &grid, mass, -1.0, &nl).unwrap();
    let sup = |v: &[C64]| v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    for w in tr.states.windows(2) {
        assert!(sup(&w[1]) <= sup(&w[0]) + 1e-12);
        assert!(l2_norm(&w[1], grid.h) < l2_norm(&w[0], grid.h));
        assert!(w[1].iter().all(|z| z.im.abs() < 1e-14 && z.re >= -1e-12));
    }
    let linear = solve_linear(&init, 0.0, &grid, mass, LinearScheme::CrankNicolson).unwrap();
    assert!(sup(tr.last()) < sup(linear.last()));
}

/// The symbolic potential check and the numerical covariance study agree on
/// which flows preserve `Phi (Phi Phi*)^p` at `x = 1/2` with fixed coupling.
#[test]
fn symbolic_and_numeric_verdicts_agree() {
    let x = RatFunc::ratio(1, 2);
    let rep = build_fixed_mass(&x, &RatFunc::param("M"));
    let ops = [fixed_mass_operator(&RatFunc::param("M"))];
    let cfg = NumericConfig::default();
    let density = Expr::psi().mul(&Expr::psi_star());
    for (power, kind) in [(1, FlowKind::Boost), (1, FlowKind::Special), (2, FlowKind::Boost), (2, FlowKind::Special)] {
        let form = PotentialForm::closed(Expr::psi().mul(&density.powi(power as i64).unwrap()));
        let report = verify_potential(&rep, &form, &ops).unwrap();
        let symbolic = report.check(kind.generator()).unwrap().pass;
        let study = semilinear_refinement(&cfg, power, 1.0, kind, 0.3).unwrap();
        let numeric = study.finest() < 1e-5 && study.min_order() >= 1.8;
        assert_eq!(symbolic, numeric, "p = {power}, {kind:?}: {report:?}\n{study:?}");
    }
    let cubic = PotentialForm::closed(Expr::psi().mul(&density));
    let report = verify_potential(&rep, &cubic, &ops).unwrap();
    assert!(report.check(Gen::Yp).unwrap().pass && !report.check(Gen::X1).unwrap().pass);
}
