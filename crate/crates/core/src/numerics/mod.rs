//! Floating-point cross-checks: evolution of the fixed-mass equation
//! `2 M Dt Phi - Dr^2 Phi = g F(Phi)`, finite symmetry flows, covariance
//! residuals and the Fourier map from the `zeta` representation.

use std::sync::Arc;

use num_complex::Complex64;
use thiserror::Error;

use crate::expr::{EvalEnv, Var};
use crate::potentials::PotentialForm;

pub mod bridge;
pub mod checks;
pub mod flow;
pub mod interp;
pub mod solve;

pub use bridge::{fourier_bridge, fourier_transform_at, BridgeReport, BridgeWarning, ZetaGrid};
pub use flow::{apply_flow, FlowKind, FlowSpec, Transformed};
pub use solve::{solve_linear, solve_semilinear, LinearScheme, SpectralSolution, Trajectory};

pub type C64 = Complex64;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericsError {
    #[error("invalid grid: {0}")]
    Grid(String),
    #[error("instability at step {step}: norm {norm:e}")]
    Unstable { step: usize, norm: f64 },
    #[error("flow parameter {param} is singular on the time window (1 + lambda t <= 0 at t = {t})")]
    SingularWindow { param: f64, t: f64 },
    #[error("time {0} lies outside the stored trajectory")]
    OutOfRange(f64),
    #[error("potential cannot be evaluated: {0}")]
    Potential(String),
    #[error("{0} requires a periodic grid")]
    NeedsPeriodic(&'static str),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Boundary {
    Periodic,
    /// Homogeneous Dirichlet data at both ends.
    Decaying,
}

/// A uniform `r` grid `r_j = (j - n/2) h` and a time step.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid1D {
    pub n: usize,
    pub h: f64,
    pub boundary: Boundary,
    pub dt: f64,
    pub nt: usize,
}

impl Grid1D {
    pub fn new(n: usize, h: f64, boundary: Boundary, dt: f64, nt: usize) -> Result<Self, NumericsError> {
        if n < 16 || !n.is_power_of_two() {
            return Err(NumericsError::Grid(format!("n = {n} must be a power of two >= 16")));
        }
        if !(h > 0.0 && dt > 0.0) {
            return Err(NumericsError::Grid(format!("h = {h} and dt = {dt} must be positive")));
        }
        Ok(Grid1D { n, h, boundary, dt, nt })
    }

    /// Grid on `[-length/2, length/2)`.
    pub fn periodic(n: usize, length: f64, dt: f64, nt: usize) -> Result<Self, NumericsError> {
        Grid1D::new(n, length / n as f64, Boundary::Periodic, dt, nt)
    }

    pub fn r0(&self) -> f64 {
        -(self.n as f64) * self.h / 2.0
    }

    pub fn r(&self, j: usize) -> f64 {
        self.r0() + j as f64 * self.h
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.r(j)).collect()
    }

    pub fn length(&self) -> f64 {
        self.n as f64 * self.h
    }

    /// Forward Euler is stable for real `M > 0` iff `dt <= M h^2`.
    pub fn explicit_stable(&self, mass: f64) -> bool {
        self.dt <= mass * self.h * self.h
    }

    pub fn sample(&self, f: impl Fn(f64) -> C64) -> Vec<C64> {
        self.points().into_iter().map(f).collect()
    }
}

/// `M` real and positive (diffusion) or `M = i m` (unitary).
pub fn diffusion_mass(m: f64) -> C64 {
    C64::new(m, 0.0)
}

pub fn unitary_mass(m: f64) -> C64 {
    C64::new(0.0, m)
}

/// A sampled field at one time, with the data it was produced with.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldState {
    pub t: f64,
    pub values: Vec<C64>,
    pub mass: C64,
    pub coupling: f64,
    pub x: f64,
    pub y: f64,
}

impl FieldState {
    pub fn norm(&self, h: f64) -> f64 {
        l2_norm(&self.values, h)
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

pub fn l2_norm(v: &[C64], h: f64) -> f64 {
    (v.iter().map(|z| z.norm_sqr()).sum::<f64>() * h).sqrt()
}

/// Anything that can be evaluated at arbitrary `(t, r)`.
pub trait Field: Sync {
    fn eval(&self, t: f64, r: f64) -> C64;
}

impl<F: Fn(f64, f64) -> C64 + Sync> Field for F {
    fn eval(&self, t: f64, r: f64) -> C64 {
        self(t, r)
    }
}

/// The Gaussian solution `sqrt(s0/s) exp(-r^2/(2 s))`, `s = s0 + t/M`, of the
/// linear equation.
#[derive(Clone, Copy, Debug)]
pub struct GaussianSolution {
    pub mass: C64,
    pub s0: f64,
}

impl Field for GaussianSolution {
    fn eval(&self, t: f64, r: f64) -> C64 {
        let s = self.s0 + t / self.mass;
        (C64::new(self.s0, 0.0) / s).sqrt() * (-(r * r) / (2.0 * s)).exp()
    }
}

/// A local nonlinearity `F(t, r, Phi)`.
#[derive(Clone)]
pub struct Nonlinearity {
    pub label: String,
    f: Arc<dyn Fn(f64, f64, C64) -> C64 + Send + Sync>,
}

impl std::fmt::Debug for Nonlinearity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Nonlinearity({})", self.label)
    }
}

impl Nonlinearity {
    pub fn new(label: &str, f: impl Fn(f64, f64, C64) -> C64 + Send + Sync + 'static) -> Self {
        Nonlinearity { label: label.to_string(), f: Arc::new(f) }
    }

    /// `Phi (Phi Phi*)^p`.
    pub fn density_power(p: i32) -> Self {
        Nonlinearity::new(&format!("Phi*(Phi*Phi^*)^{p}"), move |_, _, z| z * z.norm_sqr().powi(p))
    }

    /// A potential with closed-form profile: `Psi -> Phi`, `PsiS -> conj(Phi)`
    /// (or `Phi` for a real form), evaluated with the given parameter values.
    pub fn from_form(form: &PotentialForm, params: &[(&str, f64)]) -> Result<Self, NumericsError> {
        if form.func.is_some() {
            return Err(NumericsError::Potential(format!("profile function in `{form}` is not concrete")));
        }
        let expr = form.expr();
        let params: Vec<(String, f64)> = params.iter().map(|(k, v)| (k.to_string(), *v)).collect();
        let probe = Self::env(&params, 0.5, 0.5, C64::new(0.3, 0.2), form.real);
        expr.eval(&probe).map_err(|e| NumericsError::Potential(e.to_string()))?;
        let real = form.real;
        Ok(Nonlinearity::new(&form.to_string(), move |t, r, z| {
            expr.eval(&Self::env(&params, t, r, z, real)).unwrap_or(C64::new(f64::NAN, f64::NAN))
        }))
    }

    fn env(params: &[(String, f64)], t: f64, r: f64, z: C64, real: bool) -> EvalEnv<'static> {
        let mut env = EvalEnv::new().var(Var::T, t).var(Var::R, r);
        env.vars.insert(Var::Psi, z);
        env.vars.insert(Var::PsiStar, if real { z } else { z.conj() });
        for (k, v) in params {
            env = env.param(k, *v);
        }
        env
    }

    pub fn eval(&self, t: f64, r: f64, z: C64) -> C64 {
        (self.f)(t, r, z)
    }
}

/// `2 M Dt Phi - Dr^2 Phi = g F(Phi)`.
#[derive(Clone, Debug)]
pub struct Equation {
    pub mass: C64,
    pub coupling: f64,
    pub nonlinearity: Option<Nonlinearity>,
}

impl Equation {
    pub fn linear(mass: C64) -> Self {
        Equation { mass, coupling: 0.0, nonlinearity: None }
    }

    pub fn semilinear(mass: C64, coupling: f64, nl: Nonlinearity) -> Self {
        Equation { mass, coupling, nonlinearity: Some(nl) }
    }

    pub fn with_coupling(&self, g: f64) -> Self {
        Equation { coupling: g, ..self.clone() }
    }

    /// Pointwise defect from eighth-order central differences with steps `dt`, `dr`.
    pub fn defect(&self, phi: &dyn Field, t: f64, r: f64, dt: f64, dr: f64) -> C64 {
        let ft = fd_first(|s| phi.eval(t + s, r), dt);
        let frr = fd_second(|s| phi.eval(t, r + s), dr);
        let mut d = 2.0 * self.mass * ft - frr;
        if let Some(nl) = &self.nonlinearity {
            d -= self.coupling * nl.eval(t, r, phi.eval(t, r));
        }
        d
    }
}

const FD1: [f64; 4] = [4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0];
const FD2: [f64; 5] = [-205.0 / 72.0, 8.0 / 5.0, -1.0 / 5.0, 8.0 / 315.0, -1.0 / 560.0];

/// Eighth-order central first derivative at 0.
pub fn fd_first(f: impl Fn(f64) -> C64, h: f64) -> C64 {
    let mut acc = C64::new(0.0, 0.0);
    for (k, c) in FD1.iter().enumerate() {
        let s = (k + 1) as f64 * h;
        acc += *c * (f(s) - f(-s));
    }
    acc / h
}

/// Eighth-order central second derivative at 0.
pub fn fd_second(f: impl Fn(f64) -> C64, h: f64) -> C64 {
    let mut acc = FD2[0] * f(0.0);
    for (k, c) in FD2.iter().enumerate().skip(1) {
        let s = k as f64 * h;
        acc += *c * (f(s) + f(-s));
    }
    acc / (h * h)
}

/// Points at which a covariance residual is sampled.
#[derive(Clone, Debug, PartialEq)]
pub struct Window {
    pub times: Vec<f64>,
    pub radii: Vec<f64>,
    pub dt: f64,
    pub dr: f64,
}

impl Window {
    pub fn uniform(t: (f64, f64, usize), r: (f64, f64, usize), dt: f64, dr: f64) -> Self {
        let lin = |(a, b, n): (f64, f64, usize)| -> Vec<f64> {
            if n <= 1 {
                return vec![a];
            }
            (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect()
        };
        Window { times: lin(t), radii: lin(r), dt, dr }
    }
}

/// `||D[Phi']|| / ||Phi'||` over the window, where `Phi'` is the flow applied to
/// `phi` and `D` the defect of the transformed equation.
pub fn covariance_residual(eq: &Equation, flow: &FlowSpec, phi: &dyn Field, window: &Window) -> Result<f64, NumericsError> {
    flow.check_window(&window.times)?;
    let moved = Transformed { flow, base: phi };
    let eq2 = eq.with_coupling(eq.coupling * flow.coupling_factor());
    Ok(relative_defect(&eq2, &moved, window))
}

/// `||D[phi]|| / ||phi||` over the window.
pub fn relative_defect(eq: &Equation, phi: &dyn Field, window: &Window) -> f64 {
    let (mut num, mut den) = (0.0, 0.0);
    for &t in &window.times {
        for &r in &window.radii {
            num += eq.defect(phi, t, r, window.dt, window.dr).norm_sqr();
            den += phi.eval(t, r).norm_sqr();
        }
    }
    if den == 0.0 {
        return num.sqrt();
    }
    (num / den).sqrt()
}

/// `log2(e_coarse / e_fine)`.
pub fn observed_order(coarse: f64, fine: f64) -> f64 {
    (coarse / fine).log2()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stencils_are_exact_on_polynomials() {
        let f = |s: f64| C64::new(1.0 + 2.0 * s + 3.0 * s * s + s.powi(7), 0.0);
        assert!((fd_first(f, 0.1).re - 2.0).abs() < 1e-12);
        assert!((fd_second(f, 0.1).re - 6.0).abs() < 1e-10);
    }

    #[test]
    fn gaussian_solves_both_modes() {
        for mass in [diffusion_mass(1.0), unitary_mass(1.0)] {
            let g = GaussianSolution { mass, s0: 1.0 };
            let d = Equation::linear(mass).defect(&g, 0.3, 0.7, 1e-2, 1e-2);
            assert!(d.norm() < 1e-9, "{d}");
        }
    }

    #[test]
    fn grid_validation() {
        assert!(Grid1D::new(100, 0.1, Boundary::Periodic, 0.01, 1).is_err());
        assert!(Grid1D::new(64, 0.0, Boundary::Periodic, 0.01, 1).is_err());
        assert!(Grid1D::new(64, 0.1, Boundary::Decaying, 0.01, 1).is_ok());
    }
}
