//! Finite transformations generated by the fixed-mass generators.
//!
//! With `X = a.d + c`, the flow `Phi_lambda = exp(lambda X) Phi` satisfies
//! `d/dlambda Phi_lambda = X Phi` at `lambda = 0`:
//!
//! * `X-1`: `Phi(t - l, r)`
//! * `Y-1/2`: `Phi(t, r - l)`
//! * `Y1/2`: `exp(-M (l r - l^2 t / 2)) Phi(t, r - l t)`
//! * `X0`: `exp(-x l / 2) Phi(exp(-l) t, exp(-l/2) r)`
//! * `X1`: `(1 + l t)^(-x) exp(-M l r^2 / (2 (1 + l t))) Phi(t / (1 + l t), r / (1 + l t))`
//! * `M0`: `exp(-M l) Phi`

use num_complex::Complex64;

use super::{Field, FieldState, Grid1D, NumericsError, C64};
use crate::expr::{EvalEnv, Var};
use crate::liealg::{Gen, VectorField};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FlowKind {
    TimeTranslation,
    SpaceTranslation,
    Boost,
    Dilatation,
    Special,
    Phase,
}

impl FlowKind {
    pub const ALL: [FlowKind; 6] = [
        FlowKind::TimeTranslation,
        FlowKind::SpaceTranslation,
        FlowKind::Boost,
        FlowKind::Dilatation,
        FlowKind::Special,
        FlowKind::Phase,
    ];

    pub fn generator(self) -> Gen {
        match self {
            FlowKind::TimeTranslation => Gen::Xm1,
            FlowKind::SpaceTranslation => Gen::Ym,
            FlowKind::Boost => Gen::Yp,
            FlowKind::Dilatation => Gen::X0,
            FlowKind::Special => Gen::X1,
            FlowKind::Phase => Gen::M0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            FlowKind::TimeTranslation => "time-translation",
            FlowKind::SpaceTranslation => "space-translation",
            FlowKind::Boost => "boost",
            FlowKind::Dilatation => "dilatation",
            FlowKind::Special => "special",
            FlowKind::Phase => "phase",
        }
    }
}

/// A flow with its group parameter, scaling dimension and mass.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FlowSpec {
    pub kind: FlowKind,
    pub param: f64,
    pub x: f64,
    pub mass: C64,
    /// Degree `p` of a homogeneous nonlinearity, `F(c Phi) = c^p F(Phi)` for `|c| = 1`
    /// and real `c > 0`; used for the coupling under dilatations.
    pub degree: f64,
}

impl FlowSpec {
    pub fn new(kind: FlowKind, param: f64, x: f64, mass: C64) -> Self {
        FlowSpec { kind, param, x, mass, degree: 1.0 }
    }

    pub fn with_degree(mut self, degree: f64) -> Self {
        self.degree = degree;
        self
    }

    /// `(t', r', prefactor)` with `Phi'(t, r) = prefactor * Phi(t', r')`.
    pub fn map(&self, t: f64, r: f64) -> (f64, f64, C64) {
        let l = self.param;
        let one = C64::new(1.0, 0.0);
        match self.kind {
            FlowKind::TimeTranslation => (t - l, r, one),
            FlowKind::SpaceTranslation => (t, r - l, one),
            FlowKind::Boost => (t, r - l * t, (-self.mass * (l * r - l * l * t / 2.0)).exp()),
            FlowKind::Dilatation => ((-l).exp() * t, (-l / 2.0).exp() * r, C64::new((-self.x * l / 2.0).exp(), 0.0)),
            FlowKind::Special => {
                let d = 1.0 + l * t;
                let pre = d.powf(-self.x) * (-self.mass * l * r * r / (2.0 * d)).exp();
                (t / d, r / d, pre)
            }
            FlowKind::Phase => (t, r, (-self.mass * l).exp()),
        }
    }

    /// `g'/g` for the transformed equation: `exp(y l)` with
    /// `y = (p - 1) x / 2 - 1` under dilatations, `1` otherwise.
    pub fn coupling_factor(&self) -> f64 {
        match self.kind {
            FlowKind::Dilatation => (((self.degree - 1.0) * self.x / 2.0 - 1.0) * self.param).exp(),
            _ => 1.0,
        }
    }

    /// Rejects windows that reach `1 + lambda t <= 0`.
    pub fn check_window(&self, times: &[f64]) -> Result<(), NumericsError> {
        if self.kind == FlowKind::Special {
            if let Some(&t) = times.iter().find(|&&t| 1.0 + self.param * t <= 0.0) {
                return Err(NumericsError::SingularWindow { param: self.param, t });
            }
        }
        Ok(())
    }

    /// The interval of parameters for which the flow is regular on `[t_min, t_max]`.
    pub fn regular_window(&self, t_min: f64, t_max: f64) -> (f64, f64) {
        match self.kind {
            FlowKind::Special => {
                let lo = if t_max > 0.0 { -1.0 / t_max } else { f64::NEG_INFINITY };
                let hi = if t_min < 0.0 { -1.0 / t_min } else { f64::INFINITY };
                (lo, hi)
            }
            _ => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }
}

/// `flow` applied to `base`.
pub struct Transformed<'a> {
    pub flow: &'a FlowSpec,
    pub base: &'a dyn Field,
}

impl Field for Transformed<'_> {
    fn eval(&self, t: f64, r: f64) -> C64 {
        let (t2, r2, pre) = self.flow.map(t, r);
        pre * self.base.eval(t2, r2)
    }
}

/// Samples the transformed field at time `t` on the grid.
pub fn apply_flow(flow: &FlowSpec, field: &dyn Field, t: f64, grid: &Grid1D) -> Result<FieldState, NumericsError> {
    flow.check_window(&[t])?;
    let moved = Transformed { flow, base: field };
    Ok(FieldState {
        t,
        values: grid.sample(|r| moved.eval(t, r)),
        mass: flow.mass,
        coupling: flow.coupling_factor(),
        x: flow.x,
        y: 0.0,
    })
}

/// `X Phi = a_t Dt Phi + a_r Dr Phi + c Phi` at `(t, r)` for a generator in
/// `t, r` with mass parameter `M` and scaling dimension `x` bound numerically.
pub fn generator_action(gen: &VectorField, field: &dyn Field, t: f64, r: f64, mass: C64, x: f64, h: f64) -> Result<C64, NumericsError> {
    let mut env = EvalEnv::new().var(Var::T, t).var(Var::R, r).param("x", x);
    env.params.insert("M".into(), mass);
    let ev = |e: &crate::expr::Expr| e.eval(&env).map_err(|err| NumericsError::Potential(err.to_string()));
    let at = ev(gen.coeff(Var::T))?;
    let ar = ev(gen.coeff(Var::R))?;
    let c = ev(&gen.scalar)?;
    let dt = super::fd_first(|s| field.eval(t + s, r), h);
    let dr = super::fd_first(|s| field.eval(t, r + s), h);
    Ok(at * dt + ar * dr + c * field.eval(t, r))
}

/// `(Phi_lambda - Phi) / lambda` at `(t, r)`.
pub fn flow_difference_quotient(flow: &FlowSpec, field: &dyn Field, t: f64, r: f64) -> C64 {
    let moved = Transformed { flow, base: field };
    (moved.eval(t, r) - field.eval(t, r)) / Complex64::new(flow.param, 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{diffusion_mass, unitary_mass, GaussianSolution};

    #[test]
    fn zero_parameter_is_identity() {
        let g = GaussianSolution { mass: unitary_mass(1.0), s0: 1.0 };
        for kind in FlowKind::ALL {
            let f = FlowSpec::new(kind, 0.0, 0.5, unitary_mass(1.0));
            let moved = Transformed { flow: &f, base: &g };
            assert!((moved.eval(0.4, 0.3) - g.eval(0.4, 0.3)).norm() < 1e-15);
        }
    }

    #[test]
    fn singular_window_rejected() {
        let f = FlowSpec::new(FlowKind::Special, -1.0, 0.5, diffusion_mass(1.0));
        assert!(f.check_window(&[0.5, 1.5]).is_err());
        assert_eq!(f.regular_window(0.0, 2.0).0, -0.5);
    }
}
