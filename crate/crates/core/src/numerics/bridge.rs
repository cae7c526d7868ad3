//! The Fourier map `Phi_m(t, r) = (2 pi)^(-1/2) int dzeta exp(-i m zeta) Psi(zeta, t, r)`
//! from solutions of `2 Dz Dt Psi = Dr^2 Psi` to solutions of
//! `2 i m Dt Phi = Dr^2 Phi`, by trapezoidal quadrature.

use std::f64::consts::PI;

use serde::Serialize;

use super::{unitary_mass, Equation, Field, C64};

/// `zeta_j = (j - n/2) h`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ZetaGrid {
    pub n: usize,
    pub h: f64,
}

impl ZetaGrid {
    pub fn new(n: usize, h: f64) -> Self {
        ZetaGrid { n, h }
    }

    /// `n` points covering `[-half_width, half_width)`.
    pub fn covering(half_width: f64, n: usize) -> Self {
        ZetaGrid { n, h: 2.0 * half_width / n as f64 }
    }

    pub fn zeta(&self, j: usize) -> f64 {
        (j as f64 - (self.n / 2) as f64) * self.h
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BridgeWarning {
    /// `Psi` is not small at the ends of the `zeta` grid.
    InsufficientDecay,
    /// `Psi` does not depend on `zeta`; its transform is concentrated at `m = 0`.
    Degenerate,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BridgeReport {
    pub m: f64,
    pub values: Vec<(f64, f64, f64, f64)>,
    /// Largest `|2 i m Dt Phi_m - Dr^2 Phi_m|` over the sample points.
    pub defect: f64,
    /// `defect` divided by the largest `|Dr^2 Phi_m|`.
    pub relative: f64,
    pub warnings: Vec<BridgeWarning>,
}

/// Trapezoidal approximation of the transform at one point.
pub fn fourier_transform_at(psi: &dyn Fn(f64, f64, f64) -> C64, z: &ZetaGrid, m: f64, t: f64, r: f64) -> C64 {
    let mut acc = C64::new(0.0, 0.0);
    for j in 0..z.n {
        let zeta = z.zeta(j);
        acc += C64::from_polar(1.0, -m * zeta) * psi(zeta, t, r);
    }
    acc * z.h / (2.0 * PI).sqrt()
}

struct Transform<'a> {
    psi: &'a (dyn Fn(f64, f64, f64) -> C64 + Sync),
    z: ZetaGrid,
    m: f64,
}

impl Field for Transform<'_> {
    fn eval(&self, t: f64, r: f64) -> C64 {
        fourier_transform_at(self.psi, &self.z, self.m, t, r)
    }
}

fn warnings(psi: &dyn Fn(f64, f64, f64) -> C64, z: &ZetaGrid, t: f64, r: f64) -> Vec<BridgeWarning> {
    let samples: Vec<C64> = (0..z.n).map(|j| psi(z.zeta(j), t, r)).collect();
    let peak = samples.iter().map(|s| s.norm()).fold(0.0, f64::max);
    let mut out = Vec::new();
    if peak == 0.0 {
        return out;
    }
    let spread = samples.iter().map(|s| (s - samples[0]).norm()).fold(0.0, f64::max);
    if spread <= 1e-12 * peak {
        out.push(BridgeWarning::Degenerate);
    }
    let edge = samples[0].norm().max(samples[z.n - 1].norm());
    if edge > 1e-8 * peak {
        out.push(BridgeWarning::InsufficientDecay);
    }
    out
}

/// Transforms `psi` at the given `(t, r)` points and measures the defect of the
/// fixed-mass equation with `M = i m` by eighth-order differences of step `fd`.
pub fn fourier_bridge(
    psi: &(dyn Fn(f64, f64, f64) -> C64 + Sync),
    z: &ZetaGrid,
    m: f64,
    points: &[(f64, f64)],
    fd: f64,
) -> BridgeReport {
    let phi = Transform { psi, z: *z, m };
    let eq = Equation::linear(unitary_mass(m));
    let mut values = Vec::with_capacity(points.len());
    let (mut defect, mut scale) = (0.0f64, 0.0f64);
    for &(t, r) in points {
        let v = phi.eval(t, r);
        values.push((t, r, v.re, v.im));
        defect = defect.max(eq.defect(&phi, t, r, fd, fd).norm());
        scale = scale.max(super::fd_second(|s| phi.eval(t, r + s), fd).norm());
    }
    let warnings = points.first().map(|&(t, r)| warnings(psi, z, t, r)).unwrap_or_default();
    BridgeReport { m, values, defect, relative: if scale > 0.0 { defect / scale } else { defect }, warnings }
}

/// `exp(-zeta^2 / (2 sigma^2))` and its derivative.
pub fn gaussian(sigma: f64, zeta: f64) -> (f64, f64) {
    let g = (-(zeta * zeta) / (2.0 * sigma * sigma)).exp();
    (g, -zeta / (sigma * sigma) * g)
}

/// `Psi = t G(zeta) + r^2 G'(zeta)` with a Gaussian `G`; solves `2 Dz Dt Psi = Dr^2 Psi`.
pub fn gaussian_zeta_solution(sigma: f64) -> impl Fn(f64, f64, f64) -> C64 + Sync {
    move |zeta, t, r| {
        let (g, dg) = gaussian(sigma, zeta);
        C64::new(t * g + r * r * dg, 0.0)
    }
}

/// Size of the leading aliasing term of the trapezoidal transform of a
/// Gaussian of width `sigma`: `exp(-sigma^2 (2 pi / h - |m|)^2 / 2)`.
pub fn aliasing_rate(sigma: f64, h: f64, m: f64) -> f64 {
    let k = 2.0 * PI / h - m.abs();
    (-(sigma * sigma) * k * k / 2.0).exp()
}
