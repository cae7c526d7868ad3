//! Time stepping for `2 M Dt Phi = Dr^2 Phi + g F(Phi)`.

use super::interp::{fft, ifft, lagrange_weights, trig_eval, wavenumbers, Spline};
use super::{l2_norm, Boundary, Field, FieldState, Grid1D, Nonlinearity, NumericsError, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LinearScheme {
    /// Exact propagation of every Fourier mode (periodic grids).
    Spectral,
    /// Crank-Nicolson with the three-point Laplacian.
    CrankNicolson,
    /// Forward Euler with the three-point Laplacian.
    Explicit,
}

const BLOW_UP: f64 = 1e8;

/// Exact solution of the linear equation on a periodic grid, evaluable anywhere.
#[derive(Clone, Debug)]
pub struct SpectralSolution {
    pub grid: Grid1D,
    pub t0: f64,
    pub mass: C64,
    spec0: Vec<C64>,
    k: Vec<f64>,
}

impl SpectralSolution {
    pub fn new(init: &[C64], t0: f64, grid: &Grid1D, mass: C64) -> Result<Self, NumericsError> {
        if grid.boundary != Boundary::Periodic {
            return Err(NumericsError::NeedsPeriodic("spectral propagation"));
        }
        Ok(SpectralSolution { grid: *grid, t0, mass, spec0: fft(init), k: wavenumbers(grid) })
    }

    fn spectrum(&self, t: f64) -> Vec<C64> {
        let tau = t - self.t0;
        self.spec0
            .iter()
            .zip(&self.k)
            .map(|(s, k)| s * (-(k * k) * tau / (2.0 * self.mass)).exp())
            .collect()
    }

    pub fn state(&self, t: f64) -> Vec<C64> {
        ifft(&self.spectrum(t))
    }
}

impl Field for SpectralSolution {
    fn eval(&self, t: f64, r: f64) -> C64 {
        trig_eval(&self.spectrum(t), &self.grid, r)
    }
}

/// Stored time levels `t0 + k dt`, evaluable between levels by eighth-order
/// Lagrange interpolation and between nodes by trigonometric or spline
/// interpolation.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub grid: Grid1D,
    pub t0: f64,
    pub mass: C64,
    pub coupling: f64,
    pub states: Vec<Vec<C64>>,
    spectra: Vec<Vec<C64>>,
    splines: Vec<Spline>,
}

impl Trajectory {
    fn new(grid: &Grid1D, t0: f64, mass: C64, coupling: f64, states: Vec<Vec<C64>>) -> Self {
        let (spectra, splines) = match grid.boundary {
            Boundary::Periodic => (states.iter().map(|s| fft(s)).collect(), Vec::new()),
            Boundary::Decaying => (Vec::new(), states.iter().map(|s| Spline::new(grid, s)).collect()),
        };
        Trajectory { grid: *grid, t0, mass, coupling, states, spectra, splines }
    }

    pub fn time(&self, k: usize) -> f64 {
        self.t0 + k as f64 * self.grid.dt
    }

    pub fn t_end(&self) -> f64 {
        self.time(self.states.len() - 1)
    }

    pub fn last(&self) -> &[C64] {
        self.states.last().expect("nonempty trajectory")
    }

    pub fn state(&self, k: usize) -> FieldState {
        FieldState {
            t: self.time(k),
            values: self.states[k].clone(),
            mass: self.mass,
            coupling: self.coupling,
            x: 0.5,
            y: 0.0,
        }
    }

    fn eval_level(&self, k: usize, r: f64) -> C64 {
        match self.grid.boundary {
            Boundary::Periodic => trig_eval(&self.spectra[k], &self.grid, r),
            Boundary::Decaying => self.splines[k].eval(r),
        }
    }
}

impl Field for Trajectory {
    /// NaN outside the stored time range.
    fn eval(&self, t: f64, r: f64) -> C64 {
        let len = self.states.len();
        let s = (t - self.t0) / self.grid.dt;
        if s < -1e-9 || s > (len - 1) as f64 + 1e-9 {
            return C64::new(f64::NAN, f64::NAN);
        }
        let nearest = s.round();
        if (s - nearest).abs() < 1e-9 {
            return self.eval_level(nearest as usize, r);
        }
        let k = 8.min(len);
        let start = (s.floor() as isize - (k as isize / 2 - 1)).clamp(0, (len - k) as isize) as usize;
        lagrange_weights(start, k, s)
            .iter()
            .enumerate()
            .map(|(i, w)| *w * self.eval_level(start + i, r))
            .sum()
    }
}

fn check(step: usize, v: &[C64], h: f64, reference: f64) -> Result<(), NumericsError> {
    let norm = l2_norm(v, h);
    if !norm.is_finite() || norm > BLOW_UP * reference.max(1e-300) {
        return Err(NumericsError::Unstable { step, norm });
    }
    Ok(())
}

fn laplacian(v: &[C64], grid: &Grid1D) -> Vec<C64> {
    let n = v.len();
    let zero = C64::new(0.0, 0.0);
    let h2 = grid.h * grid.h;
    (0..n)
        .map(|j| {
            let (l, r) = match grid.boundary {
                Boundary::Periodic => (v[(j + n - 1) % n], v[(j + 1) % n]),
                Boundary::Decaying => (if j > 0 { v[j - 1] } else { zero }, if j + 1 < n { v[j + 1] } else { zero }),
            };
            (l - 2.0 * v[j] + r) / h2
        })
        .collect()
}

/// Solves `a u_{j-1} + b u_j + a u_{j+1} = d_j` with zero Dirichlet data.
fn thomas(a: C64, b: C64, d: &[C64]) -> Vec<C64> {
    let n = d.len();
    let mut c = vec![C64::new(0.0, 0.0); n];
    let mut e = vec![C64::new(0.0, 0.0); n];
    for i in 0..n {
        let denom = if i == 0 { b } else { b - a * c[i - 1] };
        c[i] = a / denom;
        e[i] = if i == 0 { d[i] / denom } else { (d[i] - a * e[i - 1]) / denom };
    }
    let mut u = vec![C64::new(0.0, 0.0); n];
    for i in (0..n).rev() {
        u[i] = if i + 1 == n { e[i] } else { e[i] - c[i] * u[i + 1] };
    }
    u
}

/// One linear step of length `dt` with `Dt Phi = Dr^2 Phi / (2 M)`.
struct LinearStepper {
    scheme: LinearScheme,
    grid: Grid1D,
    mass: C64,
    dt: f64,
    factors: Vec<C64>,
}

impl LinearStepper {
    fn new(scheme: LinearScheme, grid: &Grid1D, mass: C64, dt: f64) -> Result<Self, NumericsError> {
        let periodic = grid.boundary == Boundary::Periodic;
        let factors = match scheme {
            LinearScheme::Spectral if !periodic => return Err(NumericsError::NeedsPeriodic("spectral propagation")),
            LinearScheme::Spectral => wavenumbers(grid)
                .iter()
                .map(|k| (-(k * k) * dt / (2.0 * mass)).exp())
                .collect(),
            LinearScheme::CrankNicolson if periodic => wavenumbers(grid)
                .iter()
                .map(|k| {
                    let sym = -4.0 * (k * grid.h / 2.0).sin().powi(2) / (grid.h * grid.h);
                    let a = sym * dt / (4.0 * mass);
                    (1.0 + a) / (1.0 - a)
                })
                .collect(),
            _ => Vec::new(),
        };
        Ok(LinearStepper { scheme, grid: *grid, mass, dt, factors })
    }

    fn step(&self, v: &[C64]) -> Vec<C64> {
        if !self.factors.is_empty() {
            let spec: Vec<C64> = fft(v).iter().zip(&self.factors).map(|(s, f)| s * f).collect();
            return ifft(&spec);
        }
        let lap = laplacian(v, &self.grid);
        let coef = self.dt / (2.0 * self.mass);
        match self.scheme {
            LinearScheme::Explicit => v.iter().zip(&lap).map(|(u, l)| u + coef * l).collect(),
            _ => {
                let rhs: Vec<C64> = v.iter().zip(&lap).map(|(u, l)| u + 0.5 * coef * l).collect();
                let h2 = self.grid.h * self.grid.h;
                let off = -0.5 * coef / h2;
                thomas(off, 1.0 + coef / h2, &rhs)
            }
        }
    }
}

/// Evolves `init` for `grid.nt` steps of the linear equation.
pub fn solve_linear(
    init: &[C64],
    t0: f64,
    grid: &Grid1D,
    mass: C64,
    scheme: LinearScheme,
) -> Result<Trajectory, NumericsError> {
    let stepper = LinearStepper::new(scheme, grid, mass, grid.dt)?;
    let reference = l2_norm(init, grid.h);
    let mut states = vec![init.to_vec()];
    for step in 1..=grid.nt {
        let next = stepper.step(states.last().expect("nonempty"));
        check(step, &next, grid.h, reference)?;
        states.push(next);
    }
    Ok(Trajectory::new(grid, t0, mass, 0.0, states))
}

/// Pointwise `Dt Phi = g F(t, r, Phi) / (2 M)` over `dt` by one classical RK4 step.
fn nonlinear_step(v: &[C64], t: f64, dt: f64, grid: &Grid1D, rhs_scale: C64, nl: &Nonlinearity) -> Vec<C64> {
    v.iter()
        .enumerate()
        .map(|(j, &u)| {
            let r = grid.r(j);
            let f = |s: f64, z: C64| rhs_scale * nl.eval(s, r, z);
            let k1 = f(t, u);
            let k2 = f(t + dt / 2.0, u + dt / 2.0 * k1);
            let k3 = f(t + dt / 2.0, u + dt / 2.0 * k2);
            let k4 = f(t + dt, u + dt * k3);
            u + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        })
        .collect()
}

/// Strang splitting: half nonlinear step, full linear step (spectral on periodic
/// grids, Crank-Nicolson otherwise), half nonlinear step.
pub fn solve_semilinear(
    init: &[C64],
    t0: f64,
    grid: &Grid1D,
    mass: C64,
    coupling: f64,
    nl: &Nonlinearity,
) -> Result<Trajectory, NumericsError> {
    let scheme = match grid.boundary {
        Boundary::Periodic => LinearScheme::Spectral,
        Boundary::Decaying => LinearScheme::CrankNicolson,
    };
    let stepper = LinearStepper::new(scheme, grid, mass, grid.dt)?;
    let scale = coupling / (2.0 * mass);
    let reference = l2_norm(init, grid.h);
    let half = grid.dt / 2.0;
    let mut states = vec![init.to_vec()];
    for step in 1..=grid.nt {
        let t = t0 + (step - 1) as f64 * grid.dt;
        let cur = states.last().expect("nonempty");
        let a = if coupling == 0.0 { cur.clone() } else { nonlinear_step(cur, t, half, grid, scale, nl) };
        let b = stepper.step(&a);
        let next = if coupling == 0.0 { b } else { nonlinear_step(&b, t + half, half, grid, scale, nl) };
        check(step, &next, grid.h, reference)?;
        states.push(next);
    }
    Ok(Trajectory::new(grid, t0, mass, coupling, states))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{diffusion_mass, unitary_mass, GaussianSolution};

    fn max_err(a: &[C64], grid: &Grid1D, exact: impl Fn(f64) -> C64) -> f64 {
        a.iter().enumerate().map(|(j, z)| (z - exact(grid.r(j))).norm()).fold(0.0, f64::max)
    }

    #[test]
    fn spectral_matches_gaussian() {
        let mass = diffusion_mass(1.0);
        let grid = Grid1D::periodic(128, 40.0, 0.05, 20).unwrap();
        let g = GaussianSolution { mass, s0: 1.0 };
        let tr = solve_linear(&grid.sample(|r| g.eval(0.0, r)), 0.0, &grid, mass, LinearScheme::Spectral).unwrap();
        assert!(max_err(tr.last(), &grid, |r| g.eval(1.0, r)) < 1e-12);
    }

    #[test]
    fn crank_nicolson_is_unitary() {
        let mass = unitary_mass(1.0);
        for boundary in [Boundary::Periodic, Boundary::Decaying] {
            let grid = Grid1D::new(128, 0.25, boundary, 0.01, 50).unwrap();
            let g = GaussianSolution { mass, s0: 1.0 };
            let tr = solve_linear(&grid.sample(|r| g.eval(0.0, r)), 0.0, &grid, mass, LinearScheme::CrankNicolson).unwrap();
            for w in tr.states.windows(2) {
                assert!((l2_norm(&w[0], grid.h) - l2_norm(&w[1], grid.h)).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn explicit_blows_up_beyond_stability() {
        let mass = diffusion_mass(1.0);
        let grid = Grid1D::periodic(64, 10.0, 0.1, 400).unwrap();
        assert!(!grid.explicit_stable(1.0));
        let init = grid.sample(|r| C64::new((-r * r).exp(), 0.0));
        let err = solve_linear(&init, 0.0, &grid, mass, LinearScheme::Explicit).unwrap_err();
        assert!(matches!(err, NumericsError::Unstable { .. }));
    }

    #[test]
    fn zero_stays_zero() {
        let grid = Grid1D::periodic(32, 10.0, 0.01, 10).unwrap();
        let init = vec![C64::new(0.0, 0.0); 32];
        for scheme in [LinearScheme::Spectral, LinearScheme::CrankNicolson, LinearScheme::Explicit] {
            let tr = solve_linear(&init, 0.0, &grid, diffusion_mass(1.0), scheme).unwrap();
            assert!(tr.last().iter().all(|z| z.norm() == 0.0));
        }
    }
}
