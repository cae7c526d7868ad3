//! Off-grid evaluation: trigonometric interpolation for periodic data, natural
//! cubic splines otherwise, Lagrange weights in time.

use rustfft::FftPlanner;

use super::{Grid1D, C64};

/// Forward DFT (unnormalized).
pub fn fft(v: &[C64]) -> Vec<C64> {
    let mut buf = v.to_vec();
    FftPlanner::new().plan_fft_forward(buf.len()).process(&mut buf);
    buf
}

/// Inverse DFT, normalized so that `ifft(fft(v)) = v`.
pub fn ifft(v: &[C64]) -> Vec<C64> {
    let mut buf = v.to_vec();
    FftPlanner::new().plan_fft_inverse(buf.len()).process(&mut buf);
    let n = buf.len() as f64;
    buf.iter_mut().for_each(|z| *z /= n);
    buf
}

/// Angular wavenumbers in FFT order for a periodic grid.
pub fn wavenumbers(grid: &Grid1D) -> Vec<f64> {
    let n = grid.n;
    let base = 2.0 * std::f64::consts::PI / grid.length();
    (0..n)
        .map(|j| {
            let m = if j <= n / 2 { j as f64 } else { j as f64 - n as f64 };
            base * m
        })
        .collect()
}

/// Evaluates the trigonometric interpolant with DFT coefficients `spec` at `r`.
/// The Nyquist mode enters as a cosine.
pub fn trig_eval(spec: &[C64], grid: &Grid1D, r: f64) -> C64 {
    let n = spec.len();
    let theta = 2.0 * std::f64::consts::PI * (r - grid.r0()) / grid.length();
    let step = C64::from_polar(1.0, theta);
    let mut w = C64::new(1.0, 0.0);
    let mut acc = spec[0];
    for j in 1..n / 2 {
        w *= step;
        acc += spec[j] * w + spec[n - j] * w.conj();
    }
    acc += spec[n / 2] * (theta * (n / 2) as f64).cos();
    acc / n as f64
}

/// Natural cubic spline through `(r_j, v_j)` on a uniform grid.
#[derive(Clone, Debug)]
pub struct Spline {
    r0: f64,
    h: f64,
    v: Vec<C64>,
    m: Vec<C64>,
}

impl Spline {
    pub fn new(grid: &Grid1D, v: &[C64]) -> Spline {
        let n = v.len();
        let h = grid.h;
        let mut m = vec![C64::new(0.0, 0.0); n];
        if n > 2 {
            // Tridiagonal system (h/6, 2h/3, h/6) m = second differences / h.
            let k = n - 2;
            let mut c = vec![0.0; k];
            let mut d = vec![C64::new(0.0, 0.0); k];
            for i in 0..k {
                let rhs = (v[i + 2] - 2.0 * v[i + 1] + v[i]) / h;
                let b = 2.0 * h / 3.0;
                let a = h / 6.0;
                let denom = if i == 0 { b } else { b - a * c[i - 1] };
                c[i] = a / denom;
                d[i] = if i == 0 { rhs / denom } else { (rhs - a * d[i - 1]) / denom };
            }
            for i in (0..k).rev() {
                m[i + 1] = if i + 1 == k { d[i] } else { d[i] - c[i] * m[i + 2] };
            }
        }
        Spline { r0: grid.r0(), h, v: v.to_vec(), m }
    }

    /// Zero outside the grid.
    pub fn eval(&self, r: f64) -> C64 {
        let s = (r - self.r0) / self.h;
        let n = self.v.len();
        if s < 0.0 || s > (n - 1) as f64 {
            return C64::new(0.0, 0.0);
        }
        let i = (s.floor() as usize).min(n - 2);
        let a = (i + 1) as f64 - s;
        let b = s - i as f64;
        let h2 = self.h * self.h / 6.0;
        self.v[i] * a + self.v[i + 1] * b + ((a * a * a - a) * self.m[i] + (b * b * b - b) * self.m[i + 1]) * h2
    }
}

/// Lagrange weights on the nodes `start..start+k` (unit spacing) at position `s`.
pub fn lagrange_weights(start: usize, k: usize, s: f64) -> Vec<f64> {
    (0..k)
        .map(|i| {
            let xi = (start + i) as f64;
            (0..k)
                .filter(|&j| j != i)
                .map(|j| {
                    let xj = (start + j) as f64;
                    (s - xj) / (xi - xj)
                })
                .product()
        })
        .collect()
}
