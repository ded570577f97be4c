//! Interpolation: monotone cubic Hermite tables and periodic cubic splines
//! on uniform grids.

use crate::error::{Error, Result};

/// Cubic Hermite interpolant on a strictly increasing grid with supplied
/// node derivatives. When the data are monotone the derivatives are run
/// through the Fritsch-Carlson limiter so the interpolant stays monotone.
#[derive(Debug, Clone)]
pub struct CubicHermite {
    xs: Vec<f64>,
    ys: Vec<f64>,
    ds: Vec<f64>,
}

impl CubicHermite {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>, ds: Vec<f64>) -> Result<Self> {
        if xs.len() < 2 || xs.len() != ys.len() || xs.len() != ds.len() {
            return Err(Error::Domain("hermite table needs matching lengths >= 2".into()));
        }
        if xs.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Domain("hermite abscissae must strictly increase".into()));
        }
        let mut table = CubicHermite { xs, ys, ds };
        table.limit_monotone();
        Ok(table)
    }

    /// Fritsch-Carlson limiter: scale node derivatives so each cell's
    /// (alpha, beta) pair stays inside the monotonicity circle of radius 3.
    fn limit_monotone(&mut self) {
        let n = self.xs.len();
        for i in 0..n - 1 {
            let h = self.xs[i + 1] - self.xs[i];
            let slope = (self.ys[i + 1] - self.ys[i]) / h;
            if slope == 0.0 {
                self.ds[i] = 0.0;
                self.ds[i + 1] = 0.0;
                continue;
            }
            let alpha = self.ds[i] / slope;
            let beta = self.ds[i + 1] / slope;
            if alpha < 0.0 {
                self.ds[i] = 0.0;
            }
            if beta < 0.0 {
                self.ds[i + 1] = 0.0;
            }
            let norm = (alpha * alpha + beta * beta).sqrt();
            if norm > 3.0 {
                let tau = 3.0 / norm;
                self.ds[i] = tau * alpha * slope;
                self.ds[i + 1] = tau * beta * slope;
            }
        }
    }

    fn cell(&self, x: f64) -> usize {
        match self.xs.binary_search_by(|v| v.partial_cmp(&x).unwrap()) {
            Ok(i) => i.min(self.xs.len() - 2),
            Err(0) => 0,
            Err(i) => (i - 1).min(self.xs.len() - 2),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let i = self.cell(x);
        let h = self.xs[i + 1] - self.xs[i];
        let t = ((x - self.xs[i]) / h).clamp(0.0, 1.0);
        let (y0, y1, d0, d1) = (self.ys[i], self.ys[i + 1], self.ds[i], self.ds[i + 1]);
        let t2 = t * t;
        let t3 = t2 * t;
        y0 * (2.0 * t3 - 3.0 * t2 + 1.0)
            + d0 * h * (t3 - 2.0 * t2 + t)
            + y1 * (-2.0 * t3 + 3.0 * t2)
            + d1 * h * (t3 - t2)
    }

    pub fn eval_derivative(&self, x: f64) -> f64 {
        let i = self.cell(x);
        let h = self.xs[i + 1] - self.xs[i];
        let t = ((x - self.xs[i]) / h).clamp(0.0, 1.0);
        let (y0, y1, d0, d1) = (self.ys[i], self.ys[i + 1], self.ds[i], self.ds[i + 1]);
        let t2 = t * t;
        (y0 * (6.0 * t2 - 6.0 * t) + y1 * (6.0 * t - 6.0 * t2)) / h
            + d0 * (3.0 * t2 - 4.0 * t + 1.0)
            + d1 * (3.0 * t2 - 2.0 * t)
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn ys(&self) -> &[f64] {
        &self.ys
    }
}

/// Natural periodic cubic spline on a uniform grid over one period.
/// Built from samples at t_i = i * period / n, i = 0..n (the last sample
/// must repeat the first).
#[derive(Debug, Clone)]
pub struct PeriodicSpline {
    period: f64,
    values: Vec<f64>,
    moments: Vec<f64>,
    h: f64,
}

impl PeriodicSpline {
    pub fn fit(period: f64, samples: &[f64]) -> Result<Self> {
        if samples.len() < 4 {
            return Err(Error::Domain("periodic spline needs at least 4 samples".into()));
        }
        if (samples[0] - samples[samples.len() - 1]).abs() > 1e-12 * samples[0].abs().max(1.0) {
            return Err(Error::Domain(
                "periodic spline samples must repeat the first value at the period".into(),
            ));
        }
        if !(period > 0.0) {
            return Err(Error::Domain("period must be positive".into()));
        }
        let n = samples.len() - 1;
        let h = period / n as f64;
        let values: Vec<f64> = samples[..n].to_vec();
        // Cyclic tridiagonal system for second-derivative moments:
        //   m[i-1] + 4 m[i] + m[i+1] = 6 (y[i-1] - 2 y[i] + y[i+1]) / h^2
        let rhs: Vec<f64> = (0..n)
            .map(|i| {
                let ym = values[(i + n - 1) % n];
                let yc = values[i];
                let yp = values[(i + 1) % n];
                6.0 * (ym - 2.0 * yc + yp) / (h * h)
            })
            .collect();
        let moments = solve_cyclic_tridiagonal(1.0, 4.0, 1.0, &rhs);
        Ok(PeriodicSpline { period, values, moments, h })
    }

    fn locate(&self, t: f64) -> (usize, f64) {
        let n = self.values.len();
        let tau = t.rem_euclid(self.period);
        let mut i = (tau / self.h) as usize;
        if i >= n {
            i = n - 1;
        }
        (i, tau - i as f64 * self.h)
    }

    pub fn value(&self, t: f64) -> f64 {
        let n = self.values.len();
        let (i, dx) = self.locate(t);
        let (y0, y1) = (self.values[i], self.values[(i + 1) % n]);
        let (m0, m1) = (self.moments[i], self.moments[(i + 1) % n]);
        let h = self.h;
        let a = (h - dx) / h;
        let b = dx / h;
        a * y0 + b * y1
            + ((a * a * a - a) * m0 + (b * b * b - b) * m1) * h * h / 6.0
    }

    pub fn derivative(&self, t: f64) -> f64 {
        let n = self.values.len();
        let (i, dx) = self.locate(t);
        let (y0, y1) = (self.values[i], self.values[(i + 1) % n]);
        let (m0, m1) = (self.moments[i], self.moments[(i + 1) % n]);
        let h = self.h;
        let a = (h - dx) / h;
        let b = dx / h;
        (y1 - y0) / h + ((3.0 * b * b - 1.0) * m1 - (3.0 * a * a - 1.0) * m0) * h / 6.0
    }

    pub fn period(&self) -> f64 {
        self.period
    }
}

/// Thomas algorithm for a constant-coefficient tridiagonal system.
fn solve_tridiagonal(lower: f64, diag: &[f64], upper: f64, rhs: &[f64]) -> Vec<f64> {
    let n = rhs.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    c[0] = upper / diag[0];
    d[0] = rhs[0] / diag[0];
    for i in 1..n {
        let m = diag[i] - lower * c[i - 1];
        c[i] = upper / m;
        d[i] = (rhs[i] - lower * d[i - 1]) / m;
    }
    let mut x = vec![0.0; n];
    x[n - 1] = d[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = d[i] - c[i] * x[i + 1];
    }
    x
}

/// Sherman-Morrison reduction of the cyclic tridiagonal system with
/// constant bands (lower, diag, upper) and corner entries lower/upper.
fn solve_cyclic_tridiagonal(lower: f64, diag: f64, upper: f64, rhs: &[f64]) -> Vec<f64> {
    let n = rhs.len();
    debug_assert!(n >= 3);
    let gamma = -diag;
    let mut diag_mod = vec![diag; n];
    diag_mod[0] = diag - gamma;
    diag_mod[n - 1] = diag - lower * upper / gamma;
    let y = solve_tridiagonal(lower, &diag_mod, upper, rhs);
    let mut u_rhs = vec![0.0; n];
    u_rhs[0] = gamma;
    u_rhs[n - 1] = upper;
    let z = solve_tridiagonal(lower, &diag_mod, upper, &u_rhs);
    let factor =
        (y[0] + lower * y[n - 1] / gamma) / (1.0 + z[0] + lower * z[n - 1] / gamma);
    (0..n).map(|i| y[i] - factor * z[i]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn hermite_reproduces_cubic_with_exact_derivatives() {
        let xs: Vec<f64> = (0..=20).map(|i| i as f64 * 0.05).collect();
        let ys: Vec<f64> = xs.iter().map(|&x| x * x * x + x).collect();
        let ds: Vec<f64> = xs.iter().map(|&x| 3.0 * x * x + 1.0).collect();
        let h = CubicHermite::new(xs, ys, ds).unwrap();
        for i in 0..200 {
            let x = i as f64 / 200.0;
            assert!((h.eval(x) - (x * x * x + x)).abs() < 1e-12);
        }
    }

    #[test]
    fn hermite_stays_monotone_on_monotone_data() {
        let xs: Vec<f64> = (0..=10).map(|i| i as f64).collect();
        // steep corner data that would overshoot without limiting
        let ys = vec![0.0, 0.0, 0.0, 0.1, 8.0, 10.0, 10.0, 10.0, 10.2, 10.3, 10.4];
        let ds = vec![0.0, 0.0, 0.05, 4.0, 5.0, 4.0, 0.0, 0.1, 0.15, 0.1, 0.1];
        let h = CubicHermite::new(xs, ys, ds).unwrap();
        let mut prev = h.eval(0.0);
        for i in 1..=1000 {
            let x = i as f64 * 0.01;
            let y = h.eval(x);
            assert!(y + 1e-12 >= prev, "not monotone at x = {x}");
            prev = y;
        }
    }

    #[test]
    fn periodic_spline_tracks_cosine_and_derivative() {
        let period = 12.0;
        let n = 96;
        let samples: Vec<f64> =
            (0..=n).map(|i| (2.0 * PI * i as f64 / n as f64).cos() * 0.02 + 0.06).collect();
        let s = PeriodicSpline::fit(period, &samples).unwrap();
        for i in 0..500 {
            let t = i as f64 * period / 500.0;
            let exact = 0.06 + 0.02 * (2.0 * PI * t / period).cos();
            let dexact = -0.02 * (2.0 * PI / period) * (2.0 * PI * t / period).sin();
            assert!((s.value(t) - exact).abs() < 1e-8, "value off at t = {t}");
            assert!((s.derivative(t) - dexact).abs() < 1e-7, "slope off at t = {t}");
        }
        // periodic continuation
        assert!((s.value(period + 1.0) - s.value(1.0)).abs() < 1e-14);
    }
}
