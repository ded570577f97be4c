//! Quadrature rules: composite Simpson with panel doubling and a small
//! adaptive Gauss-Legendre scheme for graded integrands.

/// Result of a converged quadrature run.
#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: f64,
    /// Difference between the last two refinement levels.
    pub error_estimate: f64,
    /// Panels used at the final level.
    pub panels: usize,
}

/// Composite Simpson rule with `n` panels (`n` even).
pub fn simpson<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, n: usize) -> f64 {
    debug_assert!(n >= 2 && n % 2 == 0);
    let h = (b - a) / n as f64;
    let mut sum = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * f(a + i as f64 * h);
    }
    sum * h / 3.0
}

/// Composite Simpson with doubling until two successive levels agree to
/// `rel_tol` (relative, with a small absolute floor for vanishing integrals).
pub fn simpson_converged<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    rel_tol: f64,
) -> QuadResult {
    let mut n = 16usize;
    let mut prev = simpson(&mut f, a, b, n);
    loop {
        n *= 2;
        let cur = simpson(&mut f, a, b, n);
        let diff = (cur - prev).abs();
        if diff <= rel_tol * cur.abs().max(1e-12) || n >= 1 << 22 {
            return QuadResult { value: cur, error_estimate: diff, panels: n };
        }
        prev = cur;
    }
}

/// Mean value of a `period`-periodic function over one period.
pub fn periodic_mean<F: FnMut(f64) -> f64>(f: F, period: f64, rel_tol: f64) -> f64 {
    simpson_converged(f, 0.0, period, rel_tol).value / period
}

// 7-point Gauss-Legendre nodes and weights on [-1, 1].
const GL7_X: [f64; 7] = [
    -0.9491079123427585,
    -0.7415311855993945,
    -0.4058451513773972,
    0.0,
    0.4058451513773972,
    0.7415311855993945,
    0.9491079123427585,
];
const GL7_W: [f64; 7] = [
    0.1294849661688697,
    0.2797053914892766,
    0.3818300505051189,
    0.4179591836734694,
    0.3818300505051189,
    0.2797053914892766,
    0.1294849661688697,
];

/// 7-point Gauss-Legendre rule on [a, b].
pub fn gauss7<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64) -> f64 {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut sum = 0.0;
    for (&x, &w) in GL7_X.iter().zip(GL7_W.iter()) {
        sum += w * f(mid + half * x);
    }
    sum * half
}

/// Adaptive Gauss-Legendre: bisects until the whole-panel estimate agrees
/// with the two half-panel estimates to `tol` (absolute per panel).
pub fn adaptive_gauss<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64, tol: f64) -> f64 {
    fn recurse<F: FnMut(f64) -> f64>(
        f: &mut F,
        a: f64,
        b: f64,
        whole: f64,
        tol: f64,
        depth: usize,
    ) -> f64 {
        let mid = 0.5 * (a + b);
        let left = gauss7(&mut *f, a, mid);
        let right = gauss7(&mut *f, mid, b);
        if (left + right - whole).abs() <= tol || depth >= 48 {
            left + right
        } else {
            recurse(f, a, mid, left, 0.5 * tol, depth + 1)
                + recurse(f, mid, b, right, 0.5 * tol, depth + 1)
        }
    }
    let whole = gauss7(&mut *f, a, b);
    recurse(f, a, b, whole, tol, 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn simpson_integrates_sin_squared() {
        // integral of sin^2 over [0, 2pi] is pi
        let q = simpson_converged(|t: f64| t.sin() * t.sin(), 0.0, 2.0 * PI, 1e-12);
        assert!((q.value - PI).abs() < 1e-10, "got {}", q.value);
    }

    #[test]
    fn periodic_mean_of_log_derivative_vanishes() {
        // (K'/K) integrates to zero over a period for positive periodic K
        let period = 12.0;
        let k = |t: f64| 0.06 + 0.02 * (2.0 * PI * t / period).cos();
        let kp = |t: f64| -0.02 * (2.0 * PI / period) * (2.0 * PI * t / period).sin();
        let m = periodic_mean(|t| kp(t) / k(t), period, 1e-12);
        assert!(m.abs() < 1e-12, "mean K'/K = {m}");
    }

    #[test]
    fn adaptive_gauss_handles_grading() {
        // integral of 1/sqrt(x) on [0, 1] = 2, integrable endpoint singularity
        let mut f = |x: f64| 1.0 / x.max(1e-300).sqrt();
        let v = adaptive_gauss(&mut f, 1e-12, 1.0, 1e-12);
        assert!((v - (2.0 - 2e-6)).abs() < 1e-7, "got {v}");
    }
}
