//! Sampled verification of the structural assumptions behind a model:
//! smoothness of the drift, periodicity, boundary equilibria, negative
//! boundary growth means, a decreasing release weight and a positive
//! capacity. Continuum hypotheses are checked on a configurable grid.

use serde::Serialize;

use crate::dynamics::{ModelFamily, ModelSpec};
use crate::error::{Error, Result};
use crate::numerics::quad;

/// One verified assumption with its computed witness value.
#[derive(Debug, Clone, Serialize)]
pub struct HypothesisCheck {
    pub name: &'static str,
    pub passed: bool,
    pub value: f64,
    pub detail: String,
}

/// Full report of the sampled hypothesis checks.
#[derive(Debug, Clone, Serialize)]
pub struct HypothesisReport {
    pub checks: Vec<HypothesisCheck>,
    /// Period-mean of the drift's p-derivative at p = 0.
    pub mean_dfdp_at_zero: f64,
    /// Period-mean of the drift's p-derivative at p = 1.
    pub mean_dfdp_at_one: f64,
    /// Richardson residuals of the two quadrature means.
    pub quadrature_residuals: (f64, f64),
    pub min_capacity: f64,
    pub all_passed: bool,
}

impl HypothesisReport {
    pub fn failed(&self) -> Vec<&HypothesisCheck> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }
}

/// Evaluate every sampled hypothesis on a `grid_n`-point grid (>= 16).
pub fn check_hypotheses(model: &ModelSpec, grid_n: usize) -> Result<HypothesisReport> {
    if grid_n < 16 {
        return Err(Error::Domain(format!("hypothesis grid needs >= 16 points, got {grid_n}")));
    }
    let period = model.period();
    let mut checks = Vec::new();

    // Smoothness proxy: analytic p-derivative against central differences.
    let h = 1e-6;
    let mut worst_fd = 0.0_f64;
    let mut smooth_ok = true;
    for i in 0..grid_n {
        let t = period * i as f64 / grid_n as f64;
        for j in 1..16 {
            let p = j as f64 / 16.0;
            let fd = (model.f(t, p + h) - model.f(t, p - h)) / (2.0 * h);
            let an = model.dfdp(t, p);
            let err = (fd - an).abs();
            worst_fd = worst_fd.max(err);
            if err > 1e-6_f64.max(1e-4 * an.abs()) {
                smooth_ok = false;
            }
        }
    }
    checks.push(HypothesisCheck {
        name: "drift smooth in p (derivative consistency)",
        passed: smooth_ok,
        value: worst_fd,
        detail: "max |central difference - analytic dfdp| on the grid".into(),
    });

    // Periodicity of the drift in t.
    let mut worst_per = 0.0_f64;
    for i in 0..grid_n {
        let t = period * i as f64 / grid_n as f64;
        for j in 0..=8 {
            let p = j as f64 / 8.0;
            worst_per = worst_per.max((model.f(t + period, p) - model.f(t, p)).abs());
        }
    }
    checks.push(HypothesisCheck {
        name: "drift is T-periodic in t",
        passed: worst_per < 1e-12,
        value: worst_per,
        detail: "max |f(t + T, p) - f(t, p)| on the grid".into(),
    });

    // Boundary equilibria.
    let mut worst_boundary = 0.0_f64;
    for i in 0..=grid_n {
        let t = period * i as f64 / grid_n as f64;
        worst_boundary = worst_boundary.max(model.f(t, 0.0).abs()).max(model.f(t, 1.0).abs());
    }
    checks.push(HypothesisCheck {
        name: "p = 0 and p = 1 are equilibria",
        passed: worst_boundary < 1e-13,
        value: worst_boundary,
        detail: "max |f(t, 0)|, |f(t, 1)| on the grid".into(),
    });

    // Negative boundary growth means, Richardson-checked Simpson quadrature.
    let (mean0, res0) = richardson_mean(|t| model.dfdp(t, 0.0), period, grid_n);
    let (mean1, res1) = richardson_mean(|t| model.dfdp(t, 1.0), period, grid_n);
    checks.push(HypothesisCheck {
        name: "mean growth rate at p = 0 is negative",
        passed: mean0 < 0.0,
        value: mean0,
        detail: format!("quadrature Richardson residual {res0:.3e}"),
    });
    checks.push(HypothesisCheck {
        name: "mean growth rate at p = 1 is negative",
        passed: mean1 < 0.0,
        value: mean1,
        detail: format!("quadrature Richardson residual {res1:.3e}"),
    });

    // Release weight: endpoints and monotonicity sample.
    let g0 = model.g(0.0);
    let g1 = model.g(1.0);
    let mut monotone = true;
    let mut prev = g0;
    for j in 1..=grid_n {
        let p = j as f64 / grid_n as f64;
        let cur = model.g(p);
        if cur >= prev {
            monotone = false;
        }
        prev = cur;
    }
    checks.push(HypothesisCheck {
        name: "release weight decreases from 1 to 0",
        passed: monotone && (g0 - 1.0).abs() < 1e-12 && g1.abs() < 1e-12,
        value: g0 - g1,
        detail: format!("g(0) = {g0}, g(1) = {g1}, strictly decreasing = {monotone}"),
    });

    // Positive capacity.
    let min_k = model.capacity().min_value();
    checks.push(HypothesisCheck {
        name: "carrying capacity stays positive",
        passed: min_k > 0.0,
        value: min_k,
        detail: "min K over one period".into(),
    });

    // Family-specific structural condition.
    if let ModelFamily::Wolbachia(params) = model.family() {
        let ratio = params.d1 * params.b2 / (params.d2 * params.b1);
        let ok = 1.0 - params.sh < ratio && ratio < 1.0;
        checks.push(HypothesisCheck {
            name: "incompatibility condition on sh",
            passed: ok,
            value: ratio,
            detail: format!("need 1 - sh = {} < {ratio} < 1", 1.0 - params.sh),
        });
    }

    let all_passed = checks.iter().all(|c| c.passed);
    Ok(HypothesisReport {
        checks,
        mean_dfdp_at_zero: mean0,
        mean_dfdp_at_one: mean1,
        quadrature_residuals: (res0, res1),
        min_capacity: min_k,
        all_passed,
    })
}

/// Composite Simpson mean over a period at n and 2n panels with Richardson
/// extrapolation; returns (extrapolated mean, level difference).
fn richardson_mean<F: FnMut(f64) -> f64>(mut f: F, period: f64, grid_n: usize) -> (f64, f64) {
    let n = grid_n.next_power_of_two().max(16);
    let coarse = quad::simpson(&mut f, 0.0, period, n) / period;
    let fine = quad::simpson(&mut f, 0.0, period, 2 * n) / period;
    let extrapolated = fine + (fine - coarse) / 15.0;
    (extrapolated, (fine - coarse).abs())
}
