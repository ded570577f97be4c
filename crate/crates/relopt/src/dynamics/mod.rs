//! Model families for seasonal bistable replacement dynamics.
//!
//! The scalar state p in [0, 1] is the proportion of the introduced type.
//! Its uncontrolled drift p' = f(t, p) is T-periodic in t and bistable in
//! p: the pure states 0 and 1 are attractive and an interior threshold
//! separates their basins. Controlled releases enter as u(t) g(p) / K(t)
//! with a decreasing weight g, g(0) = 1, g(1) = 0.

mod capacity;
mod hypotheses;

pub use capacity::{CapacityDocument, CarryingCapacity};
pub use hypotheses::{check_hypotheses, HypothesisCheck, HypothesisReport};

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::quad;
use crate::numerics::roots::bisect;

/// Evaluator of a (t, p) field.
pub type TimeStateFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;
/// Evaluator of a function of p (or of t) alone.
pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Demographic rates of the two-type competition model.
///
/// `b1`, `d1` describe the resident type; `b2`, `d2` the introduced type;
/// `sh` is the crossing incompatibility rate in [0, 1].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WolbachiaParams {
    pub b1: f64,
    pub b2: f64,
    pub d1: f64,
    pub d2: f64,
    pub sh: f64,
}

impl WolbachiaParams {
    pub fn new(b1: f64, b2: f64, d1: f64, d2: f64, sh: f64) -> Result<Self> {
        let p = WolbachiaParams { b1, b2, d1, d2, sh };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let WolbachiaParams { b1, b2, d1, d2, sh } = *self;
        if !(b1 > d1 && d1 > 0.0) || !(b2 > d2 && d2 > 0.0) {
            return Err(Error::InvalidParams(format!(
                "viability requires b1 > d1 > 0 and b2 > d2 > 0, got b1 = {b1}, d1 = {d1}, b2 = {b2}, d2 = {d2}"
            )));
        }
        if !(b1 > b2) || !(d1 <= d2) {
            return Err(Error::InvalidParams(format!(
                "introduced type must have reduced fecundity and life span: b1 > b2 and d1 <= d2, got b1 = {b1}, b2 = {b2}, d1 = {d1}, d2 = {d2}"
            )));
        }
        if !(0.0..=1.0).contains(&sh) {
            return Err(Error::InvalidParams(format!("sh must lie in [0, 1], got {sh}")));
        }
        let ratio = d1 * b2 / (d2 * b1);
        if !(1.0 - sh < ratio && ratio < 1.0) {
            return Err(Error::InvalidParams(format!(
                "incompatibility condition fails: need 1 - sh < d1*b2/(d2*b1) < 1, got 1 - sh = {} and ratio = {ratio}",
                1.0 - sh
            )));
        }
        Ok(())
    }

    /// Interior zero of the mean drift: (1/sh)(1 - d1 b2 / (d2 b1)).
    pub fn theta_bar(&self) -> f64 {
        (1.0 - self.d1 * self.b2 / (self.d2 * self.b1)) / self.sh
    }

    /// Interior threshold in the equal-death-rate limit: (b1 - b2)/(sh b1).
    pub fn theta_bar_equal_deaths(&self) -> f64 {
        (self.b1 - self.b2) / (self.sh * self.b1)
    }

    /// Closed form of the period-mean of the drift's p-derivative at p = 0.
    pub fn mean_dfdp_at_zero(&self) -> f64 {
        self.d1 * self.b2 / self.b1 - self.d2
    }

    /// Closed form of the period-mean of the drift's p-derivative at p = 1.
    pub fn mean_dfdp_at_one(&self) -> f64 {
        self.d2 * self.b1 / self.b2 * (1.0 - self.sh) - self.d1
    }

    /// Birth-rate denominator D(p) = b1 (1-p)(1 - sh p) + b2 p.
    pub fn denom(&self, p: f64) -> f64 {
        self.b1 * (1.0 - p) * (1.0 - self.sh * p) + self.b2 * p
    }
}

impl Default for WolbachiaParams {
    /// Baseline Aedes aegypti rates used across the examples.
    fn default() -> Self {
        WolbachiaParams { b1: 0.8, b2: 0.6, d1: 0.27, d2: 0.3, sh: 0.9 }
    }
}

/// Separated-variables drift f(t, p) = m(t) * ftilde(p) with a bistable
/// shape factor vanishing at 0, `theta_bar` and 1.
#[derive(Clone)]
pub struct SeparatedSpec {
    pub m: ScalarFn,
    pub ftilde: ScalarFn,
    pub theta_bar: f64,
}

impl fmt::Debug for SeparatedSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SeparatedSpec").field("theta_bar", &self.theta_bar).finish()
    }
}

impl SeparatedSpec {
    pub fn new(m: ScalarFn, ftilde: ScalarFn, theta_bar: f64) -> Self {
        SeparatedSpec { m, ftilde, theta_bar }
    }

    fn validate(&self, period: f64) -> Result<()> {
        if !(0.0 < self.theta_bar && self.theta_bar < 1.0) {
            return Err(Error::InvalidParams(format!(
                "theta_bar must lie in (0, 1), got {}",
                self.theta_bar
            )));
        }
        if (self.ftilde)(self.theta_bar).abs() >= 1e-12 {
            return Err(Error::InvalidParams(format!(
                "ftilde(theta_bar) = {} is not an interior zero",
                (self.ftilde)(self.theta_bar)
            )));
        }
        if (self.ftilde)(0.0).abs() > 1e-13 || (self.ftilde)(1.0).abs() > 1e-13 {
            return Err(Error::InvalidParams("ftilde must vanish at 0 and 1".into()));
        }
        let mean_m = quad::periodic_mean(|t| (self.m)(t), period, 1e-10);
        if !(mean_m > 0.0) {
            return Err(Error::InvalidParams(format!(
                "rate factor must have positive mean over a period, got {mean_m}"
            )));
        }
        // sampled bistable sign pattern
        for i in 1..64 {
            let p = self.theta_bar * i as f64 / 64.0;
            if (self.ftilde)(p) >= 0.0 && p > 1e-9 {
                return Err(Error::InvalidParams(format!(
                    "ftilde must be negative on (0, theta_bar); ftilde({p}) >= 0"
                )));
            }
        }
        for i in 1..64 {
            let p = self.theta_bar + (1.0 - self.theta_bar) * i as f64 / 64.0;
            if p < 1.0 - 1e-9 && (self.ftilde)(p) <= 0.0 {
                return Err(Error::InvalidParams(format!(
                    "ftilde must be positive on (theta_bar, 1); ftilde({p}) <= 0"
                )));
            }
        }
        let h = 1e-6;
        let slope = ((self.ftilde)(self.theta_bar + h) - (self.ftilde)(self.theta_bar - h)) / (2.0 * h);
        if !(slope > 0.0) {
            return Err(Error::InvalidParams(format!(
                "ftilde must cross upward at theta_bar, slope = {slope}"
            )));
        }
        Ok(())
    }
}

/// Provenance tag of a built model.
#[derive(Clone)]
pub enum ModelFamily {
    Wolbachia(WolbachiaParams),
    Separated(SeparatedSpec),
    Custom { label: String },
}

impl fmt::Debug for ModelFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelFamily::Wolbachia(p) => f.debug_tuple("Wolbachia").field(p).finish(),
            ModelFamily::Separated(s) => f.debug_tuple("Separated").field(s).finish(),
            ModelFamily::Custom { label } => f.debug_tuple("Custom").field(label).finish(),
        }
    }
}

/// A concrete bistable periodic model: drift, its p-derivative, release
/// weight, carrying capacity and period. Immutable once built; evaluators
/// are pure and thread-safe.
#[derive(Clone)]
pub struct ModelSpec {
    f: TimeStateFn,
    dfdp: TimeStateFn,
    g: ScalarFn,
    capacity: CarryingCapacity,
    family: ModelFamily,
}

impl fmt::Debug for ModelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ModelSpec")
            .field("family", &self.family)
            .field("period", &self.period())
            .finish()
    }
}

/// Serializable record of a model for reproducibility. Closures are
/// captured as sample arrays over one period / the unit interval.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelDocument {
    pub family: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub params: Option<WolbachiaParams>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta_bar: Option<f64>,
    pub capacity: CapacityDocument,
    pub drift_samples: Vec<Vec<f64>>,
    pub weight_samples: Vec<f64>,
}

impl ModelSpec {
    pub fn f(&self, t: f64, p: f64) -> f64 {
        (self.f)(t, p)
    }

    pub fn dfdp(&self, t: f64, p: f64) -> f64 {
        (self.dfdp)(t, p)
    }

    pub fn g(&self, p: f64) -> f64 {
        (self.g)(p)
    }

    pub fn capacity(&self) -> &CarryingCapacity {
        &self.capacity
    }

    pub fn period(&self) -> f64 {
        self.capacity.period()
    }

    pub fn family(&self) -> &ModelFamily {
        &self.family
    }

    /// The known interior threshold, when the family carries one.
    pub fn known_threshold(&self) -> Option<f64> {
        match &self.family {
            ModelFamily::Wolbachia(p) => {
                if p.d1 == p.d2 {
                    Some(p.theta_bar())
                } else {
                    None
                }
            }
            ModelFamily::Separated(s) => Some(s.theta_bar),
            ModelFamily::Custom { .. } => None,
        }
    }

    /// Custom family from user evaluators. The boundary-zero requirement is
    /// checked on a sample grid at construction.
    pub fn custom(
        label: impl Into<String>,
        f: TimeStateFn,
        dfdp: TimeStateFn,
        g: ScalarFn,
        capacity: CarryingCapacity,
    ) -> Result<Self> {
        let period = capacity.period();
        for i in 0..=64 {
            let t = period * i as f64 / 64.0;
            if f(t, 0.0).abs() > 1e-13 || f(t, 1.0).abs() > 1e-13 {
                return Err(Error::InvalidParams(format!(
                    "drift must vanish at p = 0 and p = 1; violated at t = {t}"
                )));
            }
        }
        Ok(ModelSpec { f, dfdp, g, capacity, family: ModelFamily::Custom { label: label.into() } })
    }

    pub fn document(&self) -> ModelDocument {
        let period = self.period();
        let nt = 64;
        let np = 64;
        let drift_samples: Vec<Vec<f64>> = (0..=nt)
            .map(|i| {
                let t = period * i as f64 / nt as f64;
                (0..=np).map(|j| self.f(t, j as f64 / np as f64)).collect()
            })
            .collect();
        let weight_samples: Vec<f64> = (0..=np).map(|j| self.g(j as f64 / np as f64)).collect();
        let (family, params, theta_bar) = match &self.family {
            ModelFamily::Wolbachia(p) => ("wolbachia".to_string(), Some(*p), None),
            ModelFamily::Separated(s) => ("separated".to_string(), None, Some(s.theta_bar)),
            ModelFamily::Custom { label } => (format!("custom:{label}"), None, None),
        };
        ModelDocument {
            family,
            params,
            theta_bar,
            capacity: self.capacity.document(),
            drift_samples,
            weight_samples,
        }
    }
}

/// Build the reduced two-type competition model on a periodic capacity.
///
/// The drift is f(t, p) = p (1-p) (alpha(t) p - beta(t)) / D(p) with
/// alpha(t) = sh (d2 b1 + (K'/K) b1),
/// beta(t) = d2 b1 - d1 b2 + (K'/K)(b1 - b2),
/// D(p) = b1 (1-p)(1 - sh p) + b2 p,
/// and the release weight is g(p) = b1 (1-p)(1 - sh p) / D(p).
pub fn build_wolbachia_model(params: WolbachiaParams, capacity: CarryingCapacity) -> Result<ModelSpec> {
    params.validate()?;
    let WolbachiaParams { b1, b2, d1, d2, sh } = params;
    let cap = capacity.clone();
    let alpha = move |t: f64| sh * (d2 * b1 + cap.log_derivative(t) * b1);
    let cap = capacity.clone();
    let beta = move |t: f64| d2 * b1 - d1 * b2 + cap.log_derivative(t) * (b1 - b2);

    let a = alpha.clone();
    let b = beta.clone();
    let f: TimeStateFn = Arc::new(move |t: f64, p: f64| {
        p * (1.0 - p) * (a(t) * p - b(t)) / (b1 * (1.0 - p) * (1.0 - sh * p) + b2 * p)
    });
    let dfdp: TimeStateFn = Arc::new(move |t: f64, p: f64| {
        let al = alpha(t);
        let be = beta(t);
        let d = b1 * (1.0 - p) * (1.0 - sh * p) + b2 * p;
        let n = p * (1.0 - p) * (al * p - be);
        let n_p = (1.0 - 2.0 * p) * (al * p - be) + p * (1.0 - p) * al;
        let d_p = b2 - b1 * (1.0 + sh - 2.0 * sh * p);
        (n_p * d - n * d_p) / (d * d)
    });
    let g: ScalarFn = Arc::new(move |p: f64| {
        let num = b1 * (1.0 - p) * (1.0 - sh * p);
        num / (num + b2 * p)
    });
    Ok(ModelSpec { f, dfdp, g, capacity, family: ModelFamily::Wolbachia(params) })
}

/// Build a separated-variables model f(t, p) = m(t) ftilde(p) carrying the
/// two-type release weight of `weight_params` (so releases behave exactly
/// as in the full model).
pub fn build_separated_model(
    spec: SeparatedSpec,
    weight_params: WolbachiaParams,
    capacity: CarryingCapacity,
) -> Result<ModelSpec> {
    spec.validate(capacity.period())?;
    let m = spec.m.clone();
    let ft = spec.ftilde.clone();
    let f: TimeStateFn = Arc::new(move |t: f64, p: f64| m(t) * ft(p));
    let m = spec.m.clone();
    let ft = spec.ftilde.clone();
    // shape factor derivative by central differences; the rate factor is exact
    let dfdp: TimeStateFn = Arc::new(move |t: f64, p: f64| {
        let h = 1e-6_f64.min(p.min(1.0 - p).max(1e-9));
        m(t) * (ft(p + h) - ft(p - h)) / (2.0 * h)
    });
    let WolbachiaParams { b1, b2, sh, .. } = weight_params;
    let g: ScalarFn = Arc::new(move |p: f64| {
        let num = b1 * (1.0 - p) * (1.0 - sh * p);
        num / (num + b2 * p)
    });
    Ok(ModelSpec { f, dfdp, g, capacity, family: ModelFamily::Separated(spec) })
}

/// Equal-death-rate competition model in separated form: m = alpha and
/// ftilde(p) = p (1-p)(p - theta_bar) / D(p).
pub fn wolbachia_separated(params: WolbachiaParams, capacity: CarryingCapacity) -> Result<ModelSpec> {
    params.validate()?;
    if params.d1 != params.d2 {
        return Err(Error::InvalidParams(format!(
            "separated form requires equal death rates, got d1 = {}, d2 = {}",
            params.d1, params.d2
        )));
    }
    let WolbachiaParams { b1, b2, d2, sh, .. } = params;
    let theta = params.theta_bar_equal_deaths();
    let cap = capacity.clone();
    let m: ScalarFn = Arc::new(move |t: f64| sh * (d2 * b1 + cap.log_derivative(t) * b1));
    let ftilde: ScalarFn = Arc::new(move |p: f64| {
        p * (1.0 - p) * (p - theta) / (b1 * (1.0 - p) * (1.0 - sh * p) + b2 * p)
    });
    build_separated_model(SeparatedSpec::new(m, ftilde, theta), params, capacity)
}

/// Period-mean of the drift at fixed p, by converged Simpson quadrature.
pub fn mean_nonlinearity(model: &ModelSpec, p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain(format!("proportion must lie in [0, 1], got {p}")));
    }
    Ok(quad::periodic_mean(|t| model.f(t, p), model.period(), 1e-11))
}

/// Closed form of the mean drift for the two-type family: the seasonal
/// K'/K terms integrate to zero over a period.
pub fn wolbachia_mean_nonlinearity(params: &WolbachiaParams, p: f64) -> f64 {
    let WolbachiaParams { b1, b2, d1, d2, sh } = *params;
    p * (1.0 - p) * (sh * d2 * b1 * p - d2 * b1 + d1 * b2) / params.denom(p)
}

/// Interior zero of the mean drift, by bisection on (delta, 1 - delta).
pub fn mean_threshold(model: &ModelSpec) -> Result<f64> {
    let delta = 1e-6;
    let fm = |p: f64| quad::periodic_mean(|t| model.f(t, p), model.period(), 1e-11);
    let (lo, hi) = (delta, 1.0 - delta);
    let (flo, fhi) = (fm(lo), fm(hi));
    if !(flo < 0.0 && fhi > 0.0) {
        return Err(Error::Domain(format!(
            "mean drift is not bistable on ({lo}, {hi}): f_m = {flo} and {fhi}"
        )));
    }
    Ok(bisect(fm, lo, hi, 1e-12))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reference_params() -> WolbachiaParams {
        WolbachiaParams::default()
    }

    fn reference_capacity() -> CarryingCapacity {
        CarryingCapacity::cosine(0.06, 0.02, 12.0).unwrap()
    }

    #[test]
    fn builds_reference_model_with_boundary_zeros() {
        let model = build_wolbachia_model(reference_params(), reference_capacity()).unwrap();
        for &t in &[0.0, 3.0, 7.1] {
            assert_eq!(model.f(t, 0.0), 0.0);
            assert_eq!(model.f(t, 1.0), 0.0);
        }
    }

    #[test]
    fn rejects_weak_incompatibility() {
        let params = WolbachiaParams { sh: 0.05, ..reference_params() };
        let err = build_wolbachia_model(params, reference_capacity()).unwrap_err();
        match err {
            Error::InvalidParams(msg) => assert!(msg.contains("incompatibility"), "{msg}"),
            other => panic!("expected InvalidParams, got {other:?}"),
        }
    }

    #[test]
    fn weight_at_half_matches_arithmetic() {
        // g(0.5) = (0.8*0.5*0.55) / (0.8*0.5*0.55 + 0.6*0.5) = 11/26
        let model = build_wolbachia_model(reference_params(), reference_capacity()).unwrap();
        assert!((model.g(0.5) - 11.0 / 26.0).abs() < 1e-15);
        assert!((model.g(0.5) - 0.423_076_923_076_923_1).abs() < 1e-12);
    }

    #[test]
    fn weight_endpoints() {
        let model = build_wolbachia_model(reference_params(), reference_capacity()).unwrap();
        assert!((model.g(0.0) - 1.0).abs() < 1e-15);
        assert!(model.g(1.0).abs() < 1e-15);
    }

    #[test]
    fn weight_strictly_decreasing_on_grid() {
        let model = build_wolbachia_model(reference_params(), reference_capacity()).unwrap();
        let mut prev = model.g(0.0);
        for i in 1..=64 {
            let p = i as f64 / 64.0;
            let cur = model.g(p);
            assert!(cur < prev, "g not strictly decreasing at p = {p}");
            prev = cur;
        }
    }

    #[test]
    fn drift_derivative_matches_finite_differences() {
        let model = build_wolbachia_model(reference_params(), reference_capacity()).unwrap();
        let h = 1e-6;
        for i in 0..=12 {
            let t = 12.0 * i as f64 / 12.0;
            for j in 1..20 {
                let p = j as f64 / 20.0;
                let fd = (model.f(t, p + h) - model.f(t, p - h)) / (2.0 * h);
                let an = model.dfdp(t, p);
                let tol = 1e-6_f64.max(1e-4 * an.abs());
                assert!((fd - an).abs() < tol, "dfdp mismatch at t = {t}, p = {p}: {an} vs {fd}");
            }
        }
    }

    #[test]
    fn mean_derivative_closed_forms() {
        let p = reference_params();
        assert!((p.mean_dfdp_at_zero() - (-0.0975)).abs() < 1e-15);
        assert!((p.mean_dfdp_at_one() - (-0.23)).abs() < 1e-15);
        // quadrature agrees with the closed forms
        let model = build_wolbachia_model(p, reference_capacity()).unwrap();
        let m0 = quad::periodic_mean(|t| model.dfdp(t, 0.0), 12.0, 1e-12);
        let m1 = quad::periodic_mean(|t| model.dfdp(t, 1.0), 12.0, 1e-12);
        assert!((m0 - (-0.0975)).abs() < 1e-8, "mean at 0: {m0}");
        assert!((m1 - (-0.23)).abs() < 1e-8, "mean at 1: {m1}");
    }

    #[test]
    fn mean_drift_threshold_and_signs() {
        let params = reference_params();
        let model = build_wolbachia_model(params, reference_capacity()).unwrap();
        let theta = params.theta_bar();
        assert!((theta - 13.0 / 36.0).abs() < 1e-15);
        assert!((theta - 0.361_111_111_1).abs() < 1e-9);
        assert!(mean_nonlinearity(&model, 0.0).unwrap().abs() < 1e-14);
        assert!(mean_nonlinearity(&model, 1.0).unwrap().abs() < 1e-14);
        assert!(mean_nonlinearity(&model, theta).unwrap().abs() < 1e-10);
        assert!(mean_nonlinearity(&model, 0.2).unwrap() < 0.0);
        assert!(mean_nonlinearity(&model, 0.5).unwrap() > 0.0);
        let root = mean_threshold(&model).unwrap();
        assert!((root - theta).abs() < 1e-10, "bisection root {root} vs {theta}");
        assert!(mean_nonlinearity(&model, 1.5).is_err());
    }

    #[test]
    fn closed_form_mean_drift_matches_quadrature() {
        let params = reference_params();
        let model = build_wolbachia_model(params, reference_capacity()).unwrap();
        for i in 0..=32 {
            let p = i as f64 / 32.0;
            let closed = wolbachia_mean_nonlinearity(&params, p);
            let quadv = mean_nonlinearity(&model, p).unwrap();
            assert!((closed - quadv).abs() < 1e-9, "p = {p}: {closed} vs {quadv}");
        }
    }

    #[test]
    fn cubic_normal_form_separated_model() {
        let spec = SeparatedSpec::new(
            Arc::new(|_| 1.0),
            Arc::new(|p: f64| p * (1.0 - p) * (p - 0.4)),
            0.4,
        );
        let model =
            build_separated_model(spec, reference_params(), reference_capacity()).unwrap();
        assert_eq!(model.known_threshold(), Some(0.4));
        assert_eq!(model.f(3.0, 0.4), 0.0);
    }

    #[test]
    fn equal_death_separated_form() {
        let params = WolbachiaParams { d1: 0.3, d2: 0.3, ..reference_params() };
        let model = wolbachia_separated(params, reference_capacity()).unwrap();
        let theta = model.known_threshold().unwrap();
        assert!((theta - 5.0 / 18.0).abs() < 1e-15);
        assert!((theta - 0.277_777_8).abs() < 1e-7);
        // m = alpha: check against the general builder's drift
        let general = build_wolbachia_model(params, reference_capacity()).unwrap();
        for i in 0..24 {
            let t = 12.0 * i as f64 / 24.0;
            for j in 1..10 {
                let p = j as f64 / 10.0;
                assert!(
                    (model.f(t, p) - general.f(t, p)).abs() < 1e-13,
                    "separated drift differs at t = {t}, p = {p}"
                );
            }
        }
    }

    #[test]
    fn zero_mean_rate_factor_is_rejected() {
        let spec = SeparatedSpec::new(
            Arc::new(|t: f64| (2.0 * std::f64::consts::PI * t / 12.0).sin()),
            Arc::new(|p: f64| p * (1.0 - p) * (p - 0.4)),
            0.4,
        );
        assert!(build_separated_model(spec, reference_params(), reference_capacity()).is_err());
    }

    #[test]
    fn incompatibility_condition_tracks_mean_derivative_signs() {
        // the structural condition holds iff both boundary means are negative
        use rand::{Rng, SeedableRng};
        let mut rng = rand::rngs::StdRng::seed_from_u64(42);
        let mut seen_valid = 0;
        let mut seen_invalid = 0;
        for _ in 0..400 {
            let b1: f64 = rng.gen_range(0.3..1.5);
            let b2: f64 = rng.gen_range(0.1..b1);
            let d2: f64 = rng.gen_range(0.05..b2.min(0.5));
            let d1: f64 = rng.gen_range(0.04..d2.min(b1));
            let sh = rng.gen_range(0.01..1.0);
            let p = WolbachiaParams { b1, b2, d1, d2, sh };
            let ratio = d1 * b2 / (d2 * b1);
            let condition = 1.0 - sh < ratio && ratio < 1.0;
            let means_negative = p.mean_dfdp_at_zero() < 0.0 && p.mean_dfdp_at_one() < 0.0;
            assert_eq!(condition, means_negative, "params {p:?}");
            if condition {
                seen_valid += 1;
            } else {
                seen_invalid += 1;
            }
        }
        assert!(seen_valid > 20 && seen_invalid > 20, "sampling covered both branches");
    }

    #[test]
    fn document_round_trips_capacity() {
        let model = build_wolbachia_model(reference_params(), reference_capacity()).unwrap();
        let doc = model.document();
        assert_eq!(doc.family, "wolbachia");
        let json = serde_json::to_string(&doc).unwrap();
        let back: ModelDocument = serde_json::from_str(&json).unwrap();
        let cap = CarryingCapacity::from_document(&back.capacity).unwrap();
        assert!((cap.min_value() - 0.04).abs() < 1e-15);
        assert_eq!(back.params.unwrap(), reference_params());
    }
}
