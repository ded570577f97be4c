//! Periodic environmental carrying capacity.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::interp::PeriodicSpline;
use crate::numerics::minimize::golden_section;

/// T-periodic carrying capacity K(t), strictly positive, with an evaluable
/// derivative. Either an analytic cosine profile or a periodic cubic spline
/// through uniform samples.
#[derive(Debug, Clone)]
pub struct CarryingCapacity {
    kind: Kind,
    period: f64,
}

#[derive(Debug, Clone)]
enum Kind {
    Cosine { k0: f64, amplitude: f64 },
    Sampled { spline: PeriodicSpline, samples: Vec<f64> },
}

/// Serializable description of a capacity profile.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum CapacityDocument {
    Cosine { k0: f64, amplitude: f64, period: f64 },
    Sampled { period: f64, samples: Vec<f64> },
}

impl CarryingCapacity {
    /// K(t) = k0 + amplitude * cos(2 pi t / period). Requires
    /// k0 > amplitude >= 0 so that min K > 0.
    pub fn cosine(k0: f64, amplitude: f64, period: f64) -> Result<Self> {
        if !(period > 0.0) || !period.is_finite() {
            return Err(Error::InvalidParams(format!("period must be positive, got {period}")));
        }
        if !(amplitude >= 0.0) || !(k0 > amplitude) {
            return Err(Error::InvalidParams(format!(
                "cosine capacity needs k0 > amplitude >= 0, got k0 = {k0}, amplitude = {amplitude}"
            )));
        }
        Ok(CarryingCapacity { kind: Kind::Cosine { k0, amplitude }, period })
    }

    /// Periodic spline through uniform samples over one period. The last
    /// sample must repeat the first, and all samples must be positive.
    pub fn sampled(period: f64, samples: Vec<f64>) -> Result<Self> {
        if samples.iter().any(|&k| !(k > 0.0)) {
            return Err(Error::InvalidParams("all capacity samples must be strictly positive".into()));
        }
        if samples.len() < 2
            || (samples[0] - samples[samples.len() - 1]).abs() > 1e-12 * samples[0].abs()
        {
            return Err(Error::InvalidParams(
                "capacity samples must close the period (first == last)".into(),
            ));
        }
        let spline = PeriodicSpline::fit(period, &samples)
            .map_err(|e| Error::InvalidParams(e.to_string()))?;
        Ok(CarryingCapacity { kind: Kind::Sampled { spline, samples }, period })
    }

    pub fn value(&self, t: f64) -> f64 {
        match &self.kind {
            Kind::Cosine { k0, amplitude } => {
                k0 + amplitude * (2.0 * PI * t / self.period).cos()
            }
            Kind::Sampled { spline, .. } => spline.value(t),
        }
    }

    pub fn derivative(&self, t: f64) -> f64 {
        match &self.kind {
            Kind::Cosine { amplitude, .. } => {
                let w = 2.0 * PI / self.period;
                -amplitude * w * (w * t).sin()
            }
            Kind::Sampled { spline, .. } => spline.derivative(t),
        }
    }

    /// K'(t) / K(t), the seasonal growth-rate correction.
    pub fn log_derivative(&self, t: f64) -> f64 {
        self.derivative(t) / self.value(t)
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn min_value(&self) -> f64 {
        match &self.kind {
            Kind::Cosine { k0, amplitude } => k0 - amplitude,
            Kind::Sampled { .. } => self.extremum(false).1,
        }
    }

    pub fn max_value(&self) -> f64 {
        match &self.kind {
            Kind::Cosine { k0, amplitude } => k0 + amplitude,
            Kind::Sampled { .. } => self.extremum(true).1,
        }
    }

    /// All minimizers of K in [0, T), refined to 1e-9 * T.
    pub fn minimizers(&self) -> Vec<f64> {
        match &self.kind {
            Kind::Cosine { amplitude, .. } => {
                if *amplitude == 0.0 {
                    // constant capacity: every time minimizes; report 0
                    vec![0.0]
                } else {
                    vec![0.5 * self.period]
                }
            }
            Kind::Sampled { .. } => {
                let n = 512;
                let vals: Vec<f64> =
                    (0..n).map(|i| self.value(i as f64 * self.period / n as f64)).collect();
                let global = vals.iter().cloned().fold(f64::INFINITY, f64::min);
                let mut out = Vec::new();
                for i in 0..n {
                    let prev = vals[(i + n - 1) % n];
                    let next = vals[(i + 1) % n];
                    if vals[i] <= prev && vals[i] <= next && vals[i] <= global * (1.0 + 1e-6) {
                        let a = (i as f64 - 1.0) * self.period / n as f64;
                        let b = (i as f64 + 1.0) * self.period / n as f64;
                        let (t, _) =
                            golden_section(|t| self.value(t), a, b, 1e-9 * self.period);
                        out.push(t.rem_euclid(self.period));
                    }
                }
                out.sort_by(|a, b| a.partial_cmp(b).unwrap());
                out.dedup_by(|a, b| (*a - *b).abs() < 1e-6 * self.period);
                out
            }
        }
    }

    fn extremum(&self, max: bool) -> (f64, f64) {
        let n = 512;
        let sign = if max { -1.0 } else { 1.0 };
        let mut best = (0.0, self.value(0.0));
        for i in 0..n {
            let t = i as f64 * self.period / n as f64;
            let v = self.value(t);
            if sign * v < sign * best.1 {
                best = (t, v);
            }
        }
        let h = self.period / n as f64;
        let (t, v) = golden_section(
            |t| sign * self.value(t),
            best.0 - h,
            best.0 + h,
            1e-10 * self.period,
        );
        (t, sign * v)
    }

    pub fn document(&self) -> CapacityDocument {
        match &self.kind {
            Kind::Cosine { k0, amplitude } => CapacityDocument::Cosine {
                k0: *k0,
                amplitude: *amplitude,
                period: self.period,
            },
            Kind::Sampled { samples, .. } => {
                CapacityDocument::Sampled { period: self.period, samples: samples.clone() }
            }
        }
    }

    pub fn from_document(doc: &CapacityDocument) -> Result<Self> {
        match doc {
            CapacityDocument::Cosine { k0, amplitude, period } => {
                Self::cosine(*k0, *amplitude, *period)
            }
            CapacityDocument::Sampled { period, samples } => {
                Self::sampled(*period, samples.clone())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cosine_extremes_and_minimizer() {
        let k = CarryingCapacity::cosine(0.06, 0.02, 12.0).unwrap();
        assert!((k.min_value() - 0.04).abs() < 1e-15);
        assert!((k.max_value() - 0.08).abs() < 1e-15);
        assert_eq!(k.minimizers(), vec![6.0]);
        assert!((k.value(0.0) - 0.08).abs() < 1e-15);
        assert!((k.value(6.0) - 0.04).abs() < 1e-15);
    }

    #[test]
    fn rejects_non_positive_minimum() {
        assert!(CarryingCapacity::cosine(0.02, 0.02, 12.0).is_err());
        assert!(CarryingCapacity::cosine(0.02, 0.03, 12.0).is_err());
        assert!(CarryingCapacity::sampled(12.0, vec![1.0, -0.5, 1.0]).is_err());
    }

    #[test]
    fn sampled_capacity_matches_cosine_profile() {
        let period = 12.0;
        let n = 128;
        let samples: Vec<f64> = (0..=n)
            .map(|i| 0.06 + 0.02 * (2.0 * PI * i as f64 / n as f64).cos())
            .collect();
        let k = CarryingCapacity::sampled(period, samples).unwrap();
        let exact = CarryingCapacity::cosine(0.06, 0.02, period).unwrap();
        for i in 0..200 {
            let t = i as f64 * period / 200.0;
            assert!((k.value(t) - exact.value(t)).abs() < 1e-8);
            assert!((k.log_derivative(t) - exact.log_derivative(t)).abs() < 1e-6);
        }
        let mins = k.minimizers();
        assert_eq!(mins.len(), 1);
        assert!((mins[0] - 6.0).abs() < 1e-3);
        assert!((k.min_value() - 0.04).abs() < 1e-8);
    }

    #[test]
    fn sampled_requires_closed_period() {
        let samples = vec![1.0, 1.2, 1.1, 1.05];
        assert!(CarryingCapacity::sampled(12.0, samples).is_err());
    }
}
