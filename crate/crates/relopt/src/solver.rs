//! Embedded Dormand-Prince 5(4) integrator with continuous (dense) output
//! and PI step-size control. Fixed-dimension state via const generics; the
//! crate only needs N = 1 (proportion) and N = 2 (compartments).

use crate::error::{Error, Result};

// Dormand-Prince tableau.
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

// Error coefficients (5th minus embedded 4th order).
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

// Dense-output coefficients.
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

// Step controller.
const SAFETY: f64 = 0.9;
const BETA: f64 = 0.04;
const EXPO1: f64 = 0.2 - BETA * 0.75;
const FAC_SHRINK_MAX: f64 = 0.2; // h never shrinks by more than x5
const FAC_GROW_MAX: f64 = 10.0; // h never grows by more than x10

/// Integration controls.
#[derive(Debug, Clone, Copy)]
pub(crate) struct SolveOpts {
    pub rtol: f64,
    pub atol: f64,
    /// Hard cap on the step size (breakpoint-local pulse resolution).
    pub h_max: f64,
}

impl SolveOpts {
    pub fn new(rtol: f64, atol: f64) -> Self {
        SolveOpts { rtol, atol, h_max: f64::INFINITY }
    }
}

/// One accepted step with its interpolation polynomial.
#[derive(Debug, Clone)]
pub(crate) struct StepRecord<const N: usize> {
    pub t: f64,
    pub h: f64,
    /// Quartic Hermite-type coefficients, one set per component.
    pub cont: [[f64; 5]; N],
}

impl<const N: usize> StepRecord<N> {
    pub fn eval(&self, t: f64) -> [f64; N] {
        let theta = ((t - self.t) / self.h).clamp(0.0, 1.0);
        let theta1 = 1.0 - theta;
        let mut out = [0.0; N];
        for i in 0..N {
            let c = &self.cont[i];
            out[i] = c[0] + theta * (c[1] + theta1 * (c[2] + theta * (c[3] + theta1 * c[4])));
        }
        out
    }
}

/// Dense solution over one smooth span.
#[derive(Debug, Clone)]
pub(crate) struct DenseSolution<const N: usize> {
    pub t0: f64,
    pub t1: f64,
    pub nodes: Vec<(f64, [f64; N])>,
    pub steps: Vec<StepRecord<N>>,
    pub max_step: f64,
}

impl<const N: usize> DenseSolution<N> {
    pub fn eval(&self, t: f64) -> [f64; N] {
        if self.steps.is_empty() {
            return self.nodes[0].1;
        }
        let idx = match self
            .steps
            .binary_search_by(|s| s.t.partial_cmp(&t).unwrap())
        {
            Ok(i) => i,
            Err(0) => 0,
            Err(i) => i - 1,
        };
        self.steps[idx.min(self.steps.len() - 1)].eval(t)
    }

}

/// Per-step monitor: may project the state (boundary clamping) or abort.
pub(crate) trait StepMonitor<const N: usize> {
    fn inspect(&mut self, t: f64, y: &mut [f64; N]) -> Result<()>;
}

/// Monitor that accepts everything.
#[cfg(test)]
pub(crate) struct NoMonitor;

#[cfg(test)]
impl<const N: usize> StepMonitor<N> for NoMonitor {
    fn inspect(&mut self, _t: f64, _y: &mut [f64; N]) -> Result<()> {
        Ok(())
    }
}

fn error_norm<const N: usize>(err: &[f64; N], y0: &[f64; N], y1: &[f64; N], opts: &SolveOpts) -> f64 {
    let mut acc = 0.0;
    for i in 0..N {
        let sc = opts.atol + opts.rtol * y0[i].abs().max(y1[i].abs());
        let e = err[i] / sc;
        acc += e * e;
    }
    (acc / N as f64).sqrt()
}

fn initial_step<const N: usize, F: Fn(f64, &[f64; N]) -> [f64; N]>(
    f: &F,
    t0: f64,
    y0: &[f64; N],
    f0: &[f64; N],
    span: f64,
    opts: &SolveOpts,
) -> f64 {
    let sc: Vec<f64> = (0..N).map(|i| opts.atol + opts.rtol * y0[i].abs()).collect();
    let d0 = (0..N).map(|i| (y0[i] / sc[i]).powi(2)).sum::<f64>().sqrt() / (N as f64).sqrt();
    let d1 = (0..N).map(|i| (f0[i] / sc[i]).powi(2)).sum::<f64>().sqrt() / (N as f64).sqrt();
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 }.min(span);
    let mut y1 = *y0;
    for i in 0..N {
        y1[i] += h0 * f0[i];
    }
    let f1 = f(t0 + h0, &y1);
    let d2 = (0..N)
        .map(|i| ((f1[i] - f0[i]) / sc[i]).powi(2))
        .sum::<f64>()
        .sqrt()
        / (N as f64).sqrt()
        / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    (100.0 * h0).min(h1).min(span).min(opts.h_max)
}

/// Integrate y' = f(t, y) from `t_start` to `t_end` (t_end > t_start).
/// End points are hit exactly (the final node time is bitwise `t_end`).
pub(crate) fn integrate<const N: usize, F, M>(
    f: F,
    t_start: f64,
    t_end: f64,
    y_start: [f64; N],
    opts: &SolveOpts,
    monitor: &mut M,
) -> Result<DenseSolution<N>>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
    M: StepMonitor<N>,
{
    debug_assert!(t_end >= t_start);
    let mut nodes = vec![(t_start, y_start)];
    let mut steps = Vec::new();
    let mut max_step = 0.0_f64;
    if t_end == t_start {
        return Ok(DenseSolution { t0: t_start, t1: t_end, nodes, steps, max_step });
    }

    let span = t_end - t_start;
    let mut t = t_start;
    let mut y = y_start;
    let mut k1 = f(t, &y);
    let mut h = initial_step(&f, t, &y, &k1, span, opts);
    let mut facold = 1e-4_f64;
    let mut rejected = false;
    let uround = f64::EPSILON;

    loop {
        if h < uround * 32.0 * t.abs().max(1.0) {
            return Err(Error::StepFailure { t, h });
        }
        h = h.min(opts.h_max);
        let mut last = false;
        if t + h >= t_end - uround * 8.0 * t_end.abs().max(1.0) {
            h = t_end - t;
            last = true;
        }

        // stages
        let mut yt = [0.0; N];
        for i in 0..N {
            yt[i] = y[i] + h * A21 * k1[i];
        }
        let k2 = f(t + C2 * h, &yt);
        for i in 0..N {
            yt[i] = y[i] + h * (A31 * k1[i] + A32 * k2[i]);
        }
        let k3 = f(t + C3 * h, &yt);
        for i in 0..N {
            yt[i] = y[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
        }
        let k4 = f(t + C4 * h, &yt);
        for i in 0..N {
            yt[i] = y[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
        }
        let k5 = f(t + C5 * h, &yt);
        for i in 0..N {
            yt[i] =
                y[i] + h * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
        }
        let k6 = f(t + h, &yt);
        let mut y_new = [0.0; N];
        for i in 0..N {
            y_new[i] = y[i]
                + h * (A71 * k1[i] + A73 * k3[i] + A74 * k4[i] + A75 * k5[i] + A76 * k6[i]);
        }
        let t_new = if last { t_end } else { t + h };
        let k7 = f(t_new, &y_new);

        let mut err_vec = [0.0; N];
        for i in 0..N {
            err_vec[i] = h
                * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
        }
        let err = error_norm(&err_vec, &y, &y_new, opts);

        if err <= 1.0 {
            // accept: build the interpolation polynomial before clamping
            let mut cont = [[0.0; 5]; N];
            for i in 0..N {
                let ydiff = y_new[i] - y[i];
                let bspl = h * k1[i] - ydiff;
                cont[i][0] = y[i];
                cont[i][1] = ydiff;
                cont[i][2] = bspl;
                cont[i][3] = ydiff - h * k7[i] - bspl;
                cont[i][4] = h
                    * (D1 * k1[i]
                        + D3 * k3[i]
                        + D4 * k4[i]
                        + D5 * k5[i]
                        + D6 * k6[i]
                        + D7 * k7[i]);
            }
            steps.push(StepRecord { t, h: t_new - t, cont });
            max_step = max_step.max(t_new - t);

            let mut y_acc = y_new;
            monitor.inspect(t_new, &mut y_acc)?;
            let clamped = (0..N).any(|i| y_acc[i] != y_new[i]);

            nodes.push((t_new, y_acc));
            t = t_new;
            y = y_acc;
            k1 = if clamped { f(t, &y) } else { k7 };

            if last {
                break;
            }
            let fac11 = err.max(1e-10).powf(EXPO1);
            let mut fac = fac11 / facold.powf(BETA);
            fac = (fac / SAFETY).clamp(1.0 / FAC_GROW_MAX, 1.0 / FAC_SHRINK_MAX);
            let mut h_new = h / fac;
            if rejected {
                h_new = h_new.min(h);
            }
            facold = err.max(1e-4);
            rejected = false;
            h = h_new;
        } else {
            rejected = true;
            let fac11 = err.powf(EXPO1);
            h /= (fac11 / SAFETY).min(1.0 / FAC_SHRINK_MAX);
        }
    }

    Ok(DenseSolution { t0: t_start, t1: t_end, nodes, steps, max_step })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay_accuracy_and_dense_output() {
        let opts = SolveOpts::new(1e-10, 1e-10);
        let sol = integrate(
            |_t, y: &[f64; 1]| [-0.7 * y[0]],
            0.0,
            10.0,
            [1.0],
            &opts,
            &mut NoMonitor,
        )
        .unwrap();
        assert_eq!(sol.nodes.last().unwrap().0, 10.0);
        for i in 0..=200 {
            let t = 10.0 * i as f64 / 200.0;
            let exact = (-0.7 * t).exp();
            let got = sol.eval(t)[0];
            assert!((got - exact).abs() < 1e-8, "t = {t}: {got} vs {exact}");
        }
    }

    #[test]
    fn two_dimensional_oscillator_conserves_energy() {
        let opts = SolveOpts::new(1e-11, 1e-11);
        let sol = integrate(
            |_t, y: &[f64; 2]| [y[1], -y[0]],
            0.0,
            20.0 * std::f64::consts::PI,
            [1.0, 0.0],
            &opts,
            &mut NoMonitor,
        )
        .unwrap();
        let end = sol.nodes.last().unwrap().1;
        let energy = end[0] * end[0] + end[1] * end[1];
        assert!((energy - 1.0).abs() < 1e-8);
        assert!((end[0] - 1.0).abs() < 1e-7);
    }

    #[test]
    fn equilibrium_start_is_preserved_exactly() {
        let opts = SolveOpts::new(1e-9, 1e-9);
        let sol = integrate(
            |_t, y: &[f64; 1]| [y[0] * (1.0 - y[0]) * (y[0] - 0.3)],
            0.0,
            50.0,
            [0.0],
            &opts,
            &mut NoMonitor,
        )
        .unwrap();
        for &(_, y) in &sol.nodes {
            assert_eq!(y[0], 0.0);
        }
    }

    #[test]
    fn tolerance_controls_error() {
        let rhs = |t: f64, y: &[f64; 1]| [y[0] * (0.5 * t).sin()];
        let exact = |t: f64| ((2.0 - 2.0 * (0.5 * t).cos()) as f64).exp();
        for (tol, budget) in [(1e-6, 1e-4), (1e-9, 1e-7)] {
            let opts = SolveOpts::new(tol, tol);
            let sol = integrate(rhs, 0.0, 12.0, [1.0], &opts, &mut NoMonitor).unwrap();
            let got = sol.nodes.last().unwrap().1[0];
            assert!(
                (got - exact(12.0)).abs() < budget * exact(12.0),
                "tol {tol}: {got} vs {}",
                exact(12.0)
            );
        }
    }
}
