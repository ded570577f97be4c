//! Carathéodory integration of the controlled scalar equation
//! p' = f(t, p) + u(t) g(p) / K(t) with piecewise-constant release rates,
//! plus the unreduced two-compartment system used to validate the scalar
//! reduction. Integration restarts exactly at every control breakpoint, so
//! no step straddles a discontinuity of u.

use crate::dynamics::{CarryingCapacity, ModelSpec, WolbachiaParams};
use crate::error::{Error, Result};
use crate::solver::{self, DenseSolution, SolveOpts, StepMonitor};

pub const TOL_MIN: f64 = 1e-13;
pub const TOL_MAX: f64 = 1e-3;

/// One constant-rate release window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlPiece {
    pub start: f64,
    pub end: f64,
    pub rate: f64,
}

/// Piecewise-constant release rate; zero outside all pieces.
#[derive(Debug, Clone, Default)]
pub struct ControlSignal {
    pieces: Vec<ControlPiece>,
}

impl ControlSignal {
    pub fn zero() -> Self {
        ControlSignal { pieces: Vec::new() }
    }

    pub fn new(mut pieces: Vec<ControlPiece>) -> Result<Self> {
        pieces.sort_by(|a, b| a.start.partial_cmp(&b.start).unwrap());
        for p in &pieces {
            if !(p.start < p.end) || !p.rate.is_finite() || p.rate < 0.0 {
                return Err(Error::Domain(format!(
                    "control piece needs start < end and finite rate >= 0, got [{}, {}] at rate {}",
                    p.start, p.end, p.rate
                )));
            }
        }
        if pieces.windows(2).any(|w| w[1].start < w[0].end) {
            return Err(Error::Domain("control pieces must not overlap".into()));
        }
        Ok(ControlSignal { pieces })
    }

    /// Single pulse delivering `amount` over [start, start + duration].
    pub fn pulse(start: f64, duration: f64, amount: f64) -> Result<Self> {
        Self::new(vec![ControlPiece { start, end: start + duration, rate: amount / duration }])
    }

    pub fn pieces(&self) -> &[ControlPiece] {
        &self.pieces
    }

    pub fn rate_at(&self, t: f64) -> f64 {
        for p in &self.pieces {
            if t >= p.start && t < p.end {
                return p.rate;
            }
        }
        0.0
    }

    /// Piece boundaries strictly inside (a, b), ascending.
    fn breakpoints_in(&self, a: f64, b: f64) -> Vec<f64> {
        let mut out = Vec::new();
        for p in &self.pieces {
            for t in [p.start, p.end] {
                if t > a && t < b {
                    out.push(t);
                }
            }
        }
        out.sort_by(|x, y| x.partial_cmp(y).unwrap());
        out.dedup();
        out
    }

    /// Split [a, b] into maximal spans on which the rate is constant.
    fn segments(&self, a: f64, b: f64) -> Vec<(f64, f64, f64, f64)> {
        let mut cuts = vec![a];
        cuts.extend(self.breakpoints_in(a, b));
        cuts.push(b);
        cuts.windows(2)
            .map(|w| {
                let mid = 0.5 * (w[0] + w[1]);
                let rate = self.rate_at(mid);
                let h_cap = if rate > 0.0 {
                    // resolve the pulse with at least ~20 steps
                    self.pieces
                        .iter()
                        .find(|p| mid >= p.start && mid < p.end)
                        .map(|p| (p.end - p.start) / 20.0)
                        .unwrap_or(f64::INFINITY)
                } else {
                    f64::INFINITY
                };
                (w[0], w[1], rate, h_cap)
            })
            .collect()
    }
}

/// A recorded state discontinuity.
#[derive(Debug, Clone, Copy)]
pub struct Jump {
    pub t: f64,
    pub before: f64,
    pub after: f64,
    /// The release pushed past the resolvable range and was capped.
    pub saturated: bool,
}

#[derive(Debug, Clone)]
enum SegmentSol {
    Scalar(DenseSolution<1>),
    Ratio(DenseSolution<2>),
}

impl SegmentSol {
    fn eval(&self, t: f64) -> f64 {
        match self {
            SegmentSol::Scalar(s) => s.eval(t)[0],
            SegmentSol::Ratio(s) => {
                let y = s.eval(t);
                y[1] / (y[0] + y[1])
            }
        }
    }

    fn span(&self) -> (f64, f64) {
        match self {
            SegmentSol::Scalar(s) => (s.t0, s.t1),
            SegmentSol::Ratio(s) => (s.t0, s.t1),
        }
    }

    fn max_step(&self) -> f64 {
        match self {
            SegmentSol::Scalar(s) => s.max_step,
            SegmentSol::Ratio(s) => s.max_step,
        }
    }

    fn nodes(&self) -> Vec<(f64, f64)> {
        match self {
            SegmentSol::Scalar(s) => s.nodes.iter().map(|&(t, y)| (t, y[0])).collect(),
            SegmentSol::Ratio(s) => {
                s.nodes.iter().map(|&(t, y)| (t, y[1] / (y[0] + y[1]))).collect()
            }
        }
    }
}

/// A time-ordered solution with dense interpolation and recorded jumps.
/// Right-continuous at jump times; `eval_left` gives the pre-jump limit.
#[derive(Debug, Clone)]
pub struct Trajectory {
    segments: Vec<SegmentSol>,
    jumps: Vec<Jump>,
    tol: f64,
}

impl Trajectory {
    fn from_scalar_segments(segs: Vec<DenseSolution<1>>, jumps: Vec<Jump>, tol: f64) -> Self {
        Trajectory { segments: segs.into_iter().map(SegmentSol::Scalar).collect(), jumps, tol }
    }

    pub fn span(&self) -> (f64, f64) {
        let first = self.segments.first().expect("trajectory has a segment");
        let last = self.segments.last().expect("trajectory has a segment");
        (first.span().0, last.span().1)
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    /// Largest accepted step; used to size jump-exclusion windows.
    pub fn max_step(&self) -> f64 {
        self.segments.iter().map(|s| s.max_step()).fold(0.0, f64::max)
    }

    pub fn jumps(&self) -> &[Jump] {
        &self.jumps
    }

    /// Value at `t`, taking the post-jump branch at jump times.
    pub fn eval(&self, t: f64) -> f64 {
        let idx = self.segments.iter().rposition(|s| {
            let (a, _) = s.span();
            t >= a
        });
        match idx {
            Some(i) => {
                let (_, b) = self.segments[i].span();
                self.segments[i].eval(t.min(b))
            }
            None => self.segments[0].eval(t),
        }
    }

    /// Left limit at `t` (differs from `eval` only at jump times).
    pub fn eval_left(&self, t: f64) -> f64 {
        let idx = self.segments.iter().position(|s| {
            let (_, b) = s.span();
            t <= b
        });
        match idx {
            Some(i) => {
                let (a, _) = self.segments[i].span();
                self.segments[i].eval(t.max(a))
            }
            None => self.segments.last().unwrap().eval(t),
        }
    }

    pub fn final_value(&self) -> f64 {
        let (_, b) = self.span();
        self.eval(b)
    }

    /// Accepted nodes in order; jump times appear twice (before and after).
    pub fn nodes(&self) -> Vec<(f64, f64)> {
        let mut out: Vec<(f64, f64)> = Vec::new();
        for seg in &self.segments {
            for (t, p) in seg.nodes() {
                if let Some(&(tl, pl)) = out.last() {
                    if tl == t && pl == p {
                        continue; // segment boundary without a jump
                    }
                }
                out.push((t, p));
            }
        }
        out
    }

    /// CSV rows `t,p`, shortest round-trip float formatting.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("t,p\n");
        for (t, p) in self.nodes() {
            s.push_str(&format!("{t},{p}\n"));
        }
        s
    }

}

struct ProportionMonitor {
    bound: f64,
}

impl StepMonitor<1> for ProportionMonitor {
    fn inspect(&mut self, t: f64, y: &mut [f64; 1]) -> Result<()> {
        let p = y[0];
        if p < -self.bound || p > 1.0 + self.bound {
            return Err(Error::BlowUp { t, value: p });
        }
        if p < 0.0 {
            y[0] = 0.0;
        } else if p > 1.0 {
            y[0] = 1.0;
        }
        Ok(())
    }
}

struct DensityMonitor {
    bound: f64,
}

impl StepMonitor<2> for DensityMonitor {
    fn inspect(&mut self, t: f64, y: &mut [f64; 2]) -> Result<()> {
        for v in y.iter_mut() {
            if *v < -self.bound {
                return Err(Error::BlowUp { t, value: *v });
            }
            if *v < 0.0 {
                *v = 0.0;
            }
        }
        Ok(())
    }
}

fn check_tol(tol: f64) -> Result<()> {
    if !(TOL_MIN..=TOL_MAX).contains(&tol) {
        return Err(Error::Domain(format!(
            "tolerance must lie in [{TOL_MIN:e}, {TOL_MAX:e}], got {tol:e}"
        )));
    }
    Ok(())
}

fn check_span(span: (f64, f64)) -> Result<()> {
    if !(span.1 > span.0) || !span.0.is_finite() || !span.1.is_finite() {
        return Err(Error::Domain(format!("span must increase, got [{}, {}]", span.0, span.1)));
    }
    Ok(())
}

pub(crate) fn integrate_scalar_segments(
    model: &ModelSpec,
    control: &ControlSignal,
    p0: f64,
    span: (f64, f64),
    tol: f64,
) -> Result<Vec<DenseSolution<1>>> {
    let mut segments = Vec::new();
    let mut p = p0;
    for (a, b, rate, h_cap) in control.segments(span.0, span.1) {
        let rhs = |t: f64, y: &[f64; 1]| {
            let pv = y[0];
            let mut dp = model.f(t, pv);
            if rate > 0.0 {
                dp += rate * model.g(pv) / model.capacity().value(t);
            }
            [dp]
        };
        let mut opts = SolveOpts::new(tol, tol);
        opts.h_max = h_cap;
        // near an attracting boundary one accepted step can land a few
        // tens of error scales past it; anything larger is a blow-up
        let mut monitor = ProportionMonitor { bound: 50.0 * tol.max(1e-12) };
        let sol = solver::integrate(rhs, a, b, [p], &opts, &mut monitor)?;
        p = sol.nodes.last().unwrap().1[0];
        segments.push(sol);
    }
    Ok(segments)
}

/// Adaptive solution of the controlled scalar equation over `span`.
pub fn integrate_scalar(
    model: &ModelSpec,
    control: &ControlSignal,
    p0: f64,
    span: (f64, f64),
    tol: f64,
) -> Result<Trajectory> {
    check_tol(tol)?;
    check_span(span)?;
    if !(0.0..=1.0).contains(&p0) {
        return Err(Error::Domain(format!("initial proportion must lie in [0, 1], got {p0}")));
    }
    let segments = integrate_scalar_segments(model, control, p0, span, tol)?;
    Ok(Trajectory::from_scalar_segments(segments, Vec::new(), tol))
}

pub(crate) fn trajectory_from_parts(
    segments: Vec<DenseSolution<1>>,
    jumps: Vec<Jump>,
    tol: f64,
) -> Trajectory {
    Trajectory::from_scalar_segments(segments, jumps, tol)
}

/// Densities of the two competing types.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompartmentState {
    pub n1: f64,
    pub n2: f64,
}

impl CompartmentState {
    pub fn new(n1: f64, n2: f64) -> Result<Self> {
        if !(n1 >= 0.0) || !(n2 >= 0.0) {
            return Err(Error::Domain(format!("densities must be >= 0, got n1 = {n1}, n2 = {n2}")));
        }
        Ok(CompartmentState { n1, n2 })
    }

    pub fn total(&self) -> f64 {
        self.n1 + self.n2
    }

    pub fn proportion(&self) -> Result<f64> {
        let total = self.total();
        if total <= 0.0 {
            return Err(Error::Domain(
                "proportion undefined for an empty population (n1 + n2 = 0)".into(),
            ));
        }
        Ok(self.n2 / total)
    }
}

/// Dense two-compartment solution with the derived proportion.
#[derive(Debug, Clone)]
pub struct CompartmentTrajectory {
    sol: DenseSolution<2>,
    tol: f64,
}

impl CompartmentTrajectory {
    pub fn span(&self) -> (f64, f64) {
        (self.sol.t0, self.sol.t1)
    }

    pub fn eval(&self, t: f64) -> CompartmentState {
        let y = self.sol.eval(t);
        CompartmentState { n1: y[0], n2: y[1] }
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    /// CSV rows `t,n1,n2,p`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("t,n1,n2,p\n");
        for &(t, y) in &self.sol.nodes {
            let p = y[1] / (y[0] + y[1]);
            s.push_str(&format!("{t},{},{},{p}\n", y[0], y[1]));
        }
        s
    }
}

/// Integrate the unreduced competition system with fecundity scaling
/// `sigma` and return both the compartment solution and the derived
/// proportion trajectory.
pub fn integrate_compartments(
    params: &WolbachiaParams,
    capacity: &CarryingCapacity,
    sigma: f64,
    control: &ControlSignal,
    init: CompartmentState,
    span: (f64, f64),
    tol: f64,
) -> Result<(CompartmentTrajectory, Trajectory)> {
    params.validate()?;
    check_tol(tol)?;
    check_span(span)?;
    if !(0.0 < sigma && sigma < 1.0) {
        return Err(Error::Domain(format!("sigma must lie in (0, 1), got {sigma}")));
    }
    if init.total() <= 0.0 {
        return Err(Error::Domain(
            "proportion undefined for an empty population (n1 + n2 = 0)".into(),
        ));
    }
    let WolbachiaParams { b1, b2, d1, d2, sh } = *params;
    let (b1s, b2s) = (b1 / sigma, b2 / sigma);
    let scale = capacity.max_value();

    let mut segments: Vec<DenseSolution<2>> = Vec::new();
    let mut y = [init.n1, init.n2];
    for (a, b, rate, h_cap) in control.segments(span.0, span.1) {
        let rhs = |t: f64, y: &[f64; 2]| {
            let (n1, n2) = (y[0], y[1]);
            let total = n1 + n2;
            let frac = if total > 0.0 { n2 / total } else { 0.0 };
            let room = 1.0 - total / capacity.value(t);
            [
                b1s * n1 * (1.0 - sh * frac) * room - d1 * n1,
                b2s * n2 * room - d2 * n2 + rate,
            ]
        };
        let mut opts = SolveOpts::new(tol, tol * scale);
        opts.h_max = h_cap;
        let mut monitor = DensityMonitor { bound: 50.0 * tol.max(1e-12) * scale };
        let sol = solver::integrate(rhs, a, b, y, &opts, &mut monitor)?;
        y = sol.nodes.last().unwrap().1;
        segments.push(sol);
    }

    // merge segments into one dense record (no jumps in the densities)
    let mut merged = segments.remove(0);
    for seg in segments {
        merged.t1 = seg.t1;
        merged.max_step = merged.max_step.max(seg.max_step);
        merged.steps.extend(seg.steps);
        merged.nodes.extend(seg.nodes.into_iter().skip(1));
    }
    let comp = CompartmentTrajectory { sol: merged.clone(), tol };
    let prop = Trajectory { segments: vec![SegmentSol::Ratio(merged)], jumps: Vec::new(), tol };
    Ok((comp, prop))
}

/// Max pointwise gap between two trajectories on a 1000-point grid over
/// `span`, excluding a window of one max-step on each side of every jump.
pub fn sup_distance(a: &Trajectory, b: &Trajectory, span: (f64, f64)) -> Result<f64> {
    check_span(span)?;
    for traj in [a, b] {
        let (t0, t1) = traj.span();
        let pad = 1e-9 * (1.0 + t1.abs());
        if span.0 < t0 - pad || span.1 > t1 + pad {
            return Err(Error::SpanMismatch { requested: span, available: (t0, t1) });
        }
    }
    let window = a.max_step().max(b.max_step());
    let jump_times: Vec<f64> =
        a.jumps().iter().chain(b.jumps().iter()).map(|j| j.t).collect();
    let n = 1000;
    let mut worst = 0.0_f64;
    for i in 0..=n {
        let t = span.0 + (span.1 - span.0) * i as f64 / n as f64;
        if jump_times.iter().any(|&tj| t >= tj - window && t < tj + window) {
            continue;
        }
        worst = worst.max((a.eval(t) - b.eval(t)).abs());
    }
    Ok(worst)
}
