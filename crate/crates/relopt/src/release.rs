//! Release machinery: the cost potential G (antiderivative of 1/g
//! vanishing at 0), its inverse, the impulse jump map
//! G(p+) - G(p-) = C / K(t0), and simulation of impulsive and
//! finite-rate release schedules.

use crate::dynamics::ModelSpec;
use crate::error::{Error, Result};
use crate::integrate::{
    integrate_scalar, integrate_scalar_segments, trajectory_from_parts, ControlPiece,
    ControlSignal, Jump, Trajectory,
};
use crate::numerics::interp::CubicHermite;
use crate::numerics::quad::{adaptive_gauss, gauss7};
use crate::numerics::roots::newton_bisect;

/// Number of table nodes for the sampled potential.
const TABLE_POINTS: usize = 4096;

/// Tabulated antiderivative of 1 / g on [0, 1 - delta], strictly
/// increasing with G(0) = 0. Since g(1) = 0 the potential diverges at 1;
/// `delta` cuts the table short of the singularity. Nodes are graded
/// (uniform in -ln(1 - p), denser toward the cutoff) and carry the exact
/// derivative 1/g, so evaluation is cubic-Hermite accurate well below
/// the table-building quadrature error.
#[derive(Debug, Clone)]
pub struct CostPotential {
    table: CubicHermite,
    delta: f64,
}

/// Map p in [0, 1) to the graded coordinate x = -ln(1 - p).
fn grade(p: f64) -> f64 {
    -(-p).ln_1p()
}

fn ungrade(x: f64) -> f64 {
    -(-x).exp_m1()
}

/// Build the cost potential for a model by per-cell adaptive quadrature
/// of 1/g; each panel is accurate to `tol`.
pub fn build_cost_potential(model: &ModelSpec, delta: f64, tol: f64) -> Result<CostPotential> {
    if !(1e-8..=1e-2).contains(&delta) {
        return Err(Error::Domain(format!("delta must lie in [1e-8, 1e-2], got {delta}")));
    }
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tolerance must be positive, got {tol}")));
    }
    // g must be strictly positive below the cutoff
    for i in 0..=256 {
        let p = (1.0 - delta) * i as f64 / 256.0;
        let g = model.g(p);
        if !(g > 0.0) {
            return Err(Error::SingularWeight { p, g });
        }
    }

    let x_end = grade(1.0 - delta);
    let n = TABLE_POINTS;
    let xs: Vec<f64> = (0..=n).map(|i| x_end * i as f64 / n as f64).collect();
    // integrate dG/dx = (1 - p) / g(p) cell by cell in the graded variable
    let mut integrand = |x: f64| {
        let p = ungrade(x);
        (1.0 - p) / model.g(p)
    };
    let mut ys = Vec::with_capacity(n + 1);
    let mut acc = 0.0;
    ys.push(0.0);
    for i in 0..n {
        let whole = gauss7(&mut integrand, xs[i], xs[i + 1]);
        let halves = gauss7(&mut integrand, xs[i], 0.5 * (xs[i] + xs[i + 1]))
            + gauss7(&mut integrand, 0.5 * (xs[i] + xs[i + 1]), xs[i + 1]);
        acc += if (whole - halves).abs() <= tol {
            halves
        } else {
            adaptive_gauss(&mut integrand, xs[i], xs[i + 1], tol)
        };
        ys.push(acc);
    }
    let ds: Vec<f64> = xs.iter().map(|&x| integrand(x)).collect();
    let table = CubicHermite::new(xs, ys, ds)?;
    Ok(CostPotential { table, delta })
}

impl CostPotential {
    /// Upper end of the tabulated domain, 1 - delta.
    pub fn p_max(&self) -> f64 {
        1.0 - self.delta
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Largest representable cost value, G(1 - delta).
    pub fn max_value(&self) -> f64 {
        *self.table.ys().last().unwrap()
    }

    /// G(p). Arguments are clamped to the tabulated domain.
    pub fn value(&self, p: f64) -> f64 {
        self.table.eval(grade(p.clamp(0.0, self.p_max())))
    }

    /// G'(p) = 1 / g(p) through the graded table.
    pub fn derivative(&self, p: f64) -> f64 {
        let pc = p.clamp(0.0, self.p_max());
        self.table.eval_derivative(grade(pc)) / (1.0 - pc)
    }

    /// CSV rows `p,G` over the tabulated grid (every eighth node).
    pub fn to_csv(&self) -> String {
        let mut s = String::from("p,G\n");
        for (i, (&x, &y)) in self.table.xs().iter().zip(self.table.ys().iter()).enumerate() {
            if i % 8 == 0 || i == self.table.xs().len() - 1 {
                s.push_str(&format!("{},{y}\n", ungrade(x)));
            }
        }
        s
    }
}

/// Invert the potential: the p with |G(p) - y| below 1e-10.
pub fn invert_cost(pot: &CostPotential, y: f64) -> Result<f64> {
    if y < 0.0 || y > pot.max_value() {
        return Err(Error::OutOfRange {
            requested: y,
            max: pot.max_value(),
            saturation: pot.p_max(),
        });
    }
    if y == 0.0 {
        return Ok(0.0);
    }
    // bracket on the graded table, then safeguarded Newton in x
    let ys = pot.table.ys();
    let idx = match ys.binary_search_by(|v| v.partial_cmp(&y).unwrap()) {
        Ok(i) => return Ok(ungrade(pot.table.xs()[i])),
        Err(i) => i,
    };
    let xs = pot.table.xs();
    let (lo, hi) = (xs[idx.saturating_sub(1)], xs[idx.min(xs.len() - 1)]);
    let x = newton_bisect(
        |x| pot.table.eval(x) - y,
        |x| pot.table.eval_derivative(x),
        lo,
        hi,
        1e-15,
        1e-12,
    );
    Ok(ungrade(x))
}

/// Result of applying one impulse through the jump relation.
#[derive(Debug, Clone, Copy)]
pub struct JumpResult {
    pub p_plus: f64,
    /// The requested cost exceeded the resolvable range and the state was
    /// capped at 1 - delta.
    pub saturated: bool,
}

/// Post-impulse state: G(p+) = G(p-) + C / K(t0). Errors with the
/// saturating value when the release overshoots the resolvable range.
pub fn jump_map(
    model: &ModelSpec,
    pot: &CostPotential,
    p_minus: f64,
    amount: f64,
    t0: f64,
) -> Result<f64> {
    let r = jump_map_saturating(model, pot, p_minus, amount, t0)?;
    if r.saturated {
        return Err(Error::OutOfRange {
            requested: pot.value(p_minus) + amount / model.capacity().value(t0),
            max: pot.max_value(),
            saturation: pot.p_max(),
        });
    }
    Ok(r.p_plus)
}

/// Jump map that caps overshooting releases at 1 - delta instead of
/// erroring; optimizers probing infeasible amounts rely on this.
pub fn jump_map_saturating(
    model: &ModelSpec,
    pot: &CostPotential,
    p_minus: f64,
    amount: f64,
    t0: f64,
) -> Result<JumpResult> {
    if amount < 0.0 {
        return Err(Error::Domain(format!("release amount must be >= 0, got {amount}")));
    }
    if !(0.0..1.0 - pot.delta()).contains(&p_minus) && p_minus != 0.0 {
        return Err(Error::Domain(format!(
            "pre-release state must lie in [0, 1 - delta), got {p_minus}"
        )));
    }
    if amount == 0.0 {
        return Ok(JumpResult { p_plus: p_minus, saturated: false });
    }
    let target = pot.value(p_minus) + amount / model.capacity().value(t0);
    if target > pot.max_value() {
        return Ok(JumpResult { p_plus: pot.p_max(), saturated: true });
    }
    Ok(JumpResult { p_plus: invert_cost(pot, target)?, saturated: false })
}

/// One planned release: an instantaneous impulse or a finite-rate pulse.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Release {
    Impulse { time: f64, amount: f64 },
    Pulse { start: f64, duration: f64, amount: f64 },
}

impl Release {
    fn start_time(&self) -> f64 {
        match self {
            Release::Impulse { time, .. } => *time,
            Release::Pulse { start, .. } => *start,
        }
    }

    fn end_time(&self) -> f64 {
        match self {
            Release::Impulse { time, .. } => *time,
            Release::Pulse { start, duration, .. } => start + duration,
        }
    }

    pub fn amount(&self) -> f64 {
        match self {
            Release::Impulse { amount, .. } | Release::Pulse { amount, .. } => *amount,
        }
    }
}

/// An ordered list of releases with positive amounts and non-overlapping
/// supports.
#[derive(Debug, Clone, Default)]
pub struct ReleaseSchedule {
    releases: Vec<Release>,
}

impl ReleaseSchedule {
    pub fn new(releases: Vec<Release>) -> Result<Self> {
        for r in &releases {
            if !(r.amount() > 0.0) || !r.amount().is_finite() {
                return Err(Error::Domain(format!("release amounts must be positive: {r:?}")));
            }
            if let Release::Pulse { duration, .. } = r {
                if !(*duration > 0.0) {
                    return Err(Error::Domain(format!("pulse durations must be positive: {r:?}")));
                }
            }
        }
        for w in releases.windows(2) {
            if w[1].start_time() < w[0].end_time() || w[1].start_time() <= w[0].start_time() {
                return Err(Error::Domain(format!(
                    "releases must be strictly ordered and non-overlapping: {:?} then {:?}",
                    w[0], w[1]
                )));
            }
        }
        Ok(ReleaseSchedule { releases })
    }

    pub fn releases(&self) -> &[Release] {
        &self.releases
    }

    pub fn total_amount(&self) -> f64 {
        self.releases.iter().map(|r| r.amount()).sum()
    }

    pub fn impulses_only(&self) -> bool {
        self.releases.iter().all(|r| matches!(r, Release::Impulse { .. }))
    }
}

/// Integrate the uncontrolled dynamics between impulses, applying the jump
/// relation at each release time (saturating, with the cap recorded on the
/// jump).
pub fn simulate_impulsive(
    model: &ModelSpec,
    pot: &CostPotential,
    schedule: &ReleaseSchedule,
    p0: f64,
    span: (f64, f64),
    tol: f64,
) -> Result<Trajectory> {
    if !schedule.impulses_only() {
        return Err(Error::PreconditionFailed(
            "impulsive simulation takes an impulse-only schedule".into(),
        ));
    }
    let inside = |t: f64| t > span.0 && t < span.1;
    if schedule.releases().iter().any(|r| !inside(r.start_time())) {
        return Err(Error::Domain("impulse times must lie strictly inside the span".into()));
    }
    let mut segments = Vec::new();
    let mut jumps = Vec::new();
    let mut t = span.0;
    let mut p = p0;
    for r in schedule.releases() {
        let (time, amount) = match *r {
            Release::Impulse { time, amount } => (time, amount),
            Release::Pulse { .. } => unreachable!(),
        };
        let segment =
            integrate_scalar_segments(model, &ControlSignal::zero(), p, (t, time), tol)?;
        let before = segment.last().unwrap().nodes.last().unwrap().1[0];
        segments.extend(segment);
        let jump = jump_map_saturating(model, pot, before, amount, time)?;
        jumps.push(Jump { t: time, before, after: jump.p_plus, saturated: jump.saturated });
        t = time;
        p = jump.p_plus;
    }
    segments.extend(integrate_scalar_segments(
        model,
        &ControlSignal::zero(),
        p,
        (t, span.1),
        tol,
    )?);
    Ok(trajectory_from_parts(segments, jumps, tol))
}

/// Realize every release as a finite-rate pulse (impulses are widened to
/// `epsilon`-wide pulses ending at their release time) and integrate the
/// controlled equation.
pub fn simulate_finite_rate(
    model: &ModelSpec,
    schedule: &ReleaseSchedule,
    epsilon: f64,
    p0: f64,
    span: (f64, f64),
    tol: f64,
) -> Result<Trajectory> {
    if !(epsilon > 0.0) {
        return Err(Error::Domain(format!("pulse width must be positive, got {epsilon}")));
    }
    let mut pieces = Vec::new();
    for r in schedule.releases() {
        let (start, end, amount) = match *r {
            Release::Impulse { time, amount } => (time - epsilon, time, amount),
            Release::Pulse { start, duration, amount } => (start, start + duration, amount),
        };
        if amount > 0.0 {
            pieces.push(ControlPiece { start, end, rate: amount / (end - start) });
        }
    }
    let control = ControlSignal::new(pieces)?;
    integrate_scalar(model, &control, p0, span, tol)
}
