//! Root location by bisection on bracketed sign changes and threshold
//! search for monotone boolean predicates.

/// Bisection on a bracketed sign change. `f(lo)` and `f(hi)` must have
/// opposite signs; refines until the bracket width drops below `xtol`
/// and returns the midpoint.
pub fn bisect<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, xtol: f64) -> f64 {
    let (mut a, mut b) = (lo, hi);
    let mut fa = f(a);
    let fb = f(b);
    debug_assert!(
        fa == 0.0 || fb == 0.0 || (fa < 0.0) != (fb < 0.0),
        "bisect requires a sign change: f({a}) = {fa}, f({b}) = {fb}"
    );
    if fa == 0.0 {
        return a;
    }
    if fb == 0.0 {
        return b;
    }
    while (b - a).abs() > xtol {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break; // bracket at floating point resolution
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == (fa < 0.0) {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    0.5 * (a + b)
}

/// Threshold search for a monotone predicate: `pred(lo)` must be false and
/// `pred(hi)` true. Returns the final `(false, true)` bracket of width at
/// most `xtol`, plus the full bracket history.
pub fn bisect_predicate<F: FnMut(f64) -> bool>(
    mut pred: F,
    lo: f64,
    hi: f64,
    xtol: f64,
) -> (f64, f64, Vec<(f64, f64)>) {
    let (mut a, mut b) = (lo, hi);
    let mut history = vec![(a, b)];
    while (b - a).abs() > xtol {
        let mid = 0.5 * (a + b);
        if mid <= a.min(b) || mid >= a.max(b) {
            break;
        }
        if pred(mid) {
            b = mid;
        } else {
            a = mid;
        }
        history.push((a, b));
    }
    (a, b, history)
}

/// Newton iteration safeguarded by a bisection bracket. `f` must have a
/// sign change on [lo, hi]; `df` is its derivative. Converges to
/// `|f| < ftol` or bracket width < xtol.
pub fn newton_bisect<F, D>(mut f: F, mut df: D, lo: f64, hi: f64, xtol: f64, ftol: f64) -> f64
where
    F: FnMut(f64) -> f64,
    D: FnMut(f64) -> f64,
{
    let (mut a, mut b) = (lo, hi);
    let fa = f(a);
    if fa == 0.0 {
        return a;
    }
    let mut x = 0.5 * (a + b);
    for _ in 0..128 {
        let fx = f(x);
        if fx.abs() < ftol || (b - a).abs() < xtol {
            return x;
        }
        if (fx < 0.0) == (fa < 0.0) {
            a = x;
        } else {
            b = x;
        }
        let d = df(x);
        let newton = if d != 0.0 { x - fx / d } else { f64::NAN };
        x = if newton.is_finite() && newton > a && newton < b {
            newton
        } else {
            0.5 * (a + b)
        };
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisect_finds_cubic_root() {
        let root = bisect(|x| x * x * x - 2.0, 0.0, 2.0, 1e-14);
        assert!((root - 2f64.powf(1.0 / 3.0)).abs() < 1e-12);
    }

    #[test]
    fn predicate_bracket_is_tight_and_ordered() {
        let (a, b, hist) = bisect_predicate(|x| x >= 0.7, 0.0, 1.0, 1e-10);
        assert!(a < 0.7 && b >= 0.7 && (b - a) <= 1e-10);
        assert!(hist.len() > 20);
    }

    #[test]
    fn newton_bisect_matches_closed_form() {
        let r = newton_bisect(|x| x.exp() - 3.0, |x| x.exp(), 0.0, 2.0, 1e-15, 1e-15);
        assert!((r - 3f64.ln()).abs() < 1e-13);
    }
}
