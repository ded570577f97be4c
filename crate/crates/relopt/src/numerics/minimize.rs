//! Golden-section search for scalar minimization on a bracket.

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section minimization of `f` on [a, b], refined until the bracket
/// width is below `xtol`. Returns the midpoint of the final bracket and the
/// function value there. Assumes `f` is unimodal on the bracket.
pub fn golden_section<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, xtol: f64) -> (f64, f64) {
    let (mut lo, mut hi) = if a <= b { (a, b) } else { (b, a) };
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while (hi - lo).abs() > xtol {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
        if x1 >= x2 {
            break; // bracket exhausted at floating point resolution
        }
    }
    let x = 0.5 * (lo + hi);
    let fx = f(x);
    if f1 < fx && f1 < f2 {
        (x1, f1)
    } else if f2 < fx {
        (x2, f2)
    } else {
        (x, fx)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_parabola_minimum() {
        let (x, fx) = golden_section(|x| (x - 1.3).powi(2) + 0.25, -4.0, 5.0, 1e-10);
        assert!((x - 1.3).abs() < 1e-8);
        assert!((fx - 0.25).abs() < 1e-12);
    }

    #[test]
    fn handles_reversed_bracket() {
        let (x, _) = golden_section(|x| (x + 2.0).abs(), 3.0, -6.0, 1e-9);
        assert!((x + 2.0).abs() < 1e-7);
    }
}
