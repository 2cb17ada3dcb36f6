//! Small numerical helpers.

const INV_PHI: f64 = 0.618_033_988_749_894_9; // (sqrt(5) - 1) / 2

/// Golden-section minimisation of a unimodal `f` on `[lo, hi]`.
///
/// Stops once the bracket is narrower than `tol`; returns the midpoint of the
/// final bracket and its function value. The sequence of evaluations depends
/// only on the inputs, so results are reproducible bit for bit.
pub fn golden_section_min<F>(mut f: F, lo: f64, hi: f64, tol: f64) -> (f64, f64)
where
    F: FnMut(f64) -> f64,
{
    let (mut a, mut b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    // 200 iterations shrink any finite bracket far below f64 resolution.
    for _ in 0..200 {
        if (b - a).abs() <= tol {
            break;
        }
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

/// Golden-section maximisation; see [`golden_section_min`].
pub fn golden_section_max<F>(mut f: F, lo: f64, hi: f64, tol: f64) -> (f64, f64)
where
    F: FnMut(f64) -> f64,
{
    let (x, fx) = golden_section_min(|x| -f(x), lo, hi, tol);
    (x, -fx)
}

pub fn relative_difference(a: f64, b: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    (a - b).abs() / a.abs().max(b.abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_parabola_minimum() {
        let (x, fx) = golden_section_min(|x| (x - 1.25).powi(2) + 3.0, -4.0, 7.0, 1e-10);
        // a flat minimum resolves x only to ~sqrt(eps) relative
        assert!((x - 1.25).abs() < 1e-7);
        assert!((fx - 3.0).abs() < 1e-15);
    }

    #[test]
    fn maximises_and_accepts_reversed_bracket() {
        let (x, _) = golden_section_max(|x| -(x + 0.5).powi(2), 2.0, -3.0, 1e-10);
        assert!((x + 0.5).abs() < 1e-9);
    }

    #[test]
    fn minimum_at_bracket_edge() {
        let (x, _) = golden_section_min(|x| x, 0.0, 1.0, 1e-8);
        assert!(x < 1e-8);
    }
}
