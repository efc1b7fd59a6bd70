//! Brute-force oracles used by the test suites. Deliberately independent of
//! the closed-form and coefficient-space code paths they are used to check.

use num_complex::Complex64;

/// Adaptive Simpson quadrature for complex integrands on a finite interval.
pub fn adaptive_simpson<F>(f: F, a: f64, b: f64, tol: f64) -> Complex64
where
    F: Fn(f64) -> Complex64,
{
    fn simpson<F: Fn(f64) -> Complex64>(
        f: &F,
        a: f64,
        fa: Complex64,
        b: f64,
        fb: Complex64,
    ) -> (Complex64, Complex64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        let s = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
        (s, fm, m)
    }

    #[allow(clippy::too_many_arguments)]
    fn recurse<F: Fn(f64) -> Complex64>(
        f: &F,
        a: f64,
        fa: Complex64,
        b: f64,
        fb: Complex64,
        whole: Complex64,
        fm: Complex64,
        m: f64,
        tol: f64,
        depth: u32,
        forced: u32,
    ) -> Complex64 {
        let (left, flm, lm) = simpson(f, a, fa, m, fm);
        let (right, frm, rm) = simpson(f, m, fm, b, fb);
        let delta = left + right - whole;
        // Forced splits guard against integrands that alias on the dyadic
        // sample points (oscillations commensurate with the interval).
        if depth == 0 || (forced == 0 && delta.norm() <= 15.0 * tol) {
            return left + right + delta / 15.0;
        }
        let sub = forced.saturating_sub(1);
        recurse(f, a, fa, m, fm, left, flm, lm, 0.5 * tol, depth - 1, sub)
            + recurse(f, m, fm, b, fb, right, frm, rm, 0.5 * tol, depth - 1, sub)
    }

    let fa = f(a);
    let fb = f(b);
    let (whole, fm, m) = simpson(&f, a, fa, b, fb);
    recurse(&f, a, fa, b, fb, whole, fm, m, tol, 30, 8)
}

/// Population standard deviation (divisor n), shared by classical-relation
/// tests as the reference formula.
pub fn population_std(samples: &[f64]) -> f64 {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    (samples.iter().map(|&x| (x - mean).powi(2)).sum::<f64>() / n).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn simpson_on_smooth_integrands() {
        let v = adaptive_simpson(
            |x| Complex64::new(x.cos(), x.sin()),
            0.0,
            std::f64::consts::PI,
            1e-13,
        );
        assert_abs_diff_eq!(v.re, 0.0, epsilon = 1e-11);
        assert_abs_diff_eq!(v.im, 2.0, epsilon = 1e-11);
    }
}
