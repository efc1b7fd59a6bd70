//! Closed-form azimuthal moment integrals `int_0^{2pi} phi^p e^{i k phi} dphi`.
//!
//! Multiplication by the angle coordinate leaves the Fourier basis, so every
//! matrix element of the angle operator (and of its powers) reduces to these
//! integrals. They are evaluated in closed form via the integration-by-parts
//! recurrence; naive quadrature of the discontinuous periodic extension of
//! `phi^p e^{ik phi}` is never used.

use crate::error::{Error, Result};
use num_complex::Complex64;

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// Largest moment power the internal recurrence will produce. Covers the
/// angle-power ledger of every composite this crate forms (correlation
/// orders r + s <= 8 plus squared-angle observables).
pub(crate) const MAX_INTERNAL_MOMENT: u32 = 20;

/// Exact value of `int_0^{2pi} phi^p e^{i k phi} dphi` for p in {0, 1, 2}.
///
/// For k = 0 the value is `(2 pi)^{p+1} / (p + 1)`; for k != 0 integration by
/// parts gives the recurrence `I_p = ((2 pi)^p - p I_{p-1}) / (i k)` seeded
/// with `I_0 = 0`.
pub fn phi_moment_integral(p: u32, k: i64) -> Result<Complex64> {
    if p > 2 {
        return Err(Error::UnsupportedMoment(p));
    }
    Ok(phi_moment_raw(p, k))
}

/// Unrestricted-power variant backing the composite-operator inner products.
pub(crate) fn phi_moment_raw(p: u32, k: i64) -> Complex64 {
    assert!(
        p <= MAX_INTERNAL_MOMENT,
        "azimuthal moment power {p} beyond internal limit"
    );
    if k == 0 {
        return Complex64::new(TWO_PI.powi(p as i32 + 1) / (p as f64 + 1.0), 0.0);
    }
    let ik = Complex64::new(0.0, k as f64);
    let mut acc = Complex64::new(0.0, 0.0);
    for q in 1..=p {
        acc = (Complex64::new(TWO_PI.powi(q as i32), 0.0) - (q as f64) * acc) / ik;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::adaptive_simpson;
    use approx::assert_abs_diff_eq;

    #[test]
    fn trivial_orthogonality() {
        let v = phi_moment_integral(0, 3).unwrap();
        assert!(v.norm() < 1e-15);
        let v0 = phi_moment_integral(0, 0).unwrap();
        assert_abs_diff_eq!(v0.re, TWO_PI, epsilon = 1e-15);
    }

    #[test]
    fn first_moment_values() {
        let v = phi_moment_integral(1, 0).unwrap();
        assert_abs_diff_eq!(v.re, 2.0 * std::f64::consts::PI.powi(2), epsilon = 1e-12);
        assert_abs_diff_eq!(v.im, 0.0, epsilon = 1e-15);

        let v1 = phi_moment_integral(1, 1).unwrap();
        assert!(v1.re.abs() < 1e-12);
        assert_abs_diff_eq!(v1.im, -TWO_PI, epsilon = 1e-12);
    }

    #[test]
    fn unsupported_power_rejected() {
        assert!(matches!(
            phi_moment_integral(3, 1),
            Err(Error::UnsupportedMoment(3))
        ));
    }

    #[test]
    fn closed_forms_match_adaptive_quadrature() {
        // Every public branch against the independent oracle, relative 1e-10.
        for p in 0..=2u32 {
            for k in -50..=50i64 {
                let exact = phi_moment_integral(p, k).unwrap();
                let quad = adaptive_simpson(
                    |phi| Complex64::from_polar(phi.powi(p as i32), k as f64 * phi),
                    0.0,
                    TWO_PI,
                    1e-12,
                );
                let scale = exact.norm().max(1.0);
                assert!(
                    (exact - quad).norm() < 1e-10 * scale,
                    "p={p} k={k}: closed {exact} vs quad {quad}"
                );
            }
        }
    }

    #[test]
    fn internal_high_powers_match_adaptive_quadrature() {
        for p in 3..=8u32 {
            for k in [-17i64, -4, -1, 0, 1, 5, 23] {
                let exact = phi_moment_raw(p, k);
                let quad = adaptive_simpson(
                    |phi| Complex64::from_polar(phi.powi(p as i32), k as f64 * phi),
                    0.0,
                    TWO_PI,
                    1e-12,
                );
                let scale = exact.norm().max(1.0);
                assert!(
                    (exact - quad).norm() < 1e-9 * scale,
                    "p={p} k={k}: closed {exact} vs quad {quad}"
                );
            }
        }
    }
}
