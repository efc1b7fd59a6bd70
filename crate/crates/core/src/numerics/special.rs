//! Special functions: Hermite polynomials and functions, normalized
//! associated Legendre functions.
//!
//! Everything here is recurrence-based. The plain three-term recurrences are
//! stable for the moderate orders this crate works at (empirically to at
//! least order 200 for Hermite and degree 64 for Legendre, which is where
//! the configured maxima sit).

use crate::error::{Error, Result};

/// Maximum Hermite order accepted by [`hermite_poly`] and
/// [`hermite_function`].
pub const MAX_HERMITE_ORDER: usize = 200;

/// Maximum orbital degree accepted by [`assoc_legendre_norm`].
pub const MAX_LEGENDRE_DEGREE: u32 = 64;

/// Physicists' Hermite polynomial `H_n(x)` via the three-term recurrence
/// `H_{n+1} = 2x H_n - 2n H_{n-1}`.
pub fn hermite_poly(n: usize, x: f64) -> Result<f64> {
    if n > MAX_HERMITE_ORDER {
        return Err(Error::OrderOverflow {
            requested: n,
            max: MAX_HERMITE_ORDER,
        });
    }
    if n == 0 {
        return Ok(1.0);
    }
    let mut prev = 1.0;
    let mut cur = 2.0 * x;
    for k in 1..n {
        let next = 2.0 * x * cur - 2.0 * (k as f64) * prev;
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

/// Orthonormal Hermite function `h_n(x) = H_n(x) e^{-x^2/2} / (2^n n! sqrt(pi))^{1/2}`.
///
/// Uses the normalized recurrence
/// `h_{n+1} = x sqrt(2/(n+1)) h_n - sqrt(n/(n+1)) h_{n-1}`,
/// which keeps every intermediate O(1) and so stays finite where the raw
/// polynomial would overflow.
pub fn hermite_function(n: usize, x: f64) -> Result<f64> {
    if n > MAX_HERMITE_ORDER {
        return Err(Error::OrderOverflow {
            requested: n,
            max: MAX_HERMITE_ORDER,
        });
    }
    let h0 = std::f64::consts::PI.powf(-0.25) * (-0.5 * x * x).exp();
    if n == 0 {
        return Ok(h0);
    }
    let mut prev = h0;
    let mut cur = std::f64::consts::SQRT_2 * x * h0;
    for k in 1..n {
        let kf = k as f64;
        let next = x * (2.0 / (kf + 1.0)).sqrt() * cur - (kf / (kf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

/// Normalized associated Legendre function, i.e. the polar part of a
/// spherical harmonic with the azimuthal factor stripped:
/// `Y_lm(theta, phi) = assoc_legendre_norm(l, m, cos theta) * e^{i m phi} / sqrt(2 pi)`.
///
/// Normalization is `int_{-1}^{1} f(x)^2 dx = 1`, the Condon-Shortley phase
/// is included, and negative orders follow `f(l,-m) = (-1)^m f(l,m)`.
pub fn assoc_legendre_norm(l: u32, m: i32, x: f64) -> Result<f64> {
    if l > MAX_LEGENDRE_DEGREE {
        return Err(Error::OrderOverflow {
            requested: l as usize,
            max: MAX_LEGENDRE_DEGREE as usize,
        });
    }
    if m.unsigned_abs() > l {
        return Err(Error::Domain(format!(
            "order |m| = {} exceeds degree l = {l}",
            m.unsigned_abs()
        )));
    }
    if !(-1.0..=1.0).contains(&x) {
        return Err(Error::Domain(format!("argument x = {x} outside [-1, 1]")));
    }
    let am = m.unsigned_abs();
    // Diagonal seed, fully normalized:  f(m,m) = -sqrt((2m+1)/(2m)) s f(m-1,m-1).
    let s = (1.0 - x * x).max(0.0).sqrt();
    let mut diag = std::f64::consts::FRAC_1_SQRT_2;
    for k in 1..=am {
        let kf = k as f64;
        diag *= -((2.0 * kf + 1.0) / (2.0 * kf)).sqrt() * s;
    }
    let mut value = if l == am {
        diag
    } else {
        // March up in degree at fixed order.
        let mf = am as f64;
        let mut below = diag;
        let mut cur = (2.0 * mf + 3.0).sqrt() * x * diag;
        for deg in (am + 2)..=l {
            let lf = deg as f64;
            let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
            let b = (((lf - 1.0) * (lf - 1.0) - mf * mf) / (4.0 * (lf - 1.0) * (lf - 1.0) - 1.0))
                .sqrt();
            let next = a * (x * cur - b * below);
            below = cur;
            cur = next;
        }
        cur
    };
    if m < 0 && am % 2 == 1 {
        value = -value;
    }
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn hermite_low_orders() {
        assert_abs_diff_eq!(hermite_poly(0, 3.7).unwrap(), 1.0);
        // H_2 = 4x^2 - 2 evaluated directly.
        assert_abs_diff_eq!(hermite_poly(2, 1.0).unwrap(), 4.0 - 2.0, epsilon = 1e-14);
        // H_3 = 8x^3 - 12x at x = 2.
        assert_abs_diff_eq!(
            hermite_poly(3, 2.0).unwrap(),
            8.0 * 8.0 - 12.0 * 2.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn hermite_cross_checked_against_direct_polynomials() {
        // Direct evaluation of H_4 = 16x^4 - 48x^2 + 12 and
        // H_5 = 32x^5 - 160x^3 + 120x over a few abscissae.
        for &x in &[-2.5f64, -0.3, 0.0, 0.7, 1.9] {
            let h4 = 16.0 * x.powi(4) - 48.0 * x * x + 12.0;
            let h5 = 32.0 * x.powi(5) - 160.0 * x.powi(3) + 120.0 * x;
            assert_abs_diff_eq!(hermite_poly(4, x).unwrap(), h4, epsilon = 1e-10);
            assert_abs_diff_eq!(hermite_poly(5, x).unwrap(), h5, epsilon = 1e-10);
        }
    }

    #[test]
    fn hermite_order_overflow() {
        assert!(matches!(
            hermite_poly(MAX_HERMITE_ORDER + 1, 0.0),
            Err(Error::OrderOverflow { .. })
        ));
    }

    #[test]
    fn hermite_function_matches_polynomial_form() {
        for n in 0..8 {
            for &x in &[-1.7, 0.0, 0.4, 2.2] {
                let norm = (2f64.powi(n as i32)
                    * (1..=n).map(|k| k as f64).product::<f64>()
                    * std::f64::consts::PI.sqrt())
                .sqrt();
                let expected = hermite_poly(n, x).unwrap() * (-0.5 * x * x).exp() / norm;
                assert_abs_diff_eq!(hermite_function(n, x).unwrap(), expected, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn legendre_point_values() {
        assert_abs_diff_eq!(
            assoc_legendre_norm(0, 0, 0.3).unwrap(),
            std::f64::consts::FRAC_1_SQRT_2,
            epsilon = 1e-15
        );
        // Equatorial zero of the l = 1, m = 0 function.
        assert_abs_diff_eq!(assoc_legendre_norm(1, 0, 0.0).unwrap(), 0.0);
        // f(1, 1, x) = -sqrt(3)/2 sqrt(1 - x^2).
        let x = 0.6f64;
        assert_abs_diff_eq!(
            assoc_legendre_norm(1, 1, x).unwrap(),
            -(3.0f64).sqrt() / 2.0 * (1.0 - x * x).sqrt(),
            epsilon = 1e-14
        );
        // Negative order picks up (-1)^m.
        assert_abs_diff_eq!(
            assoc_legendre_norm(1, -1, x).unwrap(),
            (3.0f64).sqrt() / 2.0 * (1.0 - x * x).sqrt(),
            epsilon = 1e-14
        );
    }

    #[test]
    fn legendre_domain_errors() {
        assert!(matches!(
            assoc_legendre_norm(2, 3, 0.0),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            assoc_legendre_norm(2, 1, 1.2),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            assoc_legendre_norm(MAX_LEGENDRE_DEGREE + 1, 0, 0.0),
            Err(Error::OrderOverflow { .. })
        ));
    }
}
