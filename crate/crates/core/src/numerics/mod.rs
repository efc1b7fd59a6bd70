//! Special functions, quadrature grids and the analytic azimuthal moment
//! integrals on which every other module builds.

mod moments;
mod quadrature;
mod special;

pub use moments::phi_moment_integral;
pub(crate) use moments::phi_moment_raw;
pub use quadrature::{grid_inner_product, Domain, GridKind, QuadratureGrid};
pub use special::{
    assoc_legendre_norm, hermite_function, hermite_poly, MAX_HERMITE_ORDER, MAX_LEGENDRE_DEGREE,
};

use ndarray::Array2;

/// Overlap matrix of the polar parts of same-degree spherical harmonics,
/// `O[i][j] = int_{-1}^{1} f(l, m_i, x) f(l, m_j, x) dx` with `m = i - l`.
///
/// The integrand is a polynomial of degree <= 2l when `m_i + m_j` is even and
/// an odd function when it is odd, so Gauss-Legendre at order l + 2 is exact
/// and odd pairs are pinned to zero.
pub(crate) fn theta_overlap(l: u32) -> Array2<f64> {
    let dim = (2 * l + 1) as usize;
    let grid = QuadratureGrid::gauss_legendre(l as usize + 2);
    // Tabulate the normalized Legendre values once per node.
    let mut table = Array2::<f64>::zeros((dim, grid.len()));
    for (i, mut row) in table.outer_iter_mut().enumerate() {
        let m = i as i32 - l as i32;
        for (a, &x) in grid.nodes.iter().enumerate() {
            row[a] = assoc_legendre_norm(l, m, x).expect("valid degree/order");
        }
    }
    let mut overlap = Array2::<f64>::zeros((dim, dim));
    for i in 0..dim {
        for j in i..dim {
            let mi = i as i64 - l as i64;
            let mj = j as i64 - l as i64;
            let value = if (mi + mj).rem_euclid(2) == 1 {
                0.0
            } else {
                grid.weights
                    .iter()
                    .enumerate()
                    .map(|(a, &w)| w * table[(i, a)] * table[(j, a)])
                    .sum()
            };
            overlap[(i, j)] = value;
            overlap[(j, i)] = value;
        }
    }
    overlap
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn legendre_normalization_by_quadrature() {
        // Unit diagonal of the overlap matrix doubles as the normalization
        // check for every degree up to 10.
        for l in 0..=10u32 {
            let o = theta_overlap(l);
            for i in 0..(2 * l + 1) as usize {
                assert_abs_diff_eq!(o[(i, i)], 1.0, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn parity_orthogonality_for_odd_order_sums() {
        for l in 0..=8u32 {
            let o = theta_overlap(l);
            let dim = (2 * l + 1) as usize;
            for i in 0..dim {
                for j in 0..dim {
                    let mi = i as i64 - l as i64;
                    let mj = j as i64 - l as i64;
                    if (mi + mj).rem_euclid(2) == 1 {
                        assert_eq!(o[(i, j)], 0.0, "l={l} m={mi} m'={mj}");
                    }
                }
            }
        }
    }

    #[test]
    fn overlap_against_direct_quadrature() {
        // Independent check at higher quadrature order.
        let l = 3u32;
        let o = theta_overlap(l);
        let fine = QuadratureGrid::gauss_legendre(40);
        for i in 0..7usize {
            for j in 0..7usize {
                let mi = i as i32 - 3;
                let mj = j as i32 - 3;
                let direct: f64 = fine
                    .nodes
                    .iter()
                    .zip(&fine.weights)
                    .map(|(&x, &w)| {
                        w * assoc_legendre_norm(l, mi, x).unwrap()
                            * assoc_legendre_norm(l, mj, x).unwrap()
                    })
                    .sum();
                assert_abs_diff_eq!(o[(i, j)], direct, epsilon = 1e-12);
            }
        }
    }
}
