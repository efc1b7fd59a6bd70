//! Exact coefficient-space algebra for composite operator actions.
//!
//! Multiplication by the angle coordinate takes a finite spectral expansion
//! out of its basis: the product is no longer periodic at the seam. Instead
//! of truncating back (which silently drops the seam contribution that the
//! symmetry residuals measure), functions are kept in graded form
//!
//! `f(phi) = sum_j phi^j * (spectral expansion with coefficients grades[j])`
//!
//! Derivative operators act by the product rule, multiplication shifts the
//! grade, and scalar products contract against the closed-form azimuthal
//! moment integrals. Nothing in this algebra is approximate.

use crate::numerics::{phi_moment_raw, theta_overlap};
use crate::states::{BasisId, QuantumState};
use ndarray::Array2;
use num_complex::Complex64;

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// A function in graded form. `grades[j]` holds the spectral coefficients of
/// the `phi^j` part; an empty vector marks an absent grade. On the Hermite
/// line only grade 0 is ever populated (position and momentum stay inside
/// the basis, growing the coefficient vector by one index per application).
#[derive(Debug, Clone)]
pub(crate) struct Graded {
    pub grades: Vec<Vec<Complex64>>,
}

impl Graded {
    pub fn from_state(state: &QuantumState) -> Self {
        Graded {
            grades: vec![state.coeffs.clone()],
        }
    }

    pub fn empty() -> Self {
        Graded { grades: Vec::new() }
    }

    fn grade_mut(&mut self, j: usize, len: usize) -> &mut Vec<Complex64> {
        if self.grades.len() <= j {
            self.grades.resize(j + 1, Vec::new());
        }
        let g = &mut self.grades[j];
        if g.len() < len {
            g.resize(len, Complex64::default());
        }
        g
    }

    /// `self += factor * other`, extending grades and lengths as needed.
    pub fn axpy(&mut self, factor: Complex64, other: &Graded) {
        for (j, src) in other.grades.iter().enumerate() {
            if src.is_empty() {
                continue;
            }
            let dst = self.grade_mut(j, src.len());
            for (d, &s) in dst.iter_mut().zip(src) {
                *d += factor * s;
            }
        }
    }
}

/// Scalar-product engine for one basis. Conjugate-linear in the first slot.
pub(crate) struct Engine {
    basis: BasisId,
    overlap: Option<Array2<f64>>,
}

impl Engine {
    pub fn new(basis: &BasisId) -> Self {
        let overlap = match basis {
            BasisId::SphericalShell { l } => Some(theta_overlap(*l)),
            _ => None,
        };
        Engine {
            basis: basis.clone(),
            overlap,
        }
    }

    pub fn inner(&self, u: &Graded, v: &Graded) -> Complex64 {
        match &self.basis {
            BasisId::HermiteLine { .. } => {
                debug_assert!(u.grades.len() <= 1 && v.grades.len() <= 1);
                let x = u.grades.first().map(Vec::as_slice).unwrap_or(&[]);
                let y = v.grades.first().map(Vec::as_slice).unwrap_or(&[]);
                x.iter().zip(y).map(|(&a, &b)| a.conj() * b).sum()
            }
            basis => {
                let dim = basis.dim();
                let mut total = Complex64::default();
                for (ju, gu) in u.grades.iter().enumerate() {
                    if gu.is_empty() {
                        continue;
                    }
                    for (jv, gv) in v.grades.iter().enumerate() {
                        if gv.is_empty() {
                            continue;
                        }
                        total += self.pair_contraction((ju + jv) as u32, gu, gv, dim);
                    }
                }
                total
            }
        }
    }

    /// Contract one grade pair: `sum_{i,j} conj(u_i) v_j [O_ij] I_p(k_j - k_i) / 2 pi`.
    fn pair_contraction(
        &self,
        power: u32,
        u: &[Complex64],
        v: &[Complex64],
        dim: usize,
    ) -> Complex64 {
        // Moment table over all index offsets, built once per grade pair.
        let offsets: Vec<Complex64> = (-(dim as i64 - 1)..=(dim as i64 - 1))
            .map(|delta| phi_moment_raw(power, delta) / TWO_PI)
            .collect();
        let mut acc = Complex64::default();
        for (i, &ui) in u.iter().enumerate() {
            if ui == Complex64::default() {
                continue;
            }
            let cu = ui.conj();
            for (j, &vj) in v.iter().enumerate() {
                if vj == Complex64::default() {
                    continue;
                }
                let mut w = offsets[(j as i64 - i as i64 + dim as i64 - 1) as usize];
                if let Some(o) = &self.overlap {
                    let ov = o[(i, j)];
                    if ov == 0.0 {
                        continue;
                    }
                    w *= ov;
                }
                acc += cu * vj * w;
            }
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{make_state, StateSpec};

    #[test]
    fn norm_of_state_is_one_through_engine() {
        let s = make_state(&StateSpec::RandomPeriodic {
            max_mode: 6,
            seed: 3,
        })
        .unwrap();
        let e = Engine::new(&s.basis);
        let g = Graded::from_state(&s);
        let n = e.inner(&g, &g);
        assert!((n - Complex64::new(1.0, 0.0)).norm() < 1e-13);
    }

    #[test]
    fn angle_weighted_norm_of_uniform_density_is_pi() {
        // <phi> for the single-mode state through the graded contraction.
        let s = make_state(&StateSpec::CircularEigenstate { m: 1 }).unwrap();
        let e = Engine::new(&s.basis);
        let g = Graded::from_state(&s);
        let mut shifted = Graded::empty();
        shifted.grades = vec![Vec::new(), s.coeffs.clone()];
        let v = e.inner(&g, &shifted);
        assert!((v - Complex64::new(std::f64::consts::PI, 0.0)).norm() < 1e-13);
    }
}
