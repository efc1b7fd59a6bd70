//! Independent quadrature route for every moment quantity.
//!
//! The coefficient path contracts graded vectors against closed-form moment
//! matrix elements; this module instead samples the same functions pointwise
//! and integrates numerically — Gauss-Legendre over the closed seam interval
//! for circle states (where the integrands are entire), a tensor
//! Legendre x Legendre rule for spherical states, and a weight-compensated
//! Gauss-Hermite rule on the line. Agreement between the two routes checks
//! the hand-derived matrix elements against plain quadrature.

use super::{apply, Graded, MomentReport, OperatorRep};
use crate::error::{Error, Result};
use crate::numerics::{assoc_legendre_norm, hermite_function, QuadratureGrid};
use crate::states::{BasisId, QuantumState};
use num_complex::Complex64;

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// Flattened sampling space with quadrature weights.
struct GridEngine {
    /// Node weights, flattened row-major for tensor grids.
    weights: Vec<f64>,
    /// Angle coordinate at each flattened node (phi on the circle/sphere,
    /// line coordinate on the line).
    angle: Vec<f64>,
    /// Tabulated basis-function values: `table[i][node]` for spectral index i.
    table: Vec<Vec<Complex64>>,
}

impl GridEngine {
    fn new(basis: &BasisId, max_index_headroom: usize) -> Result<Self> {
        match basis {
            BasisId::FourierCircle { max_mode } => {
                let order = (4 * *max_mode as usize + 48).max(128);
                let grid = QuadratureGrid::gauss_legendre_on(0.0, TWO_PI, order);
                let dim = basis.dim();
                let norm = 1.0 / TWO_PI.sqrt();
                let table = (0..dim)
                    .map(|i| {
                        let k = basis.index_value(i) as f64;
                        grid.nodes
                            .iter()
                            .map(|&phi| Complex64::from_polar(norm, k * phi))
                            .collect()
                    })
                    .collect();
                Ok(GridEngine {
                    weights: grid.weights.clone(),
                    angle: grid.nodes,
                    table,
                })
            }
            BasisId::SphericalShell { l } => {
                let xg = QuadratureGrid::gauss_legendre(*l as usize + 6);
                let pg_order = (4 * *l as usize + 48).max(128);
                let pg = QuadratureGrid::gauss_legendre_on(0.0, TWO_PI, pg_order);
                let dim = basis.dim();
                let norm = 1.0 / TWO_PI.sqrt();
                let mut weights = Vec::with_capacity(xg.len() * pg.len());
                let mut angle = Vec::with_capacity(xg.len() * pg.len());
                for &wx in &xg.weights {
                    for &wp in &pg.weights {
                        weights.push(wx * wp);
                    }
                }
                for _ in 0..xg.len() {
                    angle.extend_from_slice(&pg.nodes);
                }
                let mut table = Vec::with_capacity(dim);
                for i in 0..dim {
                    let m = basis.index_value(i);
                    let mut row = Vec::with_capacity(xg.len() * pg.len());
                    for &x in &xg.nodes {
                        let theta_part = assoc_legendre_norm(*l, m as i32, x)?;
                        for &phi in &pg.nodes {
                            row.push(Complex64::from_polar(
                                theta_part * norm,
                                m as f64 * phi,
                            ));
                        }
                    }
                    table.push(row);
                }
                Ok(GridEngine {
                    weights,
                    angle,
                    table,
                })
            }
            BasisId::HermiteLine {
                truncation,
                length_scale,
            } => {
                let top = *truncation as usize + max_index_headroom;
                let order = (top + 16).max(64);
                let grid = QuadratureGrid::gauss_hermite(order).scaled(*length_scale);
                let scale = 1.0 / length_scale.sqrt();
                let mut table = Vec::with_capacity(top + 1);
                for n in 0..=top {
                    let mut row = Vec::with_capacity(grid.len());
                    for &x in &grid.nodes {
                        row.push(Complex64::new(
                            scale * hermite_function(n, x / length_scale)?,
                            0.0,
                        ));
                    }
                    table.push(row);
                }
                Ok(GridEngine {
                    weights: grid.weights.clone(),
                    angle: grid.nodes,
                    table,
                })
            }
        }
    }

    /// Pointwise samples of a graded function.
    fn sample(&self, g: &Graded) -> Vec<Complex64> {
        let nodes = self.weights.len();
        let mut out = vec![Complex64::default(); nodes];
        for (j, grade) in g.grades.iter().enumerate() {
            if grade.is_empty() {
                continue;
            }
            // Spectral part of this grade at every node.
            let mut part = vec![Complex64::default(); nodes];
            for (i, &c) in grade.iter().enumerate() {
                if c == Complex64::default() {
                    continue;
                }
                debug_assert!(
                    i < self.table.len(),
                    "spectral index beyond tabulated range"
                );
                for (p, &b) in part.iter_mut().zip(&self.table[i]) {
                    *p += c * b;
                }
            }
            if j == 0 {
                for (o, p) in out.iter_mut().zip(&part) {
                    *o += p;
                }
            } else {
                for ((o, p), &phi) in out.iter_mut().zip(&part).zip(&self.angle) {
                    *o += p * phi.powi(j as i32);
                }
            }
        }
        out
    }

    fn inner(&self, u: &[Complex64], v: &[Complex64]) -> Complex64 {
        self.weights
            .iter()
            .zip(u.iter().zip(v))
            .map(|(&w, (&a, &b))| w * a.conj() * b)
            .sum()
    }
}

fn check_basis(op: &OperatorRep, state: &QuantumState) -> Result<()> {
    if op.basis.compatible(&state.basis) {
        Ok(())
    } else {
        Err(Error::BasisMismatch(format!(
            "operator {} over {} paired with a {} state",
            op.id.name(),
            op.basis.name(),
            state.basis.name()
        )))
    }
}

/// Grid-quadrature evaluation of [`super::moment`].
pub fn moment_via_grid(op: &OperatorRep, state: &QuantumState) -> Result<MomentReport> {
    check_basis(op, state)?;
    let engine = GridEngine::new(&state.basis, 4)?;
    let g = Graded::from_state(state);
    let ag = apply(op, &g)?;
    let s_psi = engine.sample(&g);
    let s_a = engine.sample(&ag);
    let mean = engine.inner(&s_psi, &s_a);
    let dev: Vec<Complex64> = s_a
        .iter()
        .zip(&s_psi)
        .map(|(&a, &p)| a - mean * p)
        .collect();
    let var = engine.inner(&dev, &dev).re;
    Ok(MomentReport {
        mean,
        variance: var.max(0.0),
        stddev: var.max(0.0).sqrt(),
    })
}

/// Grid-quadrature evaluation of [`super::cross_correlation`].
pub fn cross_correlation_via_grid(
    op_a: &OperatorRep,
    op_b: &OperatorRep,
    state: &QuantumState,
) -> Result<Complex64> {
    check_basis(op_a, state)?;
    check_basis(op_b, state)?;
    let engine = GridEngine::new(&state.basis, 4)?;
    let g = Graded::from_state(state);
    let s_psi = engine.sample(&g);
    let mut devs = Vec::with_capacity(2);
    for op in [op_a, op_b] {
        let ag = apply(op, &g)?;
        let s_a = engine.sample(&ag);
        let mean = engine.inner(&s_psi, &s_a);
        devs.push(
            s_a.iter()
                .zip(&s_psi)
                .map(|(&a, &p)| a - mean * p)
                .collect::<Vec<_>>(),
        );
    }
    Ok(engine.inner(&devs[0], &devs[1]))
}

/// Grid-quadrature evaluation of [`super::symmetry_residual`]: both inner
/// products computed from pointwise samples.
pub fn symmetry_residual_via_grid(
    op_a: &OperatorRep,
    op_b: &OperatorRep,
    state: &QuantumState,
) -> Result<Complex64> {
    check_basis(op_a, state)?;
    check_basis(op_b, state)?;
    let engine = GridEngine::new(&state.basis, 4)?;
    let g = Graded::from_state(state);
    let a_psi = engine.sample(&apply(op_a, &g)?);
    let b_grad = apply(op_b, &g)?;
    let b_psi = engine.sample(&b_grad);
    let ab_psi = engine.sample(&apply(op_a, &b_grad)?);
    let s_psi = engine.sample(&g);
    Ok(engine.inner(&a_psi, &b_psi) - engine.inner(&s_psi, &ab_psi))
}

/// Grid-quadrature evaluation of [`super::higher_correlation`].
pub fn higher_correlation_via_grid(
    op_a: &OperatorRep,
    op_b: &OperatorRep,
    r: usize,
    s: usize,
    state: &QuantumState,
) -> Result<Complex64> {
    if r == 0 || s == 0 {
        return Err(Error::Domain("correlation orders must be positive".into()));
    }
    if r + s > super::MAX_CORRELATION_ORDER {
        return Err(Error::OrderOverflow {
            requested: r + s,
            max: super::MAX_CORRELATION_ORDER,
        });
    }
    check_basis(op_a, state)?;
    check_basis(op_b, state)?;
    let engine = GridEngine::new(&state.basis, r + s + 2)?;
    let g = Graded::from_state(state);
    let s_psi = engine.sample(&g);

    let powered = |op: &OperatorRep, count: usize| -> Result<Vec<Complex64>> {
        let ag = apply(op, &g)?;
        let mean = engine.inner(&s_psi, &engine.sample(&ag));
        let mut cur = g.clone();
        for _ in 0..count {
            let next = apply(op, &cur)?;
            let mut dev = next;
            dev.axpy(-mean, &cur);
            cur = dev;
        }
        Ok(engine.sample(&cur))
    };
    let left = powered(op_a, r)?;
    let right = powered(op_b, s)?;
    Ok(engine.inner(&left, &right))
}
