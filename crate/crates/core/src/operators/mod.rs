//! Operator representations and moment machinery.
//!
//! Composite products such as `Lz (phi psi)` go through the graded algebra in
//! [`graded`]: the derivative acts by the product rule and the scalar product
//! contracts against exact angle-moment matrix elements. Spectral
//! differentiation of an angle-weighted function is never performed — the
//! periodic extension of `phi psi` is discontinuous at the seam, and that
//! seam term is exactly what the symmetry residuals measure.

mod graded;
pub mod gridpath;

pub(crate) use graded::{Engine, Graded};

use crate::error::{Error, Result};
use crate::numerics::{phi_moment_raw, theta_overlap, QuadratureGrid};
use crate::states::{BasisId, QuantumState};
use ndarray::Array2;
use num_complex::Complex64;

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// Highest combined order `r + s` accepted by [`higher_correlation`].
pub const MAX_CORRELATION_ORDER: usize = 8;

/// Observable identifiers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorId {
    /// Angular momentum `-i hbar d/dphi` (momentum on the line basis).
    Lz,
    /// Multiplication by the angle coordinate.
    Phi,
    /// Multiplication by the squared angle coordinate.
    PhiSquared,
    /// Number operator `i d/dphi` in the phase representation.
    NumberOp,
    /// Position on the line; alias of `Phi` restricted to the Hermite basis.
    PositionLine,
    /// Momentum on the line; alias of `Lz` restricted to the Hermite basis.
    MomentumLine,
    /// Multiplication by a sampled periodic function of the angle.
    MultiplyByFunction,
}

impl OperatorId {
    pub fn name(&self) -> &'static str {
        match self {
            OperatorId::Lz => "Lz",
            OperatorId::Phi => "phi",
            OperatorId::PhiSquared => "phi^2",
            OperatorId::NumberOp => "N",
            OperatorId::PositionLine => "x",
            OperatorId::MomentumLine => "p",
            OperatorId::MultiplyByFunction => "f(phi)",
        }
    }
}

/// Real samples of a periodic function on a circle grid, the action carrier
/// for [`OperatorId::MultiplyByFunction`].
#[derive(Debug, Clone)]
pub struct Multiplier {
    pub samples: Vec<f64>,
    pub grid: QuadratureGrid,
}

/// An observable bound to a basis. Carries `hbar` where the action needs it
/// (`Lz` and `MomentumLine`); other actions ignore it.
#[derive(Debug, Clone)]
pub struct OperatorRep {
    pub id: OperatorId,
    pub basis: BasisId,
    pub hbar: f64,
    multiplier: Option<Multiplier>,
}

impl OperatorRep {
    pub fn new(id: OperatorId, basis: &BasisId, hbar: f64) -> Result<Self> {
        let ok = match (id, basis) {
            (OperatorId::Lz | OperatorId::Phi | OperatorId::PhiSquared, _) => true,
            (OperatorId::NumberOp, BasisId::FourierCircle { .. }) => true,
            (
                OperatorId::PositionLine | OperatorId::MomentumLine,
                BasisId::HermiteLine { .. },
            ) => true,
            (OperatorId::MultiplyByFunction, _) => {
                return Err(Error::InvalidSpec(
                    "use OperatorRep::multiply_by for sampled-function operators".into(),
                ))
            }
            _ => false,
        };
        if !ok {
            return Err(Error::BasisMismatch(format!(
                "operator {} is not defined on the {} basis",
                id.name(),
                basis.name()
            )));
        }
        Ok(OperatorRep {
            id,
            basis: basis.clone(),
            hbar,
            multiplier: None,
        })
    }

    pub fn lz(basis: &BasisId, hbar: f64) -> Result<Self> {
        Self::new(OperatorId::Lz, basis, hbar)
    }

    pub fn phi(basis: &BasisId) -> Result<Self> {
        Self::new(OperatorId::Phi, basis, 1.0)
    }

    pub fn phi_squared(basis: &BasisId) -> Result<Self> {
        Self::new(OperatorId::PhiSquared, basis, 1.0)
    }

    pub fn number_op(basis: &BasisId) -> Result<Self> {
        Self::new(OperatorId::NumberOp, basis, 1.0)
    }

    pub fn position_line(basis: &BasisId) -> Result<Self> {
        Self::new(OperatorId::PositionLine, basis, 1.0)
    }

    pub fn momentum_line(basis: &BasisId, hbar: f64) -> Result<Self> {
        Self::new(OperatorId::MomentumLine, basis, hbar)
    }

    /// Multiplication by a real periodic function given by its samples on a
    /// circle grid.
    pub fn multiply_by(samples: Vec<f64>, grid: QuadratureGrid, basis: &BasisId) -> Result<Self> {
        if !matches!(basis, BasisId::FourierCircle { .. }) {
            return Err(Error::BasisMismatch(format!(
                "sampled-function operators act on fourier-circle states, not {}",
                basis.name()
            )));
        }
        if !grid.covers_circle() {
            return Err(Error::NonPeriodicSamples(
                "sample grid does not cover the circle coordinate range".into(),
            ));
        }
        if samples.len() != grid.len() {
            return Err(Error::NonPeriodicSamples(format!(
                "{} samples on a {}-node grid",
                samples.len(),
                grid.len()
            )));
        }
        if samples.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonPeriodicSamples("non-finite sample".into()));
        }
        Ok(OperatorRep {
            id: OperatorId::MultiplyByFunction,
            basis: basis.clone(),
            hbar: 1.0,
            multiplier: Some(Multiplier { samples, grid }),
        })
    }

    /// All operators exposed here are observables; sampled-function
    /// multipliers are Hermitian because their samples are real.
    pub fn is_hermitian(&self) -> bool {
        true
    }

    /// Matrix of the operator over the basis of its `BasisId`, mainly for
    /// symmetry checks and for direct element-level summations.
    pub fn dense_matrix(&self) -> Result<Array2<Complex64>> {
        let dim = self.basis.dim();
        let mut m = Array2::<Complex64>::default((dim, dim));
        match (&self.id, &self.basis) {
            (OperatorId::Lz, BasisId::FourierCircle { .. } | BasisId::SphericalShell { .. }) => {
                for i in 0..dim {
                    m[(i, i)] = Complex64::new(self.hbar * self.basis.index_value(i) as f64, 0.0);
                }
            }
            (OperatorId::NumberOp, BasisId::FourierCircle { .. }) => {
                for i in 0..dim {
                    m[(i, i)] = Complex64::new(-(self.basis.index_value(i) as f64), 0.0);
                }
            }
            (
                OperatorId::Phi | OperatorId::PhiSquared,
                BasisId::FourierCircle { .. } | BasisId::SphericalShell { .. },
            ) => {
                let power = if self.id == OperatorId::Phi { 1 } else { 2 };
                let overlap = match &self.basis {
                    BasisId::SphericalShell { l } => Some(theta_overlap(*l)),
                    _ => None,
                };
                for i in 0..dim {
                    for j in 0..dim {
                        let delta = self.basis.index_value(j) - self.basis.index_value(i);
                        let mut v = phi_moment_raw(power, delta) / TWO_PI;
                        if let Some(o) = &overlap {
                            v *= o[(i, j)];
                        }
                        m[(i, j)] = v;
                    }
                }
            }
            (
                OperatorId::Phi | OperatorId::PositionLine,
                BasisId::HermiteLine { length_scale, .. },
            ) => {
                let c = length_scale / std::f64::consts::SQRT_2;
                for n in 0..dim {
                    if n + 1 < dim {
                        let v = Complex64::new(c * ((n + 1) as f64).sqrt(), 0.0);
                        m[(n + 1, n)] = v;
                        m[(n, n + 1)] = v;
                    }
                }
            }
            (
                OperatorId::Lz | OperatorId::MomentumLine,
                BasisId::HermiteLine { length_scale, .. },
            ) => {
                let c = self.hbar / length_scale / std::f64::consts::SQRT_2;
                for n in 0..dim {
                    if n + 1 < dim {
                        let v = Complex64::new(0.0, c * ((n + 1) as f64).sqrt());
                        m[(n + 1, n)] = v;
                        m[(n, n + 1)] = -v;
                    }
                }
            }
            (OperatorId::PhiSquared, BasisId::HermiteLine { .. }) => {
                let pos = OperatorRep::phi(&self.basis)?.dense_matrix()?;
                m = pos.dot(&pos);
            }
            (OperatorId::MultiplyByFunction, _) => {
                return Err(Error::Domain(
                    "sampled-function operators have a grid action, not a spectral matrix".into(),
                ))
            }
            _ => {
                return Err(Error::BasisMismatch(format!(
                    "operator {} is not defined on the {} basis",
                    self.id.name(),
                    self.basis.name()
                )))
            }
        }
        Ok(m)
    }
}

/// Apply an operator to a graded function in coefficient space.
pub(crate) fn apply(op: &OperatorRep, g: &Graded) -> Result<Graded> {
    let mut out = Graded::empty();
    match (&op.id, &op.basis) {
        (OperatorId::Lz, BasisId::FourierCircle { .. } | BasisId::SphericalShell { .. }) => {
            derivative_action(
                &mut out,
                g,
                &op.basis,
                |k| Complex64::new(op.hbar * k as f64, 0.0),
                Complex64::new(0.0, -op.hbar),
            );
        }
        (OperatorId::NumberOp, BasisId::FourierCircle { .. }) => {
            derivative_action(
                &mut out,
                g,
                &op.basis,
                |k| Complex64::new(-(k as f64), 0.0),
                Complex64::new(0.0, 1.0),
            );
        }
        (
            OperatorId::Phi | OperatorId::PhiSquared,
            BasisId::FourierCircle { .. } | BasisId::SphericalShell { .. },
        ) => {
            let shift = if op.id == OperatorId::Phi { 1 } else { 2 };
            for (j, grade) in g.grades.iter().enumerate() {
                if grade.is_empty() {
                    continue;
                }
                let mut tmp = Graded::empty();
                tmp.grades = vec![Vec::new(); j + shift];
                tmp.grades.push(grade.clone());
                out.axpy(Complex64::new(1.0, 0.0), &tmp);
            }
        }
        (
            OperatorId::Phi | OperatorId::PositionLine,
            BasisId::HermiteLine { length_scale, .. },
        ) => {
            let v = g.grades.first().map(Vec::as_slice).unwrap_or(&[]);
            out.grades = vec![ladder_position(v, *length_scale)];
        }
        (OperatorId::PhiSquared, BasisId::HermiteLine { length_scale, .. }) => {
            let v = g.grades.first().map(Vec::as_slice).unwrap_or(&[]);
            out.grades = vec![ladder_position(
                &ladder_position(v, *length_scale),
                *length_scale,
            )];
        }
        (
            OperatorId::Lz | OperatorId::MomentumLine,
            BasisId::HermiteLine { length_scale, .. },
        ) => {
            let v = g.grades.first().map(Vec::as_slice).unwrap_or(&[]);
            out.grades = vec![ladder_momentum(v, *length_scale, op.hbar)];
        }
        (OperatorId::MultiplyByFunction, _) => {
            return Err(Error::Domain(
                "sampled-function operators act on grid samples; only moments are available"
                    .into(),
            ))
        }
        _ => {
            return Err(Error::BasisMismatch(format!(
                "operator {} is not defined on the {} basis",
                op.id.name(),
                op.basis.name()
            )))
        }
    }
    Ok(out)
}

/// Action of a first-order derivative operator on graded functions:
/// diagonal multiplier within each grade plus the product-rule drop
/// `phi^j -> j phi^{j-1}` scaled by `grade_factor`.
fn derivative_action(
    out: &mut Graded,
    g: &Graded,
    basis: &BasisId,
    diag: impl Fn(i64) -> Complex64,
    grade_factor: Complex64,
) {
    for (j, grade) in g.grades.iter().enumerate() {
        if grade.is_empty() {
            continue;
        }
        let mut within = Graded::empty();
        within.grades = vec![Vec::new(); j];
        within
            .grades
            .push(
                grade
                    .iter()
                    .enumerate()
                    .map(|(i, &c)| diag(basis.index_value(i)) * c)
                    .collect(),
            );
        out.axpy(Complex64::new(1.0, 0.0), &within);
        if j > 0 {
            let mut drop = Graded::empty();
            drop.grades = vec![Vec::new(); j - 1];
            drop.grades.push(grade.clone());
            out.axpy(grade_factor * j as f64, &drop);
        }
    }
}

fn ladder_position(v: &[Complex64], length_scale: f64) -> Vec<Complex64> {
    let c = length_scale / std::f64::consts::SQRT_2;
    let n = v.len();
    let mut out = vec![Complex64::default(); n + 1];
    for (m, slot) in out.iter_mut().enumerate() {
        let mut acc = Complex64::default();
        if let Some(&up) = v.get(m + 1) {
            acc += ((m + 1) as f64).sqrt() * up;
        }
        if m >= 1 {
            if let Some(&down) = v.get(m - 1) {
                acc += (m as f64).sqrt() * down;
            }
        }
        *slot = c * acc;
    }
    out
}

fn ladder_momentum(v: &[Complex64], length_scale: f64, hbar: f64) -> Vec<Complex64> {
    let c = Complex64::new(0.0, hbar / length_scale / std::f64::consts::SQRT_2);
    let n = v.len();
    let mut out = vec![Complex64::default(); n + 1];
    for (m, slot) in out.iter_mut().enumerate() {
        let mut acc = Complex64::default();
        if m >= 1 {
            if let Some(&down) = v.get(m - 1) {
                acc += (m as f64).sqrt() * down;
            }
        }
        if let Some(&up) = v.get(m + 1) {
            acc -= ((m + 1) as f64).sqrt() * up;
        }
        *slot = c * acc;
    }
    out
}

/// Mean, variance and standard deviation of one observable in one state.
#[derive(Debug, Clone, Copy)]
pub struct MomentReport {
    pub mean: Complex64,
    pub variance: f64,
    pub stddev: f64,
}

impl MomentReport {
    fn from_mean_var(mean: Complex64, variance: f64) -> Self {
        debug_assert!(variance > -1e-12, "variance {variance} below tolerance");
        let variance = variance.max(0.0);
        MomentReport {
            mean,
            variance,
            stddev: variance.sqrt(),
        }
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

/// `<A> = (psi, A psi)` and the intrinsic fluctuation
/// `Delta A = (dA psi, dA psi)^{1/2}` with `dA = A - <A>`.
pub fn moment(op: &OperatorRep, state: &QuantumState) -> Result<MomentReport> {
    check_basis(op, state)?;
    if let Some(mult) = &op.multiplier {
        let psi = state.sample_on_grid(&mult.grid)?;
        let density: Vec<f64> = psi.iter().map(|v| v.norm_sqr()).collect();
        let mean: f64 = mult
            .grid
            .weights
            .iter()
            .zip(&density)
            .zip(&mult.samples)
            .map(|((&w, &d), &f)| w * d * f)
            .sum();
        let var: f64 = mult
            .grid
            .weights
            .iter()
            .zip(&density)
            .zip(&mult.samples)
            .map(|((&w, &d), &f)| w * d * (f - mean) * (f - mean))
            .sum();
        return Ok(MomentReport::from_mean_var(Complex64::new(mean, 0.0), var));
    }
    let engine = Engine::new(&state.basis);
    let g = Graded::from_state(state);
    let ag = apply(op, &g)?;
    let mean = engine.inner(&g, &ag);
    let mut dev = ag;
    dev.axpy(-mean, &g);
    let var = engine.inner(&dev, &dev).re;
    Ok(MomentReport::from_mean_var(mean, var))
}

fn deviation(op: &OperatorRep, g: &Graded, engine: &Engine) -> Result<Graded> {
    let ag = apply(op, g)?;
    let mean = engine.inner(g, &ag);
    let mut dev = ag;
    dev.axpy(-mean, g);
    Ok(dev)
}

/// Fluctuation cross-correlation `(dA psi, dB psi)`, conjugate-linear in the
/// first slot.
pub fn cross_correlation(
    op_a: &OperatorRep,
    op_b: &OperatorRep,
    state: &QuantumState,
) -> Result<Complex64> {
    check_basis(op_a, state)?;
    check_basis(op_b, state)?;
    let engine = Engine::new(&state.basis);
    let g = Graded::from_state(state);
    let da = deviation(op_a, &g, &engine)?;
    let db = deviation(op_b, &g, &engine)?;
    Ok(engine.inner(&da, &db))
}

/// Residual `S = (A psi, B psi) - (psi, A B psi)` of the symmetry condition
/// that decides whether the product bound is derivable from the Schwarz
/// relation for this operator pair and state.
pub fn symmetry_residual(
    op_a: &OperatorRep,
    op_b: &OperatorRep,
    state: &QuantumState,
) -> Result<Complex64> {
    check_basis(op_a, state)?;
    check_basis(op_b, state)?;
    let engine = Engine::new(&state.basis);
    let g = Graded::from_state(state);
    let a_psi = apply(op_a, &g)?;
    let b_psi = apply(op_b, &g)?;
    let ab_psi = apply(op_a, &b_psi)?;
    Ok(engine.inner(&a_psi, &b_psi) - engine.inner(&g, &ab_psi))
}

/// The four ordered residuals (A,A), (A,B), (B,A), (B,B).
pub fn condition24_residuals(
    op_a: &OperatorRep,
    op_b: &OperatorRep,
    state: &QuantumState,
) -> Result<[Complex64; 4]> {
    Ok([
        symmetry_residual(op_a, op_a, state)?,
        symmetry_residual(op_a, op_b, state)?,
        symmetry_residual(op_b, op_a, state)?,
        symmetry_residual(op_b, op_b, state)?,
    ])
}

/// `<[A, B]> = (psi, A B psi) - (psi, B A psi)` through exact composite
/// actions.
pub fn commutator_mean(
    op_a: &OperatorRep,
    op_b: &OperatorRep,
    state: &QuantumState,
) -> Result<Complex64> {
    check_basis(op_a, state)?;
    check_basis(op_b, state)?;
    let engine = Engine::new(&state.basis);
    let g = Graded::from_state(state);
    let ab = apply(op_a, &apply(op_b, &g)?)?;
    let ba = apply(op_b, &apply(op_a, &g)?)?;
    Ok(engine.inner(&g, &ab) - engine.inner(&g, &ba))
}

/// Half the mean anticommutator of the deviations,
/// `(psi, (dA dB + dB dA) psi) / 2`.
pub fn anticommutator_half(
    op_a: &OperatorRep,
    op_b: &OperatorRep,
    state: &QuantumState,
) -> Result<Complex64> {
    check_basis(op_a, state)?;
    check_basis(op_b, state)?;
    let engine = Engine::new(&state.basis);
    let g = Graded::from_state(state);
    let da = deviation(op_a, &g, &engine)?;
    let db = deviation(op_b, &g, &engine)?;
    let a_db = {
        let ag = apply(op_a, &db)?;
        let mean_a = engine.inner(&g, &apply(op_a, &g)?);
        let mut dev = ag;
        dev.axpy(-mean_a, &db);
        dev
    };
    let b_da = {
        let bg = apply(op_b, &da)?;
        let mean_b = engine.inner(&g, &apply(op_b, &g)?);
        let mut dev = bg;
        dev.axpy(-mean_b, &da);
        dev
    };
    let mut sum = a_db;
    sum.axpy(Complex64::new(1.0, 0.0), &b_da);
    Ok(engine.inner(&g, &sum) * 0.5)
}

/// Higher-order fluctuation correlation `((dA)^r psi, (dB)^s psi)`.
pub fn higher_correlation(
    op_a: &OperatorRep,
    op_b: &OperatorRep,
    r: usize,
    s: usize,
    state: &QuantumState,
) -> Result<Complex64> {
    if r == 0 || s == 0 {
        return Err(Error::Domain("correlation orders must be positive".into()));
    }
    if r + s > MAX_CORRELATION_ORDER {
        return Err(Error::OrderOverflow {
            requested: r + s,
            max: MAX_CORRELATION_ORDER,
        });
    }
    check_basis(op_a, state)?;
    check_basis(op_b, state)?;
    let engine = Engine::new(&state.basis);
    let g = Graded::from_state(state);
    let mean_a = engine.inner(&g, &apply(op_a, &g)?);
    let mean_b = engine.inner(&g, &apply(op_b, &g)?);
    let mut left = g.clone();
    for _ in 0..r {
        let next = apply(op_a, &left)?;
        let mut dev = next;
        dev.axpy(-mean_a, &left);
        left = dev;
    }
    let mut right = g.clone();
    for _ in 0..s {
        let next = apply(op_b, &right)?;
        let mut dev = next;
        dev.axpy(-mean_b, &right);
        right = dev;
    }
    Ok(engine.inner(&left, &right))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{make_state, StateSpec};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn circular(m: i64) -> QuantumState {
        make_state(&StateSpec::CircularEigenstate { m }).unwrap()
    }

    fn random_state(seed: u64) -> QuantumState {
        make_state(&StateSpec::RandomPeriodic {
            max_mode: 8,
            seed,
        })
        .unwrap()
    }

    #[test]
    fn circular_moments() {
        for m in -3..=3i64 {
            for hbar in [1.0, 0.5, 1.054e-34] {
                let s = circular(m);
                let lz = OperatorRep::lz(&s.basis, hbar).unwrap();
                let r = moment(&lz, &s).unwrap();
                assert_abs_diff_eq!(r.mean.re, hbar * m as f64, epsilon = 1e-12 * hbar.max(1.0));
                assert!(r.mean.im.abs() < 1e-14);
                assert!(r.stddev.abs() < 1e-12);
            }
            let s = circular(m);
            let phi = OperatorRep::phi(&s.basis).unwrap();
            let r = moment(&phi, &s).unwrap();
            assert_abs_diff_eq!(r.mean.re, std::f64::consts::PI, epsilon = 1e-12);
            assert_abs_diff_eq!(
                r.stddev,
                std::f64::consts::PI / 3f64.sqrt(),
                epsilon = 1e-10
            );
        }
    }

    #[test]
    fn oscillator_moments_match_closed_form() {
        for &(inertia, omega, hbar) in &[(1.0, 1.0, 1.0), (2.0, 0.5, 1.0), (0.7, 3.0, 2.5)] {
            for n in 0..=6u32 {
                let s = make_state(&StateSpec::Oscillator {
                    n,
                    inertia,
                    omega,
                    hbar,
                })
                .unwrap();
                let lz = OperatorRep::lz(&s.basis, hbar).unwrap();
                let r = moment(&lz, &s).unwrap();
                let expected = (hbar * inertia * omega * (n as f64 + 0.5)).sqrt();
                assert_abs_diff_eq!(r.stddev, expected, epsilon = 1e-12 * expected);
                assert!(r.mean.norm() < 1e-12);
            }
        }
    }

    #[test]
    fn fock_phase_angle_spread() {
        for n in 0..=4u32 {
            let s = make_state(&StateSpec::FockPhase { n }).unwrap();
            let phi = OperatorRep::phi(&s.basis).unwrap();
            let r = moment(&phi, &s).unwrap();
            assert_abs_diff_eq!(
                r.stddev,
                std::f64::consts::PI / 3f64.sqrt(),
                epsilon = 1e-10
            );
            assert!(r.stddev <= TWO_PI);
        }
    }

    #[test]
    fn cross_correlation_of_dispersion_free_pair_vanishes() {
        let s = circular(2);
        let lz = OperatorRep::lz(&s.basis, 1.0).unwrap();
        let phi = OperatorRep::phi(&s.basis).unwrap();
        assert!(cross_correlation(&lz, &phi, &s).unwrap().norm() < 1e-14);
    }

    #[test]
    fn cross_correlation_self_is_variance() {
        let s = random_state(5);
        let phi = OperatorRep::phi(&s.basis).unwrap();
        let c = cross_correlation(&phi, &phi, &s).unwrap();
        let v = moment(&phi, &s).unwrap().variance;
        assert_abs_diff_eq!(c.re, v, epsilon = 1e-12);
        assert!(c.im.abs() < 1e-12);
        assert!(c.re >= 0.0);
    }

    #[test]
    fn symmetry_residual_circular_is_imaginary_hbar() {
        for m in -2..=2i64 {
            for hbar in [1.0, 0.25] {
                let s = circular(m);
                let lz = OperatorRep::lz(&s.basis, hbar).unwrap();
                let phi = OperatorRep::phi(&s.basis).unwrap();
                let r = symmetry_residual(&lz, &phi, &s).unwrap();
                assert!(r.re.abs() < 1e-12);
                assert_abs_diff_eq!(r.norm(), hbar, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn symmetry_residual_fock_phase_is_imaginary_unit() {
        for n in 0..=4u32 {
            let s = make_state(&StateSpec::FockPhase { n }).unwrap();
            let num = OperatorRep::number_op(&s.basis).unwrap();
            let phi = OperatorRep::phi(&s.basis).unwrap();
            let r = symmetry_residual(&num, &phi, &s).unwrap();
            assert!(r.re.abs() < 1e-12);
            assert_abs_diff_eq!(r.norm(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn symmetry_residual_oscillator_vanishes() {
        for n in 0..=20u32 {
            let s = make_state(&StateSpec::Oscillator {
                n,
                inertia: 1.3,
                omega: 0.8,
                hbar: 1.0,
            })
            .unwrap();
            let lz = OperatorRep::lz(&s.basis, 1.0).unwrap();
            let phi = OperatorRep::phi(&s.basis).unwrap();
            let r = symmetry_residual(&lz, &phi, &s).unwrap();
            assert!(r.norm() < 1e-10, "n={n}: {r}");
        }
    }

    #[test]
    fn residual_equals_seam_density_over_thousand_states() {
        let hbar = 1.0;
        let mut worst = 0.0f64;
        for seed in 0..1000u64 {
            let s = random_state(seed);
            let lz = OperatorRep::lz(&s.basis, hbar).unwrap();
            let phi = OperatorRep::phi(&s.basis).unwrap();
            let r = symmetry_residual(&lz, &phi, &s).unwrap();
            let expected = Complex64::new(0.0, TWO_PI * hbar * s.boundary_density().unwrap());
            worst = worst.max((r - expected).norm());
        }
        assert!(worst < 1e-9, "worst deviation {worst:.3e}");
    }

    #[test]
    fn commutator_values() {
        let s = circular(1);
        let lz = OperatorRep::lz(&s.basis, 1.0).unwrap();
        let phi = OperatorRep::phi(&s.basis).unwrap();
        let c = commutator_mean(&lz, &phi, &s).unwrap();
        assert_eq!(c, Complex64::new(0.0, -1.0));

        // Also exactly -i hbar on an arbitrary superposition.
        let r = random_state(17);
        let lz = OperatorRep::lz(&r.basis, 2.0).unwrap();
        let phi = OperatorRep::phi(&r.basis).unwrap();
        let c = commutator_mean(&lz, &phi, &r).unwrap();
        assert!((c - Complex64::new(0.0, -2.0)).norm() < 1e-13);

        let f = make_state(&StateSpec::FockPhase { n: 2 }).unwrap();
        let num = OperatorRep::number_op(&f.basis).unwrap();
        let fphi = OperatorRep::phi(&f.basis).unwrap();
        let c = commutator_mean(&num, &fphi, &f).unwrap();
        assert!((c - Complex64::new(0.0, 1.0)).norm() < 1e-13);

        assert!(commutator_mean(&fphi, &fphi, &f).unwrap().norm() < 1e-14);
    }

    #[test]
    fn higher_correlation_edge_cases() {
        let s = random_state(23);
        let lz = OperatorRep::lz(&s.basis, 1.0).unwrap();
        let phi = OperatorRep::phi(&s.basis).unwrap();
        let h11 = higher_correlation(&lz, &phi, 1, 1, &s).unwrap();
        let cc = cross_correlation(&lz, &phi, &s).unwrap();
        assert!((h11 - cc).norm() < 1e-13);

        // Dispersion-free left side kills every order.
        let m = circular(3);
        let mlz = OperatorRep::lz(&m.basis, 1.0).unwrap();
        let h = higher_correlation(&mlz, &mlz, 1, 2, &m).unwrap();
        assert!(h.norm() < 1e-14);

        assert!(matches!(
            higher_correlation(&lz, &phi, 5, 4, &s),
            Err(Error::OrderOverflow { .. })
        ));
        assert!(higher_correlation(&lz, &phi, 0, 1, &s).is_err());
    }

    #[test]
    fn higher_correlation_sphere_matches_grid_oracle() {
        let inv = std::f64::consts::FRAC_1_SQRT_2;
        let s = make_state(&StateSpec::DegenerateRotation {
            l: 1,
            coeffs: vec![
                Complex64::new(inv, 0.0),
                Complex64::default(),
                Complex64::new(inv, 0.0),
            ],
        })
        .unwrap();
        let lz = OperatorRep::lz(&s.basis, 1.0).unwrap();
        let phi = OperatorRep::phi(&s.basis).unwrap();
        let direct = higher_correlation(&lz, &phi, 2, 1, &s).unwrap();
        let via_grid = gridpath::higher_correlation_via_grid(&lz, &phi, 2, 1, &s).unwrap();
        assert!((direct - via_grid).norm() < 1e-8);
    }

    #[test]
    fn dense_matrices_are_hermitian() {
        let fourier = make_state(&StateSpec::RandomPeriodic {
            max_mode: 6,
            seed: 1,
        })
        .unwrap()
        .basis;
        let sphere = crate::states::BasisId::SphericalShell { l: 3 };
        let line = crate::states::BasisId::HermiteLine {
            truncation: 10,
            length_scale: 0.8,
        };
        let reps = vec![
            OperatorRep::phi(&fourier).unwrap(),
            OperatorRep::phi_squared(&fourier).unwrap(),
            OperatorRep::lz(&fourier, 1.0).unwrap(),
            OperatorRep::number_op(&fourier).unwrap(),
            OperatorRep::phi(&sphere).unwrap(),
            OperatorRep::phi_squared(&sphere).unwrap(),
            OperatorRep::position_line(&line).unwrap(),
            OperatorRep::momentum_line(&line, 1.0).unwrap(),
        ];
        for rep in reps {
            let m = rep.dense_matrix().unwrap();
            let (rows, cols) = m.dim();
            for i in 0..rows {
                for j in 0..cols {
                    let delta = (m[(i, j)] - m[(j, i)].conj()).norm();
                    assert!(delta < 1e-12, "{} not hermitian at ({i},{j})", rep.id.name());
                }
            }
        }
    }

    #[test]
    fn sphere_phi_elements_factor_into_overlap_and_moment() {
        let basis = crate::states::BasisId::SphericalShell { l: 2 };
        let phi = OperatorRep::phi(&basis).unwrap().dense_matrix().unwrap();
        let overlap = crate::numerics::theta_overlap(2);
        for i in 0..5usize {
            for j in 0..5usize {
                let delta = j as i64 - i as i64;
                let expected = crate::numerics::phi_moment_integral(1, delta).unwrap() / TWO_PI
                    * overlap[(i, j)];
                assert!((phi[(i, j)] - expected).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn basis_mismatch_and_unsupported_pairs() {
        let s = circular(1);
        let wrong = make_state(&StateSpec::RandomPeriodic {
            max_mode: 4,
            seed: 2,
        })
        .unwrap();
        let lz_wrong = OperatorRep::lz(&wrong.basis, 1.0).unwrap();
        assert!(matches!(
            moment(&lz_wrong, &s),
            Err(Error::BasisMismatch(_))
        ));

        let line = crate::states::BasisId::HermiteLine {
            truncation: 4,
            length_scale: 1.0,
        };
        assert!(matches!(
            OperatorRep::number_op(&line),
            Err(Error::BasisMismatch(_))
        ));
        assert!(matches!(
            OperatorRep::position_line(&s.basis),
            Err(Error::BasisMismatch(_))
        ));
    }

    #[test]
    fn multiply_by_validation_and_moments() {
        let s = circular(0);
        let grid = crate::numerics::QuadratureGrid::gauss_legendre_on(0.0, TWO_PI, 96);
        let samples: Vec<f64> = grid.nodes.iter().map(|&p| p.sin()).collect();
        let op = OperatorRep::multiply_by(samples.clone(), grid.clone(), &s.basis).unwrap();
        let r = moment(&op, &s).unwrap();
        // Uniform density: <sin> = 0, var = 1/2.
        assert!(r.mean.norm() < 1e-12);
        assert_abs_diff_eq!(r.variance, 0.5, epsilon = 1e-12);

        let short = vec![0.0; 3];
        assert!(matches!(
            OperatorRep::multiply_by(short, grid.clone(), &s.basis),
            Err(Error::NonPeriodicSamples(_))
        ));
        let line_grid = crate::numerics::QuadratureGrid::gauss_hermite(8);
        assert!(matches!(
            OperatorRep::multiply_by(vec![0.0; 8], line_grid, &s.basis),
            Err(Error::NonPeriodicSamples(_))
        ));
    }

    proptest! {
        #[test]
        fn hermitian_means_are_real(seed in 0u64..300) {
            let s = random_state(seed);
            let lz = OperatorRep::lz(&s.basis, 1.0).unwrap();
            let phi = OperatorRep::phi(&s.basis).unwrap();
            let phi2 = OperatorRep::phi_squared(&s.basis).unwrap();
            let num = OperatorRep::number_op(&s.basis).unwrap();
            for op in [&lz, &phi, &phi2, &num] {
                let r = moment(op, &s).unwrap();
                prop_assert!(r.mean.im.abs() < 1e-10);
                prop_assert!(r.variance >= 0.0);
                prop_assert!((r.stddev * r.stddev - r.variance).abs() < 1e-12);
            }
        }

        #[test]
        fn cross_correlation_conjugate_symmetry(seed in 0u64..300) {
            let s = random_state(seed);
            let lz = OperatorRep::lz(&s.basis, 1.0).unwrap();
            let phi = OperatorRep::phi(&s.basis).unwrap();
            let ab = cross_correlation(&lz, &phi, &s).unwrap();
            let ba = cross_correlation(&phi, &lz, &s).unwrap();
            prop_assert!((ab - ba.conj()).norm() < 1e-12);
        }
    }

    // Quadrature-path comparisons are costlier per case; fewer cases suffice
    // since each case already sweeps several operators.
    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn coefficient_and_grid_paths_agree(seed in 0u64..60) {
            let s = random_state(seed);
            let lz = OperatorRep::lz(&s.basis, 1.0).unwrap();
            let phi = OperatorRep::phi(&s.basis).unwrap();
            for op in [&lz, &phi] {
                let direct = moment(op, &s).unwrap();
                let via_grid = gridpath::moment_via_grid(op, &s).unwrap();
                prop_assert!((direct.mean - via_grid.mean).norm() < 1e-8);
                prop_assert!((direct.stddev - via_grid.stddev).abs() < 1e-8);
            }
            let direct = cross_correlation(&lz, &phi, &s).unwrap();
            let via_grid = gridpath::cross_correlation_via_grid(&lz, &phi, &s).unwrap();
            prop_assert!((direct - via_grid).norm() < 1e-8);
        }

        #[test]
        fn sphere_moments_agree_with_tensor_grid(seed in 0u64..30, l in 1u32..4) {
            let dim = 2 * l as usize + 1;
            let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(seed);
            let coeffs: Vec<Complex64> = (0..dim)
                .map(|_| Complex64::new(
                    crate::states::standard_normal(&mut rng),
                    crate::states::standard_normal(&mut rng),
                ))
                .collect();
            let s = make_state(&StateSpec::DegenerateRotation { l, coeffs }).unwrap();
            let lz = OperatorRep::lz(&s.basis, 1.0).unwrap();
            let phi = OperatorRep::phi(&s.basis).unwrap();
            for op in [&lz, &phi] {
                let direct = moment(op, &s).unwrap();
                let via_grid = gridpath::moment_via_grid(op, &s).unwrap();
                prop_assert!((direct.mean - via_grid.mean).norm() < 1e-8);
                prop_assert!((direct.stddev - via_grid.stddev).abs() < 1e-8);
            }
            let direct = symmetry_residual(&lz, &phi, &s).unwrap();
            let via_grid = gridpath::symmetry_residual_via_grid(&lz, &phi, &s).unwrap();
            prop_assert!((direct - via_grid).norm() < 1e-8);
        }
    }
}
