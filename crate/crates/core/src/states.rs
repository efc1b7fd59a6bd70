//! State families: circular eigenstates, phase eigenstates of the number
//! operator, oscillator (torsion-pendulum) eigenstates, degenerate spherical
//! superpositions, and random or explicit Fourier superpositions.
//!
//! All normalization constants (the `(2 pi)^{-1/2}` of the circle modes, the
//! Hermite-Gaussian factors on the line) are absorbed into the basis
//! definitions, so a coefficient vector of unit Euclidean norm always
//! describes a unit-norm wave function.

use crate::error::{Error, Result};
use crate::numerics::{hermite_function, Domain, QuadratureGrid};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// Spectral basis a state is expanded in.
#[derive(Debug, Clone, PartialEq)]
pub enum BasisId {
    /// Orthonormal circle modes `e^{i k phi} / sqrt(2 pi)`, k = -K..K.
    FourierCircle { max_mode: u32 },
    /// Orthonormal oscillator eigenfunctions on the line with length scale
    /// `length_scale = sqrt(hbar / (I omega))`; indices n = 0..truncation.
    HermiteLine { truncation: u32, length_scale: f64 },
    /// Spherical harmonics of fixed degree l, indices m = -l..l.
    SphericalShell { l: u32 },
}

impl BasisId {
    /// Number of coefficients a state in this basis carries.
    pub fn dim(&self) -> usize {
        match *self {
            BasisId::FourierCircle { max_mode } => 2 * max_mode as usize + 1,
            BasisId::HermiteLine { truncation, .. } => truncation as usize + 1,
            BasisId::SphericalShell { l } => 2 * l as usize + 1,
        }
    }

    /// Spectral index (k or m) of coefficient slot `i`; `i` itself for the
    /// Hermite line.
    pub fn index_value(&self, i: usize) -> i64 {
        match *self {
            BasisId::FourierCircle { max_mode } => i as i64 - max_mode as i64,
            BasisId::HermiteLine { .. } => i as i64,
            BasisId::SphericalShell { l } => i as i64 - l as i64,
        }
    }

    /// Whether operators built for `self` act on states in `other`.
    /// Hermite bases only need to agree on the length scale; the truncation
    /// is bookkeeping.
    pub fn compatible(&self, other: &BasisId) -> bool {
        match (self, other) {
            (
                BasisId::FourierCircle { max_mode: a },
                BasisId::FourierCircle { max_mode: b },
            ) => a == b,
            (
                BasisId::HermiteLine { length_scale: a, .. },
                BasisId::HermiteLine { length_scale: b, .. },
            ) => (a - b).abs() <= 1e-12 * a.abs().max(1.0),
            (BasisId::SphericalShell { l: a }, BasisId::SphericalShell { l: b }) => a == b,
            _ => false,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            BasisId::FourierCircle { .. } => "fourier-circle",
            BasisId::HermiteLine { .. } => "hermite-line",
            BasisId::SphericalShell { .. } => "spherical-shell",
        }
    }
}

/// Recipe for constructing a state.
#[derive(Debug, Clone, PartialEq)]
pub enum StateSpec {
    /// Single circle mode `e^{i m phi} / sqrt(2 pi)`.
    CircularEigenstate { m: i64 },
    /// Phase-representation eigenstate of the number operator,
    /// `e^{-i n phi} / sqrt(2 pi)`.
    FockPhase { n: u32 },
    /// Oscillator eigenstate with vibrational number n, inertia I and
    /// frequency omega (equally the rectilinear oscillator with mass I).
    Oscillator {
        n: u32,
        inertia: f64,
        omega: f64,
        hbar: f64,
    },
    /// Degree-l spherical superposition with coefficients c_m, m = -l..l.
    DegenerateRotation { l: u32, coeffs: Vec<Complex64> },
    /// Unit-norm random point on the Fourier coefficient sphere, modes
    /// -K..K, reproducible from the seed.
    RandomPeriodic { max_mode: u32, seed: u64 },
    /// Explicit Fourier amplitudes, odd length 2K+1 centered on mode 0.
    ExplicitFourier { coeffs: Vec<Complex64> },
}

/// A normalized state: basis, coefficient vector and a provenance label.
#[derive(Debug, Clone)]
pub struct QuantumState {
    pub basis: BasisId,
    pub coeffs: Vec<Complex64>,
    pub label: String,
}

/// Build and normalize a state from its spec.
pub fn make_state(spec: &StateSpec) -> Result<QuantumState> {
    match spec {
        StateSpec::CircularEigenstate { m } => {
            let max_mode = m.unsigned_abs().max(1) as u32;
            let mut coeffs = vec![Complex64::default(); 2 * max_mode as usize + 1];
            coeffs[(*m + max_mode as i64) as usize] = Complex64::new(1.0, 0.0);
            Ok(QuantumState {
                basis: BasisId::FourierCircle { max_mode },
                coeffs,
                label: format!("circular(m={m})"),
            })
        }
        StateSpec::FockPhase { n } => {
            let max_mode = (*n).max(1);
            let mut coeffs = vec![Complex64::default(); 2 * max_mode as usize + 1];
            coeffs[(max_mode - n) as usize] = Complex64::new(1.0, 0.0);
            Ok(QuantumState {
                basis: BasisId::FourierCircle { max_mode },
                coeffs,
                label: format!("fock-phase(n={n})"),
            })
        }
        StateSpec::Oscillator {
            n,
            inertia,
            omega,
            hbar,
        } => {
            if !(*inertia > 0.0) || !(*omega > 0.0) || !(*hbar > 0.0) {
                return Err(Error::InvalidSpec(format!(
                    "oscillator parameters must be positive: I={inertia}, omega={omega}, hbar={hbar}"
                )));
            }
            let length_scale = (hbar / (inertia * omega)).sqrt();
            let mut coeffs = vec![Complex64::default(); *n as usize + 1];
            coeffs[*n as usize] = Complex64::new(1.0, 0.0);
            Ok(QuantumState {
                basis: BasisId::HermiteLine {
                    truncation: *n,
                    length_scale,
                },
                coeffs,
                label: format!("oscillator(n={n}, I={inertia}, omega={omega})"),
            })
        }
        StateSpec::DegenerateRotation { l, coeffs } => {
            let dim = 2 * *l as usize + 1;
            if coeffs.len() != dim {
                return Err(Error::InvalidSpec(format!(
                    "degree l={l} needs {dim} coefficients, got {}",
                    coeffs.len()
                )));
            }
            let coeffs = normalized(coeffs.clone())?;
            Ok(QuantumState {
                basis: BasisId::SphericalShell { l: *l },
                coeffs,
                label: format!("degenerate(l={l})"),
            })
        }
        StateSpec::RandomPeriodic { max_mode, seed } => {
            if *max_mode < 1 {
                return Err(Error::InvalidSpec(
                    "random periodic state needs max_mode >= 1".into(),
                ));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let raw: Vec<Complex64> = (0..2 * *max_mode as usize + 1)
                .map(|_| Complex64::new(standard_normal(&mut rng), standard_normal(&mut rng)))
                .collect();
            let coeffs = normalized(raw)?;
            Ok(QuantumState {
                basis: BasisId::FourierCircle {
                    max_mode: *max_mode,
                },
                coeffs,
                label: format!("random(K={max_mode}, seed={seed})"),
            })
        }
        StateSpec::ExplicitFourier { coeffs } => {
            if coeffs.is_empty() {
                return Err(Error::InvalidSpec("empty coefficient vector".into()));
            }
            // A single amplitude means the constant state; widen to K = 1 so
            // the basis invariant K >= 1 holds.
            let mut padded = coeffs.clone();
            if padded.len() == 1 {
                padded = vec![Complex64::default(), padded[0], Complex64::default()];
            }
            if padded.len() % 2 == 0 {
                return Err(Error::InvalidSpec(format!(
                    "Fourier amplitude vector must have odd length 2K+1, got {}",
                    coeffs.len()
                )));
            }
            let max_mode = ((padded.len() - 1) / 2) as u32;
            let coeffs = normalized(padded)?;
            Ok(QuantumState {
                basis: BasisId::FourierCircle { max_mode },
                coeffs,
                label: format!("fourier(K={max_mode})"),
            })
        }
    }
}

impl QuantumState {
    /// Sum of squared coefficient magnitudes; 1 for any constructed state.
    pub fn norm_sq(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Probability density at the seam of the circle,
    /// `|psi(2 pi^-)|^2 = |sum_k a_k|^2 / (2 pi)`, evaluated as the exact
    /// coefficient sum rather than by sampling near the seam.
    pub fn boundary_density(&self) -> Result<f64> {
        match self.basis {
            BasisId::FourierCircle { .. } => {
                let s: Complex64 = self.coeffs.iter().sum();
                Ok(s.norm_sqr() / TWO_PI)
            }
            _ => Err(Error::BasisMismatch(format!(
                "boundary density is defined for fourier-circle states, not {}",
                self.basis.name()
            ))),
        }
    }

    /// Pointwise values of the wave function at the grid nodes.
    pub fn sample_on_grid(&self, grid: &QuadratureGrid) -> Result<Vec<Complex64>> {
        match &self.basis {
            BasisId::FourierCircle { max_mode } => {
                if !grid.covers_circle() {
                    return Err(Error::BasisMismatch(format!(
                        "grid domain {:?} does not cover the circle coordinate range",
                        grid.domain
                    )));
                }
                let norm = 1.0 / TWO_PI.sqrt();
                Ok(grid
                    .nodes
                    .iter()
                    .map(|&phi| {
                        self.coeffs
                            .iter()
                            .enumerate()
                            .map(|(i, &a)| {
                                let k = i as i64 - *max_mode as i64;
                                a * Complex64::from_polar(norm, k as f64 * phi)
                            })
                            .sum()
                    })
                    .collect())
            }
            BasisId::HermiteLine { length_scale, .. } => {
                if grid.domain != Domain::Line {
                    return Err(Error::BasisMismatch(format!(
                        "grid domain {:?} does not cover the line",
                        grid.domain
                    )));
                }
                let scale = 1.0 / length_scale.sqrt();
                let mut out = Vec::with_capacity(grid.len());
                for &x in &grid.nodes {
                    let xi = x / length_scale;
                    let mut v = Complex64::default();
                    for (n, &b) in self.coeffs.iter().enumerate() {
                        if b != Complex64::default() {
                            v += b * hermite_function(n, xi)? * scale;
                        }
                    }
                    out.push(v);
                }
                Ok(out)
            }
            BasisId::SphericalShell { .. } => Err(Error::BasisMismatch(
                "spherical states live on a two-dimensional domain; use the tensor-grid \
                 moment path instead of a one-dimensional grid"
                    .into(),
            )),
        }
    }
}

/// Normalize a coefficient vector, rejecting zero or non-finite input.
fn normalized(mut coeffs: Vec<Complex64>) -> Result<Vec<Complex64>> {
    if coeffs
        .iter()
        .any(|c| !c.re.is_finite() || !c.im.is_finite())
    {
        return Err(Error::InvalidSpec("non-finite coefficient".into()));
    }
    let norm = coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Err(Error::InvalidSpec("zero coefficient vector".into()));
    }
    for c in &mut coeffs {
        *c /= norm;
    }
    Ok(coeffs)
}

/// Standard normal draw via Box-Muller; keeps the dependency surface to the
/// plain RNG crates.
pub(crate) fn standard_normal<R: Rng>(rng: &mut R) -> f64 {
    let u1: f64 = 1.0 - rng.gen::<f64>(); // (0, 1]; guards the logarithm
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (TWO_PI * u2).cos()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn circular_eigenstate_places_single_mode() {
        let s = make_state(&StateSpec::CircularEigenstate { m: 2 }).unwrap();
        assert_eq!(s.basis, BasisId::FourierCircle { max_mode: 2 });
        for (i, c) in s.coeffs.iter().enumerate() {
            let expected = if i == 4 { 1.0 } else { 0.0 };
            assert_abs_diff_eq!(c.re, expected);
            assert_abs_diff_eq!(c.im, 0.0);
        }
    }

    #[test]
    fn fock_phase_occupies_negative_mode() {
        let s = make_state(&StateSpec::FockPhase { n: 3 }).unwrap();
        // k = -3 slot of a K = 3 basis.
        assert_abs_diff_eq!(s.coeffs[0].re, 1.0);
        assert_abs_diff_eq!(s.norm_sq(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn degenerate_single_coefficient() {
        let s = make_state(&StateSpec::DegenerateRotation {
            l: 1,
            coeffs: vec![
                Complex64::default(),
                Complex64::new(5.0, 0.0),
                Complex64::default(),
            ],
        })
        .unwrap();
        assert_abs_diff_eq!(s.coeffs[1].re, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn random_periodic_is_deterministic() {
        let a = make_state(&StateSpec::RandomPeriodic { max_mode: 8, seed: 7 }).unwrap();
        let b = make_state(&StateSpec::RandomPeriodic { max_mode: 8, seed: 7 }).unwrap();
        assert_eq!(a.coeffs, b.coeffs);
        let c = make_state(&StateSpec::RandomPeriodic { max_mode: 8, seed: 8 }).unwrap();
        assert_ne!(a.coeffs, c.coeffs);
    }

    #[test]
    fn boundary_density_values() {
        let m = make_state(&StateSpec::CircularEigenstate { m: -2 }).unwrap();
        assert_abs_diff_eq!(m.boundary_density().unwrap(), 1.0 / TWO_PI, epsilon = 1e-15);
        let f = make_state(&StateSpec::FockPhase { n: 4 }).unwrap();
        assert_abs_diff_eq!(f.boundary_density().unwrap(), 1.0 / TWO_PI, epsilon = 1e-15);

        // Equal superposition of modes +-1 doubles the seam density.
        let inv = std::f64::consts::FRAC_1_SQRT_2;
        let s = make_state(&StateSpec::ExplicitFourier {
            coeffs: vec![
                Complex64::new(inv, 0.0),
                Complex64::default(),
                Complex64::new(inv, 0.0),
            ],
        })
        .unwrap();
        let bd = s.boundary_density().unwrap();
        assert_abs_diff_eq!(bd, 1.0 / std::f64::consts::PI, epsilon = 1e-14);
        // Cross-check by sampling just below the seam.
        let grid = QuadratureGrid::periodic_uniform(1 << 14);
        let samples = s.sample_on_grid(&grid).unwrap();
        let near_seam = samples.last().unwrap().norm_sqr();
        assert_abs_diff_eq!(bd, near_seam, epsilon = 1e-5);
    }

    #[test]
    fn boundary_density_rejects_line_states() {
        let s = make_state(&StateSpec::Oscillator {
            n: 0,
            inertia: 1.0,
            omega: 1.0,
            hbar: 1.0,
        })
        .unwrap();
        assert!(matches!(s.boundary_density(), Err(Error::BasisMismatch(_))));
    }

    #[test]
    fn constant_mode_samples() {
        let s = make_state(&StateSpec::CircularEigenstate { m: 0 }).unwrap();
        let grid = QuadratureGrid::periodic_uniform(64);
        let samples = s.sample_on_grid(&grid).unwrap();
        for v in samples {
            assert_abs_diff_eq!(v.re, 1.0 / TWO_PI.sqrt(), epsilon = 1e-15);
            assert_abs_diff_eq!(v.im, 0.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn oscillator_ground_state_peak() {
        let s = make_state(&StateSpec::Oscillator {
            n: 0,
            inertia: 1.0,
            omega: 1.0,
            hbar: 1.0,
        })
        .unwrap();
        let grid = QuadratureGrid::gauss_hermite(64);
        let samples = s.sample_on_grid(&grid).unwrap();
        // Norm via the compensated rule doubles as the quadrature oracle for
        // the Gaussian normalization.
        let norm: f64 = grid
            .weights
            .iter()
            .zip(&samples)
            .map(|(&w, v)| w * v.norm_sqr())
            .sum();
        assert_abs_diff_eq!(norm, 1.0, epsilon = 1e-12);
        // Peak value at xi = 0 is pi^{-1/4} for unit length scale.
        let smax = samples
            .iter()
            .map(|v| v.norm())
            .fold(f64::NEG_INFINITY, f64::max);
        assert!(smax <= std::f64::consts::PI.powf(-0.25) + 1e-12);
    }

    #[test]
    fn fock_phase_is_number_eigenvector_in_coefficients() {
        // Applying i d/dphi to mode -n multiplies by n; in coefficient space
        // the diagonal number action must reproduce the vector exactly.
        for n in 0..6u32 {
            let s = make_state(&StateSpec::FockPhase { n }).unwrap();
            let max_mode = match s.basis {
                BasisId::FourierCircle { max_mode } => max_mode as i64,
                _ => unreachable!(),
            };
            for (i, &c) in s.coeffs.iter().enumerate() {
                let k = i as i64 - max_mode;
                let applied = Complex64::new(-(k as f64), 0.0) * c;
                let expected = Complex64::new(n as f64, 0.0) * c;
                assert!((applied - expected).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn invalid_specs_are_rejected() {
        assert!(make_state(&StateSpec::DegenerateRotation {
            l: 1,
            coeffs: vec![Complex64::default(); 4],
        })
        .is_err());
        assert!(make_state(&StateSpec::DegenerateRotation {
            l: 1,
            coeffs: vec![Complex64::default(); 3],
        })
        .is_err());
        assert!(make_state(&StateSpec::RandomPeriodic { max_mode: 0, seed: 1 }).is_err());
        assert!(make_state(&StateSpec::Oscillator {
            n: 1,
            inertia: -1.0,
            omega: 1.0,
            hbar: 1.0,
        })
        .is_err());
        assert!(make_state(&StateSpec::ExplicitFourier {
            coeffs: vec![Complex64::new(1.0, 0.0); 4],
        })
        .is_err());
    }

    #[test]
    fn sample_domain_mismatch() {
        let s = make_state(&StateSpec::CircularEigenstate { m: 1 }).unwrap();
        let line = QuadratureGrid::gauss_hermite(8);
        assert!(matches!(
            s.sample_on_grid(&line),
            Err(Error::BasisMismatch(_))
        ));
        let osc = make_state(&StateSpec::Oscillator {
            n: 0,
            inertia: 1.0,
            omega: 1.0,
            hbar: 1.0,
        })
        .unwrap();
        let circle = QuadratureGrid::periodic_uniform(32);
        assert!(matches!(
            osc.sample_on_grid(&circle),
            Err(Error::BasisMismatch(_))
        ));
    }

    proptest! {
        #[test]
        fn constructed_states_are_normalized(seed in 0u64..1_000, k in 1u32..12) {
            let s = make_state(&StateSpec::RandomPeriodic { max_mode: k, seed }).unwrap();
            prop_assert!((s.norm_sq() - 1.0).abs() < 1e-12);
        }

        #[test]
        fn sampled_norm_matches_coefficient_norm(seed in 0u64..400, k in 1u32..10) {
            // Fourier and grid representations agree on the norm through the
            // seam-interval Gauss rule.
            let s = make_state(&StateSpec::RandomPeriodic { max_mode: k, seed }).unwrap();
            let grid = QuadratureGrid::gauss_legendre_on(0.0, TWO_PI, 96);
            let samples = s.sample_on_grid(&grid).unwrap();
            let norm: f64 = grid.weights.iter().zip(&samples)
                .map(|(&w, v)| w * v.norm_sqr()).sum();
            prop_assert!((norm - 1.0).abs() < 1e-10);
        }

        #[test]
        fn grid_inner_products_match_coefficient_inner_products(
            seed in 0u64..200, k in 1u32..8,
        ) {
            let a = make_state(&StateSpec::RandomPeriodic { max_mode: k, seed }).unwrap();
            let b = make_state(&StateSpec::RandomPeriodic { max_mode: k, seed: seed + 10_000 }).unwrap();
            let coeff: Complex64 = a.coeffs.iter().zip(&b.coeffs)
                .map(|(x, y)| x.conj() * y).sum();
            let grid = QuadratureGrid::gauss_legendre_on(0.0, TWO_PI, 96);
            let sa = a.sample_on_grid(&grid).unwrap();
            let sb = b.sample_on_grid(&grid).unwrap();
            let on_grid = crate::numerics::grid_inner_product(&sa, &sb, &grid).unwrap();
            prop_assert!((coeff - on_grid).norm() < 1e-10);
        }
    }
}
