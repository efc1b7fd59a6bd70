//! Quadrature grids: periodic-uniform, Gauss-Legendre and Gauss-Hermite.
//!
//! The Gauss rules are computed from the orthonormal three-term recurrence of
//! the underlying polynomial family: nodes by interlacing bisection (the
//! roots of p_n strictly separate the roots of p_{n+1}, so every root is
//! bracketed by construction) and weights by the Christoffel formula
//! `w_i = 1 / sum_{j<n} p_j(x_i)^2`.

use crate::error::{Error, Result};
use num_complex::Complex64;
use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// Computed rules keyed by (family, order); root-finding is cubic in the
/// order, so rules are built once and cloned out.
fn rule_cache() -> &'static Mutex<HashMap<(u8, usize), (Vec<f64>, Vec<f64>)>> {
    static CACHE: OnceLock<Mutex<HashMap<(u8, usize), (Vec<f64>, Vec<f64>)>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn cached_rule(
    family: u8,
    n: usize,
    build: impl FnOnce() -> (Vec<f64>, Vec<f64>),
) -> (Vec<f64>, Vec<f64>) {
    if let Some(hit) = rule_cache().lock().unwrap().get(&(family, n)) {
        return hit.clone();
    }
    let rule = build();
    rule_cache()
        .lock()
        .unwrap()
        .insert((family, n), rule.clone());
    rule
}

/// Which family of rule a grid was built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridKind {
    PeriodicUniform,
    GaussLegendre,
    HermiteLine,
}

/// Integration domain carried by a grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Domain {
    /// The circle of circumference 2*pi, coordinates in [0, 2*pi).
    Circle,
    /// A finite interval [lo, hi].
    Interval { lo: f64, hi: f64 },
    /// The whole real line.
    Line,
}

/// Nodes and weights of a quadrature rule together with its domain.
#[derive(Debug, Clone)]
pub struct QuadratureGrid {
    pub kind: GridKind,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub domain: Domain,
}

impl QuadratureGrid {
    /// Uniform rule on the circle: nodes `2 pi j / n`, weights `2 pi / n`.
    ///
    /// Integrates trigonometric polynomials of degree < n exactly, which is
    /// what makes it the right grid for Fourier-mode orthogonality and norms.
    pub fn periodic_uniform(n: usize) -> Self {
        assert!(n >= 1, "periodic grid needs at least one node");
        let w = TWO_PI / n as f64;
        QuadratureGrid {
            kind: GridKind::PeriodicUniform,
            nodes: (0..n).map(|j| w * j as f64).collect(),
            weights: vec![w; n],
            domain: Domain::Circle,
        }
    }

    /// Gauss-Legendre rule with `n` nodes on [-1, 1]; exact for polynomials
    /// of degree <= 2n - 1.
    pub fn gauss_legendre(n: usize) -> Self {
        // Orthonormal Legendre: alpha_j = 0, beta_j = j / sqrt(4 j^2 - 1), mu_0 = 2.
        let (nodes, weights) = cached_rule(0, n, || {
            let beta = |j: usize| {
                let jf = j as f64;
                jf / (4.0 * jf * jf - 1.0).sqrt()
            };
            gauss_rule(n, 2.0, &beta, -1.0 - 1e-9, 1.0 + 1e-9)
        });
        QuadratureGrid {
            kind: GridKind::GaussLegendre,
            nodes,
            weights,
            domain: Domain::Interval { lo: -1.0, hi: 1.0 },
        }
    }

    /// Gauss-Legendre rule affinely mapped onto `[lo, hi]`.
    pub fn gauss_legendre_on(lo: f64, hi: f64, n: usize) -> Self {
        assert!(hi > lo, "empty interval");
        let base = Self::gauss_legendre(n);
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        QuadratureGrid {
            kind: GridKind::GaussLegendre,
            nodes: base.nodes.iter().map(|&x| mid + half * x).collect(),
            weights: base.weights.iter().map(|&w| half * w).collect(),
            domain: Domain::Interval { lo, hi },
        }
    }

    /// Gauss-Hermite rule with weight-compensated weights: the returned rule
    /// approximates plain integrals `int f(x) dx` over the line and is exact
    /// whenever `f(x) = e^{-x^2} * polynomial(x)` of degree <= 2n - 1, which
    /// covers every product of two oscillator eigenfunctions times a
    /// polynomial observable.
    pub fn gauss_hermite(n: usize) -> Self {
        // Orthonormal Hermite (weight e^{-x^2}): alpha_j = 0, beta_j = sqrt(j/2),
        // mu_0 = sqrt(pi).
        let (nodes, weights) = cached_rule(1, n, || {
            let beta = |j: usize| (j as f64 / 2.0).sqrt();
            let edge = (2.0 * n as f64 + 1.0).sqrt() + 2.0;
            let (nodes, raw) = gauss_rule(n, std::f64::consts::PI.sqrt(), &beta, -edge, edge);
            let compensated = nodes
                .iter()
                .zip(&raw)
                .map(|(&x, &w)| w * (x * x).exp())
                .collect();
            (nodes, compensated)
        });
        QuadratureGrid {
            kind: GridKind::HermiteLine,
            nodes,
            weights,
            domain: Domain::Line,
        }
    }

    /// Rescale a line grid by `s > 0` (substitution x -> x/s), as needed to
    /// move a Hermite rule from the dimensionless variable to a physical
    /// coordinate with length scale `s`.
    pub fn scaled(&self, s: f64) -> Self {
        assert!(s > 0.0, "scale must be positive");
        QuadratureGrid {
            kind: self.kind,
            nodes: self.nodes.iter().map(|&x| s * x).collect(),
            weights: self.weights.iter().map(|&w| s * w).collect(),
            domain: match self.domain {
                Domain::Line => Domain::Line,
                Domain::Interval { lo, hi } => Domain::Interval {
                    lo: s * lo,
                    hi: s * hi,
                },
                Domain::Circle => Domain::Circle,
            },
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// True when the grid covers the circle coordinate range, either as the
    /// periodic rule itself or as a Gauss rule on the closed seam interval.
    pub fn covers_circle(&self) -> bool {
        match self.domain {
            Domain::Circle => true,
            Domain::Interval { lo, hi } => lo.abs() < 1e-9 && (hi - TWO_PI).abs() < 1e-9,
            Domain::Line => false,
        }
    }

    /// Integrate complex samples taken at the grid nodes.
    pub fn integrate(&self, samples: &[Complex64]) -> Result<Complex64> {
        if samples.len() != self.len() {
            return Err(Error::LengthMismatch {
                left: samples.len(),
                right: self.len(),
            });
        }
        Ok(self
            .weights
            .iter()
            .zip(samples)
            .map(|(&w, &v)| w * v)
            .sum())
    }
}

/// Scalar product of two sampled functions, `sum_i w_i conj(f_i) g_i`;
/// conjugate-linear in the first argument.
pub fn grid_inner_product(
    f: &[Complex64],
    g: &[Complex64],
    grid: &QuadratureGrid,
) -> Result<Complex64> {
    if f.len() != g.len() {
        return Err(Error::LengthMismatch {
            left: f.len(),
            right: g.len(),
        });
    }
    if f.len() != grid.len() {
        return Err(Error::LengthMismatch {
            left: f.len(),
            right: grid.len(),
        });
    }
    Ok(grid
        .weights
        .iter()
        .zip(f.iter().zip(g))
        .map(|(&w, (&fi, &gi))| w * fi.conj() * gi)
        .sum())
}

/// Evaluate the orthonormal polynomials p_0..p_top at `x` and return p_top.
/// `beta(j)` is the off-diagonal Jacobi coefficient; the diagonal is zero for
/// both families used here (symmetric weights).
fn eval_orthonormal(top: usize, x: f64, p0: f64, beta: &dyn Fn(usize) -> f64) -> f64 {
    if top == 0 {
        return p0;
    }
    let mut prev = p0;
    let mut cur = x * p0 / beta(1);
    for j in 1..top {
        let next = (x * cur - beta(j) * prev) / beta(j + 1);
        prev = cur;
        cur = next;
    }
    cur
}

/// Nodes and weights of the n-point Gauss rule for the orthonormal family
/// with first moment `mu0` and Jacobi off-diagonals `beta`.
fn gauss_rule(
    n: usize,
    mu0: f64,
    beta: &dyn Fn(usize) -> f64,
    lo: f64,
    hi: f64,
) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "gauss rule needs at least one node");
    let p0 = 1.0 / mu0.sqrt();

    // Roots level by level: the roots of p_k bracket those of p_{k+1}.
    let mut roots: Vec<f64> = Vec::new();
    for level in 1..=n {
        let mut brackets = Vec::with_capacity(level + 1);
        brackets.push(lo);
        brackets.extend_from_slice(&roots);
        brackets.push(hi);
        let mut next = Vec::with_capacity(level);
        for pair in brackets.windows(2) {
            next.push(bisect_root(
                |x| eval_orthonormal(level, x, p0, beta),
                pair[0],
                pair[1],
            ));
        }
        roots = next;
    }

    let weights = roots
        .iter()
        .map(|&x| {
            let mut sum = 0.0;
            let mut prev = p0;
            let mut cur = x * p0 / beta(1);
            sum += prev * prev;
            for j in 1..n {
                sum += cur * cur;
                if j + 1 < n + 1 {
                    let nx = (x * cur - beta(j) * prev) / beta(j + 1);
                    prev = cur;
                    cur = nx;
                }
            }
            1.0 / sum
        })
        .collect();
    (roots, weights)
}

fn bisect_root(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let mut fa = f(a);
    let fb = f(b);
    debug_assert!(
        fa == 0.0 || fb == 0.0 || (fa < 0.0) != (fb < 0.0),
        "root not bracketed"
    );
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if mid == a || mid == b {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fa < 0.0) != (fm < 0.0) {
            b = mid;
        } else {
            a = mid;
            fa = fm;
        }
    }
    0.5 * (a + b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn periodic_grid_invariants() {
        let g = QuadratureGrid::periodic_uniform(2048);
        assert_eq!(g.len(), 2048);
        assert!(g.weights.iter().all(|&w| w > 0.0));
        assert_abs_diff_eq!(g.weights.iter().sum::<f64>(), TWO_PI, epsilon = 1e-12);
        assert!(g.nodes.windows(2).all(|p| p[1] > p[0]));
        assert!(g.nodes.iter().all(|&x| (0.0..TWO_PI).contains(&x)));
    }

    #[test]
    fn legendre_grid_invariants() {
        for n in [1usize, 2, 5, 32, 128] {
            let g = QuadratureGrid::gauss_legendre(n);
            assert!(g.weights.iter().all(|&w| w > 0.0));
            assert_abs_diff_eq!(g.weights.iter().sum::<f64>(), 2.0, epsilon = 1e-12);
            assert!(g.nodes.windows(2).all(|p| p[1] > p[0]));
            assert!(g.nodes.iter().all(|&x| x.abs() <= 1.0));
        }
    }

    #[test]
    fn legendre_small_orders_match_tabulated() {
        let g = QuadratureGrid::gauss_legendre(2);
        let x = 1.0 / 3f64.sqrt();
        assert_abs_diff_eq!(g.nodes[0], -x, epsilon = 1e-14);
        assert_abs_diff_eq!(g.nodes[1], x, epsilon = 1e-14);
        assert_abs_diff_eq!(g.weights[0], 1.0, epsilon = 1e-14);

        let g3 = QuadratureGrid::gauss_legendre(3);
        assert_abs_diff_eq!(g3.nodes[1], 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(g3.nodes[2], (0.6f64).sqrt(), epsilon = 1e-14);
        assert_abs_diff_eq!(g3.weights[1], 8.0 / 9.0, epsilon = 1e-14);
        assert_abs_diff_eq!(g3.weights[0], 5.0 / 9.0, epsilon = 1e-14);
    }

    #[test]
    fn hermite_rule_integrates_gaussian_moments() {
        // int e^{-x^2} x^{2m} dx = sqrt(pi) (2m-1)!! / 2^m, checked through the
        // compensated weights by feeding the full integrand.
        let g = QuadratureGrid::gauss_hermite(40);
        let mut expected = std::f64::consts::PI.sqrt();
        for m in 0..10u32 {
            let quad: f64 = g
                .nodes
                .iter()
                .zip(&g.weights)
                .map(|(&x, &w)| w * (-x * x).exp() * x.powi(2 * m as i32))
                .sum();
            assert_abs_diff_eq!(quad, expected, epsilon = 1e-12 * expected.max(1.0));
            expected *= (2.0 * m as f64 + 1.0) / 2.0;
        }
    }

    #[test]
    fn fourier_modes_reproduce_kronecker_delta() {
        let n = 256;
        let g = QuadratureGrid::periodic_uniform(n);
        let norm = 1.0 / TWO_PI.sqrt();
        for k in -(n as i64) / 4..=(n as i64) / 4 {
            for kp in [-(n as i64) / 4, -3, 0, 2, (n as i64) / 4] {
                let f: Vec<Complex64> = g
                    .nodes
                    .iter()
                    .map(|&p| Complex64::from_polar(norm, k as f64 * p))
                    .collect();
                let h: Vec<Complex64> = g
                    .nodes
                    .iter()
                    .map(|&p| Complex64::from_polar(norm, kp as f64 * p))
                    .collect();
                let ip = grid_inner_product(&f, &h, &g).unwrap();
                let expected = if k == kp { 1.0 } else { 0.0 };
                assert!(
                    (ip - expected).norm() < 1e-12,
                    "modes {k},{kp}: {ip}"
                );
            }
        }
    }

    #[test]
    fn inner_product_length_mismatch() {
        let g = QuadratureGrid::periodic_uniform(8);
        let f = vec![Complex64::new(1.0, 0.0); 8];
        let h = vec![Complex64::new(1.0, 0.0); 7];
        assert!(matches!(
            grid_inner_product(&f, &h, &g),
            Err(Error::LengthMismatch { .. })
        ));
    }

    proptest! {
        // Gauss-Legendre with n nodes integrates polynomials of degree <= 2n-1
        // exactly; compare against the closed-form antiderivative.
        #[test]
        fn legendre_exact_for_polynomials(
            n in 1usize..14,
            coeffs in proptest::collection::vec(-1.0f64..1.0, 1..24),
        ) {
            let degree = (2 * n - 1).min(coeffs.len() - 1);
            let g = QuadratureGrid::gauss_legendre(n);
            let quad: f64 = g.nodes.iter().zip(&g.weights).map(|(&x, &w)| {
                let mut acc = 0.0;
                for d in (0..=degree).rev() {
                    acc = acc * x + coeffs[d];
                }
                w * acc
            }).sum();
            let exact: f64 = (0..=degree).map(|d| {
                if d % 2 == 0 { 2.0 * coeffs[d] / (d as f64 + 1.0) } else { 0.0 }
            }).sum();
            prop_assert!((quad - exact).abs() < 1e-12);
        }
    }
}
