//! Reproduction suites for the analytically known families, plus the
//! oracle-equivalence sweep between the coefficient and quadrature paths.
//! The command-line `verify` and `oracle-check` subcommands are thin
//! wrappers over these functions.

use crate::error::{Error, Result};
use crate::numerics::QuadratureGrid;
use crate::operators::{
    commutator_mean, cross_correlation, gridpath, moment, symmetry_residual, OperatorRep,
};
use crate::relations::{
    classical_fluctuation_relation, Evaluator, OracleCase, RelationId, Tolerances, VerdictStatus,
};
use crate::report::{CheckRow, OracleRow};
use crate::search::{optimize_coefficients, scan_random, Objective, SearchConfig};
use crate::states::{make_state, standard_normal, StateSpec};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// Seed and size of the degree-1 product scan whose statistics are kept as
/// regression baselines below.
pub const SCAN_L1_SEED: u64 = 424_242;
pub const SCAN_L1_COUNT: usize = 100_000;

/// Seeded regression baselines for the degree-1 scan (first computed with
/// the seed and count above; any drift beyond 1e-9 is a behavior change).
pub const SCAN_L1_FRACTION_BASELINE: f64 = 0.99129;
pub const SCAN_L1_MIN_BASELINE: f64 = 0.083_462_236_454_213_56;
pub const SCAN_L1_MAX_BASELINE: f64 = 1.942_470_421_951_944_2;

/// Verification suite identifiers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SuiteId {
    Circular,
    Qtp,
    FockPhase,
    Degenerate,
    Boundary,
    Classical,
    All,
}

impl SuiteId {
    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "circular" => Ok(SuiteId::Circular),
            "qtp" => Ok(SuiteId::Qtp),
            "fock-phase" => Ok(SuiteId::FockPhase),
            "degenerate" => Ok(SuiteId::Degenerate),
            "boundary" => Ok(SuiteId::Boundary),
            "classical" => Ok(SuiteId::Classical),
            "all" => Ok(SuiteId::All),
            other => Err(Error::UnknownCase(format!(
                "suite '{other}' (expected circular|qtp|fock-phase|degenerate|boundary|classical|all)"
            ))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            SuiteId::Circular => "circular",
            SuiteId::Qtp => "qtp",
            SuiteId::FockPhase => "fock-phase",
            SuiteId::Degenerate => "degenerate",
            SuiteId::Boundary => "boundary",
            SuiteId::Classical => "classical",
            SuiteId::All => "all",
        }
    }
}

/// Knobs shared by the suites.
#[derive(Debug, Clone)]
pub struct SuiteConfig {
    pub hbar: f64,
    pub tol: Tolerances,
    pub seed: u64,
    /// Random states in the Schwarz/boundary universality sweep.
    pub schwarz_trials: usize,
    /// Random states in the seam-density residual check.
    pub residual_states: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            hbar: 1.0,
            tol: Tolerances::default(),
            seed: 20_080,
            schwarz_trials: 10_000,
            residual_states: 1_000,
        }
    }
}

fn check(checks: &mut Vec<CheckRow>, name: impl Into<String>, passed: bool, detail: String) {
    checks.push(CheckRow {
        name: name.into(),
        passed,
        detail,
    });
}

/// Run one suite (or all of them) and return the check table.
pub fn run_suite(id: SuiteId, config: &SuiteConfig) -> Result<Vec<CheckRow>> {
    match id {
        SuiteId::Circular => circular_suite(config),
        SuiteId::Qtp => qtp_suite(config),
        SuiteId::FockPhase => fock_phase_suite(config),
        SuiteId::Degenerate => degenerate_suite(config),
        SuiteId::Boundary => boundary_suite(config),
        SuiteId::Classical => classical_suite(config),
        SuiteId::All => {
            let mut all = Vec::new();
            for sub in [
                SuiteId::Circular,
                SuiteId::Qtp,
                SuiteId::FockPhase,
                SuiteId::Degenerate,
                SuiteId::Boundary,
                SuiteId::Classical,
            ] {
                all.extend(run_suite(sub, config)?);
            }
            Ok(all)
        }
    }
}

/// Single circle modes: dispersion-free angular momentum, the uniform-density
/// angle spread, a violated product bound, a degenerate Schwarz bound, and
/// the unit-seam residual.
fn circular_suite(config: &SuiteConfig) -> Result<Vec<CheckRow>> {
    let eval = Evaluator::new(config.hbar).with_tolerances(config.tol);
    let mut checks = Vec::new();
    let d_phi_expected = std::f64::consts::PI / 3f64.sqrt();
    for m in -3..=3i64 {
        let state = make_state(&StateSpec::CircularEigenstate { m })?;
        let lz = OperatorRep::lz(&state.basis, config.hbar)?;
        let phi = OperatorRep::phi(&state.basis)?;
        let mlz = moment(&lz, &state)?;
        let mphi = moment(&phi, &state)?;
        check(
            &mut checks,
            format!("circular(m={m}): dLz = 0"),
            mlz.stddev.abs() <= 1e-12,
            format!("dLz = {:.3e}", mlz.stddev),
        );
        check(
            &mut checks,
            format!("circular(m={m}): dphi = pi/sqrt(3)"),
            (mphi.stddev - d_phi_expected).abs() <= 1e-10,
            format!("dphi = {:.12}", mphi.stddev),
        );
        check(
            &mut checks,
            format!("circular(m={m}): mean Lz = hbar m"),
            (mlz.mean.re - config.hbar * m as f64).abs() <= 1e-12 && mlz.mean.im.abs() <= 1e-12,
            format!("<Lz> = {}", mlz.mean.re),
        );
        let rsur = eval.eval_rsur(&lz, &phi, &state)?;
        check(
            &mut checks,
            format!("circular(m={m}): product bound violated"),
            rsur.verdict.status == VerdictStatus::Violated
                && rsur.verdict.relation == RelationId::Bound4,
            format!("lhs = {:.3e}, rhs = {:.6}", rsur.verdict.lhs, rsur.verdict.rhs),
        );
        let schwarz = eval.eval_schwarz(&lz, &phi, &state)?;
        check(
            &mut checks,
            format!("circular(m={m}): Schwarz degenerate 0 = 0"),
            schwarz.status == VerdictStatus::DegenerateEquality,
            format!("lhs = {:.3e}, rhs = {:.3e}", schwarz.lhs, schwarz.rhs),
        );
        let s = symmetry_residual(&lz, &phi, &state)?;
        check(
            &mut checks,
            format!("circular(m={m}): residual magnitude hbar, purely imaginary"),
            (s.norm() - config.hbar).abs() <= 1e-10 && s.re.abs() <= 1e-10,
            format!("S = {s}"),
        );
    }
    Ok(checks)
}

/// Torsion-pendulum eigenstates: exact product `hbar (n + 1/2)`, a holding
/// product bound, and vanishing symmetry residuals.
fn qtp_suite(config: &SuiteConfig) -> Result<Vec<CheckRow>> {
    let eval = Evaluator::new(config.hbar).with_tolerances(config.tol);
    let mut checks = Vec::new();
    for &(inertia, omega) in &[(1.0, 1.0), (2.0, 0.5), (0.5, 3.0)] {
        for n in 0..=10u32 {
            let state = make_state(&StateSpec::Oscillator {
                n,
                inertia,
                omega,
                hbar: config.hbar,
            })?;
            let lz = OperatorRep::lz(&state.basis, config.hbar)?;
            let phi = OperatorRep::phi(&state.basis)?;
            let product = moment(&lz, &state)?.stddev * moment(&phi, &state)?.stddev;
            let expected = config.hbar * (n as f64 + 0.5);
            check(
                &mut checks,
                format!("qtp(n={n}, I={inertia}, omega={omega}): product = hbar(n+1/2)"),
                (product - expected).abs() <= 1e-9,
                format!("product = {product:.12}, expected {expected:.12}"),
            );
            let rsur = eval.eval_rsur(&lz, &phi, &state)?;
            let max_residual = rsur.residuals.iter().map(|s| s.norm()).fold(0.0, f64::max);
            check(
                &mut checks,
                format!("qtp(n={n}, I={inertia}, omega={omega}): bound holds, condition satisfied"),
                rsur.verdict.status == VerdictStatus::Holds
                    && rsur.condition24
                    && max_residual <= 1e-10,
                format!(
                    "gap = {:.3e}, max residual = {:.3e}",
                    rsur.verdict.gap, max_residual
                ),
            );
        }
    }
    Ok(checks)
}

/// Phase eigenstates of the number operator: unit commutator, dispersion-free
/// number, uniform-density angle spread, violated product bound, unit
/// residual.
fn fock_phase_suite(config: &SuiteConfig) -> Result<Vec<CheckRow>> {
    let eval = Evaluator::new(config.hbar).with_tolerances(config.tol);
    let mut checks = Vec::new();
    let d_phi_expected = std::f64::consts::PI / 3f64.sqrt();
    for n in 0..=5u32 {
        let state = make_state(&StateSpec::FockPhase { n })?;
        let num = OperatorRep::number_op(&state.basis)?;
        let phi = OperatorRep::phi(&state.basis)?;
        let comm = commutator_mean(&num, &phi, &state)?;
        check(
            &mut checks,
            format!("fock-phase(n={n}): <[N, phi]> = i"),
            (comm - Complex64::new(0.0, 1.0)).norm() <= 1e-10,
            format!("<[N, phi]> = {comm}"),
        );
        let mn = moment(&num, &state)?;
        check(
            &mut checks,
            format!("fock-phase(n={n}): N eigenvalue n, dN = 0"),
            (mn.mean.re - n as f64).abs() <= 1e-12 && mn.stddev.abs() <= 1e-12,
            format!("<N> = {}, dN = {:.3e}", mn.mean.re, mn.stddev),
        );
        let mphi = moment(&phi, &state)?;
        check(
            &mut checks,
            format!("fock-phase(n={n}): dphi = pi/sqrt(3) (within the 2 pi cap)"),
            (mphi.stddev - d_phi_expected).abs() <= 1e-10 && mphi.stddev <= TWO_PI,
            format!("dphi = {:.12}", mphi.stddev),
        );
        let rsur = eval.eval_rsur(&num, &phi, &state)?;
        check(
            &mut checks,
            format!("fock-phase(n={n}): number-phase bound violated"),
            rsur.verdict.status == VerdictStatus::Violated
                && rsur.verdict.relation == RelationId::Bound17,
            format!("lhs = {:.3e}, rhs = {}", rsur.verdict.lhs, rsur.verdict.rhs),
        );
        let s = symmetry_residual(&num, &phi, &state)?;
        check(
            &mut checks,
            format!("fock-phase(n={n}): residual magnitude 1, purely imaginary"),
            (s.norm() - 1.0).abs() <= 1e-10 && s.re.abs() <= 1e-10,
            format!("S = {s}"),
        );
    }
    Ok(checks)
}

/// Degenerate spherical superpositions: the direct-summation oracle against
/// the operator path, a product-zero witness from the optimizer, and the
/// seeded scan baselines.
fn degenerate_suite(config: &SuiteConfig) -> Result<Vec<CheckRow>> {
    let eval = Evaluator::new(config.hbar).with_tolerances(config.tol);
    let mut checks = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ 0xD15C_0B97);
    for l in 1..=4u32 {
        let dim = 2 * l as usize + 1;
        let mut worst = 0.0f64;
        for _ in 0..100 {
            let coeffs: Vec<Complex64> = (0..dim)
                .map(|_| Complex64::new(standard_normal(&mut rng), standard_normal(&mut rng)))
                .collect();
            let state = make_state(&StateSpec::DegenerateRotation {
                l,
                coeffs: coeffs.clone(),
            })?;
            let oracle = eval.analytic_oracle(&OracleCase::Degenerate1314 {
                l,
                coeffs: state.coeffs.clone(),
            })?;
            let lz = OperatorRep::lz(&state.basis, config.hbar)?;
            let phi = OperatorRep::phi(&state.basis)?;
            let d_lz = moment(&lz, &state)?.stddev;
            let d_phi = moment(&phi, &state)?.stddev;
            let s = symmetry_residual(&lz, &phi, &state)?;
            worst = worst
                .max((d_lz - oracle.delta_lz.unwrap()).abs())
                .max((d_phi - oracle.delta_phi.unwrap()).abs())
                .max((s - oracle.residual.unwrap()).norm());
        }
        check(
            &mut checks,
            format!("degenerate(l={l}): oracle agrees with operator path over 100 states"),
            worst <= 1e-9,
            format!("worst delta = {worst:.3e}"),
        );
    }

    let result = optimize_coefficients(&SearchConfig {
        restarts: 16,
        max_iterations: 600,
        ..SearchConfig::new(1, Objective::MinimizeProduct, config.seed)
    })?;
    check(
        &mut checks,
        "degenerate: search exhibits a product-zero state",
        result.product <= 1e-6,
        format!("min product = {:.3e}", result.product),
    );

    let scan = scan_random(1, SCAN_L1_COUNT, SCAN_L1_SEED, config.hbar)?;
    check(
        &mut checks,
        "degenerate: scan statistics match the seeded baselines",
        (scan.fraction_satisfying - SCAN_L1_FRACTION_BASELINE).abs() <= 1e-9
            && (scan.min_product - SCAN_L1_MIN_BASELINE).abs() <= 1e-9
            && (scan.max_product - SCAN_L1_MAX_BASELINE).abs() <= 1e-9,
        format!(
            "fraction = {:.9}, min = {:.9}, max = {:.9}",
            scan.fraction_satisfying, scan.min_product, scan.max_product
        ),
    );
    check(
        &mut checks,
        "degenerate: both bound classes are reachable",
        scan.min_product < 0.5 * config.hbar && scan.max_product >= 0.5 * config.hbar,
        format!(
            "products span [{:.6}, {:.6}] against hbar/2 = {}",
            scan.min_product,
            scan.max_product,
            0.5 * config.hbar
        ),
    );
    Ok(checks)
}

/// Random-state universality: the Schwarz and boundary bounds never fail,
/// and the residual equals `2 pi i hbar` times the seam density.
fn boundary_suite(config: &SuiteConfig) -> Result<Vec<CheckRow>> {
    let eval = Evaluator::new(config.hbar).with_tolerances(config.tol);
    let mut checks = Vec::new();

    let mut worst_residual = 0.0f64;
    for i in 0..config.residual_states {
        let state = make_state(&StateSpec::RandomPeriodic {
            max_mode: 8,
            seed: config.seed.wrapping_add(i as u64),
        })?;
        let lz = OperatorRep::lz(&state.basis, config.hbar)?;
        let phi = OperatorRep::phi(&state.basis)?;
        let s = symmetry_residual(&lz, &phi, &state)?;
        let expected = Complex64::new(0.0, TWO_PI * config.hbar * state.boundary_density()?);
        worst_residual = worst_residual.max((s - expected).norm());
    }
    check(
        &mut checks,
        format!(
            "boundary: residual = 2 pi i hbar |psi(2pi)|^2 over {} states",
            config.residual_states
        ),
        worst_residual <= 1e-8,
        format!("worst delta = {worst_residual:.3e}"),
    );

    let mut schwarz_violations = 0usize;
    let mut boundary_violations = 0usize;
    let mut min_gap = f64::INFINITY;
    for i in 0..config.schwarz_trials {
        let state = make_state(&StateSpec::RandomPeriodic {
            max_mode: 8,
            seed: config.seed.wrapping_add(0x5EED_0000).wrapping_add(i as u64),
        })?;
        let lz = OperatorRep::lz(&state.basis, config.hbar)?;
        let phi = OperatorRep::phi(&state.basis)?;
        let schwarz = eval.eval_schwarz(&lz, &phi, &state)?;
        if schwarz.status == VerdictStatus::Violated {
            schwarz_violations += 1;
        }
        let boundary = eval.eval_boundary_relation(&state)?;
        if boundary.status == VerdictStatus::Violated {
            boundary_violations += 1;
        }
        min_gap = min_gap.min(schwarz.gap).min(boundary.gap);
    }
    check(
        &mut checks,
        format!(
            "boundary: zero Schwarz violations over {} states",
            config.schwarz_trials
        ),
        schwarz_violations == 0,
        format!("violations = {schwarz_violations}, smallest gap = {min_gap:.3e}"),
    );
    check(
        &mut checks,
        format!(
            "boundary: zero boundary-bound violations over {} states",
            config.schwarz_trials
        ),
        boundary_violations == 0,
        format!("violations = {boundary_violations}"),
    );
    Ok(checks)
}

/// Classical sampled-fluctuation analogue: exact equality under perfect
/// correlation, degeneracy for constant data, no violations for independent
/// draws.
fn classical_suite(config: &SuiteConfig) -> Result<Vec<CheckRow>> {
    let mut checks = Vec::new();

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ 0xC1A5_51CA);
    let a: Vec<f64> = (0..4096).map(|_| standard_normal(&mut rng)).collect();
    let b: Vec<f64> = a.iter().map(|&x| 2.0 * x).collect();
    let v = classical_fluctuation_relation(&a, &b)?;
    check(
        &mut checks,
        "classical: perfect correlation saturates the bound",
        v.gap.abs() <= 1e-12 && v.status == VerdictStatus::Holds,
        format!("gap = {:.3e}", v.gap),
    );

    let constant = vec![3.25; 512];
    let other: Vec<f64> = (0..512).map(|_| standard_normal(&mut rng)).collect();
    let v = classical_fluctuation_relation(&constant, &other)?;
    check(
        &mut checks,
        "classical: constant observable degenerates to 0 = 0",
        v.status == VerdictStatus::DegenerateEquality,
        format!("lhs = {:.3e}, rhs = {:.3e}", v.lhs, v.rhs),
    );

    let mut violations = 0usize;
    for _ in 0..100 {
        let a: Vec<f64> = (0..1024).map(|_| standard_normal(&mut rng)).collect();
        let b: Vec<f64> = (0..1024).map(|_| standard_normal(&mut rng)).collect();
        if classical_fluctuation_relation(&a, &b)?.status == VerdictStatus::Violated {
            violations += 1;
        }
    }
    check(
        &mut checks,
        "classical: zero violations over 100 independent trials",
        violations == 0,
        format!("violations = {violations}"),
    );
    Ok(checks)
}

/// Moment-path agreement across the five state families; every row compares
/// the coefficient path against the quadrature path.
pub fn oracle_equivalence(config: &SuiteConfig) -> Result<Vec<OracleRow>> {
    let mut rows = Vec::new();
    let families: Vec<(&str, StateSpec)> = vec![
        ("circular", StateSpec::CircularEigenstate { m: 2 }),
        ("fock-phase", StateSpec::FockPhase { n: 3 }),
        (
            "oscillator",
            StateSpec::Oscillator {
                n: 2,
                inertia: 2.0,
                omega: 0.5,
                hbar: config.hbar,
            },
        ),
        (
            "degenerate",
            StateSpec::DegenerateRotation {
                l: 3,
                coeffs: {
                    let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ 0x0AC1E);
                    (0..7)
                        .map(|_| {
                            Complex64::new(standard_normal(&mut rng), standard_normal(&mut rng))
                        })
                        .collect()
                },
            },
        ),
        (
            "random",
            StateSpec::RandomPeriodic {
                max_mode: 8,
                seed: config.seed,
            },
        ),
    ];

    for (family, spec) in families {
        let state = make_state(&spec)?;
        let lz = OperatorRep::lz(&state.basis, config.hbar)?;
        let phi = OperatorRep::phi(&state.basis)?;
        let mut ops = vec![("Lz", lz.clone()), ("phi", phi.clone())];
        if matches!(state.basis, crate::states::BasisId::FourierCircle { .. }) {
            ops.push(("N", OperatorRep::number_op(&state.basis)?));
            ops.push(("phi^2", OperatorRep::phi_squared(&state.basis)?));
        }
        for (op_name, op) in &ops {
            let direct = moment(op, &state)?;
            let via_grid = gridpath::moment_via_grid(op, &state)?;
            rows.push(OracleRow {
                family: family.into(),
                quantity: format!("mean({op_name})"),
                computed: direct.mean.re,
                reference: via_grid.mean.re,
                delta: (direct.mean - via_grid.mean).norm(),
            });
            rows.push(OracleRow {
                family: family.into(),
                quantity: format!("stddev({op_name})"),
                computed: direct.stddev,
                reference: via_grid.stddev,
                delta: (direct.stddev - via_grid.stddev).abs(),
            });
        }
        let direct = cross_correlation(&lz, &phi, &state)?;
        let via_grid = gridpath::cross_correlation_via_grid(&lz, &phi, &state)?;
        rows.push(OracleRow {
            family: family.into(),
            quantity: "cross(Lz, phi)".into(),
            computed: direct.norm(),
            reference: via_grid.norm(),
            delta: (direct - via_grid).norm(),
        });
        let direct = symmetry_residual(&lz, &phi, &state)?;
        let via_grid = gridpath::symmetry_residual_via_grid(&lz, &phi, &state)?;
        rows.push(OracleRow {
            family: family.into(),
            quantity: "residual(Lz, phi)".into(),
            computed: direct.norm(),
            reference: via_grid.norm(),
            delta: (direct - via_grid).norm(),
        });
    }
    Ok(rows)
}

/// Largest path disagreement in an equivalence table.
pub fn max_oracle_delta(rows: &[OracleRow]) -> f64 {
    rows.iter().map(|r| r.delta).fold(0.0, f64::max)
}

/// Sample a closure on a circle grid; convenience for the adjusted-relation
/// evaluators and their callers.
pub fn sample_periodic(grid: &QuadratureGrid, f: impl Fn(f64) -> f64) -> Vec<f64> {
    grid.nodes.iter().map(|&phi| f(phi)).collect()
}
