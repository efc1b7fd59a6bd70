//! High-precision diagnostics for the uncertainty relations of angular
//! observables.
//!
//! The crate builds quantum states on the circle, the line and the sphere,
//! applies the angular-momentum, angle and number operators exactly in
//! coefficient space, and evaluates the Schwarz fluctuation bound, the
//! Robertson-Schrodinger product bound and the symmetry condition that
//! decides where the latter applies. A quadrature-based oracle path and
//! closed-form reference families cross-check every moment, and a
//! coefficient-space search explores where the angular product bound holds
//! or fails.
//!
//! Start from the `examples/` directory — each major capability has one
//! runnable example — or from the `angular-uncertainty` binary, which
//! exposes `analyze`, `verify`, `search` and `oracle-check` subcommands with
//! JSON reports.

pub mod error;
pub mod numerics;
pub mod operators;
pub mod relations;
pub mod report;
pub mod search;
pub mod states;
pub mod suites;

#[doc(hidden)]
pub mod testutil;

pub use error::{Error, Result};
pub use operators::{
    commutator_mean, cross_correlation, higher_correlation, moment, symmetry_residual,
    MomentReport, OperatorId, OperatorRep,
};
pub use relations::{
    classical_fluctuation_relation, Evaluator, OracleCase, RelationId, RelationVerdict,
    RsurVerdict, Tolerances, VerdictStatus,
};
pub use search::{optimize_coefficients, scan_random, Objective, SearchConfig, SearchResult};
pub use states::{make_state, BasisId, QuantumState, StateSpec};
