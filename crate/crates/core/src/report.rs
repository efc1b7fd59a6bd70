//! JSON state-spec ingestion and machine-readable report documents, plus the
//! CSV projection of the relation table.
//!
//! Complex numbers serialize as `[re, im]` pairs. Reports carry the tool
//! version and every default in effect, so a stored report is
//! self-describing; JSON output contains no timestamp and is byte-stable for
//! fixed inputs.

use crate::error::{Error, Result};
use crate::operators::MomentReport;
use crate::relations::{RelationVerdict, VerdictStatus};
use crate::search::{Classification, ScanSummary, SearchConfig, SearchResult};
use crate::states::StateSpec;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// `[re, im]` wire form of a complex number.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexPair(pub f64, pub f64);

impl From<Complex64> for ComplexPair {
    fn from(c: Complex64) -> Self {
        ComplexPair(c.re, c.im)
    }
}

impl From<ComplexPair> for Complex64 {
    fn from(p: ComplexPair) -> Self {
        Complex64::new(p.0, p.1)
    }
}

/// JSON document describing a state to construct.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum StateSpecDocument {
    Circular {
        m: i64,
    },
    FockPhase {
        n: u32,
    },
    Oscillator {
        n: u32,
        #[serde(rename = "I")]
        inertia: f64,
        omega: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        hbar: Option<f64>,
    },
    Degenerate {
        l: u32,
        c: Vec<ComplexPair>,
    },
    Random {
        #[serde(rename = "K")]
        max_mode: u32,
        seed: u64,
    },
    Fourier {
        a: Vec<ComplexPair>,
    },
}

impl StateSpecDocument {
    /// Resolve to a constructor spec; `default_hbar` fills the oscillator
    /// scale when the document does not pin one.
    pub fn to_spec(&self, default_hbar: f64) -> StateSpec {
        match self {
            StateSpecDocument::Circular { m } => StateSpec::CircularEigenstate { m: *m },
            StateSpecDocument::FockPhase { n } => StateSpec::FockPhase { n: *n },
            StateSpecDocument::Oscillator {
                n,
                inertia,
                omega,
                hbar,
            } => StateSpec::Oscillator {
                n: *n,
                inertia: *inertia,
                omega: *omega,
                hbar: hbar.unwrap_or(default_hbar),
            },
            StateSpecDocument::Degenerate { l, c } => StateSpec::DegenerateRotation {
                l: *l,
                coeffs: c.iter().map(|&p| p.into()).collect(),
            },
            StateSpecDocument::Random { max_mode, seed } => StateSpec::RandomPeriodic {
                max_mode: *max_mode,
                seed: *seed,
            },
            StateSpecDocument::Fourier { a } => StateSpec::ExplicitFourier {
                coeffs: a.iter().map(|&p| p.into()).collect(),
            },
        }
    }

    /// Document form of a constructor spec (for report echoes).
    pub fn from_spec(spec: &StateSpec) -> Self {
        match spec {
            StateSpec::CircularEigenstate { m } => StateSpecDocument::Circular { m: *m },
            StateSpec::FockPhase { n } => StateSpecDocument::FockPhase { n: *n },
            StateSpec::Oscillator {
                n,
                inertia,
                omega,
                hbar,
            } => StateSpecDocument::Oscillator {
                n: *n,
                inertia: *inertia,
                omega: *omega,
                hbar: Some(*hbar),
            },
            StateSpec::DegenerateRotation { l, coeffs } => StateSpecDocument::Degenerate {
                l: *l,
                c: coeffs.iter().map(|&c| c.into()).collect(),
            },
            StateSpec::RandomPeriodic { max_mode, seed } => StateSpecDocument::Random {
                max_mode: *max_mode,
                seed: *seed,
            },
            StateSpec::ExplicitFourier { coeffs } => StateSpecDocument::Fourier {
                a: coeffs.iter().map(|&c| c.into()).collect(),
            },
        }
    }

    /// Structural validation beyond what deserialization enforces.
    pub fn validate(&self) -> Result<()> {
        let finite = |pairs: &[ComplexPair]| -> Result<()> {
            if pairs.is_empty() {
                return Err(Error::InvalidSpec("empty coefficient array".into()));
            }
            if pairs.iter().any(|p| !p.0.is_finite() || !p.1.is_finite()) {
                return Err(Error::InvalidSpec("non-finite coefficient".into()));
            }
            Ok(())
        };
        match self {
            StateSpecDocument::Degenerate { c, .. } => finite(c),
            StateSpecDocument::Fourier { a } => finite(a),
            _ => Ok(()),
        }
    }
}

/// Parse a state-spec document from JSON with a line/field diagnostic on
/// failure.
pub fn parse_state_spec(json: &str) -> Result<StateSpecDocument> {
    let doc: StateSpecDocument = serde_json::from_str(json).map_err(|e| {
        Error::Serialization(format!(
            "state spec (line {}, column {}): {e}",
            e.line(),
            e.column()
        ))
    })?;
    doc.validate()?;
    Ok(doc)
}

/// One observable's moments in the report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MomentRow {
    pub observable: String,
    pub mean: ComplexPair,
    pub variance: f64,
    pub stddev: f64,
}

impl MomentRow {
    pub fn new(observable: &str, m: &MomentReport) -> Self {
        MomentRow {
            observable: observable.to_string(),
            mean: m.mean.into(),
            variance: m.variance,
            stddev: m.stddev,
        }
    }
}

/// One relation verdict in the report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerdictRow {
    pub relation: String,
    pub lhs: f64,
    pub rhs: f64,
    pub gap: f64,
    pub status: String,
}

impl VerdictRow {
    pub fn new(v: &RelationVerdict) -> Self {
        VerdictRow {
            relation: v.relation.name().to_string(),
            lhs: v.lhs,
            rhs: v.rhs,
            gap: v.gap,
            status: status_name(v.status).to_string(),
        }
    }
}

pub fn status_name(s: VerdictStatus) -> &'static str {
    match s {
        VerdictStatus::Holds => "holds",
        VerdictStatus::Violated => "violated",
        VerdictStatus::DegenerateEquality => "degenerate-equality",
    }
}

/// One symmetry residual in the report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResidualRow {
    pub pair: String,
    pub value: ComplexPair,
    pub magnitude: f64,
}

/// One oracle-versus-computed comparison in the report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OracleRow {
    pub family: String,
    pub quantity: String,
    pub computed: f64,
    pub reference: f64,
    pub delta: f64,
}

/// Search section of the report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SearchRow {
    pub objective: String,
    pub l: u32,
    pub best_coefficients: Vec<ComplexPair>,
    pub objective_value: f64,
    pub product: f64,
    pub classification: String,
    pub oracle_recheck: f64,
    pub iterations: usize,
    pub converged: bool,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scan: Option<ScanRow>,
}

impl SearchRow {
    pub fn new(config: &SearchConfig, result: &SearchResult, scan: Option<&ScanSummary>) -> Self {
        SearchRow {
            objective: config.objective.name(),
            l: config.l,
            best_coefficients: result.coefficients.iter().map(|&c| c.into()).collect(),
            objective_value: result.objective_value,
            product: result.product,
            classification: match result.classification {
                Classification::SatisfiesBound4 => "satisfies-bound4".into(),
                Classification::ViolatesBound4 => "violates-bound4".into(),
            },
            oracle_recheck: result.oracle_recheck,
            iterations: result.iterations,
            converged: result.converged,
            seed: result.seed,
            scan: scan.map(ScanRow::new),
        }
    }
}

/// Scan statistics section.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScanRow {
    pub count: usize,
    pub fraction_satisfying: f64,
    pub min_product: f64,
    pub max_product: f64,
    pub bin_width: f64,
    pub histogram: Vec<usize>,
}

impl ScanRow {
    pub fn new(s: &ScanSummary) -> Self {
        ScanRow {
            count: s.count,
            fraction_satisfying: s.fraction_satisfying,
            min_product: s.min_product,
            max_product: s.max_product,
            bin_width: s.bin_width,
            histogram: s.histogram.clone(),
        }
    }
}

/// One suite check line.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckRow {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// Top-level machine-readable report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReportDocument {
    pub version: String,
    pub hbar: f64,
    pub grid: usize,
    pub tolerance: f64,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input: Option<StateSpecDocument>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub moments: Vec<MomentRow>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub relations: Vec<VerdictRow>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub residuals: Vec<ResidualRow>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub oracle_deltas: Vec<OracleRow>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub search: Option<SearchRow>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub checks: Vec<CheckRow>,
}

impl ReportDocument {
    pub fn new(hbar: f64, grid: usize, tolerance: f64, seed: u64) -> Self {
        ReportDocument {
            version: env!("CARGO_PKG_VERSION").to_string(),
            hbar,
            grid,
            tolerance,
            seed,
            input: None,
            moments: Vec::new(),
            relations: Vec::new(),
            residuals: Vec::new(),
            oracle_deltas: Vec::new(),
            search: None,
            checks: Vec::new(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Serialization(e.to_string()))
    }

    /// CSV projection of the tabular sections. Unlike the JSON form it
    /// carries a generation timestamp (as a comment row).
    pub fn to_csv(&self, timestamp: Option<u64>) -> String {
        let mut out = String::new();
        if let Some(ts) = timestamp {
            out.push_str(&format!("# generated_at,{ts}\n"));
        }
        out.push_str(&format!(
            "# version,{},hbar,{},grid,{},tolerance,{},seed,{}\n",
            self.version, self.hbar, self.grid, self.tolerance, self.seed
        ));
        if !self.moments.is_empty() {
            out.push_str("section,observable,mean_re,mean_im,variance,stddev\n");
            for m in &self.moments {
                out.push_str(&format!(
                    "moment,{},{},{},{},{}\n",
                    m.observable, m.mean.0, m.mean.1, m.variance, m.stddev
                ));
            }
        }
        if !self.relations.is_empty() {
            out.push_str("section,relation,lhs,rhs,gap,status\n");
            for r in &self.relations {
                out.push_str(&format!(
                    "relation,{},{},{},{},{}\n",
                    r.relation, r.lhs, r.rhs, r.gap, r.status
                ));
            }
        }
        if !self.residuals.is_empty() {
            out.push_str("section,pair,value_re,value_im,magnitude\n");
            for r in &self.residuals {
                out.push_str(&format!(
                    "residual,{},{},{},{}\n",
                    r.pair, r.value.0, r.value.1, r.magnitude
                ));
            }
        }
        if !self.oracle_deltas.is_empty() {
            out.push_str("section,family,quantity,computed,reference,delta\n");
            for r in &self.oracle_deltas {
                out.push_str(&format!(
                    "oracle,{},{},{},{},{}\n",
                    r.family, r.quantity, r.computed, r.reference, r.delta
                ));
            }
        }
        if !self.checks.is_empty() {
            out.push_str("section,check,passed,detail\n");
            for c in &self.checks {
                out.push_str(&format!(
                    "check,{},{},\"{}\"\n",
                    c.name, c.passed, c.detail
                ));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn missing_field_names_the_field() {
        let err = parse_state_spec(r#"{"kind":"circular"}"#).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains('m'), "diagnostic should name the field: {msg}");
    }

    #[test]
    fn unknown_kind_rejected() {
        assert!(parse_state_spec(r#"{"kind":"squeezed","n":1}"#).is_err());
    }

    #[test]
    fn unknown_extra_field_rejected() {
        assert!(parse_state_spec(r#"{"kind":"circular","m":1,"x":2}"#).is_err());
    }

    #[test]
    fn oscillator_document_round_trip() {
        let doc = parse_state_spec(r#"{"kind":"oscillator","n":2,"I":1.5,"omega":0.5}"#).unwrap();
        let spec = doc.to_spec(1.0);
        assert_eq!(
            spec,
            StateSpec::Oscillator {
                n: 2,
                inertia: 1.5,
                omega: 0.5,
                hbar: 1.0
            }
        );
    }

    proptest! {
        // Parse -> spec -> document -> JSON -> parse is semantically the
        // identity; coefficients survive exactly.
        #[test]
        fn degenerate_round_trip(
            l in 1u32..4,
            res in proptest::collection::vec(-1.0f64..1.0, 9),
            ims in proptest::collection::vec(-1.0f64..1.0, 9),
        ) {
            let dim = 2 * l as usize + 1;
            let c: Vec<ComplexPair> = (0..dim).map(|i| ComplexPair(res[i], ims[i])).collect();
            let doc = StateSpecDocument::Degenerate { l, c };
            let json = serde_json::to_string(&doc).unwrap();
            let parsed = parse_state_spec(&json).unwrap();
            prop_assert_eq!(&parsed, &doc);
            let spec = parsed.to_spec(1.0);
            let doc2 = StateSpecDocument::from_spec(&spec);
            let spec2 = doc2.to_spec(1.0);
            prop_assert_eq!(spec, spec2);
        }
    }
}
