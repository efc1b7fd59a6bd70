//! Command-line front end: state analysis, reproduction suites, coefficient
//! search and the oracle-equivalence check, all reporting as JSON (or a CSV
//! projection). Exit codes: 0 = everything consistent, 1 = an assertion
//! failed (the report says which), 2 = input or usage error.

use angular_uncertainty::error::Error;
use angular_uncertainty::operators::{moment, symmetry_residual, OperatorRep};
use angular_uncertainty::relations::{Evaluator, Tolerances, VerdictStatus};
use angular_uncertainty::report::{
    parse_state_spec, MomentRow, ReportDocument, ResidualRow, SearchRow, StateSpecDocument,
    VerdictRow,
};
use angular_uncertainty::search::{optimize_coefficients, scan_random, Objective, SearchConfig};
use angular_uncertainty::states::{make_state, BasisId};
use angular_uncertainty::suites::{
    max_oracle_delta, oracle_equivalence, run_suite, SuiteConfig, SuiteId,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use std::io::Read;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "angular-uncertainty",
    version,
    about = "Uncertainty-relation diagnostics for angular observables"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonOpts {
    /// Value of hbar used by every operator.
    #[arg(long, default_value_t = 1.0)]
    hbar: f64,
    /// Periodic grid size recorded in reports and used for sampled functions.
    #[arg(long, default_value_t = 2048)]
    grid: usize,
    /// Verdict tolerance on relation gaps.
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Seed for randomized sweeps.
    #[arg(long, default_value_t = 20_080)]
    seed: u64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Moments and all applicable relations for one state.
    Analyze {
        /// State spec: a file path, an inline JSON object, or '-' for stdin.
        #[arg(long)]
        state: String,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Reproduction suites for the analytically known families.
    Verify {
        /// circular | qtp | fock-phase | degenerate | boundary | classical | all
        #[arg(long)]
        suite: String,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Coefficient-space search from a JSON config.
    Search {
        /// Search config: a file path, an inline JSON object, or '-' for stdin.
        #[arg(long)]
        config: String,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Agreement between the coefficient and quadrature moment paths.
    OracleCheck {
        #[command(flatten)]
        common: CommonOpts,
    },
}

/// JSON form of a search request.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SearchConfigDocument {
    l: u32,
    objective: ObjectiveDocument,
    #[serde(default)]
    restarts: Option<usize>,
    #[serde(default)]
    max_iterations: Option<usize>,
    #[serde(default)]
    tolerance: Option<f64>,
    #[serde(default)]
    seed: Option<u64>,
    /// Optional uniform scan to report alongside the optimum.
    #[serde(default)]
    scan_count: Option<usize>,
}

#[derive(Deserialize)]
#[serde(rename_all = "snake_case")]
enum ObjectiveDocument {
    MinimizeProduct,
    MaximizeProduct,
    TargetGap(f64),
    ZeroResidual,
}

fn read_payload(arg: &str) -> Result<String, Error> {
    if arg == "-" {
        let mut buf = String::new();
        std::io::stdin()
            .read_to_string(&mut buf)
            .map_err(|e| Error::Serialization(format!("stdin: {e}")))?;
        Ok(buf)
    } else if arg.trim_start().starts_with('{') {
        Ok(arg.to_string())
    } else {
        std::fs::read_to_string(arg)
            .map_err(|e| Error::Serialization(format!("reading {arg}: {e}")))
    }
}

fn tolerances(common: &CommonOpts) -> Tolerances {
    Tolerances {
        gap: common.tol,
        ..Tolerances::default()
    }
}

fn emit(report: &ReportDocument, format: Format) -> Result<(), Error> {
    match format {
        Format::Json => println!("{}", report.to_json()?),
        Format::Csv => {
            let ts = std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0);
            print!("{}", report.to_csv(Some(ts)));
        }
    }
    Ok(())
}

fn run_analyze(state_arg: &str, common: &CommonOpts) -> Result<ExitCode, Error> {
    let payload = read_payload(state_arg)?;
    let doc = parse_state_spec(&payload)?;
    let spec = doc.to_spec(common.hbar);
    let state = make_state(&spec)?;
    let eval = Evaluator::new(common.hbar).with_tolerances(tolerances(common));

    let mut report = ReportDocument::new(common.hbar, common.grid, common.tol, common.seed);
    report.input = Some(StateSpecDocument::from_spec(&spec));

    let lz = OperatorRep::lz(&state.basis, common.hbar)?;
    let phi = OperatorRep::phi(&state.basis)?;
    report
        .moments
        .push(MomentRow::new("Lz", &moment(&lz, &state)?));
    report
        .moments
        .push(MomentRow::new("phi", &moment(&phi, &state)?));

    let mut consistent = true;
    let schwarz = eval.eval_schwarz(&lz, &phi, &state)?;
    consistent &= schwarz.status != VerdictStatus::Violated;
    report.relations.push(VerdictRow::new(&schwarz));

    let rsur = eval.eval_rsur(&lz, &phi, &state)?;
    report.relations.push(VerdictRow::new(&rsur.verdict));
    for (pair, s) in [("(Lz,Lz)", 0), ("(Lz,phi)", 1), ("(phi,Lz)", 2), ("(phi,phi)", 3)]
        .iter()
        .map(|&(name, i)| (name, rsur.residuals[i]))
    {
        report.residuals.push(ResidualRow {
            pair: pair.to_string(),
            value: s.into(),
            magnitude: s.norm(),
        });
    }

    if matches!(state.basis, BasisId::FourierCircle { .. }) {
        let num = OperatorRep::number_op(&state.basis)?;
        report
            .moments
            .push(MomentRow::new("N", &moment(&num, &state)?));
        let nphi = eval.eval_rsur(&num, &phi, &state)?;
        report.relations.push(VerdictRow::new(&nphi.verdict));
        let boundary = eval.eval_boundary_relation(&state)?;
        consistent &= boundary.status != VerdictStatus::Violated;
        report.relations.push(VerdictRow::new(&boundary));
        let s = symmetry_residual(&num, &phi, &state)?;
        report.residuals.push(ResidualRow {
            pair: "(N,phi)".to_string(),
            value: s.into(),
            magnitude: s.norm(),
        });
    }

    emit(&report, common.format)?;
    Ok(if consistent {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}

fn run_verify(suite: &str, common: &CommonOpts) -> Result<ExitCode, Error> {
    let id = SuiteId::parse(suite)?;
    let config = SuiteConfig {
        hbar: common.hbar,
        tol: tolerances(common),
        seed: common.seed,
        ..SuiteConfig::default()
    };
    let checks = run_suite(id, &config)?;
    let passed = checks.iter().all(|c| c.passed);
    let mut report = ReportDocument::new(common.hbar, common.grid, common.tol, common.seed);
    report.checks = checks;
    emit(&report, common.format)?;
    Ok(if passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}

fn run_search(config_arg: &str, common: &CommonOpts) -> Result<ExitCode, Error> {
    let payload = read_payload(config_arg)?;
    let doc: SearchConfigDocument = serde_json::from_str(&payload).map_err(|e| {
        Error::Serialization(format!(
            "search config (line {}, column {}): {e}",
            e.line(),
            e.column()
        ))
    })?;
    let objective = match doc.objective {
        ObjectiveDocument::MinimizeProduct => Objective::MinimizeProduct,
        ObjectiveDocument::MaximizeProduct => Objective::MaximizeProduct,
        ObjectiveDocument::TargetGap(g) => Objective::TargetGap(g),
        ObjectiveDocument::ZeroResidual => Objective::ZeroResidual,
    };
    let mut config = SearchConfig::new(doc.l, objective, doc.seed.unwrap_or(common.seed));
    config.hbar = common.hbar;
    if let Some(r) = doc.restarts {
        config.restarts = r;
    }
    if let Some(m) = doc.max_iterations {
        config.max_iterations = m;
    }
    if let Some(t) = doc.tolerance {
        config.tolerance = t;
    }
    let result = optimize_coefficients(&config)?;
    let scan = match doc.scan_count {
        Some(count) => Some(scan_random(doc.l, count, config.seed, common.hbar)?),
        None => None,
    };
    let mut report = ReportDocument::new(common.hbar, common.grid, common.tol, config.seed);
    report.search = Some(SearchRow::new(&config, &result, scan.as_ref()));
    emit(&report, common.format)?;
    // The certificate property is part of the result contract.
    Ok(if result.oracle_recheck < 1e-8 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}

fn run_oracle_check(common: &CommonOpts) -> Result<ExitCode, Error> {
    let config = SuiteConfig {
        hbar: common.hbar,
        tol: tolerances(common),
        seed: common.seed,
        ..SuiteConfig::default()
    };
    let rows = oracle_equivalence(&config)?;
    let max_delta = max_oracle_delta(&rows);
    let mut report = ReportDocument::new(common.hbar, common.grid, common.tol, common.seed);
    report.oracle_deltas = rows;
    emit(&report, common.format)?;
    Ok(if max_delta <= 1e-8 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Analyze { state, common } => run_analyze(state, common),
        Command::Verify { suite, common } => run_verify(suite, common),
        Command::Search { config, common } => run_search(config, common),
        Command::OracleCheck { common } => run_oracle_check(common),
    };
    match outcome {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(2)
        }
    }
}
