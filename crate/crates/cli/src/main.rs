//! `qmix`: scenario files in, tabular results and verification reports out.
//!
//! Exit codes: 0 success, 1 verification failure, 2 input/schema error,
//! 3 numeric-domain error.

use qmix_cli::{output, scenario};

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qmix_core::scenarios::{
    build_slit_scenario, condition_on, double_slit_env_mixture, screen_intensity,
    simulate_preparation_run, visibility, EstimatorState,
};
use qmix_core::{Error as CoreError, Ket, SuiteConfig, Tolerances};

use output::{
    pattern_csv, trajectory_csv, ConditionOutput, DoubleSlitEnvOutput, EstimateOutput, MixOutput,
    SlitsOutput,
};
use scenario::{mix_descriptor_set, slit_scenario, vec_from, DetectorSpec, ScenarioFile};

const EXIT_VERIFY_FAILED: u8 = 1;
const EXIT_SCHEMA: u8 = 2;
const EXIT_NUMERIC: u8 = 3;

#[derive(Parser)]
#[command(name = "qmix", version, about = "Mixture construction, which-path analysis and verification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a joint state from descriptors, amplitudes and marker overlaps.
    Mix(FileArg),
    /// Compute an N-slit screen pattern and its fringe visibility.
    Slits(FileCsvArgs),
    /// Condition a slit scenario on a detector value and re-analyze.
    Condition(FileCsvArgs),
    /// Double slit with a mixed marker environment.
    DoubleSlitEnv(FileArg),
    /// Simulate a sequential preparation-estimation run.
    Estimate(FileCsvArgs),
    /// Run the randomized property suites and emit a report.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct FileArg {
    /// Scenario JSON file.
    file: PathBuf,
}

#[derive(Args)]
struct FileCsvArgs {
    /// Scenario JSON file.
    file: PathBuf,
    /// Write the tabular output (pattern or trajectory) to this CSV file.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Optional scenario file of kind "verify" supplying the configuration.
    file: Option<PathBuf>,
    /// Suite seed (overrides the file).
    #[arg(long)]
    seed: Option<u64>,
    /// Trials per property family and dimension (overrides the file).
    #[arg(long)]
    trials: Option<usize>,
    /// Comma-separated dimensions to sweep, e.g. "2,3,4".
    #[arg(long)]
    dims: Option<String>,
    /// Comma-separated tolerance overrides, e.g. "class=1e-8,psd=1e-9".
    #[arg(long)]
    tolerance: Option<String>,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

enum CliError {
    /// Unreadable, unparsable or semantically invalid input.
    Schema(String),
    /// A numeric-domain condition (null event, mismatched marginals, ...).
    Numeric(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Schema(_) => EXIT_SCHEMA,
            CliError::Numeric(_) => EXIT_NUMERIC,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Schema(m) | CliError::Numeric(m) => m,
        }
    }
}

/// Input-construction failures are schema errors; conditions that arise from
/// the numerics of a valid scenario are numeric-domain errors.
fn from_core(e: CoreError) -> CliError {
    match e {
        CoreError::NullEvent
        | CoreError::DegenerateForm
        | CoreError::Span(_)
        | CoreError::MismatchedMarginals(_)
        | CoreError::ImpossibleOutcome => CliError::Numeric(e.to_string()),
        _ => CliError::Schema(e.to_string()),
    }
}

fn read_scenario(path: &Path, expected: &str) -> Result<ScenarioFile, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Schema(format!("cannot read {}: {e}", path.display())))?;
    let file: ScenarioFile = serde_json::from_str(&text)
        .map_err(|e| CliError::Schema(format!("invalid scenario file: {e}")))?;
    if file.kind() != expected {
        return Err(CliError::Schema(format!(
            "expected kind \"{expected}\", found \"{}\"",
            file.kind()
        )));
    }
    Ok(file)
}

fn emit<T: serde::Serialize>(doc: &T) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(doc)
        .map_err(|e| CliError::Schema(format!("serialization failed: {e}")))?;
    println!("{text}");
    Ok(())
}

fn write_csv(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents)
        .map_err(|e| CliError::Schema(format!("cannot write {}: {e}", path.display())))
}

fn cmd_mix(args: &FileArg) -> Result<(), CliError> {
    let tol = Tolerances::default();
    let ScenarioFile::Mix {
        descriptors,
        amplitudes,
        gram,
    } = read_scenario(&args.file, "mix")?
    else {
        unreachable!("kind checked");
    };
    let d = mix_descriptor_set(&descriptors, &amplitudes).map_err(from_core)?;
    let g = qmix_core::GramSpec::new_with(scenario::mat_from(&gram).map_err(from_core)?, &tol)
        .map_err(from_core)?;
    let out = qmix_core::mixing::mix_general(&d, &g, "E", &tol).map_err(from_core)?;
    emit(&MixOutput::from_result(&out).map_err(from_core)?)
}

fn cmd_slits(args: &FileCsvArgs) -> Result<(), CliError> {
    let tol = Tolerances::default();
    let ScenarioFile::Slits {
        n_slits,
        amplitudes,
        env,
        screen,
    } = read_scenario(&args.file, "slits")?
    else {
        unreachable!("kind checked");
    };
    let s = slit_scenario(n_slits, &amplitudes, &env, &screen, &tol).map_err(from_core)?;
    let out = build_slit_scenario(&s, &tol).map_err(from_core)?;
    let pattern = screen_intensity(&out.reduced, &s.screen).map_err(from_core)?;
    let csv = match &args.csv {
        Some(path) => {
            write_csv(path, &pattern_csv(&pattern))?;
            Some(path.display().to_string())
        }
        None => None,
    };
    emit(&SlitsOutput {
        visibility: visibility(&pattern),
        classification: out.classification.clone(),
        purity: out.reduced.purity(),
        samples: pattern.abscissae.len(),
        csv,
    })
}

fn cmd_condition(args: &FileCsvArgs) -> Result<(), CliError> {
    let tol = Tolerances::default();
    let ScenarioFile::Condition {
        n_slits,
        amplitudes,
        env,
        screen,
        detector,
    } = read_scenario(&args.file, "condition")?
    else {
        unreachable!("kind checked");
    };
    let s = slit_scenario(n_slits, &amplitudes, &env, &screen, &tol).map_err(from_core)?;
    let out = build_slit_scenario(&s, &tol).map_err(from_core)?;
    let value: Ket = match &detector {
        DetectorSpec::Slit(j) => out
            .env_vectors
            .get(*j)
            .cloned()
            .ok_or_else(|| CliError::Schema(format!("detector slit {j} out of range")))?,
        DetectorSpec::Vector(raw) => Ket::new(
            vec_from(raw).map_err(from_core)?,
            out.env_vectors[0].layout().clone(),
        )
        .map_err(from_core)?,
    };
    let cond = condition_on(&out.joint, &value, &tol).map_err(from_core)?;
    let pattern = screen_intensity(&cond, &s.screen).map_err(from_core)?;
    let csv = match &args.csv {
        Some(path) => {
            write_csv(path, &pattern_csv(&pattern))?;
            Some(path.display().to_string())
        }
        None => None,
    };
    emit(&ConditionOutput {
        conditional_reduced: scenario::mat_back(cond.mat()),
        purity: cond.purity(),
        visibility: visibility(&pattern),
        csv,
    })
}

fn cmd_double_slit_env(args: &FileArg) -> Result<(), CliError> {
    let tol = Tolerances::default();
    let ScenarioFile::DoubleSlitEnv {
        weights,
        psi1,
        psi2,
        marker_labels,
    } = read_scenario(&args.file, "double_slit_env")?
    else {
        unreachable!("kind checked");
    };
    let p1 = psi1.build().map_err(from_core)?;
    let p2 = psi2.build().map_err(from_core)?;
    let labels: Vec<&str> = marker_labels.iter().map(|s| s.as_str()).collect();
    let (rho_sm, rho_s) =
        double_slit_env_mixture((weights[0], weights[1]), &p1, &p2, &labels, &tol)
            .map_err(from_core)?;
    emit(&DoubleSlitEnvOutput::from_states(&rho_sm, &rho_s))
}

fn cmd_estimate(args: &FileCsvArgs) -> Result<(), CliError> {
    let ScenarioFile::Estimate {
        mode,
        candidates,
        weights,
        shots,
        bases,
        seed,
    } = read_scenario(&args.file, "estimate")?
    else {
        unreachable!("kind checked");
    };
    let candidates: Vec<Ket> = candidates
        .iter()
        .map(|s| s.build())
        .collect::<Result<_, _>>()
        .map_err(from_core)?;
    let bases: Vec<Vec<Ket>> = bases
        .iter()
        .map(|b| b.iter().map(|s| s.build()).collect::<Result<_, _>>())
        .collect::<Result<_, _>>()
        .map_err(from_core)?;
    // Surface obviously inconsistent estimator inputs before simulating.
    EstimatorState::new(candidates.clone(), weights.clone()).map_err(from_core)?;
    let (run, est) = simulate_preparation_run(
        mode.run_mode(),
        &candidates,
        &weights,
        shots,
        &bases,
        seed,
    )
    .map_err(from_core)?;
    let csv = match &args.csv {
        Some(path) => {
            write_csv(path, &trajectory_csv(&run.posteriors))?;
            Some(path.display().to_string())
        }
        None => None,
    };
    let outcome_frequencies: Vec<Vec<f64>> = bases
        .iter()
        .enumerate()
        .map(|(bi, basis)| {
            let hits: Vec<&(usize, usize)> =
                run.outcomes.iter().filter(|(b, _)| *b == bi).collect();
            let n = hits.len().max(1) as f64;
            (0..basis.len())
                .map(|oi| hits.iter().filter(|(_, o)| *o == oi).count() as f64 / n)
                .collect()
        })
        .collect();
    let max_posterior = est.posterior().iter().cloned().fold(0.0, f64::max);
    emit(&EstimateOutput {
        shots,
        final_posterior: est.posterior().to_vec(),
        max_posterior,
        outcome_frequencies,
        csv,
    })
}

fn parse_tolerances(spec: &str, base: Tolerances) -> Result<Tolerances, CliError> {
    let mut t = base;
    for part in spec.split(',').filter(|p| !p.is_empty()) {
        let (key, value) = part
            .split_once('=')
            .ok_or_else(|| CliError::Schema(format!("bad tolerance entry: {part}")))?;
        let v: f64 = value
            .parse()
            .map_err(|e| CliError::Schema(format!("bad tolerance value {value}: {e}")))?;
        match key {
            "norm" => t.norm = v,
            "herm" => t.herm = v,
            "psd" => t.psd = v,
            "class" => t.class = v,
            _ => return Err(CliError::Schema(format!("unknown tolerance key: {key}"))),
        }
    }
    Ok(t)
}

fn cmd_verify(args: &VerifyArgs) -> Result<bool, CliError> {
    let mut cfg = SuiteConfig::default();
    if let Some(path) = &args.file {
        let ScenarioFile::Verify {
            seed,
            trials_per_property,
            dims,
            tolerances,
        } = read_scenario(path, "verify")?
        else {
            unreachable!("kind checked");
        };
        cfg.seed = seed;
        cfg.trials_per_property = trials_per_property;
        cfg.dims = dims;
        if let Some(t) = tolerances {
            cfg.tolerances = t;
        }
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(trials) = args.trials {
        cfg.trials_per_property = trials;
    }
    if let Some(dims) = &args.dims {
        cfg.dims = dims
            .split(',')
            .map(|d| {
                d.trim()
                    .parse::<usize>()
                    .map_err(|e| CliError::Schema(format!("bad dimension {d}: {e}")))
            })
            .collect::<Result<_, _>>()?;
    }
    if let Some(tspec) = &args.tolerance {
        cfg.tolerances = parse_tolerances(tspec, cfg.tolerances)?;
    }
    if cfg.trials_per_property == 0 || cfg.dims.is_empty() || cfg.dims.iter().any(|&d| d < 2) {
        return Err(CliError::Schema(
            "need at least one trial and dimensions ≥ 2".into(),
        ));
    }
    let report = qmix_core::verify::run_suite(&cfg);
    let text = serde_json::to_string_pretty(&report)
        .map_err(|e| CliError::Schema(format!("serialization failed: {e}")))?;
    match &args.out {
        Some(path) => write_csv(path, &format!("{text}\n"))?,
        None => println!("{text}"),
    }
    Ok(report.passed)
}

fn run(cli: &Cli) -> Result<bool, CliError> {
    match &cli.command {
        Command::Mix(a) => cmd_mix(a).map(|_| true),
        Command::Slits(a) => cmd_slits(a).map(|_| true),
        Command::Condition(a) => cmd_condition(a).map(|_| true),
        Command::DoubleSlitEnv(a) => cmd_double_slit_env(a).map(|_| true),
        Command::Estimate(a) => cmd_estimate(a).map(|_| true),
        Command::Verify(a) => cmd_verify(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_VERIFY_FAILED),
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}
