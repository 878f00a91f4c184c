//! Command-line front end: configuration parsing, subcommand dispatch,
//! deterministic seeding, and file emission.
//!
//! Exit codes: 0 success (and all checks passed), 1 at least one
//! verification check failed, 2 bad configuration or usage.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;
use sha2::{Digest, Sha256};

use crate::cadlag::{d_j1, d_m1_monotone, j1_oscillation, StepFunction};
use crate::config::{CheckConfig, CheckKind, RunConfig};
use crate::estimators::{
    self, default_l_of_n, default_q_of_n, laplace_gap, pn_schedule, rn_schedule, FParams,
    MixingRate,
};
use crate::maxima::{build_maxima, truncate_maxima};
use crate::verify::{self, Defaults, VerificationReport};
use crate::{Error, Result};

#[derive(Debug, Parser)]
#[command(name = "maxlim", version, about = "Partial maxima simulation and verification")]
struct Cli {
    /// JSON run configuration; a built-in Fréchet(1) config is used if absent.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed override.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Draw the master seed from OS entropy (the only nondeterminism).
    #[arg(long, global = true, conflicts_with = "seed")]
    seed_from_entropy: bool,
    /// Sample length override.
    #[arg(long, global = true)]
    n: Option<usize>,
    /// Replication count override.
    #[arg(long, global = true)]
    reps: Option<usize>,
    /// Worker threads; default = available parallelism.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Run directory for file outputs (manifest, CSV/JSON artifacts).
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Stdout format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Draw one sample path of the configured model and emit it as CSV.
    Simulate,
    /// Emit the partial maxima process and its truncation.
    Maxima {
        /// Truncation level (in normalized units).
        #[arg(long, default_value_t = 0.5)]
        u: f64,
    },
    /// Distances between two step-function path files (JSON).
    Metric {
        /// Skorohod J1 distance (default when no metric is selected).
        #[arg(long)]
        j1: bool,
        /// M1 distance (nondecreasing paths only).
        #[arg(long)]
        m1: bool,
        /// J1 oscillation of the first path at the given window width.
        #[arg(long, value_name = "DELTA")]
        oscillation: Option<f64>,
        a: PathBuf,
        b: Option<PathBuf>,
    },
    /// Run one estimator on a fresh sample and print the estimate as JSON.
    Estimate {
        #[arg(long, value_enum)]
        estimator: EstimatorKind,
        /// Hill order statistics count.
        #[arg(long)]
        k: Option<usize>,
        /// Block length for the blocks estimator.
        #[arg(long)]
        block_len: Option<usize>,
        /// Window length for the O'Brien estimator.
        #[arg(long)]
        window: Option<usize>,
        /// Level in normalized units for theta and anticluster estimators.
        #[arg(long, default_value_t = 1.0)]
        u: f64,
        /// Tail-process lag.
        #[arg(long, default_value_t = 1)]
        lag: i64,
        /// Tail-process ratio.
        #[arg(long, default_value_t = 1.0)]
        ratio: f64,
        /// Tail-process threshold quantile.
        #[arg(long, default_value_t = 0.999)]
        quantile: f64,
        /// Anticluster inner gap.
        #[arg(long, default_value_t = 2)]
        m: usize,
        /// Block length override for anticluster / laplace-gap / schedules.
        #[arg(long)]
        r_n: Option<usize>,
        /// Window count for the p_n schedule.
        #[arg(long)]
        q_n: Option<u64>,
        /// Mixing rate family for the schedules.
        #[arg(long, value_enum, default_value_t = MixingKind::Zero)]
        mixing: MixingKind,
        #[arg(long, default_value_t = 1.0)]
        mixing_c: f64,
        #[arg(long, default_value_t = 0.5)]
        mixing_rho: f64,
    },
    /// Run the configured verification checks; exit 0 iff all pass.
    Verify,
    /// Calibrate the slow-model endpoint envelope and write the defaults table.
    Calibrate {
        /// Independent calibration rounds.
        #[arg(long, default_value_t = 5)]
        rounds: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EstimatorKind {
    Hill,
    BlocksTheta,
    ObrienTheta,
    TailProcess,
    Anticluster,
    LaplaceGap,
    RnSchedule,
    PnSchedule,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MixingKind {
    Zero,
    Geometric,
}

/// Entry point; returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn dispatch(cli: Cli) -> Result<i32> {
    if let Some(workers) = cli.workers {
        // ignore the error if a global pool already exists (e.g. in tests)
        let _ = rayon::ThreadPoolBuilder::new().num_threads(workers).build_global();
    }
    let mut config = match &cli.config {
        Some(path) => RunConfig::from_json(&fs::read_to_string(path)?)?,
        None => RunConfig::default_frechet(),
    };
    if let Some(n) = cli.n {
        config.n = n;
    }
    if let Some(reps) = cli.reps {
        config.reps = reps;
    }
    if cli.seed_from_entropy {
        config.seed = rand::random();
    } else if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if let Some(dir) = &cli.output {
        config.output_dir = dir.clone();
    }
    config.validate()?;
    let out_dir = cli.output.as_deref();

    match &cli.command {
        Command::Simulate => simulate(&config, out_dir, cli.format),
        Command::Maxima { u } => maxima(&config, *u, out_dir, cli.format),
        Command::Metric { j1, m1, oscillation, a, b } => {
            metric(*j1, *m1, *oscillation, a, b.as_deref())
        }
        Command::Estimate { .. } => estimate(&config, &cli.command, out_dir),
        Command::Verify => verify_cmd(&config, out_dir, cli.format),
        Command::Calibrate { rounds } => calibrate(&config, *rounds, out_dir),
    }
}

fn write_manifest(dir: &Path, config: &RunConfig, subcommand: &str, files: &[&str]) -> Result<()> {
    let canonical = serde_json::to_string(config).expect("config serializes");
    let hash = format!("{:x}", Sha256::digest(canonical.as_bytes()));
    let manifest = json!({
        "tool": "maxlim",
        "version": env!("CARGO_PKG_VERSION"),
        "subcommand": subcommand,
        "config_sha256": hash,
        "seed": config.seed,
        "n": config.n,
        "reps": config.reps,
        "files": files,
    });
    fs::write(dir.join("manifest.json"), serde_json::to_string_pretty(&manifest).unwrap())?;
    fs::write(dir.join("config.json"), config.to_json())?;
    Ok(())
}

fn simulate(config: &RunConfig, out_dir: Option<&Path>, _format: Format) -> Result<i32> {
    let sample = config.model.sample(config.n, config.seed)?;
    let csv = sample.to_csv();
    match out_dir {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            fs::write(dir.join("sample.csv"), &csv)?;
            write_manifest(dir, config, "simulate", &["sample.csv"])?;
            println!("{}", dir.join("sample.csv").display());
        }
        None => print!("{csv}"),
    }
    Ok(0)
}

fn maxima(config: &RunConfig, u: f64, out_dir: Option<&Path>, format: Format) -> Result<i32> {
    if !(u > 0.0) {
        return Err(Error::Config(format!("truncation level must be positive, got {u}")));
    }
    let sample = config.model.sample(config.n, config.seed)?;
    let a_n = verify::reference_an(&config.model, config.n, config.seed ^ 0x70b5_a5e5)?;
    let full = build_maxima(&sample, a_n)?;
    let truncated = truncate_maxima(&full, u)?;
    match out_dir {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            fs::write(dir.join("maxima.json"), serde_json::to_string_pretty(&full).unwrap())?;
            fs::write(dir.join("maxima.csv"), full.to_csv())?;
            fs::write(
                dir.join("maxima_truncated.json"),
                serde_json::to_string_pretty(&truncated).unwrap(),
            )?;
            fs::write(dir.join("maxima_truncated.csv"), truncated.to_csv())?;
            write_manifest(
                dir,
                config,
                "maxima",
                &["maxima.json", "maxima.csv", "maxima_truncated.json", "maxima_truncated.csv"],
            )?;
            println!("{}", dir.display());
        }
        None => match format {
            Format::Json => println!(
                "{}",
                json!({ "a_n": a_n, "u": u, "full": full, "truncated": truncated })
            ),
            Format::Csv => {
                print!("# full\n{}# truncated (u = {u})\n{}", full.to_csv(), truncated.to_csv());
            }
        },
    }
    Ok(0)
}

fn read_path(path: &Path) -> Result<StepFunction> {
    let text = fs::read_to_string(path)?;
    serde_json::from_str(&text)
        .map_err(|e| Error::Config(format!("bad path file {}: {e}", path.display())))
}

fn metric(j1: bool, m1: bool, oscillation: Option<f64>, a: &Path, b: Option<&Path>) -> Result<i32> {
    let j1 = j1 || (!m1 && oscillation.is_none());
    let f = read_path(a)?;
    let g = match b {
        Some(path) => Some(read_path(path)?),
        None => None,
    };
    if (j1 || m1) && g.is_none() {
        return Err(Error::Config("j1/m1 distances need two path files".into()));
    }
    let selected = usize::from(j1) + usize::from(m1) + usize::from(oscillation.is_some());
    let emit = |name: &str, value: f64| {
        if selected > 1 {
            println!("{name} {value}");
        } else {
            println!("{value}");
        }
    };
    if j1 {
        emit("j1", d_j1(&f, g.as_ref().unwrap()));
    }
    if m1 {
        emit("m1", d_m1_monotone(&f, g.as_ref().unwrap())?);
    }
    if let Some(delta) = oscillation {
        if !(0.0 < delta && delta < 1.0) {
            return Err(Error::Config(format!("oscillation window must be in (0,1), got {delta}")));
        }
        emit("oscillation", j1_oscillation(&f, delta));
    }
    Ok(0)
}

fn estimate(config: &RunConfig, command: &Command, out_dir: Option<&Path>) -> Result<i32> {
    let Command::Estimate {
        estimator,
        k,
        block_len,
        window,
        u,
        lag,
        ratio,
        quantile,
        m,
        r_n,
        q_n,
        mixing,
        mixing_c,
        mixing_rho,
    } = command
    else {
        unreachable!("estimate dispatch");
    };
    let rate = match mixing {
        MixingKind::Zero => MixingRate::Zero,
        MixingKind::Geometric => MixingRate::Geometric { c: *mixing_c, rho: *mixing_rho },
    };
    let n64 = config.n as u64;
    let default_rn = || rn_schedule(n64, &rate, default_l_of_n).map(|r| r as usize);
    let level = |sample_needed: bool| -> Result<f64> {
        if sample_needed {
            Ok(*u * verify::reference_an(&config.model, config.n, config.seed ^ 0x70b5_a5e5)?)
        } else {
            Ok(0.0)
        }
    };
    let output = match estimator {
        EstimatorKind::Hill => {
            let sample = config.model.sample(config.n, config.seed)?;
            let k = k.unwrap_or_else(|| (config.n / 100).max(10));
            serde_json::to_value(estimators::hill_alpha(&sample, k)?).unwrap()
        }
        EstimatorKind::BlocksTheta => {
            let sample = config.model.sample(config.n, config.seed)?;
            let r = match block_len {
                Some(r) => *r,
                None => default_rn()?,
            };
            serde_json::to_value(estimators::blocks_theta(&sample, r, level(true)?)?).unwrap()
        }
        EstimatorKind::ObrienTheta => {
            let sample = config.model.sample(config.n, config.seed)?;
            let p = match window {
                Some(p) => *p,
                None => pn_schedule(n64, default_q_of_n(n64), &rate)? as usize,
            };
            serde_json::to_value(estimators::obrien_theta(&sample, p, level(true)?)?).unwrap()
        }
        EstimatorKind::TailProcess => {
            if !(0.0 < *quantile && *quantile < 1.0) {
                return Err(Error::Config(format!("quantile must be in (0,1), got {quantile}")));
            }
            let sample = config.model.sample(config.n, config.seed)?;
            let mut sorted = sample.values.clone();
            sorted.sort_by(f64::total_cmp);
            let threshold = sorted[((*quantile * config.n as f64) as usize).min(config.n - 1)];
            serde_json::to_value(estimators::tail_process_est(&sample, *lag, *ratio, threshold)?)
                .unwrap()
        }
        EstimatorKind::Anticluster => {
            let sample = config.model.sample(config.n, config.seed)?;
            let a_n = verify::reference_an(&config.model, config.n, config.seed ^ 0x70b5_a5e5)?;
            let r = match r_n {
                Some(r) => *r,
                None => default_rn()?,
            };
            serde_json::to_value(estimators::anticluster_stat(&sample, *m, r, *u, a_n)?).unwrap()
        }
        EstimatorKind::LaplaceGap => {
            let r = match r_n {
                Some(r) => *r,
                None => default_rn()?,
            };
            let f = FParams { u: *u, w: 1.0, height: 1.0, time_bump: Some((0.5, 0.5)) };
            serde_json::to_value(laplace_gap(
                &config.model,
                config.n,
                r,
                f,
                config.reps,
                config.seed,
            )?)
            .unwrap()
        }
        EstimatorKind::RnSchedule => {
            let r = rn_schedule(n64, &rate, default_l_of_n)?;
            json!({ "r_n": r, "n": n64, "mixing": rate })
        }
        EstimatorKind::PnSchedule => {
            let q = q_n.unwrap_or_else(|| default_q_of_n(n64));
            let p = pn_schedule(n64, q, &rate)?;
            json!({ "p_n": p, "q_n": q, "n": n64, "mixing": rate })
        }
    };
    let text = serde_json::to_string_pretty(&output).unwrap();
    if let Some(dir) = out_dir {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("estimate.json"), &text)?;
        write_manifest(dir, config, "estimate", &["estimate.json"])?;
    }
    println!("{text}");
    Ok(0)
}

/// The default check suite for a model: everything that applies.
fn default_checks(config: &RunConfig) -> Vec<CheckConfig> {
    let plain = |kind: CheckKind| CheckConfig { check: kind, n: None, reps: None, seed: None };
    let mut checks = Vec::new();
    if config.model.theoretical_theta().is_some() {
        checks.push(plain(CheckKind::EndpointLimit));
    }
    if config.model.theoretical_theta() == Some(1.0) {
        checks.push(plain(CheckKind::Fdd {
            times: vec![0.5, 1.0],
            levels_grid: vec![vec![2.0, 1.0]],
        }));
        checks.push(plain(CheckKind::ExceedanceCounts { u: 1.0 }));
        checks.push(plain(CheckKind::ImpliedTail { x_grid: vec![0.5, 1.0, 2.0, 4.0] }));
    }
    checks.push(plain(CheckKind::Tightness {
        delta_grid: vec![0.01, 0.05, 0.1],
        eps: 1.0,
        u: 0.5,
    }));
    checks.push(plain(CheckKind::TruncationGap { u_grid: vec![0.05, 0.1, 0.2], eps: 0.2 }));
    checks
}

fn run_check(config: &RunConfig, check: &CheckConfig, defaults: &Defaults) -> Result<VerificationReport> {
    let n = check.n.unwrap_or(config.n);
    let reps = check.reps.unwrap_or(config.reps);
    let seed = check.seed.unwrap_or(config.seed);
    let spec = &config.model;
    match &check.check {
        CheckKind::EndpointLimit => verify::verify_endpoint_limit(spec, n, reps, seed, defaults),
        CheckKind::Fdd { times, levels_grid } => {
            verify::verify_fdd(spec, times, levels_grid, n, reps, seed, defaults)
        }
        CheckKind::Tightness { delta_grid, eps, u } => {
            verify::verify_tightness(spec, n, reps, delta_grid, *eps, *u, seed, defaults)
        }
        CheckKind::TruncationGap { u_grid, eps } => {
            verify::verify_truncation_gap(spec, n, reps, u_grid, *eps, seed)
        }
        CheckKind::ExceedanceCounts { u } => {
            verify::verify_exceedance_counts(spec, *u, n, reps, seed, defaults)
        }
        CheckKind::ImpliedTail { x_grid } => {
            verify::verify_implied_tail(spec, x_grid, n, reps, seed, defaults)
        }
    }
}

fn verify_cmd(config: &RunConfig, out_dir: Option<&Path>, format: Format) -> Result<i32> {
    let defaults = Defaults::load()?;
    let checks = if config.checks.is_empty() { default_checks(config) } else { config.checks.clone() };
    if checks.is_empty() {
        return Err(Error::Config("no applicable verification checks for this model".into()));
    }
    let mut reports = Vec::new();
    for check in &checks {
        let report = run_check(config, check, &defaults)?;
        match format {
            Format::Json => println!("{}", serde_json::to_string(&report).unwrap()),
            Format::Csv => {
                if reports.is_empty() {
                    println!("{}", VerificationReport::CSV_HEADER);
                }
                println!("{}", report.csv_row());
            }
        }
        reports.push(report);
    }
    if let Some(dir) = out_dir {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("reports.json"), serde_json::to_string_pretty(&reports).unwrap())?;
        let mut csv = String::from(VerificationReport::CSV_HEADER);
        for r in &reports {
            csv.push('\n');
            csv.push_str(&r.csv_row());
        }
        csv.push('\n');
        fs::write(dir.join("summary.csv"), csv)?;
        write_manifest(dir, config, "verify", &["reports.json", "summary.csv"])?;
    }
    Ok(if reports.iter().all(|r| r.passed) { 0 } else { 1 })
}

fn calibrate(config: &RunConfig, rounds: usize, out_dir: Option<&Path>) -> Result<i32> {
    let defaults =
        verify::calibrate_endpoint_slow(&config.model, config.n, config.reps, rounds, config.seed)?;
    let text = serde_json::to_string_pretty(&defaults).unwrap();
    // the calibrated table lands where MAXLIM_DEFAULTS points, so later
    // verify runs pick it up; otherwise in the run directory
    let target = match std::env::var_os("MAXLIM_DEFAULTS") {
        Some(path) => PathBuf::from(path),
        None => match out_dir {
            Some(dir) => {
                fs::create_dir_all(dir)?;
                dir.join("defaults.json")
            }
            None => {
                println!("{text}");
                return Ok(0);
            }
        },
    };
    if let Some(parent) = target.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)?;
        }
    }
    fs::write(&target, &text)?;
    println!("{}", target.display());
    Ok(0)
}
