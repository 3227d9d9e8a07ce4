use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use ratio_ci::analyze::{analyze_csv, write_wage_mimic, Denominator};
use ratio_ci::diagnostics::{
    alpha_bar_bc, alpha_underline_bc, critical_bracket, length_lower_bound, n_bar_bc, snr_tilde,
};
use ratio_ci::experiment::{run_experiment, ExperimentConfig};
use ratio_ci::format::fmt_g;
use ratio_ci::{classify_regime, ClassBounds, MomentBounds, RegimeInput};
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

const THREADS_VAR: &str = "RATIO_CI_THREADS";

#[derive(Parser)]
#[command(name = "ratio-ci", version, about = "Confidence intervals for ratios of expectations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a coverage experiment from a JSON config.
    Simulate {
        config: PathBuf,
        /// Override the CSV output path.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Override the SVG output path.
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Estimate a ratio from a CSV file.
    Analyze {
        data: PathBuf,
        /// Numerator column.
        #[arg(long)]
        num: String,
        /// Denominator column, or a rule such as `indicator:wage>=20000`.
        #[arg(long)]
        den: String,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        #[arg(long = "bootstrap-reps", default_value_t = 2000)]
        bootstrap_reps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Feasibility thresholds for a moment class.
    Diagnose {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        alpha: f64,
        /// Lower bound on E[Y].
        #[arg(long)]
        ly: f64,
        /// Upper bound on E[Y^2].
        #[arg(long)]
        uy: f64,
        /// Upper bound on E[X^2].
        #[arg(long)]
        ux: Option<f64>,
    },
    /// Asymptotic regime for E[X] = n^-a, V[X] = n^-a', E[Y] = n^-b, V[Y] = n^-b'.
    Classify {
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        #[arg(long = "a-prime", allow_hyphen_values = true)]
        a_prime: String,
        #[arg(long, allow_hyphen_values = true)]
        b: String,
        #[arg(long = "b-prime", allow_hyphen_values = true)]
        b_prime: String,
    },
    /// Write a synthetic wage/gender CSV.
    Mimic {
        #[arg(long, default_value_t = 204_246)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Output file; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn configure_threads() -> Result<()> {
    let Ok(v) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .with_context(|| format!("{THREADS_VAR} must be a positive integer, got {v:?}"))?;
    if n == 0 {
        bail!("{THREADS_VAR} must be a positive integer, got 0");
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .context("configuring the worker pool")?;
    Ok(())
}

fn simulate(config: PathBuf, csv: Option<PathBuf>, svg: Option<PathBuf>) -> Result<()> {
    let mut cfg = ExperimentConfig::from_path(&config).with_context(|| format!("loading {}", config.display()))?;
    if csv.is_some() {
        cfg.outputs.csv_path = csv;
    }
    if svg.is_some() {
        cfg.outputs.svg_path = svg;
    }
    let out = run_experiment(&cfg).with_context(|| format!("running {}", cfg.experiment_id))?;
    out.write_outputs(&cfg.outputs)?;
    if cfg.outputs.csv_path.is_none() {
        io::stdout().write_all(out.to_csv().as_bytes())?;
    } else {
        eprintln!("{}: {} rows", cfg.experiment_id, out.reports.len());
    }
    Ok(())
}

fn diagnose(n: usize, alpha: f64, ly: f64, uy: f64, ux: Option<f64>) -> Result<()> {
    if n == 0 {
        bail!("--n must be >= 1");
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        bail!("--alpha must lie in (0, 1), got {alpha}");
    }
    // The Y-side thresholds do not involve u_x.
    let mb = MomentBounds::new(ly, ux.unwrap_or(1.0), uy)?;
    let bracket = critical_bracket(n, &ClassBounds::Moment { bounds: mb, a_y: None })?;
    let mut out = io::stdout().lock();
    writeln!(out, "alpha_bar_n = {}", fmt_g(alpha_bar_bc(n, &mb)))?;
    writeln!(out, "n_bar_alpha = {}", fmt_g(n_bar_bc(alpha, &mb)))?;
    writeln!(out, "alpha_underline_n = {}", fmt_g(alpha_underline_bc(n, &mb)))?;
    writeln!(
        out,
        "bracket = [{}, {}]",
        bracket.alpha_lower.map_or("NA".into(), fmt_g),
        fmt_g(bracket.alpha_upper)
    )?;
    writeln!(out, "snr_tilde = {}", fmt_g(snr_tilde(n, &mb)))?;
    let feasible = alpha > bracket.alpha_upper;
    writeln!(
        out,
        "general Chebyshev interval at alpha = {}: {}",
        fmt_g(alpha),
        if feasible { "feasible" } else { "infeasible" }
    )?;
    match ux {
        Some(_) => match length_lower_bound(n, alpha, &mb)? {
            Some(v) => writeln!(out, "length_lower_bound = {}", fmt_g(v))?,
            None => writeln!(out, "length_lower_bound = NA (needs n >= 7 and a small enough alpha)")?,
        },
        None => writeln!(out, "length_lower_bound = NA (needs --ux)")?,
    }
    Ok(())
}

fn classify(a: &str, a_prime: &str, b: &str, b_prime: &str) -> Result<()> {
    let v = classify_regime(&RegimeInput::parse(a, a_prime, b, b_prime)?);
    let mut out = io::stdout().lock();
    writeln!(out, "snr_class = {:?}", v.snr_class)?;
    writeln!(out, "row = {:?}", v.row)?;
    writeln!(out, "col = {:?}", v.col)?;
    writeln!(out, "law_family = {:?}", v.law_family)?;
    writeln!(out, "renorm_exponent = {}", fmt_g(v.renorm_exponent))?;
    writeln!(out, "delta_method_ok = {}", v.delta_method_ok)?;
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    configure_threads()?;
    match cli.command {
        Command::Simulate { config, csv, svg } => simulate(config, csv, svg),
        Command::Analyze {
            data,
            num,
            den,
            alpha,
            bootstrap_reps,
            seed,
        } => {
            let den: Denominator = den.parse()?;
            let file = File::open(&data).with_context(|| format!("opening {}", data.display()))?;
            let report = analyze_csv(io::BufReader::new(file), &num, &den, alpha, bootstrap_reps, seed)
                .with_context(|| format!("analyzing {}", data.display()))?;
            print!("{report}");
            Ok(())
        }
        Command::Diagnose { n, alpha, ly, uy, ux } => diagnose(n, alpha, ly, uy, ux),
        Command::Classify { a, a_prime, b, b_prime } => classify(&a, &a_prime, &b, &b_prime),
        Command::Mimic { n, seed, out } => {
            match out {
                Some(p) => {
                    let f = File::create(&p).with_context(|| format!("creating {}", p.display()))?;
                    let mut w = BufWriter::new(f);
                    write_wage_mimic(&mut w, n, seed)?;
                    w.flush()?;
                }
                None => {
                    let mut w = BufWriter::new(io::stdout().lock());
                    write_wage_mimic(&mut w, n, seed)?;
                    w.flush()?;
                }
            }
            Ok(())
        }
    }
}

fn main() {
    if let Err(e) = run(Cli::parse()) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}
