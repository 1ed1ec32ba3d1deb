//! `wn`: kernels, means, bound verification and rate experiments on the
//! dyadic group.
//!
//! Exit codes: 0 success (for `verify`, every bound held), 1 internal error
//! or a violated bound, 2 usage or precondition error, 3 degenerate data.

mod output;
mod spec;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::anyhow;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use wn_core::experiments::{
    self, condition_evidence, rate_experiment, summarize, ConditionEvidence, MeanSpec, Subject,
    SweepSummary, Theorem,
};
use wn_core::io::{format_value, write_modulus_profile, write_spectrum, write_step_function};
use wn_core::kernels::{kernel, KernelKind};
use wn_core::means::{norlund_mean, MeanMethod};
use wn_core::metrics::{lp_norm, modulus_profile};
use wn_core::transform::analyze;
use wn_core::weights::{weight_family, WeightSequence, WeightSpec};
use wn_core::{Error, Resolution};

use crate::output::write_atomic;
use crate::spec::{FunctionSpec, OrderRange};

#[derive(Debug, Parser)]
#[command(
    name = "wn",
    version,
    about = "Walsh-Fourier analysis and Norlund-mean bounds on the dyadic group"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Dump a Dirichlet, Fejer or Norlund kernel as a step-function CSV.
    Kernel(KernelArgs),
    /// Compute a Fejer or Norlund mean of a function and its L^p error.
    Mean(MeanArgs),
    /// Evaluate an approximation bound over a range of orders.
    Verify(VerifyArgs),
    /// Fit the decay rate of the approximation error.
    Rates(RatesArgs),
    /// Write the Walsh-Paley spectrum of a function.
    Spectrum(SpectrumArgs),
    /// Write the dyadic modulus of continuity profile of a function.
    Modulus(ModulusArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Kind {
    Dirichlet,
    Fejer,
    Norlund,
}

#[derive(Debug, Args)]
struct KernelArgs {
    #[arg(long, value_enum)]
    kind: Kind,
    #[arg(long)]
    n: usize,
    #[arg(long = "M")]
    m: u32,
    /// Weight spec, required for `norlund`.
    #[arg(long)]
    weights: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct MeanArgs {
    /// Use Fejer means (same as `--weights const`).
    #[arg(long, conflicts_with = "weights")]
    fejer: bool,
    #[arg(long)]
    weights: Option<String>,
    #[arg(long = "fn")]
    function: String,
    #[arg(long)]
    n: usize,
    #[arg(long = "M")]
    m: u32,
    #[arg(long, default_value_t = 2.0)]
    p: f64,
    #[arg(long, default_value = "abel")]
    method: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// fejer | t1 | t2 | t3 | ms
    #[arg(long)]
    theorem: String,
    #[arg(long = "fn", default_value = "lip:0.5")]
    function: String,
    #[arg(long)]
    weights: Option<String>,
    /// Norm exponents, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "2")]
    p: Vec<f64>,
    /// Orders `A:B[:step]`; `t2` keeps only the powers of two.
    #[arg(long)]
    n: String,
    #[arg(long = "M")]
    m: u32,
    /// Constant `C` for the ratio-only theorems (`t3`, `ms`).
    #[arg(long)]
    constant: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// BoundReport CSV.
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON summary (also printed to stdout).
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct RatesArgs {
    #[arg(long)]
    alpha: f64,
    #[arg(long, default_value_t = 2.0)]
    p: f64,
    /// Weight spec; Fejer means when omitted.
    #[arg(long)]
    weights: Option<String>,
    /// Test function; defaults to `lip:<alpha>`.
    #[arg(long = "fn")]
    function: Option<String>,
    /// Orders `A:B` (powers of two inside) or `A:B:step`.
    #[arg(long)]
    n: String,
    #[arg(long = "M")]
    m: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SpectrumArgs {
    #[arg(long = "fn")]
    function: String,
    #[arg(long = "M")]
    m: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ModulusArgs {
    #[arg(long = "fn")]
    function: String,
    #[arg(long = "M")]
    m: u32,
    #[arg(long, default_value_t = 2.0)]
    p: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Failure carrying its exit code.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl From<anyhow::Error> for Failure {
    fn from(error: anyhow::Error) -> Self {
        let code = match error.downcast_ref::<Error>() {
            Some(Error::Degenerate(_)) => 3,
            Some(_) => 2,
            None => 1,
        };
        Self { code, error }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        anyhow::Error::from(e).into()
    }
}

type CmdResult = std::result::Result<ExitCode, Failure>;

fn usage(msg: impl std::fmt::Display) -> Failure {
    Failure {
        code: 2,
        error: anyhow!("{msg}"),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error: {e:#}");
        return ExitCode::from(2);
    }
    let result = match cli.command {
        Command::Kernel(a) => cmd_kernel(a),
        Command::Mean(a) => cmd_mean(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Rates(a) => cmd_rates(a),
        Command::Spectrum(a) => cmd_spectrum(a),
        Command::Modulus(a) => cmd_modulus(a),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}

/// `WN_THREADS` caps the rayon pool.
fn configure_threads() -> anyhow::Result<()> {
    if let Ok(v) = std::env::var("WN_THREADS") {
        let n: usize = v
            .parse()
            .map_err(|_| anyhow!("WN_THREADS must be a positive integer, got '{v}'"))?;
        if n == 0 {
            return Err(anyhow!("WN_THREADS must be positive"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()?;
    }
    Ok(())
}

fn parse_weights(s: &str, horizon: usize) -> Result<WeightSequence, Failure> {
    let spec: WeightSpec = s.parse()?;
    Ok(weight_family(&spec, horizon)?)
}

fn emit(out: Option<&PathBuf>, contents: &[u8]) -> Result<(), Failure> {
    match out {
        Some(path) => write_atomic(path, contents)?,
        None => print!("{}", String::from_utf8_lossy(contents)),
    }
    Ok(())
}

fn cmd_kernel(a: KernelArgs) -> CmdResult {
    let r = Resolution::new(a.m)?;
    let (kind, weights) = match a.kind {
        Kind::Dirichlet => (KernelKind::Dirichlet, None),
        Kind::Fejer => (KernelKind::Fejer, None),
        Kind::Norlund => {
            let spec = a
                .weights
                .as_deref()
                .ok_or_else(|| usage("--kind norlund needs --weights"))?;
            (KernelKind::Norlund, Some(parse_weights(spec, a.n.max(1))?))
        }
    };
    let k = kernel(kind, a.n, r, weights.as_ref())?;
    let abs = k.map(f64::abs).integrate();
    if let Some(path) = &a.out {
        write_atomic(path, write_step_function(&k).as_bytes()).map_err(Failure::from)?;
    }
    println!("integral={}", format_value(k.integrate()));
    println!("abs_integral={}", format_value(abs));
    Ok(ExitCode::SUCCESS)
}

fn cmd_mean(a: MeanArgs) -> CmdResult {
    let r = Resolution::new(a.m)?;
    let f = a.function.parse::<FunctionSpec>()?.realize(r, a.seed)?;
    let method: MeanMethod = a.method.parse()?;
    let weights = match (&a.weights, a.fejer) {
        (Some(w), false) => w.clone(),
        (None, _) => "const".to_string(),
        (Some(_), true) => unreachable!("clap rejects --fejer with --weights"),
    };
    let q = parse_weights(&weights, a.n.max(1))?;
    let t = norlund_mean(&f, a.n, &q, method)?;
    let err = lp_norm(&t.values.sub(&f)?, a.p)?;
    if let Some(path) = &a.out {
        write_atomic(path, write_step_function(&t.values).as_bytes()).map_err(Failure::from)?;
    }
    println!("error={}", format_value(err));
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct VerifySummary {
    function: String,
    resolution: u32,
    p: Vec<f64>,
    weights: Option<String>,
    orders: usize,
    summary: SweepSummary,
    conditions: Option<ConditionEvidence>,
}

fn cmd_verify(a: VerifyArgs) -> CmdResult {
    let theorem: Theorem = a.theorem.parse()?;
    let r = Resolution::new(a.m)?;
    let range: OrderRange = a.n.parse()?;
    let orders = match theorem {
        Theorem::T2 => range.dyadic_orders(),
        _ => range.orders(),
    };
    if orders.is_empty() {
        return Err(usage(format!("no admissible orders in '{}'", a.n)));
    }
    let max_order = *orders.last().expect("non-empty");
    let q = match (&a.weights, theorem) {
        (Some(w), _) => Some(parse_weights(w, r.size().max(max_order) + 1)?),
        (None, Theorem::Fejer) => None,
        (None, _) => return Err(usage(format!("--theorem {theorem} needs --weights"))),
    };
    let fspec: FunctionSpec = a.function.parse()?;
    let name = fspec.label(a.seed);
    let f = fspec.realize(r, a.seed)?;
    let subject = Subject::new(name.clone(), f, &a.p)?;
    let reports = subject.sweep(theorem, &orders, q.as_ref(), &a.p, a.constant)?;

    if let Some(path) = &a.out {
        write_atomic(path, &output::bound_reports_csv(&reports)?)?;
    }
    let conditions = match &q {
        Some(q) => Some(condition_evidence(q, max_order.max(2))?),
        None => None,
    };
    let summary = VerifySummary {
        function: name,
        resolution: r.bits(),
        p: a.p.clone(),
        weights: q.as_ref().map(|q| q.label().to_string()),
        orders: orders.len(),
        summary: summarize(theorem, &reports),
        conditions,
    };
    let json = serde_json::to_string_pretty(&summary).map_err(anyhow::Error::from)?;
    if let Some(path) = &a.json {
        write_atomic(path, json.as_bytes())?;
    }
    println!("{json}");
    if summary.summary.all_hold {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!(
            "{} of {} cells violate the bound",
            summary.summary.cells - summary.summary.holding,
            summary.summary.cells
        );
        Ok(ExitCode::from(1))
    }
}

fn cmd_rates(a: RatesArgs) -> CmdResult {
    let r = Resolution::new(a.m)?;
    let range: OrderRange = a.n.parse()?;
    let orders = match range.step {
        Some(_) => range.orders(),
        None => range.dyadic_orders(),
    };
    if range.dyadic_orders().len() < 4 {
        return Err(usage(format!(
            "order range '{}' has fewer than 4 dyadic points",
            a.n
        )));
    }
    let max_order = *orders.last().expect("non-empty");
    if max_order > r.size() / 2 {
        return Err(usage(format!(
            "orders must stay within 2^(M-1) = {}",
            r.size() / 2
        )));
    }
    let fspec: FunctionSpec = match &a.function {
        Some(s) => s.parse()?,
        None => FunctionSpec::Lip {
            alpha: a.alpha,
            variant: wn_core::LipVariant::Lacunary,
            seed: None,
        },
    };
    let f = fspec.realize(r, a.seed)?;
    let mean = match &a.weights {
        Some(w) => MeanSpec::Norlund(parse_weights(w, max_order)?),
        None => MeanSpec::Fejer,
    };
    let report = rate_experiment(&f, a.alpha, a.p, &mean, &orders)?;
    for n in &report.dropped {
        eprintln!(
            "warning: order {n} dropped, error below {:e}",
            experiments::UNDERFLOW_FLOOR
        );
    }
    if let Some(path) = &a.out {
        write_atomic(path, &output::rate_report_csv(&report)?)?;
    }
    if let Some(path) = &a.svg {
        let xs: Vec<f64> = report.orders.iter().map(|&n| n as f64).collect();
        let title = format!("alpha={} p={} mean={}", report.alpha, report.p, report.mean);
        let plot = svg::LogLogPlot {
            title: &title,
            xs: &xs,
            ys: &report.errors,
            line: Some((report.fit.intercept, report.fit.slope)),
        };
        write_atomic(path, plot.render().as_bytes())?;
    }
    println!("slope={}", format_value(report.fit.slope));
    println!("intercept={}", format_value(report.fit.intercept));
    println!("r2={}", format_value(report.fit.r2));
    match report.expected_slope {
        Some(e) => println!("expected_slope={}", format_value(e)),
        None => println!(
            "log_normalized_spread={}",
            format_value(report.log_normalized_spread.unwrap_or(f64::NAN))
        ),
    }
    println!("consistent={}", report.consistent);
    Ok(ExitCode::SUCCESS)
}

fn cmd_spectrum(a: SpectrumArgs) -> CmdResult {
    let r = Resolution::new(a.m)?;
    let f = a.function.parse::<FunctionSpec>()?.realize(r, a.seed)?;
    emit(a.out.as_ref(), write_spectrum(&analyze(&f)).as_bytes())?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_modulus(a: ModulusArgs) -> CmdResult {
    let r = Resolution::new(a.m)?;
    let f = a.function.parse::<FunctionSpec>()?.realize(r, a.seed)?;
    let profile = modulus_profile(&f, a.p)?;
    emit(a.out.as_ref(), write_modulus_profile(&profile).as_bytes())?;
    Ok(ExitCode::SUCCESS)
}
