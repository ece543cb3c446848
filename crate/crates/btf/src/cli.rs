//! `btf` subcommands: fit, simulate, bench, eta, geweke.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use btf_core::{
    geweke_test, summarize, Constraint, Engine, FitConfig, GewekeConfig, Hyperparameters, Noise,
    PriorKind, Sabotage, Scenario, ScenarioKind, Schedule, Side, SigmoidReading,
};
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::drivers::{
    autocorrelation, bench_samplers, engine_name, eta_sensitivity, median_by_eta, run_replications,
    timed_chain, FitPlan, Method,
};
use crate::error::{CliError, Result};
use crate::io::{self, fmt_f64, KeyValues};

/// Geweke p-values below this fail the `geweke` subcommand.
pub const GEWEKE_FAIL_P: f64 = 1e-4;

#[derive(Debug, Parser)]
#[command(name = "btf", version, about = "Bayesian boundary trend filtering")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit the upper (or lower) boundary of an `x,y` CSV.
    Fit(FitArgs),
    /// Replicate a simulation scenario and report RMSE, AL and CP.
    Simulate(SimulateArgs),
    /// Time both samplers and compare their effective sample sizes.
    Bench(BenchArgs),
    /// RMSE across approximation sharpness values on shared datasets.
    Eta(EtaArgs),
    /// Joint-distribution test of the sampler.
    Geweke(GewekeArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PriorArg {
    Hs,
    Lap,
    Nor,
}

impl From<PriorArg> for PriorKind {
    fn from(p: PriorArg) -> Self {
        match p {
            PriorArg::Hs => PriorKind::Horseshoe,
            PriorArg::Lap => PriorKind::Laplace,
            PriorArg::Nor => PriorKind::Normal,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ConstraintArg {
    None,
    #[value(alias = "ni")]
    NiInc,
    NiDec,
    Convex,
    Concave,
}

impl From<ConstraintArg> for Constraint {
    fn from(c: ConstraintArg) -> Self {
        match c {
            ConstraintArg::None => Constraint::None,
            ConstraintArg::NiInc => Constraint::NearlyIncreasing,
            ConstraintArg::NiDec => Constraint::NearlyDecreasing,
            ConstraintArg::Convex => Constraint::NearlyConvex,
            ConstraintArg::Concave => Constraint::NearlyConcave,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SideArg {
    Upper,
    Lower,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EngineArg {
    Pg,
    Cw,
}

impl From<EngineArg> for Engine {
    fn from(e: EngineArg) -> Self {
        match e {
            EngineArg::Pg => Engine::PolyaGamma,
            EngineArg::Cw => Engine::CoordinateWise,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScenarioArg {
    Sqrt,
    Pc,
    Sigmoid,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NoiseArg {
    A,
    B,
    C,
    D,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReadingArg {
    Corrected,
    Literal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BreakArg {
    Sigma2,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// CSV with header `x,y`.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// key=value file with the same keys as the flags; flags win.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub order: Option<usize>,
    #[arg(long, value_enum)]
    pub prior: Option<PriorArg>,
    #[arg(long, value_enum)]
    pub constraint: Option<ConstraintArg>,
    #[arg(long, value_enum)]
    pub side: Option<SideArg>,
    #[arg(long, value_enum)]
    pub engine: Option<EngineArg>,
    #[arg(long)]
    pub eta: Option<f64>,
    #[arg(long)]
    pub iters: Option<usize>,
    #[arg(long)]
    pub burnin: Option<usize>,
    #[arg(long)]
    pub thin: Option<usize>,
    /// Central credible level of the reported interval.
    #[arg(long)]
    pub level: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Also write every retained draw to draws.csv.
    #[arg(long)]
    pub save_draws: bool,
}

#[derive(Debug, Args)]
pub struct ScheduleArgs {
    #[arg(long, default_value_t = 10_500)]
    pub iters: usize,
    #[arg(long, default_value_t = 500)]
    pub burnin: usize,
    #[arg(long, default_value_t = 5)]
    pub thin: usize,
    #[arg(long, default_value_t = 500.0)]
    pub eta: f64,
    /// Defaults to 0 for pc and 1 otherwise.
    #[arg(long)]
    pub order: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct ScenarioArgs {
    #[arg(long, value_enum, default_value = "sqrt")]
    pub scenario: ScenarioArg,
    #[arg(long, value_enum, default_value = "b")]
    pub noise: NoiseArg,
    #[arg(long, default_value_t = 100)]
    pub n: usize,
    /// Which reading of the sigmoid's left branch to use.
    #[arg(long, value_enum, default_value = "corrected")]
    pub sigmoid_reading: ReadingArg,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub scenario: ScenarioArgs,
    #[command(flatten)]
    pub schedule: ScheduleArgs,
    #[arg(long, default_value_t = 20)]
    pub reps: usize,
    /// Comma-separated list drawn from hs, lap, nor with optional `ni` suffix.
    #[arg(long, default_value = "hs")]
    pub methods: String,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[command(flatten)]
    pub scenario: ScenarioArgs,
    #[command(flatten)]
    pub schedule: ScheduleArgs,
    /// Comma-separated sample sizes.
    #[arg(long, default_value = "50,100,200")]
    pub sizes: String,
    #[arg(long, default_value_t = 3)]
    pub reps: usize,
    #[arg(long, default_value = "hs")]
    pub method: String,
    /// 1-based coordinate whose trace and autocorrelations are exported for
    /// the first size.
    #[arg(long)]
    pub trace_coord: Option<usize>,
    #[arg(long, default_value_t = 50)]
    pub max_lag: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct EtaArgs {
    #[command(flatten)]
    pub scenario: ScenarioArgs,
    #[command(flatten)]
    pub schedule: ScheduleArgs,
    #[arg(long, default_value = "100,200,500")]
    pub etas: String,
    #[arg(long, default_value_t = 10)]
    pub reps: usize,
    #[arg(long, default_value = "hs")]
    pub method: String,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct GewekeArgs {
    #[arg(long, value_enum, default_value = "hs")]
    pub prior: PriorArg,
    #[arg(long, value_enum, default_value = "none")]
    pub constraint: ConstraintArg,
    #[arg(long, value_enum, default_value = "pg")]
    pub engine: EngineArg,
    #[arg(long, default_value_t = 10)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub order: usize,
    #[arg(long, default_value_t = 50_000)]
    pub draws: usize,
    /// Sweeps between retained draws; defaults to the prior's setting.
    #[arg(long)]
    pub thin: Option<usize>,
    /// One sweep from each exact joint draw instead of a long chain.
    #[arg(long)]
    pub fresh_starts: bool,
    /// Deliberately break a conditional to check the test's power.
    #[arg(long = "break", value_enum)]
    pub sabotage: Option<BreakArg>,
    #[arg(long)]
    pub seed: Option<u64>,
}

fn ci_mode() -> bool {
    std::env::var("CI").is_ok_and(|v| !v.is_empty() && v != "0" && v != "false")
}

fn resolve_seed(seed: Option<u64>) -> Result<u64> {
    match seed {
        Some(s) => Ok(s),
        None if ci_mode() => Err(CliError::Usage("--seed is required when CI is set".into())),
        None => Ok(0),
    }
}

fn scenario_from(args: &ScenarioArgs) -> Result<Scenario> {
    let kind = match args.scenario {
        ScenarioArg::Sqrt => ScenarioKind::Sqrt,
        ScenarioArg::Pc => ScenarioKind::PiecewiseConstant,
        ScenarioArg::Sigmoid => ScenarioKind::PiecewiseSigmoid,
    };
    let letter = format!("{:?}", args.noise).to_ascii_lowercase();
    let noise = Noise::from_letter(letter.chars().next().unwrap_or('b'))
        .ok_or_else(|| CliError::Usage(format!("unknown noise {letter}")))?;
    let reading = match args.sigmoid_reading {
        ReadingArg::Corrected => SigmoidReading::Corrected,
        ReadingArg::Literal => SigmoidReading::Literal,
    };
    Scenario::new(kind, args.n, noise)
        .map(|s| s.with_reading(reading))
        .map_err(|e| CliError::Usage(e.to_string()))
}

fn plan_from(args: &ScheduleArgs) -> Result<FitPlan> {
    Ok(FitPlan {
        schedule: Schedule {
            iterations: args.iters,
            burn_in: args.burnin,
            thin: args.thin,
        },
        eta: args.eta,
        order: args.order,
        seed: resolve_seed(args.seed)?,
        ..FitPlan::default()
    })
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>> {
    s.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| {
            p.trim()
                .parse()
                .map_err(|_| CliError::Usage(format!("bad {what} {p:?}")))
        })
        .collect()
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

/// Parses arguments and runs a subcommand, returning the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(command: Command) -> Result<i32> {
    match command {
        Command::Fit(a) => fit(a).map(|_| 0),
        Command::Simulate(a) => simulate(a).map(|_| 0),
        Command::Bench(a) => bench(a).map(|_| 0),
        Command::Eta(a) => eta(a).map(|_| 0),
        Command::Geweke(a) => geweke(a),
    }
}

/// Keys written to the manifest that a config file may carry but that do not
/// affect the fit.
const INFORMATIONAL_KEYS: [&str; 4] = ["version", "elapsed_seconds", "retained", "n"];

/// Fully resolved `fit` settings.
#[derive(Debug, Clone, PartialEq)]
pub struct FitSettings {
    pub input: PathBuf,
    pub output: PathBuf,
    pub config: FitConfig,
    pub engine: Engine,
    pub level: f64,
    pub save_draws: bool,
    /// Checksum the input must match, when resolved from a manifest.
    pub expected_sha256: Option<String>,
}

fn value<T: std::str::FromStr>(kv: &KeyValues, key: &str) -> Result<Option<T>> {
    kv.get(key)
        .map(|v| {
            v.parse()
                .map_err(|_| CliError::Usage(format!("config key {key} has bad value {v:?}")))
        })
        .transpose()
}

fn enum_value<T: ValueEnum>(kv: &KeyValues, key: &str) -> Result<Option<T>> {
    kv.get(key)
        .map(|v| T::from_str(v, true).map_err(|_| CliError::Usage(format!("config key {key} has bad value {v:?}"))))
        .transpose()
}

fn hyper_keys(h: &mut Hyperparameters) -> [(&'static str, &mut f64); 10] {
    [
        ("a_sigma", &mut h.a_sigma),
        ("b_sigma", &mut h.b_sigma),
        ("a_rho", &mut h.a_rho),
        ("b_rho", &mut h.b_rho),
        ("a_u", &mut h.a_u),
        ("b_u", &mut h.b_u),
        ("a_gamma", &mut h.a_gamma),
        ("b_gamma", &mut h.b_gamma),
        ("a_tau", &mut h.a_tau),
        ("b_tau", &mut h.b_tau),
    ]
}

const FIT_KEYS: [&str; 15] = [
    "input", "output", "order", "prior", "constraint", "side", "engine", "eta", "iters", "burnin",
    "thin", "level", "seed", "save_draws", "input_sha256",
];

pub fn resolve_fit(args: &FitArgs) -> Result<FitSettings> {
    let kv = match &args.config {
        Some(p) => KeyValues::read(p)?,
        None => KeyValues::default(),
    };
    let mut hyper = Hyperparameters::default();
    for key in kv.0.keys() {
        let known = FIT_KEYS.contains(&key.as_str())
            || INFORMATIONAL_KEYS.contains(&key.as_str())
            || hyper_keys(&mut hyper.clone()).iter().any(|(k, _)| k == key);
        if !known {
            return Err(CliError::Usage(format!("unknown config key {key:?}")));
        }
    }
    for (key, slot) in hyper_keys(&mut hyper) {
        if let Some(v) = value::<f64>(&kv, key)? {
            *slot = v;
        }
    }
    let defaults = FitConfig::default();
    let input = args
        .input
        .clone()
        .or_else(|| kv.get("input").map(PathBuf::from))
        .ok_or_else(|| CliError::Usage("--input is required".into()))?;
    let output = args
        .output
        .clone()
        .or_else(|| kv.get("output").map(PathBuf::from))
        .ok_or_else(|| CliError::Usage("--output is required".into()))?;
    let seed = match args.seed.or(value(&kv, "seed")?) {
        Some(s) => s,
        None => resolve_seed(None)?,
    };
    let side = match args.side.or(enum_value(&kv, "side")?) {
        Some(SideArg::Lower) => Side::Lower,
        _ => Side::Upper,
    };
    let config = FitConfig {
        order: args.order.or(value(&kv, "order")?).unwrap_or(defaults.order),
        prior: args.prior.or(enum_value(&kv, "prior")?).map_or(defaults.prior, Into::into),
        constraint: args
            .constraint
            .or(enum_value(&kv, "constraint")?)
            .map_or(defaults.constraint, Into::into),
        eta: args.eta.or(value(&kv, "eta")?).unwrap_or(defaults.eta),
        side,
        schedule: Schedule {
            iterations: args.iters.or(value(&kv, "iters")?).unwrap_or(defaults.schedule.iterations),
            burn_in: args.burnin.or(value(&kv, "burnin")?).unwrap_or(defaults.schedule.burn_in),
            thin: args.thin.or(value(&kv, "thin")?).unwrap_or(defaults.schedule.thin),
        },
        hyper,
        seed,
    };
    config.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(FitSettings {
        input,
        output,
        engine: args.engine.or(enum_value(&kv, "engine")?).map_or(Engine::PolyaGamma, Into::into),
        level: args.level.or(value(&kv, "level")?).unwrap_or(0.95),
        save_draws: args.save_draws || value::<bool>(&kv, "save_draws")?.unwrap_or(false),
        expected_sha256: kv.get("input_sha256").map(str::to_string),
        config,
    })
}

fn constraint_name(c: Constraint) -> &'static str {
    match c {
        Constraint::None => "none",
        Constraint::NearlyIncreasing => "ni-inc",
        Constraint::NearlyDecreasing => "ni-dec",
        Constraint::NearlyConvex => "convex",
        Constraint::NearlyConcave => "concave",
    }
}

/// The manifest records every resolved setting, so passing it back through
/// `--config` with the same input reproduces the outputs.
pub fn manifest(settings: &FitSettings, sha: &str, n: usize, retained: usize, seconds: f64) -> KeyValues {
    let c = &settings.config;
    let mut kv = KeyValues::default();
    kv.insert("version", env!("CARGO_PKG_VERSION"));
    kv.insert("input", settings.input.display());
    kv.insert("input_sha256", sha);
    kv.insert("output", settings.output.display());
    kv.insert("n", n);
    kv.insert("order", c.order);
    kv.insert("prior", c.prior.short_name());
    kv.insert("constraint", constraint_name(c.constraint));
    kv.insert("side", if c.side == Side::Lower { "lower" } else { "upper" });
    kv.insert("engine", engine_name(settings.engine));
    kv.insert("eta", c.eta);
    kv.insert("iters", c.schedule.iterations);
    kv.insert("burnin", c.schedule.burn_in);
    kv.insert("thin", c.schedule.thin);
    kv.insert("level", settings.level);
    kv.insert("seed", c.seed);
    kv.insert("save_draws", settings.save_draws);
    kv.insert("retained", retained);
    kv.insert("elapsed_seconds", seconds);
    let mut h = c.hyper;
    for (k, v) in hyper_keys(&mut h) {
        kv.insert(k, *v);
    }
    kv
}

pub fn fit(args: FitArgs) -> Result<FitSettings> {
    let settings = resolve_fit(&args)?;
    let bytes = fs::read(&settings.input).map_err(|e| CliError::io(&settings.input, e))?;
    let sha = io::sha256_hex(&bytes);
    if let Some(expected) = &settings.expected_sha256 {
        if *expected != sha {
            return Err(CliError::Usage(format!(
                "{} does not match the manifest checksum",
                settings.input.display()
            )));
        }
    }
    let data = io::read_dataset_bytes(&settings.input, &bytes)?;
    let start = Instant::now();
    let draws = timed_chain(&data, &settings.config, settings.engine)?;
    let summary = summarize(&draws, settings.level)?;
    let seconds = start.elapsed().as_secs_f64();
    let dir = io::create_dir(&settings.output)?;
    io::write_summary(&dir.join("summary.csv"), &io::summary_rows(&data, &summary))?;
    if settings.save_draws {
        io::write_draws(&dir.join("draws.csv"), &draws)?;
    }
    manifest(&settings, &sha, data.len(), draws.len(), seconds).write(&dir.join("manifest.txt"))?;
    Ok(settings)
}

pub fn simulate(args: SimulateArgs) -> Result<()> {
    let scenario = scenario_from(&args.scenario)?;
    let plan = plan_from(&args.schedule)?;
    let methods = Method::parse_list(&args.methods)?;
    if methods.is_empty() {
        return Err(CliError::Usage("--methods is empty".into()));
    }
    let table = run_replications(&scenario, &methods, args.reps, &plan)?;
    let dir = io::create_dir(&args.out)?;
    let mut metrics = String::from("method,rmse_mean,rmse_sd,al,cp\n");
    for s in &table.summaries {
        let sd = s.rmse_sd.map(fmt_f64).unwrap_or_default();
        metrics.push_str(&format!(
            "{},{},{sd},{},{}\n",
            s.method,
            fmt_f64(s.rmse_mean),
            fmt_f64(s.al),
            fmt_f64(s.cp)
        ));
        if s.failures > 0 {
            eprintln!("{}: {} of {} replications failed", s.method, s.failures, args.reps);
        }
    }
    write_text(&dir.join("metrics.csv"), &metrics)?;
    let mut reps = String::from("method,rep,rmse,al,cp,feasible,max_violation,error\n");
    for r in &table.records {
        match &r.result {
            Ok((m, b)) => reps.push_str(&format!(
                "{},{},{},{},{},{},{},\n",
                r.method,
                r.rep,
                fmt_f64(m.rmse),
                fmt_f64(m.al),
                fmt_f64(m.cp),
                fmt_f64(b.feasible),
                fmt_f64(b.max_violation)
            )),
            Err(e) => reps.push_str(&format!("{},{},,,,,,\"{}\"\n", r.method, r.rep, e.replace('"', "'"))),
        }
    }
    write_text(&dir.join("replications.csv"), &reps)?;
    print!("{metrics}");
    Ok(())
}

pub fn bench(args: BenchArgs) -> Result<()> {
    let scenario = scenario_from(&args.scenario)?;
    let plan = plan_from(&args.schedule)?;
    let method = Method::parse(&args.method)?;
    let sizes: Vec<usize> = parse_list(&args.sizes, "size")?;
    let rows = bench_samplers(&scenario, &sizes, args.reps, &method, &plan)?;
    let dir = io::create_dir(&args.out)?;
    let mut out = String::from("n,sampler,seconds,mean_ess,reps\n");
    for r in &rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.n,
            engine_name(r.engine),
            fmt_f64(r.seconds),
            fmt_f64(r.mean_ess),
            r.reps
        ));
    }
    write_text(&dir.join("bench.csv"), &out)?;
    print!("{out}");
    if let Some(coord) = args.trace_coord {
        let n = sizes[0];
        if coord == 0 || coord > n {
            return Err(CliError::Usage(format!("--trace-coord must be in 1..={n}")));
        }
        let sc = Scenario { n, ..scenario };
        let (data, _) = btf_core::generate_dataset(&sc, plan.seed);
        let config = FitConfig {
            order: plan.order.unwrap_or(sc.kind.fit_order()),
            prior: method.prior,
            constraint: method.constraint,
            eta: plan.eta,
            schedule: plan.schedule,
            seed: plan.seed,
            ..FitConfig::default()
        };
        let pg = timed_chain(&data, &config, Engine::PolyaGamma)?.coordinate(coord - 1);
        let cw = timed_chain(&data, &config, Engine::CoordinateWise)?.coordinate(coord - 1);
        let mut trace = String::from("draw,pg,cw\n");
        for (i, (a, b)) in pg.iter().zip(&cw).enumerate() {
            trace.push_str(&format!("{},{},{}\n", i + 1, fmt_f64(*a), fmt_f64(*b)));
        }
        write_text(&dir.join("trace.csv"), &trace)?;
        let (apg, acw) = (autocorrelation(&pg, args.max_lag), autocorrelation(&cw, args.max_lag));
        let mut acf = String::from("lag,pg,cw\n");
        for (lag, (a, b)) in apg.iter().zip(&acw).enumerate() {
            acf.push_str(&format!("{lag},{},{}\n", fmt_f64(*a), fmt_f64(*b)));
        }
        write_text(&dir.join("acf.csv"), &acf)?;
    }
    Ok(())
}

pub fn eta(args: EtaArgs) -> Result<()> {
    let scenario = scenario_from(&args.scenario)?;
    let plan = plan_from(&args.schedule)?;
    let method = Method::parse(&args.method)?;
    let etas: Vec<f64> = parse_list(&args.etas, "eta")?;
    let records = eta_sensitivity(&scenario, &etas, args.reps, &method, &plan)?;
    let dir = io::create_dir(&args.out)?;
    let mut out = String::from("eta,rep,rmse\n");
    for r in &records {
        out.push_str(&format!("{},{},{}\n", r.eta, r.rep, fmt_f64(r.rmse)));
    }
    write_text(&dir.join("eta.csv"), &out)?;
    for (eta, median) in median_by_eta(&records, &etas) {
        println!("eta={eta} median_rmse={median:.6}");
    }
    Ok(())
}

pub fn geweke(args: GewekeArgs) -> Result<i32> {
    let prior: PriorKind = args.prior.into();
    let constraint: Constraint = args.constraint.into();
    let base = GewekeConfig::for_model(prior, constraint);
    let config = GewekeConfig {
        n: args.n,
        order: args.order,
        engine: args.engine.into(),
        draws: args.draws,
        thin: args.thin.unwrap_or(base.thin),
        fresh_starts: args.fresh_starts,
        sabotage: match args.sabotage {
            Some(BreakArg::Sigma2) => Sabotage::SkipSigma2,
            None => Sabotage::None,
        },
        seed: resolve_seed(args.seed)?,
        ..base
    };
    let report = geweke_test(&config).map_err(|e| CliError::Usage(e.to_string()))?;
    println!("statistic,ks,p_value");
    for s in &report.statistics {
        println!("{},{:.6},{:.6e}", s.name, s.ks.statistic, s.ks.p_value);
    }
    let failed = report.min_p_value() < GEWEKE_FAIL_P;
    println!(
        "{} (min p = {:.3e}, threshold {GEWEKE_FAIL_P:e})",
        if failed { "FAIL" } else { "PASS" },
        report.min_p_value()
    );
    Ok(i32::from(failed))
}
