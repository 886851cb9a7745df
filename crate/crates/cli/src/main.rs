//! `vblast` command-line front end.
//!
//! Exit status: 0 on success, 2 for configuration errors (including I/O on the
//! output path), 3 for numerical failures.

mod config;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use vblast::detectors::{AssumedOrder, DetectorKind, Feedback};
use vblast::flops::{speedup_report, Regime};
use vblast::report::{
    bench_table, detect_table, factorize_table, ofdm_table, speedup_table, sweep_table, Format,
    Table,
};
use vblast::simkit::{
    assumed_order, complexity_bench, draw_problem, factorize_check, gen_channel_with,
    ofdm_reuse_experiment, ser_sweep, stream_rng, BenchConfig, OfdmReuseConfig, OrderPolicy,
    ReuseMode, Role, SweepConfig,
};
use vblast::{Constellation, ConstellationKind};

use config::{parse_list, ConfigFile};

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Numerical(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) | CliError::Numerical(m) => f.write_str(m),
        }
    }
}

impl From<vblast::Error> for CliError {
    fn from(e: vblast::Error) -> Self {
        if e.is_numerical() {
            CliError::Numerical(e.to_string())
        } else {
            CliError::Config(e.to_string())
        }
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "vblast",
    version,
    about = "Square-root MMSE-OSIC detection, factorization checks and complexity benchmarks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// key = value file; flags override its entries
    #[arg(long)]
    config: Option<PathBuf>,
    /// csv or md
    #[arg(long)]
    format: Option<String>,
    /// Write the report here instead of stdout
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check the bordering inverse Cholesky factor against the conventional one
    Factorize {
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
        /// Build H from a rank-deficient product of this inner dimension
        #[arg(long)]
        rank: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Detect one random instance and print the step-by-step trace
    Detect {
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        snr: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
        /// proposed, previous_givens, previous_householder or oracle
        #[arg(long)]
        detector: Option<String>,
        /// qpsk or 16qam
        #[arg(long)]
        constellation: Option<String>,
        /// identity, random, matched or adversarial
        #[arg(long)]
        order: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Measured against predicted operation counts, with speedups
    Bench {
        /// One size or a comma-separated list
        #[arg(long)]
        m: Option<String>,
        /// Defaults to M
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        trials: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        snr: Option<f64>,
        /// all, or a list of random, matched, worst
        #[arg(long)]
        regime: Option<String>,
        /// Relative deviation that gets flagged
        #[arg(long)]
        bound: Option<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// Symbol error rate against SNR for several detectors
    Sweep {
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        n: Option<usize>,
        /// Comma-separated SNR points in dB; inf means noiseless
        #[arg(long)]
        snr: Option<String>,
        #[arg(long)]
        trials: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
        /// all, or a comma-separated list
        #[arg(long)]
        detectors: Option<String>,
        #[arg(long)]
        constellation: Option<String>,
        #[arg(long)]
        order: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Reuse of detection orders across correlated subcarriers
    Ofdm {
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        snr: Option<f64>,
        #[arg(long)]
        trials: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        subcarriers: Option<usize>,
        /// exact or independent
        #[arg(long)]
        reuse: Option<String>,
        /// Correlation between adjacent subcarrier channels
        #[arg(long)]
        rho: Option<f64>,
        #[arg(long)]
        constellation: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Predicted speedups from the leading-order operation counts
    Speedup {
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        n: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
}

const COMMON_KEYS: [&str; 2] = ["format", "output"];

struct Context {
    file: ConfigFile,
    format: Format,
    output: Option<PathBuf>,
}

impl Context {
    fn new(common: &Common, keys: &[&str]) -> Result<Self, CliError> {
        let file = match &common.config {
            Some(p) => ConfigFile::load(p)?,
            None => ConfigFile::default(),
        };
        let allowed: Vec<&str> = keys.iter().chain(COMMON_KEYS.iter()).copied().collect();
        file.check_keys(&allowed)?;
        let format = Format::parse(&file.resolve_str(common.format.clone(), "format", "csv"))?;
        let output = common
            .output
            .clone()
            .or_else(|| file.raw("output").map(PathBuf::from));
        Ok(Self {
            file,
            format,
            output,
        })
    }

    fn emit(&self, table: &Table) -> Result<(), CliError> {
        let text = table.render(self.format)?;
        match &self.output {
            Some(path) => write_file(path, &text),
            None => {
                let mut out = std::io::stdout().lock();
                out.write_all(text.as_bytes())
                    .and_then(|_| out.flush())
                    .map_err(|e| CliError::Config(format!("cannot write to stdout: {e}")))
            }
        }
    }
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text)
        .map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display())))
}

fn parse_constellation(s: &str) -> Result<ConstellationKind, CliError> {
    Ok(ConstellationKind::parse(s)?)
}

fn parse_regimes(s: &str) -> Result<Vec<Regime>, CliError> {
    if s == "all" {
        return Ok(Regime::ALL.to_vec());
    }
    s.split(',')
        .map(str::trim)
        .map(|r| Regime::parse(r).ok_or_else(|| CliError::Config(format!("unknown regime '{r}'"))))
        .collect()
}

fn parse_detectors(s: &str) -> Result<Vec<DetectorKind>, CliError> {
    if s == "all" {
        return Ok(DetectorKind::ALL.to_vec());
    }
    s.split(',')
        .map(str::trim)
        .map(|d| DetectorKind::parse(d).map_err(CliError::from))
        .collect()
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Factorize {
            m,
            n,
            alpha,
            seed,
            rank,
            common,
        } => {
            let ctx = Context::new(&common, &["m", "n", "alpha", "seed", "rank"])?;
            let m = ctx.file.resolve(m, "m", 4)?;
            let n = ctx.file.resolve(n, "n", m)?;
            let alpha = ctx.file.resolve(alpha, "alpha", 0.1)?;
            let seed = ctx.file.resolve(seed, "seed", 1)?;
            let rank = match rank {
                Some(r) => Some(r),
                None => ctx
                    .file
                    .raw("rank")
                    .map(|_| ctx.file.resolve(None, "rank", 0))
                    .transpose()?,
            };
            let rep = factorize_check(m, n, alpha, seed, rank)?;
            ctx.emit(&factorize_table(&rep))
        }
        Command::Detect {
            m,
            n,
            snr,
            seed,
            detector,
            constellation,
            order,
            common,
        } => {
            let ctx = Context::new(
                &common,
                &[
                    "m",
                    "n",
                    "snr",
                    "seed",
                    "detector",
                    "constellation",
                    "order",
                ],
            )?;
            let m = ctx.file.resolve(m, "m", 4)?;
            let n = ctx.file.resolve(n, "n", m)?;
            let snr = ctx.file.resolve(snr, "snr", 10.0)?;
            let seed = ctx.file.resolve(seed, "seed", 1)?;
            let kind =
                DetectorKind::parse(&ctx.file.resolve_str(detector, "detector", "proposed"))?;
            let cons = Constellation::new(parse_constellation(&ctx.file.resolve_str(
                constellation,
                "constellation",
                "qpsk",
            ))?);
            let policy = OrderPolicy::parse(&ctx.file.resolve_str(order, "order", "identity"))?;
            let sweep = SweepConfig {
                m,
                n,
                snr_db: vec![snr],
                trials: 1,
                seed,
                detectors: vec![kind],
                ..SweepConfig::default()
            };
            sweep.validate()?;
            let h = gen_channel_with(&mut stream_rng(seed, 0, Role::Channel, 0), m, n);
            let (problem, sent) = draw_problem(seed, 0, 0, h, &cons, snr)?;
            let assumed = match kind {
                DetectorKind::Proposed => {
                    assumed_order(policy, &problem, &mut stream_rng(seed, 0, Role::Order, 0))?
                }
                _ => AssumedOrder::identity(m),
            };
            let result = kind.run(&problem, &assumed, &Feedback::Sliced)?;
            let sent: Vec<_> = sent.iter().map(|&s| cons.point(s)).collect();
            ctx.emit(&detect_table(kind, &result, Some(&sent)))
        }
        Command::Bench {
            m,
            n,
            trials,
            seed,
            snr,
            regime,
            bound,
            common,
        } => {
            let ctx = Context::new(
                &common,
                &["m", "n", "trials", "seed", "snr", "regime", "bound"],
            )?;
            let sizes: Vec<usize> = parse_list(&ctx.file.resolve_str(m, "m", "16"), "m")?;
            if sizes.is_empty() {
                return Err(CliError::Config("m: at least one size is required".into()));
            }
            let n: Option<usize> = match n {
                Some(v) => Some(v),
                None => ctx
                    .file
                    .raw("n")
                    .map(|_| ctx.file.resolve(None, "n", 0))
                    .transpose()?,
            };
            let defaults = BenchConfig::default();
            let trials = ctx.file.resolve(trials, "trials", defaults.trials)?;
            let seed = ctx.file.resolve(seed, "seed", defaults.seed)?;
            let snr = ctx.file.resolve(snr, "snr", defaults.snr_db)?;
            let regimes = parse_regimes(&ctx.file.resolve_str(regime, "regime", "all"))?;
            let bound = ctx.file.resolve(bound, "bound", defaults.bound)?;
            let mut table: Option<Table> = None;
            for m in sizes {
                let cfg = BenchConfig {
                    m,
                    n: n.unwrap_or(m),
                    trials,
                    seed,
                    snr_db: snr,
                    regimes: regimes.clone(),
                    bound,
                };
                let t = bench_table(&complexity_bench(&cfg)?);
                match table.as_mut() {
                    Some(all) => all.rows.extend(t.rows),
                    None => table = Some(t),
                }
            }
            ctx.emit(&table.expect("at least one size"))
        }
        Command::Sweep {
            m,
            n,
            snr,
            trials,
            seed,
            detectors,
            constellation,
            order,
            common,
        } => {
            let ctx = Context::new(
                &common,
                &[
                    "m",
                    "n",
                    "snr",
                    "trials",
                    "seed",
                    "detectors",
                    "constellation",
                    "order",
                ],
            )?;
            let defaults = SweepConfig::default();
            let m = ctx.file.resolve(m, "m", defaults.m)?;
            let cfg = SweepConfig {
                m,
                n: ctx.file.resolve(n, "n", m)?,
                constellation: parse_constellation(&ctx.file.resolve_str(
                    constellation,
                    "constellation",
                    "qpsk",
                ))?,
                snr_db: parse_list(&ctx.file.resolve_str(snr, "snr", "0,10,20,30"), "snr")?,
                trials: ctx.file.resolve(trials, "trials", defaults.trials)?,
                seed: ctx.file.resolve(seed, "seed", defaults.seed)?,
                detectors: parse_detectors(&ctx.file.resolve_str(detectors, "detectors", "all"))?,
                order: OrderPolicy::parse(&ctx.file.resolve_str(order, "order", "identity"))?,
            };
            ctx.emit(&sweep_table(&ser_sweep(&cfg)?))
        }
        Command::Ofdm {
            m,
            n,
            snr,
            trials,
            seed,
            subcarriers,
            reuse,
            rho,
            constellation,
            common,
        } => {
            let ctx = Context::new(
                &common,
                &[
                    "m",
                    "n",
                    "snr",
                    "trials",
                    "seed",
                    "subcarriers",
                    "reuse",
                    "rho",
                    "constellation",
                ],
            )?;
            let m = ctx.file.resolve(m, "m", 4)?;
            let sweep = SweepConfig {
                m,
                n: ctx.file.resolve(n, "n", m)?,
                constellation: parse_constellation(&ctx.file.resolve_str(
                    constellation,
                    "constellation",
                    "qpsk",
                ))?,
                snr_db: vec![ctx.file.resolve(snr, "snr", 15.0)?],
                trials: ctx.file.resolve(trials, "trials", 20)?,
                seed: ctx.file.resolve(seed, "seed", 1)?,
                detectors: vec![DetectorKind::Proposed],
                order: OrderPolicy::Identity,
            };
            let cfg = OfdmReuseConfig {
                subcarriers: ctx.file.resolve(subcarriers, "subcarriers", 64)?,
                mode: ReuseMode::parse(&ctx.file.resolve_str(reuse, "reuse", "exact"))?,
                rho: ctx.file.resolve(rho, "rho", 0.99)?,
            };
            ctx.emit(&ofdm_table(&ofdm_reuse_experiment(&cfg, &sweep)?))
        }
        Command::Speedup { m, n, common } => {
            let ctx = Context::new(&common, &["m", "n"])?;
            let m = ctx.file.resolve(m, "m", 16)?;
            let n = ctx.file.resolve(n, "n", m)?;
            if m == 0 || n < m {
                return Err(CliError::Config(format!(
                    "need N >= M >= 1, got M = {m}, N = {n}"
                )));
            }
            ctx.emit(&speedup_table(&speedup_report(m, n)?))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("vblast: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
