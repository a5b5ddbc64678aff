//! Command-line front end.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use qexpander_core::cayley::walk_counts;
use qexpander_core::channel::Channel;
use qexpander_core::edge::{converse_check, random_projector, tanner_chain_check};
use qexpander_core::matrix::SeededRng;
use qexpander_core::ratfn::RationalInN;
use qexpander_core::sd::{
    evaluate_exact, evaluate_series, monte_carlo_expectation, parse_trace_expr, SeriesOptions,
};
use qexpander_core::spectrum::{
    eigen_spectrum, estimate_lambda2_from_moments, frobenius_moments, moment_trace,
};
use rand::RngCore;
use serde::Serialize;

use crate::collapse::emit_collapse;
use crate::config::{Construction, ExperimentConfig};
use crate::error::{CliError, Result};
use crate::formats::{load_channel, save_channel, write_cayley_csv, write_spectrum_csv};
use crate::sweep::{build_trial_channel, run_sweep, write_sweep_csv};

#[derive(Debug, Parser)]
#[command(name = "qexpander", version, about = "Quantum expanders from random unitaries")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Master seed (overrides `master_seed` from the config file).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output file, or output directory for `sweep` and `collapse`.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// `key=value` experiment configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ChannelArgs {
    /// Matrix dimension N.
    #[arg(long)]
    pub n: Option<usize>,
    /// Number of Kraus factors D.
    #[arg(long)]
    pub d: Option<usize>,
    /// hermitian, nonhermitian or weighted.
    #[arg(long)]
    pub construction: Option<Construction>,
    /// Load the channel from a JSON document instead of sampling one.
    #[arg(long, conflicts_with_all = ["n", "d", "construction"])]
    pub channel: Option<PathBuf>,
    /// Also write the channel as JSON.
    #[arg(long)]
    pub save_channel: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Superoperator eigenvalues of one channel as CSV.
    Spectrum(ChannelArgs),
    /// Seeded sweep over N and trials, written to <out>/sweep.csv.
    Sweep(SweepArgs),
    /// Sorted spectra for several N: <out>/collapse.csv and collapse.svg.
    Collapse(SweepArgs),
    /// Trace and Frobenius moments of one channel.
    Moments {
        #[command(flatten)]
        channel: ChannelArgs,
        /// Moment orders.
        #[arg(long, value_delimiter = ',', default_value = "2,4,6,8,10")]
        m: Vec<usize>,
    },
    /// Walk counts N(l, m) on the Cayley tree as CSV.
    Cayley {
        #[arg(long, default_value_t = 4)]
        d: usize,
        #[arg(long, default_value_t = 20)]
        m_max: usize,
    },
    /// Haar averages of products of traces.
    Sd {
        #[command(subcommand)]
        command: SdCommand,
    },
    /// Edge-expansion checks on one Hermitian channel, as JSON.
    Edge {
        #[command(flatten)]
        channel: ChannelArgs,
        /// Number of random projectors for the converse bound.
        #[arg(long, default_value_t = 100)]
        projectors: usize,
    },
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, value_delimiter = ',')]
    pub n_list: Option<Vec<usize>>,
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub construction: Option<Construction>,
    #[arg(long)]
    pub m_max: Option<usize>,
    /// Record wall time per run (`false` makes the CSV reproducible byte for byte).
    #[arg(long)]
    pub timing: Option<bool>,
}

#[derive(Debug, Subcommand)]
pub enum SdCommand {
    /// Evaluate an expression such as "tr(U1 U1) tr(U1' U1')".
    Eval {
        expr: String,
        /// Dimension N at which to evaluate.
        #[arg(long, default_value_t = 16)]
        n: u64,
        /// Exact rational function of N (the default).
        #[arg(long, conflicts_with_all = ["series", "mc"])]
        exact: bool,
        /// Level-wise series.
        #[arg(long, conflicts_with = "mc")]
        series: bool,
        #[arg(long, default_value_t = 40, requires = "series")]
        levels: usize,
        #[arg(long, default_value_t = 1e-12, requires = "series")]
        tol: f64,
        /// Expand the series even when m_total > N.
        #[arg(long, requires = "series")]
        allow_divergent: bool,
        /// Most distinct live terms allowed in one level of the series.
        #[arg(long, default_value_t = 10_000_000, requires = "series")]
        node_budget: usize,
        /// Monte-Carlo estimate.
        #[arg(long)]
        mc: bool,
        #[arg(long, default_value_t = 10_000, requires = "mc")]
        samples: usize,
    },
}

fn load_config(common: &Common) -> Result<ExperimentConfig> {
    let mut cfg = match &common.config {
        Some(p) => ExperimentConfig::from_file(p)?,
        None => ExperimentConfig::default(),
    };
    if let Some(s) = common.seed {
        cfg.master_seed = s;
    }
    if let Some(o) = &common.out {
        cfg.output_dir = o.clone();
    }
    Ok(cfg)
}

fn apply_sweep_args(cfg: &mut ExperimentConfig, a: &SweepArgs) {
    if let Some(v) = &a.n_list {
        cfg.n_list = v.clone();
    }
    if let Some(v) = a.d {
        cfg.d = v;
    }
    if let Some(v) = a.trials {
        cfg.trials = v;
    }
    if let Some(v) = a.construction {
        cfg.construction = v;
    }
    if let Some(v) = a.m_max {
        cfg.m_max = v;
    }
    if let Some(v) = a.timing {
        cfg.timing = v;
    }
}

/// The channel named by the flags: loaded from JSON, or sampled with the
/// seed given directly (so `--seed` equal to a sweep row's seed rebuilds
/// that row's channel).
fn resolve_channel(common: &Common, args: &ChannelArgs) -> Result<Channel> {
    let channel = match &args.channel {
        Some(p) => load_channel(p)?,
        None => {
            let cfg = load_config(common)?;
            let n = args.n.unwrap_or(cfg.n_list[0]);
            let d = args.d.unwrap_or(cfg.d);
            let construction = args.construction.unwrap_or(cfg.construction);
            build_trial_channel(construction, n, d, cfg.master_seed)?
        }
    };
    if let Some(p) = &args.save_channel {
        save_channel(&channel, p)?;
    }
    Ok(channel)
}

fn with_output(common: &Common, stdout: &mut dyn Write, f: impl FnOnce(&mut dyn Write) -> std::io::Result<()>) -> Result<()> {
    match &common.out {
        Some(p) => {
            let mut file = std::io::BufWriter::new(std::fs::File::create(p).map_err(|e| CliError::io(p, e))?);
            f(&mut file).and_then(|_| file.flush()).map_err(|e| CliError::io(p, e))
        }
        None => f(stdout).map_err(|e| CliError::io("<stdout>", e)),
    }
}

fn io_out(e: std::io::Error) -> CliError {
    CliError::io("<stdout>", e)
}

#[derive(Serialize)]
struct ChainJson {
    lambda2: f64,
    lhs: f64,
    rhs: f64,
    holds: bool,
    trace_residual: f64,
    squared: bool,
}

#[derive(Serialize)]
struct EdgeJson {
    lambda2: f64,
    min_slack: f64,
    projectors: usize,
    chain: ChainJson,
}

/// Runs one parsed command; reports go to `stdout` unless `--out` is set.
pub fn run(cli: &Cli, stdout: &mut dyn Write) -> Result<()> {
    let common = &cli.common;
    match &cli.command {
        Command::Spectrum(args) => {
            let channel = resolve_channel(common, args)?;
            let s = eigen_spectrum(&channel)?;
            with_output(common, stdout, |w| write_spectrum_csv(&s, w))?;
            eprintln!("lambda2 = {}", s.lambda2);
        }
        Command::Sweep(args) => {
            let mut cfg = load_config(common)?;
            apply_sweep_args(&mut cfg, args);
            let outcomes = run_sweep(&cfg)?;
            std::fs::create_dir_all(&cfg.output_dir).map_err(|e| CliError::io(&cfg.output_dir, e))?;
            let path = cfg.output_dir.join("sweep.csv");
            let mut file = std::fs::File::create(&path).map_err(|e| CliError::io(&path, e))?;
            write_sweep_csv(&outcomes, &mut file).map_err(|e| CliError::io(&path, e))?;
            for o in &outcomes {
                if let Err(f) = &o.result {
                    eprintln!("N={} seed={}: {}", f.n, f.seed, f.error);
                }
            }
            writeln!(stdout, "{}", path.display()).map_err(io_out)?;
        }
        Command::Collapse(args) => {
            let mut cfg = load_config(common)?;
            apply_sweep_args(&mut cfg, args);
            cfg.trials = 1;
            if args.construction.is_none() && common.config.is_none() {
                cfg.construction = Construction::Hermitian;
            }
            let outcomes = run_sweep(&cfg)?;
            let mut spectra = Vec::new();
            for o in outcomes {
                match (o.result, o.spectrum) {
                    (Ok(_), Some(s)) => spectra.push(s),
                    (Err(f), _) => return Err(f.error.into()),
                    _ => {}
                }
            }
            let summary = emit_collapse(&spectra, &cfg.output_dir)?;
            writeln!(stdout, "{}\n{}", summary.csv.display(), summary.svg.display()).map_err(io_out)?;
            for (a, b, d) in summary.distances {
                writeln!(stdout, "quantile distance N={a} vs N={b}: {d:.6}").map_err(io_out)?;
            }
        }
        Command::Moments { channel, m } => {
            let c = resolve_channel(common, channel)?;
            let n2 = (c.dim() * c.dim()) as f64;
            let floor_d = c.kraus_count() as f64;
            let m_max = m.iter().copied().max().unwrap_or(1).max(1);
            let frob = frobenius_moments(&c, m_max)?;
            let mut rows = Vec::new();
            for &k in m {
                if k == 0 {
                    return Err(qexpander_core::Error::InvalidParameter("moment order 0".into()).into());
                }
                let (trace, est) = if c.is_hermitian() && k % 2 == 0 {
                    let t = moment_trace(&c, k)?;
                    let e = estimate_lambda2_from_moments(&c, k).map(|v| v.to_string()).unwrap_or_default();
                    (t.to_string(), e)
                } else {
                    (String::new(), String::new())
                };
                rows.push(format!("{k},{trace},{est},{},{}", frob[k - 1], n2 * floor_d.powi(-(k as i32))));
            }
            with_output(common, stdout, |w| {
                writeln!(w, "m,moment_trace,lambda2_estimate,frobenius_moment,frobenius_floor")?;
                rows.iter().try_for_each(|r| writeln!(w, "{r}"))
            })?;
        }
        Command::Cayley { d, m_max } => {
            let t = walk_counts(*d, *m_max)?;
            with_output(common, stdout, |w| write_cayley_csv(&t, w))?;
        }
        Command::Sd { command: SdCommand::Eval { expr, n, series, levels, tol, allow_divergent, node_budget, mc, samples, .. } } => {
            let parsed = parse_trace_expr(expr)?;
            let k = parsed.identity_traces;
            let mult = parsed.multiplier(*n);
            let mut text = String::new();
            if *series {
                let opts = SeriesOptions { n_max: *levels, tol: *tol, node_budget: *node_budget, allow_divergent: *allow_divergent };
                let r = evaluate_series(&parsed.query, *n, opts)?;
                text += &format!("value = {}\n", r.partial_total * mult);
                text += &format!("truncation_bound = {}\n", r.truncation_bound * mult);
                text += &format!("levels = {}\n", r.levels_computed);
                for (i, (s, v)) in r.level_sums.iter().zip(&r.level_values).enumerate() {
                    text += &format!("level {} = {} = {}\n", i + 1, s.to_canonical_string(), v);
                }
            } else if *mc {
                let seed = common.seed.unwrap_or(0);
                let e = monte_carlo_expectation(&parsed.query, *n as usize, *samples, &mut SeededRng::new(seed, 0))?;
                text += &format!("value = {}\nstderr = {}\n", e.estimate * mult, e.stderr * mult);
                text += &format!("imag = {} +- {}\n", e.imag_mean * mult, e.imag_stderr * mult);
            } else {
                let exact = evaluate_exact(&parsed.query)?;
                let exact = &exact * &RationalInN::monomial(1, k as i32);
                text += &format!("value = {}\nexact = {}\n", exact.eval_f64(*n), exact.to_canonical_string());
            }
            with_output(common, stdout, |w| w.write_all(text.as_bytes()))?;
        }
        Command::Edge { channel, projectors } => {
            let c = resolve_channel(common, channel)?;
            if !c.is_hermitian() {
                return Err(qexpander_core::Error::Precondition("edge checks need a hermitian channel".into()).into());
            }
            let s = eigen_spectrum(&c)?;
            let mut rng = SeededRng::new(common.seed.unwrap_or(0), 1);
            let n = c.dim();
            if n < 2 {
                return Err(qexpander_core::Error::InvalidDimension(n).into());
            }
            let mut min_slack = f64::INFINITY;
            for _ in 0..*projectors {
                let l = 1 + (rng.next_u64() % (n as u64 / 2)) as usize;
                let p = random_projector(n, l, &mut rng)?;
                min_slack = min_slack.min(converse_check(&c, &p, s.lambda2)?.slack);
            }
            let squared = s.top_non_unit().is_some_and(|t| t <= 0.0);
            let chain = if squared { tanner_chain_check(&c.square()?)? } else { tanner_chain_check(&c)? };
            let report = EdgeJson {
                lambda2: s.lambda2,
                min_slack,
                projectors: *projectors,
                chain: ChainJson {
                    lambda2: chain.lambda2,
                    lhs: chain.lhs,
                    rhs: chain.rhs,
                    holds: chain.holds,
                    trace_residual: chain.trace_residual,
                    squared,
                },
            };
            let text = serde_json::to_string_pretty(&report).expect("report serializes");
            with_output(common, stdout, |w| writeln!(w, "{text}"))?;
        }
    }
    Ok(())
}
