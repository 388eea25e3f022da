//! `stabvote`: influence, noise stability, adversarial robustness and
//! electoral-college analysis of voting methods.

mod names;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use stabvote_core::electoral::{self, EcComparison, EcScenario};
use stabvote_core::geometry::{self, Search, SubsetMask};
use stabvote_core::multi::{self, Engine, MultiFunction, RankedProfile, TieRule};
use stabvote_core::stability::{self, CorruptionModel, McConfig, StabilityEstimate};
use stabvote_core::{power, BiasedMeasure};

use names::{Loaded, NAME_HELP};

#[derive(Parser)]
#[command(name = "stabvote", version, about, long_about = None)]
struct Cli {
    /// Worker threads; results do not depend on this.
    #[arg(long, global = true, env = "STABVOTE_THREADS")]
    threads: Option<usize>,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Pivotal counts, influences and Banzhaf indices.
    #[command(after_help = NAME_HELP)]
    Power(PowerArgs),
    /// Noise stability S_rho = E f(X) f(Y) under independent vote corruption.
    #[command(after_help = NAME_HELP)]
    Stability(StabilityArgs),
    /// Agreement probability P[f(X) = f(Y)] of k-candidate plurality.
    StabilityK(StabilityKArgs),
    /// Configurations an adversary can flip by changing at most k votes.
    #[command(after_help = NAME_HELP, args_conflicts_with_subcommands = true)]
    Adversary(AdversaryCmd),
    /// Pairwise-majority tournament of ranked ballots.
    #[command(after_help = "\
The profile is a CSV with one ballot per row, candidates most preferred
first and no header. Lines starting with # are ignored.")]
    Condorcet(CondorcetArgs),
    /// Electoral college versus national majority under vote corruption.
    #[command(after_help = "\
The states file is a CSV with header name,voters,electors. Even voter counts
are rounded up to odd. A synthetic 2010-census-shaped example ships in
crates/core/data/census2010_synthetic.csv.")]
    Ec(EcArgs),
    /// Load or save methods.
    #[command(subcommand)]
    Method(MethodCmd),
}

#[derive(Args)]
struct MethodArgs {
    /// Method name, spec JSON or truth-table file.
    #[arg(long)]
    method: String,
    /// Number of voters, for methods that do not fix it.
    #[arg(long)]
    n: Option<usize>,
}

#[derive(Args)]
struct PowerArgs {
    #[command(flatten)]
    method: MethodArgs,
    /// Probability of a +1 vote, as a decimal or a fraction a/b.
    #[arg(long, default_value = "1/2")]
    p: String,
}

#[derive(Args)]
struct EngineArgs {
    /// Exact computation (the default).
    #[arg(long, conflicts_with = "mc")]
    exact: bool,
    /// Monte Carlo with this many samples.
    #[arg(long, value_parser = parse_count)]
    mc: Option<u64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct StabilityArgs {
    #[command(flatten)]
    method: MethodArgs,
    /// Correlation(s), comma separated. Several values give a sweep.
    #[arg(long, value_delimiter = ',', required = true)]
    rho: Vec<f64>,
    #[arg(long, default_value = "1/2")]
    p: String,
    #[command(flatten)]
    engine: EngineArgs,
}

#[derive(Args)]
struct StabilityKArgs {
    /// Number of candidates.
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    n: usize,
    /// Alternative to --k: `plurality:<k>`.
    #[arg(long, conflicts_with = "k")]
    method: Option<String>,
    #[arg(long, value_delimiter = ',', required = true)]
    rho: Vec<f64>,
    /// Plurality tie rule.
    #[arg(long, value_enum, default_value_t = Tie::Lowest)]
    tie: Tie,
    #[arg(long, default_value_t = 0)]
    tie_seed: u64,
    #[command(flatten)]
    engine: EngineArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum Tie {
    Lowest,
    Random,
}

#[derive(Args)]
struct AdversaryCmd {
    #[command(subcommand)]
    action: Option<AdversaryAction>,
    /// Method name, spec JSON or truth-table file.
    #[arg(long, requires = "k")]
    method: Option<String>,
    /// Number of voters, for methods that do not fix it.
    #[arg(long)]
    n: Option<usize>,
    /// Adversary budget: votes that may be changed.
    #[arg(long, requires = "method")]
    k: Option<usize>,
}

#[derive(Subcommand)]
enum AdversaryAction {
    /// Check that a threshold method is least vulnerable among methods with
    /// the same balance. Exits 2 if a competitor beats it.
    Verify(VerifyArgs),
    /// Random audit of the vertex-isoperimetric inequality. Exits 2 on any
    /// failure.
    Harper(HarperArgs),
    /// Distance-k neighbourhood of a subset file (truth-table format).
    Neighborhood(NeighborhoodArgs),
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: usize,
    /// Threshold t of Maj_{n,t}; 0 is majority.
    #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
    t: i64,
    /// Allow odd thresholds, for which no optimality is claimed.
    #[arg(long)]
    allow_odd_t: bool,
    /// Sample this many competitors instead of enumerating all. Defaults to
    /// exhaustive search for n <= 4 and 100000 samples above.
    #[arg(long, value_parser = parse_count)]
    samples: Option<u64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct HarperArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, value_parser = parse_count, default_value = "1000")]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct NeighborhoodArgs {
    #[arg(long)]
    set: PathBuf,
    #[arg(long)]
    k: usize,
}

#[derive(Args)]
struct CondorcetArgs {
    #[arg(long)]
    profile: PathBuf,
}

#[derive(Args)]
struct EcArgs {
    /// CSV with header name,voters,electors.
    #[arg(long, required_unless_present = "equal")]
    states: Option<PathBuf>,
    /// Equal states instead of a file: `<m>:<voters>[:<electors>]`.
    #[arg(long, conflicts_with = "states")]
    equal: Option<String>,
    /// Multiply every state's voter count (kept odd).
    #[arg(long, default_value_t = 1)]
    scale: u64,
    /// Per-vote corruption probability(ies). Several values give a sweep.
    #[arg(long, value_delimiter = ',', required = true)]
    epsilon: Vec<f64>,
    #[arg(long, value_parser = parse_count, default_value = "1000000")]
    samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum MethodCmd {
    /// Describe a method file or name.
    #[command(after_help = NAME_HELP)]
    Load(MethodArgs),
    /// Write a method as spec JSON (structured methods) or truth table.
    #[command(after_help = NAME_HELP)]
    Save {
        #[command(flatten)]
        method: MethodArgs,
        /// Write the truth table even for structured methods.
        #[arg(long)]
        table: bool,
        path: PathBuf,
    },
}

const DEFAULT_VERIFY_SAMPLES: u64 = 100_000;

/// Accepts integers and integral floats such as `1e6`.
fn parse_count(s: &str) -> std::result::Result<u64, String> {
    if let Ok(v) = s.parse::<u64>() {
        return Ok(v);
    }
    match s.parse::<f64>() {
        Ok(v) if v >= 0.0 && v.fract() == 0.0 && v <= u64::MAX as f64 => Ok(v as u64),
        _ => Err(format!("expected a non-negative integer, got {s:?}")),
    }
}

/// An analysis result and whether it violates an invariant.
struct Output {
    text: String,
    invariant_failed: bool,
}

impl Output {
    fn ok(text: String) -> Self {
        Output {
            text,
            invariant_failed: false,
        }
    }
}

fn json<T: Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

fn json_only(format: Format, what: &str) -> Result<()> {
    if format == Format::Csv {
        bail!("{what} has no CSV output");
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .format_timestamp(None)
        .init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run_with_threads(&cli) {
        Ok(out) => {
            if let Err(e) = emit(&cli, &out.text) {
                eprintln!("error: {e:#}");
                return ExitCode::from(1);
            }
            if out.invariant_failed {
                eprintln!("error: invariant check failed");
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn emit(cli: &Cli, text: &str) -> Result<()> {
    match &cli.out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            Ok(stdout.flush()?)
        }
    }
}

#[cfg(feature = "parallel")]
fn run_with_threads(cli: &Cli) -> Result<Output> {
    match cli.threads {
        Some(0) => bail!("--threads must be at least 1"),
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .context("building thread pool")?
            .install(|| run(cli)),
        None => run(cli),
    }
}

#[cfg(not(feature = "parallel"))]
fn run_with_threads(cli: &Cli) -> Result<Output> {
    if cli.threads.is_some_and(|t| t > 1) {
        log::warn!("built without the `parallel` feature; --threads ignored");
    }
    run(cli)
}

fn run(cli: &Cli) -> Result<Output> {
    match &cli.command {
        Command::Power(a) => power_cmd(a, cli.format),
        Command::Stability(a) => stability_cmd(a, cli.format),
        Command::StabilityK(a) => stability_k_cmd(a, cli.format),
        Command::Adversary(a) => adversary_cmd(a, cli.format),
        Command::Condorcet(a) => {
            json_only(cli.format, "condorcet")?;
            let profile = RankedProfile::read_csv(&a.profile)
                .with_context(|| format!("reading {}", a.profile.display()))?;
            Ok(Output::ok(json(&multi::condorcet_analysis(&profile))?))
        }
        Command::Ec(a) => ec_cmd(a, cli.format),
        Command::Method(m) => method_cmd(m, cli.format),
    }
}

fn power_cmd(a: &PowerArgs, format: Format) -> Result<Output> {
    let measure = BiasedMeasure::parse(&a.p)?;
    let report = match names::load(&a.method.method, a.method.n)? {
        Loaded::Method(m) => power::method_report(&m, &measure)?,
        Loaded::Table(f) => power::pivotal_report(&f, &measure),
    };
    let text = match format {
        Format::Json => json(&report)?,
        Format::Csv => {
            let mut s = String::from("voter,pivotal,influence,banzhaf\n");
            for i in 0..report.n {
                let banzhaf = report
                    .banzhaf
                    .as_ref()
                    .map(|b| b[i].value.to_string())
                    .unwrap_or_default();
                s += &format!(
                    "{},{},{},{}\n",
                    i + 1,
                    report.pivotal[i],
                    report.influence[i].value,
                    banzhaf
                );
            }
            s
        }
    };
    Ok(Output::ok(text))
}

#[derive(Serialize)]
struct StabilityRow {
    rho: f64,
    #[serde(flatten)]
    estimate: StabilityEstimate,
    /// Probability that corruption changes the outcome, (1 - S) / 2.
    change_probability: f64,
}

fn rows_output(rows: &[StabilityRow], format: Format) -> Result<String> {
    match format {
        Format::Csv => {
            let mut s = String::from("rho,value,stderr\n");
            for r in rows {
                s += &format!("{},{},{}\n", r.rho, r.estimate.value, r.estimate.stderr);
            }
            Ok(s)
        }
        Format::Json if rows.len() == 1 => json(&rows[0]),
        Format::Json => json(&rows),
    }
}

fn stability_cmd(a: &StabilityArgs, format: Format) -> Result<Output> {
    let measure = BiasedMeasure::parse(&a.p)?;
    let loaded = names::load(&a.method.method, a.method.n)?;
    let dense = match a.engine.mc {
        None => Some(loaded.to_dense()?),
        Some(_) => None,
    };
    let mut rows = Vec::with_capacity(a.rho.len());
    for &rho in &a.rho {
        let model = CorruptionModel::new(rho, measure.clone())?;
        let estimate = match (a.engine.mc, &dense, &loaded) {
            (None, Some(f), _) => stability::stability_exact(f, &model)?,
            (Some(samples), _, Loaded::Method(m)) => {
                stability::stability_mc(m, &model, &McConfig::new(samples, a.engine.seed))?
            }
            (Some(samples), _, Loaded::Table(f)) => {
                stability::stability_mc_table(f, &model, &McConfig::new(samples, a.engine.seed))?
            }
            _ => unreachable!(),
        };
        rows.push(StabilityRow {
            rho,
            change_probability: stability::outcome_change_prob(estimate.value.clamp(-1.0, 1.0))?,
            estimate,
        });
    }
    Ok(Output::ok(rows_output(&rows, format)?))
}

#[derive(Serialize)]
struct StabilityKRow {
    k: usize,
    n: usize,
    rho: f64,
    tie_rule: TieRule,
    /// P[f(X) = f(Y)].
    agreement: f64,
    stderr: f64,
    samples: u64,
    seed: Option<u64>,
    exact: bool,
}

fn stability_k_cmd(a: &StabilityKArgs, format: Format) -> Result<Output> {
    let k = match (&a.method, a.k) {
        (Some(name), _) => names::plurality_k(name)?,
        (None, Some(k)) => k,
        (None, None) => bail!("give --k or --method plurality:<k>"),
    };
    let rule = match a.tie {
        Tie::Lowest => TieRule::LowestId,
        Tie::Random => TieRule::SeededRandom { seed: a.tie_seed },
    };
    let lazy = MultiFunction::plurality(a.n, k, rule)?;
    let f = match a.engine.mc {
        None => lazy.to_dense()?,
        Some(_) => lazy,
    };
    let engine = match a.engine.mc {
        None => Engine::Exact,
        Some(samples) => Engine::MonteCarlo(McConfig::new(samples, a.engine.seed)),
    };
    let mut rows = Vec::new();
    for &rho in &a.rho {
        let e = multi::stability_k(&f, rho, engine)?;
        rows.push(StabilityKRow {
            k,
            n: a.n,
            rho,
            tie_rule: rule,
            agreement: e.value,
            stderr: e.stderr,
            samples: e.samples,
            seed: e.seed,
            exact: e.exact,
        });
    }
    let text = match format {
        Format::Csv => {
            let mut s = String::from("rho,value,stderr\n");
            for r in &rows {
                s += &format!("{},{},{}\n", r.rho, r.agreement, r.stderr);
            }
            s
        }
        Format::Json if rows.len() == 1 => json(&rows[0])?,
        Format::Json => json(&rows)?,
    };
    Ok(Output::ok(text))
}

fn adversary_cmd(a: &AdversaryCmd, format: Format) -> Result<Output> {
    json_only(format, "adversary")?;
    match (&a.action, a.method.as_deref().zip(a.k)) {
        (Some(AdversaryAction::Verify(v)), _) => {
            let search = match v.samples {
                Some(trials) => Search::Sampled { trials, seed: v.seed },
                None if v.n <= 4 => Search::Exhaustive,
                None => Search::Sampled {
                    trials: DEFAULT_VERIFY_SAMPLES,
                    seed: v.seed,
                },
            };
            let report = geometry::verify_threshold_optimal(v.n, v.t, v.k, search, v.allow_odd_t)?;
            Ok(Output {
                invariant_failed: report.optimality_claimed && !report.holds,
                text: json(&report)?,
            })
        }
        (Some(AdversaryAction::Harper(h)), _) => {
            let audit = geometry::harper_audit(h.n, h.trials, h.seed)?;
            Ok(Output {
                invariant_failed: audit.failures > 0,
                text: json(&audit)?,
            })
        }
        (Some(AdversaryAction::Neighborhood(nb)), _) => {
            let text = std::fs::read_to_string(&nb.set)
                .with_context(|| format!("reading {}", nb.set.display()))?;
            let set = SubsetMask::parse_table(&text)?;
            Ok(Output::ok(geometry::neighborhood(&set, nb.k)?.to_table_string()))
        }
        (None, Some((method, k))) => {
            let f = names::load(method, a.n)?.to_dense()?;
            Ok(Output::ok(json(&geometry::vulnerable_count(&f, k)?)?))
        }
        (None, None) => bail!("give --method and --k, or a subcommand (see --help)"),
    }
}

fn ec_cmd(a: &EcArgs, format: Format) -> Result<Output> {
    let states = match (&a.states, &a.equal) {
        (Some(path), _) => electoral::load_states(path).with_context(|| format!("reading {}", path.display()))?,
        (None, Some(spec)) => {
            let parts: Vec<&str> = spec.split(':').collect();
            let num = |s: &str| s.parse::<u64>().with_context(|| format!("bad number {s:?} in --equal"));
            match parts.as_slice() {
                [m, v] => electoral::equal_states(num(m)? as usize, num(v)?, 1)?,
                [m, v, e] => electoral::equal_states(num(m)? as usize, num(v)?, num(e)?)?,
                _ => bail!("--equal takes <m>:<voters>[:<electors>]"),
            }
        }
        (None, None) => unreachable!("clap requires one"),
    };
    let states = electoral::scale_voters(&states, a.scale)?;
    let scenario = EcScenario::new(states, a.epsilon[0], a.samples, a.seed)?;
    let reports = electoral::epsilon_sweep(&scenario, &a.epsilon)?;
    let text = match format {
        Format::Csv => ec_csv(&reports),
        Format::Json if reports.len() == 1 => json(&reports[0])?,
        Format::Json => json(&reports)?,
    };
    Ok(Output::ok(text))
}

fn ec_csv(reports: &[EcComparison]) -> String {
    let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    let mut s = String::from("epsilon,ec,ec_stderr,majority,majority_stderr,ratio,ratio_stderr\n");
    for r in reports {
        s += &format!(
            "{},{},{},{},{},{},{}\n",
            r.epsilon,
            r.electoral_college.probability,
            r.electoral_college.stderr,
            r.national_majority.probability,
            r.national_majority.stderr,
            opt(r.ratio),
            opt(r.ratio_stderr)
        );
    }
    s
}

#[derive(Serialize)]
struct MethodSummary {
    n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    spec: Option<stabvote_core::MethodSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    ties: Option<stabvote_core::TieStatus>,
    #[serde(skip_serializing_if = "Option::is_none")]
    plus_count: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    balanced: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    table: Option<String>,
}

/// Tables are listed in summaries up to this many voters.
const SUMMARY_TABLE_MAX: usize = 12;

fn method_cmd(m: &MethodCmd, format: Format) -> Result<Output> {
    json_only(format, "method")?;
    match m {
        MethodCmd::Load(a) => {
            let loaded = names::load(&a.method, a.n)?;
            let dense = (loaded.n() <= stabvote_core::N_DENSE)
                .then(|| loaded.to_dense())
                .transpose()?;
            let (spec, ties) = match &loaded {
                Loaded::Method(m) => (Some(m.spec().clone()), Some(m.ties())),
                Loaded::Table(_) => (None, None),
            };
            let summary = MethodSummary {
                n: loaded.n(),
                spec,
                ties,
                plus_count: dense.as_ref().map(|f| f.count_plus()),
                balanced: dense.as_ref().map(|f| f.is_balanced()),
                table: dense
                    .as_ref()
                    .filter(|f| f.n() <= SUMMARY_TABLE_MAX)
                    .map(|f| f.to_hex()),
            };
            Ok(Output::ok(json(&summary)?))
        }
        MethodCmd::Save { method, table, path } => {
            let loaded = names::load(&method.method, method.n)?;
            let text = match (&loaded, table) {
                (Loaded::Method(m), false) => m.spec().to_json() + "\n",
                _ => loaded.to_dense()?.to_table_string(),
            };
            std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
            Ok(Output::ok(String::new()))
        }
    }
}
