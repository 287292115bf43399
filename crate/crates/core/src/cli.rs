//! The `swtest` command-line tool.
//!
//! ```text
//! swtest stats <edges>
//! swtest test <edges> --null er|cl|sbm|dcsbm [-B 500] [--weak | --asymptotic]
//! swtest generate er|lattice|nw|cl|sbm|dcsbm --n N ...
//! swtest simulate dist|power|bands ...
//! ```
//!
//! Exit codes: 0 success, 2 usage error, 3 input error, 4 numerical failure.
//! The test verdict never changes the exit code.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::format::{opt, sig};
use crate::graph::{read_edge_list, write_edge_list, Graph, LabeledGraph};
use crate::models::{generate_er, generate_null, generate_nw, generate_ring_lattice, NullFamily, NwParams};
use crate::netstats::sw_stats;
use crate::rng::{substream, DEFAULT_SEED};
use crate::sim::{default_beta_grid, default_null_shape, power_curve, quantile_bands, validate_c_distribution, SimResult};
use crate::swtest::{
    asymptotic_test, bootstrap_intersection_test, weak_test, TestConfig, TestReport, DEFAULT_ALPHA, DEFAULT_EPSILON,
    DEFAULT_REPLICATES,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INPUT: i32 = 3;
pub const EXIT_NUMERICAL: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "swtest", version, about = "Statistical tests for the small-world property of networks")]
pub struct Cli {
    /// Worker threads (default: all cores). Output does not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print n, m, C, L, density and triad counts of an edge list.
    Stats(StatsArgs),
    /// Run the intersection test on an edge list.
    Test(TestArgs),
    /// Write a generated graph as an edge list.
    Generate(GenerateArgs),
    /// Run a simulation study.
    Simulate(SimulateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    /// Output file (default: standard output).
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    pub input: PathBuf,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct TestArgs {
    pub input: PathBuf,
    #[arg(long, value_parser = parse_family, default_value = "er")]
    pub null: NullFamily,
    /// Bootstrap replicates.
    #[arg(short = 'B', long = "replicates", default_value_t = DEFAULT_REPLICATES)]
    pub replicates: usize,
    #[arg(long, default_value_t = DEFAULT_ALPHA)]
    pub alpha: f64,
    #[arg(long, default_value_t = DEFAULT_EPSILON)]
    pub epsilon: f64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Weak small-world test.
    #[arg(long, conflicts_with = "asymptotic")]
    pub weak: bool,
    /// Closed-form ER test (no simulation).
    #[arg(long)]
    pub asymptotic: bool,
    /// Refit the null for every replicate.
    #[arg(long)]
    pub refit_per_replicate: bool,
    /// Write per-replicate C, L, sigma to a CSV file (default: next to the
    /// report, or `samples.csv`).
    #[arg(long, num_args = 0..=1)]
    pub emit_samples: Option<Option<PathBuf>>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelKind {
    Er,
    Lattice,
    Nw,
    Cl,
    Sbm,
    Dcsbm,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(value_enum)]
    pub model: ModelKind,
    #[arg(long)]
    pub n: usize,
    /// Edge probability (er).
    #[arg(long)]
    pub p: Option<f64>,
    /// Hops per side (lattice).
    #[arg(long)]
    pub hops: Option<usize>,
    #[command(flatten)]
    pub degree: DegreeArgs,
    /// Lattice share (nw).
    #[arg(long)]
    pub beta: Option<f64>,
    /// Shape of the random component (nw).
    #[arg(long, value_parser = parse_family, default_value = "er")]
    pub null: NullFamily,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct DegreeArgs {
    /// Expected degree, 2 delta.
    #[arg(long, conflicts_with = "delta")]
    pub degree: Option<f64>,
    /// Half the expected degree.
    #[arg(long)]
    pub delta: Option<f64>,
}

impl DegreeArgs {
    fn delta(&self) -> Option<f64> {
        self.delta.or(self.degree.map(|d| d / 2.0))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Study {
    Dist,
    Power,
    Bands,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(value_enum)]
    pub study: Study,
    #[arg(long)]
    pub n: usize,
    /// Edge probability (dist).
    #[arg(long)]
    pub p: Option<f64>,
    #[command(flatten)]
    pub degree: DegreeArgs,
    /// Comma-separated beta grid (default 0, 0.05, ..., 1).
    #[arg(long, value_delimiter = ',')]
    pub betas: Option<Vec<f64>>,
    #[arg(long, default_value_t = 250)]
    pub reps: usize,
    #[arg(long, value_parser = parse_family, default_value = "er")]
    pub null: NullFamily,
    #[arg(long, default_value_t = DEFAULT_ALPHA)]
    pub alpha: f64,
    #[arg(long, default_value_t = DEFAULT_EPSILON)]
    pub epsilon: f64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[command(flatten)]
    pub out: OutputArgs,
}

fn parse_family(s: &str) -> std::result::Result<NullFamily, String> {
    s.parse::<NullFamily>().map_err(|e| e.to_string())
}

/// Exit code for an error.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::InvalidParameter(_) => EXIT_USAGE,
        Error::Parse { .. } | Error::NodeOutOfRange { .. } | Error::Degenerate(_) | Error::Io(_) | Error::Csv(_) => {
            EXIT_INPUT
        }
        Error::Json(_) => EXIT_INPUT,
        Error::EigenNonConvergence(_) | Error::CutoffUndefined(_) => EXIT_NUMERICAL,
    }
}

/// Parses `args` (including the program name), runs the command and returns
/// the exit code. Errors go to standard error.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match run(&cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("swtest: error: {e}");
            exit_code(&e)
        }
    }
}

pub fn run(cli: &Cli) -> Result<()> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = cli.threads {
        if t == 0 {
            return Err(Error::invalid("--threads must be at least 1"));
        }
        builder = builder.num_threads(t);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::invalid(format!("cannot start worker pool: {e}")))?;
    pool.install(|| match &cli.command {
        Command::Stats(a) => cmd_stats(a),
        Command::Test(a) => cmd_test(a),
        Command::Generate(a) => cmd_generate(a),
        Command::Simulate(a) => cmd_simulate(a),
    })
}

fn read_graph(path: &Path) -> Result<LabeledGraph> {
    let file = fs::File::open(path)?;
    read_edge_list(io::BufReader::new(file))
}

fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text)?,
        None => io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn csv_string(header: &[&str], rows: &[Vec<String>]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

#[derive(Debug, Serialize)]
struct StatsOutput {
    n: usize,
    m: usize,
    #[serde(rename = "C")]
    c: f64,
    #[serde(rename = "L")]
    l: Option<f64>,
    p_hat: f64,
    #[serde(rename = "T")]
    t: u64,
    #[serde(rename = "V")]
    v: u64,
    #[serde(rename = "S")]
    s: u64,
    lcc_fraction: f64,
}

pub fn cmd_stats(args: &StatsArgs) -> Result<()> {
    let g = read_graph(&args.input)?.graph;
    let st = sw_stats(&g)?;
    let out = StatsOutput {
        n: g.node_count(),
        m: g.edge_count(),
        c: st.clustering,
        l: st.path_length,
        p_hat: st.density,
        t: st.triads.triangles,
        v: st.triads.open,
        s: st.triads.connected,
        lcc_fraction: st.lcc_fraction,
    };
    let text = match args.out.format {
        Format::Json => serde_json::to_string_pretty(&out)? + "\n",
        Format::Csv => csv_string(
            &["n", "m", "C", "L", "p_hat", "T", "V", "S", "lcc_fraction"],
            &[vec![
                out.n.to_string(),
                out.m.to_string(),
                sig(out.c),
                opt(out.l),
                sig(out.p_hat),
                out.t.to_string(),
                out.v.to_string(),
                out.s.to_string(),
                sig(out.lcc_fraction),
            ]],
        )?,
    };
    emit(args.out.output.as_deref(), &text)
}

fn check_unit(name: &str, x: f64) -> Result<()> {
    if x > 0.0 && x < 1.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("--{name} must lie in (0, 1), got {x}")))
    }
}

pub fn cmd_test(args: &TestArgs) -> Result<()> {
    check_unit("alpha", args.alpha)?;
    if args.epsilon.is_nan() || args.epsilon <= 0.0 {
        return Err(Error::invalid(format!("--epsilon must be > 0, got {}", args.epsilon)));
    }
    if args.asymptotic && args.null != NullFamily::Er {
        return Err(Error::invalid("--asymptotic is only available for the er null"));
    }
    let g = read_graph(&args.input)?.graph;
    let config = TestConfig {
        replicates: args.replicates,
        seed: args.seed,
        alpha: args.alpha,
        epsilon: args.epsilon,
        refit_per_replicate: args.refit_per_replicate,
    };
    let mut report = if args.asymptotic {
        asymptotic_test(&g, args.alpha, args.epsilon)?
    } else if args.weak {
        weak_test(&g, args.null, &config)?
    } else {
        bootstrap_intersection_test(&g, args.null, &config)?
    };

    if let Some(path) = &args.emit_samples {
        let path = match (path, &args.out.output) {
            (Some(p), _) => p.clone(),
            (None, Some(o)) => {
                let mut s = o.clone().into_os_string();
                s.push(".samples.csv");
                PathBuf::from(s)
            }
            (None, None) => PathBuf::from("samples.csv"),
        };
        fs::write(&path, samples_csv(&report)?)?;
        report.samples_path = Some(path.display().to_string());
    }

    let text = match args.out.format {
        Format::Json => report.to_json()? + "\n",
        Format::Csv => report_csv(&report)?,
    };
    emit(args.out.output.as_deref(), &text)?;
    let line = verdict_line(&report);
    if args.out.output.is_some() {
        println!("{line}");
    } else {
        eprintln!("{line}");
    }
    Ok(())
}

pub fn verdict_line(r: &TestReport) -> String {
    format!(
        "{}: C={} (K1={}) L={} (K2={}) null={} mode={:?}",
        r.verdicts.decision.as_str(),
        sig(r.observed.c),
        sig(r.cutoffs.k1),
        opt(r.observed.l),
        opt(r.cutoffs.k2),
        r.null.family,
        r.mode
    )
    .to_lowercase()
}

pub fn samples_csv(r: &TestReport) -> Result<String> {
    let rows: Vec<Vec<String>> = r
        .samples
        .iter()
        .enumerate()
        .map(|(b, s)| vec![b.to_string(), sig(s.c), opt(s.l), opt(s.sigma), sig(s.lcc_fraction)])
        .collect();
    csv_string(&["replicate", "C", "L", "sigma", "lcc_fraction"], &rows)
}

pub fn report_csv(r: &TestReport) -> Result<String> {
    let header = [
        "mode", "n", "m", "C", "L", "p_hat", "lcc_fraction", "family", "params_digest", "B", "seed", "alpha", "K1", "K2",
        "p_C", "p_L", "C_rule", "L_rule", "decision",
    ];
    let mode = serde_json::to_value(r.mode)?.as_str().unwrap_or_default().to_string();
    let decision = serde_json::to_value(r.verdicts.decision)?.as_str().unwrap_or_default().to_string();
    let row = vec![
        mode,
        r.observed.n.to_string(),
        r.observed.m.to_string(),
        sig(r.observed.c),
        opt(r.observed.l),
        sig(r.observed.p_hat),
        sig(r.observed.lcc_fraction),
        r.null.family.to_string(),
        r.null.params_digest.clone(),
        r.replicates.to_string(),
        r.seed.map(|s| s.to_string()).unwrap_or_default(),
        sig(r.alpha),
        sig(r.cutoffs.k1),
        opt(r.cutoffs.k2),
        opt(r.p_values.p_c),
        opt(r.p_values.p_l),
        r.verdicts.c_rule.to_string(),
        r.verdicts.l_rule.to_string(),
        decision,
    ];
    csv_string(&header, &[row])
}

fn require<T>(value: Option<T>, flag: &str, model: &str) -> Result<T> {
    value.ok_or_else(|| Error::invalid(format!("{model} needs --{flag}")))
}

pub fn generate_graph(args: &GenerateArgs) -> Result<Graph> {
    let mut rng = substream(args.seed, &[]);
    match args.model {
        ModelKind::Er => generate_er(args.n, require(args.p, "p", "er")?, &mut rng),
        ModelKind::Lattice => generate_ring_lattice(args.n, require(args.hops, "hops", "lattice")?),
        ModelKind::Nw => {
            let delta = require(args.degree.delta(), "degree or --delta", "nw")?;
            let beta = require(args.beta, "beta", "nw")?;
            let params = NwParams::new(args.n, delta, beta, default_null_shape(args.null, args.n)?)?;
            generate_nw(&params, &mut rng)
        }
        ModelKind::Cl | ModelKind::Sbm | ModelKind::Dcsbm => {
            let family = match args.model {
                ModelKind::Cl => NullFamily::Cl,
                ModelKind::Sbm => NullFamily::Sbm,
                _ => NullFamily::Dcsbm,
            };
            let delta = require(args.degree.delta(), "degree or --delta", family.as_str())?;
            let model = default_null_shape(family, args.n)?.with_mean_degree(2.0 * delta)?;
            generate_null(&model, &mut rng)
        }
    }
}

pub fn cmd_generate(args: &GenerateArgs) -> Result<()> {
    let g = generate_graph(args)?;
    let mut text = format!("# nodes {} edges {}\n", g.node_count(), g.edge_count());
    text.push_str(&write_edge_list(&g, None));
    emit(args.output.as_deref(), &text)
}

pub fn cmd_simulate(args: &SimulateArgs) -> Result<()> {
    let betas = args.betas.clone().unwrap_or_else(default_beta_grid);
    let result = match args.study {
        Study::Dist => SimResult::Dist(validate_c_distribution(args.n, require(args.p, "p", "dist")?, args.reps, args.seed)?),
        Study::Power => {
            let delta = require(args.degree.delta(), "degree or --delta", "power")?;
            SimResult::Power(power_curve(args.n, delta, &betas, args.reps, args.alpha, args.epsilon, args.seed)?)
        }
        Study::Bands => {
            let delta = require(args.degree.delta(), "degree or --delta", "bands")?;
            SimResult::Bands(quantile_bands(args.null, args.n, delta, &betas, args.reps, args.seed)?)
        }
    };
    let text = match args.out.format {
        Format::Json => result.to_json()? + "\n",
        Format::Csv => result.to_csv()?,
    };
    emit(args.out.output.as_deref(), &text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(main_with_args(["swtest"]), EXIT_USAGE);
        assert_eq!(main_with_args(["swtest", "test"]), EXIT_USAGE);
        assert_eq!(main_with_args(["swtest", "test", "x", "--null", "ws"]), EXIT_USAGE);
        assert_eq!(main_with_args(["swtest", "test", "x", "--weak", "--asymptotic"]), EXIT_USAGE);
    }

    #[test]
    fn missing_file_exits_3() {
        assert_eq!(main_with_args(["swtest", "stats", "/nonexistent/edges.txt"]), EXIT_INPUT);
    }

    #[test]
    fn exit_codes_by_error_kind() {
        assert_eq!(exit_code(&Error::invalid("x")), EXIT_USAGE);
        assert_eq!(exit_code(&Error::degenerate("x")), EXIT_INPUT);
        assert_eq!(exit_code(&Error::CutoffUndefined("x".into())), EXIT_NUMERICAL);
    }
}
