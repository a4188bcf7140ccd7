//! Command line front end: argument parsing and printing, with all real work
//! delegated to the library modules.
//!
//! Exit codes: 0 success, 2 bad arguments or config, 3 embedding failures
//! (no embedding found, clique capacity, defective qubits), 4 unreadable or
//! unparseable files, 1 anything else.

use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{ArgAction, Args, Parser, Subcommand};

use crate::bench::{self, ReportFormat, SweepConfig};
use crate::embedding::{
    clique_embedding_chimera, find_embedding, ChainResolution, CouplingGraph, EmbedOptions,
    EmbedParams, Embedding,
};
use crate::instances::{self, ExactCoverInstance, GenerateParams};
use crate::model::{self, IsingModel, QuboModel};
use crate::rng::{derive_seed, stage};
use crate::sampler::{self, AnnealParams, GroundTruth};
use crate::topology::{HardwareGraph, TopologyKind};
use crate::{Error, Result};

#[derive(Debug, Parser)]
#[command(
    name = "tailcover",
    version,
    about = "Crew pairing as exact cover: generate, compile, embed, anneal, sweep"
)]
pub struct Cli {
    /// Master seed. Omitted means one is drawn and printed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Output path (what it holds depends on the subcommand).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Report format: csv or json.
    #[arg(long, global = true, default_value = "csv")]
    pub format: String,

    /// Worker threads for sweeps. 0 means one per core.
    #[arg(long, global = true, default_value_t = 0)]
    pub workers: usize,

    /// More detail on stderr.
    #[arg(long, short, global = true, action = ArgAction::Count)]
    pub verbose: u8,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a random instance with a planted cover.
    Generate(GenerateCmd),
    /// Compile an instance to a model file.
    Compile(CompileCmd),
    /// Map a problem onto a hardware graph and save the chains.
    Embed(EmbedCmd),
    /// Anneal a model or instance, directly or through an embedding.
    Solve(SolveCmd),
    /// Run a configured sweep and write its report.
    Sweep(SweepCmd),
    /// Rewrite a records file as a report (records plus summary).
    Report(ReportCmd),
}

#[derive(Debug, Args)]
pub struct GenerateCmd {
    /// Number of candidate routes (variables).
    #[arg(long)]
    pub routes: usize,
    /// Number of flights to cover (constraints).
    #[arg(long)]
    pub flights: usize,
    /// Routes in the planted cover.
    #[arg(long)]
    pub solution_size: usize,
    /// Target fraction of route pairs that share a flight, in (0, 1].
    #[arg(long)]
    pub density: f64,
    /// Also attach per-route costs drawn uniformly from LO,HI.
    #[arg(long, value_name = "LO,HI")]
    pub costs: Option<String>,
}

#[derive(Debug, Args)]
pub struct CompileCmd {
    #[arg(long)]
    pub instance: PathBuf,
    /// Cost weight. 0 drops costs and keeps the pure covering model.
    #[arg(long, default_value_t = 0.0)]
    pub lambda: f64,
    /// Model kind to emit: ising or qubo.
    #[arg(long, default_value = "ising")]
    pub target: String,
}

#[derive(Debug, Args)]
pub struct EmbedCmd {
    #[arg(long)]
    pub instance: Option<PathBuf>,
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// Hardware graph, e.g. chimera:16,16,4 or pegasus:16.
    #[arg(long)]
    pub topology: String,
    /// Random restarts for the heuristic search.
    #[arg(long, default_value_t = 24)]
    pub tries: usize,
    /// Give up after this many seconds.
    #[arg(long)]
    pub timeout_secs: Option<u64>,
    /// Use the deterministic clique pattern (chimera only).
    #[arg(long)]
    pub clique_template: bool,
}

#[derive(Debug, Args)]
pub struct SolveCmd {
    #[arg(long)]
    pub instance: Option<PathBuf>,
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// Cost weight when compiling an instance.
    #[arg(long, default_value_t = 0.0)]
    pub lambda: f64,
    /// Hardware graph to embed onto; omit to anneal the model directly.
    #[arg(long)]
    pub topology: Option<String>,
    /// Reuse a saved embedding instead of searching for one.
    #[arg(long)]
    pub embedding: Option<PathBuf>,
    /// Use the deterministic clique pattern (chimera only).
    #[arg(long)]
    pub clique_template: bool,
    /// Chain strength relative to the largest model coefficient.
    #[arg(long)]
    pub rcs: Option<f64>,
    /// Rescale the embedded model into the default coefficient ranges.
    #[arg(long)]
    pub autoscale: bool,
    #[arg(long, default_value_t = 100)]
    pub num_reads: usize,
    #[arg(long, default_value_t = 1000)]
    pub sweeps: usize,
    #[arg(long, default_value_t = 0.1)]
    pub beta_initial: f64,
    /// Final inverse temperature; omitted picks one from the model.
    #[arg(long)]
    pub beta_final: Option<f64>,
    /// Known optimum to score against, overriding anything derivable.
    #[arg(long)]
    pub ground_energy: Option<f64>,
    /// Energy tolerance for counting a read as a success.
    #[arg(long, default_value_t = sampler::DEFAULT_ENERGY_TOL)]
    pub tol: f64,
    /// Write the raw reads as JSONL.
    #[arg(long)]
    pub samples: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepCmd {
    /// Sweep description (TOML).
    #[arg(long)]
    pub config: PathBuf,
    /// Also dump each record's reads into this directory.
    #[arg(long)]
    pub keep_samples: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReportCmd {
    /// Records file from an earlier sweep (csv or json).
    #[arg(long)]
    pub records: PathBuf,
}

/// Process exit code for an error, per the contract in the module doc.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::BadConfig(_)
        | Error::BadTopologySpec(_)
        | Error::InvalidTopology(_)
        | Error::InvalidAnnealParams(_)
        | Error::NegativeLambda(_)
        | Error::MissingCosts
        | Error::BadChainStrength(_)
        | Error::BruteForceTooLarge(_)
        | Error::Generation(_) => 2,
        Error::NoEmbedding { .. }
        | Error::CliqueCapacity { .. }
        | Error::CliqueDeadNode(_)
        | Error::InvalidEmbedding(_)
        | Error::DimensionMismatch { .. } => 3,
        Error::Io { .. }
        | Error::Json { .. }
        | Error::ParseModel { .. }
        | Error::ParseRecords { .. }
        | Error::InvalidInstance(_) => 4,
        _ => 1,
    }
}

pub fn run(cli: Cli) -> Result<()> {
    match &cli.command {
        Command::Generate(c) => generate(&cli, c),
        Command::Compile(c) => compile(&cli, c),
        Command::Embed(c) => embed(&cli, c),
        Command::Solve(c) => solve(&cli, c),
        Command::Sweep(c) => sweep(&cli, c),
        Command::Report(c) => report(&cli, c),
    }
}

fn resolve_seed(given: Option<u64>) -> u64 {
    match given {
        Some(s) => s,
        None => {
            let s: u64 = rand::random();
            println!("seed: {s}");
            s
        }
    }
}

fn require_out<'a>(cli: &'a Cli, what: &str) -> Result<&'a Path> {
    cli.out
        .as_deref()
        .ok_or_else(|| Error::BadConfig(format!("{what} requires --out")))
}

fn report_format(cli: &Cli) -> Result<ReportFormat> {
    cli.format.parse()
}

fn generate(cli: &Cli, cmd: &GenerateCmd) -> Result<()> {
    let out = require_out(cli, "generate")?;
    let seed = resolve_seed(cli.seed);
    let mut inst = instances::generate(&GenerateParams {
        routes: cmd.routes,
        flights: cmd.flights,
        solution_size: cmd.solution_size,
        density: cmd.density,
        seed,
    })?;
    if let Some(spec) = &cmd.costs {
        let range = parse_cost_range(spec)?;
        inst = instances::attach_costs(&inst, seed, range)?;
    }
    inst.save(out)?;
    let m = model::ising_from_instance(&inst, 0.0)?;
    println!(
        "wrote {}: {} routes x {} flights, planted cover of {}, {} couplers, seed {}",
        out.display(),
        cmd.routes,
        cmd.flights,
        cmd.solution_size,
        m.num_couplers(),
        seed
    );
    Ok(())
}

fn parse_cost_range(spec: &str) -> Result<(f64, f64)> {
    let parts: Vec<&str> = spec.split(',').collect();
    let err = || Error::BadConfig(format!("bad cost range '{spec}', expected LO,HI"));
    if parts.len() != 2 {
        return Err(err());
    }
    let lo: f64 = parts[0].trim().parse().map_err(|_| err())?;
    let hi: f64 = parts[1].trim().parse().map_err(|_| err())?;
    Ok((lo, hi))
}

fn compile(cli: &Cli, cmd: &CompileCmd) -> Result<()> {
    let inst = ExactCoverInstance::load(&cmd.instance)?;
    let (text, summary) = match cmd.target.as_str() {
        "ising" => {
            let m = model::ising_from_instance(&inst, cmd.lambda)?;
            let s = format!(
                "ising: n={} couplers={} offset={}",
                m.n(),
                m.num_couplers(),
                m.offset()
            );
            (m.to_text(), s)
        }
        "qubo" => {
            let q = model::qubo_from_instance(&inst, cmd.lambda)?;
            let s = format!(
                "qubo: n={} entries={} offset={}",
                q.n(),
                q.entries().count(),
                q.offset()
            );
            (q.to_text(), s)
        }
        other => {
            return Err(Error::BadConfig(format!(
                "unknown compile target '{other}' (expected ising or qubo)"
            )))
        }
    };
    match &cli.out {
        Some(path) => {
            std::fs::write(path, text).map_err(|e| Error::io(path, e))?;
            println!("wrote {}: {summary}", path.display());
        }
        None => print!("{text}"),
    }
    Ok(())
}

/// The logical problem for embed and solve: a spin model, plus the instance
/// itself when one was given (it may carry a planted optimum).
fn load_problem(
    instance: &Option<PathBuf>,
    model_path: &Option<PathBuf>,
    lambda: f64,
) -> Result<(IsingModel, Option<ExactCoverInstance>)> {
    match (instance, model_path) {
        (Some(_), Some(_)) => Err(Error::BadConfig(
            "give --instance or --model, not both".into(),
        )),
        (None, None) => Err(Error::BadConfig(
            "one of --instance or --model is required".into(),
        )),
        (Some(p), None) => {
            let inst = ExactCoverInstance::load(p)?;
            let m = model::ising_from_instance(&inst, lambda)?;
            Ok((m, Some(inst)))
        }
        (None, Some(p)) => Ok((load_any_model(p)?, None)),
    }
}

/// Model files are self-describing; binary models convert to spins so one
/// solver path serves both.
fn load_any_model(p: &Path) -> Result<IsingModel> {
    match IsingModel::load(p) {
        Ok(m) => Ok(m),
        Err(ising_err) => match QuboModel::load(p) {
            Ok(q) => Ok(model::qubo_to_ising(&q)),
            Err(_) => Err(ising_err),
        },
    }
}

fn embed(cli: &Cli, cmd: &EmbedCmd) -> Result<()> {
    let out = require_out(cli, "embed")?;
    let seed = resolve_seed(cli.seed);
    let (m, _) = load_problem(&cmd.instance, &cmd.model, 0.0)?;
    let kind = TopologyKind::parse(&cmd.topology)?;
    let hw = kind.build()?;
    let e = build_embedding(&m, &hw, cmd.clique_template, None, cmd.tries, seed, cmd.timeout_secs)?;
    e.save(out)?;
    let metrics = crate::embedding::chain_metrics(&e);
    println!(
        "wrote {}: {} chains on {kind}, {} physical qubits, max chain {}, mean {:.2}",
        out.display(),
        e.logical_n(),
        metrics.physical_qubits,
        metrics.max,
        metrics.mean
    );
    if cli.verbose > 0 {
        eprintln!("chain length histogram: {:?}", metrics.histogram);
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn build_embedding(
    m: &IsingModel,
    hw: &HardwareGraph,
    clique_template: bool,
    saved: Option<&Path>,
    tries: usize,
    seed: u64,
    timeout_secs: Option<u64>,
) -> Result<Embedding> {
    if let Some(path) = saved {
        return Embedding::load(path);
    }
    if clique_template {
        return clique_embedding_chimera(m.n(), hw);
    }
    let logical = CouplingGraph::from_model(m);
    let params = EmbedParams {
        tries,
        seed: derive_seed(seed, &[stage::EMBED, 0]),
        timeout: timeout_secs.map(Duration::from_secs),
        ..Default::default()
    };
    find_embedding(&logical, hw, &params)
}

fn solve(cli: &Cli, cmd: &SolveCmd) -> Result<()> {
    let seed = resolve_seed(cli.seed);
    let (m, inst) = load_problem(&cmd.instance, &cmd.model, cmd.lambda)?;
    let params = AnnealParams {
        num_reads: cmd.num_reads,
        sweeps: cmd.sweeps,
        beta_initial: cmd.beta_initial,
        beta_final: cmd.beta_final,
        seed,
        ..Default::default()
    };

    let embedded = cmd.topology.is_some() || cmd.embedding.is_some() || cmd.clique_template;
    let (ss, phys_info) = if embedded {
        let kind = match (&cmd.topology, &cmd.embedding) {
            (Some(spec), _) => TopologyKind::parse(spec)?,
            (None, Some(path)) => Embedding::load(path)?.hardware(),
            (None, None) => {
                return Err(Error::BadConfig(
                    "--clique-template needs a --topology".into(),
                ))
            }
        };
        let hw = kind.build()?;
        let e = build_embedding(
            &m,
            &hw,
            cmd.clique_template,
            cmd.embedding.as_deref(),
            10,
            seed,
            None,
        )?;
        let rcs = match cmd.rcs {
            Some(r) => r,
            None => {
                eprintln!("warning: no --rcs given, using 1.0");
                1.0
            }
        };
        if rcs > 1.0 {
            eprintln!("warning: rcs {rcs} exceeds the largest model coefficient");
        }
        let phys = crate::embedding::embed_ising(&m, &e, &hw, rcs, &EmbedOptions::default())?;
        let phys = if cmd.autoscale {
            let (scaled, rep) = phys.autoscaled(model::DEFAULT_H_RANGE, model::DEFAULT_J_RANGE, false)?;
            if cli.verbose > 0 {
                eprintln!("autoscale factor {}", rep.factor);
            }
            scaled
        } else {
            phys
        };
        let ss = sampler::sample_embedded(&phys, &e, &m, &params, ChainResolution::MajorityVote)?;
        let reads = ss.num_reads() as f64;
        let mean_cbf = ss
            .samples()
            .iter()
            .map(|s| s.chain_break_fraction * s.num_occurrences as f64)
            .sum::<f64>()
            / reads;
        let info = (e.max_chain_len(), phys.num_qubits(), mean_cbf);
        (ss, Some(info))
    } else {
        (sampler::simulated_anneal(&m, &params)?, None)
    };

    let gt = ground_truth(cmd, &m, inst.as_ref())?;
    println!(
        "reads: {}  sweeps: {}  seed: {}",
        ss.num_reads(),
        cmd.sweeps,
        seed
    );
    println!("min energy: {}", ss.min_energy());
    match &gt {
        Some((g, source)) => {
            let stats = sampler::success_rate(&ss, g, cmd.tol);
            println!(
                "mean energy: {} +- {}",
                stats.mean_energy, stats.std_energy
            );
            println!(
                "success rate: {:.4} against {} optimum {}",
                stats.rate, source, g.minimum_energy
            );
        }
        None => {
            println!("mean energy: {}", ss.mean_energy());
            println!("success rate: n/a (no ground truth)");
        }
    }
    if let Some((max_chain, qubits, cbf)) = phys_info {
        println!(
            "chains: max {max_chain}, physical qubits {qubits}, mean break fraction {cbf:.4}"
        );
    }
    println!("wall time: {:?}", ss.wall_time());
    let samples_path = cmd.samples.as_ref().or(cli.out.as_ref());
    if let Some(path) = samples_path {
        ss.save_jsonl(path)?;
        println!("samples: {}", path.display());
    }
    Ok(())
}

/// Best available optimum: an explicit --ground-energy wins, then a planted
/// cover at lambda 0, then exhaustive search on models small enough.
fn ground_truth(
    cmd: &SolveCmd,
    m: &IsingModel,
    inst: Option<&ExactCoverInstance>,
) -> Result<Option<(GroundTruth, &'static str)>> {
    if let Some(e) = cmd.ground_energy {
        // only the energy is scored against, so the placeholder state is fine
        return Ok(Some((GroundTruth::planted(e, 0), "given")));
    }
    if cmd.lambda == 0.0 {
        if let Some(bits) = inst.and_then(|i| i.planted()) {
            let state = bits
                .iter()
                .enumerate()
                .fold(0u64, |acc, (i, &b)| acc | ((b as u64) << i));
            return Ok(Some((GroundTruth::planted(0.0, state), "planted")));
        }
    }
    if m.n() <= instances::CERTIFY_LIMIT {
        return Ok(Some((sampler::brute_force(m, 4)?, "exhaustive")));
    }
    Ok(None)
}

fn sweep(cli: &Cli, cmd: &SweepCmd) -> Result<()> {
    let format = report_format(cli)?;
    let out = require_out(cli, "sweep")?;
    let mut cfg = SweepConfig::load(&cmd.config)?;
    if let Some(s) = cli.seed {
        cfg.master_seed = s;
    }
    if cli.verbose > 0 {
        eprintln!("{:?} sweep, master seed {}", cfg.protocol, cfg.master_seed);
    }
    let records = bench::run_sweep(&cfg, cli.workers, cmd.keep_samples.as_deref())?;
    bench::report(&records, out, format)?;
    println!("{} records -> {}", records.len(), out.display());
    Ok(())
}

fn report(cli: &Cli, cmd: &ReportCmd) -> Result<()> {
    let format = report_format(cli)?;
    let out = require_out(cli, "report")?;
    let records = bench::read_records(&cmd.records)?;
    bench::report(&records, out, format)?;
    println!("{} records -> {}", records.len(), out.display());
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn argument_tree_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn globals_parse_after_the_subcommand() {
        let cli = Cli::try_parse_from([
            "tailcover",
            "generate",
            "--routes",
            "6",
            "--flights",
            "12",
            "--solution-size",
            "2",
            "--density",
            "0.5",
            "--seed",
            "7",
            "--out",
            "x.json",
        ])
        .unwrap();
        assert_eq!(cli.seed, Some(7));
        assert_eq!(cli.out.as_deref(), Some(Path::new("x.json")));
        assert_eq!(cli.format, "csv");
        match cli.command {
            Command::Generate(g) => {
                assert_eq!((g.routes, g.flights, g.solution_size), (6, 12, 2));
                assert!(g.costs.is_none());
            }
            other => panic!("parsed into {other:?}"),
        }
    }

    #[test]
    fn missing_required_arguments_fail_to_parse() {
        assert!(Cli::try_parse_from(["tailcover", "generate", "--routes", "6"]).is_err());
        assert!(Cli::try_parse_from(["tailcover", "compile"]).is_err());
        assert!(Cli::try_parse_from(["tailcover", "nonsense"]).is_err());
    }

    #[test]
    fn exit_codes_partition_the_errors() {
        assert_eq!(exit_code(&Error::BadConfig("x".into())), 2);
        assert_eq!(exit_code(&Error::BadTopologySpec("x".into())), 2);
        assert_eq!(exit_code(&Error::NoEmbedding { tries: 3 }), 3);
        assert_eq!(
            exit_code(&Error::CliqueCapacity {
                needed: 9,
                capacity: 8
            }),
            3
        );
        assert_eq!(exit_code(&Error::InvalidEmbedding("x".into())), 3);
        assert_eq!(
            exit_code(&Error::io(
                Path::new("x"),
                std::io::Error::new(std::io::ErrorKind::NotFound, "gone")
            )),
            4
        );
        assert_eq!(
            exit_code(&Error::ParseModel {
                path: "m.txt".into(),
                line: 3,
                message: "bad".into()
            }),
            4
        );
        assert_eq!(exit_code(&Error::EmptyModel), 1);
    }

    #[test]
    fn cost_range_parsing() {
        assert_eq!(parse_cost_range("1e4,1e6").unwrap(), (1e4, 1e6));
        assert_eq!(parse_cost_range(" 2 , 3 ").unwrap(), (2.0, 3.0));
        assert!(parse_cost_range("5").is_err());
        assert!(parse_cost_range("a,b").is_err());
    }

    #[test]
    fn model_loader_accepts_both_kinds() {
        let dir = tempfile::tempdir().unwrap();
        let q = model::QuboModel::new(2, [(0, 0, -1.0), (0, 1, 2.0)], 0.5).unwrap();
        let qp = dir.path().join("m.qubo");
        q.save(&qp).unwrap();
        let as_ising = load_any_model(&qp).unwrap();
        // same minima whichever way the file is read
        for bits in [[0u8, 0], [0, 1], [1, 0], [1, 1]] {
            let spins: Vec<i8> = bits.iter().map(|&b| if b == 1 { 1 } else { -1 }).collect();
            let eq = q.energy(&bits).unwrap();
            let ei = as_ising.energy(&spins).unwrap();
            assert!((eq - ei).abs() < 1e-12);
        }

        let m = IsingModel::new(vec![0.5, -0.5], [(0, 1, 1.0)], 0.0).unwrap();
        let ip = dir.path().join("m.ising");
        m.save(&ip).unwrap();
        assert_eq!(load_any_model(&ip).unwrap().h(), m.h());
    }
}
