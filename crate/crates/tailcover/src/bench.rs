//! Batch experiment driver: sweep a grid of knobs over an instance (or a set
//! of instances), collect per-cell statistics, and write deterministic
//! reports.
//!
//! Every cell derives its own seed from the master seed and its grid
//! coordinates, so results are independent of worker count and execution
//! order: a sweep run with 1 worker and with 8 workers writes byte-identical
//! files. The penalty weight lambda is deliberately absent from the seed
//! path, which makes a lambda sweep at `lambda = 0` reproduce the plain
//! exact-cover sweep bit for bit.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::embedding::{
    self, clique_embedding_chimera, find_embedding, ChainResolution, CouplingGraph, EmbedOptions,
    EmbedParams, Embedding,
};
use crate::instances::ExactCoverInstance;
use crate::model::{self, IsingModel};
use crate::rng::{derive_seed, stage};
use crate::sampler::{self, AnnealParams, GroundTruth, SampleSet};
use crate::topology::{HardwareGraph, TopologyKind};
use crate::{Error, Result};

/// Penalty weights used when a lambda sweep does not specify its own grid.
pub const DEFAULT_LAMBDA_GRID: [f64; 4] = [1e-5, 5e-6, 1e-6, 2e-7];

/// Column order of the records CSV; parsers check it verbatim.
pub const CSV_HEADER: &str = "instance,N,topology,embedding_id,rcs,sweeps,num_reads,repetition,\
seed,success_rate,mean_energy,min_energy,mean_cbf,max_chain_len,phys_qubits,wall_time_ms";

const SUMMARY_CSV_HEADER: &str =
    "instance,N,topology,rcs,sweeps,cells,mean_success,std_success,mean_energy,mean_cbf,\
mean_wall_time_ms";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Protocol {
    /// Chain strength grid on one instance.
    Rcs,
    /// Sweep count grid at the best (embedding, rcs) cell.
    Anneal,
    /// Penalty weight grid, embeddings shared across weights.
    Lambda,
    /// Instance set, one selected cell per instance and topology.
    Scaling,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Timing {
    /// `max(1, ceil(reads * sweeps * qubits / 1e5))` milliseconds: a
    /// deterministic stand-in so reports reproduce bit for bit.
    #[default]
    Modeled,
    /// Wall-clock measurement (not reproducible across machines).
    Measured,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
}

impl ReportFormat {
    fn extension(self) -> &'static str {
        match self {
            ReportFormat::Csv => "csv",
            ReportFormat::Json => "json",
        }
    }
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<ReportFormat> {
        match s {
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            other => Err(Error::BadConfig(format!(
                "unknown report format '{other}' (expected csv or json)"
            ))),
        }
    }
}

/// As written in TOML; everything optional so defaults can apply.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    protocol: Protocol,
    instance: Option<String>,
    instances: Option<Vec<String>>,
    topology: Option<String>,
    topologies: Option<Vec<String>>,
    embeddings: Option<usize>,
    master_seed: Option<u64>,
    rcs_grid: Option<Vec<f64>>,
    sweeps: Option<usize>,
    sweeps_grid: Option<Vec<usize>>,
    num_reads: Option<usize>,
    repetitions: Option<usize>,
    lambda: Option<f64>,
    lambda_grid: Option<Vec<f64>>,
    embed_tries: Option<usize>,
    timing: Option<Timing>,
    autoscale: Option<bool>,
    clique_template: Option<bool>,
}

/// A validated sweep description. Instance paths are resolved relative to
/// the config file they came from.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub protocol: Protocol,
    pub instances: Vec<PathBuf>,
    pub topologies: Vec<TopologyKind>,
    pub embeddings: usize,
    pub master_seed: u64,
    pub rcs_grid: Vec<f64>,
    pub sweeps: usize,
    pub sweeps_grid: Vec<usize>,
    pub num_reads: usize,
    pub repetitions: usize,
    pub lambda: f64,
    pub lambda_grid: Vec<f64>,
    pub embed_tries: usize,
    pub timing: Timing,
    pub autoscale: bool,
    pub clique_template: bool,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            protocol: Protocol::Rcs,
            instances: Vec::new(),
            topologies: vec![TopologyKind::Chimera { m: 16, n: 16, t: 4 }],
            embeddings: 1,
            master_seed: 0,
            rcs_grid: vec![1.0],
            sweeps: 1000,
            sweeps_grid: Vec::new(),
            num_reads: 100,
            repetitions: 1,
            lambda: 0.0,
            lambda_grid: DEFAULT_LAMBDA_GRID.to_vec(),
            embed_tries: 24,
            timing: Timing::Modeled,
            autoscale: false,
            clique_template: false,
        }
    }
}

fn bad(msg: impl Into<String>) -> Error {
    Error::BadConfig(msg.into())
}

impl SweepConfig {
    pub fn load(path: impl AsRef<Path>) -> Result<SweepConfig> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let raw: RawConfig = toml::from_str(&text).map_err(|e| bad(e.to_string()))?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        let cfg = SweepConfig::from_raw(raw, base)?;
        cfg.check()?;
        Ok(cfg)
    }

    fn from_raw(raw: RawConfig, base: &Path) -> Result<SweepConfig> {
        let d = SweepConfig::default();
        let instances = match (raw.instance, raw.instances, raw.protocol) {
            (Some(one), None, p) if p != Protocol::Scaling => vec![one],
            (None, Some(many), Protocol::Scaling) => many,
            (None, None, _) => Vec::new(),
            (_, _, Protocol::Scaling) => {
                return Err(bad("scaling protocol takes 'instances', not 'instance'"))
            }
            _ => return Err(bad("this protocol takes a single 'instance'")),
        };
        let topologies = match (raw.topology, raw.topologies) {
            (Some(one), None) => vec![one],
            (None, Some(many)) => many,
            (None, None) => return Err(bad("missing 'topology'")),
            (Some(_), Some(_)) => return Err(bad("give 'topology' or 'topologies', not both")),
        };
        Ok(SweepConfig {
            protocol: raw.protocol,
            instances: instances.into_iter().map(|p| base.join(p)).collect(),
            topologies: topologies
                .iter()
                .map(|s| TopologyKind::parse(s))
                .collect::<Result<_>>()?,
            embeddings: raw.embeddings.unwrap_or(d.embeddings),
            master_seed: raw.master_seed.unwrap_or(d.master_seed),
            rcs_grid: raw.rcs_grid.unwrap_or(d.rcs_grid),
            sweeps: raw.sweeps.unwrap_or(d.sweeps),
            sweeps_grid: raw.sweeps_grid.unwrap_or_default(),
            num_reads: raw.num_reads.unwrap_or(d.num_reads),
            repetitions: raw.repetitions.unwrap_or(d.repetitions),
            lambda: raw.lambda.unwrap_or(d.lambda),
            lambda_grid: raw.lambda_grid.unwrap_or(d.lambda_grid),
            embed_tries: raw.embed_tries.unwrap_or(d.embed_tries),
            timing: raw.timing.unwrap_or(d.timing),
            autoscale: raw.autoscale.unwrap_or(d.autoscale),
            clique_template: raw.clique_template.unwrap_or(d.clique_template),
        })
    }

    pub fn check(&self) -> Result<()> {
        if self.instances.is_empty() {
            return Err(bad("no instance given"));
        }
        if self.topologies.is_empty() {
            return Err(bad("no topology given"));
        }
        if self.protocol != Protocol::Scaling {
            if self.instances.len() != 1 {
                return Err(bad("this protocol takes exactly one instance"));
            }
            if self.topologies.len() != 1 {
                return Err(bad("this protocol takes exactly one topology"));
            }
        }
        if self.embeddings == 0 || self.num_reads == 0 || self.sweeps == 0 || self.repetitions == 0
        {
            return Err(bad(
                "embeddings, num_reads, sweeps, and repetitions must all be at least 1",
            ));
        }
        if self.rcs_grid.is_empty() {
            return Err(bad("rcs_grid must not be empty"));
        }
        for &r in &self.rcs_grid {
            if !r.is_finite() || r <= 0.0 {
                return Err(bad(format!("rcs_grid entry {r} must be finite and > 0")));
            }
        }
        if self.protocol == Protocol::Anneal {
            if self.sweeps_grid.is_empty() {
                return Err(bad("anneal protocol requires a sweeps_grid"));
            }
            if self.sweeps_grid.contains(&0) {
                return Err(bad("sweeps_grid entries must be at least 1"));
            }
        }
        for &l in self.lambda_grid.iter().chain([&self.lambda]) {
            if !l.is_finite() || l < 0.0 {
                return Err(bad(format!("lambda {l} must be finite and >= 0")));
            }
        }
        if self.protocol == Protocol::Lambda && self.lambda_grid.is_empty() {
            return Err(bad("lambda protocol requires a lambda_grid"));
        }
        if self.clique_template {
            for t in &self.topologies {
                if !matches!(t, TopologyKind::Chimera { .. }) {
                    return Err(bad(format!("clique_template requires chimera, got {t}")));
                }
            }
        }
        Ok(())
    }
}

/// One sweep cell's outcome. Metric fields are `None` when the cell could
/// not run (no embedding was found); grid coordinates are always present.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub instance: String,
    #[serde(rename = "N")]
    pub n: usize,
    pub topology: String,
    pub embedding_id: usize,
    pub rcs: f64,
    pub sweeps: usize,
    pub num_reads: usize,
    pub repetition: usize,
    pub seed: u64,
    pub success_rate: Option<f64>,
    pub mean_energy: Option<f64>,
    pub min_energy: Option<f64>,
    pub mean_cbf: Option<f64>,
    pub max_chain_len: Option<usize>,
    pub phys_qubits: Option<usize>,
    pub wall_time_ms: Option<u64>,
}

/// Instance compiled at one penalty weight, with whatever ground truth is
/// attainable: the planted optimum at `lambda = 0`, exhaustive enumeration
/// when the model is small enough, nothing otherwise.
struct Prepared {
    label: String,
    n: usize,
    model: IsingModel,
    gt: Option<GroundTruth>,
}

fn prepare(inst: &ExactCoverInstance, stem: &str, lambda: f64) -> Result<Prepared> {
    let m = model::ising_from_instance(inst, lambda)?;
    let gt = if lambda == 0.0 {
        inst.planted().map(|bits| {
            let state = bits
                .iter()
                .enumerate()
                .fold(0u64, |acc, (i, &b)| acc | ((b as u64) << i));
            GroundTruth::planted(0.0, state)
        })
    } else if m.n() <= sampler::BRUTE_FORCE_LIMIT {
        Some(sampler::brute_force(&m, 4)?)
    } else {
        None
    };
    let label = if lambda == 0.0 {
        stem.to_string()
    } else {
        format!("{stem}@lambda={lambda}")
    };
    Ok(Prepared {
        label,
        n: m.n(),
        model: m,
        gt,
    })
}

fn file_stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

/// Grid coordinates of one cell; indices feed the seed path, values feed the
/// run itself.
#[derive(Debug, Clone, Copy)]
struct Cell {
    emb_id: usize,
    rcs_idx: usize,
    rcs: f64,
    sweeps_idx: usize,
    sweeps: usize,
    rep: usize,
}

fn cell_grid(cfg: &SweepConfig) -> Vec<Cell> {
    let mut cells = Vec::new();
    for emb_id in 0..cfg.embeddings.min(usize::MAX) {
        for (rcs_idx, &rcs) in cfg.rcs_grid.iter().enumerate() {
            for rep in 0..cfg.repetitions {
                cells.push(Cell {
                    emb_id,
                    rcs_idx,
                    rcs,
                    sweeps_idx: 0,
                    sweeps: cfg.sweeps,
                    rep,
                });
            }
        }
    }
    cells
}

fn modeled_wall_ms(reads: usize, sweeps: usize, qubits: usize) -> u64 {
    let work = reads as f64 * sweeps as f64 * qubits as f64;
    (work / 1e5).ceil().max(1.0) as u64
}

fn failure_record(cfg: &SweepConfig, prep: &Prepared, topology: &str) -> BenchRecord {
    BenchRecord {
        instance: prep.label.clone(),
        n: prep.n,
        topology: topology.to_string(),
        embedding_id: 0,
        rcs: cfg.rcs_grid[0],
        sweeps: cfg.sweeps,
        num_reads: cfg.num_reads,
        repetition: 0,
        seed: derive_seed(cfg.master_seed, &[stage::SWEEP, 0, 0, 0, 0]),
        success_rate: None,
        mean_energy: None,
        min_energy: None,
        mean_cbf: None,
        max_chain_len: None,
        phys_qubits: None,
        wall_time_ms: None,
    }
}

/// All embeddings used by a sweep; id `i` is seeded from `[EMBED, i]` so the
/// set does not depend on the penalty weight or any other grid axis.
fn sweep_embeddings(
    cfg: &SweepConfig,
    logical: &CouplingGraph,
    hw: &HardwareGraph,
) -> Result<Vec<Embedding>> {
    if cfg.clique_template {
        return Ok(vec![clique_embedding_chimera(logical.n(), hw)?]);
    }
    (0..cfg.embeddings)
        .into_par_iter()
        .map(|i| {
            let params = EmbedParams {
                tries: cfg.embed_tries,
                seed: derive_seed(cfg.master_seed, &[stage::EMBED, i as u64]),
                ..Default::default()
            };
            find_embedding(logical, hw, &params)
        })
        .collect()
}

fn run_cells(
    cfg: &SweepConfig,
    prep: &Prepared,
    hw: &HardwareGraph,
    topology: &str,
    embs: &[Embedding],
    cells: &[Cell],
) -> Result<Vec<(BenchRecord, Option<SampleSet>)>> {
    cells
        .par_iter()
        .map(|cell| {
            let e = &embs[cell.emb_id];
            let seed = derive_seed(
                cfg.master_seed,
                &[
                    stage::SWEEP,
                    cell.emb_id as u64,
                    cell.rcs_idx as u64,
                    cell.sweeps_idx as u64,
                    cell.rep as u64,
                ],
            );
            let phys = embedding::embed_ising(&prep.model, e, hw, cell.rcs, &EmbedOptions::default())?;
            let phys = if cfg.autoscale {
                phys.autoscaled(model::DEFAULT_H_RANGE, model::DEFAULT_J_RANGE, false)?
                    .0
            } else {
                phys
            };
            let params = AnnealParams {
                num_reads: cfg.num_reads,
                sweeps: cell.sweeps,
                seed,
                ..Default::default()
            };
            let ss =
                sampler::sample_embedded(&phys, e, &prep.model, &params, ChainResolution::MajorityVote)?;
            let stats = prep
                .gt
                .as_ref()
                .map(|gt| sampler::success_rate(&ss, gt, sampler::DEFAULT_ENERGY_TOL));
            let reads = ss.num_reads() as f64;
            let mean_cbf = ss
                .samples()
                .iter()
                .map(|s| s.chain_break_fraction * s.num_occurrences as f64)
                .sum::<f64>()
                / reads;
            let wall = match cfg.timing {
                Timing::Modeled => modeled_wall_ms(cfg.num_reads, cell.sweeps, phys.num_qubits()),
                Timing::Measured => ss.wall_time().as_millis() as u64,
            };
            let record = BenchRecord {
                instance: prep.label.clone(),
                n: prep.n,
                topology: topology.to_string(),
                embedding_id: cell.emb_id,
                rcs: cell.rcs,
                sweeps: cell.sweeps,
                num_reads: cfg.num_reads,
                repetition: cell.rep,
                seed,
                success_rate: stats.as_ref().map(|s| s.rate),
                mean_energy: Some(ss.mean_energy()),
                min_energy: Some(ss.min_energy()),
                mean_cbf: Some(mean_cbf),
                max_chain_len: Some(e.max_chain_len()),
                phys_qubits: Some(phys.num_qubits()),
                wall_time_ms: Some(wall),
            };
            Ok((record, Some(ss)))
        })
        .collect()
}

/// Best (embedding, rcs index) over selection cells: highest mean success
/// rate, ties to the lower rcs value, then the lower embedding id. Without
/// ground truth the lowest mean energy wins instead.
fn select_best(cells: &[Cell], results: &[(BenchRecord, Option<SampleSet>)]) -> (usize, usize) {
    struct Group {
        rcs: f64,
        success: Vec<f64>,
        energy: Vec<f64>,
    }
    let mut groups: BTreeMap<(usize, usize), Group> = BTreeMap::new();
    for (cell, (rec, _)) in cells.iter().zip(results) {
        let g = groups.entry((cell.emb_id, cell.rcs_idx)).or_insert(Group {
            rcs: cell.rcs,
            success: Vec::new(),
            energy: Vec::new(),
        });
        if let Some(s) = rec.success_rate {
            g.success.push(s);
        }
        if let Some(e) = rec.mean_energy {
            g.energy.push(e);
        }
    }
    let scored = groups.iter().any(|(_, g)| !g.success.is_empty());
    let mut best: Option<((usize, usize), f64, f64)> = None;
    for (&(emb, rcs_idx), g) in &groups {
        let score = if scored {
            if g.success.is_empty() {
                f64::NEG_INFINITY
            } else {
                mean_std(&g.success).0
            }
        } else if g.energy.is_empty() {
            f64::NEG_INFINITY
        } else {
            -mean_std(&g.energy).0
        };
        let better = match &best {
            None => true,
            Some((bk, bs, br)) => {
                score > *bs
                    || (score == *bs && g.rcs < *br)
                    || (score == *bs && g.rcs == *br && (emb, rcs_idx) < *bk)
            }
        };
        if better {
            best = Some(((emb, rcs_idx), score, g.rcs));
        }
    }
    best.expect("selection over at least one cell").0
}

/// Execute a sweep. `workers = 0` uses one thread per core; any worker count
/// yields identical records. `keep_samples` dumps each returned record's
/// sample set as `cell_<index>.jsonl` in the given directory.
pub fn run_sweep(
    cfg: &SweepConfig,
    workers: usize,
    keep_samples: Option<&Path>,
) -> Result<Vec<BenchRecord>> {
    cfg.check()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| bad(format!("cannot build worker pool: {e}")))?;
    let out = pool.install(|| match cfg.protocol {
        Protocol::Rcs => run_rcs(cfg),
        Protocol::Anneal => run_anneal(cfg),
        Protocol::Lambda => run_lambda(cfg),
        Protocol::Scaling => run_scaling(cfg),
    })?;
    if let Some(dir) = keep_samples {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        for (i, (_, ss)) in out.iter().enumerate() {
            if let Some(ss) = ss {
                ss.save_jsonl(dir.join(format!("cell_{i:05}.jsonl")))?;
            }
        }
    }
    Ok(out.into_iter().map(|(r, _)| r).collect())
}

type CellResults = Vec<(BenchRecord, Option<SampleSet>)>;

fn run_rcs(cfg: &SweepConfig) -> Result<CellResults> {
    let inst = ExactCoverInstance::load(&cfg.instances[0])?;
    let prep = prepare(&inst, &file_stem(&cfg.instances[0]), cfg.lambda)?;
    let hw = cfg.topologies[0].build()?;
    let embs = sweep_embeddings(cfg, &CouplingGraph::from_model(&prep.model), &hw)?;
    let cells = cell_grid(cfg);
    run_cells(cfg, &prep, &hw, &hw.kind().to_string(), &embs, &cells)
}

fn run_anneal(cfg: &SweepConfig) -> Result<CellResults> {
    let inst = ExactCoverInstance::load(&cfg.instances[0])?;
    let prep = prepare(&inst, &file_stem(&cfg.instances[0]), cfg.lambda)?;
    let hw = cfg.topologies[0].build()?;
    let topology = hw.kind().to_string();
    let embs = sweep_embeddings(cfg, &CouplingGraph::from_model(&prep.model), &hw)?;

    let sel_cells = cell_grid(cfg);
    let sel = run_cells(cfg, &prep, &hw, &topology, &embs, &sel_cells)?;
    let (emb_id, rcs_idx) = select_best(&sel_cells, &sel);

    let mut cells = Vec::new();
    for (sweeps_idx, &sweeps) in cfg.sweeps_grid.iter().enumerate() {
        for rep in 0..cfg.repetitions {
            cells.push(Cell {
                emb_id,
                rcs_idx,
                rcs: cfg.rcs_grid[rcs_idx],
                sweeps_idx,
                sweeps,
                rep,
            });
        }
    }
    run_cells(cfg, &prep, &hw, &topology, &embs, &cells)
}

fn run_lambda(cfg: &SweepConfig) -> Result<CellResults> {
    let inst = ExactCoverInstance::load(&cfg.instances[0])?;
    let stem = file_stem(&cfg.instances[0]);
    let hw = cfg.topologies[0].build()?;
    let topology = hw.kind().to_string();
    // the coupling graph is independent of lambda, so one embedding set
    // serves every weight
    let base = model::ising_from_instance(&inst, 0.0)?;
    let embs = sweep_embeddings(cfg, &CouplingGraph::from_model(&base), &hw)?;
    let cells = cell_grid(cfg);
    let mut out = Vec::new();
    for &lambda in &cfg.lambda_grid {
        let prep = prepare(&inst, &stem, lambda)?;
        out.extend(run_cells(cfg, &prep, &hw, &topology, &embs, &cells)?);
    }
    Ok(out)
}

fn run_scaling(cfg: &SweepConfig) -> Result<CellResults> {
    let mut out = Vec::new();
    for path in &cfg.instances {
        let inst = ExactCoverInstance::load(path)?;
        let prep = prepare(&inst, &file_stem(path), cfg.lambda)?;
        for kind in &cfg.topologies {
            let hw = kind.build()?;
            let topology = hw.kind().to_string();
            let embs =
                match sweep_embeddings(cfg, &CouplingGraph::from_model(&prep.model), &hw) {
                    Ok(embs) => embs,
                    Err(
                        Error::NoEmbedding { .. }
                        | Error::CliqueCapacity { .. }
                        | Error::CliqueDeadNode(_),
                    ) => {
                        out.push((failure_record(cfg, &prep, &topology), None));
                        continue;
                    }
                    Err(e) => return Err(e),
                };
            // one evaluation per (embedding, rcs), then the chosen cell is
            // repeated for the record set
            let sel_cells: Vec<Cell> = cfg
                .rcs_grid
                .iter()
                .enumerate()
                .flat_map(|(rcs_idx, &rcs)| {
                    (0..cfg.embeddings).map(move |emb_id| Cell {
                        emb_id,
                        rcs_idx,
                        rcs,
                        sweeps_idx: 0,
                        sweeps: cfg.sweeps,
                        rep: 0,
                    })
                })
                .collect();
            let sel = run_cells(cfg, &prep, &hw, &topology, &embs, &sel_cells)?;
            let (emb_id, rcs_idx) = select_best(&sel_cells, &sel);
            let cells: Vec<Cell> = (0..cfg.repetitions)
                .map(|rep| Cell {
                    emb_id,
                    rcs_idx,
                    rcs: cfg.rcs_grid[rcs_idx],
                    sweeps_idx: 0,
                    sweeps: cfg.sweeps,
                    rep,
                })
                .collect();
            out.extend(run_cells(cfg, &prep, &hw, &topology, &embs, &cells)?);
        }
    }
    Ok(out)
}

fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn opt<T: std::fmt::Display>(v: &Option<T>) -> String {
    v.as_ref().map(|x| x.to_string()).unwrap_or_default()
}

pub fn records_to_csv(records: &[BenchRecord]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            csv_field(&r.instance),
            r.n,
            csv_field(&r.topology),
            r.embedding_id,
            r.rcs,
            r.sweeps,
            r.num_reads,
            r.repetition,
            r.seed,
            opt(&r.success_rate),
            opt(&r.mean_energy),
            opt(&r.min_energy),
            opt(&r.mean_cbf),
            opt(&r.max_chain_len),
            opt(&r.phys_qubits),
            opt(&r.wall_time_ms),
        );
    }
    out
}

/// Split one CSV line, honoring double-quoted fields with doubled quotes.
fn split_csv_line(line: &str) -> Vec<String> {
    let mut fields = Vec::new();
    let mut cur = String::new();
    let mut quoted = false;
    let mut chars = line.chars().peekable();
    while let Some(c) = chars.next() {
        match c {
            '"' if quoted => {
                if chars.peek() == Some(&'"') {
                    chars.next();
                    cur.push('"');
                } else {
                    quoted = false;
                }
            }
            '"' if cur.is_empty() => quoted = true,
            ',' if !quoted => fields.push(std::mem::take(&mut cur)),
            c => cur.push(c),
        }
    }
    fields.push(cur);
    fields
}

fn parse_csv_records(path: &Path, text: &str) -> Result<Vec<BenchRecord>> {
    let err = |line: usize, message: String| Error::ParseRecords {
        path: path.display().to_string(),
        line,
        message,
    };
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header == CSV_HEADER => {}
        _ => return Err(err(1, "header does not match the records format".into())),
    }
    let mut records = Vec::new();
    for (i, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let lineno = i + 1;
        let f = split_csv_line(line);
        if f.len() != 16 {
            return Err(err(lineno, format!("expected 16 fields, got {}", f.len())));
        }
        fn req<T: FromStr>(s: &str, what: &str) -> std::result::Result<T, String> {
            s.parse().map_err(|_| format!("bad {what} '{s}'"))
        }
        fn option<T: FromStr>(s: &str, what: &str) -> std::result::Result<Option<T>, String> {
            if s.is_empty() {
                Ok(None)
            } else {
                req(s, what).map(Some)
            }
        }
        let parse = || -> std::result::Result<BenchRecord, String> {
            Ok(BenchRecord {
                instance: f[0].clone(),
                n: req(&f[1], "N")?,
                topology: f[2].clone(),
                embedding_id: req(&f[3], "embedding_id")?,
                rcs: req(&f[4], "rcs")?,
                sweeps: req(&f[5], "sweeps")?,
                num_reads: req(&f[6], "num_reads")?,
                repetition: req(&f[7], "repetition")?,
                seed: req(&f[8], "seed")?,
                success_rate: option(&f[9], "success_rate")?,
                mean_energy: option(&f[10], "mean_energy")?,
                min_energy: option(&f[11], "min_energy")?,
                mean_cbf: option(&f[12], "mean_cbf")?,
                max_chain_len: option(&f[13], "max_chain_len")?,
                phys_qubits: option(&f[14], "phys_qubits")?,
                wall_time_ms: option(&f[15], "wall_time_ms")?,
            })
        };
        records.push(parse().map_err(|m| err(lineno, m))?);
    }
    Ok(records)
}

/// Read records back from a report file; `.json` is parsed as JSON,
/// anything else as the records CSV.
pub fn read_records(path: impl AsRef<Path>) -> Result<Vec<BenchRecord>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    if path.extension().is_some_and(|e| e == "json") {
        serde_json::from_str(&text).map_err(|e| Error::json(path, e))
    } else {
        parse_csv_records(path, &text)
    }
}

/// Per-cell aggregate over embeddings and repetitions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub instance: String,
    #[serde(rename = "N")]
    pub n: usize,
    pub topology: String,
    pub rcs: f64,
    pub sweeps: usize,
    pub cells: usize,
    pub mean_success: Option<f64>,
    pub std_success: Option<f64>,
    pub mean_energy: Option<f64>,
    pub mean_cbf: Option<f64>,
    pub mean_wall_time_ms: Option<f64>,
}

pub fn summarize(records: &[BenchRecord]) -> Vec<SummaryRow> {
    struct Acc {
        n: usize,
        cells: usize,
        success: Vec<f64>,
        energy: Vec<f64>,
        cbf: Vec<f64>,
        wall: Vec<f64>,
    }
    let mut groups: BTreeMap<(String, String, u64, usize), Acc> = BTreeMap::new();
    for r in records {
        let key = (
            r.instance.clone(),
            r.topology.clone(),
            r.rcs.to_bits(),
            r.sweeps,
        );
        let acc = groups.entry(key).or_insert(Acc {
            n: r.n,
            cells: 0,
            success: Vec::new(),
            energy: Vec::new(),
            cbf: Vec::new(),
            wall: Vec::new(),
        });
        acc.cells += 1;
        if let Some(v) = r.success_rate {
            acc.success.push(v);
        }
        if let Some(v) = r.mean_energy {
            acc.energy.push(v);
        }
        if let Some(v) = r.mean_cbf {
            acc.cbf.push(v);
        }
        if let Some(v) = r.wall_time_ms {
            acc.wall.push(v as f64);
        }
    }
    groups
        .into_iter()
        .map(|((instance, topology, rcs_bits, sweeps), acc)| {
            let stats = |v: &[f64]| {
                if v.is_empty() {
                    (None, None)
                } else {
                    let (m, s) = mean_std(v);
                    (Some(m), Some(s))
                }
            };
            let (mean_success, std_success) = stats(&acc.success);
            SummaryRow {
                instance,
                n: acc.n,
                topology,
                rcs: f64::from_bits(rcs_bits),
                sweeps,
                cells: acc.cells,
                mean_success,
                std_success,
                mean_energy: stats(&acc.energy).0,
                mean_cbf: stats(&acc.cbf).0,
                mean_wall_time_ms: stats(&acc.wall).0,
            }
        })
        .collect()
}

fn summary_to_csv(rows: &[SummaryRow]) -> String {
    let mut out = String::from(SUMMARY_CSV_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            csv_field(&r.instance),
            r.n,
            csv_field(&r.topology),
            r.rcs,
            r.sweeps,
            r.cells,
            opt(&r.mean_success),
            opt(&r.std_success),
            opt(&r.mean_energy),
            opt(&r.mean_cbf),
            opt(&r.mean_wall_time_ms),
        );
    }
    out
}

/// The companion path for a report's summary table: `runs/a.csv` gets
/// `runs/a.summary.csv`.
fn summary_path(path: &Path, format: ReportFormat) -> PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "report".to_string());
    let name = format!("{stem}.summary.{}", format.extension());
    match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.join(name),
        _ => PathBuf::from(name),
    }
}

/// Write the records table plus its `<stem>.summary.<ext>` companion.
pub fn report(records: &[BenchRecord], path: impl AsRef<Path>, format: ReportFormat) -> Result<()> {
    let path = path.as_ref();
    let main = match format {
        ReportFormat::Csv => records_to_csv(records),
        ReportFormat::Json => {
            let mut s =
                serde_json::to_string_pretty(records).map_err(|e| Error::json(path, e))?;
            s.push('\n');
            s
        }
    };
    fs::write(path, main).map_err(|e| Error::io(path, e))?;
    let rows = summarize(records);
    let spath = summary_path(path, format);
    let summary = match format {
        ReportFormat::Csv => summary_to_csv(&rows),
        ReportFormat::Json => {
            let mut s =
                serde_json::to_string_pretty(&rows).map_err(|e| Error::json(&spath, e))?;
            s.push('\n');
            s
        }
    };
    fs::write(&spath, summary).map_err(|e| Error::io(&spath, e))
}

/// Population mean and standard deviation.
pub fn mean_std(v: &[f64]) -> (f64, f64) {
    if v.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / v.len() as f64;
    (mean, var.sqrt())
}

/// Spearman rank correlation with tie-averaged ranks; NaN when either side
/// is constant or the inputs are too short.
pub fn spearman(xs: &[f64], ys: &[f64]) -> f64 {
    if xs.len() != ys.len() || xs.len() < 2 {
        return f64::NAN;
    }
    let rx = ranks(xs);
    let ry = ranks(ys);
    let (mx, sx) = mean_std(&rx);
    let (my, sy) = mean_std(&ry);
    if sx == 0.0 || sy == 0.0 {
        return f64::NAN;
    }
    let cov = rx
        .iter()
        .zip(&ry)
        .map(|(a, b)| (a - mx) * (b - my))
        .sum::<f64>()
        / rx.len() as f64;
    cov / (sx * sy)
}

fn ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut out = vec![0.0; v.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
            j += 1;
        }
        // 1-based ranks, ties averaged
        let rank = (i + 1 + j + 1) as f64 / 2.0;
        for &k in &idx[i..=j] {
            out[k] = rank;
        }
        i = j + 1;
    }
    out
}

/// `points` log-spaced integers from `lo` to `hi` inclusive, deduplicated
/// after rounding; both endpoints are always exact.
pub fn log_spaced(lo: usize, hi: usize, points: usize) -> Vec<usize> {
    let lo = lo.max(1);
    let hi = hi.max(lo);
    if points <= 1 || lo == hi {
        return if lo == hi { vec![lo] } else { vec![lo, hi] };
    }
    let (a, b) = ((lo as f64).ln(), (hi as f64).ln());
    let mut out = Vec::with_capacity(points);
    for i in 0..points {
        let t = i as f64 / (points - 1) as f64;
        let v = ((a + t * (b - a)).exp().round() as usize).clamp(lo, hi);
        if out.last() != Some(&v) {
            out.push(v);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{self, GenerateParams};

    fn tiny_instance(dir: &Path, name: &str, routes: usize, seed: u64) -> PathBuf {
        let inst = instances::generate(&GenerateParams {
            routes,
            flights: 2 * routes,
            solution_size: 2,
            density: 0.5,
            seed,
        })
        .unwrap();
        let path = dir.join(name);
        inst.save(&path).unwrap();
        path
    }

    fn quick_cfg(instance: PathBuf) -> SweepConfig {
        SweepConfig {
            instances: vec![instance],
            topologies: vec![TopologyKind::Chimera { m: 2, n: 2, t: 4 }],
            embeddings: 2,
            master_seed: 17,
            rcs_grid: vec![0.5, 1.0],
            sweeps: 20,
            num_reads: 5,
            repetitions: 2,
            ..Default::default()
        }
    }

    #[test]
    fn config_file_round_trip_and_defaults() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sweep.toml");
        fs::write(
            &path,
            r#"
protocol = "rcs"
instance = "data/tiny.json"
topology = "chimera:2,2,4"
embeddings = 2
master_seed = 9
rcs_grid = [0.25, 0.5]
sweeps = 50
num_reads = 10
repetitions = 2
"#,
        )
        .unwrap();
        let cfg = SweepConfig::load(&path).unwrap();
        assert_eq!(cfg.protocol, Protocol::Rcs);
        assert_eq!(cfg.instances, vec![dir.path().join("data/tiny.json")]);
        assert_eq!(
            cfg.topologies,
            vec![TopologyKind::Chimera { m: 2, n: 2, t: 4 }]
        );
        assert_eq!((cfg.embeddings, cfg.master_seed), (2, 9));
        assert_eq!(cfg.rcs_grid, vec![0.25, 0.5]);
        // defaults fill the rest
        assert_eq!(cfg.timing, Timing::Modeled);
        assert!(!cfg.autoscale && !cfg.clique_template);
        assert_eq!(cfg.embed_tries, 24);
        assert_eq!(cfg.lambda, 0.0);
        assert_eq!(cfg.lambda_grid, DEFAULT_LAMBDA_GRID.to_vec());
    }

    #[test]
    fn config_rejects_misuse() {
        let dir = tempfile::tempdir().unwrap();
        let write = |body: &str| {
            let path = dir.path().join("bad.toml");
            fs::write(&path, body).unwrap();
            SweepConfig::load(&path)
        };
        let base = "instance = \"i.json\"\ntopology = \"chimera:2,2,4\"\n";
        for (body, why) in [
            (format!("protocol = \"rcs\"\n{base}typo = 1"), "unknown key"),
            ("protocol = \"rcs\"\ntopology = \"chimera:2,2,4\"".to_string(), "no instance"),
            (format!("protocol = \"rcs\"\n{base}rcs_grid = [0.0]"), "rcs 0"),
            (format!("protocol = \"rcs\"\n{base}repetitions = 0"), "0 reps"),
            (format!("protocol = \"anneal\"\n{base}"), "no sweeps_grid"),
            (
                "protocol = \"scaling\"\ninstance = \"i.json\"\ntopology = \"chimera:2,2,4\""
                    .to_string(),
                "scaling wants instances",
            ),
            (
                format!("protocol = \"rcs\"\n{base}clique_template = true\ntopologies = [\"pegasus:2\"]"),
                "clique on pegasus",
            ),
            (format!("protocol = \"rcs\"\n{base}lambda = -1.0"), "negative lambda"),
        ] {
            let got = write(&body);
            assert!(got.is_err(), "accepted config with {why}");
        }
    }

    #[test]
    fn csv_round_trip_including_empty_cells() {
        let records = vec![
            BenchRecord {
                instance: "tiny".into(),
                n: 6,
                topology: "chimera(2,2,4)".into(),
                embedding_id: 1,
                rcs: 0.5,
                sweeps: 20,
                num_reads: 5,
                repetition: 0,
                seed: 123456789,
                success_rate: Some(0.8),
                mean_energy: Some(-1.25),
                min_energy: Some(-2.0),
                mean_cbf: Some(0.0),
                max_chain_len: Some(3),
                phys_qubits: Some(11),
                wall_time_ms: Some(1),
            },
            BenchRecord {
                instance: "tiny@lambda=0.00001".into(),
                n: 6,
                topology: "pegasus(2)".into(),
                embedding_id: 0,
                rcs: 1.0,
                sweeps: 20,
                num_reads: 5,
                repetition: 1,
                seed: 42,
                success_rate: None,
                mean_energy: None,
                min_energy: None,
                mean_cbf: None,
                max_chain_len: None,
                phys_qubits: None,
                wall_time_ms: None,
            },
        ];
        let csv = records_to_csv(&records);
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), CSV_HEADER);
        // commas in the topology cell get quoted
        assert!(lines.next().unwrap().contains("\"chimera(2,2,4)\""));

        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("records.csv");
        fs::write(&path, &csv).unwrap();
        assert_eq!(read_records(&path).unwrap(), records);

        let jpath = dir.path().join("records.json");
        fs::write(&jpath, serde_json::to_string(&records).unwrap()).unwrap();
        assert_eq!(read_records(&jpath).unwrap(), records);

        fs::write(&path, "nonsense\n1,2,3\n").unwrap();
        assert!(matches!(
            read_records(&path).unwrap_err(),
            Error::ParseRecords { line: 1, .. }
        ));
    }

    #[test]
    fn rcs_sweep_runs_the_full_grid_in_canonical_order() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = quick_cfg(tiny_instance(dir.path(), "tiny.json", 6, 3));
        let records = run_sweep(&cfg, 1, None).unwrap();
        assert_eq!(records.len(), 2 * 2 * 2); // embeddings x rcs x reps
        let coords: Vec<(usize, f64, usize)> = records
            .iter()
            .map(|r| (r.embedding_id, r.rcs, r.repetition))
            .collect();
        let want: Vec<(usize, f64, usize)> = (0..2)
            .flat_map(|e| {
                [0.5, 1.0]
                    .into_iter()
                    .flat_map(move |r| (0..2).map(move |p| (e, r, p)))
            })
            .collect();
        assert_eq!(coords, want);
        for r in &records {
            assert_eq!(r.instance, "tiny");
            assert_eq!(r.n, 6);
            assert_eq!(r.topology, "chimera(2,2,4)");
            assert!(r.success_rate.is_some(), "planted ground truth applies");
            assert!(r.wall_time_ms.unwrap() >= 1);
            assert!(r.phys_qubits.unwrap() >= 6);
        }
        // modeled timing is a pure function of the grid
        let r0 = &records[0];
        assert_eq!(
            r0.wall_time_ms.unwrap(),
            modeled_wall_ms(cfg.num_reads, cfg.sweeps, r0.phys_qubits.unwrap())
        );
    }

    #[test]
    fn worker_count_does_not_change_results_or_files() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = quick_cfg(tiny_instance(dir.path(), "tiny.json", 6, 3));
        let a = run_sweep(&cfg, 1, None).unwrap();
        let b = run_sweep(&cfg, 4, None).unwrap();
        assert_eq!(a, b);
        let pa = dir.path().join("a.csv");
        let pb = dir.path().join("b.csv");
        report(&a, &pa, ReportFormat::Csv).unwrap();
        report(&b, &pb, ReportFormat::Csv).unwrap();
        assert_eq!(fs::read(&pa).unwrap(), fs::read(&pb).unwrap());
        assert_eq!(
            fs::read(dir.path().join("a.summary.csv")).unwrap(),
            fs::read(dir.path().join("b.summary.csv")).unwrap()
        );
    }

    #[test]
    fn lambda_zero_sweep_equals_plain_sweep() {
        let dir = tempfile::tempdir().unwrap();
        let path = tiny_instance(dir.path(), "tiny.json", 6, 3);
        let plain = quick_cfg(path.clone());
        let lambda = SweepConfig {
            protocol: Protocol::Lambda,
            lambda_grid: vec![0.0],
            ..quick_cfg(path)
        };
        assert_eq!(
            run_sweep(&plain, 2, None).unwrap(),
            run_sweep(&lambda, 2, None).unwrap()
        );
    }

    #[test]
    fn anneal_sweep_reports_only_the_sweeps_grid() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = SweepConfig {
            protocol: Protocol::Anneal,
            sweeps_grid: vec![10, 50],
            ..quick_cfg(tiny_instance(dir.path(), "tiny.json", 6, 3))
        };
        let records = run_sweep(&cfg, 2, None).unwrap();
        assert_eq!(records.len(), 2 * cfg.repetitions);
        let sweeps: Vec<usize> = records.iter().map(|r| r.sweeps).collect();
        assert_eq!(sweeps, vec![10, 10, 50, 50]);
        // one selected cell: a single embedding and rcs across all records
        assert!(records.windows(2).all(|w| {
            w[0].embedding_id == w[1].embedding_id && w[0].rcs == w[1].rcs
        }));
    }

    #[test]
    fn scaling_sweep_emits_failure_rows() {
        let dir = tempfile::tempdir().unwrap();
        let a = tiny_instance(dir.path(), "a.json", 5, 4);
        let b = tiny_instance(dir.path(), "b.json", 6, 5);
        let cfg = SweepConfig {
            protocol: Protocol::Scaling,
            instances: vec![a, b],
            // the second topology has 2 qubits: embedding must fail
            topologies: vec![
                TopologyKind::Chimera { m: 2, n: 2, t: 4 },
                TopologyKind::Chimera { m: 1, n: 1, t: 1 },
            ],
            embeddings: 2,
            master_seed: 17,
            rcs_grid: vec![0.5, 1.0],
            sweeps: 20,
            num_reads: 5,
            repetitions: 2,
            embed_tries: 2,
            ..Default::default()
        };
        let records = run_sweep(&cfg, 2, None).unwrap();
        // per instance: reps on the good topology + one failure row
        assert_eq!(records.len(), 2 * (cfg.repetitions + 1));
        let failures: Vec<&BenchRecord> = records
            .iter()
            .filter(|r| r.success_rate.is_none())
            .collect();
        assert_eq!(failures.len(), 2);
        for f in failures {
            assert_eq!(f.topology, "chimera(1,1,1)");
            assert!(f.phys_qubits.is_none() && f.wall_time_ms.is_none());
        }
        for r in records.iter().filter(|r| r.success_rate.is_some()) {
            assert_eq!(r.topology, "chimera(2,2,4)");
        }
    }

    #[test]
    fn keep_samples_dumps_recomputable_reads() {
        let dir = tempfile::tempdir().unwrap();
        let path = tiny_instance(dir.path(), "tiny.json", 6, 3);
        let cfg = SweepConfig {
            embeddings: 1,
            rcs_grid: vec![1.0],
            repetitions: 2,
            ..quick_cfg(path.clone())
        };
        let samples_dir = dir.path().join("samples");
        let records = run_sweep(&cfg, 1, Some(&samples_dir)).unwrap();
        assert_eq!(records.len(), 2);
        for (i, r) in records.iter().enumerate() {
            let ss = SampleSet::load_jsonl(samples_dir.join(format!("cell_{i:05}.jsonl"))).unwrap();
            assert_eq!(ss.num_reads(), cfg.num_reads);
            let min = ss.min_energy();
            assert!((min - r.min_energy.unwrap()).abs() < 1e-12);
            // stored states are logical: energies recompute on the instance model
            let inst = ExactCoverInstance::load(&path).unwrap();
            let m = model::ising_from_instance(&inst, 0.0).unwrap();
            for s in ss.samples() {
                assert!((m.energy(&s.state).unwrap() - s.energy).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn summary_pools_embeddings_and_reps() {
        let mut records = Vec::new();
        for (emb, rep, rate) in [(0, 0, 0.5), (0, 1, 0.7), (1, 0, 0.9), (1, 1, 0.9)] {
            records.push(BenchRecord {
                instance: "x".into(),
                n: 4,
                topology: "chimera(2,2,4)".into(),
                embedding_id: emb,
                rcs: 0.5,
                sweeps: 100,
                num_reads: 10,
                repetition: rep,
                seed: 1,
                success_rate: Some(rate),
                mean_energy: Some(-1.0),
                min_energy: Some(-2.0),
                mean_cbf: Some(0.1),
                max_chain_len: Some(2),
                phys_qubits: Some(8),
                wall_time_ms: Some(3),
            });
        }
        let rows = summarize(&records);
        assert_eq!(rows.len(), 1);
        let row = &rows[0];
        assert_eq!(row.cells, 4);
        assert!((row.mean_success.unwrap() - 0.75).abs() < 1e-12);
        let (_, want_std) = mean_std(&[0.5, 0.7, 0.9, 0.9]);
        assert!((row.std_success.unwrap() - want_std).abs() < 1e-12);
        assert!((row.mean_wall_time_ms.unwrap() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn helper_oracles() {
        assert_eq!(log_spaced(1, 8, 4), vec![1, 2, 4, 8]);
        let grid = log_spaced(1, 2000, 20);
        assert_eq!(*grid.first().unwrap(), 1);
        assert_eq!(*grid.last().unwrap(), 2000);
        assert!(grid.windows(2).all(|w| w[0] < w[1]));
        assert!(grid.len() >= 15 && grid.len() <= 20);
        assert_eq!(log_spaced(10, 10, 5), vec![10]);

        let (m, s) = mean_std(&[1.0, 2.0, 4.0]);
        assert!((m - 7.0 / 3.0).abs() < 1e-12);
        assert!((s - (14.0f64 / 9.0).sqrt()).abs() < 1e-12);

        assert!((spearman(&[1.0, 2.0, 3.0], &[10.0, 20.0, 30.0]) - 1.0).abs() < 1e-12);
        assert!((spearman(&[1.0, 2.0, 3.0], &[30.0, 20.0, 10.0]) + 1.0).abs() < 1e-12);
        // tie-averaged ranks: x = (1.5, 1.5, 3), correlation sqrt(3)/2
        let rho = spearman(&[1.0, 1.0, 2.0], &[1.0, 2.0, 3.0]);
        assert!((rho - 3.0f64.sqrt() / 2.0).abs() < 1e-12);
        assert!(spearman(&[1.0, 1.0], &[1.0, 2.0]).is_nan());

        assert_eq!(modeled_wall_ms(100, 1000, 300), 300);
        assert_eq!(modeled_wall_ms(1, 1, 1), 1);
    }
}
