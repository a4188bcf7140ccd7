//! Solvers: exhaustive enumeration for small models, simulated annealing as
//! the hardware stand-in, and success-rate bookkeeping.
//!
//! Determinism contract: a run is fully determined by `(model, params)`. Each
//! read draws from its own RNG stream derived from `(seed, read index)`, so
//! reads could execute in any order or in parallel and still produce the same
//! sample set. Energies attached to samples are always recomputed from the
//! model at [`SampleSet`] construction rather than trusted from the solver
//! loop.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::time::{Duration, Instant};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::embedding::{self, ChainResolution, Embedding, PhysicalIsing};
use crate::model::{self, IsingModel, QuboModel};
use crate::rng::{rng_from, stage};
use crate::{Error, Result};

/// Hard cap for exhaustive enumeration (the practical desk limit is lower).
pub const BRUTE_FORCE_LIMIT: usize = 32;

/// Default absolute tolerance when comparing energies to a ground truth.
pub const DEFAULT_ENERGY_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Schedule {
    Geometric,
    Linear,
}

/// Simulated-annealing parameters. `sweeps` is the software analog of the
/// annealing time: each read performs that many full Metropolis passes, one
/// per rung of the inverse-temperature ladder.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnnealParams {
    pub num_reads: usize,
    pub sweeps: usize,
    pub beta_initial: f64,
    /// Final inverse temperature; `None` picks a model-adaptive value, see
    /// [`adaptive_beta_final`].
    pub beta_final: Option<f64>,
    pub schedule: Schedule,
    pub seed: u64,
}

impl Default for AnnealParams {
    fn default() -> Self {
        AnnealParams {
            num_reads: 100,
            sweeps: 1000,
            beta_initial: 0.1,
            beta_final: None,
            schedule: Schedule::Geometric,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Exact enumeration of all states.
    Exhaustive,
    /// Energy of a planted solution, trusted from the generator.
    Planted,
}

/// The known optimum of a model.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth {
    pub minimum_energy: f64,
    /// Optimal states as bit patterns: bit `k` set means qubit `k` is spin +1
    /// (bit 1). Sorted ascending; possibly truncated to the requested cap.
    pub states: Vec<u64>,
    pub truncated: bool,
    pub method: Method,
}

impl GroundTruth {
    /// Ground truth from a planted solution whose energy is known by
    /// construction rather than by enumeration.
    pub fn planted(minimum_energy: f64, state: u64) -> Self {
        GroundTruth {
            minimum_energy,
            states: vec![state],
            truncated: false,
            method: Method::Planted,
        }
    }

    pub fn contains(&self, state: u64) -> bool {
        self.states.binary_search(&state).is_ok()
    }
}

/// Exact minimum over all `2^n` spin states via Gray-code enumeration with
/// incremental energy updates. The running energy is resynced against a full
/// recomputation periodically and at every candidate minimum, so accumulated
/// rounding cannot leak into the reported optimum. At most `cap` optimal
/// states are stored (in enumeration order), `truncated` flags the overflow.
pub fn brute_force(m: &IsingModel, cap: usize) -> Result<GroundTruth> {
    let n = m.n();
    if n > BRUTE_FORCE_LIMIT {
        return Err(Error::BruteForceTooLarge(n));
    }
    let cap = cap.max(1);
    let adj = m.adjacency();
    let h = m.h();

    // Trigger an exact recomputation whenever the drifting incremental energy
    // comes near the incumbent; only exact values decide minima and ties.
    const BAND: f64 = 1e-4;
    const TIE: f64 = 1e-9;
    const RESYNC_MASK: u64 = (1 << 20) - 1;

    let mut spins = vec![-1i8; n];
    let mut state = 0u64;
    let exact = |s: &[i8]| m.energy(s).expect("enumerated spins are valid");
    let mut energy = exact(&spins);
    let mut best = energy;
    let mut states = vec![state];
    let mut truncated = false;

    let total = 1u64 << n;
    for i in 1..total {
        let k = i.trailing_zeros() as usize;
        let mut local = h[k];
        for &(j, v) in &adj[k] {
            local += v * spins[j] as f64;
        }
        energy -= 2.0 * spins[k] as f64 * local;
        spins[k] = -spins[k];
        state ^= 1u64 << k;
        if i & RESYNC_MASK == 0 {
            energy = exact(&spins);
        }
        if energy <= best + BAND {
            energy = exact(&spins);
            if energy < best - TIE {
                best = energy;
                states.clear();
                states.push(state);
                truncated = false;
            } else if (energy - best).abs() <= TIE {
                if states.len() < cap {
                    states.push(state);
                } else {
                    truncated = true;
                }
            }
        }
    }
    states.sort_unstable();
    Ok(GroundTruth {
        minimum_energy: best,
        states,
        truncated,
        method: Method::Exhaustive,
    })
}

/// [`brute_force`] for a QUBO: enumerates the spin-space image and reports
/// the minimum re-evaluated with the QUBO's own arithmetic. The bit
/// convention matches everywhere: bit `k` of a state is `x_k`.
pub fn brute_force_qubo(q: &QuboModel, cap: usize) -> Result<GroundTruth> {
    let mut gt = brute_force(&model::qubo_to_ising(q), cap)?;
    let n = q.n();
    let mut min = f64::INFINITY;
    for &s in &gt.states {
        let bits: Vec<u8> = (0..n).map(|k| ((s >> k) & 1) as u8).collect();
        min = min.min(q.energy(&bits)?);
    }
    gt.minimum_energy = min;
    Ok(gt)
}

/// One read's worth of a sample set.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub state: Vec<i8>,
    pub energy: f64,
    pub num_occurrences: usize,
    /// Fraction of this read's chains that came back inconsistent; zero for
    /// unembedded sampling.
    pub chain_break_fraction: f64,
}

/// A batch of reads with recomputed energies. Construction enforces the
/// honesty rules: non-empty, energies recomputed from the model, occurrence
/// counts positive, chain-break fractions in [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    samples: Vec<Sample>,
    wall_time: Duration,
    params: Option<AnnealParams>,
}

impl SampleSet {
    pub fn new(
        model: &IsingModel,
        mut samples: Vec<Sample>,
        wall_time: Duration,
        params: Option<AnnealParams>,
    ) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::EmptySampleSet);
        }
        for s in &mut samples {
            s.energy = model.energy(&s.state)?;
            if s.num_occurrences == 0 {
                return Err(Error::InvalidAnnealParams(
                    "sample with zero occurrences".into(),
                ));
            }
            if !(0.0..=1.0).contains(&s.chain_break_fraction) {
                return Err(Error::InvalidAnnealParams(format!(
                    "chain break fraction {} outside [0, 1]",
                    s.chain_break_fraction
                )));
            }
        }
        Ok(SampleSet {
            samples,
            wall_time,
            params,
        })
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        false // construction rejects empty sets
    }

    /// Total reads, `sum(num_occurrences)`.
    pub fn num_reads(&self) -> usize {
        self.samples.iter().map(|s| s.num_occurrences).sum()
    }

    pub fn wall_time(&self) -> Duration {
        self.wall_time
    }

    pub fn params(&self) -> Option<&AnnealParams> {
        self.params.as_ref()
    }

    pub fn min_energy(&self) -> f64 {
        self.samples
            .iter()
            .map(|s| s.energy)
            .fold(f64::INFINITY, f64::min)
    }

    /// Occurrence-weighted mean energy.
    pub fn mean_energy(&self) -> f64 {
        let total = self.num_reads() as f64;
        self.samples
            .iter()
            .map(|s| s.energy * s.num_occurrences as f64)
            .sum::<f64>()
            / total
    }

    /// Occurrence-weighted mean chain-break fraction.
    pub fn mean_chain_break(&self) -> f64 {
        let total = self.num_reads() as f64;
        self.samples
            .iter()
            .map(|s| s.chain_break_fraction * s.num_occurrences as f64)
            .sum::<f64>()
            / total
    }

    /// Merge reads with identical states, summing occurrences and averaging
    /// chain-break fractions by weight. Sorted by energy, then state.
    pub fn aggregate(&self) -> SampleSet {
        let mut merged: Vec<Sample> = Vec::new();
        for s in &self.samples {
            match merged.iter_mut().find(|m| m.state == s.state) {
                Some(m) => {
                    let w_old = m.num_occurrences as f64;
                    let w_new = s.num_occurrences as f64;
                    m.chain_break_fraction = (m.chain_break_fraction * w_old
                        + s.chain_break_fraction * w_new)
                        / (w_old + w_new);
                    m.num_occurrences += s.num_occurrences;
                }
                None => merged.push(s.clone()),
            }
        }
        merged.sort_by(|a, b| {
            a.energy
                .total_cmp(&b.energy)
                .then_with(|| a.state.cmp(&b.state))
        });
        SampleSet {
            samples: merged,
            wall_time: self.wall_time,
            params: self.params,
        }
    }

    /// One read per line: `{"state":"+-+...","energy":...,"n_occ":...,"cbf":...}`.
    pub fn save_jsonl(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut out = String::new();
        for s in &self.samples {
            let record = ReadRecord {
                state: s.state.iter().map(|&v| if v == 1 { '+' } else { '-' }).collect(),
                energy: s.energy,
                n_occ: s.num_occurrences,
                cbf: s.chain_break_fraction,
            };
            let line = serde_json::to_string(&record).map_err(|e| Error::json(path, e))?;
            let _ = writeln!(out, "{line}");
        }
        fs::write(path, out).map_err(|e| Error::io(path, e))
    }

    /// Read back a [`save_jsonl`] file. Energies are taken from the file
    /// (there is no model here to recompute them); wall time and params are
    /// not part of the export and come back empty.
    pub fn load_jsonl(path: impl AsRef<Path>) -> Result<SampleSet> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut samples = Vec::new();
        for line in text.lines() {
            if line.trim().is_empty() {
                continue;
            }
            let record: ReadRecord =
                serde_json::from_str(line).map_err(|e| Error::json(path, e))?;
            let mut state = Vec::with_capacity(record.state.len());
            for ch in record.state.chars() {
                match ch {
                    '+' => state.push(1),
                    '-' => state.push(-1),
                    other => {
                        return Err(Error::InvalidInstance(format!(
                            "sample state contains '{other}', expected '+' or '-'"
                        )))
                    }
                }
            }
            samples.push(Sample {
                state,
                energy: record.energy,
                num_occurrences: record.n_occ,
                chain_break_fraction: record.cbf,
            });
        }
        if samples.is_empty() {
            return Err(Error::EmptySampleSet);
        }
        Ok(SampleSet {
            samples,
            wall_time: Duration::ZERO,
            params: None,
        })
    }
}

#[derive(Serialize, Deserialize)]
struct ReadRecord {
    state: String,
    energy: f64,
    n_occ: usize,
    cbf: f64,
}

/// Success statistics of a sample set against a known optimum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuccessStats {
    /// Fraction of reads with `|energy - minimum| <= tol`. Any state at the
    /// minimum counts; degenerate optima are all successes.
    pub rate: f64,
    /// Occurrence-weighted mean energy over all reads.
    pub mean_energy: f64,
    /// Occurrence-weighted population standard deviation of read energies.
    pub std_energy: f64,
}

/// Compare read energies against `ground.minimum_energy` with absolute
/// tolerance `tol` ([`DEFAULT_ENERGY_TOL`] is the conventional choice).
/// Sample sets are non-empty by construction, so this total function replaces
/// an empty-set error path.
pub fn success_rate(ss: &SampleSet, ground: &GroundTruth, tol: f64) -> SuccessStats {
    let total = ss.num_reads() as f64;
    let mut hits = 0usize;
    for s in ss.samples() {
        if (s.energy - ground.minimum_energy).abs() <= tol {
            hits += s.num_occurrences;
        }
    }
    let mean = ss.mean_energy();
    let var = ss
        .samples()
        .iter()
        .map(|s| (s.energy - mean).powi(2) * s.num_occurrences as f64)
        .sum::<f64>()
        / total;
    SuccessStats {
        rate: hits as f64 / total,
        mean_energy: mean,
        std_energy: var.sqrt(),
    }
}

/// Final inverse temperature chosen so that even the smallest coefficient in
/// the model is frozen by the end of the schedule: the cheapest nonzero
/// single-term flip costs `2 * min|coeff|`, and the returned beta accepts it
/// with probability at most 1/1000. Never below `2 * beta_initial`.
pub fn adaptive_beta_final(m: &IsingModel, beta_initial: f64) -> f64 {
    let mut min_term = f64::INFINITY;
    for &v in m.h() {
        if v != 0.0 {
            min_term = min_term.min(v.abs());
        }
    }
    for (_, _, v) in m.couplers() {
        min_term = min_term.min(v.abs());
    }
    let delta = if min_term.is_finite() { 2.0 * min_term } else { 1.0 };
    (1000f64.ln() / delta).max(2.0 * beta_initial)
}

fn beta_ladder(m: &IsingModel, p: &AnnealParams) -> Result<Vec<f64>> {
    let bi = p.beta_initial;
    let bf = p.beta_final.unwrap_or_else(|| adaptive_beta_final(m, bi));
    if !(bf > bi) {
        return Err(Error::InvalidAnnealParams(format!(
            "beta_final {bf} must exceed beta_initial {bi}"
        )));
    }
    let s = p.sweeps;
    if s == 1 {
        return Ok(vec![bf]);
    }
    let steps = (s - 1) as f64;
    Ok(match p.schedule {
        Schedule::Geometric => {
            let ratio = bf / bi;
            (0..s).map(|t| bi * ratio.powf(t as f64 / steps)).collect()
        }
        Schedule::Linear => (0..s).map(|t| bi + (bf - bi) * t as f64 / steps).collect(),
    })
}

fn validate_params(p: &AnnealParams) -> Result<()> {
    if p.num_reads == 0 {
        return Err(Error::InvalidAnnealParams("num_reads must be >= 1".into()));
    }
    if p.sweeps == 0 {
        return Err(Error::InvalidAnnealParams("sweeps must be >= 1".into()));
    }
    if !(p.beta_initial.is_finite() && p.beta_initial > 0.0) {
        return Err(Error::InvalidAnnealParams(format!(
            "beta_initial {} must be a positive finite number",
            p.beta_initial
        )));
    }
    if let Some(bf) = p.beta_final {
        if !bf.is_finite() {
            return Err(Error::InvalidAnnealParams(format!(
                "beta_final {bf} must be finite"
            )));
        }
    }
    Ok(())
}

/// Simulated annealing: `num_reads` independent restarts from uniform random
/// spins, each performing `sweeps` Metropolis passes in fixed qubit order,
/// one pass per rung of the beta ladder.
pub fn simulated_anneal(m: &IsingModel, p: &AnnealParams) -> Result<SampleSet> {
    validate_params(p)?;
    let betas = beta_ladder(m, p)?;
    let adj = m.adjacency();
    let h = m.h();
    let n = m.n();
    let start = Instant::now();
    let mut samples = Vec::with_capacity(p.num_reads);
    for r in 0..p.num_reads {
        let mut rng = rng_from(p.seed, &[stage::READ, r as u64]);
        let mut spins: Vec<i8> = (0..n)
            .map(|_| if rng.random::<bool>() { 1 } else { -1 })
            .collect();
        for &beta in &betas {
            for k in 0..n {
                let mut local = h[k];
                for &(j, v) in &adj[k] {
                    local += v * spins[j] as f64;
                }
                let delta = -2.0 * spins[k] as f64 * local;
                if delta <= 0.0 || rng.random::<f64>() < (-beta * delta).exp() {
                    spins[k] = -spins[k];
                }
            }
        }
        samples.push(Sample {
            state: spins,
            energy: 0.0, // recomputed below
            num_occurrences: 1,
            chain_break_fraction: 0.0,
        });
    }
    SampleSet::new(m, samples, start.elapsed(), Some(*p))
}

///// Anneal the physical model, then map every read back to logical variables:
/// each chain is resolved per `resolution`, the read's chain-break fraction is
/// the fraction of inconsistent chains, and energies are recomputed on the
/// logical model.
pub fn sample_embedded(
    phys: &PhysicalIsing,
    e: &Embedding,
    m: &IsingModel,
    p: &AnnealParams,
    resolution: ChainResolution,
) -> Result<SampleSet> {
    if e.chains().len() != m.n() {
        return Err(Error::DimensionMismatch {
            context: "embedding chains vs logical model".into(),
            expected: m.n(),
            got: e.chains().len(),
        });
    }
    let raw = simulated_anneal(phys.model(), p)?;
    let mut out = Vec::with_capacity(raw.len());
    for s in raw.samples() {
        let (state, cbf) = embedding::unembed_sample(phys, e, &s.state, resolution)?;
        out.push(Sample {
            state,
            energy: 0.0, // recomputed against the logical model below
            num_occurrences: s.num_occurrences,
            chain_break_fraction: cbf,
        });
    }
    SampleSet::new(m, out, raw.wall_time(), raw.params().copied())
}
