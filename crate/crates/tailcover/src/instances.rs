//! Set-partitioning instances with a planted exact cover.
//!
//! An instance is a 0/1 matrix `A` with one row per route and one column per
//! flight. A subset of routes is an exact cover when every flight is covered
//! exactly once. The generator plants a random partition of the flights into
//! `solution_size` routes and fills the remaining rows with decoys, each built
//! from fragments of at least two different planted routes so that picking any
//! decoy conflicts with the planted cover.
//!
//! For instances with at most [`CERTIFY_LIMIT`] routes the planted cover is
//! certified unique by exhaustive enumeration (decoys are regenerated until it
//! is). Larger instances get a budget of simulated-annealing attacks instead;
//! if an attack ever finds a second ground state the decoys are regenerated,
//! and the stored status stays `heuristic`.

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::rng::{derive_seed, rng_from, stage, Prng};
use crate::sampler::{self, AnnealParams};
use crate::{model, Error, Result};

/// Largest route count for which uniqueness is certified by brute force.
pub const CERTIFY_LIMIT: usize = 25;

/// Default cost range for [`attach_costs`].
pub const DEFAULT_COST_RANGE: (f64, f64) = (1e4, 1e6);

const MAX_ATTEMPTS: usize = 64;
const TUNING_ITERATIONS: usize = 10;
/// Ceiling on flights taken per sampled route before widening the source set.
const MAX_TAKE: usize = 12;
const ATTACK_READS: usize = 16;
const ATTACK_SWEEPS: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Uniqueness {
    /// Proven by exhaustive enumeration.
    Certified,
    /// Survived a budget of simulated-annealing attacks.
    Heuristic,
    /// Not checked (hand-built instances).
    Unknown,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneratorParams {
    pub routes: usize,
    pub flights: usize,
    pub solution_size: usize,
    pub density: f64,
}

/// Parameters for [`generate`].
#[derive(Debug, Clone, Copy)]
pub struct GenerateParams {
    /// Number of routes `R` (the logical qubit count).
    pub routes: usize,
    /// Number of flights `F` (constraints).
    pub flights: usize,
    /// Number of routes in the planted cover.
    pub solution_size: usize,
    /// Target fraction of route pairs that share a flight, in (0, 1].
    /// Approximate: pairs of planted routes never overlap, so the reachable
    /// maximum is `1 - C(k,2)/C(R,2)`.
    pub density: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactCoverInstance {
    #[serde(rename = "R")]
    routes: usize,
    #[serde(rename = "F")]
    flights: usize,
    matrix: Vec<Vec<u8>>,
    costs: Option<Vec<f64>>,
    planted: Option<Vec<u8>>,
    uniqueness: Uniqueness,
    seed: u64,
    generator_params: Option<GeneratorParams>,
}

impl ExactCoverInstance {
    /// Build an instance from a routes-by-flights 0/1 matrix. No planted
    /// solution or costs; uniqueness status is `unknown`.
    pub fn new(matrix: Vec<Vec<u8>>) -> Result<Self> {
        let routes = matrix.len();
        let flights = matrix.first().map_or(0, |r| r.len());
        let inst = ExactCoverInstance {
            routes,
            flights,
            matrix,
            costs: None,
            planted: None,
            uniqueness: Uniqueness::Unknown,
            seed: 0,
            generator_params: None,
        };
        inst.validate()?;
        Ok(inst)
    }

    pub fn routes(&self) -> usize {
        self.routes
    }

    pub fn flights(&self) -> usize {
        self.flights
    }

    pub fn matrix(&self) -> &[Vec<u8>] {
        &self.matrix
    }

    pub fn row(&self, i: usize) -> &[u8] {
        &self.matrix[i]
    }

    pub fn costs(&self) -> Option<&[f64]> {
        self.costs.as_deref()
    }

    pub fn planted(&self) -> Option<&[u8]> {
        self.planted.as_deref()
    }

    pub fn uniqueness(&self) -> Uniqueness {
        self.uniqueness
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn generator_params(&self) -> Option<&GeneratorParams> {
        self.generator_params.as_ref()
    }

    /// Number of flights shared by routes `i` and `j`.
    pub fn overlap(&self, i: usize, j: usize) -> usize {
        self.matrix[i]
            .iter()
            .zip(&self.matrix[j])
            .filter(|(a, b)| **a == 1 && **b == 1)
            .count()
    }

    /// Count of route pairs `i < j` sharing at least one flight. These are
    /// exactly the nonzero couplers of the compiled models.
    pub fn nonzero_couplers(&self) -> usize {
        let rows = bitset_rows(&self.matrix);
        count_overlapping_pairs(&rows)
    }

    /// Fraction of the `C(R,2)` route pairs that share a flight.
    pub fn density(&self) -> f64 {
        if self.routes < 2 {
            return 0.0;
        }
        let pairs = self.routes * (self.routes - 1) / 2;
        self.nonzero_couplers() as f64 / pairs as f64
    }

    /// Structural checks: rectangular 0/1 matrix, every flight covered by at
    /// least one route, every route covering at least one flight, cost and
    /// planted vectors consistent (the planted selection must be an exact
    /// cover).
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidInstance(msg));
        if self.routes == 0 || self.flights == 0 {
            return bad("instance must have at least one route and one flight".into());
        }
        if self.matrix.len() != self.routes {
            return bad(format!(
                "matrix has {} rows, R = {}",
                self.matrix.len(),
                self.routes
            ));
        }
        for (i, row) in self.matrix.iter().enumerate() {
            if row.len() != self.flights {
                return bad(format!("row {} has {} columns, F = {}", i, row.len(), self.flights));
            }
            if let Some(v) = row.iter().find(|v| **v > 1) {
                return bad(format!("row {i} contains entry {v}, expected 0 or 1"));
            }
            if row.iter().all(|v| *v == 0) {
                return bad(format!("route {i} covers no flight"));
            }
        }
        for f in 0..self.flights {
            if self.matrix.iter().all(|row| row[f] == 0) {
                return bad(format!("flight {f} is covered by no route"));
            }
        }
        if let Some(costs) = &self.costs {
            if costs.len() != self.routes {
                return bad(format!("{} costs for {} routes", costs.len(), self.routes));
            }
            if let Some(c) = costs.iter().find(|c| !c.is_finite() || **c <= 0.0) {
                return bad(format!("cost {c} is not a positive finite number"));
            }
        }
        if let Some(planted) = &self.planted {
            if planted.len() != self.routes {
                return bad(format!(
                    "planted vector has length {}, R = {}",
                    planted.len(),
                    self.routes
                ));
            }
            if let Some(v) = planted.iter().find(|v| **v > 1) {
                return bad(format!("planted vector contains entry {v}"));
            }
            for f in 0..self.flights {
                let covered: usize = (0..self.routes)
                    .filter(|&i| planted[i] == 1)
                    .map(|i| self.matrix[i][f] as usize)
                    .sum();
                if covered != 1 {
                    return bad(format!(
                        "planted selection covers flight {f} {covered} times, expected exactly once"
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let text = serde_json::to_string(self).map_err(|e| Error::json(path, e))?;
        fs::write(path, text).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let inst: ExactCoverInstance =
            serde_json::from_str(&text).map_err(|e| Error::json(path, e))?;
        inst.validate()?;
        Ok(inst)
    }
}

/// Return a copy of `inst` with fresh route costs drawn uniformly from
/// `range`. The costs only enter compiled models through the cost weight, so
/// the zero-weight model is unchanged by this.
pub fn attach_costs(
    inst: &ExactCoverInstance,
    seed: u64,
    range: (f64, f64),
) -> Result<ExactCoverInstance> {
    let (lo, hi) = range;
    if !(lo.is_finite() && hi.is_finite()) || lo <= 0.0 || hi < lo {
        return Err(Error::InvalidInstance(format!(
            "cost range ({lo}, {hi}) must satisfy 0 < lo <= hi"
        )));
    }
    let mut rng = rng_from(seed, &[stage::COSTS]);
    let costs = (0..inst.routes)
        .map(|_| {
            if lo == hi {
                lo
            } else {
                rng.random_range(lo..hi)
            }
        })
        .collect();
    let mut out = inst.clone();
    out.costs = Some(costs);
    out.validate()?;
    Ok(out)
}

/// Generate an instance with a planted exact cover. See the module docs for
/// the construction and the uniqueness policy.
pub fn generate(p: &GenerateParams) -> Result<ExactCoverInstance> {
    let (r, f, k) = (p.routes, p.flights, p.solution_size);
    if k == 0 || k > r {
        return Err(Error::Generation(format!(
            "solution size {k} must satisfy 1 <= k <= routes ({r})"
        )));
    }
    if f < k {
        return Err(Error::Generation(format!(
            "{f} flights cannot be partitioned into {k} nonempty routes"
        )));
    }
    if r > k && k < 2 {
        return Err(Error::Generation(
            "decoys draw fragments from >= 2 planted routes, so solution_size must be >= 2 \
             when routes > solution_size"
                .into(),
        ));
    }
    if !(p.density > 0.0 && p.density <= 1.0) {
        return Err(Error::Generation(format!(
            "density {} must lie in (0, 1]",
            p.density
        )));
    }

    for attempt in 0..MAX_ATTEMPTS as u64 {
        let (matrix, planted) = build_matrix(p, attempt);
        let inst = ExactCoverInstance {
            routes: r,
            flights: f,
            matrix,
            costs: None,
            planted: Some(planted.clone()),
            uniqueness: Uniqueness::Unknown,
            seed: p.seed,
            generator_params: Some(GeneratorParams {
                routes: r,
                flights: f,
                solution_size: k,
                density: p.density,
            }),
        };
        inst.validate()?;

        if r <= CERTIFY_LIMIT {
            if certify_unique(&inst, &planted)? {
                let mut inst = inst;
                inst.uniqueness = Uniqueness::Certified;
                return Ok(inst);
            }
        } else if survives_attacks(&inst, &planted, attempt)? {
            let mut inst = inst;
            inst.uniqueness = Uniqueness::Heuristic;
            return Ok(inst);
        }
    }
    Err(Error::Generation(format!(
        "no instance with a unique planted cover after {MAX_ATTEMPTS} attempts \
         (routes={r}, flights={f}, solution_size={k}, density={})",
        p.density
    )))
}

/// Exhaustively check that the planted cover is the only exact cover.
fn certify_unique(inst: &ExactCoverInstance, planted: &[u8]) -> Result<bool> {
    let ising = model::ising_from_instance(inst, 0.0)?;
    let gt = sampler::brute_force(&ising, 4)?;
    if gt.minimum_energy.abs() > 1e-9 {
        // The planted cover always has energy zero; anything else is a bug.
        return Err(Error::Generation(format!(
            "planted instance has ground energy {}, expected 0",
            gt.minimum_energy
        )));
    }
    let planted_state = bits_to_state(planted);
    Ok(gt.states.len() == 1 && gt.states[0] == planted_state)
}

/// Run a budget of simulated-annealing attacks; true when no attack finds a
/// zero-energy state different from the planted one.
fn survives_attacks(inst: &ExactCoverInstance, planted: &[u8], attempt: u64) -> Result<bool> {
    let ising = model::ising_from_instance(inst, 0.0)?;
    let params = AnnealParams {
        num_reads: ATTACK_READS,
        sweeps: ATTACK_SWEEPS,
        seed: derive_seed(inst.seed, &[stage::ATTACK, attempt]),
        ..AnnealParams::default()
    };
    let samples = sampler::simulated_anneal(&ising, &params)?;
    let planted_spins: Vec<i8> = planted.iter().map(|&b| if b == 1 { 1 } else { -1 }).collect();
    for s in samples.samples() {
        if s.energy.abs() <= 1e-9 && s.state != planted_spins {
            return Ok(false);
        }
    }
    Ok(true)
}

fn bits_to_state(bits: &[u8]) -> u64 {
    bits.iter()
        .enumerate()
        .fold(0u64, |acc, (i, &b)| acc | ((b as u64) << i))
}

/// One full construction attempt: plant a partition, then tune decoy fragment
/// sizes toward the requested coupler density.
fn build_matrix(p: &GenerateParams, attempt: u64) -> (Vec<Vec<u8>>, Vec<u8>) {
    let (r, f, k) = (p.routes, p.flights, p.solution_size);
    let mut rng = rng_from(p.seed, &[stage::GENERATE, attempt]);

    // Partition the flights into k nonempty, roughly even parts.
    let mut flights_perm: Vec<u32> = (0..f as u32).collect();
    flights_perm.shuffle(&mut rng);
    let mut sizes = vec![f / k; k];
    for s in sizes.iter_mut().take(f % k) {
        *s += 1;
    }
    sizes.shuffle(&mut rng);
    for _ in 0..k {
        let a = rng.random_range(0..k);
        let b = rng.random_range(0..k);
        if a != b && sizes[a] > 1 {
            sizes[a] -= 1;
            sizes[b] += 1;
        }
    }
    let mut solution: Vec<Vec<u32>> = Vec::with_capacity(k);
    let mut at = 0;
    for &s in &sizes {
        solution.push(flights_perm[at..at + s].to_vec());
        at += s;
    }

    // Scatter the planted routes among the R row positions.
    let mut positions: Vec<usize> = (0..r).collect();
    positions.shuffle(&mut rng);
    let solution_pos = &positions[..k];
    let decoy_pos = &positions[k..];

    let mut planted = vec![0u8; r];
    for &pos in solution_pos {
        planted[pos] = 1;
    }

    let d = r - k;
    if d == 0 {
        let mut matrix = vec![vec![0u8; f]; r];
        for (route, &pos) in solution.iter().zip(solution_pos) {
            for &fl in route {
                matrix[pos][fl as usize] = 1;
            }
        }
        return (matrix, planted);
    }

    // Decoy knobs: how many planted routes each decoy samples from, and how
    // many flights it takes from each. Takes start at one flight and grow
    // only while the coupler density falls short. Growing takes instead of
    // fractions keeps per-flight cover counts low, which keeps the compiled
    // coefficients near the magnitude of the planted rows themselves.
    let pairs_total = r * (r - 1) / 2;
    let target_pairs = (p.density * pairs_total as f64).round() as usize;
    let mut n_src = ((p.density * k as f64).round() as usize).clamp(2, k);
    let mut take = 1usize;

    let mut best: Option<(usize, Vec<Vec<u32>>)> = None;
    for iter in 0..TUNING_ITERATIONS as u64 {
        let mut sub = rng_from(p.seed, &[stage::GENERATE, attempt, iter]);
        let decoys = build_decoys(&solution, d, n_src, take, &mut sub);
        let mut rows = bitset_rows_u32(&solution, f);
        rows.extend(bitset_rows_u32(&decoys, f));
        let pairs = count_overlapping_pairs(&rows);
        let gap = pairs.abs_diff(target_pairs);
        if best.as_ref().map_or(true, |(g, _)| gap < *g) {
            best = Some((gap, decoys));
        }
        if gap * 50 <= pairs_total {
            break; // within 2% of the target
        }
        if pairs < target_pairs {
            if take < MAX_TAKE {
                take += 1;
            } else if n_src < k {
                n_src += 1;
            }
        } else if take > 1 {
            take -= 1;
        } else if n_src > 2 {
            n_src -= 1;
        }
    }
    let decoys = best.expect("at least one tuning iteration ran").1;

    let mut matrix = vec![vec![0u8; f]; r];
    for (route, &pos) in solution.iter().zip(solution_pos) {
        for &fl in route {
            matrix[pos][fl as usize] = 1;
        }
    }
    for (route, &pos) in decoys.iter().zip(decoy_pos) {
        for &fl in route {
            matrix[pos][fl as usize] = 1;
        }
    }
    (matrix, planted)
}

/// Each decoy is the union of small fragments of `n_src` distinct planted
/// routes, so it shares flights with (conflicts with) all of them without
/// swallowing any whole one. `take` flights come from each sampled route,
/// capped at a third of the route so no flight ends up on many decoys.
fn build_decoys(
    solution: &[Vec<u32>],
    count: usize,
    n_src: usize,
    take: usize,
    rng: &mut Prng,
) -> Vec<Vec<u32>> {
    let k = solution.len();
    let mut seen: BTreeSet<Vec<u32>> = BTreeSet::new();
    let mut decoys = Vec::with_capacity(count);
    for _ in 0..count {
        let mut decoy = Vec::new();
        for retry in 0..8 {
            decoy.clear();
            let mut srcs: Vec<usize> = (0..k).collect();
            srcs.shuffle(rng);
            for &s in srcs.iter().take(n_src.max(2)) {
                let route = &solution[s];
                let t = take.min(route.len().div_ceil(3)).max(1);
                let mut idx: Vec<usize> = (0..route.len()).collect();
                idx.shuffle(rng);
                decoy.extend(idx[..t].iter().map(|&i| route[i]));
            }
            decoy.sort_unstable();
            decoy.dedup();
            if !seen.contains(&decoy) || retry == 7 {
                break;
            }
        }
        seen.insert(decoy.clone());
        decoys.push(decoy);
    }
    decoys
}

fn bitset_rows(matrix: &[Vec<u8>]) -> Vec<Vec<u64>> {
    let f = matrix.first().map_or(0, |r| r.len());
    let words = f.div_ceil(64);
    matrix
        .iter()
        .map(|row| {
            let mut bits = vec![0u64; words];
            for (fl, &v) in row.iter().enumerate() {
                if v == 1 {
                    bits[fl / 64] |= 1 << (fl % 64);
                }
            }
            bits
        })
        .collect()
}

fn bitset_rows_u32(routes: &[Vec<u32>], f: usize) -> Vec<Vec<u64>> {
    let words = f.div_ceil(64);
    routes
        .iter()
        .map(|route| {
            let mut bits = vec![0u64; words];
            for &fl in route {
                bits[fl as usize / 64] |= 1 << (fl % 64);
            }
            bits
        })
        .collect()
}

fn count_overlapping_pairs(rows: &[Vec<u64>]) -> usize {
    let mut pairs = 0;
    for i in 0..rows.len() {
        for j in i + 1..rows.len() {
            if rows[i].iter().zip(&rows[j]).any(|(a, b)| a & b != 0) {
                pairs += 1;
            }
        }
    }
    pairs
}

#[cfg(test)]
mod tests {
    use super::*;

    fn identity2() -> ExactCoverInstance {
        ExactCoverInstance::new(vec![vec![1, 0], vec![0, 1]]).unwrap()
    }

    #[test]
    fn rejects_uncovered_flight() {
        let err = ExactCoverInstance::new(vec![vec![1, 0], vec![1, 0]]).unwrap_err();
        assert!(err.to_string().contains("flight 1"));
    }

    #[test]
    fn rejects_empty_route() {
        let err = ExactCoverInstance::new(vec![vec![1, 1], vec![0, 0]]).unwrap_err();
        assert!(err.to_string().contains("route 1"));
    }

    #[test]
    fn rejects_ragged_matrix() {
        assert!(ExactCoverInstance::new(vec![vec![1, 1], vec![1]]).is_err());
    }

    #[test]
    fn smallest_planted_instance() {
        let inst = generate(&GenerateParams {
            routes: 2,
            flights: 2,
            solution_size: 2,
            density: 0.5,
            seed: 1,
        })
        .unwrap();
        assert_eq!(inst.routes(), 2);
        assert_eq!(inst.planted(), Some(&[1u8, 1][..]));
        assert_eq!(inst.uniqueness(), Uniqueness::Certified);
        // A planted partition of 2 flights into 2 routes is the identity up to
        // column order.
        assert_eq!(inst.overlap(0, 1), 0);
    }

    #[test]
    fn generation_is_deterministic() {
        let p = GenerateParams {
            routes: 12,
            flights: 40,
            solution_size: 4,
            density: 0.8,
            seed: 7,
        };
        let a = generate(&p).unwrap();
        let b = generate(&p).unwrap();
        assert_eq!(a, b);
        let c = generate(&GenerateParams { seed: 8, ..p }).unwrap();
        assert_ne!(a.matrix(), c.matrix());
    }

    #[test]
    fn planted_is_exact_cover_across_seeds() {
        for seed in 0..20 {
            let inst = generate(&GenerateParams {
                routes: 10,
                flights: 30,
                solution_size: 3,
                density: 0.7,
                seed,
            })
            .unwrap();
            // validate() checks the planted cover; run it explicitly anyway.
            inst.validate().unwrap();
            assert_eq!(inst.uniqueness(), Uniqueness::Certified);
        }
    }

    #[test]
    fn decoys_conflict_with_planted_routes() {
        let inst = generate(&GenerateParams {
            routes: 14,
            flights: 36,
            solution_size: 4,
            density: 0.8,
            seed: 3,
        })
        .unwrap();
        let planted = inst.planted().unwrap().to_vec();
        for i in 0..inst.routes() {
            if planted[i] == 1 {
                continue;
            }
            let conflicts = (0..inst.routes())
                .filter(|&j| planted[j] == 1 && inst.overlap(i, j) > 0)
                .count();
            assert!(conflicts >= 2, "decoy {i} overlaps only {conflicts} planted routes");
        }
    }

    #[test]
    fn density_knob_orders_instances() {
        let mk = |density| {
            generate(&GenerateParams {
                routes: 20,
                flights: 60,
                solution_size: 5,
                density,
                seed: 11,
            })
            .unwrap()
            .density()
        };
        let sparse = mk(0.25);
        let dense = mk(0.9);
        assert!(
            dense > sparse + 0.2,
            "dense {dense} should clearly exceed sparse {sparse}"
        );
    }

    #[test]
    fn attach_costs_in_range_and_deterministic() {
        let inst = identity2();
        let a = attach_costs(&inst, 5, DEFAULT_COST_RANGE).unwrap();
        let b = attach_costs(&inst, 5, DEFAULT_COST_RANGE).unwrap();
        assert_eq!(a, b);
        for &c in a.costs().unwrap() {
            assert!((1e4..1e6).contains(&c));
        }
        // Degenerate range pins every cost.
        let one = attach_costs(&inst, 5, (1.0, 1.0)).unwrap();
        assert_eq!(one.costs().unwrap(), &[1.0, 1.0]);
    }

    #[test]
    fn attach_costs_rejects_bad_range() {
        let inst = identity2();
        assert!(attach_costs(&inst, 0, (0.0, 1.0)).is_err());
        assert!(attach_costs(&inst, 0, (2.0, 1.0)).is_err());
    }

    #[test]
    fn json_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("inst.json");
        let inst = generate(&GenerateParams {
            routes: 8,
            flights: 20,
            solution_size: 3,
            density: 0.6,
            seed: 2,
        })
        .unwrap();
        let inst = attach_costs(&inst, 9, DEFAULT_COST_RANGE).unwrap();
        inst.save(&path).unwrap();
        let back = ExactCoverInstance::load(&path).unwrap();
        assert_eq!(inst, back);
    }

    #[test]
    fn json_field_names_match_contract() {
        let inst = identity2();
        let v: serde_json::Value = serde_json::to_value(&inst).unwrap();
        let obj = v.as_object().unwrap();
        for key in ["R", "F", "matrix", "costs", "planted", "uniqueness", "seed", "generator_params"] {
            assert!(obj.contains_key(key), "missing field {key}");
        }
        assert_eq!(obj["R"], 2);
        assert_eq!(obj["costs"], serde_json::Value::Null);
    }

    #[test]
    fn load_rejects_corrupt_instances() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.json");
        // Flight 1 uncovered.
        std::fs::write(
            &path,
            r#"{"R":2,"F":2,"matrix":[[1,0],[1,0]],"costs":null,"planted":null,"uniqueness":"unknown","seed":0,"generator_params":null}"#,
        )
        .unwrap();
        assert!(ExactCoverInstance::load(&path).is_err());
    }

    #[test]
    fn infeasible_params_rejected() {
        let p = GenerateParams {
            routes: 4,
            flights: 2,
            solution_size: 3,
            density: 0.5,
            seed: 0,
        };
        assert!(generate(&p).is_err()); // F < k
        assert!(generate(&GenerateParams { solution_size: 0, ..p }).is_err());
        assert!(generate(&GenerateParams { solution_size: 5, ..p }).is_err());
        assert!(generate(&GenerateParams {
            routes: 4,
            flights: 8,
            solution_size: 1,
            density: 0.5,
            seed: 0
        })
        .is_err()); // decoys need >= 2 planted routes
        assert!(generate(&GenerateParams {
            routes: 4,
            flights: 8,
            solution_size: 2,
            density: 0.0,
            seed: 0
        })
        .is_err());
    }
}
