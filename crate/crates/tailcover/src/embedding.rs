//! Minor embedding: mapping each logical variable to a connected chain of
//! physical qubits so that every logical coupler has at least one physical
//! coupler between the two chains.
//!
//! Two constructions are provided. [`clique_embedding_chimera`] is the
//! closed-form diagonal template for fully connected problems on a defect-free
//! chimera graph. [`find_embedding`] is a randomized routing heuristic in the
//! spirit of minorminer: variables are placed one at a time by multi-source
//! Dijkstra over qubit weights that penalize reuse, then rip-up-and-reroute
//! passes drive the overlap to zero.
//!
//! [`embed_ising`] turns a logical model plus an embedding into a physical
//! model: biases are split across chain members, logical couplers are split
//! across the available inter-chain couplers, and chain edges get a
//! ferromagnetic coupler of strength `rcs * max_strength(model)`. Each chain
//! edge also adds its strength to the offset, so a chain-intact physical
//! state has exactly the logical energy.

use std::collections::{BTreeMap, BTreeSet, BinaryHeap, VecDeque};
use std::fs;
use std::path::Path;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::model::{self, IsingModel, ScaleReport};
use crate::rng::{rng_from, stage, Prng};
use crate::topology::{chimera_id, HardwareGraph, TopologyKind};
use crate::{Error, Result};

/// Per-use qubit weight multiplier during routing.
const ROUTE_PENALTY: f64 = 8.0;
/// The penalty exponent saturates here. High enough that escalated reuse
/// penalties keep discriminating between usage levels (a flat ceiling makes
/// congested qubits indistinguishable and routing piles onto them), low
/// enough that summed path costs stay far from f64 overflow.
const ROUTE_PENALTY_CAP: u32 = 100;
/// Surcharge per pass a qubit spent overfull. Reuse penalties alone are
/// memoryless: every pass re-fights the same hot spot, because the qubit
/// adjacent to everything stays the cheapest buy no matter how high the
/// escalation (all single-reuse options scale together). History makes
/// persistent hot spots progressively expensive even when currently free, so
/// layouts spread around them. It grows linearly and saturates well below
/// one reuse step: strong enough to steer, too weak to wall off a region.
const HIST_STEP: f64 = 0.25;
const HIST_FACTOR_CAP: f64 = 6.0;
/// Passes without a new low in the overfull-qubit count before a try is
/// abandoned. Stuck layouts stay stuck: almost every successful try shows the
/// count falling steadily from the start, so a fresh construction is a far
/// better use of the same time once it flatlines.
const STALL_LIMIT: usize = 12;

/// The logical graph that must be realized: variable count plus the coupler
/// pairs, `i < j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CouplingGraph {
    n: usize,
    edges: BTreeSet<(usize, usize)>,
}

impl CouplingGraph {
    pub fn new(n: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Result<CouplingGraph> {
        let mut edges = BTreeSet::new();
        for (a, b) in pairs {
            if a == b {
                return Err(Error::DiagonalCoupler { i: a });
            }
            let key = (a.min(b), a.max(b));
            if key.1 >= n {
                return Err(Error::IndexOutOfRange { index: key.1, n });
            }
            edges.insert(key);
        }
        Ok(CouplingGraph { n, edges })
    }

    /// The graph of a model's nonzero couplers.
    pub fn from_model(m: &IsingModel) -> CouplingGraph {
        CouplingGraph {
            n: m.n(),
            edges: m.coupling_graph().into_iter().collect(),
        }
    }

    pub fn complete(n: usize) -> CouplingGraph {
        let mut edges = BTreeSet::new();
        for i in 0..n {
            for j in i + 1..n {
                edges.insert((i, j));
            }
        }
        CouplingGraph { n, edges }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.edges.contains(&(a.min(b), a.max(b)))
    }

    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        adj
    }
}

/// Chains indexed by logical variable, plus the hardware family they target.
#[derive(Debug, Clone, PartialEq)]
pub struct Embedding {
    chains: Vec<Vec<usize>>,
    hardware: TopologyKind,
}

/// On-disk form: `{"hardware": {...}, "0": [..], "1": [..], ...}`.
#[derive(Serialize, Deserialize)]
struct EmbeddingFile {
    hardware: TopologyKind,
    #[serde(flatten)]
    chains: BTreeMap<String, Vec<usize>>,
}

impl Embedding {
    pub fn new(chains: Vec<Vec<usize>>, hardware: TopologyKind) -> Embedding {
        Embedding { chains, hardware }
    }

    pub fn chains(&self) -> &[Vec<usize>] {
        &self.chains
    }

    pub fn hardware(&self) -> TopologyKind {
        self.hardware
    }

    pub fn logical_n(&self) -> usize {
        self.chains.len()
    }

    pub fn num_physical_qubits(&self) -> usize {
        self.chains.iter().map(Vec::len).sum()
    }

    pub fn max_chain_len(&self) -> usize {
        self.chains.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = EmbeddingFile {
            hardware: self.hardware,
            chains: self
                .chains
                .iter()
                .enumerate()
                .map(|(i, c)| (i.to_string(), c.clone()))
                .collect(),
        };
        let text = serde_json::to_string_pretty(&file).map_err(|e| Error::json(path, e))?;
        fs::write(path, text).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Embedding> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let file: EmbeddingFile =
            serde_json::from_str(&text).map_err(|e| Error::json(path, e))?;
        let n = file.chains.len();
        let mut chains: Vec<Option<Vec<usize>>> = vec![None; n];
        for (key, chain) in file.chains {
            let idx: usize = key.parse().map_err(|_| {
                Error::InvalidEmbedding(format!("chain key '{key}' is not an index"))
            })?;
            if idx >= n {
                return Err(Error::InvalidEmbedding(format!(
                    "chain indices are not contiguous: {idx} among {n} chains"
                )));
            }
            chains[idx] = Some(chain);
        }
        let chains = chains
            .into_iter()
            .enumerate()
            .map(|(i, c)| c.ok_or_else(|| Error::InvalidEmbedding(format!("chain {i} missing"))))
            .collect::<Result<_>>()?;
        Ok(Embedding {
            chains,
            hardware: file.hardware,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmbedParams {
    /// Independent randomized attempts before giving up.
    pub tries: usize,
    /// Rip-up-and-reroute rounds per attempt.
    pub max_passes: usize,
    pub seed: u64,
    /// Wall-clock budget across all attempts.
    pub timeout: Option<std::time::Duration>,
}

impl Default for EmbedParams {
    fn default() -> Self {
        EmbedParams {
            tries: 24,
            max_passes: 64,
            seed: 0,
            timeout: None,
        }
    }
}

/// Search for an embedding of `logical` into `hw`. Deterministic for a given
/// seed; fails with [`Error::NoEmbedding`] once every attempt is exhausted.
pub fn find_embedding(
    logical: &CouplingGraph,
    hw: &HardwareGraph,
    params: &EmbedParams,
) -> Result<Embedding> {
    if logical.n() == 0 {
        return Ok(Embedding::new(Vec::new(), hw.kind()));
    }
    let deadline = params.timeout.map(|t| Instant::now() + t);
    let tries = params.tries.max(1);
    for t in 0..tries {
        let mut rng = rng_from(params.seed, &[stage::EMBED, t as u64]);
        if let Some(chains) = try_embed(logical, hw, &mut rng, params.max_passes, deadline) {
            return Ok(Embedding::new(chains, hw.kind()));
        }
        if deadline.is_some_and(|d| Instant::now() >= d) {
            break;
        }
    }
    Err(Error::NoEmbedding { tries })
}

fn try_embed(
    logical: &CouplingGraph,
    hw: &HardwareGraph,
    rng: &mut Prng,
    max_passes: usize,
    deadline: Option<Instant>,
) -> Option<Vec<Vec<usize>>> {
    let n = logical.n();
    let adj = logical.adjacency();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);

    let mut chains: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut usage = vec![0u32; hw.total_nodes()];
    let mut hist = vec![0u32; hw.total_nodes()];
    let place = |chains: &mut Vec<Vec<usize>>, usage: &mut Vec<u32>, v: usize, c: Vec<usize>| {
        for &q in &c {
            usage[q] += 1;
        }
        chains[v] = c;
    };

    for &v in &order {
        let chain = route_var(hw, &usage, &hist, &neighbor_chains(&adj[v], &chains), 1, rng)?;
        place(&mut chains, &mut usage, v, chain);
    }

    // Rip up and reroute until overlap-free and no longer shrinking. While
    // overlaps persist, only the chains touching overfull qubits are ripped;
    // clean chains stay frozen so each pass repairs instead of reshuffling
    // the whole layout. The reuse penalty escalates across dirty passes, and
    // every fourth pass rips everything to escape frozen layouts.
    //
    // Layouts that do untangle almost always do so while the contention is
    // still dropping. Once the overfull count stops making new lows the pass
    // loop has become a much worse lottery than a fresh construction, so the
    // try gives up and lets the caller restart instead of grinding on.
    let mut best: Option<(usize, Vec<Vec<usize>>)> = None;
    let mut boost = 1u32;
    let mut min_over = usize::MAX;
    let mut stall = 0usize;
    for pass in 0..max_passes {
        if deadline.is_some_and(|d| Instant::now() >= d) {
            break;
        }
        let full = pass % 4 == 0 || usage.iter().all(|&u| u <= 1);
        let mut order: Vec<usize> = if full {
            (0..n).collect()
        } else {
            (0..n)
                .filter(|&v| chains[v].iter().any(|&q| usage[q] > 1))
                .collect()
        };
        order.shuffle(rng);
        let mut routed = true;
        for &v in &order {
            for &q in &chains[v] {
                usage[q] -= 1;
            }
            chains[v].clear();
            match route_var(hw, &usage, &hist, &neighbor_chains(&adj[v], &chains), boost, rng) {
                Some(chain) => place(&mut chains, &mut usage, v, chain),
                None => {
                    routed = false;
                    break;
                }
            }
        }
        if !routed {
            break;
        }
        if usage.iter().all(|&u| u <= 1) {
            boost = 1;
            let size: usize = chains.iter().map(Vec::len).sum();
            if let Some((bs, bc)) = &best {
                if size >= *bs {
                    return Some(bc.clone());
                }
            }
            best = Some((size, chains.clone()));
        } else {
            let over = usage.iter().filter(|&&u| u > 1).count();
            if over < min_over {
                min_over = over;
                stall = 0;
            } else {
                stall += 1;
                if stall >= STALL_LIMIT {
                    break;
                }
            }
            boost = boost.saturating_add(1);
            for (q, &u) in usage.iter().enumerate() {
                if u > 1 {
                    hist[q] = hist[q].saturating_add(1);
                }
            }
        }
    }
    best.map(|(_, c)| c)
}

fn neighbor_chains<'a>(nbrs: &[usize], chains: &'a [Vec<usize>]) -> Vec<&'a [usize]> {
    nbrs.iter()
        .map(|&u| chains[u].as_slice())
        .filter(|c| !c.is_empty())
        .collect()
}

/// Build a chain for one variable: Dijkstra from every embedded neighbor
/// chain over reuse-penalized qubit weights, root at the qubit minimizing the
/// summed path costs (its own weight counted once), chain = root plus the
/// path interiors.
fn route_var(
    hw: &HardwareGraph,
    usage: &[u32],
    hist: &[u32],
    nbr_chains: &[&[usize]],
    boost: u32,
    rng: &mut Prng,
) -> Option<Vec<usize>> {
    if nbr_chains.is_empty() {
        let free: Vec<usize> = hw.nodes().filter(|&q| usage[q] == 0).collect();
        let pool: Vec<usize> = if free.is_empty() {
            hw.nodes().collect()
        } else {
            free
        };
        if pool.is_empty() {
            return None;
        }
        return Some(vec![pool[rng.random_range(0..pool.len())]]);
    }

    let total = hw.total_nodes();
    // Jitter each qubit's weight per reroute. Routes with the same reuse
    // count tie exactly under the bare penalty, and deterministic tie-breaks
    // then re-pick the same contested corridor forever; the jitter stays far
    // below one penalty step, so it only diversifies among equal-reuse routes.
    // Weights are fixed for the whole reroute, so build them once instead of
    // paying the powi on every edge relaxation.
    let w: Vec<f64> = (0..total)
        .map(|q| {
            ROUTE_PENALTY.powi((usage[q] * boost).min(ROUTE_PENALTY_CAP) as i32)
                * (1.0 + HIST_STEP * hist[q] as f64).min(HIST_FACTOR_CAP)
                * (1.0 + 0.25 * rng.random::<f64>())
        })
        .collect();
    let k = nbr_chains.len();
    let mut dist = vec![f64::INFINITY; total * k];
    let mut parent = vec![usize::MAX; total * k];
    for (c, chain) in nbr_chains.iter().enumerate() {
        dijkstra(
            hw,
            &w,
            chain,
            &mut dist[c * total..(c + 1) * total],
            &mut parent[c * total..(c + 1) * total],
        );
    }

    let mut best: Option<(f64, usize)> = None;
    for q in hw.nodes() {
        // Only an unoccupied qubit may anchor the chain. A root inside
        // another chain looks cheap (one reuse versus crossings on every
        // escape path) and satisfies the distance metric at zero while
        // realizing no hardware edge at all, so squatters wall each other in
        // and no penalty escalation ever breaks the knot. Paths may still
        // cross occupied qubits; escalation clears those.
        if usage[q] > 0 {
            continue;
        }
        let mut sum = 0.0;
        let mut outside = 0usize;
        let mut reachable = true;
        for c in 0..k {
            let d = dist[c * total + q];
            if d.is_finite() {
                sum += d;
                // sources are the only zero-distance qubits
                if d > 0.0 {
                    outside += 1;
                }
            } else {
                reachable = false;
                break;
            }
        }
        if !reachable {
            continue;
        }
        // each path cost already includes the root's weight, counted once
        let score = sum + w[q] - outside as f64 * w[q];
        let better = match best {
            None => true,
            Some((bs, bq)) => score < bs || (score == bs && q < bq),
        };
        if better {
            best = Some((score, q));
        }
    }
    let (_, root) = best?;

    let mut chain = BTreeSet::new();
    chain.insert(root);
    for c in 0..k {
        let parent = &parent[c * total..(c + 1) * total];
        let mut q = root;
        while parent[q] != usize::MAX {
            let p = parent[q];
            if parent[p] == usize::MAX {
                break; // p is inside the neighbor chain
            }
            chain.insert(p);
            q = p;
        }
    }
    Some(chain.into_iter().collect())
}

/// Multi-source Dijkstra with node weights; sources cost 0, every other
/// qubit adds its own weight. Ties break on node id, so routing is
/// deterministic.
fn dijkstra(
    hw: &HardwareGraph,
    weight: &[f64],
    sources: &[usize],
    dist: &mut [f64],
    parent: &mut [usize],
) {
    #[derive(PartialEq)]
    struct Visit {
        cost: f64,
        node: usize,
    }
    impl Eq for Visit {}
    impl Ord for Visit {
        fn cmp(&self, other: &Self) -> std::cmp::Ordering {
            // reversed: BinaryHeap pops the cheapest cost, then smallest id
            other
                .cost
                .total_cmp(&self.cost)
                .then_with(|| other.node.cmp(&self.node))
        }
    }
    impl PartialOrd for Visit {
        fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
            Some(self.cmp(other))
        }
    }

    let mut heap = BinaryHeap::new();
    for &s in sources {
        if dist[s] > 0.0 {
            dist[s] = 0.0;
            heap.push(Visit { cost: 0.0, node: s });
        }
    }
    while let Some(Visit { cost, node }) = heap.pop() {
        if cost > dist[node] {
            continue;
        }
        for &r in hw.neighbors(node) {
            let nd = cost + weight[r];
            if nd < dist[r] {
                dist[r] = nd;
                parent[r] = node;
                heap.push(Visit { cost: nd, node: r });
            }
        }
    }
}

/// The diagonal clique template for chimera: variable `i` (band `a = i / t`,
/// lane `b = i % t`) takes the horizontal qubits of row `a` up to the
/// diagonal plus the vertical qubits of column `a` from the diagonal down,
/// giving every pair of chains a crossing cell. Capacity is `t * min(m, n)`
/// and every chain has the same length.
pub fn clique_embedding_chimera(n_logical: usize, hw: &HardwareGraph) -> Result<Embedding> {
    let TopologyKind::Chimera { m, n, t } = hw.kind() else {
        return Err(Error::InvalidTopology(format!(
            "clique template requires a chimera graph, got {}",
            hw.kind()
        )));
    };
    let capacity = t * m.min(n);
    if n_logical > capacity {
        return Err(Error::CliqueCapacity {
            needed: n_logical,
            capacity,
        });
    }
    let cells = n_logical.div_ceil(t);
    let mut chains = Vec::with_capacity(n_logical);
    for i in 0..n_logical {
        let (a, b) = (i / t, i % t);
        let mut chain = Vec::with_capacity(cells + 1);
        for col in 0..=a {
            chain.push(chimera_id(n, t, a, col, 1, b));
        }
        for row in a..cells {
            chain.push(chimera_id(n, t, row, a, 0, b));
        }
        for &q in &chain {
            if !hw.is_live(q) {
                return Err(Error::CliqueDeadNode(q));
            }
        }
        chains.push(chain);
    }
    Ok(Embedding::new(chains, hw.kind()))
}

/// Everything wrong with an embedding, as human-readable lines. Empty means
/// valid: chains are nonempty, disjoint, live, connected, and every logical
/// edge has a physical coupler.
pub fn embedding_violations(
    e: &Embedding,
    logical: &CouplingGraph,
    hw: &HardwareGraph,
) -> Vec<String> {
    let mut out = Vec::new();
    if e.hardware() != hw.kind() {
        out.push(format!(
            "embedding targets {} but the graph is {}",
            e.hardware(),
            hw.kind()
        ));
    }
    if e.chains().len() != logical.n() {
        out.push(format!(
            "embedding has {} chains but the problem has {} variables",
            e.chains().len(),
            logical.n()
        ));
        return out;
    }
    let mut owner: BTreeMap<usize, usize> = BTreeMap::new();
    let mut usable = vec![true; e.chains().len()];
    for (i, chain) in e.chains().iter().enumerate() {
        if chain.is_empty() {
            out.push(format!("chain {i} is empty"));
            usable[i] = false;
            continue;
        }
        let mut seen = BTreeSet::new();
        for &q in chain {
            if q >= hw.total_nodes() {
                out.push(format!("chain {i} uses unknown qubit {q}"));
                usable[i] = false;
                continue;
            }
            if !hw.is_live(q) {
                out.push(format!("chain {i} uses dead qubit {q}"));
                usable[i] = false;
            }
            if !seen.insert(q) {
                out.push(format!("chain {i} repeats qubit {q}"));
            }
            match owner.get(&q) {
                Some(&o) if o != i => out.push(format!("qubit {q} is shared by chains {o} and {i}")),
                _ => {
                    owner.insert(q, i);
                }
            }
        }
        if usable[i] && !chain_connected(hw, chain) {
            out.push(format!("chain {i} is not connected"));
        }
    }
    for (a, b) in logical.edges() {
        if usable[a] && usable[b] && !chains_touch(hw, &e.chains()[a], &e.chains()[b]) {
            out.push(format!("logical edge ({a},{b}) has no physical coupler"));
        }
    }
    out
}

pub fn validate_embedding(
    e: &Embedding,
    logical: &CouplingGraph,
    hw: &HardwareGraph,
) -> Result<()> {
    let violations = embedding_violations(e, logical, hw);
    if violations.is_empty() {
        Ok(())
    } else {
        Err(Error::InvalidEmbedding(violations.join("\n")))
    }
}

fn chain_connected(hw: &HardwareGraph, chain: &[usize]) -> bool {
    let set: BTreeSet<usize> = chain.iter().copied().collect();
    let mut seen = BTreeSet::new();
    let mut queue = VecDeque::from([chain[0]]);
    seen.insert(chain[0]);
    while let Some(q) = queue.pop_front() {
        for &r in hw.neighbors(q) {
            if set.contains(&r) && seen.insert(r) {
                queue.push_back(r);
            }
        }
    }
    seen.len() == set.len()
}

fn chains_touch(hw: &HardwareGraph, ca: &[usize], cb: &[usize]) -> bool {
    let bset: BTreeSet<usize> = cb.iter().copied().collect();
    ca.iter()
        .any(|&p| hw.neighbors(p).iter().any(|r| bset.contains(r)))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainMetrics {
    pub physical_qubits: usize,
    pub mean: f64,
    /// Population standard deviation of chain lengths.
    pub std: f64,
    pub max: usize,
    /// Chain length -> number of chains with that length.
    pub histogram: BTreeMap<usize, usize>,
}

pub fn chain_metrics(e: &Embedding) -> ChainMetrics {
    let lens: Vec<usize> = e.chains().iter().map(Vec::len).collect();
    let total: usize = lens.iter().sum();
    let count = lens.len();
    let mean = if count == 0 {
        0.0
    } else {
        total as f64 / count as f64
    };
    let var = if count == 0 {
        0.0
    } else {
        lens.iter()
            .map(|&l| (l as f64 - mean).powi(2))
            .sum::<f64>()
            / count as f64
    };
    let mut histogram = BTreeMap::new();
    for &l in &lens {
        *histogram.entry(l).or_insert(0usize) += 1;
    }
    ChainMetrics {
        physical_qubits: total,
        mean,
        std: var.sqrt(),
        max: lens.iter().copied().max().unwrap_or(0),
        histogram,
    }
}

/// How chain edges are coupled: a BFS spanning tree (the cheapest choice
/// that keeps chains rigid, and the one whose broken-edge cost is exactly
/// twice the chain strength) or every coupler the chain induces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ChainCoupler {
    #[default]
    SpanningTree,
    AllEdges,
}

/// How a logical bias is distributed over a chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BiasSplit {
    /// `h_i / len` on every member.
    #[default]
    Uniform,
    /// All of `h_i` on the chain's first qubit.
    Concentrated,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct EmbedOptions {
    pub chain_coupler: ChainCoupler,
    pub bias_split: BiasSplit,
}

/// How a broken chain is collapsed to one logical spin.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ChainResolution {
    /// Majority over the chain; exact ties fall back to the first qubit.
    #[default]
    MajorityVote,
    FirstQubit,
}

/// A logical model pushed through an embedding onto hardware.
#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalIsing {
    model: IsingModel,
    /// Dense physical index -> hardware qubit id, ascending.
    qubits: Vec<usize>,
    /// Chain coupler edges, dense indices, `i < j` ascending.
    chain_edges: Vec<(usize, usize)>,
    chain_strength: f64,
}

impl PhysicalIsing {
    pub fn model(&self) -> &IsingModel {
        &self.model
    }

    pub fn qubits(&self) -> &[usize] {
        &self.qubits
    }

    pub fn chain_edges(&self) -> &[(usize, usize)] {
        &self.chain_edges
    }

    pub fn chain_strength(&self) -> f64 {
        self.chain_strength
    }

    pub fn num_qubits(&self) -> usize {
        self.qubits.len()
    }

    /// Rescale couplers, biases, and the chain strength by one common factor
    /// so the model fits the given ranges.
    pub fn autoscaled(
        &self,
        h_range: (f64, f64),
        j_range: (f64, f64),
        allow_upscale: bool,
    ) -> Result<(PhysicalIsing, ScaleReport)> {
        let (scaled, report) = model::autoscale(&self.model, h_range, j_range, allow_upscale)?;
        Ok((
            PhysicalIsing {
                model: scaled,
                qubits: self.qubits.clone(),
                chain_edges: self.chain_edges.clone(),
                chain_strength: self.chain_strength * report.factor,
            },
            report,
        ))
    }
}

/// Compile `m` onto hardware through `e`. The chain strength is
/// `relative_chain_strength * max_strength(m)`; every chain edge contributes
/// `-cs s_a s_b + cs`, so intact chains cost nothing and the physical energy
/// of a chain-intact state equals the logical energy.
pub fn embed_ising(
    m: &IsingModel,
    e: &Embedding,
    hw: &HardwareGraph,
    relative_chain_strength: f64,
    opts: &EmbedOptions,
) -> Result<PhysicalIsing> {
    if !relative_chain_strength.is_finite() || relative_chain_strength <= 0.0 {
        return Err(Error::BadChainStrength(relative_chain_strength));
    }
    let logical = CouplingGraph::from_model(m);
    validate_embedding(e, &logical, hw)?;
    let cs = relative_chain_strength * model::max_strength(m);

    let qubits: Vec<usize> = e
        .chains()
        .iter()
        .flatten()
        .copied()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let dense = |q: usize| qubits.binary_search(&q).expect("chain qubit is in the used set");

    let mut h = vec![0.0; qubits.len()];
    for (i, chain) in e.chains().iter().enumerate() {
        match opts.bias_split {
            BiasSplit::Uniform => {
                let share = m.h()[i] / chain.len() as f64;
                for &q in chain {
                    h[dense(q)] += share;
                }
            }
            BiasSplit::Concentrated => h[dense(chain[0])] += m.h()[i],
        }
    }

    let mut j: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    for (a, b, val) in m.couplers() {
        let bset: BTreeSet<usize> = e.chains()[b].iter().copied().collect();
        let mut pairs = Vec::new();
        for &p in &e.chains()[a] {
            for &r in hw.neighbors(p) {
                if bset.contains(&r) {
                    let (x, y) = (dense(p), dense(r));
                    pairs.push((x.min(y), x.max(y)));
                }
            }
        }
        let share = val / pairs.len() as f64; // validation guarantees pairs
        for key in pairs {
            *j.entry(key).or_insert(0.0) += share;
        }
    }

    let mut offset = m.offset();
    let mut chain_edges = Vec::new();
    for chain in e.chains() {
        let edges = match opts.chain_coupler {
            ChainCoupler::SpanningTree => spanning_tree_edges(hw, chain),
            ChainCoupler::AllEdges => induced_edges(hw, chain),
        };
        for (p, r) in edges {
            let (x, y) = (dense(p), dense(r));
            let key = (x.min(y), x.max(y));
            *j.entry(key).or_insert(0.0) -= cs;
            offset += cs;
            chain_edges.push(key);
        }
    }
    chain_edges.sort_unstable();

    let model = IsingModel::new(
        h,
        j.into_iter().map(|((a, b), v)| (a, b, v)),
        offset,
    )?;
    Ok(PhysicalIsing {
        model,
        qubits,
        chain_edges,
        chain_strength: cs,
    })
}

/// BFS tree edges over the chain's induced subgraph, rooted at the chain's
/// first qubit.
fn spanning_tree_edges(hw: &HardwareGraph, chain: &[usize]) -> Vec<(usize, usize)> {
    let set: BTreeSet<usize> = chain.iter().copied().collect();
    let mut seen = BTreeSet::from([chain[0]]);
    let mut queue = VecDeque::from([chain[0]]);
    let mut edges = Vec::with_capacity(chain.len().saturating_sub(1));
    while let Some(q) = queue.pop_front() {
        for &r in hw.neighbors(q) {
            if set.contains(&r) && seen.insert(r) {
                edges.push((q, r));
                queue.push_back(r);
            }
        }
    }
    edges
}

fn induced_edges(hw: &HardwareGraph, chain: &[usize]) -> Vec<(usize, usize)> {
    let set: BTreeSet<usize> = chain.iter().copied().collect();
    let mut edges = Vec::new();
    for &q in &set {
        for &r in hw.neighbors(q) {
            if q < r && set.contains(&r) {
                edges.push((q, r));
            }
        }
    }
    edges
}

/// Collapse a physical read to logical spins plus the fraction of chains
/// that came back inconsistent.
pub fn unembed_sample(
    phys: &PhysicalIsing,
    e: &Embedding,
    state: &[i8],
    resolution: ChainResolution,
) -> Result<(Vec<i8>, f64)> {
    model::check_spins(phys.qubits.len(), state)?;
    let dense = |q: usize| {
        phys.qubits.binary_search(&q).map_err(|_| {
            Error::InvalidEmbedding(format!("qubit {q} is not part of the embedded model"))
        })
    };
    let mut out = Vec::with_capacity(e.chains().len());
    let mut broken = 0usize;
    for (i, chain) in e.chains().iter().enumerate() {
        if chain.is_empty() {
            return Err(Error::InvalidEmbedding(format!("chain {i} is empty")));
        }
        let first = state[dense(chain[0])?];
        let mut sum = 0i64;
        let mut intact = true;
        for &q in chain {
            let s = state[dense(q)?];
            sum += s as i64;
            intact &= s == first;
        }
        if !intact {
            broken += 1;
        }
        out.push(match resolution {
            ChainResolution::FirstQubit => first,
            ChainResolution::MajorityVote => match sum.cmp(&0) {
                std::cmp::Ordering::Greater => 1,
                std::cmp::Ordering::Less => -1,
                std::cmp::Ordering::Equal => first,
            },
        });
    }
    let cbf = if e.chains().is_empty() {
        0.0
    } else {
        broken as f64 / e.chains().len() as f64
    };
    Ok((out, cbf))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampler::{sample_embedded, simulated_anneal, AnnealParams};
    use crate::topology::chimera;

    fn two_var_model() -> IsingModel {
        IsingModel::new(vec![0.5, -1.0], [(0, 1, -0.6)], 0.3).unwrap()
    }

    #[test]
    fn singleton_chains_reproduce_direct_anneal() {
        let hw = chimera(1, 1, 4).unwrap();
        let m = two_var_model();
        let e = Embedding::new(vec![vec![0], vec![4]], hw.kind());
        let phys = embed_ising(&m, &e, &hw, 1.0, &EmbedOptions::default()).unwrap();
        // singleton chains: the physical model is the logical model verbatim
        assert_eq!(phys.model(), &m);
        assert_eq!(phys.qubits(), &[0, 4]);
        assert!(phys.chain_edges().is_empty());

        let p = AnnealParams {
            num_reads: 20,
            sweeps: 50,
            seed: 7,
            ..AnnealParams::default()
        };
        let direct = simulated_anneal(&m, &p).unwrap();
        let embedded = sample_embedded(&phys, &e, &m, &p, ChainResolution::MajorityVote).unwrap();
        assert_eq!(direct.samples().len(), embedded.samples().len());
        for (a, b) in direct.samples().iter().zip(embedded.samples()) {
            assert_eq!(a.state, b.state);
            assert_eq!(a.energy, b.energy);
            assert_eq!(a.num_occurrences, b.num_occurrences);
            assert_eq!(b.chain_break_fraction, 0.0);
        }
    }

    #[test]
    fn intact_chains_have_logical_energy() {
        let hw = chimera(2, 2, 4).unwrap();
        let m = IsingModel::new(
            vec![0.3, -0.2, 0.7],
            [(0, 1, 1.1), (1, 2, -0.4), (0, 2, 0.6)],
            0.25,
        )
        .unwrap();
        let e = find_embedding(
            &CouplingGraph::from_model(&m),
            &hw,
            &EmbedParams { seed: 11, ..Default::default() },
        )
        .unwrap();
        let phys = embed_ising(&m, &e, &hw, 1.3, &EmbedOptions::default()).unwrap();
        for bits in 0..8u32 {
            let s: Vec<i8> = (0..3).map(|i| if bits >> i & 1 == 1 { 1 } else { -1 }).collect();
            let mut ps = vec![0i8; phys.num_qubits()];
            for (i, chain) in e.chains().iter().enumerate() {
                for &q in chain {
                    ps[phys.qubits().binary_search(&q).unwrap()] = s[i];
                }
            }
            let logical = m.energy(&s).unwrap();
            let physical = phys.model().energy(&ps).unwrap();
            assert!(
                (logical - physical).abs() <= 1e-9,
                "state {s:?}: {logical} vs {physical}"
            );
        }
    }

    #[test]
    fn breaking_one_tree_edge_costs_twice_the_chain_strength() {
        let hw = chimera(2, 2, 4).unwrap();
        let m = IsingModel::new(vec![0.4, -0.8], [(0, 1, 0.9)], 0.1).unwrap();
        let e = clique_embedding_chimera(2, &hw).unwrap();
        assert_eq!(e.chains()[0].len(), 2);
        let rcs = 1.5;
        let phys = embed_ising(&m, &e, &hw, rcs, &EmbedOptions::default()).unwrap();
        let cs = phys.chain_strength();
        assert!((cs - rcs * 0.9).abs() < 1e-12);
        assert_eq!(phys.chain_edges().len(), 2);

        // the same model with the chain couplers stripped out
        let chain_set: BTreeSet<(usize, usize)> = phys.chain_edges().iter().copied().collect();
        let bare = IsingModel::new(
            phys.model().h().to_vec(),
            phys.model()
                .couplers()
                .filter(|&(a, b, _)| !chain_set.contains(&(a, b))),
            phys.model().offset() - cs * chain_set.len() as f64,
        )
        .unwrap();

        let intact: Vec<i8> = vec![1, -1, 1, -1]; // chains {0,4} up, {1,5} down
        let mut broken = intact.clone();
        let leaf = 0; // dense index of qubit 0, a tree leaf in chain 0
        broken[leaf] = -broken[leaf];

        let d_total = phys.model().energy(&broken).unwrap() - phys.model().energy(&intact).unwrap();
        let d_bare = bare.energy(&broken).unwrap() - bare.energy(&intact).unwrap();
        assert!(
            (d_total - d_bare - 2.0 * cs).abs() <= 1e-9,
            "chain-edge cost came out {}",
            d_total - d_bare
        );
    }

    #[test]
    fn bias_and_coupler_splitting() {
        let hw = chimera(2, 2, 4).unwrap();
        let m = IsingModel::new(vec![0.4, -0.8], [(0, 1, 0.9)], 0.1).unwrap();
        let e = clique_embedding_chimera(2, &hw).unwrap();
        let phys = embed_ising(&m, &e, &hw, 1.0, &EmbedOptions::default()).unwrap();
        // uniform split: h / 2 on each of the two chain members
        let hv = phys.model().h();
        assert_eq!(hv, &[0.2, -0.4, 0.2, -0.4]);
        // chains {4,0} and {5,1} touch through two cell couplers, 0.45 each
        assert!((phys.model().get_j(1, 2) - 0.45).abs() < 1e-12);
        assert!((phys.model().get_j(0, 3) - 0.45).abs() < 1e-12);

        let opts = EmbedOptions {
            bias_split: BiasSplit::Concentrated,
            ..Default::default()
        };
        let phys = embed_ising(&m, &e, &hw, 1.0, &opts).unwrap();
        // all bias on each chain's first stored qubit (4 and 5)
        let dense4 = phys.qubits().binary_search(&4).unwrap();
        let dense5 = phys.qubits().binary_search(&5).unwrap();
        let mut want = vec![0.0; 4];
        want[dense4] = 0.4;
        want[dense5] = -0.8;
        assert_eq!(phys.model().h(), &want[..]);
    }

    #[test]
    fn all_edges_mode_couples_whole_cycles() {
        let hw = chimera(1, 1, 4).unwrap();
        // one variable on a 4-cycle inside the cell: 2 verticals, 2 horizontals
        let m = IsingModel::new(vec![1.0], [], 0.0).unwrap();
        let e = Embedding::new(vec![vec![0, 1, 4, 5]], hw.kind());
        let tree = embed_ising(&m, &e, &hw, 1.0, &EmbedOptions::default()).unwrap();
        assert_eq!(tree.chain_edges().len(), 3);
        let opts = EmbedOptions {
            chain_coupler: ChainCoupler::AllEdges,
            ..Default::default()
        };
        let full = embed_ising(&m, &e, &hw, 1.0, &opts).unwrap();
        assert_eq!(full.chain_edges().len(), 4);
        // offsets track the number of chain edges
        assert!((full.model().offset() - tree.model().offset() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn unembed_resolves_chains() {
        let hw = chimera(1, 1, 4).unwrap();
        let m = IsingModel::new(vec![1.0, 1.0], [], 0.0).unwrap();
        let e = Embedding::new(vec![vec![0, 4, 1], vec![2, 6]], hw.kind());
        let phys = embed_ising(&m, &e, &hw, 1.0, &EmbedOptions::default()).unwrap();
        // dense order of qubits [0, 1, 2, 4, 6]
        let state = |q0: i8, q1: i8, q2: i8, q4: i8, q6: i8| vec![q0, q1, q2, q4, q6];

        // chain 0 = (+,+,-) majority +, chain 1 intact
        let (s, cbf) =
            unembed_sample(&phys, &e, &state(1, -1, 1, 1, 1), ChainResolution::MajorityVote)
                .unwrap();
        assert_eq!(s, vec![1, 1]);
        assert!((cbf - 0.5).abs() < 1e-12);

        // exact tie in chain 1 falls back to its first qubit (2)
        let (s, cbf) =
            unembed_sample(&phys, &e, &state(-1, -1, 1, -1, -1), ChainResolution::MajorityVote)
                .unwrap();
        assert_eq!(s, vec![-1, 1]);
        assert!((cbf - 0.5).abs() < 1e-12);

        // first-qubit policy ignores the majority
        let (s, cbf) =
            unembed_sample(&phys, &e, &state(-1, 1, 1, 1, 1), ChainResolution::FirstQubit)
                .unwrap();
        assert_eq!(s, vec![-1, 1]);
        assert!((cbf - 0.5).abs() < 1e-12);

        // intact reads have zero break fraction
        let (s, cbf) =
            unembed_sample(&phys, &e, &state(1, 1, -1, 1, -1), ChainResolution::MajorityVote)
                .unwrap();
        assert_eq!(s, vec![1, -1]);
        assert_eq!(cbf, 0.0);

        assert!(unembed_sample(&phys, &e, &[1, 1], ChainResolution::MajorityVote).is_err());
    }

    #[test]
    fn heuristic_embeds_k5_on_two_by_two() {
        let hw = chimera(2, 2, 4).unwrap();
        let logical = CouplingGraph::complete(5);
        let e = find_embedding(&logical, &hw, &EmbedParams::default()).unwrap();
        validate_embedding(&e, &logical, &hw).unwrap();
        assert_eq!(e.logical_n(), 5);
        assert!(e.num_physical_qubits() <= hw.num_nodes());
    }

    #[test]
    fn heuristic_is_seed_deterministic() {
        let hw = chimera(3, 3, 4).unwrap();
        let logical = CouplingGraph::complete(6);
        let params = EmbedParams { seed: 3, ..Default::default() };
        let a = find_embedding(&logical, &hw, &params).unwrap();
        let b = find_embedding(&logical, &hw, &params).unwrap();
        assert_eq!(a, b);
        let c = find_embedding(&logical, &hw, &EmbedParams { seed: 4, ..Default::default() })
            .unwrap();
        validate_embedding(&c, &logical, &hw).unwrap();
    }

    #[test]
    fn impossible_problems_report_no_embedding() {
        let hw = chimera(1, 1, 1).unwrap();
        let logical = CouplingGraph::complete(3);
        let err = find_embedding(
            &logical,
            &hw,
            &EmbedParams { tries: 3, max_passes: 4, ..Default::default() },
        )
        .unwrap_err();
        assert!(matches!(err, Error::NoEmbedding { tries: 3 }));

        // a zero timeout gives up immediately even on feasible input
        let hw = chimera(2, 2, 4).unwrap();
        let err = find_embedding(
            &CouplingGraph::complete(4),
            &hw,
            &EmbedParams { timeout: Some(std::time::Duration::ZERO), ..Default::default() },
        )
        .unwrap_err();
        assert!(matches!(err, Error::NoEmbedding { .. }));
    }

    #[test]
    fn clique_template_shapes() {
        let hw = chimera(16, 16, 4).unwrap();
        let e = clique_embedding_chimera(40, &hw).unwrap();
        assert_eq!(e.logical_n(), 40);
        for chain in e.chains() {
            assert_eq!(chain.len(), 11);
        }
        validate_embedding(&e, &CouplingGraph::complete(40), &hw).unwrap();

        // capacity is exactly t * min(m, n)
        let small = chimera(2, 2, 4).unwrap();
        let full = clique_embedding_chimera(8, &small).unwrap();
        validate_embedding(&full, &CouplingGraph::complete(8), &small).unwrap();
        for chain in full.chains() {
            assert_eq!(chain.len(), 3);
        }
        let err = clique_embedding_chimera(9, &small).unwrap_err();
        assert!(matches!(err, Error::CliqueCapacity { needed: 9, capacity: 8 }));
    }

    #[test]
    fn clique_template_rejects_defects_and_wrong_family() {
        let hw = chimera(2, 2, 4).unwrap().with_dead_nodes(&[4]).unwrap();
        let err = clique_embedding_chimera(2, &hw).unwrap_err();
        assert!(matches!(err, Error::CliqueDeadNode(4)));

        let peg = crate::topology::pegasus(2).unwrap();
        assert!(clique_embedding_chimera(2, &peg).is_err());
    }

    #[test]
    fn validation_reports_each_defect() {
        let hw = chimera(1, 1, 4).unwrap();
        let complete2 = CouplingGraph::complete(2);
        let check = |chains: Vec<Vec<usize>>, logical: &CouplingGraph, needle: &str| {
            let e = Embedding::new(chains, hw.kind());
            let v = embedding_violations(&e, logical, &hw);
            assert!(
                v.iter().any(|line| line.contains(needle)),
                "wanted '{needle}' in {v:?}"
            );
        };
        check(vec![vec![0], vec![0]], &complete2, "shared by chains 0 and 1");
        check(vec![vec![0], vec![]], &complete2, "chain 1 is empty");
        check(vec![vec![0, 1], vec![4]], &complete2, "chain 0 is not connected");
        // qubits 0 and 1 share a shore, so there is no coupler between them
        check(vec![vec![0], vec![1]], &complete2, "no physical coupler");
        check(vec![vec![99], vec![0]], &complete2, "unknown qubit 99");
        check(vec![vec![0], vec![4]], &CouplingGraph::complete(3), "3 variables");
        check(vec![vec![0, 0], vec![4]], &complete2, "repeats qubit 0");

        let dead = hw.with_dead_nodes(&[5]).unwrap();
        let e = Embedding::new(vec![vec![5], vec![4]], dead.kind());
        let v = embedding_violations(&e, &complete2, &dead);
        assert!(v.iter().any(|l| l.contains("dead qubit 5")), "{v:?}");

        let ok = Embedding::new(vec![vec![0], vec![4]], hw.kind());
        validate_embedding(&ok, &complete2, &hw).unwrap();
        let err = validate_embedding(
            &Embedding::new(vec![vec![0], vec![0]], hw.kind()),
            &complete2,
            &hw,
        )
        .unwrap_err();
        assert!(matches!(err, Error::InvalidEmbedding(_)));
    }

    #[test]
    fn validation_notices_hardware_mismatch() {
        let hw = chimera(1, 1, 4).unwrap();
        let e = Embedding::new(
            vec![vec![0], vec![4]],
            TopologyKind::Chimera { m: 2, n: 2, t: 4 },
        );
        let v = embedding_violations(&e, &CouplingGraph::complete(2), &hw);
        assert!(v.iter().any(|l| l.contains("targets chimera(2,2,4)")), "{v:?}");
    }

    #[test]
    fn chain_strength_must_be_positive_and_finite() {
        let hw = chimera(1, 1, 4).unwrap();
        let m = two_var_model();
        let e = Embedding::new(vec![vec![0], vec![4]], hw.kind());
        for bad in [0.0, -1.0, f64::NAN, f64::INFINITY] {
            let err = embed_ising(&m, &e, &hw, bad, &EmbedOptions::default()).unwrap_err();
            assert!(matches!(err, Error::BadChainStrength(_)), "{bad}");
        }
    }

    #[test]
    fn autoscaled_physical_model_scales_chain_strength_too() {
        let hw = chimera(2, 2, 4).unwrap();
        let m = IsingModel::new(vec![4.0, -1.0], [(0, 1, 0.5)], 1.0).unwrap();
        let e = clique_embedding_chimera(2, &hw).unwrap();
        let phys = embed_ising(&m, &e, &hw, 1.0, &EmbedOptions::default()).unwrap();
        let (scaled, report) = phys
            .autoscaled(model::DEFAULT_H_RANGE, model::DEFAULT_J_RANGE, false)
            .unwrap();
        // largest physical |coupler| is the chain strength 4, J range is 1
        assert!((report.factor - 0.25).abs() < 1e-12);
        assert!((scaled.chain_strength() - 1.0).abs() < 1e-12);
        assert!((model::max_strength(scaled.model()) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn embedding_json_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("emb.json");
        let e = Embedding::new(
            vec![vec![4, 0], vec![5, 1], vec![6, 2]],
            TopologyKind::Chimera { m: 16, n: 16, t: 4 },
        );
        e.save(&path).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        assert!(text.contains("\"hardware\""));
        assert!(text.contains("\"kind\": \"chimera\""));
        assert!(text.contains("\"0\""));
        let back = Embedding::load(&path).unwrap();
        assert_eq!(back, e);
        // a second save is byte-identical
        let again = dir.path().join("emb2.json");
        back.save(&again).unwrap();
        assert_eq!(fs::read(&path).unwrap(), fs::read(&again).unwrap());
    }

    #[test]
    fn embedding_load_rejects_gaps() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("gap.json");
        fs::write(
            &path,
            r#"{"hardware":{"kind":"chimera","m":1,"n":1,"t":4},"0":[0],"2":[4]}"#,
        )
        .unwrap();
        let err = Embedding::load(&path).unwrap_err();
        assert!(matches!(err, Error::InvalidEmbedding(_)));
        fs::write(&path, r#"{"0":[0]}"#).unwrap();
        assert!(matches!(Embedding::load(&path).unwrap_err(), Error::Json { .. }));
    }

    #[test]
    fn metrics_summarize_chain_lengths() {
        let e = Embedding::new(
            vec![vec![0], vec![1, 2], vec![3, 4, 5, 6]],
            TopologyKind::Chimera { m: 2, n: 2, t: 4 },
        );
        let m = chain_metrics(&e);
        assert_eq!(m.physical_qubits, 7);
        assert_eq!(m.max, 4);
        assert!((m.mean - 7.0 / 3.0).abs() < 1e-12);
        assert!((m.std - (14.0f64 / 9.0).sqrt()).abs() < 1e-12);
        assert_eq!(m.histogram, BTreeMap::from([(1, 1), (2, 1), (4, 1)]));
    }

    #[test]
    fn coupling_graph_basics() {
        let g = CouplingGraph::new(4, [(2, 1), (0, 3)]).unwrap();
        assert!(g.has_edge(1, 2) && g.has_edge(3, 0));
        assert!(!g.has_edge(0, 1));
        assert_eq!(g.num_edges(), 2);
        assert_eq!(g.adjacency()[0], vec![3]);
        assert!(CouplingGraph::new(3, [(1, 1)]).is_err());
        assert!(CouplingGraph::new(3, [(0, 3)]).is_err());
        assert_eq!(CouplingGraph::complete(5).num_edges(), 10);
        let m = two_var_model();
        assert_eq!(CouplingGraph::from_model(&m).num_edges(), 1);
    }
}
