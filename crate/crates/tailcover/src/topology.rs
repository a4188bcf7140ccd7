//! Chimera and Pegasus hardware graphs.
//!
//! Node ids are dense and 0-based. For `chimera(m, n, t)` the qubit at cell
//! `(row, col)`, shore `u` (0 = vertical, couples across rows; 1 =
//! horizontal, couples across columns), offset `k` has id
//! `((row * n + col) * 2 + u) * t + k`.
//!
//! Pegasus is built from its segment geometry. A qubit `(u, w, k, z)` with
//! `u ∈ {0,1}`, `w ∈ [0, m)`, `k ∈ [0, 12)`, `z ∈ [0, m-1)` is a length-12
//! segment: vertical qubits (`u = 0`) sit at `x = 12w + k` covering
//! `y ∈ [12z + S0[k], 12z + S0[k] + 12)`, horizontal ones at `y = 12w + k`
//! covering `x ∈ [12z + S1[k], ...)`, with the offset tables `S0`/`S1` below.
//! Internal couplers join crossing segments, external couplers join
//! consecutive collinear segments, odd couplers join the parallel pair
//! `k = 2j, 2j+1`. The 8(m-1) boundary qubits that cross nothing (at `w = 0`
//! with `k < 2` and at `w = m-1` with `k >= 10`) form components disconnected
//! from the main fabric and are dropped; remaining qubits are renumbered
//! densely in `(u, w, k, z)` order.

use std::collections::BTreeSet;
use std::fmt;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Start of each vertical qubit's y-span, indexed by k.
const S0: [usize; 12] = [2, 2, 2, 2, 6, 6, 6, 6, 10, 10, 10, 10];
/// Start of each horizontal qubit's x-span, indexed by k.
const S1: [usize; 12] = [6, 6, 2, 2, 2, 2, 10, 10, 6, 6, 10, 10];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum TopologyKind {
    Chimera { m: usize, n: usize, t: usize },
    Pegasus { m: usize },
}

impl TopologyKind {
    pub fn build(&self) -> Result<HardwareGraph> {
        match *self {
            TopologyKind::Chimera { m, n, t } => chimera(m, n, t),
            TopologyKind::Pegasus { m } => pegasus(m),
        }
    }

    /// Parse `chimera:16,16,4` or `pegasus:16`.
    pub fn parse(s: &str) -> Result<TopologyKind> {
        let bad = || Error::BadTopologySpec(s.to_string());
        let (name, args) = s.split_once(':').ok_or_else(bad)?;
        let nums: Vec<usize> = args
            .split(',')
            .map(|a| a.trim().parse().map_err(|_| bad()))
            .collect::<Result<_>>()?;
        match (name.trim(), nums.as_slice()) {
            ("chimera", &[m, n, t]) => Ok(TopologyKind::Chimera { m, n, t }),
            ("pegasus", &[m]) => Ok(TopologyKind::Pegasus { m }),
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for TopologyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            TopologyKind::Chimera { m, n, t } => write!(f, "chimera({m},{n},{t})"),
            TopologyKind::Pegasus { m } => write!(f, "pegasus({m})"),
        }
    }
}

impl FromStr for TopologyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<TopologyKind> {
        TopologyKind::parse(s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HardwareGraph {
    kind: TopologyKind,
    /// Adjacency by node id; dead nodes keep their id but lose all edges.
    adj: Vec<Vec<usize>>,
    dead: BTreeSet<usize>,
    num_edges: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DegreeStats {
    pub min: usize,
    pub max: usize,
    pub mean: f64,
    pub nodes: usize,
    pub edges: usize,
}

impl HardwareGraph {
    fn from_edges(kind: TopologyKind, total: usize, edges: &[(usize, usize)]) -> HardwareGraph {
        let mut adj = vec![Vec::new(); total];
        for &(a, b) in edges {
            debug_assert!(a != b && a < total && b < total);
            adj[a].push(b);
            adj[b].push(a);
        }
        for list in &mut adj {
            list.sort_unstable();
            debug_assert!(list.windows(2).all(|w| w[0] != w[1]), "duplicate edge");
        }
        HardwareGraph {
            kind,
            adj,
            dead: BTreeSet::new(),
            num_edges: edges.len(),
        }
    }

    pub fn kind(&self) -> TopologyKind {
        self.kind
    }

    /// Id space size, dead nodes included (ids stay stable under defects).
    pub fn total_nodes(&self) -> usize {
        self.adj.len()
    }

    /// Number of live nodes.
    pub fn num_nodes(&self) -> usize {
        self.adj.len() - self.dead.len()
    }

    pub fn num_edges(&self) -> usize {
        self.num_edges
    }

    pub fn is_live(&self, v: usize) -> bool {
        v < self.adj.len() && !self.dead.contains(&v)
    }

    pub fn nodes(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.adj.len()).filter(move |v| !self.dead.contains(v))
    }

    pub fn dead_nodes(&self) -> impl Iterator<Item = usize> + '_ {
        self.dead.iter().copied()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        a < self.adj.len() && self.adj[a].binary_search(&b).is_ok()
    }

    /// All edges as `(a, b)` with `a < b`, ascending.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.num_edges);
        for (a, list) in self.adj.iter().enumerate() {
            for &b in list {
                if a < b {
                    out.push((a, b));
                }
            }
        }
        out
    }

    /// Copy of the graph with `dead` nodes removed: their ids remain valid
    /// but carry no edges, emulating yield defects.
    pub fn with_dead_nodes(&self, dead: &[usize]) -> Result<HardwareGraph> {
        for &v in dead {
            if v >= self.adj.len() {
                return Err(Error::IndexOutOfRange {
                    index: v,
                    n: self.adj.len(),
                });
            }
        }
        let mut out = self.clone();
        out.dead.extend(dead.iter().copied());
        let dead_set = out.dead.clone();
        let mut removed = 0;
        for (v, list) in out.adj.iter_mut().enumerate() {
            if dead_set.contains(&v) {
                removed += list.len();
                list.clear();
            } else {
                let before = list.len();
                list.retain(|u| !dead_set.contains(u));
                removed += before - list.len();
            }
        }
        out.num_edges -= removed / 2;
        Ok(out)
    }

    pub fn degree_stats(&self) -> DegreeStats {
        let mut min = usize::MAX;
        let mut max = 0;
        let mut sum = 0usize;
        let mut nodes = 0usize;
        for v in self.nodes() {
            let d = self.degree(v);
            min = min.min(d);
            max = max.max(d);
            sum += d;
            nodes += 1;
        }
        DegreeStats {
            min: if nodes == 0 { 0 } else { min },
            max,
            mean: if nodes == 0 { 0.0 } else { sum as f64 / nodes as f64 },
            nodes,
            edges: self.num_edges,
        }
    }

    /// Text export: a header comment naming the graph, then one `<u> <v>`
    /// line per edge, ascending.
    pub fn save_edge_list(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut out = String::new();
        let _ = writeln!(
            out,
            "# {} nodes={} edges={}",
            self.kind,
            self.num_nodes(),
            self.num_edges
        );
        for (a, b) in self.edges() {
            let _ = writeln!(out, "{a} {b}");
        }
        fs::write(path, out).map_err(|e| Error::io(path, e))
    }
}

/// Grid of `m x n` cells, each a K_{t,t}; vertical qubits (shore 0) couple to
/// the same offset in the cells above and below, horizontal qubits (shore 1)
/// to the cells left and right.
pub fn chimera(m: usize, n: usize, t: usize) -> Result<HardwareGraph> {
    if m == 0 || n == 0 || t == 0 {
        return Err(Error::InvalidTopology(format!(
            "chimera({m},{n},{t}) has a zero dimension"
        )));
    }
    let id = |row: usize, col: usize, shore: usize, k: usize| chimera_id(n, t, row, col, shore, k);
    let mut edges = Vec::new();
    for row in 0..m {
        for col in 0..n {
            for ka in 0..t {
                for kb in 0..t {
                    edges.push((id(row, col, 0, ka), id(row, col, 1, kb)));
                }
            }
            for k in 0..t {
                if row + 1 < m {
                    edges.push((id(row, col, 0, k), id(row + 1, col, 0, k)));
                }
                if col + 1 < n {
                    edges.push((id(row, col, 1, k), id(row, col + 1, 1, k)));
                }
            }
        }
    }
    Ok(HardwareGraph::from_edges(
        TopologyKind::Chimera { m, n, t },
        2 * m * n * t,
        &edges,
    ))
}

/// Id of a chimera qubit by coordinate; `n` and `t` as in [`chimera`].
pub(crate) fn chimera_id(
    n: usize,
    t: usize,
    row: usize,
    col: usize,
    shore: usize,
    k: usize,
) -> usize {
    ((row * n + col) * 2 + shore) * t + k
}

/// Pegasus fabric P_m; see the module docs for the construction. Node count
/// is `8(m-1)(3m-1)`, maximum degree 15.
pub fn pegasus(m: usize) -> Result<HardwareGraph> {
    Ok(pegasus_parts(m)?.0)
}

/// Dropped from the fabric: such a segment crosses no perpendicular segment.
fn pegasus_trimmed(m: usize, w: usize, k: usize) -> bool {
    (w == 0 && k < 2) || (w == m - 1 && k >= 10)
}

/// Raw coordinate index -> compact node id (None for trimmed qubits).
type PegasusIndex = Vec<Option<usize>>;

fn pegasus_raw(m: usize, u: usize, w: usize, k: usize, z: usize) -> usize {
    ((u * m + w) * 12 + k) * (m - 1) + z
}

fn pegasus_parts(m: usize) -> Result<(HardwareGraph, PegasusIndex)> {
    if m < 2 {
        return Err(Error::InvalidTopology(format!(
            "pegasus({m}) requires m >= 2"
        )));
    }
    let mut index: PegasusIndex = vec![None; 2 * m * 12 * (m - 1)];
    let mut next = 0;
    for u in 0..2 {
        for w in 0..m {
            for k in 0..12 {
                if pegasus_trimmed(m, w, k) {
                    continue;
                }
                for z in 0..m - 1 {
                    index[pegasus_raw(m, u, w, k, z)] = Some(next);
                    next += 1;
                }
            }
        }
    }
    let at = |u: usize, w: usize, k: usize, z: usize| index[pegasus_raw(m, u, w, k, z)];

    let mut edges = Vec::new();
    for u in 0..2 {
        for w in 0..m {
            for k in 0..12 {
                for z in 0..m - 1 {
                    let Some(a) = at(u, w, k, z) else { continue };
                    // external: the next collinear segment
                    if z + 1 < m - 1 {
                        edges.push((a, at(u, w, k, z + 1).expect("same trim class")));
                    }
                    // odd: the parallel twin lane
                    if k % 2 == 0 {
                        edges.push((a, at(u, w, k + 1, z).expect("same trim class")));
                    }
                }
            }
        }
    }
    // internal: each vertical segment crosses one horizontal lane per k
    // residue; locate its (w, z) by integer division and keep it if it is on
    // the grid
    for wv in 0..m {
        for kv in 0..12 {
            if pegasus_trimmed(m, wv, kv) {
                continue;
            }
            let x = (12 * wv + kv) as i64;
            for zv in 0..m - 1 {
                let a = at(0, wv, kv, zv).expect("not trimmed");
                let ylo = (12 * zv + S0[kv]) as i64;
                for kh in 0..12usize {
                    // unique wh with 12*wh + kh in [ylo, ylo + 12)
                    let wh = (ylo - kh as i64 + 11).div_euclid(12);
                    if wh < 0 || wh >= m as i64 {
                        continue;
                    }
                    let zh = (x - S1[kh] as i64).div_euclid(12);
                    if zh < 0 || zh >= (m - 1) as i64 {
                        continue;
                    }
                    if let Some(b) = at(1, wh as usize, kh, zh as usize) {
                        edges.push((a, b));
                    }
                }
            }
        }
    }

    let graph = HardwareGraph::from_edges(TopologyKind::Pegasus { m }, next, &edges);
    Ok((graph, index))
}
