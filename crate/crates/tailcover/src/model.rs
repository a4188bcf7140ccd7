//! Binary quadratic models and the exact-cover compilation.
//!
//! Two equivalent forms are supported. A QUBO over bits `x ∈ {0,1}^n`:
//!
//! ```text
//! E(x) = sum_{i<=j} x_i Q_ij x_j + offset
//! ```
//!
//! and an Ising model over spins `s ∈ {-1,+1}^n`:
//!
//! ```text
//! E(s) = sum_i h_i s_i + sum_{i<j} J_ij s_i s_j + offset
//! ```
//!
//! Conversions use the convention `x_i = (1 + s_i) / 2`, i.e. bit 1 maps to
//! spin +1.
//!
//! [`qubo_from_instance`] and [`ising_from_instance`] compile a
//! set-partitioning instance with route costs `c` and cost weight `lambda`
//! into the objective
//!
//! ```text
//! lambda * c.x + ||A^T x - 1||^2
//! ```
//!
//! where `A` is the routes-by-flights incidence matrix. The offsets are chosen
//! so that model energy equals that objective; in particular an exact cover at
//! `lambda = 0` has energy exactly zero.
//!
//! # Text format
//!
//! Models round-trip through a line-based text format, one record per line,
//! whitespace separated, order independent, `#` starting a comment:
//!
//! ```text
//! h <i> <value>        Ising linear bias
//! J <i> <j> <value>    Ising coupler, i < j
//! Q <i> <j> <value>    QUBO entry, i <= j
//! offset <value>
//! ```
//!
//! Writers emit a `# ising n=<n>` (or `# qubo n=<n>`) comment so that trailing
//! variables without records keep the model size on reload; readers treat it
//! as any other comment if absent and infer the size from the largest index.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::instances::ExactCoverInstance;
use crate::{Error, Result};

/// Default target range for linear biases when autoscaling.
pub const DEFAULT_H_RANGE: (f64, f64) = (-2.0, 2.0);
/// Default target range for couplers when autoscaling.
pub const DEFAULT_J_RANGE: (f64, f64) = (-1.0, 1.0);

#[derive(Debug, Clone, PartialEq)]
pub struct QuboModel {
    n: usize,
    /// Upper-triangular entries keyed by `(i, j)` with `i <= j`; exact zeros
    /// are never stored.
    q: BTreeMap<(usize, usize), f64>,
    offset: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IsingModel {
    h: Vec<f64>,
    /// Couplers keyed by `(i, j)` with `i < j`; exact zeros are never stored.
    j: BTreeMap<(usize, usize), f64>,
    offset: f64,
}

/// What [`autoscale`] did: every coefficient (and the offset) was multiplied
/// by `factor`, chosen as the largest value keeping `h` within `h_range` and
/// `J` within `j_range`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaleReport {
    pub factor: f64,
    pub h_range: (f64, f64),
    pub j_range: (f64, f64),
}

impl QuboModel {
    /// Build from `(i, j, value)` entries with `i <= j` after normalization
    /// (entries are symmetrized: `(j, i)` is accepted and folded). Duplicate
    /// keys are summed; exact zeros are dropped.
    pub fn new(
        n: usize,
        entries: impl IntoIterator<Item = (usize, usize, f64)>,
        offset: f64,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyModel);
        }
        check_finite(offset)?;
        let mut q = BTreeMap::new();
        for (i, j, v) in entries {
            let (a, b) = if i <= j { (i, j) } else { (j, i) };
            if b >= n {
                return Err(Error::IndexOutOfRange { index: b, n });
            }
            check_finite(v)?;
            *q.entry((a, b)).or_insert(0.0) += v;
        }
        q.retain(|_, v| *v != 0.0);
        Ok(QuboModel { n, q, offset })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    /// Stored entries in `(i, j, value)` form, ascending by key.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.q.iter().map(|(&(i, j), &v)| (i, j, v))
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let key = if i <= j { (i, j) } else { (j, i) };
        self.q.get(&key).copied().unwrap_or(0.0)
    }

    /// Number of stored off-diagonal entries.
    pub fn num_couplers(&self) -> usize {
        self.q.keys().filter(|(i, j)| i != j).count()
    }

    /// `E(x) = sum_{i<=j} x_i Q_ij x_j + offset` for a 0/1 bit vector.
    pub fn energy(&self, x: &[u8]) -> Result<f64> {
        check_bits(self.n, x)?;
        let mut e = self.offset;
        for (&(i, j), &v) in &self.q {
            if x[i] == 1 && x[j] == 1 {
                e += v;
            }
        }
        Ok(e)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_text(&text).map_err(|e| locate(e, path))
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# qubo n={}", self.n);
        for (&(i, j), &v) in &self.q {
            let _ = writeln!(out, "Q {i} {j} {v}");
        }
        let _ = writeln!(out, "offset {}", self.offset);
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let parsed = parse_model_text(text, ModelKind::Qubo)?;
        QuboModel::new(
            parsed.n,
            parsed.quadratic.iter().map(|(&(i, j), &v)| (i, j, v)),
            parsed.offset,
        )
    }
}

impl IsingModel {
    /// Build from dense biases and `(i, j, value)` couplers. Coupler indices
    /// are normalized to `i < j`; duplicates are summed, exact zeros dropped,
    /// and diagonal couplers rejected.
    pub fn new(
        h: Vec<f64>,
        couplers: impl IntoIterator<Item = (usize, usize, f64)>,
        offset: f64,
    ) -> Result<Self> {
        let n = h.len();
        if n == 0 {
            return Err(Error::EmptyModel);
        }
        for &v in &h {
            check_finite(v)?;
        }
        check_finite(offset)?;
        let mut j = BTreeMap::new();
        for (a, b, v) in couplers {
            if a == b {
                return Err(Error::DiagonalCoupler { i: a });
            }
            let (a, b) = if a < b { (a, b) } else { (b, a) };
            if b >= n {
                return Err(Error::IndexOutOfRange { index: b, n });
            }
            check_finite(v)?;
            *j.entry((a, b)).or_insert(0.0) += v;
        }
        j.retain(|_, v| *v != 0.0);
        Ok(IsingModel { h, j, offset })
    }

    pub fn n(&self) -> usize {
        self.h.len()
    }

    pub fn h(&self) -> &[f64] {
        &self.h
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    /// Stored couplers in `(i, j, value)` form, ascending by key.
    pub fn couplers(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.j.iter().map(|(&(i, j), &v)| (i, j, v))
    }

    pub fn get_j(&self, i: usize, j: usize) -> f64 {
        let key = if i < j { (i, j) } else { (j, i) };
        self.j.get(&key).copied().unwrap_or(0.0)
    }

    pub fn num_couplers(&self) -> usize {
        self.j.len()
    }

    /// The coupler index pairs, for embedding.
    pub fn coupling_graph(&self) -> Vec<(usize, usize)> {
        self.j.keys().copied().collect()
    }

    /// Neighbor lists with coupler values, for samplers.
    pub fn adjacency(&self) -> Vec<Vec<(usize, f64)>> {
        let mut adj = vec![Vec::new(); self.n()];
        for (&(i, j), &v) in &self.j {
            adj[i].push((j, v));
            adj[j].push((i, v));
        }
        adj
    }

    /// `E(s) = sum_i h_i s_i + sum_{i<j} J_ij s_i s_j + offset` for a ±1 spin
    /// vector.
    pub fn energy(&self, s: &[i8]) -> Result<f64> {
        check_spins(self.n(), s)?;
        let mut e = self.offset;
        for (i, &hi) in self.h.iter().enumerate() {
            e += hi * s[i] as f64;
        }
        for (&(i, j), &v) in &self.j {
            e += v * (s[i] as f64) * (s[j] as f64);
        }
        Ok(e)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_text(&text).map_err(|e| locate(e, path))
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# ising n={}", self.n());
        for (i, &v) in self.h.iter().enumerate() {
            let _ = writeln!(out, "h {i} {v}");
        }
        for (&(i, j), &v) in &self.j {
            let _ = writeln!(out, "J {i} {j} {v}");
        }
        let _ = writeln!(out, "offset {}", self.offset);
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let parsed = parse_model_text(text, ModelKind::Ising)?;
        let mut h = vec![0.0; parsed.n];
        for (i, v) in parsed.linear {
            h[i] = v;
        }
        IsingModel::new(
            h,
            parsed.quadratic.iter().map(|(&(i, j), &v)| (i, j, v)),
            parsed.offset,
        )
    }
}

/// Largest absolute coefficient, `max(|h_i|, |J_ij|)`; 0 for an all-zero
/// model. Chain strengths are expressed relative to this.
pub fn max_strength(m: &IsingModel) -> f64 {
    let mut best = 0.0f64;
    for &v in m.h() {
        best = best.max(v.abs());
    }
    for (_, _, v) in m.couplers() {
        best = best.max(v.abs());
    }
    best
}

/// Multiply every coefficient and the offset by the largest single factor
/// that puts all `h` within `h_range` and all `J` within `j_range`. Without
/// `allow_upscale` the factor is capped at 1, so in-range models are returned
/// unchanged. The minimizing states are preserved since the factor is
/// positive; energies scale by the factor. An all-zero model reports factor 1.
pub fn autoscale(
    m: &IsingModel,
    h_range: (f64, f64),
    j_range: (f64, f64),
    allow_upscale: bool,
) -> Result<(IsingModel, ScaleReport)> {
    for (lo, hi, what) in [(h_range.0, h_range.1, "h"), (j_range.0, j_range.1, "J")] {
        if !(lo.is_finite() && hi.is_finite()) || lo >= 0.0 || hi <= 0.0 {
            return Err(Error::InvalidInstance(format!(
                "{what} target range ({lo}, {hi}) must contain 0 in its interior"
            )));
        }
    }
    let mut factor = f64::INFINITY;
    let mut fit = |v: f64, (lo, hi): (f64, f64)| {
        if v > 0.0 {
            factor = factor.min(hi / v);
        } else if v < 0.0 {
            factor = factor.min(lo / v);
        }
    };
    for &v in m.h() {
        fit(v, h_range);
    }
    for (_, _, v) in m.couplers() {
        fit(v, j_range);
    }
    let factor = match (factor.is_finite(), allow_upscale) {
        (false, _) => 1.0, // all-zero model: scale is undefined, report 1
        (true, true) => factor,
        (true, false) => factor.min(1.0),
    };
    let scaled = IsingModel::new(
        m.h().iter().map(|v| v * factor).collect(),
        m.couplers().map(|(i, j, v)| (i, j, v * factor)),
        m.offset() * factor,
    )?;
    let report = ScaleReport {
        factor,
        h_range,
        j_range,
    };
    Ok((scaled, report))
}

/// Compile a set-partitioning instance into a QUBO. With overlap counts
/// `W = A A^T` and route sizes `L_i = W_ii`:
///
/// ```text
/// Q_ii = -L_i + lambda * c_i
/// Q_ij = 2 W_ij            (i < j)
/// offset = F
/// ```
pub fn qubo_from_instance(inst: &ExactCoverInstance, lambda: f64) -> Result<QuboModel> {
    inst.validate()?;
    let costs = lambda_costs(inst, lambda)?;
    let r = inst.routes();
    let w = overlap_matrix(inst);
    let mut entries = Vec::new();
    for i in 0..r {
        let li = w[i * r + i] as f64;
        entries.push((i, i, -li + costs(i)));
        for j in i + 1..r {
            let wij = w[i * r + j];
            if wij != 0 {
                entries.push((i, j, 2.0 * wij as f64));
            }
        }
    }
    QuboModel::new(r, entries, inst.flights() as f64)
}

/// Compile a set-partitioning instance straight to Ising form:
///
/// ```text
/// h_i = (1/2) sum_j W_ij - L_i + (lambda/2) c_i
/// J_ij = W_ij / 2                                  (i < j)
/// offset = F + (1/2) sum_{i<j} W_ij + (1/2) sum_i (L_i - 2 L_i + lambda c_i)
/// ```
///
/// which agrees exactly with converting [`qubo_from_instance`].
pub fn ising_from_instance(inst: &ExactCoverInstance, lambda: f64) -> Result<IsingModel> {
    inst.validate()?;
    let costs = lambda_costs(inst, lambda)?;
    let r = inst.routes();
    let w = overlap_matrix(inst);
    let mut h = vec![0.0; r];
    let mut couplers = Vec::new();
    let mut offset = inst.flights() as f64;
    for i in 0..r {
        let li = w[i * r + i] as f64;
        let row_sum: u64 = (0..r).map(|j| w[i * r + j] as u64).sum();
        h[i] = 0.5 * row_sum as f64 - li + 0.5 * costs(i);
        offset += 0.5 * (-li + costs(i));
        for j in i + 1..r {
            let wij = w[i * r + j];
            if wij != 0 {
                couplers.push((i, j, wij as f64 / 2.0));
                offset += wij as f64 / 2.0;
            }
        }
    }
    IsingModel::new(h, couplers, offset)
}

fn lambda_costs(inst: &ExactCoverInstance, lambda: f64) -> Result<impl Fn(usize) -> f64 + '_> {
    if lambda < 0.0 || !lambda.is_finite() {
        return Err(Error::NegativeLambda(lambda));
    }
    if lambda > 0.0 && inst.costs().is_none() {
        return Err(Error::MissingCosts);
    }
    let costs = inst.costs().map(|c| c.to_vec());
    Ok(move |i: usize| match &costs {
        Some(c) if lambda > 0.0 => lambda * c[i],
        _ => 0.0,
    })
}

/// Dense `R x R` overlap matrix `W = A A^T` (flights shared per route pair).
fn overlap_matrix(inst: &ExactCoverInstance) -> Vec<u32> {
    let r = inst.routes();
    let mut w = vec![0u32; r * r];
    for i in 0..r {
        for j in i..r {
            let o = inst.overlap(i, j) as u32;
            w[i * r + j] = o;
            w[j * r + i] = o;
        }
    }
    w
}

/// Change of variables `x_i = (1 + s_i) / 2`:
///
/// ```text
/// J_ij = Q_ij / 4
/// h_i = Q_ii / 2 + (1/4) sum_{j != i} Q_ij
/// offset += (1/4) sum_{i<j} Q_ij + (1/2) sum_i Q_ii
/// ```
pub fn qubo_to_ising(q: &QuboModel) -> IsingModel {
    let n = q.n();
    let mut h = vec![0.0; n];
    let mut offset = q.offset();
    let mut couplers = Vec::new();
    for (i, j, v) in q.entries() {
        if i == j {
            h[i] += v / 2.0;
            offset += v / 2.0;
        } else {
            couplers.push((i, j, v / 4.0));
            h[i] += v / 4.0;
            h[j] += v / 4.0;
            offset += v / 4.0;
        }
    }
    IsingModel::new(h, couplers, offset).expect("valid QUBO converts to valid Ising")
}

/// Inverse change of variables `s_i = 2 x_i - 1`:
///
/// ```text
/// Q_ij = 4 J_ij
/// Q_ii = 2 h_i - 2 sum_{j != i} J_ij
/// offset += sum_{i<j} J_ij - sum_i h_i
/// ```
pub fn ising_to_qubo(m: &IsingModel) -> QuboModel {
    let n = m.n();
    let mut diag = vec![0.0; n];
    let mut offset = m.offset();
    let mut entries = Vec::new();
    for (i, &hi) in m.h().iter().enumerate() {
        diag[i] += 2.0 * hi;
        offset -= hi;
    }
    for (i, j, v) in m.couplers() {
        entries.push((i, j, 4.0 * v));
        diag[i] -= 2.0 * v;
        diag[j] -= 2.0 * v;
        offset += v;
    }
    entries.extend((0..n).map(|i| (i, i, diag[i])));
    QuboModel::new(n, entries, offset).expect("valid Ising converts to valid QUBO")
}

/// Map bits to spins under `x = (1 + s) / 2`: bit 1 becomes spin +1.
pub fn bits_to_spins(x: &[u8]) -> Vec<i8> {
    x.iter().map(|&b| if b == 1 { 1 } else { -1 }).collect()
}

/// Inverse of [`bits_to_spins`].
pub fn spins_to_bits(s: &[i8]) -> Vec<u8> {
    s.iter().map(|&v| if v == 1 { 1 } else { 0 }).collect()
}

fn check_finite(v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidInstance(format!(
            "coefficient {v} is not finite"
        )))
    }
}

fn check_bits(n: usize, x: &[u8]) -> Result<()> {
    if x.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: x.len(),
        });
    }
    for (index, &value) in x.iter().enumerate() {
        if value > 1 {
            return Err(Error::InvalidBit { index, value });
        }
    }
    Ok(())
}

pub(crate) fn check_spins(n: usize, s: &[i8]) -> Result<()> {
    if s.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: s.len(),
        });
    }
    for (index, &value) in s.iter().enumerate() {
        if value != 1 && value != -1 {
            return Err(Error::InvalidSpin { index, value });
        }
    }
    Ok(())
}

enum ModelKind {
    Ising,
    Qubo,
}

struct ParsedModel {
    n: usize,
    linear: Vec<(usize, f64)>,
    quadratic: BTreeMap<(usize, usize), f64>,
    offset: f64,
}

fn locate(e: Error, path: &Path) -> Error {
    match e {
        Error::ParseModel { line, message, .. } => Error::ParseModel {
            path: path.display().to_string(),
            line,
            message,
        },
        other => other,
    }
}

fn parse_model_text(text: &str, kind: ModelKind) -> Result<ParsedModel> {
    let err = |line: usize, message: String| Error::ParseModel {
        path: "<input>".into(),
        line,
        message,
    };
    let mut linear: Vec<(usize, f64)> = Vec::new();
    let mut seen_linear = std::collections::BTreeSet::new();
    let mut quadratic = BTreeMap::new();
    let mut offset: Option<f64> = None;
    let mut max_index = None::<usize>;
    let mut declared_n = None::<usize>;

    for (lineno, raw) in text.lines().enumerate() {
        let lineno = lineno + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            // Writers record the model size as `# ising n=<n>`; honor it when
            // present so trailing variables without records survive reload.
            let mut words = comment.split_whitespace();
            if let (Some(tag), Some(decl)) = (words.next(), words.next()) {
                if matches!(tag, "ising" | "qubo") {
                    if let Some(n) = decl.strip_prefix("n=").and_then(|s| s.parse().ok()) {
                        declared_n = Some(n);
                    }
                }
            }
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        let parse_idx = |s: &str| -> Result<usize> {
            s.parse()
                .map_err(|_| err(lineno, format!("bad index '{s}'")))
        };
        let parse_val = |s: &str| -> Result<f64> {
            s.parse()
                .map_err(|_| err(lineno, format!("bad value '{s}'")))
        };
        match (tokens[0], tokens.len(), &kind) {
            ("h", 3, ModelKind::Ising) => {
                let i = parse_idx(tokens[1])?;
                let v = parse_val(tokens[2])?;
                if !seen_linear.insert(i) {
                    return Err(err(lineno, format!("duplicate bias for variable {i}")));
                }
                max_index = Some(max_index.map_or(i, |m: usize| m.max(i)));
                linear.push((i, v));
            }
            ("J", 4, ModelKind::Ising) | ("Q", 4, ModelKind::Qubo) => {
                let i = parse_idx(tokens[1])?;
                let j = parse_idx(tokens[2])?;
                let v = parse_val(tokens[3])?;
                let strict = matches!(kind, ModelKind::Ising);
                if i > j || (strict && i == j) {
                    return Err(err(
                        lineno,
                        format!(
                            "indices {i} {j} must satisfy i {} j",
                            if strict { "<" } else { "<=" }
                        ),
                    ));
                }
                if quadratic.insert((i, j), v).is_some() {
                    return Err(err(lineno, format!("duplicate entry for ({i}, {j})")));
                }
                max_index = Some(max_index.map_or(j, |m: usize| m.max(j)));
            }
            ("offset", 2, _) => {
                let v = parse_val(tokens[1])?;
                if offset.replace(v).is_some() {
                    return Err(err(lineno, "duplicate offset".into()));
                }
            }
            (tag, _, _) => {
                return Err(err(lineno, format!("unrecognized record '{tag}'")));
            }
        }
    }

    let from_records = max_index.map(|m| m + 1).unwrap_or(0);
    let n = declared_n.unwrap_or(0).max(from_records);
    if n == 0 {
        return Err(err(0, "model text contains no records".into()));
    }
    Ok(ParsedModel {
        n,
        linear,
        quadratic,
        offset: offset.unwrap_or(0.0),
    })
}
