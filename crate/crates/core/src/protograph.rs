//! Base graphs (protographs): bipartite multigraphs between check and
//! variable nodes, their degree profiles, and enumeration of the closed
//! walks whose lifts are the cycles of a quasi-cyclic code.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

pub type EdgeId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    pub check: usize,
    pub var: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProtoError {
    Empty,
    RaggedRow { row: usize, len: usize, expected: usize },
    ZeroRow(usize),
    ZeroColumn(usize),
    /// Variables of degree one carry no cycles and make ACE negative.
    DegreeOneVariable(usize),
    NodeOutOfRange { edge: EdgeId },
    OddLength(usize),
    /// More closed walks than the configured cap.
    WalkOverflow { cap: usize },
}

impl fmt::Display for ProtoError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProtoError::Empty => write!(f, "base matrix is empty"),
            ProtoError::RaggedRow { row, len, expected } => {
                write!(f, "row {row} has {len} entries, expected {expected}")
            }
            ProtoError::ZeroRow(r) => write!(f, "check {r} has no edges"),
            ProtoError::ZeroColumn(c) => write!(f, "variable {c} has no edges"),
            ProtoError::DegreeOneVariable(v) => write!(f, "variable {v} has degree 1"),
            ProtoError::NodeOutOfRange { edge } => write!(f, "edge {edge} references a missing node"),
            ProtoError::OddLength(l) => write!(f, "walk length {l} is not even"),
            ProtoError::WalkOverflow { cap } => {
                write!(f, "closed-walk enumeration exceeded the cap of {cap} walks")
            }
        }
    }
}

impl core::error::Error for ProtoError {}

/// A protograph. Edge ids are dense in `0..n_edges()`; parallel edges are
/// allowed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Protograph {
    n_checks: usize,
    n_vars: usize,
    edges: Vec<Edge>,
    check_edges: Vec<Vec<EdgeId>>,
    var_edges: Vec<Vec<EdgeId>>,
}

impl Protograph {
    /// Entry `k` at `(i, j)` creates `k` parallel edges between check `i` and
    /// variable `j`. Edge ids follow row-major order.
    pub fn from_base_matrix<R: AsRef<[u32]>>(rows: &[R]) -> Result<Self, ProtoError> {
        let n_checks = rows.len();
        let n_vars = rows.first().map(|r| r.as_ref().len()).unwrap_or(0);
        if n_checks == 0 || n_vars == 0 {
            return Err(ProtoError::Empty);
        }
        let mut edges = Vec::new();
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != n_vars {
                return Err(ProtoError::RaggedRow { row: i, len: row.len(), expected: n_vars });
            }
            for (j, &m) in row.iter().enumerate() {
                for _ in 0..m {
                    edges.push(Edge { check: i, var: j });
                }
            }
        }
        Self::from_edges(n_checks, n_vars, edges)
    }

    /// Builds a protograph from an explicit edge list; edge `k` gets id `k`.
    pub fn from_edges(n_checks: usize, n_vars: usize, edges: Vec<Edge>) -> Result<Self, ProtoError> {
        if n_checks == 0 || n_vars == 0 {
            return Err(ProtoError::Empty);
        }
        let mut check_edges = vec![Vec::new(); n_checks];
        let mut var_edges = vec![Vec::new(); n_vars];
        for (id, e) in edges.iter().enumerate() {
            if e.check >= n_checks || e.var >= n_vars {
                return Err(ProtoError::NodeOutOfRange { edge: id });
            }
            check_edges[e.check].push(id);
            var_edges[e.var].push(id);
        }
        if let Some(i) = check_edges.iter().position(Vec::is_empty) {
            return Err(ProtoError::ZeroRow(i));
        }
        if let Some(j) = var_edges.iter().position(Vec::is_empty) {
            return Err(ProtoError::ZeroColumn(j));
        }
        if let Some(j) = var_edges.iter().position(|es| es.len() == 1) {
            return Err(ProtoError::DegreeOneVariable(j));
        }
        Ok(Protograph { n_checks, n_vars, edges, check_edges, var_edges })
    }

    #[inline]
    pub fn n_checks(&self) -> usize {
        self.n_checks
    }

    #[inline]
    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    #[inline]
    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    #[inline]
    pub fn edge(&self, id: EdgeId) -> Edge {
        self.edges[id]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn check_edges(&self, check: usize) -> &[EdgeId] {
        &self.check_edges[check]
    }

    pub fn var_edges(&self, var: usize) -> &[EdgeId] {
        &self.var_edges[var]
    }

    #[inline]
    pub fn var_degree(&self, var: usize) -> usize {
        self.var_edges[var].len()
    }

    #[inline]
    pub fn check_degree(&self, check: usize) -> usize {
        self.check_edges[check].len()
    }

    /// Edge multiplicities as a dense matrix.
    pub fn base_matrix(&self) -> Vec<Vec<u32>> {
        let mut m = vec![vec![0u32; self.n_vars]; self.n_checks];
        for e in &self.edges {
            m[e.check][e.var] += 1;
        }
        m
    }

    /// Number of parallel edges between `check` and `var`.
    pub fn multiplicity(&self, check: usize, var: usize) -> usize {
        self.check_edges[check].iter().filter(|&&e| self.edges[e].var == var).count()
    }

    /// Design rate `1 - m/n` of the base graph.
    pub fn design_rate(&self) -> f64 {
        1.0 - self.n_checks as f64 / self.n_vars as f64
    }

    pub fn degree_profile(&self) -> DegreeProfile {
        let total = self.edges.len() as f64;
        let mut var = BTreeMap::new();
        for es in &self.var_edges {
            *var.entry(es.len() as u32).or_insert(0.0) += es.len() as f64 / total;
        }
        let mut check = BTreeMap::new();
        for es in &self.check_edges {
            *check.entry(es.len() as u32).or_insert(0.0) += es.len() as f64 / total;
        }
        DegreeProfile { var, check }
    }

    /// ACE contribution `deg(v) - 2` of a variable.
    #[inline]
    pub fn var_ace(&self, var: usize) -> u32 {
        self.var_degree(var) as u32 - 2
    }

    /// All closed non-backtracking walks of even length `<= max_len`, one
    /// representative per rotation/reversal class, excluding walks that are
    /// repetitions of a shorter walk. Sorted by `(len, edges)`.
    ///
    /// Fails with [`ProtoError::WalkOverflow`] once more than `cap` walks are
    /// found.
    pub fn enumerate_closed_walks(&self, max_len: usize, cap: usize) -> Result<Vec<CycleRecord>, ProtoError> {
        if max_len % 2 != 0 {
            return Err(ProtoError::OddLength(max_len));
        }
        let mut out = Vec::new();
        if max_len < 2 {
            return Ok(out);
        }
        let mut path: Vec<EdgeId> = Vec::with_capacity(max_len);
        for first in 0..self.edges.len() {
            path.clear();
            path.push(first);
            let start = self.edges[first].check;
            self.extend_walk(first, start, self.edges[first].var, false, max_len, &mut path, &mut out, cap)?;
        }
        out.sort_by(|a: &CycleRecord, b: &CycleRecord| {
            a.len().cmp(&b.len()).then_with(|| a.edges.cmp(&b.edges))
        });
        Ok(out)
    }

    // `at_check`: whether `node` is a check. Only edges with id >= `first`
    // are used, so each class is produced starting from its smallest edge.
    #[allow(clippy::too_many_arguments)]
    fn extend_walk(
        &self,
        first: EdgeId,
        start: usize,
        node: usize,
        at_check: bool,
        max_len: usize,
        path: &mut Vec<EdgeId>,
        out: &mut Vec<CycleRecord>,
        cap: usize,
    ) -> Result<(), ProtoError> {
        let last = *path.last().unwrap();
        if at_check && node == start && last != first && self.is_canonical(path) && is_primitive(path) {
            if out.len() >= cap {
                return Err(ProtoError::WalkOverflow { cap });
            }
            out.push(self.record(path.clone()));
        }
        if path.len() == max_len {
            return Ok(());
        }
        let incident = if at_check { &self.check_edges[node] } else { &self.var_edges[node] };
        for &e in incident {
            if e < first || e == last {
                continue;
            }
            let next = if at_check { self.edges[e].var } else { self.edges[e].check };
            path.push(e);
            self.extend_walk(first, start, next, !at_check, max_len, path, out, cap)?;
            path.pop();
        }
        Ok(())
    }

    fn is_canonical(&self, seq: &[EdgeId]) -> bool {
        canonical_form(seq).as_slice() == seq
    }

    /// Builds the record for a closed walk given as an edge sequence that
    /// starts by leaving a check.
    pub fn record(&self, edges: Vec<EdgeId>) -> CycleRecord {
        let half = edges.len() / 2;
        let mut checks = Vec::with_capacity(half);
        let mut vars = Vec::with_capacity(half);
        for i in 0..half {
            let e = self.edges[edges[2 * i]];
            checks.push(e.check);
            vars.push(e.var);
        }
        let ace = vars.iter().map(|&v| self.var_ace(v)).sum();
        let simple_minimal = self.check_simple_minimal(&checks, &vars);
        CycleRecord { edges, checks, vars, ace, simple_minimal }
    }

    fn check_simple_minimal(&self, checks: &[usize], vars: &[usize]) -> bool {
        if checks.len() < 2 {
            return false;
        }
        let distinct = |xs: &[usize]| {
            let mut s = xs.to_vec();
            s.sort_unstable();
            s.windows(2).all(|w| w[0] != w[1])
        };
        if !distinct(checks) || !distinct(vars) {
            return false;
        }
        // Within the support, every row and column must carry exactly the two
        // cycle edges.
        let row_ok = checks
            .iter()
            .all(|&c| vars.iter().map(|&v| self.multiplicity(c, v)).sum::<usize>() == 2);
        let col_ok = vars
            .iter()
            .all(|&v| checks.iter().map(|&c| self.multiplicity(c, v)).sum::<usize>() == 2);
        row_ok && col_ok
    }
}

/// Canonical representative of a closed walk's class: the lexicographically
/// smallest sequence among even rotations of the walk and of its reversal.
/// The input must start by leaving a check.
pub fn canonical_form(seq: &[EdgeId]) -> Vec<EdgeId> {
    let n = seq.len();
    let mut best: Vec<EdgeId> = seq.to_vec();
    let mut cand = vec![0; n];
    for reversed in [false, true] {
        for shift in (0..n).step_by(2) {
            for (k, slot) in cand.iter_mut().enumerate() {
                let idx = if reversed { (n + shift - 1 - k) % n } else { (shift + k) % n };
                *slot = seq[idx];
            }
            if cand < best {
                best.copy_from_slice(&cand);
            }
        }
    }
    best
}

/// A walk is primitive if no even rotation smaller than its length maps it
/// onto itself.
fn is_primitive(seq: &[EdgeId]) -> bool {
    let n = seq.len();
    (2..n)
        .step_by(2)
        .filter(|p| n % p == 0)
        .all(|p| (0..n).any(|k| seq[k] != seq[(k + p) % n]))
}

/// Edge-perspective degree profile: `var[d]` is the fraction of edges
/// attached to variables of degree `d` (lambda_d), `check[d]` likewise.
#[derive(Debug, Clone, PartialEq)]
pub struct DegreeProfile {
    pub var: BTreeMap<u32, f64>,
    pub check: BTreeMap<u32, f64>,
}

impl DegreeProfile {
    /// Largest absolute coefficient difference over both families; missing
    /// degrees count as zero.
    pub fn max_deviation(&self, other: &DegreeProfile) -> f64 {
        fn dev(a: &BTreeMap<u32, f64>, b: &BTreeMap<u32, f64>) -> f64 {
            a.keys()
                .chain(b.keys())
                .map(|k| (a.get(k).copied().unwrap_or(0.0) - b.get(k).copied().unwrap_or(0.0)).abs())
                .fold(0.0, f64::max)
        }
        dev(&self.var, &other.var).max(dev(&self.check, &other.check))
    }
}

/// A closed non-backtracking walk in the protograph.
///
/// Position `2i` is `checks[i]`, position `2i + 1` is `vars[i]`; edge `2i`
/// joins `checks[i]` to `vars[i]` and edge `2i + 1` joins `vars[i]` to
/// `checks[(i + 1) % half]`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CycleRecord {
    pub edges: Vec<EdgeId>,
    pub checks: Vec<usize>,
    pub vars: Vec<usize>,
    /// Sum of `deg(v) - 2` over variable visits.
    pub ace: u32,
    /// No repeated node and the base submatrix on the support has exactly two
    /// edges in every row and column.
    pub simple_minimal: bool,
}

impl CycleRecord {
    #[inline]
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }
}
