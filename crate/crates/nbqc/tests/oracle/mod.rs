//! Brute-force references that work on the expanded lifted graph only.
#![allow(dead_code)]

use nbqc_core::codec::SparseGfMatrix;
use nbqc_core::gf2m::{FieldDesc, GfElem};
use nbqc_core::protograph::{CycleRecord, Protograph};
use nbqc_core::qclift::{AceSpectrum, AceValue, QcCode};
use rand::Rng;

/// Tanner graph with checks `0..m` and variables `m..m+n`.
pub struct Tanner {
    pub m: usize,
    pub n: usize,
    pub adj: Vec<Vec<usize>>,
}

impl Tanner {
    pub fn new(h: &SparseGfMatrix) -> Self {
        let (m, n) = (h.n_rows(), h.n_cols());
        let mut adj = vec![Vec::new(); m + n];
        for (r, row) in h.rows().enumerate() {
            for &(c, _) in row {
                adj[r].push(m + c);
                adj[m + c].push(r);
            }
        }
        Tanner { m, n, adj }
    }

    pub fn degree(&self, node: usize) -> usize {
        self.adj[node].len()
    }

    pub fn is_var(&self, node: usize) -> bool {
        node >= self.m
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adj[a].contains(&b)
    }

    /// Every simple cycle of length `<= depth`, once, as a node sequence
    /// starting at its smallest node.
    pub fn simple_cycles(&self, depth: usize) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut path = Vec::new();
        let mut on_path = vec![false; self.adj.len()];
        for s in 0..self.adj.len() {
            path.push(s);
            on_path[s] = true;
            self.dfs(s, depth, &mut path, &mut on_path, &mut out);
            on_path[s] = false;
            path.pop();
        }
        out
    }

    fn dfs(&self, s: usize, depth: usize, path: &mut Vec<usize>, on_path: &mut [bool], out: &mut Vec<Vec<usize>>) {
        let u = *path.last().unwrap();
        for &w in &self.adj[u] {
            if w == s && path.len() >= 4 {
                // Each cycle is found in both directions; keep one.
                if path[1] < path[path.len() - 1] {
                    out.push(path.clone());
                }
            } else if w > s && !on_path[w] && path.len() < depth {
                path.push(w);
                on_path[w] = true;
                self.dfs(s, depth, path, on_path, out);
                on_path[w] = false;
                path.pop();
            }
        }
    }
}

pub fn cycle_ace(t: &Tanner, cycle: &[usize]) -> u64 {
    cycle.iter().filter(|&&v| t.is_var(v)).map(|&v| t.degree(v) as u64 - 2).sum()
}

/// No edge between cycle nodes other than the cycle's own.
pub fn chordless(t: &Tanner, cycle: &[usize]) -> bool {
    let induced: usize = cycle
        .iter()
        .filter(|&&a| !t.is_var(a))
        .map(|&a| cycle.iter().filter(|&&b| t.is_var(b) && t.has_edge(a, b)).count())
        .sum();
    induced == cycle.len()
}

/// Plain Gauss-Jordan rank over the field.
pub fn rank(mut rows: Vec<Vec<GfElem>>, field: &FieldDesc) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else { continue };
        rows.swap(r, p);
        let inv = field.inv(rows[r][c]).unwrap();
        let pivot: Vec<GfElem> = rows[r].iter().map(|&x| field.mul(x, inv)).collect();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let f = row[c];
                for (x, &y) in row.iter_mut().zip(&pivot) {
                    *x = field.add(*x, field.mul(f, y));
                }
            }
        }
        rows[r] = pivot;
        r += 1;
    }
    r
}

/// Expanded matrix built straight from the MCPM definition: block row `i`
/// of an edge with shift `d` and label `rho` holds `alpha^(rho + i lambda)`
/// at column `(i + d) mod Z`.
pub fn mcpm_dense(code: &QcCode) -> Vec<Vec<GfElem>> {
    let z = code.z() as usize;
    let f = code.field();
    let labels = code.labels().expect("labelled");
    let mut h = vec![vec![GfElem::ZERO; code.n()]; code.m()];
    for (id, e) in code.proto().edges().iter().enumerate() {
        let d = code.shifts()[id] as usize;
        for i in 0..z {
            let v = f.pow_alpha(labels[id] as i64 + i as i64 * code.lambda() as i64);
            let cell = &mut h[e.check * z + i][e.var * z + (i + d) % z];
            *cell = f.add(*cell, v);
        }
    }
    h
}

/// Rank of the submatrix of `h` on the cycle's checks and variables.
pub fn cycle_rank(h: &SparseGfMatrix, t: &Tanner, cycle: &[usize]) -> usize {
    let checks: Vec<usize> = cycle.iter().copied().filter(|&x| !t.is_var(x)).collect();
    let vars: Vec<usize> = cycle.iter().copied().filter(|&x| t.is_var(x)).map(|x| x - t.m).collect();
    let dense: Vec<Vec<GfElem>> = checks.iter().map(|&r| vars.iter().map(|&c| h.get(r, c)).collect()).collect();
    rank(dense, h.field())
}

/// Binary and NB spectra by cycle enumeration on the lifted graph. A cycle
/// is canceled when it is chordless and its submatrix has full rank.
pub fn brute_spectra(h: &SparseGfMatrix, depth: usize) -> (AceSpectrum, AceSpectrum) {
    let t = Tanner::new(h);
    let mut binary = AceSpectrum::infinite(depth);
    let mut nb = AceSpectrum::infinite(depth);
    for c in t.simple_cycles(depth) {
        let ace = cycle_ace(&t, &c);
        binary.record(c.len(), ace);
        let canceled = chordless(&t, &c) && cycle_rank(h, &t, &c) == c.len() / 2;
        if !canceled {
            nb.record(c.len(), ace);
        }
    }
    (binary, nb)
}

/// What explicit traversal of the lifted graph finds for a base cycle.
#[derive(Debug, PartialEq, Eq)]
pub struct Traversal {
    pub cycles: usize,
    pub lengths: Vec<usize>,
    pub aces: Vec<u64>,
    pub all_simple: bool,
}

/// Follows the lifted copies of `walk` through the expanded binary matrix.
/// Every cell on the walk must hold a single edge.
pub fn traverse_lift(code: &QcCode, walk: &CycleRecord) -> Traversal {
    let h = code.expand_binary().unwrap();
    let t = Tanner::new(&h);
    let z = code.z() as usize;
    let p = code.proto();
    let step_to_var = |check_row: usize, var: usize| -> usize {
        h.row(check_row).iter().map(|&(c, _)| c).find(|c| c / z == var).expect("edge in block")
    };
    let cols = h.columns();
    let step_to_check = |var_col: usize, check: usize| -> usize {
        cols[var_col].iter().map(|&(r, _)| r).find(|r| r / z == check).expect("edge in block")
    };
    let half = walk.checks.len();
    let mut seen = vec![false; z];
    let mut out = Traversal { cycles: 0, lengths: Vec::new(), aces: Vec::new(), all_simple: true };
    for start in 0..z {
        if seen[start] {
            continue;
        }
        let mut row = walk.checks[0] * z + start;
        let mut nodes = Vec::new();
        loop {
            for i in 0..half {
                nodes.push(row);
                let col = step_to_var(row, walk.vars[i]);
                nodes.push(t.m + col);
                let next = p.edge(walk.edges[2 * i + 1]).check;
                row = step_to_check(col, next);
            }
            if row == walk.checks[0] * z + start {
                break;
            }
            seen[row % z] = true;
        }
        seen[start] = true;
        let mut sorted = nodes.clone();
        sorted.sort_unstable();
        sorted.dedup();
        out.all_simple &= sorted.len() == nodes.len();
        out.cycles += 1;
        out.lengths.push(nodes.len());
        out.aces.push(cycle_ace(&t, &nodes));
    }
    out
}

/// Random base matrix with entries in `0..=max_mult`, every variable of
/// degree at least two and every check used.
pub fn random_protograph<R: Rng>(rng: &mut R, m: usize, n: usize, max_mult: u32, density: f64) -> Protograph {
    loop {
        let rows: Vec<Vec<u32>> = (0..m)
            .map(|_| {
                (0..n)
                    .map(|_| if rng.random_bool(density) { rng.random_range(1..=max_mult) } else { 0 })
                    .collect()
            })
            .collect();
        if let Ok(p) = Protograph::from_base_matrix(&rows) {
            return p;
        }
    }
}

/// Random shifts with distinct values on parallel edges.
pub fn random_shifts<R: Rng>(rng: &mut R, p: &Protograph, z: u32) -> Option<Vec<u32>> {
    let mut shifts = vec![0; p.n_edges()];
    for c in 0..p.n_checks() {
        for v in 0..p.n_vars() {
            let ids: Vec<usize> = p.check_edges(c).iter().copied().filter(|&e| p.edge(e).var == v).collect();
            if ids.len() as u32 > z {
                return None;
            }
            let mut pool: Vec<u32> = (0..z).collect();
            for &e in &ids {
                let k = rng.random_range(0..pool.len());
                shifts[e] = pool.swap_remove(k);
            }
        }
    }
    Some(shifts)
}

pub fn random_field<R: Rng>(rng: &mut R, sizes: &[u32]) -> FieldDesc {
    FieldDesc::with_size(sizes[rng.random_range(0..sizes.len())]).unwrap()
}

pub fn first_finite(s: &AceSpectrum) -> Option<(usize, AceValue)> {
    s.values().iter().enumerate().find(|(_, v)| **v != AceValue::Inf).map(|(k, v)| (2 * (k + 1), *v))
}

/// Wilson score interval at 95%.
pub fn wilson(errors: u64, trials: u64) -> (f64, f64) {
    let z = 1.959_963_984_540_054;
    let n = trials as f64;
    let p = errors as f64 / n;
    let denom = 1.0 + z * z / n;
    let centre = (p + z * z / (2.0 * n)) / denom;
    let half = z * ((p * (1.0 - p) / n + z * z / (4.0 * n * n)).sqrt()) / denom;
    (centre - half, centre + half)
}
