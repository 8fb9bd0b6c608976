//! Quasi-cyclic lifts of a protograph with alpha-multiplied circulant
//! permutation matrices (MCPMs).
//!
//! Every edge `e` carries a shift `d_e` in `0..Z` and, once labelled, an
//! exponent `rho_e` in `0..q-1`. Block `(c, v)` of the lifted matrix for edge
//! `e` has, in row `i`, the entry `alpha^(rho_e + i*lambda)` at column
//! `(i + d_e) mod Z`.
//!
//! A closed walk `W` in the protograph is traversed from a check, adding
//! the shift of each edge taken check-to-variable and subtracting it for
//! variable-to-check. The resulting total shift `d` gives the order
//! `O = Z / gcd(Z, d)`: the lifted copies of `W` form `gcd(Z, d)` closed walks
//! of length `|W| * O`.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::codec::SparseGfMatrix;
use crate::gf2m::{gcd, FieldDesc, GfElem};
use crate::protograph::{CycleRecord, EdgeId, ProtoError, Protograph};

/// Default cap on enumerated base walks.
pub const DEFAULT_WALK_CAP: usize = 4_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LiftError {
    Proto(ProtoError),
    ZeroLiftingOrder,
    ShiftCount { expected: usize, got: usize },
    ShiftOutOfRange { edge: EdgeId, shift: u32 },
    LabelCount { expected: usize, got: usize },
    LabelOutOfRange { edge: EdgeId, label: u32 },
    /// `(q - 1)` does not divide `lambda * Z`.
    InadmissibleLambda { lambda: u32, z: u32, q: u32 },
    /// The operation needs edge labels.
    MissingLabels,
    /// Two parallel edges on one cell with equal shifts would overlap.
    ShiftCollision { first: EdgeId, second: EdgeId },
    /// The closed-form cancellation test needs a simple, minimal base cycle.
    UnsupportedStructure,
    ZeroBeta(usize),
    BadCycleLength(usize),
    OddDepth(usize),
}

impl fmt::Display for LiftError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LiftError::Proto(e) => write!(f, "{e}"),
            LiftError::ZeroLiftingOrder => write!(f, "lifting order must be at least 1"),
            LiftError::ShiftCount { expected, got } => write!(f, "expected {expected} shifts, got {got}"),
            LiftError::ShiftOutOfRange { edge, shift } => write!(f, "shift {shift} of edge {edge} out of range"),
            LiftError::LabelCount { expected, got } => write!(f, "expected {expected} labels, got {got}"),
            LiftError::LabelOutOfRange { edge, label } => write!(f, "label {label} of edge {edge} out of range"),
            LiftError::InadmissibleLambda { lambda, z, q } => {
                write!(f, "(q-1) = {} does not divide lambda*Z = {}*{}", q - 1, lambda, z)
            }
            LiftError::MissingLabels => write!(f, "code has no edge labels"),
            LiftError::ShiftCollision { first, second } => {
                write!(f, "parallel edges {first} and {second} share a shift")
            }
            LiftError::UnsupportedStructure => write!(f, "walk is not a simple minimal cycle"),
            LiftError::ZeroBeta(i) => write!(f, "beta_{i} is zero"),
            LiftError::BadCycleLength(l) => write!(f, "cycle length {l} must be even and at least 4"),
            LiftError::OddDepth(d) => write!(f, "spectrum depth {d} is not even"),
        }
    }
}

impl core::error::Error for LiftError {}

impl From<ProtoError> for LiftError {
    fn from(e: ProtoError) -> Self {
        LiftError::Proto(e)
    }
}

/// A complete QC code description.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QcCode {
    proto: Protograph,
    z: u32,
    shifts: Vec<u32>,
    labels: Option<Vec<u32>>,
    lambda: u32,
    field: FieldDesc,
}

impl QcCode {
    pub fn new(
        proto: Protograph,
        z: u32,
        shifts: Vec<u32>,
        labels: Option<Vec<u32>>,
        lambda: u32,
        field: FieldDesc,
    ) -> Result<Self, LiftError> {
        if z == 0 {
            return Err(LiftError::ZeroLiftingOrder);
        }
        if shifts.len() != proto.n_edges() {
            return Err(LiftError::ShiftCount { expected: proto.n_edges(), got: shifts.len() });
        }
        if let Some((edge, &shift)) = shifts.iter().enumerate().find(|(_, &s)| s >= z) {
            return Err(LiftError::ShiftOutOfRange { edge, shift });
        }
        if !field.admits_lambda(lambda, z) || lambda == 0 {
            return Err(LiftError::InadmissibleLambda { lambda, z, q: field.q() });
        }
        let code = QcCode { proto, z, shifts, labels: None, lambda, field };
        match labels {
            Some(l) => code.with_labels(l),
            None => Ok(code),
        }
    }

    /// Replaces the labels, keeping shifts.
    pub fn with_labels(mut self, labels: Vec<u32>) -> Result<Self, LiftError> {
        if labels.len() != self.proto.n_edges() {
            return Err(LiftError::LabelCount { expected: self.proto.n_edges(), got: labels.len() });
        }
        if let Some((edge, &label)) = labels.iter().enumerate().find(|(_, &l)| l >= self.field.order()) {
            return Err(LiftError::LabelOutOfRange { edge, label });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn without_labels(mut self) -> Self {
        self.labels = None;
        self
    }

    pub fn with_shifts(mut self, shifts: Vec<u32>) -> Result<Self, LiftError> {
        if shifts.len() != self.proto.n_edges() {
            return Err(LiftError::ShiftCount { expected: self.proto.n_edges(), got: shifts.len() });
        }
        if let Some((edge, &shift)) = shifts.iter().enumerate().find(|(_, &s)| s >= self.z) {
            return Err(LiftError::ShiftOutOfRange { edge, shift });
        }
        self.shifts = shifts;
        Ok(self)
    }

    pub fn proto(&self) -> &Protograph {
        &self.proto
    }

    pub fn z(&self) -> u32 {
        self.z
    }

    pub fn shifts(&self) -> &[u32] {
        &self.shifts
    }

    pub fn labels(&self) -> Option<&[u32]> {
        self.labels.as_deref()
    }

    pub fn lambda(&self) -> u32 {
        self.lambda
    }

    pub fn field(&self) -> &FieldDesc {
        &self.field
    }

    /// Lifted code length in symbols.
    pub fn n(&self) -> usize {
        self.proto.n_vars() * self.z as usize
    }

    /// Number of lifted checks.
    pub fn m(&self) -> usize {
        self.proto.n_checks() * self.z as usize
    }

    /// The lifted parity-check matrix over GF(q).
    pub fn expand(&self) -> Result<SparseGfMatrix, LiftError> {
        let labels = self.labels.as_deref().ok_or(LiftError::MissingLabels)?;
        self.expand_with(|e, i| self.field.pow_alpha(labels[e] as i64 + i as i64 * self.lambda as i64), self.field.clone())
    }

    /// The binary mother matrix (support of [`expand`](Self::expand)) over
    /// GF(2); needs shifts only.
    pub fn expand_binary(&self) -> Result<SparseGfMatrix, LiftError> {
        let gf2 = FieldDesc::new(1, None).expect("GF(2)");
        self.expand_with(|_, _| GfElem::ONE, gf2)
    }

    fn expand_with<F>(&self, value: F, field: FieldDesc) -> Result<SparseGfMatrix, LiftError>
    where
        F: Fn(EdgeId, u32) -> GfElem,
    {
        self.check_collisions()?;
        let z = self.z as usize;
        let mut entries = Vec::with_capacity(self.proto.n_edges() * z);
        for (id, e) in self.proto.edges().iter().enumerate() {
            let d = self.shifts[id] as usize;
            for i in 0..z {
                entries.push((e.check * z + i, e.var * z + (i + d) % z, value(id, i as u32)));
            }
        }
        Ok(SparseGfMatrix::from_entries(self.m(), self.n(), field, entries).expect("collision-free lift"))
    }

    fn check_collisions(&self) -> Result<(), LiftError> {
        for c in 0..self.proto.n_checks() {
            let es = self.proto.check_edges(c);
            for (i, &a) in es.iter().enumerate() {
                for &b in &es[i + 1..] {
                    if self.proto.edge(a).var == self.proto.edge(b).var && self.shifts[a] == self.shifts[b] {
                        return Err(LiftError::ShiftCollision { first: a, second: b });
                    }
                }
            }
        }
        Ok(())
    }
}

/// One entry of an ACE spectrum: a minimum ACE or "no cycle of this length".
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AceValue {
    Finite(u64),
    Inf,
}

impl fmt::Display for AceValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AceValue::Finite(v) => write!(f, "{v}"),
            AceValue::Inf => write!(f, "inf"),
        }
    }
}

impl FromStr for AceValue {
    type Err = SpectrumParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        if t.eq_ignore_ascii_case("inf") || t == "∞" {
            Ok(AceValue::Inf)
        } else {
            t.parse().map(AceValue::Finite).map_err(|_| SpectrumParseError)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpectrumParseError;

impl fmt::Display for SpectrumParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "expected a comma-separated list of integers or `inf`")
    }
}

impl core::error::Error for SpectrumParseError {}

/// Minimum ACE per even cycle length `2, 4, ..., depth`.
///
/// Used both for achieved spectra and for constraints; a spectrum achieves
/// a constraint when it is componentwise at least as large.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AceSpectrum {
    values: Vec<AceValue>,
}

pub type AceConstraint = AceSpectrum;

impl AceSpectrum {
    /// All-infinite spectrum of the given even depth.
    pub fn infinite(depth: usize) -> Self {
        AceSpectrum { values: vec![AceValue::Inf; depth / 2] }
    }

    /// The trivial constraint (every component 0).
    pub fn zero(depth: usize) -> Self {
        AceSpectrum { values: vec![AceValue::Finite(0); depth / 2] }
    }

    /// `values[k]` is the entry for cycle length `2(k + 1)`.
    pub fn from_values(values: Vec<AceValue>) -> Self {
        AceSpectrum { values }
    }

    pub fn values(&self) -> &[AceValue] {
        &self.values
    }

    pub fn depth(&self) -> usize {
        2 * self.values.len()
    }

    /// Entry for an even length within depth.
    pub fn get(&self, len: usize) -> Option<AceValue> {
        if len < 2 || len % 2 != 0 {
            return None;
        }
        self.values.get(len / 2 - 1).copied()
    }

    pub fn set(&mut self, len: usize, value: AceValue) {
        self.values[len / 2 - 1] = value;
    }

    /// Lowers the entry at `len` to `value` if smaller.
    pub fn record(&mut self, len: usize, value: u64) {
        let slot = &mut self.values[len / 2 - 1];
        *slot = (*slot).min(AceValue::Finite(value));
    }

    /// Componentwise `self >= constraint` over the constraint's depth.
    /// Entries beyond `self`'s depth are unknown and fail.
    pub fn achieves(&self, constraint: &AceConstraint) -> bool {
        constraint
            .values
            .iter()
            .enumerate()
            .all(|(k, c)| self.values.get(k).is_some_and(|v| v >= c))
    }

    /// Truncates or pads (with `pad`) to a new depth.
    pub fn resized(&self, depth: usize, pad: AceValue) -> Self {
        let mut values = self.values.clone();
        values.resize(depth / 2, pad);
        AceSpectrum { values }
    }

    /// `(v2, v4, ...)` with `inf` for missing cycles.
    pub fn to_text(&self) -> alloc::string::String {
        use alloc::string::ToString;
        let parts: Vec<_> = self.values.iter().map(ToString::to_string).collect();
        alloc::format!("({})", parts.join(","))
    }
}

impl fmt::Display for AceSpectrum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl FromStr for AceSpectrum {
    type Err = SpectrumParseError;

    /// Accepts `inf,inf,4` or `(inf,inf,4)`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim().trim_start_matches('(').trim_end_matches(')');
        if t.trim().is_empty() {
            return Ok(AceSpectrum { values: Vec::new() });
        }
        t.split(',').map(str::parse).collect::<Result<_, _>>().map(|values| AceSpectrum { values })
    }
}

/// How the copies of one base walk look in the lifted graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LiftedCycleClass {
    pub total_shift: u32,
    /// `O = Z / gcd(Z, d)`.
    pub order: u32,
    /// Number of lifted closed walks, `gcd(Z, d)`.
    pub count: u32,
    pub lifted_len: usize,
    pub lifted_ace: u64,
    /// The lifted closed walks are cycles (no lifted node repeats).
    pub simple: bool,
    /// Set once labels are known: whether the lifted cycles are canceled.
    pub canceled: Option<bool>,
}

/// Per-position offsets of a walk's lifted copies. `prefix[k]` is the copy
/// index reached at position `k` when starting at copy 0 of the first check.
pub(crate) fn walk_offsets(walk: &CycleRecord, shift: impl Fn(EdgeId) -> u32, z: u32, out: &mut Vec<u32>) -> u32 {
    out.clear();
    let mut s = 0u32;
    for (k, &e) in walk.edges.iter().enumerate() {
        out.push(s);
        let d = shift(e) % z;
        s = if k % 2 == 0 { (s + d) % z } else { (s + z - d) % z };
    }
    s
}

/// Whether the lifted copies of `walk` are cycles, given its offsets and
/// `g = gcd(Z, d)`: two visits of the same base node must fall in different
/// cosets modulo `g`.
pub(crate) fn lift_is_simple(walk: &CycleRecord, offsets: &[u32], g: u32) -> bool {
    let half = walk.checks.len();
    for i in 0..half {
        for j in i + 1..half {
            if walk.checks[i] == walk.checks[j] && offsets[2 * i] % g == offsets[2 * j] % g {
                return false;
            }
            if walk.vars[i] == walk.vars[j] && offsets[2 * i + 1] % g == offsets[2 * j + 1] % g {
                return false;
            }
        }
    }
    true
}

/// Whether a lifted cycle of `walk` has a chord: a lifted edge between two
/// of its nodes that is not one of its own edges.
pub(crate) fn lift_has_chord(proto: &Protograph, walk: &CycleRecord, offsets: &[u32], g: u32, shift: impl Fn(EdgeId) -> u32) -> bool {
    let len = walk.len();
    let half = walk.checks.len();
    for i in 0..half {
        let k = 2 * i;
        let (before, after) = (walk.edges[(k + len - 1) % len], walk.edges[k]);
        for &e in proto.check_edges(walk.checks[i]) {
            if e == before || e == after {
                continue;
            }
            let v = proto.edge(e).var;
            let target = (offsets[k] + shift(e)) % g;
            if (0..half).any(|j| walk.vars[j] == v && offsets[2 * j + 1] % g == target) {
                return true;
            }
        }
    }
    false
}

/// `sum_k (-1)^k rho_{e_k}` along the walk.
pub(crate) fn alternating_label_sum(walk: &CycleRecord, labels: &[u32]) -> i64 {
    walk.edges
        .iter()
        .enumerate()
        .map(|(k, &e)| if k % 2 == 0 { labels[e] as i64 } else { -(labels[e] as i64) })
        .sum()
}

/// Cancellation of lifted cycles with order `order`: the alternating label
/// products differ, `order * altsum != 0 (mod q - 1)`.
#[inline]
pub(crate) fn order_cancels(order: u32, altsum: i64, field_order: u32) -> bool {
    (order as i64 * altsum).rem_euclid(field_order as i64) != 0
}

/// Structure of the lift of one base walk.
pub fn lift_cycle(walk: &CycleRecord, code: &QcCode) -> LiftedCycleClass {
    let mut offsets = Vec::with_capacity(walk.len());
    let d = walk_offsets(walk, |e| code.shifts[e], code.z, &mut offsets);
    let g = gcd(code.z as u64, d as u64) as u32;
    let order = code.z / g;
    let simple = lift_is_simple(walk, &offsets, g);
    let canceled = code.labels.as_deref().map(|labels| {
        simple
            && !lift_has_chord(&code.proto, walk, &offsets, g, |e| code.shifts[e])
            && order_cancels(order, alternating_label_sum(walk, labels), code.field.order())
    });
    LiftedCycleClass {
        total_shift: d,
        order,
        count: g,
        lifted_len: walk.len() * order as usize,
        lifted_ace: walk.ace as u64 * order as u64,
        simple,
        canceled,
    }
}

/// Cancellation of the cycles lifted from a simple minimal base cycle:
/// `O * sum_i (-1)^i rho_i != 0 (mod q - 1)`.
pub fn frc_lifted(walk: &CycleRecord, code: &QcCode) -> Result<bool, LiftError> {
    if !walk.simple_minimal {
        return Err(LiftError::UnsupportedStructure);
    }
    let labels = code.labels.as_deref().ok_or(LiftError::MissingLabels)?;
    let mut offsets = Vec::with_capacity(walk.len());
    let d = walk_offsets(walk, |e| code.shifts[e], code.z, &mut offsets);
    let order = code.z / gcd(code.z as u64, d as u64) as u32;
    Ok(order_cancels(order, alternating_label_sum(walk, labels), code.field.order()))
}

/// The `l/2 x l/2` matrix of a cycle in canonical banded form: row `i < l/2-1`
/// holds `beta_{2i}, beta_{2i+1}` in columns `i, i+1`; the last row holds
/// `beta_{l-1}` in column 0 and `beta_{l-2}` in the last column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanonicalCycleMatrix {
    pub betas: Vec<GfElem>,
}

impl CanonicalCycleMatrix {
    pub fn new(betas: Vec<GfElem>) -> Result<Self, LiftError> {
        if betas.len() < 4 || betas.len() % 2 != 0 {
            return Err(LiftError::BadCycleLength(betas.len()));
        }
        if let Some(i) = betas.iter().position(|b| b.is_zero()) {
            return Err(LiftError::ZeroBeta(i));
        }
        Ok(CanonicalCycleMatrix { betas })
    }

    pub fn to_matrix(&self, field: &FieldDesc) -> SparseGfMatrix {
        let l = self.betas.len();
        let h = l / 2;
        let mut entries = Vec::with_capacity(l);
        for i in 0..h - 1 {
            entries.push((i, i, self.betas[2 * i]));
            entries.push((i, i + 1, self.betas[2 * i + 1]));
        }
        entries.push((h - 1, 0, self.betas[l - 1]));
        entries.push((h - 1, h - 1, self.betas[l - 2]));
        SparseGfMatrix::from_entries(h, h, field.clone(), entries).expect("banded layout has no overlaps")
    }
}

/// Full-rank condition on a canonical cycle matrix: the product of the odd
/// betas differs from the product of the even ones.
pub fn frc_canonical(b: &CanonicalCycleMatrix, field: &FieldDesc) -> Result<bool, LiftError> {
    let l = b.betas.len();
    if l < 4 || l % 2 != 0 {
        return Err(LiftError::BadCycleLength(l));
    }
    if let Some(i) = b.betas.iter().position(|x| x.is_zero()) {
        return Err(LiftError::ZeroBeta(i));
    }
    let prod = |parity: usize| {
        b.betas.iter().skip(parity).step_by(2).fold(GfElem::ONE, |acc, &x| field.mul(acc, x))
    };
    Ok(prod(1) != prod(0))
}

/// Binary and non-binary spectra of one code, computed together.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpectrumPair {
    pub binary: AceSpectrum,
    /// `None` when the code has no labels.
    pub nb: Option<AceSpectrum>,
}

/// ACE spectra of the lifted graph from a precomputed walk list (all walks
/// of length `<= depth`).
pub fn spectra_from_walks(code: &QcCode, walks: &[CycleRecord], depth: usize) -> SpectrumPair {
    let mut binary = AceSpectrum::infinite(depth);
    let mut nb = code.labels.as_ref().map(|_| AceSpectrum::infinite(depth));
    for walk in walks {
        if walk.len() > depth {
            continue;
        }
        let class = lift_cycle(walk, code);
        if !class.simple || class.lifted_len > depth {
            continue;
        }
        binary.record(class.lifted_len, class.lifted_ace);
        if let Some(nb) = nb.as_mut() {
            if class.canceled != Some(true) {
                nb.record(class.lifted_len, class.lifted_ace);
            }
        }
    }
    SpectrumPair { binary, nb }
}

fn checked_walks(code: &QcCode, depth: usize, cap: usize) -> Result<Vec<CycleRecord>, LiftError> {
    if depth % 2 != 0 {
        return Err(LiftError::OddDepth(depth));
    }
    Ok(code.proto.enumerate_closed_walks(depth, cap)?)
}

/// Minimum ACE of lifted cycles per length up to `depth`.
pub fn binary_ace_spectrum(code: &QcCode, depth: usize, cap: usize) -> Result<AceSpectrum, LiftError> {
    let walks = checked_walks(code, depth, cap)?;
    Ok(spectra_from_walks(code, &walks, depth).binary)
}

/// Minimum ACE of non-canceled lifted cycles per length up to `depth`.
pub fn nb_ace_spectrum(code: &QcCode, depth: usize, cap: usize) -> Result<AceSpectrum, LiftError> {
    if code.labels.is_none() {
        return Err(LiftError::MissingLabels);
    }
    let walks = checked_walks(code, depth, cap)?;
    Ok(spectra_from_walks(code, &walks, depth).nb.expect("labels present"))
}
