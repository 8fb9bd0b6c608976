//! ACE-constrained shift and label assignment.
//!
//! Both stages share one skeleton: collect the problematic base walks, draw
//! random initial values, then sweep over the edges, giving each edge the
//! value that minimizes the number of violated walks through it. Restarts
//! change the initial values and (optionally) the edge order.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::gf2m::{gcd, FieldDesc};
use crate::protograph::{CycleRecord, EdgeId, ProtoError, Protograph};
use crate::qclift::{
    alternating_label_sum, lift_cycle, lift_has_chord, lift_is_simple, order_cancels, spectra_from_walks,
    walk_offsets, AceConstraint, AceSpectrum, AceValue, LiftError, QcCode, DEFAULT_WALK_CAP,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EdgeOrderPolicy {
    /// Edges in id order on every restart.
    Fixed,
    /// A fresh random permutation per restart.
    #[default]
    Shuffled,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OptimizerConfig {
    pub max_sweeps: u32,
    pub max_restarts: u32,
    pub rng_seed: u64,
    pub edge_order: EdgeOrderPolicy,
}

impl OptimizerConfig {
    pub fn new(rng_seed: u64) -> Self {
        OptimizerConfig { max_sweeps: 50, max_restarts: 20, rng_seed, edge_order: EdgeOrderPolicy::Shuffled }
    }

    pub fn validate(&self) -> Result<(), OptError> {
        if self.max_sweeps == 0 || self.max_restarts == 0 {
            return Err(OptError::InvalidConfig);
        }
        Ok(())
    }

    fn with_seed(&self, rng_seed: u64) -> Self {
        OptimizerConfig { rng_seed, ..*self }
    }
}

/// A lifted cycle left in violation, summarized for reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WorstCycle {
    pub base_len: usize,
    pub lifted_len: usize,
    pub lifted_ace: u64,
    pub total_shift: u32,
}

/// Outcome of an optimization that ran out of sweeps and restarts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FailureReport {
    /// Best assignment seen (fewest violated walks).
    pub best: Vec<u32>,
    pub residual: usize,
    pub worst: Option<WorstCycle>,
    /// Sweeps summed over all restarts.
    pub sweeps_used: u32,
    pub restarts_used: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OptError {
    Lift(LiftError),
    InvalidConfig,
    /// The NB constraint is below the binary one somewhere.
    ConstraintOrder { len: usize },
    /// Walks were enumerated to a smaller depth than the constraint.
    WalksTooShort { depth: usize },
    Failed(FailureReport),
}

impl fmt::Display for OptError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OptError::Lift(e) => write!(f, "{e}"),
            OptError::InvalidConfig => write!(f, "max_sweeps and max_restarts must be at least 1"),
            OptError::ConstraintOrder { len } => {
                write!(f, "NB constraint is below the binary constraint at length {len}")
            }
            OptError::WalksTooShort { depth } => write!(f, "walks do not cover depth {depth}"),
            OptError::Failed(r) => write!(
                f,
                "constraint not met: {} violated cycle classes after {} sweeps",
                r.residual, r.sweeps_used
            ),
        }
    }
}

impl core::error::Error for OptError {}

impl From<LiftError> for OptError {
    fn from(e: LiftError) -> Self {
        OptError::Lift(e)
    }
}

impl From<ProtoError> for OptError {
    fn from(e: ProtoError) -> Self {
        OptError::Lift(LiftError::Proto(e))
    }
}

/// The walks an optimizer stage has to care about, with an edge index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProblemSet {
    pub cycles: Vec<CycleRecord>,
    /// `index[e]`: positions in `cycles` of walks through `e`, once per
    /// traversal of `e`.
    pub index: Vec<Vec<usize>>,
}

impl ProblemSet {
    fn build(n_edges: usize, cycles: Vec<CycleRecord>) -> Self {
        let mut index = vec![Vec::new(); n_edges];
        for (i, c) in cycles.iter().enumerate() {
            for &e in &c.edges {
                index[e].push(i);
            }
        }
        ProblemSet { cycles, index }
    }

    pub fn len(&self) -> usize {
        self.cycles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cycles.is_empty()
    }

    fn unique_index(&self) -> Vec<Vec<usize>> {
        self.index
            .iter()
            .map(|ids| {
                let mut u = ids.clone();
                u.dedup();
                u
            })
            .collect()
    }
}

/// Lifted 2-cycles are parallel edges sharing a shift, which cannot be
/// represented; every constraint forbids them.
fn normalize(constraint: &AceConstraint) -> AceConstraint {
    let mut c = if constraint.depth() < 2 { constraint.resized(2, AceValue::Finite(0)) } else { constraint.clone() };
    c.set(2, AceValue::Inf);
    c
}

#[inline]
fn below(constraint: &AceConstraint, len: usize, ace: u64) -> bool {
    match constraint.get(len) {
        Some(AceValue::Finite(t)) => ace < t,
        Some(AceValue::Inf) => true,
        None => false,
    }
}

/// Whether some shift assignment lifts `walk` to a cycle violating
/// `constraint`.
fn potentially_violating(walk: &CycleRecord, z: u32, constraint: &AceConstraint) -> bool {
    (1..=z)
        .filter(|o| z % o == 0)
        .any(|o| below(constraint, walk.len() * o as usize, walk.ace as u64 * o as u64))
}

/// Problematic walks for shift assignment, from walks covering the depth.
pub fn problematic_binary_from_walks(proto: &Protograph, z: u32, constraint: &AceConstraint, walks: &[CycleRecord]) -> ProblemSet {
    let c = normalize(constraint);
    let cycles = walks
        .iter()
        .filter(|w| w.len() <= c.depth() && potentially_violating(w, z, &c))
        .cloned()
        .collect();
    ProblemSet::build(proto.n_edges(), cycles)
}

pub fn find_problematic_binary(proto: &Protograph, z: u32, constraint: &AceConstraint) -> Result<ProblemSet, OptError> {
    let c = normalize(constraint);
    let walks = proto.enumerate_closed_walks(c.depth(), DEFAULT_WALK_CAP)?;
    Ok(problematic_binary_from_walks(proto, z, &c, &walks))
}

/// Walks whose lift under the code's fixed shifts is a cycle below the NB
/// constraint. The second set holds those that no labelling can cancel
/// (their lifted cycles have chords).
pub fn find_problematic_nb(code: &QcCode, constraint: &AceConstraint, walks: &[CycleRecord]) -> (ProblemSet, Vec<CycleRecord>) {
    let c = normalize(constraint);
    let mut fixable = Vec::new();
    let mut unfixable = Vec::new();
    let mut offsets = Vec::new();
    for w in walks.iter().filter(|w| w.len() <= c.depth()) {
        let class = lift_cycle(w, code);
        if !class.simple || class.lifted_len > c.depth() || !below(&c, class.lifted_len, class.lifted_ace) {
            continue;
        }
        walk_offsets(w, |e| code.shifts()[e], code.z(), &mut offsets);
        if lift_has_chord(code.proto(), w, &offsets, class.count, |e| code.shifts()[e]) {
            unfixable.push(w.clone());
        } else {
            fixable.push(w.clone());
        }
    }
    (ProblemSet::build(code.proto().n_edges(), fixable), unfixable)
}

/// A successful assignment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solution {
    pub values: Vec<u32>,
    /// Sweeps in the successful restart.
    pub sweeps_used: u32,
    /// Zero-based index of the successful restart.
    pub restart: u32,
}

struct Failure {
    best: Vec<u32>,
    residual: usize,
    sweeps_used: u32,
    restarts_used: u32,
}

/// Per-step trace for tests: total violated count after each reassignment.
pub(crate) type Trace<'a> = Option<&'a mut Vec<usize>>;

fn optimize<F>(n_edges: usize, n_values: u32, set: &ProblemSet, cfg: &OptimizerConfig, mut violated: F, mut trace: Trace<'_>) -> Result<Solution, Failure>
where
    F: FnMut(&CycleRecord, &[u32]) -> bool,
{
    let index = set.unique_index();
    let mut best: Option<(usize, Vec<u32>)> = None;
    let mut total_sweeps = 0;
    for restart in 0..cfg.max_restarts {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
        rng.set_stream(restart as u64);
        let mut values: Vec<u32> = (0..n_edges).map(|_| rng.random_range(0..n_values)).collect();
        let mut order: Vec<EdgeId> = (0..n_edges).collect();
        if cfg.edge_order == EdgeOrderPolicy::Shuffled {
            order.shuffle(&mut rng);
        }
        let mut state: Vec<bool> = set.cycles.iter().map(|c| violated(c, &values)).collect();
        let mut total = state.iter().filter(|&&v| v).count();
        if let Some(t) = trace.as_deref_mut() {
            t.push(total);
        }
        let mut sweeps = 0;
        while total > 0 && sweeps < cfg.max_sweeps {
            sweeps += 1;
            let mut changed = false;
            for &e in &order {
                let ids = &index[e];
                if ids.is_empty() {
                    continue;
                }
                let old = values[e];
                let current = ids.iter().filter(|&&i| state[i]).count();
                let (mut best_t, mut best_cnt) = (old, usize::MAX);
                for t in 0..n_values {
                    values[e] = t;
                    let mut cnt = 0;
                    for &i in ids {
                        if violated(&set.cycles[i], &values) {
                            cnt += 1;
                            if cnt >= best_cnt {
                                break;
                            }
                        }
                    }
                    if cnt < best_cnt {
                        best_cnt = cnt;
                        best_t = t;
                        if cnt == 0 {
                            break;
                        }
                    }
                }
                values[e] = best_t;
                if best_t != old {
                    changed = true;
                    for &i in ids {
                        state[i] = violated(&set.cycles[i], &values);
                    }
                }
                total = total - current + best_cnt;
                if let Some(t) = trace.as_deref_mut() {
                    t.push(total);
                }
                if total == 0 {
                    break;
                }
            }
            if !changed {
                break;
            }
        }
        total_sweeps += sweeps;
        if total == 0 {
            return Ok(Solution { values, sweeps_used: sweeps, restart });
        }
        if best.as_ref().is_none_or(|(b, _)| total < *b) {
            best = Some((total, values));
        }
    }
    let (residual, best) = best.expect("at least one restart");
    Err(Failure { best, residual, sweeps_used: total_sweeps, restarts_used: cfg.max_restarts })
}

fn shift_violation(walk: &CycleRecord, shifts: &[u32], z: u32, c: &AceConstraint, offsets: &mut Vec<u32>) -> bool {
    let d = walk_offsets(walk, |e| shifts[e], z, offsets);
    let g = gcd(z as u64, d as u64) as u32;
    let order = z / g;
    let len = walk.len() * order as usize;
    len <= c.depth() && below(c, len, walk.ace as u64 * order as u64) && lift_is_simple(walk, offsets, g)
}

fn worst_of<'a>(cycles: impl Iterator<Item = &'a CycleRecord>, code: &QcCode) -> Option<WorstCycle> {
    cycles
        .map(|w| {
            let class = lift_cycle(w, code);
            WorstCycle {
                base_len: w.len(),
                lifted_len: class.lifted_len,
                lifted_ace: class.lifted_ace,
                total_shift: class.total_shift,
            }
        })
        .min_by_key(|w| (w.lifted_len, w.lifted_ace, w.base_len, w.total_shift))
}

/// Shift assignment from precomputed walks (covering the constraint depth).
pub fn assign_shifts_with_walks(
    proto: &Protograph,
    z: u32,
    constraint: &AceConstraint,
    cfg: &OptimizerConfig,
    walks: &[CycleRecord],
) -> Result<Solution, OptError> {
    assign_shifts_traced(proto, z, constraint, cfg, walks, None)
}

pub(crate) fn assign_shifts_traced(
    proto: &Protograph,
    z: u32,
    constraint: &AceConstraint,
    cfg: &OptimizerConfig,
    walks: &[CycleRecord],
    trace: Trace<'_>,
) -> Result<Solution, OptError> {
    cfg.validate()?;
    if z == 0 {
        return Err(LiftError::ZeroLiftingOrder.into());
    }
    let c = normalize(constraint);
    let set = problematic_binary_from_walks(proto, z, &c, walks);
    let mut offsets = Vec::new();
    optimize(proto.n_edges(), z, &set, cfg, |w, s| shift_violation(w, s, z, &c, &mut offsets), trace).map_err(|f| {
        let worst = {
            let mut off = Vec::new();
            let bad = set.cycles.iter().filter(|w| shift_violation(w, &f.best, z, &c, &mut off));
            // Placeholder field and lambda: only shifts matter for the summary.
            let gf2 = FieldDesc::new(1, None).expect("GF(2)");
            QcCode::new(proto.clone(), z, f.best.clone(), None, 1, gf2).ok().and_then(|code| worst_of(bad, &code))
        };
        OptError::Failed(FailureReport {
            best: f.best,
            residual: f.residual,
            worst,
            sweeps_used: f.sweeps_used,
            restarts_used: f.restarts_used,
        })
    })
}

/// Chooses shifts so that the lifted binary graph achieves `constraint`.
pub fn assign_shifts(proto: &Protograph, z: u32, constraint: &AceConstraint, cfg: &OptimizerConfig) -> Result<Solution, OptError> {
    let walks = proto.enumerate_closed_walks(normalize(constraint).depth(), DEFAULT_WALK_CAP)?;
    assign_shifts_with_walks(proto, z, constraint, cfg, &walks)
}

/// Label assignment from precomputed walks. Shifts, field and `lambda` come
/// from `code`; existing labels are ignored.
pub fn assign_labels_with_walks(
    code: &QcCode,
    constraint_nb: &AceConstraint,
    cfg: &OptimizerConfig,
    walks: &[CycleRecord],
) -> Result<Solution, OptError> {
    assign_labels_traced(code, constraint_nb, cfg, walks, None)
}

pub(crate) fn assign_labels_traced(
    code: &QcCode,
    constraint_nb: &AceConstraint,
    cfg: &OptimizerConfig,
    walks: &[CycleRecord],
    trace: Trace<'_>,
) -> Result<Solution, OptError> {
    cfg.validate()?;
    let (set, unfixable) = find_problematic_nb(code, constraint_nb, walks);
    let q1 = code.field().order();
    let z = code.z();
    let orders: Vec<u32> = set
        .cycles
        .iter()
        .map(|w| {
            let mut off = Vec::new();
            let d = walk_offsets(w, |e| code.shifts()[e], z, &mut off);
            z / gcd(z as u64, d as u64) as u32
        })
        .collect();
    // Orders are looked up by walk identity; walks are distinct.
    let order_of = |w: &CycleRecord| {
        let i = set.cycles.binary_search_by(|c| c.len().cmp(&w.len()).then_with(|| c.edges.cmp(&w.edges)));
        orders[i.expect("walk from the problem set")]
    };
    let violated = |w: &CycleRecord, labels: &[u32]| !order_cancels(order_of(w), alternating_label_sum(w, labels), q1);
    let report = |best: Vec<u32>, residual: usize, sweeps_used, restarts_used| {
        let labelled = code.clone().with_labels(best.clone()).ok();
        let worst = labelled.and_then(|lc| {
            worst_of(set.cycles.iter().filter(|w| violated(w, &best)).chain(unfixable.iter()), &lc)
        });
        OptError::Failed(FailureReport { best, residual, worst, sweeps_used, restarts_used })
    };
    if !unfixable.is_empty() {
        let best = vec![0; code.proto().n_edges()];
        let residual = unfixable.len() + set.cycles.iter().filter(|w| violated(w, &best)).count();
        return Err(report(best, residual, 0, 0));
    }
    optimize(code.proto().n_edges(), q1, &set, cfg, violated, trace)
        .map_err(|f| report(f.best, f.residual, f.sweeps_used, f.restarts_used))
}

/// Chooses labels so that the NB spectrum of `code` achieves `constraint_nb`.
pub fn assign_labels(code: &QcCode, constraint_nb: &AceConstraint, cfg: &OptimizerConfig) -> Result<Solution, OptError> {
    let walks = code.proto().enumerate_closed_walks(normalize(constraint_nb).depth(), DEFAULT_WALK_CAP)?;
    assign_labels_with_walks(code, constraint_nb, cfg, &walks)
}

/// `nb >= b` wherever both are defined.
pub fn check_constraint_order(b: &AceConstraint, nb: &AceConstraint) -> Result<(), OptError> {
    for (k, (x, y)) in b.values().iter().zip(nb.values()).enumerate() {
        if y < x {
            return Err(OptError::ConstraintOrder { len: 2 * (k + 1) });
        }
    }
    Ok(())
}

/// A labelled code with its verified spectra.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constructed {
    pub code: QcCode,
    pub binary: AceSpectrum,
    pub nb: AceSpectrum,
}

/// Seed for attempt `k` of a multi-stage run.
fn sub_seed(seed: u64, k: u64) -> u64 {
    // splitmix64 finalizer
    let mut x = seed ^ k.wrapping_add(1).wrapping_mul(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Shift assignment then label assignment. When labels fail, shifts are
/// reassigned with a fresh seed, up to `max_restarts` times. `walks` must
/// cover both constraint depths.
#[allow(clippy::too_many_arguments)]
pub fn construct(
    proto: &Protograph,
    z: u32,
    field: &FieldDesc,
    lambda: u32,
    constraint_b: &AceConstraint,
    constraint_nb: &AceConstraint,
    cfg: &OptimizerConfig,
    walks: &[CycleRecord],
) -> Result<Constructed, OptError> {
    cfg.validate()?;
    check_constraint_order(constraint_b, constraint_nb)?;
    let depth = constraint_b.depth().max(constraint_nb.depth()).max(2);
    if walks.last().is_some_and(|w| w.len() < depth) && !covers(proto, walks, depth) {
        return Err(OptError::WalksTooShort { depth });
    }
    let mut last = None;
    for attempt in 0..cfg.max_restarts {
        let seeds = cfg.with_seed(sub_seed(cfg.rng_seed, 2 * attempt as u64));
        let shifts = assign_shifts_with_walks(proto, z, constraint_b, &seeds, walks)?;
        let code = QcCode::new(proto.clone(), z, shifts.values, None, lambda, field.clone())?;
        let seeds = cfg.with_seed(sub_seed(cfg.rng_seed, 2 * attempt as u64 + 1));
        match assign_labels_with_walks(&code, constraint_nb, &seeds, walks) {
            Ok(labels) => {
                let code = code.with_labels(labels.values)?;
                return Ok(verify(code, constraint_b, constraint_nb, walks, depth));
            }
            Err(e @ OptError::Failed(_)) => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last.expect("at least one attempt"))
}

// Walk lists are sorted by length; a shorter maximum only means no longer
// walks exist if enumeration was asked for the full depth. Callers pass
// walks from `enumerate_closed_walks(depth)`, so this is a cheap sanity check
// for graphs with no long walks at all.
fn covers(proto: &Protograph, walks: &[CycleRecord], depth: usize) -> bool {
    proto.enumerate_closed_walks(depth, walks.len() + 1).is_ok_and(|w| w.len() == walks.len())
}

fn verify(code: QcCode, cb: &AceConstraint, cnb: &AceConstraint, walks: &[CycleRecord], depth: usize) -> Constructed {
    let spectra = spectra_from_walks(&code, walks, depth);
    let binary = spectra.binary.resized(cb.depth().max(2), AceValue::Inf);
    let nb = spectra.nb.expect("labelled").resized(cnb.depth().max(2), AceValue::Inf);
    assert!(
        binary.achieves(cb) && nb.achieves(cnb),
        "optimizer reported success but spectra {binary} / {nb} miss the constraints"
    );
    Constructed { code, binary, nb }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchConfig {
    pub optimizer: OptimizerConfig,
    /// Depth of the unconstrained baseline run.
    pub start_depth: usize,
    pub max_depth_b: usize,
    pub max_depth_nb: usize,
    /// Cap on amendment rounds per phase.
    pub max_rounds: u32,
}

impl SearchConfig {
    pub fn new(rng_seed: u64, max_depth: usize) -> Self {
        SearchConfig {
            optimizer: OptimizerConfig::new(rng_seed),
            start_depth: 4.min(max_depth),
            max_depth_b: max_depth,
            max_depth_nb: max_depth,
            max_rounds: 64,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchOutcome {
    /// Final state of the greedy search.
    pub best: Constructed,
    /// Mutually non-dominated candidates among everything that succeeded.
    pub pareto: Vec<Constructed>,
}

/// Componentwise comparison with missing entries read as 0.
fn dominates(a: &AceSpectrum, b: &AceSpectrum) -> bool {
    let n = a.values().len().max(b.values().len());
    let get = |s: &AceSpectrum, k: usize| s.values().get(k).copied().unwrap_or(AceValue::Finite(0));
    (0..n).all(|k| get(a, k) >= get(b, k))
}

fn pair_dominates(a: &Constructed, b: &Constructed) -> bool {
    dominates(&a.binary, &b.binary) && dominates(&a.nb, &b.nb)
}

fn pareto_front(all: &[Constructed]) -> Vec<Constructed> {
    let mut front: Vec<Constructed> = Vec::new();
    for c in all {
        if front.iter().any(|f| pair_dominates(f, c)) {
            continue;
        }
        front.retain(|f| !pair_dominates(c, f));
        front.push(c.clone());
    }
    front
}

/// Candidate amendments of `current` in the order they are tried: raise
/// each finite component by one (smallest value first, then shortest
/// length), then extend the depth by two using `actual` for the new entry.
fn amendments(current: &AceSpectrum, actual_next: Option<AceValue>, max_ace: impl Fn(usize) -> u64) -> Vec<AceSpectrum> {
    let mut finite: Vec<(u64, usize)> = current
        .values()
        .iter()
        .enumerate()
        .filter_map(|(k, v)| match v {
            AceValue::Finite(t) => Some((*t, 2 * (k + 1))),
            AceValue::Inf => None,
        })
        .collect();
    finite.sort_unstable();
    let mut out: Vec<AceSpectrum> = finite
        .into_iter()
        .map(|(t, len)| {
            let mut c = current.clone();
            c.set(len, if t + 1 > max_ace(len) { AceValue::Inf } else { AceValue::Finite(t + 1) });
            c
        })
        .collect();
    if let Some(v) = actual_next {
        let mut c = current.resized(current.depth() + 2, v);
        c.set(c.depth(), v);
        out.push(c);
    }
    out
}

/// Greedy search over constraints, starting from what an unconstrained run
/// achieves. Never fails: the baseline always succeeds.
pub fn spectrum_search(proto: &Protograph, z: u32, field: &FieldDesc, lambda: u32, cfg: &SearchConfig) -> Result<SearchOutcome, OptError> {
    cfg.optimizer.validate()?;
    let max_depth = cfg.max_depth_b.max(cfg.max_depth_nb).max(2);
    let walks = proto.enumerate_closed_walks(max_depth, DEFAULT_WALK_CAP)?;
    spectrum_search_with_walks(proto, z, field, lambda, cfg, &walks)
}

pub fn spectrum_search_with_walks(
    proto: &Protograph,
    z: u32,
    field: &FieldDesc,
    lambda: u32,
    cfg: &SearchConfig,
    walks: &[CycleRecord],
) -> Result<SearchOutcome, OptError> {
    cfg.optimizer.validate()?;
    let max_var_ace = (0..proto.n_vars()).map(|v| proto.var_ace(v) as u64).max().unwrap_or(0);
    let max_ace = |len: usize| (len as u64 / 2) * max_var_ace;
    let max_b = cfg.max_depth_b.max(2);
    let max_nb = cfg.max_depth_nb.max(max_b);
    let start = cfg.start_depth.clamp(2, max_b) & !1;
    let mut seed_counter = 0u64;
    let mut next_cfg = || {
        seed_counter += 1;
        cfg.optimizer.with_seed(sub_seed(cfg.optimizer.rng_seed, seed_counter))
    };
    let spectra_of = |code: &QcCode, depth: usize| spectra_from_walks(code, walks, depth);
    let random_labels = |code: &QcCode, seed: u64| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let labels = (0..proto.n_edges()).map(|_| rng.random_range(0..field.order())).collect();
        code.clone().with_labels(labels).expect("labels in range")
    };

    let mut all: Vec<Constructed> = Vec::new();

    // Binary phase.
    let base = AceSpectrum::zero(start);
    let shifts = assign_shifts_with_walks(proto, z, &base, &next_cfg(), walks)?;
    let mut code = QcCode::new(proto.clone(), z, shifts.values, None, lambda, field.clone())?;
    let mut current = spectra_of(&code, start).binary;
    let labelled = random_labels(&code, cfg.optimizer.rng_seed);
    all.push(Constructed { binary: current.clone(), nb: spectra_of(&labelled, start).nb.unwrap(), code: labelled });
    for _ in 0..cfg.max_rounds {
        let next = (current.depth() + 2 <= max_b).then(|| spectra_of(&code, current.depth() + 2).binary);
        let next_value = next.as_ref().map(|s| s.values()[s.values().len() - 1]);
        let mut advanced = None;
        for amended in amendments(&current, next_value, max_ace) {
            let seeds = next_cfg();
            if let Ok(sol) = assign_shifts_with_walks(proto, z, &amended, &seeds, walks) {
                let c = code.clone().with_shifts(sol.values)?;
                let achieved = spectra_of(&c, amended.depth()).binary;
                debug_assert!(achieved.achieves(&amended));
                let labelled = random_labels(&c, seeds.rng_seed);
                all.push(Constructed {
                    binary: achieved.clone(),
                    nb: spectra_of(&labelled, amended.depth()).nb.unwrap(),
                    code: labelled,
                });
                if advanced.is_none() {
                    advanced = Some((c, achieved));
                }
            }
        }
        match advanced {
            Some((c, achieved)) => {
                code = c;
                current = achieved;
            }
            None => break,
        }
    }
    let binary_final = current;

    // Label phase on the final shifts.
    let depth = binary_final.depth();
    let sol = assign_labels_with_walks(&code, &AceSpectrum::zero(depth), &next_cfg(), walks)?;
    let mut labelled = code.clone().with_labels(sol.values)?;
    let mut current = spectra_of(&labelled, depth).nb.unwrap();
    let push = |all: &mut Vec<Constructed>, c: &QcCode, nb: &AceSpectrum| {
        all.push(Constructed { code: c.clone(), binary: binary_final.clone(), nb: nb.clone() });
    };
    push(&mut all, &labelled, &current);
    for _ in 0..cfg.max_rounds {
        let next = (current.depth() + 2 <= max_nb).then(|| spectra_of(&labelled, current.depth() + 2).nb.unwrap());
        let next_value = next.as_ref().map(|s| s.values()[s.values().len() - 1]);
        let mut advanced = None;
        for amended in amendments(&current, next_value, max_ace) {
            if let Ok(sol) = assign_labels_with_walks(&code, &amended, &next_cfg(), walks) {
                let c = code.clone().with_labels(sol.values)?;
                let achieved = spectra_of(&c, amended.depth()).nb.unwrap();
                debug_assert!(achieved.achieves(&amended));
                push(&mut all, &c, &achieved);
                if advanced.is_none() {
                    advanced = Some((c, achieved));
                }
            }
        }
        match advanced {
            Some((c, achieved)) => {
                labelled = c;
                current = achieved;
            }
            None => break,
        }
    }
    let best = Constructed { code: labelled, binary: binary_final, nb: current };
    Ok(SearchOutcome { pareto: pareto_front(&all), best })
}
