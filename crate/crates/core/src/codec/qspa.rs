//! Flooding q-ary sum-product decoding in the probability domain.
//!
//! Check nodes combine messages with a Walsh-Hadamard transform over the
//! additive group of GF(2^r). Every message is renormalized to sum to one
//! after each update.

use alloc::vec;
use alloc::vec::Vec;

use super::matrix::SparseGfMatrix;
use super::CodecError;
use crate::gf2m::{FieldDesc, GfElem};

const NORMALIZATION_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodeResult {
    pub hard_decision: Vec<GfElem>,
    /// The hard decision has zero syndrome.
    pub converged: bool,
    pub iterations_used: usize,
}

/// Which half-iteration just produced the messages passed to an observer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    CheckToVar,
    VarToCheck,
}

/// Decoder bound to one parity-check matrix. Immutable and shareable across
/// threads; all per-frame state is allocated inside [`QspaDecoder::decode`].
#[derive(Debug, Clone)]
pub struct QspaDecoder {
    h: SparseGfMatrix,
    q: usize,
    /// Edges grouped by check: `check_ptr[c]..check_ptr[c + 1]`.
    check_ptr: Vec<usize>,
    edge_var: Vec<usize>,
    /// `mul_table[label][x] = label * x`.
    edge_label: Vec<u8>,
    mul_table: Vec<Vec<u8>>,
    /// Edge ids per variable.
    var_edges: Vec<Vec<usize>>,
}

impl QspaDecoder {
    pub fn new(h: &SparseGfMatrix) -> Self {
        let field = h.field();
        let q = field.q() as usize;
        let mut check_ptr = Vec::with_capacity(h.n_rows() + 1);
        let mut edge_var = Vec::with_capacity(h.nnz());
        let mut edge_label = Vec::with_capacity(h.nnz());
        let mut var_edges = vec![Vec::new(); h.n_cols()];
        check_ptr.push(0);
        for row in h.rows() {
            for &(c, v) in row {
                var_edges[c].push(edge_var.len());
                edge_var.push(c);
                edge_label.push(v.0);
            }
            check_ptr.push(edge_var.len());
        }
        let mul_table = field
            .elements()
            .map(|a| field.elements().map(|x| field.mul(a, x).0).collect())
            .collect();
        QspaDecoder { h: h.clone(), q, check_ptr, edge_var, edge_label, mul_table, var_edges }
    }

    pub fn matrix(&self) -> &SparseGfMatrix {
        &self.h
    }

    pub fn field(&self) -> &FieldDesc {
        self.h.field()
    }

    /// Decodes from per-symbol priors laid out as `n * q` probabilities,
    /// symbol-major.
    pub fn decode(&self, priors: &[f64], max_iters: usize) -> Result<DecodeResult, CodecError> {
        self.decode_observed(priors, max_iters, |_, _| {})
    }

    /// As [`decode`](Self::decode), calling `observer` with the full message
    /// array (`edges * q`, edge-major) after every half-iteration.
    pub fn decode_observed<F>(&self, priors: &[f64], max_iters: usize, mut observer: F) -> Result<DecodeResult, CodecError>
    where
        F: FnMut(Stage, &[f64]),
    {
        let q = self.q;
        let n = self.h.n_cols();
        self.validate_priors(priors)?;
        if max_iters == 0 {
            return Err(CodecError::ZeroIterations);
        }
        let n_edges = self.edge_var.len();
        let mut v2c = vec![0.0; n_edges * q];
        for (e, &v) in self.edge_var.iter().enumerate() {
            v2c[e * q..(e + 1) * q].copy_from_slice(&priors[v * q..(v + 1) * q]);
        }
        let mut c2v = vec![0.0; n_edges * q];
        let mut hard = vec![GfElem::ZERO; n];
        let mut scratch = Scratch::new(q);

        let mut iterations = 0;
        let mut converged = false;
        while iterations < max_iters {
            iterations += 1;
            for c in 0..self.h.n_rows() {
                self.check_update(c, &v2c, &mut c2v, &mut scratch);
            }
            observer(Stage::CheckToVar, &c2v);
            for v in 0..n {
                hard[v] = self.var_update(v, &priors[v * q..(v + 1) * q], &c2v, &mut v2c, &mut scratch);
            }
            observer(Stage::VarToCheck, &v2c);
            if self.h.is_codeword(&hard) {
                converged = true;
                break;
            }
        }
        Ok(DecodeResult { hard_decision: hard, converged, iterations_used: iterations })
    }

    fn validate_priors(&self, priors: &[f64]) -> Result<(), CodecError> {
        let q = self.q;
        if priors.len() != self.h.n_cols() * q {
            return Err(CodecError::DimensionMismatch);
        }
        for (symbol, p) in priors.chunks_exact(q).enumerate() {
            let sum: f64 = p.iter().sum();
            if p.iter().any(|&x| !(x >= 0.0) || !x.is_finite()) || (sum - 1.0).abs() > NORMALIZATION_TOLERANCE {
                return Err(CodecError::PriorsNotNormalized { symbol });
            }
        }
        Ok(())
    }

    fn check_update(&self, c: usize, v2c: &[f64], c2v: &mut [f64], s: &mut Scratch) {
        let q = self.q;
        let edges = self.check_ptr[c]..self.check_ptr[c + 1];
        let deg = edges.len();
        s.spectra.resize(deg * q, 0.0);
        // Spectrum of each incoming message after relabeling x -> h x.
        for (k, e) in edges.clone().enumerate() {
            let perm = &self.mul_table[self.edge_label[e] as usize];
            let spec = &mut s.spectra[k * q..(k + 1) * q];
            for (x, &p) in v2c[e * q..(e + 1) * q].iter().enumerate() {
                spec[perm[x] as usize] = p;
            }
            walsh_hadamard(spec);
        }
        // Leave-one-out products via prefix/suffix sweeps.
        s.suffix.resize(deg * q, 0.0);
        let mut acc = vec_ones(&mut s.acc, q);
        for k in (0..deg).rev() {
            s.suffix[k * q..(k + 1) * q].copy_from_slice(acc);
            for (a, &x) in acc.iter_mut().zip(&s.spectra[k * q..(k + 1) * q]) {
                *a *= x;
            }
        }
        acc = vec_ones(&mut s.acc, q);
        for (k, e) in edges.enumerate() {
            let out = &mut s.work;
            for i in 0..q {
                out[i] = acc[i] * s.suffix[k * q + i];
            }
            walsh_hadamard(out);
            // out[y] is proportional to P(sum of the other terms = y); the
            // message for x is out[h x].
            let perm = &self.mul_table[self.edge_label[e] as usize];
            let dst = &mut c2v[e * q..(e + 1) * q];
            for x in 0..q {
                dst[x] = out[perm[x] as usize].max(0.0);
            }
            normalize(dst);
            for (a, &x) in acc.iter_mut().zip(&s.spectra[k * q..(k + 1) * q]) {
                *a *= x;
            }
        }
    }

    fn var_update(&self, v: usize, prior: &[f64], c2v: &[f64], v2c: &mut [f64], s: &mut Scratch) -> GfElem {
        let q = self.q;
        let edges = &self.var_edges[v];
        let deg = edges.len();
        s.suffix.resize(deg * q, 0.0);
        s.acc.clear();
        s.acc.extend_from_slice(prior);
        for k in (0..deg).rev() {
            s.suffix[k * q..(k + 1) * q].copy_from_slice(&s.acc);
            let e = edges[k];
            for (a, &x) in s.acc.iter_mut().zip(&c2v[e * q..(e + 1) * q]) {
                *a *= x;
            }
            rescale(&mut s.acc);
        }
        // s.acc now holds the full posterior.
        let decision = argmax(&s.acc);
        let prefix = &mut s.work;
        prefix.fill(1.0);
        for (k, &e) in edges.iter().enumerate() {
            let dst = &mut v2c[e * q..(e + 1) * q];
            for i in 0..q {
                dst[i] = prefix[i] * s.suffix[k * q + i];
            }
            normalize(dst);
            for (p, &x) in prefix.iter_mut().zip(&c2v[e * q..(e + 1) * q]) {
                *p *= x;
            }
            rescale(prefix);
        }
        GfElem(decision as u8)
    }
}

struct Scratch {
    spectra: Vec<f64>,
    suffix: Vec<f64>,
    acc: Vec<f64>,
    work: Vec<f64>,
}

impl Scratch {
    fn new(q: usize) -> Self {
        Scratch { spectra: Vec::new(), suffix: Vec::new(), acc: vec![1.0; q], work: vec![0.0; q] }
    }
}

fn vec_ones(v: &mut Vec<f64>, q: usize) -> &mut [f64] {
    v.clear();
    v.resize(q, 1.0);
    v
}

/// Unnormalized in-place Walsh-Hadamard transform; applying it twice scales
/// by the length.
pub fn walsh_hadamard(a: &mut [f64]) {
    let n = a.len();
    debug_assert!(n.is_power_of_two());
    let mut h = 1;
    while h < n {
        for block in (0..n).step_by(2 * h) {
            for i in block..block + h {
                let (x, y) = (a[i], a[i + h]);
                a[i] = x + y;
                a[i + h] = x - y;
            }
        }
        h *= 2;
    }
}

/// Scales to unit sum; an all-zero (or non-finite) vector becomes uniform.
fn normalize(p: &mut [f64]) {
    let sum: f64 = p.iter().sum();
    if sum > 0.0 && sum.is_finite() {
        p.iter_mut().for_each(|x| *x /= sum);
    } else {
        let u = 1.0 / p.len() as f64;
        p.iter_mut().for_each(|x| *x = u);
    }
}

// Keeps running products away from underflow; the scale is irrelevant.
fn rescale(p: &mut [f64]) {
    let max = p.iter().copied().fold(0.0, f64::max);
    if max > 0.0 && max < 1e-100 {
        p.iter_mut().for_each(|x| *x /= max);
    }
}

/// Index of the largest entry; ties go to the smallest index.
fn argmax(p: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in p.iter().enumerate() {
        if x > p[best] {
            best = i;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf4() -> FieldDesc {
        FieldDesc::new(2, None).unwrap()
    }

    fn toy() -> SparseGfMatrix {
        let g = |v| GfElem(v);
        SparseGfMatrix::from_dense(&[vec![g(1), g(2), g(3), g(0)], vec![g(0), g(1), g(1), g(2)]], gf4()).unwrap()
    }

    fn point_masses(word: &[GfElem], q: usize) -> Vec<f64> {
        let mut p = vec![0.0; word.len() * q];
        for (i, s) in word.iter().enumerate() {
            p[i * q + s.0 as usize] = 1.0;
        }
        p
    }

    #[test]
    fn wht_involution() {
        let mut a = [0.1, 0.2, 0.3, 0.4, 0.0, 0.0, 0.5, 0.25];
        let orig = a;
        walsh_hadamard(&mut a);
        walsh_hadamard(&mut a);
        for (x, y) in a.iter().zip(orig) {
            assert!((x / 8.0 - y).abs() < 1e-12);
        }
    }

    #[test]
    fn wht_convolution_over_xor() {
        let f = [0.1, 0.2, 0.3, 0.4];
        let g = [0.4, 0.3, 0.2, 0.1];
        let mut direct = [0.0; 4];
        for a in 0..4 {
            for b in 0..4 {
                direct[a ^ b] += f[a] * g[b];
            }
        }
        let (mut fa, mut ga) = (f, g);
        walsh_hadamard(&mut fa);
        walsh_hadamard(&mut ga);
        let mut prod: Vec<f64> = fa.iter().zip(ga).map(|(x, y)| x * y).collect();
        walsh_hadamard(&mut prod);
        for (x, y) in prod.iter().zip(direct) {
            assert!((x / 4.0 - y).abs() < 1e-12);
        }
    }

    #[test]
    fn point_masses_converge_in_one() {
        let h = toy();
        let enc = super::super::SystematicEncoder::new(&h).unwrap();
        let cw = enc.encode(&[GfElem(2), GfElem(3)]).unwrap();
        let dec = QspaDecoder::new(&h);
        let res = dec.decode(&point_masses(&cw, 4), 80).unwrap();
        assert!(res.converged);
        assert_eq!(res.iterations_used, 1);
        assert_eq!(res.hard_decision, cw);
    }

    #[test]
    fn uniform_priors_are_deterministic() {
        // Uniform messages stay uniform, the tie rule picks symbol 0 and the
        // all-zero word always satisfies the checks.
        let h = toy();
        let dec = QspaDecoder::new(&h);
        let a = dec.decode(&vec![0.25; 16], 5).unwrap();
        let b = dec.decode(&vec![0.25; 16], 5).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.hard_decision, vec![GfElem::ZERO; 4]);
        assert!(a.converged);
    }

    #[test]
    fn rejects_bad_priors() {
        let dec = QspaDecoder::new(&toy());
        let mut p = vec![0.25; 16];
        p[5] = 0.5;
        assert_eq!(dec.decode(&p, 10).unwrap_err(), CodecError::PriorsNotNormalized { symbol: 1 });
        assert_eq!(dec.decode(&p[..12], 10).unwrap_err(), CodecError::DimensionMismatch);
        assert_eq!(dec.decode(&vec![0.25; 16], 0).unwrap_err(), CodecError::ZeroIterations);
    }

    #[test]
    fn messages_stay_normalized() {
        let h = toy();
        let dec = QspaDecoder::new(&h);
        let mut priors = vec![0.0; 16];
        let noisy = [[0.7, 0.1, 0.1, 0.1], [0.2, 0.5, 0.2, 0.1], [0.1, 0.1, 0.1, 0.7], [0.4, 0.4, 0.1, 0.1]];
        for (i, p) in noisy.iter().enumerate() {
            priors[i * 4..i * 4 + 4].copy_from_slice(p);
        }
        let mut calls = 0;
        dec.decode_observed(&priors, 10, |_, msgs| {
            calls += 1;
            for m in msgs.chunks_exact(4) {
                let s: f64 = m.iter().sum();
                assert!((s - 1.0).abs() < 1e-9);
                assert!(m.iter().all(|&x| x >= 0.0));
            }
        })
        .unwrap();
        assert!(calls >= 2);
    }
}
