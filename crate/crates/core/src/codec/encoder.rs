//! Systematic encoding through the reduced row echelon form of H.

use alloc::vec;
use alloc::vec::Vec;

use super::matrix::{row_reduce, SparseGfMatrix};
use super::CodecError;
use crate::gf2m::{FieldDesc, GfElem};

/// Encoder for the null space of a full-row-rank H.
///
/// Information symbols are placed at the non-pivot columns of the echelon
/// form (`info_positions`); pivot columns are solved from them.
#[derive(Debug, Clone)]
pub struct SystematicEncoder {
    field: FieldDesc,
    n: usize,
    info_positions: Vec<usize>,
    parity_positions: Vec<usize>,
    /// `parity[i][j]`: coefficient of info symbol `j` in parity symbol `i`.
    parity: Vec<Vec<u8>>,
}

impl SystematicEncoder {
    pub fn new(h: &SparseGfMatrix) -> Result<Self, CodecError> {
        let field = h.field().clone();
        let mut dense: Vec<Vec<u8>> = h
            .to_dense()
            .into_iter()
            .map(|r| r.into_iter().map(|v| v.0).collect())
            .collect();
        let pivots = row_reduce(&mut dense, &field, true);
        if pivots.len() < h.n_rows() {
            return Err(CodecError::RankDeficient { rank: pivots.len(), rows: h.n_rows() });
        }
        let mut is_pivot = vec![false; h.n_cols()];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let info_positions: Vec<usize> = (0..h.n_cols()).filter(|&c| !is_pivot[c]).collect();
        let parity = dense[..pivots.len()]
            .iter()
            .map(|row| info_positions.iter().map(|&c| row[c]).collect())
            .collect();
        Ok(SystematicEncoder { field, n: h.n_cols(), info_positions, parity_positions: pivots, parity })
    }

    /// Code length in symbols.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of information symbols, `n - rank(H)`.
    pub fn k(&self) -> usize {
        self.info_positions.len()
    }

    /// Codeword positions that carry the message, in message order.
    pub fn info_positions(&self) -> &[usize] {
        &self.info_positions
    }

    pub fn encode(&self, message: &[GfElem]) -> Result<Vec<GfElem>, CodecError> {
        if message.len() != self.k() {
            return Err(CodecError::DimensionMismatch);
        }
        let mut cw = vec![GfElem::ZERO; self.n];
        for (&pos, &m) in self.info_positions.iter().zip(message) {
            cw[pos] = m;
        }
        // Pivot row i reads x_p + sum_j a_ij m_j = 0; characteristic 2.
        for (row, &p) in self.parity.iter().zip(&self.parity_positions) {
            cw[p] = row
                .iter()
                .zip(message)
                .fold(GfElem::ZERO, |acc, (&a, &m)| self.field.add(acc, self.field.mul(GfElem(a), m)));
        }
        Ok(cw)
    }
}
