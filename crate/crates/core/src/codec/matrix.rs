//! Sparse matrices over GF(2^r) and Gaussian elimination.

use alloc::vec;
use alloc::vec::Vec;

use super::CodecError;
use crate::gf2m::{FieldDesc, GfElem};

/// Row-major sparse matrix. Each row holds `(col, value)` pairs sorted by
/// column with nonzero values and no duplicates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseGfMatrix {
    n_rows: usize,
    n_cols: usize,
    rows: Vec<Vec<(usize, GfElem)>>,
    field: FieldDesc,
}

impl SparseGfMatrix {
    pub fn zeros(n_rows: usize, n_cols: usize, field: FieldDesc) -> Self {
        SparseGfMatrix { n_rows, n_cols, rows: vec![Vec::new(); n_rows], field }
    }

    /// Builds from `(row, col, value)` triples. Zero values are dropped;
    /// repeated positions are rejected.
    pub fn from_entries<I>(n_rows: usize, n_cols: usize, field: FieldDesc, entries: I) -> Result<Self, CodecError>
    where
        I: IntoIterator<Item = (usize, usize, GfElem)>,
    {
        let mut m = Self::zeros(n_rows, n_cols, field);
        for (r, c, v) in entries {
            if r >= n_rows || c >= n_cols {
                return Err(CodecError::OutOfBounds { row: r, col: c });
            }
            if v.0 as u32 >= m.field.q() {
                return Err(CodecError::Field(crate::gf2m::FieldError::OutOfRange(v.0 as u32)));
            }
            if !v.is_zero() {
                m.rows[r].push((c, v));
            }
        }
        for (r, row) in m.rows.iter_mut().enumerate() {
            row.sort_unstable_by_key(|&(c, _)| c);
            if let Some(w) = row.windows(2).find(|w| w[0].0 == w[1].0) {
                return Err(CodecError::DuplicateEntry { row: r, col: w[0].0 });
            }
        }
        Ok(m)
    }

    pub fn from_dense(dense: &[Vec<GfElem>], field: FieldDesc) -> Result<Self, CodecError> {
        let n_rows = dense.len();
        let n_cols = dense.first().map_or(0, Vec::len);
        if dense.iter().any(|r| r.len() != n_cols) {
            return Err(CodecError::DimensionMismatch);
        }
        let entries = dense
            .iter()
            .enumerate()
            .flat_map(|(r, row)| row.iter().enumerate().map(move |(c, &v)| (r, c, v)));
        Self::from_entries(n_rows, n_cols, field, entries)
    }

    pub fn to_dense(&self) -> Vec<Vec<GfElem>> {
        let mut d = vec![vec![GfElem::ZERO; self.n_cols]; self.n_rows];
        for (r, row) in self.rows.iter().enumerate() {
            for &(c, v) in row {
                d[r][c] = v;
            }
        }
        d
    }

    #[inline]
    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    #[inline]
    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    #[inline]
    pub fn field(&self) -> &FieldDesc {
        &self.field
    }

    #[inline]
    pub fn row(&self, r: usize) -> &[(usize, GfElem)] {
        &self.rows[r]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[(usize, GfElem)]> {
        self.rows.iter().map(Vec::as_slice)
    }

    pub fn get(&self, r: usize, c: usize) -> GfElem {
        self.rows[r]
            .binary_search_by_key(&c, |&(col, _)| col)
            .map_or(GfElem::ZERO, |i| self.rows[r][i].1)
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    /// `(row, value)` lists per column, rows ascending.
    pub fn columns(&self) -> Vec<Vec<(usize, GfElem)>> {
        let mut cols = vec![Vec::new(); self.n_cols];
        for (r, row) in self.rows.iter().enumerate() {
            for &(c, v) in row {
                cols[c].push((r, v));
            }
        }
        cols
    }

    /// Same support with every entry replaced by 1 over GF(2).
    pub fn support(&self) -> SparseGfMatrix {
        let gf2 = FieldDesc::new(1, None).expect("GF(2) is always constructible");
        SparseGfMatrix {
            n_rows: self.n_rows,
            n_cols: self.n_cols,
            rows: self.rows.iter().map(|row| row.iter().map(|&(c, _)| (c, GfElem::ONE)).collect()).collect(),
            field: gf2,
        }
    }

    /// `H x^T`.
    pub fn syndrome(&self, x: &[GfElem]) -> Result<Vec<GfElem>, CodecError> {
        if x.len() != self.n_cols {
            return Err(CodecError::DimensionMismatch);
        }
        Ok(self
            .rows
            .iter()
            .map(|row| {
                row.iter()
                    .fold(GfElem::ZERO, |acc, &(c, v)| self.field.add(acc, self.field.mul(v, x[c])))
            })
            .collect())
    }

    pub fn is_codeword(&self, x: &[GfElem]) -> bool {
        self.syndrome(x).is_ok_and(|s| s.iter().all(|v| v.is_zero()))
    }

    /// Rank by Gaussian elimination, pivoting on the first nonzero entry of
    /// each column.
    pub fn rank(&self) -> usize {
        let mut dense: Vec<Vec<u8>> = self
            .to_dense()
            .into_iter()
            .map(|r| r.into_iter().map(|v| v.0).collect())
            .collect();
        row_reduce(&mut dense, &self.field, false).len()
    }

    /// `rank == min(n_rows, n_cols)`.
    pub fn is_full_rank(&self) -> bool {
        self.rank() == self.n_rows.min(self.n_cols)
    }
}

/// In-place elimination over GF(q). Returns the pivot columns, one per
/// nonzero row, which end up in `rows[0..rank]`. With `reduced`, pivots are
/// scaled to 1 and cleared above as well (reduced row echelon form).
pub(crate) fn row_reduce(rows: &mut [Vec<u8>], field: &FieldDesc, reduced: bool) -> Vec<usize> {
    let n_rows = rows.len();
    let n_cols = rows.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut rank = 0;
    for col in 0..n_cols {
        if rank == n_rows {
            break;
        }
        let Some(p) = (rank..n_rows).find(|&r| rows[r][col] != 0) else {
            continue;
        };
        rows.swap(rank, p);
        let inv = field.inv(GfElem(rows[rank][col])).expect("pivot is nonzero");
        if reduced {
            for v in rows[rank][col..].iter_mut() {
                *v = field.mul(GfElem(*v), inv).0;
            }
        }
        let pivot_row = rows[rank].clone();
        let factor_scale = field.inv(GfElem(pivot_row[col])).expect("pivot is nonzero");
        let first = if reduced { 0 } else { rank + 1 };
        for (r, row) in rows.iter_mut().enumerate().skip(first) {
            if r == rank || row[col] == 0 {
                continue;
            }
            // row -= (row[col] / pivot) * pivot_row
            let factor = field.mul(GfElem(row[col]), factor_scale);
            for (dst, &src) in row[col..].iter_mut().zip(&pivot_row[col..]) {
                if src != 0 {
                    *dst ^= field.mul(factor, GfElem(src)).0;
                }
            }
        }
        pivots.push(col);
        rank += 1;
    }
    pivots
}
