//! Construction and decoding of non-binary quasi-cyclic LDPC codes.
//!
//! A protograph is lifted with circulant shifts chosen under an ACE
//! spectrum constraint, then labelled over GF(2^r) so that short lifted
//! cycles are canceled (their submatrices have full rank).

#![no_std]

extern crate alloc;

pub mod ace_opt;
pub mod codec;
pub mod gf2m;
pub mod protograph;
pub mod qclift;

pub use gf2m::{FieldDesc, GfElem};
pub use protograph::{CycleRecord, Protograph};
pub use qclift::{AceConstraint, AceSpectrum, AceValue, QcCode};
