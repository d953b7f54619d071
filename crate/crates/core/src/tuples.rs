//! Combinatorial shadows of punctured-curve data: orbit labels with Z/2
//! gradings, tuple shapes, and the index formulas evaluated on them.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::sign::Z2;

#[derive(Debug, Error, PartialEq)]
pub enum TupleError {
    #[error("mu list length {got} does not match puncture count {want}")]
    MuLengthMismatch { got: usize, want: usize },
}

/// A labeled closed orbit: Z/2 grading, optional integer index, multiplicity
/// over the underlying simple orbit, and a unique key fixing the total order
/// used when sorting generator words.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitLabel {
    pub id: String,
    pub grading: Z2,
    pub mu_cz: Option<i64>,
    pub multiplicity: u64,
    pub sort_key: i64,
}

impl OrbitLabel {
    /// Consistency of a supplied grading with a supplied integer index:
    /// `|γ| = μ + n - 1 (mod 2)`.
    pub fn grading_consistent(&self, n: u32) -> bool {
        match self.mu_cz {
            None => true,
            Some(mu) => Z2::new(mu + i64::from(n) - 1) == self.grading,
        }
    }
}

/// Grading-level shadow of a punctured-curve operator tuple: ordered end
/// gradings on both sides, genus, relative first Chern number, and the
/// ambient half-dimension.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CRTupleShape {
    pub pos: Vec<Z2>,
    pub neg: Vec<Z2>,
    pub genus: u32,
    pub c1: i64,
    pub n: u32,
}

impl CRTupleShape {
    pub fn new(pos: Vec<Z2>, neg: Vec<Z2>, genus: u32, c1: i64, n: u32) -> Self {
        CRTupleShape { pos, neg, genus, c1, n }
    }

    /// Sum of the positive-end gradings mod 2.
    pub fn ind_pos(&self) -> Z2 {
        self.pos.iter().fold(Z2::ZERO, |acc, &g| acc + g)
    }

    /// Sum of the negative-end gradings mod 2.
    pub fn ind_neg(&self) -> Z2 {
        self.neg.iter().fold(Z2::ZERO, |acc, &g| acc + g)
    }

    /// Total Z/2 index, equal to the Fredholm index mod 2 for consistent data.
    pub fn ind_total(&self) -> Z2 {
        self.ind_pos() + self.ind_neg()
    }
}

/// Fredholm index of the tuple operator:
/// `Σ μ+ - Σ μ- - (n-1)(k- + k+) + 2 c1 + n (2 - 2g)`.
pub fn fredholm_index(
    t: &CRTupleShape,
    mu_pos: &[i64],
    mu_neg: &[i64],
) -> Result<i64, TupleError> {
    if mu_pos.len() != t.pos.len() {
        return Err(TupleError::MuLengthMismatch { got: mu_pos.len(), want: t.pos.len() });
    }
    if mu_neg.len() != t.neg.len() {
        return Err(TupleError::MuLengthMismatch { got: mu_neg.len(), want: t.neg.len() });
    }
    let n = i64::from(t.n);
    let k = (t.pos.len() + t.neg.len()) as i64;
    let g = i64::from(t.genus);
    Ok(mu_pos.iter().sum::<i64>() - mu_neg.iter().sum::<i64>() - (n - 1) * k
        + 2 * t.c1
        + n * (2 - 2 * g))
}

/// Virtual dimension of the parametrized moduli space:
/// `Σ μ+ - Σ μ- + 2 c1 + (n-3)(2 - 2g - k- - k+)`.
pub fn virtual_dimension(
    t: &CRTupleShape,
    mu_pos: &[i64],
    mu_neg: &[i64],
) -> Result<i64, TupleError> {
    if mu_pos.len() != t.pos.len() {
        return Err(TupleError::MuLengthMismatch { got: mu_pos.len(), want: t.pos.len() });
    }
    if mu_neg.len() != t.neg.len() {
        return Err(TupleError::MuLengthMismatch { got: mu_neg.len(), want: t.neg.len() });
    }
    let n = i64::from(t.n);
    let k = (t.pos.len() + t.neg.len()) as i64;
    let g = i64::from(t.genus);
    Ok(mu_pos.iter().sum::<i64>() - mu_neg.iter().sum::<i64>()
        + 2 * t.c1
        + (n - 3) * (2 - 2 * g - k))
}

/// A curve class is rigid (counts toward the potential) only when its total
/// grading is odd.
pub fn validate_rigid(gradings: impl IntoIterator<Item = Z2>) -> bool {
    gradings.into_iter().fold(Z2::ZERO, |acc, g| acc + g) == Z2::ONE
}
