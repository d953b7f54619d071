//! The coherent-orientation sign calculus, treated axiomatically: every
//! `±1` factor attached to disjoint unions, gluings, and end reorderings of
//! tuple shapes, under the two bookkeeping conventions in circulation.

use thiserror::Error;

use crate::sign::{Sign, Z2};
use crate::tuples::CRTupleShape;

#[derive(Debug, Error, PartialEq)]
pub enum SignError {
    #[error("gluing profile mismatch: {0}")]
    ProfileMismatch(String),
    #[error("end position out of range")]
    OutOfRange,
    #[error("invalid permutation")]
    BadPermutation,
}

/// Which coherent-orientation convention the signs follow.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Convention {
    /// Gluing is orientation preserving; disjoint union costs
    /// `(-1)^{ind^- T · ind T'}`.
    #[default]
    Ht,
    /// Gluing costs the negative-end reordering sign; disjoint union costs
    /// `(-1)^{ind^- T · ind^+ T'}`.
    Bm,
}

/// Sign of the disjoint-union identification `o(T) ⊔ o(T') -> o(T ⊔ T')`.
pub fn disjoint_sign(t: &CRTupleShape, t2: &CRTupleShape, c: Convention) -> Sign {
    let exponent = match c {
        Convention::Ht => t.ind_neg() * t2.ind_total(),
        Convention::Bm => t.ind_neg() * t2.ind_pos(),
    };
    Sign::from_parity(i64::from(exponent.0))
}

/// Koszul sign of the pairwise products `Σ_{a<b} |g_a||g_b|`.
fn pair_sum_sign(gradings: &[Z2]) -> Sign {
    let mut parity = 0u64;
    for a in 0..gradings.len() {
        for b in a + 1..gradings.len() {
            parity += u64::from((gradings[a] * gradings[b]).0);
        }
    }
    Sign::from_parity(parity as i64)
}

/// Sign of the complete-gluing identification `o(T) # o(T') -> o(T # T')`.
/// Requires every negative end of `t` to match the positive ends of `t2` in
/// order.
pub fn gluing_sign(t: &CRTupleShape, t2: &CRTupleShape, c: Convention) -> Result<Sign, SignError> {
    if t.neg != t2.pos {
        return Err(SignError::ProfileMismatch(
            "negative ends of the upper tuple must equal the positive ends of the lower".into(),
        ));
    }
    Ok(match c {
        Convention::Ht => Sign::Plus,
        Convention::Bm => pair_sum_sign(&t.neg),
    })
}

/// Sign relating the orientations of a tuple and the tuple with ends `i` and
/// `i+1` on one side transposed: `(-1)^{|S_i||S_{i+1}|}`.
pub fn swap_ends_sign(t: &CRTupleShape, i: usize, positive_side: bool) -> Result<Sign, SignError> {
    let side = if positive_side { &t.pos } else { &t.neg };
    if i + 1 >= side.len() {
        return Err(SignError::OutOfRange);
    }
    Ok(Sign::koszul(side[i], side[i + 1]))
}

/// Koszul sign of an arbitrary reordering of a graded word: `(-1)^k` with `k`
/// the number of inversions between odd entries. `perm[j]` names the source
/// position placed at target slot `j`.
pub fn reorder_sign(gradings: &[Z2], perm: &[usize]) -> Result<Sign, SignError> {
    if perm.len() != gradings.len() {
        return Err(SignError::BadPermutation);
    }
    let mut seen = vec![false; perm.len()];
    for &p in perm {
        if p >= perm.len() || seen[p] {
            return Err(SignError::BadPermutation);
        }
        seen[p] = true;
    }
    let mut parity = 0u64;
    for a in 0..perm.len() {
        for b in a + 1..perm.len() {
            if perm[a] > perm[b] && gradings[perm[a]].is_odd() && gradings[perm[b]].is_odd() {
                parity += 1;
            }
        }
    }
    Ok(Sign::from_parity(parity as i64))
}

/// Stable-move permutation sending the positions in `front` (ascending) to the
/// leading slots and the rest after them, both in original relative order.
pub fn block_to_front(len: usize, front: &[usize]) -> Vec<usize> {
    let mut perm: Vec<usize> = front.to_vec();
    perm.extend((0..len).filter(|i| !front.contains(i)));
    perm
}

/// The pair `(gconst, dconst)` attached to a partial gluing of `tau` ends:
/// the first `tau` negative ends of `tu` against the last `tau` positive ends
/// of `tv`. Under the first convention the gluing constant is trivial and the
/// disjoint-union constant sums the gradings of the lower tuple's unglued
/// positive ends times the total index of the upper tuple; under the second
/// both printed formulas are evaluated as stated.
pub fn partial_glue_signs(
    tu: &CRTupleShape,
    tv: &CRTupleShape,
    tau: usize,
    c: Convention,
) -> Result<(Sign, Sign), SignError> {
    if tau == 0 || tau > tu.neg.len() || tau > tv.pos.len() {
        return Err(SignError::ProfileMismatch(format!(
            "tau = {tau} incompatible with {} negative / {} positive ends",
            tu.neg.len(),
            tv.pos.len()
        )));
    }
    let offset = tv.pos.len() - tau;
    for i in 0..tau {
        if tu.neg[i] != tv.pos[offset + i] {
            return Err(SignError::ProfileMismatch(format!(
                "grading of glued end {i} differs between the tuples"
            )));
        }
    }
    match c {
        Convention::Ht => {
            let unglued_sum: i64 =
                tv.pos[..offset].iter().map(|g| i64::from(g.0)).sum();
            let dconst = Sign::from_parity(unglued_sum * i64::from(tu.ind_total().0));
            Ok((Sign::Plus, dconst))
        }
        Convention::Bm => {
            let glued = &tu.neg[..tau];
            let gconst = pair_sum_sign(glued);
            // The printed four-term exponent for the boundary constant.
            let sum = |gs: &[Z2]| -> i64 { gs.iter().map(|g| i64::from(g.0)).sum() };
            let mut parity = 0i64;
            for a in 0..tau {
                for b in a + 1..tau {
                    parity += i64::from((tv.pos[a] * tv.pos[b]).0);
                }
            }
            parity += sum(&tv.pos[..tau]) * sum(&tu.pos);
            for a in tau..tu.neg.len() {
                for b in a + 1..tu.neg.len() {
                    parity += i64::from((tu.neg[a] * tu.neg[b]).0);
                }
            }
            parity += sum(&tv.neg) * sum(&tu.neg[tau..]);
            Ok((gconst, Sign::from_parity(parity)))
        }
    }
}

/// Orientation change of the gluing map onto a boundary stratum:
/// `gconst * dconst * (-1)^{ind Tu}`.
pub fn boundary_sign(
    tu: &CRTupleShape,
    tv: &CRTupleShape,
    tau: usize,
    c: Convention,
) -> Result<Sign, SignError> {
    let (gconst, dconst) = partial_glue_signs(tu, tv, tau, c)?;
    Ok(gconst * dconst * Sign::from_parity(i64::from(tu.ind_total().0)))
}
