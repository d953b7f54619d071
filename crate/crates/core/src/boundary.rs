//! Brute-force verifier of the boundary identity behind the master equation:
//! enumerate all ways of partially gluing ordered pairs of rigid curve
//! records, compute the induced boundary signs, and match the per-monomial
//! totals against the coefficients of the squared generating function.

use std::collections::BTreeMap;

use serde_json::json;
use thiserror::Error;

use crate::dataset::Dataset;
use crate::scalar::Scalar;
use crate::sign::{Sign, Z2};
use crate::signs::{boundary_sign, reorder_sign, Convention, SignError};
use crate::tuples::CRTupleShape;
use crate::weyl::{CurveRecord, MonomialKey, Prefactor, WeylAlgebra, WeylError};

#[derive(Debug, Error)]
pub enum BoundaryError {
    #[error("invalid gluing map: {0}")]
    InvalidGluing(String),
    #[error("orbit '{0}' has multiplicity > 1; enable the weighted mode to glue it")]
    Multiplicity(String),
    #[error(transparent)]
    Sign(#[from] SignError),
    #[error(transparent)]
    Weyl(#[from] WeylError),
}

/// An orbit-compatible partial bijection from negative-end positions of the
/// upper curve to positive-end positions of the lower curve. Pairs are kept
/// sorted by the upper position; at least one pair is present.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GluingMap {
    pub pairs: Vec<(usize, usize)>,
}

impl GluingMap {
    pub fn tau(&self) -> usize {
        self.pairs.len()
    }
}

/// The combinatorial type of a glued configuration: genus, sorted end
/// tuples, and the total homology class.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct GluedProfile {
    pub genus: u32,
    pub pos: Vec<usize>,
    pub neg: Vec<usize>,
    pub homology: Vec<i64>,
}

impl GluedProfile {
    /// The monomial this profile contributes to: `q_{neg} p_{pos} e^A h^{g-1}`
    /// in stored (ascending) normal form.
    pub fn monomial_key(&self) -> MonomialKey {
        MonomialKey {
            q_word: self.neg.iter().map(|&r| r as u16).collect(),
            p_word: self.pos.iter().map(|&r| r as u16).collect(),
            hbar: self.genus as i32 - 1,
            homology: self.homology.clone(),
        }
    }

    pub fn from_key(key: &MonomialKey) -> GluedProfile {
        GluedProfile {
            genus: (key.hbar + 1) as u32,
            pos: key.p_word.iter().map(|&r| r as usize).collect(),
            neg: key.q_word.iter().map(|&r| r as usize).collect(),
            homology: key.homology.clone(),
        }
    }

    pub fn to_json(&self, alg: &WeylAlgebra) -> serde_json::Value {
        json!({
            "genus": self.genus,
            "pos": self.pos.iter().map(|&r| alg.ids[r].clone()).collect::<Vec<_>>(),
            "neg": self.neg.iter().map(|&r| alg.ids[r].clone()).collect::<Vec<_>>(),
            "homology": self.homology,
        })
    }
}

/// All orbit-compatible nonempty partial bijections from the negative ends of
/// `u` to the positive ends of `v`, in lexicographic order of the assignment
/// vector.
pub fn enumerate_gluings(u: &CurveRecord, v: &CurveRecord) -> Vec<GluingMap> {
    let mut out = Vec::new();
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    let mut used = vec![false; v.pos.len()];
    fn recurse(
        u: &CurveRecord,
        v: &CurveRecord,
        i: usize,
        pairs: &mut Vec<(usize, usize)>,
        used: &mut [bool],
        out: &mut Vec<GluingMap>,
    ) {
        if i == u.neg.len() {
            if !pairs.is_empty() {
                out.push(GluingMap { pairs: pairs.clone() });
            }
            return;
        }
        // Leave position i unglued.
        recurse(u, v, i + 1, pairs, used, out);
        // Or glue it to any free, orbit-matching position of v.
        for j in 0..v.pos.len() {
            if !used[j] && v.pos[j] == u.neg[i] {
                used[j] = true;
                pairs.push((i, j));
                recurse(u, v, i + 1, pairs, used, out);
                pairs.pop();
                used[j] = false;
            }
        }
    }
    recurse(u, v, 0, &mut pairs, &mut used, &mut out);
    out.sort_by(|a, b| a.pairs.cmp(&b.pairs));
    out
}

/// Stable sort of an orbit tuple together with the Koszul sign of the
/// sorting permutation; `None` when the tuple repeats an odd orbit, in which
/// case the corresponding monomial vanishes identically.
fn stable_sort_sign(alg: &WeylAlgebra, ranks: &[usize]) -> (Vec<usize>, Option<Sign>) {
    let mut parity = 0u64;
    for i in 0..ranks.len() {
        for j in i + 1..ranks.len() {
            let (a, b) = (ranks[i], ranks[j]);
            if a == b && alg.gradings[a].is_odd() {
                let mut sorted = ranks.to_vec();
                sorted.sort_unstable();
                return (sorted, None);
            }
            if a > b && alg.gradings[a].is_odd() && alg.gradings[b].is_odd() {
                parity += 1;
            }
        }
    }
    let mut sorted = ranks.to_vec();
    sorted.sort_unstable();
    (sorted, Some(Sign::from_parity(parity as i64)))
}

fn validate_theta(u: &CurveRecord, v: &CurveRecord, theta: &GluingMap) -> Result<(), BoundaryError> {
    if theta.pairs.is_empty() {
        return Err(BoundaryError::InvalidGluing("empty gluing map".into()));
    }
    let mut seen_neg = vec![false; u.neg.len()];
    let mut seen_pos = vec![false; v.pos.len()];
    for &(i, j) in &theta.pairs {
        if i >= u.neg.len() || j >= v.pos.len() {
            return Err(BoundaryError::InvalidGluing("position out of range".into()));
        }
        if seen_neg[i] || seen_pos[j] {
            return Err(BoundaryError::InvalidGluing("position used twice".into()));
        }
        seen_neg[i] = true;
        seen_pos[j] = true;
        if u.neg[i] != v.pos[j] {
            return Err(BoundaryError::InvalidGluing(format!(
                "ends {i} and {j} carry different orbits"
            )));
        }
    }
    Ok(())
}

/// Shape of the configuration obtained by gluing `u` on top of `v` along
/// `theta`: genus `g + g' + tau - 1`, homology classes added, the lower
/// curve's unglued positive ends followed by the upper curve's positive ends
/// (sorted), the lower curve's negative ends followed by the upper curve's
/// unglued negative ends (sorted).
pub fn glued_profile(
    u: &CurveRecord,
    v: &CurveRecord,
    theta: &GluingMap,
) -> Result<GluedProfile, BoundaryError> {
    validate_theta(u, v, theta)?;
    let glued_pos: Vec<usize> = theta.pairs.iter().map(|&(_, j)| j).collect();
    let glued_neg: Vec<usize> = theta.pairs.iter().map(|&(i, _)| i).collect();
    let mut pos: Vec<usize> = (0..v.pos.len())
        .filter(|j| !glued_pos.contains(j))
        .map(|j| v.pos[j])
        .collect();
    pos.extend(u.pos.iter().copied());
    pos.sort_unstable();
    let mut neg: Vec<usize> = v.neg.clone();
    neg.extend((0..u.neg.len()).filter(|i| !glued_neg.contains(i)).map(|i| u.neg[i]));
    neg.sort_unstable();
    let homology: Vec<i64> = u.homology.iter().zip(&v.homology).map(|(a, b)| a + b).collect();
    Ok(GluedProfile {
        genus: u.genus + v.genus + theta.tau() as u32 - 1,
        pos,
        neg,
        homology,
    })
}

/// One summand of a geometric coefficient, kept for mismatch reports.
#[derive(Clone, Debug)]
pub struct TripleInfo<S> {
    pub upper: usize,
    pub lower: usize,
    pub pairs: Vec<(usize, usize)>,
    pub value: S,
}

fn shape_from_gradings(alg: &WeylAlgebra, pos: &[usize], neg: &[usize], genus: u32, n: u32) -> CRTupleShape {
    CRTupleShape::new(
        pos.iter().map(|&r| alg.gradings[r]).collect(),
        neg.iter().map(|&r| alg.gradings[r]).collect(),
        genus,
        0,
        n,
    )
}

/// The signed weight of one triple `(u, v, theta)`: the end-reordering Koszul
/// signs that bring both curves into the aligned gluing position, the
/// boundary sign of the aligned gluing, the sorting signs of the glued ends,
/// and the two signed counts. Zero when a glued tuple repeats an odd orbit.
fn triple_value<S: Scalar>(
    alg: &WeylAlgebra,
    n: u32,
    u: &CurveRecord,
    v: &CurveRecord,
    theta: &GluingMap,
    conv: Convention,
    weighted: bool,
) -> Result<(GluedProfile, S), BoundaryError> {
    let profile = glued_profile(u, v, theta)?;
    let tau = theta.tau();

    // Upper curve: move the glued negative ends to the front, stably.
    let glued_neg: Vec<usize> = theta.pairs.iter().map(|&(i, _)| i).collect();
    let neg_gradings: Vec<Z2> = u.neg.iter().map(|&r| alg.gradings[r]).collect();
    let perm_u = crate::signs::block_to_front(u.neg.len(), &glued_neg);
    let eps1 = reorder_sign(&neg_gradings, &perm_u)?;
    let reordered_u_neg: Vec<usize> = perm_u.iter().map(|&i| u.neg[i]).collect();

    // Lower curve: move the unglued positive ends to the front, stably.
    let glued_pos: Vec<usize> = theta.pairs.iter().map(|&(_, j)| j).collect();
    let unglued_pos: Vec<usize> = (0..v.pos.len()).filter(|j| !glued_pos.contains(j)).collect();
    let pos_gradings: Vec<Z2> = v.pos.iter().map(|&r| alg.gradings[r]).collect();
    let perm_v = crate::signs::block_to_front(v.pos.len(), &unglued_pos);
    let eps2 = reorder_sign(&pos_gradings, &perm_v)?;

    // Sort the glued block of the lower curve to match the upper curve's
    // glued ends in order.
    let block_current: Vec<usize> = {
        let mut g = glued_pos.clone();
        g.sort_unstable();
        g
    };
    let block_target: Vec<usize> = theta.pairs.iter().map(|&(_, j)| j).collect();
    let block_gradings: Vec<Z2> =
        block_current.iter().map(|&j| alg.gradings[v.pos[j]]).collect();
    let block_perm: Vec<usize> = block_target
        .iter()
        .map(|j| block_current.iter().position(|x| x == j).expect("glued position"))
        .collect();
    let eps3 = reorder_sign(&block_gradings, &block_perm)?;
    let reordered_v_pos: Vec<usize> = unglued_pos
        .iter()
        .map(|&j| v.pos[j])
        .chain(block_target.iter().map(|&j| v.pos[j]))
        .collect();

    // Boundary sign of the aligned partial gluing.
    let tu = shape_from_gradings(alg, &u.pos, &reordered_u_neg, u.genus, n);
    let tv = shape_from_gradings(alg, &reordered_v_pos, &v.neg, v.genus, n);
    let bsign = boundary_sign(&tu, &tv, tau, conv)?;

    // Sort the glued configuration's ends; a repeated odd orbit kills the
    // monomial and with it the whole contribution.
    let glued_pos_tuple: Vec<usize> = unglued_pos
        .iter()
        .map(|&j| v.pos[j])
        .chain(u.pos.iter().copied())
        .collect();
    let glued_neg_tuple: Vec<usize> = v
        .neg
        .iter()
        .copied()
        .chain(perm_u[tau..].iter().map(|&i| u.neg[i]))
        .collect();
    let (_, sort_pos) = stable_sort_sign(alg, &glued_pos_tuple);
    let (_, sort_neg) = stable_sort_sign(alg, &glued_neg_tuple);
    let (Some(eps6_pos), Some(eps6_neg)) = (sort_pos, sort_neg) else {
        return Ok((profile, S::zero()));
    };

    let mut value: S = S::from_int(u.count) * S::from_int(v.count);
    let total_sign = eps1 * eps2 * eps3 * bsign * eps6_pos * eps6_neg;
    value = value * total_sign.to_scalar::<S>();
    if weighted {
        for &(i, _) in &theta.pairs {
            value = value / S::from_int(alg.multiplicities[u.neg[i]] as i64);
        }
    }
    Ok((profile, value))
}

/// Accumulated geometric side: per glued profile, the sum of triple values
/// and the list of summands.
pub struct GeometricSide<S> {
    pub totals: BTreeMap<MonomialKey, S>,
    pub triples: BTreeMap<MonomialKey, Vec<TripleInfo<S>>>,
}

pub fn geometric_side<S: Scalar>(
    ds: &Dataset,
    conv: Convention,
    weighted: bool,
) -> Result<GeometricSide<S>, BoundaryError> {
    let alg = ds.algebra();
    if !weighted {
        if let Some(orbit) = ds.orbits.iter().find(|o| o.multiplicity > 1) {
            return Err(BoundaryError::Multiplicity(orbit.id.clone()));
        }
    }
    let mut totals: BTreeMap<MonomialKey, S> = BTreeMap::new();
    let mut triples: BTreeMap<MonomialKey, Vec<TripleInfo<S>>> = BTreeMap::new();
    for (ui, u) in ds.curves.iter().enumerate() {
        for (vi, v) in ds.curves.iter().enumerate() {
            for theta in enumerate_gluings(u, v) {
                let (profile, value) =
                    triple_value::<S>(&alg, ds.n, u, v, &theta, conv, weighted)?;
                let key = profile.monomial_key();
                let slot = totals.entry(key.clone()).or_insert_with(S::zero);
                *slot = slot.clone() + value.clone();
                triples.entry(key).or_default().push(TripleInfo {
                    upper: ui,
                    lower: vi,
                    pairs: theta.pairs.clone(),
                    value,
                });
            }
        }
    }
    Ok(GeometricSide { totals, triples })
}

/// Geometric coefficient of one glued profile: the signed count of broken
/// configurations of the dataset gluing to it.
pub fn geometric_coefficient<S: Scalar>(
    ds: &Dataset,
    profile: &GluedProfile,
    conv: Convention,
    weighted: bool,
) -> Result<S, BoundaryError> {
    let side = geometric_side::<S>(ds, conv, weighted)?;
    Ok(side.totals.get(&profile.monomial_key()).cloned().unwrap_or_else(S::zero))
}

/// One line of the verification report.
pub struct ClaimEntry<S> {
    pub profile: GluedProfile,
    pub algebraic: S,
    pub geometric: S,
    pub ok: bool,
    pub triples: Vec<TripleInfo<S>>,
}

pub struct ClaimReport<S> {
    pub entries: Vec<ClaimEntry<S>>,
    pub ok: bool,
}

impl<S: Scalar> ClaimReport<S> {
    pub fn to_json(&self, alg: &WeylAlgebra) -> serde_json::Value {
        let entries: Vec<serde_json::Value> = self
            .entries
            .iter()
            .map(|e| {
                let mut obj = json!({
                    "profile": e.profile.to_json(alg),
                    "algebraic": e.algebraic.to_string(),
                    "geometric": e.geometric.to_string(),
                    "ok": e.ok,
                });
                if !e.ok {
                    obj["triples"] = serde_json::Value::Array(
                        e.triples
                            .iter()
                            .map(|t| {
                                json!({
                                    "upper": t.upper,
                                    "lower": t.lower,
                                    "pairs": t.pairs,
                                    "value": t.value.to_string(),
                                })
                            })
                            .collect(),
                    );
                }
                obj
            })
            .collect();
        serde_json::Value::Array(entries)
    }
}

/// For every glued profile reachable from the dataset, compares the
/// displayed-basis coefficient of the squared generating function against
/// minus the geometric coefficient.
pub fn claim_check<S: Scalar>(
    ds: &Dataset,
    conv: Convention,
    weighted: bool,
) -> Result<ClaimReport<S>, BoundaryError> {
    let alg = ds.algebra();
    let h2 = alg.h_square::<S>(&ds.curves, Prefactor::None)?;
    let mut side = geometric_side::<S>(ds, conv, weighted)?;
    let mut keys: Vec<MonomialKey> = side.totals.keys().cloned().collect();
    for key in h2.terms.keys() {
        if !side.totals.contains_key(key) {
            keys.push(key.clone());
        }
    }
    keys.sort();
    let mut entries = Vec::new();
    let mut all_ok = true;
    for key in keys {
        let algebraic = alg.printed_coefficient(&h2, &key);
        let geometric = side.totals.get(&key).cloned().unwrap_or_else(S::zero);
        let ok = algebraic == -geometric.clone();
        all_ok &= ok;
        entries.push(ClaimEntry {
            profile: GluedProfile::from_key(&key),
            algebraic,
            geometric,
            ok,
            triples: side.triples.remove(&key).unwrap_or_default(),
        });
    }
    Ok(ClaimReport { entries, ok: all_ok })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{RawCount, RawCurve, RawDataset, RawFlags, RawOrbit};
    use crate::Rat;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn record(genus: u32, pos: &[usize], neg: &[usize], count: i64) -> CurveRecord {
        CurveRecord { genus, pos: pos.to_vec(), neg: neg.to_vec(), homology: vec![], count }
    }

    /// Brute-force count of nonempty orbit-compatible partial bijections, by
    /// assignment-vector enumeration.
    fn partial_bijection_oracle(u: &CurveRecord, v: &CurveRecord) -> usize {
        let m = u.neg.len();
        let k = v.pos.len();
        let mut count = 0usize;
        // Each negative end picks a target in 0..=k (k = unglued).
        let mut pick = vec![0usize; m];
        loop {
            let mut used = vec![false; k];
            let mut valid = true;
            let mut nonempty = false;
            for i in 0..m {
                if pick[i] == k {
                    continue;
                }
                nonempty = true;
                let j = pick[i];
                if used[j] || v.pos[j] != u.neg[i] {
                    valid = false;
                    break;
                }
                used[j] = true;
            }
            if valid && nonempty {
                count += 1;
            }
            // Advance the odometer.
            let mut idx = 0;
            loop {
                if idx == m {
                    return count;
                }
                pick[idx] += 1;
                if pick[idx] <= k {
                    break;
                }
                pick[idx] = 0;
                idx += 1;
            }
        }
    }

    #[test]
    fn enumerate_distinct_orbits() {
        // neg (0, 1) against pos (0, 1, 2): three gluings.
        let u = record(0, &[3], &[0, 1], 1);
        let v = record(0, &[0, 1, 2], &[], 1);
        let maps = enumerate_gluings(&u, &v);
        assert_eq!(maps.len(), 3);
        assert_eq!(maps[0].pairs, vec![(0, 0)]);
        assert_eq!(maps[1].pairs, vec![(0, 0), (1, 1)]);
        assert_eq!(maps[2].pairs, vec![(1, 1)]);
    }

    #[test]
    fn enumerate_no_common_orbits() {
        let u = record(0, &[0], &[1], 1);
        let v = record(0, &[2, 3], &[], 1);
        assert!(enumerate_gluings(&u, &v).is_empty());
    }

    #[test]
    fn enumerate_repeated_orbits_matches_oracle() {
        // neg (g, g) against pos (g, g): the exhaustive count of nonempty
        // partial bijections on two two-element sets is six (four singletons
        // and two full bijections).
        let u = record(0, &[1], &[0, 0], 1);
        let v = record(0, &[0, 0], &[], 1);
        let maps = enumerate_gluings(&u, &v);
        assert_eq!(maps.len(), partial_bijection_oracle(&u, &v));
        assert_eq!(maps.len(), 6);
        // And a couple of asymmetric sanity points against the same oracle.
        let u2 = record(0, &[1], &[0, 0, 2], 1);
        let v2 = record(0, &[0, 2, 0], &[], 1);
        assert_eq!(enumerate_gluings(&u2, &v2).len(), partial_bijection_oracle(&u2, &v2));
    }

    #[test]
    fn glued_profiles_of_the_worked_example() {
        // Upper in M(4; 12), lower in M(123; -): gluing along the first
        // negative end gives genus 0, pos (2, 3, 4), neg (2).
        let upper = record(0, &[3], &[0, 1], 2);
        let lower = record(0, &[0, 1, 2], &[], 3);
        let single = GluingMap { pairs: vec![(0, 0)] };
        let prof = glued_profile(&upper, &lower, &single).unwrap();
        assert_eq!(prof, GluedProfile { genus: 0, pos: vec![1, 2, 3], neg: vec![1], homology: vec![] });
        // Gluing along both ends raises the genus.
        let double = GluingMap { pairs: vec![(0, 0), (1, 1)] };
        let prof = glued_profile(&upper, &lower, &double).unwrap();
        assert_eq!(prof, GluedProfile { genus: 1, pos: vec![2, 3], neg: vec![], homology: vec![] });
        // Homology classes add.
        let mut u2 = upper.clone();
        let mut v2 = lower.clone();
        u2.homology = vec![1, 0];
        v2.homology = vec![0, 2];
        let prof = glued_profile(&u2, &v2, &single).unwrap();
        assert_eq!(prof.homology, vec![1, 2]);
        // Invalid maps are rejected.
        assert!(glued_profile(&upper, &lower, &GluingMap { pairs: vec![] }).is_err());
        assert!(glued_profile(&upper, &lower, &GluingMap { pairs: vec![(0, 2)] }).is_err());
    }

    fn worked_dataset(gradings: [i64; 4]) -> Dataset {
        let raw = RawDataset {
            n: 2,
            h2_rank: 0,
            orbits: (0..4)
                .map(|i| RawOrbit {
                    id: format!("g{}", i + 1),
                    grading: gradings[i] as u8,
                    mu_cz: None,
                    multiplicity: 1,
                    sort_key: None,
                })
                .collect(),
            curves: vec![
                RawCurve {
                    genus: 0,
                    pos: vec!["g4".into()],
                    neg: vec!["g1".into(), "g2".into()],
                    homology: vec![],
                    count: RawCount::Total(2),
                },
                RawCurve {
                    genus: 0,
                    pos: vec!["g1".into(), "g2".into(), "g3".into()],
                    neg: vec![],
                    homology: vec![],
                    count: RawCount::Total(3),
                },
            ],
            flags: RawFlags::default(),
        };
        Dataset::from_raw(raw, None).unwrap()
    }

    const ADMISSIBLE: [[i64; 4]; 4] = [[1, 1, 1, 1], [1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 1]];

    #[test]
    fn boundary_count_of_the_displayed_profile() {
        // The boundary of the displayed three-positive-end stratum equals
        // (-1)^{d2 + d2 d3 + d2 d4 + d3 d4 + 1} * a * b for every admissible
        // grading vector.
        for d in ADMISSIBLE {
            let ds = worked_dataset(d);
            let profile =
                GluedProfile { genus: 0, pos: vec![1, 2, 3], neg: vec![1], homology: vec![] };
            let got: Rat = geometric_coefficient(&ds, &profile, Convention::Ht, false).unwrap();
            let exponent = d[1] + d[1] * d[2] + d[1] * d[3] + d[2] * d[3] + 1;
            let expected = Sign::from_parity(exponent).to_scalar::<Rat>() * Rat::from_int(6);
            assert_eq!(got, expected, "gradings {d:?}");
        }
    }

    #[test]
    fn unreachable_profile_has_zero_coefficient() {
        let ds = worked_dataset([1, 1, 1, 1]);
        let profile =
            GluedProfile { genus: 3, pos: vec![0, 1, 2, 3], neg: vec![], homology: vec![] };
        let got: Rat = geometric_coefficient(&ds, &profile, Convention::Ht, false).unwrap();
        assert_eq!(got, Rat::from_int(0));
    }

    #[test]
    fn claim_check_on_the_worked_example() {
        for d in ADMISSIBLE {
            let ds = worked_dataset(d);
            let report = claim_check::<Rat>(&ds, Convention::Ht, false).unwrap();
            assert!(report.ok, "gradings {d:?}");
            assert_eq!(report.entries.len(), 3, "three gluing profiles");
        }
    }

    #[test]
    fn claim_check_single_curve_is_vacuous() {
        let raw = RawDataset {
            n: 2,
            h2_rank: 0,
            orbits: vec![RawOrbit {
                id: "g".into(),
                grading: 1,
                mu_cz: None,
                multiplicity: 1,
                sort_key: None,
            }],
            curves: vec![RawCurve {
                genus: 0,
                pos: vec!["g".into()],
                neg: vec![],
                homology: vec![],
                count: RawCount::Total(5),
            }],
            flags: RawFlags::default(),
        };
        let ds = Dataset::from_raw(raw, None).unwrap();
        let report = claim_check::<Rat>(&ds, Convention::Ht, false).unwrap();
        assert!(report.ok);
        assert!(report.entries.is_empty());
    }

    #[test]
    fn repeated_end_profiles_are_handled() {
        // Odd repeated end: the glued monomial vanishes identically and the
        // triple contributes zero; even repeated end: plain contribution.
        for g_grading in [1u8, 0u8] {
            let raw = RawDataset {
                n: 2,
                h2_rank: 0,
                orbits: vec![
                    RawOrbit { id: "g".into(), grading: g_grading, mu_cz: None, multiplicity: 1, sort_key: None },
                    RawOrbit { id: "d".into(), grading: 0, mu_cz: None, multiplicity: 1, sort_key: None },
                    RawOrbit { id: "s".into(), grading: 1 - g_grading, mu_cz: None, multiplicity: 1, sort_key: None },
                ],
                curves: vec![
                    RawCurve {
                        genus: 0,
                        pos: vec!["g".into(), "d".into()],
                        neg: vec!["s".into()],
                        homology: vec![],
                        count: RawCount::Total(1),
                    },
                    RawCurve {
                        genus: 0,
                        pos: vec!["g".into(), "s".into()],
                        neg: vec![],
                        homology: vec![],
                        count: RawCount::Total(1),
                    },
                ],
                flags: RawFlags::default(),
            };
            let ds = Dataset::from_raw(raw, None).unwrap();
            let report = claim_check::<Rat>(&ds, Convention::Ht, false).unwrap();
            assert!(report.ok, "g grading {g_grading}");
        }
    }

    #[test]
    fn random_sweep_and_order_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let mut profiles = 0usize;
        for _ in 0..25 {
            let ds = Dataset::random(&mut rng, 5, 6);
            let report = claim_check::<Rat>(&ds, Convention::Ht, false).unwrap();
            assert!(report.ok);
            profiles += report.entries.len();
            // Neither the verdict nor the profile-keyed values depend on the
            // declared total order: key the entries by id-sorted tuples.
            let shuffled = ds.with_shuffled_order(&mut rng);
            let report2 = claim_check::<Rat>(&shuffled, Convention::Ht, false).unwrap();
            assert!(report2.ok);
            let keyed = |d: &Dataset, rep: &ClaimReport<Rat>| -> BTreeMap<String, (Rat, Rat)> {
                rep.entries
                    .iter()
                    .map(|e| {
                        let ids = |t: &[usize]| -> Vec<String> {
                            let mut v: Vec<String> =
                                t.iter().map(|&r| d.orbits[r].id.clone()).collect();
                            v.sort();
                            v
                        };
                        // Convert the values to the id-sorted presentation of
                        // the monomial: Koszul sign of re-sorting each word
                        // from the declared order to id order.
                        let convert = |t: &[usize]| -> Sign {
                            let gradings: Vec<Z2> =
                                t.iter().map(|&r| d.orbits[r].grading).collect();
                            let mut perm: Vec<usize> = (0..t.len()).collect();
                            perm.sort_by_key(|&i| d.orbits[t[i]].id.clone());
                            reorder_sign(&gradings, &perm).unwrap()
                        };
                        let sign = (convert(&e.profile.pos) * convert(&e.profile.neg))
                            .to_scalar::<Rat>();
                        (
                            format!(
                                "g{} pos{:?} neg{:?} A{:?}",
                                e.profile.genus,
                                ids(&e.profile.pos),
                                ids(&e.profile.neg),
                                e.profile.homology
                            ),
                            (e.algebraic.clone() * sign.clone(), e.geometric.clone() * sign),
                        )
                    })
                    .collect()
            };
            assert_eq!(keyed(&ds, &report), keyed(&shuffled, &report2));
        }
        assert!(profiles > 20, "sweep too vacuous: {profiles} profiles");
    }

    #[test]
    fn weighted_mode_verifies_multiplicity_datasets() {
        // With the geometric side weighted by the inverse multiplicities of
        // the glued orbits, the identity extends to m > 1 as a formal
        // statement: contractions carry the same 1/m factors.
        let mut rng = ChaCha8Rng::seed_from_u64(606060);
        let mut profiles = 0usize;
        for _ in 0..20 {
            let mut ds = Dataset::random(&mut rng, 5, 6);
            for orbit in ds.orbits.iter_mut() {
                orbit.multiplicity = rng.gen_range(1..=3);
            }
            let report = claim_check::<Rat>(&ds, Convention::Ht, true).unwrap();
            assert!(report.ok);
            profiles += report.entries.len();
        }
        assert!(profiles > 20, "sweep too vacuous");
    }

    #[test]
    fn multiplicity_requires_weighted_mode() {
        let raw = RawDataset {
            n: 2,
            h2_rank: 0,
            orbits: vec![RawOrbit {
                id: "g".into(),
                grading: 1,
                mu_cz: None,
                multiplicity: 2,
                sort_key: None,
            }],
            curves: vec![],
            flags: RawFlags::default(),
        };
        let ds = Dataset::from_raw(raw, None).unwrap();
        assert!(matches!(
            geometric_side::<Rat>(&ds, Convention::Ht, false),
            Err(BoundaryError::Multiplicity(_))
        ));
        assert!(geometric_side::<Rat>(&ds, Convention::Ht, true).is_ok());
    }
}
