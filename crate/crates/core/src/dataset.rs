//! Dataset ingestion: the JSON schema for orbit tables and rigid-curve
//! records, validation with record-level error reporting, and a seeded
//! generator of random parity-valid datasets for verification sweeps.

use std::collections::BTreeMap;
use std::path::Path;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::sign::Z2;
use crate::tuples::OrbitLabel;
use crate::weyl::{CurveRecord, WeylAlgebra};

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("cannot parse {path}: {source}")]
    Parse { path: String, source: serde_json::Error },
    #[error("orbit {index} ('{id}'): {message}")]
    Orbit { index: usize, id: String, message: String },
    #[error("curve record {index}: {message}")]
    Curve { index: usize, message: String },
    #[error("--gradings expects {want} entries, got {got}")]
    GradingOverride { want: usize, got: usize },
}

// ---------------------------------------------------------------------------
// Raw schema
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RawOrbit {
    pub id: String,
    pub grading: u8,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu_cz: Option<i64>,
    #[serde(default = "one")]
    pub multiplicity: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sort_key: Option<i64>,
}

fn one() -> u64 {
    1
}

/// Signed counts may be written as one integer or as a list of signs.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RawCount {
    Total(i64),
    Signs(Vec<i64>),
}

impl RawCount {
    fn total(&self) -> i64 {
        match self {
            RawCount::Total(v) => *v,
            RawCount::Signs(s) => s.iter().sum(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RawCurve {
    pub genus: u32,
    pub pos: Vec<String>,
    pub neg: Vec<String>,
    #[serde(default)]
    pub homology: Vec<i64>,
    pub count: RawCount,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct RawFlags {
    #[serde(default)]
    pub geometry_consistent: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RawDataset {
    pub n: u32,
    pub h2_rank: usize,
    pub orbits: Vec<RawOrbit>,
    pub curves: Vec<RawCurve>,
    #[serde(default)]
    pub flags: RawFlags,
}

// ---------------------------------------------------------------------------
// Validated dataset
// ---------------------------------------------------------------------------

/// A validated dataset. Orbits are sorted in the declared total order, and
/// curve tuples reference them by rank in that order.
#[derive(Clone, Debug)]
pub struct Dataset {
    pub n: u32,
    pub h2_rank: usize,
    pub orbits: Vec<OrbitLabel>,
    pub curves: Vec<CurveRecord>,
    pub geometry_consistent: bool,
}

impl Dataset {
    pub fn load(path: &Path) -> Result<Dataset, DatasetError> {
        Self::load_with_gradings(path, None)
    }

    /// Loads a dataset, optionally overriding the orbit gradings (by
    /// declaration order) before validation.
    pub fn load_with_gradings(
        path: &Path,
        gradings: Option<&[Z2]>,
    ) -> Result<Dataset, DatasetError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| DatasetError::Io { path: path.display().to_string(), source })?;
        let raw: RawDataset = serde_json::from_str(&text)
            .map_err(|source| DatasetError::Parse { path: path.display().to_string(), source })?;
        Dataset::from_raw(raw, gradings)
    }

    pub fn from_raw(mut raw: RawDataset, gradings: Option<&[Z2]>) -> Result<Dataset, DatasetError> {
        if let Some(over) = gradings {
            if over.len() != raw.orbits.len() {
                return Err(DatasetError::GradingOverride {
                    want: raw.orbits.len(),
                    got: over.len(),
                });
            }
            for (orbit, &g) in raw.orbits.iter_mut().zip(over) {
                orbit.grading = g.0;
                orbit.mu_cz = None; // an override supersedes any declared index
            }
        }

        // Validate orbits in declaration order.
        let mut labels = Vec::new();
        let mut ids = BTreeMap::new();
        for (index, o) in raw.orbits.iter().enumerate() {
            let fail =
                |message: String| DatasetError::Orbit { index, id: o.id.clone(), message };
            if o.grading > 1 {
                return Err(fail("grading must be 0 or 1".into()));
            }
            if o.multiplicity == 0 {
                return Err(fail("multiplicity must be at least 1".into()));
            }
            if ids.insert(o.id.clone(), index).is_some() {
                return Err(fail("duplicate orbit id".into()));
            }
            let label = OrbitLabel {
                id: o.id.clone(),
                grading: Z2(o.grading),
                mu_cz: o.mu_cz,
                multiplicity: o.multiplicity,
                sort_key: o.sort_key.unwrap_or(index as i64),
            };
            if !label.grading_consistent(raw.n) {
                return Err(fail(format!(
                    "grading {} inconsistent with mu_cz {} at n = {}",
                    o.grading,
                    o.mu_cz.unwrap_or(0),
                    raw.n
                )));
            }
            labels.push(label);
        }

        // Sort into the declared total order; keys must be distinct.
        let mut order: Vec<usize> = (0..labels.len()).collect();
        order.sort_by_key(|&i| labels[i].sort_key);
        for pair in order.windows(2) {
            if labels[pair[0]].sort_key == labels[pair[1]].sort_key {
                return Err(DatasetError::Orbit {
                    index: pair[1],
                    id: labels[pair[1]].id.clone(),
                    message: "duplicate sort_key".into(),
                });
            }
        }
        let orbits: Vec<OrbitLabel> = order.iter().map(|&i| labels[i].clone()).collect();
        let rank_of: BTreeMap<&str, usize> =
            orbits.iter().enumerate().map(|(r, o)| (o.id.as_str(), r)).collect();

        // Resolve and validate curves.
        let mut curves = Vec::new();
        for (index, c) in raw.curves.iter().enumerate() {
            let fail = |message: String| DatasetError::Curve { index, message };
            let resolve = |ids: &[String]| -> Result<Vec<usize>, DatasetError> {
                ids.iter()
                    .map(|id| {
                        rank_of
                            .get(id.as_str())
                            .copied()
                            .ok_or_else(|| fail(format!("unknown orbit id '{id}'")))
                    })
                    .collect()
            };
            if c.pos.is_empty() {
                return Err(fail("a curve needs at least one positive end".into()));
            }
            let pos = resolve(&c.pos)?;
            let neg = resolve(&c.neg)?;
            if c.homology.len() != raw.h2_rank {
                return Err(fail(format!(
                    "homology vector has length {}, expected {}",
                    c.homology.len(),
                    raw.h2_rank
                )));
            }
            let total =
                pos.iter().chain(neg.iter()).fold(Z2::ZERO, |acc, &r| acc + orbits[r].grading);
            if total != Z2::ONE {
                return Err(fail("not rigid: total grading is even".into()));
            }
            for (side, tuple) in [("pos", &pos), ("neg", &neg)] {
                let mut sorted = tuple.to_vec();
                sorted.sort_unstable();
                for w in sorted.windows(2) {
                    if w[0] == w[1] && orbits[w[0]].grading.is_odd() {
                        return Err(fail(format!(
                            "{side} tuple repeats the odd orbit '{}'; its monomial vanishes identically",
                            orbits[w[0]].id
                        )));
                    }
                }
            }
            curves.push(CurveRecord {
                genus: c.genus,
                pos,
                neg,
                homology: c.homology.clone(),
                count: c.count.total(),
            });
        }

        Ok(Dataset {
            n: raw.n,
            h2_rank: raw.h2_rank,
            orbits,
            curves,
            geometry_consistent: raw.flags.geometry_consistent,
        })
    }

    pub fn algebra(&self) -> WeylAlgebra {
        WeylAlgebra::new(&self.orbits, self.h2_rank)
    }

    /// Random parity-valid dataset with unit multiplicities, used by the
    /// verification sweeps. Orbits overlap heavily across records so that
    /// gluings are plentiful.
    pub fn random(rng: &mut ChaCha8Rng, max_orbits: usize, max_curves: usize) -> Dataset {
        let n_orbits = rng.gen_range(2..=max_orbits.max(2));
        let orbits: Vec<OrbitLabel> = (0..n_orbits)
            .map(|i| OrbitLabel {
                id: format!("g{i}"),
                grading: Z2::new(rng.gen_range(0..=1i64)),
                mu_cz: None,
                multiplicity: 1,
                sort_key: i as i64,
            })
            .collect();
        let h2_rank = rng.gen_range(0..=2);
        let n_curves = rng.gen_range(1..=max_curves.max(1));
        let mut curves = Vec::new();
        'curve: for _ in 0..n_curves {
            for _attempt in 0..60 {
                let kp = rng.gen_range(1..=3usize);
                let km = rng.gen_range(0..=3usize);
                let pos: Vec<usize> = (0..kp).map(|_| rng.gen_range(0..n_orbits)).collect();
                let neg: Vec<usize> = (0..km).map(|_| rng.gen_range(0..n_orbits)).collect();
                let total =
                    pos.iter().chain(neg.iter()).fold(Z2::ZERO, |acc, &r| acc + orbits[r].grading);
                if total != Z2::ONE {
                    continue;
                }
                let odd_repeat = |tuple: &[usize]| {
                    let mut s = tuple.to_vec();
                    s.sort_unstable();
                    s.windows(2).any(|w| w[0] == w[1] && orbits[w[0]].grading.is_odd())
                };
                if odd_repeat(&pos) || odd_repeat(&neg) {
                    continue;
                }
                let homology: Vec<i64> = (0..h2_rank).map(|_| rng.gen_range(-1..=1)).collect();
                let count = loop {
                    let c = rng.gen_range(-3..=3i64);
                    if c != 0 {
                        break c;
                    }
                };
                curves.push(CurveRecord { genus: rng.gen_range(0..=2), pos, neg, homology, count });
                continue 'curve;
            }
        }
        Dataset { n: rng.gen_range(2..=4), h2_rank, orbits, curves, geometry_consistent: false }
    }

    /// Same dataset with freshly shuffled sort keys: the total order on
    /// orbits changes, the content does not.
    pub fn with_shuffled_order(&self, rng: &mut ChaCha8Rng) -> Dataset {
        let count = self.orbits.len();
        let mut keys: Vec<i64> = (0..count as i64).collect();
        for i in (1..count).rev() {
            let j = rng.gen_range(0..=i);
            keys.swap(i, j);
        }
        // Relabel, then re-sort into the new order and remap curve ranks.
        let mut relabeled = self.orbits.clone();
        for (orbit, &k) in relabeled.iter_mut().zip(&keys) {
            orbit.sort_key = k;
        }
        let mut order: Vec<usize> = (0..count).collect();
        order.sort_by_key(|&i| relabeled[i].sort_key);
        let mut new_rank = vec![0usize; count];
        for (new, &old) in order.iter().enumerate() {
            new_rank[old] = new;
        }
        Dataset {
            n: self.n,
            h2_rank: self.h2_rank,
            orbits: order.iter().map(|&i| relabeled[i].clone()).collect(),
            curves: self
                .curves
                .iter()
                .map(|c| CurveRecord {
                    genus: c.genus,
                    pos: c.pos.iter().map(|&r| new_rank[r]).collect(),
                    neg: c.neg.iter().map(|&r| new_rank[r]).collect(),
                    homology: c.homology.clone(),
                    count: c.count,
                })
                .collect(),
            geometry_consistent: self.geometry_consistent,
        }
    }
}

/// Parses a `--gradings` style comma list such as `1,0,1,1`.
pub fn parse_gradings(text: &str) -> Result<Vec<Z2>, String> {
    text.split(',')
        .map(|part| {
            part.trim()
                .parse::<i64>()
                .map(Z2::new)
                .map_err(|_| format!("invalid grading entry '{part}'"))
        })
        .collect()
}
