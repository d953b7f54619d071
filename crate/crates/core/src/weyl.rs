//! The graded Weyl super-algebra: formal series in `p` generators over
//! polynomials in `q` generators, a genus-counting variable `h`, and group
//! ring elements `e^A`, with
//! `p_g q_g - (-1)^{|g|} q_g p_g = h / m(g)` and graded commutativity
//! everywhere else. Elements are kept in normal form: `q` word before `p`
//! word, each word sorted ascending in the declared orbit order.

use std::collections::BTreeMap;

use rand::Rng;
use serde_json::json;
use thiserror::Error;

use crate::scalar::Scalar;
use crate::sign::{Sign, Z2};
use crate::tuples::OrbitLabel;

#[derive(Debug, Error, PartialEq)]
pub enum WeylError {
    #[error("element is not homogeneous")]
    NotHomogeneous,
    #[error("curve record {index} is not rigid: total grading is even")]
    NotRigid { index: usize },
    #[error("curve record {index} repeats the odd orbit '{id}' within one tuple; its monomial vanishes identically")]
    OddRepeat { index: usize, id: String },
    #[error("record {0}: homology vector has the wrong length")]
    HomologyLength(usize),
    #[error("element has generators of kind p; expected a q-polynomial")]
    NotQPolynomial,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GenKind {
    Q,
    P,
}

/// One formal generator: kind and orbit, the latter addressed by its rank in
/// the algebra's sort order.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Generator {
    pub kind: GenKind,
    pub orbit: usize,
}

impl Generator {
    pub fn q(orbit: usize) -> Generator {
        Generator { kind: GenKind::Q, orbit }
    }
    pub fn p(orbit: usize) -> Generator {
        Generator { kind: GenKind::P, orbit }
    }
    fn order_key(&self) -> (u8, usize) {
        (
            match self.kind {
                GenKind::Q => 0,
                GenKind::P => 1,
            },
            self.orbit,
        )
    }
}

/// Normal-form monomial key: sorted generator words, the `h` exponent, and
/// the homology class. Coefficients live in the term map.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct MonomialKey {
    pub q_word: Vec<u16>,
    pub p_word: Vec<u16>,
    pub hbar: i32,
    pub homology: Vec<i64>,
}

/// A finite sum of normal-form monomials with nonzero coefficients, iterated
/// in lexicographic key order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeylElement<S> {
    pub terms: BTreeMap<MonomialKey, S>,
}

impl<S: Scalar> WeylElement<S> {
    pub fn zero() -> Self {
        WeylElement { terms: BTreeMap::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, v) in &other.terms {
            accumulate(&mut out.terms, k.clone(), v.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-S::one()))
    }

    pub fn scale(&self, by: &S) -> Self {
        if by.is_zero() {
            return WeylElement::zero();
        }
        WeylElement {
            terms: self.terms.iter().map(|(k, v)| (k.clone(), v.clone() * by.clone())).collect(),
        }
    }

    pub fn coefficient(&self, key: &MonomialKey) -> S {
        self.terms.get(key).cloned().unwrap_or_else(S::zero)
    }
}

fn accumulate<S: Scalar>(terms: &mut BTreeMap<MonomialKey, S>, key: MonomialKey, value: S) {
    if value.is_zero() {
        return;
    }
    match terms.entry(key) {
        std::collections::btree_map::Entry::Vacant(v) => {
            v.insert(value);
        }
        std::collections::btree_map::Entry::Occupied(mut o) => {
            let sum = o.get().clone() + value;
            if sum.is_zero() {
                o.remove();
            } else {
                *o.get_mut() = sum;
            }
        }
    }
}

/// Whether the generating function carries an inverse-multiplicity weight per
/// negative end. The displayed formula carries none; the weighted mode is
/// provided for experimentation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Prefactor {
    #[default]
    None,
    InvMNeg,
}

/// Curve input for the generating function: genus, ordered end tuples given
/// by orbit ranks, a homology class, and the signed count.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurveRecord {
    pub genus: u32,
    pub pos: Vec<usize>,
    pub neg: Vec<usize>,
    pub homology: Vec<i64>,
    pub count: i64,
}

/// The algebra context: orbit identities, gradings, and multiplicities in the
/// declared total order, plus the rank of the homology lattice.
#[derive(Clone, Debug)]
pub struct WeylAlgebra {
    pub ids: Vec<String>,
    pub gradings: Vec<Z2>,
    pub multiplicities: Vec<u64>,
    pub h2_rank: usize,
}

impl WeylAlgebra {
    /// Builds the context from orbit labels already sorted in the total order.
    pub fn new(orbits: &[OrbitLabel], h2_rank: usize) -> Self {
        WeylAlgebra {
            ids: orbits.iter().map(|o| o.id.clone()).collect(),
            gradings: orbits.iter().map(|o| o.grading).collect(),
            multiplicities: orbits.iter().map(|o| o.multiplicity).collect(),
            h2_rank,
        }
    }

    pub fn orbit_count(&self) -> usize {
        self.ids.len()
    }

    pub fn grading(&self, orbit: usize) -> Z2 {
        self.gradings[orbit]
    }

    pub fn one<S: Scalar>(&self) -> WeylElement<S> {
        self.monomial(&[], S::one(), 0, vec![0; self.h2_rank])
    }

    /// Normal-orders an interleaved generator word times a coefficient.
    pub fn monomial<S: Scalar>(
        &self,
        word: &[Generator],
        coeff: S,
        hbar: i32,
        homology: Vec<i64>,
    ) -> WeylElement<S> {
        let mut out = WeylElement::zero();
        self.normalize_into(word.to_vec(), coeff, hbar, homology, true, &mut out.terms);
        out
    }

    /// The associated graded product: same rewriting with the contraction
    /// branch switched off, so matched pairs commute with the Koszul sign
    /// only.
    pub fn monomial_contraction_free<S: Scalar>(
        &self,
        word: &[Generator],
        coeff: S,
        hbar: i32,
        homology: Vec<i64>,
    ) -> WeylElement<S> {
        let mut out = WeylElement::zero();
        self.normalize_into(word.to_vec(), coeff, hbar, homology, false, &mut out.terms);
        out
    }

    fn normalize_into<S: Scalar>(
        &self,
        mut word: Vec<Generator>,
        mut coeff: S,
        hbar: i32,
        homology: Vec<i64>,
        contractions: bool,
        out: &mut BTreeMap<MonomialKey, S>,
    ) {
        if coeff.is_zero() {
            return;
        }
        'scan: loop {
            for i in 0..word.len().saturating_sub(1) {
                let (a, b) = (word[i], word[i + 1]);
                if a.order_key() <= b.order_key() {
                    continue;
                }
                if a.kind == GenKind::P && b.kind == GenKind::Q && a.orbit == b.orbit {
                    // p_g q_g -> (-1)^{|g|} q_g p_g + h / m(g)
                    if contractions {
                        let mut contracted = word.clone();
                        contracted.remove(i + 1);
                        contracted.remove(i);
                        let weight =
                            coeff.clone() / S::from_int(self.multiplicities[a.orbit] as i64);
                        self.normalize_into(
                            contracted,
                            weight,
                            hbar + 1,
                            homology.clone(),
                            contractions,
                            out,
                        );
                    }
                    if self.gradings[a.orbit].is_odd() {
                        coeff = -coeff;
                    }
                    word.swap(i, i + 1);
                    continue 'scan;
                }
                // Distinct symbols: transpose at the Koszul cost.
                if Sign::koszul(self.gradings[a.orbit], self.gradings[b.orbit]).is_minus() {
                    coeff = -coeff;
                }
                word.swap(i, i + 1);
                continue 'scan;
            }
            break;
        }
        // Odd generators square to zero; duplicates are adjacent after sorting.
        for pair in word.windows(2) {
            if pair[0] == pair[1] && self.gradings[pair[0].orbit].is_odd() {
                return;
            }
        }
        let split = word.iter().position(|g| g.kind == GenKind::P).unwrap_or(word.len());
        let key = MonomialKey {
            q_word: word[..split].iter().map(|g| g.orbit as u16).collect(),
            p_word: word[split..].iter().map(|g| g.orbit as u16).collect(),
            hbar,
            homology,
        };
        accumulate(out, key, coeff);
    }

    /// Normal ordering with a randomized rewrite strategy: at every step one
    /// of the currently violating adjacent pairs is fixed, chosen by the rng.
    /// Confluence of the rewriting makes the result independent of the
    /// strategy.
    pub fn monomial_with_strategy<S: Scalar, R: Rng>(
        &self,
        word: &[Generator],
        coeff: S,
        hbar: i32,
        homology: Vec<i64>,
        rng: &mut R,
    ) -> WeylElement<S> {
        let mut out = WeylElement::zero();
        self.normalize_randomized(word.to_vec(), coeff, hbar, homology, rng, &mut out.terms);
        out
    }

    fn normalize_randomized<S: Scalar, R: Rng>(
        &self,
        mut word: Vec<Generator>,
        mut coeff: S,
        hbar: i32,
        homology: Vec<i64>,
        rng: &mut R,
        out: &mut BTreeMap<MonomialKey, S>,
    ) {
        if coeff.is_zero() {
            return;
        }
        loop {
            let violations: Vec<usize> = (0..word.len().saturating_sub(1))
                .filter(|&i| word[i].order_key() > word[i + 1].order_key())
                .collect();
            if violations.is_empty() {
                break;
            }
            let i = violations[rng.gen_range(0..violations.len())];
            let (a, b) = (word[i], word[i + 1]);
            if a.kind == GenKind::P && b.kind == GenKind::Q && a.orbit == b.orbit {
                let mut contracted = word.clone();
                contracted.remove(i + 1);
                contracted.remove(i);
                let weight = coeff.clone() / S::from_int(self.multiplicities[a.orbit] as i64);
                self.normalize_randomized(contracted, weight, hbar + 1, homology.clone(), rng, out);
                if self.gradings[a.orbit].is_odd() {
                    coeff = -coeff;
                }
                word.swap(i, i + 1);
                continue;
            }
            if Sign::koszul(self.gradings[a.orbit], self.gradings[b.orbit]).is_minus() {
                coeff = -coeff;
            }
            word.swap(i, i + 1);
        }
        for pair in word.windows(2) {
            if pair[0] == pair[1] && self.gradings[pair[0].orbit].is_odd() {
                return;
            }
        }
        let split = word.iter().position(|g| g.kind == GenKind::P).unwrap_or(word.len());
        let key = MonomialKey {
            q_word: word[..split].iter().map(|g| g.orbit as u16).collect(),
            p_word: word[split..].iter().map(|g| g.orbit as u16).collect(),
            hbar,
            homology,
        };
        accumulate(out, key, coeff);
    }

    fn key_word(&self, key: &MonomialKey) -> Vec<Generator> {
        key.q_word
            .iter()
            .map(|&r| Generator::q(r as usize))
            .chain(key.p_word.iter().map(|&r| Generator::p(r as usize)))
            .collect()
    }

    /// Bilinear product: concatenate words, add `h` exponents and homology
    /// classes, normal-order.
    pub fn mul<S: Scalar>(&self, f: &WeylElement<S>, g: &WeylElement<S>) -> WeylElement<S> {
        self.mul_impl(f, g, true)
    }

    /// The associated graded (contraction-free) product.
    pub fn mul_free<S: Scalar>(&self, f: &WeylElement<S>, g: &WeylElement<S>) -> WeylElement<S> {
        self.mul_impl(f, g, false)
    }

    fn mul_impl<S: Scalar>(
        &self,
        f: &WeylElement<S>,
        g: &WeylElement<S>,
        contractions: bool,
    ) -> WeylElement<S> {
        let mut out = WeylElement::zero();
        for (kf, cf) in &f.terms {
            for (kg, cg) in &g.terms {
                let mut word = self.key_word(kf);
                word.extend(self.key_word(kg));
                let homology: Vec<i64> =
                    kf.homology.iter().zip(&kg.homology).map(|(a, b)| a + b).collect();
                self.normalize_into(
                    word,
                    cf.clone() * cg.clone(),
                    kf.hbar + kg.hbar,
                    homology,
                    contractions,
                    &mut out.terms,
                );
            }
        }
        out
    }

    /// Total Z/2 grading of a monomial: generator gradings summed; `h` and
    /// `e^A` are even.
    pub fn monomial_grade(&self, key: &MonomialKey) -> Z2 {
        key.q_word
            .iter()
            .chain(key.p_word.iter())
            .fold(Z2::ZERO, |acc, &r| acc + self.gradings[r as usize])
    }

    /// Grading of a homogeneous element; zero counts as even.
    pub fn grade<S: Scalar>(&self, f: &WeylElement<S>) -> Result<Z2, WeylError> {
        let mut grade = None;
        for key in f.terms.keys() {
            let g = self.monomial_grade(key);
            match grade {
                None => grade = Some(g),
                Some(prev) if prev != g => return Err(WeylError::NotHomogeneous),
                _ => {}
            }
        }
        Ok(grade.unwrap_or(Z2::ZERO))
    }

    /// Super-commutator `f g - (-1)^{|f||g|} g f` of homogeneous elements.
    pub fn super_commutator<S: Scalar>(
        &self,
        f: &WeylElement<S>,
        g: &WeylElement<S>,
    ) -> Result<WeylElement<S>, WeylError> {
        let sign = Sign::koszul(self.grade(f)?, self.grade(g)?);
        let fg = self.mul(f, g);
        let gf = self.mul(g, f).scale(&sign.to_scalar::<S>());
        Ok(fg.sub(&gf))
    }

    /// `D f = [H, f]`, extended term by term so `f` need not be homogeneous.
    pub fn differential<S: Scalar>(
        &self,
        h: &WeylElement<S>,
        f: &WeylElement<S>,
    ) -> Result<WeylElement<S>, WeylError> {
        let h_grade = self.grade(h)?;
        let mut out = WeylElement::zero();
        for (key, coeff) in &f.terms {
            let sign = Sign::koszul(h_grade, self.monomial_grade(key));
            let single = WeylElement { terms: BTreeMap::from([(key.clone(), coeff.clone())]) };
            let part =
                self.mul(h, &single).sub(&self.mul(&single, h).scale(&sign.to_scalar::<S>()));
            out = out.add(&part);
        }
        Ok(out)
    }

    fn validate_record(&self, index: usize, rec: &CurveRecord) -> Result<(), WeylError> {
        if rec.homology.len() != self.h2_rank {
            return Err(WeylError::HomologyLength(index));
        }
        let total = rec
            .pos
            .iter()
            .chain(rec.neg.iter())
            .fold(Z2::ZERO, |acc, &r| acc + self.gradings[r]);
        if total != Z2::ONE {
            return Err(WeylError::NotRigid { index });
        }
        for tuple in [&rec.pos, &rec.neg] {
            let mut seen = tuple.to_vec();
            seen.sort_unstable();
            for pair in seen.windows(2) {
                if pair[0] == pair[1] && self.gradings[pair[0]].is_odd() {
                    return Err(WeylError::OddRepeat { index, id: self.ids[pair[0]].clone() });
                }
            }
        }
        Ok(())
    }

    /// The generating function of the signed counts:
    /// `sum count(u) q_{neg} p_{reversed pos} e^A h^{g-1}`.
    pub fn hamiltonian<S: Scalar>(
        &self,
        curves: &[CurveRecord],
        prefactor: Prefactor,
    ) -> Result<WeylElement<S>, WeylError> {
        let mut out = WeylElement::zero();
        for (index, rec) in curves.iter().enumerate() {
            self.validate_record(index, rec)?;
            let mut coeff = S::from_int(rec.count);
            if prefactor == Prefactor::InvMNeg {
                for &r in &rec.neg {
                    coeff = coeff / S::from_int(self.multiplicities[r] as i64);
                }
            }
            let mut word: Vec<Generator> = rec.neg.iter().map(|&r| Generator::q(r)).collect();
            word.extend(rec.pos.iter().rev().map(|&r| Generator::p(r)));
            self.normalize_into(
                word,
                coeff,
                rec.genus as i32 - 1,
                rec.homology.clone(),
                true,
                &mut out.terms,
            );
        }
        Ok(out)
    }

    /// `H * H` in normal form.
    pub fn h_square<S: Scalar>(
        &self,
        curves: &[CurveRecord],
        prefactor: Prefactor,
    ) -> Result<WeylElement<S>, WeylError> {
        let h = self.hamiltonian::<S>(curves, prefactor)?;
        Ok(self.mul(&h, &h))
    }

    /// The degree-minus-one differential on the free graded-commutative
    /// algebra of `q` generators: on a generator,
    /// `d q_g = sum (count / m(neg)) e^A q_{neg,1} ... q_{neg,k}` over the
    /// genus-zero records with the single positive end `g`. With
    /// `reversed_words` the negative word is written back to front.
    pub fn contact_d<S: Scalar>(
        &self,
        curves: &[CurveRecord],
        orbit: usize,
        reversed_words: bool,
    ) -> WeylElement<S> {
        let mut out = WeylElement::zero();
        for rec in curves {
            if rec.genus != 0 || rec.pos.len() != 1 || rec.pos[0] != orbit {
                continue;
            }
            let mut coeff = S::from_int(rec.count);
            for &r in &rec.neg {
                coeff = coeff / S::from_int(self.multiplicities[r] as i64);
            }
            let mut word: Vec<Generator> = rec.neg.iter().map(|&r| Generator::q(r)).collect();
            if reversed_words {
                word.reverse();
            }
            self.normalize_into(word, coeff, 0, rec.homology.clone(), true, &mut out.terms);
        }
        out
    }

    /// Extends `contact_d` to `q` polynomials as an odd derivation.
    pub fn contact_d_apply<S: Scalar>(
        &self,
        curves: &[CurveRecord],
        f: &WeylElement<S>,
        reversed_words: bool,
    ) -> Result<WeylElement<S>, WeylError> {
        let mut out = WeylElement::zero();
        for (key, coeff) in &f.terms {
            if !key.p_word.is_empty() {
                return Err(WeylError::NotQPolynomial);
            }
            for i in 0..key.q_word.len() {
                let mut sign = Sign::Plus;
                for &r in &key.q_word[..i] {
                    sign = sign * Sign::koszul(Z2::ONE, self.gradings[r as usize]);
                }
                let dg = self.contact_d::<S>(curves, key.q_word[i] as usize, reversed_words);
                let prefix = self.q_monomial::<S>(&key.q_word[..i]);
                let suffix = self.q_monomial::<S>(&key.q_word[i + 1..]);
                let mut piece = self.mul(&prefix, &self.mul(&dg, &suffix));
                piece = piece.scale(&(coeff.clone() * sign.to_scalar::<S>()));
                // Carry the ambient monomial's h exponent and homology class.
                let shifted: BTreeMap<MonomialKey, S> = piece
                    .terms
                    .into_iter()
                    .map(|(mut k, v)| {
                        k.hbar += key.hbar;
                        for (slot, add) in k.homology.iter_mut().zip(&key.homology) {
                            *slot += add;
                        }
                        (k, v)
                    })
                    .collect();
                out = out.add(&WeylElement { terms: shifted });
            }
        }
        Ok(out)
    }

    fn q_monomial<S: Scalar>(&self, ranks: &[u16]) -> WeylElement<S> {
        let word: Vec<Generator> = ranks.iter().map(|&r| Generator::q(r as usize)).collect();
        self.monomial(&word, S::one(), 0, vec![0; self.h2_rank])
    }

    /// The sign automorphism `p_g, q_g -> eps(g) p_g, eps(g) q_g`.
    pub fn capping_change<S: Scalar>(&self, eps: &[Sign], f: &WeylElement<S>) -> WeylElement<S> {
        assert_eq!(eps.len(), self.orbit_count(), "one sign per orbit");
        let mut out = WeylElement::zero();
        for (key, coeff) in &f.terms {
            let mut sign = Sign::Plus;
            for &r in key.q_word.iter().chain(key.p_word.iter()) {
                sign = sign * eps[r as usize];
            }
            accumulate(&mut out.terms, key.clone(), coeff.clone() * sign.to_scalar::<S>());
        }
        out
    }

    /// Koszul sign of reversing the `p` word: the stored ascending word
    /// against the displayed descending one.
    pub fn p_reversal_sign(&self, key: &MonomialKey) -> Sign {
        let mut parity = 0i64;
        for i in 0..key.p_word.len() {
            for j in i + 1..key.p_word.len() {
                let gi = self.gradings[key.p_word[i] as usize];
                let gj = self.gradings[key.p_word[j] as usize];
                parity += i64::from((gi * gj).0);
            }
        }
        Sign::from_parity(parity)
    }

    /// Coefficient in the displayed basis `q_{ascending} p_{descending}`.
    pub fn printed_coefficient<S: Scalar>(&self, f: &WeylElement<S>, key: &MonomialKey) -> S {
        f.coefficient(key) * self.p_reversal_sign(key).to_scalar::<S>()
    }

    /// Text rendering in the displayed convention: `q` ascending, `p`
    /// descending, coefficient adjusted by the reversal sign.
    pub fn render<S: Scalar>(&self, f: &WeylElement<S>) -> String {
        if f.is_zero() {
            return "0".into();
        }
        let mut parts = Vec::new();
        for key in f.terms.keys() {
            let coeff = self.printed_coefficient(f, key);
            let mut factors = Vec::new();
            for &r in &key.q_word {
                factors.push(format!("q_{}", self.ids[r as usize]));
            }
            for &r in key.p_word.iter().rev() {
                factors.push(format!("p_{}", self.ids[r as usize]));
            }
            if key.hbar != 0 {
                factors.push(format!("h^{}", key.hbar));
            }
            if key.homology.iter().any(|&a| a != 0) {
                let a: Vec<String> = key.homology.iter().map(|v| v.to_string()).collect();
                factors.push(format!("e^({})", a.join(",")));
            }
            let body = if factors.is_empty() { "1".to_string() } else { factors.join(" ") };
            parts.push(format!("({coeff}) {body}"));
        }
        parts.join(" + ")
    }

    /// JSON rendering of the stored normal form, coefficients as exact
    /// `num/den` strings.
    pub fn to_json<S: Scalar>(&self, f: &WeylElement<S>) -> serde_json::Value {
        let terms: Vec<serde_json::Value> = f
            .terms
            .iter()
            .map(|(key, coeff)| {
                json!({
                    "q": key.q_word.iter().map(|&r| self.ids[r as usize].clone()).collect::<Vec<_>>(),
                    "p": key.p_word.iter().map(|&r| self.ids[r as usize].clone()).collect::<Vec<_>>(),
                    "hbar": key.hbar,
                    "A": key.homology,
                    "coeff": coeff.to_string(),
                })
            })
            .collect();
        serde_json::Value::Array(terms)
    }

    /// Random normal-form element, for property sweeps.
    pub fn random_element<S: Scalar, R: Rng>(
        &self,
        rng: &mut R,
        max_terms: usize,
        max_len: usize,
    ) -> WeylElement<S> {
        let mut out = WeylElement::zero();
        for _ in 0..rng.gen_range(1..=max_terms) {
            let len = rng.gen_range(0..=max_len);
            let word: Vec<Generator> = (0..len)
                .map(|_| {
                    let orbit = rng.gen_range(0..self.orbit_count());
                    if rng.gen_bool(0.5) {
                        Generator::q(orbit)
                    } else {
                        Generator::p(orbit)
                    }
                })
                .collect();
            let coeff = S::from_int(rng.gen_range(-3..=3i64));
            let hbar = rng.gen_range(-1..=1);
            let homology: Vec<i64> = (0..self.h2_rank).map(|_| rng.gen_range(-1..=1)).collect();
            out = out.add(&self.monomial(&word, coeff, hbar, homology));
        }
        out
    }

    /// Random homogeneous element of the requested grading.
    pub fn random_homogeneous<S: Scalar, R: Rng>(
        &self,
        rng: &mut R,
        grade: Z2,
        max_terms: usize,
        max_len: usize,
    ) -> WeylElement<S> {
        for _ in 0..200 {
            let candidate = self.random_element::<S, R>(rng, max_terms, max_len);
            let filtered: BTreeMap<MonomialKey, S> = candidate
                .terms
                .into_iter()
                .filter(|(k, _)| self.monomial_grade(k) == grade)
                .collect();
            if !filtered.is_empty() {
                return WeylElement { terms: filtered };
            }
        }
        // Fall back to a single generator of the right parity, if any.
        if let Some(orbit) = (0..self.orbit_count()).find(|&r| self.gradings[r] == grade) {
            return self.monomial(&[Generator::q(orbit)], S::one(), 0, vec![0; self.h2_rank]);
        }
        WeylElement::zero()
    }
}
