//! Finite-dimensional determinant-line calculus over an exact scalar.
//!
//! For a linear map `phi` the determinant line is
//! `Λ^top ker(phi) ⊗ Λ^top (coker phi)^*`. Elements are stored with explicit
//! vector lists; dual factors are recorded as vectors whose *classes* are
//! dualized, wedged in list order. All identifications below are the
//! basis-level maps used when transporting orientations of such lines:
//! restriction to a subspace of the target, stabilization of the domain, and
//! disjoint union, each natural up to a positive constant.

use rand::Rng;
use thiserror::Error;

use crate::linalg::{
    self, cokernel_basis, coords_in_basis, greedy_complement, preimage_basis, solve_particular,
    wedge_coords_det, LinAlgError, Mat,
};
use crate::scalar::Scalar;
use crate::sign::Sign;

#[derive(Debug, Error)]
pub enum DetError {
    #[error("image plus subspace does not fill the target space")]
    SubspaceTooSmall,
    #[error("stabilized map is not surjective")]
    NotSurjective,
    #[error("supplied vectors are not a basis: {0}")]
    NotABasis(String),
    #[error("elements are not comparable: {0}")]
    Incomparable(String),
    #[error("zero element has no orientation")]
    ZeroRelation,
    #[error(transparent)]
    LinAlg(#[from] LinAlgError),
}

/// Scalar multiple of a wedge of kernel vectors tensored with a wedge of
/// dualized cokernel representatives. `coker_dual_wedge = [x1, x2, ...]`
/// stands for `x1^* ∧ x2^* ∧ ...`.
#[derive(Clone, Debug, PartialEq)]
pub struct DetElement<S> {
    pub scalar: S,
    pub kernel_wedge: Vec<Vec<S>>,
    pub coker_dual_wedge: Vec<Vec<S>>,
}

/// An orientation: the sign of an element against a reference frame.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Orientation(pub Sign);

/// The determinant line of a concrete matrix, with its deterministic
/// reference bases.
#[derive(Clone, Debug)]
pub struct DetSpace<S> {
    pub op: Mat<S>,
    pub kernel: Vec<Vec<S>>,
    pub cokernel: Vec<Vec<S>>,
}

impl<S: Scalar> DetSpace<S> {
    pub fn new(op: Mat<S>) -> Self {
        let kernel = op.kernel_basis();
        let cokernel = cokernel_basis(&op);
        DetSpace { op, kernel, cokernel }
    }

    /// `dim ker - dim coker`, the index of the operator in the finite model.
    pub fn index(&self) -> i64 {
        self.kernel.len() as i64 - self.cokernel.len() as i64
    }

    /// Reference generator: kernel basis wedge tensored with the dual wedge of
    /// the cokernel representatives in reversed order.
    pub fn canonical_element(&self) -> DetElement<S> {
        DetElement {
            scalar: S::one(),
            kernel_wedge: self.kernel.clone(),
            coker_dual_wedge: self.cokernel.iter().rev().cloned().collect(),
        }
    }

    /// Coordinates of the class of `w` in the cokernel reference basis.
    fn class_coords(&self, w: &[S]) -> Result<Vec<S>, DetError> {
        if self.cokernel.is_empty() {
            return Ok(Vec::new());
        }
        let aug = self.op.hcat(&Mat::from_cols(self.op.rows(), &self.cokernel));
        let sol = solve_particular(&aug, w).ok_or(DetError::Incomparable(
            "vector not expressible through image and cokernel representatives".into(),
        ))?;
        Ok(sol[self.op.cols()..].to_vec())
    }

    /// Value of an element against the reference frame
    /// `(kernel basis order, cokernel duals in stored order)`.
    pub fn value(&self, el: &DetElement<S>) -> Result<S, DetError> {
        if el.kernel_wedge.len() != self.kernel.len()
            || el.coker_dual_wedge.len() != self.cokernel.len()
        {
            return Err(DetError::Incomparable("wedge degrees do not match the line".into()));
        }
        for v in &el.kernel_wedge {
            if !self.op.apply(v).iter().all(|x| x.is_zero()) {
                return Err(DetError::Incomparable("vector not in the kernel".into()));
            }
        }
        let k = wedge_coords_det(&self.kernel, &el.kernel_wedge)?;
        let coords: Result<Vec<Vec<S>>, DetError> =
            el.coker_dual_wedge.iter().map(|w| self.class_coords(w)).collect();
        let c = Mat::from_rows(coords?)?.det();
        if c.is_zero() {
            return Err(DetError::Incomparable(
                "dual vectors do not represent a cokernel basis".into(),
            ));
        }
        Ok(el.scalar.clone() * k / c)
    }

    /// Exact factor `lambda` with `a = lambda * b`.
    pub fn ratio(&self, a: &DetElement<S>, b: &DetElement<S>) -> Result<S, DetError> {
        let vb = self.value(b)?;
        if vb.is_zero() {
            return Err(DetError::ZeroRelation);
        }
        Ok(self.value(a)? / vb)
    }

    /// Orientation of `a` relative to `b`; a zero relation is an error.
    pub fn orientation(&self, a: &DetElement<S>, b: &DetElement<S>) -> Result<Orientation, DetError> {
        let r = self.ratio(a, b)?;
        Sign::of_scalar(&r).map(Orientation).ok_or(DetError::ZeroRelation)
    }
}

// ---------------------------------------------------------------------------
// Disjoint union
// ---------------------------------------------------------------------------

/// Result of the disjoint-union identification
/// `det L ⊗ det L2 -> det(L ⊔ L2)`.
#[derive(Clone, Debug)]
pub struct DisjointUnion<S> {
    pub sign: Sign,
    pub element: DetElement<S>,
}

fn embed<S: Scalar>(v: &[S], before: usize, after: usize) -> Vec<S> {
    let mut out = vec![S::zero(); before];
    out.extend_from_slice(v);
    out.extend(std::iter::repeat(S::zero()).take(after));
    out
}

/// Basis-level disjoint union: kernels concatenate, the dual wedges
/// concatenate with the second factor first, and the whole map carries the
/// sign `(-1)^{ind(L2) * dim coker(L)}`. When both operators are surjective
/// the sign is `+1` and the map is plain wedge concatenation.
pub fn disjoint_union<S: Scalar>(
    l: &DetSpace<S>,
    l2: &DetSpace<S>,
    a: &DetElement<S>,
    b: &DetElement<S>,
) -> DisjointUnion<S> {
    let (vl, wl) = (l.op.cols(), l.op.rows());
    let (vr, wr) = (l2.op.cols(), l2.op.rows());
    let sign = Sign::from_parity(l2.index() * l.cokernel.len() as i64);
    let mut kernel_wedge: Vec<Vec<S>> =
        a.kernel_wedge.iter().map(|v| embed(v, 0, vr)).collect();
    kernel_wedge.extend(b.kernel_wedge.iter().map(|v| embed(v, vl, 0)));
    let mut coker_dual_wedge: Vec<Vec<S>> =
        b.coker_dual_wedge.iter().map(|v| embed(v, wl, 0)).collect();
    coker_dual_wedge.extend(a.coker_dual_wedge.iter().map(|v| embed(v, 0, wr)));
    DisjointUnion {
        sign,
        element: DetElement {
            scalar: a.scalar.clone() * b.scalar.clone() * sign.to_scalar::<S>(),
            kernel_wedge,
            coker_dual_wedge,
        },
    }
}

/// Transports an element of `det(L ⊔ L2)` to `det(L2 ⊔ L)` through the
/// canonical identification that swaps the two summands.
pub fn swap_transport<S: Scalar>(l: &DetSpace<S>, el: &DetElement<S>) -> DetElement<S> {
    let swap = |v: &Vec<S>, first: usize| -> Vec<S> {
        let mut out = v[first..].to_vec();
        out.extend_from_slice(&v[..first]);
        out
    };
    DetElement {
        scalar: el.scalar.clone(),
        kernel_wedge: el.kernel_wedge.iter().map(|v| swap(v, l.op.cols())).collect(),
        coker_dual_wedge: el.coker_dual_wedge.iter().map(|v| swap(v, l.op.rows())).collect(),
    }
}

/// Checks, by explicit wedge computation, that
/// `v ⊔ v2 = (-1)^{ind L * ind L2} v2 ⊔ v` under the canonical swap.
pub fn swap_disjoint_check<S: Scalar>(l: &Mat<S>, l2: &Mat<S>) -> Result<bool, DetError> {
    let sl = DetSpace::new(l.clone());
    let sl2 = DetSpace::new(l2.clone());
    let a = sl.canonical_element();
    let b = sl2.canonical_element();
    let forward = disjoint_union(&sl, &sl2, &a, &b).element;
    let backward = disjoint_union(&sl2, &sl, &b, &a).element;
    let transported = swap_transport(&sl, &forward);
    let swapped_space = DetSpace::new(l2.block_diag(l));
    let ratio = swapped_space.ratio(&transported, &backward)?;
    let expected = Sign::from_parity(sl.index() * sl2.index()).to_scalar::<S>();
    Ok(ratio == expected)
}

// ---------------------------------------------------------------------------
// Restriction to a target subspace
// ---------------------------------------------------------------------------

/// The basis-level identification
/// `det(phi) ≃ Λ^top(phi^{-1} F) ⊗ Λ^top F^*` for a target subspace `F` with
/// `im(phi) + F = W`, recorded by the pair of elements it matches up.
#[derive(Clone, Debug)]
pub struct SubspaceIso<S> {
    /// Element of `det(phi)`: kernel wedge and the dual wedge of the chosen
    /// complement representatives, reversed.
    pub input: DetElement<S>,
    /// Its image: a wedge of vectors spanning `phi^{-1}(F)` and a dual wedge
    /// of vectors of `F` in the order `phi(h_m), ..., phi(h_1), v_l, ..., v_1`.
    pub output: DetElement<S>,
}

struct IsoChoices<S> {
    kernel: Vec<Vec<S>>,
    complement: Vec<Vec<S>>,
    completion: Vec<Vec<S>>,
}

fn deterministic_choices<S: Scalar>(
    m: &Mat<S>,
    f: &[Vec<S>],
) -> Result<IsoChoices<S>, DetError> {
    let kernel = m.kernel_basis();
    let pre = preimage_basis(m, f);
    let complement = greedy_complement(&kernel, &pre);
    let images: Vec<Vec<S>> = complement.iter().map(|h| m.apply(h)).collect();
    let completion = greedy_complement(&images, f);
    Ok(IsoChoices { kernel, complement, completion })
}

fn random_unimodular<S: Scalar, R: Rng>(n: usize, rng: &mut R) -> Mat<S> {
    let mut m: Mat<S> = Mat::identity(n);
    for _ in 0..2 * n + 2 {
        if n < 2 {
            break;
        }
        let i = rng.gen_range(0..n);
        let mut j = rng.gen_range(0..n);
        while j == i {
            j = rng.gen_range(0..n);
        }
        let factor = S::from_int(rng.gen_range(-2..=2i64));
        for c in 0..n {
            let v = m.at(i, c).clone() + factor.clone() * m.at(j, c).clone();
            *m.at_mut(i, c) = v;
        }
    }
    m
}

fn recombine<S: Scalar, R: Rng>(basis: &[Vec<S>], rng: &mut R) -> Vec<Vec<S>> {
    if basis.is_empty() {
        return Vec::new();
    }
    let t = random_unimodular::<S, _>(basis.len(), rng);
    (0..basis.len())
        .map(|i| {
            let mut v = vec![S::zero(); basis[0].len()];
            for (j, b) in basis.iter().enumerate() {
                for (x, y) in v.iter_mut().zip(b.iter()) {
                    *x = x.clone() + t.at(i, j).clone() * y.clone();
                }
            }
            v
        })
        .collect()
}

fn add_random_combo<S: Scalar, R: Rng>(
    vectors: &[Vec<S>],
    extras: &[Vec<S>],
    rng: &mut R,
) -> Vec<Vec<S>> {
    vectors
        .iter()
        .map(|v| {
            let mut out = v.clone();
            for e in extras {
                let c = S::from_int(rng.gen_range(-2..=2i64));
                for (x, y) in out.iter_mut().zip(e.iter()) {
                    *x = x.clone() + c.clone() * y.clone();
                }
            }
            out
        })
        .collect()
}

fn randomized_choices<S: Scalar, R: Rng>(
    m: &Mat<S>,
    f: &[Vec<S>],
    rng: &mut R,
) -> Result<IsoChoices<S>, DetError> {
    let det = deterministic_choices(m, f)?;
    let kernel = recombine(&det.kernel, rng);
    let complement = recombine(&add_random_combo(&det.complement, &det.kernel, rng), rng);
    let images: Vec<Vec<S>> = complement.iter().map(|h| m.apply(h)).collect();
    let completion = recombine(&add_random_combo(&det.completion, &images, rng), rng);
    Ok(IsoChoices { kernel, complement, completion })
}

fn subspace_iso_from_choices<S: Scalar>(
    m: &Mat<S>,
    choices: IsoChoices<S>,
) -> SubspaceIso<S> {
    let IsoChoices { kernel, complement, completion } = choices;
    let images: Vec<Vec<S>> = complement.iter().map(|h| m.apply(h)).collect();
    let input = DetElement {
        scalar: S::one(),
        kernel_wedge: kernel.clone(),
        coker_dual_wedge: completion.iter().rev().cloned().collect(),
    };
    let mut out_kernel = kernel;
    out_kernel.extend(complement);
    let mut out_dual: Vec<Vec<S>> = images.iter().rev().cloned().collect();
    out_dual.extend(completion.iter().rev().cloned());
    let output = DetElement { scalar: S::one(), kernel_wedge: out_kernel, coker_dual_wedge: out_dual };
    SubspaceIso { input, output }
}

fn validate_subspace<S: Scalar>(m: &Mat<S>, f: &[Vec<S>]) -> Result<(), DetError> {
    for v in f {
        if v.len() != m.rows() {
            return Err(DetError::NotABasis("subspace vector has the wrong length".into()));
        }
    }
    if !f.is_empty() && Mat::from_cols(m.rows(), f).rank() != f.len() {
        return Err(DetError::NotABasis("subspace vectors are dependent".into()));
    }
    let full_rank = if f.is_empty() {
        m.rank() == m.rows()
    } else {
        m.hcat(&Mat::from_cols(m.rows(), f)).rank() == m.rows()
    };
    if !full_rank {
        return Err(DetError::SubspaceTooSmall);
    }
    Ok(())
}

/// Deterministic instance of the identification for `(m, span f)`.
pub fn subspace_iso<S: Scalar>(m: &Mat<S>, f: &[Vec<S>]) -> Result<SubspaceIso<S>, DetError> {
    validate_subspace(m, f)?;
    Ok(subspace_iso_from_choices(m, deterministic_choices(m, f)?))
}

/// Same identification built from randomized (still valid) basis choices;
/// used to exercise choice-independence.
pub fn subspace_iso_with<S: Scalar, R: Rng>(
    m: &Mat<S>,
    f: &[Vec<S>],
    rng: &mut R,
) -> Result<SubspaceIso<S>, DetError> {
    validate_subspace(m, f)?;
    Ok(subspace_iso_from_choices(m, randomized_choices(m, f, rng)?))
}

/// Value of the output side against the frame
/// `(deterministic preimage basis, the given F basis)`.
fn output_value<S: Scalar>(
    m: &Mat<S>,
    f: &[Vec<S>],
    el: &DetElement<S>,
) -> Result<S, DetError> {
    let pre = preimage_basis(m, f);
    let k = wedge_coords_det(&pre, &el.kernel_wedge)?;
    let d = if f.is_empty() {
        S::one()
    } else {
        wedge_coords_det(f, &el.coker_dual_wedge)?
    };
    if d.is_zero() {
        return Err(DetError::Incomparable("dual wedge degenerate in F".into()));
    }
    Ok(el.scalar.clone() * k / d)
}

/// Ratio of two instances of the identification for the same `(m, f)`,
/// as maps between the same pair of lines.
pub fn iso_ratio<S: Scalar>(
    m: &Mat<S>,
    f: &[Vec<S>],
    a: &SubspaceIso<S>,
    b: &SubspaceIso<S>,
) -> Result<S, DetError> {
    let space = DetSpace::new(m.clone());
    let map_a = output_value(m, f, &a.output)? / space.value(&a.input)?;
    let map_b = output_value(m, f, &b.output)? / space.value(&b.input)?;
    if map_b.is_zero() {
        return Err(DetError::ZeroRelation);
    }
    Ok(map_a / map_b)
}

/// Round trip `det(phi) -> Λ^top(phi^{-1}F) ⊗ Λ^top F^* -> det(phi)`, where
/// the way back reads the middle line as the determinant line of the
/// restriction `phi^{-1}(F) -> F` and uses the full-target instance of the
/// same identification. The composite is a self-map of `det(phi)`; the
/// returned scalar relates the output to the element the trip started from.
/// Naturality of the identification makes it positive for every valid `F`.
pub fn round_trip_scalar<S: Scalar>(m: &Mat<S>, f: &[Vec<S>]) -> Result<S, DetError> {
    let iso = subspace_iso(m, f)?;
    let pre = preimage_basis(m, f);
    // Matrix of the restriction phi : phi^{-1}(F) -> F in the chosen bases.
    let mut restricted = Mat::zeros(f.len(), pre.len());
    for (j, p) in pre.iter().enumerate() {
        let img = m.apply(p);
        let coords = if f.is_empty() {
            if !img.iter().all(|x| x.is_zero()) {
                return Err(DetError::Incomparable("preimage does not map into F".into()));
            }
            Vec::new()
        } else {
            coords_in_basis(f, &img)?
        };
        for (i, c) in coords.into_iter().enumerate() {
            *restricted.at_mut(i, j) = c;
        }
    }
    // Express the image element in coordinates.
    let omega_kernel: Result<Vec<Vec<S>>, _> =
        iso.output.kernel_wedge.iter().map(|v| coords_in_basis(&pre, v)).collect();
    let omega_dual: Result<Vec<Vec<S>>, _> = iso
        .output
        .coker_dual_wedge
        .iter()
        .map(|v| coords_in_basis(f, v))
        .collect();
    let omega = DetElement {
        scalar: iso.output.scalar.clone(),
        kernel_wedge: omega_kernel?,
        coker_dual_wedge: omega_dual?,
    };
    // Full-target instance for the restricted matrix.
    let full: Vec<Vec<S>> = (0..f.len())
        .map(|i| {
            let mut e = vec![S::zero(); f.len()];
            e[i] = S::one();
            e
        })
        .collect();
    let canonical = subspace_iso(&restricted, &full)?;
    let value = |el: &DetElement<S>| -> Result<S, DetError> {
        let std_pre: Vec<Vec<S>> = (0..pre.len())
            .map(|i| {
                let mut e = vec![S::zero(); pre.len()];
                e[i] = S::one();
                e
            })
            .collect();
        let k = wedge_coords_det(&std_pre, &el.kernel_wedge)?;
        let d = if full.is_empty() { S::one() } else { wedge_coords_det(&full, &el.coker_dual_wedge)? };
        if d.is_zero() {
            return Err(DetError::Incomparable("degenerate dual wedge".into()));
        }
        Ok(el.scalar.clone() * k / d)
    };
    let lambda = value(&omega)? / value(&canonical.output)?;
    // Pull the preimage element back to the original spaces.
    let to_domain = |v: &Vec<S>| -> Vec<S> {
        let mut out = vec![S::zero(); m.cols()];
        for (c, p) in v.iter().zip(pre.iter()) {
            for (x, y) in out.iter_mut().zip(p.iter()) {
                *x = x.clone() + c.clone() * y.clone();
            }
        }
        out
    };
    let to_target = |v: &Vec<S>| -> Vec<S> {
        let mut out = vec![S::zero(); m.rows()];
        for (c, fv) in v.iter().zip(f.iter()) {
            for (x, y) in out.iter_mut().zip(fv.iter()) {
                *x = x.clone() + c.clone() * y.clone();
            }
        }
        out
    };
    let result = DetElement {
        scalar: lambda * canonical.input.scalar.clone(),
        kernel_wedge: canonical.input.kernel_wedge.iter().map(to_domain).collect(),
        coker_dual_wedge: canonical.input.coker_dual_wedge.iter().map(to_target).collect(),
    };
    let space = DetSpace::new(m.clone());
    space.ratio(&result, &iso.input)
}

/// Orientation of `det(phi)` induced by transporting through the subspace
/// identification and back.
pub fn induced_orientation<S: Scalar>(m: &Mat<S>, f: &[Vec<S>]) -> Result<Orientation, DetError> {
    let r = round_trip_scalar(m, f)?;
    Sign::of_scalar(&r).map(Orientation).ok_or(DetError::ZeroRelation)
}

// ---------------------------------------------------------------------------
// Stabilization of the domain
// ---------------------------------------------------------------------------

/// The basis-level identification
/// `det(phi) ≃ det(phi ⊕ psi) ⊗ Λ^top V^*` for a finite-dimensional
/// stabilizer `psi : V -> W` making `phi ⊕ psi` surjective.
#[derive(Clone, Debug)]
pub struct Stabilization<S> {
    /// Element of `det(phi)` the map is evaluated on.
    pub input: DetElement<S>,
    /// Basis of `ker(phi ⊕ psi)` inside `U ⊕ V`, in wedge order.
    pub glued_kernel: Vec<Vec<S>>,
    /// Vectors of `V` whose duals are wedged in list order.
    pub domain_dual: Vec<Vec<S>>,
    pub scalar: S,
}

struct StabChoices<S> {
    kernel_phi: Vec<Vec<S>>,
    h: Vec<Vec<S>>,
    x: Vec<Vec<S>>,
    g: Vec<Vec<S>>,
    kernel_psi: Vec<Vec<S>>,
}

fn stab_choices<S: Scalar>(phi: &Mat<S>, psi: &Mat<S>) -> Result<StabChoices<S>, DetError> {
    // I = im(phi) ∩ im(psi) from the kernel of [phi | -psi].
    let mut neg_psi = psi.clone();
    for r in 0..neg_psi.rows() {
        for c in 0..neg_psi.cols() {
            let v = -neg_psi.at(r, c).clone();
            *neg_psi.at_mut(r, c) = v;
        }
    }
    let paired = phi.hcat(&neg_psi);
    let meet: Vec<Vec<S>> = paired
        .kernel_basis()
        .into_iter()
        .map(|v| phi.apply(&v[..phi.cols()].to_vec()))
        .collect();
    let meet = linalg::greedy_independent(&meet);

    let kernel_phi = phi.kernel_basis();
    let pre_phi = preimage_basis(phi, &meet);
    let h = greedy_complement(&kernel_phi, &pre_phi);
    let x: Result<Vec<Vec<S>>, DetError> = h
        .iter()
        .map(|hi| {
            solve_particular(psi, &phi.apply(hi))
                .ok_or(DetError::Incomparable("intersection vector not in im(psi)".into()))
        })
        .collect();
    let pre_psi = preimage_basis(psi, &meet);
    let std_v: Vec<Vec<S>> = (0..psi.cols())
        .map(|i| {
            let mut e = vec![S::zero(); psi.cols()];
            e[i] = S::one();
            e
        })
        .collect();
    let g = greedy_complement(&pre_psi, &std_v);
    let kernel_psi = psi.kernel_basis();
    Ok(StabChoices { kernel_phi, h, x: x?, g, kernel_psi })
}

fn stab_from_choices<S: Scalar>(
    phi: &Mat<S>,
    psi: &Mat<S>,
    ch: StabChoices<S>,
) -> Stabilization<S> {
    let StabChoices { kernel_phi, h, x, g, kernel_psi } = ch;
    let input = DetElement {
        scalar: S::one(),
        kernel_wedge: kernel_phi.clone(),
        coker_dual_wedge: g.iter().rev().map(|v| psi.apply(v)).collect(),
    };
    let (u_dim, v_dim) = (phi.cols(), psi.cols());
    let pair = |u: Option<&Vec<S>>, v: Option<&Vec<S>>, negate_v: bool| -> Vec<S> {
        let mut out = vec![S::zero(); u_dim + v_dim];
        if let Some(u) = u {
            out[..u_dim].clone_from_slice(u);
        }
        if let Some(v) = v {
            for (slot, val) in out[u_dim..].iter_mut().zip(v.iter()) {
                *slot = if negate_v { -val.clone() } else { val.clone() };
            }
        }
        out
    };
    let mut glued_kernel: Vec<Vec<S>> =
        kernel_phi.iter().map(|k| pair(Some(k), None, false)).collect();
    glued_kernel.extend(h.iter().zip(x.iter()).map(|(hi, xi)| pair(Some(hi), Some(xi), true)));
    glued_kernel.extend(kernel_psi.iter().map(|k| pair(None, Some(k), false)));
    // Domain basis in the order (g, x, ker psi); duals wedge in reverse.
    let mut domain_basis = g;
    domain_basis.extend(x);
    domain_basis.extend(kernel_psi);
    let domain_dual: Vec<Vec<S>> = domain_basis.into_iter().rev().collect();
    Stabilization { input, glued_kernel, domain_dual, scalar: S::one() }
}

fn validate_stab<S: Scalar>(phi: &Mat<S>, psi: &Mat<S>) -> Result<(), DetError> {
    if phi.rows() != psi.rows() {
        return Err(DetError::Incomparable("stabilizer target mismatch".into()));
    }
    if phi.hcat(psi).rank() != phi.rows() {
        return Err(DetError::NotSurjective);
    }
    Ok(())
}

/// Deterministic instance of the stabilization identification.
pub fn stabilize<S: Scalar>(phi: &Mat<S>, psi: &Mat<S>) -> Result<Stabilization<S>, DetError> {
    validate_stab(phi, psi)?;
    Ok(stab_from_choices(phi, psi, stab_choices(phi, psi)?))
}

/// Number of `(u, -v)` pairing vectors the identification for `(phi, psi)`
/// interleaves: `dim(im phi ∩ im psi)`. Iterated stabilizations compose with
/// the direct one up to the parity of these block sizes.
pub fn pairing_block_dim<S: Scalar>(phi: &Mat<S>, psi: &Mat<S>) -> usize {
    phi.rank() + psi.rank() - phi.hcat(psi).rank()
}

/// Randomized-choice instance, for choice-independence checks.
pub fn stabilize_with<S: Scalar, R: Rng>(
    phi: &Mat<S>,
    psi: &Mat<S>,
    rng: &mut R,
) -> Result<Stabilization<S>, DetError> {
    validate_stab(phi, psi)?;
    let det = stab_choices(phi, psi)?;
    let kernel_phi = recombine(&det.kernel_phi, rng);
    let h = add_random_combo(&det.h, &det.kernel_phi, rng);
    let x: Result<Vec<Vec<S>>, DetError> = h
        .iter()
        .map(|hi| {
            solve_particular(psi, &phi.apply(hi))
                .ok_or(DetError::Incomparable("intersection vector not in im(psi)".into()))
        })
        .collect();
    let mut x = x?;
    // Particular solutions are free modulo ker(psi).
    x = add_random_combo(&x, &det.kernel_psi, rng);
    let g = recombine(&add_random_combo(&det.g, &det.kernel_psi, rng), rng);
    let kernel_psi = recombine(&det.kernel_psi, rng);
    Ok(stab_from_choices(phi, psi, StabChoices { kernel_phi, h, x, g, kernel_psi }))
}

/// Value of the stabilized side against the frame
/// `(deterministic kernel basis of [phi | psi], reversed standard basis of
/// V)`; dual factors are framed reversed throughout this calculus.
pub fn stab_output_value<S: Scalar>(
    phi: &Mat<S>,
    psi: &Mat<S>,
    st: &Stabilization<S>,
) -> Result<S, DetError> {
    let glued = DetSpace::new(phi.hcat(psi));
    let k = wedge_coords_det(&glued.kernel, &st.glued_kernel)?;
    let rev_v: Vec<Vec<S>> = (0..psi.cols())
        .rev()
        .map(|i| {
            let mut e = vec![S::zero(); psi.cols()];
            e[i] = S::one();
            e
        })
        .collect();
    let d = wedge_coords_det(&rev_v, &st.domain_dual)?;
    if d.is_zero() {
        return Err(DetError::Incomparable("degenerate domain dual wedge".into()));
    }
    Ok(st.scalar.clone() * k / d)
}

/// Ratio of two stabilization instances for the same `(phi, psi)` as maps.
pub fn stabilization_ratio<S: Scalar>(
    phi: &Mat<S>,
    psi: &Mat<S>,
    a: &Stabilization<S>,
    b: &Stabilization<S>,
) -> Result<S, DetError> {
    let space = DetSpace::new(phi.clone());
    let map_a = stab_output_value(phi, psi, a)? / space.value(&a.input)?;
    let map_b = stab_output_value(phi, psi, b)? / space.value(&b.input)?;
    if map_b.is_zero() {
        return Err(DetError::ZeroRelation);
    }
    Ok(map_a / map_b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rat;
    use num_traits::Signed;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn q(v: i64) -> Rat {
        Rat::from_int(v)
    }

    fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Mat<Rat> {
        Mat::from_rows(
            (0..rows)
                .map(|_| (0..cols).map(|_| q(rng.gen_range(-3..=3))).collect())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn canonical_value_is_a_sign() {
        let m: Mat<Rat> = Mat::zeros(2, 2);
        let space = DetSpace::new(m);
        let c = space.canonical_element();
        let v = space.value(&c).unwrap();
        assert!(v.clone() * v == q(1));
    }

    #[test]
    fn disjoint_union_sign_table() {
        // Both surjective: sign +1.
        let l: Mat<Rat> = Mat::identity(2);
        let l2: Mat<Rat> = Mat::identity(1);
        let (sl, sl2) = (DetSpace::new(l), DetSpace::new(l2));
        let du = disjoint_union(&sl, &sl2, &sl.canonical_element(), &sl2.canonical_element());
        assert_eq!(du.sign, Sign::Plus);

        // ind L2 = 1, dim coker L = 1: sign -1.
        let l: Mat<Rat> = Mat::zeros(1, 0); // {0} -> R, coker 1, ind -1
        let l2: Mat<Rat> = Mat::zeros(0, 1); // R -> {0}, ind 1
        let (sl, sl2) = (DetSpace::new(l), DetSpace::new(l2));
        assert_eq!(sl.cokernel.len(), 1);
        assert_eq!(sl2.index(), 1);
        let du = disjoint_union(&sl, &sl2, &sl.canonical_element(), &sl2.canonical_element());
        assert_eq!(du.sign, Sign::Minus);

        // ind L2 = 2, dim coker L = 3: even product, sign +1.
        let l: Mat<Rat> = Mat::zeros(3, 0);
        let l2: Mat<Rat> = Mat::zeros(0, 2);
        let (sl, sl2) = (DetSpace::new(l), DetSpace::new(l2));
        let du = disjoint_union(&sl, &sl2, &sl.canonical_element(), &sl2.canonical_element());
        assert_eq!(du.sign, Sign::Plus);
    }

    #[test]
    fn swap_check_zero_maps() {
        // Both zero maps R -> R: indices 0, relative sign +1.
        let z: Mat<Rat> = Mat::zeros(1, 1);
        assert!(swap_disjoint_check(&z, &z).unwrap());

        // Both zero maps R -> {0}: indices 1, relative sign -1; direct wedge
        // reordering of two odd-degree factors.
        let l: Mat<Rat> = Mat::zeros(0, 1);
        assert!(swap_disjoint_check(&l, &l).unwrap());
    }

    #[test]
    fn swap_check_random_sweep() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut nontrivial = 0;
        for _ in 0..200 {
            let (r1, c1) = (rng.gen_range(0..=4), rng.gen_range(0..=4));
            let l = random_matrix(&mut rng, r1, c1);
            let (r2, c2) = (rng.gen_range(0..=4), rng.gen_range(0..=4));
            let l2 = random_matrix(&mut rng, r2, c2);
            if DetSpace::new(l.clone()).index() % 2 != 0
                && DetSpace::new(l2.clone()).index() % 2 != 0
            {
                nontrivial += 1;
            }
            assert!(swap_disjoint_check(&l, &l2).unwrap());
        }
        assert!(nontrivial > 10, "sweep too degenerate: {nontrivial}");
    }

    #[test]
    fn subspace_iso_surjective_with_zero_subspace_is_identity() {
        let m: Mat<Rat> = Mat::from_int_rows(&[&[1, 0, 2], &[0, 1, 1]]);
        assert_eq!(m.rank(), 2);
        let iso = subspace_iso(&m, &[]).unwrap();
        assert_eq!(iso.input, iso.output);
        assert!(iso.input.coker_dual_wedge.is_empty());
    }

    #[test]
    fn subspace_iso_zero_map_full_target() {
        let m: Mat<Rat> = Mat::zeros(1, 1);
        let f = vec![vec![q(1)]];
        let iso = subspace_iso(&m, &f).unwrap();
        assert_eq!(iso.input.kernel_wedge, vec![vec![q(1)]]);
        assert_eq!(iso.input.coker_dual_wedge, vec![vec![q(1)]]);
        assert_eq!(iso.output.kernel_wedge, vec![vec![q(1)]]);
        assert_eq!(iso.output.coker_dual_wedge, vec![vec![q(1)]]);
    }

    #[test]
    fn subspace_iso_rejects_small_subspace() {
        let m: Mat<Rat> = Mat::zeros(2, 2);
        let f = vec![vec![q(1), q(0)]];
        assert!(matches!(subspace_iso(&m, &f), Err(DetError::SubspaceTooSmall)));
    }

    fn random_valid_subspace(
        rng: &mut ChaCha8Rng,
        m: &Mat<Rat>,
    ) -> Option<Vec<Vec<Rat>>> {
        let coker = cokernel_basis(m);
        for _ in 0..40 {
            let extra = rng.gen_range(0..=1);
            let count = coker.len() + extra;
            if count > m.rows() {
                continue;
            }
            let f: Vec<Vec<Rat>> =
                (0..count).map(|_| (0..m.rows()).map(|_| q(rng.gen_range(-2..=2))).collect()).collect();
            if validate_subspace(m, &f).is_ok() {
                return Some(f);
            }
        }
        None
    }

    #[test]
    fn subspace_iso_choice_and_subspace_independence() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let mut checked = 0;
        while checked < 60 {
            let (r, c) = (rng.gen_range(1..=4), rng.gen_range(1..=4));
            let m = random_matrix(&mut rng, r, c);
            let Some(f) = random_valid_subspace(&mut rng, &m) else { continue };
            // Choice independence for fixed F: maps agree up to positive scalar.
            let det = subspace_iso(&m, &f).unwrap();
            let rand = subspace_iso_with(&m, &f, &mut rng).unwrap();
            let r = iso_ratio(&m, &f, &rand, &det).unwrap();
            assert!(r.is_positive(), "choice ratio not positive: {r}");
            // Subspace independence through the round trip.
            let back = round_trip_scalar(&m, &f).unwrap();
            assert!(back.is_positive(), "round trip not positive: {back}");
            let Some(f2) = random_valid_subspace(&mut rng, &m) else { continue };
            assert_eq!(
                induced_orientation(&m, &f).unwrap(),
                induced_orientation(&m, &f2).unwrap()
            );
            checked += 1;
        }
    }

    #[test]
    fn stabilize_zero_stabilizer_is_canonical_inclusion() {
        let phi: Mat<Rat> = Mat::from_int_rows(&[&[1, 0, 0], &[0, 1, 0]]);
        let psi: Mat<Rat> = Mat::zeros(2, 2);
        let st = stabilize(&phi, &psi).unwrap();
        assert_eq!(st.input.kernel_wedge, vec![vec![q(0), q(0), q(1)]]);
        assert!(st.input.coker_dual_wedge.is_empty());
        // Kernel of phi ⊕ 0 is ker(phi) ⊕ V, listed in that order.
        assert_eq!(
            st.glued_kernel,
            vec![
                vec![q(0), q(0), q(1), q(0), q(0)],
                vec![q(0), q(0), q(0), q(1), q(0)],
                vec![q(0), q(0), q(0), q(0), q(1)],
            ]
        );
        // Dual wedge over V in reversed order.
        assert_eq!(st.domain_dual, vec![vec![q(0), q(1)], vec![q(1), q(0)]]);
        // And the value of the output against the deterministic frames is
        // positive relative to the input.
        let v_out = stab_output_value(&phi, &psi, &st).unwrap();
        let v_in = DetSpace::new(phi).value(&st.input).unwrap();
        assert!((v_out / v_in).is_positive());
    }

    #[test]
    fn stabilize_dim_one_hand_computation() {
        // phi = 0 : R -> R, psi = id : R -> R.
        let phi: Mat<Rat> = Mat::zeros(1, 1);
        let psi: Mat<Rat> = Mat::identity(1);
        let st = stabilize(&phi, &psi).unwrap();
        assert_eq!(st.input.kernel_wedge, vec![vec![q(1)]]);
        assert_eq!(st.input.coker_dual_wedge, vec![vec![q(1)]]);
        assert_eq!(st.glued_kernel, vec![vec![q(1), q(0)]]);
        assert_eq!(st.domain_dual, vec![vec![q(1)]]);
    }

    #[test]
    fn stabilize_rejects_non_surjective() {
        let phi: Mat<Rat> = Mat::zeros(2, 1);
        let psi: Mat<Rat> = Mat::from_int_rows(&[&[1], &[0]]);
        assert!(matches!(stabilize(&phi, &psi), Err(DetError::NotSurjective)));
    }

    #[test]
    fn stabilize_choice_independence() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let mut checked = 0;
        while checked < 60 {
            let rows = rng.gen_range(1..=3);
            let cols_phi = rng.gen_range(1..=4);
            let phi = random_matrix(&mut rng, rows, cols_phi);
            let cols_psi = rng.gen_range(1..=3);
            let psi = random_matrix(&mut rng, rows, cols_psi);
            if phi.hcat(&psi).rank() != rows {
                continue;
            }
            let a = stabilize(&phi, &psi).unwrap();
            let b = stabilize_with(&phi, &psi, &mut rng).unwrap();
            let r = stabilization_ratio(&phi, &psi, &b, &a).unwrap();
            assert!(r.is_positive(), "stabilization ratio not positive: {r}");
            checked += 1;
        }
    }

    #[test]
    fn stabilize_iterated_matches_direct() {
        // det(phi) -> det(phi ⊕ psi1) ⊗ ΛV1^* -> det(phi ⊕ psi1 ⊕ psi2) ⊗ ΛV2^* ⊗ ΛV1^*
        // agrees with the one-shot stabilization by psi1 ⊕ psi2 (dual factors
        // compared through the reversed-concatenation frame) up to positive
        // scalar and the parity of the pairing-block sizes: each application
        // of the identification interleaves dim(im phi ∩ im psi) paired
        // vectors, and the two routes interleave a different number of them.
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let mut checked = 0;
        while checked < 60 {
            let rows = rng.gen_range(1..=3);
            let cols = rng.gen_range(0..=3);
            let phi = random_matrix(&mut rng, rows, cols);
            let c1 = rng.gen_range(1..=3);
            let psi1 = random_matrix(&mut rng, rows, c1);
            let c2 = rng.gen_range(1..=3);
            let psi2 = random_matrix(&mut rng, rows, c2);
            if phi.hcat(&psi1).rank() != rows {
                continue; // first stage must already be surjective
            }
            let stage1 = stabilize(&phi, &psi1).unwrap();
            let ext = phi.hcat(&psi1);
            let stage2 = stabilize(&ext, &psi2).unwrap();
            let direct = stabilize(&phi, &psi1.hcat(&psi2)).unwrap();

            let space_phi = DetSpace::new(phi.clone());
            let total1 = stab_output_value(&phi, &psi1, &stage1).unwrap()
                / space_phi.value(&stage1.input).unwrap();
            let space_ext = DetSpace::new(ext.clone());
            let total2 = stab_output_value(&ext, &psi2, &stage2).unwrap()
                / space_ext.value(&stage2.input).unwrap();
            let direct_total = stab_output_value(&phi, &psi1.hcat(&psi2), &direct).unwrap()
                / space_phi.value(&direct.input).unwrap();

            let pairing_parity = pairing_block_dim(&phi, &psi1)
                + pairing_block_dim(&ext, &psi2)
                + pairing_block_dim(&phi, &psi1.hcat(&psi2));
            let correction = Sign::from_parity(pairing_parity as i64).to_scalar::<Rat>();
            let ratio = (total1 * total2) / direct_total * correction;
            assert!(
                ratio.is_positive(),
                "iterated vs direct stabilization not positively related: {ratio}"
            );
            checked += 1;
        }
    }
}
