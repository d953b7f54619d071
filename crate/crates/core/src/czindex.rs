//! Numerics for loops of symmetric matrices: the symplectic path they
//! generate, admissibility, the Conley-Zehnder index by crossing enumeration,
//! and the spectral gap of the asymptotic operator in a truncated Fourier
//! basis.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::RealScalar;
use crate::sign::Z2;

#[derive(Debug, Error, PartialEq)]
pub enum CzError {
    #[error("dimension must be a positive even integer, got {0}")]
    OddDimension(usize),
    #[error("step count must be at least 16, got {0}")]
    TooFewSteps(usize),
    #[error("loop is not admissible: the period map has eigenvalue one")]
    NotAdmissible,
    #[error("degenerate crossing beyond refinement tolerance at t = {0}")]
    DegenerateCrossing(f64),
    #[error("index accumulated to a non-integer value")]
    NonIntegralIndex,
    #[error("spectral truncation produced no {0} eigenvalue; raise the mode count")]
    Truncation(&'static str),
    #[error("empty loop list")]
    EmptyInput,
    #[error("invalid loop specification: {0}")]
    BadSpec(String),
}

fn c<F: RealScalar>(x: f64) -> F {
    F::from_f64(x).expect("constant representable in real scalar")
}

/// Numerical policy: step counts, truncation size, and the thresholds that
/// separate honest nondegeneracy from integration noise.
#[derive(Clone, Debug)]
pub struct CzConfig {
    /// Output samples per period for the path solve.
    pub steps: usize,
    /// Internal integrator substeps per output sample.
    pub substeps: usize,
    /// Fourier truncation `|k| <= modes` for the spectral gap.
    pub modes: usize,
    /// Crossing-scan grid is `max(scan_factor * steps, 2048)` points.
    pub scan_factor: usize,
    /// Degeneracy threshold for `det(B(1) - Id)`, scaled by the matrix size.
    pub degeneracy_tol: f64,
    /// Normalized `|det(B(t) - Id)|` below which a grid dip is examined.
    pub dip_tol: f64,
    /// Normalized value below which a refined dip counts as a crossing.
    pub crossing_eps: f64,
    /// Relative singular-value cutoff for the crossing kernel.
    pub svd_cutoff: f64,
    /// Crossings are localized to this width in `t`.
    pub bisection_tol: f64,
    /// Interior crossings are only sought at `t` above this bound; the
    /// crossing at `t = 0` is handled by the endpoint rule.
    pub min_interior_t: f64,
}

impl Default for CzConfig {
    fn default() -> Self {
        CzConfig {
            steps: 256,
            substeps: 4,
            modes: 128,
            scan_factor: 8,
            degeneracy_tol: 1e-9,
            dip_tol: 1e-2,
            crossing_eps: 1e-7,
            svd_cutoff: 1e-7,
            bisection_tol: 1e-10,
            min_interior_t: 1e-4,
        }
    }
}

// ---------------------------------------------------------------------------
// Loop specification
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TermKind {
    #[default]
    Cos,
    Sin,
}

/// One trigonometric term of a loop file.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FourierTerm {
    pub k: u32,
    pub matrix: Vec<Vec<f64>>,
    #[serde(default)]
    pub kind: TermKind,
}

/// On-disk loop description: either finitely many trigonometric terms or
/// uniform samples over one period.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LoopSpec {
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fourier: Option<Vec<FourierTerm>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<Vec<Vec<Vec<f64>>>>,
}

/// A period-one loop of symmetric matrices, stored as a finite trigonometric
/// series. Coefficient matrices are symmetrized on construction so that every
/// evaluation is symmetric by construction.
#[derive(Clone, Debug)]
pub struct SymmetricLoop<F> {
    dim: usize,
    /// mode -> (cosine coefficient, sine coefficient)
    terms: BTreeMap<u32, (DMatrix<F>, DMatrix<F>)>,
}

fn symmetrize<F: RealScalar>(m: &DMatrix<F>) -> DMatrix<F> {
    (m + m.transpose()) * c::<F>(0.5)
}

impl<F: RealScalar> SymmetricLoop<F> {
    pub fn dim(&self) -> usize {
        self.dim
    }

    fn check_dim(dim: usize) -> Result<(), CzError> {
        if dim == 0 || dim % 2 != 0 {
            return Err(CzError::OddDimension(dim));
        }
        Ok(())
    }

    pub fn zero(dim: usize) -> Result<Self, CzError> {
        Self::check_dim(dim)?;
        Ok(SymmetricLoop { dim, terms: BTreeMap::new() })
    }

    /// Constant loop `S(t) = m`.
    pub fn constant(m: DMatrix<F>) -> Result<Self, CzError> {
        let dim = m.nrows();
        Self::check_dim(dim)?;
        if m.ncols() != dim {
            return Err(CzError::BadSpec("constant matrix not square".into()));
        }
        let mut terms = BTreeMap::new();
        terms.insert(0, (symmetrize(&m), DMatrix::zeros(dim, dim)));
        Ok(SymmetricLoop { dim, terms })
    }

    /// `a * Id` on the given dimension.
    pub fn scalar(dim: usize, a: f64) -> Result<Self, CzError> {
        Self::check_dim(dim)?;
        Self::constant(DMatrix::identity(dim, dim) * c::<F>(a))
    }

    pub fn add_term(&mut self, k: u32, kind: TermKind, m: DMatrix<F>) -> Result<(), CzError> {
        if m.nrows() != self.dim || m.ncols() != self.dim {
            return Err(CzError::BadSpec("term matrix has the wrong shape".into()));
        }
        if kind == TermKind::Sin && k == 0 {
            return Err(CzError::BadSpec("sin term with k = 0 vanishes identically".into()));
        }
        let entry = self
            .terms
            .entry(k)
            .or_insert_with(|| (DMatrix::zeros(self.dim, self.dim), DMatrix::zeros(self.dim, self.dim)));
        match kind {
            TermKind::Cos => entry.0 += symmetrize(&m),
            TermKind::Sin => entry.1 += symmetrize(&m),
        }
        Ok(())
    }

    /// Trigonometric interpolation of uniform samples over `[0, 1)`.
    pub fn from_samples(dim: usize, samples: &[DMatrix<F>]) -> Result<Self, CzError> {
        Self::check_dim(dim)?;
        let m = samples.len();
        if m == 0 {
            return Err(CzError::BadSpec("no samples".into()));
        }
        for s in samples {
            if s.nrows() != dim || s.ncols() != dim {
                return Err(CzError::BadSpec("sample matrix has the wrong shape".into()));
            }
        }
        let sym: Vec<DMatrix<F>> = samples.iter().map(symmetrize).collect();
        let mut lp = SymmetricLoop::zero(dim)?;
        let two_pi = F::two_pi();
        let inv_m = c::<F>(1.0 / m as f64);
        let mean = sym.iter().fold(DMatrix::zeros(dim, dim), |acc, s| acc + s) * inv_m;
        lp.terms.insert(0, (mean, DMatrix::zeros(dim, dim)));
        let kmax = (m - 1) / 2;
        for k in 1..=kmax {
            let mut cos_k = DMatrix::zeros(dim, dim);
            let mut sin_k = DMatrix::zeros(dim, dim);
            for (j, s) in sym.iter().enumerate() {
                let phase = two_pi * c::<F>(k as f64) * c::<F>(j as f64) * inv_m;
                cos_k += s * phase.cos();
                sin_k += s * phase.sin();
            }
            let scale = c::<F>(2.0 / m as f64);
            lp.terms.insert(k as u32, (cos_k * scale, sin_k * scale));
        }
        Ok(lp)
    }

    pub fn from_spec(spec: &LoopSpec) -> Result<Self, CzError> {
        Self::check_dim(spec.dim)?;
        match (&spec.fourier, &spec.samples) {
            (Some(terms), None) => {
                let mut lp = SymmetricLoop::zero(spec.dim)?;
                for term in terms {
                    let m = matrix_from_rows::<F>(spec.dim, &term.matrix)?;
                    lp.add_term(term.k, term.kind, m)?;
                }
                Ok(lp)
            }
            (None, Some(samples)) => {
                let mats: Result<Vec<DMatrix<F>>, CzError> =
                    samples.iter().map(|s| matrix_from_rows::<F>(spec.dim, s)).collect();
                SymmetricLoop::from_samples(spec.dim, &mats?)
            }
            _ => Err(CzError::BadSpec(
                "exactly one of `fourier` or `samples` must be present".into(),
            )),
        }
    }

    pub fn eval(&self, t: F) -> DMatrix<F> {
        let mut out = DMatrix::zeros(self.dim, self.dim);
        let two_pi = F::two_pi();
        for (&k, (cos_m, sin_m)) in &self.terms {
            if k == 0 {
                out += cos_m;
            } else {
                let phase = two_pi * c::<F>(f64::from(k)) * t;
                out += cos_m * phase.cos();
                out += sin_m * phase.sin();
            }
        }
        out
    }

    fn max_mode(&self) -> u32 {
        self.terms.keys().copied().max().unwrap_or(0)
    }
}

fn matrix_from_rows<F: RealScalar>(dim: usize, rows: &[Vec<f64>]) -> Result<DMatrix<F>, CzError> {
    if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
        return Err(CzError::BadSpec(format!("matrix is not {dim}x{dim}")));
    }
    Ok(DMatrix::from_fn(dim, dim, |i, j| c::<F>(rows[i][j])))
}

/// The standard complex structure `[[0, -I], [I, 0]]` on `R^dim`.
pub fn standard_j<F: RealScalar>(dim: usize) -> DMatrix<F> {
    let half = dim / 2;
    DMatrix::from_fn(dim, dim, |i, j| {
        if i < half && j == i + half {
            -F::one()
        } else if i >= half && j + half == i {
            F::one()
        } else {
            F::zero()
        }
    })
}

// ---------------------------------------------------------------------------
// Path solve
// ---------------------------------------------------------------------------

/// Sampled fundamental solution of `B' = J0 S(t) B`, `B(0) = Id`.
#[derive(Clone, Debug)]
pub struct SymplecticPath<F> {
    pub step: F,
    pub samples: Vec<(F, DMatrix<F>)>,
}

impl<F: RealScalar> SymplecticPath<F> {
    pub fn end(&self) -> &DMatrix<F> {
        &self.samples.last().expect("path has samples").1
    }

    /// Largest entrywise deviation of `B^T J0 B` from `J0` over the samples.
    pub fn symplecticity_defect(&self) -> F {
        let dim = self.samples[0].1.nrows();
        let j = standard_j::<F>(dim);
        let mut worst = F::zero();
        for (_, b) in &self.samples {
            let d = b.transpose() * &j * b - &j;
            for v in d.iter() {
                worst = worst.max(v.abs());
            }
        }
        worst
    }
}

fn rk4_step<F: RealScalar>(
    lp: &SymmetricLoop<F>,
    j: &DMatrix<F>,
    t: F,
    h: F,
    b: &DMatrix<F>,
) -> DMatrix<F> {
    let half = c::<F>(0.5);
    let f = |tt: F, bb: &DMatrix<F>| -> DMatrix<F> { j * lp.eval(tt) * bb };
    let k1 = f(t, b);
    let k2 = f(t + h * half, &(b + &k1 * (h * half)));
    let k3 = f(t + h * half, &(b + &k2 * (h * half)));
    let k4 = f(t + h, &(b + &k3 * h));
    b + (k1 + k2 * c::<F>(2.0) + k3 * c::<F>(2.0) + k4) * (h / c::<F>(6.0))
}

/// Classical fixed-step fourth-order integration of the path, with `steps`
/// recorded samples and `substeps` integrator steps between samples.
pub fn solve_symplectic_path<F: RealScalar>(
    lp: &SymmetricLoop<F>,
    steps: usize,
    substeps: usize,
) -> Result<SymplecticPath<F>, CzError> {
    SymmetricLoop::<F>::check_dim(lp.dim)?;
    if steps < 16 {
        return Err(CzError::TooFewSteps(steps));
    }
    let substeps = substeps.max(1);
    let j = standard_j::<F>(lp.dim);
    let h = F::one() / c::<F>((steps * substeps) as f64);
    let mut b = DMatrix::identity(lp.dim, lp.dim);
    let mut samples = Vec::with_capacity(steps + 1);
    samples.push((F::zero(), b.clone()));
    for i in 0..steps {
        for s in 0..substeps {
            let t = c::<F>((i * substeps + s) as f64) * h;
            b = rk4_step(lp, &j, t, h, &b);
        }
        samples.push((c::<F>((i + 1) as f64) / c::<F>(steps as f64), b.clone()));
    }
    Ok(SymplecticPath { step: F::one() / c::<F>(steps as f64), samples })
}

fn integrate_to<F: RealScalar>(
    lp: &SymmetricLoop<F>,
    j: &DMatrix<F>,
    from: (F, DMatrix<F>),
    t: F,
    h_max: F,
) -> DMatrix<F> {
    let (t0, mut b) = from;
    let span = t - t0;
    if span <= F::zero() {
        return b;
    }
    let n = (span / h_max).ceil().to_subset().map_or(1usize, |v: f64| v as usize).max(1);
    let h = span / c::<F>(n as f64);
    let mut tt = t0;
    for _ in 0..n {
        b = rk4_step(lp, j, tt, h, &b);
        tt += h;
    }
    b
}

// ---------------------------------------------------------------------------
// Admissibility and the crossing index
// ---------------------------------------------------------------------------

fn det_b_minus_id<F: RealScalar>(b: &DMatrix<F>) -> F {
    (b - DMatrix::<F>::identity(b.nrows(), b.ncols())).determinant()
}

fn degeneracy_threshold<F: RealScalar>(b: &DMatrix<F>, tol: f64) -> F {
    c::<F>(tol) * (F::one() + b.norm())
}

/// A loop is admissible when the periodic problem has only the zero solution,
/// i.e. when `1` is not an eigenvalue of the period map `B(1)`.
pub fn is_admissible<F: RealScalar>(lp: &SymmetricLoop<F>, cfg: &CzConfig) -> Result<bool, CzError> {
    let path = solve_symplectic_path(lp, cfg.steps, cfg.substeps)?;
    let b1 = path.end();
    Ok(det_b_minus_id(b1).abs() > degeneracy_threshold(b1, cfg.degeneracy_tol))
}

struct Crossing {
    signature: i64,
}

fn crossing_form_signature<F: RealScalar>(
    lp: &SymmetricLoop<F>,
    b: &DMatrix<F>,
    t: f64,
    cfg: &CzConfig,
) -> Result<Option<i64>, CzError> {
    let dim = b.nrows();
    let delta = b - DMatrix::<F>::identity(dim, dim);
    let svd = delta.clone().svd(false, true);
    let smax = svd.singular_values.iter().fold(F::zero(), |a, &s| a.max(s));
    let cutoff = c::<F>(cfg.svd_cutoff) * smax.max(F::one());
    let v_t = svd.v_t.as_ref().expect("svd requested V^T");
    let kernel: Vec<usize> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s <= cutoff)
        .map(|(i, _)| i)
        .collect();
    if kernel.is_empty() {
        return Ok(None);
    }
    let s_t = lp.eval(c::<F>(t));
    let r = kernel.len();
    let mut q = DMatrix::<F>::zeros(r, r);
    for (a, &ia) in kernel.iter().enumerate() {
        let va = v_t.row(ia).transpose();
        let sa = &s_t * &va;
        for (bq, &ib) in kernel.iter().enumerate() {
            let vb = v_t.row(ib).transpose();
            q[(a, bq)] = vb.dot(&sa);
        }
    }
    let q = symmetrize(&q);
    let scale = q.norm().max(F::one());
    let eig = q.symmetric_eigen();
    let mut sig = 0i64;
    for &lambda in eig.eigenvalues.iter() {
        if lambda > c::<F>(cfg.crossing_eps) * scale {
            sig += 1;
        } else if lambda < -c::<F>(cfg.crossing_eps) * scale {
            sig -= 1;
        } else {
            return Err(CzError::DegenerateCrossing(t));
        }
    }
    Ok(Some(sig))
}

fn find_crossings<F: RealScalar>(
    lp: &SymmetricLoop<F>,
    cfg: &CzConfig,
) -> Result<Vec<Crossing>, CzError> {
    let j = standard_j::<F>(lp.dim);
    let grid = (cfg.steps * cfg.scan_factor).max(2048);
    let path = solve_symplectic_path(lp, grid, 1)?;
    let dim = lp.dim as i32;
    let norm_f = |b: &DMatrix<F>| -> F {
        det_b_minus_id(b) / (F::one() + b.norm()).powi(dim)
    };
    let f: Vec<F> = path.samples.iter().map(|(_, b)| norm_f(b)).collect();
    let h_fine = F::one() / c::<F>((grid * 8) as f64);
    let b_at = |t: F| -> DMatrix<F> {
        let idx = (t * c::<F>(grid as f64))
            .floor()
            .to_subset()
            .map_or(0usize, |v: f64| v as usize)
            .min(grid);
        let (t0, b0) = path.samples[idx].clone();
        integrate_to(lp, &j, (t0, b0), t, h_fine)
    };
    let f_at = |t: F| -> F { norm_f(&b_at(t)) };

    let mut candidates: Vec<F> = Vec::new();
    for i in 0..grid {
        let (t_lo, t_hi) = (path.samples[i].0, path.samples[i + 1].0);
        if f[i] != F::zero() && f[i + 1] != F::zero() && f[i] * f[i + 1] < F::zero() {
            // Sign change: plain bisection.
            let (mut lo, mut hi) = (t_lo, t_hi);
            let mut f_lo = f[i];
            while hi - lo > c::<F>(cfg.bisection_tol) {
                let mid = (lo + hi) * c::<F>(0.5);
                let fm = f_at(mid);
                if fm == F::zero() {
                    lo = mid;
                    break;
                }
                if (f_lo > F::zero()) == (fm > F::zero()) {
                    lo = mid;
                    f_lo = fm;
                } else {
                    hi = mid;
                }
            }
            candidates.push((lo + hi) * c::<F>(0.5));
        } else if i > 0
            && f[i].abs() < c::<F>(cfg.dip_tol)
            && f[i].abs() <= f[i - 1].abs()
            && f[i].abs() <= f[i + 1].abs()
        {
            // Even-order touch: golden-section minimization of |f|.
            let (mut lo, mut hi) = (path.samples[i - 1].0, t_hi);
            let phi = c::<F>(0.618_033_988_749_894_9);
            let mut x1 = hi - (hi - lo) * phi;
            let mut x2 = lo + (hi - lo) * phi;
            let mut f1 = f_at(x1).abs();
            let mut f2 = f_at(x2).abs();
            while hi - lo > c::<F>(cfg.bisection_tol) {
                if f1 <= f2 {
                    hi = x2;
                    x2 = x1;
                    f2 = f1;
                    x1 = hi - (hi - lo) * phi;
                    f1 = f_at(x1).abs();
                } else {
                    lo = x1;
                    x1 = x2;
                    f1 = f2;
                    x2 = lo + (hi - lo) * phi;
                    f2 = f_at(x2).abs();
                }
            }
            let t_star = (lo + hi) * c::<F>(0.5);
            if f_at(t_star).abs() < c::<F>(cfg.crossing_eps) {
                candidates.push(t_star);
            }
        }
    }

    // Keep interior crossings, merge duplicates from adjacent intervals.
    let min_t = c::<F>(cfg.min_interior_t);
    let max_t = F::one() - c::<F>(cfg.bisection_tol);
    let mut crossings: Vec<Crossing> = Vec::new();
    let mut last: Option<F> = None;
    candidates.sort_by(|a, b| a.partial_cmp(b).expect("ordered times"));
    for t in candidates {
        if t < min_t || t > max_t {
            continue;
        }
        if let Some(prev) = last {
            if (t - prev).abs() < c::<F>(1e-7) {
                continue;
            }
        }
        let t_f64: f64 = t.to_subset().unwrap_or(0.0);
        let b = b_at(t);
        match crossing_form_signature(lp, &b, t_f64, cfg)? {
            Some(sig) => {
                crossings.push(Crossing { signature: sig });
                last = Some(t);
            }
            None => continue, // shallow dip, no kernel: not a crossing
        }
    }
    Ok(crossings)
}

/// Conley-Zehnder index of the path generated by an admissible loop, by
/// crossing enumeration: the endpoint at `t = 0` contributes half the
/// signature of `S(0)`, each interior crossing contributes the signature of
/// the crossing form restricted to the kernel of `B(t) - Id`.
pub fn conley_zehnder<F: RealScalar>(lp: &SymmetricLoop<F>, cfg: &CzConfig) -> Result<i64, CzError> {
    if !is_admissible(lp, cfg)? {
        return Err(CzError::NotAdmissible);
    }
    // Endpoint: the kernel of B(0) - Id is everything, the form is S(0).
    let s0 = lp.eval(F::zero());
    let scale = s0.norm().max(F::one());
    let eig = symmetrize(&s0).symmetric_eigen();
    let mut halves = 0i64;
    for &lambda in eig.eigenvalues.iter() {
        if lambda > c::<F>(cfg.crossing_eps) * scale {
            halves += 1;
        } else if lambda < -c::<F>(cfg.crossing_eps) * scale {
            halves -= 1;
        } else {
            return Err(CzError::DegenerateCrossing(0.0));
        }
    }
    for crossing in find_crossings(lp, cfg)? {
        halves += 2 * crossing.signature;
    }
    if halves.rem_euclid(2) != 0 {
        return Err(CzError::NonIntegralIndex);
    }
    Ok(halves / 2)
}

/// Z/2 grading of an admissible loop in ambient half-dimension `n`:
/// `(mu_CZ + n - 1) mod 2`.
pub fn loop_grading<F: RealScalar>(
    lp: &SymmetricLoop<F>,
    n: u32,
    cfg: &CzConfig,
) -> Result<Z2, CzError> {
    Ok(Z2::new(conley_zehnder(lp, cfg)? + i64::from(n) - 1))
}

// ---------------------------------------------------------------------------
// Spectral gap
// ---------------------------------------------------------------------------

/// Distance from zero to the spectrum of `J0 d/dt + S` computed in the
/// truncated Fourier basis `|k| <= modes`, via a symmetric eigensolve of the
/// realified Hermitian block matrix.
pub fn spectral_gap<F: RealScalar>(lp: &SymmetricLoop<F>, cfg: &CzConfig) -> Result<F, CzError> {
    if !is_admissible(lp, cfg)? {
        return Err(CzError::NotAdmissible);
    }
    let modes = cfg.modes.max(lp.max_mode() as usize + 1);
    let d = lp.dim;
    let blocks = 2 * modes + 1;
    let n = blocks * d;
    // Hermitian matrix: diagonal blocks i*(2 pi k)*J0, off-diagonal blocks the
    // complex Fourier coefficients of S.
    let mut re = DMatrix::<F>::zeros(n, n);
    let mut im = DMatrix::<F>::zeros(n, n);
    let j = standard_j::<F>(d);
    let two_pi = F::two_pi();
    let coeff = |m: i64| -> Option<(DMatrix<F>, DMatrix<F>)> {
        let half = c::<F>(0.5);
        if m == 0 {
            lp.terms.get(&0).map(|(cos0, _)| (cos0.clone(), DMatrix::zeros(d, d)))
        } else {
            let k = m.unsigned_abs() as u32;
            lp.terms.get(&k).map(|(cos_k, sin_k)| {
                if m > 0 {
                    (cos_k * half, -(sin_k * half))
                } else {
                    (cos_k * half, sin_k * half)
                }
            })
        }
    };
    for bi in 0..blocks {
        let k_i = bi as i64 - modes as i64;
        for bj in 0..blocks {
            let k_j = bj as i64 - modes as i64;
            if let Some((cre, cim)) = coeff(k_i - k_j) {
                for a in 0..d {
                    for b in 0..d {
                        re[(bi * d + a, bj * d + b)] += cre[(a, b)];
                        im[(bi * d + a, bj * d + b)] += cim[(a, b)];
                    }
                }
            }
            if bi == bj {
                let factor = two_pi * c::<F>(k_i as f64);
                for a in 0..d {
                    for b in 0..d {
                        im[(bi * d + a, bj * d + b)] += factor * j[(a, b)];
                    }
                }
            }
        }
    }
    // Realification [[Re, -Im], [Im, Re]] is symmetric and carries each
    // eigenvalue of the Hermitian matrix twice.
    let mut big = DMatrix::<F>::zeros(2 * n, 2 * n);
    for a in 0..n {
        for b in 0..n {
            big[(a, b)] = re[(a, b)];
            big[(n + a, n + b)] = re[(a, b)];
            big[(a, n + b)] = -im[(a, b)];
            big[(n + a, b)] = im[(a, b)];
        }
    }
    let eig = big.symmetric_eigen();
    let mut smallest_pos: Option<F> = None;
    let mut largest_neg: Option<F> = None;
    for &lambda in eig.eigenvalues.iter() {
        if lambda > F::zero() {
            smallest_pos = Some(smallest_pos.map_or(lambda, |v: F| v.min(lambda)));
        } else if lambda < F::zero() {
            largest_neg = Some(largest_neg.map_or(lambda, |v: F| v.max(lambda)));
        }
    }
    let pos = smallest_pos.ok_or(CzError::Truncation("positive"))?;
    let neg = largest_neg.ok_or(CzError::Truncation("negative"))?;
    Ok(pos.min(-neg))
}

/// The supremum of valid exponential weights for a collection of admissible
/// loops: the smallest spectral gap. Weights must stay strictly below it.
pub fn max_weight<F: RealScalar>(
    loops: &[SymmetricLoop<F>],
    cfg: &CzConfig,
) -> Result<F, CzError> {
    if loops.is_empty() {
        return Err(CzError::EmptyInput);
    }
    let mut best: Option<F> = None;
    for lp in loops {
        let gap = spectral_gap(lp, cfg)?;
        best = Some(best.map_or(gap, |v: F| v.min(gap)));
    }
    Ok(best.expect("nonempty"))
}
