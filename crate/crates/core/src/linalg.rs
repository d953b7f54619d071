//! Exact dense linear algebra over a generic field scalar.
//!
//! Everything here is deterministic: row reduction pivots on the first
//! nonzero column with the smallest row index, so kernel and cokernel bases
//! are reproducible functions of the input matrix.

use thiserror::Error;

use crate::scalar::Scalar;

#[derive(Debug, Error, PartialEq)]
pub enum LinAlgError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("vectors do not form a basis: {0}")]
    NotABasis(String),
    #[error("vector lies outside the expected span")]
    OutsideSpan,
}

/// Dense row-major matrix over an exact scalar, viewed as a linear map from
/// `R^cols` to `R^rows`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Mat<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: Scalar> Mat<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat { rows, cols, data: vec![S::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            *m.at_mut(i, i) = S::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<S>>) -> Result<Self, LinAlgError> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(LinAlgError::DimensionMismatch("ragged rows".into()));
        }
        Ok(Mat { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    pub fn from_int_rows(rows: &[&[i64]]) -> Self {
        Mat::from_rows(
            rows.iter().map(|r| r.iter().map(|&v| S::from_int(v)).collect()).collect(),
        )
        .expect("literal rows are rectangular")
    }

    /// Matrix whose columns are the given vectors of length `rows`.
    pub fn from_cols(rows: usize, cols: &[Vec<S>]) -> Self {
        let mut m = Mat::zeros(rows, cols.len());
        for (j, col) in cols.iter().enumerate() {
            assert_eq!(col.len(), rows, "column length mismatch");
            for i in 0..rows {
                *m.at_mut(i, j) = col[i].clone();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, r: usize, c: usize) -> &S {
        &self.data[r * self.cols + c]
    }

    pub fn at_mut(&mut self, r: usize, c: usize) -> &mut S {
        &mut self.data[r * self.cols + c]
    }

    pub fn row(&self, r: usize) -> Vec<S> {
        (0..self.cols).map(|c| self.at(r, c).clone()).collect()
    }

    pub fn col(&self, c: usize) -> Vec<S> {
        (0..self.rows).map(|r| self.at(r, c).clone()).collect()
    }

    pub fn transpose(&self) -> Mat<S> {
        let mut t = Mat::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                *t.at_mut(c, r) = self.at(r, c).clone();
            }
        }
        t
    }

    /// `self * v` for a column vector `v`.
    pub fn apply(&self, v: &[S]) -> Vec<S> {
        assert_eq!(v.len(), self.cols, "apply: length mismatch");
        (0..self.rows)
            .map(|r| {
                (0..self.cols)
                    .fold(S::zero(), |acc, c| acc + self.at(r, c).clone() * v[c].clone())
            })
            .collect()
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hcat(&self, other: &Mat<S>) -> Mat<S> {
        assert_eq!(self.rows, other.rows, "hcat: row mismatch");
        let mut m = Mat::zeros(self.rows, self.cols + other.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                *m.at_mut(r, c) = self.at(r, c).clone();
            }
            for c in 0..other.cols {
                *m.at_mut(r, self.cols + c) = other.at(r, c).clone();
            }
        }
        m
    }

    /// Block-diagonal sum, acting on the direct sum of the domains.
    pub fn block_diag(&self, other: &Mat<S>) -> Mat<S> {
        let mut m = Mat::zeros(self.rows + other.rows, self.cols + other.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                *m.at_mut(r, c) = self.at(r, c).clone();
            }
        }
        for r in 0..other.rows {
            for c in 0..other.cols {
                *m.at_mut(self.rows + r, self.cols + c) = other.at(r, c).clone();
            }
        }
        m
    }

    /// Reduced row echelon form together with the pivot columns.
    /// Pivot rule: left-to-right over the columns, picking the smallest row
    /// index with a nonzero entry.
    pub fn rref(&self) -> (Mat<S>, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0usize;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            let pivot_row = (row..m.rows).find(|&r| !m.at(r, col).is_zero());
            let Some(p) = pivot_row else { continue };
            if p != row {
                for c in 0..m.cols {
                    let a = m.at(row, c).clone();
                    let b = m.at(p, c).clone();
                    *m.at_mut(row, c) = b;
                    *m.at_mut(p, c) = a;
                }
            }
            let inv = S::one() / m.at(row, col).clone();
            for c in 0..m.cols {
                let v = m.at(row, c).clone() * inv.clone();
                *m.at_mut(row, c) = v;
            }
            for r in 0..m.rows {
                if r == row || m.at(r, col).is_zero() {
                    continue;
                }
                let factor = m.at(r, col).clone();
                for c in 0..m.cols {
                    let v = m.at(r, c).clone() - factor.clone() * m.at(row, c).clone();
                    *m.at_mut(r, c) = v;
                }
            }
            pivots.push(col);
            row += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Deterministic basis of the kernel, one vector per free column in
    /// ascending column order.
    pub fn kernel_basis(&self) -> Vec<Vec<S>> {
        let (r, pivots) = self.rref();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let mut basis = Vec::new();
        for free in 0..self.cols {
            if is_pivot[free] {
                continue;
            }
            let mut v = vec![S::zero(); self.cols];
            v[free] = S::one();
            for (i, &p) in pivots.iter().enumerate() {
                v[p] = -r.at(i, free).clone();
            }
            basis.push(v);
        }
        basis
    }

    /// Determinant of a square matrix by exact Gaussian elimination.
    /// The determinant of the empty matrix is one.
    pub fn det(&self) -> S {
        assert_eq!(self.rows, self.cols, "det: matrix not square");
        let mut m = self.clone();
        let n = m.rows;
        let mut det = S::one();
        for col in 0..n {
            let Some(p) = (col..n).find(|&r| !m.at(r, col).is_zero()) else {
                return S::zero();
            };
            if p != col {
                det = -det;
                for c in 0..n {
                    let a = m.at(col, c).clone();
                    let b = m.at(p, c).clone();
                    *m.at_mut(col, c) = b;
                    *m.at_mut(p, c) = a;
                }
            }
            let pivot = m.at(col, col).clone();
            det = det * pivot.clone();
            for r in col + 1..n {
                if m.at(r, col).is_zero() {
                    continue;
                }
                let factor = m.at(r, col).clone() / pivot.clone();
                for c in col..n {
                    let v = m.at(r, c).clone() - factor.clone() * m.at(col, c).clone();
                    *m.at_mut(r, c) = v;
                }
            }
        }
        det
    }
}

/// One particular solution of `m x = b`, if any.
pub fn solve_particular<S: Scalar>(m: &Mat<S>, b: &[S]) -> Option<Vec<S>> {
    assert_eq!(b.len(), m.rows(), "solve: rhs length mismatch");
    let rhs = Mat::from_cols(m.rows(), &[b.to_vec()]);
    let aug = m.hcat(&rhs);
    let (r, pivots) = aug.rref();
    if pivots.contains(&m.cols()) {
        return None; // inconsistent system
    }
    let mut x = vec![S::zero(); m.cols()];
    for (i, &p) in pivots.iter().enumerate() {
        x[p] = r.at(i, m.cols()).clone();
    }
    Some(x)
}

/// Is `v` inside the span of `span`?
pub fn in_span<S: Scalar>(span: &[Vec<S>], v: &[S]) -> bool {
    if span.is_empty() {
        return v.iter().all(|x| x.is_zero());
    }
    let m = Mat::from_cols(v.len(), span);
    solve_particular(&m, v).is_some()
}

/// Keeps, in order, the vectors that are independent of everything kept so far.
pub fn greedy_independent<S: Scalar>(vecs: &[Vec<S>]) -> Vec<Vec<S>> {
    let mut kept: Vec<Vec<S>> = Vec::new();
    for v in vecs {
        if v.iter().all(|x| x.is_zero()) {
            continue;
        }
        if !in_span(&kept, v) {
            kept.push(v.clone());
        }
    }
    kept
}

/// Extends `start` to a spanning set by greedily appending vectors from
/// `candidates`; returns only the appended vectors.
pub fn greedy_complement<S: Scalar>(start: &[Vec<S>], candidates: &[Vec<S>]) -> Vec<Vec<S>> {
    let mut span: Vec<Vec<S>> = start.to_vec();
    let mut appended = Vec::new();
    for v in candidates {
        if !in_span(&span, v) {
            span.push(v.clone());
            appended.push(v.clone());
        }
    }
    appended
}

/// Coordinates of `v` in the given basis (columns), exact.
pub fn coords_in_basis<S: Scalar>(basis: &[Vec<S>], v: &[S]) -> Result<Vec<S>, LinAlgError> {
    if basis.is_empty() {
        return if v.iter().all(|x| x.is_zero()) {
            Ok(Vec::new())
        } else {
            Err(LinAlgError::OutsideSpan)
        };
    }
    let m = Mat::from_cols(v.len(), basis);
    solve_particular(&m, v).ok_or(LinAlgError::OutsideSpan)
}

/// Determinant of the coordinate matrix of `vectors` in `frame`.
/// `vectors[i] = sum_j coords[i][j] frame[j]`; returns `det(coords)`.
pub fn wedge_coords_det<S: Scalar>(
    frame: &[Vec<S>],
    vectors: &[Vec<S>],
) -> Result<S, LinAlgError> {
    if vectors.len() != frame.len() {
        return Err(LinAlgError::DimensionMismatch(format!(
            "wedge degree {} vs frame size {}",
            vectors.len(),
            frame.len()
        )));
    }
    let coords: Result<Vec<Vec<S>>, _> =
        vectors.iter().map(|v| coords_in_basis(frame, v)).collect();
    Ok(Mat::from_rows(coords?)?.det())
}

/// Deterministic cokernel representatives: standard basis vectors appended
/// greedily to a basis of the column space.
pub fn cokernel_basis<S: Scalar>(m: &Mat<S>) -> Vec<Vec<S>> {
    let im: Vec<Vec<S>> = {
        let pivots = m.rref().1;
        pivots.iter().map(|&c| m.col(c)).collect()
    };
    let std: Vec<Vec<S>> = (0..m.rows())
        .map(|i| {
            let mut e = vec![S::zero(); m.rows()];
            e[i] = S::one();
            e
        })
        .collect();
    greedy_complement(&im, &std)
}

/// Deterministic basis of the preimage `m^{-1}(span f)`.
pub fn preimage_basis<S: Scalar>(m: &Mat<S>, f: &[Vec<S>]) -> Vec<Vec<S>> {
    if f.is_empty() {
        return m.kernel_basis();
    }
    // (x, c) with m x = f c  <=>  [m | -F](x; c) = 0
    let mut neg_f = Mat::from_cols(m.rows(), f);
    for r in 0..neg_f.rows() {
        for c in 0..neg_f.cols() {
            let v = -neg_f.at(r, c).clone();
            *neg_f.at_mut(r, c) = v;
        }
    }
    let aug = m.hcat(&neg_f);
    let projected: Vec<Vec<S>> =
        aug.kernel_basis().into_iter().map(|v| v[..m.cols()].to_vec()).collect();
    greedy_independent(&projected)
}
