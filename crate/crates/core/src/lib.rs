//! Exact-arithmetic building blocks for sign bookkeeping in symplectic field
//! theory: a graded Weyl algebra with normal ordering, the coherent-orientation
//! sign calculus for curve shapes, a finite-dimensional determinant-line
//! calculus over exact scalars, a brute-force boundary-identity verifier, and
//! a numerical Conley-Zehnder / spectral-gap toolbox.
//!
//! All algebraic modules are generic over the scalar type through
//! [`scalar::Scalar`]; the numerical module is generic over [`scalar::RealScalar`].
//! Concrete aliases live at the crate root: exact computations run over
//! [`Rat`], numerics over `f64`.

pub mod boundary;
pub mod czindex;
pub mod dataset;
pub mod detline;
pub mod linalg;
pub mod scalar;
pub mod sign;
pub mod signs;
pub mod tuples;
pub mod weyl;

/// Exact rational scalar used by the CLI and the default test suites.
pub type Rat = num_rational::BigRational;

/// Exact matrix over [`Rat`].
pub type RationalMatrix = linalg::Mat<Rat>;

/// Determinant-line element over [`Rat`].
pub type RationalDetElement = detline::DetElement<Rat>;

/// Weyl-algebra element over [`Rat`].
pub type RationalWeylElement = weyl::WeylElement<Rat>;

/// Default floating-point scalar for the numerical routines.
pub type Real = f64;
