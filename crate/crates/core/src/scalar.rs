//! Scalar abstractions: an exact field scalar for the algebraic modules and a
//! floating-point scalar for the numerical ones.

use std::fmt::{Debug, Display};

use num_traits::{FromPrimitive, Num, Signed};

/// Field scalar for the exact modules (row reduction, wedges, Weyl
/// coefficients). Satisfied by `num_rational::BigRational` as well as by
/// `f64`; the shipped binaries and test suites instantiate it with the former
/// so that every result is exact.
pub trait Scalar:
    Num + Signed + Clone + PartialEq + PartialOrd + Debug + Display + FromPrimitive + 'static
{
    fn from_int(v: i64) -> Self {
        Self::from_i64(v).expect("integer representable in scalar")
    }
}

impl<T> Scalar for T where
    T: Num + Signed + Clone + PartialEq + PartialOrd + Debug + Display + FromPrimitive + 'static
{
}

/// Floating-point scalar for the symplectic-path and spectral routines
/// (f32 or f64).
pub trait RealScalar: nalgebra::RealField + FromPrimitive + Copy {}

impl<T> RealScalar for T where T: nalgebra::RealField + FromPrimitive + Copy {}
