//! Z/2 gradings and multiplicative signs.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg};

use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;

/// A Z/2 grading. `Z2::ONE` marks odd symbols.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Z2(pub u8);

impl Z2 {
    pub const ZERO: Z2 = Z2(0);
    pub const ONE: Z2 = Z2(1);

    pub fn new(v: impl Into<i64>) -> Z2 {
        Z2((v.into().rem_euclid(2)) as u8)
    }

    pub fn is_odd(self) -> bool {
        self.0 == 1
    }
}

impl Add for Z2 {
    type Output = Z2;
    fn add(self, rhs: Z2) -> Z2 {
        Z2(self.0 ^ rhs.0)
    }
}

impl AddAssign for Z2 {
    fn add_assign(&mut self, rhs: Z2) {
        self.0 ^= rhs.0;
    }
}

impl Mul for Z2 {
    type Output = Z2;
    fn mul(self, rhs: Z2) -> Z2 {
        Z2(self.0 & rhs.0)
    }
}

impl fmt::Debug for Z2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Z2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A multiplicative sign, kept separate from scalars so the sign calculus
/// stays independent of the coefficient field.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    /// `(-1)^k`.
    pub fn from_parity(k: impl Into<i64>) -> Sign {
        if k.into().rem_euclid(2) == 0 {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }

    /// Koszul sign of transposing symbols of the given gradings.
    pub fn koszul(a: Z2, b: Z2) -> Sign {
        if (a * b).is_odd() {
            Sign::Minus
        } else {
            Sign::Plus
        }
    }

    pub fn of_scalar<S: Scalar>(v: &S) -> Option<Sign> {
        if v.is_positive() {
            Some(Sign::Plus)
        } else if v.is_negative() {
            Some(Sign::Minus)
        } else {
            None
        }
    }

    pub fn to_scalar<S: Scalar>(self) -> S {
        match self {
            Sign::Plus => S::one(),
            Sign::Minus => -S::one(),
        }
    }

    pub fn to_i64(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn is_minus(self) -> bool {
        self == Sign::Minus
    }
}

impl Mul for Sign {
    type Output = Sign;
    fn mul(self, rhs: Sign) -> Sign {
        if self == rhs {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

impl MulAssign for Sign {
    fn mul_assign(&mut self, rhs: Sign) {
        *self = *self * rhs;
    }
}

impl Neg for Sign {
    type Output = Sign;
    fn neg(self) -> Sign {
        self * Sign::Minus
    }
}

impl fmt::Debug for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", if self.is_minus() { "-1" } else { "+1" })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn z2_arithmetic() {
        assert_eq!(Z2::new(5), Z2::ONE);
        assert_eq!(Z2::new(-3), Z2::ONE);
        assert_eq!(Z2::ONE + Z2::ONE, Z2::ZERO);
        assert_eq!(Z2::ONE * Z2::ZERO, Z2::ZERO);
    }

    #[test]
    fn sign_rules() {
        assert_eq!(Sign::from_parity(-1), Sign::Minus);
        assert_eq!(Sign::koszul(Z2::ONE, Z2::ONE), Sign::Minus);
        assert_eq!(Sign::koszul(Z2::ONE, Z2::ZERO), Sign::Plus);
        assert_eq!(Sign::Minus * Sign::Minus, Sign::Plus);
        assert_eq!(Sign::Minus.to_scalar::<crate::Rat>(), -crate::Rat::from_int(1));
    }
}
