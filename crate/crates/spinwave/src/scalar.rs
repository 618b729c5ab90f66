//! Coefficient ring abstraction: the spinor calculus is written once and
//! instantiated with exact `Q(i)[sqrt2]` scalars for the identity suites and
//! with `Complex64` for quadrature, grids and symbols.

use crate::exact::Exact;
use num_complex::Complex64;

pub trait Ring:
    Clone
    + PartialEq
    + std::fmt::Debug
    + std::ops::Add<Output = Self>
    + std::ops::Sub<Output = Self>
    + std::ops::Mul<Output = Self>
    + std::ops::Neg<Output = Self>
    + Send
    + Sync
    + 'static
{
    fn zero() -> Self;
    fn one() -> Self;
    fn from_ratio(n: i128, d: i128) -> Self;
    fn imag_unit() -> Self;
    fn sqrt2() -> Self;
    fn inv_sqrt2() -> Self;
    fn conjugate(&self) -> Self;
    fn is_zero(&self) -> bool;
    fn to_c64(&self) -> Complex64;

    fn from_int(n: i128) -> Self {
        Self::from_ratio(n, 1)
    }
}

impl Ring for Exact {
    fn zero() -> Self {
        Exact::ZERO
    }
    fn one() -> Self {
        Exact::one()
    }
    fn from_ratio(n: i128, d: i128) -> Self {
        Exact::from_ratio(n, d)
    }
    fn imag_unit() -> Self {
        Exact::i()
    }
    fn sqrt2() -> Self {
        Exact::sqrt2()
    }
    fn inv_sqrt2() -> Self {
        Exact::inv_sqrt2()
    }
    fn conjugate(&self) -> Self {
        Exact::conj(self)
    }
    fn is_zero(&self) -> bool {
        Exact::is_zero(self)
    }
    fn to_c64(&self) -> Complex64 {
        self.to_complex()
    }
}

impl Ring for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn from_ratio(n: i128, d: i128) -> Self {
        Complex64::new(n as f64 / d as f64, 0.0)
    }
    fn imag_unit() -> Self {
        Complex64::new(0.0, 1.0)
    }
    fn sqrt2() -> Self {
        Complex64::new(std::f64::consts::SQRT_2, 0.0)
    }
    fn inv_sqrt2() -> Self {
        Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0)
    }
    fn conjugate(&self) -> Self {
        self.conj()
    }
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn to_c64(&self) -> Complex64 {
        *self
    }
}

/// n choose k as i128 (valences are small).
pub fn binom(n: usize, k: usize) -> i128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut r: i128 = 1;
    for j in 0..k {
        r = r * (n - j) as i128 / (j + 1) as i128;
    }
    r
}

/// (-2)^(-n) as a ratio (sign, denominator power).
pub fn neg_two_pow(e: i32) -> (i128, i128) {
    let s = if e.rem_euclid(2) == 0 { 1 } else { -1 };
    if e >= 0 {
        (s * (1i128 << e), 1)
    } else {
        (s, 1i128 << (-e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomials() {
        assert_eq!(binom(8, 3), 56);
        assert_eq!(binom(4, 0), 1);
        assert_eq!(binom(3, 5), 0);
    }

    #[test]
    fn neg_two_powers() {
        assert_eq!(neg_two_pow(2), (4, 1));
        assert_eq!(neg_two_pow(-3), (-1, 8));
        assert_eq!(neg_two_pow(0), (1, 1));
        assert_eq!(neg_two_pow(1), (-2, 1));
    }
}
