//! Exact scalar arithmetic for the identity suites.
//!
//! The soldering matrices carry factors of `1/sqrt(2)` and the splitting
//! expansion carries `2^(-n/2)`, so plain Gaussian rationals are not enough.
//! We work in the ring Q(i)[sqrt2]: elements `(a + b*sqrt2)` with `a`, `b`
//! Gaussian rationals over reduced `i128` fractions. All operations are
//! overflow-checked; the suites use small seeded coefficients so the
//! fractions stay far from the `i128` range.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

fn gcd(mut a: i128, mut b: i128) -> i128 {
    a = a.abs();
    b = b.abs();
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a.max(1)
}

/// Reduced fraction over i128 with overflow-checked arithmetic.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Rat {
    num: i128,
    den: i128, // > 0
}

impl Rat {
    pub const ZERO: Rat = Rat { num: 0, den: 1 };
    pub const ONE: Rat = Rat { num: 1, den: 1 };

    pub fn new(num: i128, den: i128) -> Rat {
        assert!(den != 0, "zero denominator");
        let s = if den < 0 { -1 } else { 1 };
        let g = gcd(num, den);
        Rat {
            num: s * num / g,
            den: s * den / g,
        }
    }

    pub fn from_int(n: i128) -> Rat {
        Rat { num: n, den: 1 }
    }

    pub fn num(&self) -> i128 {
        self.num
    }

    pub fn den(&self) -> i128 {
        self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    pub fn abs(&self) -> Rat {
        Rat {
            num: self.num.abs(),
            den: self.den,
        }
    }

    fn mul_checked(a: Rat, b: Rat) -> Rat {
        if a.num == 0 || b.num == 0 {
            return Rat::ZERO;
        }
        if a.den == 1 && b.den == 1 {
            return Rat {
                num: a.num.checked_mul(b.num).expect("rational overflow (mul)"),
                den: 1,
            };
        }
        // cross-reduce before multiplying to keep intermediates small
        let g1 = gcd(a.num, b.den);
        let g2 = gcd(b.num, a.den);
        let num = (a.num / g1)
            .checked_mul(b.num / g2)
            .expect("rational overflow (mul)");
        let den = (a.den / g2)
            .checked_mul(b.den / g1)
            .expect("rational overflow (mul)");
        Rat::new(num, den)
    }

    fn add_checked(a: Rat, b: Rat) -> Rat {
        if a.num == 0 {
            return b;
        }
        if b.num == 0 {
            return a;
        }
        if a.den == 1 && b.den == 1 {
            return Rat {
                num: a.num.checked_add(b.num).expect("rational overflow (add)"),
                den: 1,
            };
        }
        let g = gcd(a.den, b.den);
        let da = a.den / g;
        let db = b.den / g;
        let num = a
            .num
            .checked_mul(db)
            .and_then(|x| b.num.checked_mul(da).and_then(|y| x.checked_add(y)))
            .expect("rational overflow (add)");
        let den = a
            .den
            .checked_mul(db)
            .expect("rational overflow (add)");
        Rat::new(num, den)
    }

    pub fn recip(&self) -> Rat {
        assert!(self.num != 0, "division by zero rational");
        Rat::new(self.den, self.num)
    }
}

impl Add for Rat {
    type Output = Rat;
    fn add(self, o: Rat) -> Rat {
        Rat::add_checked(self, o)
    }
}
impl Sub for Rat {
    type Output = Rat;
    fn sub(self, o: Rat) -> Rat {
        Rat::add_checked(self, -o)
    }
}
impl Mul for Rat {
    type Output = Rat;
    fn mul(self, o: Rat) -> Rat {
        Rat::mul_checked(self, o)
    }
}
impl Neg for Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat {
            num: -self.num,
            den: self.den,
        }
    }
}

impl fmt::Debug for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

/// Element of Q(i)[sqrt2]: `(ra + i*ia) + (rb + i*ib) * sqrt2`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Exact {
    pub ra: Rat,
    pub ia: Rat,
    pub rb: Rat,
    pub ib: Rat,
}

impl Exact {
    pub const ZERO: Exact = Exact {
        ra: Rat::ZERO,
        ia: Rat::ZERO,
        rb: Rat::ZERO,
        ib: Rat::ZERO,
    };

    pub fn from_ratio(n: i128, d: i128) -> Exact {
        Exact {
            ra: Rat::new(n, d),
            ia: Rat::ZERO,
            rb: Rat::ZERO,
            ib: Rat::ZERO,
        }
    }

    pub fn from_int(n: i128) -> Exact {
        Exact::from_ratio(n, 1)
    }

    pub fn one() -> Exact {
        Exact::from_int(1)
    }

    pub fn i() -> Exact {
        Exact {
            ra: Rat::ZERO,
            ia: Rat::ONE,
            rb: Rat::ZERO,
            ib: Rat::ZERO,
        }
    }

    /// sqrt2 as a ring element.
    pub fn sqrt2() -> Exact {
        Exact {
            ra: Rat::ZERO,
            ia: Rat::ZERO,
            rb: Rat::ONE,
            ib: Rat::ZERO,
        }
    }

    /// 1/sqrt2 = sqrt2 / 2.
    pub fn inv_sqrt2() -> Exact {
        Exact {
            ra: Rat::ZERO,
            ia: Rat::ZERO,
            rb: Rat::new(1, 2),
            ib: Rat::ZERO,
        }
    }

    pub fn from_rationals(re: Rat, im: Rat) -> Exact {
        Exact {
            ra: re,
            ia: im,
            rb: Rat::ZERO,
            ib: Rat::ZERO,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.ra.is_zero() && self.ia.is_zero() && self.rb.is_zero() && self.ib.is_zero()
    }

    pub fn conj(&self) -> Exact {
        Exact {
            ra: self.ra,
            ia: -self.ia,
            rb: self.rb,
            ib: -self.ib,
        }
    }

    /// Rational part must be pure (no sqrt2, no imaginary part).
    pub fn as_rational(&self) -> Option<Rat> {
        if self.ia.is_zero() && self.rb.is_zero() && self.ib.is_zero() {
            Some(self.ra)
        } else {
            None
        }
    }

    pub fn to_complex(&self) -> num_complex::Complex64 {
        let s = std::f64::consts::SQRT_2;
        num_complex::Complex64::new(
            self.ra.to_f64() + s * self.rb.to_f64(),
            self.ia.to_f64() + s * self.ib.to_f64(),
        )
    }

    pub fn scale_ratio(&self, n: i128, d: i128) -> Exact {
        let r = Rat::new(n, d);
        Exact {
            ra: self.ra * r,
            ia: self.ia * r,
            rb: self.rb * r,
            ib: self.ib * r,
        }
    }
}

impl Add for Exact {
    type Output = Exact;
    fn add(self, o: Exact) -> Exact {
        Exact {
            ra: self.ra + o.ra,
            ia: self.ia + o.ia,
            rb: self.rb + o.rb,
            ib: self.ib + o.ib,
        }
    }
}
impl Sub for Exact {
    type Output = Exact;
    fn sub(self, o: Exact) -> Exact {
        self + (-o)
    }
}
impl Neg for Exact {
    type Output = Exact;
    fn neg(self) -> Exact {
        Exact {
            ra: -self.ra,
            ia: -self.ia,
            rb: -self.rb,
            ib: -self.ib,
        }
    }
}

impl Mul for Exact {
    type Output = Exact;
    fn mul(self, o: Exact) -> Exact {
        // (A + B s)(C + D s) = (AC + 2 BD) + (AD + BC) s, with A,B,C,D Gaussian.
        let two = Rat::from_int(2);
        // complex products: (x + iy)(u + iv) = (xu - yv) + i(xv + yu)
        let ac_re = self.ra * o.ra - self.ia * o.ia;
        let ac_im = self.ra * o.ia + self.ia * o.ra;
        let bd_re = self.rb * o.rb - self.ib * o.ib;
        let bd_im = self.rb * o.ib + self.ib * o.rb;
        let ad_re = self.ra * o.rb - self.ia * o.ib;
        let ad_im = self.ra * o.ib + self.ia * o.rb;
        let bc_re = self.rb * o.ra - self.ib * o.ia;
        let bc_im = self.rb * o.ia + self.ib * o.ra;
        Exact {
            ra: ac_re + two * bd_re,
            ia: ac_im + two * bd_im,
            rb: ad_re + bc_re,
            ib: ad_im + bc_im,
        }
    }
}

impl fmt::Debug for Exact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({:?}+{:?}i)+({:?}+{:?}i)r2",
            self.ra, self.ia, self.rb, self.ib
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_reduction() {
        let r = Rat::new(6, -4);
        assert_eq!(r.num(), -3);
        assert_eq!(r.den(), 2);
        assert_eq!(Rat::new(0, 7), Rat::ZERO);
    }

    #[test]
    fn sqrt2_squares_to_two() {
        let s = Exact::sqrt2();
        assert_eq!(s * s, Exact::from_int(2));
        let h = Exact::inv_sqrt2();
        assert_eq!(h * h, Exact::from_ratio(1, 2));
        assert_eq!(s * h, Exact::one());
    }

    #[test]
    fn complex_units() {
        let i = Exact::i();
        assert_eq!(i * i, -Exact::one());
        assert_eq!(i.conj(), -i);
    }

    #[test]
    fn to_complex_roundtrip() {
        let x = Exact::from_ratio(3, 4) + Exact::i().scale_ratio(1, 2) + Exact::sqrt2();
        let z = x.to_complex();
        assert!((z.re - (0.75 + std::f64::consts::SQRT_2)).abs() < 1e-15);
        assert!((z.im - 0.5).abs() < 1e-15);
    }
}
