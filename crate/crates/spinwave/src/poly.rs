//! Sparse polynomials in three variables with ring coefficients.
//!
//! These serve double duty: polynomial scalar fields on the slice (the
//! variables are x, y, z) and operator symbols (the variables are the three
//! covector components).

use crate::scalar::Ring;
use std::collections::BTreeMap;

pub type Mono = (u8, u8, u8);

#[derive(Clone, PartialEq)]
pub struct Poly<R: Ring> {
    terms: BTreeMap<Mono, R>,
}

impl<R: Ring> Poly<R> {
    pub fn zero() -> Self {
        Poly {
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(c: R) -> Self {
        let mut p = Poly::zero();
        if !c.is_zero() {
            p.terms.insert((0, 0, 0), c);
        }
        p
    }

    pub fn monomial(m: Mono, c: R) -> Self {
        let mut p = Poly::zero();
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    pub fn var(axis: usize) -> Self {
        let m = match axis {
            0 => (1, 0, 0),
            1 => (0, 1, 0),
            _ => (0, 0, 1),
        };
        Poly::monomial(m, R::one())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Mono, &R)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn degree(&self) -> usize {
        self.terms
            .keys()
            .map(|m| (m.0 + m.1 + m.2) as usize)
            .max()
            .unwrap_or(0)
    }

    pub fn add_term(&mut self, m: Mono, c: R) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(v) => {
                let s = v.clone() + c;
                if s.is_zero() {
                    self.terms.remove(&m);
                } else {
                    *v = s;
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut r = self.clone();
        for (m, c) in o.terms.iter() {
            r.add_term(*m, c.clone());
        }
        r
    }

    pub fn sub(&self, o: &Self) -> Self {
        let mut r = self.clone();
        for (m, c) in o.terms.iter() {
            r.add_term(*m, -c.clone());
        }
        r
    }

    pub fn neg(&self) -> Self {
        let mut r = Poly::zero();
        for (m, c) in self.terms.iter() {
            r.terms.insert(*m, -c.clone());
        }
        r
    }

    pub fn scale(&self, c: &R) -> Self {
        let mut r = Poly::zero();
        if c.is_zero() {
            return r;
        }
        for (m, v) in self.terms.iter() {
            let p = v.clone() * c.clone();
            if !p.is_zero() {
                r.terms.insert(*m, p);
            }
        }
        r
    }

    pub fn scale_ratio(&self, n: i128, d: i128) -> Self {
        self.scale(&R::from_ratio(n, d))
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut r = Poly::zero();
        for (m1, c1) in self.terms.iter() {
            for (m2, c2) in o.terms.iter() {
                let m = (m1.0 + m2.0, m1.1 + m2.1, m1.2 + m2.2);
                r.add_term(m, c1.clone() * c2.clone());
            }
        }
        r
    }

    /// Exact partial derivative.
    pub fn derive(&self, axis: usize) -> Self {
        let mut r = Poly::zero();
        for (m, c) in self.terms.iter() {
            let e = match axis {
                0 => m.0,
                1 => m.1,
                _ => m.2,
            };
            if e == 0 {
                continue;
            }
            let dm = match axis {
                0 => (m.0 - 1, m.1, m.2),
                1 => (m.0, m.1 - 1, m.2),
                _ => (m.0, m.1, m.2 - 1),
            };
            r.add_term(dm, c.clone() * R::from_int(e as i128));
        }
        r
    }

    /// Coefficient-wise complex conjugation (the variables are real).
    pub fn conjugate(&self) -> Self {
        let mut r = Poly::zero();
        for (m, c) in self.terms.iter() {
            r.terms.insert(*m, c.conjugate());
        }
        r
    }

    pub fn eval_c64(&self, x: [num_complex::Complex64; 3]) -> num_complex::Complex64 {
        let mut acc = num_complex::Complex64::new(0.0, 0.0);
        for (m, c) in self.terms.iter() {
            let v = x[0].powi(m.0 as i32) * x[1].powi(m.1 as i32) * x[2].powi(m.2 as i32);
            acc += c.to_c64() * v;
        }
        acc
    }

    pub fn map_coeffs<S: Ring>(&self, f: impl Fn(&R) -> S) -> Poly<S> {
        let mut r = Poly::zero();
        for (m, c) in self.terms.iter() {
            let v = f(c);
            if !v.is_zero() {
                r.terms.insert(*m, v);
            }
        }
        r
    }
}

impl<R: Ring> std::fmt::Debug for Poly<R> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in self.terms.iter() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{:?}*x^{}y^{}z^{}", c, m.0, m.1, m.2)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::Exact;

    fn x() -> Poly<Exact> {
        Poly::var(0)
    }
    fn y() -> Poly<Exact> {
        Poly::var(1)
    }

    #[test]
    fn derive_product() {
        // d/dx (x^2 y) = 2 x y
        let p = x().mul(&x()).mul(&y());
        let d = p.derive(0);
        let expect = x().mul(&y()).scale_ratio(2, 1);
        assert_eq!(d, expect);
    }

    #[test]
    fn mixed_partials_commute() {
        let p = x().mul(&x()).mul(&y()).add(&y().mul(&y()).mul(&x()));
        assert_eq!(p.derive(0).derive(1), p.derive(1).derive(0));
    }

    #[test]
    fn zero_terms_are_dropped() {
        let p = x().sub(&x());
        assert!(p.is_zero());
        assert_eq!(p.num_terms(), 0);
    }
}
