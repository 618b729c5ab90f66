//! Symmetric valence-k spinors over an arbitrary component backend.
//!
//! Components are indexed by the number of dyad indices equal to 1, all
//! indices down, so a valence-k spinor stores k+1 components. Index raising
//! uses `e01 = 1` with `phi^A = eps^{AB} phi_B` and `phi_A = phi^B eps_{BA}`.
//!
//! Transvection (j-fold contraction of two symmetric spinors followed by
//! symmetrization) is computed by the classical transvectant formula for the
//! associated binary forms; `tensor::transvect_oracle` is the independent
//! full-tensor reference path.

use crate::error::{Result, SpinError};
use crate::field::Component;
use crate::scalar::{binom, Ring};

#[derive(Clone, PartialEq)]
pub struct Spinor<C> {
    valence: usize,
    comps: Vec<C>,
}

impl<C: std::fmt::Debug> std::fmt::Debug for Spinor<C> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Spinor(k={}, {:?})", self.valence, self.comps)
    }
}

impl<C> Spinor<C> {
    pub fn new(valence: usize, comps: Vec<C>) -> Self {
        assert_eq!(comps.len(), valence + 1, "component count must be valence+1");
        Spinor { valence, comps }
    }

    /// Alias used by backends whose components are not `Component`s
    /// (grid fields).
    pub fn new_unchecked(valence: usize, comps: Vec<C>) -> Self {
        Spinor::new(valence, comps)
    }

    pub fn scalar(c: C) -> Self {
        Spinor {
            valence: 0,
            comps: vec![c],
        }
    }

    pub fn valence(&self) -> usize {
        self.valence
    }

    pub fn comps(&self) -> &[C] {
        &self.comps
    }

    pub fn comp(&self, i: usize) -> &C {
        &self.comps[i]
    }

    pub fn comps_mut(&mut self) -> &mut [C] {
        &mut self.comps
    }
}

impl<C: Component> Spinor<C> {
    pub fn zero(valence: usize) -> Self {
        Spinor {
            valence,
            comps: vec![C::zero(); valence + 1],
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!(self.valence, o.valence);
        Spinor {
            valence: self.valence,
            comps: self
                .comps
                .iter()
                .zip(&o.comps)
                .map(|(a, b)| a.add(b))
                .collect(),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        assert_eq!(self.valence, o.valence);
        Spinor {
            valence: self.valence,
            comps: self
                .comps
                .iter()
                .zip(&o.comps)
                .map(|(a, b)| a.sub(b))
                .collect(),
        }
    }

    pub fn neg(&self) -> Self {
        self.map(|c| c.neg())
    }

    pub fn scale(&self, c: &C::R) -> Self {
        self.map(|v| v.scale(c))
    }

    pub fn scale_ratio(&self, n: i128, d: i128) -> Self {
        self.map(|v| v.scale_ratio(n, d))
    }

    pub fn map(&self, f: impl Fn(&C) -> C) -> Self {
        Spinor {
            valence: self.valence,
            comps: self.comps.iter().map(f).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(|c| c.is_zero())
    }

    /// Componentwise derivative (a derivative of each scalar component,
    /// not a spinor operator).
    pub fn derive(&self, axis: usize) -> Self {
        self.map(|c| c.derive(axis))
    }

    /// Hermitian conjugate spinor in the shipped tau gauge:
    /// `hat(phi)_i = (-1)^(k-i) conj(phi_{k-i})`.
    pub fn hat(&self) -> Self {
        let k = self.valence;
        let comps = (0..=k)
            .map(|i| {
                let c = self.comps[k - i].conjugate();
                if (k - i) % 2 == 1 {
                    c.neg()
                } else {
                    c
                }
            })
            .collect();
        Spinor { valence: k, comps }
    }

    /// j-fold transvection: symmetrized j-fold eps-contraction, with the
    /// contracted indices down on `self` and raised on `other`.
    pub fn transvect(&self, other: &Self, j: usize) -> Result<Self> {
        let (p, q) = (self.valence, other.valence);
        if j > p.min(q) {
            return Err(SpinError::Contract(format!(
                "transvection count {} exceeds min valence of ({}, {})",
                j, p, q
            )));
        }
        let r = p + q - 2 * j;

        // binary-form coefficient arrays c_alpha = C(p,alpha) * comp_alpha
        let fc: Vec<C> = (0..=p)
            .map(|a| self.comps[a].scale_ratio(binom(p, a), 1))
            .collect();
        let gc: Vec<C> = (0..=q)
            .map(|a| other.comps[a].scale_ratio(binom(q, a), 1))
            .collect();

        // h = (p-j)!(q-j)!/(p!q!) * sum_m (-1)^m C(j,m) f^(j-m,m) g^(m,j-m)
        let mut h: Vec<C> = vec![C::zero(); r + 1];
        for m in 0..=j {
            let f_d = form_derivative(&fc, p, j - m, m);
            let g_d = form_derivative(&gc, q, m, j - m);
            let sign = if m % 2 == 0 { 1 } else { -1 };
            let cjm = binom(j, m) * sign;
            // polynomial product: f_d has z1-degrees 0..=(p-j), g_d 0..=(q-j)
            for (af, vf) in f_d.iter().enumerate() {
                if vf.is_zero() {
                    continue;
                }
                for (ag, vg) in g_d.iter().enumerate() {
                    if vg.is_zero() {
                        continue;
                    }
                    let t = vf.mul(vg).scale_ratio(cjm, 1);
                    h[af + ag] = h[af + ag].add(&t);
                }
            }
        }

        let norm_n = factorial(p - j) * factorial(q - j);
        let norm_d = factorial(p) * factorial(q);
        let comps = (0..=r)
            .map(|g| h[g].scale_ratio(norm_n, norm_d * binom(r, g)))
            .collect();
        Ok(Spinor { valence: r, comps })
    }

    /// Contract the first index against an upper-index spinor w^A
    /// (plain slot sum, no eps).
    pub fn contract_up(&self, w: &[C::R; 2]) -> Self {
        assert!(self.valence >= 1);
        let k = self.valence;
        let comps = (0..k)
            .map(|i| self.comps[i].scale(&w[0]).add(&self.comps[i + 1].scale(&w[1])))
            .collect();
        Spinor {
            valence: k - 1,
            comps,
        }
    }
}

impl<R: crate::field::RingField> Spinor<R> {
    /// Pointwise squared norm `phi . hat(phi)` = sum_i C(k,i) |phi_i|^2.
    pub fn norm_sq(&self) -> R {
        let k = self.valence;
        let mut acc = <R as Ring>::zero();
        for i in 0..=k {
            let m = self.comps[i].clone() * Ring::conjugate(&self.comps[i]);
            acc = acc + m * R::from_int(binom(k, i));
        }
        acc
    }
}

/// Coefficient array of d^a/dz0^a d^b/dz1^b applied to a binary form of
/// degree p given by its coefficient array (index = z1-degree).
fn form_derivative<C: Component>(c: &[C], p: usize, a: usize, b: usize) -> Vec<C> {
    if a + b > p {
        return vec![];
    }
    let deg = p - a - b;
    (0..=deg)
        .map(|al| {
            // source term: z1-degree al+b, z0-degree p-al-b; falling factors
            // count down from the source exponents
            let src = &c[al + b];
            let f = falling((p - al - b) as i128, a) * falling((al + b) as i128, b);
            src.scale_ratio(f, 1)
        })
        .collect()
}

fn falling(n: i128, k: usize) -> i128 {
    let mut r = 1i128;
    for j in 0..k as i128 {
        r *= n - j;
    }
    r
}

fn factorial(n: usize) -> i128 {
    (1..=n as i128).product::<i128>().max(1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::Exact;

    fn sp(vals: &[i128]) -> Spinor<Exact> {
        Spinor::new(
            vals.len() - 1,
            vals.iter().map(|&v| Exact::from_int(v)).collect(),
        )
    }

    #[test]
    fn transvect_basis_pair() {
        // A = (1,0), B = (0,1), one contraction: A_B B^B = 1
        let a = sp(&[1, 0]);
        let b = sp(&[0, 1]);
        let r = a.transvect(&b, 1).unwrap();
        assert_eq!(r.valence(), 0);
        assert_eq!(r.comp(0), &Exact::from_int(1));
    }

    #[test]
    fn transvect_symmetrized_outer() {
        // symmetrized outer product of (1,0) and (0,1): comps (0, 1/2, 0)
        let a = sp(&[1, 0]);
        let b = sp(&[0, 1]);
        let r = a.transvect(&b, 0).unwrap();
        assert_eq!(r.comps(), &[
            Exact::ZERO,
            Exact::from_ratio(1, 2),
            Exact::ZERO
        ]);
    }

    #[test]
    fn transvect_valence2_full() {
        // phi_{BC} phi^{BC} = 2(phi_0 phi_2 - phi_1^2)
        let phi = sp(&[2, 3, 5]);
        let r = phi.transvect(&phi, 2).unwrap();
        assert_eq!(r.comp(0), &Exact::from_int(2 * (2 * 5 - 9)));
    }

    #[test]
    fn transvect_rejects_overcontraction() {
        let a = sp(&[1, 0]);
        assert!(a.transvect(&a, 2).is_err());
    }

    #[test]
    fn hat_involution_sign() {
        let phi = Spinor::new(
            3,
            vec![
                Exact::from_int(1) + Exact::i(),
                Exact::from_int(2),
                Exact::i().scale_ratio(3, 2),
                Exact::from_ratio(-1, 3),
            ],
        );
        let hh = phi.hat().hat();
        // hat^2 = (-1)^k with k = 3
        assert_eq!(hh, phi.neg());
    }

    #[test]
    fn norm_is_binomial_weighted() {
        let phi = sp(&[1, 2, 1]);
        // 1*1 + 2*4 + 1*1 = 10
        assert_eq!(phi.norm_sq(), Exact::from_int(10));
    }
}
