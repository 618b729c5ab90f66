//! Scalar backends for spinor components.
//!
//! A `Component` is anything the operator layer can differentiate and take
//! linear combinations of: exact polynomials, closed-form radial profiles,
//! or plain ring constants (valence-k spinor *values* are fields with
//! constant components).

use crate::poly::Poly;
use crate::scalar::Ring;

pub trait Component: Clone + Send + Sync + 'static {
    type R: Ring;

    fn zero() -> Self;
    fn from_scalar(c: Self::R) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn scale(&self, c: &Self::R) -> Self;
    fn scale_ratio(&self, n: i128, d: i128) -> Self {
        self.scale(&Self::R::from_ratio(n, d))
    }
    fn mul(&self, o: &Self) -> Self;
    /// Exact partial derivative along axis 0, 1 or 2.
    fn derive(&self, axis: usize) -> Self;
    fn conjugate(&self) -> Self;
    fn is_zero(&self) -> bool;
}

impl<R: Ring> Component for Poly<R> {
    type R = R;

    fn zero() -> Self {
        Poly::zero()
    }
    fn from_scalar(c: R) -> Self {
        Poly::constant(c)
    }
    fn add(&self, o: &Self) -> Self {
        Poly::add(self, o)
    }
    fn sub(&self, o: &Self) -> Self {
        Poly::sub(self, o)
    }
    fn neg(&self) -> Self {
        Poly::neg(self)
    }
    fn scale(&self, c: &R) -> Self {
        Poly::scale(self, c)
    }
    fn mul(&self, o: &Self) -> Self {
        Poly::mul(self, o)
    }
    fn derive(&self, axis: usize) -> Self {
        Poly::derive(self, axis)
    }
    fn conjugate(&self) -> Self {
        Poly::conjugate(self)
    }
    fn is_zero(&self) -> bool {
        Poly::is_zero(self)
    }
}

/// Ring elements as constant fields; derivatives vanish.
macro_rules! const_component {
    ($t:ty) => {
        impl Component for $t {
            type R = $t;

            fn zero() -> Self {
                <$t as Ring>::zero()
            }
            fn from_scalar(c: $t) -> Self {
                c
            }
            fn add(&self, o: &Self) -> Self {
                self.clone() + o.clone()
            }
            fn sub(&self, o: &Self) -> Self {
                self.clone() - o.clone()
            }
            fn neg(&self) -> Self {
                -self.clone()
            }
            fn scale(&self, c: &Self) -> Self {
                self.clone() * c.clone()
            }
            fn mul(&self, o: &Self) -> Self {
                self.clone() * o.clone()
            }
            fn derive(&self, _axis: usize) -> Self {
                <$t as Ring>::zero()
            }
            fn conjugate(&self) -> Self {
                Ring::conjugate(self)
            }
            fn is_zero(&self) -> bool {
                Ring::is_zero(self)
            }
        }
    };
}

const_component!(crate::exact::Exact);
const_component!(num_complex::Complex64);

/// Rings usable directly as constant components (spinor *values*).
pub trait RingField: Ring + Component<R = Self> {}
impl<T: Ring + Component<R = T>> RingField for T {}
