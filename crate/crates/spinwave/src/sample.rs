//! Seeded random polynomial spinor fields with exact coefficients.

use crate::exact::{Exact, Rat};
use crate::poly::Poly;
use crate::spinor::Spinor;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Reproducible random valence-k spinor field whose components are dense
/// polynomials of the given degree with small Gaussian-rational
/// coefficients.
pub fn random_poly_spinor(valence: usize, degree: usize, seed: u64) -> Spinor<Poly<Exact>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let comps = (0..=valence)
        .map(|_| random_poly(degree, &mut rng))
        .collect();
    Spinor::new(valence, comps)
}

pub fn random_poly(degree: usize, rng: &mut ChaCha8Rng) -> Poly<Exact> {
    let mut p = Poly::zero();
    for a in 0..=degree {
        for b in 0..=(degree - a) {
            for c in 0..=(degree - a - b) {
                let re = nonzero_small(rng);
                let im = nonzero_small(rng);
                let den = if rng.gen_bool(0.25) { 2 } else { 1 };
                let coeff = Exact {
                    ra: Rat::new(re, den),
                    ia: Rat::new(im, den),
                    rb: Rat::ZERO,
                    ib: Rat::ZERO,
                };
                p.add_term((a as u8, b as u8, c as u8), coeff);
            }
        }
    }
    p
}

fn nonzero_small(rng: &mut ChaCha8Rng) -> i128 {
    let v: i128 = rng.gen_range(-5..=5);
    if v == 0 {
        1
    } else {
        v
    }
}
