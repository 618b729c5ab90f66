//! Formal wave jets and the exact 3+1 splitting check: expanding the
//! 2s-fold product of `(D + eps d_t / sqrt2)` against a jet whose time
//! derivatives close under the wave recursion must reproduce
//! `G curl chi_0 + G chi_1 / sqrt2` identically.

use crate::error::{Result, SpinError};
use crate::exact::Exact;
use crate::ops::OpCtx;
use crate::poly::Poly;
use crate::sample::random_poly_spinor;
use crate::scalar::binom;
use crate::soldering::Soldering;
use crate::spinor::Spinor;

type F = Poly<Exact>;

/// Taylor coefficients chi_n of a valence-2s solution of the spinor wave
/// equation, generated from Cauchy data by chi_{n+2} = -Lap chi_n.
pub struct WaveJet {
    pub two_s: usize,
    pub coeffs: Vec<Spinor<F>>,
}

impl WaveJet {
    pub fn from_data(
        sold: &Soldering<Exact>,
        chi0: Spinor<F>,
        chi1: Spinor<F>,
        order: usize,
    ) -> Result<WaveJet> {
        if chi0.valence() != chi1.valence() {
            return Err(SpinError::ValenceMismatch {
                op: "wave jet".into(),
                expected: format!("{}", chi0.valence()),
                found: chi1.valence(),
            });
        }
        let ctx = OpCtx::fields(sold);
        let two_s = chi0.valence();
        let mut coeffs = vec![chi0, chi1];
        while coeffs.len() <= order {
            let prev = &coeffs[coeffs.len() - 2];
            coeffs.push(ctx.laplacian(prev).neg());
        }
        Ok(WaveJet { two_s, coeffs })
    }

    /// Check the defining recursion (trivially true by construction; kept
    /// as an explicit oracle for mutated jets).
    pub fn satisfies_recursion(&self, sold: &Soldering<Exact>) -> bool {
        let ctx = OpCtx::fields(sold);
        self.coeffs.windows(3).all(|w| {
            let lap = ctx.laplacian(&w[0]);
            w[2].add(&lap).is_zero()
        })
    }
}

#[derive(Debug)]
pub struct SplittingReport {
    pub two_s: usize,
    pub trials: usize,
    pub failures: Vec<String>,
}

impl SplittingReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Expand `prod_i (D_{A_i}^{B_i} + eps_{A_i}^{B_i} d_t / sqrt2) chi` at
/// t = 0 using the jet, and compare exactly with
/// `G curl chi_0 + G chi_1 / sqrt2`.
pub fn splitting_residual(
    sold: &Soldering<Exact>,
    jet: &WaveJet,
) -> Result<Spinor<F>> {
    let ctx = OpCtx::fields(sold);
    let two_s = jet.two_s;
    if jet.coeffs.len() < two_s + 1 {
        return Err(SpinError::Precondition(
            "jet order must reach the valence".into(),
        ));
    }
    let mut lhs = Spinor::zero(two_s);
    let inv_s2 = Exact::inv_sqrt2();
    for n in 0..=two_s {
        let chain = ctx.sym_chain(&jet.coeffs[n], two_s - n);
        let mut c = Exact::from_int(binom(two_s, n));
        for _ in 0..n {
            c = c * inv_s2;
        }
        lhs = lhs.add(&chain.scale(&c));
    }
    let rhs = ctx
        .g_op(&ctx.curl(&jet.coeffs[0])?)?
        .add(&ctx.g_op(&jet.coeffs[1])?.scale(&inv_s2));
    Ok(lhs.sub(&rhs))
}

pub fn verify_splitting(
    sold: &Soldering<Exact>,
    two_s: usize,
    degree: usize,
    trials: usize,
    seed: u64,
) -> Result<SplittingReport> {
    if two_s < 1 {
        return Err(SpinError::Precondition("need 2s >= 1".into()));
    }
    let mut failures = Vec::new();
    for t in 0..trials {
        let s0 = seed.wrapping_add(2 * t as u64);
        let chi0 = random_poly_spinor(two_s, degree, s0);
        let chi1 = random_poly_spinor(two_s, degree, s0.wrapping_add(1));
        let jet = WaveJet::from_data(sold, chi0, chi1, two_s)?;
        let res = splitting_residual(sold, &jet)?;
        if !res.is_zero() {
            failures.push(format!("2s={}, seed={}: nonzero residual", two_s, s0));
        }
    }
    Ok(SplittingReport {
        two_s,
        trials,
        failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sold() -> Soldering<Exact> {
        Soldering::shipped()
    }

    #[test]
    fn spin_half_splitting_closed_form() {
        // phi = curl chi_0 + chi_1/sqrt2 exactly at 2s = 1
        let s = sold();
        let ctx = OpCtx::fields(&s);
        let chi0 = random_poly_spinor(1, 3, 31);
        let chi1 = random_poly_spinor(1, 3, 32);
        let jet = WaveJet::from_data(&s, chi0.clone(), chi1.clone(), 1).unwrap();
        let res = splitting_residual(&s, &jet).unwrap();
        assert!(res.is_zero());
        // and the right-hand side matches the direct expression
        let direct = ctx
            .curl(&chi0)
            .unwrap()
            .add(&chi1.scale(&Exact::inv_sqrt2()));
        let rhs = ctx
            .g_op(&ctx.curl(&chi0).unwrap())
            .unwrap()
            .add(&ctx.g_op(&chi1).unwrap().scale(&Exact::inv_sqrt2()));
        assert!(direct.sub(&rhs).is_zero());
    }

    #[test]
    fn zero_data_gives_zero() {
        let s = sold();
        let jet = WaveJet::from_data(&s, Spinor::zero(2), Spinor::zero(2), 2).unwrap();
        let res = splitting_residual(&s, &jet).unwrap();
        assert!(res.is_zero());
    }

    #[test]
    fn splitting_exact_all_small_spins() {
        let s = sold();
        for two_s in 1..=4 {
            let rep = verify_splitting(&s, two_s, 3, 3, 100 + two_s as u64).unwrap();
            assert!(rep.passed(), "{:?}", rep.failures);
        }
    }

    #[test]
    fn jet_recursion_holds() {
        let s = sold();
        let chi0 = random_poly_spinor(2, 4, 7);
        let chi1 = random_poly_spinor(2, 4, 8);
        let jet = WaveJet::from_data(&s, chi0, chi1, 6).unwrap();
        assert!(jet.satisfies_recursion(&s));
        assert_eq!(jet.coeffs.len(), 7);
    }

    #[test]
    fn mutated_jet_fails_recursion() {
        let s = sold();
        let chi0 = random_poly_spinor(2, 4, 9);
        let chi1 = random_poly_spinor(2, 4, 10);
        let mut jet = WaveJet::from_data(&s, chi0, chi1, 4).unwrap();
        let extra = random_poly_spinor(2, 1, 11);
        jet.coeffs[3] = jet.coeffs[3].add(&extra);
        assert!(!jet.satisfies_recursion(&s));
    }
}
