//! Exact verification of the operator identities. Every check here runs in
//! `Q(i)[sqrt2]` arithmetic and accepts only a residual that is exactly
//! zero; a failure reports the seed and the first offending component.

use crate::error::{Result, SpinError};
use crate::exact::Exact;
use crate::ops::OpCtx;
use crate::poly::Poly;
use crate::sample::random_poly_spinor;
use crate::scalar::neg_two_pow;
use crate::soldering::Soldering;
use crate::spinor::Spinor;
use crate::tensor::FullTensor;
use rayon::prelude::*;

type ExactField = Poly<Exact>;
type Ctx<'a> = OpCtx<'a, Exact, ExactField, crate::ops::PartialDer>;

#[derive(Debug, Clone)]
pub struct IdentityReport {
    pub name: String,
    pub trials: usize,
    pub failures: Vec<String>,
}

impl IdentityReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

fn ctx(sold: &Soldering<Exact>) -> Ctx<'_> {
    OpCtx::fields(sold)
}

/// `div(G phi) = 0` and `G(twist psi) = 0`, exactly, on random fields.
pub fn verify_g_annihilation(
    sold: &Soldering<Exact>,
    k: usize,
    degree: usize,
    trials: usize,
    seed: u64,
) -> Result<IdentityReport> {
    if k < 2 {
        return Err(SpinError::Precondition(
            "annihilation identities require valence >= 2".into(),
        ));
    }
    let c = ctx(sold);
    let mut failures = Vec::new();
    for t in 0..trials {
        let s = seed.wrapping_add(t as u64);
        let phi = random_poly_spinor(k, degree, s);
        let dg = c.div(&c.g_op(&phi)?)?;
        if !dg.is_zero() {
            failures.push(format!("div(G phi) != 0 at k={}, seed={}", k, s));
        }
        let psi = random_poly_spinor(k - 2, degree, s.wrapping_add(0x9e37));
        let gt = c.g_op(&c.twist(&psi))?;
        if !gt.is_zero() {
            failures.push(format!("G(twist psi) != 0 at k={}, seed={}", k, s));
        }
    }
    Ok(IdentityReport {
        name: format!("annihilation k={}", k),
        trials,
        failures,
    })
}

/// `G curl = curl G` and both equal the closed-form even chain expansion.
pub fn verify_g_curl_commute(
    sold: &Soldering<Exact>,
    k: usize,
    degree: usize,
    trials: usize,
    seed: u64,
) -> Result<IdentityReport> {
    if k < 1 {
        return Err(SpinError::Precondition("curl requires valence >= 1".into()));
    }
    let failures: Vec<String> = (0..trials)
        .into_par_iter()
        .flat_map(|t| {
            let c = ctx(sold);
            let mut local = Vec::new();
            let s = seed.wrapping_add(t as u64);
            let phi = random_poly_spinor(k, t % (degree + 1), s);
            let gc = c.curl(&phi).and_then(|x| c.g_op(&x));
            let cg = c.g_op(&phi).and_then(|x| c.curl(&x));
            match (&gc, &cg) {
                (Ok(a), Ok(b)) if a.sub(b).is_zero() => {}
                _ => local.push(format!("G curl != curl G at k={}, seed={}", k, s)),
            }
            if let Ok(a) = &gc {
                let expansion = c.g_curl_expansion(&phi);
                if !a.sub(&expansion).is_zero() {
                    local.push(format!(
                        "G curl != closed-form expansion at k={}, seed={}",
                        k, s
                    ));
                }
            }
            local
        })
        .collect();
    Ok(IdentityReport {
        name: format!("G-curl commutation k={}", k),
        trials,
        failures,
    })
}

/// Laplacian power decompositions:
/// even valence 2k:  Lap^k = twist F div - (-2)^(1-k) G curl
/// odd valence 2k+1: Lap^k = twist F div + (-2)^(-k) G
pub fn verify_laplacian_identity(
    sold: &Soldering<Exact>,
    valence: usize,
    degree: usize,
    trials: usize,
    seed: u64,
) -> Result<IdentityReport> {
    if valence < 1 {
        return Err(SpinError::Precondition(
            "laplacian decomposition requires valence >= 1".into(),
        ));
    }
    let k = valence / 2;
    let failures: Vec<String> = (0..trials)
        .into_par_iter()
        .flat_map(|t| {
            let c = ctx(sold);
            let s = seed.wrapping_add(t as u64);
            let phi = random_poly_spinor(valence, t % (degree + 1), s);
            let check = || -> Result<bool> {
                let lhs = c.laplacian_power(&phi, k);
                let tfd = c.twist_f_div(&phi)?;
                let rhs = if valence % 2 == 0 {
                    let (n, d) = neg_two_pow(1 - k as i32);
                    tfd.sub(&c.g_op(&c.curl(&phi)?)?.scale_ratio(n, d))
                } else {
                    let (n, d) = neg_two_pow(-(k as i32));
                    tfd.add(&c.g_op(&phi)?.scale_ratio(n, d))
                };
                Ok(lhs.sub(&rhs).is_zero())
            };
            match check() {
                Ok(true) => Vec::new(),
                _ => vec![format!(
                    "laplacian decomposition failed at valence={}, seed={}",
                    valence, s
                )],
            }
        })
        .collect();
    Ok(IdentityReport {
        name: format!("laplacian decomposition valence={}", valence),
        trials,
        failures,
    })
}

/// The irreducible decomposition of `D_{A1 A2} phi_{A3...}` into twist,
/// curl and divergence pieces, checked entry by entry on full tensors.
pub fn verify_irreducible_decomposition(
    sold: &Soldering<Exact>,
    phi: &Spinor<ExactField>,
) -> Result<FullTensor<ExactField>> {
    let k = phi.valence();
    if k < 1 {
        return Err(SpinError::Precondition(
            "irreducible decomposition requires valence >= 1".into(),
        ));
    }
    let c = ctx(sold);
    let n = k + 2;

    // LHS: D_{A1 A2} phi as a full tensor; slots 0,1 = derivative indices
    let mut lhs: FullTensor<ExactField> = FullTensor::zero(n);
    for axis in 0..3 {
        let dphi = phi.derive(axis);
        for t in 0..1usize << n {
            let a = (t & 1) + ((t >> 1) & 1);
            let sig = &sold.sigma[axis][a];
            if sig.is_zero() {
                continue;
            }
            let ones = (t >> 2).count_ones() as usize;
            let add = dphi.comp(ones).scale(sig);
            *lhs.entry_mut(t) = lhs.entry(t).add(&add);
        }
    }

    // twist term
    let tw = c.twist(phi);
    let mut rhs = FullTensor::from_sym(&tw);

    // epsilon cross terms; eps_lower[a][b]: eps_01 = 1
    let eps_l: [[i128; 2]; 2] = [[0, 1], [-1, 0]];
    let curl = c.curl(phi)?;
    let c_slots: Vec<usize> = (2..n).collect();

    // -k/(k+2) * eps_{A1 (A3} (curl phi)_{A4...)A2}  and the A1<->A2 twin
    for (first, second) in [(0usize, 1usize), (1, 0)] {
        let mut term: FullTensor<ExactField> = FullTensor::zero(n);
        for t in 0..1usize << n {
            let a_first = (t >> first) & 1;
            let a_second = (t >> second) & 1;
            let c3 = (t >> 2) & 1;
            let e = eps_l[a_first][c3];
            if e == 0 {
                continue;
            }
            let ones = (t >> 3).count_ones() as usize + a_second;
            *term.entry_mut(t) = curl.comp(ones).scale_ratio(e, 1);
        }
        let term = term.symmetrize_slots(&c_slots).scale_ratio(-(k as i128), (k + 2) as i128);
        rhs = rhs.add(&term);
    }

    // (1-k)/(1+k) * eps_{A1 (A3} (div phi)_{A4...A_{k+1}} eps_{A_{k+2}) A2}
    if k >= 2 {
        let div = c.div(phi)?;
        let mut term: FullTensor<ExactField> = FullTensor::zero(n);
        for t in 0..1usize << n {
            let a1 = t & 1;
            let a2 = (t >> 1) & 1;
            let c_first = (t >> 2) & 1;
            let c_last = (t >> (n - 1)) & 1;
            let e1 = eps_l[a1][c_first];
            let e2 = eps_l[c_last][a2];
            if e1 == 0 || e2 == 0 {
                continue;
            }
            let mid_mask = ((1usize << (n - 1)) - 1) & !((1 << 3) - 1);
            let ones = (t & mid_mask).count_ones() as usize;
            *term.entry_mut(t) = div.comp(ones).scale_ratio(e1 * e2, 1);
        }
        let term = term
            .symmetrize_slots(&c_slots)
            .scale_ratio(1 - k as i128, 1 + k as i128);
        rhs = rhs.add(&term);
    }

    Ok(lhs.sub(&rhs))
}

/// Same identity compared bin-by-bin: both sides are symmetric over the
/// field-index block, so equality on full tensors is equivalent to equality
/// of the popcount-binned sums, which have closed binomial forms. This is
/// the fast path; `verify_irreducible_decomposition` is the reference.
pub fn verify_irreducible_binned(
    sold: &Soldering<Exact>,
    phi: &Spinor<ExactField>,
) -> Result<bool> {
    let k = phi.valence();
    if k < 1 {
        return Err(SpinError::Precondition(
            "irreducible decomposition requires valence >= 1".into(),
        ));
    }
    let c = ctx(sold);
    let tw = c.twist(phi);
    let curl = c.curl(phi)?;
    let div = if k >= 2 { Some(c.div(phi)?) } else { None };
    let dphi: Vec<Spinor<ExactField>> = (0..3).map(|ax| phi.derive(ax)).collect();
    let eps_l: [[i128; 2]; 2] = [[0, 1], [-1, 0]];
    let binom = crate::scalar::binom;

    for a1 in 0..2usize {
        for a2 in 0..2usize {
            for i in 0..=k {
                // lhs bin: C(k,i) sum_axis sigma^axis_{a1 a2} (d_axis phi)_i
                let mut lhs = ExactField::zero();
                for (ax, d) in dphi.iter().enumerate() {
                    let sig = &sold.sigma[ax][a1 + a2];
                    lhs = lhs.add(&d.comp(i).scale(sig));
                }
                let mut lhs = lhs.scale_ratio(binom(k, i), 1);

                // twist bin
                let mut rhs = tw.comp(a1 + a2 + i).scale_ratio(binom(k, i), 1);

                // the two eps-curl terms with coefficient -k/(k+2)
                for (af, asec) in [(a1, a2), (a2, a1)] {
                    for b in 0..2usize {
                        let e = eps_l[af][b];
                        if e == 0 || i < b || i - b > k - 1 {
                            continue;
                        }
                        let w = e * binom(k - 1, i - b) * -(k as i128);
                        rhs = rhs.add(&curl.comp(i - b + asec).scale_ratio(w, (k + 2) as i128));
                    }
                }

                // divergence term with coefficient (1-k)/(1+k)
                if let Some(div) = &div {
                    for b3 in 0..2usize {
                        for bl in 0..2usize {
                            let e = eps_l[a1][b3] * eps_l[bl][a2];
                            if e == 0 || i < b3 + bl || i - b3 - bl > k - 2 {
                                continue;
                            }
                            let w = e * binom(k - 2, i - b3 - bl) * (1 - k as i128);
                            rhs = rhs
                                .add(&div.comp(i - b3 - bl).scale_ratio(w, (1 + k) as i128));
                        }
                    }
                }
                lhs = lhs.sub(&rhs);
                if !lhs.is_zero() {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

pub fn verify_irreducible_on_random(
    sold: &Soldering<Exact>,
    k: usize,
    degree: usize,
    trials: usize,
    seed: u64,
) -> Result<IdentityReport> {
    let failures: Vec<String> = (0..trials)
        .into_par_iter()
        .flat_map(|t| {
            let s = seed.wrapping_add(t as u64);
            let phi = random_poly_spinor(k, t % (degree + 1), s);
            match verify_irreducible_binned(sold, &phi) {
                Ok(true) => Vec::new(),
                _ => vec![format!(
                    "irreducible decomposition residual nonzero at k={}, seed={}",
                    k, s
                )],
            }
        })
        .collect();
    Ok(IdentityReport {
        name: format!("irreducible decomposition k={}", k),
        trials,
        failures,
    })
}

/// Run the whole exact identity suite for one valence.
pub fn identity_suite(
    sold: &Soldering<Exact>,
    valence: usize,
    degree: usize,
    trials: usize,
    seed: u64,
) -> Result<Vec<IdentityReport>> {
    let mut out = Vec::new();
    out.push(verify_g_annihilation(sold, valence, degree, trials, seed)?);
    out.push(verify_g_curl_commute(sold, valence, degree, trials, seed)?);
    out.push(verify_laplacian_identity(sold, valence, degree, trials, seed)?);
    out.push(verify_irreducible_on_random(sold, valence, degree, trials, seed)?);
    Ok(out)
}
