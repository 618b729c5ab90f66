//! Reference-path oracles: the component transvection against the full
//! tensor embedding, backend consistency, and the norm/hat properties as
//! property tests.

use num_complex::Complex64;
use proptest::prelude::*;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use spinwave::exact::{Exact, Rat};
use spinwave::field::Component;
use spinwave::ops::{OpCtx, OpTag};
use spinwave::poly::Poly;
use spinwave::profile::Profile;
use spinwave::soldering::Soldering;
use spinwave::spinor::Spinor;
use spinwave::tensor::transvect_oracle;

fn random_value_spinor(rng: &mut ChaCha8Rng, valence: usize) -> Spinor<Exact> {
    let comps = (0..=valence)
        .map(|_| {
            let den = if rng.gen_bool(0.3) { 2 } else { 1 };
            Exact {
                ra: Rat::new(rng.gen_range(-9..=9), den),
                ia: Rat::new(rng.gen_range(-9..=9), den),
                rb: Rat::ZERO,
                ib: Rat::ZERO,
            }
        })
        .collect();
    Spinor::new(valence, comps)
}

#[test]
fn transvection_matches_full_tensor_oracle_200_cases() {
    let mut rng = ChaCha8Rng::seed_from_u64(20240811);
    let mut cases = 0usize;
    while cases < 200 {
        let p = rng.gen_range(0..=8usize);
        let q = rng.gen_range(0..=8usize);
        let j = rng.gen_range(0..=p.min(q));
        let a = random_value_spinor(&mut rng, p);
        let b = random_value_spinor(&mut rng, q);
        let fast = a.transvect(&b, j).expect("within valence");
        let slow = transvect_oracle(&a, &b, j);
        assert!(
            fast.sub(&slow).is_zero(),
            "mismatch at p={}, q={}, j={}",
            p,
            q,
            j
        );
        cases += 1;
    }
}

#[test]
fn profile_and_poly_backends_agree_under_operators() {
    // a polynomial written in the profile family: components of the form
    // monomial * <r>^(2n) coincide with expanded polynomials, and each
    // operator must produce identical values through either backend
    let sold: Soldering<Complex64> = Soldering::shipped();
    let cpoly: OpCtx<Complex64, Poly<Complex64>, _> = OpCtx::fields(&sold);
    let cprof: OpCtx<Complex64, Profile, _> = OpCtx::fields(&sold);

    let x = Poly::<Complex64>::var(0);
    let y = Poly::<Complex64>::var(1);
    let z = Poly::<Complex64>::var(2);
    let one = Poly::constant(Complex64::new(1.0, 0.0));
    let r2 = x.mul(&x).add(&y.mul(&y)).add(&z.mul(&z));
    let br2 = one.add(&r2);

    // poly field: comps (x <r>^2, y, z^2)
    let poly_field = Spinor::new(
        2,
        vec![x.mul(&br2), y.clone(), z.mul(&z)],
    );
    let prof_field = Spinor::new(
        2,
        vec![
            Profile::term((1, 0, 0), 2.0, Complex64::new(1.0, 0.0)),
            Profile::term((0, 1, 0), 0.0, Complex64::new(1.0, 0.0)),
            Profile::term((0, 0, 2), 0.0, Complex64::new(1.0, 0.0)),
        ],
    );

    let pts = [[0.3, -0.7, 1.1], [2.0, 0.5, -1.5], [0.0, 0.0, 0.0]];
    for tag in [OpTag::Curl(2), OpTag::Div(2), OpTag::Twist(2), OpTag::G(2), OpTag::Lap(2, 1)] {
        let a = cpoly.apply(tag, &poly_field).unwrap();
        let b = cprof.apply(tag, &prof_field).unwrap();
        for &pt in &pts {
            let ptc = [
                Complex64::new(pt[0], 0.0),
                Complex64::new(pt[1], 0.0),
                Complex64::new(pt[2], 0.0),
            ];
            for i in 0..a.comps().len() {
                let va = a.comp(i).eval_c64(ptc);
                let vb = b.comp(i).eval(pt);
                assert!(
                    (va - vb).norm() < 1e-10 * (1.0 + va.norm()),
                    "{:?} comp {} at {:?}: {} vs {}",
                    tag,
                    i,
                    pt,
                    va,
                    vb
                );
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn norm_positive_definite(vals in prop::collection::vec((-9i128..=9, -9i128..=9), 1..=7)) {
        let k = vals.len() - 1;
        let comps: Vec<Exact> = vals
            .iter()
            .map(|&(re, im)| Exact::from_rationals(Rat::new(re, 1), Rat::new(im, 1)))
            .collect();
        let phi = Spinor::new(k, comps);
        let n = phi.norm_sq();
        let r = n.as_rational().expect("norm is rational here");
        if phi.is_zero() {
            prop_assert!(r.is_zero());
        } else {
            prop_assert!(r.num() > 0);
        }
    }

    #[test]
    fn hat_is_involution_up_to_sign(vals in prop::collection::vec((-9i128..=9, -9i128..=9), 1..=7)) {
        let k = vals.len() - 1;
        let comps: Vec<Exact> = vals
            .iter()
            .map(|&(re, im)| Exact::from_rationals(Rat::new(re, 1), Rat::new(im, 1)))
            .collect();
        let phi = Spinor::new(k, comps);
        let hh = phi.hat().hat();
        let expect = if k % 2 == 0 { phi.clone() } else { phi.neg() };
        prop_assert!(hh.sub(&expect).is_zero());
    }

    #[test]
    fn exact_derivatives_commute(seed in 0u64..1000) {
        let phi = spinwave::sample::random_poly_spinor(2, 4, seed);
        for a in 0..3 {
            for b in (a + 1)..3 {
                let ab = phi.derive(a).derive(b);
                let ba = phi.derive(b).derive(a);
                prop_assert!(ab.sub(&ba).is_zero());
            }
        }
    }

    #[test]
    fn transvection_oracle_small_random(seed in 0u64..500) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = rng.gen_range(0..=5usize);
        let q = rng.gen_range(0..=5usize);
        let j = rng.gen_range(0..=p.min(q));
        let a = random_value_spinor(&mut rng, p);
        let b = random_value_spinor(&mut rng, q);
        let fast = a.transvect(&b, j).unwrap();
        let slow = transvect_oracle(&a, &b, j);
        prop_assert!(fast.sub(&slow).is_zero());
    }
}
