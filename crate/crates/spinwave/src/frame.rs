//! Null frames adapted to outgoing rays: the dyad at a point, the induced
//! tetrad through the soldering map, and null-component extraction.

use crate::error::{Result, SpinError};
use crate::soldering::Soldering;
use crate::spinor::Spinor;
use num_complex::Complex64;

const FRAME_TOL: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct NullFrame {
    pub t: f64,
    pub r: f64,
    pub theta: f64,
    pub phi: f64,
    /// dyad spinors (upper index components)
    pub o: [Complex64; 2],
    pub iota: [Complex64; 2],
    /// tetrad vectors as (t, x, y, z) components
    pub l: [Complex64; 4],
    pub n: [Complex64; 4],
    pub m: [Complex64; 4],
}

/// Map a pair of spinors to the vector `a^A conj(b)^{A'}` through the
/// soldering set (components in the coordinate frame d_t, d_x, d_y, d_z).
pub fn vector_of_spinor_pair(
    sold: &Soldering<Complex64>,
    a: [Complex64; 2],
    b: [Complex64; 2],
) -> [Complex64; 4] {
    let m = [
        [a[0] * b[0].conj(), a[0] * b[1].conj()],
        [a[1] * b[0].conj(), a[1] * b[1].conj()],
    ];
    // tau^B_{A'} = eps^{BC} tau_{C A'}
    let mut tau_mixed = [[Complex64::new(0.0, 0.0); 2]; 2];
    for bidx in 0..2 {
        for ap in 0..2 {
            // eps^{01} = 1, eps^{10} = -1
            tau_mixed[bidx][ap] = if bidx == 0 {
                sold.tau[1][ap]
            } else {
                -sold.tau[0][ap]
            };
        }
    }
    let mut v = [Complex64::new(0.0, 0.0); 4];
    for aidx in 0..2 {
        for ap in 0..2 {
            v[0] += m[aidx][ap] * sold.tau[aidx][ap];
        }
    }
    v[0] *= Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    for axis in 0..3 {
        let sig = |r: usize, c: usize| sold.sigma[axis][r + c];
        let mut acc = Complex64::new(0.0, 0.0);
        for aidx in 0..2 {
            for ap in 0..2 {
                for bidx in 0..2 {
                    acc += m[aidx][ap] * tau_mixed[bidx][ap] * sig(aidx, bidx);
                }
            }
        }
        v[axis + 1] = -acc;
    }
    v
}

/// The spin rotation taking the constant dyad to the direction (theta, phi):
/// columns are the o and iota spinors.
pub fn dyad_spinors(theta: f64, phi: f64) -> ([Complex64; 2], [Complex64; 2]) {
    let (ht, hp) = (0.5 * theta, 0.5 * phi);
    let em = Complex64::new(0.0, -hp).exp();
    let ep = Complex64::new(0.0, hp).exp();
    let o = [ht.cos() * em, ht.sin() * ep];
    let iota = [-ht.sin() * em, ht.cos() * ep];
    (o, iota)
}

/// Angular derivatives of the dyad spinors (exact closed forms).
pub fn dyad_spinor_derivatives(
    theta: f64,
    phi: f64,
) -> ([Complex64; 2], [Complex64; 2], [Complex64; 2], [Complex64; 2]) {
    let (ht, hp) = (0.5 * theta, 0.5 * phi);
    let em = Complex64::new(0.0, -hp).exp();
    let ep = Complex64::new(0.0, hp).exp();
    let i = Complex64::new(0.0, 1.0);
    let do_dth = [-0.5 * ht.sin() * em, 0.5 * ht.cos() * ep];
    let do_dph = [-0.5 * i * ht.cos() * em, 0.5 * i * ht.sin() * ep];
    let di_dth = [-0.5 * ht.cos() * em, -0.5 * ht.sin() * ep];
    let di_dph = [0.5 * i * ht.sin() * em, 0.5 * i * ht.cos() * ep];
    (do_dth, do_dph, di_dth, di_dph)
}

pub fn dyad_at_point(
    sold: &Soldering<Complex64>,
    t: f64,
    r: f64,
    theta: f64,
    phi: f64,
    axis_margin: f64,
) -> Result<NullFrame> {
    if r <= 0.0 {
        return Err(SpinError::FrameSingularity(
            "the tetrad needs r > 0".into(),
        ));
    }
    if theta < axis_margin || theta > std::f64::consts::PI - axis_margin {
        return Err(SpinError::FrameSingularity(format!(
            "theta = {} within margin {} of the coordinate axis",
            theta, axis_margin
        )));
    }
    let (o, iota) = dyad_spinors(theta, phi);
    let l = vector_of_spinor_pair(sold, o, o);
    let n = vector_of_spinor_pair(sold, iota, iota);
    let m = vector_of_spinor_pair(sold, o, iota);

    // runtime invariants
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let rhat = [
        theta.sin() * phi.cos(),
        theta.sin() * phi.sin(),
        theta.cos(),
    ];
    let want_l = [s, s * rhat[0], s * rhat[1], s * rhat[2]];
    let want_n = [s, -s * rhat[0], -s * rhat[1], -s * rhat[2]];
    let mut err = 0.0f64;
    for c in 0..4 {
        err = err.max((l[c] - Complex64::new(want_l[c], 0.0)).norm());
        err = err.max((n[c] - Complex64::new(want_n[c], 0.0)).norm());
    }
    // eps-contraction normalization o_A iota^A = 1
    let pairing = o[0] * iota[1] - o[1] * iota[0];
    err = err.max((pairing - Complex64::new(1.0, 0.0)).norm());
    if err > FRAME_TOL {
        return Err(SpinError::FrameSingularity(format!(
            "frame reconstruction residual {:e}",
            err
        )));
    }
    Ok(NullFrame {
        t,
        r,
        theta,
        phi,
        o,
        iota,
        l,
        n,
        m,
    })
}

impl NullFrame {
    /// Spatial position of the frame point.
    pub fn position(&self) -> [f64; 3] {
        [
            self.r * self.theta.sin() * self.phi.cos(),
            self.r * self.theta.sin() * self.phi.sin(),
            self.r * self.theta.cos(),
        ]
    }

    /// Rotate the dyad phase: o -> e^{i lam} o, iota -> e^{-i lam} iota;
    /// l and n are unchanged, m picks up a phase.
    pub fn rotate_phase(&self, lam: f64) -> NullFrame {
        let ep = Complex64::new(0.0, lam).exp();
        let em = Complex64::new(0.0, -lam).exp();
        let mut out = self.clone();
        out.o = [self.o[0] * ep, self.o[1] * ep];
        out.iota = [self.iota[0] * em, self.iota[1] * em];
        out.m = [
            self.m[0] * ep * ep,
            self.m[1] * ep * ep,
            self.m[2] * ep * ep,
            self.m[3] * ep * ep,
        ];
        out
    }
}

/// Null components phi_i: contraction with i copies of iota and 2s-i
/// copies of o (all upper-index).
pub fn null_components(phi: &Spinor<Complex64>, frame: &NullFrame) -> Vec<Complex64> {
    let k = phi.valence();
    (0..=k)
        .map(|i| {
            let mut cur = phi.clone();
            for _ in 0..i {
                cur = cur.contract_up(&frame.iota);
            }
            for _ in 0..(k - i) {
                cur = cur.contract_up(&frame.o);
            }
            *cur.comp(0)
        })
        .collect()
}

/// The symmetrized lower-index power of a dyad spinor (for tests):
/// phi = o_(A ... o_F) with all indices down.
pub fn sym_power_lower(v: [Complex64; 2], k: usize) -> Spinor<Complex64> {
    // lower: o_0 = -o^1, o_1 = o^0
    let low = [-v[1], v[0]];
    let comps = (0..=k)
        .map(|i| low[0].powu((k - i) as u32) * low[1].powu(i as u32))
        .collect();
    Spinor::new(k, comps)
}
