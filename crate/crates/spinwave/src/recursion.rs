//! Numeric verification of the component relations for a field obtained
//! from a lower-spin field by one constant-spinor spacetime derivative:
//!
//!   phi_0 = a D psi_0 + b delta psi_0 - s b cot(theta)/(r sqrt2) psi_0
//!   phi_i = a delta' psi_{i-1} + b D' psi_{i-1}
//!           + a/(r sqrt2) [ (s+1-i) cot(theta) psi_{i-1} - (2s+1-i) psi_i ]
//!
//! The left side is built in Cartesian components from exact derivative
//! data; the right side uses the tetrad scalars with analytic frame
//! derivatives. The two paths share no tetrad algebra.

use crate::error::Result;
use crate::frame::{dyad_at_point, dyad_spinor_derivatives, NullFrame};
use crate::soldering::Soldering;
use crate::wave::{SphereQuadrature, WaveScalar};
use num_complex::Complex64;

const SQRT2: f64 = std::f64::consts::SQRT_2;

/// Decomposition xi^{A'} = a conj(o)^{A'} + b conj(iota)^{A'}.
fn frame_components(xi: [Complex64; 2], frame: &NullFrame) -> (Complex64, Complex64) {
    // solve the 2x2 linear system
    let (c0, c1) = (frame.o[0].conj(), frame.o[1].conj());
    let (d0, d1) = (frame.iota[0].conj(), frame.iota[1].conj());
    let det = c0 * d1 - c1 * d0;
    let a = (xi[0] * d1 - xi[1] * d0) / det;
    let b = (c0 * xi[1] - c1 * xi[0]) / det;
    (a, b)
}

/// Coefficient spinors of one constant-spinor spacetime derivative in the
/// shipped gauge: `phi_A = mt[A] d_t psi + sum_j mj[j][A] d_j psi`.
fn derivative_coefficients(
    sold: &Soldering<Complex64>,
    xi: [Complex64; 2],
) -> ([Complex64; 2], [[Complex64; 2]; 3]) {
    // mu_A = xi^{A'} tau_{A A'}; nu^B = tau^B_{A'} xi^{A'}
    let mu = [
        xi[0] * sold.tau[0][0] + xi[1] * sold.tau[0][1],
        xi[0] * sold.tau[1][0] + xi[1] * sold.tau[1][1],
    ];
    // tau^B_{A'} = eps^{BC} tau_{C A'}
    let nu = [
        sold.tau[1][0] * xi[0] + sold.tau[1][1] * xi[1],
        -(sold.tau[0][0] * xi[0] + sold.tau[0][1] * xi[1]),
    ];
    let mt = [
        mu[0] * Complex64::new(1.0 / SQRT2, 0.0),
        mu[1] * Complex64::new(1.0 / SQRT2, 0.0),
    ];
    let mut mj = [[Complex64::new(0.0, 0.0); 2]; 3];
    for axis in 0..3 {
        for a in 0..2 {
            // (sigma^axis nu)_A = sum_B sigma_{AB} nu^B
            let s0 = sold.sigma[axis][a]; // sigma_{A 0}
            let s1 = sold.sigma[axis][a + 1]; // sigma_{A 1}
            mj[axis][a] = -(s0 * nu[0] + s1 * nu[1]);
        }
    }
    (mt, mj)
}

/// angular tangent vectors at the frame point
fn tangents(frame: &NullFrame) -> ([f64; 3], [f64; 3]) {
    let (th, ph) = (frame.theta, frame.phi);
    let e_theta = [th.cos() * ph.cos(), th.cos() * ph.sin(), -th.sin()];
    let e_phi = [-ph.sin(), ph.cos(), 0.0];
    (e_theta, e_phi)
}

#[derive(Debug, Clone)]
pub struct RecursionReport {
    pub worst_rel: f64,
    pub failures: Vec<String>,
}

impl RecursionReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Spin 0 -> 1/2 relations on a wave scalar.
pub fn verify_recursion_spin_zero(
    sold: &Soldering<Complex64>,
    chi: &WaveScalar,
    xi: [Complex64; 2],
    points: &[(f64, f64, f64, f64)], // (t, r, theta, phi)
    quad: SphereQuadrature,
    tol: f64,
) -> Result<RecursionReport> {
    let (mt, mj) = derivative_coefficients(sold, xi);
    let mut worst = 0.0f64;
    let mut failures = Vec::new();
    for &(t, r, th, ph) in points {
        let frame = dyad_at_point(sold, t, r, th, ph, 1e-6)?;
        let x = frame.position();
        let (a, b) = frame_components(xi, &frame);

        // first derivatives of chi
        let dt = chi.eval_derivative([1, 0, 0, 0], t, x, quad)?;
        let dx = [
            chi.eval_derivative([0, 1, 0, 0], t, x, quad)?,
            chi.eval_derivative([0, 0, 1, 0], t, x, quad)?,
            chi.eval_derivative([0, 0, 0, 1], t, x, quad)?,
        ];

        // left side: phi_A in cartesian spinor components, then contract
        let phi_a: Vec<Complex64> = (0..2)
            .map(|ai| {
                mt[ai] * dt + (0..3).map(|j| mj[j][ai] * dx[j]).sum::<Complex64>()
            })
            .collect();
        let lhs0 = phi_a[0] * frame.o[0] + phi_a[1] * frame.o[1];
        let lhs1 = phi_a[0] * frame.iota[0] + phi_a[1] * frame.iota[1];

        // right side from tetrad scalars
        let rhat = [x[0] / r, x[1] / r, x[2] / r];
        let dr = dx[0] * rhat[0] + dx[1] * rhat[1] + dx[2] * rhat[2];
        let dcap = (dt + dr) / SQRT2;
        let dcap_p = (dt - dr) / SQRT2;
        let (e_th, e_ph) = tangents(&frame);
        let grad_th: Complex64 = (0..3).map(|j| dx[j] * e_th[j]).sum();
        let grad_ph: Complex64 = (0..3).map(|j| dx[j] * e_ph[j]).sum();
        let i = Complex64::new(0.0, 1.0);
        let delta = (grad_th + i * grad_ph) / SQRT2;
        let delta_p = (grad_th - i * grad_ph) / SQRT2;

        let rhs0 = a * dcap + b * delta;
        let rhs1 = a * delta_p + b * dcap_p;

        let scale = lhs0.norm().max(lhs1.norm()).max(1e-300);
        let rel = ((lhs0 - rhs0).norm().max((lhs1 - rhs1).norm())) / scale;
        worst = worst.max(rel);
        if rel > tol {
            failures.push(format!(
                "spin 0 relations: rel {:e} at (t,r,theta,phi)=({},{},{},{})",
                rel, t, r, th, ph
            ));
        }
    }
    Ok(RecursionReport {
        worst_rel: worst,
        failures,
    })
}

/// Spin 1/2 -> 1 relations: psi built from chi by one constant-spinor
/// derivative, phi from psi by another.
#[allow(clippy::too_many_arguments)]
pub fn verify_recursion_spin_half(
    sold: &Soldering<Complex64>,
    chi: &WaveScalar,
    xi1: [Complex64; 2],
    xi2: [Complex64; 2],
    points: &[(f64, f64, f64, f64)],
    quad: SphereQuadrature,
    tol: f64,
) -> Result<RecursionReport> {
    let (mt1, mj1) = derivative_coefficients(sold, xi1);
    let (mt2, mj2) = derivative_coefficients(sold, xi2);
    let s_half = 0.5f64;
    let mut worst = 0.0f64;
    let mut failures = Vec::new();
    for &(t, r, th, ph) in points {
        let frame = dyad_at_point(sold, t, r, th, ph, 1e-6)?;
        let x = frame.position();
        let (a, b) = frame_components(xi1, &frame);
        let cot = th.cos() / th.sin();
        let inv_rs2 = 1.0 / (r * SQRT2);

        // second-derivative table of chi: d[mu][nu], mu,nu in {t,x,y,z}
        let mut d2 = [[Complex64::new(0.0, 0.0); 4]; 4];
        for muu in 0..4 {
            for nuu in muu..4 {
                let mut alpha = [0u8; 4];
                alpha[muu] += 1;
                alpha[nuu] += 1;
                let v = chi.eval_derivative(alpha, t, x, quad)?;
                d2[muu][nuu] = v;
                d2[nuu][muu] = v;
            }
        }
        let d1 = [
            chi.eval_derivative([1, 0, 0, 0], t, x, quad)?,
            chi.eval_derivative([0, 1, 0, 0], t, x, quad)?,
            chi.eval_derivative([0, 0, 1, 0], t, x, quad)?,
            chi.eval_derivative([0, 0, 0, 1], t, x, quad)?,
        ];

        // psi_B and its four first derivatives
        let psi = |der: usize| -> [Complex64; 2] {
            let pick = |mu: usize| if der == 4 { d1[mu] } else { d2[der][mu] };
            let mut out = [Complex64::new(0.0, 0.0); 2];
            for bi in 0..2 {
                out[bi] = mt2[bi] * pick(0)
                    + (0..3).map(|j| mj2[j][bi] * pick(j + 1)).sum::<Complex64>();
            }
            out
        };
        let psi_val = psi(4);
        let psi_d = [psi(0), psi(1), psi(2), psi(3)]; // d_t psi, d_x psi, ...

        // phi_{A B}: A from xi1 applied to psi
        let mut phi = [[Complex64::new(0.0, 0.0); 2]; 2];
        for ai in 0..2 {
            for bi in 0..2 {
                phi[ai][bi] = mt1[ai] * psi_d[0][bi]
                    + (0..3).map(|j| mj1[j][ai] * psi_d[j + 1][bi]).sum::<Complex64>();
            }
        }
        // components: i iota's then o's, slot A first
        let contract = |w_a: [Complex64; 2], w_b: [Complex64; 2]| -> Complex64 {
            let mut acc = Complex64::new(0.0, 0.0);
            for ai in 0..2 {
                for bi in 0..2 {
                    acc += phi[ai][bi] * w_a[ai] * w_b[bi];
                }
            }
            acc
        };
        let lhs = [
            contract(frame.o, frame.o),
            contract(frame.iota, frame.o),
            contract(frame.iota, frame.iota),
        ];

        // tetrad scalars psi_0 = psi_B o^B, psi_1 = psi_B iota^B and their
        // null/angular derivatives
        let comp = |v: [Complex64; 2], w: [Complex64; 2]| v[0] * w[0] + v[1] * w[1];
        let psi0 = comp(psi_val, frame.o);
        let psi1 = comp(psi_val, frame.iota);
        let rhat = [x[0] / r, x[1] / r, x[2] / r];
        let dpsi_r = |bi: usize| -> Complex64 {
            (0..3).map(|j| psi_d[j + 1][bi] * rhat[j]).sum()
        };
        let d_psi = |w: [Complex64; 2]| -> (Complex64, Complex64) {
            let dt: Complex64 = comp(psi_d[0], w);
            let dr: Complex64 = comp([dpsi_r(0), dpsi_r(1)], w);
            ((dt + dr) / SQRT2, (dt - dr) / SQRT2)
        };
        let (dcap_psi0, dcapp_psi0) = d_psi(frame.o);
        let (_dcap_psi1, dcapp_psi1) = d_psi(frame.iota);

        // angular derivatives with frame variation
        let (dth_o, dph_o, dth_i, dph_i) = dyad_spinor_derivatives(th, ph);
        let (e_th, e_ph) = tangents(&frame);
        let grad_dot = |bi: usize, e: [f64; 3]| -> Complex64 {
            (0..3).map(|j| psi_d[j + 1][bi] * e[j]).sum()
        };
        // d_theta (psi . w) = psi . (d_theta w) + r (e_theta . grad psi) . w
        let ang = |w: [Complex64; 2], dw_th: [Complex64; 2], dw_ph: [Complex64; 2]| {
            let dth = comp(psi_val, dw_th)
                + r * comp([grad_dot(0, e_th), grad_dot(1, e_th)], w);
            let dph = comp(psi_val, dw_ph)
                + r * th.sin() * comp([grad_dot(0, e_ph), grad_dot(1, e_ph)], w);
            let i = Complex64::new(0.0, 1.0);
            let delta = (dth + i / th.sin() * dph) * inv_rs2;
            let delta_p = (dth - i / th.sin() * dph) * inv_rs2;
            (delta, delta_p)
        };
        let (delta_psi0, deltap_psi0) = ang(frame.o, dth_o, dph_o);
        let (_delta_psi1, deltap_psi1) = ang(frame.iota, dth_i, dph_i);

        // the relations at s = 1/2 (valence of phi is 2)
        let rhs0 = a * dcap_psi0 + b * delta_psi0
            - Complex64::new(s_half * cot * inv_rs2, 0.0) * b * psi0;
        // i = 1: (s+1-i) = 1/2, (2s+1-i) = 1
        let rhs1 = a * deltap_psi0
            + b * dcapp_psi0
            + a * Complex64::new(inv_rs2, 0.0)
                * (Complex64::new(0.5 * cot, 0.0) * psi0 - psi1);
        // i = 2: (s+1-i) = -1/2, (2s+1-i) = 0
        let rhs2 = a * deltap_psi1
            + b * dcapp_psi1
            + a * Complex64::new(inv_rs2, 0.0) * Complex64::new(-0.5 * cot, 0.0) * psi1;

        let scale = lhs.iter().map(|z| z.norm()).fold(1e-300, f64::max);
        let rel = [(lhs[0], rhs0), (lhs[1], rhs1), (lhs[2], rhs2)]
            .iter()
            .map(|(l, rr)| (l - rr).norm())
            .fold(0.0, f64::max)
            / scale;
        worst = worst.max(rel);
        if rel > tol {
            failures.push(format!(
                "spin 1/2 relations: rel {:e} at (t,r,theta,phi)=({},{},{},{})",
                rel, t, r, th, ph
            ));
        }
    }
    Ok(RecursionReport {
        worst_rel: worst,
        failures,
    })
}
