//! Kirchhoff spherical-means evaluation of solutions of the wave equation
//! from profile Cauchy data, with all derivatives obtained by deriving the
//! data (never by differentiating quadrature output); closed-form sphere
//! integrals of bracket weights; decay envelopes.

use crate::error::{Result, SpinError};
use crate::field::Component;
use crate::profile::Profile;
use crate::quad::{frame_from_axis, gauss_legendre, SphereRule};
use dashmap::DashMap;
use num_complex::Complex64;
use std::sync::Arc;

pub const DEFAULT_MAX_ORDER: usize = 6;

/// Quadrature rule for sphere integrals of retarded data.
#[derive(Clone, Copy, Debug)]
pub enum SphereQuadrature {
    /// Plain product rule: Gauss-Legendre in cos(theta) x uniform azimuth.
    Product { n_theta: usize, n_phi: usize },
    /// Product rule with the polar variable mapped through
    /// s = log(1 + |x + t w|^2); integrands built from bracket powers
    /// become entire in s, so modest orders reach roundoff even far from
    /// the light cone.
    LogRadial { n_s: usize, n_phi: usize },
}

impl SphereQuadrature {
    pub fn default_product() -> Self {
        SphereQuadrature::Product {
            n_theta: 64,
            n_phi: 128,
        }
    }

    pub fn default_eval() -> Self {
        SphereQuadrature::LogRadial { n_s: 64, n_phi: 32 }
    }

    /// Integrate F(omega) over the unit sphere (total measure 4 pi). The
    /// evaluation point enters only through the LogRadial remapping.
    pub fn integrate<F>(&self, t: f64, x: [f64; 3], mut f: F) -> Complex64
    where
        F: FnMut([f64; 3]) -> Complex64,
    {
        let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
        match *self {
            SphereQuadrature::Product { n_theta, n_phi } => {
                let axis = if r > 0.0 { x } else { [0.0, 0.0, 1.0] };
                SphereRule::new(n_theta, n_phi).integrate(axis, &mut f)
            }
            SphereQuadrature::LogRadial { n_s, n_phi } => {
                if 4.0 * t * r < 1e-100 {
                    // degenerate remap: the plain rule is exact enough here
                    let axis = if r > 0.0 { x } else { [0.0, 0.0, 1.0] };
                    return SphereRule::new(n_s, n_phi).integrate(axis, &mut f);
                }
                let (e1, e2, e3) = frame_from_axis(x);
                let q_lo = 1.0 + (t - r) * (t - r);
                let q_hi = 1.0 + (t + r) * (t + r);
                let (s_lo, s_hi) = (q_lo.ln(), q_hi.ln());
                let gl = gauss_legendre(n_s);
                let mid = 0.5 * (s_lo + s_hi);
                let half = 0.5 * (s_hi - s_lo);
                let dphi = 2.0 * std::f64::consts::PI / n_phi as f64;
                let mut acc = Complex64::new(0.0, 0.0);
                for (&node, &gw) in gl.0.iter().zip(gl.1.iter()) {
                    let s = mid + half * node;
                    let es = s.exp();
                    let q = es - 1.0;
                    let w = ((q - t * t - r * r) / (2.0 * t * r)).clamp(-1.0, 1.0);
                    let sn = (1.0 - w * w).max(0.0).sqrt();
                    // dw = e^s ds / (2 t r)
                    let weight = gw * half * es / (2.0 * t * r) * dphi;
                    for j in 0..n_phi {
                        let phi = dphi * j as f64;
                        let (cp, sp) = (phi.cos(), phi.sin());
                        let omega = [
                            w * e1[0] + sn * (cp * e2[0] + sp * e3[0]),
                            w * e1[1] + sn * (cp * e2[1] + sp * e3[1]),
                            w * e1[2] + sn * (cp * e2[2] + sp * e3[2]),
                        ];
                        acc += f(omega) * weight;
                    }
                }
                acc
            }
        }
    }
}

/// Cauchy data for one scalar wave solution, with the gradient of the
/// position datum precomputed for the normal-derivative term.
pub struct CauchyData {
    pub f: Profile,
    pub g: Profile,
    grad_f: [Profile; 3],
}

impl CauchyData {
    pub fn new(f: Profile, g: Profile) -> Self {
        let grad_f = [f.derive(0), f.derive(1), f.derive(2)];
        CauchyData { f, g, grad_f }
    }

    /// Kirchhoff representation value at (t, x).
    pub fn eval(&self, t: f64, x: [f64; 3], quad: SphereQuadrature) -> Complex64 {
        if t == 0.0 {
            return self.f.eval(x);
        }
        let integral = quad.integrate(t, x, |o| {
            let y = [x[0] + t * o[0], x[1] + t * o[1], x[2] + t * o[2]];
            let dn = self.grad_f[0].eval(y) * o[0]
                + self.grad_f[1].eval(y) * o[1]
                + self.grad_f[2].eval(y) * o[2];
            (self.g.eval(y) + dn) * t + self.f.eval(y)
        });
        integral / (4.0 * std::f64::consts::PI)
    }
}

/// Scalar wave solution represented by its Cauchy data and a cache of
/// derived data, keyed by the (t, x, y, z) derivative multi-index.
pub struct WaveScalar {
    cache: DashMap<[u8; 4], Arc<CauchyData>>,
    pub max_order: usize,
}

impl WaveScalar {
    pub fn new(f: Profile, g: Profile) -> Self {
        let w = WaveScalar {
            cache: DashMap::new(),
            max_order: DEFAULT_MAX_ORDER,
        };
        w.cache
            .insert([0, 0, 0, 0], Arc::new(CauchyData::new(f, g)));
        w
    }

    pub fn with_max_order(mut self, cap: usize) -> Self {
        self.max_order = cap;
        self
    }

    /// Cauchy data of the derivative solution: deriving in time swaps in
    /// (g, euclidean laplacian of f); spatial derivatives derive both data.
    pub fn data(&self, alpha: [u8; 4]) -> Result<Arc<CauchyData>> {
        let order = alpha.iter().map(|&v| v as usize).sum::<usize>();
        if order > self.max_order {
            return Err(SpinError::OrderCap {
                requested: order,
                cap: self.max_order,
            });
        }
        if let Some(d) = self.cache.get(&alpha) {
            return Ok(d.clone());
        }
        // reduce one derivative: prefer spatial (cheap), then time
        let parent_alpha;
        let child;
        if let Some(axis) = (1..4).find(|&i| alpha[i] > 0) {
            let mut pa = alpha;
            pa[axis] -= 1;
            parent_alpha = pa;
            let p = self.data(parent_alpha)?;
            child = CauchyData::new(p.f.derive(axis - 1), p.g.derive(axis - 1));
        } else {
            let mut pa = alpha;
            pa[0] -= 1;
            parent_alpha = pa;
            let p = self.data(parent_alpha)?;
            // d_t solution(f, g) = solution(g, lap_e f)
            let mut lap = Profile::zero();
            for axis in 0..3 {
                lap = lap.add(&p.f.derive(axis).derive(axis));
            }
            child = CauchyData::new(p.g.clone(), lap);
        }
        let arc = Arc::new(child);
        let out = self
            .cache
            .entry(alpha)
            .or_insert_with(|| arc.clone())
            .clone();
        Ok(out)
    }

    pub fn eval(&self, t: f64, x: [f64; 3], quad: SphereQuadrature) -> Complex64 {
        self.data([0, 0, 0, 0]).unwrap().eval(t, x, quad)
    }

    pub fn eval_derivative(
        &self,
        alpha: [u8; 4],
        t: f64,
        x: [f64; 3],
        quad: SphereQuadrature,
    ) -> Result<Complex64> {
        Ok(self.data(alpha)?.eval(t, x, quad))
    }

    /// The derivative solution as its own WaveScalar.
    pub fn derivative(&self, alpha: [u8; 4]) -> Result<WaveScalar> {
        let d = self.data(alpha)?;
        Ok(WaveScalar::new(d.f.clone(), d.g.clone()).with_max_order(self.max_order))
    }

    /// Radial derivative value (x/r . grad), assembled from cached
    /// Cartesian derivative data; excluded at r = 0.
    pub fn eval_radial_derivative(
        &self,
        t: f64,
        x: [f64; 3],
        quad: SphereQuadrature,
    ) -> Result<Complex64> {
        let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
        if r == 0.0 {
            return Err(SpinError::Precondition(
                "radial derivative excluded at r = 0".into(),
            ));
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for axis in 0..3 {
            let mut a = [0u8; 4];
            a[axis + 1] = 1;
            acc += self.eval_derivative(a, t, x, quad)? * (x[axis] / r);
        }
        Ok(acc)
    }

    /// Null-direction derivatives: D = (d_t + d_r)/sqrt2 along the
    /// outgoing and D' = (d_t - d_r)/sqrt2 along the ingoing direction.
    pub fn eval_null_derivatives(
        &self,
        t: f64,
        x: [f64; 3],
        quad: SphereQuadrature,
    ) -> Result<(Complex64, Complex64)> {
        let dt = self.eval_derivative([1, 0, 0, 0], t, x, quad)?;
        let dr = self.eval_radial_derivative(t, x, quad)?;
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Ok(((dt + dr) * s, (dt - dr) * s))
    }
}

fn bracket(u: f64) -> f64 {
    (1.0 + u * u).sqrt()
}

/// Closed form of the sphere integral of `<|x + t w|>^delta`:
/// branches for delta != -2, the log form at delta = -2, and the
/// degenerate same-bracket case.
pub fn sphere_weight_integral(delta: f64, t: f64, r: f64) -> f64 {
    let bu = bracket(t - r);
    let bv = bracket(t + r);
    let du2 = bu * bu - bv * bv; // = -4 t r
    if du2 == 0.0 {
        return 4.0 * std::f64::consts::PI * bv.powf(delta);
    }
    if delta == -2.0 {
        8.0 * std::f64::consts::PI * (bu / bv).ln() / du2
    } else {
        8.0 * std::f64::consts::PI * (bu.powf(2.0 + delta) - bv.powf(2.0 + delta))
            / ((2.0 + delta) * du2)
    }
}

/// Evaluate the same integral by sphere quadrature and compare.
pub fn quadrature_compare(
    delta: f64,
    t: f64,
    r: f64,
    quad: SphereQuadrature,
) -> (f64, f64, f64) {
    let closed = sphere_weight_integral(delta, t, r);
    let x = [0.0, 0.0, r];
    let numeric = quad
        .integrate(t, x, |o| {
            let y = [x[0] + t * o[0], x[1] + t * o[1], x[2] + t * o[2]];
            let q = y[0] * y[0] + y[1] * y[1] + y[2] * y[2];
            Complex64::new((1.0 + q).powf(0.5 * delta), 0.0)
        })
        .re;
    let rel = (numeric - closed).abs() / closed.abs().max(f64::MIN_POSITIVE);
    (closed, numeric, rel)
}

/// Quadrature compare with automatic order doubling until two successive
/// refinements agree; returns the converged comparison.
pub fn quadrature_compare_doubling(
    delta: f64,
    t: f64,
    r: f64,
    start: usize,
    rtol: f64,
) -> (f64, f64, f64) {
    // the compared integrand is azimuth independent for an axis-aligned
    // center, so refinement is in the polar order only
    let mut n = start;
    let mut prev = quadrature_compare(delta, t, r, SphereQuadrature::Product { n_theta: n, n_phi: 8 });
    loop {
        n *= 2;
        let cur = quadrature_compare(delta, t, r, SphereQuadrature::Product { n_theta: n, n_phi: 8 });
        if (cur.1 - prev.1).abs() <= rtol * cur.1.abs() || n >= 4096 {
            return cur;
        }
        prev = cur;
    }
}

/// Case-selected pointwise decay envelope for derivatives
/// `d_v^k d_u^l (angular)^m` of a solution with data weight `delta`:
/// below the threshold `l - 1` the envelope splits into retarded and
/// advanced factors; at threshold it is logarithmic; above, a single
/// advanced power.
pub fn decay_envelope(delta: f64, k: usize, l: usize, m: usize, u: f64, v: f64) -> f64 {
    let bu = bracket(u);
    let bv = bracket(v);
    let thresh = l as f64 - 1.0;
    if delta < thresh {
        bu.powf(1.0 + delta - l as f64) * bv.powf(-1.0 - k as f64 - m as f64)
    } else if delta == thresh {
        (bv.ln() - bu.ln()) / (bv.powf((l + m) as f64) * (bv - bu).max(f64::MIN_POSITIVE))
    } else {
        bv.powf(delta - (l + m + k) as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn poly_xyz(a: u8, b: u8, cc: u8) -> Profile {
        Profile::term((a, b, cc), 0.0, c(1.0))
    }

    #[test]
    fn constant_solution() {
        let w = WaveScalar::new(Profile::constant(c(1.0)), Profile::zero());
        for (t, x) in [(0.0, [0.2, 0.0, 0.1]), (3.0, [1.0, -2.0, 0.5]), (17.0, [0.0, 0.0, 0.0])] {
            let v = w.eval(t, x, SphereQuadrature::Product { n_theta: 8, n_phi: 16 });
            assert!((v - c(1.0)).norm() < 1e-13);
        }
    }

    #[test]
    fn linear_time_solution() {
        let w = WaveScalar::new(Profile::zero(), Profile::constant(c(1.0)));
        let v = w.eval(5.0, [1.0, 2.0, 3.0], SphereQuadrature::Product { n_theta: 8, n_phi: 16 });
        assert!((v - c(5.0)).norm() < 1e-12);
    }

    #[test]
    fn quadratic_solution_value() {
        // f = r^2/3, g = 0  ->  phi = t^2 + r^2/3; at t=2, x=(1,0,0): 13/3
        let third = c(1.0 / 3.0);
        let f = poly_xyz(2, 0, 0)
            .scale(&third)
            .add(&poly_xyz(0, 2, 0).scale(&third))
            .add(&poly_xyz(0, 0, 2).scale(&third));
        let w = WaveScalar::new(f, Profile::zero());
        let v = w.eval(2.0, [1.0, 0.0, 0.0], SphereQuadrature::Product { n_theta: 8, n_phi: 16 });
        assert!((v - c(13.0 / 3.0)).norm() < 1e-12, "{}", v);
        let v2 = w.eval(2.0, [1.0, 0.0, 0.0], SphereQuadrature::default_eval());
        assert!((v2 - c(13.0 / 3.0)).norm() < 1e-10, "{}", v2);
    }

    #[test]
    fn polynomial_solutions_reproduced_over_time() {
        // (1, t, x_j, t x_j, t^2 + r^2/3, t^3 + t r^2) to 1e-10 relative
        let third = c(1.0 / 3.0);
        let r2_3 = poly_xyz(2, 0, 0)
            .scale(&third)
            .add(&poly_xyz(0, 2, 0).scale(&third))
            .add(&poly_xyz(0, 0, 2).scale(&third));
        let r2 = poly_xyz(2, 0, 0).add(&poly_xyz(0, 2, 0)).add(&poly_xyz(0, 0, 2));
        let cases: Vec<(Profile, Profile, Box<dyn Fn(f64, [f64; 3]) -> f64>)> = vec![
            (
                Profile::constant(c(1.0)),
                Profile::zero(),
                Box::new(|_t, _x| 1.0),
            ),
            (
                Profile::zero(),
                Profile::constant(c(1.0)),
                Box::new(|t, _x| t),
            ),
            (poly_xyz(1, 0, 0), Profile::zero(), Box::new(|_t, x| x[0])),
            (
                Profile::zero(),
                poly_xyz(0, 1, 0),
                Box::new(|t, x| t * x[1]),
            ),
            (
                r2_3,
                Profile::zero(),
                Box::new(|t, x| {
                    t * t + (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]) / 3.0
                }),
            ),
            (
                Profile::zero(),
                r2,
                Box::new(|t, x| {
                    t.powi(3) + t * (x[0] * x[0] + x[1] * x[1] + x[2] * x[2])
                }),
            ),
        ];
        let quad = SphereQuadrature::Product { n_theta: 12, n_phi: 24 };
        for (i, (f, g, exact)) in cases.iter().enumerate() {
            let w = WaveScalar::new(f.clone(), g.clone());
            for &t in &[0.0, 0.5, 3.0, 11.0, 20.0] {
                for &x in &[[0.7, -0.3, 1.1], [5.0, 2.0, -4.0]] {
                    let want = exact(t, x);
                    let got = w.eval(t, x, quad);
                    let scale = want.abs().max(1.0);
                    assert!(
                        (got - c(want)).norm() < 1e-10 * scale,
                        "case {} at t={} x={:?}: {} vs {}",
                        i,
                        t,
                        x,
                        got,
                        want
                    );
                }
            }
        }
    }

    #[test]
    fn time_derivative_swaps_data() {
        // alpha = d_t on (f=0, g=1) gives solution(1, 0) == 1
        let w = WaveScalar::new(Profile::zero(), Profile::constant(c(1.0)));
        let v = w
            .eval_derivative([1, 0, 0, 0], 7.0, [0.3, 0.4, 0.5], SphereQuadrature::Product { n_theta: 6, n_phi: 12 })
            .unwrap();
        assert!((v - c(1.0)).norm() < 1e-12);
    }

    #[test]
    fn spatial_derivative_chain_rule() {
        // d_x of f = <r>^(-3) data: (-3 x <r>^(-5), .)
        let w = WaveScalar::new(Profile::bracket_power(-3.0), Profile::zero());
        let d = w.data([0, 1, 0, 0]).unwrap();
        let pt = [0.4, -1.0, 2.0];
        let want = Profile::term((1, 0, 0), -5.0, c(-3.0)).eval(pt);
        assert!((d.f.eval(pt) - want).norm() < 1e-14);
    }

    #[test]
    fn null_derivative_of_quadratic() {
        // D' of t^2 + r^2/3 is (2t - 2r/3)/sqrt2
        let third = c(1.0 / 3.0);
        let f = poly_xyz(2, 0, 0)
            .scale(&third)
            .add(&poly_xyz(0, 2, 0).scale(&third))
            .add(&poly_xyz(0, 0, 2).scale(&third));
        let w = WaveScalar::new(f, Profile::zero());
        let (t, x) = (3.0, [2.0, 1.0, -2.0]);
        let r = 3.0;
        let (_d, dp) = w
            .eval_null_derivatives(t, x, SphereQuadrature::Product { n_theta: 10, n_phi: 20 })
            .unwrap();
        let want = (2.0 * t - 2.0 * r / 3.0) / std::f64::consts::SQRT_2;
        assert!((dp - c(want)).norm() < 1e-11, "{} vs {}", dp, want);
    }

    #[test]
    fn order_cap_enforced() {
        let w = WaveScalar::new(Profile::zero(), Profile::zero()).with_max_order(2);
        assert!(matches!(
            w.data([3, 0, 0, 0]),
            Err(SpinError::OrderCap { .. })
        ));
    }

    #[test]
    fn weight_integral_at_origin() {
        // r = 0 gives the same-bracket branch 4 pi <v>^delta
        let v = sphere_weight_integral(-1.5, 2.0, 0.0);
        let want = 4.0 * std::f64::consts::PI * (1.0f64 + 4.0).sqrt().powf(-1.5);
        assert!((v - want).abs() < 1e-13 * want.abs());
    }

    #[test]
    fn weight_integral_delta_zero() {
        for (t, r) in [(0.5, 0.2), (3.0, 1.0), (40.0, 39.0)] {
            let v = sphere_weight_integral(0.0, t, r);
            assert!((v - 4.0 * std::f64::consts::PI).abs() < 1e-10);
        }
    }

    #[test]
    fn weight_integral_worked_value() {
        // delta=-3, t=2, r=1: pi (1/sqrt2 - 1/sqrt10)
        let v = sphere_weight_integral(-3.0, 2.0, 1.0);
        let want = std::f64::consts::PI * (1.0 / 2.0f64.sqrt() - 1.0 / 10.0f64.sqrt());
        assert!((v - want).abs() < 1e-14, "{} vs {}", v, want);
        let (_c, _n, rel) = quadrature_compare(-3.0, 2.0, 1.0, SphereQuadrature::default_product());
        assert!(rel < 1e-8, "rel = {:e}", rel);
    }

    #[test]
    fn log_branch_matches_limit() {
        let eps = 1e-7;
        let a = sphere_weight_integral(-2.0, 5.0, 2.0);
        let b = sphere_weight_integral(-2.0 + eps, 5.0, 2.0);
        assert!((a - b).abs() < 1e-5 * a.abs());
    }

    #[test]
    fn quadrature_compare_log_radial_far_field() {
        // near the light cone at large v the plain rule struggles but the
        // log-radial rule stays at roundoff
        let (closed, numeric, rel) = quadrature_compare(
            -2.5,
            50.0,
            49.0,
            SphereQuadrature::LogRadial { n_s: 64, n_phi: 8 },
        );
        assert!(rel < 1e-10, "closed {} numeric {} rel {:e}", closed, numeric, rel);
    }

    #[test]
    fn doubling_compare_converges() {
        let (_c, _n, rel) = quadrature_compare_doubling(-3.5, 50.0, 50.0, 64, 1e-9);
        assert!(rel < 1e-6, "rel {:e}", rel);
    }

    #[test]
    fn envelope_cases() {
        // delta=-2.5, n=0: <u>^(-1.5) <v>^(-1)
        let e = decay_envelope(-2.5, 0, 0, 0, 3.0, 100.0);
        let want = bracket(3.0).powf(-1.5) * bracket(100.0).powf(-1.0);
        assert!((e - want).abs() < 1e-15);
        // delta=-1: log branch bounded by 1/<u>
        for (u, v) in [(2.0, 10.0), (5.0, 500.0), (0.5, 3.0)] {
            let e = decay_envelope(-1.0, 0, 0, 0, u, v);
            assert!(e <= 1.0 / bracket(u) + 1e-12);
        }
        // delta=0.5: <v>^0.5
        let e = decay_envelope(0.5, 0, 0, 0, 1.0, 9.0);
        assert!((e - bracket(9.0).powf(0.5)).abs() < 1e-14);
    }
}
