//! Gauss-Legendre nodes and product sphere rules.

use once_cell::sync::Lazy;
use std::collections::HashMap;
use std::sync::{Arc, Mutex};

/// Nodes and weights on [-1, 1].
pub fn gauss_legendre(n: usize) -> Arc<(Vec<f64>, Vec<f64>)> {
    static CACHE: Lazy<Mutex<HashMap<usize, Arc<(Vec<f64>, Vec<f64>)>>>> =
        Lazy::new(|| Mutex::new(HashMap::new()));
    let mut cache = CACHE.lock().unwrap();
    cache
        .entry(n)
        .or_insert_with(|| Arc::new(compute_gl(n)))
        .clone()
}

fn compute_gl(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        // Tricomi-style initial guess, then Newton on P_n
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_and_deriv(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre_and_deriv(n, x);
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    nodes.reverse();
    weights.reverse();
    (nodes, weights)
}

fn legendre_and_deriv(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Map GL nodes to an interval [a, b].
pub fn gl_on_interval(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let gl = gauss_legendre(n);
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let nodes = gl.0.iter().map(|&x| mid + half * x).collect();
    let weights = gl.1.iter().map(|&w| w * half).collect();
    (nodes, weights)
}

/// Product rule on the unit sphere: Gauss-Legendre in cos(theta) times a
/// uniform azimuth grid. Exact for spherical polynomials of degree up to
/// min(2 n_theta - 1, n_phi - 1).
#[derive(Clone, Copy, Debug)]
pub struct SphereRule {
    pub n_theta: usize,
    pub n_phi: usize,
}

impl SphereRule {
    pub fn new(n_theta: usize, n_phi: usize) -> Self {
        SphereRule { n_theta, n_phi }
    }

    /// Integrate F(omega) over the sphere (measure of total mass 4 pi),
    /// with the polar axis along `axis` (unit vector).
    pub fn integrate<T, F>(&self, axis: [f64; 3], mut f: F) -> T
    where
        T: std::ops::Add<Output = T> + std::ops::Mul<f64, Output = T> + Default + Copy,
        F: FnMut([f64; 3]) -> T,
    {
        let (e1, e2, e3) = frame_from_axis(axis);
        let gl = gauss_legendre(self.n_theta);
        let dphi = 2.0 * std::f64::consts::PI / self.n_phi as f64;
        let mut acc = T::default();
        for (&w_node, &w_weight) in gl.0.iter().zip(gl.1.iter()) {
            let s = (1.0 - w_node * w_node).max(0.0).sqrt();
            for j in 0..self.n_phi {
                let phi = dphi * j as f64;
                let omega = [
                    w_node * e1[0] + s * (phi.cos() * e2[0] + phi.sin() * e3[0]),
                    w_node * e1[1] + s * (phi.cos() * e2[1] + phi.sin() * e3[1]),
                    w_node * e1[2] + s * (phi.cos() * e2[2] + phi.sin() * e3[2]),
                ];
                acc = acc + f(omega) * (w_weight * dphi);
            }
        }
        acc
    }
}

/// Orthonormal frame with e1 = axis.
pub fn frame_from_axis(axis: [f64; 3]) -> ([f64; 3], [f64; 3], [f64; 3]) {
    let n: f64 = axis.iter().map(|v| v * v).sum::<f64>().sqrt();
    let e1 = if n > 0.0 {
        [axis[0] / n, axis[1] / n, axis[2] / n]
    } else {
        [0.0, 0.0, 1.0]
    };
    // pick the least-aligned coordinate direction
    let pick = if e1[0].abs() < e1[1].abs() && e1[0].abs() < e1[2].abs() {
        [1.0, 0.0, 0.0]
    } else if e1[1].abs() < e1[2].abs() {
        [0.0, 1.0, 0.0]
    } else {
        [0.0, 0.0, 1.0]
    };
    let mut e2 = [
        pick[0] - e1[0] * dot(pick, e1),
        pick[1] - e1[1] * dot(pick, e1),
        pick[2] - e1[2] * dot(pick, e1),
    ];
    let n2 = dot(e2, e2).sqrt();
    for v in e2.iter_mut() {
        *v /= n2;
    }
    let e3 = cross(e1, e2);
    (e1, e2, e3)
}

pub fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Adaptive Simpson quadrature on [a, b] (used as an independent 1-D
/// oracle in tests).
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(f: &dyn Fn(f64) -> f64, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        let s = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
        (m, fm, s)
    }
    fn rec(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        m: f64,
        fm: f64,
        s: f64,
        tol: f64,
        depth: usize,
    ) -> f64 {
        let (lm, flm, sl) = simpson(f, a, fa, m, fm);
        let (rm, frm, sr) = simpson(f, m, fm, b, fb);
        let s2 = sl + sr;
        if depth == 0 || (s2 - s).abs() < 15.0 * tol {
            s2 + (s2 - s) / 15.0
        } else {
            rec(f, a, fa, m, fm, lm, flm, sl, tol / 2.0, depth - 1)
                + rec(f, m, fm, b, fb, rm, frm, sr, tol / 2.0, depth - 1)
        }
    }
    let fa = f(a);
    let fb = f(b);
    let (m, fm, s) = simpson(f, a, fa, b, fb);
    rec(f, a, fa, b, fb, m, fm, s, tol, 50)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gl_integrates_polynomials_exactly() {
        let (x, w) = gl_on_interval(8, -1.0, 1.0);
        // x^14 has degree < 2*8
        let val: f64 = x.iter().zip(&w).map(|(xi, wi)| xi.powi(14) * wi).sum();
        assert!((val - 2.0 / 15.0).abs() < 1e-14);
    }

    #[test]
    fn sphere_rule_exact_on_harmonics() {
        let rule = SphereRule::new(8, 16);
        // mean of omega_z^2 is 1/3; total measure 4 pi
        let v: f64 = rule.integrate([0.3, 0.4, 0.5], |o| o[2] * o[2]);
        assert!((v - 4.0 * std::f64::consts::PI / 3.0).abs() < 1e-12);
        let one: f64 = rule.integrate([0.0, 0.0, 1.0], |_| 1.0);
        assert!((one - 4.0 * std::f64::consts::PI).abs() < 1e-12);
        // odd harmonic integrates to zero
        let odd: f64 = rule.integrate([1.0, 2.0, -1.0], |o| o[0] * o[1] * o[2]);
        assert!(odd.abs() < 1e-13);
    }

    #[test]
    fn simpson_oracle() {
        let v = adaptive_simpson(&|x: f64| (-x).exp(), 0.0, 30.0, 1e-12);
        assert!((v - 1.0).abs() < 1e-9);
    }

    #[test]
    fn gl_high_order_stable() {
        let (x, w) = gl_on_interval(512, 0.0, 1.0);
        let val: f64 = x.iter().zip(&w).map(|(xi, wi)| xi * wi).sum();
        assert!((val - 0.5).abs() < 1e-13);
    }
}
