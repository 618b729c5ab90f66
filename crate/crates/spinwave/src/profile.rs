//! Closed-form radial profiles: finite sums of `c * x^a y^b z^c * <r>^e`
//! with `<r> = (1 + r^2)^(1/2)`. The family is closed under partial
//! derivatives and smooth on all of R^3, which is what the Kirchhoff
//! evaluator needs from its Cauchy data.

use crate::error::{Result, SpinError};
use crate::field::Component;
use crate::quad::{gl_on_interval, SphereRule};
use crate::spinor::Spinor;
use num_complex::Complex64;
use std::collections::BTreeMap;

type Key = (u8, u8, u8, u64); // monomial exponents + bit pattern of e

#[derive(Clone, PartialEq, Debug)]
pub struct Profile {
    terms: BTreeMap<Key, Complex64>,
}

impl Profile {
    pub fn zero() -> Self {
        Profile {
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(c: Complex64) -> Self {
        let mut p = Profile::zero();
        p.push((0, 0, 0), 0.0, c);
        p
    }

    /// c * x^a y^b z^c * <r>^e
    pub fn term(mono: (u8, u8, u8), e: f64, c: Complex64) -> Self {
        let mut p = Profile::zero();
        p.push(mono, e, c);
        p
    }

    /// <r>^e
    pub fn bracket_power(e: f64) -> Self {
        Profile::term((0, 0, 0), e, Complex64::new(1.0, 0.0))
    }

    fn push(&mut self, mono: (u8, u8, u8), e: f64, c: Complex64) {
        if c.norm_sqr() == 0.0 {
            return;
        }
        let key = (mono.0, mono.1, mono.2, e.to_bits());
        match self.terms.get_mut(&key) {
            Some(v) => {
                *v += c;
                if v.norm_sqr() == 0.0 {
                    self.terms.remove(&key);
                }
            }
            None => {
                self.terms.insert(key, c);
            }
        }
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = ((u8, u8, u8), f64, Complex64)> + '_ {
        self.terms
            .iter()
            .map(|(&(a, b, c, e), &v)| ((a, b, c), f64::from_bits(e), v))
    }

    pub fn eval(&self, x: [f64; 3]) -> Complex64 {
        let r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
        let br = 1.0 + r2;
        let mut acc = Complex64::new(0.0, 0.0);
        for ((a, b, c), e, v) in self.terms() {
            let mono = powi(x[0], a) * powi(x[1], b) * powi(x[2], c);
            acc += v * mono * br.powf(0.5 * e);
        }
        acc
    }

    /// Largest `a+b+c+e` over the terms: an upper bound for the growth
    /// exponent at spatial infinity.
    pub fn growth_exponent(&self) -> f64 {
        self.terms()
            .map(|((a, b, c), e, _)| (a + b + c) as f64 + e)
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

fn powi(x: f64, n: u8) -> f64 {
    let mut acc = 1.0;
    for _ in 0..n {
        acc *= x;
    }
    acc
}

impl Component for Profile {
    type R = Complex64;

    fn zero() -> Self {
        Profile::zero()
    }
    fn from_scalar(c: Complex64) -> Self {
        Profile::constant(c)
    }
    fn add(&self, o: &Self) -> Self {
        let mut r = self.clone();
        for (mono, e, v) in o.terms() {
            r.push(mono, e, v);
        }
        r
    }
    fn sub(&self, o: &Self) -> Self {
        let mut r = self.clone();
        for (mono, e, v) in o.terms() {
            r.push(mono, e, -v);
        }
        r
    }
    fn neg(&self) -> Self {
        let mut r = Profile::zero();
        for (mono, e, v) in self.terms() {
            r.push(mono, e, -v);
        }
        r
    }
    fn scale(&self, c: &Complex64) -> Self {
        let mut r = Profile::zero();
        for (mono, e, v) in self.terms() {
            r.push(mono, e, v * c);
        }
        r
    }
    fn mul(&self, o: &Self) -> Self {
        let mut r = Profile::zero();
        for (m1, e1, v1) in self.terms() {
            for (m2, e2, v2) in o.terms() {
                r.push((m1.0 + m2.0, m1.1 + m2.1, m1.2 + m2.2), e1 + e2, v1 * v2);
            }
        }
        r
    }
    /// d_j <r>^e = e x_j <r>^(e-2); term count grows by at most 2 per term.
    fn derive(&self, axis: usize) -> Self {
        let mut r = Profile::zero();
        for ((a, b, c), e, v) in self.terms() {
            let m = [a, b, c];
            if m[axis] > 0 {
                let mut dm = m;
                dm[axis] -= 1;
                r.push(
                    (dm[0], dm[1], dm[2]),
                    e,
                    v * Complex64::new(m[axis] as f64, 0.0),
                );
            }
            if e != 0.0 {
                let mut um = m;
                um[axis] += 1;
                r.push((um[0], um[1], um[2]), e - 2.0, v * Complex64::new(e, 0.0));
            }
        }
        r
    }
    fn conjugate(&self) -> Self {
        let mut r = Profile::zero();
        for (mono, e, v) in self.terms() {
            r.push(mono, e, v.conj());
        }
        r
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

/// Radial quadrature in the compactified coordinate rho = r/(1+r), with
/// panels graded toward rho = 1 to resolve the fractional endpoint
/// behavior of non-integer weights.
pub struct RadialRule {
    /// (r, weight) pairs carrying the r^2 dr volume factor *excluded*
    pub nodes: Vec<(f64, f64)>,
}

impl RadialRule {
    pub fn graded(panels: usize, per_panel: usize) -> Self {
        let mut bounds = vec![0.0f64];
        for m in 1..panels {
            bounds.push(1.0 - 0.5f64.powi(m as i32));
        }
        bounds.push(1.0);
        let mut nodes = Vec::new();
        for pair in bounds.windows(2) {
            let (xs, ws) = gl_on_interval(per_panel, pair[0], pair[1]);
            for (rho, w) in xs.iter().zip(&ws) {
                // r = rho/(1-rho), dr = drho/(1-rho)^2
                let om = 1.0 - rho;
                let r = rho / om;
                nodes.push((r, w / (om * om)));
            }
        }
        RadialRule { nodes }
    }
}

/// H^j_delta squared norm of a spinor field of profiles, by quadrature:
/// sum_{n<=j} || <r>^(-(delta+3/2)+n) D^n phi ||_2^2.
///
/// Divergence is detected first by exponent bookkeeping on the leading
/// growth exponents; a divergent request is an error, not a number.
pub fn weighted_norm_sq(
    phi: &Spinor<Profile>,
    j: usize,
    delta: f64,
    radial: &RadialRule,
    angular: SphereRule,
) -> Result<f64> {
    // derivative layers: all partials up to order j
    let mut layers: Vec<Vec<(Vec<usize>, Spinor<Profile>)>> = vec![vec![(vec![], phi.clone())]];
    for n in 1..=j {
        let prev = &layers[n - 1];
        let mut next = Vec::new();
        for (idx, f) in prev {
            // extend by one derivative; to avoid duplicates only extend with
            // axes >= last axis and track multiplicity below
            let start = idx.last().copied().unwrap_or(0);
            for axis in start..3 {
                let mut nid = idx.clone();
                nid.push(axis);
                next.push((nid, f.derive(axis)));
            }
        }
        layers.push(next);
    }

    // membership: for each n, integrand grows like r^(2 g_n - 2 delta - 3 + 2n + 2)
    for (n, layer) in layers.iter().enumerate() {
        let mut g = f64::NEG_INFINITY;
        for (_, f) in layer {
            for c in f.comps() {
                if !c.is_zero() {
                    g = g.max(c.growth_exponent());
                }
            }
        }
        if g == f64::NEG_INFINITY {
            continue;
        }
        let power = 2.0 * g + 2.0 * (-(delta + 1.5) + n as f64) + 2.0;
        if power >= -1.0 {
            return Err(SpinError::NormDivergence(format!(
                "order-{} term has radial power {:.2} >= -1",
                n, power
            )));
        }
    }

    let k = phi.valence();
    let wts: Vec<f64> = (0..=k).map(|i| crate::scalar::binom(k, i) as f64).collect();
    let mut total = 0.0f64;
    for (n, layer) in layers.iter().enumerate() {
        let wexp = -(delta + 1.5) + n as f64;
        for (idx, f) in layer {
            let mult = multiplicity(idx);
            let mut integral = 0.0f64;
            for &(r, wr) in &radial.nodes {
                // squared weight <r>^(2 wexp) = (1+r^2)^wexp
                let wsq = (1.0 + r * r).powf(wexp);
                let shell: f64 = angular.integrate([0.0, 0.0, 1.0], |o| {
                    let x = [r * o[0], r * o[1], r * o[2]];
                    let mut p = 0.0;
                    for (i, c) in f.comps().iter().enumerate() {
                        p += wts[i] * c.eval(x).norm_sqr();
                    }
                    p
                });
                integral += wr * r * r * wsq * shell;
            }
            total += mult * integral;
        }
    }
    Ok(total)
}

/// number of orderings of a sorted multi-index
fn multiplicity(idx: &[usize]) -> f64 {
    let n = idx.len();
    if n == 0 {
        return 1.0;
    }
    let mut counts = [0usize; 3];
    for &a in idx {
        counts[a] += 1;
    }
    let fact = |m: usize| (1..=m).map(|v| v as f64).product::<f64>().max(1.0);
    fact(n) / (fact(counts[0]) * fact(counts[1]) * fact(counts[2]))
}
