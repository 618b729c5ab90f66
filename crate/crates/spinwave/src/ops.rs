//! Fundamental operators on symmetric spinor fields.
//!
//! `Div`, `Curl`, `Twist` are the three irreducible pieces of `D_AB`; `G`
//! and `F` are the higher-order operators built from iterated one-index
//! contractions with a single end symmetrization. The iterated chains are
//! evaluated on a two-block (bisymmetric) representation: `m` chain indices
//! and the remaining field indices, each block symmetric. Identities among
//! these operators are verified elsewhere with exact arithmetic; nothing
//! here relies on them.

use crate::error::{Result, SpinError};
use crate::field::{Component, RingField};
use crate::scalar::{binom, neg_two_pow, Ring};
use crate::soldering::Soldering;
use crate::spinor::Spinor;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OpTag {
    /// valence k -> k-2
    Div(usize),
    /// valence k -> k
    Curl(usize),
    /// valence k -> k+2
    Twist(usize),
    /// componentwise Laplacian power: k -> k
    Lap(usize, usize),
    /// order k-1 potential operator: k -> k
    G(usize),
    /// order 2*floor(s) companion operator: 2s -> 2s
    F(usize),
}

impl OpTag {
    pub fn source_valence(&self) -> usize {
        match *self {
            OpTag::Div(k) | OpTag::Curl(k) | OpTag::Twist(k) | OpTag::G(k) | OpTag::F(k) => k,
            OpTag::Lap(k, _) => k,
        }
    }

    pub fn target_valence(&self) -> Option<usize> {
        match *self {
            OpTag::Div(k) => k.checked_sub(2),
            OpTag::Curl(k) | OpTag::Lap(k, _) | OpTag::G(k) | OpTag::F(k) => Some(k),
            OpTag::Twist(k) => Some(k + 2),
        }
    }
}

/// How the derivative acts on a component: true partials for fields, or
/// multiplication by a covector variable when building symbols.
pub trait DerAction<C>: Sync {
    fn d(&self, f: &C, axis: usize) -> C;
}

pub struct PartialDer;

impl<C: Component> DerAction<C> for PartialDer {
    fn d(&self, f: &C, axis: usize) -> C {
        f.derive(axis)
    }
}

/// Context bundling the soldering set with a derivative action.
pub struct OpCtx<'a, R: RingField, C: Component<R = R>, D: DerAction<C>> {
    pub sold: &'a Soldering<R>,
    pub der: D,
    _marker: std::marker::PhantomData<C>,
}

impl<'a, R: RingField, C: Component<R = R>> OpCtx<'a, R, C, PartialDer> {
    pub fn fields(sold: &'a Soldering<R>) -> Self {
        OpCtx {
            sold,
            der: PartialDer,
            _marker: std::marker::PhantomData,
        }
    }
}

impl<'a, R: RingField, C: Component<R = R>, D: DerAction<C>> OpCtx<'a, R, C, D> {
    pub fn with_der(sold: &'a Soldering<R>, der: D) -> Self {
        OpCtx {
            sold,
            der,
            _marker: std::marker::PhantomData,
        }
    }

    /// Componentwise Laplacian `D_AB D^AB = -(sum_j d_j^2)`.
    pub fn laplacian(&self, phi: &Spinor<C>) -> Spinor<C> {
        phi.map(|c| {
            let mut acc = C::zero();
            for axis in 0..3 {
                acc = acc.add(&self.der.d(&self.der.d(c, axis), axis));
            }
            acc.neg()
        })
    }

    pub fn laplacian_power(&self, phi: &Spinor<C>, m: usize) -> Spinor<C> {
        let mut cur = phi.clone();
        for _ in 0..m {
            cur = self.laplacian(&cur);
        }
        cur
    }

    /// Divergence: `(div phi)_{A...} = D^{BC} phi_{A...BC}`, k >= 2.
    pub fn div(&self, phi: &Spinor<C>) -> Result<Spinor<C>> {
        let k = phi.valence();
        if k < 2 {
            return Err(SpinError::ValenceMismatch {
                op: "div".into(),
                expected: ">= 2".into(),
                found: k,
            });
        }
        let mut acc = Spinor::zero(k - 2);
        for axis in 0..3 {
            let dphi = phi.map(|c| self.der.d(c, axis));
            let sig = self.sold.sigma_field::<C>(axis);
            acc = acc.add(&dphi.transvect(&sig, 2)?);
        }
        Ok(acc)
    }

    /// Curl: `(curl phi)_{A...} = D_(A1^B phi_{A2...)B}`, k >= 1.
    pub fn curl(&self, phi: &Spinor<C>) -> Result<Spinor<C>> {
        let k = phi.valence();
        if k < 1 {
            return Err(SpinError::ValenceMismatch {
                op: "curl".into(),
                expected: ">= 1".into(),
                found: k,
            });
        }
        let mut acc = Spinor::zero(k);
        for axis in 0..3 {
            let dphi = phi.map(|c| self.der.d(c, axis));
            let sig = self.sold.sigma_field::<C>(axis);
            acc = acc.add(&dphi.transvect(&sig, 1)?);
        }
        Ok(acc)
    }

    /// Twistor operator: full symmetrization of `D_AB phi`.
    pub fn twist(&self, phi: &Spinor<C>) -> Spinor<C> {
        let mut acc = Spinor::zero(phi.valence() + 2);
        for axis in 0..3 {
            let dphi = phi.map(|c| self.der.d(c, axis));
            let sig = self.sold.sigma_field::<C>(axis);
            acc = acc.add(&dphi.transvect(&sig, 0).expect("no contraction"));
        }
        acc
    }

    /// Chain of `m` one-index derivative contractions with a single final
    /// symmetrization: `D_(A1^B1 ... D_Am^Bm psi_{rest) B1...Bm}`.
    pub fn sym_chain(&self, psi: &Spinor<C>, m: usize) -> Spinor<C> {
        assert!(m <= psi.valence(), "chain length exceeds valence");
        if m == 0 {
            return psi.clone();
        }
        let mut bi = BiSym::from_spinor(psi);
        for _ in 0..m {
            bi = bi.chain_step(self);
        }
        bi.full_sym()
    }

    /// The defining sum of the order k-1 operator `G_k`.
    pub fn g_op(&self, phi: &Spinor<C>) -> Result<Spinor<C>> {
        let k = phi.valence();
        if k < 1 {
            return Err(SpinError::ValenceMismatch {
                op: "G".into(),
                expected: ">= 1".into(),
                found: k,
            });
        }
        let mut acc = Spinor::zero(k);
        for n in 0..=(k - 1) / 2 {
            let lap = self.laplacian_power(phi, n);
            let chain = self.sym_chain(&lap, k - 2 * n - 1);
            let (sn, sd) = neg_two_pow(-(n as i32));
            acc = acc.add(&chain.scale_ratio(binom(k, 2 * n + 1) * sn, sd));
        }
        Ok(acc)
    }

    /// Closed-form expansion of `G_k curl_k` (and `curl_k G_k`): the even
    /// chain sum with binomial(k, 2n) coefficients.
    pub fn g_curl_expansion(&self, phi: &Spinor<C>) -> Spinor<C> {
        let k = phi.valence();
        let mut acc = Spinor::zero(k);
        for n in 0..=k / 2 {
            let lap = self.laplacian_power(phi, n);
            let chain = self.sym_chain(&lap, k - 2 * n);
            let (sn, sd) = neg_two_pow(-(n as i32));
            acc = acc.add(&chain.scale_ratio(binom(k, 2 * n) * sn, sd));
        }
        acc
    }

    /// The companion operator `F_{2s}` of order `2 floor(s)`.
    pub fn f_op(&self, phi: &Spinor<C>) -> Spinor<C> {
        let k = phi.valence(); // k = 2s
        let s_floor = k / 2;
        let mut acc = Spinor::zero(k);
        for n in 0..=s_floor {
            // coefficient sum over m
            let mut coeff: i128 = 0;
            for m in 0..=(s_floor - n) {
                coeff += binom(k + 2, 2 * n + 2 * m + 2);
            }
            let (sn, sd) = neg_two_pow(n as i32);
            let lap = self.laplacian_power(phi, s_floor - n);
            let chain = self.sym_chain(&lap, 2 * n);
            acc = acc.add(&chain.scale_ratio(coeff * sn, sd));
        }
        // overall 2^(-2s)
        acc.scale_ratio(1, 1i128 << k)
    }

    /// `twist(F(div(phi)))`, the elliptic-complex complement of `G`; zero
    /// map when the divergence lands in the trivial space.
    pub fn twist_f_div(&self, phi: &Spinor<C>) -> Result<Spinor<C>> {
        let k = phi.valence();
        if k < 2 {
            return Ok(Spinor::zero(k));
        }
        let d = self.div(phi)?;
        let f = self.f_op(&d);
        Ok(self.twist(&f))
    }

    pub fn apply(&self, tag: OpTag, phi: &Spinor<C>) -> Result<Spinor<C>> {
        let k = phi.valence();
        if tag.source_valence() != k {
            return Err(SpinError::ValenceMismatch {
                op: format!("{:?}", tag),
                expected: format!("{}", tag.source_valence()),
                found: k,
            });
        }
        match tag {
            OpTag::Div(_) => self.div(phi),
            OpTag::Curl(_) => self.curl(phi),
            OpTag::Twist(_) => Ok(self.twist(phi)),
            OpTag::Lap(_, p) => Ok(self.laplacian_power(phi, p)),
            OpTag::G(_) => self.g_op(phi),
            OpTag::F(_) => Ok(self.f_op(phi)),
        }
    }
}

/// Bisymmetric two-block object: `p` chain indices and `q` field indices,
/// symmetric within each block. Stored as tensor components indexed by the
/// number of 1-indices in each block.
pub struct BiSym<C> {
    p: usize,
    q: usize,
    comps: Vec<C>, // (p+1) x (q+1), row-major in the chain block
}

impl<C: Component> BiSym<C> {
    fn zero(p: usize, q: usize) -> Self {
        BiSym {
            p,
            q,
            comps: vec![C::zero(); (p + 1) * (q + 1)],
        }
    }

    fn from_spinor(phi: &Spinor<C>) -> Self {
        BiSym {
            p: 0,
            q: phi.valence(),
            comps: phi.comps().to_vec(),
        }
    }

    fn at(&self, a: usize, b: usize) -> &C {
        &self.comps[a * (self.q + 1) + b]
    }

    fn at_mut(&mut self, a: usize, b: usize) -> &mut C {
        &mut self.comps[a * (self.q + 1) + b]
    }

    /// One chain step: contract one field index with `D`, the free `D`
    /// index joining the chain block. In binary-form language (chain
    /// variable z, field variable w):
    ///
    ///   Z(z, w) = (1/q) sum_j [ dw0 F_j * (s01 z0 + s11 z1)
    ///                         - dw1 F_j * (s00 z0 + s01 z1) ]
    ///
    /// with F_j the axis-j derivative of F and s the sigma components.
    fn chain_step<R, D>(&self, ctx: &OpCtx<'_, R, C, D>) -> BiSym<C>
    where
        R: RingField,
        C: Component<R = R>,
        D: DerAction<C>,
    {
        let (p, q) = (self.p, self.q);
        assert!(q >= 1, "no field index left to contract");
        let mut out: BiSym<C> = BiSym::zero(p + 1, q - 1);
        // poly coefficients c_{a,b} = C(p,a) C(q,b) T_{a,b}
        for axis in 0..3 {
            let s00 = &ctx.sold.sigma[axis][0];
            let s01 = &ctx.sold.sigma[axis][1];
            let s11 = &ctx.sold.sigma[axis][2];
            for ap in 0..=(p + 1) {
                for bp in 0..=(q - 1) {
                    // four contributions, in poly-coefficient space:
                    // c^Z_{ap,bp} = (1/q) [ s01 (q-bp) c_{ap,bp}
                    //                     + s11 (q-bp) c_{ap-1,bp}
                    //                     - s00 (bp+1) c_{ap,bp+1}
                    //                     - s01 (bp+1) c_{ap-1,bp+1} ]
                    let mut acc = C::zero();
                    let mut add_term = |sig: &R, sign: i128, a: isize, b: usize, w: i128| {
                        if Ring::is_zero(sig) || w == 0 {
                            return;
                        }
                        if a < 0 || a as usize > p || b > q {
                            return;
                        }
                        let a = a as usize;
                        let src = ctx.der.d(self.at(a, b), axis);
                        // poly coeff of source: C(p,a) C(q,b)
                        let num = sign * w * binom(p, a) * binom(q, b);
                        acc = acc.add(&src.scale(sig).scale_ratio(num, 1));
                    };
                    add_term(s01, 1, ap as isize, bp, (q - bp) as i128);
                    add_term(s11, 1, ap as isize - 1, bp, (q - bp) as i128);
                    add_term(s00, -1, ap as isize, bp + 1, (bp + 1) as i128);
                    add_term(s01, -1, ap as isize - 1, bp + 1, (bp + 1) as i128);
                    // back to tensor components: divide by q C(p+1,ap) C(q-1,bp)
                    let den = q as i128 * binom(p + 1, ap) * binom(q - 1, bp);
                    let t = acc.scale_ratio(1, den);
                    *out.at_mut(ap, bp) = out.at(ap, bp).add(&t);
                }
            }
        }
        out
    }

    /// Full symmetrization over both blocks: set w = z in the bi-form.
    fn full_sym(&self) -> Spinor<C> {
        let (p, q) = (self.p, self.q);
        let n = p + q;
        let mut acc: Vec<C> = vec![C::zero(); n + 1];
        for a in 0..=p {
            for b in 0..=q {
                let c = self.at(a, b);
                if c.is_zero() {
                    continue;
                }
                let w = binom(p, a) * binom(q, b);
                acc[a + b] = acc[a + b].add(&c.scale_ratio(w, 1));
            }
        }
        let comps = (0..=n)
            .map(|g| acc[g].scale_ratio(1, binom(n, g)))
            .collect();
        Spinor::new(n, comps)
    }
}
