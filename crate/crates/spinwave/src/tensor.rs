//! Full 2^k-entry spinor tensors. Reference path for transvection and the
//! workhorse for identities whose intermediate objects are not symmetric
//! (the irreducible decomposition of `D phi`).
//!
//! Index convention: entry `t` holds the component whose i-th index equals
//! bit i of `t` (all indices down). Symmetrization bins entries by
//! popcount, which keeps everything linear in 2^k.

use crate::field::Component;
use crate::scalar::binom;
use crate::spinor::Spinor;

#[derive(Clone)]
pub struct FullTensor<C> {
    rank: usize,
    entries: Vec<C>,
}

impl<C: Component> FullTensor<C> {
    pub fn zero(rank: usize) -> Self {
        FullTensor {
            rank,
            entries: vec![C::zero(); 1 << rank],
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn entry(&self, t: usize) -> &C {
        &self.entries[t]
    }

    pub fn entry_mut(&mut self, t: usize) -> &mut C {
        &mut self.entries[t]
    }

    pub fn from_sym(s: &Spinor<C>) -> Self {
        let rank = s.valence();
        let entries = (0..1usize << rank)
            .map(|t| s.comp(t.count_ones() as usize).clone())
            .collect();
        FullTensor { rank, entries }
    }

    /// Extract symmetric components, assuming the tensor is symmetric.
    pub fn to_sym_unchecked(&self) -> Spinor<C> {
        let comps = (0..=self.rank)
            .map(|i| self.entries[(1usize << i) - 1].clone())
            .collect();
        Spinor::new(self.rank, comps)
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!(self.rank, o.rank);
        FullTensor {
            rank: self.rank,
            entries: self
                .entries
                .iter()
                .zip(&o.entries)
                .map(|(a, b)| a.add(b))
                .collect(),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        assert_eq!(self.rank, o.rank);
        FullTensor {
            rank: self.rank,
            entries: self
                .entries
                .iter()
                .zip(&o.entries)
                .map(|(a, b)| a.sub(b))
                .collect(),
        }
    }

    pub fn scale_ratio(&self, n: i128, d: i128) -> Self {
        FullTensor {
            rank: self.rank,
            entries: self.entries.iter().map(|e| e.scale_ratio(n, d)).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    /// Symmetrize over all slots by popcount binning.
    pub fn symmetrize(&self) -> Self {
        let n = self.rank;
        let mut sums: Vec<C> = vec![C::zero(); n + 1];
        for (t, e) in self.entries.iter().enumerate() {
            let i = t.count_ones() as usize;
            sums[i] = sums[i].add(e);
        }
        let avgs: Vec<C> = (0..=n).map(|i| sums[i].scale_ratio(1, binom(n, i))).collect();
        FullTensor {
            rank: n,
            entries: (0..1usize << n)
                .map(|t| avgs[t.count_ones() as usize].clone())
                .collect(),
        }
    }

    /// Symmetrize over a subset of slots, other slots held fixed.
    pub fn symmetrize_slots(&self, slots: &[usize]) -> Self {
        let n = self.rank;
        let m = slots.len();
        let sub_mask: usize = slots.iter().map(|&s| 1usize << s).sum();
        let mut out = FullTensor::zero(n);
        // enumerate assignments of the complement, then bin the subset
        let comp_slots: Vec<usize> = (0..n).filter(|s| sub_mask & (1 << s) == 0).collect();
        for ca in 0..1usize << comp_slots.len() {
            let mut base = 0usize;
            for (bi, &s) in comp_slots.iter().enumerate() {
                if ca & (1 << bi) != 0 {
                    base |= 1 << s;
                }
            }
            let mut sums: Vec<C> = vec![C::zero(); m + 1];
            for sa in 0..1usize << m {
                let mut t = base;
                for (bi, &s) in slots.iter().enumerate() {
                    if sa & (1 << bi) != 0 {
                        t |= 1 << s;
                    }
                }
                let i = sa.count_ones() as usize;
                sums[i] = sums[i].add(&self.entries[t]);
            }
            let avgs: Vec<C> = (0..=m).map(|i| sums[i].scale_ratio(1, binom(m, i))).collect();
            for sa in 0..1usize << m {
                let mut t = base;
                for (bi, &s) in slots.iter().enumerate() {
                    if sa & (1 << bi) != 0 {
                        t |= 1 << s;
                    }
                }
                *out.entry_mut(t) = avgs[sa.count_ones() as usize].clone();
            }
        }
        out
    }

    /// Contract slots (sa, sb) with the raised eps: result has the pattern
    /// `T_{... E ...} S^{... E ...}` realized as `sum eps^{EF} T[..E..F..]`
    /// where E sits in slot `sa` and F in slot `sb` (eps^{01} = 1).
    pub fn eps_contract(&self, sa: usize, sb: usize) -> Self {
        assert!(sa != sb && sa < self.rank && sb < self.rank);
        let n = self.rank;
        let mut out = FullTensor::zero(n - 2);
        let (lo, hi) = if sa < sb { (sa, sb) } else { (sb, sa) };
        for t_out in 0..1usize << (n - 2) {
            // re-insert two slots
            let insert = |t: usize, e_val: usize, f_val: usize| -> usize {
                let low = t & ((1 << lo) - 1);
                let mid = (t >> lo) & ((1 << (hi - 1 - lo)) - 1);
                let high = t >> (hi - 1);
                let mut full = low | (mid << (lo + 1)) | (high << (hi + 1));
                let (a_val, b_val) = if sa < sb { (e_val, f_val) } else { (f_val, e_val) };
                if a_val == 1 {
                    full |= 1 << lo;
                }
                if b_val == 1 {
                    full |= 1 << hi;
                }
                full
            };
            // eps^{EF}: (E,F) = (0,1) -> +1, (1,0) -> -1
            let plus = &self.entries[insert(t_out, 0, 1)];
            let minus = &self.entries[insert(t_out, 1, 0)];
            *out.entry_mut(t_out) = plus.sub(minus);
        }
        out
    }

    /// Tensor product placing `self`'s slots first.
    pub fn outer(&self, o: &Self) -> Self {
        let n = self.rank + o.rank;
        let mut out = FullTensor::zero(n);
        for ta in 0..1usize << self.rank {
            if self.entries[ta].is_zero() {
                continue;
            }
            for tb in 0..1usize << o.rank {
                let t = ta | (tb << self.rank);
                *out.entry_mut(t) = self.entries[ta].mul(&o.entries[tb]);
            }
        }
        out
    }
}

/// Reference transvection: embed into full tensors, contract j pairs with
/// the same orientation as `Spinor::transvect`, symmetrize, extract.
pub fn transvect_oracle<C: Component>(a: &Spinor<C>, b: &Spinor<C>, j: usize) -> Spinor<C> {
    let (p, q) = (a.valence(), b.valence());
    assert!(j <= p.min(q));
    let ta = FullTensor::from_sym(a);
    let tb = FullTensor::from_sym(b);
    // lay out a-slots then b-slots; contract a's last j against b's first j
    let mut prod = ta.outer(&tb);
    for s in 0..j {
        // after s contractions, a has p-s slots left and b starts right after
        let sa = p - s - 1;
        let sb = sa + 1;
        prod = prod.eps_contract(sa, sb);
    }
    let _ = q;
    prod.symmetrize().to_sym_unchecked()
}
