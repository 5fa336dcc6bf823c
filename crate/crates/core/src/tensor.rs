//! Sparse tensors over a labelled basis: finite maps from label tuples to
//! exact scalars. Up to four slots; each label fits in 16 bits.

use crate::scalars::Scalar;
use rustc_hash::FxHashMap;
use smallvec::SmallVec;

pub type Label = u32;

pub const MAX_RANK: usize = 4;
const SLOT_BITS: u32 = 16;
const SLOT_MASK: u64 = (1 << SLOT_BITS) - 1;

/// Packs a label tuple into a key.
pub fn pack(labels: &[Label]) -> u64 {
    debug_assert!(labels.len() <= MAX_RANK);
    labels.iter().enumerate().fold(0u64, |acc, (i, &l)| {
        debug_assert!((l as u64) <= SLOT_MASK);
        acc | ((l as u64) << (SLOT_BITS * i as u32))
    })
}

pub fn unpack(key: u64, rank: usize) -> SmallVec<[Label; MAX_RANK]> {
    (0..rank).map(|i| ((key >> (SLOT_BITS * i as u32)) & SLOT_MASK) as Label).collect()
}

#[inline]
pub fn slot(key: u64, i: usize) -> Label {
    ((key >> (SLOT_BITS * i as u32)) & SLOT_MASK) as Label
}

#[inline]
pub fn with_slot(key: u64, i: usize, l: Label) -> u64 {
    let shift = SLOT_BITS * i as u32;
    (key & !(SLOT_MASK << shift)) | ((l as u64) << shift)
}

#[derive(Clone, Debug, Default)]
pub struct SparseTensor {
    rank: usize,
    terms: FxHashMap<u64, Scalar>,
}

impl PartialEq for SparseTensor {
    fn eq(&self, other: &Self) -> bool {
        self.rank == other.rank && self.terms == other.terms
    }
}
impl Eq for SparseTensor {}

impl SparseTensor {
    pub fn zero(rank: usize) -> SparseTensor {
        assert!(rank <= MAX_RANK);
        SparseTensor { rank, terms: FxHashMap::default() }
    }

    pub fn basis(labels: &[Label]) -> SparseTensor {
        SparseTensor::single(labels, Scalar::one())
    }

    pub fn single(labels: &[Label], c: Scalar) -> SparseTensor {
        let mut t = SparseTensor::zero(labels.len());
        t.add_term(pack(labels), c);
        t
    }

    pub fn scalar(c: Scalar) -> SparseTensor {
        let mut t = SparseTensor::zero(0);
        t.add_term(0, c);
        t
    }

    pub fn from_terms(rank: usize, terms: impl IntoIterator<Item = (u64, Scalar)>) -> SparseTensor {
        let mut t = SparseTensor::zero(rank);
        for (k, c) in terms {
            t.add_term(k, c);
        }
        t
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, &Scalar)> {
        self.terms.iter().map(|(k, v)| (*k, v))
    }

    pub fn get(&self, labels: &[Label]) -> Scalar {
        self.terms.get(&pack(labels)).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn get_key(&self, key: u64) -> Option<&Scalar> {
        self.terms.get(&key)
    }

    /// Terms sorted by key, for deterministic output.
    pub fn sorted(&self) -> Vec<(SmallVec<[Label; MAX_RANK]>, Scalar)> {
        let mut v: Vec<(u64, &Scalar)> = self.iter().collect();
        v.sort_by_key(|(k, _)| {
            // lexicographic in slot order
            let ls = unpack(*k, self.rank);
            ls.iter().fold(0u64, |acc, &l| (acc << SLOT_BITS) | l as u64)
        });
        v.into_iter().map(|(k, c)| (unpack(k, self.rank), c.clone())).collect()
    }

    pub fn add_term(&mut self, key: u64, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(key) {
            std::collections::hash_map::Entry::Occupied(mut e) => {
                let s = e.get().add(&c);
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
            std::collections::hash_map::Entry::Vacant(e) => {
                e.insert(c);
            }
        }
    }

    pub fn add_scaled(&mut self, other: &SparseTensor, c: &Scalar) {
        assert_eq!(self.rank, other.rank, "rank mismatch");
        if c.is_zero() {
            return;
        }
        for (k, v) in other.iter() {
            self.add_term(k, v * c);
        }
    }

    pub fn add_assign(&mut self, other: &SparseTensor) {
        assert_eq!(self.rank, other.rank, "rank mismatch");
        for (k, v) in other.iter() {
            self.add_term(k, v.clone());
        }
    }

    pub fn add(&self, other: &SparseTensor) -> SparseTensor {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    pub fn sub(&self, other: &SparseTensor) -> SparseTensor {
        let mut out = self.clone();
        out.add_scaled(other, &Scalar::from_int(-1));
        out
    }

    pub fn scale(&self, c: &Scalar) -> SparseTensor {
        if c.is_zero() {
            return SparseTensor::zero(self.rank);
        }
        SparseTensor { rank: self.rank, terms: self.terms.iter().map(|(k, v)| (*k, v * c)).collect() }
    }

    pub fn neg(&self) -> SparseTensor {
        self.scale(&Scalar::from_int(-1))
    }

    /// a ⊗ b, slots of `a` first.
    pub fn outer(&self, other: &SparseTensor) -> SparseTensor {
        assert!(self.rank + other.rank <= MAX_RANK);
        let shift = SLOT_BITS * self.rank as u32;
        let mut out = SparseTensor::zero(self.rank + other.rank);
        for (ka, va) in self.iter() {
            for (kb, vb) in other.iter() {
                out.add_term(ka | (kb << shift), va * vb);
            }
        }
        out
    }

    /// Rearranges slots: slot i of the result holds slot perm[i] of self.
    pub fn permute(&self, perm: &[usize]) -> SparseTensor {
        assert_eq!(perm.len(), self.rank);
        let mut out = SparseTensor::zero(self.rank);
        for (k, v) in self.iter() {
            let nk = perm.iter().enumerate().fold(0u64, |acc, (i, &p)| acc | ((slot(k, p) as u64) << (SLOT_BITS * i as u32)));
            out.terms.insert(nk, v.clone());
        }
        out
    }

    /// The flip of a rank-2 tensor, x₂₁.
    pub fn flip(&self) -> SparseTensor {
        assert_eq!(self.rank, 2);
        self.permute(&[1, 0])
    }

    /// Replaces slot `i` by the tensor `f(label)` of rank r (r may be 0, 1, 2…),
    /// extending linearly. New slots are inserted in place of slot i.
    pub fn expand_slot(&self, i: usize, r: usize, mut f: impl FnMut(Label) -> SparseTensor) -> SparseTensor {
        let new_rank = self.rank - 1 + r;
        assert!(new_rank <= MAX_RANK);
        let mut out = SparseTensor::zero(new_rank);
        let mut cache: FxHashMap<Label, SparseTensor> = FxHashMap::default();
        for (k, v) in self.iter() {
            let ls = unpack(k, self.rank);
            let img = cache.entry(ls[i]).or_insert_with(|| f(ls[i]));
            debug_assert_eq!(img.rank, r);
            for (ki, vi) in img.iter() {
                let sub = unpack(ki, r);
                let mut nl: SmallVec<[Label; MAX_RANK]> = SmallVec::new();
                nl.extend_from_slice(&ls[..i]);
                nl.extend_from_slice(&sub);
                nl.extend_from_slice(&ls[i + 1..]);
                out.add_term(pack(&nl), v * vi);
            }
        }
        out
    }

    /// Applies a linear map on slot `i`.
    pub fn map_slot(&self, i: usize, f: impl FnMut(Label) -> SparseTensor) -> SparseTensor {
        self.expand_slot(i, 1, f)
    }

    /// Inserts a new slot at position `i` holding `x` (rank 1): the embedding
    /// t ↦ t with x placed in slot i.
    pub fn insert_slot(&self, i: usize, x: &SparseTensor) -> SparseTensor {
        assert_eq!(x.rank, 1);
        let mut out = SparseTensor::zero(self.rank + 1);
        for (k, v) in self.iter() {
            let ls = unpack(k, self.rank);
            for (kx, vx) in x.iter() {
                let mut nl: SmallVec<[Label; MAX_RANK]> = SmallVec::new();
                nl.extend_from_slice(&ls[..i]);
                nl.push(kx as Label);
                nl.extend_from_slice(&ls[i..]);
                out.add_term(pack(&nl), v * vx);
            }
        }
        out
    }

    /// Keeps terms satisfying the predicate on the label tuple.
    pub fn filter(&self, mut pred: impl FnMut(&[Label]) -> bool) -> SparseTensor {
        SparseTensor {
            rank: self.rank,
            terms: self.terms.iter().filter(|(k, _)| pred(&unpack(**k, self.rank))).map(|(k, v)| (*k, v.clone())).collect(),
        }
    }

    /// Scalar value of a rank-0 tensor.
    pub fn as_scalar(&self) -> Scalar {
        assert_eq!(self.rank, 0);
        self.terms.get(&0).cloned().unwrap_or_else(Scalar::zero)
    }

    /// First label tuple where `self` and `other` differ, if any.
    pub fn first_difference(&self, other: &SparseTensor) -> Option<SmallVec<[Label; MAX_RANK]>> {
        let d = self.sub(other);
        d.sorted().into_iter().next().map(|(l, _)| l)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pack_round_trip() {
        let ls = [3u32, 65535, 0, 17];
        assert_eq!(unpack(pack(&ls), 4).as_slice(), &ls);
        assert_eq!(slot(pack(&ls), 1), 65535);
        assert_eq!(unpack(with_slot(pack(&ls), 2, 9), 4).as_slice(), &[3, 65535, 9, 17]);
    }

    #[test]
    fn zero_terms_are_dropped() {
        let mut t = SparseTensor::basis(&[1, 2]);
        t.add_term(pack(&[1, 2]), Scalar::from_int(-1));
        assert!(t.is_zero());
        assert_eq!(t, SparseTensor::zero(2));
    }

    #[test]
    fn outer_and_flip() {
        let a = SparseTensor::single(&[1], Scalar::from_int(2));
        let b = SparseTensor::single(&[5], Scalar::from_int(3));
        let ab = a.outer(&b);
        assert_eq!(ab.get(&[1, 5]), Scalar::from_int(6));
        assert_eq!(ab.flip().get(&[5, 1]), Scalar::from_int(6));
        let abc = ab.outer(&a);
        assert_eq!(abc.permute(&[2, 0, 1]).get(&[1, 1, 5]), Scalar::from_int(12));
    }

    #[test]
    fn expand_slot_inserts_in_place() {
        let t = SparseTensor::basis(&[1, 2]);
        let d = t.expand_slot(0, 2, |l| SparseTensor::basis(&[l, l + 10]));
        assert_eq!(d.get(&[1, 11, 2]), Scalar::one());
        let e = t.expand_slot(1, 0, |_| SparseTensor::scalar(Scalar::from_int(4)));
        assert_eq!(e.get(&[1]), Scalar::from_int(4));
        let i = t.insert_slot(1, &SparseTensor::basis(&[7]));
        assert_eq!(i.get(&[1, 7, 2]), Scalar::one());
    }
}
