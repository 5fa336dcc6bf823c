//! Finite-dimensional weak Hopf algebras given by structure rules on a
//! labelled basis, with cached evaluation and tensor-level operations.

pub mod algebroid;
pub mod counital;
pub mod dual;
pub mod groupoid;
pub mod morphism;
pub mod product;
pub mod qt;
pub mod sample;
pub mod twist;
pub mod verify;

use crate::error::{Error, Result};
use crate::linalg::{Echelon, SparseRow};
use crate::scalars::Scalar;
use crate::tensor::{pack, slot, unpack, Label, SparseTensor, MAX_RANK};
use rustc_hash::FxHashMap;
use smallvec::SmallVec;
use std::sync::{Arc, Mutex, OnceLock};

/// Structure constants of an algebra with a coalgebra structure and an
/// antipode, on the basis {0, …, dim−1}.
pub trait StructureRules: Send + Sync {
    fn dim(&self) -> usize;

    fn label_name(&self, l: Label) -> String {
        format!("b{l}")
    }

    /// The unit as a rank-1 tensor.
    fn unit(&self) -> SparseTensor;

    fn mul(&self, a: Label, b: Label) -> SparseTensor;

    fn comul(&self, a: Label) -> SparseTensor;

    fn counit(&self, a: Label) -> Scalar;

    fn antipode(&self, a: Label) -> SparseTensor;

    fn antipode_inv(&self, _a: Label) -> Option<SparseTensor> {
        None
    }

    /// (left, right) block of a basis element when the basis is made of
    /// elements e with e = p·e·p' for a complete family of orthogonal
    /// idempotents; products of elements with mismatched blocks vanish.
    fn blocks(&self, _a: Label) -> Option<(u32, u32)> {
        None
    }

    /// Algebra generators, used by sampled verification.
    fn generators(&self) -> Vec<Label> {
        (0..self.dim() as Label).collect()
    }
}

const DENSE_MUL_LIMIT: usize = 1024;

type Terms = Vec<(Label, Scalar)>;

enum MulCache {
    Dense(Vec<OnceLock<Arc<Terms>>>),
    Sparse(Mutex<FxHashMap<u64, Arc<Terms>>>),
}

struct Inner {
    name: String,
    rules: Box<dyn StructureRules>,
    dim: usize,
    mul: MulCache,
    comul: Vec<OnceLock<SparseTensor>>,
    antipode: Vec<OnceLock<SparseTensor>>,
    antipode_inv: Vec<OnceLock<Option<SparseTensor>>>,
    counit: Vec<OnceLock<Scalar>>,
    blocks: Option<Vec<(u32, u32)>>,
    unit: SparseTensor,
    delta_one: OnceLock<SparseTensor>,
}

/// A weak Hopf algebra: structure rules plus caches. Cheap to clone.
#[derive(Clone)]
pub struct WeakHopfStructure {
    inner: Arc<Inner>,
}

impl std::fmt::Debug for WeakHopfStructure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "WeakHopfStructure({}, dim {})", self.inner.name, self.inner.dim)
    }
}

fn to_terms(t: &SparseTensor) -> Terms {
    let mut v: Terms = t.iter().map(|(k, c)| (k as Label, c.clone())).collect();
    v.sort_by_key(|(l, _)| *l);
    v
}

impl WeakHopfStructure {
    pub fn new(name: impl Into<String>, rules: impl StructureRules + 'static) -> WeakHopfStructure {
        WeakHopfStructure::from_boxed(name, Box::new(rules))
    }

    pub fn from_boxed(name: impl Into<String>, rules: Box<dyn StructureRules>) -> WeakHopfStructure {
        let dim = rules.dim();
        let mul = if dim <= DENSE_MUL_LIMIT {
            MulCache::Dense((0..dim * dim).map(|_| OnceLock::new()).collect())
        } else {
            MulCache::Sparse(Mutex::new(FxHashMap::default()))
        };
        let blocks = {
            let bs: Vec<Option<(u32, u32)>> = (0..dim as Label).map(|l| rules.blocks(l)).collect();
            if bs.iter().all(|b| b.is_some()) && dim > 0 {
                Some(bs.into_iter().map(|b| b.unwrap()).collect())
            } else {
                None
            }
        };
        let unit = rules.unit();
        WeakHopfStructure {
            inner: Arc::new(Inner {
                name: name.into(),
                dim,
                mul,
                comul: cells(dim),
                antipode: cells(dim),
                antipode_inv: cells(dim),
                counit: cells(dim),
                blocks,
                unit,
                delta_one: OnceLock::new(),
                rules,
            }),
        }
    }

    pub fn name(&self) -> &str {
        &self.inner.name
    }

    pub fn dim(&self) -> usize {
        self.inner.dim
    }

    pub fn rules(&self) -> &dyn StructureRules {
        self.inner.rules.as_ref()
    }

    pub fn label_name(&self, l: Label) -> String {
        self.inner.rules.label_name(l)
    }

    pub fn generators(&self) -> Vec<Label> {
        self.inner.rules.generators()
    }

    pub fn block_of(&self, l: Label) -> Option<(u32, u32)> {
        self.inner.blocks.as_ref().map(|b| b[l as usize])
    }

    pub fn has_blocks(&self) -> bool {
        self.inner.blocks.is_some()
    }

    pub fn basis(&self, l: Label) -> SparseTensor {
        SparseTensor::basis(&[l])
    }

    pub fn one(&self) -> SparseTensor {
        self.inner.unit.clone()
    }

    /// 1^{⊗n}.
    pub fn one_n(&self, n: usize) -> SparseTensor {
        let mut t = SparseTensor::scalar(Scalar::one());
        for _ in 0..n {
            t = t.outer(&self.inner.unit);
        }
        t
    }

    pub fn mul_labels(&self, a: Label, b: Label) -> Arc<Terms> {
        let compute = || Arc::new(to_terms(&self.inner.rules.mul(a, b)));
        if let Some(bs) = &self.inner.blocks {
            if bs[a as usize].1 != bs[b as usize].0 {
                return Arc::new(Vec::new());
            }
        }
        match &self.inner.mul {
            MulCache::Dense(v) => v[a as usize * self.inner.dim + b as usize].get_or_init(compute).clone(),
            MulCache::Sparse(m) => {
                let key = ((a as u64) << 32) | b as u64;
                if let Some(t) = m.lock().unwrap().get(&key) {
                    return t.clone();
                }
                let t = compute();
                m.lock().unwrap().insert(key, t.clone());
                t
            }
        }
    }

    pub fn comul_label(&self, a: Label) -> &SparseTensor {
        self.inner.comul[a as usize].get_or_init(|| self.inner.rules.comul(a))
    }

    pub fn antipode_label(&self, a: Label) -> &SparseTensor {
        self.inner.antipode[a as usize].get_or_init(|| self.inner.rules.antipode(a))
    }

    pub fn antipode_inv_label(&self, a: Label) -> Option<&SparseTensor> {
        self.inner.antipode_inv[a as usize].get_or_init(|| self.inner.rules.antipode_inv(a)).as_ref()
    }

    pub fn counit_label(&self, a: Label) -> Scalar {
        self.inner.counit[a as usize].get_or_init(|| self.inner.rules.counit(a)).clone()
    }

    fn left_key(&self, key: u64, n: usize) -> u128 {
        match &self.inner.blocks {
            None => 0,
            Some(b) => (0..n).fold(0u128, |acc, i| acc | ((b[slot(key, i) as usize].0 as u128) << (32 * i))),
        }
    }

    fn right_key(&self, key: u64, n: usize) -> u128 {
        match &self.inner.blocks {
            None => 0,
            Some(b) => (0..n).fold(0u128, |acc, i| acc | ((b[slot(key, i) as usize].1 as u128) << (32 * i))),
        }
    }

    /// Slotwise product of two tensors of equal rank.
    pub fn mul(&self, a: &SparseTensor, b: &SparseTensor) -> SparseTensor {
        assert_eq!(a.rank(), b.rank(), "rank mismatch in product");
        let n = a.rank();
        if n == 0 {
            return SparseTensor::scalar(a.as_scalar().mul(&b.as_scalar()));
        }
        let mut buckets: FxHashMap<u128, Vec<(u64, &Scalar)>> = FxHashMap::default();
        for (kb, vb) in b.iter() {
            buckets.entry(self.left_key(kb, n)).or_default().push((kb, vb));
        }
        let mut out = SparseTensor::zero(n);
        let mut slots: SmallVec<[Arc<Terms>; MAX_RANK]> = SmallVec::new();
        for (ka, va) in a.iter() {
            let Some(list) = buckets.get(&self.right_key(ka, n)) else { continue };
            for &(kb, vb) in list {
                slots.clear();
                let mut empty = false;
                for i in 0..n {
                    let p = self.mul_labels(slot(ka, i), slot(kb, i));
                    if p.is_empty() {
                        empty = true;
                        break;
                    }
                    slots.push(p);
                }
                if empty {
                    continue;
                }
                let c = va * vb;
                emit_products(&slots, 0, 0, &c, &mut out);
            }
        }
        out
    }

    /// Product of many tensors, left to right.
    pub fn mul_all(&self, factors: &[&SparseTensor]) -> SparseTensor {
        let mut it = factors.iter();
        let first = (*it.next().expect("at least one factor")).clone();
        it.fold(first, |acc, f| self.mul(&acc, f))
    }

    /// Δ applied to slot `i`.
    pub fn comul_at(&self, t: &SparseTensor, i: usize) -> SparseTensor {
        t.expand_slot(i, 2, |l| self.comul_label(l).clone())
    }

    pub fn comul(&self, x: &SparseTensor) -> SparseTensor {
        assert_eq!(x.rank(), 1);
        self.comul_at(x, 0)
    }

    /// ε applied to slot `i`.
    pub fn counit_at(&self, t: &SparseTensor, i: usize) -> SparseTensor {
        t.expand_slot(i, 0, |l| SparseTensor::scalar(self.counit_label(l)))
    }

    pub fn counit(&self, x: &SparseTensor) -> Scalar {
        assert_eq!(x.rank(), 1);
        self.counit_at(x, 0).as_scalar()
    }

    pub fn antipode_at(&self, t: &SparseTensor, i: usize) -> SparseTensor {
        t.map_slot(i, |l| self.antipode_label(l).clone())
    }

    pub fn antipode(&self, x: &SparseTensor) -> SparseTensor {
        self.antipode_at(x, 0)
    }

    /// S⁻¹ on slot `i`, from the rules if given, otherwise by solving
    /// S(y) = x on the basis.
    pub fn antipode_inv_at(&self, t: &SparseTensor, i: usize) -> Result<SparseTensor> {
        if self.antipode_inv_label(0).is_some() {
            return Ok(t.map_slot(i, |l| self.antipode_inv_label(l).cloned().expect("antipode inverse rule")));
        }
        let solver = self.antipode_solver();
        let mut err = None;
        let out = t.map_slot(i, |l| match solver.preimage(&SparseTensor::basis(&[l])) {
            Some(y) => y,
            None => {
                err = Some(l);
                SparseTensor::zero(1)
            }
        });
        match err {
            Some(l) => Err(Error::NotInvertible(format!("antipode at {}", self.label_name(l)))),
            None => Ok(out),
        }
    }

    pub fn antipode_inv(&self, x: &SparseTensor) -> Result<SparseTensor> {
        self.antipode_inv_at(x, 0)
    }

    /// A linear solver for preimages under S.
    pub fn antipode_solver(&self) -> LinearMapSolver {
        LinearMapSolver::new((0..self.dim() as Label).map(|l| self.antipode_label(l).clone()).collect())
    }

    /// m applied to slots i and i+1.
    pub fn mul_slots(&self, t: &SparseTensor, i: usize) -> SparseTensor {
        let n = t.rank();
        assert!(i + 1 < n);
        let mut out = SparseTensor::zero(n - 1);
        for (k, v) in t.iter() {
            let ls = unpack(k, n);
            let p = self.mul_labels(ls[i], ls[i + 1]);
            for (l, c) in p.iter() {
                let mut nl: SmallVec<[Label; MAX_RANK]> = SmallVec::new();
                nl.extend_from_slice(&ls[..i]);
                nl.push(*l);
                nl.extend_from_slice(&ls[i + 2..]);
                out.add_term(pack(&nl), v * c);
            }
        }
        out
    }

    /// m(x) for a rank-2 tensor.
    pub fn multiply_out(&self, t: &SparseTensor) -> SparseTensor {
        assert_eq!(t.rank(), 2);
        self.mul_slots(t, 0)
    }

    pub fn delta_one(&self) -> SparseTensor {
        self.inner.delta_one.get_or_init(|| self.comul(&self.inner.unit)).clone()
    }

    pub fn is_ordinary_hopf(&self) -> bool {
        self.delta_one() == self.one_n(2)
    }

    /// ε_t(h) = (ε⊗id)(Δ(1)(h⊗1)).
    pub fn eps_t(&self, h: &SparseTensor) -> SparseTensor {
        let x = self.mul(&self.delta_one(), &h.outer(&self.one()));
        self.counit_at(&x, 0)
    }

    /// ε_s(h) = (id⊗ε)((1⊗h)Δ(1)).
    pub fn eps_s(&self, h: &SparseTensor) -> SparseTensor {
        let x = self.mul(&self.one().outer(h), &self.delta_one());
        self.counit_at(&x, 1)
    }

    /// Inverse of an element by solving x·y = 1 and checking y·x = 1.
    pub fn inverse(&self, x: &SparseTensor) -> Result<SparseTensor> {
        let cols: Vec<SparseTensor> = (0..self.dim() as Label).map(|l| self.mul(x, &SparseTensor::basis(&[l]))).collect();
        let solver = LinearMapSolver::new(cols);
        let y = solver.preimage(&self.one()).ok_or_else(|| Error::NotInvertible("no right inverse".into()))?;
        if self.mul(&y, x) != self.one() {
            return Err(Error::NotInvertible("right inverse is not a left inverse".into()));
        }
        Ok(y)
    }

    /// Human-readable names for a label tuple.
    pub fn names(&self, labels: &[Label]) -> Vec<String> {
        labels.iter().map(|&l| self.label_name(l)).collect()
    }
}

fn cells<T>(n: usize) -> Vec<OnceLock<T>> {
    (0..n).map(|_| OnceLock::new()).collect()
}

fn emit_products(slots: &[Arc<Terms>], i: usize, key: u64, c: &Scalar, out: &mut SparseTensor) {
    if i == slots.len() {
        out.add_term(key, c.clone());
        return;
    }
    for (l, v) in slots[i].iter() {
        emit_products(slots, i + 1, key | ((*l as u64) << (16 * i)), &(c * v), out);
    }
}

/// Preimages under a linear map given by the images of basis vectors.
pub struct LinearMapSolver {
    echelon: Echelon,
}

impl LinearMapSolver {
    pub fn new(images: Vec<SparseTensor>) -> LinearMapSolver {
        let mut echelon = Echelon::new();
        for img in &images {
            echelon.insert(&to_row(img));
        }
        LinearMapSolver { echelon }
    }

    pub fn rank(&self) -> usize {
        self.echelon.rank()
    }

    pub fn preimage(&self, target: &SparseTensor) -> Option<SparseTensor> {
        let comb = self.echelon.solve(&to_row(target))?;
        Some(SparseTensor::from_terms(1, comb.into_iter().map(|(k, v)| (k as u64, v))))
    }
}

/// A rank-1 tensor as a sparse row indexed by label.
pub fn to_row(t: &SparseTensor) -> SparseRow {
    assert_eq!(t.rank(), 1);
    t.iter().map(|(k, v)| (k as usize, v.clone())).collect()
}

/// A rank-n tensor as a sparse row indexed by packed key.
pub fn to_row_any(t: &SparseTensor) -> SparseRow {
    t.iter().map(|(k, v)| (k as usize, v.clone())).collect()
}

/// Places slot j of `t` at position positions[j] of an n-fold tensor, with
/// the unit in the remaining positions (so 𝓡₁₃ = embed(𝓡, [0, 2], 3, 1)).
pub fn embed(t: &SparseTensor, positions: &[usize], n: usize, one: &SparseTensor) -> SparseTensor {
    assert_eq!(positions.len(), t.rank());
    let r = t.rank();
    let mut out = t.clone();
    for _ in r..n {
        out = out.outer(one);
    }
    let mut filler = r;
    let perm: Vec<usize> = (0..n)
        .map(|p| match positions.iter().position(|&q| q == p) {
            Some(j) => j,
            None => {
                filler += 1;
                filler - 1
            }
        })
        .collect();
    out.permute(&perm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wha::groupoid::GroupoidRules;

    #[test]
    fn embed_places_legs() {
        let one = SparseTensor::basis(&[0]);
        let t = SparseTensor::basis(&[1, 2]);
        assert_eq!(embed(&t, &[0, 2], 3, &one), SparseTensor::basis(&[1, 0, 2]));
        assert_eq!(embed(&t, &[2, 0], 3, &one), SparseTensor::basis(&[2, 0, 1]));
        assert_eq!(embed(&t, &[1, 2], 3, &one), SparseTensor::basis(&[0, 1, 2]));
    }

    #[test]
    fn inverse_in_groupoid_algebra() {
        let h = WeakHopfStructure::new("kG", GroupoidRules::full(2));
        // a non-identity arrow g plus 1 − id_target(g) … use 1 + g for g a loop-free arrow
        let one = h.one();
        let x = one.add(&SparseTensor::single(&[1], Scalar::from_int(2)));
        let y = h.inverse(&x).unwrap();
        assert_eq!(h.mul(&x, &y), one);
    }
}
