//! The small quantum group U_q(g) at a primitive ℓ-th root of unity q.
//!
//! Elements are stored on the basis F^a P_γ E^b (0 ≤ a, b < ℓ, γ ∈ 𝕋), where
//! P_γ are the torus idempotents. Since P_β x = x P_{β+wt x}, the element
//! F^a P_γ E^b lies in P_{γ+a} U P_{γ+b}, which the structure uses to skip
//! vanishing products. Dumps use the PBW basis F^a K_λ E^b instead.

use crate::error::{Error, Result};
use crate::scalars::{make_field, CyclotomicField, LambdaParam, Scalar};
use crate::tensor::{pack, slot, unpack, Label, SparseTensor, MAX_RANK};
use crate::torus::{int_det, ScalarDump, TorusGroup, TorusTensor};
use crate::wha::qt::QTStructure;
use crate::wha::{StructureRules, WeakHopfStructure};
use num_integer::Integer;
use num_traits::ToPrimitive;
use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;
use std::collections::BTreeMap;
use std::sync::{Arc, Mutex};

/// A simply-laced Cartan datum with a fixed normal ordering of the
/// positive roots.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CartanDatum {
    pub name: String,
    pub cartan: Vec<Vec<i64>>,
    /// Positive roots in simple-root coordinates, in normal order.
    pub positive_roots: Vec<Vec<i64>>,
}

impl CartanDatum {
    pub fn a1() -> CartanDatum {
        CartanDatum { name: "A1".into(), cartan: vec![vec![2]], positive_roots: vec![vec![1]] }
    }

    /// Normal ordering (α₁, α₁+α₂, α₂).
    pub fn a2() -> CartanDatum {
        CartanDatum {
            name: "A2".into(),
            cartan: vec![vec![2, -1], vec![-1, 2]],
            positive_roots: vec![vec![1, 0], vec![1, 1], vec![0, 1]],
        }
    }

    pub fn by_name(name: &str) -> Result<CartanDatum> {
        match name {
            "A1" | "sl2" => Ok(CartanDatum::a1()),
            "A2" | "sl3" => Ok(CartanDatum::a2()),
            other => Err(Error::UnsupportedType(other.into())),
        }
    }

    pub fn rank(&self) -> usize {
        self.cartan.len()
    }

    pub fn determinant(&self) -> i64 {
        int_det(&self.cartan).to_i64().expect("small determinant")
    }
}

/// A generator letter with an exponent; K exponents may be negative.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Letter {
    E(usize, u32),
    F(usize, u32),
    K(usize, i64),
}

pub type Word = Vec<Letter>;

struct UqCore {
    ell: usize,
    torus: TorusGroup,
    /// C_n(β) = Σ_{k<n} h(β+k) with h(β) = (k_β − k_β⁻¹)/(q − q⁻¹), k_β = q^{−(β,α)}.
    c: Vec<Vec<Scalar>>,
    cache: Mutex<FxHashMap<u64, Arc<Vec<(Label, Scalar)>>>>,
}

/// A torus function f, standing for Σ_β f(β) P_β.
type TorusFn = Vec<Scalar>;

impl UqCore {
    fn new(torus: TorusGroup) -> UqCore {
        let ell = torus.ell() as usize;
        let alpha = torus.simple(0);
        let qq = &torus.q_pow(1) - &torus.q_pow(-1);
        let h: Vec<Scalar> = (0..ell)
            .map(|b| {
                let k = torus.pair(b, alpha);
                (&torus.q_pow(-k) - &torus.q_pow(k)).div(&qq).expect("q − q⁻¹ ≠ 0")
            })
            .collect();
        let c = (0..=ell)
            .map(|n| (0..ell).map(|b| (0..n).fold(Scalar::zero(), |acc, k| &acc + &h[(b + k) % ell])).collect())
            .collect();
        UqCore { ell, torus, c, cache: Mutex::new(FxHashMap::default()) }
    }

    fn label(&self, a: usize, g: usize, b: usize) -> Label {
        ((a * self.ell + g) * self.ell + b) as Label
    }

    fn parts(&self, l: Label) -> (usize, usize, usize) {
        let l = l as usize;
        (l / (self.ell * self.ell), (l / self.ell) % self.ell, l % self.ell)
    }

    /// E · Σ F^i f E^j, using E F^i = F^i E + F^{i−1} C_i and E f = (τf) E
    /// with (τf)(β) = f(β+1).
    fn left_e(&self, terms: &BTreeMap<(usize, usize), TorusFn>) -> BTreeMap<(usize, usize), TorusFn> {
        let l = self.ell;
        let mut out: BTreeMap<(usize, usize), TorusFn> = BTreeMap::new();
        let mut add = |key: (usize, usize), f: TorusFn| {
            let e = out.entry(key).or_insert_with(|| vec![Scalar::zero(); l]);
            for (x, y) in e.iter_mut().zip(f) {
                *x = &*x + &y;
            }
        };
        for (&(i, j), f) in terms {
            if j + 1 < l {
                add((i, j + 1), (0..l).map(|b| f[(b + 1) % l].clone()).collect());
            }
            if i >= 1 {
                add((i - 1, j), (0..l).map(|b| &self.c[i][b] * &f[b]).collect());
            }
        }
        out
    }

    fn mul_basis(&self, x: Label, y: Label) -> Arc<Vec<(Label, Scalar)>> {
        let key = ((x as u64) << 32) | y as u64;
        if let Some(v) = self.cache.lock().unwrap().get(&key) {
            return v.clone();
        }
        let l = self.ell;
        let (a, g, b) = self.parts(x);
        let (c, d, e) = self.parts(y);
        let mut out: Vec<(Label, Scalar)> = Vec::new();
        if (g + b) % l == (d + c) % l {
            let mut f = vec![Scalar::zero(); l];
            f[d] = Scalar::one();
            let mut terms = BTreeMap::from([((c, e), f)]);
            for _ in 0..b {
                terms = self.left_e(&terms);
            }
            // F^a P_g · F^i f E^j = F^{a+i} P_{g−i} f(g−i) E^j
            for ((i, j), f) in terms {
                if a + i >= l {
                    continue;
                }
                let gi = (g + l * l - i) % l;
                if !f[gi].is_zero() {
                    out.push((self.label(a + i, gi, j), f[gi].clone()));
                }
            }
            out.sort_by_key(|t| t.0);
        }
        let v = Arc::new(out);
        self.cache.lock().unwrap().insert(key, v.clone());
        v
    }

    /// Slotwise product of tensors over U, uncached at the tensor level.
    fn tensor_mul(&self, a: &SparseTensor, b: &SparseTensor) -> SparseTensor {
        let n = a.rank();
        let mut out = SparseTensor::zero(n);
        for (ka, va) in a.iter() {
            for (kb, vb) in b.iter() {
                let mut partial: Vec<(SmallVec<[Label; MAX_RANK]>, Scalar)> = vec![(SmallVec::new(), va * vb)];
                for i in 0..n {
                    let p = self.mul_basis(slot(ka, i), slot(kb, i));
                    partial = partial
                        .iter()
                        .flat_map(|(ls, c)| {
                            p.iter().map(move |(l, v)| {
                                let mut ls = ls.clone();
                                ls.push(*l);
                                (ls, c * v)
                            })
                        })
                        .collect();
                    if partial.is_empty() {
                        break;
                    }
                }
                for (ls, c) in partial {
                    out.add_term(pack(&ls), c);
                }
            }
        }
        out
    }

    fn tensor_pow(&self, x: &SparseTensor, n: usize, one: &SparseTensor) -> SparseTensor {
        (0..n).fold(one.clone(), |acc, _| self.tensor_mul(&acc, x))
    }

    fn one(&self) -> SparseTensor {
        SparseTensor::from_terms(1, (0..self.ell).map(|g| (self.label(0, g, 0) as u64, Scalar::one())))
    }

    fn e(&self) -> SparseTensor {
        SparseTensor::from_terms(1, (0..self.ell).map(|g| (self.label(0, g, 1) as u64, Scalar::one())))
    }

    fn f(&self) -> SparseTensor {
        SparseTensor::from_terms(1, (0..self.ell).map(|g| (self.label(1, g, 0) as u64, Scalar::one())))
    }

    /// K_λ = Σ_β q^{−(β,λ)} P_β.
    fn k(&self, lambda: usize) -> SparseTensor {
        SparseTensor::from_terms(1, (0..self.ell).map(|b| (self.label(0, b, 0) as u64, self.torus.q_pow(-self.torus.pair(b, lambda)))))
    }

    fn k_pow(&self, e: i64) -> SparseTensor {
        self.k(self.torus.scale(e, self.torus.simple(0)))
    }
}

struct UqRules {
    core: Arc<UqCore>,
}

impl UqRules {
    fn monomial(&self, l: Label, e_img: &SparseTensor, f_img: &SparseTensor, p_img: impl Fn(usize) -> SparseTensor, reverse: bool, one: &SparseTensor) -> SparseTensor {
        let c = &self.core;
        let (a, g, b) = c.parts(l);
        let fa = c.tensor_pow(f_img, a, one);
        let eb = c.tensor_pow(e_img, b, one);
        let p = p_img(g);
        if reverse {
            c.tensor_mul(&c.tensor_mul(&eb, &p), &fa)
        } else {
            c.tensor_mul(&c.tensor_mul(&fa, &p), &eb)
        }
    }
}

impl StructureRules for UqRules {
    fn dim(&self) -> usize {
        self.core.ell.pow(3)
    }

    fn label_name(&self, l: Label) -> String {
        let (a, g, b) = self.core.parts(l);
        format!("F^{a}P{g}E^{b}")
    }

    fn unit(&self) -> SparseTensor {
        self.core.one()
    }

    fn mul(&self, a: Label, b: Label) -> SparseTensor {
        SparseTensor::from_terms(1, self.core.mul_basis(a, b).iter().map(|(l, v)| (*l as u64, v.clone())))
    }

    /// Δ(E) = E⊗1 + K⊗E, Δ(F) = F⊗K⁻¹ + 1⊗F, Δ(P_γ) = Σ_{γ₁+γ₂=γ} P_{γ₁}⊗P_{γ₂}.
    fn comul(&self, l: Label) -> SparseTensor {
        let c = &self.core;
        let one = c.one();
        let one2 = one.outer(&one);
        let de = c.e().outer(&one).add(&c.k_pow(1).outer(&c.e()));
        let df = c.f().outer(&c.k_pow(-1)).add(&one.outer(&c.f()));
        let dp = |g: usize| {
            SparseTensor::from_terms(2, (0..c.ell).map(|g1| (pack(&[c.label(0, g1, 0), c.label(0, (g + c.ell - g1) % c.ell, 0)]), Scalar::one())))
        };
        self.monomial(l, &de, &df, dp, false, &one2)
    }

    /// ε(F^a P_γ E^b) = δ_{a0} δ_{γ0} δ_{b0}.
    fn counit(&self, l: Label) -> Scalar {
        if l == 0 {
            Scalar::one()
        } else {
            Scalar::zero()
        }
    }

    /// S(E) = −K⁻¹E, S(F) = −FK, S(P_γ) = P_{−γ}, extended anti-multiplicatively.
    fn antipode(&self, l: Label) -> SparseTensor {
        let c = &self.core;
        let se = c.tensor_mul(&c.k_pow(-1), &c.e()).neg();
        let sf = c.tensor_mul(&c.f(), &c.k_pow(1)).neg();
        self.monomial(l, &se, &sf, |g| SparseTensor::basis(&[c.label(0, (c.ell - g) % c.ell, 0)]), true, &c.one())
    }

    /// S⁻¹(E) = −EK⁻¹, S⁻¹(F) = −KF, S⁻¹(P_γ) = P_{−γ}.
    fn antipode_inv(&self, l: Label) -> Option<SparseTensor> {
        let c = &self.core;
        let se = c.tensor_mul(&c.e(), &c.k_pow(-1)).neg();
        let sf = c.tensor_mul(&c.k_pow(1), &c.f()).neg();
        Some(self.monomial(l, &se, &sf, |g| SparseTensor::basis(&[c.label(0, (c.ell - g) % c.ell, 0)]), true, &c.one()))
    }

    fn blocks(&self, l: Label) -> Option<(u32, u32)> {
        let (a, g, b) = self.core.parts(l);
        let n = self.core.ell;
        Some((((g + a) % n) as u32, ((g + b) % n) as u32))
    }

    fn generators(&self) -> Vec<Label> {
        let c = &self.core;
        (0..c.ell).flat_map(|g| [c.label(0, g, 0), c.label(0, g, 1), c.label(1, g, 0)]).collect()
    }
}

/// One PBW term F^f K_k E^e of a dumped element.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UqTermDump {
    pub f: Vec<i64>,
    pub k: Vec<i64>,
    pub e: Vec<i64>,
    pub coeff: ScalarDump,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UqElementDump {
    pub terms: Vec<UqTermDump>,
}

/// One slot F^f K_k E^e of a tensor term.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UqMonomialDump {
    pub f: Vec<i64>,
    pub k: Vec<i64>,
    pub e: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UqTensorTermDump {
    pub factors: Vec<UqMonomialDump>,
    pub coeff: ScalarDump,
}

/// An element of U^{⊗n} in the PBW basis of each slot.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UqTensorDump {
    pub terms: Vec<UqTensorTermDump>,
}

/// U_q(g) together with its weak Hopf structure (an ordinary Hopf algebra).
#[derive(Clone)]
pub struct QuantumGroup {
    pub datum: CartanDatum,
    pub torus: TorusGroup,
    pub structure: WeakHopfStructure,
    core: Arc<UqCore>,
}

impl std::fmt::Debug for QuantumGroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "QuantumGroup({}, ell {})", self.datum.name, self.core.ell)
    }
}

pub fn build_uq(datum: &CartanDatum, ell: u32) -> Result<QuantumGroup> {
    make_field(ell)?;
    let det = datum.determinant();
    if det.gcd(&(ell as i64)) != 1 {
        return Err(Error::CoprimalityViolation { ell, det });
    }
    if datum.rank() != 1 {
        return Err(Error::UnsupportedType(format!("{}: PBW straightening is implemented for rank 1 only", datum.name)));
    }
    let torus = TorusGroup::new(datum.cartan.clone(), ell)?;
    let core = Arc::new(UqCore::new(torus.clone()));
    let structure = WeakHopfStructure::new(format!("U_q({})", datum.name), UqRules { core: core.clone() });
    Ok(QuantumGroup { datum: datum.clone(), torus, structure, core })
}

impl QuantumGroup {
    pub fn ell(&self) -> u32 {
        self.core.ell as u32
    }

    pub fn field(&self) -> CyclotomicField {
        self.torus.field()
    }

    pub fn dim(&self) -> usize {
        self.structure.dim()
    }

    /// Label of F^a P_γ E^b.
    pub fn label(&self, a: usize, gamma: usize, b: usize) -> Label {
        self.core.label(a, gamma, b)
    }

    /// (a, γ, b) of the basis element F^a P_γ E^b.
    pub fn parts(&self, l: Label) -> (usize, usize, usize) {
        self.core.parts(l)
    }

    pub fn one(&self) -> SparseTensor {
        self.core.one()
    }

    pub fn e(&self) -> SparseTensor {
        self.core.e()
    }

    pub fn f(&self) -> SparseTensor {
        self.core.f()
    }

    /// K^n.
    pub fn k_pow(&self, n: i64) -> SparseTensor {
        self.core.k_pow(n)
    }

    /// K_λ for a torus element λ.
    pub fn k(&self, lambda: usize) -> SparseTensor {
        self.core.k(lambda)
    }

    /// The idempotent P_β.
    pub fn p(&self, beta: usize) -> SparseTensor {
        SparseTensor::basis(&[self.label(0, beta, 0)])
    }

    pub fn mul(&self, a: &SparseTensor, b: &SparseTensor) -> SparseTensor {
        self.structure.mul(a, b)
    }

    fn letter(&self, l: Letter) -> SparseTensor {
        let n = self.core.ell;
        match l {
            Letter::E(_, e) if e as usize >= n => SparseTensor::zero(1),
            Letter::F(_, e) if e as usize >= n => SparseTensor::zero(1),
            Letter::E(_, e) => SparseTensor::from_terms(1, (0..n).map(|g| (self.label(0, g, e as usize) as u64, Scalar::one()))),
            Letter::F(_, e) => SparseTensor::from_terms(1, (0..n).map(|g| (self.label(e as usize, g, 0) as u64, Scalar::one()))),
            Letter::K(_, e) => self.k_pow(e),
        }
    }

    /// PBW normal form of a word, multiplying left to right.
    pub fn normalize(&self, word: &[Letter]) -> SparseTensor {
        word.iter().fold(self.one(), |acc, &l| self.mul(&acc, &self.letter(l)))
    }

    /// PBW normal form of a word, multiplying right to left.
    pub fn normalize_rev(&self, word: &[Letter]) -> SparseTensor {
        word.iter().rev().fold(self.one(), |acc, &l| self.mul(&self.letter(l), &acc))
    }

    /// ℤ^m-weight of a basis element, in simple-root coordinates.
    pub fn weight(&self, l: Label) -> Vec<i64> {
        let (a, _, b) = self.parts(l);
        vec![b as i64 - a as i64]
    }

    /// ℤ-degree: deg E = 1, deg F = −1, deg K = 0.
    pub fn degree(&self, l: Label) -> i64 {
        self.weight(l).iter().sum()
    }

    pub fn weight_decomposition(&self, x: &SparseTensor) -> BTreeMap<Vec<i64>, SparseTensor> {
        let mut out: BTreeMap<Vec<i64>, SparseTensor> = BTreeMap::new();
        for (k, v) in x.iter() {
            let w: Vec<i64> = (0..x.rank()).map(|i| self.weight(slot(k, i))).fold(vec![0; self.datum.rank()], |acc, w| acc.iter().zip(&w).map(|(a, b)| a + b).collect());
            out.entry(w).or_insert_with(|| SparseTensor::zero(x.rank())).add_term(k, v.clone());
        }
        out
    }

    pub fn degree_decomposition(&self, x: &SparseTensor) -> BTreeMap<i64, SparseTensor> {
        let mut out: BTreeMap<i64, SparseTensor> = BTreeMap::new();
        for (w, part) in self.weight_decomposition(x) {
            out.entry(w.iter().sum()).or_insert_with(|| SparseTensor::zero(x.rank())).add_assign(&part);
        }
        out
    }

    /// Whether a tensor commutes with Δⁿ(K_i) = K_i⊗…⊗K_i for every i.
    pub fn is_zero_weight(&self, x: &SparseTensor) -> bool {
        let n = x.rank();
        (0..self.datum.rank()).all(|i| {
            let ki = self.k(self.torus.simple(i));
            let kn = (0..n).fold(SparseTensor::scalar(Scalar::one()), |acc, _| acc.outer(&ki));
            self.structure.mul(&kn, x) == self.structure.mul(x, &kn)
        })
    }

    /// Λ applied to slot `i`: Λ|_{U[β]} = Λ_β.
    pub fn lambda_at(&self, lambda: &LambdaParam, x: &SparseTensor, i: usize, inverse: bool) -> SparseTensor {
        x.map_slot(i, |l| {
            let mut w = self.weight(l);
            if inverse {
                w.iter_mut().for_each(|c| *c = -*c);
            }
            SparseTensor::single(&[l], lambda.scalar(&w))
        })
    }

    pub fn lambda_auto(&self, lambda: &LambdaParam, x: &SparseTensor) -> SparseTensor {
        self.lambda_at(lambda, x, 0, false)
    }

    /// Ad K_λ applied to slot `i`: multiplies U[β] by q^{(β,λ)}.
    pub fn ad_torus_at(&self, lambda: usize, x: &SparseTensor, i: usize) -> SparseTensor {
        x.map_slot(i, |l| {
            let w = self.torus.index(&self.weight(l));
            SparseTensor::single(&[l], self.torus.q_pow(self.torus.pair(w, lambda)))
        })
    }

    pub fn ad_torus(&self, lambda: usize, x: &SparseTensor) -> SparseTensor {
        self.ad_torus_at(lambda, x, 0)
    }

    /// Ω = Σ q^{−(χ₁,χ₂)} P_{χ₁}⊗P_{χ₂}; with `inverse`, Ω⁻¹.
    pub fn omega(&self, inverse: bool) -> SparseTensor {
        let t = &self.torus;
        let sign = if inverse { 1 } else { -1 };
        let mut out = SparseTensor::zero(2);
        for a in t.elements() {
            for b in t.elements() {
                out.add_term(pack(&[self.label(0, a, 0), self.label(0, b, 0)]), t.q_pow(sign * t.pair(a, b)));
            }
        }
        out
    }

    /// Σ f(χ₁,…,χₙ) P_χ₁⊗…⊗P_χₙ.
    pub fn from_torus(&self, f: &TorusTensor) -> SparseTensor {
        let mut out = SparseTensor::zero(f.n);
        for (k, v) in f.values.iter().enumerate() {
            if !v.is_zero() {
                let ls: Vec<Label> = f.unflat(k).into_iter().map(|c| self.label(0, c, 0)).collect();
                out.add_term(pack(&ls), v.clone());
            }
        }
        out
    }

    /// The torus function f such that (F^{a₁}E^{b₁}⊗…⊗F^{aₙ}E^{bₙ})·f is
    /// the part of `x` with these exponents, using E^b P_χ = P_{χ−b} E^b.
    pub fn coefficient(&self, x: &SparseTensor, shape: &[(usize, usize)]) -> TorusTensor {
        let t = &self.torus;
        let alpha = t.simple(0);
        TorusTensor::from_fn(t, shape.len(), |chi| {
            let ls: Vec<Label> = shape.iter().zip(chi).map(|(&(a, b), &c)| self.label(a, t.sub(c, t.scale(b as i64, alpha)), b)).collect();
            x.get(&ls)
        })
    }

    /// (μ, ν) with P_μ·F^a P_γ E^b·P_ν = F^a P_γ E^b, i.e. (γ+aα, γ+bα).
    pub fn blocks(&self, l: Label) -> (usize, usize) {
        let t = &self.torus;
        let (a, g, b) = self.parts(l);
        let alpha = t.simple(0);
        (t.add(g, t.scale(a as i64, alpha)), t.add(g, t.scale(b as i64, alpha)))
    }

    /// Eⁿ and Fⁿ.
    pub fn e_pow(&self, n: u32) -> SparseTensor {
        self.letter(Letter::E(0, n))
    }

    pub fn f_pow(&self, n: u32) -> SparseTensor {
        self.letter(Letter::F(0, n))
    }

    /// c_n = q^{−n(n+1)/2}(1−q²)ⁿ/[n]_q!.
    pub fn r_coefficient(&self, n: u32) -> Scalar {
        let f = self.field();
        let base = &Scalar::one() - &f.q_pow(2);
        let pow = (0..n).fold(Scalar::one(), |acc, _| &acc * &base);
        let e = -((n as i64) * (n as i64 + 1) / 2);
        &(&f.q_pow(e) * &pow) * &f.q_factorial_inv(n).expect("n < ell")
    }

    /// Σ_{n<ℓ} c_n Eⁿ⊗Fⁿ.
    pub fn r_nilpotent_part(&self) -> SparseTensor {
        let mut out = SparseTensor::zero(2);
        for n in 0..self.ell() {
            let en = self.letter(Letter::E(0, n));
            let fnn = self.letter(Letter::F(0, n));
            out.add_scaled(&en.outer(&fnn), &self.r_coefficient(n));
        }
        out
    }

    /// 𝓡 = (Σ c_n Eⁿ⊗Fⁿ)·Ω and 𝓡̄ = Ω⁻¹·(Σ_k (−M)^k), M = 𝓡Ω⁻¹ − 1⊗1.
    pub fn universal_r(&self) -> Result<QTStructure> {
        let h = &self.structure;
        let nil = self.r_nilpotent_part();
        let one2 = h.one_n(2);
        let m = nil.sub(&one2);
        let mut inv = one2.clone();
        let mut term = one2.clone();
        for _ in 1..self.ell() * 2 {
            term = h.mul(&term, &m).neg();
            if term.is_zero() {
                break;
            }
            inv.add_assign(&term);
        }
        if h.mul(&nil, &inv) != one2 || h.mul(&inv, &nil) != one2 {
            return Err(Error::NotInvertible("nilpotent part of R".into()));
        }
        let r = h.mul(&nil, &self.omega(false));
        let r_bar = h.mul(&self.omega(true), &inv);
        Ok(QTStructure { r, r_bar })
    }

    /// Coefficients in the PBW basis F^a K_λ E^b, using
    /// P_γ = ℓ^{−m} Σ_λ q^{(γ,λ)} K_λ.
    pub fn to_pbw(&self, x: &SparseTensor) -> BTreeMap<Vec<(usize, usize, usize)>, Scalar> {
        let t = &self.torus;
        let w = &t.inv_order();
        let mut out: BTreeMap<Vec<(usize, usize, usize)>, Scalar> = BTreeMap::new();
        for (k, v) in x.iter() {
            let ls = unpack(k, x.rank());
            let mut partial: Vec<(Vec<(usize, usize, usize)>, Scalar)> = vec![(vec![], v.clone())];
            for &l in &ls {
                let (a, g, b) = self.parts(l);
                partial = partial
                    .into_iter()
                    .flat_map(|(pre, c)| {
                        t.elements().map(move |lam| {
                            let mut p = pre.clone();
                            p.push((a, lam, b));
                            (p, &(&c * w) * &t.q_pow(t.pair(g, lam)))
                        })
                    })
                    .collect();
            }
            for (p, c) in partial {
                let e = out.entry(p).or_insert_with(Scalar::zero);
                *e = &*e + &c;
            }
        }
        out.retain(|_, v| !v.is_zero());
        out
    }

    /// Dump of a rank-1 element in the PBW basis.
    pub fn dump(&self, x: &SparseTensor) -> UqElementDump {
        let terms = self
            .to_pbw(x)
            .into_iter()
            .map(|(p, c)| {
                let (a, lam, b) = p[0];
                UqTermDump { f: vec![a as i64], k: self.torus.vector(lam), e: vec![b as i64], coeff: ScalarDump::from(&c) }
            })
            .collect();
        UqElementDump { terms }
    }

    /// Dump of an element of any tensor power, terms sorted by PBW labels.
    pub fn dump_tensor(&self, x: &SparseTensor) -> UqTensorDump {
        let terms = self
            .to_pbw(x)
            .into_iter()
            .map(|(p, c)| UqTensorTermDump {
                factors: p.iter().map(|&(a, lam, b)| UqMonomialDump { f: vec![a as i64], k: self.torus.vector(lam), e: vec![b as i64] }).collect(),
                coeff: ScalarDump::from(&c),
            })
            .collect();
        UqTensorDump { terms }
    }

    /// Inverse of [`QuantumGroup::dump`].
    pub fn from_dump(&self, d: &UqElementDump) -> Result<SparseTensor> {
        let mut out = SparseTensor::zero(1);
        for t in &d.terms {
            let c = t.coeff.to_scalar(self.field())?;
            let (a, b) = (t.f.first().copied().unwrap_or(0), t.e.first().copied().unwrap_or(0));
            if a < 0 || b < 0 || a as usize >= self.core.ell || b as usize >= self.core.ell {
                return Err(Error::InvalidSpec(format!("exponent out of range in {:?}", t)));
            }
            let fa = self.letter(Letter::F(0, a as u32));
            let eb = self.letter(Letter::E(0, b as u32));
            let term = self.structure.mul_all(&[&fa, &self.k(self.torus.index(&t.k)), &eb]);
            out.add_scaled(&term, &c);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uq(ell: u32) -> QuantumGroup {
        build_uq(&CartanDatum::a1(), ell).unwrap()
    }

    #[test]
    fn dimensions_and_errors() {
        assert_eq!(uq(3).dim(), 27);
        assert_eq!(uq(5).dim(), 125);
        assert_eq!(build_uq(&CartanDatum::a2(), 3).unwrap_err(), Error::CoprimalityViolation { ell: 3, det: 3 });
        assert!(matches!(build_uq(&CartanDatum::a2(), 5), Err(Error::UnsupportedType(_))));
        assert_eq!(build_uq(&CartanDatum::a1(), 4).unwrap_err(), Error::EvenOrSmallEll(4));
    }

    #[test]
    fn defining_relations() {
        for ell in [3, 5] {
            let u = uq(ell);
            let f = u.field();
            let (e, ff, k, ki) = (u.e(), u.f(), u.k_pow(1), u.k_pow(-1));
            // EF − FE = (K − K⁻¹)/(q − q⁻¹)
            let lhs = u.mul(&e, &ff).sub(&u.mul(&ff, &e));
            let qq = (&f.q_pow(1) - &f.q_pow(-1)).inv().unwrap();
            assert_eq!(lhs, k.sub(&ki).scale(&qq));
            // KE = q²EK, KF = q⁻²FK
            assert_eq!(u.mul(&k, &e), u.mul(&e, &k).scale(&f.q_pow(2)));
            assert_eq!(u.mul(&k, &ff), u.mul(&ff, &k).scale(&f.q_pow(-2)));
            assert_eq!(u.mul(&k, &ki), u.one());
            assert!(u.normalize(&[Letter::E(0, ell - 1), Letter::E(0, 1)]).is_zero());
            assert!(u.normalize(&[Letter::F(0, 1), Letter::F(0, ell - 1)]).is_zero());
            assert_eq!(u.k_pow(ell as i64), u.one());
        }
    }

    #[test]
    fn gradings() {
        let u = uq(3);
        let efk = u.normalize(&[Letter::E(0, 1), Letter::F(0, 1), Letter::K(0, 1)]);
        let d = u.weight_decomposition(&efk);
        assert_eq!(d.keys().cloned().collect::<Vec<_>>(), vec![vec![0]]);
        let e2 = u.normalize(&[Letter::E(0, 2)]);
        assert_eq!(u.degree_decomposition(&e2).keys().cloned().collect::<Vec<_>>(), vec![2]);
        assert!(u.is_zero_weight(&u.omega(false)));
        assert!(!u.is_zero_weight(&u.e().outer(&u.one())));
    }

    #[test]
    fn lambda_and_ad() {
        let u = uq(3);
        let lam = LambdaParam::constant(1, 2);
        assert_eq!(u.lambda_auto(&lam, &u.e()), u.e().scale(&Scalar::from_int(2)));
        assert_eq!(u.lambda_auto(&lam, &u.f()), u.f().scale(&Scalar::from_ratio(1, 2)));
        assert_eq!(u.lambda_auto(&lam, &u.k_pow(1)), u.k_pow(1));
        let ef = u.mul(&u.e(), &u.f());
        assert_eq!(u.lambda_auto(&lam, &ef), ef);
        for l in 0..3 {
            // Ad K_λ(E) = K_λ E K_λ⁻¹ = q^{2λ} E
            let conj = u.structure.mul_all(&[&u.k(l), &u.e(), &u.k(u.torus.neg(l))]);
            assert_eq!(u.ad_torus(l, &u.e()), conj);
            assert_eq!(conj, u.e().scale(&u.field().q_pow(2 * l as i64)));
        }
    }

    #[test]
    fn pbw_dump_roundtrip() {
        let u = uq(3);
        let x = u.normalize(&[Letter::E(0, 1), Letter::F(0, 2), Letter::K(0, -1)]);
        assert_eq!(u.from_dump(&u.dump(&x)).unwrap(), x);
        let k = u.dump(&u.k_pow(1));
        assert_eq!(k.terms.len(), 1);
        assert_eq!(k.terms[0].k, vec![1]);
    }
}
