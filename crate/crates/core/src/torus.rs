//! The finite torus 𝕋 = (ℤ/ℓ)^m with its Cartan pairing, the group algebra
//! in the group basis {K_λ} and the idempotent basis {P_β}, and Cartan-part
//! tensors such as Ω.
//!
//! Conventions: P_β = |𝕋|⁻¹ Σ_λ q^{(β,λ)} K_λ, so that K_λ = Σ_β q^{−(β,λ)} P_β
//! and K_λ acts on the P_β-line by q^{−(β,λ)}.

use crate::error::{Error, Result};
use crate::linalg::{int_kernel, lattice_index};
use crate::scalars::{make_field, CyclotomicField, Scalar};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Clone, Debug)]
pub struct TorusGroup {
    m: usize,
    ell: u32,
    form: Vec<Vec<i64>>,
    field: CyclotomicField,
    size: usize,
}

/// Determinant of an integer matrix.
pub fn int_det(a: &[Vec<i64>]) -> BigInt {
    // Bareiss over ℤ
    let n = a.len();
    if n == 0 {
        return BigInt::from(1);
    }
    let mut m: Vec<Vec<BigInt>> = a.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
    let mut sign = 1i64;
    let mut prev = BigInt::from(1);
    for k in 0..n {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                Some(i) => {
                    m.swap(i, k);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = v / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    &m[n - 1][n - 1] * sign
}

impl TorusGroup {
    /// Builds (ℤ/ℓ)^m with pairing (β,γ) = βᵀ·form·γ.
    pub fn new(form: Vec<Vec<i64>>, ell: u32) -> Result<TorusGroup> {
        let field = make_field(ell)?;
        let m = form.len();
        assert!(form.iter().all(|r| r.len() == m), "form must be square");
        let det = int_det(&form);
        if !det.gcd(&BigInt::from(ell)).eq(&BigInt::from(1)) {
            return Err(Error::NonInvertibleForm);
        }
        let size = (ell as usize).pow(m as u32);
        Ok(TorusGroup { m, ell, form, field, size })
    }

    pub fn rank(&self) -> usize {
        self.m
    }

    pub fn ell(&self) -> u32 {
        self.ell
    }

    pub fn form(&self) -> &[Vec<i64>] {
        &self.form
    }

    pub fn field(&self) -> CyclotomicField {
        self.field
    }

    /// |𝕋| = ℓ^m.
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn determinant(&self) -> i64 {
        int_det(&self.form).to_i64().unwrap()
    }

    /// Index of the class of an integer vector.
    pub fn index(&self, v: &[i64]) -> usize {
        let l = self.ell as i64;
        v.iter().rev().fold(0usize, |acc, &c| acc * self.ell as usize + c.rem_euclid(l) as usize)
    }

    /// Residues in [0, ℓ) of the element with the given index.
    pub fn vector(&self, mut idx: usize) -> Vec<i64> {
        let l = self.ell as usize;
        (0..self.m)
            .map(|_| {
                let c = idx % l;
                idx /= l;
                c as i64
            })
            .collect()
    }

    pub fn add(&self, a: usize, b: usize) -> usize {
        if self.m == 1 {
            return (a + b) % self.ell as usize;
        }
        let (va, vb) = (self.vector(a), self.vector(b));
        self.index(&va.iter().zip(&vb).map(|(x, y)| x + y).collect::<Vec<_>>())
    }

    pub fn neg(&self, a: usize) -> usize {
        self.scale(-1, a)
    }

    pub fn sub(&self, a: usize, b: usize) -> usize {
        self.add(a, self.neg(b))
    }

    pub fn scale(&self, k: i64, a: usize) -> usize {
        let v = self.vector(a);
        self.index(&v.iter().map(|x| k * x).collect::<Vec<_>>())
    }

    /// (β,γ) for integer vectors, as an integer.
    pub fn pair_vec(&self, a: &[i64], b: &[i64]) -> i64 {
        let mut s = 0;
        for i in 0..self.m {
            for j in 0..self.m {
                s += a[i] * self.form[i][j] * b[j];
            }
        }
        s
    }

    /// (β,γ) mod ℓ for torus elements.
    pub fn pair(&self, a: usize, b: usize) -> i64 {
        self.pair_vec(&self.vector(a), &self.vector(b)).rem_euclid(self.ell as i64)
    }

    pub fn q_pow(&self, k: i64) -> Scalar {
        self.field.q_pow(k)
    }

    /// The element corresponding to the simple root e_i.
    pub fn simple(&self, i: usize) -> usize {
        let mut v = vec![0; self.m];
        v[i] = 1;
        self.index(&v)
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.size
    }

    /// The element 1/|𝕋| as a scalar.
    pub fn inv_order(&self) -> Scalar {
        Scalar::from_ratio(1, self.size as i64)
    }

    pub fn idempotents(&self) -> Vec<TorusElement> {
        self.elements().map(|b| TorusElement::idempotent(self, b).to_basis(self, TorusBasis::Group)).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TorusBasis {
    Group,
    Idempotent,
}

/// An element of the group algebra k𝕋, in one of its two bases.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorusElement {
    pub basis: TorusBasis,
    pub coeffs: BTreeMap<usize, Scalar>,
}

impl TorusElement {
    pub fn zero(basis: TorusBasis) -> TorusElement {
        TorusElement { basis, coeffs: BTreeMap::new() }
    }

    pub fn group_element(lambda: usize) -> TorusElement {
        TorusElement { basis: TorusBasis::Group, coeffs: BTreeMap::from([(lambda, Scalar::one())]) }
    }

    pub fn idempotent(_t: &TorusGroup, beta: usize) -> TorusElement {
        TorusElement { basis: TorusBasis::Idempotent, coeffs: BTreeMap::from([(beta, Scalar::one())]) }
    }

    pub fn one(t: &TorusGroup) -> TorusElement {
        let _ = t;
        TorusElement::group_element(0)
    }

    fn insert(&mut self, k: usize, v: Scalar) {
        if v.is_zero() {
            return;
        }
        let e = self.coeffs.entry(k).or_insert_with(Scalar::zero);
        *e = &*e + &v;
        if e.is_zero() {
            self.coeffs.remove(&k);
        }
    }

    /// Exact character transform between the two bases.
    pub fn to_basis(&self, t: &TorusGroup, to: TorusBasis) -> TorusElement {
        if self.basis == to {
            return self.clone();
        }
        let mut out = TorusElement::zero(to);
        match to {
            TorusBasis::Idempotent => {
                // K_λ = Σ_β q^{−(β,λ)} P_β
                for (&lambda, c) in &self.coeffs {
                    for beta in t.elements() {
                        out.insert(beta, c * &t.q_pow(-t.pair(beta, lambda)));
                    }
                }
            }
            TorusBasis::Group => {
                // P_β = |𝕋|⁻¹ Σ_λ q^{(β,λ)} K_λ
                let w = t.inv_order();
                for (&beta, c) in &self.coeffs {
                    let cw = c * &w;
                    for lambda in t.elements() {
                        out.insert(lambda, &cw * &t.q_pow(t.pair(beta, lambda)));
                    }
                }
            }
        }
        out
    }

    pub fn add(&self, t: &TorusGroup, other: &TorusElement) -> TorusElement {
        let b = other.to_basis(t, self.basis);
        let mut out = self.clone();
        for (k, v) in b.coeffs {
            out.insert(k, v);
        }
        out
    }

    pub fn mul(&self, t: &TorusGroup, other: &TorusElement) -> TorusElement {
        let b = other.to_basis(t, self.basis);
        let mut out = TorusElement::zero(self.basis);
        match self.basis {
            TorusBasis::Idempotent => {
                for (k, v) in &self.coeffs {
                    if let Some(w) = b.coeffs.get(k) {
                        out.insert(*k, v * w);
                    }
                }
            }
            TorusBasis::Group => {
                for (k, v) in &self.coeffs {
                    for (l, w) in &b.coeffs {
                        out.insert(t.add(*k, *l), v * w);
                    }
                }
            }
        }
        out
    }

    pub fn dump(&self, t: &TorusGroup) -> TorusElementDump {
        TorusElementDump {
            basis: self.basis,
            terms: self
                .coeffs
                .iter()
                .map(|(k, v)| TorusTermDump { vector: t.vector(*k), coeff: ScalarDump::from(v) })
                .collect(),
        }
    }
}

/// Serialized scalar: reduced common-denominator form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScalarDump {
    pub num: Vec<String>,
    pub den: String,
}

impl From<&Scalar> for ScalarDump {
    fn from(s: &Scalar) -> Self {
        let (num, den) = s.to_parts();
        ScalarDump { num: num.iter().map(|c| c.to_string()).collect(), den: den.to_string() }
    }
}

impl ScalarDump {
    pub fn to_scalar(&self, field: CyclotomicField) -> Result<Scalar> {
        let parse = |s: &str| s.parse::<BigInt>().map_err(|e| Error::InvalidSpec(format!("bad integer {s}: {e}")));
        let num = self.num.iter().map(|s| parse(s)).collect::<Result<Vec<_>>>()?;
        Scalar::from_parts(field, &num, &parse(&self.den)?)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TorusTermDump {
    pub vector: Vec<i64>,
    pub coeff: ScalarDump,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TorusElementDump {
    pub basis: TorusBasis,
    pub terms: Vec<TorusTermDump>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TorusTensorTermDump {
    pub vectors: Vec<Vec<i64>>,
    pub coeff: ScalarDump,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TorusTensorDump {
    pub basis: TorusBasis,
    pub terms: Vec<TorusTensorTermDump>,
}

/// An element of (k𝕋)^{⊗n}, stored by its values on the joint idempotent
/// basis P_{β₁}⊗…⊗P_{βₙ}. Products and inverses are pointwise.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorusTensor {
    pub n: usize,
    pub size: usize,
    pub values: Vec<Scalar>,
}

impl TorusTensor {
    pub fn from_fn(t: &TorusGroup, n: usize, mut f: impl FnMut(&[usize]) -> Scalar) -> TorusTensor {
        let size = t.size();
        let total = size.pow(n as u32);
        let mut idx = vec![0usize; n];
        let mut values = Vec::with_capacity(total);
        for mut k in 0..total {
            for slot in idx.iter_mut() {
                *slot = k % size;
                k /= size;
            }
            values.push(f(&idx));
        }
        TorusTensor { n, size, values }
    }

    pub fn constant(t: &TorusGroup, n: usize, c: Scalar) -> TorusTensor {
        TorusTensor::from_fn(t, n, |_| c.clone())
    }

    pub fn one(t: &TorusGroup, n: usize) -> TorusTensor {
        TorusTensor::constant(t, n, Scalar::one())
    }

    /// K_{λ₁}⊗…⊗K_{λₙ}.
    pub fn group_monomial(t: &TorusGroup, lambdas: &[usize]) -> TorusTensor {
        TorusTensor::from_fn(t, lambdas.len(), |chi| {
            let e: i64 = chi.iter().zip(lambdas).map(|(&c, &l)| t.pair(c, l)).sum();
            t.q_pow(-e)
        })
    }

    pub fn flat(&self, idx: &[usize]) -> usize {
        idx.iter().rev().fold(0, |acc, &i| acc * self.size + i)
    }

    pub fn unflat(&self, mut k: usize) -> Vec<usize> {
        (0..self.n)
            .map(|_| {
                let c = k % self.size;
                k /= self.size;
                c
            })
            .collect()
    }

    pub fn get(&self, idx: &[usize]) -> &Scalar {
        &self.values[self.flat(idx)]
    }

    pub fn map(&self, f: impl Fn(&Scalar) -> Scalar) -> TorusTensor {
        TorusTensor { n: self.n, size: self.size, values: self.values.iter().map(f).collect() }
    }

    fn zip(&self, o: &TorusTensor, f: impl Fn(&Scalar, &Scalar) -> Scalar) -> TorusTensor {
        assert_eq!((self.n, self.size), (o.n, o.size));
        TorusTensor { n: self.n, size: self.size, values: self.values.iter().zip(&o.values).map(|(a, b)| f(a, b)).collect() }
    }

    pub fn mul(&self, o: &TorusTensor) -> TorusTensor {
        self.zip(o, |a, b| a * b)
    }

    pub fn add(&self, o: &TorusTensor) -> TorusTensor {
        self.zip(o, |a, b| a + b)
    }

    pub fn sub(&self, o: &TorusTensor) -> TorusTensor {
        self.zip(o, |a, b| a - b)
    }

    pub fn scale(&self, c: &Scalar) -> TorusTensor {
        self.map(|a| a * c)
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| v.is_zero())
    }

    /// Pointwise inverse; fails at the first vanishing component.
    pub fn inv(&self) -> Result<TorusTensor> {
        let mut values = Vec::with_capacity(self.values.len());
        for (k, v) in self.values.iter().enumerate() {
            match v.inv() {
                Ok(x) => values.push(x),
                Err(_) => return Err(Error::SingularTorusTensor { witness: self.unflat(k).iter().map(|&i| i as u32).collect() }),
            }
        }
        Ok(TorusTensor { n: self.n, size: self.size, values })
    }

    /// Swaps two tensor slots.
    pub fn permute(&self, perm: &[usize]) -> TorusTensor {
        let mut out = self.values.clone();
        for (k, v) in self.values.iter().enumerate() {
            let idx = self.unflat(k);
            let new: Vec<usize> = perm.iter().map(|&p| idx[p]).collect();
            out[self.flat(&new)] = v.clone();
        }
        TorusTensor { n: self.n, size: self.size, values: out }
    }

    /// Group-basis coefficients: inverse character transform in every slot.
    pub fn to_group_terms(&self, t: &TorusGroup) -> BTreeMap<Vec<usize>, Scalar> {
        let mut cur: Vec<Scalar> = self.values.clone();
        let size = self.size;
        let w = t.inv_order();
        for slot in 0..self.n {
            let stride = size.pow(slot as u32);
            let mut next = vec![Scalar::zero(); cur.len()];
            for (k, v) in cur.iter().enumerate() {
                if v.is_zero() {
                    continue;
                }
                let beta = (k / stride) % size;
                let base = k - beta * stride;
                let vw = v * &w;
                for lambda in 0..size {
                    let e = &mut next[base + lambda * stride];
                    *e = &*e + &(&vw * &t.q_pow(t.pair(beta, lambda)));
                }
            }
            cur = next;
        }
        cur.into_iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .map(|(k, v)| (self.unflat(k), v))
            .collect()
    }

    /// Group-basis dump K_{β₁}⊗…⊗K_{βₙ}, sorted by index.
    pub fn dump(&self, t: &TorusGroup) -> TorusTensorDump {
        let terms = self
            .to_group_terms(t)
            .into_iter()
            .map(|(idx, v)| TorusTensorTermDump { vectors: idx.iter().map(|&b| t.vector(b)).collect(), coeff: ScalarDump::from(&v) })
            .collect();
        TorusTensorDump { basis: TorusBasis::Group, terms }
    }

    pub fn from_group_terms(t: &TorusGroup, n: usize, terms: &BTreeMap<Vec<usize>, Scalar>) -> TorusTensor {
        let mut acc = TorusTensor::constant(t, n, Scalar::zero());
        for (lam, c) in terms {
            acc = acc.add(&TorusTensor::group_monomial(t, lam).scale(c));
        }
        acc
    }
}

/// Ω = Σ_β P_β ⊗ K_β, whose value at P_χ₁⊗P_χ₂ is q^{−(χ₁,χ₂)}.
pub fn omega(t: &TorusGroup) -> TorusTensor {
    TorusTensor::from_fn(t, 2, |c| t.q_pow(-t.pair(c[0], c[1])))
}

/// Ω_S = |S|⁻¹ Σ_{β,γ∈S} q^{(β,γ)} K_β⊗K_γ for a direct summand S of 𝕋
/// with complement `complement`.
pub fn omega_restricted(t: &TorusGroup, s: &Sublattice, complement: &Sublattice) -> Result<TorusTensor> {
    check_direct_sum(t, s, complement)?;
    let w = Scalar::from_ratio(1, s.elements.len() as i64);
    Ok(TorusTensor::from_fn(t, 2, |c| {
        let mut acc = Scalar::zero();
        for &b in &s.elements {
            for &g in &s.elements {
                acc = &acc + &t.q_pow(t.pair(b, g) - t.pair(c[0], b) - t.pair(c[1], g));
            }
        }
        &acc * &w
    }))
}

/// The Cartan tensor for the sum over the whole group, computed from its
/// defining double sum (used as a cross-check of [`omega`]).
pub fn omega_by_sum(t: &TorusGroup) -> TorusTensor {
    let mut terms = BTreeMap::new();
    let w = t.inv_order();
    for b in t.elements() {
        for g in t.elements() {
            terms.insert(vec![b, g], &w * &t.q_pow(t.pair(b, g)));
        }
    }
    TorusTensor::from_group_terms(t, 2, &terms)
}

/// A subgroup of 𝕋 generated by the images of integer vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sublattice {
    pub generators: Vec<Vec<i64>>,
    /// Sorted indices of the members in 𝕋.
    pub elements: Vec<usize>,
}

impl Sublattice {
    pub fn generated(t: &TorusGroup, generators: Vec<Vec<i64>>) -> Sublattice {
        let mut set = std::collections::BTreeSet::from([0usize]);
        let mut frontier = vec![0usize];
        let gens: Vec<usize> = generators.iter().map(|g| t.index(g)).collect();
        while let Some(x) = frontier.pop() {
            for &g in &gens {
                let y = t.add(x, g);
                if set.insert(y) {
                    frontier.push(y);
                }
            }
        }
        Sublattice { generators, elements: set.into_iter().collect() }
    }

    pub fn contains(&self, x: usize) -> bool {
        self.elements.binary_search(&x).is_ok()
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }
}

/// Checks 𝕋 = S ⊕ C.
pub fn check_direct_sum(t: &TorusGroup, s: &Sublattice, c: &Sublattice) -> Result<()> {
    if s.order() * c.order() != t.size() {
        return Err(Error::BadSublattice(format!("orders {} and {} do not multiply to {}", s.order(), c.order(), t.size())));
    }
    if let Some(x) = s.elements.iter().find(|&&x| x != 0 && c.contains(x)) {
        return Err(Error::BadSublattice(format!("nonzero common element {:?}", t.vector(*x))));
    }
    Ok(())
}

/// Splits x ∈ 𝕋 = S ⊕ C into its two components.
pub fn decompose(t: &TorusGroup, s: &Sublattice, c: &Sublattice, x: usize) -> (usize, usize) {
    for &a in &s.elements {
        let b = t.sub(x, a);
        if c.contains(b) {
            return (a, b);
        }
    }
    panic!("element outside S ⊕ C");
}

/// Integer lattice data attached to a partial map T on simple roots.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeData {
    /// Basis of L = {λ ∈ Q | (λ,α) = (λ,Tα) for α ∈ Γ₁}.
    pub l_basis: Vec<Vec<i64>>,
    /// Basis of the orthogonal complement of L in Q.
    pub lperp_basis: Vec<Vec<i64>>,
    /// [Q : Q₁ + L].
    pub n1: i64,
    /// [Q : L⊥ + L].
    pub n2: i64,
}

/// Computes L, L⊥ and the indices n₁, n₂ over ℤ, and checks that ℓ is
/// coprime to both.
pub fn sublattice_calculus(form: &[Vec<i64>], gamma1: &[usize], t_map: &[usize], ell: u32) -> Result<LatticeData> {
    let m = form.len();
    let pair_row = |v: &[i64]| -> Vec<i64> { (0..m).map(|j| (0..m).map(|i| v[i] * form[i][j]).sum()).collect() };
    let rows: Vec<Vec<i64>> = gamma1
        .iter()
        .zip(t_map)
        .map(|(&a, &b)| {
            let mut d = vec![0i64; m];
            d[a] += 1;
            d[b] -= 1;
            pair_row(&d)
        })
        .collect();
    let l_basis = int_kernel(&rows, m);
    let lrows: Vec<Vec<i64>> = l_basis.iter().map(|v| pair_row(v)).collect();
    let lperp_basis = int_kernel(&lrows, m);
    let mut q1l: Vec<Vec<i64>> = gamma1
        .iter()
        .map(|&i| {
            let mut e = vec![0i64; m];
            e[i] = 1;
            e
        })
        .collect();
    q1l.extend(l_basis.iter().cloned());
    let mut lpl = lperp_basis.clone();
    lpl.extend(l_basis.iter().cloned());
    let n1 = lattice_index(&q1l, m).ok_or_else(|| Error::BadSublattice("Q1 + L has infinite index".into()))?;
    let n2 = lattice_index(&lpl, m).ok_or_else(|| Error::BadSublattice("L + L⊥ has infinite index".into()))?;
    for n in [n1, n2] {
        if n.gcd(&(ell as i64)) != 1 {
            return Err(Error::EllNotCoprime { ell, index: n });
        }
    }
    Ok(LatticeData { l_basis, lperp_basis, n1, n2 })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a1(ell: u32) -> TorusGroup {
        TorusGroup::new(vec![vec![2]], ell).unwrap()
    }

    fn a2(ell: u32) -> TorusGroup {
        TorusGroup::new(vec![vec![2, -1], vec![-1, 2]], ell).unwrap()
    }

    #[test]
    fn degenerate_form_rejected() {
        assert_eq!(TorusGroup::new(vec![vec![2, -1], vec![-1, 2]], 3).unwrap_err(), Error::NonInvertibleForm);
        assert_eq!(a2(5).determinant(), 3);
    }

    #[test]
    fn p0_squared_at_ell3() {
        let t = a1(3);
        let p0 = TorusElement::idempotent(&t, 0).to_basis(&t, TorusBasis::Group);
        let third = Scalar::from_ratio(1, 3);
        for l in 0..3 {
            assert_eq!(p0.coeffs[&l], third);
        }
        assert_eq!(p0.mul(&t, &p0), p0);
        let p1 = TorusElement::idempotent(&t, 1).to_basis(&t, TorusBasis::Group);
        let p2 = TorusElement::idempotent(&t, 2).to_basis(&t, TorusBasis::Group);
        assert!(p1.mul(&t, &p2).coeffs.is_empty());
    }

    #[test]
    fn idempotents_orthogonal_and_complete() {
        for t in [a1(3), a1(5), TorusGroup::new(vec![vec![2, 0], vec![0, 2]], 3).unwrap(), a2(5)] {
            let ps = t.idempotents();
            let mut sum = TorusElement::zero(TorusBasis::Group);
            for (i, p) in ps.iter().enumerate() {
                sum = sum.add(&t, p);
                for (j, r) in ps.iter().enumerate() {
                    let prod = p.mul(&t, r);
                    if i == j {
                        assert_eq!(&prod, p);
                    } else {
                        assert!(prod.coeffs.is_empty());
                    }
                }
            }
            assert_eq!(sum, TorusElement::one(&t));
        }
    }

    #[test]
    fn one_in_idempotent_basis() {
        let t = a2(5);
        let one = TorusElement::one(&t).to_basis(&t, TorusBasis::Idempotent);
        assert_eq!(one.coeffs.len(), 25);
        assert!(one.coeffs.values().all(|c| c.is_one()));
    }

    #[test]
    fn group_element_reexpands() {
        let t = a2(5);
        let k = t.index(&[1, 3]);
        let e = TorusElement::group_element(k);
        let p = e.to_basis(&t, TorusBasis::Idempotent);
        for (chi, c) in &p.coeffs {
            assert_eq!(c, &t.q_pow(-t.pair(*chi, k)));
        }
        assert_eq!(p.to_basis(&t, TorusBasis::Group), e);
    }

    #[test]
    fn omega_two_expansions() {
        for t in [a1(3), a1(5), a2(5)] {
            let om = omega(&t);
            assert_eq!(om, omega_by_sum(&t));
            // Σ_β K_β ⊗ P_β
            let swapped = TorusTensor::from_fn(&t, 2, |c| t.q_pow(-t.pair(c[1], c[0])));
            assert_eq!(om, swapped);
            let inv = om.inv().unwrap();
            assert!(om.mul(&inv).values.iter().all(|v| v.is_one()));
            // Ω⁻¹ = Σ_β P_β ⊗ K_{−β}
            let expect = TorusTensor::from_fn(&t, 2, |c| t.q_pow(t.pair(c[0], c[1])));
            assert_eq!(inv, expect);
        }
    }

    #[test]
    fn singular_tensor_reports_witness() {
        let t = a1(3);
        let k = TorusTensor::group_monomial(&t, &[1, 1]);
        let z = k.sub(&k);
        assert!(matches!(z.inv(), Err(Error::SingularTorusTensor { .. })));
        assert!(TorusTensor::one(&t, 2).inv().unwrap().values.iter().all(|v| v.is_one()));
    }

    #[test]
    fn group_terms_round_trip() {
        let t = a1(5);
        let mut terms = BTreeMap::new();
        terms.insert(vec![1, 3], Scalar::from_int(2));
        terms.insert(vec![0, 4], t.q_pow(2));
        let x = TorusTensor::from_group_terms(&t, 2, &terms);
        assert_eq!(x.to_group_terms(&t), terms);
    }

    #[test]
    fn a2_swap_lattices() {
        let t = a2(5);
        let data = sublattice_calculus(t.form(), &[0, 1], &[1, 0], 5).unwrap();
        assert_eq!(data.l_basis.len(), 1);
        let l = &data.l_basis[0];
        assert_eq!(l[0].abs(), 1);
        assert_eq!(l[0], l[1]);
        assert_eq!(data.lperp_basis.len(), 1);
        assert_eq!(data.lperp_basis[0][0], -data.lperp_basis[0][1]);
        assert_eq!((data.n1, data.n2), (1, 2));
        let tl = Sublattice::generated(&t, data.l_basis.clone());
        let tp = Sublattice::generated(&t, data.lperp_basis.clone());
        let ol = omega_restricted(&t, &tl, &tp).unwrap();
        let op = omega_restricted(&t, &tp, &tl).unwrap();
        assert_eq!(ol.mul(&op), omega(&t));
    }

    #[test]
    fn identity_triple_lattices() {
        let data = sublattice_calculus(&[vec![2, -1], vec![-1, 2]], &[0, 1], &[0, 1], 5).unwrap();
        assert_eq!(data.l_basis.len(), 2);
        assert!(data.lperp_basis.is_empty());
        assert_eq!((data.n1, data.n2), (1, 1));
    }

    #[test]
    fn nilpotent_partial_map_lattices() {
        // Γ₁ = {α₁}, T(α₁) = α₂ on A2: L = ℤ(α₁+α₂), Q₁ + L = Q, L⊥ + L of index 2
        let data = sublattice_calculus(&[vec![2, -1], vec![-1, 2]], &[0], &[1], 5).unwrap();
        assert_eq!(data.l_basis, vec![vec![1, 1]]);
        assert_eq!(data.lperp_basis, vec![vec![1, -1]]);
        assert_eq!((data.n1, data.n2), (1, 2));
    }

    #[test]
    fn bad_direct_sum() {
        let t = a2(5);
        let s = Sublattice::generated(&t, vec![vec![1, 1]]);
        assert!(matches!(omega_restricted(&t, &s, &s), Err(Error::BadSublattice(_))));
    }
}
