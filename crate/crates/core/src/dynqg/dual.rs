//! D_J = Map(𝕋×𝕋)⊗U* built from its L-matrix presentation, and the checks
//! that it is the opposite of the dual of H_J.
//!
//! Elements of D_J are functionals on H, stored by their values on the basis
//! E_{λμ}⊗u. The basis vector 𝕀_{λ¹λ²}L_c of D_J pairs to 1 with E_{λ¹λ²}⊗u_c
//! and to 0 elsewhere, so it shares its label with that basis element of H.

use super::DynamicalQG;
use crate::abrr::DynamicalElement;
use crate::linalg::{rank, SparseRow};
use crate::report::Report;
use crate::scalars::Scalar;
use crate::tensor::{pack, slot, Label, SparseTensor};
use crate::wha::qt::RhoMap;
use crate::wha::sample::SampleSpec;
use crate::wha::twist::Twisted;
use crate::wha::WeakHopfStructure;
use rand::Rng;
use rustc_hash::FxHashMap;
use serde::Serialize;
use serde_json::json;

/// How a PBW block (b¹, b²) of u_c turns into the degree α of L_c in the
/// relation f(λ¹,λ²)L_α = L_α f(λ¹+α¹, λ²+α²).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum GradingReading {
    /// L_c ∈ Hom(P_{α¹}UP_{α²}, k): α = (b¹, b²).
    Displayed,
    /// L_c ∈ Hom(P_{−α¹}UP_{−α²}, k): α = (−b¹, −b²).
    Negated,
}

pub struct DualDJ<'a> {
    dq: &'a DynamicalQG,
    pub reading: GradingReading,
    /// (b, a) ↦ [(c, ⟨L_b⊗L_a, 𝒥⁻¹(λ¹)Δ(u_c)𝒥(λ²)⟩)] for each (λ¹, λ²).
    mult: Vec<FxHashMap<(Label, Label), Vec<(Label, Scalar)>>>,
    /// c ↦ [(a, b, coefficient of u_c in u_a u_b)].
    comul_u: Vec<Vec<(Label, Label, Scalar)>>,
    /// A(ν²)S⁻¹(u_c)B(ν¹) indexed by (ν¹, ν², c), see [`antipode_factors`].
    antipode_table: Vec<SparseTensor>,
    pub k: Vec<SparseTensor>,
    pub k_bar: Vec<SparseTensor>,
}

/// K̄(λ) = m(id⊗S)𝒥⁻¹(λ) and K(λ) = Σ_μ (m(S⊗id)𝒥)(λ−μ)P_μ.
pub fn k_functions(dq: &DynamicalQG, jj: &DynamicalElement, jj_inv: &DynamicalElement) -> (Vec<SparseTensor>, Vec<SparseTensor>) {
    let (t, us) = (&dq.u.torus, &dq.u.structure);
    let m: Vec<SparseTensor> = t.elements().map(|l| us.multiply_out(&us.antipode_at(jj.at(l), 0))).collect();
    let k = t
        .elements()
        .map(|l| {
            let mut acc = SparseTensor::zero(1);
            for mu in t.elements() {
                acc.add_assign(&us.mul(&m[t.sub(l, mu)], &dq.u.p(mu)));
            }
            acc
        })
        .collect();
    let k_bar = t.elements().map(|l| us.multiply_out(&us.antipode_at(jj_inv.at(l), 1))).collect();
    (k, k_bar)
}

/// A(ν) = Σ_μ P_μ S⁻¹(K̄(ν−μ)) and B(ν) = S⁻¹(m(S⊗id)𝒥(ν)), so that
/// ⟨S(L_a), E_ν u⟩ = ⟨L_a, A(ν²)S⁻¹(u)B(ν¹)⟩ for S the transpose of S_J⁻¹.
pub fn antipode_factors(dq: &DynamicalQG, jj: &DynamicalElement, k_bar: &[SparseTensor]) -> (Vec<SparseTensor>, Vec<SparseTensor>) {
    let (t, us) = (&dq.u.torus, &dq.u.structure);
    let s_inv = |x: &SparseTensor| us.antipode_inv(x).expect("U has an inverse antipode");
    let left = t
        .elements()
        .map(|l| {
            let mut acc = SparseTensor::zero(1);
            for mu in t.elements() {
                acc.add_assign(&us.mul(&dq.u.p(mu), &s_inv(&k_bar[t.sub(l, mu)])));
            }
            acc
        })
        .collect();
    let right = t.elements().map(|l| s_inv(&us.multiply_out(&us.antipode_at(jj.at(l), 0)))).collect();
    (left, right)
}

fn antipode_table(dq: &DynamicalQG, left: &[SparseTensor], right: &[SparseTensor], inverse: bool) -> Vec<SparseTensor> {
    let (n, us) = (dq.size(), &dq.u.structure);
    let mut table = Vec::with_capacity(n * n * us.dim());
    for n1 in 0..n {
        for n2 in 0..n {
            for c in 0..us.dim() as Label {
                let s = if inverse { us.antipode_inv_label(c).expect("U has an inverse antipode") } else { us.antipode_label(c) };
                table.push(us.mul_all(&[&left[n2], s, &right[n1]]));
            }
        }
    }
    table
}

impl<'a> DualDJ<'a> {
    pub fn new(dq: &'a DynamicalQG, jj: &DynamicalElement, jj_inv: &DynamicalElement, reading: GradingReading) -> DualDJ<'a> {
        let (n, us) = (dq.size(), &dq.u.structure);
        let du = us.dim() as Label;
        let mut mult = Vec::with_capacity(n * n);
        for l1 in 0..n {
            for l2 in 0..n {
                let mut m: FxHashMap<(Label, Label), Vec<(Label, Scalar)>> = FxHashMap::default();
                for c in 0..du {
                    let x = us.mul_all(&[jj_inv.at(l1), us.comul_label(c), jj.at(l2)]);
                    for (k, v) in x.iter() {
                        m.entry((slot(k, 0), slot(k, 1))).or_default().push((c, v.clone()));
                    }
                }
                mult.push(m);
            }
        }
        let mut comul_u = vec![Vec::new(); du as usize];
        for a in 0..du {
            for b in 0..du {
                for (c, v) in us.mul_labels(a, b).iter() {
                    comul_u[*c as usize].push((a, b, v.clone()));
                }
            }
        }
        let (k, k_bar) = k_functions(dq, jj, jj_inv);
        let (left, right) = antipode_factors(dq, jj, &k_bar);
        let antipode_table = antipode_table(dq, &left, &right, true);
        DualDJ { dq, reading, mult, comul_u, antipode_table, k, k_bar }
    }

    fn degree(&self, c: Label) -> (usize, usize) {
        let t = &self.dq.u.torus;
        let (b1, b2) = self.dq.u.structure.block_of(c).expect("U has blocks");
        let (b1, b2) = (b1 as usize, b2 as usize);
        match self.reading {
            GradingReading::Displayed => (b1, b2),
            GradingReading::Negated => (t.neg(b1), t.neg(b2)),
        }
    }

    pub fn dim(&self) -> usize {
        self.dq.h.dim()
    }

    /// ⟨𝕀_{λ¹λ²}L_c, E_{α¹α²}u_d⟩ = δ_{λ¹α¹}δ_{λ²α²}⟨L_c, u_d⟩.
    pub fn pairing(&self, x: Label, h: Label) -> Scalar {
        let ((l1, l2, c), (a1, a2, d)) = (self.dq.split(x), self.dq.split(h));
        if l1 == a1 && l2 == a2 && c == d {
            Scalar::one()
        } else {
            Scalar::zero()
        }
    }

    /// (𝕀_λL_a)(𝕀_μL_b) = 𝕀_λ𝕀_{μ+α}L_aL_b with α the degree of L_a, and
    /// ⟨L_aL_b, E_ν u⟩ = ⟨L_b⊗L_a, 𝒥⁻¹(ν¹)Δ(u)𝒥(ν²)⟩.
    pub fn product(&self, x: Label, y: Label) -> SparseTensor {
        let t = &self.dq.u.torus;
        let ((l1, l2, a), (m1, m2, b)) = (self.dq.split(x), self.dq.split(y));
        let (d1, d2) = self.degree(a);
        let mut out = SparseTensor::zero(1);
        if t.add(m1, d1) != l1 || t.add(m2, d2) != l2 {
            return out;
        }
        if let Some(terms) = self.mult[l1 * self.dq.size() + l2].get(&(b, a)) {
            for (c, v) in terms {
                out.add_term(self.dq.label(l1, l2, *c) as u64, v.clone());
            }
        }
        out
    }

    /// Δ(𝕀_{λ¹λ²}L_c) = Σ_μ Σ ⟨L_c, u_au_b⟩ 𝕀_{λ¹μ}L_a⊗𝕀_{μλ²}L_b.
    pub fn coproduct(&self, x: Label) -> SparseTensor {
        let (l1, l2, c) = self.dq.split(x);
        let mut out = SparseTensor::zero(2);
        for mu in 0..self.dq.size() {
            for (a, b, v) in &self.comul_u[c as usize] {
                out.add_term(pack(&[self.dq.label(l1, mu, *a), self.dq.label(mu, l2, *b)]), v.clone());
            }
        }
        out
    }

    /// ε(𝕀_{λ¹λ²}L_c) = δ_{λ¹λ²}⟨L_c, 1⟩.
    pub fn counit(&self, x: Label) -> Scalar {
        let (l1, l2, c) = self.dq.split(x);
        if l1 == l2 {
            self.dq.u.one().get(&[c])
        } else {
            Scalar::zero()
        }
    }

    /// 1 = (ε⊗id)L with constant function 1.
    pub fn unit(&self) -> SparseTensor {
        let us = &self.dq.u.structure;
        let n = self.dq.size();
        let mut out = SparseTensor::zero(1);
        for l1 in 0..n {
            for l2 in 0..n {
                for c in 0..us.dim() as Label {
                    let e = us.counit_label(c);
                    if !e.is_zero() {
                        out.add_term(self.dq.label(l1, l2, c) as u64, e);
                    }
                }
            }
        }
        out
    }

    /// S(𝕀_λL_a) = S(L_a)𝕀_{λ²λ¹} = 𝕀_{(λ²,λ¹)+β}S(L_a), β the degree of
    /// S(L_a), with ⟨S(L_a), E_ν u⟩ = ⟨L_a, A(ν²)S⁻¹(u)B(ν¹)⟩.
    pub fn antipode(&self, x: Label) -> SparseTensor {
        self.antipode_with(&self.antipode_table, x)
    }

    fn antipode_with(&self, table: &[SparseTensor], x: Label) -> SparseTensor {
        let t = &self.dq.u.torus;
        let (l1, l2, a) = self.dq.split(x);
        let (b1, b2) = self.dq.u.structure.block_of(a).expect("U has blocks");
        // S(L_a) is supported on P_{−b²}UP_{−b¹}
        let (s1, s2) = (t.neg(b2 as usize), t.neg(b1 as usize));
        let (d1, d2) = match self.reading {
            GradingReading::Displayed => (s1, s2),
            GradingReading::Negated => (t.neg(s1), t.neg(s2)),
        };
        let (n1, n2) = (t.add(l2, d1), t.add(l1, d2));
        let du = self.dq.u.dim();
        let mut out = SparseTensor::zero(1);
        for c in 0..du {
            let v = table[(n1 * self.dq.size() + n2) * du + c].get(&[a]);
            if !v.is_zero() {
                out.add_term(self.dq.label(n1, n2, c as Label) as u64, v);
            }
        }
        out
    }
}

/// Labels under test: all of them up to the threshold, otherwise a seeded
/// sample.
fn labels(spec: &SampleSpec, dim: Label, salt: u64) -> Vec<Label> {
    if dim as usize <= spec.threshold {
        return (0..dim).collect();
    }
    let mut rng = spec.rng(salt);
    (0..4 * spec.samples).map(|_| rng.gen_range(0..dim)).collect()
}

/// All pairs up to the threshold, otherwise seeded pairs whose first entry
/// runs over `labels`.
fn pairs(spec: &SampleSpec, dim: Label, salt: u64) -> Vec<(Label, Label)> {
    if dim as usize <= spec.threshold {
        return (0..dim).flat_map(|x| (0..dim).map(move |y| (x, y))).collect();
    }
    let mut rng = spec.rng(salt);
    (0..16 * spec.samples).map(|_| (rng.gen_range(0..dim), rng.gen_range(0..dim))).collect()
}

/// Pairing rank, unit and counit, and that product, coproduct and antipode of
/// D_J are the transposes of Δ_J, the product of H_J and S_J⁻¹, with the
/// product taken in the opposite order. Full-basis comparison up to the
/// threshold of `spec`, sampled pairs above it.
pub fn verify_duality(dj: &DualDJ, hj: &Twisted, spec: &SampleSpec, instance: &str) -> Report {
    let h = &hj.algebra;
    let dim = h.dim() as Label;
    let mut r = Report::new();
    r.run("k_inverse_pair", instance, || {
        let us = &dj.dq.u.structure;
        let one = dj.dq.u.one();
        for l in 0..dj.k.len() {
            if us.mul(&dj.k[l], &dj.k_bar[l]) != one || us.mul(&dj.k_bar[l], &dj.k[l]) != one {
                return Some(json!({ "lambda": dj.dq.u.torus.vector(l) }));
            }
        }
        None
    });
    r.run("dual_pairing_rank", instance, || {
        let rows: Vec<SparseRow> = (0..dim).map(|x| (0..dim).map(|y| (y as usize, dj.pairing(x, y))).filter(|(_, v)| !v.is_zero()).collect()).collect();
        let rk = rank(rows);
        (rk != dim as usize).then(|| json!({ "rank": rk, "dim": dim }))
    });
    r.run("dual_unit", instance, || {
        let unit = dj.unit();
        (0..dim).find(|&l| unit.get(&[l]) != h.counit_label(l)).map(|l| json!({ "at": h.label_name(l) }))
    });
    r.run("dual_counit", instance, || {
        let one = h.one();
        (0..dim).find(|&x| dj.counit(x) != one.get(&[x])).map(|x| json!({ "element": h.label_name(x) }))
    });
    r.run("dual_product", instance, || {
        // ⟨φψ, h⟩ = ⟨ψ⊗φ, Δ_J(h)⟩
        let mut expected: FxHashMap<(Label, Label), SparseTensor> = FxHashMap::default();
        for l in 0..dim {
            for (k, v) in h.comul_label(l).iter() {
                expected.entry((slot(k, 1), slot(k, 0))).or_insert_with(|| SparseTensor::zero(1)).add_term(l as u64, v.clone());
            }
        }
        let zero = SparseTensor::zero(1);
        pairs(spec, dim, 11)
            .into_iter()
            .find(|&(x, y)| &dj.product(x, y) != expected.get(&(x, y)).unwrap_or(&zero))
            .map(|(x, y)| json!({ "elements": [h.label_name(x), h.label_name(y)] }))
    });
    r.run("dual_coproduct", instance, || {
        // ⟨Δφ, h⊗g⟩ = ⟨φ, hg⟩
        let mut got: FxHashMap<(Label, Label), SparseTensor> = FxHashMap::default();
        for x in 0..dim {
            for (k, v) in dj.coproduct(x).iter() {
                got.entry((slot(k, 0), slot(k, 1))).or_insert_with(|| SparseTensor::zero(1)).add_term(x as u64, v.clone());
            }
        }
        let zero = SparseTensor::zero(1);
        pairs(spec, dim, 12)
            .into_iter()
            .find(|&(a, b)| &h.mul(&h.basis(a), &h.basis(b)) != got.get(&(a, b)).unwrap_or(&zero))
            .map(|(a, b)| json!({ "elements": [h.label_name(a), h.label_name(b)] }))
    });
    r.run("dual_antipode", instance, || {
        // ⟨S_D φ, h⟩ = ⟨φ, S_J⁻¹(h)⟩
        let mut expected = vec![SparseTensor::zero(1); dim as usize];
        for l in 0..dim {
            let s = h.antipode_inv_label(l).expect("H_J has an inverse antipode");
            for (k, v) in s.iter() {
                expected[k as usize].add_term(l as u64, v.clone());
            }
        }
        labels(spec, dim, 13).into_iter().find(|&x| dj.antipode(x) != expected[x as usize]).map(|x| json!({ "element": h.label_name(x) }))
    });
    r.run("dual_function_commutation", instance, || {
        // 𝕀_μ·L_a = L_a·𝕀_{μ−α}, with L_a = Σ_λ 𝕀_λL_a and 𝕀_μ = 𝕀_μ·1
        let t = &dj.dq.u.torus;
        let n = dj.dq.size();
        let du = dj.dq.u.dim() as Label;
        let unit_label = |l1: usize, l2: usize| dj.dq.label(l1, l2, 0);
        let mul_sum = |xs: &[Label], ys: &[Label]| {
            let mut acc = SparseTensor::zero(1);
            for &x in xs {
                for &y in ys {
                    acc.add_assign(&dj.product(x, y));
                }
            }
            acc
        };
        for a in labels(spec, du, 14) {
            let (d1, d2) = dj.degree(a);
            let la: Vec<Label> = (0..n).flat_map(|l1| (0..n).map(move |l2| (l1, l2))).map(|(l1, l2)| dj.dq.label(l1, l2, a)).collect();
            for m1 in 0..n {
                for m2 in 0..n {
                    let lhs = mul_sum(&[unit_label(m1, m2)], &la);
                    let rhs = mul_sum(&la, &[unit_label(t.sub(m1, d1), t.sub(m2, d2))]);
                    if lhs != rhs {
                        return Some(json!({ "functional": dj.dq.u.structure.label_name(a), "mu": [m1, m2] }));
                    }
                }
            }
        }
        None
    });
    r
}

/// ρ: D_J → H_J, φ ↦ (id⊗φ)𝓡(λ), against the structure of D_J: products,
/// coproducts, counit, unit and antipode, on the full basis up to the
/// threshold of `spec`.
pub fn verify_self_duality(dj: &DualDJ, hj: &Twisted, rho: &RhoMap, spec: &SampleSpec, instance: &str) -> Report {
    let h: &WeakHopfStructure = &hj.algebra;
    let dim = h.dim() as Label;
    let mut r = Report::new();
    r.run("rho_unit", instance, || (rho.apply(&dj.unit()) != h.one()).then(|| json!({})));
    r.run("rho_counit", instance, || (0..dim).find(|&x| h.counit(&rho.images[x as usize]) != dj.counit(x)).map(|x| json!({ "element": h.label_name(x) })));
    r.run("rho_product", instance, || {
        pairs(spec, dim, 15)
            .into_iter()
            .find(|&(x, y)| rho.apply(&dj.product(x, y)) != h.mul(&rho.images[x as usize], &rho.images[y as usize]))
            .map(|(x, y)| json!({ "elements": [h.label_name(x), h.label_name(y)] }))
    });
    r.run("rho_coproduct", instance, || {
        labels(spec, dim, 16).into_iter().find(|&x| h.comul(&rho.images[x as usize]) != rho.apply2(&dj.coproduct(x))).map(|x| json!({ "element": h.label_name(x) }))
    });
    r.run("rho_antipode", instance, || {
        labels(spec, dim, 17).into_iter().find(|&x| h.antipode(&rho.images[x as usize]) != rho.apply(&dj.antipode(x))).map(|x| json!({ "element": h.label_name(x) }))
    });
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abrr::{curly_j, invert_dynamical, solve_abrr, SolverConfig};
    use crate::scalars::LambdaParam;
    use crate::uqg::{build_uq, CartanDatum};
    use crate::wha::qt::{rho_map, RhoKind};

    #[test]
    fn duality_holds_for_negated_reading_only() {
        let u = build_uq(&CartanDatum::a1(), 3).unwrap();
        let j = solve_abrr(&u, &SolverConfig::plain(LambdaParam::constant(1, 2))).unwrap();
        let jj = curly_j(&u, &j);
        let jj_inv = invert_dynamical(&u, &jj).unwrap();
        let dq = DynamicalQG::new(&u).unwrap();
        let hj = dq.build_hj(&jj, &jj_inv, "H_J").unwrap();
        let dj = DualDJ::new(&dq, &jj, &jj_inv, GradingReading::Negated);
        let rep = verify_duality(&dj, &hj, &SampleSpec::default(), "sl2");
        assert!(rep.all_pass(), "{:?}", rep.failures());
        let qt = dq.twisted_r(&jj, &jj_inv).unwrap();
        let rho = rho_map(&hj.algebra, &qt, RhoKind::First);
        let rep = verify_self_duality(&dj, &hj, &rho, &SampleSpec::default(), "sl2");
        assert!(rep.all_pass(), "{:?}", rep.failures());

        // K̄(ν²)·S^{±1}(u)·K(ν¹) gives the transpose of S_J with S(u), and
        // neither transpose with S⁻¹(u)
        let transpose = |f: &dyn Fn(Label) -> SparseTensor| {
            let dim = hj.algebra.dim() as Label;
            let mut e = vec![SparseTensor::zero(1); dim as usize];
            for l in 0..dim {
                for (k, v) in f(l).iter() {
                    e[k as usize].add_term(l as u64, v.clone());
                }
            }
            e
        };
        let h = &hj.algebra;
        let s_t = transpose(&|l| h.antipode_label(l).clone());
        let s_inv_t = transpose(&|l| h.antipode_inv_label(l).unwrap().clone());
        let apply = |table: &[SparseTensor]| (0..h.dim() as Label).map(|x| dj.antipode_with(table, x)).collect::<Vec<_>>();
        assert_eq!(apply(&antipode_table(&dq, &dj.k_bar, &dj.k, false)), s_t);
        let with_inverse = apply(&antipode_table(&dq, &dj.k_bar, &dj.k, true));
        assert!(with_inverse != s_t && with_inverse != s_inv_t);

        let other = DualDJ::new(&dq, &jj, &jj_inv, GradingReading::Displayed);
        let rep = verify_duality(&other, &hj, &SampleSpec::default(), "sl2");
        assert!(!rep.passed("dual_product"));
        assert!(rep.passed("dual_coproduct"));
    }
}
