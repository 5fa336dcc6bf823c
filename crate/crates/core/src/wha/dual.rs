//! Dual weak Hopf algebras, as transposed structure tables or as
//! functionals given by their values on a basis.

use super::{StructureRules, WeakHopfStructure};
use crate::error::{Error, Result};
use crate::scalars::Scalar;
use crate::tensor::{pack, slot, Label, SparseTensor};
use rustc_hash::FxHashMap;

pub const DUAL_TABLE_LIMIT: usize = 1024;

/// H* on the dual basis {φ_a}. With `opposite`, the product is the one of
/// (H*)^op, i.e. ⟨φψ, h⟩ = ⟨ψ⊗φ, Δ(h)⟩, and the antipode is the transpose
/// of S⁻¹.
pub struct DualRules {
    dim: usize,
    names: Vec<String>,
    mul: FxHashMap<u64, SparseTensor>,
    comul: Vec<SparseTensor>,
    counit: Vec<Scalar>,
    unit: SparseTensor,
    antipode: Vec<SparseTensor>,
    antipode_inv: Option<Vec<SparseTensor>>,
}

fn transpose(images: impl Iterator<Item = (Label, SparseTensor)>, dim: usize) -> Vec<SparseTensor> {
    let mut out = vec![SparseTensor::zero(1); dim];
    for (c, img) in images {
        for (k, v) in img.iter() {
            out[k as usize].add_term(c as u64, v.clone());
        }
    }
    out
}

impl DualRules {
    pub fn new(h: &WeakHopfStructure, opposite: bool) -> Result<DualRules> {
        let dim = h.dim();
        if dim > DUAL_TABLE_LIMIT {
            return Err(Error::DimensionTooLarge { dim, limit: DUAL_TABLE_LIMIT });
        }
        let mut mul: FxHashMap<u64, SparseTensor> = FxHashMap::default();
        for c in 0..dim as Label {
            for (k, v) in h.comul_label(c).iter() {
                let (a, b) = (slot(k, 0), slot(k, 1));
                let key = if opposite { pack(&[b, a]) } else { pack(&[a, b]) };
                mul.entry(key).or_insert_with(|| SparseTensor::zero(1)).add_term(c as u64, v.clone());
            }
        }
        let mut comul = vec![SparseTensor::zero(2); dim];
        for a in 0..dim as Label {
            for b in 0..dim as Label {
                for (c, v) in h.mul_labels(a, b).iter() {
                    comul[*c as usize].add_term(pack(&[a, b]), v.clone());
                }
            }
        }
        let unit_h = h.one();
        let counit = (0..dim as Label).map(|c| unit_h.get(&[c])).collect();
        let mut unit = SparseTensor::zero(1);
        for c in 0..dim as Label {
            unit.add_term(c as u64, h.counit_label(c));
        }
        let s = transpose((0..dim as Label).map(|a| (a, h.antipode_label(a).clone())), dim);
        let s_inv = if h.antipode_inv_label(0).is_some() {
            Some(transpose((0..dim as Label).map(|a| (a, h.antipode_inv_label(a).unwrap().clone())), dim))
        } else if opposite {
            let solver = h.antipode_solver();
            let imgs: Option<Vec<(Label, SparseTensor)>> =
                (0..dim as Label).map(|a| solver.preimage(&SparseTensor::basis(&[a])).map(|y| (a, y))).collect();
            let imgs = imgs.ok_or_else(|| Error::NotInvertible("antipode".into()))?;
            Some(transpose(imgs.into_iter(), dim))
        } else {
            None
        };
        let (antipode, antipode_inv) = if opposite { (s_inv.expect("computed above"), Some(s)) } else { (s, s_inv) };
        let names = (0..dim as Label).map(|l| format!("φ[{}]", h.label_name(l))).collect();
        Ok(DualRules { dim, names, mul, comul, counit, unit, antipode, antipode_inv })
    }
}

impl StructureRules for DualRules {
    fn dim(&self) -> usize {
        self.dim
    }

    fn label_name(&self, l: Label) -> String {
        self.names[l as usize].clone()
    }

    fn unit(&self) -> SparseTensor {
        self.unit.clone()
    }

    fn mul(&self, a: Label, b: Label) -> SparseTensor {
        self.mul.get(&pack(&[a, b])).cloned().unwrap_or_else(|| SparseTensor::zero(1))
    }

    fn comul(&self, a: Label) -> SparseTensor {
        self.comul[a as usize].clone()
    }

    fn counit(&self, a: Label) -> Scalar {
        self.counit[a as usize].clone()
    }

    fn antipode(&self, a: Label) -> SparseTensor {
        self.antipode[a as usize].clone()
    }

    fn antipode_inv(&self, a: Label) -> Option<SparseTensor> {
        self.antipode_inv.as_ref().map(|v| v[a as usize].clone())
    }
}

/// The dual weak Hopf algebra H* (or (H*)^op).
pub fn dual_wha(h: &WeakHopfStructure, opposite: bool) -> Result<WeakHopfStructure> {
    let name = if opposite { format!("{}*op", h.name()) } else { format!("{}*", h.name()) };
    Ok(WeakHopfStructure::new(name, DualRules::new(h, opposite)?))
}

/// A functional on H, held as its values on the basis of H.
pub type Functional = SparseTensor;

/// ⟨φψ, h⟩ = ⟨φ⊗ψ, Δ(h)⟩, or ⟨ψ⊗φ, Δ(h)⟩ with `opposite`, evaluated on
/// every basis element.
pub fn functional_dual_product(phi: &Functional, psi: &Functional, h: &WeakHopfStructure, opposite: bool) -> Functional {
    let mut out = SparseTensor::zero(1);
    for c in 0..h.dim() as Label {
        let mut acc = Scalar::zero();
        for (k, v) in h.comul_label(c).iter() {
            let (a, b) = (slot(k, 0), slot(k, 1));
            let (x, y) = if opposite { (psi.get(&[a]), phi.get(&[b])) } else { (phi.get(&[a]), psi.get(&[b])) };
            if !x.is_zero() && !y.is_zero() {
                acc = acc.add(&(v * &x.mul(&y)));
            }
        }
        out.add_term(c as u64, acc);
    }
    out
}

/// Evaluates a functional on an element.
pub fn evaluate(phi: &Functional, x: &SparseTensor) -> Scalar {
    x.iter().fold(Scalar::zero(), |acc, (k, v)| acc.add(&(v * &phi.get(&[k as Label]))))
}

/// The counit of H as a functional.
pub fn counit_functional(h: &WeakHopfStructure) -> Functional {
    SparseTensor::from_terms(1, (0..h.dim() as Label).map(|c| (c as u64, h.counit_label(c))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wha::groupoid::GroupoidRules;
    use crate::wha::sample::SampleSpec;
    use crate::wha::verify::verify_axioms;

    fn same_constants(a: &WeakHopfStructure, b: &WeakHopfStructure) -> bool {
        let n = a.dim() as Label;
        a.one() == b.one()
            && (0..n).all(|x| {
                a.comul_label(x) == b.comul_label(x)
                    && a.counit_label(x) == b.counit_label(x)
                    && a.antipode_label(x) == b.antipode_label(x)
                    && (0..n).all(|y| a.mul_labels(x, y) == b.mul_labels(x, y))
            })
    }

    #[test]
    fn groupoid_dual_comultiplication() {
        let g = GroupoidRules::full(2);
        let h = WeakHopfStructure::new("kG", g.clone());
        let d = dual_wha(&h, false).unwrap();
        assert!(verify_axioms(&d, &SampleSpec::default(), "kG*").report.all_pass());
        // Δ(p_g) = Σ_{uv=g} p_u ⊗ p_v
        for x in 0..4 {
            let mut expect = SparseTensor::zero(2);
            for u in 0..4 {
                for v in 0..4 {
                    if g.compose(u, v) == Some(x) {
                        expect.add_term(pack(&[u, v]), Scalar::one());
                    }
                }
            }
            assert_eq!(d.comul_label(x), &expect);
            // p_g p_h = δ p_g
            for y in 0..4 {
                let p = d.mul_labels(x, y);
                assert_eq!(p.len(), (x == y) as usize);
            }
        }
    }

    #[test]
    fn double_dual_and_trivial_case() {
        for h in [WeakHopfStructure::new("kG", GroupoidRules::full(3)), WeakHopfStructure::new("k", GroupoidRules::cyclic_group(1))] {
            let dd = dual_wha(&dual_wha(&h, false).unwrap(), false).unwrap();
            assert!(same_constants(&h, &dd));
        }
        let k = WeakHopfStructure::new("k", GroupoidRules::cyclic_group(1));
        assert!(same_constants(&k, &dual_wha(&k, false).unwrap()));
    }

    #[test]
    fn functional_products_match_tables() {
        let h = WeakHopfStructure::new("kG", GroupoidRules::full(2));
        let eps = counit_functional(&h);
        for opposite in [false, true] {
            let d = dual_wha(&h, opposite).unwrap();
            for a in 0..4 {
                let phi = SparseTensor::basis(&[a]);
                assert_eq!(functional_dual_product(&eps, &phi, &h, opposite), phi);
                for b in 0..4 {
                    let psi = SparseTensor::basis(&[b]);
                    let table = d.mul(&phi, &psi);
                    assert_eq!(functional_dual_product(&phi, &psi, &h, opposite), table);
                }
            }
        }
    }
}
