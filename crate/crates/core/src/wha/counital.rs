//! Counital maps, counital subalgebras and separability idempotents.

use super::sample::{SampleSpec, Sampled};
use super::{to_row, WeakHopfStructure};
use crate::linalg::Echelon;
use crate::report::Report;
use crate::tensor::{slot, Label, SparseTensor};
use rustc_hash::FxHashMap;
use serde_json::json;

#[derive(Clone, Debug)]
pub struct CounitalData {
    /// Basis of H_t = {(φ⊗id)Δ(1)}.
    pub target_basis: Vec<SparseTensor>,
    /// Basis of H_s = {(id⊗φ)Δ(1)}.
    pub source_basis: Vec<SparseTensor>,
    /// e_t = (S⊗id)Δ(1).
    pub e_t: SparseTensor,
    /// e_s = (id⊗S)Δ(1).
    pub e_s: SparseTensor,
}

/// Basis of the span of the slot-`keep` legs of a rank-2 tensor, grouped by
/// the label in the other slot.
fn leg_span(t: &SparseTensor, keep: usize) -> Vec<SparseTensor> {
    let mut legs: FxHashMap<Label, SparseTensor> = FxHashMap::default();
    for (k, v) in t.iter() {
        legs.entry(slot(k, 1 - keep)).or_insert_with(|| SparseTensor::zero(1)).add_term(slot(k, keep) as u64, v.clone());
    }
    let mut keys: Vec<Label> = legs.keys().copied().collect();
    keys.sort_unstable();
    let mut ech = Echelon::new();
    let mut out = Vec::new();
    for k in keys {
        let x = &legs[&k];
        if ech.insert(&to_row(x)) {
            out.push(x.clone());
        }
    }
    out
}

pub fn counital_data(h: &WeakHopfStructure) -> CounitalData {
    let d1 = h.delta_one();
    CounitalData { target_basis: leg_span(&d1, 1), source_basis: leg_span(&d1, 0), e_t: h.antipode_at(&d1, 0), e_s: h.antipode_at(&d1, 1) }
}

fn span_contains(basis: &[SparseTensor], x: &SparseTensor) -> bool {
    let mut e = Echelon::new();
    for b in basis {
        e.insert(&to_row(b));
    }
    e.contains(&to_row(x))
}

/// Checks the counital identities: idempotency, images equal to the leg
/// spans, S∘ε_t = ε_s∘S, m(e_t) = m(e_s) = 1, the separability relations
/// and the sliding identities for Δ(h).
pub fn verify_counital(h: &WeakHopfStructure, data: &CounitalData, spec: &SampleSpec, instance: &str) -> Report {
    let mut r = Report::new();
    let elems: Vec<Sampled> = spec.elements(h);
    let one = h.one();
    r.run("eps_t_idempotent", instance, || {
        elems.iter().find(|e| {
            let t = h.eps_t(&e.x);
            h.eps_t(&t) != t || !span_contains(&data.target_basis, &t)
        }).map(|e| json!({ "elements": [e.name] }))
    });
    r.run("eps_s_idempotent", instance, || {
        elems.iter().find(|e| {
            let s = h.eps_s(&e.x);
            h.eps_s(&s) != s || !span_contains(&data.source_basis, &s)
        }).map(|e| json!({ "elements": [e.name] }))
    });
    r.run("counital_bases_fixed", instance, || {
        for z in &data.target_basis {
            if &h.eps_t(z) != z {
                return Some(json!({ "subalgebra": "target" }));
            }
        }
        for y in &data.source_basis {
            if &h.eps_s(y) != y {
                return Some(json!({ "subalgebra": "source" }));
            }
        }
        None
    });
    r.run("antipode_swaps_counital_maps", instance, || {
        elems.iter().find(|e| {
            h.antipode(&h.eps_t(&e.x)) != h.eps_s(&h.antipode(&e.x)) || h.antipode(&h.eps_s(&e.x)) != h.eps_t(&h.antipode(&e.x))
        }).map(|e| json!({ "elements": [e.name] }))
    });
    r.run("separability_idempotents", instance, || {
        if h.multiply_out(&data.e_t) != one {
            return Some(json!({ "failed": "m(e_t) = 1" }));
        }
        if h.multiply_out(&data.e_s) != one {
            return Some(json!({ "failed": "m(e_s) = 1" }));
        }
        for (which, basis, e) in [("e_t", &data.target_basis, &data.e_t), ("e_s", &data.source_basis, &data.e_s)] {
            for z1 in basis.iter() {
                for z2 in basis.iter() {
                    let l = h.mul_all(&[&z1.outer(&one), e, &z2.outer(&one)]);
                    let rr = h.mul_all(&[&one.outer(z2), e, &one.outer(z1)]);
                    if l != rr {
                        return Some(json!({ "failed": which }));
                    }
                }
            }
        }
        None
    });
    r.run("sliding_identities", instance, || {
        for e in &elems {
            let d = h.comul(&e.x);
            for z1 in &data.target_basis {
                for z2 in &data.target_basis {
                    let l = h.mul_all(&[&one.outer(z1), &d, &one.outer(z2)]);
                    let rr = h.mul_all(&[&h.antipode(z1).outer(&one), &d, &h.antipode(z2).outer(&one)]);
                    if l != rr {
                        return Some(json!({ "elements": [e.name], "identity": "z delta" }));
                    }
                }
            }
            for y1 in &data.source_basis {
                for y2 in &data.source_basis {
                    let l = h.mul_all(&[&y1.outer(&one), &d, &y2.outer(&one)]);
                    let rr = h.mul_all(&[&one.outer(&h.antipode(y1)), &d, &one.outer(&h.antipode(y2))]);
                    if l != rr {
                        return Some(json!({ "elements": [e.name], "identity": "y delta" }));
                    }
                }
            }
        }
        None
    });
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wha::groupoid::GroupoidRules;

    #[test]
    fn groupoid_counital_maps() {
        let g = GroupoidRules::full(3);
        let h = WeakHopfStructure::new("kG", g.clone());
        for l in 0..9 {
            let a = g.arrow(l);
            assert_eq!(h.eps_t(&h.basis(l)), h.basis(g.identity(a.target)));
            assert_eq!(h.eps_s(&h.basis(l)), h.basis(g.identity(a.source)));
        }
        let data = counital_data(&h);
        assert_eq!(data.target_basis.len(), 3);
        assert!(verify_counital(&h, &data, &SampleSpec::default(), "kG").all_pass());
    }

    #[test]
    fn ordinary_hopf_has_trivial_bases() {
        let h = WeakHopfStructure::new("Z3", GroupoidRules::cyclic_group(3));
        let data = counital_data(&h);
        assert_eq!(data.target_basis, vec![h.one()]);
        assert_eq!(data.source_basis, vec![h.one()]);
    }
}
