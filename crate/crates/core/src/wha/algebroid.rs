//! The Hopf algebroid attached to a weak Hopf algebra: base H_t, source map
//! α = id, target map β = S⁻¹ on H_t, counit ε_t, antipode S, and H⊗_R H
//! realized as Δ(1)(H⊗H).

use super::counital::counital_data;
use super::sample::{tensor_witness, SampleSpec};
use super::WeakHopfStructure;
use crate::error::Result;
use crate::report::Report;
use crate::tensor::SparseTensor;
use serde_json::json;

#[derive(Clone, Debug)]
pub struct AlgebroidData {
    /// Basis of the base algebra H_t.
    pub base: Vec<SparseTensor>,
    /// β applied to each base vector.
    pub beta: Vec<SparseTensor>,
    pub report: Report,
}

impl AlgebroidData {
    /// γ(x) = Δ(1)·x, the projection of H⊗H onto H⊗_R H.
    pub fn section(h: &WeakHopfStructure, x: &SparseTensor) -> SparseTensor {
        h.mul(&h.delta_one(), x)
    }
}

pub fn algebroid_from_wha(h: &WeakHopfStructure, spec: &SampleSpec, instance: &str) -> Result<AlgebroidData> {
    let data = counital_data(h);
    let base = data.target_basis;
    let beta: Vec<SparseTensor> = base.iter().map(|a| h.antipode_inv(a)).collect::<Result<_>>()?;
    let one = h.one();
    let d1 = h.delta_one();
    let elems = spec.elements(h);
    let mut r = Report::new();
    let n = base.len();
    r.run("algebroid_total_algebra", instance, || {
        for i in 0..n {
            for j in 0..n {
                if h.mul(&base[i], &beta[j]) != h.mul(&beta[j], &base[i]) {
                    return Some(json!({ "failed": "α(a)β(b) = β(b)α(a)", "pair": [i, j] }));
                }
                let ab = h.antipode_inv(&h.mul(&base[i], &base[j])).expect("antipode inverse exists");
                if ab != h.mul(&beta[j], &beta[i]) {
                    return Some(json!({ "failed": "β(ab) = β(b)β(a)", "pair": [i, j] }));
                }
            }
        }
        None
    });
    r.run("algebroid_projection", instance, || {
        let p = h.mul(&d1, &d1);
        if p != d1 {
            return Some(tensor_witness(h, &["Δ(1)Δ(1)", "Δ(1)"], &p, &d1));
        }
        for e in &elems {
            let d = h.comul(&e.x);
            let g = AlgebroidData::section(h, &d);
            if g != d {
                return Some(tensor_witness(h, &[&e.name], &g, &d));
            }
        }
        None
    });
    r.run("algebroid_comultiplication", instance, || {
        for e in &elems {
            let d = h.comul(&e.x);
            for (i, a) in base.iter().enumerate() {
                // Takeuchi condition h₁β(a)⊗h₂ = h₁⊗h₂α(a)
                let lhs = h.mul(&d, &beta[i].outer(&one));
                let rhs = h.mul(&d, &one.outer(a));
                if lhs != rhs {
                    return Some(json!({ "elements": [e.name], "identity": "takeuchi", "base": i }));
                }
                let lhs = h.comul(&h.mul(a, &e.x));
                let rhs = h.mul(&a.outer(&one), &d);
                if lhs != rhs {
                    return Some(json!({ "elements": [e.name], "identity": "Δ(α(a)h)", "base": i }));
                }
                let lhs = h.comul(&h.mul(&beta[i], &e.x));
                let rhs = h.mul(&one.outer(&beta[i]), &d);
                if lhs != rhs {
                    return Some(json!({ "elements": [e.name], "identity": "Δ(β(a)h)", "base": i }));
                }
            }
        }
        None
    });
    r.run("algebroid_counit", instance, || {
        for e in &elems {
            let d = h.comul(&e.x);
            let l = h.multiply_out(&d.map_slot(0, |l| h.eps_t(&h.basis(l))));
            if l != e.x {
                return Some(json!({ "elements": [e.name], "identity": "ε_t(h₁)h₂ = h" }));
            }
            let rr = h.multiply_out(&d.flip().map_slot(0, |l| h.antipode_inv(&h.eps_t(&h.basis(l))).expect("antipode inverse exists")));
            if rr != e.x {
                return Some(json!({ "elements": [e.name], "identity": "β(ε_t(h₂))h₁ = h" }));
            }
            for i in 0..n {
                for j in 0..n {
                    let lhs = h.eps_t(&h.mul_all(&[&base[i], &beta[j], &e.x]));
                    let rhs = h.mul_all(&[&base[i], &h.eps_t(&e.x), &base[j]]);
                    if lhs != rhs {
                        return Some(json!({ "elements": [e.name], "identity": "ε_t(α(a)β(b)h) = aε_t(h)b", "pair": [i, j] }));
                    }
                }
            }
        }
        None
    });
    r.run("algebroid_antipode", instance, || {
        for (i, a) in base.iter().enumerate() {
            if &h.antipode(&beta[i]) != a {
                return Some(json!({ "identity": "S∘β = α", "base": i }));
            }
        }
        for e in &elems {
            let d = h.comul(&e.x);
            let lhs = h.multiply_out(&h.antipode_at(&d, 0));
            let rhs = h.antipode_inv(&h.eps_t(&h.antipode(&e.x))).expect("antipode inverse exists");
            if lhs != rhs {
                return Some(json!({ "elements": [e.name], "identity": "S(h₁)h₂ = β(ε_t(S(h)))" }));
            }
            let g = AlgebroidData::section(h, &d);
            let lhs = h.multiply_out(&h.antipode_at(&g, 1));
            if lhs != h.eps_t(&e.x) {
                return Some(json!({ "elements": [e.name], "identity": "h₁S(h₂) = α(ε_t(h))" }));
            }
        }
        None
    });
    Ok(AlgebroidData { base, beta, report: r })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wha::groupoid::GroupoidRules;

    #[test]
    fn groupoid_algebroid_base_is_identities() {
        let g = GroupoidRules::full(3);
        let h = WeakHopfStructure::new("kG", g.clone());
        let a = algebroid_from_wha(&h, &SampleSpec::default(), "kG").unwrap();
        assert!(a.report.all_pass(), "{:?}", a.report.failures());
        assert_eq!(a.base.len(), 3);
        let mut ids: Vec<SparseTensor> = (0..3).map(|x| h.basis(g.identity(x))).collect();
        let mut base = a.base.clone();
        ids.sort_by_key(|t| t.sorted()[0].0.clone());
        base.sort_by_key(|t| t.sorted()[0].0.clone());
        assert_eq!(base, ids);
    }

    #[test]
    fn hopf_algebra_has_base_k() {
        let h = WeakHopfStructure::new("Z4", GroupoidRules::cyclic_group(4));
        let a = algebroid_from_wha(&h, &SampleSpec::default(), "Z4").unwrap();
        assert_eq!(a.base, vec![h.one()]);
        assert!(a.report.all_pass());
    }
}
