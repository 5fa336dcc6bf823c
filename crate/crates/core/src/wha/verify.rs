//! The weak Hopf algebra axiom suite.

use super::sample::{tensor_witness, witness, SampleSpec, Sampled};
use super::{LinearMapSolver, WeakHopfStructure};
use crate::report::Report;
use crate::scalars::Scalar;
use crate::tensor::{slot, Label, SparseTensor};
use serde_json::json;

#[derive(Clone, Debug)]
pub struct AxiomReport {
    pub report: Report,
    pub is_ordinary_hopf: bool,
    /// Rank test of S on the full basis; None when above the threshold.
    pub antipode_invertible: Option<bool>,
}

fn check_each(report: &mut Report, id: &str, instance: &str, elems: &[Sampled], mut f: impl FnMut(&Sampled) -> Option<(SparseTensor, SparseTensor)>) {
    report.run(id, instance, || {
        for e in elems {
            if let Some((l, r)) = f(e) {
                if l != r {
                    return Some(json!({ "elements": [e.name], "lhs_terms": l.len(), "rhs_terms": r.len() }));
                }
            }
        }
        None
    });
}

/// S(h₁)h₂S(h₃).
pub fn s_id_s(h: &WeakHopfStructure, x: &SparseTensor) -> SparseTensor {
    let d3 = h.comul_at(&h.comul(x), 0);
    let s = h.antipode_at(&h.antipode_at(&d3, 0), 2);
    h.mul_slots(&h.mul_slots(&s, 0), 0)
}

pub fn verify_axioms(h: &WeakHopfStructure, spec: &SampleSpec, instance: &str) -> AxiomReport {
    let mut report = Report::new();
    let elems = spec.elements(h);
    let one = h.one();

    check_each(&mut report, "unit", instance, &elems, |e| {
        let l = h.mul(&one, &e.x);
        let r = h.mul(&e.x, &one);
        if l != e.x {
            return Some((l, e.x.clone()));
        }
        Some((r, e.x.clone()))
    });

    let triples = spec.triples(h);
    report.run("associativity", instance, || {
        for t in &triples {
            let [a, b, c] = t.map(|l| h.basis(l));
            let l = h.mul(&h.mul(&a, &b), &c);
            let r = h.mul(&a, &h.mul(&b, &c));
            if l != r {
                return Some(witness(&h.names(t).iter().map(|s| s.as_str()).collect::<Vec<_>>()));
            }
        }
        None
    });

    check_each(&mut report, "coassociativity", instance, &elems, |e| {
        let d = h.comul(&e.x);
        Some((h.comul_at(&d, 0), h.comul_at(&d, 1)))
    });

    check_each(&mut report, "counit", instance, &elems, |e| {
        let d = h.comul(&e.x);
        let l = h.counit_at(&d, 0);
        if l != e.x {
            return Some((l, e.x.clone()));
        }
        Some((h.counit_at(&d, 1), e.x.clone()))
    });

    report.run("delta_multiplicative", instance, || {
        let deltas: Vec<SparseTensor> = elems.iter().map(|e| h.comul(&e.x)).collect();
        for (i, x) in elems.iter().enumerate() {
            for (j, y) in elems.iter().enumerate() {
                let l = h.comul(&h.mul(&x.x, &y.x));
                let r = h.mul(&deltas[i], &deltas[j]);
                if l != r {
                    return Some(tensor_witness(h, &[&x.name, &y.name], &l, &r));
                }
            }
        }
        None
    });

    report.run("eps_m", instance, || {
        let eps_pair = |x: Label, y: Label| -> Scalar {
            h.mul_labels(x, y).iter().fold(Scalar::zero(), |acc, (l, c)| acc.add(&(c * &h.counit_label(*l))))
        };
        for t in &triples {
            let [a, b, c] = *t;
            let abc = h.mul(&h.mul(&h.basis(a), &h.basis(b)), &h.basis(c));
            let lhs = h.counit(&abc);
            let mut m1 = Scalar::zero();
            let mut m2 = Scalar::zero();
            for (k, v) in h.comul_label(b).iter() {
                let (b1, b2) = (slot(k, 0), slot(k, 1));
                m1 = m1.add(&(v * &eps_pair(a, b1).mul(&eps_pair(b2, c))));
                m2 = m2.add(&(v * &eps_pair(a, b2).mul(&eps_pair(b1, c))));
            }
            if lhs != m1 || lhs != m2 {
                return Some(witness(&h.names(t).iter().map(|s| s.as_str()).collect::<Vec<_>>()));
            }
        }
        None
    });

    report.run("delta_one", instance, || {
        let d1 = h.delta_one();
        let lhs = h.comul_at(&d1, 0);
        let a = d1.outer(&one);
        let b = one.outer(&d1);
        let r1 = h.mul(&a, &b);
        let r2 = h.mul(&b, &a);
        if lhs != r1 {
            return Some(tensor_witness(h, &["(Δ⊗id)Δ(1)", "(Δ(1)⊗1)(1⊗Δ(1))"], &lhs, &r1));
        }
        if lhs != r2 {
            return Some(tensor_witness(h, &["(Δ⊗id)Δ(1)", "(1⊗Δ(1))(Δ(1)⊗1)"], &lhs, &r2));
        }
        None
    });

    check_each(&mut report, "antipode_eps_t", instance, &elems, |e| {
        let d = h.antipode_at(&h.comul(&e.x), 1);
        Some((h.multiply_out(&d), h.eps_t(&e.x)))
    });

    check_each(&mut report, "antipode_eps_s", instance, &elems, |e| {
        let d = h.antipode_at(&h.comul(&e.x), 0);
        Some((h.multiply_out(&d), h.eps_s(&e.x)))
    });

    check_each(&mut report, "antipode_s_id_s", instance, &elems, |e| Some((s_id_s(h, &e.x), h.antipode(&e.x))));

    let antipode_invertible = if spec.is_full(h) {
        let solver = LinearMapSolver::new((0..h.dim() as Label).map(|l| h.antipode_label(l).clone()).collect());
        let ok = solver.rank() == h.dim();
        report.run("antipode_bijective", instance, || (!ok).then(|| json!({ "rank": solver.rank(), "dim": h.dim() })));
        Some(ok)
    } else {
        None
    };

    if h.antipode_inv_label(0).is_some() {
        check_each(&mut report, "antipode_inverse", instance, &elems, |e| {
            let s = h.antipode(&e.x);
            let back = h.antipode_inv(&s).expect("rule present");
            if back != e.x {
                return Some((back, e.x.clone()));
            }
            let si = h.antipode_inv(&e.x).expect("rule present");
            Some((h.antipode(&si), e.x.clone()))
        });
    }

    AxiomReport { report, is_ordinary_hopf: h.is_ordinary_hopf(), antipode_invertible }
}
