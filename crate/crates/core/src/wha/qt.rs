//! Quasitriangular structures (𝓡, 𝓡̄) and the maps ρ₁, ρ₂ : H* → H.

use super::dual::{counit_functional, dual_wha};
use super::sample::{tensor_witness, SampleSpec};
use super::twist::TwistPair;
use super::{embed, to_row, WeakHopfStructure};
use crate::error::Result;
use crate::linalg::Echelon;
use crate::report::Report;
use crate::tensor::{slot, Label, SparseTensor};
use rand::Rng;
use serde_json::json;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QTStructure {
    pub r: SparseTensor,
    pub r_bar: SparseTensor,
}

impl QTStructure {
    /// (Θ̄₂₁𝓡Θ, Θ̄𝓡̄Θ₂₁), the structure carried over to H_Θ.
    pub fn twisted(&self, h: &WeakHopfStructure, tw: &TwistPair) -> QTStructure {
        let tb21 = tw.theta_bar.flip();
        let t21 = tw.theta.flip();
        QTStructure { r: h.mul_all(&[&tb21, &self.r, &tw.theta]), r_bar: h.mul_all(&[&tw.theta_bar, &self.r_bar, &t21]) }
    }
}

pub fn verify_quasitriangular(h: &WeakHopfStructure, qt: &QTStructure, spec: &SampleSpec, instance: &str) -> Report {
    let mut r = Report::new();
    let one = h.one();
    let d1 = h.delta_one();
    let d1op = d1.flip();
    let (rr, rb) = (&qt.r, &qt.r_bar);
    r.run("qt_membership", instance, || {
        let a = h.mul_all(&[&d1op, rr, &d1]);
        if &a != rr {
            return Some(tensor_witness(h, &["Δ^op(1)𝓡Δ(1)", "𝓡"], &a, rr));
        }
        let b = h.mul_all(&[&d1, rb, &d1op]);
        (&b != rb).then(|| tensor_witness(h, &["Δ(1)𝓡̄Δ^op(1)", "𝓡̄"], &b, rb))
    });
    r.run("qt_r_rbar", instance, || {
        let a = h.mul(rr, rb);
        (a != d1op).then(|| tensor_witness(h, &["𝓡𝓡̄", "Δ^op(1)"], &a, &d1op))
    });
    r.run("qt_rbar_r", instance, || {
        let a = h.mul(rb, rr);
        (a != d1).then(|| tensor_witness(h, &["𝓡̄𝓡", "Δ(1)"], &a, &d1))
    });
    r.run("qt_intertwining", instance, || {
        for e in spec.elements(h) {
            let d = h.comul(&e.x);
            let lhs = h.mul(&d.flip(), rr);
            let rhs = h.mul(rr, &d);
            if lhs != rhs {
                return Some(tensor_witness(h, &[&e.name], &lhs, &rhs));
            }
        }
        None
    });
    let r12 = embed(rr, &[0, 1], 3, &one);
    let r13 = embed(rr, &[0, 2], 3, &one);
    let r23 = embed(rr, &[1, 2], 3, &one);
    r.run("qt_coproduct_left", instance, || {
        let lhs = h.comul_at(rr, 1);
        let rhs = h.mul(&r13, &r12);
        (lhs != rhs).then(|| tensor_witness(h, &["(id⊗Δ)𝓡", "𝓡₁₃𝓡₁₂"], &lhs, &rhs))
    });
    r.run("qt_coproduct_right", instance, || {
        let lhs = h.comul_at(rr, 0);
        let rhs = h.mul(&r13, &r23);
        (lhs != rhs).then(|| tensor_witness(h, &["(Δ⊗id)𝓡", "𝓡₁₃𝓡₂₃"], &lhs, &rhs))
    });
    r.run("qybe", instance, || {
        let lhs = h.mul_all(&[&r12, &r13, &r23]);
        let rhs = h.mul_all(&[&r23, &r13, &r12]);
        (lhs != rhs).then(|| tensor_witness(h, &["𝓡₁₂𝓡₁₃𝓡₂₃", "𝓡₂₃𝓡₁₃𝓡₁₂"], &lhs, &rhs))
    });
    r
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RhoKind {
    /// ρ₁(φ) = (id⊗φ)𝓡, an algebra map H* → H^op.
    First,
    /// ρ₂(φ) = (φ⊗id)𝓡, an algebra map H* → H.
    Second,
}

/// The matrix of ρ: `images[c]` is the image of the dual basis vector φ_c.
#[derive(Clone, Debug)]
pub struct RhoMap {
    pub kind: RhoKind,
    pub images: Vec<SparseTensor>,
}

pub fn rho_map(h: &WeakHopfStructure, qt: &QTStructure, kind: RhoKind) -> RhoMap {
    let mut images = vec![SparseTensor::zero(1); h.dim()];
    let (src, dst) = match kind {
        RhoKind::First => (1, 0),
        RhoKind::Second => (0, 1),
    };
    for (k, v) in qt.r.iter() {
        images[slot(k, src) as usize].add_term(slot(k, dst) as u64, v.clone());
    }
    RhoMap { kind, images }
}

impl RhoMap {
    /// ρ of a functional given by its values on the basis.
    pub fn apply(&self, phi: &SparseTensor) -> SparseTensor {
        let mut out = SparseTensor::zero(1);
        for (c, v) in phi.iter() {
            out.add_scaled(&self.images[c as usize], v);
        }
        out
    }

    /// ρ⊗ρ on a rank-2 tensor over the dual basis.
    pub fn apply2(&self, t: &SparseTensor) -> SparseTensor {
        t.map_slot(0, |c| self.images[c as usize].clone()).map_slot(1, |c| self.images[c as usize].clone())
    }

    pub fn rank(&self) -> usize {
        let mut e = Echelon::new();
        for x in &self.images {
            e.insert(&to_row(x));
        }
        e.rank()
    }
}

/// Checks the algebra and coalgebra properties of ρ on sampled pairs of
/// dual basis vectors, plus idempotency of ρ(ε).
pub fn verify_rho(h: &WeakHopfStructure, rho: &RhoMap, spec: &SampleSpec, instance: &str) -> Result<Report> {
    let dual = dual_wha(h, false)?;
    let n = h.dim() as Label;
    let mut r = Report::new();
    let pairs: Vec<(Label, Label)> = if spec.is_full(h) && n <= 64 {
        (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).collect()
    } else {
        let mut rng = spec.rng(5);
        (0..4 * spec.samples).map(|_| (rng.gen_range(0..n), rng.gen_range(0..n))).collect()
    };
    let singles: Vec<Label> = if spec.is_full(h) { (0..n).collect() } else { pairs.iter().map(|p| p.0).collect() };
    r.run("rho_algebra_map", instance, || {
        for &(a, b) in &pairs {
            let prod = dual.mul(&dual.basis(a), &dual.basis(b));
            let lhs = rho.apply(&prod);
            let (x, y) = (&rho.images[a as usize], &rho.images[b as usize]);
            let rhs = match rho.kind {
                RhoKind::First => h.mul(y, x),
                RhoKind::Second => h.mul(x, y),
            };
            if lhs != rhs {
                return Some(json!({ "elements": [dual.label_name(a), dual.label_name(b)] }));
            }
        }
        None
    });
    r.run("rho_coalgebra_map", instance, || {
        for &c in &singles {
            let lhs = h.comul(&rho.images[c as usize]);
            let img = rho.apply2(dual.comul_label(c));
            let rhs = match rho.kind {
                RhoKind::First => img,
                RhoKind::Second => img.flip(),
            };
            if lhs != rhs {
                return Some(json!({ "elements": [dual.label_name(c)] }));
            }
        }
        None
    });
    r.run("rho_counit_idempotent", instance, || {
        let e = rho.apply(&counit_functional(h));
        (h.mul(&e, &e) != e).then(|| json!({ "elements": ["ρ(ε)"] }))
    });
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wha::groupoid::GroupoidRules;

    #[test]
    fn trivial_algebra() {
        let k = WeakHopfStructure::new("k", GroupoidRules::cyclic_group(1));
        let qt = QTStructure { r: k.one_n(2), r_bar: k.one_n(2) };
        assert!(verify_quasitriangular(&k, &qt, &SampleSpec::default(), "k").all_pass());
        let rho = rho_map(&k, &qt, RhoKind::First);
        assert_eq!(rho.images, vec![k.one()]);
        assert!(verify_rho(&k, &rho, &SampleSpec::default(), "k").unwrap().all_pass());
    }

    #[test]
    fn groupoid_delta_op_one() {
        // 𝓡 = 𝓡̄ = Δ(1) works for kG since Δ(1) is symmetric and Δ cocommutative
        let h = WeakHopfStructure::new("kG", GroupoidRules::full(2));
        let qt = QTStructure { r: h.delta_one(), r_bar: h.delta_one() };
        assert!(verify_quasitriangular(&h, &qt, &SampleSpec::default(), "kG").all_pass());
        for kind in [RhoKind::First, RhoKind::Second] {
            let rho = rho_map(&h, &qt, kind);
            assert_eq!(rho.rank(), 2);
            assert_eq!(rho.apply(&counit_functional(&h)), h.one());
            assert!(verify_rho(&h, &rho, &SampleSpec::default(), "kG").unwrap().all_pass());
        }
    }

    #[test]
    fn broken_r_fails_qybe_or_intertwining() {
        let h = WeakHopfStructure::new("Z3", GroupoidRules::cyclic_group(3));
        let r = SparseTensor::basis(&[1, 0]);
        let qt = QTStructure { r: r.clone(), r_bar: SparseTensor::basis(&[2, 0]) };
        let rep = verify_quasitriangular(&h, &qt, &SampleSpec::default(), "Z3");
        assert!(!rep.get("qt_coproduct_left").unwrap().passed());
    }
}
