//! Twists (Θ, Θ̄), twisted weak Hopf algebras H_Θ and gauge transformations.

use super::morphism::verify_morphism;
use super::sample::{tensor_witness, SampleSpec};
use super::{embed, StructureRules, WeakHopfStructure};
use crate::error::{Error, Result};
use crate::report::Report;
use crate::scalars::Scalar;
use crate::tensor::{Label, SparseTensor};
use serde_json::json;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwistPair {
    pub theta: SparseTensor,
    pub theta_bar: SparseTensor,
}

impl TwistPair {
    /// Θ = Θ̄ = Δ(1).
    pub fn trivial(h: &WeakHopfStructure) -> TwistPair {
        TwistPair { theta: h.delta_one(), theta_bar: h.delta_one() }
    }
}

/// The five twist axioms plus the membership conditions.
pub fn verify_twist(h: &WeakHopfStructure, tw: &TwistPair, instance: &str) -> Report {
    let mut r = Report::new();
    let (t, tb) = (&tw.theta, &tw.theta_bar);
    let d1 = h.delta_one();
    let one = h.one();
    let one2 = h.one_n(2);
    r.run("twist_membership", instance, || {
        let a = h.mul(&d1, t);
        if &a != t {
            return Some(tensor_witness(h, &["Δ(1)Θ", "Θ"], &a, t));
        }
        let b = h.mul(tb, &d1);
        if &b != tb {
            return Some(tensor_witness(h, &["Θ̄Δ(1)", "Θ̄"], &b, tb));
        }
        let c = h.mul(t, tb);
        if c != d1 {
            return Some(tensor_witness(h, &["ΘΘ̄", "Δ(1)"], &c, &d1));
        }
        None
    });
    r.run("twist_eps", instance, || {
        for (name, x, i) in [("(ε⊗id)Θ", t, 0), ("(id⊗ε)Θ", t, 1), ("(ε⊗id)Θ̄", tb, 0), ("(id⊗ε)Θ̄", tb, 1)] {
            let v = h.counit_at(x, i);
            if v != one {
                return Some(tensor_witness(h, &[name, "1"], &v, &one));
            }
        }
        None
    });
    let t12 = embed(t, &[0, 1], 3, &one);
    let t23 = embed(t, &[1, 2], 3, &one);
    let tb12 = embed(tb, &[0, 1], 3, &one);
    let tb23 = embed(tb, &[1, 2], 3, &one);
    let dt_l = h.comul_at(t, 0);
    let dt_r = h.comul_at(t, 1);
    let dtb_l = h.comul_at(tb, 0);
    let dtb_r = h.comul_at(tb, 1);
    let _ = one2;
    let mut identity = |id: &str, lhs: SparseTensor, rhs: SparseTensor| {
        r.run(id, instance, || (lhs != rhs).then(|| tensor_witness(h, &[id], &lhs, &rhs)));
    };
    identity("twist_pp", h.mul(&dt_l, &t12), h.mul(&dt_r, &t23));
    identity("twist_mm", h.mul(&tb12, &dtb_l), h.mul(&tb23, &dtb_r));
    identity("twist_pm", h.mul(&dtb_l, &dt_r), h.mul(&t12, &tb23));
    identity("twist_mp", h.mul(&dtb_r, &dt_l), h.mul(&t23, &tb12));
    r
}

/// Structure rules of H_Θ: same algebra and counit, Δ_Θ(h) = Θ̄Δ(h)Θ,
/// S_Θ(h) = v⁻¹S(h)v.
pub struct TwistedRules {
    base: WeakHopfStructure,
    pair: TwistPair,
    v: SparseTensor,
    v_inv: SparseTensor,
}

impl TwistedRules {
    pub fn base(&self) -> &WeakHopfStructure {
        &self.base
    }
}

impl StructureRules for TwistedRules {
    fn dim(&self) -> usize {
        self.base.dim()
    }
    fn label_name(&self, l: Label) -> String {
        self.base.label_name(l)
    }
    fn unit(&self) -> SparseTensor {
        self.base.one()
    }
    fn mul(&self, a: Label, b: Label) -> SparseTensor {
        SparseTensor::from_terms(1, self.base.mul_labels(a, b).iter().map(|(l, c)| (*l as u64, c.clone())))
    }
    fn comul(&self, a: Label) -> SparseTensor {
        let d = self.base.comul_label(a);
        self.base.mul(&self.base.mul(&self.pair.theta_bar, d), &self.pair.theta)
    }
    fn counit(&self, a: Label) -> Scalar {
        self.base.counit_label(a)
    }
    fn antipode(&self, a: Label) -> SparseTensor {
        self.base.mul_all(&[&self.v_inv, self.base.antipode_label(a), &self.v])
    }
    fn antipode_inv(&self, a: Label) -> Option<SparseTensor> {
        self.base.antipode_inv_label(0)?;
        let conj = self.base.mul_all(&[&self.v, &self.base.basis(a), &self.v_inv]);
        self.base.antipode_inv(&conj).ok()
    }
    fn blocks(&self, a: Label) -> Option<(u32, u32)> {
        self.base.block_of(a)
    }
    fn generators(&self) -> Vec<Label> {
        self.base.generators()
    }
}

/// H_Θ together with v = m(S⊗id)Θ and v⁻¹ = Θ̄^{(1)}S(Θ̄^{(2)}).
#[derive(Clone, Debug)]
pub struct Twisted {
    pub algebra: WeakHopfStructure,
    pub pair: TwistPair,
    pub v: SparseTensor,
    pub v_inv: SparseTensor,
}

pub fn twist_v(h: &WeakHopfStructure, tw: &TwistPair) -> (SparseTensor, SparseTensor) {
    let v = h.multiply_out(&h.antipode_at(&tw.theta, 0));
    let v_inv = h.multiply_out(&h.antipode_at(&tw.theta_bar, 1));
    (v, v_inv)
}

/// Builds H_Θ after checking the twist axioms and v·v⁻¹ = v⁻¹·v = 1.
pub fn apply_twist(h: &WeakHopfStructure, tw: &TwistPair, name: &str) -> Result<Twisted> {
    let rep = verify_twist(h, tw, name);
    if let Some(f) = rep.failures().first() {
        return Err(Error::TwistInvalid(f.check.clone()));
    }
    apply_twist_unchecked(h, tw, name)
}

/// Builds H_Θ checking only that v is invertible; for callers that have
/// verified the twist separately.
pub fn apply_twist_unchecked(h: &WeakHopfStructure, tw: &TwistPair, name: &str) -> Result<Twisted> {
    let (v, v_inv) = twist_v(h, tw);
    let one = h.one();
    if h.mul(&v, &v_inv) != one || h.mul(&v_inv, &v) != one {
        return Err(Error::TwistInvalid("v = m(S⊗id)Θ is not inverted by Θ̄⁽¹⁾S(Θ̄⁽²⁾)".into()));
    }
    let rules = TwistedRules { base: h.clone(), pair: tw.clone(), v: v.clone(), v_inv: v_inv.clone() };
    Ok(Twisted { algebra: WeakHopfStructure::new(name, rules), pair: tw.clone(), v, v_inv })
}

/// (ε_t)_Θ(h) = ε(Θ^{(1)}h)Θ^{(2)}.
pub fn twisted_eps_t(h: &WeakHopfStructure, tw: &TwistPair, x: &SparseTensor) -> SparseTensor {
    h.counit_at(&h.mul(&tw.theta, &x.outer(&h.one())), 0)
}

/// (ε_s)_Θ(h) = Θ̄^{(1)}ε(hΘ̄^{(2)}).
pub fn twisted_eps_s(h: &WeakHopfStructure, tw: &TwistPair, x: &SparseTensor) -> SparseTensor {
    h.counit_at(&h.mul(&h.one().outer(x), &tw.theta_bar), 1)
}

/// Compares the closed formulas for the twisted counital maps with the
/// counital maps computed from Δ_Θ.
pub fn verify_twisted_counital(h: &WeakHopfStructure, tw: &Twisted, spec: &SampleSpec, instance: &str) -> Report {
    let mut r = Report::new();
    let elems = spec.elements(h);
    r.run("twisted_counital_maps", instance, || {
        for e in &elems {
            let a = twisted_eps_t(h, &tw.pair, &e.x);
            let b = tw.algebra.eps_t(&e.x);
            if a != b {
                return Some(json!({ "elements": [e.name], "map": "eps_t" }));
            }
            let a = twisted_eps_s(h, &tw.pair, &e.x);
            let b = tw.algebra.eps_s(&e.x);
            if a != b {
                return Some(json!({ "elements": [e.name], "map": "eps_s" }));
            }
        }
        None
    });
    r
}

/// Θ^x = Δ(x⁻¹)Θ(x⊗x), Θ̄^x = (x⁻¹⊗x⁻¹)Θ̄Δ(x), for x invertible with
/// ε_t(x) = ε_s(x) = 1.
pub fn gauge_transform(h: &WeakHopfStructure, tw: &TwistPair, x: &SparseTensor, x_inv: Option<&SparseTensor>) -> Result<(TwistPair, SparseTensor)> {
    let one = h.one();
    if h.eps_t(x) != one {
        return Err(Error::BadGauge("ε_t(x) ≠ 1".into()));
    }
    if h.eps_s(x) != one {
        return Err(Error::BadGauge("ε_s(x) ≠ 1".into()));
    }
    let x_inv = match x_inv {
        Some(y) => {
            if &h.mul(x, y) != &one || &h.mul(y, x) != &one {
                return Err(Error::BadGauge("supplied inverse is wrong".into()));
            }
            y.clone()
        }
        None => h.inverse(x).map_err(|e| Error::BadGauge(e.to_string()))?,
    };
    let xx = x.outer(x);
    let xixi = x_inv.outer(&x_inv);
    let theta = h.mul_all(&[&h.comul(&x_inv), &tw.theta, &xx]);
    let theta_bar = h.mul_all(&[&xixi, &tw.theta_bar, &h.comul(x)]);
    Ok((TwistPair { theta, theta_bar }, x_inv))
}

/// Checks that h ↦ x⁻¹hx is a weak Hopf morphism H_Θ → H_{Θ^x}.
pub fn verify_gauge_morphism(from: &WeakHopfStructure, to: &WeakHopfStructure, base: &WeakHopfStructure, x: &SparseTensor, x_inv: &SparseTensor, spec: &SampleSpec, instance: &str) -> Report {
    let conj = |l: Label| base.mul_all(&[x_inv, &base.basis(l), x]);
    verify_morphism(from, to, &conj, spec, instance)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wha::groupoid::GroupoidRules;
    use crate::wha::verify::verify_axioms;

    #[test]
    fn trivial_twist_leaves_structure() {
        let h = WeakHopfStructure::new("kG", GroupoidRules::full(3));
        let tw = TwistPair::trivial(&h);
        assert!(verify_twist(&h, &tw, "kG").all_pass());
        let t = apply_twist(&h, &tw, "kG_triv").unwrap();
        for l in 0..9 {
            assert_eq!(t.algebra.comul_label(l), h.comul_label(l));
            assert_eq!(t.algebra.antipode_label(l), h.antipode_label(l));
        }
        assert!(verify_axioms(&t.algebra, &SampleSpec::default(), "kG_triv").report.all_pass());
    }

    #[test]
    fn perturbed_twist_fails() {
        let h = WeakHopfStructure::new("kG", GroupoidRules::full(2));
        let mut tw = TwistPair::trivial(&h);
        tw.theta.add_term(crate::tensor::pack(&[0, 0]), Scalar::one());
        let r = verify_twist(&h, &tw, "kG");
        assert!(!r.all_pass());
        assert!(matches!(apply_twist(&h, &tw, "x"), Err(Error::TwistInvalid(_))));
    }

    #[test]
    fn gauge_preconditions() {
        let h = WeakHopfStructure::new("kG", GroupoidRules::full(2));
        let tw = TwistPair::trivial(&h);
        let (same, _) = gauge_transform(&h, &tw, &h.one(), None).unwrap();
        assert_eq!(same, tw);
        // a single identity arrow has ε_t ≠ 1
        let bad = h.basis(0);
        assert!(matches!(gauge_transform(&h, &tw, &bad, None), Err(Error::BadGauge(_))));
    }
}
