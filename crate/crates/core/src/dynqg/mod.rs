//! The matrix weak Hopf algebra End(A), the tensor product H = End(A)⊗U,
//! the twist (Θ, Θ̄) and its dynamical refinement F(λ) = 𝒥(λ)Θ, the twisted
//! algebra H_J with its R-matrix, and the dual D_J.

pub mod dual;
pub mod rank;

use crate::abrr::DynamicalElement;
use crate::error::{Error, Result};
use crate::report::Report;
use crate::scalars::Scalar;
use crate::tensor::{Label, SparseTensor};
use crate::torus::TorusGroup;
use crate::uqg::QuantumGroup;
use crate::wha::counital::counital_data;
use crate::wha::product::{combine, ProductRules};
use crate::wha::qt::QTStructure;
use crate::wha::sample::tensor_witness;
use crate::wha::twist::{apply_twist, verify_twist, TwistPair, Twisted};
use crate::wha::{embed, StructureRules, WeakHopfStructure};
use serde_json::json;

/// End_k(A) for A the functions on a torus of order n: matrix units
/// E_{λμ} (label λn + μ), Δ(E_{λμ}) = E_{λμ}⊗E_{λμ}, ε = 1, S(E_{λμ}) = E_{μλ}.
pub struct MatrixRules {
    n: usize,
}

impl MatrixRules {
    pub fn new(n: usize) -> MatrixRules {
        MatrixRules { n }
    }
}

impl StructureRules for MatrixRules {
    fn dim(&self) -> usize {
        self.n * self.n
    }

    fn label_name(&self, l: Label) -> String {
        let n = self.n as Label;
        format!("E{},{}", l / n, l % n)
    }

    fn unit(&self) -> SparseTensor {
        SparseTensor::from_terms(1, (0..self.n).map(|x| ((x * self.n + x) as u64, Scalar::one())))
    }

    fn mul(&self, a: Label, b: Label) -> SparseTensor {
        let n = self.n as Label;
        if a % n == b / n {
            SparseTensor::basis(&[(a / n) * n + b % n])
        } else {
            SparseTensor::zero(1)
        }
    }

    fn comul(&self, a: Label) -> SparseTensor {
        SparseTensor::basis(&[a, a])
    }

    fn counit(&self, _a: Label) -> Scalar {
        Scalar::one()
    }

    fn antipode(&self, a: Label) -> SparseTensor {
        let n = self.n as Label;
        SparseTensor::basis(&[(a % n) * n + a / n])
    }

    fn antipode_inv(&self, a: Label) -> Option<SparseTensor> {
        Some(self.antipode(a))
    }

    fn blocks(&self, a: Label) -> Option<(u32, u32)> {
        let n = self.n as Label;
        Some((a / n, a % n))
    }

    fn generators(&self) -> Vec<Label> {
        if self.n == 1 {
            vec![0]
        } else {
            vec![0, 1, self.n as Label]
        }
    }
}

pub fn end_a_wha(t: &TorusGroup) -> WeakHopfStructure {
    WeakHopfStructure::new(format!("End(A)[{}]", t.size()), MatrixRules::new(t.size()))
}

/// H = End(A)⊗U with helpers for placing U-elements against matrix units.
#[derive(Clone, Debug)]
pub struct DynamicalQG {
    pub u: QuantumGroup,
    pub end_a: WeakHopfStructure,
    pub h: WeakHopfStructure,
    n: usize,
    du: usize,
}

impl DynamicalQG {
    pub fn new(u: &QuantumGroup) -> Result<DynamicalQG> {
        let n = u.torus.size();
        let du = u.dim();
        let dim = n * n * du;
        if dim > u16::MAX as usize {
            return Err(Error::DimensionTooLarge { dim, limit: u16::MAX as usize });
        }
        let end_a = end_a_wha(&u.torus);
        let h = WeakHopfStructure::new(format!("End(A)⊗U[{}]", u.datum.name), ProductRules::new(&end_a, &u.structure));
        Ok(DynamicalQG { u: u.clone(), end_a, h, n, du })
    }

    /// |𝕋|.
    pub fn size(&self) -> usize {
        self.n
    }

    pub fn label(&self, lam: usize, mu: usize, x: Label) -> Label {
        ((lam * self.n + mu) * self.du) as Label + x
    }

    /// (λ, μ, u) of the basis element E_{λμ}⊗u.
    pub fn split(&self, l: Label) -> (usize, usize, Label) {
        let l = l as usize;
        let m = l / self.du;
        (m / self.n, m % self.n, (l % self.du) as Label)
    }

    /// E_{λμ}⊗x.
    pub fn matrix_unit(&self, lam: usize, mu: usize, x: &SparseTensor) -> SparseTensor {
        combine(self.du, &SparseTensor::basis(&[(lam * self.n + mu) as Label]), x)
    }

    /// 1⊗x in every slot.
    pub fn lift(&self, x: &SparseTensor) -> SparseTensor {
        combine(self.du, &self.end_a.one_n(x.rank()), x)
    }

    /// Σ_λ (E_{λλ}⊗…⊗E_{λλ})·f(λ).
    pub fn diagonal(&self, f: impl Fn(usize) -> SparseTensor) -> SparseTensor {
        let mut out: Option<SparseTensor> = None;
        for lam in 0..self.n {
            let x = f(lam);
            let e = SparseTensor::basis(&vec![(lam * self.n + lam) as Label; x.rank()]);
            let term = combine(self.du, &e, &x);
            match &mut out {
                None => out = Some(term),
                Some(o) => o.add_assign(&term),
            }
        }
        out.expect("torus is nonempty")
    }

    /// Σ_λ E_{λλ}X⁽¹⁾(λ)⊗…⊗E_{λλ}X⁽ⁿ⁾(λ).
    pub fn embed_dynamical(&self, x: &DynamicalElement) -> SparseTensor {
        self.diagonal(|lam| x.at(lam).clone())
    }

    /// x = Σ_λ x(λ)E_{λλ} for a U-valued function x.
    pub fn gauge_element(&self, x: &DynamicalElement) -> SparseTensor {
        self.embed_dynamical(x)
    }

    /// Θ = Σ E_{λ,λ+μ}⊗E_{λλ}P_μ and Θ̄ = Σ E_{λ+μ,λ}⊗E_{λλ}P_μ.
    pub fn theta_pair(&self) -> TwistPair {
        let t = &self.u.torus;
        let one = self.u.one();
        let mut theta = SparseTensor::zero(2);
        let mut theta_bar = SparseTensor::zero(2);
        for lam in t.elements() {
            for mu in t.elements() {
                let right = self.matrix_unit(lam, lam, &self.u.p(mu));
                theta.add_assign(&self.matrix_unit(lam, t.add(lam, mu), &one).outer(&right));
                theta_bar.add_assign(&self.matrix_unit(t.add(lam, mu), lam, &one).outer(&right));
            }
        }
        TwistPair { theta, theta_bar }
    }

    /// X(λ+h⁽³⁾)⊗1 for a rank-2 function X.
    pub fn shifted_by_third(&self, x: &DynamicalElement) -> SparseTensor {
        let t = &self.u.torus;
        let mut out = SparseTensor::zero(3);
        for mu in t.elements() {
            let xm = self.diagonal(|lam| x.at(t.add(lam, mu)).clone());
            out.add_assign(&xm.outer(&self.lift(&self.u.p(mu))));
        }
        out
    }

    /// The four commutation identities between the embedded 𝒥^{±1} and the
    /// coproducts of Θ, Θ̄ in H^{⊗3}.
    pub fn verify_j_theta(&self, jj: &DynamicalElement, jj_inv: &DynamicalElement, instance: &str) -> Report {
        let h = &self.h;
        let one = h.one();
        let tw = self.theta_pair();
        let j = self.embed_dynamical(jj);
        let ji = self.embed_dynamical(jj_inv);
        let (t_l, t_r) = (h.comul_at(&tw.theta, 0), h.comul_at(&tw.theta, 1));
        let (tb_l, tb_r) = (h.comul_at(&tw.theta_bar, 0), h.comul_at(&tw.theta_bar, 1));
        let j12 = embed(&j, &[0, 1], 3, &one);
        let j23 = embed(&j, &[1, 2], 3, &one);
        let ji12 = embed(&ji, &[0, 1], 3, &one);
        let ji23 = embed(&ji, &[1, 2], 3, &one);
        let j_sh = self.shifted_by_third(jj);
        let ji_sh = self.shifted_by_third(jj_inv);
        let mut r = Report::new();
        let cases = [
            ("j_theta_left", h.mul(&t_l, &j12), h.mul(&j_sh, &t_l)),
            ("j_theta_right", h.mul(&t_r, &j23), h.mul(&j23, &t_r)),
            ("j_inverse_theta_bar_left", h.mul(&ji12, &tb_l), h.mul(&tb_l, &ji_sh)),
            ("j_inverse_theta_bar_right", h.mul(&ji23, &tb_r), h.mul(&tb_r, &ji23)),
        ];
        for (id, lhs, rhs) in cases {
            r.run(id, instance, || (lhs != rhs).then(|| tensor_witness(h, &[id], &lhs, &rhs)));
        }
        r
    }

    /// (F, F̄) = (𝒥Θ, Θ̄𝒥⁻¹).
    pub fn f_pair(&self, jj: &DynamicalElement, jj_inv: &DynamicalElement) -> TwistPair {
        let tw = self.theta_pair();
        let theta = self.h.mul(&self.embed_dynamical(jj), &tw.theta);
        let theta_bar = self.h.mul(&tw.theta_bar, &self.embed_dynamical(jj_inv));
        TwistPair { theta, theta_bar }
    }

    /// H_J = H twisted by (𝒥Θ, Θ̄𝒥⁻¹), after checking the twist axioms.
    pub fn build_hj(&self, jj: &DynamicalElement, jj_inv: &DynamicalElement, name: &str) -> Result<Twisted> {
        apply_twist(&self.h, &self.f_pair(jj, jj_inv), name)
    }

    /// v = Σ E_{λ+μ,λ}(S(𝒥⁽¹⁾)𝒥⁽²⁾)(λ)P_μ.
    pub fn v_formula(&self, jj: &DynamicalElement) -> SparseTensor {
        let (t, us) = (&self.u.torus, &self.u.structure);
        let mut v = SparseTensor::zero(1);
        for lam in t.elements() {
            let sj = us.multiply_out(&us.antipode_at(jj.at(lam), 0));
            for mu in t.elements() {
                v.add_assign(&self.matrix_unit(t.add(lam, mu), lam, &us.mul(&sj, &self.u.p(mu))));
            }
        }
        v
    }

    /// Twist axioms of (Θ, Θ̄) and (F, F̄), ΘΘ̄ = Δ(1), the v formula, and the
    /// dimension of the twisted target subalgebra.
    pub fn verify_twists(&self, jj: &DynamicalElement, jj_inv: &DynamicalElement, hj: &Twisted, instance: &str) -> Report {
        let mut r = Report::new();
        let tw = self.theta_pair();
        for c in verify_twist(&self.h, &tw, instance).checks {
            r.record(&format!("theta_{}", c.check), instance, c.witness.clone(), c.millis);
        }
        for c in verify_twist(&self.h, &hj.pair, instance).checks {
            r.record(&format!("f_{}", c.check), instance, c.witness.clone(), c.millis);
        }
        r.extend(self.verify_j_theta(jj, jj_inv, instance));
        r.run("v_formula", instance, || {
            let v = self.v_formula(jj);
            (v != hj.v).then(|| tensor_witness(&self.h, &["Σ E_{λ+μ,λ}(S(𝒥⁽¹⁾)𝒥⁽²⁾)(λ)P_μ", "m(S⊗id)F"], &v, &hj.v))
        });
        r.run("twisted_target_dimension", instance, || {
            let d = counital_data(&hj.algebra).target_basis.len();
            (d != self.n).then(|| json!({ "dim": d, "expected": self.n }))
        });
        r
    }

    /// The quasitriangular structure of H: Δ(1) of End(A) against 𝓡, 𝓡̄ of U.
    pub fn base_r(&self) -> Result<QTStructure> {
        let qt = self.u.universal_r()?;
        let d1 = self.end_a.delta_one();
        Ok(QTStructure { r: combine(self.du, &d1, &qt.r), r_bar: combine(self.du, &d1, &qt.r_bar) })
    }

    /// 𝓡(λ) = F̄₂₁𝓡F = Θ̄₂₁𝒥₂₁⁻¹𝓡𝒥Θ and 𝓡̄(λ) = F̄𝓡̄F₂₁ = Θ̄𝒥⁻¹𝓡̄𝒥₂₁Θ₂₁.
    pub fn twisted_r(&self, jj: &DynamicalElement, jj_inv: &DynamicalElement) -> Result<QTStructure> {
        Ok(self.base_r()?.twisted(&self.h, &self.f_pair(jj, jj_inv)))
    }

    /// 𝓡^J(λ) = 𝒥₂₁⁻¹(λ)𝓡𝒥(λ) in U⊗U.
    pub fn r_j(&self, jj: &DynamicalElement, jj_inv: &DynamicalElement, lam: usize) -> Result<SparseTensor> {
        let r = self.u.universal_r()?.r;
        Ok(self.u.structure.mul_all(&[&jj_inv.at(lam).flip(), &r, jj.at(lam)]))
    }

    /// Σ_{λμν} E_{λ,λ+ν}P_μ𝓡^{J(1)}(λ)⊗E_{λ+μ,λ}𝓡^{J(2)}(λ)P_ν.
    pub fn twisted_r_explicit(&self, jj: &DynamicalElement, jj_inv: &DynamicalElement) -> Result<SparseTensor> {
        let (t, us) = (&self.u.torus, &self.u.structure);
        let one = self.u.one();
        let mut out = SparseTensor::zero(2);
        for lam in t.elements() {
            let rj = self.r_j(jj, jj_inv, lam)?;
            for mu in t.elements() {
                let left = us.mul(&self.u.p(mu).outer(&one), &rj);
                for nu in t.elements() {
                    let block = us.mul(&left, &one.outer(&self.u.p(nu)));
                    let e = SparseTensor::basis(&[(lam * self.n + t.add(lam, nu)) as Label, (t.add(lam, mu) * self.n + lam) as Label]);
                    out.add_assign(&combine(self.du, &e, &block));
                }
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abrr::{curly_j, invert_dynamical, solve_abrr, SolverConfig};
    use crate::scalars::LambdaParam;
    use crate::uqg::{build_uq, CartanDatum};
    use crate::wha::groupoid::GroupoidRules;
    use crate::wha::morphism::verify_morphism;
    use crate::wha::qt::verify_quasitriangular;
    use crate::wha::sample::SampleSpec;
    use crate::wha::verify::verify_axioms;

    #[test]
    fn end_a_is_the_pair_groupoid() {
        let t = TorusGroup::new(vec![vec![2]], 3).unwrap();
        let e = end_a_wha(&t);
        assert_eq!(e.dim(), 9);
        assert!(verify_axioms(&e, &SampleSpec::default(), "End(A)").report.all_pass());
        let d1: SparseTensor = SparseTensor::from_terms(2, (0..3).map(|x| (crate::tensor::pack(&[4 * x, 4 * x]), Scalar::one())));
        assert_eq!(e.delta_one(), d1);
        assert_eq!(e.eps_t(&e.basis(5)), e.basis(4));
        let g = WeakHopfStructure::new("pair", GroupoidRules::full(3));
        let id = |l: Label| g.basis(l);
        assert!(verify_morphism(&e, &g, &id, &SampleSpec::default(), "End(A)→kG").all_pass());
        let counital = counital_data(&e);
        assert_eq!(counital.target_basis.len(), 3);
    }

    fn sl2_three() -> (DynamicalQG, DynamicalElement, DynamicalElement) {
        let u = build_uq(&CartanDatum::a1(), 3).unwrap();
        let j = solve_abrr(&u, &SolverConfig::plain(LambdaParam::constant(1, 2))).unwrap();
        let jj = curly_j(&u, &j);
        let jj_inv = invert_dynamical(&u, &jj).unwrap();
        (DynamicalQG::new(&u).unwrap(), jj, jj_inv)
    }

    #[test]
    fn trivial_twist_gives_theta_twist() {
        let (d, _, _) = sl2_three();
        assert_eq!(d.h.dim(), 243);
        let one = DynamicalElement::constant(3, d.u.one().outer(&d.u.one()));
        assert_eq!(d.embed_dynamical(&one), combine(d.u.dim(), &d.end_a.delta_one(), &d.u.one().outer(&d.u.one())));
        let tw = d.theta_pair();
        assert_eq!(d.f_pair(&one, &one), tw);
        assert_eq!(d.h.mul(&tw.theta, &tw.theta_bar), d.h.delta_one());
        assert_eq!(d.h.counit_at(&tw.theta, 0), d.h.one());
    }

    #[test]
    fn j_theta_identities_and_twist() {
        let (d, jj, jj_inv) = sl2_three();
        assert!(d.verify_j_theta(&jj, &jj_inv, "sl2").all_pass());
        let hj = d.build_hj(&jj, &jj_inv, "H_J").unwrap();
        let rep = d.verify_twists(&jj, &jj_inv, &hj, "sl2");
        assert!(rep.all_pass(), "{:?}", rep.failures());
    }

    #[test]
    fn twisted_r_matches_explicit_sum() {
        let (d, jj, jj_inv) = sl2_three();
        let qt = d.twisted_r(&jj, &jj_inv).unwrap();
        assert_eq!(qt.r, d.twisted_r_explicit(&jj, &jj_inv).unwrap());
        let base = d.base_r().unwrap();
        assert!(verify_quasitriangular(&d.h, &base, &SampleSpec::default(), "H").all_pass());
    }
}
