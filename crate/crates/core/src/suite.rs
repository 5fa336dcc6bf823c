//! Verification suites over a built instance, shared by the CLI and the
//! acceptance tests.

use crate::abrr::bd::{matrix_44_check, verify_triple, BDTriple};
use crate::abrr::{
    abrr_certificates, curly_j, gauge_dynamical, invert_dynamical, random_gauge, sl2_oracle, solve_abrr, verify_dynamical_twist, verify_shifted_twist, DynamicalElement,
    ShiftedTwistOptions, SolverConfig,
};
use crate::dynqg::dual::{verify_duality, verify_self_duality, DualDJ, GradingReading};
use crate::dynqg::rank::{rank_and_iso, RankReport};
use crate::dynqg::{end_a_wha, DynamicalQG};
use crate::error::{Error, Result};
use crate::report::Report;
use crate::scalars::{CyclotomicField, LambdaParam, Scalar};
use crate::tensor::Label;
use crate::torus::{omega, omega_by_sum, ScalarDump, TorusBasis, TorusElement, TorusGroup};
use crate::uqg::{build_uq, CartanDatum, Letter, QuantumGroup};
use crate::wha::algebroid::algebroid_from_wha;
use crate::wha::dual::dual_wha;
use crate::wha::groupoid::{Arrow, GroupoidRules};
use crate::wha::qt::{rho_map, verify_quasitriangular, verify_rho, QTStructure, RhoKind};
use crate::wha::sample::SampleSpec;
use crate::wha::twist::{apply_twist, gauge_transform, verify_gauge_morphism, verify_twisted_counital, Twisted};
use crate::wha::verify::verify_axioms;
use crate::wha::WeakHopfStructure;
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;
use std::fmt;
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Suite {
    Axioms,
    Twist,
    Abrr,
    Duality,
    Rank,
    Bd,
}

impl Suite {
    pub const ALL: [Suite; 6] = [Suite::Axioms, Suite::Twist, Suite::Abrr, Suite::Duality, Suite::Rank, Suite::Bd];

    /// Suites that need the quantum group itself, not only its torus.
    pub fn needs_uq(self) -> bool {
        self != Suite::Bd
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Suite::Axioms => "axioms",
            Suite::Twist => "twist",
            Suite::Abrr => "abrr",
            Suite::Duality => "duality",
            Suite::Rank => "rank",
            Suite::Bd => "bd",
        };
        f.write_str(s)
    }
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Suite> {
        Suite::ALL.into_iter().find(|x| x.to_string() == s).ok_or_else(|| Error::InvalidSpec(format!("unknown suite {s}")))
    }
}

/// Everything built from (A1, ℓ, Λ): J, 𝒥, H_J and 𝓡(λ).
pub struct Pipeline {
    pub name: String,
    pub cfg: SolverConfig,
    pub j: DynamicalElement,
    pub jj: DynamicalElement,
    pub jj_inv: DynamicalElement,
    pub dq: DynamicalQG,
    pub hj: Twisted,
    pub qt: QTStructure,
}

impl Pipeline {
    pub fn build(u: &QuantumGroup, cfg: SolverConfig) -> Result<Pipeline> {
        let name = format!("{}/ell={}", u.datum.name, u.ell());
        let j = solve_abrr(u, &cfg)?;
        let jj = curly_j(u, &j);
        let jj_inv = invert_dynamical(u, &jj)?;
        let dq = DynamicalQG::new(u)?;
        let hj = dq.build_hj(&jj, &jj_inv, "H_J")?;
        let qt = dq.twisted_r(&jj, &jj_inv)?;
        Ok(Pipeline { name, cfg, j, jj, jj_inv, dq, hj, qt })
    }

    pub fn u(&self) -> &QuantumGroup {
        &self.dq.u
    }
}

/// J against the truncated closed form (sl2 only), the ABRR fixed-point
/// certificates, the shifted-twist identities and the dynamical twist
/// identities of 𝒥.
pub fn abrr_suite(p: &Pipeline, seed: u64) -> Result<Report> {
    let u = p.u();
    let mut r = Report::new();
    if p.cfg.triple.is_none() && u.datum.rank() == 1 {
        r.run("oracle_equivalence", &p.name, || {
            for lam in u.torus.elements() {
                match sl2_oracle(u, &p.cfg.lambda, lam) {
                    Ok(x) if x == p.j.values[lam] => {}
                    Ok(_) => return Some(json!({ "lambda": u.torus.vector(lam) })),
                    Err(e) => return Some(json!({ "lambda": u.torus.vector(lam), "error": e.to_string() })),
                }
            }
            None
        });
    }
    r.extend(abrr_certificates(u, &p.cfg, &p.j, &p.name)?);
    let opts = ShiftedTwistOptions { seed, ..ShiftedTwistOptions::default() };
    r.extend(verify_shifted_twist(u, &p.cfg, &p.j, &opts, &p.name)?);
    r.extend(verify_dynamical_twist(u, &p.jj, Some(&p.jj_inv), &p.name));
    Ok(r)
}

/// Θ and F = 𝒥Θ as twists of H, the J-Θ identities, v, quasitriangularity
/// of 𝓡(λ), and gauge robustness.
pub fn twist_suite(p: &Pipeline, spec: &SampleSpec) -> Result<Report> {
    let mut r = p.dq.verify_twists(&p.jj, &p.jj_inv, &p.hj, &p.name);
    r.extend(verify_quasitriangular(&p.hj.algebra, &p.qt, spec, &p.name));
    r.extend(gauge_suite(p, spec, 10)?);
    Ok(r)
}

/// For `count` seeded gauges x(λ): 𝒥^x is a dynamical twist, F^x computed in H
/// equals F built from 𝒥^x, and conjugation by x is a morphism H_J → H_{J^x}.
pub fn gauge_suite(p: &Pipeline, spec: &SampleSpec, count: usize) -> Result<Report> {
    let (u, dq) = (p.u(), &p.dq);
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let f = dq.f_pair(&p.jj, &p.jj_inv);
    let mut r = Report::new();
    for i in 0..count {
        let inst = format!("{}/gauge{i}", p.name);
        let (x, x_inv) = random_gauge(u, &mut rng)?;
        let (g, g_inv) = gauge_dynamical(u, &p.jj, &p.jj_inv, &x, &x_inv)?;
        r.extend(verify_dynamical_twist(u, &g, Some(&g_inv), &inst));
        let (xh, xh_inv) = (dq.gauge_element(&x), dq.gauge_element(&x_inv));
        let (fx, _) = gauge_transform(&dq.h, &f, &xh, Some(&xh_inv))?;
        r.run("gauge_twist_matches", &inst, || (fx != dq.f_pair(&g, &g_inv)).then(|| json!({})));
        let hx = apply_twist(&dq.h, &fx, "H_J^x")?;
        r.extend(verify_gauge_morphism(&p.hj.algebra, &hx.algebra, &dq.h, &xh, &xh_inv, spec, &inst));
    }
    Ok(r)
}

/// Two objects with isotropy ℤ/2: arrows (t, s, k), composed by adding k.
pub fn fixture_groupoid() -> GroupoidRules {
    let arrows: Vec<(usize, usize, usize)> = (0..2).flat_map(|t| (0..2).flat_map(move |s| (0..2).map(move |k| (t, s, k)))).collect();
    let named = arrows.iter().map(|&(t, s, k)| Arrow { name: format!("g{t}{s}_{k}"), source: s, target: t }).collect();
    let index = |a: (usize, usize, usize)| arrows.iter().position(|&b| b == a);
    let table = arrows.iter().map(|&(t, s, k)| arrows.iter().map(|&(t2, s2, k2)| if s == t2 { index((t, s2, (k + k2) % 2)) } else { None }).collect()).collect();
    GroupoidRules::from_table(2, named, table).expect("valid groupoid")
}

/// kG and (kG)* for [`fixture_groupoid`], End(A), and ε_t(g) = gg⁻¹.
pub fn fixture_suite(t: &TorusGroup) -> Result<Report> {
    let rules = fixture_groupoid();
    let kg = WeakHopfStructure::new("kG", rules.clone());
    let spec = SampleSpec::default();
    let mut r = verify_axioms(&kg, &spec, "kG").report;
    r.run("groupoid_eps_t", "kG", || {
        (0..kg.dim() as Label)
            .find(|&g| kg.eps_t(&kg.basis(g)) != kg.mul(&kg.basis(g), &kg.basis(rules.inverse(g))))
            .map(|g| json!({ "element": kg.label_name(g) }))
    });
    r.extend(verify_axioms(&dual_wha(&kg, false)?, &spec, "kG*").report);
    r.extend(verify_axioms(&end_a_wha(t), &spec, "End(A)").report);
    Ok(r)
}

/// H_J against every weak Hopf axiom, its twisted counital maps, the Hopf
/// algebroid built from it, plus the groupoid fixtures and property checks.
pub fn axioms_suite(p: &Pipeline, spec: &SampleSpec) -> Result<Report> {
    let h = &p.hj.algebra;
    let mut r = verify_axioms(h, spec, &p.name).report;
    r.extend(verify_twisted_counital(&p.dq.h, &p.hj, spec, &p.name));
    r.run("twisted_target_dimension", &p.name, || {
        let n = crate::wha::counital::counital_data(h).target_basis.len();
        (n != p.u().torus.size()).then(|| json!({ "dim": n }))
    });
    r.extend(algebroid_from_wha(h, spec, &p.name)?.report);
    r.extend(fixture_suite(&p.u().torus)?);
    r.extend(property_checks(spec.seed)?);
    Ok(r)
}

/// D_J against H_J (Negated grading reading), and ρ as a map D_J → H_J.
pub fn duality_suite(p: &Pipeline, spec: &SampleSpec) -> Result<Report> {
    let dj = DualDJ::new(&p.dq, &p.jj, &p.jj_inv, GradingReading::Negated);
    let mut r = verify_duality(&dj, &p.hj, spec, &p.name);
    let rho = rho_map(&p.hj.algebra, &p.qt, RhoKind::First);
    r.extend(verify_self_duality(&dj, &p.hj, &rho, spec, &p.name));
    // the generic check builds H* densely, so only below the threshold
    if spec.is_full(&p.hj.algebra) {
        r.extend(verify_rho(&p.hj.algebra, &rho, spec, &p.name)?);
    }
    Ok(r)
}

pub fn rank_suite(p: &Pipeline) -> Result<RankReport> {
    rank_and_iso(&p.dq, &p.jj, &p.jj_inv, &p.hj, &p.qt, &p.cfg.lambda, &p.name)
}

/// Torus-level identities of a Belavin–Drinfeld triple and, for diagram
/// automorphisms, the A/B orbit blocks.
pub fn bd_suite(triple: &BDTriple, lambda: &LambdaParam) -> Result<Report> {
    let name = format!("{}/ell={}/bd", triple.datum.name, triple.ell);
    let mut r = verify_triple(triple, &name);
    if triple.is_automorphism() {
        r.extend(matrix_44_check(triple, lambda, &name)?);
    }
    Ok(r)
}

fn random_scalar(field: CyclotomicField, rng: &mut ChaCha8Rng) -> Scalar {
    let coeffs: Vec<BigRational> = (0..field.degree()).map(|_| BigRational::new(BigInt::from(rng.gen_range(-9..=9)), BigInt::from(rng.gen_range(1..=5)))).collect();
    field.from_poly(&coeffs)
}

/// Seeded checks of the number field, the torus and the PBW normal form:
/// scalar round trips, idempotents and the character transform, two routes
/// to Ω, Ω_LΩ_{L⊥} = Ω and the 𝒯± identity for the swap triple, and
/// confluence of normalization on 200 words.
pub fn property_checks(seed: u64) -> Result<Report> {
    let inst = "properties";
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut r = Report::new();
    let field = crate::scalars::make_field(5)?;
    let xs: Vec<Scalar> = (0..50).map(|_| random_scalar(field, &mut rng)).collect();
    r.run("scalar_roundtrip", inst, || {
        for (i, x) in xs.iter().enumerate() {
            let dumped = ScalarDump::from(x).to_scalar(field).ok();
            let inv_ok = x.is_zero() || x.inv().map(|y| (x * &y).is_one()).unwrap_or(false);
            let y = &xs[(i + 1) % xs.len()];
            let add_ok = (x + y).sub(y) == *x;
            if dumped.as_ref() != Some(x) || !inv_ok || !add_ok {
                return Some(json!({ "scalar": x.to_string() }));
            }
        }
        None
    });
    let t = TorusGroup::new(vec![vec![2]], 5)?;
    r.run("torus_idempotents", inst, || {
        let ps = t.idempotents();
        let mut sum = TorusElement::zero(TorusBasis::Group);
        for (b, p) in ps.iter().enumerate() {
            sum = sum.add(&t, p);
            for (c, q) in ps.iter().enumerate() {
                let prod = p.mul(&t, q).to_basis(&t, TorusBasis::Idempotent);
                let expect = if b == c { TorusElement::idempotent(&t, b) } else { TorusElement::zero(TorusBasis::Idempotent) };
                if prod != expect {
                    return Some(json!({ "pair": [b, c] }));
                }
            }
        }
        (sum.to_basis(&t, TorusBasis::Group) != TorusElement::one(&t)).then(|| json!({ "sum": "Σ P_β ≠ 1" }))
    });
    r.run("torus_fourier_roundtrip", inst, || {
        for lam in t.elements() {
            let k = TorusElement::group_element(lam);
            if k.to_basis(&t, TorusBasis::Idempotent).to_basis(&t, TorusBasis::Group) != k {
                return Some(json!({ "lambda": t.vector(lam) }));
            }
        }
        None
    });
    r.run("omega_two_routes", inst, || (omega(&t) != omega_by_sum(&t)).then(|| json!({})));
    let swap = crate::abrr::bd::swap_triple(5)?;
    r.extend(verify_triple(&swap, "properties/swap"));
    let u = build_uq(&CartanDatum::a1(), 5)?;
    r.run("normal_form_confluence", inst, || {
        for _ in 0..200 {
            let len = rng.gen_range(1..7);
            let word: Vec<Letter> = (0..len)
                .map(|_| match rng.gen_range(0..3) {
                    0 => Letter::E(0, rng.gen_range(0..3)),
                    1 => Letter::F(0, rng.gen_range(0..3)),
                    _ => Letter::K(0, rng.gen_range(-3..4)),
                })
                .collect();
            if u.normalize(&word) != u.normalize_rev(&word) {
                return Some(json!({ "word": format!("{word:?}") }));
            }
        }
        None
    });
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.to_string().parse::<Suite>().unwrap(), s);
        }
        assert!("nope".parse::<Suite>().is_err());
    }

    #[test]
    fn fixtures_and_properties_pass() {
        let t = TorusGroup::new(vec![vec![2]], 3).unwrap();
        let r = fixture_suite(&t).unwrap();
        assert!(r.all_pass(), "{:?}", r.failures());
        let r = property_checks(0).unwrap();
        assert!(r.all_pass(), "{:?}", r.failures());
    }
}
