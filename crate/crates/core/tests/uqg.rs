use dynhopf::scalars::Scalar;
use dynhopf::uqg::{build_uq, CartanDatum, Letter, QuantumGroup};
use dynhopf::wha::qt::verify_quasitriangular;
use dynhopf::wha::sample::SampleSpec;
use dynhopf::wha::verify::verify_axioms;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn uq(ell: u32) -> QuantumGroup {
    build_uq(&CartanDatum::a1(), ell).unwrap()
}

#[test]
fn hopf_axioms_full_basis_ell3() {
    let u = uq(3);
    let r = verify_axioms(&u.structure, &SampleSpec::default(), "U(sl2,3)");
    assert!(r.report.all_pass(), "{:?}", r.report.failures());
    assert!(r.is_ordinary_hopf);
}

#[test]
fn hopf_axioms_sampled_ell5() {
    let u = uq(5);
    let spec = SampleSpec { threshold: 64, ..SampleSpec::default() };
    let r = verify_axioms(&u.structure, &spec, "U(sl2,5)");
    assert!(r.report.all_pass(), "{:?}", r.report.failures());
}

#[test]
fn costructure_on_generators() {
    let u = uq(3);
    let h = &u.structure;
    let k = u.k_pow(1);
    assert_eq!(h.comul(&k), k.outer(&k));
    assert!(h.counit(&u.e()).is_zero());
    assert!(h.counit(&k).is_one());
    assert!(h.multiply_out(&h.antipode_at(&h.comul(&u.f()), 0)).is_zero());
    for l in 0..27 {
        let x = h.basis(l);
        assert_eq!(h.antipode(&h.antipode_inv(&x).unwrap()), x);
    }
    // E·F = F·E + (K − K⁻¹)/(q − q⁻¹)
    let f = u.field();
    let qq = (&f.q_pow(1) - &f.q_pow(-1)).inv().unwrap();
    let expect = u.mul(&u.f(), &u.e()).add(&k.sub(&u.k_pow(-1)).scale(&qq));
    assert_eq!(u.normalize(&[Letter::E(0, 1), Letter::F(0, 1)]), expect);
}

#[test]
fn normal_form_is_order_independent() {
    let u = uq(5);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..200 {
        let len = rng.gen_range(1..7);
        let word: Vec<Letter> = (0..len)
            .map(|_| match rng.gen_range(0..3) {
                0 => Letter::E(0, rng.gen_range(0..3)),
                1 => Letter::F(0, rng.gen_range(0..3)),
                _ => Letter::K(0, rng.gen_range(-3..4)),
            })
            .collect();
        assert_eq!(u.normalize(&word), u.normalize_rev(&word), "{word:?}");
    }
}

#[test]
fn universal_r_is_quasitriangular() {
    let u = uq(3);
    let qt = u.universal_r().unwrap();
    let h = &u.structure;
    let rep = verify_quasitriangular(h, &qt, &SampleSpec::default(), "U(sl2,3)");
    assert!(rep.all_pass(), "{:?}", rep.failures());
    assert_eq!(h.counit_at(&qt.r, 0), u.one());
    assert_eq!(h.counit_at(&qt.r, 1), u.one());
    // first-slot degree of 𝓡 − Ω is positive
    let rest = qt.r.sub(&u.omega(false));
    assert!(rest.iter().all(|(k, _)| u.degree(dynhopf::tensor::slot(k, 0)) > 0));
    assert_eq!(u.r_coefficient(0), Scalar::one());
}
