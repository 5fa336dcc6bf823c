//! Checks that a linear map between weak Hopf algebras is a morphism.

use super::counital::counital_data;
use super::sample::SampleSpec;
use super::{to_row, WeakHopfStructure};
use crate::linalg::Echelon;
use crate::report::Report;
use crate::tensor::{Label, SparseTensor};
use rand::Rng;
use serde_json::json;
use std::collections::HashMap;

/// A linear map given on basis labels, cached.
pub struct LinearMap<'a> {
    f: &'a dyn Fn(Label) -> SparseTensor,
    cache: std::cell::RefCell<HashMap<Label, SparseTensor>>,
}

impl<'a> LinearMap<'a> {
    pub fn new(f: &'a dyn Fn(Label) -> SparseTensor) -> Self {
        LinearMap { f, cache: Default::default() }
    }

    pub fn image(&self, l: Label) -> SparseTensor {
        if let Some(x) = self.cache.borrow().get(&l) {
            return x.clone();
        }
        let x = (self.f)(l);
        self.cache.borrow_mut().insert(l, x.clone());
        x
    }

    /// Applies the map to every slot of a tensor.
    pub fn apply(&self, t: &SparseTensor) -> SparseTensor {
        (0..t.rank()).fold(t.clone(), |acc, i| acc.map_slot(i, |l| self.image(l)))
    }
}

fn span_rank(xs: &[SparseTensor]) -> (usize, Echelon) {
    let mut e = Echelon::new();
    for x in xs {
        e.insert(&to_row(x));
    }
    (e.rank(), e)
}

/// Unit, product (on sampled pairs), coproduct, counit and antipode
/// compatibility, and bijectivity on counital subalgebras.
pub fn verify_morphism(from: &WeakHopfStructure, to: &WeakHopfStructure, f: &dyn Fn(Label) -> SparseTensor, spec: &SampleSpec, instance: &str) -> Report {
    let map = LinearMap::new(f);
    let mut r = Report::new();
    let elems = spec.elements(from);
    r.run("morphism_unit", instance, || (map.apply(&from.one()) != to.one()).then(|| json!({})));
    r.run("morphism_mul", instance, || {
        let mut rng = spec.rng(3);
        let pairs: Vec<(usize, usize)> = if elems.len() <= 16 {
            (0..elems.len()).flat_map(|i| (0..elems.len()).map(move |j| (i, j))).collect()
        } else {
            (0..4 * spec.samples).map(|_| (rng.gen_range(0..elems.len()), rng.gen_range(0..elems.len()))).collect()
        };
        for (i, j) in pairs {
            let (x, y) = (&elems[i], &elems[j]);
            if map.apply(&from.mul(&x.x, &y.x)) != to.mul(&map.apply(&x.x), &map.apply(&y.x)) {
                return Some(json!({ "elements": [x.name, y.name] }));
            }
        }
        None
    });
    r.run("morphism_comul", instance, || {
        elems.iter().find(|e| to.comul(&map.apply(&e.x)) != map.apply(&from.comul(&e.x))).map(|e| json!({ "elements": [e.name] }))
    });
    r.run("morphism_counit", instance, || {
        elems.iter().find(|e| to.counit(&map.apply(&e.x)) != from.counit(&e.x)).map(|e| json!({ "elements": [e.name] }))
    });
    r.run("morphism_antipode", instance, || {
        elems.iter().find(|e| to.antipode(&map.apply(&e.x)) != map.apply(&from.antipode(&e.x))).map(|e| json!({ "elements": [e.name] }))
    });
    r.run("morphism_counital_bijection", instance, || {
        let (a, b) = (counital_data(from), counital_data(to));
        for (which, src, dst) in [("target", &a.target_basis, &b.target_basis), ("source", &a.source_basis, &b.source_basis)] {
            let imgs: Vec<SparseTensor> = src.iter().map(|z| map.apply(z)).collect();
            let (rank, _) = span_rank(&imgs);
            let (drank, dech) = span_rank(dst);
            if rank != src.len() || drank != src.len() || !imgs.iter().all(|z| dech.contains(&to_row(z))) {
                return Some(json!({ "subalgebra": which, "image_rank": rank, "dim": drank }));
            }
        }
        None
    });
    r
}
