//! Which elements, pairs and triples a verification run looks at.

use super::WeakHopfStructure;
use crate::scalars::Scalar;
use crate::tensor::{Label, SparseTensor};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SampleSpec {
    /// Full-basis checks up to this dimension.
    pub threshold: usize,
    /// Number of random sparse elements above the threshold.
    pub samples: usize,
    /// Number of sampled triples for triple-type axioms.
    pub triples: usize,
    pub seed: u64,
}

impl Default for SampleSpec {
    fn default() -> Self {
        SampleSpec { threshold: 512, samples: 64, triples: 2048, seed: 0 }
    }
}

/// An element under test with a name for witnesses.
#[derive(Clone, Debug)]
pub struct Sampled {
    pub name: String,
    pub x: SparseTensor,
}

impl SampleSpec {
    pub fn with_seed(seed: u64) -> SampleSpec {
        SampleSpec { seed, ..SampleSpec::default() }
    }

    pub fn is_full(&self, h: &WeakHopfStructure) -> bool {
        h.dim() <= self.threshold
    }

    pub fn rng(&self, salt: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15))
    }

    /// Basis elements when the dimension is small, otherwise generators and
    /// seeded random sparse elements.
    pub fn elements(&self, h: &WeakHopfStructure) -> Vec<Sampled> {
        if self.is_full(h) {
            return (0..h.dim() as Label).map(|l| Sampled { name: h.label_name(l), x: h.basis(l) }).collect();
        }
        let mut out: Vec<Sampled> = h.generators().into_iter().map(|l| Sampled { name: h.label_name(l), x: h.basis(l) }).collect();
        let mut rng = self.rng(1);
        for i in 0..self.samples {
            out.push(Sampled { name: format!("sample#{i}"), x: random_element(h, &mut rng) });
        }
        out
    }

    /// All basis triples for dim ≤ 64, otherwise seeded triples chosen so
    /// consecutive blocks match (so the products are not trivially zero).
    pub fn triples(&self, h: &WeakHopfStructure) -> Vec<[Label; 3]> {
        let n = h.dim() as Label;
        if n <= 64 {
            let mut v = Vec::with_capacity((n * n * n) as usize);
            for a in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        v.push([a, b, c]);
                    }
                }
            }
            return v;
        }
        let mut rng = self.rng(2);
        let by_left: Option<Vec<Vec<Label>>> = h.has_blocks().then(|| {
            let mut m: std::collections::BTreeMap<u32, Vec<Label>> = Default::default();
            for l in 0..n {
                m.entry(h.block_of(l).unwrap().0).or_default().push(l);
            }
            (0..n).map(|l| m.get(&h.block_of(l).unwrap().1).cloned().unwrap_or_default()).collect()
        });
        (0..self.triples)
            .map(|_| {
                let a = rng.gen_range(0..n);
                let pick = |rng: &mut ChaCha8Rng, prev: Label| -> Label {
                    match &by_left {
                        Some(next) if !next[prev as usize].is_empty() => {
                            let c = &next[prev as usize];
                            c[rng.gen_range(0..c.len())]
                        }
                        _ => rng.gen_range(0..n),
                    }
                };
                let b = pick(&mut rng, a);
                let c = pick(&mut rng, b);
                [a, b, c]
            })
            .collect()
    }
}

/// A sparse element with three random terms and small integer coefficients.
pub fn random_element(h: &WeakHopfStructure, rng: &mut ChaCha8Rng) -> SparseTensor {
    let mut x = SparseTensor::zero(1);
    for _ in 0..3 {
        let l = rng.gen_range(0..h.dim() as Label);
        let mut c = rng.gen_range(1..=3i64);
        if rng.gen_bool(0.5) {
            c = -c;
        }
        x.add_term(l as u64, Scalar::from_int(c));
    }
    x
}

/// Witness listing the named inputs of a failed check.
pub fn witness(names: &[&str]) -> Value {
    json!({ "elements": names })
}

/// Witness for a failed tensor identity: inputs plus the first differing
/// label tuple.
pub fn tensor_witness(h: &WeakHopfStructure, names: &[&str], lhs: &SparseTensor, rhs: &SparseTensor) -> Value {
    let at = lhs.first_difference(rhs).map(|ls| h.names(&ls));
    json!({ "elements": names, "differs_at": at })
}
