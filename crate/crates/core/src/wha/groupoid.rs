//! Groupoid algebras kG: Δ(g) = g⊗g, ε(g) = 1, S(g) = g⁻¹.

use super::StructureRules;
use crate::error::{Error, Result};
use crate::scalars::Scalar;
use crate::tensor::{Label, SparseTensor};

/// An arrow with its source and target objects.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Arrow {
    pub name: String,
    pub source: usize,
    pub target: usize,
}

#[derive(Clone, Debug)]
pub struct GroupoidRules {
    objects: usize,
    arrows: Vec<Arrow>,
    /// compose[g·n + h] = g∘h when source(g) = target(h)
    compose: Vec<Option<Label>>,
    inverse: Vec<Label>,
    identity: Vec<Label>,
}

impl GroupoidRules {
    /// Validates a composition table: `table[g][h]` is g∘h.
    pub fn from_table(objects: usize, arrows: Vec<Arrow>, table: Vec<Vec<Option<usize>>>) -> Result<GroupoidRules> {
        let n = arrows.len();
        let bad = |m: String| Err(Error::NotAGroupoid(m));
        if table.len() != n || table.iter().any(|r| r.len() != n) {
            return bad("composition table has the wrong shape".into());
        }
        for a in &arrows {
            if a.source >= objects || a.target >= objects {
                return bad(format!("arrow {} has an unknown endpoint", a.name));
            }
        }
        let mut compose = vec![None; n * n];
        for g in 0..n {
            for h in 0..n {
                let composable = arrows[g].source == arrows[h].target;
                match (composable, table[g][h]) {
                    (true, None) => return bad(format!("{} ∘ {} is undefined", arrows[g].name, arrows[h].name)),
                    (false, Some(_)) => return bad(format!("{} and {} are not composable", arrows[g].name, arrows[h].name)),
                    (true, Some(k)) => {
                        if k >= n || arrows[k].source != arrows[h].source || arrows[k].target != arrows[g].target {
                            return bad(format!("{} ∘ {} has the wrong endpoints", arrows[g].name, arrows[h].name));
                        }
                        compose[g * n + h] = Some(k as Label);
                    }
                    (false, None) => {}
                }
            }
        }
        let comp = |g: usize, h: usize| compose[g * n + h].map(|k| k as usize);
        for g in 0..n {
            for h in 0..n {
                for k in 0..n {
                    let l = comp(g, h).and_then(|gh| comp(gh, k));
                    let r = comp(h, k).and_then(|hk| comp(g, hk));
                    if l != r {
                        return bad(format!("composition is not associative at ({}, {}, {})", arrows[g].name, arrows[h].name, arrows[k].name));
                    }
                }
            }
        }
        let mut identity = Vec::with_capacity(objects);
        for x in 0..objects {
            let id = (0..n).find(|&e| {
                arrows[e].source == x
                    && arrows[e].target == x
                    && (0..n).all(|g| (arrows[g].target != x || comp(e, g) == Some(g)) && (arrows[g].source != x || comp(g, e) == Some(g)))
            });
            match id {
                Some(e) => identity.push(e as Label),
                None => return bad(format!("object {x} has no identity arrow")),
            }
        }
        let mut inverse = Vec::with_capacity(n);
        for g in 0..n {
            let (s, t) = (arrows[g].source, arrows[g].target);
            let inv = (0..n).find(|&h| comp(g, h) == Some(identity[t] as usize) && comp(h, g) == Some(identity[s] as usize));
            match inv {
                Some(h) => inverse.push(h as Label),
                None => return bad(format!("arrow {} has no inverse", arrows[g].name)),
            }
        }
        Ok(GroupoidRules { objects, arrows, compose, inverse, identity })
    }

    /// The pair groupoid on n objects: one arrow t ← s for every pair,
    /// labelled t·n + s.
    pub fn full(n: usize) -> GroupoidRules {
        let arrows: Vec<Arrow> = (0..n * n).map(|k| Arrow { name: format!("g{}{}", k / n, k % n), source: k % n, target: k / n }).collect();
        let table = (0..n * n)
            .map(|g| (0..n * n).map(|h| (g % n == h / n).then_some((g / n) * n + h % n)).collect())
            .collect();
        GroupoidRules::from_table(n, arrows, table).expect("pair groupoid")
    }

    /// The cyclic group ℤ/n as a one-object groupoid.
    pub fn cyclic_group(n: usize) -> GroupoidRules {
        let arrows = (0..n).map(|k| Arrow { name: format!("c{k}"), source: 0, target: 0 }).collect();
        let table = (0..n).map(|g| (0..n).map(|h| Some((g + h) % n)).collect()).collect();
        GroupoidRules::from_table(1, arrows, table).expect("cyclic group")
    }

    pub fn objects(&self) -> usize {
        self.objects
    }

    pub fn arrow(&self, g: Label) -> &Arrow {
        &self.arrows[g as usize]
    }

    pub fn identity(&self, x: usize) -> Label {
        self.identity[x]
    }

    pub fn inverse(&self, g: Label) -> Label {
        self.inverse[g as usize]
    }

    pub fn compose(&self, g: Label, h: Label) -> Option<Label> {
        self.compose[g as usize * self.arrows.len() + h as usize]
    }
}

impl StructureRules for GroupoidRules {
    fn dim(&self) -> usize {
        self.arrows.len()
    }

    fn label_name(&self, l: Label) -> String {
        self.arrows[l as usize].name.clone()
    }

    fn unit(&self) -> SparseTensor {
        let mut t = SparseTensor::zero(1);
        for &e in &self.identity {
            t.add_term(e as u64, Scalar::one());
        }
        t
    }

    fn mul(&self, a: Label, b: Label) -> SparseTensor {
        match self.compose(a, b) {
            Some(k) => SparseTensor::basis(&[k]),
            None => SparseTensor::zero(1),
        }
    }

    fn comul(&self, a: Label) -> SparseTensor {
        SparseTensor::basis(&[a, a])
    }

    fn counit(&self, _a: Label) -> Scalar {
        Scalar::one()
    }

    fn antipode(&self, a: Label) -> SparseTensor {
        SparseTensor::basis(&[self.inverse(a)])
    }

    fn antipode_inv(&self, a: Label) -> Option<SparseTensor> {
        Some(SparseTensor::basis(&[self.inverse(a)]))
    }

    fn blocks(&self, a: Label) -> Option<(u32, u32)> {
        let g = &self.arrows[a as usize];
        Some((g.target as u32, g.source as u32))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wha::sample::SampleSpec;
    use crate::wha::verify::verify_axioms;
    use crate::wha::WeakHopfStructure;

    #[test]
    fn two_object_pair_groupoid() {
        let g = GroupoidRules::full(2);
        let h = WeakHopfStructure::new("kG", g.clone());
        assert_eq!(h.dim(), 4);
        // 1 = id_X + id_Y
        let mut one = SparseTensor::zero(1);
        one.add_term(g.identity(0) as u64, Scalar::one());
        one.add_term(g.identity(1) as u64, Scalar::one());
        assert_eq!(h.one(), one);
        let r = verify_axioms(&h, &SampleSpec::default(), "kG");
        assert!(r.report.all_pass(), "{:?}", r.report.failures());
        assert!(!r.is_ordinary_hopf);
    }

    #[test]
    fn group_is_ordinary_hopf() {
        let h = WeakHopfStructure::new("Z2", GroupoidRules::cyclic_group(2));
        let r = verify_axioms(&h, &SampleSpec::default(), "Z2");
        assert!(r.report.all_pass());
        assert!(r.is_ordinary_hopf);
    }

    #[test]
    fn non_composable_table_rejected() {
        let arrows = vec![
            Arrow { name: "a".into(), source: 0, target: 0 },
            Arrow { name: "b".into(), source: 1, target: 1 },
        ];
        // claims a∘b is defined although source(a) ≠ target(b)
        let table = vec![vec![Some(0), Some(0)], vec![None, Some(1)]];
        assert!(matches!(GroupoidRules::from_table(2, arrows, table), Err(Error::NotAGroupoid(_))));
    }

    #[test]
    fn identity_antipode_breaks_s_id_s() {
        struct BadS(GroupoidRules);
        impl StructureRules for BadS {
            fn dim(&self) -> usize {
                self.0.dim()
            }
            fn unit(&self) -> SparseTensor {
                self.0.unit()
            }
            fn mul(&self, a: Label, b: Label) -> SparseTensor {
                self.0.mul(a, b)
            }
            fn comul(&self, a: Label) -> SparseTensor {
                self.0.comul(a)
            }
            fn counit(&self, a: Label) -> Scalar {
                self.0.counit(a)
            }
            fn antipode(&self, a: Label) -> SparseTensor {
                SparseTensor::basis(&[a])
            }
        }
        let h = WeakHopfStructure::new("kG-bad", BadS(GroupoidRules::full(3)));
        let r = verify_axioms(&h, &SampleSpec::default(), "kG-bad");
        let c = r.report.get("antipode_s_id_s").unwrap();
        assert!(!c.passed());
        // the witness is an arrow that is not its own inverse
        let name = c.witness.as_ref().unwrap()["elements"][0].as_str().unwrap().to_string();
        let g = GroupoidRules::full(3);
        let l = (0..9).find(|&l| h.label_name(l) == name).unwrap();
        assert_ne!(g.inverse(l), l);
    }
}
