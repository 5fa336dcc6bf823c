//! Tensor products of weak Hopf algebras.

use super::{StructureRules, WeakHopfStructure};
use crate::scalars::Scalar;
use crate::tensor::{pack, slot, Label, SparseTensor};

/// A⊗B on labels a·dim B + b, with factorwise structure maps.
pub struct ProductRules {
    a: WeakHopfStructure,
    b: WeakHopfStructure,
    b_blocks: u32,
}

impl ProductRules {
    pub fn new(a: &WeakHopfStructure, b: &WeakHopfStructure) -> ProductRules {
        let b_blocks = (0..b.dim() as Label).filter_map(|l| b.block_of(l)).map(|(x, y)| x.max(y) + 1).max().unwrap_or(1);
        ProductRules { a: a.clone(), b: b.clone(), b_blocks }
    }

    fn split(&self, l: Label) -> (Label, Label) {
        let n = self.b.dim() as Label;
        (l / n, l % n)
    }

    fn join(&self, x: Label, y: Label) -> Label {
        x * self.b.dim() as Label + y
    }

    /// x⊗y for rank-n tensors over A and B, as a rank-n tensor over A⊗B.
    pub fn combine(&self, x: &SparseTensor, y: &SparseTensor) -> SparseTensor {
        combine(self.b.dim(), x, y)
    }
}

/// Slotwise x⊗y: the label in slot i is x_i·dim_b + y_i.
pub fn combine(dim_b: usize, x: &SparseTensor, y: &SparseTensor) -> SparseTensor {
    assert_eq!(x.rank(), y.rank());
    let n = x.rank();
    let mut out = SparseTensor::zero(n);
    for (kx, vx) in x.iter() {
        for (ky, vy) in y.iter() {
            let labels: Vec<Label> = (0..n).map(|i| slot(kx, i) * dim_b as Label + slot(ky, i)).collect();
            out.add_term(pack(&labels), vx * vy);
        }
    }
    out
}

impl StructureRules for ProductRules {
    fn dim(&self) -> usize {
        self.a.dim() * self.b.dim()
    }

    fn label_name(&self, l: Label) -> String {
        let (x, y) = self.split(l);
        format!("{}⊗{}", self.a.label_name(x), self.b.label_name(y))
    }

    fn unit(&self) -> SparseTensor {
        self.combine(&self.a.one(), &self.b.one())
    }

    fn mul(&self, l: Label, r: Label) -> SparseTensor {
        let ((x1, y1), (x2, y2)) = (self.split(l), self.split(r));
        let px = self.a.mul_labels(x1, x2);
        if px.is_empty() {
            return SparseTensor::zero(1);
        }
        let py = self.b.mul_labels(y1, y2);
        let mut out = SparseTensor::zero(1);
        for (a, va) in px.iter() {
            for (b, vb) in py.iter() {
                out.add_term(self.join(*a, *b) as u64, va * vb);
            }
        }
        out
    }

    fn comul(&self, l: Label) -> SparseTensor {
        let (x, y) = self.split(l);
        self.combine(self.a.comul_label(x), self.b.comul_label(y))
    }

    fn counit(&self, l: Label) -> Scalar {
        let (x, y) = self.split(l);
        self.a.counit_label(x).mul(&self.b.counit_label(y))
    }

    fn antipode(&self, l: Label) -> SparseTensor {
        let (x, y) = self.split(l);
        self.combine(self.a.antipode_label(x), self.b.antipode_label(y))
    }

    fn antipode_inv(&self, l: Label) -> Option<SparseTensor> {
        let (x, y) = self.split(l);
        Some(self.combine(self.a.antipode_inv_label(x)?, self.b.antipode_inv_label(y)?))
    }

    fn blocks(&self, l: Label) -> Option<(u32, u32)> {
        let (x, y) = self.split(l);
        let (a, b) = (self.a.block_of(x)?, self.b.block_of(y)?);
        Some((a.0 * self.b_blocks + b.0, a.1 * self.b_blocks + b.1))
    }

    fn generators(&self) -> Vec<Label> {
        let gb = self.b.generators();
        self.a.generators().into_iter().flat_map(|x| gb.iter().map(move |&y| (x, y))).map(|(x, y)| self.join(x, y)).collect()
    }
}

/// The tensor product weak Hopf algebra A⊗B.
pub fn tensor_product(name: &str, a: &WeakHopfStructure, b: &WeakHopfStructure) -> WeakHopfStructure {
    WeakHopfStructure::new(name, ProductRules::new(a, b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wha::groupoid::GroupoidRules;
    use crate::wha::sample::SampleSpec;
    use crate::wha::verify::verify_axioms;

    #[test]
    fn product_of_groupoid_algebras() {
        let a = WeakHopfStructure::new("kG2", GroupoidRules::full(2));
        let b = WeakHopfStructure::new("Z3", GroupoidRules::cyclic_group(3));
        let h = tensor_product("kG2⊗Z3", &a, &b);
        assert_eq!(h.dim(), 12);
        assert!(verify_axioms(&h, &SampleSpec::default(), "prod").report.all_pass());
        // Δ(1) = Δ_A(1)⊗Δ_B(1) slotwise
        assert_eq!(h.delta_one(), combine(3, &a.delta_one(), &b.delta_one()));
    }
}
