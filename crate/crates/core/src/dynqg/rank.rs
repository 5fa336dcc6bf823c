//! Ranks of the blocks of 𝓡^J(λ), bijectivity of ρ, and explicit
//! preimages of the generators of H_J.

use super::DynamicalQG;
use crate::abrr::{verify_c_coefficients, DynamicalElement};
use crate::error::{Error, Result};
use crate::linalg::{rank, SparseRow};
use crate::report::Report;
use crate::scalars::LambdaParam;
use crate::tensor::{slot, Label, SparseTensor};
use crate::wha::qt::{rho_map, QTStructure, RhoKind};
use crate::wha::twist::Twisted;
use crate::wha::LinearMapSolver;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BlockRank {
    pub instance: String,
    pub lambda: Vec<i64>,
    pub mu: Vec<i64>,
    pub nu: Vec<i64>,
    pub rank: usize,
    pub expected: usize,
    pub status: crate::report::Status,
}

/// A functional φ on H_J with ρ(φ) equal to the named generator.
#[derive(Clone, Debug, Serialize)]
pub struct GeneratorCertificate {
    pub generator: String,
    /// (dual basis label, coefficient), sorted by label.
    pub preimage: Vec<(String, String)>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RankReport {
    pub blocks: Vec<BlockRank>,
    pub rho_rank: usize,
    pub dim: usize,
    pub certificates: Vec<GeneratorCertificate>,
    pub report: Report,
}

impl RankReport {
    /// The first rank-deficient block, as an error.
    pub fn require_full_rank(&self) -> Result<()> {
        match self.blocks.iter().find(|b| b.rank != b.expected) {
            Some(b) => Err(Error::RankDeficient(format!("λ={:?} μ={:?} ν={:?}: rank {} < {}", b.lambda, b.mu, b.nu, b.rank, b.expected))),
            None if self.rho_rank != self.dim => Err(Error::RankDeficient(format!("ρ has rank {} < {}", self.rho_rank, self.dim))),
            None => Ok(()),
        }
    }
}

/// Rank of a 2-tensor read as a matrix: rows by slot 0, columns by slot 1.
pub fn tensor_rank(x: &SparseTensor) -> usize {
    let mut rows: std::collections::BTreeMap<Label, SparseRow> = Default::default();
    for (k, v) in x.iter() {
        rows.entry(slot(k, 0)).or_default().insert(slot(k, 1) as usize, v.clone());
    }
    rank(rows.into_values().collect())
}

/// P_μ𝓡^{J(1)}(λ)⊗𝓡^{J(2)}(λ)P_ν for all (λ, μ, ν), each of which should
/// have rank dim U/|𝕋|.
pub fn block_ranks(dq: &DynamicalQG, jj: &DynamicalElement, jj_inv: &DynamicalElement, instance: &str) -> Result<Vec<BlockRank>> {
    let (t, us) = (&dq.u.torus, &dq.u.structure);
    let one = dq.u.one();
    let expected = dq.u.dim() / t.size();
    let rjs = t.elements().map(|lam| dq.r_j(jj, jj_inv, lam)).collect::<Result<Vec<_>>>()?;
    let triples: Vec<(usize, usize, usize)> = t.elements().flat_map(|l| t.elements().flat_map(move |m| t.elements().map(move |n| (l, m, n)))).collect();
    Ok(triples
        .par_iter()
        .map(|&(lam, mu, nu)| {
            let block = us.mul_all(&[&dq.u.p(mu).outer(&one), &rjs[lam], &one.outer(&dq.u.p(nu))]);
            let rk = tensor_rank(&block);
            BlockRank {
                instance: instance.to_string(),
                lambda: t.vector(lam),
                mu: t.vector(mu),
                nu: t.vector(nu),
                rank: rk,
                expected,
                status: if rk == expected { crate::report::Status::Pass } else { crate::report::Status::Fail },
            }
        })
        .collect())
}

/// Block ranks, the rank of ρ: φ ↦ (id⊗φ)𝓡(λ), and ρ-preimages of E_{λμ},
/// K, E, F checked by applying ρ, together with the closed forms of the
/// C coefficients that make those preimages exist.
pub fn rank_and_iso(dq: &DynamicalQG, jj: &DynamicalElement, jj_inv: &DynamicalElement, hj: &Twisted, qt: &QTStructure, lambda: &LambdaParam, instance: &str) -> Result<RankReport> {
    let h = &hj.algebra;
    let t = &dq.u.torus;
    let mut report = Report::new();
    report.run("dim_divisible_by_torus", instance, || (dq.u.dim() % t.size() != 0).then(|| json!({ "dim": dq.u.dim(), "torus": t.size() })));
    let blocks = block_ranks(dq, jj, jj_inv, instance)?;
    report.run("block_ranks", instance, || blocks.iter().find(|b| b.rank != b.expected).map(|b| json!({ "lambda": b.lambda, "mu": b.mu, "nu": b.nu, "rank": b.rank })));

    let rho = rho_map(h, qt, RhoKind::First);
    let solver = LinearMapSolver::new(rho.images.clone());
    let rho_rank = solver.rank();
    report.run("rho_rank", instance, || (rho_rank != h.dim()).then(|| json!({ "rank": rho_rank, "dim": h.dim() })));

    let one = dq.u.one();
    let mut targets: Vec<(String, SparseTensor)> = Vec::new();
    for lam in t.elements() {
        for mu in t.elements() {
            targets.push((format!("E_{:?},{:?}", t.vector(lam), t.vector(mu)), dq.matrix_unit(lam, mu, &one)));
        }
    }
    targets.push(("K".into(), dq.lift(&dq.u.k_pow(1))));
    targets.push(("E".into(), dq.lift(&dq.u.e())));
    targets.push(("F".into(), dq.lift(&dq.u.f())));
    let mut certificates = Vec::new();
    let mut missing = Vec::new();
    for (name, g) in &targets {
        match solver.preimage(g) {
            Some(phi) if rho.apply(&phi) == *g => {
                let preimage = phi.sorted().into_iter().map(|(k, v)| (h.label_name(k[0]), v.to_string())).collect();
                certificates.push(GeneratorCertificate { generator: name.clone(), preimage });
            }
            _ => missing.push(name.clone()),
        }
    }
    report.run("generators_in_image", instance, || (!missing.is_empty()).then(|| json!({ "missing": missing })));
    report.extend(verify_c_coefficients(&dq.u, lambda, jj, instance));
    Ok(RankReport { blocks, rho_rank, dim: h.dim(), certificates, report })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::pack;
    use crate::scalars::Scalar;

    #[test]
    fn rank_of_small_tensors() {
        // e₀⊗e₀ + e₁⊗e₁ has rank 2; (e₀+e₁)⊗(e₀+e₁) has rank 1
        let id = SparseTensor::from_terms(2, [(pack(&[0, 0]), Scalar::one()), (pack(&[1, 1]), Scalar::one())]);
        assert_eq!(tensor_rank(&id), 2);
        let s = SparseTensor::from_terms(1, [(0, Scalar::one()), (1, Scalar::one())]);
        assert_eq!(tensor_rank(&s.outer(&s)), 1);
        assert_eq!(tensor_rank(&SparseTensor::zero(2)), 0);
    }

    #[test]
    fn sl2_at_3_is_nondegenerate() {
        use crate::abrr::{curly_j, invert_dynamical, solve_abrr, SolverConfig};
        use crate::uqg::{build_uq, CartanDatum};
        let u = build_uq(&CartanDatum::a1(), 3).unwrap();
        let lambda = LambdaParam::constant(1, 2);
        let j = solve_abrr(&u, &SolverConfig::plain(lambda.clone())).unwrap();
        let jj = curly_j(&u, &j);
        let jj_inv = invert_dynamical(&u, &jj).unwrap();
        let dq = DynamicalQG::new(&u).unwrap();
        let hj = dq.build_hj(&jj, &jj_inv, "H_J").unwrap();
        let qt = dq.twisted_r(&jj, &jj_inv).unwrap();
        let rr = rank_and_iso(&dq, &jj, &jj_inv, &hj, &qt, &lambda, "sl2").unwrap();
        assert!(rr.report.all_pass(), "{:?}", rr.report.failures());
        assert_eq!(rr.blocks.len(), 27);
        assert!(rr.blocks.iter().all(|b| b.rank == 9));
        assert_eq!(rr.rho_rank, 243);
        assert_eq!(rr.certificates.len(), 12);
        rr.require_full_rank().unwrap();
    }
}
