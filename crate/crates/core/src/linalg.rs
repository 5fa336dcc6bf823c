//! Exact linear algebra: integer lattices (kernels, indices) and sparse
//! row reduction over ℚ(ζ_ℓ).

use crate::scalars::Scalar;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::collections::BTreeMap;

fn to_big(rows: &[Vec<i64>]) -> Vec<Vec<BigInt>> {
    rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
}

/// Row Hermite normal form of an integer matrix (rows span the lattice).
/// Returns the nonzero rows.
pub fn hermite_rows(rows: &[Vec<i64>], m: usize) -> Vec<Vec<BigInt>> {
    let mut a = to_big(rows);
    let mut out = Vec::new();
    let mut r0 = 0;
    for col in 0..m {
        // gcd-reduce column `col` among rows r0..
        loop {
            let live: Vec<usize> = (r0..a.len()).filter(|&i| !a[i][col].is_zero()).collect();
            if live.len() <= 1 {
                if let Some(&i) = live.first() {
                    a.swap(r0, i);
                    if a[r0][col].is_negative() {
                        for x in a[r0].iter_mut() {
                            *x = -&*x;
                        }
                    }
                    r0 += 1;
                }
                break;
            }
            let p = *live.iter().min_by_key(|&&i| a[i][col].abs()).unwrap();
            for &i in &live {
                if i != p {
                    let f = a[i][col].div_floor(&a[p][col]);
                    let prow = a[p].clone();
                    for (x, y) in a[i].iter_mut().zip(prow) {
                        *x -= &f * y;
                    }
                }
            }
        }
    }
    // reduce entries above pivots
    let piv: Vec<(usize, usize)> = (0..r0).map(|i| (i, (0..m).find(|&c| !a[i][c].is_zero()).unwrap())).collect();
    for &(i, c) in &piv {
        for k in 0..i {
            let f = a[k][c].div_floor(&a[i][c]);
            if !f.is_zero() {
                let prow = a[i].clone();
                for (x, y) in a[k].iter_mut().zip(prow) {
                    *x -= &f * y;
                }
            }
        }
    }
    for row in a.into_iter().take(r0) {
        out.push(row);
    }
    out
}

/// Index [ℤ^m : M] of the lattice spanned by `gens`, or None if M has
/// lower rank.
pub fn lattice_index(gens: &[Vec<i64>], m: usize) -> Option<i64> {
    let h = hermite_rows(gens, m);
    if h.len() < m {
        return None;
    }
    let mut d = BigInt::one();
    for (i, row) in h.iter().enumerate() {
        d *= &row[i];
    }
    d.abs().to_i64()
}

/// A ℤ-basis of {x ∈ ℤ^m : rows·x = 0}.
pub fn int_kernel(rows: &[Vec<i64>], m: usize) -> Vec<Vec<i64>> {
    // Column-reduce [rows; I] so the top block becomes echelon; columns
    // whose top part vanishes give the kernel.
    let r = rows.len();
    let mut cols: Vec<Vec<BigInt>> = (0..m)
        .map(|j| {
            let mut c: Vec<BigInt> = rows.iter().map(|row| BigInt::from(row[j])).collect();
            c.extend((0..m).map(|i| BigInt::from((i == j) as i64)));
            c
        })
        .collect();
    let mut c0 = 0;
    for row in 0..r {
        loop {
            let live: Vec<usize> = (c0..m).filter(|&j| !cols[j][row].is_zero()).collect();
            if live.len() <= 1 {
                if let Some(&j) = live.first() {
                    cols.swap(c0, j);
                    c0 += 1;
                }
                break;
            }
            let p = *live.iter().min_by_key(|&&j| cols[j][row].abs()).unwrap();
            for &j in &live {
                if j != p {
                    let f = cols[j][row].div_floor(&cols[p][row]);
                    let pc = cols[p].clone();
                    for (x, y) in cols[j].iter_mut().zip(pc) {
                        *x -= &f * y;
                    }
                }
            }
        }
    }
    let basis: Vec<Vec<i64>> = cols[c0..].iter().map(|c| c[r..].iter().map(|x| x.to_i64().unwrap()).collect()).collect();
    // normalize to HNF for a canonical answer
    hermite_rows(&basis, m).into_iter().map(|row| row.iter().map(|x| x.to_i64().unwrap()).collect()).collect()
}

/// Sparse row over ℚ(ζ_ℓ): column → nonzero entry.
pub type SparseRow = BTreeMap<usize, Scalar>;

fn rational_content(row: &SparseRow) -> Option<BigRational> {
    // gcd of integer numerators over lcm of denominators, as a rational
    let mut g = BigInt::zero();
    let mut l = BigInt::one();
    for v in row.values() {
        let (num, den) = v.to_parts();
        for c in num {
            g = g.gcd(&c);
        }
        l = l.lcm(&den);
    }
    if g.is_zero() {
        None
    } else {
        Some(BigRational::new(g, l))
    }
}

fn strip(row: &mut SparseRow) {
    if let Some(c) = rational_content(row) {
        if !c.is_one() {
            let inv = Scalar::from_rational(&c.recip());
            for v in row.values_mut() {
                *v = &*v * &inv;
            }
        }
    }
}

/// Rank by fraction-free elimination: row updates r ← p·r − c·s never
/// divide, and each updated row is divided by its rational content.
pub fn rank(rows: Vec<SparseRow>) -> usize {
    let mut pending: Vec<SparseRow> = rows.into_iter().filter(|r| !r.is_empty()).collect();
    let mut pivots: BTreeMap<usize, SparseRow> = BTreeMap::new();
    for mut row in pending.drain(..) {
        strip(&mut row);
        loop {
            let Some((&col, _)) = row.iter().next() else { break };
            let Some(prow) = pivots.get(&col) else {
                pivots.insert(col, row);
                break;
            };
            let p = prow[&col].clone();
            let c = row[&col].clone();
            let mut next = SparseRow::new();
            for (k, v) in &row {
                let x = v * &p;
                if !x.is_zero() {
                    next.insert(*k, x);
                }
            }
            for (k, v) in prow {
                let e = next.entry(*k).or_insert_with(Scalar::zero);
                *e = &*e - &(&c * v);
                if e.is_zero() {
                    next.remove(k);
                }
            }
            row = next;
            strip(&mut row);
        }
    }
    pivots.len()
}

/// Incremental reduced echelon basis of a row space, with each stored row
/// remembering how it was combined from the inserted rows.
#[derive(Clone, Debug, Default)]
pub struct Echelon {
    /// pivot column → (row with leading 1, combination of input rows)
    rows: BTreeMap<usize, (SparseRow, SparseRow)>,
    inserted: usize,
}

impl Echelon {
    pub fn new() -> Echelon {
        Echelon::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduces `row` against the basis, returning the remainder and the
    /// combination of inserted rows that was subtracted.
    pub fn reduce(&self, row: &SparseRow) -> (SparseRow, SparseRow) {
        let mut rem = row.clone();
        let mut comb = SparseRow::new();
        let mut cursor = 0usize;
        loop {
            let Some((&col, c)) = rem.range(cursor..).find(|(k, _)| self.rows.contains_key(k)) else { break };
            let c = c.clone();
            let (prow, pcomb) = &self.rows[&col];
            axpy(&mut rem, &c.neg(), prow);
            axpy(&mut comb, &c, pcomb);
            cursor = col + 1;
        }
        (rem, comb)
    }

    /// Adds a row (tagged as input number `self.inserted`); returns whether
    /// it enlarged the span.
    pub fn insert(&mut self, row: &SparseRow) -> bool {
        let id = self.inserted;
        self.inserted += 1;
        let (rem, comb) = self.reduce(row);
        let Some((&col, lead)) = rem.iter().next() else { return false };
        let inv = lead.inv().expect("nonzero pivot");
        let mut own = SparseRow::new();
        own.insert(id, Scalar::one());
        axpy(&mut own, &Scalar::one().neg(), &comb);
        let scale = |r: &SparseRow| -> SparseRow { r.iter().map(|(k, v)| (*k, v * &inv)).collect() };
        let (prow, pcomb) = (scale(&rem), scale(&own));
        // keep fully reduced: clear `col` from existing rows
        for (r, cmb) in self.rows.values_mut() {
            if let Some(c) = r.get(&col).cloned() {
                axpy(r, &c.neg(), &prow);
                axpy(cmb, &c.neg(), &pcomb);
            }
        }
        self.rows.insert(col, (prow, pcomb));
        true
    }

    /// Coefficients expressing `target` as a combination of inserted rows,
    /// if it lies in the span.
    pub fn solve(&self, target: &SparseRow) -> Option<SparseRow> {
        let (rem, comb) = self.reduce(target);
        rem.is_empty().then_some(comb)
    }

    pub fn contains(&self, target: &SparseRow) -> bool {
        self.reduce(target).0.is_empty()
    }
}

/// y ← y + a·x
pub fn axpy(y: &mut SparseRow, a: &Scalar, x: &SparseRow) {
    if a.is_zero() {
        return;
    }
    for (k, v) in x {
        let e = y.entry(*k).or_insert_with(Scalar::zero);
        *e = &*e + &(a * v);
        if e.is_zero() {
            y.remove(k);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::make_field;

    #[test]
    fn kernel_of_a2_swap_condition() {
        // (λ, α₁ − α₂) = 0 with the A2 Cartan matrix: row (3, −3)
        let k = int_kernel(&[vec![3, -3]], 2);
        assert_eq!(k, vec![vec![1, 1]]);
        assert_eq!(int_kernel(&[], 2), vec![vec![1, 0], vec![0, 1]]);
        assert!(int_kernel(&[vec![1, 0], vec![0, 1]], 2).is_empty());
    }

    #[test]
    fn indices() {
        assert_eq!(lattice_index(&[vec![1, 1], vec![1, -1]], 2), Some(2));
        assert_eq!(lattice_index(&[vec![1, 0], vec![1, 1]], 2), Some(1));
        assert_eq!(lattice_index(&[vec![2, 4], vec![6, 3]], 2), Some(18));
        assert_eq!(lattice_index(&[vec![1, 1]], 2), None);
    }

    fn row(entries: &[(usize, Scalar)]) -> SparseRow {
        entries.iter().cloned().filter(|(_, v)| !v.is_zero()).collect()
    }

    #[test]
    fn rank_over_cyclotomic() {
        let f = make_field(5).unwrap();
        let q = f.q();
        let r1 = row(&[(0, Scalar::one()), (1, q.clone())]);
        let r2 = row(&[(0, q.clone()), (1, &q * &q)]);
        let r3 = row(&[(1, Scalar::one()), (2, f.q_int(2))]);
        assert_eq!(rank(vec![r1.clone(), r2.clone()]), 1);
        assert_eq!(rank(vec![r1.clone(), r2.clone(), r3.clone()]), 2);
        let mut e = Echelon::new();
        assert!(e.insert(&r1));
        assert!(!e.insert(&r2));
        assert!(e.insert(&r3));
        let target = row(&[(0, Scalar::from_int(2)), (1, &(&q * &Scalar::from_int(2)) + &Scalar::one()), (2, f.q_int(2))]);
        let comb = e.solve(&target).unwrap();
        let mut back = SparseRow::new();
        for (k, c) in &comb {
            axpy(&mut back, c, [&r1, &r2, &r3][*k]);
        }
        assert_eq!(back, target);
    }
}
