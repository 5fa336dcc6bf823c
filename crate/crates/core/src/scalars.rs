//! Exact arithmetic in the cyclotomic field ℚ(ζ_ℓ).
//!
//! A [`Scalar`] is a residue modulo the cyclotomic polynomial Φ_ℓ, stored as
//! an integer coefficient vector over a positive common denominator. Values
//! whose coefficients fit in a machine word use an inline representation;
//! any intermediate overflow falls back to big integers, so results are
//! always exact.

use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use smallvec::SmallVec;
use std::cell::RefCell;
use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::{Mutex, OnceLock};

#[derive(Debug)]
struct FieldData {
    ell: u32,
    degree: usize,
    modulus: Vec<i64>,
    /// x^k mod Φ_ℓ for 0 ≤ k < ℓ.
    powers: Vec<Vec<i64>>,
}

/// Handle to ℚ(ζ_ℓ). Cheap to copy; the underlying tables live for the
/// whole process.
#[derive(Clone, Copy)]
pub struct CyclotomicField(&'static FieldData);

impl PartialEq for CyclotomicField {
    fn eq(&self, other: &Self) -> bool {
        self.0.ell == other.0.ell
    }
}
impl Eq for CyclotomicField {}

impl fmt::Debug for CyclotomicField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Q(zeta_{})", self.0.ell)
    }
}

fn registry() -> &'static Mutex<HashMap<u32, &'static FieldData>> {
    static REG: OnceLock<Mutex<HashMap<u32, &'static FieldData>>> = OnceLock::new();
    REG.get_or_init(|| Mutex::new(HashMap::new()))
}

fn poly_divexact(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    // den is monic
    let mut rem: Vec<BigInt> = num.to_vec();
    let dd = den.len() - 1;
    let mut quo = vec![BigInt::zero(); num.len() - dd];
    for k in (0..quo.len()).rev() {
        let c = rem[k + dd].clone();
        if c.is_zero() {
            continue;
        }
        for (i, d) in den.iter().enumerate() {
            rem[k + i] -= &c * d;
        }
        quo[k] = c;
    }
    debug_assert!(rem.iter().all(|c| c.is_zero()));
    quo
}

/// Φ_n with integer coefficients, lowest degree first.
pub fn cyclotomic_polynomial(n: u32) -> Vec<BigInt> {
    let mut p = vec![BigInt::zero(); n as usize + 1];
    p[0] = BigInt::from(-1);
    p[n as usize] = BigInt::one();
    for d in 1..n {
        if n % d == 0 {
            p = poly_divexact(&p, &cyclotomic_polynomial(d));
        }
    }
    p
}

impl CyclotomicField {
    /// ℚ(ζ_n) for any n ≥ 1, without the odd-ℓ restriction.
    pub fn of_order(n: u32) -> CyclotomicField {
        assert!(n >= 1);
        let mut reg = registry().lock().unwrap();
        if let Some(d) = reg.get(&n) {
            return CyclotomicField(d);
        }
        let modulus: Vec<i64> = cyclotomic_polynomial(n)
            .iter()
            .map(|c| c.to_i64().expect("cyclotomic coefficient overflow"))
            .collect();
        let degree = modulus.len() - 1;
        let mut powers = Vec::with_capacity(n as usize);
        let mut cur = vec![0i64; degree];
        if degree > 0 {
            cur[0] = 1;
        }
        for _ in 0..n {
            powers.push(cur.clone());
            // multiply by x and reduce
            let top = if degree > 0 { cur[degree - 1] } else { 0 };
            let mut next = vec![0i64; degree];
            for i in (1..degree).rev() {
                next[i] = cur[i - 1];
            }
            for i in 0..degree {
                next[i] -= top * modulus[i];
            }
            cur = next;
        }
        let data: &'static FieldData = Box::leak(Box::new(FieldData { ell: n, degree, modulus, powers }));
        reg.insert(n, data);
        CyclotomicField(data)
    }

    pub fn ell(&self) -> u32 {
        self.0.ell
    }

    /// φ(ℓ), the degree of the extension.
    pub fn degree(&self) -> usize {
        self.0.degree
    }

    /// Coefficients of Φ_ℓ, lowest degree first.
    pub fn modulus(&self) -> &[i64] {
        &self.0.modulus
    }

    /// The primitive root q = ζ_ℓ raised to `k` (any sign).
    pub fn q_pow(&self, k: i64) -> Scalar {
        let e = k.rem_euclid(self.0.ell as i64) as usize;
        Scalar::from_small_coeffs(Some(*self), &self.0.powers[e], 1)
    }

    pub fn q(&self) -> Scalar {
        self.q_pow(1)
    }

    /// Embeds an arbitrary rational polynomial in q, reducing mod Φ_ℓ.
    pub fn from_poly(&self, coeffs: &[BigRational]) -> Scalar {
        let mut acc = Scalar::zero();
        for (k, c) in coeffs.iter().enumerate() {
            if !c.is_zero() {
                acc = &acc + &(&self.q_pow(k as i64) * &Scalar::from_rational(c));
            }
        }
        acc
    }

    /// q-integer [n]_q = (q^n − q^{−n})/(q − q^{−1}).
    pub fn q_int(&self, n: i64) -> Scalar {
        let num = &self.q_pow(n) - &self.q_pow(-n);
        let den = &self.q_pow(1) - &self.q_pow(-1);
        num.div(&den).expect("q - 1/q is nonzero for ell >= 3")
    }

    /// [n]_q! = [1]_q⋯[n]_q.
    pub fn q_factorial(&self, n: u32) -> Scalar {
        (1..=n as i64).fold(Scalar::one(), |acc, k| &acc * &self.q_int(k))
    }

    /// 1/[n]_q!, failing when the factorial vanishes.
    pub fn q_factorial_inv(&self, n: u32) -> Result<Scalar> {
        self.q_factorial(n).inv().map_err(|_| Error::ZeroQFactorial(n))
    }
}

/// Builds ℚ(ζ_ℓ) for odd ℓ ≥ 3.
pub fn make_field(ell: u32) -> Result<CyclotomicField> {
    if ell < 3 || ell % 2 == 0 {
        return Err(Error::EvenOrSmallEll(ell));
    }
    Ok(CyclotomicField::of_order(ell))
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
enum Repr {
    Small(SmallVec<[i64; 6]>, i64),
    Big(Vec<BigInt>, BigInt),
}

/// An element of ℚ(ζ_ℓ), canonical: reduced mod Φ_ℓ, trailing zeros
/// trimmed, coefficient content coprime to the positive denominator.
/// Rational values carry no field tag, so they combine with any field.
#[derive(Clone)]
pub struct Scalar {
    field: Option<CyclotomicField>,
    repr: Repr,
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        self.repr == other.repr && (self.field.is_none() || other.field.is_none() || self.field == other.field)
    }
}
impl Eq for Scalar {}

impl Hash for Scalar {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.repr.hash(state)
    }
}

fn join(a: Option<CyclotomicField>, b: Option<CyclotomicField>) -> Option<CyclotomicField> {
    match (a, b) {
        (Some(x), Some(y)) => {
            assert!(x == y, "mixed cyclotomic fields {:?} and {:?}", x, y);
            Some(x)
        }
        (x, None) => x,
        (None, y) => y,
    }
}

fn fits(v: i128) -> bool {
    v > i64::MIN as i128 && v <= i64::MAX as i128
}

/// Normalizes an i128 coefficient vector over `den > 0`.
fn normalize_wide(mut v: SmallVec<[i128; 12]>, den: i128) -> Repr {
    while v.last() == Some(&0) {
        v.pop();
    }
    if v.is_empty() {
        return Repr::Small(SmallVec::new(), 1);
    }
    let mut g = den;
    for c in v.iter() {
        if g == 1 {
            break;
        }
        g = g.gcd(c);
    }
    let den = den / g;
    if g != 1 {
        for c in v.iter_mut() {
            *c /= g;
        }
    }
    if fits(den) && v.iter().all(|&c| fits(c)) {
        Repr::Small(v.iter().map(|&c| c as i64).collect(), den as i64)
    } else {
        Repr::Big(v.iter().map(|&c| BigInt::from(c)).collect(), BigInt::from(den))
    }
}

fn normalize_big(mut v: Vec<BigInt>, mut den: BigInt) -> Repr {
    while v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
    if v.is_empty() {
        return Repr::Small(SmallVec::new(), 1);
    }
    if den.is_negative() {
        den = -den;
        for c in v.iter_mut() {
            *c = -&*c;
        }
    }
    let mut g = den.clone();
    for c in v.iter() {
        if g.is_one() {
            break;
        }
        g = g.gcd(c);
    }
    if !g.is_one() {
        den /= &g;
        for c in v.iter_mut() {
            *c /= &g;
        }
    }
    let small: Option<SmallVec<[i64; 6]>> = v.iter().map(|c| c.to_i64().filter(|&x| x != i64::MIN)).collect();
    match (small, den.to_i64()) {
        (Some(s), Some(d)) => Repr::Small(s, d),
        _ => Repr::Big(v, den),
    }
}

fn reduce_wide(prod: SmallVec<[i128; 12]>, f: CyclotomicField) -> Option<SmallVec<[i128; 12]>> {
    let d = f.0.degree;
    if prod.len() <= d {
        return Some(prod);
    }
    let mut out: SmallVec<[i128; 12]> = prod[..d].iter().copied().collect();
    let ell = f.0.ell as usize;
    for (k, &c) in prod.iter().enumerate().skip(d) {
        if c == 0 {
            continue;
        }
        let row = &f.0.powers[k % ell];
        for i in 0..d {
            if row[i] != 0 {
                out[i] = out[i].checked_add(c.checked_mul(row[i] as i128)?)?;
            }
        }
    }
    Some(out)
}

fn reduce_big(prod: Vec<BigInt>, f: Option<CyclotomicField>) -> Vec<BigInt> {
    let Some(f) = f else { return prod };
    let d = f.0.degree;
    if prod.len() <= d {
        return prod;
    }
    let mut out: Vec<BigInt> = prod[..d].to_vec();
    let ell = f.0.ell as usize;
    for (k, c) in prod.iter().enumerate().skip(d) {
        if c.is_zero() {
            continue;
        }
        let row = &f.0.powers[k % ell];
        for i in 0..d {
            if row[i] != 0 {
                out[i] += c * row[i];
            }
        }
    }
    out
}

impl Repr {
    fn to_big(&self) -> (Vec<BigInt>, BigInt) {
        match self {
            Repr::Small(v, d) => (v.iter().map(|&c| BigInt::from(c)).collect(), BigInt::from(*d)),
            Repr::Big(v, d) => (v.clone(), d.clone()),
        }
    }
    fn len(&self) -> usize {
        match self {
            Repr::Small(v, _) => v.len(),
            Repr::Big(v, _) => v.len(),
        }
    }
}

thread_local! {
    static INVERSES: RefCell<HashMap<Scalar, Scalar>> = RefCell::new(HashMap::new());
}

impl Scalar {
    fn from_repr(field: Option<CyclotomicField>, repr: Repr) -> Scalar {
        let field = if repr.len() <= 1 { None } else { field };
        Scalar { field, repr }
    }

    fn from_small_coeffs(field: Option<CyclotomicField>, coeffs: &[i64], den: i64) -> Scalar {
        let v: SmallVec<[i128; 12]> = coeffs.iter().map(|&c| c as i128).collect();
        Scalar::from_repr(field, normalize_wide(v, den as i128))
    }

    pub fn zero() -> Scalar {
        Scalar { field: None, repr: Repr::Small(SmallVec::new(), 1) }
    }

    pub fn one() -> Scalar {
        Scalar::from_int(1)
    }

    pub fn from_int(n: i64) -> Scalar {
        Scalar::from_small_coeffs(None, &[n], 1)
    }

    pub fn from_ratio(n: i64, d: i64) -> Scalar {
        assert!(d != 0);
        let (n, d) = if d < 0 { (-(n as i128), -(d as i128)) } else { (n as i128, d as i128) };
        Scalar::from_repr(None, normalize_wide(SmallVec::from_slice(&[n]), d))
    }

    pub fn from_bigint(n: &BigInt) -> Scalar {
        Scalar::from_repr(None, normalize_big(vec![n.clone()], BigInt::one()))
    }

    pub fn from_rational(r: &BigRational) -> Scalar {
        Scalar::from_repr(None, normalize_big(vec![r.numer().clone()], r.denom().clone()))
    }

    /// Builds a scalar from an integer numerator vector (in powers of q)
    /// and a nonzero denominator, reducing mod Φ_ℓ.
    pub fn from_parts(field: CyclotomicField, num: &[BigInt], den: &BigInt) -> Result<Scalar> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let v = reduce_big(num.to_vec(), Some(field));
        Ok(Scalar::from_repr(Some(field), normalize_big(v, den.clone())))
    }

    pub fn field(&self) -> Option<CyclotomicField> {
        self.field
    }

    pub fn is_zero(&self) -> bool {
        self.repr.len() == 0
    }

    pub fn is_one(&self) -> bool {
        matches!(&self.repr, Repr::Small(v, 1) if v.len() == 1 && v[0] == 1)
    }

    /// The value as a rational, if it lies in ℚ.
    pub fn as_rational(&self) -> Option<BigRational> {
        if self.repr.len() > 1 {
            return None;
        }
        let (v, d) = self.repr.to_big();
        Some(BigRational::new(v.first().cloned().unwrap_or_default(), d))
    }

    /// Reduced common-denominator form: (numerators in powers of q, den).
    pub fn to_parts(&self) -> (Vec<BigInt>, BigInt) {
        self.repr.to_big()
    }

    /// Rational coefficients in the power basis 1, q, …, q^{φ(ℓ)−1}.
    pub fn coeffs(&self) -> Vec<BigRational> {
        let (v, d) = self.repr.to_big();
        v.into_iter().map(|c| BigRational::new(c, d.clone())).collect()
    }

    pub fn neg(&self) -> Scalar {
        let repr = match &self.repr {
            Repr::Small(v, d) => Repr::Small(v.iter().map(|c| -c).collect(), *d),
            Repr::Big(v, d) => Repr::Big(v.iter().map(|c| -c).collect(), d.clone()),
        };
        Scalar { field: self.field, repr }
    }

    pub fn add(&self, other: &Scalar) -> Scalar {
        if other.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return other.clone();
        }
        let field = join(self.field, other.field);
        if let (Repr::Small(a, da), Repr::Small(b, db)) = (&self.repr, &other.repr) {
            let n = a.len().max(b.len());
            let mut v: SmallVec<[i128; 12]> = SmallVec::from_elem(0, n);
            let den;
            if da == db {
                for (i, c) in a.iter().enumerate() {
                    v[i] += *c as i128;
                }
                for (i, c) in b.iter().enumerate() {
                    v[i] += *c as i128;
                }
                den = *da as i128;
            } else {
                for (i, c) in a.iter().enumerate() {
                    v[i] += *c as i128 * *db as i128;
                }
                for (i, c) in b.iter().enumerate() {
                    v[i] += *c as i128 * *da as i128;
                }
                den = *da as i128 * *db as i128;
            }
            return Scalar::from_repr(field, normalize_wide(v, den));
        }
        let (a, da) = self.repr.to_big();
        let (b, db) = other.repr.to_big();
        let n = a.len().max(b.len());
        let mut v = vec![BigInt::zero(); n];
        for (i, c) in a.iter().enumerate() {
            v[i] += c * &db;
        }
        for (i, c) in b.iter().enumerate() {
            v[i] += c * &da;
        }
        Scalar::from_repr(field, normalize_big(v, da * db))
    }

    pub fn sub(&self, other: &Scalar) -> Scalar {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Scalar) -> Scalar {
        if self.is_zero() || other.is_zero() {
            return Scalar::zero();
        }
        if self.is_one() {
            return other.clone();
        }
        if other.is_one() {
            return self.clone();
        }
        let field = join(self.field, other.field);
        if let (Repr::Small(a, da), Repr::Small(b, db)) = (&self.repr, &other.repr) {
            if let Some(r) = mul_small(a, *da, b, *db, field) {
                return Scalar::from_repr(field, r);
            }
        }
        let (a, da) = self.repr.to_big();
        let (b, db) = other.repr.to_big();
        let mut prod = vec![BigInt::zero(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                prod[i + j] += x * y;
            }
        }
        Scalar::from_repr(field, normalize_big(reduce_big(prod, field), da * db))
    }

    /// Multiplicative inverse via the extended Euclidean algorithm mod Φ_ℓ.
    pub fn inv(&self) -> Result<Scalar> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if let Some(r) = self.as_rational() {
            return Ok(Scalar::from_rational(&r.recip()));
        }
        if let Some(hit) = INVERSES.with(|c| c.borrow().get(self).cloned()) {
            return Ok(hit);
        }
        let f = self.field.expect("irrational scalar carries its field");
        let inv = poly_inverse_mod(&self.coeffs(), f);
        let out = f.from_poly(&inv);
        INVERSES.with(|c| {
            let mut c = c.borrow_mut();
            if c.len() > 1 << 16 {
                c.clear();
            }
            c.insert(self.clone(), out.clone());
        });
        Ok(out)
    }

    pub fn div(&self, other: &Scalar) -> Result<Scalar> {
        Ok(self.mul(&other.inv()?))
    }

    pub fn pow(&self, e: i64) -> Result<Scalar> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut e = e.unsigned_abs();
        let mut acc = Scalar::one();
        let mut b = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&b);
            }
            b = b.mul(&b);
            e >>= 1;
        }
        Ok(acc)
    }

    /// Image under the Galois automorphism q ↦ q^k (k coprime to ℓ).
    pub fn galois(&self, k: i64) -> Scalar {
        let Some(f) = self.field else { return self.clone() };
        let (v, d) = self.repr.to_big();
        let mut acc = Scalar::zero();
        for (i, c) in v.iter().enumerate() {
            if !c.is_zero() {
                acc = acc.add(&f.q_pow(k * i as i64).mul(&Scalar::from_bigint(c)));
            }
        }
        acc.mul(&Scalar::from_rational(&BigRational::new(BigInt::one(), d)))
    }
}

fn mul_small(a: &[i64], da: i64, b: &[i64], db: i64, field: Option<CyclotomicField>) -> Option<Repr> {
    let mut prod: SmallVec<[i128; 12]> = SmallVec::from_elem(0, a.len() + b.len() - 1);
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = prod[i + j].checked_add(x as i128 * y as i128)?;
        }
    }
    let prod = match field {
        Some(f) => reduce_wide(prod, f)?,
        None => prod,
    };
    Some(normalize_wide(prod, da as i128 * db as i128))
}

fn trim(p: &mut Vec<BigRational>) {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

fn poly_divmod(a: &[BigRational], b: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
    let mut r = a.to_vec();
    trim(&mut r);
    let db = b.len() - 1;
    let lead = b[db].clone();
    if r.len() < b.len() {
        return (vec![], r);
    }
    let mut q = vec![BigRational::zero(); r.len() - db];
    for k in (0..q.len()).rev() {
        let c = &r[k + db] / &lead;
        if c.is_zero() {
            continue;
        }
        for (i, bi) in b.iter().enumerate() {
            r[k + i] = &r[k + i] - &c * bi;
        }
        q[k] = c;
    }
    trim(&mut r);
    (q, r)
}

fn poly_mul(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] = &out[i + j] + x * y;
        }
    }
    out
}

fn poly_sub(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let n = a.len().max(b.len());
    let mut out = vec![BigRational::zero(); n];
    for (i, x) in a.iter().enumerate() {
        out[i] = &out[i] + x;
    }
    for (i, x) in b.iter().enumerate() {
        out[i] = &out[i] - x;
    }
    trim(&mut out);
    out
}

fn poly_inverse_mod(a: &[BigRational], f: CyclotomicField) -> Vec<BigRational> {
    let m: Vec<BigRational> = f.modulus().iter().map(|&c| BigRational::from_integer(c.into())).collect();
    let (mut r0, mut r1) = (m.clone(), a.to_vec());
    trim(&mut r1);
    let (mut s0, mut s1): (Vec<BigRational>, Vec<BigRational>) = (vec![], vec![BigRational::one()]);
    while !r1.is_empty() {
        let (q, r) = poly_divmod(&r0, &r1);
        let s2 = poly_sub(&s0, &poly_mul(&q, &s1));
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s2);
    }
    // r0 is a nonzero constant because Φ_ℓ is irreducible
    assert_eq!(r0.len(), 1, "element shares a factor with the cyclotomic modulus");
    let c = r0[0].clone();
    let (_, s) = poly_divmod(&s0.iter().map(|x| x / &c).collect::<Vec<_>>(), &m);
    s
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (v, d) = self.repr.to_big();
        if v.is_empty() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        for (i, c) in v.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            parts.push(match i {
                0 => format!("{}", c),
                1 => format!("{}*q", c),
                _ => format!("{}*q^{}", c, i),
            });
        }
        let body = parts.join(" + ");
        if d.is_one() {
            write!(f, "{}", body)
        } else if parts.len() == 1 {
            write!(f, "{}/{}", body, d)
        } else {
            write!(f, "({})/{}", body, d)
        }
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $f:ident) => {
        impl std::ops::$tr<&Scalar> for &Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &Scalar) -> Scalar {
                Scalar::$f(self, rhs)
            }
        }
        impl std::ops::$tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                Scalar::$f(&self, &rhs)
            }
        }
    };
}
binop!(Add, add, add);
binop!(Sub, sub, sub);
binop!(Mul, mul, mul);

impl std::ops::Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar::neg(self)
    }
}
impl std::ops::Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar::neg(&self)
    }
}

/// Nonzero rational parameters Λ_1, …, Λ_m.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LambdaParam {
    values: Vec<BigRational>,
}

impl LambdaParam {
    pub fn new(values: Vec<BigRational>) -> Result<LambdaParam> {
        if values.iter().any(|v| v.is_zero()) {
            return Err(Error::NonGenericLambda("Lambda_i must be nonzero".into()));
        }
        Ok(LambdaParam { values })
    }

    pub fn constant(m: usize, v: i64) -> LambdaParam {
        LambdaParam { values: vec![BigRational::from_integer(v.into()); m] }
    }

    pub fn values(&self) -> &[BigRational] {
        &self.values
    }

    pub fn rank(&self) -> usize {
        self.values.len()
    }

    /// Λ_β = ∏ Λ_i^{β_i}.
    pub fn power(&self, beta: &[i64]) -> BigRational {
        let mut acc = BigRational::one();
        for (v, &b) in self.values.iter().zip(beta) {
            let p = if b >= 0 { v.clone() } else { v.recip() };
            for _ in 0..b.unsigned_abs() {
                acc *= &p;
            }
        }
        acc
    }

    pub fn scalar(&self, beta: &[i64]) -> Scalar {
        Scalar::from_rational(&self.power(beta))
    }
}

/// Checks that Λ_α^{order_factor·ℓ} ≠ 1 for every α in `weights`; returns
/// the first offending weight otherwise.
pub fn genericity_check(lambda: &LambdaParam, weights: &[Vec<i64>], ell: u32, order_factor: u32) -> std::result::Result<(), Vec<i64>> {
    let n = order_factor as usize * ell as usize;
    for w in weights {
        let la = lambda.power(w);
        let mut p = BigRational::one();
        for _ in 0..n {
            p *= &la;
        }
        if p.is_one() {
            return Err(w.clone());
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn phi3_is_quadratic() {
        let f = make_field(3).unwrap();
        assert_eq!(f.modulus(), &[1, 1, 1]);
        assert_eq!(f.degree(), 2);
        assert_eq!(make_field(5).unwrap().degree(), 4);
        assert_eq!(make_field(4).unwrap_err(), Error::EvenOrSmallEll(4));
        assert_eq!(make_field(1).unwrap_err(), Error::EvenOrSmallEll(1));
    }

    #[test]
    fn composite_moduli() {
        assert_eq!(CyclotomicField::of_order(9).modulus(), &[1, 0, 0, 1, 0, 0, 1]);
        assert_eq!(CyclotomicField::of_order(15).degree(), 8);
        assert_eq!(CyclotomicField::of_order(6).modulus(), &[1, -1, 1]);
    }

    #[test]
    fn roots_of_unity() {
        for ell in [3u32, 5, 7, 9] {
            let f = CyclotomicField::of_order(ell);
            let q = f.q();
            assert!((&q * &f.q_pow(ell as i64 - 1)).is_one());
            assert_eq!(Scalar::one().div(&q).unwrap(), f.q_pow(ell as i64 - 1));
            assert!(f.q_pow(ell as i64).is_one());
        }
        let f = make_field(3).unwrap();
        let s = &(&Scalar::one() + &f.q()) + &f.q_pow(2);
        assert!(s.is_zero());
    }

    #[test]
    fn q_integers() {
        let f = make_field(5).unwrap();
        assert!(f.q_int(1).is_one());
        assert_eq!(f.q_int(2), &f.q() + &f.q_pow(-1));
        assert!(f.q_int(5).is_zero());
        assert!(f.q_int(0).is_zero());
        assert_eq!(f.q_factorial_inv(5).unwrap_err(), Error::ZeroQFactorial(5));
        assert!(f.q_factorial_inv(4).is_ok());
    }

    #[test]
    fn q_int_matches_symmetric_sum() {
        for ell in [3u32, 5, 7] {
            let f = make_field(ell).unwrap();
            for n in 0..(2 * ell as i64) {
                let mut s = Scalar::zero();
                for k in 0..n {
                    s = &s + &f.q_pow(n - 1 - 2 * k);
                }
                assert_eq!(f.q_int(n), s, "ell={ell} n={n}");
            }
        }
    }

    #[test]
    fn inverse_matches_norm_route() {
        // a^{-1} = (∏_{σ≠1} σ(a)) / N(a)
        let f = make_field(7).unwrap();
        let a = f.from_poly(&[r(3), r(-1), r(0), r(2), r(5)]);
        let mut conj = Scalar::one();
        for k in 2..7 {
            conj = &conj * &a.galois(k);
        }
        let norm = &conj * &a;
        assert!(norm.as_rational().is_some());
        let via_norm = conj.div(&norm).unwrap();
        assert_eq!(a.inv().unwrap(), via_norm);
    }

    #[test]
    fn big_fallback_is_exact() {
        let f = make_field(5).unwrap();
        let big = Scalar::from_int(i64::MAX);
        let x = &big * &f.q();
        let y = &x * &x;
        let back = y.div(&x).unwrap();
        assert_eq!(back, x);
        let z = &(&y - &y) + &Scalar::one();
        assert!(z.is_one());
    }

    #[test]
    fn genericity() {
        let two = LambdaParam::constant(1, 2);
        assert!(genericity_check(&two, &[vec![1], vec![2]], 3, 1).is_ok());
        let one = LambdaParam::constant(1, 1);
        assert_eq!(genericity_check(&one, &[vec![1]], 3, 1), Err(vec![1]));
        let mixed = LambdaParam::new(vec![r(2), BigRational::new(1.into(), 2.into())]).unwrap();
        assert_eq!(genericity_check(&mixed, &[vec![1, 0], vec![1, 1]], 5, 1), Err(vec![1, 1]));
        let minus = LambdaParam::constant(1, -1);
        assert!(genericity_check(&minus, &[vec![1]], 3, 1).is_ok());
        assert_eq!(genericity_check(&minus, &[vec![1]], 3, 2), Err(vec![1]));
    }

    fn field_element(coeffs: Vec<(i64, i64)>) -> Scalar {
        let f = make_field(7).unwrap();
        f.from_poly(&coeffs.into_iter().map(|(n, d)| BigRational::new(n.into(), d.into())).collect::<Vec<_>>())
    }

    proptest::proptest! {
        #[test]
        fn nonzero_elements_invert(c in proptest::collection::vec((-20i64..20, 1i64..9), 6)) {
            let x = field_element(c);
            proptest::prop_assume!(!x.is_zero());
            let y = x.inv().unwrap();
            proptest::prop_assert!((&x * &y).is_one());
            proptest::prop_assert_eq!(y.inv().unwrap(), x);
        }

        #[test]
        fn galois_action_is_multiplicative(a in proptest::collection::vec((-9i64..9, 1i64..5), 6), b in proptest::collection::vec((-9i64..9, 1i64..5), 6), k in 1i64..7) {
            let (x, y) = (field_element(a), field_element(b));
            proptest::prop_assert_eq!((&x * &y).galois(k), &x.galois(k) * &y.galois(k));
            proptest::prop_assert_eq!((&x + &y).galois(k), &x.galois(k) + &y.galois(k));
        }
    }
}
