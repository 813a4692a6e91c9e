//! Finite fields `F_{p^m}` in a polynomial basis.
//!
//! An element is stored as the integer `Σ c_i p^i` of its coordinates
//! `(c_0, …, c_{m-1})` with respect to `1, x, …, x^{m-1}` in
//! `F_p[x]/(modulus)`. Multiplication and addition go through
//! logarithm / Zech tables built once per field, so elements are `Copy`.

use std::fmt;
use std::sync::Arc;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::ring::Ring;

/// Largest field order for which tables are built.
pub const MAX_FIELD_ORDER: u64 = 1 << 22;

/// Index of a field element (its coordinate vector read in base `p`).
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Fq(pub u32);

impl Fq {
    pub const ZERO: Fq = Fq(0);
    pub const ONE: Fq = Fq(1);

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

struct FieldInner {
    p: u64,
    m: u32,
    q: u64,
    modulus: Vec<u64>,
    exp: Vec<u32>,
    log: Vec<u32>,
    one_plus: Vec<u32>,
    neg: Vec<u32>,
}

/// A validated finite field `F_{p^m}`; cheap to clone and shareable across threads.
#[derive(Clone)]
pub struct FieldSpec(Arc<FieldInner>);

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}[{:?}]", self.0.q, self.0.modulus)
    }
}

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.p == other.0.p && self.0.modulus == other.0.modulus)
    }
}

impl Eq for FieldSpec {}

impl Serialize for FieldSpec {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("FieldSpec", 3)?;
        s.serialize_field("p", &self.0.p)?;
        s.serialize_field("m", &self.0.m)?;
        s.serialize_field("modulus", &self.0.modulus)?;
        s.end()
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Writes `q = p^m` with `p` prime, if possible.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let mut p = 2;
    while p * p <= q && !q.is_multiple_of(p) {
        p += 1;
    }
    if !q.is_multiple_of(p) {
        p = q;
    }
    let (mut rest, mut m) = (q, 0u32);
    while rest % p == 0 {
        rest /= p;
        m += 1;
    }
    (rest == 1).then_some((p, m))
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Dense polynomial arithmetic over `F_p`, coefficients least degree first.
pub(crate) mod fp_poly {
    pub fn trim(mut a: Vec<u64>) -> Vec<u64> {
        while a.last() == Some(&0) {
            a.pop();
        }
        a
    }

    pub fn inv_mod(a: u64, p: u64) -> u64 {
        let mut r = 1u64;
        let (mut b, mut e) = (a % p, p - 2);
        while e > 0 {
            if e & 1 == 1 {
                r = r * b % p;
            }
            b = b * b % p;
            e >>= 1;
        }
        r
    }

    pub fn sub(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let n = a.len().max(b.len());
        let out = (0..n)
            .map(|i| {
                let x = a.get(i).copied().unwrap_or(0);
                let y = b.get(i).copied().unwrap_or(0);
                (x + p - y) % p
            })
            .collect();
        trim(out)
    }

    pub fn mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = (out[i + j] + x * y) % p;
            }
        }
        trim(out)
    }

    pub fn rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
        let mut r = trim(a.to_vec());
        let dm = m.len() - 1;
        let lead_inv = inv_mod(m[dm], p);
        while r.len() > dm {
            let shift = r.len() - 1 - dm;
            let c = r[r.len() - 1] * lead_inv % p;
            for (i, &mi) in m.iter().enumerate() {
                r[shift + i] = (r[shift + i] + p - c * mi % p) % p;
            }
            r = trim(r);
        }
        r
    }

    pub fn mulmod(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Vec<u64> {
        rem(&mul(a, b, p), m, p)
    }

    pub fn powmod(a: &[u64], mut e: u128, m: &[u64], p: u64) -> Vec<u64> {
        let mut acc = vec![1u64];
        let mut base = rem(a, m, p);
        while e > 0 {
            if e & 1 == 1 {
                acc = mulmod(&acc, &base, m, p);
            }
            e >>= 1;
            if e > 0 {
                base = mulmod(&base, &base, m, p);
            }
        }
        acc
    }

    pub fn gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let (mut a, mut b) = (trim(a.to_vec()), trim(b.to_vec()));
        while !b.is_empty() {
            let r = rem(&a, &b, p);
            a = b;
            b = r;
        }
        a
    }

    /// Rabin's test: `f` of degree `m` is irreducible iff `x^{p^m} ≡ x`
    /// and `gcd(x^{p^{m/ℓ}} - x, f) = 1` for every prime `ℓ | m`.
    pub fn is_irreducible(f: &[u64], p: u64) -> bool {
        let f = trim(f.to_vec());
        if f.len() < 2 {
            return false;
        }
        let m = f.len() - 1;
        if m == 1 {
            return true;
        }
        let x = vec![0, 1];
        let frob_pow = |k: usize| {
            let mut acc = x.clone();
            for _ in 0..k {
                acc = powmod(&acc, p as u128, &f, p);
            }
            acc
        };
        if sub(&frob_pow(m), &x, p) != Vec::<u64>::new() {
            return false;
        }
        for l in super::prime_factors(m as u64) {
            let h = sub(&frob_pow(m / l as usize), &x, p);
            if gcd(&h, &f, p).len() != 1 {
                return false;
            }
        }
        true
    }
}

impl FieldSpec {
    /// Builds `F_{p^m}`. Without a modulus the least monic irreducible
    /// polynomial (ordered by the integer `Σ c_i p^i` of its lower
    /// coefficients) is used, so the presentation is reproducible.
    pub fn new(p: u64, m: u32, modulus: Option<&[u64]>) -> Result<FieldSpec> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if p == 2 {
            return Err(Error::EvenCharacteristic);
        }
        if m == 0 {
            return Err(Error::InvalidModulus("extension degree must be at least 1".into()));
        }
        let q = (p as u128).checked_pow(m).unwrap_or(u128::MAX);
        if q > MAX_FIELD_ORDER as u128 {
            return Err(Error::FieldTooLarge(q.min(u64::MAX as u128) as u64));
        }
        let q = q as u64;
        let modulus = match modulus {
            Some(coeffs) => {
                if coeffs.len() != m as usize + 1 {
                    return Err(Error::InvalidModulus(format!(
                        "expected {} coefficients, got {}",
                        m + 1,
                        coeffs.len()
                    )));
                }
                if coeffs.iter().any(|&c| c >= p) {
                    return Err(Error::InvalidModulus("coefficients must lie in 0..p".into()));
                }
                if coeffs[m as usize] != 1 {
                    return Err(Error::InvalidModulus("modulus must be monic".into()));
                }
                if !fp_poly::is_irreducible(coeffs, p) {
                    return Err(Error::ReducibleModulus { p });
                }
                coeffs.to_vec()
            }
            None => least_irreducible(p, m),
        };
        Ok(FieldSpec(Arc::new(build_tables(p, m, q, modulus))))
    }

    pub fn prime_field(p: u64) -> Result<FieldSpec> {
        FieldSpec::new(p, 1, None)
    }

    pub fn p(&self) -> u64 {
        self.0.p
    }

    pub fn m(&self) -> u32 {
        self.0.m
    }

    /// Cardinality `q = p^m`.
    pub fn q(&self) -> u64 {
        self.0.q
    }

    pub fn modulus(&self) -> &[u64] {
        &self.0.modulus
    }

    pub fn coords(&self, a: Fq) -> Vec<u64> {
        let mut v = a.0 as u64;
        (0..self.0.m)
            .map(|_| {
                let c = v % self.0.p;
                v /= self.0.p;
                c
            })
            .collect()
    }

    /// Element with the given coordinates; missing coordinates are zero and
    /// entries are reduced mod `p`.
    pub fn from_coords(&self, coords: &[u64]) -> Result<Fq> {
        if coords.len() > self.0.m as usize {
            return Err(Error::Parse(format!(
                "{} coordinates for a field of degree {}",
                coords.len(),
                self.0.m
            )));
        }
        let mut idx = 0u64;
        for &c in coords.iter().rev() {
            idx = idx * self.0.p + c % self.0.p;
        }
        Ok(Fq(idx as u32))
    }

    /// The class of `x` (for `m = 1` this is the integer 0, since `x ≡ -c_0`).
    pub fn generator_x(&self) -> Fq {
        if self.0.m == 1 {
            Fq(((self.0.p - self.0.modulus[0]) % self.0.p) as u32)
        } else {
            Fq(self.0.p as u32)
        }
    }

    pub fn elem(&self, a: Fq) -> FieldElement {
        FieldElement { spec: self.clone(), value: a }
    }

    pub fn pow_fq(&self, a: Fq, k: u128) -> Fq {
        if k == 0 {
            return Fq::ONE;
        }
        if a.is_zero() {
            return Fq::ZERO;
        }
        let order = (self.0.q - 1) as u128;
        let l = self.0.log[a.0 as usize] as u128;
        Fq(self.0.exp[((l * (k % order)) % order) as usize])
    }

    pub fn add_fq(&self, a: Fq, b: Fq) -> Fq {
        if a.is_zero() {
            return b;
        }
        if b.is_zero() {
            return a;
        }
        let order = self.0.q - 1;
        let la = self.0.log[a.0 as usize] as u64;
        let lb = self.0.log[b.0 as usize] as u64;
        let t = (lb + order - la) % order;
        let s = self.0.one_plus[t as usize];
        if s == 0 {
            return Fq::ZERO;
        }
        Fq(self.0.exp[((la + self.0.log[s as usize] as u64) % order) as usize])
    }

    pub fn neg_fq(&self, a: Fq) -> Fq {
        Fq(self.0.neg[a.0 as usize])
    }

    pub fn sub_fq(&self, a: Fq, b: Fq) -> Fq {
        self.add_fq(a, self.neg_fq(b))
    }

    pub fn mul_fq(&self, a: Fq, b: Fq) -> Fq {
        if a.is_zero() || b.is_zero() {
            return Fq::ZERO;
        }
        let order = self.0.q - 1;
        let s = self.0.log[a.0 as usize] as u64 + self.0.log[b.0 as usize] as u64;
        Fq(self.0.exp[(s % order) as usize])
    }

    pub fn inv_fq(&self, a: Fq) -> Option<Fq> {
        if a.is_zero() {
            return None;
        }
        let order = self.0.q - 1;
        let l = self.0.log[a.0 as usize] as u64;
        Some(Fq(self.0.exp[((order - l) % order) as usize]))
    }

    pub fn from_i64(&self, n: i64) -> Fq {
        Fq(n.rem_euclid(self.0.p as i64) as u32)
    }

    /// All `q - 1` nonzero elements in increasing index order.
    pub fn units(&self) -> impl Iterator<Item = Fq> + '_ {
        (1..self.0.q as u32).map(Fq)
    }

    pub fn elements(&self) -> impl Iterator<Item = Fq> + '_ {
        (0..self.0.q as u32).map(Fq)
    }

    /// Embedding of `self` into `target`, sending `x` to the least root of
    /// `self`'s modulus in `target`.
    pub fn embedding_into(&self, target: &FieldSpec) -> Result<Embedding> {
        if self.p() != target.p() || !target.m().is_multiple_of(self.m()) {
            return Err(Error::SpecMismatch);
        }
        let root = if self == target {
            self.generator_x()
        } else {
            target
                .elements()
                .find(|&r| {
                    let mut acc = Fq::ZERO;
                    for &c in self.modulus().iter().rev() {
                        acc = target.add_fq(target.mul_fq(acc, r), target.from_i64(c as i64));
                    }
                    acc.is_zero()
                })
                .ok_or(Error::SpecMismatch)?
        };
        let table = self
            .elements()
            .map(|a| {
                let mut acc = Fq::ZERO;
                for c in self.coords(a).into_iter().rev() {
                    acc = target.add_fq(target.mul_fq(acc, root), target.from_i64(c as i64));
                }
                acc
            })
            .collect();
        Ok(Embedding { source: self.clone(), target: target.clone(), table })
    }
}

fn least_irreducible(p: u64, m: u32) -> Vec<u64> {
    let q = p.pow(m);
    (0..q)
        .map(|mut idx| {
            let mut coeffs: Vec<u64> = (0..m)
                .map(|_| {
                    let c = idx % p;
                    idx /= p;
                    c
                })
                .collect();
            coeffs.push(1);
            coeffs
        })
        .find(|f| fp_poly::is_irreducible(f, p))
        .expect("irreducible polynomials exist in every degree")
}

fn build_tables(p: u64, m: u32, q: u64, modulus: Vec<u64>) -> FieldInner {
    let to_poly = |mut idx: u64| -> Vec<u64> {
        let v: Vec<u64> = (0..m)
            .map(|_| {
                let c = idx % p;
                idx /= p;
                c
            })
            .collect();
        fp_poly::trim(v)
    };
    let to_idx = |poly: &[u64]| -> u32 {
        let mut idx = 0u64;
        for &c in poly.iter().rev() {
            idx = idx * p + c;
        }
        idx as u32
    };
    let order = q - 1;
    let factors = prime_factors(order);
    let generator = (1..q)
        .map(to_poly)
        .find(|g| {
            factors
                .iter()
                .all(|&l| fp_poly::powmod(g, (order / l) as u128, &modulus, p) != vec![1])
        })
        .expect("multiplicative group of a finite field is cyclic");
    let mut exp = Vec::with_capacity(order as usize);
    let mut log = vec![u32::MAX; q as usize];
    let mut cur = vec![1u64];
    for k in 0..order {
        let idx = to_idx(&cur);
        exp.push(idx);
        log[idx as usize] = k as u32;
        cur = fp_poly::mulmod(&cur, &generator, &modulus, p);
    }
    let add_one = |idx: u32| -> u32 {
        let c0 = idx as u64 % p;
        (idx as u64 - c0 + (c0 + 1) % p) as u32
    };
    let one_plus = exp.iter().map(|&e| add_one(e)).collect();
    let neg = (0..q)
        .map(|idx| {
            let coords: Vec<u64> = to_poly(idx).iter().map(|&c| (p - c) % p).collect();
            to_idx(&coords)
        })
        .collect();
    FieldInner { p, m, q, modulus, exp, log, one_plus, neg }
}

impl Ring for FieldSpec {
    type Elem = Fq;

    fn zero(&self) -> Fq {
        Fq::ZERO
    }
    fn one(&self) -> Fq {
        Fq::ONE
    }
    fn is_zero(&self, a: &Fq) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &Fq, b: &Fq) -> Fq {
        self.add_fq(*a, *b)
    }
    fn neg(&self, a: &Fq) -> Fq {
        self.neg_fq(*a)
    }
    fn sub(&self, a: &Fq, b: &Fq) -> Fq {
        self.sub_fq(*a, *b)
    }
    fn mul(&self, a: &Fq, b: &Fq) -> Fq {
        self.mul_fq(*a, *b)
    }
    fn inv(&self, a: &Fq) -> Option<Fq> {
        self.inv_fq(*a)
    }
    fn frobenius(&self, a: &Fq, q: u64) -> Fq {
        self.pow_fq(*a, q as u128)
    }
    fn characteristic(&self) -> u64 {
        self.0.p
    }
    fn from_int(&self, n: i64) -> Fq {
        self.from_i64(n)
    }
    fn pow(&self, a: &Fq, k: u64) -> Fq {
        self.pow_fq(*a, k as u128)
    }
}

/// A field element bundled with its field, for the checked public API.
#[derive(Clone, PartialEq, Eq)]
pub struct FieldElement {
    spec: FieldSpec,
    value: Fq,
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.coords())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl FieldElement {
    pub fn from_coords(spec: &FieldSpec, coords: &[u64]) -> Result<Self> {
        Ok(spec.elem(spec.from_coords(coords)?))
    }

    pub fn spec(&self) -> &FieldSpec {
        &self.spec
    }

    pub fn value(&self) -> Fq {
        self.value
    }

    pub fn coords(&self) -> Vec<u64> {
        self.spec.coords(self.value)
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    pub fn arith(&self, other: &FieldElement, op: FieldOp) -> Result<FieldElement> {
        if self.spec != other.spec {
            return Err(Error::SpecMismatch);
        }
        let f = &self.spec;
        let (a, b) = (self.value, other.value);
        let value = match op {
            FieldOp::Add => f.add_fq(a, b),
            FieldOp::Sub => f.sub_fq(a, b),
            FieldOp::Mul => f.mul_fq(a, b),
            FieldOp::Div => f.mul_fq(a, f.inv_fq(b).ok_or(Error::DivisionByZero)?),
        };
        Ok(f.elem(value))
    }

    /// `a^{p^k}`.
    pub fn frobenius(&self, k: u32) -> FieldElement {
        let f = &self.spec;
        let mut v = self.value;
        for _ in 0..(k % f.m()) {
            v = f.pow_fq(v, f.p() as u128);
        }
        f.elem(v)
    }
}

impl Serialize for FieldElement {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.coords().serialize(serializer)
    }
}

/// The `q - 1` nonzero elements of `spec`, in index order.
pub fn unit_enumerate(spec: &FieldSpec) -> Vec<FieldElement> {
    spec.units().map(|a| spec.elem(a)).collect()
}

/// A field homomorphism given by its value table.
#[derive(Clone, Debug)]
pub struct Embedding {
    source: FieldSpec,
    target: FieldSpec,
    table: Vec<Fq>,
}

impl Embedding {
    pub fn source(&self) -> &FieldSpec {
        &self.source
    }

    pub fn target(&self) -> &FieldSpec {
        &self.target
    }

    pub fn apply(&self, a: Fq) -> Fq {
        self.table[a.0 as usize]
    }
}
