//! Truncated power and Laurent series in one variable over any [`Ring`].
//!
//! A series stores the coefficients of exponents `low..low+len`; exponents in
//! `low+len..prec` are known to be zero and exponents `>= prec` are unknown.
//! `prec == EXACT` marks a polynomial (or Laurent polynomial) known exactly.
//! Only exact zeros are ever stripped from either end.

use crate::error::{Error, Result};
use crate::field::{FieldSpec, Fq};
use crate::ring::{prec_add, prec_mul, Ring, EXACT};
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Var {
    Z,
    Zeta,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TruncSeries<E> {
    var: Var,
    low: i64,
    coeffs: Vec<E>,
    prec: i64,
}

impl<E> TruncSeries<E> {
    pub fn var(&self) -> Var {
        self.var
    }

    /// Exponent of the first stored coefficient; meaningless for a series with no coefficients.
    pub fn low(&self) -> i64 {
        self.low
    }

    pub fn prec(&self) -> i64 {
        self.prec
    }

    pub fn coeffs(&self) -> &[E] {
        &self.coeffs
    }

    pub fn is_exact(&self) -> bool {
        self.prec == EXACT
    }

    /// One past the largest stored exponent.
    pub fn end(&self) -> i64 {
        self.low + self.coeffs.len() as i64
    }

    pub fn get(&self, e: i64) -> Option<&E> {
        if e < self.low {
            return None;
        }
        self.coeffs.get((e - self.low) as usize)
    }

    /// `(exponent, coefficient)` pairs of the stored coefficients.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &E)> {
        self.coeffs.iter().enumerate().map(move |(i, c)| (self.low + i as i64, c))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeriesOp {
    Add,
    Sub,
    Mul,
}

/// Context for series over `base` in `var`.
///
/// `work_prec` is the absolute precision given to inverses of exactly known
/// series that are not monomials. A non-`laurent` ring is `base[[var]]` and
/// refuses to invert series of positive valuation.
#[derive(Clone, Debug)]
pub struct SeriesRing<R: Ring> {
    pub base: R,
    pub var: Var,
    pub work_prec: i64,
    pub laurent: bool,
}

impl<R: Ring> SeriesRing<R> {
    pub fn new(base: R, var: Var, work_prec: i64, laurent: bool) -> Self {
        assert!(work_prec >= 1, "working precision must be positive");
        SeriesRing { base, var, work_prec, laurent }
    }

    /// Builds a normalized series from coefficients of exponents `low..`.
    pub fn make(&self, low: i64, coeffs: Vec<R::Elem>, prec: i64) -> TruncSeries<R::Elem> {
        let mut coeffs = coeffs;
        if prec != EXACT {
            let keep = (prec - low).max(0) as usize;
            coeffs.truncate(keep);
        }
        while coeffs.last().is_some_and(|c| self.base.is_exact_zero(c)) {
            coeffs.pop();
        }
        let lead = coeffs.iter().take_while(|c| self.base.is_exact_zero(c)).count();
        if lead == coeffs.len() {
            return TruncSeries { var: self.var, low: 0, coeffs: Vec::new(), prec };
        }
        coeffs.drain(..lead);
        TruncSeries { var: self.var, low: low + lead as i64, coeffs, prec }
    }

    pub fn constant(&self, c: R::Elem) -> TruncSeries<R::Elem> {
        self.make(0, vec![c], EXACT)
    }

    pub fn monomial(&self, c: R::Elem, e: i64) -> TruncSeries<R::Elem> {
        self.make(e, vec![c], EXACT)
    }

    /// The variable itself.
    pub fn gen(&self) -> TruncSeries<R::Elem> {
        self.monomial(self.base.one(), 1)
    }

    /// Exactly known `O(var^prec)`.
    pub fn big_o(&self, prec: i64) -> TruncSeries<R::Elem> {
        TruncSeries { var: self.var, low: 0, coeffs: Vec::new(), prec }
    }

    pub fn coeff(&self, f: &TruncSeries<R::Elem>, e: i64) -> R::Elem {
        f.get(e).cloned().unwrap_or_else(|| self.base.zero())
    }

    /// Lowest exponent whose coefficient is nonzero to precision.
    pub fn valuation(&self, f: &TruncSeries<R::Elem>) -> Option<i64> {
        f.terms().find(|(_, c)| !self.base.is_zero(c)).map(|(e, _)| e)
    }

    /// Lower bound on the exponents of the nonzero part (the precision if none).
    fn order_bound(&self, f: &TruncSeries<R::Elem>) -> i64 {
        if f.coeffs.is_empty() {
            f.prec
        } else {
            f.low
        }
    }

    pub fn truncate(&self, f: &TruncSeries<R::Elem>, prec: i64) -> TruncSeries<R::Elem> {
        self.make(f.low, f.coeffs.clone(), prec.min(f.prec))
    }

    /// Applies `op` to every coefficient, keeping exponents and precision.
    pub fn map_coeffs(
        &self,
        f: &TruncSeries<R::Elem>,
        op: impl Fn(&R::Elem) -> R::Elem,
    ) -> TruncSeries<R::Elem> {
        self.make(f.low, f.coeffs.iter().map(op).collect(), f.prec)
    }

    pub fn scale(&self, f: &TruncSeries<R::Elem>, c: &R::Elem) -> TruncSeries<R::Elem> {
        self.map_coeffs(f, |x| self.base.mul(c, x))
    }

    /// `f(var^k)`.
    pub fn dilate(&self, f: &TruncSeries<R::Elem>, k: u64) -> TruncSeries<R::Elem> {
        assert!(k >= 1);
        let mut coeffs = Vec::with_capacity(f.coeffs.len() * k as usize);
        for (i, c) in f.coeffs.iter().enumerate() {
            if i > 0 {
                coeffs.extend((1..k).map(|_| self.base.zero()));
            }
            coeffs.push(c.clone());
        }
        self.make(f.low * k as i64, coeffs, prec_mul(f.prec, k))
    }

    pub fn checked(
        &self,
        f: &TruncSeries<R::Elem>,
        g: &TruncSeries<R::Elem>,
        op: SeriesOp,
    ) -> Result<TruncSeries<R::Elem>> {
        if f.var != self.var || g.var != self.var {
            return Err(Error::VarMismatch);
        }
        Ok(match op {
            SeriesOp::Add => self.add(f, g),
            SeriesOp::Sub => self.sub(f, g),
            SeriesOp::Mul => self.mul(f, g),
        })
    }

    /// Inverse of a series whose lowest coefficient is a unit of the base.
    pub fn try_inv(&self, f: &TruncSeries<R::Elem>) -> Result<TruncSeries<R::Elem>> {
        let v = self.valuation(f).ok_or(Error::ZeroInput)?;
        if !self.laurent && v != 0 {
            return Err(Error::NonUnitLeadingCoefficient);
        }
        let c0_inv = self
            .base
            .inv(&self.coeff(f, v))
            .ok_or(Error::NonUnitLeadingCoefficient)?;
        let monomial = f.end() == v + 1;
        let rel = match (f.prec == EXACT, monomial) {
            (true, true) => {
                return Ok(self.make(-v, vec![c0_inv], EXACT));
            }
            (true, false) => (self.work_prec + v).max(1),
            (false, _) => f.prec - v,
        };
        let shifted: Vec<R::Elem> = (0..rel).map(|i| self.coeff(f, v + i)).collect();
        let mut g: Vec<R::Elem> = Vec::with_capacity(rel as usize);
        g.push(c0_inv.clone());
        for k in 1..rel as usize {
            let mut acc = self.base.zero();
            for j in 1..=k {
                if self.base.is_exact_zero(&shifted[j]) {
                    continue;
                }
                acc = self.base.add(&acc, &self.base.mul(&shifted[j], &g[k - j]));
            }
            g.push(self.base.neg(&self.base.mul(&c0_inv, &acc)));
        }
        Ok(self.make(-v, g, rel - v))
    }

    /// Splits `f` as `Σ_j var^j g_j(var^k)` for `0 <= j < k`.
    pub fn split_by_residue(&self, f: &TruncSeries<R::Elem>, k: u64) -> Vec<TruncSeries<R::Elem>> {
        assert!(k >= 1);
        let k = k as i64;
        (0..k)
            .map(|j| {
                let prec = if f.prec == EXACT { EXACT } else { (f.prec - j + k - 1).div_euclid(k) };
                let first = (f.low - j + k - 1).div_euclid(k);
                let last = (f.end() - j + k - 1).div_euclid(k);
                let coeffs = (first..last).map(|m| self.coeff(f, j + k * m)).collect();
                self.make(first, coeffs, prec)
            })
            .collect()
    }

    /// Inverse of [`Self::split_by_residue`].
    pub fn reassemble(&self, parts: &[TruncSeries<R::Elem>]) -> TruncSeries<R::Elem> {
        let k = parts.len() as u64;
        let mut acc = self.zero();
        for (j, g) in parts.iter().enumerate() {
            let term = self.mul(&self.monomial(self.base.one(), j as i64), &self.dilate(g, k));
            acc = self.add(&acc, &term);
        }
        acc
    }
}

impl<R: Ring> Ring for SeriesRing<R> {
    type Elem = TruncSeries<R::Elem>;

    fn zero(&self) -> Self::Elem {
        self.big_o(EXACT)
    }

    fn one(&self) -> Self::Elem {
        self.constant(self.base.one())
    }

    fn is_zero(&self, a: &Self::Elem) -> bool {
        a.coeffs.iter().all(|c| self.base.is_zero(c))
    }

    fn is_exact_zero(&self, a: &Self::Elem) -> bool {
        a.coeffs.is_empty() && a.prec == EXACT
    }

    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        debug_assert!(a.var == self.var && b.var == self.var);
        let prec = a.prec.min(b.prec);
        if a.coeffs.is_empty() {
            return self.truncate(b, prec);
        }
        if b.coeffs.is_empty() {
            return self.truncate(a, prec);
        }
        let low = a.low.min(b.low);
        let end = a.end().max(b.end()).min(prec.max(low));
        let coeffs = (low..end)
            .map(|e| match (a.get(e), b.get(e)) {
                (Some(x), Some(y)) => self.base.add(x, y),
                (Some(x), None) => x.clone(),
                (None, Some(y)) => y.clone(),
                (None, None) => self.base.zero(),
            })
            .collect();
        self.make(low, coeffs, prec)
    }

    fn neg(&self, a: &Self::Elem) -> Self::Elem {
        self.map_coeffs(a, |c| self.base.neg(c))
    }

    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        debug_assert!(a.var == self.var && b.var == self.var);
        let prec = prec_add(self.order_bound(a), b.prec).min(prec_add(self.order_bound(b), a.prec));
        if a.coeffs.is_empty() || b.coeffs.is_empty() {
            return self.big_o(prec);
        }
        let low = a.low + b.low;
        let full = a.coeffs.len() + b.coeffs.len() - 1;
        let len = if prec == EXACT { full } else { full.min((prec - low).max(0) as usize) };
        let mut out = vec![self.base.zero(); len];
        for (i, x) in a.coeffs.iter().enumerate() {
            if i >= len || self.base.is_exact_zero(x) {
                continue;
            }
            for (j, y) in b.coeffs.iter().enumerate().take(len - i) {
                if self.base.is_exact_zero(y) {
                    continue;
                }
                out[i + j] = self.base.add(&out[i + j], &self.base.mul(x, y));
            }
        }
        self.make(low, out, prec)
    }

    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem> {
        self.try_inv(a).ok()
    }

    fn frobenius(&self, a: &Self::Elem, q: u64) -> Self::Elem {
        match self.var {
            Var::Z => self.map_coeffs(a, |c| self.base.frobenius(c, q)),
            Var::Zeta => {
                let f = self.map_coeffs(a, |c| self.base.frobenius(c, q));
                self.dilate(&f, q)
            }
        }
    }

    fn characteristic(&self) -> u64 {
        self.base.characteristic()
    }

    fn from_int(&self, n: i64) -> Self::Elem {
        self.constant(self.base.from_int(n))
    }
}

/// `F_v[[ζ]]` or `F_v((ζ))`.
pub type ZetaRing = SeriesRing<FieldSpec>;
pub type ZetaSeries = TruncSeries<Fq>;
/// `F_v[[ζ]][[z]]`.
pub type RzRing = SeriesRing<ZetaRing>;
pub type RzSeries = TruncSeries<ZetaSeries>;

/// The base ring `R[[z]] = F_v[[ζ]][[z]]` with its working precisions.
#[derive(Clone, Debug)]
pub struct BaseRingSpec {
    pub field: FieldSpec,
    /// Working precision `M` in `ζ`.
    pub zeta_prec: i64,
    /// Working precision `N` in `z`.
    pub z_prec: i64,
}

impl PartialEq for BaseRingSpec {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field
            && self.zeta_prec == other.zeta_prec
            && self.z_prec == other.z_prec
    }
}

impl BaseRingSpec {
    pub fn new(field: FieldSpec, zeta_prec: i64, z_prec: i64) -> Result<Self> {
        if zeta_prec < 1 || z_prec < 1 {
            return Err(Error::PrecisionExhausted("precisions must be at least 1".into()));
        }
        Ok(BaseRingSpec { field, zeta_prec, z_prec })
    }

    /// `#F_v`.
    pub fn q_v(&self) -> u64 {
        self.field.q()
    }

    /// `R = F_v[[ζ]]`.
    pub fn r_ring(&self) -> ZetaRing {
        SeriesRing::new(self.field.clone(), Var::Zeta, self.zeta_prec, false)
    }

    /// `K = F_v((ζ))`.
    pub fn k_ring(&self) -> ZetaRing {
        SeriesRing::new(self.field.clone(), Var::Zeta, self.zeta_prec, true)
    }

    pub fn rz_ring(&self) -> RzRing {
        SeriesRing::new(self.r_ring(), Var::Z, self.z_prec, true)
    }

    /// Same precisions over another coefficient field.
    pub fn with_field(&self, field: FieldSpec) -> Self {
        BaseRingSpec { field, ..self.clone() }
    }

    /// `ζ` as an exact element of `R`.
    pub fn zeta(&self) -> ZetaSeries {
        self.r_ring().gen()
    }

    /// `z - ζ^w` as an exact element of `R[[z]]`.
    pub fn z_minus_zeta_pow(&self, w: u64) -> RzSeries {
        let r = self.r_ring();
        let rz = self.rz_ring();
        let c = r.neg(&r.monomial(Fq::ONE, w as i64));
        rz.make(0, vec![c, r.one()], EXACT)
    }

    pub fn z_minus_zeta(&self) -> RzSeries {
        self.z_minus_zeta_pow(1)
    }
}

/// Transports a series in `z` over `F[[ζ]]` along a field embedding `F -> F'`.
pub fn embed_rz(dst: &RzRing, f: &RzSeries, emb: &crate::field::Embedding) -> RzSeries {
    let r = &dst.base;
    let coeffs = f
        .coeffs()
        .iter()
        .map(|c| r.make(c.low(), c.coeffs().iter().map(|&a| emb.apply(a)).collect(), c.prec()))
        .collect();
    dst.make(f.low(), coeffs, f.prec())
}

/// Result of dividing out the largest power of `z - ζ^w`.
#[derive(Clone, Debug, PartialEq)]
pub struct ZetaValuation {
    pub d: u32,
    pub cofactor: RzSeries,
}

/// Divides `f` by `z - ζ^w` as often as the remainder `f(ζ^w)` vanishes to
/// ζ-precision at least `budget`.
///
/// A remainder that is zero only to a precision below `budget` is neither
/// accepted nor rejected and yields `PrecisionExhausted`.
pub fn z_minus_zeta_valuation(
    rz: &RzRing,
    f: &RzSeries,
    w: u64,
    budget: i64,
) -> Result<ZetaValuation> {
    let r = &rz.base;
    if rz.is_zero(f) {
        return Err(Error::ZeroInput);
    }
    if f.low() < 0 {
        return Err(Error::NotAShtuka("negative powers of z".into()));
    }
    let mut cur = f.clone();
    let mut d = 0u32;
    loop {
        let (rem, quot) = synthetic_division(rz, &cur, w);
        if !r.is_zero(&rem) {
            return Ok(ZetaValuation { d, cofactor: cur });
        }
        if rem.prec() < budget {
            return Err(Error::PrecisionExhausted(format!(
                "remainder after {d} divisions by (z - ζ^{w}) vanishes only to ζ-precision {} < {budget}",
                rem.prec()
            )));
        }
        if rz.is_zero(&quot) && quot.prec() != EXACT {
            return Err(Error::PrecisionExhausted(format!(
                "quotient after {} divisions is zero to z-precision {}",
                d + 1,
                quot.prec()
            )));
        }
        cur = quot;
        d += 1;
    }
}

/// Returns `(f(ζ^w), (f - f(ζ^w)) / (z - ζ^w))` with tight ζ-precisions.
fn synthetic_division(rz: &RzRing, f: &RzSeries, w: u64) -> (ZetaSeries, RzSeries) {
    let r = &rz.base;
    let c = r.monomial(Fq::ONE, w as i64);
    let n = f.prec();
    let cap = |x: ZetaSeries, i: i64| -> ZetaSeries {
        // unknown z-terms of exponent >= n contribute O(ζ^{w(n-i)})
        if n == EXACT {
            x
        } else {
            r.truncate(&x, w as i64 * (n - i))
        }
    };
    let top = f.end();
    let mut quot = vec![r.zero(); top.max(1) as usize - 1];
    let mut carry = r.zero();
    for i in (1..top).rev() {
        carry = r.add(&rz.coeff(f, i), &r.mul(&c, &carry));
        quot[(i - 1) as usize] = cap(carry.clone(), i);
    }
    let rem = cap(r.add(&rz.coeff(f, 0), &r.mul(&c, &carry)), 0);
    let qprec = if n == EXACT { EXACT } else { n - 1 };
    (rem, rz.make(0, quot, qprec))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn f3() -> FieldSpec {
        FieldSpec::prime_field(3).unwrap()
    }

    fn poly_ring(var: Var) -> SeriesRing<FieldSpec> {
        SeriesRing::new(f3(), var, 8, true)
    }

    fn s(ring: &SeriesRing<FieldSpec>, low: i64, c: &[i64], prec: i64) -> ZetaSeries {
        ring.make(low, c.iter().map(|&x| ring.base.from_i64(x)).collect(), prec)
    }

    #[test]
    fn arithmetic_examples() {
        let z = poly_ring(Var::Z);
        let a = s(&z, 0, &[1, 1], 3);
        let b = s(&z, 0, &[1, -1], 3);
        assert_eq!(z.mul(&a, &b), s(&z, 0, &[1, 0, -1], 3));
        let l = s(&z, -1, &[1, 1], 2);
        assert_eq!(z.add(&l, &s(&z, 0, &[1], 2)), s(&z, -1, &[1, 2], 2));
        let zeta = poly_ring(Var::Zeta);
        let p = zeta.mul(&s(&zeta, 0, &[1, 1], 2), &s(&zeta, 0, &[1, 2], 2));
        assert_eq!(p, s(&zeta, 0, &[1], 2));
        assert_eq!(p.prec(), 2);
    }

    #[test]
    fn var_mismatch_is_reported() {
        let z = poly_ring(Var::Z);
        let zeta = poly_ring(Var::Zeta);
        assert_eq!(
            z.checked(&z.one(), &zeta.one(), SeriesOp::Add).unwrap_err(),
            Error::VarMismatch
        );
    }

    #[test]
    fn inversion_examples() {
        let z = poly_ring(Var::Z);
        let g = z.try_inv(&s(&z, 0, &[1, -1], 3)).unwrap();
        assert_eq!(g, s(&z, 0, &[1, 1, 1], 3));
        assert_eq!(z.try_inv(&z.gen()).unwrap(), s(&z, -1, &[1], EXACT));
    }

    #[test]
    fn inverse_of_z_minus_zeta() {
        let base = BaseRingSpec::new(f3(), 3, 3).unwrap();
        // over R = F_3[[ζ]] the constant term -ζ is not a unit
        assert_eq!(
            base.rz_ring().try_inv(&base.z_minus_zeta()).unwrap_err(),
            Error::NonUnitLeadingCoefficient
        );
        // over K = F_3((ζ)) the inverse is -Σ ζ^{-k-1} z^k
        let kz = SeriesRing::new(base.k_ring(), Var::Z, 3, true);
        let g = kz.try_inv(&base.z_minus_zeta()).unwrap();
        let k = base.k_ring();
        for i in 0..3 {
            assert_eq!(kz.coeff(&g, i), k.monomial(f3().from_i64(-1), -i - 1));
        }
        assert!(kz.eq_to_prec(&kz.mul(&g, &base.z_minus_zeta()), &kz.one()));
    }

    #[test]
    fn valuation_examples() {
        let base = BaseRingSpec::new(f3(), 6, 8).unwrap();
        let rz = base.rz_ring();
        let v = z_minus_zeta_valuation(&rz, &base.z_minus_zeta(), 1, 6).unwrap();
        assert_eq!(v.d, 1);
        assert_eq!(v.cofactor, rz.one());
        let r = base.r_ring();
        let cube = rz.make(0, vec![r.neg(&r.monomial(Fq::ONE, 3)), r.zero(), r.zero(), r.one()], EXACT);
        let v = z_minus_zeta_valuation(&rz, &cube, 1, 6).unwrap();
        assert_eq!((v.d, v.cofactor), (3, rz.one()));
        let one_plus_z = rz.make(0, vec![r.one(), r.one()], EXACT);
        let v = z_minus_zeta_valuation(&rz, &one_plus_z, 1, 6).unwrap();
        assert_eq!((v.d, v.cofactor), (0, one_plus_z));
        assert_eq!(z_minus_zeta_valuation(&rz, &rz.zero(), 1, 6).unwrap_err(), Error::ZeroInput);
    }

    #[test]
    fn low_precision_remainder_is_not_certified() {
        let base = BaseRingSpec::new(f3(), 6, 8).unwrap();
        let rz = base.rz_ring();
        let r = base.r_ring();
        // (z - ζ) + ζ^4 looks divisible to ζ-precision 4 only
        let f = rz.make(0, vec![r.truncate(&r.neg(&r.gen()), 4), r.one()], EXACT);
        assert!(matches!(
            z_minus_zeta_valuation(&rz, &f, 1, 6),
            Err(Error::PrecisionExhausted(_))
        ));
    }

    #[test]
    fn split_examples() {
        let z = poly_ring(Var::Z);
        let f = s(&z, 0, &[1, 1, 1, 1], EXACT);
        let parts = z.split_by_residue(&f, 2);
        assert_eq!(parts, vec![s(&z, 0, &[1, 1], EXACT), s(&z, 0, &[1, 1], EXACT)]);
        let parts = z.split_by_residue(&z.gen(), 3);
        assert_eq!(parts, vec![z.zero(), z.one(), z.zero()]);
    }

    fn arb_series(len: usize, prec: i64) -> impl Strategy<Value = ZetaSeries> {
        proptest::collection::vec(0u32..3, len).prop_map(move |c| {
            poly_ring(Var::Z).make(0, c.into_iter().map(Fq).collect(), prec)
        })
    }

    fn arb_rz(base: BaseRingSpec) -> impl Strategy<Value = RzSeries> {
        proptest::collection::vec(proptest::collection::vec(0u32..3, 3), 1..5).prop_map(
            move |rows| {
                let r = base.r_ring();
                let coeffs = rows.into_iter().map(|c| r.make(0, c.into_iter().map(Fq).collect(), EXACT)).collect();
                base.rz_ring().make(0, coeffs, EXACT)
            },
        )
    }

    proptest! {
        #[test]
        fn split_round_trip(f in arb_series(12, 12), k in 1u64..=9) {
            let z = poly_ring(Var::Z);
            let back = z.reassemble(&z.split_by_residue(&f, k));
            prop_assert_eq!(back.prec(), 12);
            prop_assert_eq!(back, f);
        }

        #[test]
        fn inverse_is_two_sided(mut f in arb_series(8, 8)) {
            let z = poly_ring(Var::Z);
            if z.is_zero(&f) || z.valuation(&f) != Some(0) {
                f = z.add(&f, &z.make(0, vec![Fq::ONE], 8));
            }
            prop_assume!(z.valuation(&f) == Some(0));
            let g = z.try_inv(&f).unwrap();
            prop_assert!(z.eq_to_prec(&z.mul(&f, &g), &z.one()));
            prop_assert!(z.eq_to_prec(&z.mul(&g, &f), &z.one()));
            prop_assert_eq!(z.mul(&f, &g).prec(), 8);
        }

        #[test]
        fn valuation_is_multiplicative(
            f in arb_rz(BaseRingSpec::new(FieldSpec::prime_field(3).unwrap(), 8, 16).unwrap()),
            g in arb_rz(BaseRingSpec::new(FieldSpec::prime_field(3).unwrap(), 8, 16).unwrap()),
            a in 0u32..3, b in 0u32..3,
        ) {
            let base = BaseRingSpec::new(FieldSpec::prime_field(3).unwrap(), 8, 16).unwrap();
            let rz = base.rz_ring();
            prop_assume!(!rz.is_zero(&f) && !rz.is_zero(&g));
            let f = rz.mul(&f, &rz.pow(&base.z_minus_zeta(), a as u64));
            let g = rz.mul(&g, &rz.pow(&base.z_minus_zeta(), b as u64));
            let vf = z_minus_zeta_valuation(&rz, &f, 1, 8).unwrap();
            let vg = z_minus_zeta_valuation(&rz, &g, 1, 8).unwrap();
            let vfg = z_minus_zeta_valuation(&rz, &rz.mul(&f, &g), 1, 8).unwrap();
            prop_assert!(vf.d >= a && vg.d >= b);
            prop_assert_eq!(vfg.d, vf.d + vg.d);
            let rebuilt = rz.mul(&vf.cofactor, &rz.pow(&base.z_minus_zeta(), vf.d as u64));
            prop_assert_eq!(rebuilt, f);
        }
    }
}
