//! The ring-operations contract shared by every coefficient ring in the crate.
//!
//! Rings are *contexts*: a value implementing [`Ring`] knows how to build and
//! combine elements of type [`Ring::Elem`], which are plain data.  Finite
//! fields, truncated series over any ring and the Carlitz–Tate tower all
//! implement it, so the series engine can be stacked (`F_v`, `F_v[[ζ]]`,
//! `F_v[[ζ]][[z]]`, `K_n[[z]]`).

use std::fmt::Debug;

/// Absolute precision marker for values that are known exactly.
pub const EXACT: i64 = i64::MAX;

pub(crate) fn prec_add(a: i64, b: i64) -> i64 {
    if a == EXACT || b == EXACT {
        EXACT
    } else {
        a.saturating_add(b)
    }
}

pub(crate) fn prec_mul(a: i64, k: u64) -> i64 {
    if a == EXACT {
        EXACT
    } else {
        a.saturating_mul(k as i64)
    }
}

pub trait Ring: Clone + Debug + Send + Sync {
    type Elem: Clone + Debug + PartialEq + Send + Sync;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    /// Zero to the precision the element carries.
    fn is_zero(&self, a: &Self::Elem) -> bool;
    /// Zero with no precision loss at all. Only exact zeros may be dropped
    /// from sparse representations.
    fn is_exact_zero(&self, a: &Self::Elem) -> bool {
        self.is_zero(a)
    }
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    /// Inverse if `a` is a unit.
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;
    /// `a ↦ a^q` where `q` is a power of the characteristic. Series in `z`
    /// keep `z` fixed and act on coefficients; series in `ζ` raise `ζ` too.
    fn frobenius(&self, a: &Self::Elem, q: u64) -> Self::Elem;
    fn characteristic(&self) -> u64;

    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.add(a, &self.neg(b))
    }

    fn from_int(&self, n: i64) -> Self::Elem {
        let p = self.characteristic() as i64;
        let k = n.rem_euclid(p);
        let one = self.one();
        let mut acc = self.zero();
        for _ in 0..k {
            acc = self.add(&acc, &one);
        }
        acc
    }

    fn pow(&self, a: &Self::Elem, mut k: u64) -> Self::Elem {
        let mut base = a.clone();
        let mut acc = self.one();
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            k >>= 1;
            if k > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }

    fn eq_to_prec(&self, a: &Self::Elem, b: &Self::Elem) -> bool {
        self.is_zero(&self.sub(a, b))
    }
}
