//! The Carlitz–Tate tower `K_n = K(l_0, …, l_n)` over `K = F((ζ))`.
//!
//! `K_n` is presented as a quotient ring with relations
//! `l_0^{q_v-1} = -ζ` and `l_i^{q_v} + ζ l_i = l_{i-1}` for `1 <= i <= n`.
//! Elements are `K`-combinations of the basis monomials `l_0^{e_0}⋯l_n^{e_n}`
//! with `e_0 < q_v - 1` and `e_i < q_v`, indexed in mixed radix
//! `e_0 + (q_v-1)(e_1 + q_v(e_2 + …))`.
//!
//! The coefficient field may be any extension of `F_{q_v}`; `q_v` is the
//! Frobenius exponent and the size of the residue field of the character.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, OnceLock};

use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::field::{FieldSpec, Fq};
use crate::ring::{prec_add, Ring, EXACT};
use crate::series::{BaseRingSpec, SeriesRing, TruncSeries, Var, ZetaRing, ZetaSeries};

/// Reduced form of a product of two basis monomials: `(basis index, ζ-power, coefficient)`.
type Reduction = Vec<(u32, u32, Fq)>;

struct TowerInner {
    base: BaseRingSpec,
    q_v: u64,
    level: u32,
    k: ZetaRing,
    exps: Vec<Vec<u32>>,
    /// Position of each basis monomial in the exponent-sum radix, additive under products.
    code: Vec<u32>,
    table: Vec<Reduction>,
    frob_images: OnceLock<Vec<TowerElement>>,
}

#[derive(Clone)]
pub struct TowerSpec(Arc<TowerInner>);

impl fmt::Debug for TowerSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "K_{}(q_v={}, over {:?})", self.0.level, self.0.q_v, self.0.base.field)
    }
}

impl PartialEq for TowerSpec {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.base == other.0.base && self.0.q_v == other.0.q_v && self.0.level == other.0.level)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TowerElement {
    level: u32,
    terms: BTreeMap<u32, ZetaSeries>,
    /// Every basis coordinate is known modulo `ζ^prec`.
    prec: i64,
}

impl TowerElement {
    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn terms(&self) -> &BTreeMap<u32, ZetaSeries> {
        &self.terms
    }

    pub fn prec(&self) -> i64 {
        self.prec
    }
}

impl TowerSpec {
    /// `K_n` over `K = F_v((ζ))` with `q_v = #F_v`.
    pub fn build(base: &BaseRingSpec, level: u32) -> Result<TowerSpec> {
        TowerSpec::build_over(base, base.q_v(), level)
    }

    /// `K_n` with Frobenius exponent `q_v` over a coefficient field containing `F_{q_v}`.
    pub fn build_over(base: &BaseRingSpec, q_v: u64, level: u32) -> Result<TowerSpec> {
        let field = &base.field;
        let p = field.p();
        let mut k = 0u32;
        let mut t = 1u64;
        while t < q_v {
            t *= p;
            k += 1;
        }
        if t != q_v || k == 0 || !field.m().is_multiple_of(k) {
            return Err(Error::CharacteristicMismatch(format!(
                "q_v = {q_v} is not the order of a subfield of F_{}",
                field.q()
            )));
        }
        let q = q_v as u32;
        let n = level as usize;
        let radix: Vec<u32> = (0..=n).map(|i| if i == 0 { q - 1 } else { q }).collect();
        let sum_radix: Vec<u32> = (0..=n).map(|i| if i == 0 { 2 * q - 3 } else { 2 * q - 1 }).collect();
        let degree: usize = radix.iter().map(|&r| r as usize).product();
        let table_len: usize = sum_radix.iter().map(|&r| r as usize).product();
        if table_len > 1 << 22 {
            return Err(Error::SizeLimit { requested: table_len as u128, cap: 1 << 22 });
        }
        let exps: Vec<Vec<u32>> = (0..degree)
            .map(|mut idx| {
                radix
                    .iter()
                    .map(|&r| {
                        let e = (idx % r as usize) as u32;
                        idx /= r as usize;
                        e
                    })
                    .collect()
            })
            .collect();
        let weight: Vec<u32> = sum_radix
            .iter()
            .scan(1u32, |w, &r| {
                let cur = *w;
                *w *= r;
                Some(cur)
            })
            .collect();
        let code = exps
            .iter()
            .map(|e| e.iter().zip(&weight).map(|(a, w)| a * w).sum())
            .collect();
        let mut reducer = Reducer { q, p, radix: radix.clone(), memo: HashMap::new() };
        let table = (0..table_len)
            .map(|mut idx| {
                let e: Vec<u32> = sum_radix
                    .iter()
                    .map(|&r| {
                        let x = (idx % r as usize) as u32;
                        idx /= r as usize;
                        x
                    })
                    .collect();
                reducer
                    .reduce(&e)
                    .iter()
                    .map(|(&(b, z), &c)| (b, z, field.from_i64(c as i64)))
                    .collect()
            })
            .collect();
        Ok(TowerSpec(Arc::new(TowerInner {
            base: base.clone(),
            q_v,
            level,
            k: base.k_ring(),
            exps,
            code,
            table,
            frob_images: OnceLock::new(),
        })))
    }

    pub fn base(&self) -> &BaseRingSpec {
        &self.0.base
    }

    pub fn field(&self) -> &FieldSpec {
        &self.0.base.field
    }

    pub fn q_v(&self) -> u64 {
        self.0.q_v
    }

    pub fn level(&self) -> u32 {
        self.0.level
    }

    /// `[K_n : K] = (q_v - 1) q_v^n`.
    pub fn degree(&self) -> usize {
        self.0.exps.len()
    }

    /// The coefficient ring `K = F((ζ))`.
    pub fn k_ring(&self) -> &ZetaRing {
        &self.0.k
    }

    pub fn exponents(&self, idx: u32) -> &[u32] {
        &self.0.exps[idx as usize]
    }

    pub fn basis_index(&self, exps: &[u32]) -> Option<u32> {
        if exps.len() != self.0.level as usize + 1 {
            return None;
        }
        let mut idx = 0u32;
        for (i, &e) in exps.iter().enumerate().rev() {
            let r = if i == 0 { self.0.q_v as u32 - 1 } else { self.0.q_v as u32 };
            if e >= r {
                return None;
            }
            idx = idx * r + e;
        }
        Some(idx)
    }

    /// Builds an element from `(basis index, coefficient)` pairs, known to ζ-precision `prec`.
    pub fn element(
        &self,
        terms: impl IntoIterator<Item = (u32, ZetaSeries)>,
        prec: i64,
    ) -> TowerElement {
        let k = &self.0.k;
        let mut map: BTreeMap<u32, ZetaSeries> = BTreeMap::new();
        for (idx, c) in terms {
            assert!((idx as usize) < self.degree(), "basis index out of range");
            let entry = map.entry(idx).or_insert_with(|| k.zero());
            *entry = k.add(entry, &c);
        }
        self.normalize(map, prec)
    }

    fn normalize(&self, terms: BTreeMap<u32, ZetaSeries>, prec: i64) -> TowerElement {
        let k = &self.0.k;
        let prec = terms.values().map(|c| c.prec()).fold(prec, i64::min);
        let terms = terms
            .into_iter()
            .map(|(i, c)| (i, k.truncate(&c, prec)))
            .filter(|(_, c)| !k.is_zero(c))
            .collect();
        TowerElement { level: self.0.level, terms, prec }
    }

    /// `c · 1` for `c ∈ K`.
    pub fn from_k(&self, c: ZetaSeries) -> TowerElement {
        self.element([(0, c)], EXACT)
    }

    pub fn constant(&self, c: Fq) -> TowerElement {
        self.from_k(self.0.k.constant(c))
    }

    /// `ζ^e · 1`.
    pub fn zeta_pow(&self, e: i64) -> TowerElement {
        self.from_k(self.0.k.monomial(Fq::ONE, e))
    }

    /// The generator `l_i`.
    pub fn gen(&self, i: u32) -> TowerElement {
        assert!(i <= self.0.level, "generator index above the tower level");
        let mut e = vec![0u32; self.0.level as usize + 1];
        e[i as usize] = 1;
        let idx = self.basis_index(&e).expect("single exponent lies in the basis range");
        self.element([(idx, self.0.k.one())], EXACT)
    }

    /// `c · l^e` for a basis exponent vector `e`.
    pub fn monomial(&self, exps: &[u32], c: ZetaSeries) -> Result<TowerElement> {
        let idx = self.basis_index(exps).ok_or(Error::DimensionMismatch(format!(
            "exponent vector {exps:?} is not a basis monomial"
        )))?;
        Ok(self.element([(idx, c)], EXACT))
    }

    fn check(&self, a: &TowerElement) -> Result<()> {
        if a.level != self.0.level {
            return Err(Error::SpecMismatch);
        }
        Ok(())
    }

    pub fn checked_add(&self, a: &TowerElement, b: &TowerElement) -> Result<TowerElement> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.add(a, b))
    }

    pub fn checked_mul(&self, a: &TowerElement, b: &TowerElement) -> Result<TowerElement> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.mul(a, b))
    }

    fn min_coeff_valuation(&self, a: &TowerElement) -> i64 {
        a.terms
            .values()
            .filter_map(|c| self.0.k.valuation(c))
            .min()
            .unwrap_or(a.prec)
    }

    /// Fractional valuation numerator `Σ e_i q_v^{n-i}` of a basis monomial over `(q_v-1) q_v^n`.
    fn monomial_numerator(&self, idx: u32) -> i64 {
        let q = self.0.q_v as i64;
        self.0.exps[idx as usize]
            .iter()
            .enumerate()
            .map(|(i, &e)| e as i64 * q.pow(self.0.level - i as u32))
            .sum()
    }

    /// Exact valuation with `v(ζ) = 1`, so `v(l_i) = 1 / ((q_v-1) q_v^i)`.
    ///
    /// Distinct basis monomials have distinct valuations modulo `Z`, so the
    /// minimum over the stored terms is attained once and is the valuation,
    /// provided it lies below the precision.
    pub fn valuation(&self, a: &TowerElement) -> Result<Ratio<i64>> {
        if a.terms.is_empty() {
            return Err(Error::ZeroInput);
        }
        let denom = self.degree() as i64;
        let v = a
            .terms
            .iter()
            .map(|(&idx, c)| {
                let vz = self.0.k.valuation(c).expect("stored coefficients are nonzero");
                Ratio::new(vz * denom + self.monomial_numerator(idx), denom)
            })
            .min()
            .expect("nonempty");
        if a.prec != EXACT && v >= Ratio::from_integer(a.prec) {
            return Err(Error::PrecisionExhausted(format!(
                "valuation {v} is not below the ζ-precision {}",
                a.prec
            )));
        }
        Ok(v)
    }

    /// `a^{-1}`, by solving the `K`-linear system of multiplication by `a`.
    pub fn inv_checked(&self, a: &TowerElement) -> Result<TowerElement> {
        self.check(a)?;
        self.valuation(a)?;
        let k = &self.0.k;
        let d = self.degree();
        let mut rows: Vec<Vec<ZetaSeries>> = vec![vec![k.zero(); d + 1]; d];
        for col in 0..d {
            let basis = self.element([(col as u32, k.one())], EXACT);
            let prod = self.mul(a, &basis);
            for (&r, c) in &prod.terms {
                rows[r as usize][col] = c.clone();
            }
            if prod.prec != EXACT {
                for row in rows.iter_mut() {
                    row[col] = k.add(&row[col], &k.big_o(prod.prec));
                }
            }
        }
        rows[0][d] = k.one();
        for col in 0..d {
            let pivot = (col..d)
                .filter_map(|r| k.valuation(&rows[r][col]).map(|v| (v, r)))
                .min()
                .ok_or_else(|| {
                    Error::PrecisionExhausted("no certified pivot in tower inversion".into())
                })?
                .1;
            rows.swap(col, pivot);
            let inv = k.try_inv(&rows[col][col])?;
            let prow: Vec<ZetaSeries> = rows[col].iter().map(|x| k.mul(x, &inv)).collect();
            rows[col] = prow;
            for r in 0..d {
                if r == col || k.is_exact_zero(&rows[r][col]) {
                    continue;
                }
                let factor = rows[r][col].clone();
                for c in col..=d {
                    let delta = k.mul(&factor, &rows[col][c]);
                    rows[r][c] = k.sub(&rows[r][c], &delta);
                }
            }
        }
        let x = self.element(rows.into_iter().enumerate().map(|(i, row)| (i as u32, row[d].clone())), EXACT);
        if x.terms.is_empty() || self.valuation(&x).is_err() {
            return Err(Error::PrecisionExhausted("inverse has no certified digits".into()));
        }
        let check = self.sub(&self.mul(a, &x), &self.one());
        if !self.is_zero(&check) {
            return Err(Error::PrecisionExhausted("a · a^{-1} - 1 is not zero to precision".into()));
        }
        Ok(x)
    }

    /// Images `φ(l^e) = Π φ(l_i)^{e_i}` of the basis monomials under the
    /// `q_v`-power map, with `φ(l_0) = -ζ l_0` and `φ(l_i) = l_{i-1} - ζ l_i`.
    fn frobenius_images(&self) -> &[TowerElement] {
        self.0.frob_images.get_or_init(|| {
            let gens: Vec<TowerElement> = (0..=self.0.level)
                .map(|i| {
                    let zl = self.mul(&self.zeta_pow(1), &self.gen(i));
                    if i == 0 {
                        self.neg(&zl)
                    } else {
                        self.sub(&self.gen(i - 1), &zl)
                    }
                })
                .collect();
            self.0
                .exps
                .iter()
                .map(|e| {
                    e.iter().enumerate().fold(self.one(), |acc, (i, &ei)| {
                        self.mul(&acc, &Ring::pow(self, &gens[i], ei as u64))
                    })
                })
                .collect()
        })
    }

    /// `a^{q_v}` through the ring homomorphism: coefficients are raised to the
    /// `q_v`-th power (so `ζ ↦ ζ^{q_v}`) and generators follow the Carlitz–Tate relations.
    pub fn frobenius_hom(&self, a: &TowerElement) -> TowerElement {
        let k = &self.0.k;
        let images = self.frobenius_images();
        let prec = crate::ring::prec_mul(a.prec, self.0.q_v);
        a.terms.iter().fold(self.element([], prec), |acc, (&idx, c)| {
            let fc = k.frobenius(c, self.0.q_v);
            self.add(&acc, &self.mul(&self.from_k(fc), &images[idx as usize]))
        })
    }

    /// `a^{q_v}` by square-and-multiply in the quotient ring.
    pub fn frobenius_pow(&self, a: &TowerElement) -> TowerElement {
        Ring::pow(self, a, self.0.q_v)
    }

    /// `l_+ = Σ_{i<=n} l_i z^i`, a z-series of precision `n + 1`.
    pub fn l_plus(&self) -> TruncSeries<TowerElement> {
        let ring = self.z_ring();
        ring.make(0, (0..=self.0.level).map(|i| self.gen(i)).collect(), self.0.level as i64 + 1)
    }

    /// `K_n[[z]]` at precision `n + 1`.
    pub fn z_ring(&self) -> SeriesRing<TowerSpec> {
        SeriesRing::new(self.clone(), Var::Z, self.0.level as i64 + 1, false)
    }

    /// `(F[z]/z^{n+1})` as a series ring over the coefficient field.
    pub fn character_ring(&self) -> SeriesRing<FieldSpec> {
        SeriesRing::new(self.field().clone(), Var::Z, self.0.level as i64 + 1, false)
    }

    /// Checks that `chi` is a unit of `F_v[z]/z^{n+1}` and returns it as a series.
    pub fn character(&self, chi: &[Fq]) -> Result<TruncSeries<Fq>> {
        let f = self.field();
        if chi.first().is_none_or(|c| c.is_zero()) {
            return Err(Error::NonUnit);
        }
        if chi.iter().any(|&c| f.pow_fq(c, self.0.q_v as u128) != c) {
            return Err(Error::OutsideResidueField);
        }
        let ring = self.character_ring();
        Ok(ring.make(0, chi.to_vec(), self.0.level as i64 + 1))
    }

    /// Images `g(l_i)` = z^i-coefficient of `chi^{-1} l_+`.
    pub fn galois_generator_images(&self, chi: &[Fq]) -> Result<Vec<TowerElement>> {
        let ring = self.character_ring();
        let w = ring.try_inv(&self.character(chi)?)?;
        Ok((0..=self.0.level)
            .map(|i| {
                let terms = (0..=i).map(|j| {
                    let c = ring.coeff(&w, (i - j) as i64);
                    self.mul(&self.constant(c), &self.gen(j))
                });
                terms.fold(self.zero(), |acc, t| self.add(&acc, &t))
            })
            .collect())
    }

    /// Applies the automorphism `g` with character value `chi`, i.e. `g(l_+) = chi^{-1} l_+`.
    pub fn galois_apply(&self, chi: &[Fq], a: &TowerElement) -> Result<TowerElement> {
        self.check(a)?;
        let images = self.galois_generator_images(chi)?;
        let mut powers: HashMap<(usize, u32), TowerElement> = HashMap::new();
        let mut total = self.element([], a.prec);
        for (&idx, c) in &a.terms {
            let mut img = self.from_k(c.clone());
            for (i, &e) in self.0.exps[idx as usize].iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let pw = powers
                    .entry((i, e))
                    .or_insert_with(|| Ring::pow(self, &images[i], e as u64))
                    .clone();
                img = self.mul(&img, &pw);
            }
            total = self.add(&total, &img);
        }
        Ok(total)
    }

    /// Index of `v(K^×) = Z` in the value group of `K_n`, certified by the
    /// valuations of the basis monomials filling `(1/[K_n:K]) Z / Z`.
    pub fn value_group_index(&self) -> Result<u64> {
        let v = self.valuation(&self.gen(self.0.level))?;
        let d = self.degree() as i64;
        let mut seen = vec![false; d as usize];
        for idx in 0..d as u32 {
            let m = self.valuation(&self.element([(idx, self.0.k.one())], EXACT))?;
            let frac = (m * d).to_integer().rem_euclid(d);
            if std::mem::replace(&mut seen[frac as usize], true) {
                return Err(Error::DimensionMismatch("basis valuations collide modulo Z".into()));
            }
        }
        Ok(*v.denom() as u64)
    }
}

struct Reducer {
    q: u32,
    p: u64,
    radix: Vec<u32>,
    memo: HashMap<Vec<u32>, Arc<BTreeMap<(u32, u32), u64>>>,
}

impl Reducer {
    /// Rewrites `l^e` in the basis, as `(basis index, ζ-power) -> coefficient mod p`.
    fn reduce(&mut self, e: &[u32]) -> Arc<BTreeMap<(u32, u32), u64>> {
        if let Some(r) = self.memo.get(e) {
            return r.clone();
        }
        let p = self.p;
        let top = (0..e.len()).rev().find(|&i| e[i] >= self.radix[i]);
        let mut out: BTreeMap<(u32, u32), u64> = BTreeMap::new();
        let absorb = |out: &mut BTreeMap<(u32, u32), u64>, part: &BTreeMap<(u32, u32), u64>, shift: u32, scale: u64| {
            for (&(b, z), &c) in part {
                let slot = out.entry((b, z + shift)).or_insert(0);
                *slot = (*slot + c * scale) % p;
            }
        };
        match top {
            None => {
                let mut idx = 0u32;
                for i in (0..e.len()).rev() {
                    idx = idx * self.radix[i] + e[i];
                }
                out.insert((idx, 0), 1);
            }
            Some(0) => {
                // l_0^{q-1} = -ζ
                let mut e1 = e.to_vec();
                e1[0] -= self.q - 1;
                let part = self.reduce(&e1);
                absorb(&mut out, &part, 1, p - 1);
            }
            Some(i) => {
                // l_i^q = l_{i-1} - ζ l_i
                let mut e1 = e.to_vec();
                e1[i] -= self.q;
                e1[i - 1] += 1;
                let part = self.reduce(&e1);
                absorb(&mut out, &part, 0, 1);
                let mut e2 = e.to_vec();
                e2[i] -= self.q - 1;
                let part = self.reduce(&e2);
                absorb(&mut out, &part, 1, p - 1);
            }
        }
        out.retain(|_, c| *c != 0);
        let out = Arc::new(out);
        self.memo.insert(e.to_vec(), out.clone());
        out
    }
}

impl Ring for TowerSpec {
    type Elem = TowerElement;

    fn zero(&self) -> TowerElement {
        self.element([], EXACT)
    }

    fn one(&self) -> TowerElement {
        self.constant(Fq::ONE)
    }

    fn is_zero(&self, a: &TowerElement) -> bool {
        a.terms.is_empty()
    }

    fn is_exact_zero(&self, a: &TowerElement) -> bool {
        a.terms.is_empty() && a.prec == EXACT
    }

    fn add(&self, a: &TowerElement, b: &TowerElement) -> TowerElement {
        debug_assert!(a.level == self.0.level && b.level == self.0.level);
        let k = &self.0.k;
        let mut terms = a.terms.clone();
        for (&i, c) in &b.terms {
            let entry = terms.entry(i).or_insert_with(|| k.zero());
            *entry = k.add(entry, c);
        }
        self.normalize(terms, a.prec.min(b.prec))
    }

    fn neg(&self, a: &TowerElement) -> TowerElement {
        let k = &self.0.k;
        let terms = a.terms.iter().map(|(&i, c)| (i, k.neg(c))).collect();
        self.normalize(terms, a.prec)
    }

    fn mul(&self, a: &TowerElement, b: &TowerElement) -> TowerElement {
        debug_assert!(a.level == self.0.level && b.level == self.0.level);
        let k = &self.0.k;
        // basis monomials multiply to integral combinations, so unknown digits
        // of one factor stay at least as deep as the other factor's lowest ζ-power
        let prec = prec_add(self.min_coeff_valuation(a), b.prec)
            .min(prec_add(self.min_coeff_valuation(b), a.prec));
        let mut acc: BTreeMap<u32, ZetaSeries> = BTreeMap::new();
        for (&i, x) in &a.terms {
            for (&j, y) in &b.terms {
                let xy = k.mul(x, y);
                let code = (self.0.code[i as usize] + self.0.code[j as usize]) as usize;
                for &(t, zp, c) in &self.0.table[code] {
                    let term = k.mul(&k.monomial(c, zp as i64), &xy);
                    let entry = acc.entry(t).or_insert_with(|| k.zero());
                    *entry = k.add(entry, &term);
                }
            }
        }
        self.normalize(acc, prec)
    }

    fn inv(&self, a: &TowerElement) -> Option<TowerElement> {
        self.inv_checked(a).ok()
    }

    fn frobenius(&self, a: &TowerElement, q: u64) -> TowerElement {
        Ring::pow(self, a, q)
    }

    fn characteristic(&self) -> u64 {
        self.field().p()
    }

    fn from_int(&self, n: i64) -> TowerElement {
        self.constant(self.field().from_i64(n))
    }
}
