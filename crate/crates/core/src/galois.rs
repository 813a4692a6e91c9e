//! Finite-level Galois images: the unit groups `(F_v[z]/z^{n+1})^×`, the
//! cyclotomic character of the Carlitz–Tate tower, `d`-th power images and
//! openness verdicts, the determinant criterion, and rank-one Tate generators.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{FieldSpec, Fq};
use crate::ring::Ring;
use crate::series::{embed_rz, RzSeries, TruncSeries};
use crate::shtuka::{rank_one_normalize, LocalShtuka};
use crate::tower::{TowerElement, TowerSpec};

pub const DEFAULT_UNIT_CAP: u128 = 1_000_000;

/// A unit `Σ u_i z^i` of `F_v[z]/z^{n+1}`, coefficients of `1, z, …, z^n`.
pub type Unit = Vec<Fq>;

/// `d = p^e d'` with `p ∤ d'`.
pub fn split_p_power(d: u64, p: u64) -> (u32, u64) {
    let (mut e, mut rest) = (0, d);
    while rest != 0 && rest % p == 0 {
        rest /= p;
        e += 1;
    }
    (e, rest)
}

#[derive(Clone, Debug)]
pub struct UnitGroupLevel {
    field: FieldSpec,
    n: u32,
    elements: Vec<Unit>,
}

/// All units of `F_v[z]/z^{n+1}`, ordered by `Σ u_i q^i`.
pub fn unit_group(field: &FieldSpec, n: u32) -> Result<UnitGroupLevel> {
    unit_group_capped(field, n, DEFAULT_UNIT_CAP)
}

pub fn unit_group_capped(field: &FieldSpec, n: u32, cap: u128) -> Result<UnitGroupLevel> {
    let q = field.q() as u128;
    let requested = q
        .checked_pow(n)
        .and_then(|x| x.checked_mul(q - 1))
        .unwrap_or(u128::MAX);
    if requested > cap {
        return Err(Error::SizeLimit { requested, cap });
    }
    let total = q.pow(n + 1) as u64;
    let elements = (0..total)
        .filter(|code| code % q as u64 != 0)
        .map(|mut code| {
            (0..=n)
                .map(|_| {
                    let c = Fq((code % q as u64) as u32);
                    code /= q as u64;
                    c
                })
                .collect()
        })
        .collect();
    Ok(UnitGroupLevel { field: field.clone(), n, elements })
}

impl UnitGroupLevel {
    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn level(&self) -> u32 {
        self.n
    }

    pub fn order(&self) -> u64 {
        self.elements.len() as u64
    }

    pub fn elements(&self) -> &[Unit] {
        &self.elements
    }

    pub fn one(&self) -> Unit {
        let mut u = vec![Fq::ZERO; self.n as usize + 1];
        u[0] = Fq::ONE;
        u
    }

    pub fn contains(&self, u: &[Fq]) -> bool {
        u.len() == self.n as usize + 1 && !u[0].is_zero() && u.iter().all(|c| (c.0 as u64) < self.field.q())
    }

    pub fn mul(&self, a: &[Fq], b: &[Fq]) -> Unit {
        let f = &self.field;
        let len = self.n as usize + 1;
        (0..len)
            .map(|k| (0..=k).fold(Fq::ZERO, |acc, i| f.add_fq(acc, f.mul_fq(a[i], b[k - i]))))
            .collect()
    }

    pub fn pow(&self, a: &[Fq], mut k: u64) -> Unit {
        let mut base = a.to_vec();
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

    pub fn inv(&self, a: &[Fq]) -> Option<Unit> {
        let f = &self.field;
        let w0 = f.inv_fq(a[0])?;
        let mut w = vec![w0];
        for k in 1..a.len() {
            let s = (1..=k).fold(Fq::ZERO, |acc, j| f.add_fq(acc, f.mul_fq(a[j], w[k - j])));
            w.push(f.neg_fq(f.mul_fq(w0, s)));
        }
        Some(w)
    }

    /// `Σ a_i^{p^e} z^{i p^e}` truncated at `z^{n+1}`: the `p^e`-th power of `a`.
    pub fn frobenius_dilate(&self, a: &[Fq], e: u32) -> Unit {
        let pe = self.field.p().pow(e) as usize;
        let mut out = vec![Fq::ZERO; a.len()];
        for (i, &c) in a.iter().enumerate() {
            if i * pe < a.len() {
                out[i * pe] = self.field.pow_fq(c, pe as u128);
            }
        }
        out
    }

    /// Whether `u_i = 0` unless `step | i`.
    pub fn supported_on(u: &[Fq], step: u64) -> bool {
        u.iter().enumerate().all(|(i, c)| c.is_zero() || (i as u64).is_multiple_of(step))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PowerImage {
    pub d: u64,
    pub e: u32,
    pub d_prime: u64,
    /// Distinct values `u^d`, sorted.
    #[serde(skip)]
    pub elements: Vec<Unit>,
    pub order: u64,
    /// Index in the full unit group.
    pub index: u64,
    /// `#{u : u^d = 1}`.
    pub kernel_order: u64,
    /// Every `u^d` is supported on powers `z^{p^e j}`.
    pub supported: bool,
    /// Every `u^d` equals `(u^{d'})^{p^e}` computed as Frobenius and dilation.
    pub frobenius_factorization: bool,
}

/// `{u^d : u ∈ group}` with its support certificate.
pub fn power_image(group: &UnitGroupLevel, d: u64) -> Result<PowerImage> {
    if d == 0 {
        return Err(Error::DimensionMismatch("power map needs d >= 1".into()));
    }
    let (e, d_prime) = split_p_power(d, group.field.p());
    let step = group.field.p().pow(e);
    let one = group.one();
    let mut image = BTreeSet::new();
    let (mut kernel_order, mut supported, mut factorization) = (0, true, true);
    for u in group.elements() {
        let ud = group.pow(u, d);
        supported &= UnitGroupLevel::supported_on(&ud, step);
        factorization &= group.frobenius_dilate(&group.pow(u, d_prime), e) == ud;
        if ud == one {
            kernel_order += 1;
        }
        image.insert(ud);
    }
    let order = image.len() as u64;
    Ok(PowerImage {
        d,
        e,
        d_prime,
        elements: image.into_iter().collect(),
        order,
        index: group.order() / order,
        kernel_order,
        supported,
        frobenius_factorization: factorization,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OpennessReport {
    pub q_v: u64,
    pub p: u64,
    pub n: u32,
    pub d: u64,
    pub e: u32,
    pub d_prime: u64,
    pub full_order: u64,
    pub image_order: u64,
    /// Order of the units supported on `z^{p^e}`, `(q_v - 1) q_v^{⌊n/p^e⌋}`.
    pub ambient_order: u64,
    /// Index of the image in the ambient group.
    pub index: u64,
    pub full_index: u64,
    pub contained: bool,
    pub open_in_full: bool,
    /// Contained with index at most `d'`.
    pub open_in_ambient: bool,
    /// `#{u : u^{d'} = 1}`.
    pub kernel_order: u64,
    pub kernel_bound: bool,
}

pub fn openness_report(field: &FieldSpec, d: u64, n: u32) -> Result<OpennessReport> {
    openness_report_in(&unit_group(field, n)?, d)
}

/// Openness data of the `d`-th power image inside an enumerated unit group.
pub fn openness_report_in(group: &UnitGroupLevel, d: u64) -> Result<OpennessReport> {
    let image = power_image(group, d)?;
    let field = &group.field;
    let (p, q, n) = (field.p(), field.q(), group.n);
    let step = p.pow(image.e);
    let ambient_order = group
        .elements()
        .iter()
        .filter(|u| UnitGroupLevel::supported_on(u, step))
        .count() as u64;
    if ambient_order != (q - 1) * q.pow(n / step as u32) {
        return Err(Error::CheckFailed(format!(
            "ambient group has {ambient_order} elements, expected (q-1) q^(n/p^e)"
        )));
    }
    let contained = image.supported && image.frobenius_factorization;
    let kernel_order = if image.d_prime == d {
        image.kernel_order
    } else {
        let one = group.one();
        group.elements().iter().filter(|u| group.pow(u, image.d_prime) == one).count() as u64
    };
    let index = ambient_order / image.order;
    Ok(OpennessReport {
        q_v: q,
        p,
        n,
        d,
        e: image.e,
        d_prime: image.d_prime,
        full_order: group.order(),
        image_order: image.order,
        ambient_order,
        index,
        full_index: image.index,
        contained,
        open_in_full: image.e == 0,
        open_in_ambient: contained && index * image.order == ambient_order && index <= image.d_prime,
        kernel_order,
        kernel_bound: kernel_order <= image.d_prime,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Open,
    NotOpen,
    /// Rank above one with `p ∤ d`: no converse is available.
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DetCriterion {
    pub rank: usize,
    pub d: i64,
    pub p: u64,
    pub verdict: Verdict,
}

/// Openness verdict from the dimension `d` of `det M`: not open if `p | d`,
/// open in rank one otherwise.
pub fn det_criterion(m: &LocalShtuka) -> Result<DetCriterion> {
    let rz = m.rz_ring();
    let det = m.tau_eff().det(&rz);
    let r = m.rank();
    let top = LocalShtuka::new(
        m.base().clone(),
        crate::shtuka::Mat::from_rows(vec![vec![det]]),
        r as i64 * m.twist(),
        m.zeta_exp(),
    )?;
    if top.dim() != m.dim() {
        return Err(Error::CheckFailed("dimension of det M differs from dim M".into()));
    }
    let p = m.base().field.p();
    let d = m.dim();
    let verdict = if d.unsigned_abs().is_multiple_of(p) {
        Verdict::NotOpen
    } else if r == 1 {
        Verdict::Open
    } else {
        Verdict::Inconclusive
    };
    Ok(DetCriterion { rank: r, d, p, verdict })
}

/// The cyclotomic character of the automorphism `g_chi` (`g_chi(l_+) = chi^{-1} l_+`).
/// With `cross_check`, recomputes `l_+ · g(l_+)^{-1}` in `K_n[[z]]` and requires
/// it to be the constant series `chi`.
pub fn cyclotomic_char(tower: &TowerSpec, chi: &[Fq], cross_check: bool) -> Result<Unit> {
    tower.character(chi)?;
    if cross_check {
        let zr = tower.z_ring();
        let images = tower.galois_generator_images(chi)?;
        let g_lplus = zr.make(0, images, tower.level() as i64 + 1);
        let rho = zr.mul(&tower.l_plus(), &zr.try_inv(&g_lplus)?);
        for (i, &c) in chi.iter().enumerate() {
            let diff = tower.sub(&zr.coeff(&rho, i as i64), &tower.constant(c));
            if !tower.is_zero(&diff) {
                return Err(Error::CheckFailed(format!(
                    "cyclotomic character differs from chi at z^{i}"
                )));
            }
        }
    }
    Ok(chi.to_vec())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CharacterCheck {
    pub q_v: u64,
    pub n: u32,
    pub units: u64,
    /// Each `g_chi` respects `l_0^{q-1} = -ζ` and `l_i^q + ζ l_i = l_{i-1}`.
    pub relations: bool,
    /// `g_{chi chi'} = g_chi ∘ g_{chi'}` on generators.
    pub homomorphism: bool,
    /// Only `chi = 1` acts trivially.
    pub injective: bool,
    pub cross_check: bool,
}

impl CharacterCheck {
    pub fn all_pass(&self) -> bool {
        self.relations && self.homomorphism && self.injective && self.cross_check
    }
}

/// Exhaustive check of `chi ↦ g_chi` over all units at the tower's level.
pub fn character_isomorphism_check(tower: &TowerSpec) -> Result<CharacterCheck> {
    let group = unit_group(tower.field(), tower.level())?;
    let q = tower.q_v();
    let n = tower.level();
    let zeta = tower.zeta_pow(1);
    let gens: Vec<TowerElement> = (0..=n).map(|i| tower.gen(i)).collect();
    let images: Vec<Vec<TowerElement>> = group
        .elements()
        .iter()
        .map(|chi| tower.galois_generator_images(chi))
        .collect::<Result<_>>()?;
    let same = |a: &TowerElement, b: &TowerElement| tower.is_zero(&tower.sub(a, b));

    let relations = images.iter().all(|g| {
        same(&tower.pow(&g[0], q - 1), &tower.neg(&zeta))
            && (1..=n as usize).all(|i| {
                same(&tower.add(&tower.pow(&g[i], q), &tower.mul(&zeta, &g[i])), &g[i - 1])
            })
    });
    let injective = group
        .elements()
        .iter()
        .zip(&images)
        .all(|(chi, g)| (*chi == group.one()) == g.iter().zip(&gens).all(|(a, b)| same(a, b)));
    let mut homomorphism = true;
    'outer: for chi_a in group.elements() {
        for (b, chi_b) in group.elements().iter().enumerate() {
            let prod = group.mul(chi_a, chi_b);
            let size = group.field().q();
            let idx = group
                .elements()
                .binary_search_by_key(&code(&prod, size), |u| code(u, size))
                .map_err(|_| Error::CheckFailed("unit group is not closed under products".into()))?;
            for (img, expected) in images[b].iter().zip(&images[idx]) {
                let composed = tower.galois_apply(chi_a, img)?;
                if !same(&composed, expected) {
                    homomorphism = false;
                    break 'outer;
                }
            }
        }
    }
    let cross_check = group
        .elements()
        .iter()
        .all(|chi| cyclotomic_char(tower, chi, true).as_deref() == Ok(chi.as_slice()));
    Ok(CharacterCheck { q_v: q, n, units: group.order(), relations, homomorphism, injective, cross_check })
}

fn code(u: &[Fq], q: u64) -> u64 {
    u.iter().rev().fold(0, |acc, c| acc * q + c.0 as u64)
}

/// A generator `a = u · l_+^d ∈ K_n[[z]]` of the rank-one shtuka's `τ`-equation
/// `σ(a) = τ a`, over the residue extension used by the normal form.
#[derive(Clone, Debug)]
pub struct TateGenerator {
    pub tower: TowerSpec,
    pub a: TruncSeries<TowerElement>,
    pub d: i64,
    pub e: u32,
    pub d_prime: u64,
    pub s: u32,
    /// `l_+^d = (l_+^{d'})^{p^e}` with the `p^e`-th power taken as coefficient power and `z`-dilation.
    pub pullback_consistent: bool,
}

impl TateGenerator {
    /// `a^{-1}`, which spans the Tate module.
    pub fn tate_module_generator(&self) -> Result<TruncSeries<TowerElement>> {
        self.tower.z_ring().try_inv(&self.a)
    }
}

fn lift(tower: &TowerSpec, f: &RzSeries) -> TruncSeries<TowerElement> {
    let zr = tower.z_ring();
    let prec = f.prec().min(tower.level() as i64 + 1);
    let coeffs = f.coeffs().iter().map(|c| tower.from_k(c.clone())).collect();
    zr.truncate(&zr.make(f.low(), coeffs, f.prec()), prec)
}

pub fn tate_generator_rank_one(m: &LocalShtuka, s: u32, level: u32, max_ext: u32) -> Result<TateGenerator> {
    if m.rank() != 1 {
        return Err(Error::DimensionMismatch(format!("Tate generator needs rank 1, got {}", m.rank())));
    }
    if m.zeta_exp() != 1 {
        return Err(Error::BaseMismatch);
    }
    let nf = rank_one_normalize(m, s, max_ext)?;
    let triv = &nf.trivialization;
    let q_v = m.base().q_v();
    let tower = TowerSpec::build_over(&triv.base, q_v, level)?;
    let zr = tower.z_ring();
    let brz = triv.base.rz_ring();

    let l = tower.l_plus();
    let l_pow = |k: i64| -> Result<TruncSeries<TowerElement>> {
        if k >= 0 {
            Ok(zr.pow(&l, k as u64))
        } else {
            Ok(zr.pow(&zr.try_inv(&l)?, k.unsigned_abs()))
        }
    };
    let d = nf.d;
    let a = zr.mul(&lift(&tower, &triv.u), &l_pow(d)?);

    let eff = embed_rz(&brz, m.tau_eff().get(0, 0), &triv.embedding);
    let twist = brz.pow(&triv.base.z_minus_zeta(), m.twist().max(0) as u64);
    let lhs = zr.mul(&zr.frobenius(&a, q_v), &lift(&tower, &twist));
    let rhs = zr.mul(&lift(&tower, &eff), &a);
    if m.twist() < 0 || !zr.is_zero(&zr.sub(&lhs, &rhs)) {
        return Err(Error::CheckFailed("σ(a) differs from τ a modulo z^(n+1)".into()));
    }

    let p = tower.field().p();
    let (e, d_prime) = split_p_power(d.unsigned_abs(), p);
    let pe = p.pow(e);
    let base_pow = l_pow(d.signum() * d_prime as i64)?;
    let raised = zr.dilate(&zr.map_coeffs(&base_pow, |c| tower.pow(c, pe)), pe);
    let pullback_consistent = zr.is_zero(&zr.sub(&raised, &l_pow(d)?));
    Ok(TateGenerator { tower, a, d, e, d_prime, s, pullback_consistent })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::BaseRingSpec;
    use crate::shtuka::{rz_from_ints, Mat};

    fn f(p: u64) -> FieldSpec {
        FieldSpec::prime_field(p).unwrap()
    }

    #[test]
    fn unit_group_orders() {
        assert_eq!(unit_group(&f(3), 1).unwrap().order(), 6);
        assert_eq!(unit_group(&f(3), 2).unwrap().order(), 18);
        assert_eq!(unit_group(&f(5), 0).unwrap().order(), 4);
        assert_eq!(
            unit_group_capped(&f(5), 3, 100).unwrap_err(),
            Error::SizeLimit { requested: 500, cap: 100 }
        );
    }

    #[test]
    fn unit_group_closure_and_inverses() {
        for (p, n) in [(3, 2), (5, 1)] {
            let g = unit_group(&f(p), n).unwrap();
            for a in g.elements() {
                let inv = g.inv(a).unwrap();
                assert_eq!(g.mul(a, &inv), g.one());
                for b in g.elements() {
                    assert!(g.contains(&g.mul(a, b)));
                }
            }
        }
    }

    #[test]
    fn power_image_examples() {
        let g1 = unit_group(&f(3), 1).unwrap();
        let sq = power_image(&g1, 2).unwrap();
        assert_eq!((sq.order, sq.index), (3, 2));
        let g2 = unit_group(&f(3), 2).unwrap();
        let cube = power_image(&g2, 3).unwrap();
        assert_eq!((cube.order, cube.index), (2, 9));
        assert!(cube.supported && cube.frobenius_factorization);
        let id = power_image(&g2, 1).unwrap();
        assert_eq!((id.order, id.index), (18, 1));
    }

    #[test]
    fn openness_examples() {
        let r = openness_report(&f(3), 2, 2).unwrap();
        assert_eq!((r.e, r.d_prime, r.open_in_full, r.index), (0, 2, true, 2));
        let r = openness_report(&f(3), 3, 2).unwrap();
        assert_eq!((r.e, r.d_prime, r.open_in_full, r.index), (1, 1, false, 1));
        assert!(r.contained && r.open_in_ambient);
        let r = openness_report(&f(3), 6, 3).unwrap();
        assert_eq!((r.e, r.d_prime), (1, 2));
        assert!(r.contained && r.index <= 2 && r.kernel_bound);
    }

    #[test]
    fn det_criterion_examples() {
        let b = BaseRingSpec::new(f(3), 8, 12).unwrap();
        let cube = LocalShtuka::rank_one(&b, rz_from_ints(&b, &[&[0, 0, 0, -1], &[], &[], &[1]])).unwrap();
        assert_eq!(det_criterion(&cube).unwrap().verdict, Verdict::NotOpen);
        let rz = b.rz_ring();
        let zz = b.z_minus_zeta();
        let diag = Mat::from_rows(vec![vec![zz.clone(), rz.zero()], vec![rz.zero(), rz.mul(&zz, &zz)]]);
        let m = LocalShtuka::new(b.clone(), diag, 0, 1).unwrap();
        assert_eq!(det_criterion(&m).unwrap(), DetCriterion { rank: 2, d: 3, p: 3, verdict: Verdict::NotOpen });
        let c2 = LocalShtuka::carlitz(&b, 2).unwrap();
        assert_eq!(det_criterion(&c2).unwrap().verdict, Verdict::Open);
        let mixed = LocalShtuka::new(
            b.clone(),
            Mat::from_rows(vec![vec![zz.clone(), rz.zero()], vec![rz.zero(), rz.one()]]),
            0,
            1,
        )
        .unwrap();
        assert_eq!(det_criterion(&mixed).unwrap().verdict, Verdict::Inconclusive);
    }

    #[test]
    fn cyclotomic_character_cross_checks() {
        let b = BaseRingSpec::new(f(3), 12, 4).unwrap();
        let t1 = TowerSpec::build(&b, 1).unwrap();
        assert_eq!(cyclotomic_char(&t1, &[Fq(1), Fq(0)], true).unwrap(), vec![Fq(1), Fq(0)]);
        assert!(cyclotomic_char(&t1, &[Fq(2), Fq(0)], true).is_ok());
        let t2 = TowerSpec::build(&b, 2).unwrap();
        assert!(cyclotomic_char(&t2, &[Fq(1), Fq(1), Fq(0)], true).is_ok());
    }

    #[test]
    fn character_isomorphism_at_level_one() {
        let b = BaseRingSpec::new(f(3), 12, 4).unwrap();
        let check = character_isomorphism_check(&TowerSpec::build(&b, 1).unwrap()).unwrap();
        assert!(check.all_pass(), "{check:?}");
        assert_eq!(check.units, 6);
    }

    #[test]
    fn tate_generators() {
        let b = BaseRingSpec::new(f(3), 12, 8).unwrap();
        let c1 = LocalShtuka::carlitz(&b, 1).unwrap();
        let t = tate_generator_rank_one(&c1, 1, 2, 2).unwrap();
        let zr = t.tower.z_ring();
        assert!(zr.is_zero(&zr.sub(&t.a, &t.tower.l_plus())));

        let c2 = LocalShtuka::carlitz(&b, 2).unwrap();
        let t = tate_generator_rank_one(&c2, 1, 2, 2).unwrap();
        let tw = &t.tower;
        let a1 = tw.mul(&tw.from_int(2), &tw.mul(&tw.gen(0), &tw.gen(1)));
        assert!(tw.is_zero(&tw.sub(&zr_coeff(&t, 1), &a1)));

        let two = LocalShtuka::rank_one(&b, rz_from_ints(&b, &[&[0, -2], &[2]])).unwrap();
        let t = tate_generator_rank_one(&two, 2, 2, 4).unwrap();
        assert_eq!((t.s, t.d), (2, 1));
        let inv = t.tate_module_generator().unwrap();
        let zr = t.tower.z_ring();
        assert!(zr.eq_to_prec(&zr.mul(&inv, &t.a), &zr.one()));
    }

    fn zr_coeff(t: &TateGenerator, i: i64) -> TowerElement {
        t.tower.z_ring().coeff(&t.a, i)
    }

    #[test]
    fn tate_generator_with_wild_dimension() {
        let b = BaseRingSpec::new(f(3), 12, 8).unwrap();
        let c3 = LocalShtuka::carlitz(&b, 3).unwrap();
        let t = tate_generator_rank_one(&c3, 1, 2, 2).unwrap();
        assert_eq!((t.e, t.d_prime), (1, 1));
        assert!(t.pullback_consistent);
    }
}
