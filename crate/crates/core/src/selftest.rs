//! Exhaustive invariant suites at desk scale, run by `shtuka selftest`.

use std::time::Instant;

use num_rational::Ratio;
use serde::Serialize;

use crate::error::Result;
use crate::field::{FieldSpec, Fq};
use crate::galois::{
    character_isomorphism_check, det_criterion, openness_report_in, tate_generator_rank_one, unit_group,
};
use crate::ring::{Ring, EXACT};
use crate::series::BaseRingSpec;
use crate::shtuka::{
    adjunction_check, associate_local_shtuka, pullback, pushforward, rank_one_normalize, rz_from_ints,
    LocalShtuka, MotiveOverT,
};
use crate::tower::TowerSpec;

#[derive(Clone, Debug, Serialize)]
pub struct SuiteResult {
    pub suite: &'static str,
    pub params: String,
    pub passed: bool,
    pub detail: String,
    #[serde(skip)]
    pub millis: u128,
}

type Check = fn(&str) -> Result<(bool, String)>;

const SUITES: &[(&str, &[&str], Check)] = &[
    ("field_axioms", &["3", "5", "9", "25", "27"], field_axioms),
    ("series_inverse", &["3", "5"], series_inverse),
    ("tower_ramification", &["3:0", "3:1", "3:2", "3:3", "5:0", "5:1", "5:2", "5:3"], tower_ramification),
    ("carlitz_relation", &["3:3", "5:3"], carlitz_relation),
    ("frobenius_hom", &["3:1", "3:2", "5:1"], frobenius_hom),
    ("cyclotomic_character", &["3:1", "3:2"], cyclotomic_character),
    ("unit_group", &["3:3", "5:3"], unit_groups),
    ("power_images", &["3", "5"], power_images),
    ("functors", &["3"], functors),
    ("det_criterion", &["3", "5"], det_criteria),
    ("motive_ingestion", &["3:t", "3:t^2+1"], motive_ingestion),
    ("tate_generator", &["3"], tate_generators),
];

pub fn suite_names() -> Vec<&'static str> {
    SUITES.iter().map(|s| s.0).collect()
}

/// Runs every suite (or those named in `only`) at all parameter points.
pub fn run(only: &[String]) -> Vec<SuiteResult> {
    let mut out = Vec::new();
    for &(suite, params, check) in SUITES {
        if !only.is_empty() && !only.iter().any(|o| o == suite) {
            continue;
        }
        for &param in params {
            let start = Instant::now();
            let (passed, detail) = match check(param) {
                Ok(r) => r,
                Err(e) => (false, e.to_string()),
            };
            out.push(SuiteResult {
                suite,
                params: param.to_string(),
                passed,
                detail,
                millis: start.elapsed().as_millis(),
            });
        }
    }
    out
}

fn split(param: &str) -> (u64, u32) {
    let mut it = param.split(':');
    let q = it.next().and_then(|s| s.parse().ok()).unwrap_or(3);
    let n = it.next().and_then(|s| s.parse().ok()).unwrap_or(0);
    (q, n)
}

fn field(q: u64) -> Result<FieldSpec> {
    let (p, m) = crate::field::prime_power(q).ok_or(crate::error::Error::NotPrime(q))?;
    FieldSpec::new(p, m, None)
}

fn field_axioms(param: &str) -> Result<(bool, String)> {
    let f = field(split(param).0)?;
    let els: Vec<Fq> = f.elements().collect();
    let mut ok = true;
    for &a in &els {
        ok &= f.add_fq(a, f.neg_fq(a)) == Fq::ZERO;
        if !a.is_zero() {
            ok &= f.inv_fq(a).map(|i| f.mul_fq(a, i)) == Some(Fq::ONE);
        }
        for &b in &els {
            ok &= f.add_fq(a, b) == f.add_fq(b, a) && f.mul_fq(a, b) == f.mul_fq(b, a);
            for &c in &els {
                ok &= f.mul_fq(a, f.add_fq(b, c)) == f.add_fq(f.mul_fq(a, b), f.mul_fq(a, c));
                ok &= f.mul_fq(f.mul_fq(a, b), c) == f.mul_fq(a, f.mul_fq(b, c));
            }
        }
    }
    Ok((ok, format!("{} elements, all triples", els.len())))
}

fn series_inverse(param: &str) -> Result<(bool, String)> {
    let f = field(split(param).0)?;
    let ring = BaseRingSpec::new(f.clone(), 12, 4)?.r_ring();
    let q = f.q() as u32;
    let mut count = 0;
    let mut ok = true;
    // all polynomials c_0 + c_1 ζ + c_2 ζ^2 + c_3 ζ^3 with c_0 ≠ 0
    for code in 0..q.pow(4) {
        let coeffs: Vec<Fq> = (0..4).map(|i| Fq(code / q.pow(i) % q)).collect();
        if coeffs[0].is_zero() {
            continue;
        }
        let s = ring.make(0, coeffs, EXACT);
        let inv = ring.try_inv(&s)?;
        ok &= ring.eq_to_prec(&ring.mul(&s, &inv), &ring.one());
        count += 1;
    }
    Ok((ok, format!("{count} units of degree <= 3")))
}

fn tower_ramification(param: &str) -> Result<(bool, String)> {
    let (q, n) = split(param);
    let t = TowerSpec::build(&BaseRingSpec::new(field(q)?, 16, n as i64 + 1)?, n)?;
    let degree = (q - 1) * q.pow(n);
    let mut ok = t.degree() as u64 == degree && t.value_group_index()? == degree;
    for i in 0..=n {
        ok &= t.valuation(&t.gen(i))? == Ratio::new(1, ((q - 1) * q.pow(i)) as i64);
    }
    Ok((ok, format!("degree {}", t.degree())))
}

fn carlitz_relation(param: &str) -> Result<(bool, String)> {
    let (q, n_max) = split(param);
    let mut ok = true;
    for n in 0..=n_max {
        let t = TowerSpec::build(&BaseRingSpec::new(field(q)?, 16, n as i64 + 1)?, n)?;
        let zr = t.z_ring();
        let lp = t.l_plus();
        let zmz = zr.make(0, vec![t.neg(&t.zeta_pow(1)), t.one()], EXACT);
        let diff = zr.sub(&zr.frobenius(&lp, q), &zr.mul(&zmz, &lp));
        ok &= zr.is_zero(&diff) && diff.prec() == n as i64 + 1;
    }
    Ok((ok, format!("levels 0..={n_max}")))
}

fn frobenius_hom(param: &str) -> Result<(bool, String)> {
    let (q, n) = split(param);
    let t = TowerSpec::build(&BaseRingSpec::new(field(q)?, 16, n as i64 + 1)?, n)?;
    let mut ok = true;
    for idx in 0..t.degree() as u32 {
        let x = t.monomial(t.exponents(idx), t.k_ring().one())?;
        let y = t.add(&x, &t.zeta_pow(1));
        ok &= t.eq_to_prec(&t.frobenius_hom(&y), &t.frobenius_pow(&y));
    }
    Ok((ok, format!("{} basis monomials", t.degree())))
}

fn cyclotomic_character(param: &str) -> Result<(bool, String)> {
    let (q, n) = split(param);
    let t = TowerSpec::build(&BaseRingSpec::new(field(q)?, 16, n as i64 + 1)?, n)?;
    let check = character_isomorphism_check(&t)?;
    Ok((check.all_pass(), format!("{} units", check.units)))
}

fn unit_groups(param: &str) -> Result<(bool, String)> {
    let (q, n_max) = split(param);
    let f = field(q)?;
    let mut ok = true;
    for n in 0..=n_max {
        let g = unit_group(&f, n)?;
        ok &= g.order() == (q - 1) * q.pow(n);
        for a in g.elements() {
            let inv = g.inv(a).expect("units are invertible");
            ok &= g.contains(&inv) && g.mul(a, &inv) == g.one();
        }
        if n <= 2 {
            for a in g.elements() {
                for b in g.elements() {
                    ok &= g.contains(&g.mul(a, b));
                }
            }
        }
    }
    Ok((ok, format!("levels 0..={n_max}")))
}

fn power_images(param: &str) -> Result<(bool, String)> {
    let f = field(split(param).0)?;
    let mut ok = true;
    let mut cases = 0;
    for n in 0..=3 {
        let g = unit_group(&f, n)?;
        for d in 1..=12 {
            let r = openness_report_in(&g, d)?;
            // |ker| = |G| / |image| for the homomorphism u ↦ u^d
            let kernel = g.elements().iter().filter(|u| g.pow(u, d) == g.one()).count() as u64;
            ok &= kernel == r.full_index;
            ok &= r.contained && r.index <= r.d_prime && r.kernel_bound;
            cases += 1;
        }
    }
    Ok((ok, format!("{cases} (n, d) points")))
}

fn functors(param: &str) -> Result<(bool, String)> {
    let p = split(param).0;
    let base = BaseRingSpec::new(field(p)?, 8, 12)?;
    let mut ok = true;
    for degree in [1, p] {
        let cp = LocalShtuka::carlitz_at(&base, 1, degree)?;
        let c = LocalShtuka::carlitz(&base, 1)?;
        ok &= adjunction_check(&cp, &c, degree)?.all_pass();
        for d in -1..=3 {
            let m = LocalShtuka::carlitz_at(&base, d, degree)?;
            ok &= pullback(&m, degree)?.dim() == d * degree as i64;
            let pushed = pushforward(&LocalShtuka::carlitz(&base, d)?, degree)?;
            ok &= pushed.rank() == degree as usize && pushed.dim() == d;
        }
    }
    Ok((ok, "Carlitz twists at e in {0, 1}".into()))
}

fn det_criteria(param: &str) -> Result<(bool, String)> {
    let p = split(param).0;
    let base = BaseRingSpec::new(field(p)?, 8, 16)?;
    let mut ok = true;
    for a in 0..=3 {
        for b in 0..=3 {
            let m = LocalShtuka::carlitz(&base, a)?.tensor(&LocalShtuka::carlitz(&base, b)?)?;
            let v = det_criterion(&m)?;
            ok &= v.d == a + b;
            ok &= (v.verdict == crate::galois::Verdict::NotOpen) == ((a + b) as u64).is_multiple_of(p);
        }
    }
    Ok((ok, "tensor products of Carlitz twists".into()))
}

fn motive_ingestion(param: &str) -> Result<(bool, String)> {
    let f3 = field(3)?;
    let place = if param.ends_with("t^2+1") { vec![Fq(1), Fq(0), Fq(1)] } else { vec![Fq(0), Fq(1)] };
    let mot = MotiveOverT::carlitz(&f3, place, 1);
    let (m, data) = associate_local_shtuka(&mot, 8)?;
    let nf = rank_one_normalize(&m, 1, 4)?;
    Ok((m.rank() == 1 && m.dim() == 1 && nf.d == 1, format!("f_v = {}", data.f_v)))
}

fn tate_generators(param: &str) -> Result<(bool, String)> {
    let p = split(param).0;
    let base = BaseRingSpec::new(field(p)?, 12, 8)?;
    let mut ok = true;
    for d in 1..=4 {
        let t = tate_generator_rank_one(&LocalShtuka::carlitz(&base, d)?, 1, 2, 2)?;
        ok &= t.pullback_consistent;
    }
    let two = LocalShtuka::rank_one(&base, rz_from_ints(&base, &[&[0, -2], &[2]]))?;
    ok &= tate_generator_rank_one(&two, 2, 2, 4)?.s == 2;
    Ok((ok, "carlitz(1..=4), 2(z - ζ)".into()))
}
