//! `F_q[t]`-motives `(F_q[t] ⊗ R)^r, τ = T(t))` and their local shtuka at a place `v`.
//!
//! With `F_v = F_q[t]/(v)`, `A_v ≅ F_v[[z]]` for the uniformizer `z = v(t)`:
//! `t` corresponds to the series `t(z)` with `t(0) = x_0` a root of `v` and
//! `v(t(z)) = z`. Then `ζ = v(θ)` and `θ = t(ζ)`. On the component of
//! `A_v ⊗ R` containing the characteristic ideal, `τ^{f_v} = T · T^{σ} ⋯ T^{σ^{f_v - 1}}`
//! where `σ` raises the `R`-coefficients of `T` to the `q`-th power and fixes `t`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{prime_power, Embedding, FieldSpec, Fq};
use crate::ring::{Ring, EXACT};
use crate::series::{BaseRingSpec, RzSeries, SeriesRing, Var, ZetaSeries};

use super::{LocalShtuka, Mat};

/// An element of `F_q` (or of `F_v` inside ζ-series): an integer mod `p` or a coordinate vector.
#[derive(Clone, Debug, PartialEq, Deserialize, Serialize)]
#[serde(untagged)]
pub enum Scalar {
    Int(i64),
    Coords(Vec<u64>),
}

/// A series in `ζ` with `F_v`-coefficients as written in a motive file.
#[derive(Clone, Debug, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RawSeries {
    #[serde(default)]
    pub low: i64,
    /// Absent means exact.
    #[serde(default)]
    pub prec: Option<i64>,
    pub coeffs: Vec<Scalar>,
}

/// Coefficient of a power of `t` in an entry of `T`.
#[derive(Clone, Debug, PartialEq, Deserialize, Serialize)]
#[serde(untagged)]
pub enum MotiveCoeff {
    Scalar(Scalar),
    /// `Σ a_k θ^k` with `a_k ∈ F_q`.
    Theta {
        theta: Vec<Scalar>,
    },
    Zeta {
        zeta: RawSeries,
    },
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct MotiveFile {
    q: u64,
    #[serde(default)]
    modulus: Option<Vec<u64>>,
    r: usize,
    #[serde(rename = "T")]
    t: Vec<Vec<Vec<MotiveCoeff>>>,
    v: Vec<Scalar>,
    #[serde(default)]
    theta: Option<RawSeries>,
}

#[derive(Clone, Debug)]
pub struct MotiveOverT {
    pub fq: FieldSpec,
    /// `T[i][j]` lists the coefficients of `t^0, t^1, …`.
    pub t_matrix: Vec<Vec<Vec<MotiveCoeff>>>,
    /// Monic place polynomial, least degree first.
    pub place: Vec<Fq>,
    pub theta: Option<RawSeries>,
}

fn scalar(f: &FieldSpec, s: &Scalar) -> Result<Fq> {
    match s {
        Scalar::Int(n) => Ok(f.from_i64(*n)),
        Scalar::Coords(c) => f.from_coords(c),
    }
}

impl MotiveOverT {
    fn from_file(file: MotiveFile) -> Result<Self> {
        let (p, m) = prime_power(file.q)
            .ok_or_else(|| Error::Parse(format!("q = {} is not a prime power", file.q)))?;
        let fq = FieldSpec::new(p, m, file.modulus.as_deref())?;
        if file.t.len() != file.r || file.t.iter().any(|row| row.len() != file.r) {
            return Err(Error::Parse(format!("T must be an {0}×{0} matrix", file.r)));
        }
        let place = file.v.iter().map(|s| scalar(&fq, s)).collect::<Result<Vec<_>>>()?;
        Ok(MotiveOverT { fq, t_matrix: file.t, place, theta: file.theta })
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let file: MotiveFile = serde_json::from_str(s).map_err(|e| Error::Parse(format!("motive JSON: {e}")))?;
        MotiveOverT::from_file(file)
    }

    pub fn from_toml_str(s: &str) -> Result<Self> {
        let file: MotiveFile = toml::from_str(s).map_err(|e| Error::Parse(format!("motive TOML: {e}")))?;
        MotiveOverT::from_file(file)
    }

    /// Reads a `.json` or `.toml` motive file.
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        match path.extension().and_then(|e| e.to_str()) {
            Some("toml") => MotiveOverT::from_toml_str(&text),
            _ => MotiveOverT::from_json_str(&text),
        }
    }

    /// The Carlitz motive `T = (t - θ)^power`.
    pub fn carlitz(fq: &FieldSpec, place: Vec<Fq>, power: usize) -> Self {
        // (t - θ)^power = Σ binom(power, j) (-θ)^{power-j} t^j
        let coeffs = (0..=power)
            .map(|j| {
                let mut theta = vec![Scalar::Int(0); power - j + 1];
                let sign = if (power - j).is_multiple_of(2) { 1 } else { -1 };
                theta[power - j] = Scalar::Int(sign * binomial(power, j) as i64);
                MotiveCoeff::Theta { theta }
            })
            .collect();
        MotiveOverT { fq: fq.clone(), t_matrix: vec![vec![coeffs]], place, theta: None }
    }

    pub fn rank(&self) -> usize {
        self.t_matrix.len()
    }

    /// `f_v = deg v`.
    pub fn place_degree(&self) -> usize {
        self.place.len().saturating_sub(1)
    }

    fn t_degree(&self) -> usize {
        self.t_matrix
            .iter()
            .flatten()
            .map(|e| e.len().saturating_sub(1))
            .max()
            .unwrap_or(0)
    }
}

fn binomial(n: usize, k: usize) -> u64 {
    (0..k).fold(1u64, |acc, i| acc * (n - i) as u64 / (i as u64 + 1))
}

/// Data of the completion at `v`.
#[derive(Clone, Debug, Serialize)]
pub struct PlaceData {
    pub q: u64,
    pub f_v: usize,
    pub q_v: u64,
    pub field_v: FieldSpec,
    /// Coordinates of the root `x_0 = t(0)` in `F_v`.
    pub root: Vec<u64>,
    /// Leading coordinates of `θ = t(ζ)`.
    pub theta: Vec<Vec<u64>>,
    pub theta_prec: i64,
    pub z_prec: i64,
}

fn eval_poly<R: Ring>(ring: &R, coeffs: &[R::Elem], x: &R::Elem) -> R::Elem {
    coeffs.iter().rev().fold(ring.zero(), |acc, c| ring.add(&ring.mul(&acc, x), c))
}

fn has_root_in(fq: &FieldSpec, v: &[Fq], j: u32) -> Result<bool> {
    let big = FieldSpec::new(fq.p(), fq.m() * j, None)?;
    let emb = fq.embedding_into(&big)?;
    let coeffs: Vec<Fq> = v.iter().map(|&a| emb.apply(a)).collect();
    let found = big.elements().any(|x| eval_poly(&big, &coeffs, &x).is_zero());
    Ok(found)
}

/// Field `F_v`, the embedding of `F_q`, and the root `x_0` of `v`.
fn residue_field(mot: &MotiveOverT) -> Result<(FieldSpec, Embedding, Fq)> {
    let fq = &mot.fq;
    let f_v = mot.place_degree();
    if f_v == 0 || mot.place.last() != Some(&Fq::ONE) {
        return Err(Error::Parse("place polynomial must be monic of degree >= 1".into()));
    }
    for j in 1..=f_v / 2 {
        if has_root_in(fq, &mot.place, j as u32)? {
            return Err(Error::ReduciblePlace);
        }
    }
    let field_v = if fq.m() == 1 {
        let modulus: Vec<u64> = mot.place.iter().map(|a| a.0 as u64).collect();
        FieldSpec::new(fq.p(), f_v as u32, Some(&modulus))?
    } else {
        FieldSpec::new(fq.p(), fq.m() * f_v as u32, None)?
    };
    let emb = fq.embedding_into(&field_v)?;
    let coeffs: Vec<Fq> = mot.place.iter().map(|&a| emb.apply(a)).collect();
    let root = if fq.m() == 1 {
        field_v.generator_x()
    } else {
        field_v
            .elements()
            .find(|x| eval_poly(&field_v, &coeffs, x).is_zero())
            .ok_or(Error::ReduciblePlace)?
    };
    Ok((field_v, emb, root))
}

/// `t(z) ∈ F_v[[z]]` with `t(0) = x_0` and `v(t(z)) = z`, by Newton iteration.
fn expand_t(field_v: &FieldSpec, v: &[Fq], root: Fq, prec: i64) -> Result<ZetaSeries> {
    let ring = SeriesRing::new(field_v.clone(), Var::Z, prec, false);
    let vs: Vec<ZetaSeries> = v.iter().map(|&c| ring.constant(c)).collect();
    let dv: Vec<ZetaSeries> = v
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, &c)| ring.constant(field_v.mul_fq(field_v.from_i64(i as i64), c)))
        .collect();
    let z = ring.gen();
    let mut t = ring.truncate(&ring.constant(root), prec);
    let mut steps = 0;
    loop {
        let residual = ring.sub(&eval_poly(&ring, &vs, &t), &z);
        if ring.is_zero(&residual) {
            return Ok(t);
        }
        steps += 1;
        if steps > 2 * (64 - (prec as u64).leading_zeros()) + 4 {
            return Err(Error::PrecisionExhausted("expansion of t at the place did not converge".into()));
        }
        let deriv = ring.try_inv(&eval_poly(&ring, &dv, &t)).map_err(|_| Error::ReduciblePlace)?;
        t = ring.sub(&t, &ring.mul(&residual, &deriv));
    }
}

fn raw_series(field: &FieldSpec, raw: &RawSeries, zeta_prec: i64) -> Result<ZetaSeries> {
    let ring = SeriesRing::new(field.clone(), Var::Zeta, zeta_prec, false);
    let coeffs = raw.coeffs.iter().map(|s| scalar(field, s)).collect::<Result<Vec<_>>>()?;
    Ok(ring.make(raw.low, coeffs, raw.prec.unwrap_or(EXACT)))
}

/// The local shtuka at `v` associated to the motive, with its place data.
pub fn associate_local_shtuka(mot: &MotiveOverT, zeta_prec: i64) -> Result<(LocalShtuka, PlaceData)> {
    let r = mot.rank();
    if r == 0 {
        return Err(Error::DimensionMismatch("motive of rank 0".into()));
    }
    let f_v = mot.place_degree();
    let (field_v, emb, root) = residue_field(mot)?;
    let z_prec = zeta_prec + (r * mot.t_degree()) as i64 + 2;
    let base = BaseRingSpec::new(field_v.clone(), zeta_prec, z_prec)?;
    let place: Vec<Fq> = mot.place.iter().map(|&a| emb.apply(a)).collect();
    let t_z = expand_t(&field_v, &place, root, z_prec)?;

    let rring = base.r_ring();
    let rz = base.rz_ring();
    let theta = rring.truncate(
        &rring.make(t_z.low(), t_z.coeffs().to_vec(), t_z.prec()),
        zeta_prec,
    );
    if let Some(raw) = &mot.theta {
        let given = raw_series(&field_v, raw, zeta_prec)?;
        if rring.coeff(&given, 0) != root {
            return Err(Error::CharacteristicMismatch(
                "θ does not reduce to the chosen root of v".into(),
            ));
        }
        if !rring.eq_to_prec(&given, &theta) {
            return Err(Error::CharacteristicMismatch("θ differs from t(ζ) where ζ = v(θ)".into()));
        }
    }

    let coefficient = |c: &MotiveCoeff| -> Result<ZetaSeries> {
        Ok(match c {
            MotiveCoeff::Scalar(s) => rring.constant(emb.apply(scalar(&mot.fq, s)?)),
            MotiveCoeff::Theta { theta: poly } => {
                let cs = poly
                    .iter()
                    .map(|s| Ok(rring.constant(emb.apply(scalar(&mot.fq, s)?))))
                    .collect::<Result<Vec<_>>>()?;
                eval_poly(&rring, &cs, &theta)
            }
            MotiveCoeff::Zeta { zeta } => raw_series(&field_v, zeta, zeta_prec)?,
        })
    };
    let entries: Vec<Vec<Vec<ZetaSeries>>> = mot
        .t_matrix
        .iter()
        .map(|row| row.iter().map(|e| e.iter().map(&coefficient).collect()).collect::<Result<_>>())
        .collect::<Result<_>>()?;

    let t_in_rz = rz.make(t_z.low(), t_z.coeffs().iter().map(|&a| rring.constant(a)).collect(), t_z.prec());
    let factor = |j: usize| -> Mat<RzSeries> {
        let qj = mot.fq.q().pow(j as u32);
        Mat::from_fn(r, r, |a, b| {
            let cs: Vec<RzSeries> = entries[a][b]
                .iter()
                .map(|c| {
                    let c = if j == 0 { c.clone() } else { rring.frobenius(c, qj) };
                    rz.constant(rring.truncate(&c, zeta_prec))
                })
                .collect();
            eval_poly(&rz, &cs, &t_in_rz)
        })
    };
    let mut tau = factor(0);
    for j in 1..f_v {
        tau = tau.mul(&rz, &factor(j));
    }
    let shtuka = LocalShtuka::new(base, tau, 0, 1)?;
    let place_data = PlaceData {
        q: mot.fq.q(),
        f_v,
        q_v: field_v.q(),
        root: field_v.coords(root),
        theta: theta.coeffs().iter().take(4).map(|&a| field_v.coords(a)).collect(),
        theta_prec: theta.prec(),
        field_v,
        z_prec,
    };
    Ok((shtuka, place_data))
}
