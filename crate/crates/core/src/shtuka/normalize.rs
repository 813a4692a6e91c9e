//! Rank-one normal form: `(R[[z]], c (z - ζ)^d) ≅ (R[[z]], (z - ζ)^d)` over an
//! unramified extension, witnessed by a unit `u` with `σ̂(u) = c u`.

use crate::error::{Error, Result};
use crate::field::{Embedding, FieldSpec, Fq};
use crate::ring::Ring;
use crate::series::{embed_rz, z_minus_zeta_valuation, BaseRingSpec, RzSeries};

use super::LocalShtuka;

#[derive(Clone, Debug)]
pub struct Trivialization {
    /// Degree of the residue extension `F_Q / F_v`.
    pub s: u32,
    /// The base ring over `F_Q`, `Q = q_v^s`.
    pub base: BaseRingSpec,
    pub embedding: Embedding,
    pub u: RzSeries,
}

/// Solves `σ̂(u) = c u` for a unit `u` over `F_{q_v^s}[[ζ]][[z]]`.
///
/// Writing `u = Σ u_{i,m} z^i ζ^m`, the coefficient of `z^i ζ^m` reads
/// `[q_v | m] u_{i,m/q_v}^{q_v} = Σ c_{i',m'} u_{i-i',m-m'}`. For `m = 0`
/// this is the Kummer equation `u_{0,0}^{q_v-1} = c_{0,0}` and then
/// Artin–Schreier equations `x^{q_v} - x = b` for `u_{i,0} = u_{0,0} x`;
/// for `m >= 1` it determines `u_{i,m}` linearly from earlier digits.
/// Residue roots are the smallest-index solutions in `F_Q`.
pub fn trivialize_unit(base: &BaseRingSpec, c: &RzSeries, s: u32, max_ext: u32) -> Result<Trivialization> {
    if s == 0 {
        return Err(Error::ResidueNotSolvable { tried: 0, minimal: None });
    }
    let rz = base.rz_ring();
    let r = &rz.base;
    if r.valuation(&rz.coeff(c, 0)) != Some(0) {
        return Err(Error::NonUnit);
    }
    let nz = c.prec().min(base.z_prec);
    let mz = c
        .coeffs()
        .iter()
        .map(|x| x.prec())
        .fold(base.zeta_prec, i64::min);
    let (nz, mz) = (nz.max(1) as usize, mz.max(1) as usize);
    let grid: Vec<Vec<Fq>> = (0..nz)
        .map(|i| {
            let ci = rz.coeff(c, i as i64);
            (0..mz).map(|m| r.coeff(&ci, m as i64)).collect()
        })
        .collect();
    let q_v = base.q_v();
    let attempt = |s: u32| -> Result<Option<(FieldSpec, Embedding, Vec<Vec<Fq>>)>> {
        let big = if s == 1 {
            base.field.clone()
        } else {
            FieldSpec::new(base.field.p(), base.field.m() * s, None)?
        };
        let emb = base.field.embedding_into(&big)?;
        let cg: Vec<Vec<Fq>> =
            grid.iter().map(|row| row.iter().map(|&a| emb.apply(a)).collect()).collect();
        Ok(solve_digits(&big, q_v, &cg).map(|u| (big, emb, u)))
    };
    let Some((big, emb, digits)) = attempt(s)? else {
        let mut minimal = None;
        for t in s + 1..=max_ext {
            match attempt(t) {
                Ok(Some(_)) => {
                    minimal = Some(t);
                    break;
                }
                Ok(None) => {}
                Err(Error::FieldTooLarge(_)) => break,
                Err(e) => return Err(e),
            }
        }
        return Err(Error::ResidueNotSolvable { tried: s, minimal });
    };
    let big_base = base.with_field(big);
    let brz = big_base.rz_ring();
    let br = &brz.base;
    let coeffs = digits
        .into_iter()
        .map(|row| br.make(0, row, mz as i64))
        .collect();
    let u = brz.make(0, coeffs, nz as i64);
    let c_big = embed_rz(&brz, c, &emb);
    let lhs = brz.frobenius(&u, q_v);
    let rhs = brz.mul(&c_big, &u);
    if !brz.eq_to_prec(&lhs, &rhs) {
        return Err(Error::PrecisionExhausted("σ̂(u) - c u does not vanish to precision".into()));
    }
    Ok(Trivialization { s, base: big_base, embedding: emb, u })
}

fn solve_digits(f: &FieldSpec, q: u64, c: &[Vec<Fq>]) -> Option<Vec<Vec<Fq>>> {
    let nz = c.len();
    let mz = c[0].len();
    let c00 = c[0][0];
    let c00_inv = f.inv_fq(c00)?;
    let u00 = f.units().find(|&y| f.pow_fq(y, (q - 1) as u128) == c00)?;
    let mut u = vec![vec![Fq::ZERO; mz]; nz];
    u[0][0] = u00;
    let scale_inv = f.inv_fq(f.mul_fq(c00, u00))?;
    for i in 0..nz {
        for m in 0..mz {
            if i == 0 && m == 0 {
                continue;
            }
            // Σ c_{i',m'} u_{i-i',m-m'} over (i',m') ≠ (0,0)
            let mut rest = Fq::ZERO;
            for ip in 0..=i {
                for mp in 0..=m {
                    if ip == 0 && mp == 0 {
                        continue;
                    }
                    let term = f.mul_fq(c[ip][mp], u[i - ip][m - mp]);
                    rest = f.add_fq(rest, term);
                }
            }
            if m == 0 {
                let b = f.mul_fq(rest, scale_inv);
                let x = f.elements().find(|&x| f.sub_fq(f.pow_fq(x, q as u128), x) == b)?;
                u[i][0] = f.mul_fq(u00, x);
            } else {
                let lhs = if (m as u64).is_multiple_of(q) {
                    f.pow_fq(u[i][m / q as usize], q as u128)
                } else {
                    Fq::ZERO
                };
                u[i][m] = f.mul_fq(c00_inv, f.sub_fq(lhs, rest));
            }
        }
    }
    Some(u)
}

#[derive(Clone, Debug)]
pub struct NormalForm {
    /// Dimension `d`: the shtuka is `C^{⊗d}` over the residue extension.
    pub d: i64,
    /// `(z - ζ^w)`-valuation of the effective part.
    pub eff_valuation: u32,
    pub cofactor: RzSeries,
    pub trivialization: Trivialization,
}

/// Writes `τ = c (z - ζ^w)^d` and trivializes `c`, checking
/// `σ̂(u) (z - ζ^w)^{d_eff} = τ_eff u` to precision.
pub fn rank_one_normalize(m: &LocalShtuka, s: u32, max_ext: u32) -> Result<NormalForm> {
    if m.rank() != 1 {
        return Err(Error::DimensionMismatch(format!("rank-one normal form needs rank 1, got {}", m.rank())));
    }
    let base = m.base();
    let rz = base.rz_ring();
    let eff = m.tau_eff().get(0, 0);
    let val = z_minus_zeta_valuation(&rz, eff, m.zeta_exp(), base.zeta_prec)?;
    let triv = trivialize_unit(base, &val.cofactor, s, max_ext)?;
    let brz = triv.base.rz_ring();
    let zmz = brz.pow(&triv.base.z_minus_zeta_pow(m.zeta_exp()), val.d as u64);
    let lhs = brz.mul(&brz.frobenius(&triv.u, base.q_v()), &zmz);
    let rhs = brz.mul(&embed_rz(&brz, eff, &triv.embedding), &triv.u);
    if !brz.eq_to_prec(&lhs, &rhs) {
        return Err(Error::PrecisionExhausted("normal-form witness fails to precision".into()));
    }
    Ok(NormalForm {
        d: val.d as i64 - m.twist(),
        eff_valuation: val.d,
        cofactor: val.cofactor,
        trivialization: triv,
    })
}
