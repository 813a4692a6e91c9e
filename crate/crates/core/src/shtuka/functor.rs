//! Pullback and pushforward along `f: F_v[[z']] -> F_v[[z]]`, `z' ↦ z^P` with `P = p^e`.
//!
//! `f_*` views `R[[z]]` as free over `R[[z']]` with basis `1, z, …, z^{P-1}`;
//! a basis vector `z^a b_j` of `f_* M` has index `j P + a`. Since
//! `(z - ζ)^P = z' - ζ^P`, the characteristic point of `f_* M` is `ζ^{wP}`.

use crate::error::{Error, Result};
use crate::ring::Ring;
use crate::series::{RzRing, RzSeries};

use super::{LocalShtuka, Mat};

fn check_p_power(degree: u64, p: u64) -> Result<()> {
    let mut d = degree;
    while d > 1 && d.is_multiple_of(p) {
        d /= p;
    }
    if degree == 0 || d != 1 {
        return Err(Error::NotPPower { degree, p });
    }
    Ok(())
}

/// Matrix over `R[[z']]` of the `R[[z]]`-linear map with matrix `m`.
pub fn restrict_matrix(rz: &RzRing, m: &Mat<RzSeries>, degree: u64) -> Mat<RzSeries> {
    let p = degree as usize;
    let z = rz.gen();
    let mut blocks: Vec<Vec<Vec<RzSeries>>> = Vec::new();
    for i in 0..m.rows() {
        let row: Vec<Vec<Vec<RzSeries>>> = (0..m.cols())
            .map(|j| {
                (0..p)
                    .map(|a| rz.split_by_residue(&rz.mul(&rz.pow(&z, a as u64), m.get(i, j)), degree))
                    .collect()
            })
            .collect();
        blocks.push(
            (0..m.cols() * p)
                .map(|col| row[col / p][col % p].clone())
                .collect(),
        );
    }
    // blocks[i][(j, a)][a'] is the entry at row i P + a', column j P + a
    Mat::from_fn(m.rows() * p, m.cols() * p, |r, c| blocks[r / p][c][r % p].clone())
}

/// `f^* M'`: substitute `z' = z^P`; rank is kept and dimension multiplies by `P`.
pub fn pullback(m: &LocalShtuka, degree: u64) -> Result<LocalShtuka> {
    let base = m.base();
    check_p_power(degree, base.field.p())?;
    if !m.zeta_exp().is_multiple_of(degree) {
        return Err(Error::BaseMismatch);
    }
    let rz = base.rz_ring();
    let eff = m.tau_eff().map(|x| rz.dilate(x, degree));
    let mut new_base = base.clone();
    new_base.z_prec = base.z_prec.saturating_mul(degree as i64);
    LocalShtuka::new(new_base, eff, m.twist() * degree as i64, m.zeta_exp() / degree)
}

/// `f_* M`: restriction of scalars; rank multiplies by `P`, dimension is kept.
pub fn pushforward(m: &LocalShtuka, degree: u64) -> Result<LocalShtuka> {
    let base = m.base();
    check_p_power(degree, base.field.p())?;
    let rz = base.rz_ring();
    let p = degree as i64;
    let k_new = m.twist().div_euclid(p) + i64::from(m.twist().rem_euclid(p) != 0);
    let extra = (p * k_new - m.twist()) as u64;
    let shift = rz.pow(&base.z_minus_zeta_pow(m.zeta_exp()), extra);
    let eff = restrict_matrix(&rz, &m.tau_eff().scale(&rz, &shift), degree);
    let mut new_base = base.clone();
    new_base.z_prec = (base.z_prec + p - 1) / p;
    LocalShtuka::new(new_base, eff, k_new, m.zeta_exp() * degree)
}

#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct AdjunctionReport {
    pub degree: u64,
    /// `η ∘ τ_{M'} = τ_{f_* f^* M'} ∘ σ̂^* η`.
    pub unit_commutes: bool,
    /// `ε ∘ τ_{f^* f_* M} = τ_M ∘ σ̂^* ε`.
    pub counit_commutes: bool,
    /// `ε_{f^* M'} ∘ f^* η_{M'} = id`.
    pub triangle_pullback: bool,
    /// `f_* ε_M ∘ η_{f_* M} = id`.
    pub triangle_pushforward: bool,
    pub rank_formula: bool,
}

impl AdjunctionReport {
    pub fn all_pass(&self) -> bool {
        self.unit_commutes
            && self.counit_commutes
            && self.triangle_pullback
            && self.triangle_pushforward
            && self.rank_formula
    }
}

/// `η`: `b_k ↦ 1 ⊗ b_k`, a `(rP × r)` 0/1 matrix.
fn unit_matrix(rz: &RzRing, rank: usize, p: usize) -> Mat<RzSeries> {
    Mat::from_fn(rank * p, rank, |row, k| if row == k * p { rz.one() } else { rz.zero() })
}

/// `ε`: `1 ⊗ z^a b_j ↦ z^a b_j`, an `(r × rP)` matrix over `R[[z]]`.
fn counit_matrix(rz: &RzRing, rank: usize, p: usize) -> Mat<RzSeries> {
    Mat::from_fn(rank, rank * p, |i, col| {
        if col / p == i {
            rz.pow(&rz.gen(), (col % p) as u64)
        } else {
            rz.zero()
        }
    })
}

/// Builds unit and counit of `f^* ⊣ f_*` as explicit matrices and checks that
/// they commute with the `τ`-structures and satisfy the triangle identities.
pub fn adjunction_check(m_prime: &LocalShtuka, m: &LocalShtuka, degree: u64) -> Result<AdjunctionReport> {
    let p = degree as usize;
    let rz = m.rz_ring();

    let pulled = pullback(m_prime, degree)?;
    let ff = pushforward(&pulled, degree)?;
    let eta = unit_matrix(&rz, m_prime.rank(), p);
    let unit_commutes = ff.twist() == m_prime.twist()
        && eta
            .mul(&rz, m_prime.tau_eff())
            .sub(&rz, &ff.tau_eff().mul(&rz, &eta))
            .is_zero(&rz);

    let pushed = pushforward(m, degree)?;
    let gg = pullback(&pushed, degree)?;
    let eps = counit_matrix(&rz, m.rank(), p);
    let shift = rz.pow(&m.base().z_minus_zeta_pow(m.zeta_exp()), (gg.twist() - m.twist()) as u64);
    let counit_commutes = gg.twist() >= m.twist()
        && eps
            .mul(&rz, gg.tau_eff())
            .sub(&rz, &m.tau_eff().scale(&rz, &shift).mul(&rz, &eps))
            .is_zero(&rz);

    let r1 = m_prime.rank();
    let left = counit_matrix(&rz, r1, p).mul(&rz, &eta.map(|x| rz.dilate(x, degree)));
    let triangle_pullback = left == Mat::identity(&rz, r1);

    let n = pushed.rank();
    let right = restrict_matrix(&rz, &eps, degree).mul(&rz, &unit_matrix(&rz, n, p));
    let triangle_pushforward = right == Mat::identity(&rz, n);

    let rank_formula = pushed.rank() == m.rank() * p
        && pulled.rank() == m_prime.rank()
        && pushed.dim() == m.dim()
        && pulled.dim() == m_prime.dim() * degree as i64;

    Ok(AdjunctionReport {
        degree,
        unit_commutes,
        counit_commutes,
        triangle_pullback,
        triangle_pushforward,
        rank_formula,
    })
}
