//! Local shtukas `(R[[z]]^r, τ)` over the truncated base ring.
//!
//! `τ` is stored as an effective matrix together with a Carlitz twist `k`:
//! `τ = τ_eff · (z - ζ^w)^{-k}`, where `ζ^w` is the characteristic point
//! (`w = 1` except after pushforward along `z' = z^{p^e}`, which gives `w = p^e`).

mod functor;
pub mod matrix;
mod motive;
mod normalize;

pub use functor::{adjunction_check, pullback, pushforward, restrict_matrix, AdjunctionReport};
pub use matrix::Mat;
pub use motive::{associate_local_shtuka, MotiveOverT, PlaceData};
pub use normalize::{rank_one_normalize, trivialize_unit, NormalForm, Trivialization};

use crate::error::{Error, Result};
use crate::ring::{Ring, EXACT};
use crate::series::{z_minus_zeta_valuation, BaseRingSpec, RzRing, RzSeries};

#[derive(Clone, Debug)]
pub struct LocalShtuka {
    base: BaseRingSpec,
    tau_eff: Mat<RzSeries>,
    twist: i64,
    zeta_exp: u64,
    /// `(z - ζ^w)`-valuation of `det τ_eff`.
    det_valuation: u32,
}

impl LocalShtuka {
    /// Validates that `det τ_eff = (z - ζ^w)^d · unit` within the base precisions.
    pub fn new(base: BaseRingSpec, tau_eff: Mat<RzSeries>, twist: i64, zeta_exp: u64) -> Result<Self> {
        if !tau_eff.is_square() || tau_eff.rows() == 0 {
            return Err(Error::DimensionMismatch(format!(
                "τ must be a nonempty square matrix, got {}×{}",
                tau_eff.rows(),
                tau_eff.cols()
            )));
        }
        if zeta_exp == 0 {
            return Err(Error::NotAShtuka("characteristic point ζ^0 is not in the maximal ideal".into()));
        }
        let rz = base.rz_ring();
        let det = tau_eff.det(&rz);
        let val = z_minus_zeta_valuation(&rz, &det, zeta_exp, base.zeta_prec)?;
        let c0 = rz.coeff(&val.cofactor, 0);
        let r = &rz.base;
        if !(r.valuation(&c0) == Some(0)) {
            return Err(Error::NotAShtuka(
                "det τ is not a unit times a power of (z - ζ^w)".into(),
            ));
        }
        Ok(LocalShtuka { base, tau_eff, twist, zeta_exp, det_valuation: val.d })
    }

    /// `(z - ζ^w)^d` as a rank-one shtuka, effective part `(z - ζ^w)^{max(d,0)}`.
    pub fn carlitz_at(base: &BaseRingSpec, d: i64, zeta_exp: u64) -> Result<Self> {
        let rz = base.rz_ring();
        let eff = rz.pow(&base.z_minus_zeta_pow(zeta_exp), d.max(0) as u64);
        LocalShtuka::new(base.clone(), Mat::from_rows(vec![vec![eff]]), (-d).max(0), zeta_exp)
    }

    /// The Carlitz twist `(R[[z]], (z - ζ)^d)`.
    pub fn carlitz(base: &BaseRingSpec, d: i64) -> Result<Self> {
        LocalShtuka::carlitz_at(base, d, 1)
    }

    /// `(R[[z]], c)` for a single series.
    pub fn rank_one(base: &BaseRingSpec, tau: RzSeries) -> Result<Self> {
        LocalShtuka::new(base.clone(), Mat::from_rows(vec![vec![tau]]), 0, 1)
    }

    pub fn base(&self) -> &BaseRingSpec {
        &self.base
    }

    pub fn rz_ring(&self) -> RzRing {
        self.base.rz_ring()
    }

    pub fn rank(&self) -> usize {
        self.tau_eff.rows()
    }

    pub fn tau_eff(&self) -> &Mat<RzSeries> {
        &self.tau_eff
    }

    pub fn twist(&self) -> i64 {
        self.twist
    }

    pub fn zeta_exp(&self) -> u64 {
        self.zeta_exp
    }

    pub fn det_valuation(&self) -> u32 {
        self.det_valuation
    }

    /// Dimension `val(det τ_eff) - rank · twist`.
    pub fn dim(&self) -> i64 {
        self.det_valuation as i64 - self.rank() as i64 * self.twist
    }

    pub fn is_effective(&self) -> bool {
        self.twist <= 0
    }

    fn compatible(&self, other: &LocalShtuka) -> Result<BaseRingSpec> {
        if self.base.field != other.base.field || self.zeta_exp != other.zeta_exp {
            return Err(Error::BaseMismatch);
        }
        Ok(BaseRingSpec {
            field: self.base.field.clone(),
            zeta_prec: self.base.zeta_prec.min(other.base.zeta_prec),
            z_prec: self.base.z_prec.min(other.base.z_prec),
        })
    }

    /// `σ̂(τ_eff)`: coefficients raised to the `q_v`-th power, `z` fixed.
    pub fn sigma_eff(&self) -> Mat<RzSeries> {
        let rz = self.rz_ring();
        let q = self.base.q_v();
        self.tau_eff.map(|x| rz.frobenius(x, q))
    }

    /// `M ⊗ N` with `τ_M ⊗ τ_N` (Kronecker product, index `i · rk N + k`).
    pub fn tensor(&self, other: &LocalShtuka) -> Result<LocalShtuka> {
        let base = self.compatible(other)?;
        let eff = self.tau_eff.kron(&base.rz_ring(), &other.tau_eff);
        LocalShtuka::new(base, eff, self.twist + other.twist, self.zeta_exp)
    }

    /// `M^∨` with `τ^∨ = (τ^{-1})^T`. Writing `det τ_eff = c (z - ζ^w)^e`,
    /// `τ^{-1} = adj(τ_eff) c^{-1} (z - ζ^w)^{k - e}`.
    pub fn dual(&self) -> Result<LocalShtuka> {
        let rz = self.rz_ring();
        let det = self.tau_eff.det(&rz);
        let val = z_minus_zeta_valuation(&rz, &det, self.zeta_exp, self.base.zeta_prec)?;
        let c_inv = rz.try_inv(&val.cofactor)?;
        let eff = self.tau_eff.adjugate(&rz).transpose().scale(&rz, &c_inv);
        LocalShtuka::new(self.base.clone(), eff, val.d as i64 - self.twist, self.zeta_exp)
    }

    /// Internal hom `M^∨ ⊗ N`, whose structure map is `h ↦ τ_N ∘ h ∘ τ_M^{-1}`.
    pub fn hom(&self, other: &LocalShtuka) -> Result<LocalShtuka> {
        self.dual()?.tensor(other)
    }

    /// Whether two shtukas have equal `τ` to precision (twists may differ by
    /// factors absorbed into the effective part).
    pub fn same_tau(&self, other: &LocalShtuka) -> bool {
        if self.rank() != other.rank() || self.zeta_exp != other.zeta_exp {
            return false;
        }
        let rz = self.rz_ring();
        let m = self.twist.max(other.twist);
        let lift = |s: &LocalShtuka| {
            let f = rz.pow(&self.base.z_minus_zeta_pow(self.zeta_exp), (m - s.twist) as u64);
            s.tau_eff.scale(&rz, &f)
        };
        lift(self).sub(&rz, &lift(other)).is_zero(&rz)
    }
}

/// Builds an exact series in `z` over `R` from rows of ζ-coefficients, `rows[i][m]` the
/// coefficient of `z^i ζ^m` as integers mod `p`.
pub fn rz_from_ints(base: &BaseRingSpec, rows: &[&[i64]]) -> RzSeries {
    let r = base.r_ring();
    let rz = base.rz_ring();
    let coeffs = rows
        .iter()
        .map(|row| r.make(0, row.iter().map(|&x| base.field.from_i64(x)).collect(), EXACT))
        .collect();
    rz.make(0, coeffs, EXACT)
}
