//! Finite fields, truncated power series, the Carlitz–Tate tower, local shtukas
//! and their `v`-adic Galois images, computed exactly at finite level.

pub mod error;
pub mod field;
pub mod galois;
pub mod ring;
pub mod selftest;
pub mod series;
pub mod shtuka;
pub mod tower;

pub use error::{Error, Result};
pub use field::{Embedding, FieldElement, FieldOp, FieldSpec, Fq};
pub use galois::{
    cyclotomic_char, det_criterion, openness_report, power_image, tate_generator_rank_one, unit_group,
    DetCriterion, OpennessReport, PowerImage, TateGenerator, UnitGroupLevel, Verdict,
};
pub use ring::{Ring, EXACT};
pub use series::{BaseRingSpec, RzSeries, SeriesRing, TruncSeries, Var, ZetaSeries};
pub use shtuka::{
    adjunction_check, associate_local_shtuka, pullback, pushforward, rank_one_normalize, trivialize_unit,
    AdjunctionReport, LocalShtuka, Mat, MotiveOverT, NormalForm, PlaceData,
};
pub use tower::{TowerElement, TowerSpec};
