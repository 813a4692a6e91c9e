use thiserror::Error;

/// Errors raised by the algebra layer.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("characteristic 2 is not supported")]
    EvenCharacteristic,
    #[error("modulus is reducible over F_{p}")]
    ReducibleModulus { p: u64 },
    #[error("invalid modulus: {0}")]
    InvalidModulus(String),
    #[error("field of order {0} is too large for table arithmetic")]
    FieldTooLarge(u64),
    #[error("operands belong to different fields or towers")]
    SpecMismatch,
    #[error("division by zero")]
    DivisionByZero,
    #[error("series variables do not match")]
    VarMismatch,
    #[error("lowest coefficient is not a unit")]
    NonUnitLeadingCoefficient,
    #[error("input is zero to the available precision")]
    ZeroInput,
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("element is not a unit")]
    NonUnit,
    #[error("residue equations not solvable over an extension of degree {tried}; minimal working degree: {minimal:?}")]
    ResidueNotSolvable { tried: u32, minimal: Option<u32> },
    #[error("substitution degree {degree} is not a power of the characteristic {p}")]
    NotPPower { degree: u64, p: u64 },
    #[error("shtukas live over different bases")]
    BaseMismatch,
    #[error("place polynomial is reducible over F_q")]
    ReduciblePlace,
    #[error("characteristic mismatch: {0}")]
    CharacteristicMismatch(String),
    #[error("enumeration of {requested} elements exceeds the cap of {cap}")]
    SizeLimit { requested: u128, cap: u128 },
    #[error("not a local shtuka: {0}")]
    NotAShtuka(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("coefficient is not fixed by the q_v-Frobenius")]
    OutsideResidueField,
    #[error("internal check failed: {0}")]
    CheckFailed(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
