use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid presentation: {0}")]
    InvalidPresentation(String),
    #[error("generator index {index} out of range 1..={rank}")]
    IndexOutOfRange { index: usize, rank: usize },
    #[error("too large to enumerate: {size} exceeds cap {cap}")]
    TooLarge { size: u128, cap: u128 },
    #[error("elements or maps belong to different presentations")]
    MixedGroups,
    #[error("subgroup is not normal")]
    NotNormal,
    #[error("not a subgroup of the acting group")]
    NotSubgroup,
    #[error("subgroup is not abelian")]
    NotAbelian,
    #[error("subgroup is not elementary abelian")]
    NotElementaryAbelian,
    #[error("invalid module: {0}")]
    InvalidModule(String),
    #[error("module belongs to a different group or has the wrong dimension")]
    ModuleMismatch,
    #[error("map is not a derivation: {0}")]
    NotDerivation(String),
    #[error("map is not a homomorphism: {0}")]
    NotHomomorphism(String),
    #[error("out of scope: {0}")]
    OutOfScope(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
