use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid prime range [{lo}, {hi}]")]
    InvalidRange { lo: u64, hi: u64 },
    #[error("upper bound {0} exceeds supported maximum 2^50")]
    RangeTooLarge(u64),
    #[error("kronecker symbol (a|0) is undefined")]
    ZeroModulus,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("prime {p} is a bad-reduction prime")]
    BadReduction { p: u64 },
    #[error("curve is singular modulo {p}")]
    SingularCurve { p: u64 },
    #[error("eta product offset {numerator}/24 is not integral")]
    NonIntegralOffset { numerator: u64 },

    #[error("Ramanujan bound violated at p = {p}: normalized trace {normalized}")]
    RamanujanViolation { p: u64, normalized: f64 },
    #[error("non-real defect {residual:e} at p = {p} exceeds tolerance")]
    NonRealDefect { p: u64, residual: f64 },
    #[error("{q} does not divide the level {level}")]
    NotALevelDivisor { q: u64, level: u64 },

    #[error("{0} is not ordinary")]
    NotOrdinary(u64),
    #[error("missing exact eigenvalue at p = {0}")]
    MissingExact(u64),
    #[error("character value at {0} is not rational")]
    IrrationalCharacter(u64),

    #[error("empty input: {0}")]
    Empty(&'static str),
    #[error("classes mix determinant orders {0} and {1}")]
    MixedOrder(u64, u64),
    #[error("no class for good prime {0}")]
    MissingClass(u64),
    #[error("s = {re} + {im}i lies outside the region of absolute convergence")]
    OutsideRegion { re: f64, im: f64 },
    #[error("Euler factor is singular at p = {0}")]
    SingularFactor(u64),
    #[error("weight mismatch: {0}")]
    WeightMismatch(String),

    #[error("unknown newform label {0:?}")]
    UnknownLabel(String),
    #[error("malformed response: {0}")]
    Malformed(String),
    #[error("network failure with no cached response: {0}")]
    Network(String),
    #[error("checksum mismatch in {0}")]
    Checksum(PathBuf),
    #[error("unsupported cache version {0}")]
    Version(String),
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code: 1 numeric contract, 2 usage, 3 I/O or network.
    pub fn exit_code(&self) -> i32 {
        use Error::*;
        match self {
            RamanujanViolation { .. } | NonRealDefect { .. } | SingularFactor(_) => 1,
            Network(_) | Checksum(_) | Version(_) | Io { .. } | Malformed(_) => 3,
            _ => 2,
        }
    }
}
