use std::fmt;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Reason a phase-space expression failed to parse.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParseErrorKind {
    Empty,
    Unexpected(char),
    UnexpectedEnd,
    UnknownSymbol(String),
    ExpectedExponent,
    NegativeExponent,
    NonIntegerExponent,
    ZeroDenominator,
    NumberTooLarge,
}

/// Syntax error; `offset` is the 1-based byte position of the offending
/// input (one past the end for truncated input).
#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("syntax error at offset {offset}: {kind}")]
pub struct ParseError {
    pub offset: usize,
    pub kind: ParseErrorKind,
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseErrorKind::Empty => write!(f, "empty expression"),
            ParseErrorKind::Unexpected('/') => {
                write!(f, "unexpected '/'; write divisions as a leading rational coefficient (e.g. 1/2 p^2)")
            }
            ParseErrorKind::Unexpected(c) => write!(f, "unexpected {c:?}"),
            ParseErrorKind::UnexpectedEnd => write!(f, "unexpected end of input"),
            ParseErrorKind::UnknownSymbol(s) => write!(f, "unknown symbol {s:?} (expected q, p, hbar or i)"),
            ParseErrorKind::ExpectedExponent => write!(f, "expected an unsigned integer exponent after '^'"),
            ParseErrorKind::NegativeExponent => write!(f, "negative exponents are not allowed"),
            ParseErrorKind::NonIntegerExponent => write!(f, "exponents must be integers"),
            ParseErrorKind::ZeroDenominator => write!(f, "zero denominator"),
            ParseErrorKind::NumberTooLarge => write!(f, "number too large"),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("matrix dimension {dim} cannot hold an uncontaminated block for degree {degree}")]
    DimensionTooSmall { dim: usize, degree: usize },
    #[error("symmetrization of {factors} factors exceeds the limit of {limit}")]
    TooManyFactors { factors: u32, limit: u32 },
    #[error("momentum order {order} exceeds the jet limit of {limit}")]
    JetOrderTooLarge { order: u32, limit: u32 },
    #[error("placement {placement} does not split q-degree {degree}")]
    InvalidPlacement { placement: String, degree: u32 },
    #[error("unknown catalog entry {0:?}")]
    UnknownCatalogEntry(String),
    #[error("star commutator has a nonzero hbar-free part; division by i*hbar is inexact")]
    InexactMoyalDivision,
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("grid too narrow: |psi| = {value:e} at the boundary exceeds {limit:e}")]
    GridTooNarrow { value: f64, limit: f64 },
    #[error("grid cannot resolve state n = {n}: p_max = {p_max} needs to exceed {required}")]
    Unresolved { n: u32, p_max: f64, required: f64 },
    #[error("spectral resolution lost: tail mass {tail:e} exceeds {limit:e}")]
    SpectralResolution { tail: f64, limit: f64 },
    #[error("Wigner transform not real: imaginary residue {0:e}")]
    NotReal(f64),
    #[error("distribution not normalized: integral {0}")]
    NotNormalized(f64),
    #[error("negative variance for {name}: {value:e}")]
    NegativeVariance { name: &'static str, value: f64 },
    #[error("quadrature produced a non-finite value")]
    NonFinite,
    #[error("phase-space function has imaginary coefficients")]
    NonRealSymbol,
    #[error("invalid potential: {0}")]
    InvalidPotential(String),
    #[error("time step {dt} exceeds the stability bound {bound}")]
    TimeStepTooLarge { dt: f64, bound: f64 },
    #[error("integration unstable at step {step}: normalization drift {drift:e}")]
    Unstable { step: usize, drift: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// Errors that mean a numeric contract was violated, as opposed to bad
    /// input.
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::GridTooNarrow { .. }
                | Error::Unresolved { .. }
                | Error::SpectralResolution { .. }
                | Error::NotReal(_)
                | Error::NotNormalized(_)
                | Error::NegativeVariance { .. }
                | Error::NonFinite
                | Error::TimeStepTooLarge { .. }
                | Error::Unstable { .. }
                | Error::InexactMoyalDivision
        )
    }
}
