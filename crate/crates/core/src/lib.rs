//! Operator quantization and quantum phase-space numerics.
//!
//! The crate has two halves:
//!
//! * an exact symbolic side ([`algebra`], [`quantizer`]) that normal-orders
//!   polynomials in `q`, `p` with `[q, p] = i hbar`, implements Weyl's rule,
//!   full symmetrization, the Moyal star product and the placement-variant
//!   construction that exposes the ordering ambiguity of `q^2 p^2`;
//! * a numerical side ([`wavefunctions`], [`wigner`], [`moments`],
//!   [`dynamics`]) that samples states on grids, computes Wigner functions,
//!   their moments, and integrates the Liouville and Moyal equations.

pub mod algebra;
pub mod dynamics;
pub mod error;
pub mod format;
pub mod moments;
pub mod quantizer;
pub mod spectral;
pub mod wavefunctions;
pub mod wigner;

pub use algebra::{CRational, HbarScalar, OperatorPoly, Rational};
pub use error::{Error, ParseError, ParseErrorKind, Result};
pub use quantizer::PhasePoly;
