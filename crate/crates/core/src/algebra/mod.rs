//! Exact arithmetic in the algebra generated by `q`, `p` with `[q, p] = i hbar`.
//!
//! Everything here is exact: coefficients are complex rationals and `hbar`
//! stays a formal symbol, so identities are checked with zero tolerance.

mod matrix;
mod operator;
mod scalar;

pub use matrix::{ladder_p, ladder_q, to_matrix, TruncatedMatrix};
pub use operator::OperatorPoly;
pub(crate) use operator::print_order;
pub use scalar::{CRational, HbarScalar, Rational};
pub(crate) use scalar::{join_pieces, monomial_text, push_scalar_pieces, rat};

use num_bigint::BigInt;

pub(crate) fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::from(1), |acc, k| acc * k)
}

pub(crate) fn binomial(n: u32, k: u32) -> BigInt {
    if k > n {
        return BigInt::from(0);
    }
    let k = k.min(n - k);
    let mut acc = BigInt::from(1);
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}
