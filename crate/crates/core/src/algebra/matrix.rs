//! Truncated harmonic-oscillator-basis matrices for `q` and `p`.
//!
//! These provide a floating-point oracle that is independent of the
//! normal-ordering rules: every word is multiplied out as a product of
//! basis matrices.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::OperatorPoly;
use crate::error::{Error, Result};

/// Matrix of an operator in the first `dim` oscillator eigenstates.
///
/// Only the leading `clean × clean` block is free of truncation artifacts.
#[derive(Clone, Debug)]
pub struct TruncatedMatrix {
    pub matrix: DMatrix<Complex64>,
    pub clean: usize,
}

impl TruncatedMatrix {
    /// Largest entrywise deviation from `other` over the shared clean block.
    pub fn max_abs_diff(&self, other: &DMatrix<Complex64>, block: usize) -> f64 {
        let n = block.min(self.clean);
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                worst = worst.max((self.matrix[(i, j)] - other[(i, j)]).norm());
            }
        }
        worst
    }
}

fn lowering(dim: usize) -> DMatrix<Complex64> {
    let mut a = DMatrix::zeros(dim, dim);
    for i in 0..dim - 1 {
        a[(i, i + 1)] = Complex64::new(((i + 1) as f64).sqrt(), 0.0);
    }
    a
}

/// `q = sqrt(hbar/2) (a + a†)`.
pub fn ladder_q(dim: usize, hbar: f64) -> DMatrix<Complex64> {
    let a = lowering(dim);
    (&a + a.adjoint()) * Complex64::new((hbar / 2.0).sqrt(), 0.0)
}

/// `p = i sqrt(hbar/2) (a† − a)`.
pub fn ladder_p(dim: usize, hbar: f64) -> DMatrix<Complex64> {
    let a = lowering(dim);
    (a.adjoint() - &a) * Complex64::new(0.0, (hbar / 2.0).sqrt())
}

fn powers(base: &DMatrix<Complex64>, max: u32) -> Vec<DMatrix<Complex64>> {
    let dim = base.nrows();
    let mut out = vec![DMatrix::identity(dim, dim)];
    for k in 1..=max as usize {
        out.push(&out[k - 1] * base);
    }
    out
}

/// Substitute `hbar` and map every normal-ordered word `q^a p^b` to `Q^a P^b`.
pub fn to_matrix(op: &OperatorPoly, dim: usize, hbar: f64) -> Result<TruncatedMatrix> {
    let degree = op.degree() as usize;
    if dim < 2 || dim <= degree {
        return Err(Error::DimensionTooSmall { dim, degree });
    }
    if !(hbar > 0.0) {
        return Err(Error::InvalidArgument(format!("hbar must be positive, got {hbar}")));
    }
    let max_a = op.terms().map(|(&(a, _), _)| a).max().unwrap_or(0);
    let max_b = op.terms().map(|(&(_, b), _)| b).max().unwrap_or(0);
    let qs = powers(&ladder_q(dim, hbar), max_a);
    let ps = powers(&ladder_p(dim, hbar), max_b);
    let mut m = DMatrix::zeros(dim, dim);
    for (&(a, b), c) in op.terms() {
        m += (&qs[a as usize] * &ps[b as usize]) * c.eval(hbar);
    }
    Ok(TruncatedMatrix { matrix: m, clean: dim - degree })
}
