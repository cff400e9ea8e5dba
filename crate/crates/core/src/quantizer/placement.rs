//! Operator assignment by expanding the two-point density.
//!
//! The mean of `q^n p^m` is computed from `rho(q, d) = psi*(q - d/2) psi(q + d/2)`
//! by applying `(-i hbar ∂/∂d)^m` and letting `d → 0`. The `q^n` factor may
//! be attached to either amplitude before the expansion or kept outside as
//! the operator `q`. Each choice yields a bilinear form
//! `∫ Σ c q^a ∂^i psi* ∂^j psi`, which after integration by parts reads
//! `∫ psi* O psi`. Because the classical mean is real, the operator that
//! reproduces it is the hermitian part of `O`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::algebra::{binomial, factorial, CRational, HbarScalar, OperatorPoly, Rational};
use crate::error::{Error, Result};

/// Largest momentum order accepted by [`placement_variants`].
pub const JET_LIMIT: u32 = 8;

/// How the `q^n` of a monomial is distributed: `left_q` powers ride on
/// `psi*`, `right_q` on `psi`, and `op_q` stay outside as the operator `q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Placement {
    pub left_q: u32,
    pub right_q: u32,
    pub op_q: u32,
}

impl Placement {
    pub fn new(left_q: u32, right_q: u32, op_q: u32) -> Self {
        Placement { left_q, right_q, op_q }
    }

    /// All powers kept on the operator side; reproduces Weyl's rule.
    pub fn operator(n: u32) -> Self {
        Placement::new(0, 0, n)
    }

    pub fn degree(&self) -> u32 {
        self.left_q + self.right_q + self.op_q
    }

    /// Every split of `n`, operator-side placement first.
    pub fn enumerate(n: u32) -> Vec<Placement> {
        let mut out = Vec::new();
        for op_q in (0..=n).rev() {
            for left_q in (0..=n - op_q).rev() {
                out.push(Placement::new(left_q, n - op_q - left_q, op_q));
            }
        }
        out
    }
}

impl fmt::Display for Placement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "left_q={},right_q={},op_q={}", self.left_q, self.right_q, self.op_q)
    }
}

/// Jet of `(q ∓ d/2)^k psi(q ∓ d/2)` truncated at `d^order`:
/// map `(d power, q power, derivative order) → coefficient`.
fn shifted_jet(k: u32, sign: i64, order: u32) -> BTreeMap<(u32, u32, u32), Rational> {
    let half = BigRational::new(BigInt::from(sign), BigInt::from(2));
    let mut out = BTreeMap::new();
    for r in 0..=k.min(order) {
        for i in 0..=(order - r) {
            let d_pow = r + i;
            let mut c = Rational::from_integer(binomial(k, r)) / Rational::from_integer(factorial(i));
            for _ in 0..d_pow {
                c *= &half;
            }
            *out.entry((d_pow, k - r, i)).or_insert_with(Rational::zero) += c;
        }
    }
    out
}

/// The operator `O` of the bilinear form `∫ psi* O psi` before taking the
/// hermitian part.
pub fn placement_bilinear_form(n: u32, m: u32, placement: Placement) -> Result<OperatorPoly> {
    if placement.degree() != n {
        return Err(Error::InvalidPlacement { placement: placement.to_string(), degree: n });
    }
    if m > JET_LIMIT {
        return Err(Error::JetOrderTooLarge { order: m, limit: JET_LIMIT });
    }
    let left = shifted_jet(placement.left_q, -1, m);
    let right = shifted_jet(placement.right_q, 1, m);

    // Collect ∫ q^a ∂^i psi* ∂^j psi with exactly d^m, which is all that
    // survives (∂/∂d)^m at d = 0; the m! is applied below.
    let mut form: BTreeMap<(u32, u32, u32), Rational> = BTreeMap::new();
    for (&(dl, ql, i), cl) in &left {
        for (&(dr, qr, j), cr) in &right {
            if dl + dr != m {
                continue;
            }
            let key = (ql + qr + placement.op_q, i, j);
            *form.entry(key).or_insert_with(Rational::zero) += cl * cr;
        }
    }

    // Integrate by parts: ∫ q^a ∂^i psi* ∂^j psi
    //   = (-1)^i Σ_r C(i,r) a!/(a-r)! ∫ psi* q^(a-r) ∂^(i+j-r) psi,
    // then ∂^k = (i/hbar)^k p^k combined with (-i hbar)^m m!.
    let m_fact = Rational::from_integer(factorial(m));
    let mut op = OperatorPoly::zero();
    for ((a, i, j), c) in form {
        if c.is_zero() {
            continue;
        }
        let sign = if i % 2 == 0 { Rational::one() } else { -Rational::one() };
        for r in 0..=i.min(a) {
            let falling: BigInt = (0..r).fold(BigInt::one(), |acc, t| acc * (a - t));
            let k = i + j - r;
            let weight = &c * &sign * Rational::from_integer(binomial(i, r) * falling) * &m_fact;
            // (-i)^m i^k hbar^(m-k)
            let phase = CRational::i_pow(3 * m + k);
            let scalar = HbarScalar::monomial(phase.scale(&weight), (m - k) as usize);
            op = &op + &OperatorPoly::monomial(a - r, k, scalar);
        }
    }
    Ok(op)
}

/// Operator assigned to `q^n p^m` under the given placement.
pub fn placement_variants(n: u32, m: u32, placement: Placement) -> Result<OperatorPoly> {
    Ok(placement_bilinear_form(n, m, placement)?.hermitian_part())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn operator_placement_is_weyl() {
        let op = placement_variants(2, 2, Placement::operator(2)).unwrap();
        assert_eq!(op.to_string(), "q^2 p^2 - 2 i hbar q p - 1/2 hbar^2");
    }

    #[test]
    fn density_placements_of_q2p2() {
        let l2 = placement_variants(2, 2, Placement::new(2, 0, 0)).unwrap();
        assert_eq!(l2.to_string(), "q^2 p^2 - 2 i hbar q p - hbar^2");
        let r2 = placement_variants(2, 2, Placement::new(0, 2, 0)).unwrap();
        assert_eq!(r2, l2);
        let split = placement_variants(2, 2, Placement::new(1, 1, 0)).unwrap();
        assert_eq!(split.to_string(), "q^2 p^2 - 2 i hbar q p");
    }

    #[test]
    fn raw_forms() {
        // q^2 on psi* alone gives q^2 p^2 before symmetrizing
        let raw = placement_bilinear_form(2, 2, Placement::new(2, 0, 0)).unwrap();
        assert_eq!(raw, OperatorPoly::word(2, 2));
        let raw = placement_bilinear_form(2, 2, Placement::new(0, 2, 0)).unwrap();
        assert_eq!(raw, &OperatorPoly::p().pow(2) * &OperatorPoly::q().pow(2));
    }

    #[test]
    fn zero_momentum_order_is_plain_power() {
        for pl in Placement::enumerate(3) {
            assert_eq!(placement_variants(3, 0, pl).unwrap(), OperatorPoly::word(3, 0));
        }
    }

    #[test]
    fn enumerate_splits() {
        let all = Placement::enumerate(2);
        assert_eq!(all.len(), 6);
        assert_eq!(all[0], Placement::operator(2));
        assert!(all.iter().all(|p| p.degree() == 2));
    }

    #[test]
    fn guards() {
        assert!(matches!(
            placement_variants(2, 2, Placement::new(1, 0, 0)),
            Err(Error::InvalidPlacement { .. })
        ));
        assert!(matches!(
            placement_variants(1, 9, Placement::operator(1)),
            Err(Error::JetOrderTooLarge { .. })
        ));
    }
}
