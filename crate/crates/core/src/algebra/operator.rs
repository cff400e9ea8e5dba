use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::scalar::{join_pieces, monomial_text, push_scalar_pieces, CRational, HbarScalar, Rational};
use super::{binomial, factorial};

/// Element of the Heisenberg algebra `[q, p] = i hbar`, stored in normal
/// order: the key `(a, b)` stands for the word `q^a p^b`.
///
/// Zero coefficients are never stored, so two operators are equal exactly
/// when their maps are equal.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct OperatorPoly {
    terms: BTreeMap<(u32, u32), HbarScalar>,
}

/// Coefficient of `q^(n-k) p^(m-k)` when `p^m q^n` is brought into normal
/// order: `k! C(m,k) C(n,k) (-i hbar)^k`.
pub(crate) fn reorder_coeff(m: u32, n: u32, k: u32) -> HbarScalar {
    let int = factorial(k) * binomial(m, k) * binomial(n, k);
    let c = CRational::i_pow(3 * k).scale(&Rational::from_integer(int));
    HbarScalar::monomial(c, k as usize)
}

impl OperatorPoly {
    pub fn zero() -> Self {
        OperatorPoly::default()
    }

    pub fn one() -> Self {
        OperatorPoly::scalar(HbarScalar::one())
    }

    pub fn scalar(s: HbarScalar) -> Self {
        OperatorPoly::monomial(0, 0, s)
    }

    /// `s · q^a p^b`.
    pub fn monomial(a: u32, b: u32, s: HbarScalar) -> Self {
        let mut op = OperatorPoly::zero();
        op.add_term(a, b, &s);
        op
    }

    /// The word `q^a p^b` with unit coefficient.
    pub fn word(a: u32, b: u32) -> Self {
        OperatorPoly::monomial(a, b, HbarScalar::one())
    }

    pub fn q() -> Self {
        OperatorPoly::word(1, 0)
    }

    pub fn p() -> Self {
        OperatorPoly::word(0, 1)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32), &HbarScalar)> {
        self.terms.iter()
    }

    pub fn coeff(&self, a: u32, b: u32) -> HbarScalar {
        self.terms.get(&(a, b)).cloned().unwrap_or_default()
    }

    /// Largest `a + b` over the stored words; 0 for scalars and zero.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|(a, b)| a + b).max().unwrap_or(0)
    }

    pub(crate) fn add_term(&mut self, a: u32, b: u32, s: &HbarScalar) {
        if s.is_zero() {
            return;
        }
        let entry = self.terms.entry((a, b)).or_default();
        *entry += s;
        if entry.is_zero() {
            self.terms.remove(&(a, b));
        }
    }

    pub fn scale(&self, s: &HbarScalar) -> Self {
        let mut out = OperatorPoly::zero();
        for (&(a, b), c) in &self.terms {
            out.add_term(a, b, &(c * s));
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(OperatorPoly::one(), |acc, _| &acc * self)
    }

    /// `[self, rhs] = self·rhs − rhs·self`.
    pub fn commutator(&self, rhs: &OperatorPoly) -> Self {
        &(self * rhs) - &(rhs * self)
    }

    /// Hermitian adjoint: each word is reversed (`(q^a p^b)† = p^b q^a`), the
    /// coefficient conjugated, and the result brought back to normal order.
    pub fn adjoint(&self) -> Self {
        let mut out = OperatorPoly::zero();
        for (&(a, b), c) in &self.terms {
            let cbar = c.conj();
            for k in 0..=a.min(b) {
                out.add_term(a - k, b - k, &(&cbar * &reorder_coeff(b, a, k)));
            }
        }
        out
    }

    /// `(self + self†) / 2`.
    pub fn hermitian_part(&self) -> Self {
        (self + &self.adjoint()).scale(&HbarScalar::from_rational(Rational::new(1.into(), 2.into())))
    }

    pub fn is_self_adjoint(&self) -> bool {
        self.adjoint() == *self
    }
}

impl<'a> Add<&'a OperatorPoly> for &'a OperatorPoly {
    type Output = OperatorPoly;
    fn add(self, rhs: &OperatorPoly) -> OperatorPoly {
        let mut out = self.clone();
        for (&(a, b), c) in &rhs.terms {
            out.add_term(a, b, c);
        }
        out
    }
}

impl<'a> Sub<&'a OperatorPoly> for &'a OperatorPoly {
    type Output = OperatorPoly;
    fn sub(self, rhs: &OperatorPoly) -> OperatorPoly {
        let mut out = self.clone();
        for (&(a, b), c) in &rhs.terms {
            out.add_term(a, b, &-c.clone());
        }
        out
    }
}

impl<'a> Mul<&'a OperatorPoly> for &'a OperatorPoly {
    type Output = OperatorPoly;
    fn mul(self, rhs: &OperatorPoly) -> OperatorPoly {
        let mut out = OperatorPoly::zero();
        for (&(a, b), x) in &self.terms {
            for (&(c, d), y) in &rhs.terms {
                let xy = x * y;
                // q^a (p^b q^c) p^d
                for k in 0..=b.min(c) {
                    out.add_term(a + c - k, b + d - k, &(&xy * &reorder_coeff(b, c, k)));
                }
            }
        }
        out
    }
}

impl Neg for &OperatorPoly {
    type Output = OperatorPoly;
    fn neg(self) -> OperatorPoly {
        self.scale(&HbarScalar::from_int(-1))
    }
}

macro_rules! forward_owned {
    ($tr:ident, $method:ident) => {
        impl $tr<OperatorPoly> for OperatorPoly {
            type Output = OperatorPoly;
            fn $method(self, rhs: OperatorPoly) -> OperatorPoly {
                (&self).$method(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

/// Sort key shared by the printers: total degree descending, then q-degree
/// descending.
pub(crate) fn print_order(terms: &BTreeMap<(u32, u32), HbarScalar>) -> Vec<(&(u32, u32), &HbarScalar)> {
    let mut v: Vec<_> = terms.iter().collect();
    v.sort_by(|((a1, b1), _), ((a2, b2), _)| (a2 + b2, a2).cmp(&(a1 + b1, a1)));
    v
}

impl fmt::Display for OperatorPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut pieces = Vec::new();
        for (&(a, b), c) in print_order(&self.terms) {
            push_scalar_pieces(&mut pieces, c, &monomial_text(a, b));
        }
        f.write_str(&join_pieces(&pieces))
    }
}
