use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use num_rational::BigRational;
use num_bigint::BigInt;

use crate::algebra::{join_pieces, monomial_text, print_order, push_scalar_pieces, HbarScalar};

/// Commutative polynomial `Σ c · q^n p^m` on phase space, coefficients in
/// the formal-hbar ring. Zero coefficients are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct PhasePoly {
    terms: BTreeMap<(u32, u32), HbarScalar>,
}

impl PhasePoly {
    pub fn zero() -> Self {
        PhasePoly::default()
    }

    pub fn one() -> Self {
        PhasePoly::constant(HbarScalar::one())
    }

    pub fn constant(s: HbarScalar) -> Self {
        PhasePoly::monomial(0, 0, s)
    }

    pub fn monomial(n: u32, m: u32, s: HbarScalar) -> Self {
        let mut f = PhasePoly::zero();
        f.add_term(n, m, &s);
        f
    }

    /// `q^n p^m`.
    pub fn power(n: u32, m: u32) -> Self {
        PhasePoly::monomial(n, m, HbarScalar::one())
    }

    pub fn q() -> Self {
        PhasePoly::power(1, 0)
    }

    pub fn p() -> Self {
        PhasePoly::power(0, 1)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32), &HbarScalar)> {
        self.terms.iter()
    }

    pub fn coeff(&self, n: u32, m: u32) -> HbarScalar {
        self.terms.get(&(n, m)).cloned().unwrap_or_default()
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|(n, m)| n + m).max().unwrap_or(0)
    }

    pub fn q_degree(&self) -> u32 {
        self.terms.keys().map(|(n, _)| *n).max().unwrap_or(0)
    }

    pub fn p_degree(&self) -> u32 {
        self.terms.keys().map(|(_, m)| *m).max().unwrap_or(0)
    }

    pub(crate) fn add_term(&mut self, n: u32, m: u32, s: &HbarScalar) {
        if s.is_zero() {
            return;
        }
        let entry = self.terms.entry((n, m)).or_default();
        *entry += s;
        if entry.is_zero() {
            self.terms.remove(&(n, m));
        }
    }

    pub fn scale(&self, s: &HbarScalar) -> Self {
        let mut out = PhasePoly::zero();
        for (&(n, m), c) in &self.terms {
            out.add_term(n, m, &(c * s));
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(PhasePoly::one(), |acc, _| &acc * self)
    }

    /// `∂_q^i ∂_p^j f`.
    pub fn derivative(&self, i: u32, j: u32) -> Self {
        let mut out = PhasePoly::zero();
        for (&(n, m), c) in &self.terms {
            if n < i || m < j {
                continue;
            }
            let falling = falling(n, i) * falling(m, j);
            out.add_term(n - i, m - j, &c.scale_rational(&BigRational::from_integer(falling)));
        }
        out
    }

    /// Drop every term carrying a positive power of hbar.
    pub fn classical_part(&self) -> Self {
        let mut out = PhasePoly::zero();
        for (&(n, m), c) in &self.terms {
            out.add_term(n, m, &c.classical_part());
        }
        out
    }

    /// True when all coefficients are real (after any hbar substitution).
    pub fn is_real(&self) -> bool {
        self.terms.values().all(HbarScalar::is_real)
    }

    /// Numeric coefficients with hbar substituted: `((n, m), c)`.
    pub fn numeric_terms(&self, hbar: f64) -> Vec<((u32, u32), Complex64)> {
        self.terms.iter().map(|(&k, c)| (k, c.eval(hbar))).collect()
    }

    pub fn eval(&self, q: f64, p: f64, hbar: f64) -> Complex64 {
        self.terms
            .iter()
            .map(|(&(n, m), c)| c.eval(hbar) * q.powi(n as i32) * p.powi(m as i32))
            .sum()
    }
}

fn falling(n: u32, k: u32) -> BigInt {
    (0..k).fold(BigInt::from(1), |acc, i| acc * (n - i))
}

impl<'a> Add<&'a PhasePoly> for &'a PhasePoly {
    type Output = PhasePoly;
    fn add(self, rhs: &PhasePoly) -> PhasePoly {
        let mut out = self.clone();
        for (&(n, m), c) in &rhs.terms {
            out.add_term(n, m, c);
        }
        out
    }
}

impl<'a> Sub<&'a PhasePoly> for &'a PhasePoly {
    type Output = PhasePoly;
    fn sub(self, rhs: &PhasePoly) -> PhasePoly {
        let mut out = self.clone();
        for (&(n, m), c) in &rhs.terms {
            out.add_term(n, m, &-c.clone());
        }
        out
    }
}

impl<'a> Mul<&'a PhasePoly> for &'a PhasePoly {
    type Output = PhasePoly;
    fn mul(self, rhs: &PhasePoly) -> PhasePoly {
        let mut out = PhasePoly::zero();
        for (&(n1, m1), a) in &self.terms {
            for (&(n2, m2), b) in &rhs.terms {
                out.add_term(n1 + n2, m1 + m2, &(a * b));
            }
        }
        out
    }
}

impl Neg for &PhasePoly {
    type Output = PhasePoly;
    fn neg(self) -> PhasePoly {
        self.scale(&HbarScalar::from_int(-1))
    }
}

impl fmt::Display for PhasePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut pieces = Vec::new();
        for (&(n, m), c) in print_order(&self.terms) {
            push_scalar_pieces(&mut pieces, c, &monomial_text(n, m));
        }
        f.write_str(&join_pieces(&pieces))
    }
}
