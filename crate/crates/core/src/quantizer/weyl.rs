use std::collections::HashMap;

use num_rational::BigRational;
use num_traits::One;

use super::PhasePoly;
use crate::algebra::{binomial, factorial, CRational, HbarScalar, OperatorPoly, Rational};
use crate::error::{Error, Result};

/// Largest `n + m` accepted by [`symmetrize_monomial`].
pub const SYMMETRIZE_LIMIT: u32 = 12;

fn pow_rat(base: &Rational, k: u32) -> Rational {
    (0..k).fold(Rational::one(), |acc, _| acc * base)
}

/// Weyl image of `q^n p^m` by the q-split McCoy form
/// `2^-n Σ_k C(n,k) q^k p^m q^(n-k)`.
pub fn weyl_monomial(n: u32, m: u32) -> OperatorPoly {
    let pm = OperatorPoly::word(0, m);
    let mut acc = OperatorPoly::zero();
    for k in 0..=n {
        let word = &(&OperatorPoly::word(k, 0) * &pm) * &OperatorPoly::word(n - k, 0);
        acc = &acc + &word.scale(&HbarScalar::from_rational(Rational::from_integer(binomial(n, k))));
    }
    acc.scale(&HbarScalar::from_rational(pow_rat(&BigRational::new(1.into(), 2.into()), n)))
}

/// Same image through the p-split form `2^-m Σ_k C(m,k) p^k q^n p^(m-k)`.
pub fn weyl_monomial_p_split(n: u32, m: u32) -> OperatorPoly {
    let qn = OperatorPoly::word(n, 0);
    let mut acc = OperatorPoly::zero();
    for k in 0..=m {
        let word = &(&OperatorPoly::word(0, k) * &qn) * &OperatorPoly::word(0, m - k);
        acc = &acc + &word.scale(&HbarScalar::from_rational(Rational::from_integer(binomial(m, k))));
    }
    acc.scale(&HbarScalar::from_rational(pow_rat(&BigRational::new(1.into(), 2.into()), m)))
}

/// Weyl quantization, extended linearly from [`weyl_monomial`].
pub fn weyl_quantize(f: &PhasePoly) -> OperatorPoly {
    let mut acc = OperatorPoly::zero();
    for (&(n, m), c) in f.terms() {
        acc = &acc + &weyl_monomial(n, m).scale(c);
    }
    acc
}

/// Average over all distinct orderings of `n` copies of `q` and `m` copies
/// of `p`.
pub fn symmetrize_monomial(n: u32, m: u32) -> Result<OperatorPoly> {
    if n + m > SYMMETRIZE_LIMIT {
        return Err(Error::TooManyFactors { factors: n + m, limit: SYMMETRIZE_LIMIT });
    }
    // S(a, b) = sum of all words with a q's and b p's
    //         = q·S(a-1, b) + p·S(a, b-1)
    let mut memo: HashMap<(u32, u32), OperatorPoly> = HashMap::new();
    memo.insert((0, 0), OperatorPoly::one());
    for total in 1..=n + m {
        for a in 0..=total.min(n) {
            let b = total - a;
            if b > m {
                continue;
            }
            let mut s = OperatorPoly::zero();
            if a > 0 {
                s = &s + &(&OperatorPoly::q() * &memo[&(a - 1, b)]);
            }
            if b > 0 {
                s = &s + &(&OperatorPoly::p() * &memo[&(a, b - 1)]);
            }
            memo.insert((a, b), s);
        }
    }
    let count = Rational::from_integer(binomial(n + m, n));
    Ok(memo[&(n, m)].scale(&HbarScalar::from_rational(count.recip())))
}

/// Inverse of [`weyl_quantize`]:
/// `symbol(q^a p^b) = Σ_k (i hbar/2)^k k! C(a,k) C(b,k) q^(a-k) p^(b-k)`.
pub fn weyl_symbol(op: &OperatorPoly) -> PhasePoly {
    let mut out = PhasePoly::zero();
    for (&(a, b), c) in op.terms() {
        for k in 0..=a.min(b) {
            let int = factorial(k) * binomial(a, k) * binomial(b, k);
            let r = Rational::from_integer(int) * pow_rat(&BigRational::new(1.into(), 2.into()), k);
            let factor = HbarScalar::monomial(CRational::i_pow(k).scale(&r), k as usize);
            out.add_term(a - k, b - k, &(c * &factor));
        }
    }
    out
}

/// Moyal star product
/// `f ⋆ g = Σ_k (i hbar/2)^k / k! Σ_j (-1)^j C(k,j) (∂q^(k-j) ∂p^j f)(∂q^j ∂p^(k-j) g)`.
///
/// The series terminates for polynomials.
pub fn star_product(f: &PhasePoly, g: &PhasePoly) -> PhasePoly {
    let order = f.degree().min(g.degree());
    let half = BigRational::new(1.into(), 2.into());
    let mut out = PhasePoly::zero();
    for k in 0..=order {
        let r = pow_rat(&half, k) / Rational::from_integer(factorial(k));
        let prefactor = HbarScalar::monomial(CRational::i_pow(k).scale(&r), k as usize);
        let mut inner = PhasePoly::zero();
        for j in 0..=k {
            let lhs = f.derivative(k - j, j);
            let rhs = g.derivative(j, k - j);
            if lhs.is_zero() || rhs.is_zero() {
                continue;
            }
            let mut c = Rational::from_integer(binomial(k, j));
            if j % 2 == 1 {
                c = -c;
            }
            inner = &inner + &(&lhs * &rhs).scale(&HbarScalar::from_rational(c));
        }
        out = &out + &inner.scale(&prefactor);
    }
    out
}

/// `(f ⋆ g − g ⋆ f) / (i hbar)`; exact for polynomials.
pub fn moyal_bracket_sym(f: &PhasePoly, g: &PhasePoly) -> Result<PhasePoly> {
    let diff = &star_product(f, g) - &star_product(g, f);
    divide_i_hbar(&diff)
}

pub(crate) fn divide_i_hbar(f: &PhasePoly) -> Result<PhasePoly> {
    let mut out = PhasePoly::zero();
    for (&(n, m), c) in f.terms() {
        let q = c.div_i_hbar().ok_or(Error::InexactMoyalDivision)?;
        out.add_term(n, m, &q);
    }
    Ok(out)
}

/// Poisson bracket `∂f/∂q ∂g/∂p − ∂f/∂p ∂g/∂q`.
pub fn poisson_bracket(f: &PhasePoly, g: &PhasePoly) -> PhasePoly {
    &(&f.derivative(1, 0) * &g.derivative(0, 1)) - &(&f.derivative(0, 1) * &g.derivative(1, 0))
}
