//! Coefficient ring: complex rationals and polynomials in a formal `hbar`.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Arbitrary-precision rational number, always kept in lowest terms with a
/// positive denominator.
pub type Rational = BigRational;

pub(crate) fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub(crate) fn rat_to_f64(r: &Rational) -> f64 {
    // Exact for the small coefficients we handle; falls back to a
    // quotient of floats when the parts do not fit in i64.
    match (r.numer().to_i64(), r.denom().to_i64()) {
        (Some(n), Some(d)) => n as f64 / d as f64,
        _ => r.numer().to_f64().unwrap_or(f64::NAN) / r.denom().to_f64().unwrap_or(f64::NAN),
    }
}

/// Complex rational `re + i·im`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CRational {
    pub re: Rational,
    pub im: Rational,
}

impl CRational {
    pub fn new(re: Rational, im: Rational) -> Self {
        CRational { re, im }
    }

    pub fn zero() -> Self {
        CRational::new(Rational::zero(), Rational::zero())
    }

    pub fn one() -> Self {
        CRational::new(Rational::one(), Rational::zero())
    }

    pub fn i() -> Self {
        CRational::new(Rational::zero(), Rational::one())
    }

    pub fn real(re: Rational) -> Self {
        CRational::new(re, Rational::zero())
    }

    pub fn from_int(n: i64) -> Self {
        CRational::real(Rational::from_integer(BigInt::from(n)))
    }

    /// `i^k`.
    pub fn i_pow(k: u32) -> Self {
        match k % 4 {
            0 => CRational::one(),
            1 => CRational::i(),
            2 => CRational::from_int(-1),
            _ => -CRational::i(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        CRational::new(self.re.clone(), -self.im.clone())
    }

    pub fn scale(&self, r: &Rational) -> Self {
        CRational::new(&self.re * r, &self.im * r)
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::new(rat_to_f64(&self.re), rat_to_f64(&self.im))
    }
}

impl From<Rational> for CRational {
    fn from(r: Rational) -> Self {
        CRational::real(r)
    }
}

impl<'a> Add<&'a CRational> for &'a CRational {
    type Output = CRational;
    fn add(self, rhs: &CRational) -> CRational {
        CRational::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
}

impl<'a> Sub<&'a CRational> for &'a CRational {
    type Output = CRational;
    fn sub(self, rhs: &CRational) -> CRational {
        CRational::new(&self.re - &rhs.re, &self.im - &rhs.im)
    }
}

impl<'a> Mul<&'a CRational> for &'a CRational {
    type Output = CRational;
    fn mul(self, rhs: &CRational) -> CRational {
        CRational::new(
            &self.re * &rhs.re - &self.im * &rhs.im,
            &self.re * &rhs.im + &self.im * &rhs.re,
        )
    }
}

impl Neg for CRational {
    type Output = CRational;
    fn neg(self) -> CRational {
        CRational::new(-self.re, -self.im)
    }
}

/// Polynomial in the formal Planck constant with complex-rational
/// coefficients. `coeffs[k]` multiplies `hbar^k`; the vector never ends in a
/// zero coefficient, so the zero scalar is the empty vector.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct HbarScalar {
    coeffs: Vec<CRational>,
}

impl HbarScalar {
    pub fn zero() -> Self {
        HbarScalar { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        HbarScalar::constant(CRational::one())
    }

    pub fn constant(c: CRational) -> Self {
        HbarScalar::from_coeffs(vec![c])
    }

    pub fn from_int(n: i64) -> Self {
        HbarScalar::constant(CRational::from_int(n))
    }

    pub fn from_rational(r: Rational) -> Self {
        HbarScalar::constant(CRational::real(r))
    }

    /// `c · hbar^k`.
    pub fn monomial(c: CRational, k: usize) -> Self {
        let mut coeffs = vec![CRational::zero(); k];
        coeffs.push(c);
        HbarScalar::from_coeffs(coeffs)
    }

    pub fn hbar() -> Self {
        HbarScalar::monomial(CRational::one(), 1)
    }

    pub fn from_coeffs(mut coeffs: Vec<CRational>) -> Self {
        while coeffs.last().is_some_and(CRational::is_zero) {
            coeffs.pop();
        }
        HbarScalar { coeffs }
    }

    pub fn coeffs(&self) -> &[CRational] {
        &self.coeffs
    }

    /// Coefficient of `hbar^k` (zero past the degree).
    pub fn coeff(&self, k: usize) -> CRational {
        self.coeffs.get(k).cloned().unwrap_or_else(CRational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// True when every coefficient has zero imaginary part.
    pub fn is_real(&self) -> bool {
        self.coeffs.iter().all(CRational::is_real)
    }

    /// Highest power of hbar, `None` for zero.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn conj(&self) -> Self {
        HbarScalar::from_coeffs(self.coeffs.iter().map(CRational::conj).collect())
    }

    pub fn scale(&self, c: &CRational) -> Self {
        HbarScalar::from_coeffs(self.coeffs.iter().map(|x| x * c).collect())
    }

    pub fn scale_rational(&self, r: &Rational) -> Self {
        HbarScalar::from_coeffs(self.coeffs.iter().map(|x| x.scale(r)).collect())
    }

    /// Keep only the hbar-free part.
    pub fn classical_part(&self) -> Self {
        HbarScalar::constant(self.coeff(0))
    }

    /// Exact division by `i·hbar`; `None` when the hbar-free coefficient is
    /// nonzero (the quotient would not be a polynomial).
    pub fn div_i_hbar(&self) -> Option<Self> {
        match self.coeffs.first() {
            None => Some(HbarScalar::zero()),
            Some(c0) if !c0.is_zero() => None,
            Some(_) => {
                let minus_i = -CRational::i();
                Some(HbarScalar::from_coeffs(
                    self.coeffs[1..].iter().map(|c| c * &minus_i).collect(),
                ))
            }
        }
    }

    /// Substitute a numeric value for hbar.
    pub fn eval(&self, hbar: f64) -> Complex64 {
        // Horner
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, c| acc * hbar + c.to_complex())
    }
}

impl From<CRational> for HbarScalar {
    fn from(c: CRational) -> Self {
        HbarScalar::constant(c)
    }
}

impl<'a> Add<&'a HbarScalar> for &'a HbarScalar {
    type Output = HbarScalar;
    fn add(self, rhs: &HbarScalar) -> HbarScalar {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        HbarScalar::from_coeffs((0..n).map(|k| &self.coeff(k) + &rhs.coeff(k)).collect())
    }
}

impl<'a> Sub<&'a HbarScalar> for &'a HbarScalar {
    type Output = HbarScalar;
    fn sub(self, rhs: &HbarScalar) -> HbarScalar {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        HbarScalar::from_coeffs((0..n).map(|k| &self.coeff(k) - &rhs.coeff(k)).collect())
    }
}

impl<'a> Mul<&'a HbarScalar> for &'a HbarScalar {
    type Output = HbarScalar;
    fn mul(self, rhs: &HbarScalar) -> HbarScalar {
        if self.is_zero() || rhs.is_zero() {
            return HbarScalar::zero();
        }
        let mut out = vec![CRational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = &out[i + j] + &(a * b);
            }
        }
        HbarScalar::from_coeffs(out)
    }
}

impl AddAssign<&HbarScalar> for HbarScalar {
    fn add_assign(&mut self, rhs: &HbarScalar) {
        *self = &*self + rhs;
    }
}

impl Neg for HbarScalar {
    type Output = HbarScalar;
    fn neg(self) -> HbarScalar {
        HbarScalar::from_coeffs(self.coeffs.into_iter().map(Neg::neg).collect())
    }
}

impl fmt::Display for HbarScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut pieces = Vec::new();
        push_scalar_pieces(&mut pieces, self, "");
        f.write_str(&join_pieces(&pieces))
    }
}

/// One printable summand: a signed rational, an optional `i`, and a textual
/// tail (`hbar^k q^a p^b`, possibly empty).
pub(crate) struct Piece {
    negative: bool,
    magnitude: Rational,
    imaginary: bool,
    tail: String,
}

/// Expand a scalar times a monomial tail into pieces ordered by hbar power,
/// real part before imaginary part.
pub(crate) fn push_scalar_pieces(out: &mut Vec<Piece>, s: &HbarScalar, monomial: &str) {
    for (k, c) in s.coeffs.iter().enumerate() {
        let hbar = match k {
            0 => String::new(),
            1 => "hbar".to_string(),
            _ => format!("hbar^{k}"),
        };
        let tail = [hbar.as_str(), monomial]
            .iter()
            .filter(|t| !t.is_empty())
            .copied()
            .collect::<Vec<_>>()
            .join(" ");
        for (part, imaginary) in [(&c.re, false), (&c.im, true)] {
            if part.is_zero() {
                continue;
            }
            out.push(Piece {
                negative: part.is_negative(),
                magnitude: part.abs(),
                imaginary,
                tail: tail.clone(),
            });
        }
    }
}

pub(crate) fn join_pieces(pieces: &[Piece]) -> String {
    if pieces.is_empty() {
        return "0".to_string();
    }
    let mut s = String::new();
    for (idx, piece) in pieces.iter().enumerate() {
        let mut words = Vec::new();
        let unit = piece.magnitude.is_one();
        if !unit || (!piece.imaginary && piece.tail.is_empty()) {
            words.push(piece.magnitude.to_string());
        }
        if piece.imaginary {
            words.push("i".to_string());
        }
        if !piece.tail.is_empty() {
            words.push(piece.tail.clone());
        }
        let body = words.join(" ");
        match (idx, piece.negative) {
            (0, false) => s.push_str(&body),
            (0, true) => {
                s.push('-');
                s.push_str(&body);
            }
            (_, false) => {
                s.push_str(" + ");
                s.push_str(&body);
            }
            (_, true) => {
                s.push_str(" - ");
                s.push_str(&body);
            }
        }
    }
    s
}

pub(crate) fn monomial_text(a: u32, b: u32) -> String {
    let mut parts = Vec::new();
    for (sym, e) in [("q", a), ("p", b)] {
        match e {
            0 => {}
            1 => parts.push(sym.to_string()),
            _ => parts.push(format!("{sym}^{e}")),
        }
    }
    parts.join(" ")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rationals_are_canonical() {
        let r = rat(6, -4);
        assert_eq!(r.numer(), &BigInt::from(-3));
        assert_eq!(r.denom(), &BigInt::from(2));
        assert_eq!(rat(0, 5), Rational::zero());
    }

    #[test]
    fn trailing_zeros_are_trimmed() {
        let s = HbarScalar::from_coeffs(vec![CRational::one(), CRational::zero()]);
        assert_eq!(s.degree(), Some(0));
        let z = &HbarScalar::hbar() - &HbarScalar::hbar();
        assert!(z.is_zero());
        assert_eq!(z.coeffs().len(), 0);
    }

    #[test]
    fn product_and_eval() {
        // (1 + i hbar)(1 - i hbar) = 1 + hbar^2
        let a = HbarScalar::from_coeffs(vec![CRational::one(), CRational::i()]);
        let p = &a * &a.conj();
        assert_eq!(p, HbarScalar::from_coeffs(vec![CRational::one(), CRational::zero(), CRational::one()]));
        assert_eq!(p.eval(2.0), Complex64::new(5.0, 0.0));
    }

    #[test]
    fn division_by_i_hbar() {
        let s = HbarScalar::monomial(CRational::i(), 1);
        assert_eq!(s.div_i_hbar(), Some(HbarScalar::one()));
        assert_eq!(HbarScalar::one().div_i_hbar(), None);
    }

    #[test]
    fn display() {
        let s = HbarScalar::from_coeffs(vec![CRational::real(rat(1, 2)), -CRational::i()]);
        assert_eq!(s.to_string(), "1/2 - i hbar");
        assert_eq!(HbarScalar::zero().to_string(), "0");
        assert_eq!(HbarScalar::one().to_string(), "1");
    }
}
