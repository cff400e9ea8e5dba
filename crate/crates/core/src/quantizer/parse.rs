//! Text front end for phase-space polynomials.
//!
//! ```text
//! expr     := sign? term (('+' | '-') term)*
//! term     := rational factor* | factor+
//! factor   := ('q' | 'p' | 'hbar' | 'i') ('^' uint)?
//! rational := uint ('/' uint)?
//! ```
//!
//! Juxtaposition is multiplication; whitespace separates factors. The
//! printer emits exactly this language, so print → parse is a fixed point.

use num_bigint::BigInt;

use super::PhasePoly;
use crate::algebra::{CRational, HbarScalar, Rational};
use crate::error::{ParseError, ParseErrorKind};

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

type PResult<T> = std::result::Result<T, ParseError>;

impl<'a> Parser<'a> {
    fn err(&self, at: usize, kind: ParseErrorKind) -> ParseError {
        ParseError { offset: at + 1, kind }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn unexpected(&self, at: usize) -> ParseError {
        match std::str::from_utf8(&self.src[at..]).ok().and_then(|s| s.chars().next()) {
            Some(c) => self.err(at, ParseErrorKind::Unexpected(c)),
            None => self.err(at, ParseErrorKind::UnexpectedEnd),
        }
    }

    fn uint(&mut self) -> PResult<BigInt> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        let digits = std::str::from_utf8(&self.src[start..self.pos]).unwrap_or_default();
        digits.parse::<BigInt>().map_err(|_| self.unexpected(start))
    }

    fn exponent(&mut self) -> PResult<u32> {
        self.skip_ws();
        let at = self.pos;
        match self.src.get(at) {
            Some(b'-') => return Err(self.err(at, ParseErrorKind::NegativeExponent)),
            Some(c) if c.is_ascii_digit() => {}
            Some(_) => return Err(self.err(at, ParseErrorKind::ExpectedExponent)),
            None => return Err(self.err(at, ParseErrorKind::UnexpectedEnd)),
        }
        let value = self.uint()?;
        if matches!(self.src.get(self.pos), Some(b'.')) {
            return Err(self.err(self.pos, ParseErrorKind::NonIntegerExponent));
        }
        u32::try_from(value).map_err(|_| self.err(at, ParseErrorKind::NumberTooLarge))
    }

    fn rational(&mut self) -> PResult<Rational> {
        let num = self.uint()?;
        if self.peek() == Some(b'/') {
            self.pos += 1;
            self.skip_ws();
            let at = self.pos;
            if !self.src.get(at).is_some_and(u8::is_ascii_digit) {
                return Err(self.unexpected(at));
            }
            let den = self.uint()?;
            if den == BigInt::from(0) {
                return Err(self.err(at, ParseErrorKind::ZeroDenominator));
            }
            return Ok(Rational::new(num, den));
        }
        if matches!(self.src.get(self.pos), Some(b'.')) {
            return Err(self.unexpected(self.pos));
        }
        Ok(Rational::from_integer(num))
    }

    /// One factor, returned as a (q, p) exponent pair plus a scalar factor.
    fn factor(&mut self) -> PResult<(u32, u32, HbarScalar)> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphabetic() {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap_or_default().to_string();
        let exp = if self.peek() == Some(b'^') {
            self.pos += 1;
            self.exponent()?
        } else {
            1
        };
        Ok(match name.as_str() {
            "q" => (exp, 0, HbarScalar::one()),
            "p" => (0, exp, HbarScalar::one()),
            "hbar" => (0, 0, HbarScalar::monomial(CRational::one(), exp as usize)),
            "i" => (0, 0, HbarScalar::constant(CRational::i_pow(exp))),
            _ => return Err(self.err(start, ParseErrorKind::UnknownSymbol(name))),
        })
    }

    fn term(&mut self) -> PResult<PhasePoly> {
        let mut coeff = HbarScalar::one();
        let (mut n, mut m) = (0u32, 0u32);
        let mut any = false;
        match self.peek() {
            Some(c) if c.is_ascii_digit() => {
                coeff = HbarScalar::from_rational(self.rational()?);
                any = true;
            }
            Some(c) if c.is_ascii_alphabetic() => {}
            _ => return Err(self.unexpected(self.pos)),
        }
        while let Some(c) = self.peek() {
            if !c.is_ascii_alphabetic() {
                break;
            }
            let (a, b, s) = self.factor()?;
            n += a;
            m += b;
            coeff = &coeff * &s;
            any = true;
        }
        debug_assert!(any);
        Ok(PhasePoly::monomial(n, m, coeff))
    }

    fn expr(&mut self) -> PResult<PhasePoly> {
        if self.peek().is_none() {
            return Err(self.err(self.pos, ParseErrorKind::Empty));
        }
        let mut negative = false;
        if self.peek() == Some(b'-') {
            negative = true;
            self.pos += 1;
        } else if self.peek() == Some(b'+') {
            self.pos += 1;
        }
        let mut acc = PhasePoly::zero();
        loop {
            let t = self.term()?;
            acc = if negative { &acc - &t } else { &acc + &t };
            match self.peek() {
                None => return Ok(acc),
                Some(b'+') => negative = false,
                Some(b'-') => negative = true,
                Some(_) => return Err(self.unexpected(self.pos)),
            }
            self.pos += 1;
        }
    }
}

/// Parse a phase-space polynomial such as `"1/2 p^2 + 1/2 q^2"`.
pub fn parse_phase_poly(text: &str) -> Result<PhasePoly, ParseError> {
    Parser { src: text.as_bytes(), pos: 0 }.expr()
}

impl std::str::FromStr for PhasePoly {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_phase_poly(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat;

    #[test]
    fn monomial() {
        assert_eq!(parse_phase_poly("q^2 p^2").unwrap(), PhasePoly::power(2, 2));
    }

    #[test]
    fn oscillator_hamiltonian() {
        let h = parse_phase_poly("1/2 p^2 + 1/2 q^2").unwrap();
        let half = HbarScalar::from_rational(rat(1, 2));
        let expected = &PhasePoly::monomial(0, 2, half.clone()) + &PhasePoly::monomial(2, 0, half);
        assert_eq!(h, expected);
    }

    #[test]
    fn hbar_and_signs() {
        let f = parse_phase_poly("-3/4 hbar^2 q^2 + 2 - p").unwrap();
        assert_eq!(f.to_string(), "-3/4 hbar^2 q^2 - p + 2");
        assert_eq!(parse_phase_poly("i hbar").unwrap().to_string(), "i hbar");
    }

    #[test]
    fn division_of_monomials_is_rejected() {
        let e = parse_phase_poly("p^2/2 + q^4/4").unwrap_err();
        assert_eq!(e.offset, 4);
        assert_eq!(e.kind, ParseErrorKind::Unexpected('/'));
    }

    #[test]
    fn error_offsets() {
        let e = parse_phase_poly("q^^2").unwrap_err();
        assert_eq!(e.offset, 3);
        assert_eq!(e.kind, ParseErrorKind::ExpectedExponent);
        assert_eq!(parse_phase_poly("q^-2").unwrap_err().kind, ParseErrorKind::NegativeExponent);
        assert_eq!(parse_phase_poly("q^1.5").unwrap_err().kind, ParseErrorKind::NonIntegerExponent);
        assert_eq!(parse_phase_poly("").unwrap_err().kind, ParseErrorKind::Empty);
        assert_eq!(parse_phase_poly("q +").unwrap_err().kind, ParseErrorKind::UnexpectedEnd);
        assert_eq!(parse_phase_poly("1/0 q").unwrap_err().kind, ParseErrorKind::ZeroDenominator);
        assert!(matches!(parse_phase_poly("x").unwrap_err().kind, ParseErrorKind::UnknownSymbol(_)));
        assert!(parse_phase_poly("q 2").is_err());
    }
}
