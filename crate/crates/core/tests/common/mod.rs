#![allow(dead_code)]

use proptest::prelude::*;
use weylquant::{CRational, HbarScalar, OperatorPoly, PhasePoly};

fn scalar(re: i64, im: i64, k: usize) -> HbarScalar {
    let c = &CRational::from_int(re) + &(&CRational::i() * &CRational::from_int(im));
    HbarScalar::monomial(c, k)
}

/// Sparse operator with small Gaussian-integer coefficients.
pub fn operator(max_power: u32, max_terms: usize) -> impl Strategy<Value = OperatorPoly> {
    prop::collection::vec((0..=max_power, 0..=max_power, -3i64..=3, -3i64..=3, 0usize..2), 0..=max_terms).prop_map(|terms| {
        terms.into_iter().fold(OperatorPoly::zero(), |acc, (a, b, re, im, k)| acc + OperatorPoly::monomial(a, b, scalar(re, im, k)))
    })
}

/// Phase-space polynomial of total degree at most `max_degree`.
pub fn phase_poly(max_degree: u32, max_terms: usize) -> impl Strategy<Value = PhasePoly> {
    prop::collection::vec((0..=max_degree, 0..=max_degree, -4i64..=4, -2i64..=2, 0usize..2), 0..=max_terms).prop_map(move |terms| {
        terms
            .into_iter()
            .filter(|(n, m, ..)| n + m <= max_degree)
            .fold(PhasePoly::zero(), |acc, (n, m, re, im, k)| &acc + &PhasePoly::monomial(n, m, scalar(re, im, k)))
    })
}

/// Real classical polynomial (no hbar, rational real coefficients).
pub fn real_phase_poly(max_degree: u32, max_terms: usize) -> impl Strategy<Value = PhasePoly> {
    prop::collection::vec((0..=max_degree, 0..=max_degree, -4i64..=4), 0..=max_terms).prop_map(move |terms| {
        terms
            .into_iter()
            .filter(|(n, m, _)| n + m <= max_degree)
            .fold(PhasePoly::zero(), |acc, (n, m, re)| &acc + &PhasePoly::monomial(n, m, HbarScalar::from_int(re)))
    })
}

pub fn poly(s: &str) -> PhasePoly {
    s.parse().unwrap()
}
