//! Classical phase-space polynomials and the maps that turn them into
//! operators.

mod catalog;
mod parse;
mod phase_poly;
mod placement;
mod weyl;

pub use catalog::{rule_catalog, RuleFixture};
pub use parse::parse_phase_poly;
pub use phase_poly::PhasePoly;
pub use placement::{placement_bilinear_form, placement_variants, Placement, JET_LIMIT};
pub use weyl::{
    moyal_bracket_sym, poisson_bracket, star_product, symmetrize_monomial, weyl_monomial,
    weyl_monomial_p_split, weyl_quantize, weyl_symbol, SYMMETRIZE_LIMIT,
};
