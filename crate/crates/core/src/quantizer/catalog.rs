use crate::algebra::{rat, CRational, HbarScalar, OperatorPoly};
use crate::error::{Error, Result};

/// Published operator assignment of one quantization rule.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RuleFixture {
    pub rule_name: &'static str,
    pub expr_id: &'static str,
    /// 1-based variant index within the rule.
    pub variant: u32,
    pub operator: OperatorPoly,
    pub ambiguous: bool,
}

/// `q^2 p^2 - 2 i hbar q p + c hbar^2`.
fn q2p2_with_constant(num: i64, den: i64) -> OperatorPoly {
    let cross = OperatorPoly::monomial(1, 1, HbarScalar::monomial(CRational::new(rat(0, 1), rat(-2, 1)), 1));
    let constant = OperatorPoly::scalar(HbarScalar::monomial(CRational::real(rat(num, den)), 2));
    &(&OperatorPoly::word(2, 2) + &cross) + &constant
}

/// Catalog entries known for `expr_id`; only `"q2p2"` ships.
pub fn rule_catalog(expr_id: &str) -> Result<Vec<RuleFixture>> {
    if expr_id != "q2p2" {
        return Err(Error::UnknownCatalogEntry(expr_id.to_string()));
    }
    let entry = |rule_name, variant, num, den, ambiguous| RuleFixture {
        rule_name,
        expr_id: "q2p2",
        variant,
        operator: q2p2_with_constant(num, den),
        ambiguous,
    };
    Ok(vec![
        entry("von Neumann", 1, -1, 4, true),
        entry("von Neumann", 2, -1, 1, true),
        entry("Dirac", 1, -1, 3, true),
        entry("Dirac", 2, -2, 3, true),
        entry("Weyl", 1, -1, 2, false),
    ])
}
