//! Shared inputs for the benchmarks.

use loopchart::{parse_star_expr, StarExpr};

/// The worked examples: the iteration of two loops, the three-branch
/// expression without LEE, and the expression whose chart has LEE.
pub const GOLDENS: [(&str, &str); 3] = [
    ("e", "(a*.b*)*"),
    ("f", "(a1.(1+b1.0)+a2.(1+b2.0)+a3.(1+b3.0))*.0"),
    ("g0", "((1.a).(c.a+a.(b+b.a))*).0"),
];

pub fn goldens() -> Vec<(&'static str, StarExpr)> {
    GOLDENS
        .iter()
        .map(|(name, text)| (*name, parse_star_expr(text).expect("golden parses")))
        .collect()
}
