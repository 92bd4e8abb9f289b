//! Exact arithmetic: rationals, sparse polynomials over the fixed alphabet,
//! and reduced rational functions.

mod gcd;
mod mpoly;
mod rat;
mod ratfunc;
mod text;
mod var;

pub use gcd::{content_in, gcd, gcd_many, lcm};
pub use mpoly::{MPoly, Monomial};
pub use rat::Rat;
pub use ratfunc::{rf_normalize, RatFunc};
pub use text::parse_poly;
pub use var::{Var, MAX_WEIGHTS, NVARS};

/// Shorthand used throughout the crate and its tests.
pub fn poly(src: &str) -> MPoly {
    parse_poly(src).unwrap_or_else(|e| panic!("bad polynomial literal {src:?}: {e}"))
}
