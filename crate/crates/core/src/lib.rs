//! Recurrence discovery and certification for Abel-type sums
//! `Σ_k F(n,k) (r+k)^(k-1+p) (s-k)^(n-k+q) x^k`, plus the bijective
//! counting machinery for the companion identities.

pub mod algebra;
pub mod error;
pub mod exec;
pub mod linsolve;
pub mod summand;
pub mod celine;
pub mod certify;
pub mod diffrec;
pub mod render;
pub mod bijection;
