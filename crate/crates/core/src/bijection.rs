//! Foata-style bijection for the Abel-type counting identities
//!
//! ```text
//!   Σ C(n,k) k^k (n-k)^(n-k+p) = Σ C(n,k) n^k (n-k)! S(p+n-k, n-k)
//! ```
//!
//! and its `p = 0` case. Functions `f: [n+p] -> [n]` are image tables;
//! subsets of `[n]` are bitmasks with bit `i` standing for element `i+1`.

use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::algebra::{MPoly, Monomial, Rat, Var, MAX_WEIGHTS};
use crate::exec::Exec;

pub type Subset = u32;

/// Largest `n` the bitmask representation supports.
pub const MAX_N: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EndoFunction {
    n: usize,
    image: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BijectionError {
    #[error("image {image} of {arg} lies outside [{n}]")]
    ImageOutOfRange { arg: usize, image: usize, n: usize },
    #[error("n = {0} exceeds the supported maximum {MAX_N}")]
    TooLarge(usize),
    #[error("{0} is not a subset of [{1}]")]
    NotASubset(String, usize),
}

impl EndoFunction {
    /// `f(i) = images[i-1]`, images 1-based.
    pub fn new(n: usize, images: &[usize]) -> Result<EndoFunction, BijectionError> {
        if n > MAX_N {
            return Err(BijectionError::TooLarge(n));
        }
        let mut image = Vec::with_capacity(images.len());
        for (i, &v) in images.iter().enumerate() {
            if v == 0 || v > n {
                return Err(BijectionError::ImageOutOfRange { arg: i + 1, image: v, n });
            }
            image.push((v - 1) as u8);
        }
        if image.len() < n {
            return Err(BijectionError::ImageOutOfRange { arg: image.len() + 1, image: 0, n });
        }
        Ok(EndoFunction { n, image })
    }

    pub fn identity(n: usize) -> EndoFunction {
        EndoFunction { n, image: (0..n as u8).collect() }
    }

    /// Number of functions `[n+p] -> [n]`.
    pub fn count(n: usize, p: usize) -> u64 {
        (n as u64).pow((n + p) as u32)
    }

    /// The `index`-th function in base-`n` digit order.
    pub fn nth(n: usize, p: usize, mut index: u64) -> EndoFunction {
        let mut image = Vec::with_capacity(n + p);
        for _ in 0..n + p {
            image.push((index % n as u64) as u8);
            index /= n as u64;
        }
        EndoFunction { n, image }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.image.len() - self.n
    }

    /// `f(i)` for 1-based `i`, 1-based result.
    pub fn apply(&self, i: usize) -> usize {
        self.image[i - 1] as usize + 1
    }

    fn full(&self) -> Subset {
        full(self.n)
    }

    /// `f(S ∪ [n+1, n+p])` for `S ⊆ [n]`.
    fn image_with_tail(&self, s: Subset) -> Subset {
        let mut out = self.image[self.n..].iter().fold(0, |acc, &v| acc | 1 << v);
        let mut rest = s;
        while rest != 0 {
            let i = rest.trailing_zeros() as usize;
            out |= 1 << self.image[i];
            rest &= rest - 1;
        }
        out
    }

    fn image_of(&self, s: Subset) -> Subset {
        let mut out = 0;
        let mut rest = s;
        while rest != 0 {
            let i = rest.trailing_zeros() as usize;
            out |= 1 << self.image[i];
            rest &= rest - 1;
        }
        out
    }

    /// Hurwitz weight `Π_{i ∈ [n+p]} w_{f(i)}`.
    pub fn weight(&self) -> Monomial {
        let mut m = Monomial::one();
        for &v in &self.image {
            let w = Var::weight(v as usize + 1);
            m = m.with_exp(w, m.exp(w) + 1);
        }
        m
    }
}

impl fmt::Display for EndoFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.image.iter().enumerate().map(|(i, v)| format!("{}->{}", i + 1, v + 1)).collect();
        write!(f, "({})", parts.join(", "))
    }
}

fn full(n: usize) -> Subset {
    if n == 0 {
        0
    } else {
        (1u32 << n) - 1
    }
}

/// Subset from 1-based elements.
pub fn subset(n: usize, elems: &[usize]) -> Result<Subset, BijectionError> {
    let mut s = 0;
    for &e in elems {
        if e == 0 || e > n {
            return Err(BijectionError::NotASubset(format!("{elems:?}"), n));
        }
        s |= 1 << (e - 1);
    }
    Ok(s)
}

pub fn elements(s: Subset) -> Vec<usize> {
    (0..32).filter(|i| s >> i & 1 == 1).map(|i| i + 1).collect()
}

pub fn show(s: Subset) -> String {
    let e: Vec<String> = elements(s).iter().map(|e| e.to_string()).collect();
    format!("{{{}}}", e.join(","))
}

/// A split `[n] = first ⊔ second`: `(A, B)` or `(C, D)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SetPair {
    pub first: Subset,
    pub second: Subset,
}

impl SetPair {
    pub fn from_first(n: usize, first: Subset) -> SetPair {
        SetPair { first, second: full(n) & !first }
    }
}

impl fmt::Display for SetPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", show(self.first), show(self.second))
    }
}

/// `f(A) ⊆ A` and `f(B ∪ [n+1, n+p]) ⊆ B` with `B = [n] \ A`.
pub fn is_valid_ab(f: &EndoFunction, a: Subset) -> bool {
    let b = f.full() & !a;
    f.image_of(a) & !a == 0 && f.image_with_tail(b) & !b == 0
}

/// `f(D ∪ [n+1, n+p]) = D`.
pub fn is_valid_cd(f: &EndoFunction, d: Subset) -> bool {
    f.image_with_tail(d) == d
}

/// `D` is the limit of `S -> f(S ∪ [n+1, n+p])` started at `B`.
pub fn forward_map(f: &EndoFunction, ab: SetPair) -> SetPair {
    let mut s = ab.second;
    loop {
        let next = f.image_with_tail(s);
        if next == s {
            return SetPair { first: f.full() & !s, second: s };
        }
        s = next;
    }
}

/// `B` is everything whose orbit under `f` meets `D` within `n` steps.
pub fn inverse_map(f: &EndoFunction, cd: SetPair) -> SetPair {
    let mut b = 0;
    for start in 0..f.n {
        let mut x = start;
        for _ in 0..=f.n {
            if cd.second >> x & 1 == 1 {
                b |= 1 << start;
                break;
            }
            x = f.image[x] as usize;
        }
    }
    SetPair { first: f.full() & !b, second: b }
}

pub fn count_ab(f: &EndoFunction) -> u64 {
    (0..=f.full()).filter(|&a| is_valid_ab(f, a)).count() as u64
}

pub fn count_cd(f: &EndoFunction) -> u64 {
    (0..=f.full()).filter(|&d| is_valid_cd(f, d)).count() as u64
}

/// The weighted identity for one function reduces to equal pair counts,
/// since the bijection keeps `f` fixed.
pub fn weighted_check(f: &EndoFunction) -> bool {
    count_ab(f) == count_cd(f)
}

/// Both maps restricted to `f` are inverse bijections with valid images.
pub fn roundtrip_ok(f: &EndoFunction) -> bool {
    let n = f.n;
    (0..=f.full()).all(|a| {
        let ok_ab = !is_valid_ab(f, a) || {
            let cd = forward_map(f, SetPair::from_first(n, a));
            is_valid_cd(f, cd.second) && inverse_map(f, cd) == SetPair::from_first(n, a)
        };
        let d = a;
        let ok_cd = !is_valid_cd(f, d) || {
            let cd = SetPair { first: f.full() & !d, second: d };
            let ab = inverse_map(f, cd);
            is_valid_ab(f, ab.first) && forward_map(f, ab) == cd
        };
        ok_ab && ok_cd
    })
}

/// Stirling numbers of the second kind from `S(m,j) = j S(m-1,j) + S(m-1,j-1)`.
pub fn stirling2(m: usize, j: usize) -> BigUint {
    if j > m {
        return BigUint::zero();
    }
    let mut row = vec![BigUint::zero(); j + 1];
    row[0] = BigUint::one();
    for i in 1..=m {
        for t in (1..=j.min(i)).rev() {
            row[t] = &row[t] * BigUint::from(t) + &row[t - 1];
        }
        row[0] = BigUint::zero();
    }
    row[j].clone()
}

fn binom(n: usize, k: usize) -> BigUint {
    (0..k).fold(BigUint::one(), |acc, i| acc * BigUint::from(n - i) / BigUint::from(i + 1))
}

fn factorial(n: usize) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, i| acc * BigUint::from(i))
}

fn upow(b: usize, e: usize) -> BigUint {
    BigUint::from(b).pow(e as u32)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Identity {
    /// `Σ C(n,k) k^k (n-k)^(n-k) = Σ C(n,k) n^k (n-k)!`.
    Cauchy2,
    /// `Σ C(n,k) k^k (n-k)^(n-k+p) = Σ C(n,k) n^k (n-k)! S(p+n-k, n-k)`.
    Kalai1,
}

impl Identity {
    pub fn name(self) -> &'static str {
        match self {
            Identity::Cauchy2 => "cauchy2",
            Identity::Kalai1 => "kalai1",
        }
    }

    fn effective_p(self, p: usize) -> usize {
        match self {
            Identity::Cauchy2 => 0,
            Identity::Kalai1 => p,
        }
    }
}

impl std::str::FromStr for Identity {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "cauchy2" => Ok(Identity::Cauchy2),
            "kalai1" => Ok(Identity::Kalai1),
            other => Err(format!("unknown identity {other:?} (expected cauchy2 or kalai1)")),
        }
    }
}

/// Left side, counting `(f, A, B)` by `|A| = k`. Uses `0^0 = 1`.
pub fn closed_lhs(n: usize, p: usize) -> BigUint {
    (0..=n).map(|k| binom(n, k) * upow(k, k) * upow(n - k, n - k + p)).sum()
}

/// Right side, counting `(f, C, D)` by `|C| = k`.
pub fn closed_rhs(n: usize, p: usize) -> BigUint {
    (0..=n).map(|k| binom(n, k) * upow(n, k) * factorial(n - k) * stirling2(p + n - k, n - k)).sum()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub identity: Identity,
    pub n: usize,
    pub p: usize,
    pub closed_lhs: String,
    pub closed_rhs: String,
    pub count_ab: u64,
    pub count_cd: u64,
    pub functions: u64,
    pub per_function_ok: bool,
    pub roundtrip_ok: bool,
}

impl IdentityReport {
    pub fn passed(&self) -> bool {
        self.closed_lhs == self.closed_rhs
            && self.closed_lhs == self.count_ab.to_string()
            && self.count_ab == self.count_cd
            && self.per_function_ok
            && self.roundtrip_ok
    }
}

impl fmt::Display for IdentityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} n={} p={}: {} = {} (closed forms), {} = {} (enumerated over {} functions)",
            self.identity.name(),
            self.n,
            self.p,
            self.closed_lhs,
            self.closed_rhs,
            self.count_ab,
            self.count_cd,
            self.functions
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("identity check failed: {report}{}", offending.as_ref().map(|f| format!("; first offending f = {f}")).unwrap_or_default())]
pub struct MismatchReport {
    pub report: IdentityReport,
    pub offending: Option<EndoFunction>,
}

#[derive(Clone)]
struct Sweep {
    ab: u64,
    cd: u64,
    first_bad: Option<u64>,
    first_bad_roundtrip: Option<u64>,
}

fn min_opt(a: Option<u64>, b: Option<u64>) -> Option<u64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

/// Closed forms of both sides plus exhaustive counts over every `f`, with
/// the per-function count equality and the bijection round trip.
pub fn verify_identity(n: usize, p: usize, which: Identity, exec: Exec) -> Result<IdentityReport, MismatchReport> {
    let p = which.effective_p(p);
    let total = EndoFunction::count(n, p);
    let sweep = exec.fold_range(
        total,
        Sweep { ab: 0, cd: 0, first_bad: None, first_bad_roundtrip: None },
        |i| {
            let f = EndoFunction::nth(n, p, i);
            let (ab, cd) = (count_ab(&f), count_cd(&f));
            Sweep {
                ab,
                cd,
                first_bad: (ab != cd).then_some(i),
                first_bad_roundtrip: (!roundtrip_ok(&f)).then_some(i),
            }
        },
        |a, b| Sweep {
            ab: a.ab + b.ab,
            cd: a.cd + b.cd,
            first_bad: min_opt(a.first_bad, b.first_bad),
            first_bad_roundtrip: min_opt(a.first_bad_roundtrip, b.first_bad_roundtrip),
        },
    );
    let report = IdentityReport {
        identity: which,
        n,
        p,
        closed_lhs: closed_lhs(n, p).to_string(),
        closed_rhs: closed_rhs(n, p).to_string(),
        count_ab: sweep.ab,
        count_cd: sweep.cd,
        functions: total,
        per_function_ok: sweep.first_bad.is_none(),
        roundtrip_ok: sweep.first_bad_roundtrip.is_none(),
    };
    if report.passed() {
        Ok(report)
    } else {
        let offending = min_opt(sweep.first_bad, sweep.first_bad_roundtrip).map(|i| EndoFunction::nth(n, p, i));
        Err(MismatchReport { report, offending })
    }
}

/// `Σ_f w(f) count(f)` for both pair kinds as polynomials in `w1..wn`.
pub fn weighted_sums(n: usize, p: usize, exec: Exec) -> (MPoly, MPoly) {
    assert!(n <= MAX_WEIGHTS, "at most {MAX_WEIGHTS} weight symbols");
    let total = EndoFunction::count(n, p);
    let parts = exec.map_range(total, |i| {
        let f = EndoFunction::nth(n, p, i);
        let w = f.weight();
        (MPoly::monomial(w, Rat::from(count_ab(&f) as i64)), MPoly::monomial(w, Rat::from(count_cd(&f) as i64)))
    });
    parts.into_iter().fold((MPoly::zero(), MPoly::zero()), |(a, c), (x, y)| (&a + &x, &c + &y))
}
