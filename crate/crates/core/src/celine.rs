//! Functional shift recurrences for Abel sums by the linear ansatz
//!
//! ```text
//!     Σ_{i≤L, j≤M} b_ij(n) F̄_{n+i,k-j}(r+j, s-j) = 0
//! ```
//!
//! Dividing by `F̄_{n,k}(r,s)` and clearing denominators leaves a polynomial
//! in `k` whose coefficients must all vanish. Summing over `k` turns a
//! solution into `Σ b_ij(n) a_{n+i}(r+j, s-j) = 0`.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::algebra::{lcm, parse_poly, MPoly, RatFunc, Var};
use crate::certify::{self, Report};
use crate::error::{ParseError, SolveError};
use crate::exec::Exec;
use crate::linsolve::{nullspace_with, RFMatrix};
use crate::render;
use crate::summand::{AbelSummand, Orientation};

pub const DEFAULT_SEED: u64 = 0x5eed_ab31;

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// Upper bound for each of the two orders.
    pub max_ord: u32,
    pub orientation: Orientation,
    /// Random points used to validate a candidate before it is returned.
    pub points: usize,
    pub seed: u64,
    pub exec: Exec,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig { max_ord: 2, orientation: Orientation::Abel, points: 20, seed: DEFAULT_SEED, exec: Exec::default() }
    }
}

impl SolverConfig {
    pub fn with_max_ord(max_ord: u32) -> SolverConfig {
        SolverConfig { max_ord, ..SolverConfig::default() }
    }

    pub(crate) fn check(&self) -> Result<(), SolveError> {
        if self.max_ord < 1 {
            return Err(SolveError::InvalidConfig("max order must be at least 1".into()));
        }
        if self.points < 1 {
            return Err(SolveError::InvalidConfig("at least one validation point is required".into()));
        }
        Ok(())
    }
}

/// `(L, M)` pairs with both entries at most `max_ord`, by increasing `L+M`
/// and then increasing `L`.
pub fn search_pairs(max_ord: u32) -> Vec<(u32, u32)> {
    let mut pairs: Vec<(u32, u32)> = (0..=max_ord).flat_map(|l| (0..=max_ord).map(move |m| (l, m))).collect();
    pairs.sort_by_key(|&(l, m)| (l + m, l));
    pairs
}

/// `coeff · a_{n+dn}(r+dr, s-dr)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ShiftTerm {
    pub dn: i64,
    pub dr: i64,
    pub coeff: MPoly,
}

impl ShiftTerm {
    pub fn ds(&self) -> i64 {
        -self.dr
    }
}

/// A functional recurrence `Σ coeff · a_{n+dn}(r+dr, s-dr) = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct ShiftRecurrence {
    terms: Vec<ShiftTerm>,
}

fn canonical_order(a: &ShiftTerm, b: &ShiftTerm) -> Ordering {
    b.dn.cmp(&a.dn).then(a.dr.abs().cmp(&b.dr.abs())).then(a.dr.cmp(&b.dr))
}

impl ShiftRecurrence {
    /// Sorts the terms canonically (`dn` descending, then `|dr|` ascending),
    /// drops zero coefficients, merges duplicates and fixes the overall sign
    /// so that the first coefficient has a positive leading coefficient. The
    /// scaling of the coefficients is left alone.
    pub fn new(terms: Vec<ShiftTerm>) -> ShiftRecurrence {
        let mut merged: Vec<ShiftTerm> = Vec::new();
        let mut terms = terms;
        terms.sort_by(canonical_order);
        for t in terms {
            match merged.last_mut() {
                Some(last) if last.dn == t.dn && last.dr == t.dr => last.coeff = &last.coeff + &t.coeff,
                _ => merged.push(t),
            }
        }
        merged.retain(|t| !t.coeff.is_zero());
        if merged.first().is_some_and(|t| t.coeff.leading_coeff().is_negative()) {
            for t in &mut merged {
                t.coeff = -&t.coeff;
            }
        }
        ShiftRecurrence { terms: merged }
    }

    pub fn terms(&self) -> &[ShiftTerm] {
        &self.terms
    }

    /// `L`, the largest `n`-shift.
    pub fn order_n(&self) -> i64 {
        self.terms.iter().map(|t| t.dn).max().unwrap_or(0)
    }

    /// `M`, the largest `(r,s)`-shift in absolute value.
    pub fn order_j(&self) -> i64 {
        self.terms.iter().map(|t| t.dr.abs()).max().unwrap_or(0)
    }

    /// The same relation instantiated at `n + delta`: every `dn` grows by
    /// `delta` and coefficients are shifted accordingly.
    pub fn shifted(&self, delta: i64) -> ShiftRecurrence {
        ShiftRecurrence::new(
            self.terms
                .iter()
                .map(|t| ShiftTerm { dn: t.dn + delta, dr: t.dr, coeff: t.coeff.shift(Var::N, delta) })
                .collect(),
        )
    }

    /// Substitute a value for a symbol in every coefficient.
    pub fn specialize(&self, v: Var, value: &crate::algebra::Rat) -> ShiftRecurrence {
        ShiftRecurrence::new(
            self.terms.iter().map(|t| ShiftTerm { dn: t.dn, dr: t.dr, coeff: t.coeff.subs_value(v, value) }).collect(),
        )
    }

    /// Same relation with unit content: polynomial and rational content of the
    /// coefficients removed.
    pub fn primitive(&self) -> ShiftRecurrence {
        let g = crate::algebra::gcd_many(self.terms.iter().map(|t| &t.coeff));
        if g.is_zero() {
            return self.clone();
        }
        let mut terms: Vec<ShiftTerm> = self
            .terms
            .iter()
            .map(|t| ShiftTerm { dn: t.dn, dr: t.dr, coeff: t.coeff.exact_div(&g).expect("gcd divides") })
            .collect();
        let c = terms.iter().fold(crate::algebra::Rat::zero(), |acc, t| acc.gcd(&t.coeff.content()));
        for t in &mut terms {
            t.coeff = t.coeff.scale(&c.recip());
        }
        ShiftRecurrence::new(terms)
    }

    /// Whether two recurrences agree up to a constant factor.
    pub fn proportional(&self, other: &ShiftRecurrence) -> bool {
        let a = self.primitive();
        let b = other.primitive();
        a.terms.len() == b.terms.len()
            && a.terms.iter().zip(&b.terms).all(|(x, y)| x.dn == y.dn && x.dr == y.dr && x.coeff == y.coeff)
    }

    /// The highest `a_{n+L}(r, s)` term isolated, after `n -> n - L`.
    pub fn solved_form(&self) -> Result<SolvedForm, SolveError> {
        let top = self.order_n();
        let pivot = self
            .terms
            .iter()
            .find(|t| t.dn == top && t.dr == 0)
            .ok_or_else(|| SolveError::CannotIsolate(format!("no a_{{n+{top}}}(r, s) term")))?;
        let piv = RatFunc::from_poly(pivot.coeff.shift(Var::N, -top));
        let rhs = self
            .terms
            .iter()
            .filter(|t| !(t.dn == top && t.dr == 0))
            .map(|t| {
                let c = RatFunc::from_poly(-&t.coeff.shift(Var::N, -top));
                (t.dn - top, t.dr, &c / &piv)
            })
            .collect();
        Ok(SolvedForm { rhs })
    }

    pub fn render_text(&self) -> String {
        self.render(false)
    }

    pub fn render_latex(&self) -> String {
        self.render(true)
    }

    fn render(&self, latex: bool) -> String {
        let mut out = String::new();
        for (idx, t) in self.terms.iter().enumerate() {
            let neg = t.coeff.leading_coeff().is_negative();
            let c = if neg { -&t.coeff } else { t.coeff.clone() };
            if idx > 0 {
                out.push_str(if neg { " - " } else { " + " });
            } else if neg {
                out.push('-');
            }
            let a = render::shifted_a(t.dn, t.dr, latex);
            if c.is_one() {
                out.push_str(&a);
            } else {
                let sep = if latex { " " } else { "*" };
                out.push_str(&format!("{}{sep}{a}", render::group(&c, latex)));
            }
        }
        out.push_str(" = 0");
        out
    }

    pub fn to_json(&self) -> String {
        let wire = ShiftWire {
            kind: "shift".into(),
            terms: self
                .terms
                .iter()
                .map(|t| ShiftTermWire { dn: t.dn, dr: t.dr, ds: t.ds(), coeff: t.coeff.to_string() })
                .collect(),
            orders: Orders { l: self.order_n(), m: self.order_j() },
        };
        serde_json::to_string(&wire).expect("serializable")
    }

    pub fn from_json(src: &str) -> Result<ShiftRecurrence, RecurrenceJsonError> {
        let wire: ShiftWire = serde_json::from_str(src).map_err(|e| RecurrenceJsonError::Json(e.to_string()))?;
        if wire.kind != "shift" {
            return Err(RecurrenceJsonError::Kind(wire.kind));
        }
        let mut terms = Vec::new();
        for t in wire.terms {
            if t.ds != -t.dr {
                return Err(RecurrenceJsonError::Json(format!("ds must equal -dr in term {}", t.coeff)));
            }
            terms.push(ShiftTerm { dn: t.dn, dr: t.dr, coeff: parse_poly(&t.coeff)? });
        }
        Ok(ShiftRecurrence::new(terms))
    }
}

impl fmt::Display for ShiftRecurrence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render_text())
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RecurrenceJsonError {
    #[error("malformed recurrence JSON: {0}")]
    Json(String),
    #[error("unexpected recurrence kind {0:?}")]
    Kind(String),
    #[error(transparent)]
    Coeff(#[from] ParseError),
}

#[derive(Serialize, Deserialize)]
struct ShiftTermWire {
    dn: i64,
    dr: i64,
    ds: i64,
    coeff: String,
}

#[derive(Serialize, Deserialize)]
pub(crate) struct Orders {
    #[serde(rename = "L")]
    pub(crate) l: i64,
    #[serde(rename = "M")]
    pub(crate) m: i64,
}

#[derive(Serialize, Deserialize)]
struct ShiftWire {
    kind: String,
    terms: Vec<ShiftTermWire>,
    orders: Orders,
}

/// `a_n(r, s) = Σ c · a_{n+dn}(r+dr, s-dr)` with every `dn ≤ 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct SolvedForm {
    pub rhs: Vec<(i64, i64, RatFunc)>,
}

impl SolvedForm {
    pub fn render(&self, latex: bool) -> String {
        let mut out = format!("{} = ", render::shifted_a(0, 0, latex));
        for (idx, (dn, dr, c)) in self.rhs.iter().enumerate() {
            let neg = c.num().leading_coeff().is_negative();
            let c = if neg { -c } else { c.clone() };
            if idx > 0 {
                out.push_str(if neg { " - " } else { " + " });
            } else if neg {
                out.push('-');
            }
            let a = render::shifted_a(*dn, *dr, latex);
            if c.is_one() {
                out.push_str(&a);
            } else if latex && c.den().is_one() {
                out.push_str(&format!("{} {a}", render::group(c.num(), true)));
            } else if latex {
                out.push_str(&format!("{} {a}", render::fraction(&c, true)));
            } else if c.den().is_one() {
                out.push_str(&format!("{}*{a}", render::group(c.num(), false)));
            } else {
                out.push_str(&format!("{}*{a}", render::fraction(&c, false)));
            }
        }
        out
    }
}

impl fmt::Display for SolvedForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(false))
    }
}

/// Clear the common denominator of the column ratios and read off the
/// coefficient of every power of `k`. Rows are the powers of `k`.
pub(crate) fn k_coefficient_system<C: Clone + PartialEq>(cols: Vec<(C, RatFunc)>) -> RFMatrix<C> {
    let den = cols.iter().fold(MPoly::one(), |acc, (_, f)| if f.den().is_one() { acc } else { lcm(&acc, f.den()) });
    let by_k: Vec<Vec<MPoly>> = cols
        .iter()
        .map(|(_, f)| {
            let cleared = f.num() * &den.exact_div(f.den()).expect("lcm is a multiple");
            cleared.collect_in(Var::K)
        })
        .collect();
    let nrows = by_k.iter().map(Vec::len).max().unwrap_or(0);
    let rows: Vec<Vec<RatFunc>> = (0..nrows)
        .map(|d| by_k.iter().map(|c| RatFunc::from_poly(c.get(d).cloned().unwrap_or_else(MPoly::zero))).collect())
        .collect();
    RFMatrix::new(rows, (0..nrows).collect(), cols.into_iter().map(|(c, _)| c).collect())
}

/// Among several basis vectors prefer the smallest total coefficient
/// degree, then the fewest terms, then the canonical text.
pub(crate) fn pick_vector(basis: Vec<Vec<MPoly>>) -> Option<Vec<MPoly>> {
    let key = |v: &Vec<MPoly>| {
        let deg: u32 = v.iter().filter(|c| !c.is_zero()).map(MPoly::total_degree).sum();
        let len: usize = v.iter().map(MPoly::len).sum();
        let text: Vec<String> = v.iter().map(|c| c.to_string()).collect();
        (deg, len, text)
    };
    basis.into_iter().min_by_key(key)
}

/// The linear system for fixed orders; column `(i, j)` carries the `k`-power
/// coefficients of the cleared shift quotient.
pub fn assemble_system(
    s: &AbelSummand,
    l: u32,
    m: u32,
    orientation: Orientation,
) -> Result<RFMatrix<(i64, i64)>, SolveError> {
    let mut cols = Vec::new();
    for i in 0..=l as i64 {
        for j in 0..=m as i64 {
            cols.push(((i, j), s.oriented_shift_ratio(i, j, orientation)?));
        }
    }
    Ok(k_coefficient_system(cols))
}

/// The recurrence defined by a nullspace vector of [`assemble_system`].
fn recurrence_from_vector(cols: &[(i64, i64)], v: &[MPoly], orientation: Orientation) -> ShiftRecurrence {
    let terms = cols
        .iter()
        .zip(v)
        .filter(|(_, c)| !c.is_zero())
        .map(|(&(i, j), c)| ShiftTerm { dn: i, dr: orientation.shifts(j).0, coeff: c.clone() })
        .collect();
    ShiftRecurrence::new(terms).primitive()
}

/// A recurrence together with the orders at which it was found and the
/// validation that accepted it.
#[derive(Debug, Clone)]
pub struct Found<R> {
    pub recurrence: R,
    pub orders: (u32, u32),
    pub validation: Report,
}

/// Search orders `(L, M)` in [`search_pairs`] order and return the first
/// recurrence that survives numeric validation.
pub fn find_shift_recurrence(s: &AbelSummand, cfg: &SolverConfig) -> Result<ShiftRecurrence, SolveError> {
    find_shift_recurrence_traced(s, cfg).map(|f| f.recurrence)
}

pub fn find_shift_recurrence_traced(s: &AbelSummand, cfg: &SolverConfig) -> Result<Found<ShiftRecurrence>, SolveError> {
    cfg.check()?;
    for (l, m) in search_pairs(cfg.max_ord) {
        let sys = assemble_system(s, l, m, cfg.orientation)?;
        let basis = nullspace_with(&sys, cfg.exec);
        let Some(v) = pick_vector(basis) else { continue };
        let rec = recurrence_from_vector(&sys.col_labels, &v, cfg.orientation);
        if rec.terms().len() < 2 {
            continue;
        }
        if let Ok(report) = certify::validate_shift(s, &rec, cfg.points, cfg.seed, cfg.exec) {
            return Ok(Found { recurrence: rec, orders: (l, m), validation: report });
        }
    }
    Err(SolveError::NoRecurrenceFound(cfg.max_ord))
}

/// `Σ coeff · (shift quotient)` at the `k` level; zero for every sound
/// recurrence.
pub fn k_level_residue(s: &AbelSummand, rec: &ShiftRecurrence) -> Result<RatFunc, SolveError> {
    let mut acc = RatFunc::zero();
    for t in rec.terms() {
        let ratio = s.family_ratio(t.dn, t.dr, -t.dr)?.1;
        acc = &acc + &ratio.mul_poly(&t.coeff);
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::poly;

    #[test]
    fn pairs_order() {
        assert_eq!(
            search_pairs(2),
            vec![(0, 0), (0, 1), (1, 0), (0, 2), (1, 1), (2, 0), (1, 2), (2, 1), (2, 2)]
        );
    }

    #[test]
    fn trivial_system_is_full_rank() {
        let s = AbelSummand::parse("binomial(n,k)*x^k").unwrap();
        let sys = assemble_system(&s, 0, 0, Orientation::Abel).unwrap();
        assert_eq!(sys.ncols(), 1);
        assert!(nullspace_with(&sys, Exec::Sequential).is_empty());
    }

    #[test]
    fn canonical_order_and_sign() {
        let rec = ShiftRecurrence::new(vec![
            ShiftTerm { dn: 0, dr: 1, coeff: poly("n") },
            ShiftTerm { dn: 2, dr: 0, coeff: poly("-1") },
            ShiftTerm { dn: 1, dr: 1, coeff: poly("r") },
            ShiftTerm { dn: 1, dr: 0, coeff: poly("s") },
        ]);
        let order: Vec<(i64, i64)> = rec.terms().iter().map(|t| (t.dn, t.dr)).collect();
        assert_eq!(order, vec![(2, 0), (1, 0), (1, 1), (0, 1)]);
        assert_eq!(rec.terms()[0].coeff, poly("1"));
        assert_eq!(rec.terms()[1].coeff, poly("-s"));
    }

    #[test]
    fn json_round_trip() {
        let rec = ShiftRecurrence::new(vec![
            ShiftTerm { dn: 2, dr: 0, coeff: poly("1") },
            ShiftTerm { dn: 1, dr: 1, coeff: poly("-n*x - 3/2*r*x") },
        ]);
        let json = rec.to_json();
        let back = ShiftRecurrence::from_json(&json).unwrap();
        assert_eq!(back, rec);
        assert_eq!(back.to_json(), json);
        assert!(json.starts_with("{\"kind\":\"shift\",\"terms\":[{\"dn\":2,\"dr\":0,\"ds\":0,"));
        assert!(json.ends_with("\"orders\":{\"L\":2,\"M\":1}}"));
    }

    #[test]
    fn isolating_needs_unshifted_top_term() {
        let rec = ShiftRecurrence::new(vec![
            ShiftTerm { dn: 1, dr: 1, coeff: poly("1") },
            ShiftTerm { dn: 0, dr: 0, coeff: poly("n") },
        ]);
        assert!(matches!(rec.solved_form(), Err(SolveError::CannotIsolate(_))));
    }
}
