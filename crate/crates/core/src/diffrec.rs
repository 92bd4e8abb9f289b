//! Mixed differential-shift recurrences in one of the continuous parameters:
//! `Σ b_ij(n, r, s) ∂^i/∂v^i a_{n+j}(r, s) = 0` with `v` either `r` or `s`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::algebra::{parse_poly, MPoly, Rat, Var};
use crate::celine::{k_coefficient_system, pick_vector, search_pairs, Found, RecurrenceJsonError, SolverConfig};
use crate::certify;
use crate::error::SolveError;
use crate::linsolve::nullspace_with;
use crate::render;
use crate::summand::AbelSummand;

/// `coeff · ∂^order a_{n+dn}(r, s)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiffTerm {
    pub order: u32,
    pub dn: i64,
    pub coeff: MPoly,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiffRecurrence {
    var: Var,
    terms: Vec<DiffTerm>,
}

impl DiffRecurrence {
    /// Terms are ordered by `dn` and then by derivative order, both
    /// ascending; duplicates merge, zero terms drop, and the first
    /// coefficient gets a positive leading coefficient.
    pub fn new(var: Var, terms: Vec<DiffTerm>) -> DiffRecurrence {
        let mut terms = terms;
        terms.sort_by_key(|t| (t.dn, t.order));
        let mut merged: Vec<DiffTerm> = Vec::new();
        for t in terms {
            match merged.last_mut() {
                Some(last) if last.dn == t.dn && last.order == t.order => last.coeff = &last.coeff + &t.coeff,
                _ => merged.push(t),
            }
        }
        merged.retain(|t| !t.coeff.is_zero());
        if merged.first().is_some_and(|t| t.coeff.leading_coeff().is_negative()) {
            for t in &mut merged {
                t.coeff = -&t.coeff;
            }
        }
        DiffRecurrence { var, terms: merged }
    }

    pub fn var(&self) -> Var {
        self.var
    }

    pub fn terms(&self) -> &[DiffTerm] {
        &self.terms
    }

    pub fn max_shift(&self) -> i64 {
        self.terms.iter().map(|t| t.dn).max().unwrap_or(0)
    }

    pub fn max_order(&self) -> u32 {
        self.terms.iter().map(|t| t.order).max().unwrap_or(0)
    }

    pub fn specialize(&self, v: Var, value: &Rat) -> DiffRecurrence {
        DiffRecurrence::new(
            self.var,
            self.terms
                .iter()
                .map(|t| DiffTerm { order: t.order, dn: t.dn, coeff: t.coeff.subs_value(v, value) })
                .collect(),
        )
    }

    fn render(&self, latex: bool) -> String {
        let v = self.var.to_string();
        let mut out = String::new();
        for (idx, t) in self.terms.iter().enumerate() {
            let neg = t.coeff.leading_coeff().is_negative();
            let c = if neg { -&t.coeff } else { t.coeff.clone() };
            if idx > 0 {
                out.push_str(if neg { " - " } else { " + " });
            } else if neg {
                out.push('-');
            }
            let a = render::shifted_a(t.dn, 0, latex);
            let d = match (t.order, latex) {
                (0, _) => a,
                (1, false) => format!("d/d{v} {a}"),
                (i, false) => format!("d^{i}/d{v}^{i} {a}"),
                (1, true) => format!("\\frac{{\\partial}}{{\\partial {v}}} {a}"),
                (i, true) => format!("\\frac{{\\partial^{{{i}}}}}{{\\partial {v}^{{{i}}}}} {a}"),
            };
            if c.is_one() {
                out.push_str(&d);
            } else {
                let sep = if latex { " " } else { "*" };
                let d = if t.order > 0 && !latex { format!("({d})") } else { d };
                out.push_str(&format!("{}{sep}{d}", render::group(&c, latex)));
            }
        }
        out.push_str(" = 0");
        out
    }

    pub fn render_text(&self) -> String {
        self.render(false)
    }

    pub fn render_latex(&self) -> String {
        self.render(true)
    }

    pub fn to_json(&self) -> String {
        let wire = DiffWire {
            kind: "diff".into(),
            var: self.var.to_string(),
            terms: self
                .terms
                .iter()
                .map(|t| DiffTermWire { order: t.order, dn: t.dn, coeff: t.coeff.to_string() })
                .collect(),
        };
        serde_json::to_string(&wire).expect("serializable")
    }

    pub fn from_json(src: &str) -> Result<DiffRecurrence, RecurrenceJsonError> {
        let wire: DiffWire = serde_json::from_str(src).map_err(|e| RecurrenceJsonError::Json(e.to_string()))?;
        if wire.kind != "diff" {
            return Err(RecurrenceJsonError::Kind(wire.kind));
        }
        let var = match wire.var.as_str() {
            "r" => Var::R,
            "s" => Var::S,
            other => return Err(RecurrenceJsonError::Json(format!("differentiation variable {other:?}"))),
        };
        let mut terms = Vec::new();
        for t in wire.terms {
            terms.push(DiffTerm { order: t.order, dn: t.dn, coeff: parse_poly(&t.coeff)? });
        }
        Ok(DiffRecurrence::new(var, terms))
    }
}

impl fmt::Display for DiffRecurrence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render_text())
    }
}

#[derive(Serialize, Deserialize)]
struct DiffTermWire {
    order: u32,
    dn: i64,
    coeff: String,
}

#[derive(Serialize, Deserialize)]
struct DiffWire {
    kind: String,
    var: String,
    terms: Vec<DiffTermWire>,
}

fn check_var(var: Var) -> Result<(), SolveError> {
    if var == Var::R || var == Var::S {
        Ok(())
    } else {
        Err(SolveError::InvalidConfig(format!("differentiation variable must be r or s, got {var}")))
    }
}

pub fn find_diff_recurrence(s: &AbelSummand, var: Var, cfg: &SolverConfig) -> Result<DiffRecurrence, SolveError> {
    find_diff_recurrence_traced(s, var, cfg).map(|f| f.recurrence)
}

/// Search `(L, M)` = (derivative order, `n`-shift) in the same order as the
/// shift solver and return the first validated recurrence.
pub fn find_diff_recurrence_traced(
    s: &AbelSummand,
    var: Var,
    cfg: &SolverConfig,
) -> Result<Found<DiffRecurrence>, SolveError> {
    cfg.check()?;
    check_var(var)?;
    for (l, m) in search_pairs(cfg.max_ord) {
        let mut cols = Vec::new();
        for i in 0..=l {
            for j in 0..=m as i64 {
                cols.push(((i, j), s.kernel_derivative_ratio(var, i, j)?));
            }
        }
        let sys = k_coefficient_system(cols);
        let Some(v) = pick_vector(nullspace_with(&sys, cfg.exec)) else { continue };
        let terms: Vec<DiffTerm> = sys
            .col_labels
            .iter()
            .zip(&v)
            .filter(|(_, c)| !c.is_zero())
            .map(|(&(order, dn), c)| DiffTerm { order, dn, coeff: c.clone() })
            .collect();
        if terms.len() < 2 {
            continue;
        }
        let rec = DiffRecurrence::new(var, terms);
        if let Ok(report) = certify::validate_diff(s, &rec, cfg.points, cfg.seed, cfg.exec) {
            return Ok(Found { recurrence: rec, orders: (l, m), validation: report });
        }
    }
    Err(SolveError::NoRecurrenceFound(cfg.max_ord))
}

/// `Σ coeff · (derivative quotient)` at the `k` level.
pub fn k_level_residue(s: &AbelSummand, rec: &DiffRecurrence) -> Result<crate::algebra::RatFunc, SolveError> {
    let mut acc = crate::algebra::RatFunc::zero();
    for t in rec.terms() {
        acc = &acc + &s.kernel_derivative_ratio(rec.var(), t.order, t.dn)?.mul_poly(&t.coeff);
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::poly;

    #[test]
    fn json_round_trip() {
        let rec = DiffRecurrence::new(
            Var::S,
            vec![
                DiffTerm { order: 0, dn: 0, coeff: poly("-(n+1)*(q+n-s+1)") },
                DiffTerm { order: 0, dn: 1, coeff: poly("q") },
                DiffTerm { order: 1, dn: 1, coeff: poly("n-s+1") },
            ],
        );
        let json = rec.to_json();
        assert!(json.starts_with("{\"kind\":\"diff\",\"var\":\"s\",\"terms\":[{\"order\":0,\"dn\":0,"));
        let back = DiffRecurrence::from_json(&json).unwrap();
        assert_eq!(back, rec);
        assert_eq!(back.to_json(), json);
    }

    #[test]
    fn rejects_other_variables() {
        let s = AbelSummand::parse("binomial(n,k)").unwrap();
        assert!(matches!(
            find_diff_recurrence(&s, Var::N, &SolverConfig::default()),
            Err(SolveError::InvalidConfig(_))
        ));
    }
}
