//! Small text helpers shared by the recurrence and report printers.

use crate::algebra::{MPoly, Monomial, Rat, RatFunc};

/// `n`, `n+2`, `r-1`.
pub fn offset(base: &str, d: i64) -> String {
    match d {
        0 => base.to_string(),
        d if d > 0 => format!("{base}+{d}"),
        d => format!("{base}{d}"),
    }
}

/// `a_{n+dn}(r+dr, s-dr)` in plain text or LaTeX.
pub fn shifted_a(dn: i64, dr: i64, latex: bool) -> String {
    let n = offset("n", dn);
    let (r, s) = (offset("r", dr), offset("s", -dr));
    if latex {
        format!("a_{{{n}}}\\!\\left({r}, {s}\\right)")
    } else {
        format!("a_{{{n}}}({r}, {s})")
    }
}

/// Parenthesize a polynomial unless it is a single monomial with positive
/// coefficient.
pub fn group(p: &MPoly, latex: bool) -> String {
    let body = if latex { p.render_latex() } else { p.to_string() };
    if p.len() <= 1 && !p.leading_coeff().is_negative() {
        body
    } else if latex {
        format!("\\left({body}\\right)")
    } else {
        format!("({body})")
    }
}

/// Split off the rational content and the largest monomial factor.
pub fn factor_content(p: &MPoly) -> (Rat, Monomial, MPoly) {
    let c = p.content();
    let m = p.monomial_content();
    let rest = p.scale(&c.recip()).exact_div(&MPoly::monomial(m, Rat::one())).expect("monomial content divides");
    (c, m, rest)
}

/// A polynomial printed as `content * monomial * (rest)`.
pub fn factored(p: &MPoly, latex: bool) -> String {
    if p.len() <= 1 {
        return group(p, latex);
    }
    let (c, m, rest) = factor_content(p);
    let mut parts = Vec::new();
    if !c.is_one() {
        parts.push(if latex { MPoly::constant(c).render_latex() } else { c.to_string() });
    }
    if !m.is_one() {
        let mono = MPoly::monomial(m, Rat::one());
        parts.push(if latex { mono.render_latex() } else { mono.to_string() });
    }
    if !rest.is_one() {
        parts.push(group(&rest, latex));
    }
    parts.join(if latex { " " } else { "*" })
}

/// A rational function with its denominator shown in factored form.
pub fn fraction(f: &RatFunc, latex: bool) -> String {
    if f.den().is_one() {
        return if latex { f.num().render_latex() } else { f.num().to_string() };
    }
    if latex {
        format!("\\frac{{{}}}{{{}}}", f.num().render_latex(), factored(f.den(), true))
    } else {
        format!("{}/({})", group(f.num(), false), factored(f.den(), false))
    }
}
