//! Report output laid out like a short written proof: the summand, the
//! recurrence, then the evidence.

use abel_core::algebra::{RatFunc, Var};
use abel_core::celine::{Found, ShiftRecurrence, SolverConfig};
use abel_core::certify::{Certificate, Report, Verdict};
use abel_core::diffrec::DiffRecurrence;
use abel_core::summand::AbelSummand;

use crate::Format;

fn pins(s: &AbelSummand) -> String {
    let mut out = Vec::new();
    if let Some(x) = &s.pins.x {
        out.push(format!("x = {x}"));
    }
    if let Some(p) = s.pins.p {
        out.push(format!("p = {p}"));
    }
    if let Some(q) = s.pins.q {
        out.push(format!("q = {q}"));
    }
    if out.is_empty() {
        String::new()
    } else {
        format!(", with {}", out.join(", "))
    }
}

fn residue_report(residue: &RatFunc) -> Report {
    Report {
        check: "k-level residue".into(),
        verdict: if residue.is_zero() { Verdict::Pass } else { Verdict::Fail },
        residue: residue.to_string(),
        points: Vec::new(),
        resamples: 0,
        trace: Vec::new(),
    }
}

fn wrap(text: &str) -> String {
    let mut lines = Vec::new();
    let mut line = String::new();
    for word in text.split_whitespace() {
        if !line.is_empty() && line.len() + word.len() + 1 > 76 {
            lines.push(std::mem::take(&mut line));
        }
        if !line.is_empty() {
            line.push(' ');
        }
        line.push_str(word);
    }
    if !line.is_empty() {
        lines.push(line);
    }
    lines.join("\n")
}

fn evidence(validation: &Report, residue: &RatFunc, cfg: &SolverConfig) -> String {
    let residue_text = if residue.is_zero() {
        "Substituting the coefficients back, the sum of the quotients reduces to 0 identically in k.".to_string()
    } else {
        format!("Substituting the coefficients back leaves the residue {residue}, so the derivation is NOT complete.")
    };
    let verdict = if validation.passed() { "holds" } else { "FAILS" };
    format!(
        "{residue_text} Summing over k, all boundary terms vanish and the recurrence follows. As an independent \
         check it {verdict} exactly at {} random rational points (seed {}, {} resampled).",
        validation.points.len(),
        cfg.seed,
        validation.resamples
    )
}

pub fn shift_report(s: &AbelSummand, found: &Found<ShiftRecurrence>, residue: &RatFunc, cfg: &SolverConfig, format: Format) {
    let rec = &found.recurrence;
    if format == Format::Json {
        out!("{}", rec.to_json());
        out!("{}", residue_report(residue).to_json());
        out!("{}", found.validation.to_json());
        return;
    }
    let latex = format == Format::Latex;
    let (l, m) = found.orders;
    out!("{}", wrap(&format!("Let F(n,k) = {}{} and a_n(r, s) = sum over k of F(n,k).", s, pins(s))));
    out!();
    out!("Theorem. The sum satisfies");
    out!();
    match rec.solved_form() {
        Ok(solved) => out!("    {}", solved.render(latex)),
        Err(_) => out!("    {}", if latex { rec.render_latex() } else { rec.render_text() }),
    }
    out!();
    let method = format!(
        "Proof. Divide each shifted summand F(n+i, k-j)(r+j, s-j), 0 <= i <= {l}, 0 <= j <= {m}, by F(n,k)(r, s); \
         every quotient is rational in n, k, r, s. Clearing denominators and setting the coefficient of each power \
         of k to zero gives a linear system whose nullspace supplies the coefficients."
    );
    out!("{}", wrap(&method));
    out!("{}", wrap(&evidence(&found.validation, residue, cfg)));
}

pub fn diff_report(s: &AbelSummand, found: &Found<DiffRecurrence>, residue: &RatFunc, cfg: &SolverConfig, format: Format) {
    let rec = &found.recurrence;
    if format == Format::Json {
        out!("{}", rec.to_json());
        out!("{}", residue_report(residue).to_json());
        out!("{}", found.validation.to_json());
        return;
    }
    let latex = format == Format::Latex;
    let v = rec.var();
    let other = if v == Var::R { "s" } else { "r" };
    let (l, m) = found.orders;
    out!("{}", wrap(&format!("Let F(n,k) = {}{} and a_n(r, s) = sum over k of F(n,k).", s, pins(s))));
    out!();
    out!("Theorem. As a function of {v} (with {other} fixed) the sum satisfies");
    out!();
    out!("    {}", if latex { rec.render_latex() } else { rec.render_text() });
    out!();
    let method = format!(
        "Proof. Take the derivatives of order at most {l} in {v} of F(n+j,k), 0 <= j <= {m}, and divide them by F(n,k); the \
         logarithmic derivatives of the kernel are rational, so every quotient is rational in n, k, r, s. \
         Clearing denominators and setting the coefficient of each power of k to zero gives a linear system \
         whose nullspace supplies the coefficients."
    );
    out!("{}", wrap(&method));
    out!("{}", wrap(&evidence(&found.validation, residue, cfg)));
}

pub fn em_report(rec: &ShiftRecurrence, reports: &[Report], n_max: i64, seed: u64, latex: bool) {
    let [certificate, closed, initial, identity] = reports else {
        unreachable!("four checks")
    };
    let verdict = |r: &Report| if r.passed() { "pass" } else { "FAIL" };
    out!("Let F(n,k) = binomial(n,k) (r+k)^(k-1) (s-k)^(n-k) and a_n(r, s) = sum over k of F(n,k).");
    out!();
    out!("Claim. a_n(r, s) = (r+s)^n / r.");
    out!();
    out!("Step 1 [{}]. The sum satisfies", verdict(certificate));
    out!();
    out!("    {}", if latex { rec.render_latex() } else { rec.render_text() });
    out!();
    out!(
        "{}",
        wrap(&format!(
            "With G(n,k) = (s-n) binomial(n-1,k-1) (k+r)^(k-1) (s-k)^(n-k-1), that is G(n,k)/F(n,k) = {}, the \
             left side applied to F equals G(n,k) - G(n,k+1). Dividing through by F(n,k) and collecting the \
             terms with equal powers of (r+k) and (s-k):",
            Certificate::abel().ratio
        ))
    );
    for line in certificate.trace.iter().skip(2) {
        out!("  - {line}");
    }
    if !certificate.passed() {
        out!("  residue: {}", certificate.residue);
    }
    out!("Summing over k telescopes the right side to 0.");
    out!();
    out!("Step 2 [{}]. (r+s)^n / r satisfies the same recurrence: substituting it reduces to {}.", verdict(closed), closed.residue);
    out!();
    out!(
        "Step 3 [{}]. Both agree at n = 0, 1: a_0 = 1/r and a_1 = (r+s)/r by direct summation at {} random points.",
        verdict(initial),
        initial.points.len()
    );
    out!("Since the recurrence determines a_n from a_(n-1) and a_(n-2), the claim follows.");
    out!();
    out!(
        "{}",
        wrap(&format!(
            "Check [{}]. Summing directly, a_n = (r+s)^n / r holds exactly for n <= {n_max} at {} random rational \
             points (seed {seed}, {} resampled).",
            verdict(identity),
            identity.points.len(),
            identity.resamples
        ))
    );
}
