//! Exact certification of recurrences, certificates and closed forms, and
//! the seeded numeric oracle that every discovered recurrence must pass.

use std::collections::BTreeMap;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{parse_poly, MPoly, Rat, RatFunc, Var};
use crate::celine::{ShiftRecurrence, ShiftTerm};
use crate::diffrec::DiffRecurrence;
use crate::error::{CertifyError, EvalError};
use crate::exec::Exec;
use crate::summand::{binomial, AbelSummand, EvalPoint, KernelSpec, Pins};

const MAX_ATTEMPTS: u64 = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

/// Outcome of a check: a machine-readable verdict plus a human-readable
/// trace of what was reduced or evaluated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub check: String,
    pub verdict: Verdict,
    pub residue: String,
    pub points: Vec<String>,
    #[serde(default)]
    pub resamples: u64,
    #[serde(skip)]
    pub trace: Vec<String>,
}

impl Report {
    fn pass(check: &str, trace: Vec<String>) -> Report {
        Report { check: check.into(), verdict: Verdict::Pass, residue: "0".into(), points: Vec::new(), resamples: 0, trace }
    }

    pub fn failed(check: &str, err: &CertifyError) -> Report {
        let (residue, points) = match err {
            CertifyError::ValidationFailed { point, residue } => (residue.clone(), vec![point.clone()]),
            CertifyError::ReductionNonzero(r) => (r.clone(), Vec::new()),
            other => (other.to_string(), Vec::new()),
        };
        Report { check: check.into(), verdict: Verdict::Fail, residue, points, resamples: 0, trace: vec![err.to_string()] }
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("serializable")
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = match self.verdict {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
        };
        writeln!(f, "{}: {verdict} (residue {})", self.check, self.residue)?;
        for line in &self.trace {
            writeln!(f, "  {line}")?;
        }
        if !self.points.is_empty() {
            writeln!(f, "  {} point(s), {} resample(s)", self.points.len(), self.resamples)?;
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// random points

/// Nonzero rational with numerator and denominator bounded by 10.
fn small_rat(rng: &mut ChaCha8Rng) -> Rat {
    loop {
        let num: i64 = rng.gen_range(-10..=10);
        if num != 0 {
            return Rat::new(num, rng.gen_range(1..=10));
        }
    }
}

fn point_rng(seed: u64, index: u64, attempt: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index * MAX_ATTEMPTS + attempt);
    rng
}

/// Draw `n` and an evaluation point. Pinned values win over drawn ones.
fn draw(rng: &mut ChaCha8Rng, pins: &Pins, n_lo: i64) -> (i64, EvalPoint) {
    let n = n_lo + rng.gen_range(0..=6);
    let r = small_rat(rng);
    let s = small_rat(rng);
    let x = small_rat(rng);
    let p = rng.gen_range(-2..=2);
    let q = rng.gen_range(-2..=2);
    let mut pt = EvalPoint::new(r, s).with_x(x).with_pq(p, q);
    if let Some(x) = &pins.x {
        pt.x = x.clone();
    }
    if let Some(p) = pins.p {
        pt.p = p;
    }
    if let Some(q) = pins.q {
        pt.q = q;
    }
    (n, pt)
}

/// Whether `r + dr + k` and `s - dr - k` stay away from zero over the range.
fn regular(pt: &EvalPoint, shifts: impl Iterator<Item = i64> + Clone, k_max: i64) -> bool {
    (0..=k_max).all(|k| {
        shifts.clone().all(|dr| {
            !(&pt.r + &Rat::from(dr + k)).is_zero() && !(&pt.s - &Rat::from(dr + k)).is_zero()
        })
    })
}

fn assign(pt: &EvalPoint, n: i64) -> impl Fn(Var) -> Option<Rat> + '_ {
    move |v| match v {
        Var::N => Some(Rat::from(n)),
        Var::R => Some(pt.r.clone()),
        Var::S => Some(pt.s.clone()),
        Var::X => Some(pt.x.clone()),
        Var::P => Some(Rat::from(pt.p)),
        Var::Q => Some(Rat::from(pt.q)),
        _ => None,
    }
}

enum PointOutcome {
    Ok { point: String, resamples: u64 },
    Failed { point: String, residue: String },
    Exhausted,
}

/// Run `residue` at `points` seeded points, resampling singular ones.
fn run_points<F>(points: usize, seed: u64, exec: Exec, check: &str, residue: F) -> Result<Report, CertifyError>
where
    F: Fn(&mut ChaCha8Rng) -> Result<(String, Option<String>), EvalError> + Sync + Send,
{
    let outcomes = exec.map_range(points as u64, |i| {
        for attempt in 0..MAX_ATTEMPTS {
            let mut rng = point_rng(seed, i, attempt);
            match residue(&mut rng) {
                Ok((point, None)) => return PointOutcome::Ok { point, resamples: attempt },
                Ok((point, Some(residue))) => return PointOutcome::Failed { point, residue },
                Err(_) => continue,
            }
        }
        PointOutcome::Exhausted
    });
    let mut report = Report::pass(check, Vec::new());
    for o in outcomes {
        match o {
            PointOutcome::Ok { point, resamples } => {
                report.points.push(point);
                report.resamples += resamples;
            }
            PointOutcome::Failed { point, residue } => return Err(CertifyError::ValidationFailed { point, residue }),
            PointOutcome::Exhausted => return Err(CertifyError::NoRegularPoint(MAX_ATTEMPTS as usize)),
        }
    }
    report.trace.push(format!("{} seeded point(s), all residues exactly 0", report.points.len()));
    Ok(report)
}

/// Singular draws are reported as an evaluation error so the caller resamples.
fn singular() -> EvalError {
    EvalError::ZeroToNegativePower { k: -1 }
}

/// Check `Σ coeff · a_{n+dn}(r+dr, s-dr) = 0` exactly by direct summation.
pub fn validate_shift(
    s: &AbelSummand,
    rec: &ShiftRecurrence,
    points: usize,
    seed: u64,
    exec: Exec,
) -> Result<Report, CertifyError> {
    let min_dn = rec.terms().iter().map(|t| t.dn).min().unwrap_or(0);
    let n_lo = (rec.order_n() - min_dn).max(-min_dn);
    let top = rec.order_n();
    run_points(points, seed, exec, "numeric validation (shift)", |rng| {
        let (n, pt) = draw(rng, &s.pins, n_lo);
        let shifts = rec.terms().iter().map(|t| t.dr);
        if !regular(&pt, shifts, n + top) {
            return Err(singular());
        }
        let mut acc = Rat::zero();
        for t in rec.terms() {
            let c = t.coeff.eval(assign(&pt, n)).expect("coefficients use n, r, s, x, p, q");
            if c.is_zero() {
                continue;
            }
            let shifted = EvalPoint { r: &pt.r + &Rat::from(t.dr), s: &pt.s - &Rat::from(t.dr), ..pt.clone() };
            acc += &(&c * &s.eval_abel_sum(n + t.dn, &shifted)?);
        }
        let label = format!("n={n}, {pt}");
        Ok((label, (!acc.is_zero()).then(|| acc.to_string())))
    })
}

/// Check `Σ coeff · ∂^i a_{n+j} = 0` with the differentiation variable kept
/// symbolic and every other parameter drawn at random.
pub fn validate_diff(
    s: &AbelSummand,
    rec: &DiffRecurrence,
    points: usize,
    seed: u64,
    exec: Exec,
) -> Result<Report, CertifyError> {
    let var = rec.var();
    let top = rec.max_shift();
    run_points(points, seed, exec, "numeric validation (differential)", |rng| {
        let (n, pt) = draw(rng, &s.pins, top);
        if !regular(&pt, std::iter::once(0), n + top) {
            return Err(singular());
        }
        let mut acc = RatFunc::zero();
        for t in rec.terms() {
            let mut c = t.coeff.clone();
            for v in [Var::N, Var::R, Var::S, Var::X, Var::P, Var::Q] {
                if v != var {
                    c = c.subs_value(v, &assign(&pt, n)(v).unwrap());
                }
            }
            if c.is_zero() {
                continue;
            }
            let mut a = s.sum_in_var(var, n + t.dn, &pt)?;
            for _ in 0..t.order {
                a = a.derivative(var);
            }
            acc = &acc + &a.mul_poly(&c);
        }
        let label = format!("n={n}, {pt} ({var} symbolic)");
        Ok((label, (!acc.is_zero()).then(|| acc.to_string())))
    })
}

// ---------------------------------------------------------------------------
// certificates and telescoping

/// `G_{n,k} / F̄_{n,k}(r,s)` for a telescoping certificate.
#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    pub ratio: RatFunc,
}

impl Certificate {
    pub fn new(ratio: RatFunc) -> Certificate {
        Certificate { ratio }
    }

    pub fn zero() -> Certificate {
        Certificate { ratio: RatFunc::zero() }
    }

    /// `G_{n,k} = (s-n) C(n-1,k-1) (k+r)^(k-1) (s-k)^(n-k-1)` relative to
    /// `C(n,k) (r+k)^(k-1) (s-k)^(n-k)`, i.e. `(s-n) k / (n (s-k))`.
    pub fn abel() -> Certificate {
        Certificate { ratio: RatFunc::new(parse_poly("(s - n)*k").unwrap(), parse_poly("n*(s - k)").unwrap()).unwrap() }
    }
}

/// How `k` moves in the summands of a recurrence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KAlignment {
    /// `a_{n+dn}(r+dr, s-dr)` read off `F̄_{n+dn,k}(r+dr, s-dr)`.
    Fixed,
    /// `a_{n+dn}(r+dr, s-dr)` read off `F̄_{n+dn,k-dr}(r+dr, s-dr)`, the
    /// form produced by the shift solver.
    Shifted,
}

/// Check `Σ coeff · F̄(shifted) = G_{n,k} - G_{n,k+1}` as an identity of
/// rational functions, one family of `(r+k)`/`(s-k)` offsets at a time.
pub fn verify_telescoping(
    s: &AbelSummand,
    rec: &ShiftRecurrence,
    cert: &Certificate,
    alignment: KAlignment,
) -> Result<Report, CertifyError> {
    let mut families: BTreeMap<i64, RatFunc> = BTreeMap::new();
    let mut add = |fam: i64, f: RatFunc| {
        let e = families.entry(fam).or_insert_with(RatFunc::zero);
        *e = &*e + &f;
    };
    let err = |e: crate::error::SolveError| CertifyError::ReductionNonzero(e.to_string());
    for t in rec.terms() {
        let dk = match alignment {
            KAlignment::Fixed => 0,
            KAlignment::Shifted => -t.dr,
        };
        let (fam, ratio) = s.family_ratio(t.dn, t.dr, dk).map_err(err)?;
        add(fam, ratio.mul_poly(&t.coeff));
    }
    if !cert.ratio.is_zero() {
        add(0, -&cert.ratio);
        let (fam, ratio) = s.family_ratio(0, 0, 1).map_err(err)?;
        add(fam, &cert.ratio.shift(Var::K, 1) * &ratio);
    }
    let mut trace = Vec::new();
    for (fam, residue) in &families {
        if !residue.is_zero() {
            return Err(CertifyError::ReductionNonzero(format!("{residue} (offset family {fam})")));
        }
        trace.push(format!("terms with (r+k+{fam}), (s-k-{fam}) powers reduce to 0"));
    }
    Ok(Report::pass("telescoping", trace))
}

/// The summand `C(n,k) (r+k)^(k-1) (s-k)^(n-k)`.
pub fn abel_binomial_summand() -> AbelSummand {
    AbelSummand::new(crate::summand::parse_term("binomial(n,k)").unwrap(), KernelSpec::abel(false)).pin_pq(0, 0)
}

/// The recurrence `a_n - s a_{n-1} - (n+r) a_{n-1}(r+1,s-1) + (n-1)(r+s) a_{n-2}(r+1,s-1) = 0`.
pub fn abel_recurrence() -> ShiftRecurrence {
    let t = |dn, dr, c: &str| ShiftTerm { dn, dr, coeff: parse_poly(c).unwrap() };
    ShiftRecurrence::new(vec![
        t(0, 0, "1"),
        t(-1, 0, "-s"),
        t(-1, 1, "-(n + r)"),
        t(-2, 1, "(n - 1)*(r + s)"),
    ])
}

/// `G_{n,k} = (s-n) C(n-1,k-1) (k+r)^(k-1) (s-k)^(n-k-1)` evaluated exactly.
pub fn abel_certificate_value(n: i64, k: i64, r: &Rat, s: &Rat) -> Rat {
    let c = Rat::from_int(binomial(n - 1, k - 1));
    if c.is_zero() {
        return Rat::zero();
    }
    &(&(s - &Rat::from(n)) * &c) * &(&(r + &Rat::from(k)).pow(k - 1) * &(s - &Rat::from(k)).pow(n - k - 1))
}

/// The telescoping identity behind the recurrence, divided through by the
/// summand and reduced to zero; `rec` is normally [`abel_recurrence`].
pub fn verify_em_identity_for(rec: &ShiftRecurrence) -> Result<Report, CertifyError> {
    let s = abel_binomial_summand();
    let mut report = verify_telescoping(&s, rec, &Certificate::abel(), KAlignment::Fixed)?;
    report.check = "certificate identity".into();
    report.trace.insert(0, format!("F(n,k) = binomial(n,k) (r+k)^(k-1) (s-k)^(n-k); G(n,k)/F(n,k) = {}", Certificate::abel().ratio));
    report.trace.insert(1, format!("recurrence: {rec}"));
    Ok(report)
}

pub fn verify_em_identity() -> Result<Report, CertifyError> {
    verify_em_identity_for(&abel_recurrence())
}

// ---------------------------------------------------------------------------
// closed forms

/// `Π base^(a n + c)` with `base` a polynomial in `r, s`.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosedForm {
    pub factors: Vec<(MPoly, i64, i64)>,
}

impl ClosedForm {
    /// `(r+s)^n / r`.
    pub fn abel() -> ClosedForm {
        ClosedForm { factors: vec![(parse_poly("r + s").unwrap(), 1, 0), (parse_poly("r").unwrap(), 0, -1)] }
    }

    /// `value(n+dn, r+dr, s-dr) / value(n, r, s)`.
    pub fn shift_quotient(&self, dn: i64, dr: i64) -> Result<RatFunc, CertifyError> {
        let mut acc = RatFunc::one();
        for (base, a, c) in &self.factors {
            let shifted = base.shift(Var::R, dr).shift(Var::S, -dr);
            let b = RatFunc::from_poly(base.clone());
            if *a == 0 {
                acc = &acc * &(&RatFunc::from_poly(shifted).pow(*c) / &b.pow(*c));
            } else if shifted == *base {
                acc = &acc * &b.pow(a * dn);
            } else {
                return Err(CertifyError::UncoveredShift(format!("({base})^({a}*n + {c}) under r+{dr}, s-{dr}")));
            }
        }
        Ok(acc)
    }

    /// `∂^order/∂v^order value(n+dn, r, s) / value(n, r, s)` for `v` = `r` or `s`.
    pub fn derivative_quotient(&self, v: Var, order: u32, dn: i64) -> RatFunc {
        let mut shift = RatFunc::one();
        let mut log_deriv = RatFunc::zero();
        for (base, a, c) in &self.factors {
            let b = RatFunc::from_poly(base.clone());
            shift = &shift * &b.pow(a * dn);
            let e = &(&MPoly::var(Var::N) * &MPoly::int(*a)) + &MPoly::int(a * dn + c);
            log_deriv = &log_deriv + &(&RatFunc::from_poly(&e * &base.derivative(v)) / &b);
        }
        let mut d = RatFunc::one();
        for _ in 0..order {
            d = &d.derivative(v) + &(&d * &log_deriv);
        }
        &shift * &d
    }

    pub fn eval(&self, n: i64, r: &Rat, s: &Rat) -> Rat {
        self.factors.iter().fold(Rat::one(), |acc, (base, a, c)| {
            let b = base.eval(|v| match v {
                Var::R => Some(r.clone()),
                Var::S => Some(s.clone()),
                _ => None,
            });
            acc * b.expect("closed form bases use r and s").pow(a * n + c)
        })
    }
}

impl fmt::Display for ClosedForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .factors
            .iter()
            .map(|(b, a, c)| {
                let e = &(&MPoly::var(Var::N) * &MPoly::int(*a)) + &MPoly::int(*c);
                format!("({b})^({e})")
            })
            .collect();
        f.write_str(&parts.join("*"))
    }
}

/// Substitute the closed form into the recurrence and reduce to zero.
pub fn verify_closed_form(rec: &ShiftRecurrence, cf: &ClosedForm) -> Result<Report, CertifyError> {
    let mut acc = RatFunc::zero();
    for t in rec.terms() {
        acc = &acc + &cf.shift_quotient(t.dn, t.dr)?.mul_poly(&t.coeff);
    }
    if !acc.is_zero() {
        return Err(CertifyError::ReductionNonzero(acc.to_string()));
    }
    Ok(Report::pass("closed form", vec![format!("{cf} substituted into {rec} reduces to 0")]))
}

/// Substitute the closed form into a differential recurrence whose
/// coefficients have already been specialized, and reduce to zero.
pub fn verify_closed_form_diff(rec: &DiffRecurrence, cf: &ClosedForm) -> Result<Report, CertifyError> {
    let mut acc = RatFunc::zero();
    for t in rec.terms() {
        acc = &acc + &cf.derivative_quotient(rec.var(), t.order, t.dn).mul_poly(&t.coeff);
    }
    if !acc.is_zero() {
        return Err(CertifyError::ReductionNonzero(acc.to_string()));
    }
    Ok(Report::pass("closed form (differential)", vec![format!("{cf} substituted into {rec} reduces to 0")]))
}

/// `a_0 = 1/r` and `a_1 = (r+s)/r` for the Abel sum at seeded random points.
pub fn verify_initial_conditions(points: usize, seed: u64) -> Result<Report, CertifyError> {
    let s = abel_binomial_summand();
    let cf = ClosedForm::abel();
    let mut report = run_points(points, seed, Exec::Sequential, "initial conditions", |rng| {
        let (_, pt) = draw(rng, &s.pins, 0);
        if pt.r.is_zero() || (&pt.r + &Rat::one()).is_zero() {
            return Err(singular());
        }
        let mut bad = None;
        for n in 0..=1 {
            let lhs = s.eval_abel_sum(n, &pt)?;
            let rhs = cf.eval(n, &pt.r, &pt.s);
            if lhs != rhs {
                bad = Some(format!("a_{n}: {lhs} vs {rhs}"));
            }
        }
        Ok((format!("r={}, s={}", pt.r, pt.s), bad))
    })?;
    report.trace = vec!["a_0(r,s) = 1/r and a_1(r,s) = (r+s)/r by direct summation".into()];
    Ok(report)
}

/// `Σ_k C(n,k) (r+k)^(k-1) (s-k)^(n-k) = (r+s)^n / r` for every `n ≤ n_max`.
pub fn verify_abel_identity(n_max: i64, points: usize, seed: u64, exec: Exec) -> Result<Report, CertifyError> {
    let s = abel_binomial_summand();
    let cf = ClosedForm::abel();
    run_points(points, seed, exec, "Abel identity", |rng| {
        let (_, pt) = draw(rng, &s.pins, 0);
        if pt.r.is_zero() {
            return Err(singular());
        }
        for n in 0..=n_max {
            let lhs = s.eval_abel_sum(n, &pt)?;
            let rhs = cf.eval(n, &pt.r, &pt.s);
            if lhs != rhs {
                return Ok((format!("n={n}, r={}, s={}", pt.r, pt.s), Some((lhs - rhs).to_string())));
            }
        }
        Ok((format!("r={}, s={}", pt.r, pt.s), None))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn em_identity_reduces_to_zero() {
        assert!(verify_em_identity().unwrap().passed());
    }

    #[test]
    fn corrupted_em_identity_is_caught() {
        let mut terms = abel_recurrence().terms().to_vec();
        let last = terms.iter_mut().find(|t| t.dn == -2).unwrap();
        last.coeff = parse_poly("n*(r + s)").unwrap();
        let rec = ShiftRecurrence::new(terms);
        assert!(matches!(verify_em_identity_for(&rec), Err(CertifyError::ReductionNonzero(_))));
    }

    #[test]
    fn em_identity_spot_value() {
        let (n, k) = (3, 1);
        let (r, s) = (Rat::from(1), Rat::from(5));
        let f = |n: i64, k: i64, r: &Rat, s: &Rat| {
            abel_binomial_summand().eval_summand(n, k, &EvalPoint::new(r.clone(), s.clone())).unwrap()
        };
        let r1 = &r + &Rat::one();
        let s1 = &s - &Rat::one();
        let lhs = f(n, k, &r, &s) - &s * &f(n - 1, k, &r, &s) - Rat::from(n) * &f(n - 1, k, &r1, &s1)
            - &r * &f(n - 1, k, &r1, &s1)
            + &(Rat::from(n - 1) * &(&r + &s)) * &f(n - 2, k, &r1, &s1);
        let rhs = abel_certificate_value(n, k, &r, &s) - abel_certificate_value(n, k + 1, &r, &s);
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn closed_form_satisfies_recurrence() {
        assert!(verify_closed_form(&abel_recurrence(), &ClosedForm::abel()).unwrap().passed());
        let wrong = ClosedForm { factors: vec![(parse_poly("r + s").unwrap(), 1, 0), (parse_poly("s").unwrap(), 0, -1)] };
        assert!(matches!(verify_closed_form(&abel_recurrence(), &wrong), Err(CertifyError::ReductionNonzero(_))));
    }

    #[test]
    fn closed_form_needs_invariant_bases() {
        let bad = ClosedForm { factors: vec![(parse_poly("r").unwrap(), 1, 0)] };
        assert!(matches!(bad.shift_quotient(1, 1), Err(CertifyError::UncoveredShift(_))));
    }

    #[test]
    fn zero_certificate_with_aligned_recurrence() {
        let s = abel_binomial_summand();
        let rec = abel_recurrence();
        assert!(verify_telescoping(&s, &rec, &Certificate::zero(), KAlignment::Shifted).unwrap().passed());
        assert!(verify_telescoping(&s, &rec, &Certificate::zero(), KAlignment::Fixed).is_err());
        let perturbed = Certificate::new(&Certificate::abel().ratio * &RatFunc::constant(Rat::from(2)));
        assert!(verify_telescoping(&s, &rec, &perturbed, KAlignment::Fixed).is_err());
    }

    #[test]
    fn numeric_oracle_on_abel_recurrence() {
        let s = abel_binomial_summand();
        let rec = abel_recurrence();
        let a = validate_shift(&s, &rec, 20, 7, Exec::Sequential).unwrap();
        let b = validate_shift(&s, &rec, 20, 7, Exec::Parallel).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.points.len(), 20);
        let mut terms = rec.terms().to_vec();
        terms[1].coeff = parse_poly("-s - 1").unwrap();
        let bad = ShiftRecurrence::new(terms);
        assert!(matches!(validate_shift(&s, &bad, 20, 7, Exec::Sequential), Err(CertifyError::ValidationFailed { .. })));
    }

    #[test]
    fn initial_conditions_and_identity() {
        assert!(verify_initial_conditions(5, 11).unwrap().passed());
        assert!(verify_abel_identity(8, 10, 3, Exec::Parallel).unwrap().passed());
    }
}
