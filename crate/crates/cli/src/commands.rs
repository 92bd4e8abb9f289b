use abel_core::algebra::{Rat, Var};
use abel_core::bijection::{
    self, count_ab, count_cd, forward_map, inverse_map, is_valid_ab, is_valid_cd, roundtrip_ok, EndoFunction, Identity,
    SetPair,
};
use abel_core::celine::{self, SolverConfig};
use abel_core::certify::{self, ClosedForm, Report};
use abel_core::diffrec;
use abel_core::error::{CertifyError, SolveError};
use abel_core::exec::Exec;
use abel_core::summand::{parse_term, AbelSummand, KernelSpec, Orientation};

use crate::{prose, DiffVar, Failure, Format, OrientationArg, OutputArgs, SummandArgs};

/// Largest number of functions an identity sweep will enumerate.
const SWEEP_LIMIT: u64 = 50_000_000;

fn exec(out: &OutputArgs) -> Exec {
    if out.sequential {
        Exec::Sequential
    } else {
        Exec::Parallel
    }
}

pub(crate) fn summand(a: &SummandArgs) -> Result<AbelSummand, Failure> {
    let term = parse_term(&a.summand).map_err(|e| Failure::Usage(format!("--summand: {e}")))?;
    let mut s = if a.kernel.trim() == "abel" {
        AbelSummand::abel(term)
    } else {
        let kernel = KernelSpec::parse_general(&a.kernel).map_err(|e| Failure::Usage(format!("--kernel: {e}")))?;
        AbelSummand::new(term, kernel)
    };
    if let Some(x) = &a.x {
        let x: Rat = x.parse().map_err(|e| Failure::Usage(format!("--x: {e}")))?;
        s = s.pin_x(x);
    }
    s.pins.p = a.p;
    s.pins.q = a.q;
    Ok(s)
}

pub(crate) fn config(a: &SummandArgs) -> SolverConfig {
    SolverConfig {
        max_ord: a.max_order,
        orientation: match a.orientation {
            OrientationArg::Abel => Orientation::Abel,
            OrientationArg::Literal => Orientation::Literal,
        },
        points: a.points,
        seed: a.seed,
        exec: exec(&a.out),
    }
}

pub(crate) fn solve_failure(e: SolveError) -> Failure {
    match e {
        SolveError::NoRecurrenceFound(_) => Failure::NotFound(e.to_string()),
        SolveError::InvalidConfig(_) | SolveError::KernelMode | SolveError::KernelNotDifferentiable(_) => {
            Failure::Usage(e.to_string())
        }
        SolveError::CannotIsolate(_) | SolveError::ValidationFailed(_) => Failure::Check(e.to_string()),
    }
}

fn var_of(v: DiffVar) -> Var {
    match v {
        DiffVar::R => Var::R,
        DiffVar::S => Var::S,
    }
}

pub(crate) fn diff_vars(v: Option<DiffVar>) -> Vec<Var> {
    match v {
        Some(v) => vec![var_of(v)],
        None => vec![Var::R, Var::S],
    }
}

fn validation_line(r: &Report, seed: u64) -> String {
    let verdict = if r.passed() { "pass" } else { "fail" };
    format!("validation: {verdict} at {} points (seed {seed}, {} resamples)", r.points.len(), r.resamples)
}

pub fn find_rec(a: &SummandArgs) -> Result<(), Failure> {
    let s = summand(a)?;
    let found = celine::find_shift_recurrence_traced(&s, &config(a)).map_err(solve_failure)?;
    let rec = &found.recurrence;
    match a.out.format {
        Format::Json => {
            out!("{}", rec.to_json());
            out!("{}", found.validation.to_json());
        }
        Format::Text | Format::Latex => {
            let latex = a.out.format == Format::Latex;
            if let Ok(solved) = rec.solved_form() {
                out!("{}", solved.render(latex));
            }
            out!("{}", if latex { rec.render_latex() } else { rec.render_text() });
            out!("orders: L = {}, M = {}", found.orders.0, found.orders.1);
            out!("{}", validation_line(&found.validation, a.seed));
        }
    }
    Ok(())
}

pub fn find_diffrec(a: &SummandArgs, var: Option<DiffVar>) -> Result<(), Failure> {
    let s = summand(a)?;
    let cfg = config(a);
    for v in diff_vars(var) {
        let found = diffrec::find_diff_recurrence_traced(&s, v, &cfg).map_err(solve_failure)?;
        let rec = &found.recurrence;
        match a.out.format {
            Format::Json => {
                out!("{}", rec.to_json());
                out!("{}", found.validation.to_json());
            }
            Format::Text => {
                out!("{}", rec.render_text());
                out!("{}", validation_line(&found.validation, a.seed));
            }
            Format::Latex => {
                out!("{}", rec.render_latex());
                out!("{}", validation_line(&found.validation, a.seed));
            }
        }
    }
    Ok(())
}

pub fn report(a: &SummandArgs, var: Option<DiffVar>) -> Result<(), Failure> {
    let s = summand(a)?;
    let cfg = config(a);
    match var {
        None => {
            let found = celine::find_shift_recurrence_traced(&s, &cfg).map_err(solve_failure)?;
            let residue = celine::k_level_residue(&s, &found.recurrence).map_err(solve_failure)?;
            prose::shift_report(&s, &found, &residue, &cfg, a.out.format);
            if !residue.is_zero() {
                return Err(Failure::Check(format!("k-level residue {residue} is not zero")));
            }
        }
        Some(v) => {
            let found = diffrec::find_diff_recurrence_traced(&s, var_of(v), &cfg).map_err(solve_failure)?;
            let residue = diffrec::k_level_residue(&s, &found.recurrence).map_err(solve_failure)?;
            prose::diff_report(&s, &found, &residue, &cfg, a.out.format);
            if !residue.is_zero() {
                return Err(Failure::Check(format!("k-level residue {residue} is not zero")));
            }
        }
    }
    Ok(())
}

pub fn verify_identity(which: &str, n_max: usize, p_max: usize, out: &OutputArgs) -> Result<(), Failure> {
    let which: Identity = which.parse().map_err(Failure::Usage)?;
    let ps: Vec<usize> = match which {
        Identity::Cauchy2 => vec![0],
        Identity::Kalai1 => (0..=p_max).collect(),
    };
    if n_max > bijection::MAX_N {
        return Err(Failure::Usage(format!("--n-max {n_max} exceeds {}", bijection::MAX_N)));
    }
    let worst = ps.iter().map(|&p| EndoFunction::count(n_max, p)).max().unwrap_or(0);
    if worst > SWEEP_LIMIT {
        return Err(Failure::Usage(format!("sweep over {worst} functions exceeds the limit {SWEEP_LIMIT}")));
    }
    if out.format != Format::Json {
        match which {
            Identity::Cauchy2 => out!("cauchy2: sum C(n,k) k^k (n-k)^(n-k) = sum C(n,k) n^k (n-k)!"),
            Identity::Kalai1 => out!("kalai1: sum C(n,k) k^k (n-k)^(n-k+p) = sum C(n,k) n^k (n-k)! S(p+n-k, n-k)"),
        }
        out!("{:>2} {:>2} {:>10} {:>12}   {:<12} LHS = RHS", "n", "p", "functions", "#(f,A,B)", "#(f,C,D)");
    }
    for &p in &ps {
        for n in 0..=n_max {
            if n == 0 && p > 0 {
                continue;
            }
            let (report, offending) = match bijection::verify_identity(n, p, which, exec(out)) {
                Ok(r) => (r, None),
                Err(m) => (m.report, Some(m.offending)),
            };
            if out.format == Format::Json {
                out!("{}", serde_json::to_string(&report).expect("serializable"));
            } else {
                out!(
                    "{:>2} {:>2} {:>10} {:>12} = {:<12} {} = {}",
                    report.n, report.p, report.functions, report.count_ab, report.count_cd, report.closed_lhs, report.closed_rhs
                );
            }
            if let Some(offending) = offending {
                let f = offending.map(|f| format!("; first offending f = {f}")).unwrap_or_default();
                return Err(Failure::Check(format!("{which} fails at n = {n}, p = {p}{f}", which = which.name())));
            }
        }
    }
    Ok(())
}

pub fn bijection(images: &[usize], n: Option<usize>, out: &OutputArgs) -> Result<(), Failure> {
    let n = n.unwrap_or(images.len());
    if images.len() < n {
        return Err(Failure::Usage(format!("--f lists {} images but n = {n}", images.len())));
    }
    let f = EndoFunction::new(n, images).map_err(|e| Failure::Usage(e.to_string()))?;
    let full = if n == 0 { 0 } else { (1u32 << n) - 1 };
    let forward: Vec<(SetPair, SetPair)> = (0..=full)
        .filter(|&a| is_valid_ab(&f, a))
        .map(|a| {
            let ab = SetPair::from_first(n, a);
            (ab, forward_map(&f, ab))
        })
        .collect();
    let inverse: Vec<(SetPair, SetPair)> = (0..=full)
        .filter(|&d| is_valid_cd(&f, d))
        .map(|d| {
            let cd = SetPair { first: full & !d, second: d };
            (cd, inverse_map(&f, cd))
        })
        .collect();
    let (ab, cd, round) = (count_ab(&f), count_cd(&f), roundtrip_ok(&f));
    match out.format {
        Format::Json => {
            let pairs = |v: &[(SetPair, SetPair)]| -> Vec<[String; 2]> {
                v.iter().map(|(x, y)| [x.to_string(), y.to_string()]).collect()
            };
            let doc = serde_json::json!({
                "f": f.to_string(),
                "n": n,
                "p": f.p(),
                "forward": pairs(&forward),
                "inverse": pairs(&inverse),
                "count_ab": ab,
                "count_cd": cd,
                "roundtrip_ok": round,
            });
            out!("{doc}");
        }
        Format::Text | Format::Latex => {
            out!("f = {f} into [{n}], p = {}", f.p());
            out!("(A, B) -> (C, D):");
            for (x, y) in &forward {
                out!("  {x} -> {y}");
            }
            out!("(C, D) -> (A, B):");
            for (x, y) in &inverse {
                out!("  {x} -> {y}");
            }
            out!("#(A,B) = {ab}, #(C,D) = {cd}, round trip {}", if round { "ok" } else { "FAILED" });
        }
    }
    if ab != cd || !round {
        return Err(Failure::Check(format!("bijection check failed for f = {f}")));
    }
    Ok(())
}

fn settle(check: &str, r: Result<Report, CertifyError>) -> Report {
    r.unwrap_or_else(|e| Report::failed(check, &e))
}

pub fn certify_em(n_max: i64, points: usize, ic_points: usize, seed: u64, out: &OutputArgs) -> Result<(), Failure> {
    if points == 0 || ic_points == 0 {
        return Err(Failure::Usage("--points must be at least 1".into()));
    }
    let rec = certify::abel_recurrence();
    let reports = [
        settle("certificate identity", certify::verify_em_identity()),
        settle("closed form", certify::verify_closed_form(&rec, &ClosedForm::abel())),
        settle("initial conditions", certify::verify_initial_conditions(ic_points, seed)),
        settle("Abel identity", certify::verify_abel_identity(n_max, points, seed, exec(out))),
    ];
    match out.format {
        Format::Json => {
            for r in &reports {
                out!("{}", r.to_json());
            }
        }
        Format::Text | Format::Latex => prose::em_report(&rec, &reports, n_max, seed, out.format == Format::Latex),
    }
    match reports.iter().find(|r| !r.passed()) {
        Some(r) => Err(Failure::Check(format!("{} failed", r.check))),
        None => Ok(()),
    }
}
