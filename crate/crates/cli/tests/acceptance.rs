//! End-to-end acceptance run: one PASS/FAIL line per criterion.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use abel_core::algebra::{parse_poly, MPoly, Monomial, Rat, Var};
use abel_core::bijection::{roundtrip_ok, EndoFunction};
use abel_core::celine::{k_level_residue, ShiftRecurrence, ShiftTerm};
use abel_core::certify::{abel_binomial_summand, abel_recurrence, validate_diff, validate_shift, verify_em_identity_for};
use abel_core::diffrec::{self, DiffRecurrence, DiffTerm};
use abel_core::error::CertifyError;
use abel_core::exec::Exec;
use abel_core::linsolve::{nullspace, RFMatrix};
use abel_core::summand::{parse_term, AbelSummand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

type Outcome = Result<String, String>;

const SAMPLE_ONE: &str = "binomial(n,k)*x^k";
const SAMPLE_TWO: &str = "1/(k!^2*(n-k)!)*x^k";

struct Run {
    code: i32,
    stdout: String,
    elapsed: Duration,
}

fn abel(args: &[&str]) -> Run {
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_abel")).args(args).output().expect("binary runs");
    Run {
        code: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8(out.stdout).expect("utf-8 output"),
        elapsed: start.elapsed(),
    }
}

fn ensure(ok: bool, why: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(why.into())
    }
}

fn lines(run: &Run) -> Vec<&str> {
    run.stdout.lines().collect()
}

fn term(dn: i64, dr: i64, c: &str) -> ShiftTerm {
    ShiftTerm { dn, dr, coeff: parse_poly(c).unwrap() }
}

fn dterm(order: u32, dn: i64, c: &str) -> DiffTerm {
    DiffTerm { order, dn, coeff: parse_poly(c).unwrap() }
}

/// The printed first sample, written with `a_n` as the top term.
fn sample_one_printed() -> ShiftRecurrence {
    ShiftRecurrence::new(vec![
        term(0, 0, "1"),
        term(-1, 1, "-(n*x + r*x)"),
        term(-1, 0, "-s"),
        term(-2, 1, "-(-n*r*x - n*s*x + r*x + s*x)"),
    ])
}

fn sample_two_printed() -> ShiftRecurrence {
    ShiftRecurrence::new(vec![
        term(0, 0, "(n - 1 - s)*n^2"),
        term(-1, 1, "-x*(n + r)*(n - 1 - s)"),
        term(-1, 0, "-(2*n^2 - 2*n*s - 2*n + s)*s"),
        term(-2, 1, "(n^2 + 2*n*r - 2*r*s - s^2 - n - r)*x"),
        term(-2, 0, "(n - s)*s^2"),
        term(-3, 1, "-(n*r + n*s - r*s - s^2)*x"),
    ])
}

fn r_equation_printed() -> DiffRecurrence {
    DiffRecurrence::new(
        Var::R,
        vec![
            dterm(0, 0, "-(p*n + n*s - n + p + s - 1)"),
            dterm(1, 0, "n*r + n*s + r + s"),
            dterm(0, 1, "n + p"),
            dterm(1, 1, "-(n + r + 1)"),
        ],
    )
}

fn s_equation_printed() -> DiffRecurrence {
    DiffRecurrence::new(
        Var::S,
        vec![dterm(0, 0, "-(n + 1)*(q + n - s + 1)"), dterm(0, 1, "q"), dterm(1, 1, "n - s + 1")],
    )
}

fn cross_multiplied_equal(a: &ShiftRecurrence, b: &ShiftRecurrence) -> bool {
    let key = |r: &ShiftRecurrence| r.terms().iter().map(|t| (t.dn, t.dr)).collect::<Vec<_>>();
    let (x, y) = (a.terms(), b.terms());
    key(a) == key(b)
        && (0..x.len()).all(|i| (0..x.len()).all(|j| &x[i].coeff * &y[j].coeff == &x[j].coeff * &y[i].coeff))
}

fn shift_from(run: &Run) -> Result<ShiftRecurrence, String> {
    let first = lines(run).first().copied().ok_or("no output")?;
    ShiftRecurrence::from_json(first).map_err(|e| e.to_string())
}

fn report_of(line: &str) -> Result<Value, String> {
    serde_json::from_str(line).map_err(|e| format!("report JSON: {e}"))
}

fn criterion_1() -> Outcome {
    let json = abel(&["find-rec", "--summand", SAMPLE_ONE, "--max-order", "2", "--format", "json"]);
    ensure(json.code == 0, format!("exit {}", json.code))?;
    let rec = shift_from(&json)?;
    ensure(rec == sample_one_printed().shifted(2), format!("got {rec}"))?;
    let text = abel(&["find-rec", "--summand", SAMPLE_ONE, "--max-order", "2", "--format", "text"]);
    let solved = lines(&text).first().copied().unwrap_or_default().to_string();
    let expected = "a_{n}(r, s) = s*a_{n-1}(r, s) + (n*x + r*x)*a_{n-1}(r+1, s-1) \
                    - (n*r*x + n*s*x - r*x - s*x)*a_{n-2}(r+1, s-1)";
    ensure(solved == expected, format!("solved form {solved}"))?;
    ensure(json.elapsed < Duration::from_secs(10), format!("took {:?}", json.elapsed))?;
    Ok(format!("exact match, {:.2} s", json.elapsed.as_secs_f64()))
}

fn criterion_2() -> Outcome {
    let run = abel(&["find-rec", "--summand", SAMPLE_TWO, "--max-order", "3", "--format", "json"]);
    ensure(run.code == 0, format!("exit {}", run.code))?;
    let rec = shift_from(&run)?;
    ensure(rec.order_n() == 3, format!("order {}", rec.order_n()))?;
    ensure(rec.terms().len() == 6, format!("{} terms", rec.terms().len()))?;
    ensure(cross_multiplied_equal(&rec, &sample_two_printed().shifted(3)), format!("ratios differ: {rec}"))?;
    Ok("order 3, five terms on the right, coefficient ratios match".into())
}

fn criterion_3() -> Outcome {
    let run = abel(&["find-diffrec", "--summand", "binomial(n,k)", "--format", "json"]);
    ensure(run.code == 0, format!("exit {}", run.code))?;
    let ls = lines(&run);
    ensure(ls.len() == 4, format!("{} output lines", ls.len()))?;
    let r_eq = DiffRecurrence::from_json(ls[0]).map_err(|e| e.to_string())?;
    let s_eq = DiffRecurrence::from_json(ls[2]).map_err(|e| e.to_string())?;
    ensure(r_eq == r_equation_printed(), format!("r-equation {r_eq}"))?;
    ensure(s_eq == s_equation_printed(), format!("s-equation {s_eq}"))?;
    Ok("r- and s-equations exact".into())
}

fn criterion_4() -> Outcome {
    let run = abel(&["certify-em", "--format", "json", "--ic-points", "5"]);
    ensure(run.code == 0, format!("exit {}", run.code))?;
    let reports: Vec<Value> = lines(&run).into_iter().map(report_of).collect::<Result<_, _>>()?;
    let find = |name: &str| reports.iter().find(|r| r["check"] == name).cloned().ok_or(format!("no {name} report"));
    for name in ["certificate identity", "closed form", "initial conditions"] {
        let r = find(name)?;
        ensure(r["verdict"] == "pass" && r["residue"] == "0", format!("{name}: {r}"))?;
    }
    let ic = find("initial conditions")?;
    ensure(ic["points"].as_array().map(Vec::len) == Some(5), "initial conditions not at 5 points")?;
    Ok("telescoping residue 0, closed form residue 0, a_0 and a_1 at 5 points".into())
}

fn criterion_5() -> Outcome {
    let run = abel(&["certify-em", "--format", "json", "--n-max", "8", "--points", "50"]);
    ensure(run.code == 0, format!("exit {}", run.code))?;
    let r = lines(&run)
        .into_iter()
        .map(report_of)
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .find(|r| r["check"] == "Abel identity")
        .ok_or("no identity report")?;
    ensure(r["verdict"] == "pass", format!("{r}"))?;
    let points = r["points"].as_array().map(Vec::len).unwrap_or(0);
    ensure(points == 50, format!("{points} points"))?;
    Ok(format!("n <= 8 at 50 points, {} resampled", r["resamples"]))
}

fn identity_lines(args: &[&str]) -> Result<Vec<Value>, String> {
    let run = abel(args);
    ensure(run.code == 0, format!("{args:?} exit {}", run.code))?;
    lines(&run).into_iter().map(report_of).collect()
}

fn four_way(r: &Value) -> bool {
    let ab = r["count_ab"].to_string();
    r["closed_lhs"].as_str() == Some(ab.as_str())
        && r["closed_rhs"].as_str() == Some(ab.as_str())
        && r["count_cd"].to_string() == ab
        && r["per_function_ok"] == true
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let mut all = identity_lines(&["verify-identity", "--which", "cauchy2", "--n-max", "6", "--format", "json"])?;
    all.extend(identity_lines(&[
        "verify-identity", "--which", "kalai1", "--n-max", "5", "--p-max", "3", "--format", "json",
    ])?);
    ensure(all.len() == 7 + 21, format!("{} reports", all.len()))?;
    if let Some(bad) = all.iter().find(|r| !four_way(r)) {
        return Err(format!("mismatch {bad}"));
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(120), format!("took {elapsed:?}"))?;
    Ok(format!("{} four-way agreements, {:.1} s", all.len(), elapsed.as_secs_f64()))
}

fn criterion_7() -> Outcome {
    let mut checked = 0u64;
    for (n, p) in [(0, 0), (1, 0), (2, 0), (3, 0), (4, 0), (1, 1), (2, 1), (3, 1), (1, 2), (2, 2), (3, 2)] {
        for i in 0..EndoFunction::count(n, p) {
            let f = EndoFunction::nth(n, p, i);
            ensure(roundtrip_ok(&f), format!("round trip fails for {f}"))?;
            checked += 1;
        }
    }
    let mut all = identity_lines(&["verify-identity", "--which", "cauchy2", "--n-max", "6", "--format", "json"])?;
    all.extend(identity_lines(&[
        "verify-identity", "--which", "kalai1", "--n-max", "5", "--p-max", "3", "--format", "json",
    ])?);
    if let Some(bad) = all.iter().find(|r| r["roundtrip_ok"] != true) {
        return Err(format!("round trip fails in sweep {bad}"));
    }
    Ok(format!("{checked} functions directly, plus every sweep of criterion 6"))
}

fn criterion_8() -> Outcome {
    const SEED: u64 = 0xacce97;
    let sample_one = AbelSummand::parse(SAMPLE_ONE).unwrap();
    let sample_two = AbelSummand::parse(SAMPLE_TWO).unwrap();
    let binomial = AbelSummand::parse("binomial(n,k)").unwrap();
    let at_unit_x = AbelSummand::parse("binomial(n,k)").unwrap().pin_x(1);
    let emitted = [
        (&sample_one, abel(&["find-rec", "--summand", SAMPLE_ONE, "--format", "json"])),
        (&sample_two, abel(&["find-rec", "--summand", SAMPLE_TWO, "--max-order", "3", "--format", "json"])),
        (&at_unit_x, abel(&["find-rec", "--summand", "binomial(n,k)", "--x", "1", "--format", "json"])),
    ];
    for (s, run) in &emitted {
        let rec = shift_from(run)?;
        let report = validate_shift(s, &rec, 20, SEED, Exec::Parallel).map_err(|e| format!("{rec}: {e}"))?;
        ensure(report.points.len() == 20, "not 20 points")?;
    }
    let diff = abel(&["find-diffrec", "--summand", "binomial(n,k)", "--format", "json"]);
    for line in lines(&diff).into_iter().step_by(2) {
        let rec = DiffRecurrence::from_json(line).map_err(|e| e.to_string())?;
        validate_diff(&binomial, &rec, 20, SEED, Exec::Parallel).map_err(|e| format!("{rec}: {e}"))?;
    }

    let abel_summand = abel_binomial_summand();
    let mut mutant: Vec<ShiftTerm> = abel_recurrence().terms().to_vec();
    mutant[1].coeff = &mutant[1].coeff + &MPoly::one();
    let mutant = ShiftRecurrence::new(mutant);
    ensure(matches!(verify_em_identity_for(&mutant), Err(CertifyError::ReductionNonzero(_))), "mutant passes symbolically")?;
    ensure(
        matches!(validate_shift(&abel_summand, &mutant, 20, SEED, Exec::Parallel), Err(CertifyError::ValidationFailed { .. })),
        "mutant passes numerically",
    )?;

    let mut one: Vec<ShiftTerm> = sample_one_printed().shifted(2).terms().to_vec();
    one[2].coeff = &one[2].coeff + &MPoly::var(Var::X);
    let one = ShiftRecurrence::new(one);
    ensure(!k_level_residue(&sample_one, &one).unwrap().is_zero(), "sample 1 mutant passes symbolically")?;
    ensure(
        matches!(validate_shift(&sample_one, &one, 20, SEED, Exec::Parallel), Err(CertifyError::ValidationFailed { .. })),
        "sample 1 mutant passes numerically",
    )?;
    let mut ds: Vec<DiffTerm> = s_equation_printed().terms().to_vec();
    ds[1].coeff = &ds[1].coeff + &MPoly::one();
    let ds = DiffRecurrence::new(Var::S, ds);
    ensure(!diffrec::k_level_residue(&binomial, &ds).unwrap().is_zero(), "diff mutant passes symbolically")?;
    ensure(validate_diff(&binomial, &ds, 20, SEED, Exec::Parallel).is_err(), "diff mutant passes numerically")?;
    Ok("5 emitted recurrences validated at 20 points; 3 mutants rejected twice".into())
}

fn fact(m: i64) -> Rat {
    (1..=m).fold(Rat::one(), |acc, i| acc * Rat::from(i))
}

fn choose(a: i64, b: i64) -> Rat {
    fact(a) * fact(b).recip() * fact(a - b).recip()
}

fn random_poly(rng: &mut ChaCha8Rng) -> MPoly {
    let terms = rng.gen_range(0..4);
    MPoly::from_terms((0..terms).map(|_| {
        let m = Monomial::var(Var::N, rng.gen_range(0..2))
            .mul(&Monomial::var(Var::R, rng.gen_range(0..2)))
            .mul(&Monomial::var(Var::S, rng.gen_range(0..2)));
        (m, Rat::from(rng.gen_range(-3i64..=3)))
    }))
}

fn json_stable(line: &str) -> Result<(), String> {
    let again = if line.contains("\"kind\":\"shift\"") {
        ShiftRecurrence::from_json(line).map_err(|e| e.to_string())?.to_json()
    } else {
        DiffRecurrence::from_json(line).map_err(|e| e.to_string())?.to_json()
    };
    ensure(again == line, format!("{line} re-renders as {again}"))
}

fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for case in 0..50 {
        let (rows, cols): (usize, usize) = (rng.gen_range(1..4), rng.gen_range(2..5));
        let m: Vec<Vec<MPoly>> = (0..rows).map(|_| (0..cols).map(|_| random_poly(&mut rng)).collect()).collect();
        let basis = nullspace(&RFMatrix::<usize>::from_polys(m.clone()));
        ensure(basis.len() >= cols.saturating_sub(rows), format!("matrix {case}: basis too small"))?;
        for v in &basis {
            for row in &m {
                let dot = row.iter().zip(v).fold(MPoly::zero(), |acc, (a, b)| &acc + &(a * b));
                ensure(dot.is_zero(), format!("matrix {case}: M v = {dot}"))?;
            }
        }
    }

    let sources = ["binomial(n,k)", "1/(k!^2*(n-k)!)*x^k", "binomial(n,k)*binomial(n+k,k)*x^k"];
    let direct = |which: usize, n: i64, k: i64, x: &Rat| match which {
        0 => choose(n, k),
        1 => fact(k).pow(2).recip() * fact(n - k).recip() * x.pow(k),
        _ => choose(n, k) * choose(n + k, k) * x.pow(k),
    };
    let mut agreed = 0;
    while agreed < 100 {
        let which = rng.gen_range(0..3);
        let n = rng.gen_range(0..10i64);
        let k = rng.gen_range(0..=n);
        let (dn, dk) = (rng.gen_range(0..3i64), rng.gen_range(-2..3i64));
        let x = Rat::from(rng.gen_range(1..6i64));
        if k + dk < 0 || k + dk > n + dn {
            continue;
        }
        let ratio = parse_term(sources[which]).unwrap().shift_ratio(dn, dk);
        let Ok(value) = ratio.eval(|v| match v {
            Var::N => Some(Rat::from(n)),
            Var::K => Some(Rat::from(k)),
            Var::X => Some(x.clone()),
            _ => None,
        }) else {
            continue;
        };
        let expected = direct(which, n + dn, k + dk, &x) * direct(which, n, k, &x).recip();
        ensure(value == expected, format!("{} at n={n} k={k} shift ({dn},{dk})", sources[which]))?;
        agreed += 1;
    }

    let runs = [
        abel(&["find-rec", "--summand", SAMPLE_ONE, "--format", "json"]),
        abel(&["find-rec", "--summand", SAMPLE_TWO, "--max-order", "3", "--format", "json"]),
        abel(&["find-diffrec", "--summand", "binomial(n,k)", "--format", "json"]),
    ];
    let mut stable = 0;
    for run in &runs {
        for line in lines(run).into_iter().filter(|l| l.starts_with("{\"kind\"")) {
            json_stable(line)?;
            stable += 1;
        }
    }
    Ok(format!("50 nullspaces exact, 100 shift quotients agree, {stable} JSON documents byte-stable"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("sample recurrence 1", criterion_1),
        ("sample recurrence 2", criterion_2),
        ("differential pair", criterion_3),
        ("certificate suite", criterion_4),
        ("Abel identity oracle", criterion_5),
        ("counting identities", criterion_6),
        ("bijection round trip", criterion_7),
        ("oracle gate and mutations", criterion_8),
        ("infrastructure properties", criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("criterion {} ({name}): PASS - {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {} ({name}): FAIL - {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
