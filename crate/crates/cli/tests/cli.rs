use std::process::Command;

fn abel(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_abel")).args(args).output().unwrap();
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

#[test]
fn find_rec_text_prints_the_solved_form_first() {
    let (code, out, _) = abel(&["find-rec", "--summand", "binomial(n,k)*x^k", "--max-order", "2", "--format", "text"]);
    assert_eq!(code, 0);
    let first = out.lines().next().unwrap();
    assert!(first.starts_with("a_{n}(r, s) = s*a_{n-1}(r, s) + (n*x + r*x)*a_{n-1}(r+1, s-1)"), "{first}");
    assert!(out.contains("orders: L = 2, M = 1"));
    assert!(out.contains("validation: pass at 20 points"));
}

#[test]
fn latex_parenthesizes_polynomial_coefficients() {
    let (code, out, _) = abel(&["find-rec", "--summand", "binomial(n,k)", "--x", "1", "--format", "latex"]);
    assert_eq!(code, 0);
    let solved = out.lines().next().unwrap();
    assert!(solved.contains("\\left(n + r\\right) a_{n-1}\\!\\left(r+1, s-1\\right)"), "{solved}");
    assert!(!out.contains('*'), "{out}");
}

#[test]
fn exit_codes_follow_the_failure_class() {
    let (code, _, err) = abel(&["find-rec", "--summand", "binomial(n,k)*x^k", "--max-order", "1"]);
    assert_eq!(code, 1, "{err}");
    let (code, _, err) = abel(&["find-rec", "--summand", "binomial(n,"]);
    assert_eq!(code, 2);
    assert!(err.contains("parse error at offset"), "{err}");
    let (code, _, _) = abel(&["find-rec", "--summand", "binomial(n,k)", "--max-order", "0"]);
    assert_eq!(code, 2);
    let (code, _, _) = abel(&["find-rec", "--summand", "binomial(n,k)", "--kernel", "(r+s+k)^(n)"]);
    assert_eq!(code, 2);
    let (code, _, _) = abel(&["find-rec", "--summand", "binomial(n,k)", "--x", "one"]);
    assert_eq!(code, 2);
    let (code, _, _) = abel(&["verify-identity", "--which", "cauchy3"]);
    assert_eq!(code, 2);
}

#[test]
fn output_is_deterministic_for_a_fixed_seed() {
    let args = ["find-rec", "--summand", "binomial(n,k)*x^k", "--format", "json", "--seed", "77"];
    let a = abel(&args).1;
    let b = abel(&args).1;
    assert_eq!(a, b);
    let mut seq = args.to_vec();
    seq.push("--sequential");
    assert_eq!(abel(&seq).1, a);
    let other = abel(&["find-rec", "--summand", "binomial(n,k)*x^k", "--format", "json", "--seed", "78"]).1;
    assert_eq!(a.lines().next(), other.lines().next());
}

#[test]
fn text_and_json_verdicts_agree() {
    for sub in [
        vec!["find-diffrec", "--summand", "binomial(n,k)"],
        vec!["certify-em"],
        vec!["report", "--summand", "binomial(n,k)*x^k"],
    ] {
        let mut text = sub.clone();
        text.extend(["--format", "text"]);
        let mut json = sub.clone();
        json.extend(["--format", "json"]);
        let (tc, tout, _) = abel(&text);
        let (jc, jout, _) = abel(&json);
        assert_eq!(tc, jc, "{sub:?}");
        let passes = jout.lines().filter(|l| l.contains("\"verdict\":\"pass\"")).count();
        let fails = jout.lines().filter(|l| l.contains("\"verdict\":\"fail\"")).count();
        assert!(passes > 0 && fails == 0, "{jout}");
        assert!(!tout.contains("FAIL"), "{tout}");
    }
}

#[test]
fn find_diffrec_respects_var() {
    let (code, out, _) = abel(&["find-diffrec", "--summand", "binomial(n,k)", "--var", "s"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("(n^2 - n*s + n*q + 2*n - s + q + 1)*a_{n}(r, s) - q*a_{n+1}(r, s)"), "{out}");
    assert!(!out.contains("d/dr"));
}

#[test]
fn report_reads_like_a_proof() {
    let (code, out, _) = abel(&["report", "--summand", "binomial(n,k)*x^k"]);
    assert_eq!(code, 0);
    let theorem = out.find("Theorem.").unwrap();
    let proof = out.find("Proof.").unwrap();
    assert!(out.starts_with("Let F(n,k) = binomial(n, k)*x^k"));
    assert!(theorem < proof);
    assert!(out.contains("reduces to 0"));
    let (code, out, _) = abel(&["report", "--summand", "binomial(n,k)", "--var", "r"]);
    assert_eq!(code, 0);
    assert!(out.contains("As a function of r (with s fixed)"));
}

#[test]
fn verify_identity_table_ends_with_the_totals() {
    let (code, out, _) = abel(&["verify-identity", "--which", "cauchy2", "--n-max", "2"]);
    assert_eq!(code, 0);
    assert!(out.trim_end().ends_with("10 = 10"), "{out}");
    assert_eq!(out.lines().count(), 5);
    let (code, out, _) = abel(&["verify-identity", "--which", "kalai1", "--n-max", "1", "--p-max", "1", "--format", "json"]);
    assert_eq!(code, 0);
    let last: serde_json::Value = serde_json::from_str(out.lines().last().unwrap()).unwrap();
    assert_eq!((last["n"].as_u64(), last["p"].as_u64(), last["count_ab"].as_u64()), (Some(1), Some(1), Some(1)));
}

#[test]
fn bijection_maps_an_explicit_function() {
    let (code, out, _) = abel(&["bijection", "--f", "2,2"]);
    assert_eq!(code, 0);
    assert!(out.contains("({}, {1,2}) -> ({1}, {2})"), "{out}");
    assert!(out.contains("round trip ok"));
    let (code, out, _) = abel(&["bijection", "--f", "1,1,2", "--n", "2", "--format", "json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(out.trim()).unwrap();
    assert_eq!(v["p"], 1);
    assert_eq!(v["count_ab"], v["count_cd"]);
    let (code, _, _) = abel(&["bijection", "--f", "3,1"]);
    assert_eq!(code, 2);
}

#[test]
fn certify_em_walks_through_the_proof() {
    let (code, out, _) = abel(&["certify-em", "--n-max", "5", "--points", "10"]);
    assert_eq!(code, 0);
    for step in ["Claim.", "Step 1 [pass]", "Step 2 [pass]", "Step 3 [pass]", "Check [pass]"] {
        assert!(out.contains(step), "{step} missing from\n{out}");
    }
    assert!(out.contains("a_{n}(r, s) - s*a_{n-1}(r, s) - (n + r)*a_{n-1}(r+1, s-1)"));
}
