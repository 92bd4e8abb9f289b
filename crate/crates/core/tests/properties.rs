use abel_core::algebra::{MPoly, Monomial, Rat, RatFunc, Var};
use abel_core::celine::{ShiftRecurrence, ShiftTerm};
use abel_core::diffrec::{DiffRecurrence, DiffTerm};
use abel_core::linsolve::{nullspace, RFMatrix};
use abel_core::summand::{parse_term, AbelSummand};
use proptest::prelude::*;

// Independent reference arithmetic, written without the library's evaluators.

fn fact(m: i64) -> Rat {
    (1..=m).fold(Rat::one(), |acc, i| acc * Rat::from(i))
}

fn choose(a: i64, b: i64) -> Rat {
    if b < 0 || b > a {
        Rat::zero()
    } else {
        fact(a) * fact(b).recip() * fact(a - b).recip()
    }
}

/// The three reference terms, evaluated directly for `0 ≤ k ≤ n`.
fn reference_term(which: usize, n: i64, k: i64, x: &Rat) -> Rat {
    match which {
        0 => choose(n, k),
        1 => fact(k).pow(2).recip() * fact(n - k).recip() * x.pow(k),
        _ => choose(n, k) * choose(n + k, k) * x.pow(k),
    }
}

const SOURCES: [&str; 3] = ["binomial(n,k)", "1/(k!^2*(n-k)!)*x^k", "binomial(n,k)*binomial(n+k,k)*x^k"];

fn at(n: i64, k: i64, x: &Rat, r: &Rat, s: &Rat) -> impl Fn(Var) -> Option<Rat> {
    let (n, k, x, r, s) = (Rat::from(n), Rat::from(k), x.clone(), r.clone(), s.clone());
    move |v| match v {
        Var::N => Some(n.clone()),
        Var::K => Some(k.clone()),
        Var::X => Some(x.clone()),
        Var::R => Some(r.clone()),
        Var::S => Some(s.clone()),
        _ => None,
    }
}

fn small_rat() -> impl Strategy<Value = Rat> {
    (-40i64..=40, 1i64..=9).prop_map(|(a, b)| Rat::new(a, b) + Rat::new(1, 97))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn shift_quotient_matches_direct_evaluation(
        which in 0usize..3, n in 0i64..9, kf in 0.0f64..1.0, dn in 0i64..3, dk in -2i64..3, x in small_rat(),
    ) {
        let k = ((n as f64) * kf).round() as i64;
        let (n2, k2) = (n + dn, k + dk);
        prop_assume!(k2 >= 0 && k2 <= n2 && !x.is_zero());
        let t = parse_term(SOURCES[which]).unwrap();
        let ratio = t.shift_ratio(dn, dk);
        let Ok(value) = ratio.eval(at(n, k, &x, &Rat::zero(), &Rat::zero())) else { return Ok(()) };
        let direct = reference_term(which, n2, k2, &x) * reference_term(which, n, k, &x).recip();
        prop_assert_eq!(value, direct);
    }

    #[test]
    fn abel_shift_quotient_matches_summand_values(
        which in 0usize..3, n in 3i64..8, kf in 0.0f64..1.0, i in 0i64..4, j in 0i64..4,
        r in small_rat(), s in small_rat(), x in small_rat(), p in -2i64..3, q in -2i64..3,
    ) {
        let k = j + (((n - j) as f64) * kf).round() as i64;
        prop_assume!(k <= n);
        let summand = AbelSummand::parse(SOURCES[which]).unwrap();
        let full = |n: i64, k: i64, r: &Rat, s: &Rat| {
            let kernel_x = if which == 0 { x.pow(k) } else { Rat::one() };
            reference_term(which, n, k, &x)
                * (r + &Rat::from(k)).pow(k - 1 + p)
                * (s - &Rat::from(k)).pow(n - k + q)
                * kernel_x
        };
        let (rj, sj) = (&r + &Rat::from(j), &s - &Rat::from(j));
        let direct = full(n + i, k - j, &rj, &sj) * full(n, k, &r, &s).recip();
        let ratio = summand.abel_shift_ratio(i, j).unwrap();
        let Ok(value) = ratio.eval(at(n, k, &x, &r, &s)) else { return Ok(()) };
        prop_assert_eq!(value, direct);
    }

    #[test]
    fn first_derivative_follows_the_chain_rule(which in 0usize..3, j in 0i64..3, use_r in any::<bool>()) {
        let summand = AbelSummand::parse(SOURCES[which]).unwrap();
        let var = if use_r { Var::R } else { Var::S };
        let d0 = summand.kernel_derivative_ratio(var, 0, j).unwrap();
        let d1 = summand.kernel_derivative_ratio(var, 1, j).unwrap();
        let log_derivative = if use_r {
            RatFunc::new(abel_core::algebra::poly("k - 1 + p"), abel_core::algebra::poly("r + k")).unwrap()
        } else {
            RatFunc::new(abel_core::algebra::poly("n - k + q"), abel_core::algebra::poly("s - k")).unwrap()
        };
        let chain = &d0.derivative(var) + &(&d0 * &log_derivative);
        prop_assert_eq!(d1, chain);
    }

    #[test]
    fn abel_identity_holds_at_random_points(r in small_rat(), s in small_rat()) {
        let summand = abel_core::certify::abel_binomial_summand();
        for n in 0..=8i64 {
            let pt = abel_core::summand::EvalPoint::new(r.clone(), s.clone());
            let expected = (&r + &s).pow(n) * r.recip();
            let direct: Rat = (0..=n)
                .map(|k| choose(n, k) * (&r + &Rat::from(k)).pow(k - 1) * (&s - &Rat::from(k)).pow(n - k))
                .sum();
            prop_assert_eq!(&direct, &expected);
            prop_assert_eq!(summand.eval_abel_sum(n, &pt).unwrap(), expected);
        }
    }
}

fn poly_strategy() -> impl Strategy<Value = MPoly> {
    prop::collection::vec((-3i64..=3, 0u16..2, 0u16..2, 0u16..2), 0..4).prop_map(|terms| {
        MPoly::from_terms(terms.into_iter().map(|(c, a, b, d)| {
            let m = Monomial::var(Var::N, a).mul(&Monomial::var(Var::R, b)).mul(&Monomial::var(Var::S, d));
            (m, Rat::from(c))
        }))
    })
}

fn matrix_strategy() -> impl Strategy<Value = Vec<Vec<MPoly>>> {
    (1usize..4, 2usize..5).prop_flat_map(|(rows, cols)| {
        prop::collection::vec(prop::collection::vec(poly_strategy(), cols..=cols), rows..=rows)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn nullspace_vectors_annihilate_exactly(rows in matrix_strategy()) {
        let ncols = rows[0].len();
        let nrows = rows.len();
        let m = RFMatrix::<usize>::from_polys(rows.clone());
        let basis = nullspace(&m);
        prop_assert!(basis.len() >= ncols.saturating_sub(nrows));
        for v in &basis {
            prop_assert!(v.iter().any(|e| !e.is_zero()));
            for row in &rows {
                let dot = row.iter().zip(v).fold(MPoly::zero(), |acc, (a, b)| &acc + &(a * b));
                prop_assert!(dot.is_zero());
            }
        }
    }

    #[test]
    fn recurrence_json_is_byte_stable(
        coeffs in prop::collection::vec(poly_strategy(), 2..6), shifts in prop::collection::vec((0i64..4, -2i64..3), 2..6),
    ) {
        let terms: Vec<ShiftTerm> = coeffs.iter().zip(&shifts).map(|(c, &(dn, dr))| ShiftTerm { dn, dr, coeff: c.clone() }).collect();
        let rec = ShiftRecurrence::new(terms);
        let json = rec.to_json();
        let back = ShiftRecurrence::from_json(&json).unwrap();
        prop_assert_eq!(&back, &rec);
        prop_assert_eq!(back.to_json(), json);

        let dterms: Vec<DiffTerm> = coeffs.iter().zip(&shifts).map(|(c, &(dn, o))| DiffTerm { order: o.unsigned_abs() as u32, dn, coeff: c.clone() }).collect();
        let drec = DiffRecurrence::new(Var::R, dterms);
        let json = drec.to_json();
        let back = DiffRecurrence::from_json(&json).unwrap();
        prop_assert_eq!(&back, &drec);
        prop_assert_eq!(back.to_json(), json);
    }
}

#[test]
fn factorwise_and_telescoped_quotients_agree() {
    for src in SOURCES {
        let t = parse_term(src).unwrap();
        for dn in -2..=2 {
            for dk in -2..=2 {
                assert_eq!(t.shift_ratio(dn, dk), t.factorwise_shift_ratio(dn, dk), "{src} {dn} {dk}");
            }
        }
    }
}
