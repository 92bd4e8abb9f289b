//! Multivariate gcd by primitive polynomial remainder sequences.
//!
//! The polynomial is viewed as univariate in its highest-degree variable with
//! coefficients in the remaining ones; contents are computed recursively.

use super::mpoly::MPoly;
use super::rat::Rat;
use super::var::Var;

/// Greatest common divisor over `Q[alphabet]`, returned with coprime integer
/// coefficients and a positive leading coefficient. `gcd(0, 0) = 0`.
pub fn gcd(a: &MPoly, b: &MPoly) -> MPoly {
    if a.is_zero() {
        return b.primitive();
    }
    if b.is_zero() {
        return a.primitive();
    }
    if a.is_constant() || b.is_constant() {
        return MPoly::one();
    }
    if a.len() == 1 || b.len() == 1 {
        // gcd with a monomial is a monomial
        let m = a.monomial_content().gcd(&b.monomial_content());
        return MPoly::monomial(m, 1.into());
    }
    if a == b {
        return a.primitive();
    }

    // A variable present in only one input can be eliminated through the content.
    let (va, vb) = (a.vars(), b.vars());
    if let Some(&v) = va.iter().find(|v| !vb.contains(v)) {
        return gcd(&content_in(a, v), b);
    }
    if let Some(&v) = vb.iter().find(|v| !va.contains(v)) {
        return gcd(a, &content_in(b, v));
    }

    // Pull out common monomial factors first; cheap and keeps the PRS small.
    let ma = a.monomial_content();
    let mb = b.monomial_content();
    if !ma.is_one() || !mb.is_one() {
        let g = ma.gcd(&mb);
        let a1 = a.exact_div(&MPoly::monomial(ma, 1.into())).expect("monomial content");
        let b1 = b.exact_div(&MPoly::monomial(mb, 1.into())).expect("monomial content");
        return &MPoly::monomial(g, 1.into()) * &gcd(&a1, &b1);
    }

    // A variable in which the gcd has degree zero only contributes through the contents.
    if let Some(&v) = va.iter().find(|&&v| image_gcd_is_trivial(a, b, v)) {
        return gcd(&content_in(a, v), &content_in(b, v));
    }

    let main = *va
        .iter()
        .max_by_key(|&&v| (a.degree_in(v).max(b.degree_in(v)), std::cmp::Reverse(v)))
        .expect("nonconstant polynomial has a variable");

    let ca = content_in(a, main);
    let cb = content_in(b, main);
    let g_content = gcd(&ca, &cb);
    let pa = a.exact_div(&ca).expect("content divides");
    let pb = b.exact_div(&cb).expect("content divides");

    let g_prim = primitive_prs(pa.collect_in(main), pb.collect_in(main), main);
    (&g_content * &g_prim).primitive()
}

/// Least common multiple, normalized like [`gcd`].
pub fn lcm(a: &MPoly, b: &MPoly) -> MPoly {
    if a.is_zero() || b.is_zero() {
        return MPoly::zero();
    }
    let g = gcd(a, b);
    (a * &b.exact_div(&g).expect("gcd divides")).primitive()
}

/// gcd of the coefficients of `p` viewed as a polynomial in `v`.
pub fn content_in(p: &MPoly, v: Var) -> MPoly {
    let coeffs = p.collect_in(v);
    gcd_many(coeffs.iter().filter(|c| !c.is_zero()))
}

pub fn gcd_many<'a>(polys: impl IntoIterator<Item = &'a MPoly>) -> MPoly {
    let mut acc = MPoly::zero();
    for p in polys {
        acc = gcd(&acc, p);
        if acc.is_one() {
            break;
        }
    }
    acc
}

/// True when `gcd(a, b)` provably has degree zero in `v`: both inputs are
/// specialized at a point of the other variables that keeps their leading
/// coefficients in `v` alive, and the univariate images are coprime.
fn image_gcd_is_trivial(a: &MPoly, b: &MPoly, v: Var) -> bool {
    let (ca, cb) = (a.collect_in(v), b.collect_in(v));
    for attempt in 0..3i64 {
        let point = |w: Var| Some(Rat::new(101 + 37 * w.index() as i64 + 211 * attempt, 3 + attempt));
        let image = |c: &[MPoly]| -> Vec<Rat> { c.iter().map(|e| e.eval(point).expect("full assignment")).collect() };
        let (ia, ib) = (image(&ca), image(&cb));
        if ia.last().is_some_and(|c| !c.is_zero()) && ib.last().is_some_and(|c| !c.is_zero()) {
            return univariate_gcd_degree(ia, ib) == 0;
        }
    }
    false
}

/// Degree of the gcd of two dense univariate polynomials over `Q`.
fn univariate_gcd_degree(mut a: Vec<Rat>, mut b: Vec<Rat>) -> usize {
    if a.len() < b.len() {
        std::mem::swap(&mut a, &mut b);
    }
    loop {
        while b.last().is_some_and(|c| c.is_zero()) {
            b.pop();
        }
        if b.is_empty() {
            return a.len().saturating_sub(1);
        }
        if b.len() == 1 {
            return 0;
        }
        let inv = b[b.len() - 1].recip();
        while a.len() >= b.len() {
            let f = &a[a.len() - 1] * &inv;
            let shift = a.len() - b.len();
            for (i, c) in b.iter().enumerate() {
                let t = &f * c;
                a[i + shift] -= &t;
            }
            a.pop();
        }
        while a.last().is_some_and(|c| c.is_zero()) {
            a.pop();
        }
        std::mem::swap(&mut a, &mut b);
    }
}

fn degree(p: &[MPoly]) -> usize {
    p.len() - 1
}

fn trim(mut p: Vec<MPoly>) -> Vec<MPoly> {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
    p
}

/// Pseudo-remainder of `a` by `b` (both univariate coefficient lists, nonzero)
/// without the final `lc(b)^d` factor, which the primitive PRS discards anyway.
fn sparse_prem(a: &[MPoly], b: &[MPoly]) -> Vec<MPoly> {
    let db = degree(b);
    let lcb = &b[db];
    let mut r: Vec<MPoly> = a.to_vec();
    while !r.is_empty() && r.len() > db {
        let dr = r.len() - 1;
        let lcr = r[dr].clone();
        let shift = dr - db;
        for c in r.iter_mut() {
            *c = &*c * lcb;
        }
        for (i, bc) in b.iter().enumerate() {
            let t = &lcr * bc;
            r[i + shift] = &r[i + shift] - &t;
        }
        debug_assert!(r[dr].is_zero());
        r = trim(r);
    }
    r
}

fn primitive_part(p: Vec<MPoly>) -> Vec<MPoly> {
    let c = gcd_many(p.iter().filter(|c| !c.is_zero()));
    let p: Vec<MPoly> = if c.is_one() {
        p
    } else {
        p.into_iter().map(|x| x.exact_div(&c).expect("content divides")).collect()
    };
    // strip the rational content shared by all coefficients
    let mut rc = Rat::zero();
    for x in &p {
        rc = rc.gcd(&x.content());
    }
    if rc.is_zero() || rc.is_one() {
        p
    } else {
        let inv = rc.recip();
        p.into_iter().map(|x| x.scale(&inv)).collect()
    }
}

fn primitive_prs(a: Vec<MPoly>, b: Vec<MPoly>, v: Var) -> MPoly {
    let (mut f1, mut f2) = if a.len() >= b.len() { (a, b) } else { (b, a) };
    loop {
        if f2.len() == 1 {
            return MPoly::one();
        }
        let r = sparse_prem(&f1, &f2);
        if r.is_empty() {
            return MPoly::from_coeffs_in(v, &f2).primitive();
        }
        f1 = f2;
        f2 = primitive_part(r);
    }
}
