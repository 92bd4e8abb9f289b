//! Sparse multivariate polynomials with rational coefficients.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::rat::Rat;
use super::var::{Var, NVARS};

/// An exponent vector over the alphabet. The derived ordering compares total
/// degree first and then exponents in alphabet order, i.e. graded lex.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Monomial {
    deg: u32,
    exps: [u16; NVARS],
}

impl Monomial {
    pub fn one() -> Monomial {
        Monomial::default()
    }

    pub fn var(v: Var, e: u16) -> Monomial {
        let mut m = Monomial::default();
        m.exps[v.index()] = e;
        m.deg = e as u32;
        m
    }

    pub fn from_exps(exps: [u16; NVARS]) -> Monomial {
        let deg = exps.iter().map(|&e| e as u32).sum();
        Monomial { deg, exps }
    }

    pub fn exp(&self, v: Var) -> u16 {
        self.exps[v.index()]
    }

    pub fn exps(&self) -> &[u16; NVARS] {
        &self.exps
    }

    pub fn degree(&self) -> u32 {
        self.deg
    }

    pub fn is_one(&self) -> bool {
        self.deg == 0
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut exps = self.exps;
        for (a, b) in exps.iter_mut().zip(other.exps.iter()) {
            *a += *b;
        }
        Monomial { deg: self.deg + other.deg, exps }
    }

    /// `self / other` when `other` divides `self`.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        let mut exps = self.exps;
        for (a, b) in exps.iter_mut().zip(other.exps.iter()) {
            *a = a.checked_sub(*b)?;
        }
        Some(Monomial { deg: self.deg - other.deg, exps })
    }

    pub fn gcd(&self, other: &Monomial) -> Monomial {
        let mut exps = self.exps;
        for (a, b) in exps.iter_mut().zip(other.exps.iter()) {
            *a = (*a).min(*b);
        }
        Monomial::from_exps(exps)
    }

    pub fn with_exp(&self, v: Var, e: u16) -> Monomial {
        let mut exps = self.exps;
        exps[v.index()] = e;
        Monomial::from_exps(exps)
    }

    fn render(&self, f: &mut fmt::Formatter<'_>, latex: bool) -> fmt::Result {
        let mut first = true;
        for v in Var::all() {
            let e = self.exp(v);
            if e == 0 {
                continue;
            }
            if !first {
                f.write_str(if latex { " " } else { "*" })?;
            }
            first = false;
            if latex {
                match v.name().strip_prefix('w') {
                    Some(idx) => write!(f, "w_{{{idx}}}")?,
                    None => write!(f, "{v}")?,
                }
                if e > 1 {
                    write!(f, "^{{{e}}}")?;
                }
            } else {
                write!(f, "{v}")?;
                if e > 1 {
                    write!(f, "^{e}")?;
                }
            }
        }
        Ok(())
    }
}

/// A polynomial stored as a list of terms sorted by decreasing monomial.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct MPoly {
    terms: Vec<(Monomial, Rat)>,
}

impl MPoly {
    pub fn zero() -> MPoly {
        MPoly { terms: Vec::new() }
    }

    pub fn one() -> MPoly {
        MPoly::constant(Rat::one())
    }

    pub fn constant(c: Rat) -> MPoly {
        if c.is_zero() {
            MPoly::zero()
        } else {
            MPoly { terms: vec![(Monomial::one(), c)] }
        }
    }

    pub fn int(c: i64) -> MPoly {
        MPoly::constant(Rat::from(c))
    }

    pub fn var(v: Var) -> MPoly {
        MPoly { terms: vec![(Monomial::var(v, 1), Rat::one())] }
    }

    pub fn monomial(m: Monomial, c: Rat) -> MPoly {
        if c.is_zero() {
            MPoly::zero()
        } else {
            MPoly { terms: vec![(m, c)] }
        }
    }

    /// Builds a polynomial from arbitrary (possibly repeated or zero) terms.
    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, Rat)>) -> MPoly {
        let mut acc: HashMap<Monomial, Rat> = HashMap::new();
        for (m, c) in terms {
            *acc.entry(m).or_default() += &c;
        }
        MPoly::from_map(acc)
    }

    fn from_map(acc: HashMap<Monomial, Rat>) -> MPoly {
        let mut terms: Vec<_> = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        terms.sort_unstable_by(|a, b| b.0.cmp(&a.0));
        MPoly { terms }
    }

    /// `Σ coeffs[i] * v^i` with `coeffs` constants.
    pub fn univariate(v: Var, coeffs: &[Rat]) -> MPoly {
        MPoly::from_terms(coeffs.iter().enumerate().map(|(i, c)| (Monomial::var(v, i as u16), c.clone())))
    }

    pub fn terms(&self) -> &[(Monomial, Rat)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0.is_one() && self.terms[0].1.is_one()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.terms[0].0.is_one())
    }

    /// The constant value, if the polynomial is constant.
    pub fn as_constant(&self) -> Option<Rat> {
        match self.terms.as_slice() {
            [] => Some(Rat::zero()),
            [(m, c)] if m.is_one() => Some(c.clone()),
            _ => None,
        }
    }

    pub fn leading(&self) -> Option<&(Monomial, Rat)> {
        self.terms.first()
    }

    pub fn leading_coeff(&self) -> Rat {
        self.terms.first().map(|t| t.1.clone()).unwrap_or_default()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.first().map(|t| t.0.degree()).unwrap_or(0)
    }

    pub fn degree_in(&self, v: Var) -> u16 {
        self.terms.iter().map(|(m, _)| m.exp(v)).max().unwrap_or(0)
    }

    pub fn contains_var(&self, v: Var) -> bool {
        self.terms.iter().any(|(m, _)| m.exp(v) > 0)
    }

    /// Variables that occur, in alphabet order.
    pub fn vars(&self) -> Vec<Var> {
        let mut seen = [false; NVARS];
        for (m, _) in &self.terms {
            for (i, &e) in m.exps().iter().enumerate() {
                seen[i] |= e > 0;
            }
        }
        Var::all().filter(|v| seen[v.index()]).collect()
    }

    pub fn scale(&self, c: &Rat) -> MPoly {
        if c.is_zero() {
            return MPoly::zero();
        }
        MPoly { terms: self.terms.iter().map(|(m, a)| (*m, a * c)).collect() }
    }

    pub fn mul_monomial(&self, mono: &Monomial, c: &Rat) -> MPoly {
        if c.is_zero() {
            return MPoly::zero();
        }
        MPoly { terms: self.terms.iter().map(|(m, a)| (m.mul(mono), a * c)).collect() }
    }

    pub fn pow(&self, e: u32) -> MPoly {
        let mut result = MPoly::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// Rational content: the nonnegative rational `c` such that `self / c`
    /// has coprime integer coefficients.
    pub fn content(&self) -> Rat {
        let mut num = BigInt::zero();
        let mut den = BigInt::one();
        for (_, c) in &self.terms {
            num = num.gcd(c.numer());
            den = den.lcm(c.denom());
        }
        if num.is_zero() {
            Rat::zero()
        } else {
            Rat::new(num, den)
        }
    }

    /// Integer-primitive form with a positive leading coefficient.
    pub fn primitive(&self) -> MPoly {
        if self.is_zero() {
            return MPoly::zero();
        }
        let mut c = self.content();
        if self.leading_coeff().is_negative() {
            c = -c;
        }
        self.scale(&c.recip())
    }

    /// Coefficients of `self` as a polynomial in `v`: `self = Σ out[m] * v^m`,
    /// with every `out[m]` free of `v`. The zero polynomial yields an empty list.
    pub fn collect_in(&self, v: Var) -> Vec<MPoly> {
        if self.is_zero() {
            return Vec::new();
        }
        let deg = self.degree_in(v) as usize;
        let mut buckets: Vec<Vec<(Monomial, Rat)>> = vec![Vec::new(); deg + 1];
        for (m, c) in &self.terms {
            buckets[m.exp(v) as usize].push((m.with_exp(v, 0), c.clone()));
        }
        buckets
            .into_iter()
            .map(|mut t| {
                // removing a variable from a sorted list keeps it sorted only per
                // fixed exponent of that variable, so resort
                t.sort_unstable_by(|a, b| b.0.cmp(&a.0));
                MPoly { terms: t }
            })
            .collect()
    }

    /// Inverse of [`MPoly::collect_in`].
    pub fn from_coeffs_in(v: Var, coeffs: &[MPoly]) -> MPoly {
        let mut terms = Vec::new();
        for (i, c) in coeffs.iter().enumerate() {
            let vm = Monomial::var(v, i as u16);
            terms.extend(c.terms.iter().map(|(m, a)| (m.mul(&vm), a.clone())));
        }
        MPoly::from_terms(terms)
    }

    pub fn derivative(&self, v: Var) -> MPoly {
        MPoly::from_terms(self.terms.iter().filter(|(m, _)| m.exp(v) > 0).map(|(m, c)| {
            let e = m.exp(v);
            (m.with_exp(v, e - 1), c * &Rat::from(e as i64))
        }))
    }

    /// Replace `v` by the polynomial `value`.
    pub fn substitute(&self, v: Var, value: &MPoly) -> MPoly {
        if !self.contains_var(v) {
            return self.clone();
        }
        let coeffs = self.collect_in(v);
        let mut acc = MPoly::zero();
        for c in coeffs.iter().rev() {
            acc = &(&acc * value) + c;
        }
        acc
    }

    /// Replace `v` by `v + delta`.
    pub fn shift(&self, v: Var, delta: i64) -> MPoly {
        if delta == 0 {
            return self.clone();
        }
        self.substitute(v, &(&MPoly::var(v) + &MPoly::int(delta)))
    }

    /// Replace `v` by a rational value.
    pub fn subs_value(&self, v: Var, value: &Rat) -> MPoly {
        if !self.contains_var(v) {
            return self.clone();
        }
        let max = self.degree_in(v) as i64;
        let powers: Vec<Rat> = (0..=max).map(|e| value.pow(e)).collect();
        MPoly::from_terms(
            self.terms.iter().map(|(m, c)| (m.with_exp(v, 0), c * &powers[m.exp(v) as usize])),
        )
    }

    /// Full evaluation; `None` when the assignment misses a variable that occurs.
    pub fn eval(&self, assign: impl Fn(Var) -> Option<Rat>) -> Option<Rat> {
        let mut values: [Option<Rat>; NVARS] = Default::default();
        for v in self.vars() {
            values[v.index()] = Some(assign(v)?);
        }
        let mut total = Rat::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, &e) in m.exps().iter().enumerate() {
                if e > 0 {
                    t *= &values[i].as_ref().unwrap().pow(e as i64);
                }
            }
            total += &t;
        }
        Some(total)
    }

    /// Multivariate division with respect to the graded-lex order.
    pub fn div_rem(&self, divisor: &MPoly) -> (MPoly, MPoly) {
        assert!(!divisor.is_zero(), "division by the zero polynomial");
        if let Some(c) = divisor.as_constant() {
            return (self.scale(&c.recip()), MPoly::zero());
        }
        let (lm, lc) = divisor.terms[0].clone();
        let lc_inv = lc.recip();
        let mut quot: Vec<(Monomial, Rat)> = Vec::new();
        let mut rem: Vec<(Monomial, Rat)> = Vec::new();
        let mut p = self.clone();
        while let Some((m, c)) = p.terms.first().cloned() {
            match m.div(&lm) {
                Some(qm) => {
                    let qc = &c * &lc_inv;
                    p = &p - &divisor.mul_monomial(&qm, &qc);
                    quot.push((qm, qc));
                }
                None => {
                    rem.push((m, c));
                    p.terms.remove(0);
                }
            }
        }
        (MPoly::from_terms(quot), MPoly::from_terms(rem))
    }

    /// `self / divisor` if the division is exact.
    pub fn exact_div(&self, divisor: &MPoly) -> Option<MPoly> {
        if self.is_zero() {
            return Some(MPoly::zero());
        }
        if let Some(c) = divisor.as_constant() {
            assert!(!c.is_zero(), "division by the zero polynomial");
            return Some(self.scale(&c.recip()));
        }
        // quick degree screen
        for v in divisor.vars() {
            if divisor.degree_in(v) > self.degree_in(v) {
                return None;
            }
        }
        let (lm, lc) = divisor.terms[0].clone();
        let lc_inv = lc.recip();
        let mut quot: Vec<(Monomial, Rat)> = Vec::new();
        let mut p = self.clone();
        while let Some((m, c)) = p.terms.first().cloned() {
            let qm = m.div(&lm)?;
            let qc = &c * &lc_inv;
            p = &p - &divisor.mul_monomial(&qm, &qc);
            quot.push((qm, qc));
        }
        Some(MPoly { terms: quot })
    }

    /// Lowest exponent of every variable across all terms.
    pub fn monomial_content(&self) -> Monomial {
        let mut it = self.terms.iter();
        match it.next() {
            None => Monomial::one(),
            Some((first, _)) => it.fold(*first, |acc, (m, _)| acc.gcd(m)),
        }
    }

    pub fn render_latex(&self) -> String {
        struct L<'a>(&'a MPoly);
        impl fmt::Display for L<'_> {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                self.0.render(f, true)
            }
        }
        L(self).to_string()
    }

    fn render(&self, f: &mut fmt::Formatter<'_>, latex: bool) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            match (i == 0, neg) {
                (true, true) => f.write_str("-")?,
                (true, false) => {}
                (false, true) => f.write_str(" - ")?,
                (false, false) => f.write_str(" + ")?,
            }
            if m.is_one() {
                write_coeff(f, &mag, latex)?;
            } else {
                if !mag.is_one() {
                    write_coeff(f, &mag, latex)?;
                    if !latex {
                        f.write_str("*")?;
                    } else {
                        f.write_str(" ")?;
                    }
                }
                m.render(f, latex)?;
            }
        }
        Ok(())
    }
}

fn write_coeff(f: &mut fmt::Formatter<'_>, c: &Rat, latex: bool) -> fmt::Result {
    if latex && !c.is_integer() {
        write!(f, "\\frac{{{}}}{{{}}}", c.numer(), c.denom())
    } else {
        write!(f, "{c}")
    }
}

impl fmt::Display for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.render(f, false)
    }
}

impl fmt::Debug for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.render(f, false)
    }
}

impl Add<&MPoly> for &MPoly {
    type Output = MPoly;

    fn add(self, rhs: &MPoly) -> MPoly {
        let (a, b) = (&self.terms, &rhs.terms);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Greater => {
                    out.push(a[i].clone());
                    i += 1;
                }
                std::cmp::Ordering::Less => {
                    out.push(b[j].clone());
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let c = &a[i].1 + &b[j].1;
                    if !c.is_zero() {
                        out.push((a[i].0, c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        MPoly { terms: out }
    }
}

impl Neg for &MPoly {
    type Output = MPoly;

    fn neg(self) -> MPoly {
        MPoly { terms: self.terms.iter().map(|(m, c)| (*m, -c)).collect() }
    }
}

impl Neg for MPoly {
    type Output = MPoly;

    fn neg(self) -> MPoly {
        -&self
    }
}

impl Sub<&MPoly> for &MPoly {
    type Output = MPoly;

    fn sub(self, rhs: &MPoly) -> MPoly {
        self + &(-rhs)
    }
}

impl Mul<&MPoly> for &MPoly {
    type Output = MPoly;

    fn mul(self, rhs: &MPoly) -> MPoly {
        if self.is_zero() || rhs.is_zero() {
            return MPoly::zero();
        }
        if self.terms.len() == 1 {
            let (m, c) = &self.terms[0];
            return rhs.mul_monomial(m, c);
        }
        if rhs.terms.len() == 1 {
            let (m, c) = &rhs.terms[0];
            return self.mul_monomial(m, c);
        }
        let mut acc: HashMap<Monomial, Rat> = HashMap::with_capacity(self.len() * rhs.len());
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                *acc.entry(ma.mul(mb)).or_default() += &(ca * cb);
            }
        }
        MPoly::from_map(acc)
    }
}

macro_rules! owned_ops {
    ($tr:ident, $m:ident) => {
        impl $tr<MPoly> for MPoly {
            type Output = MPoly;
            fn $m(self, rhs: MPoly) -> MPoly {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&MPoly> for MPoly {
            type Output = MPoly;
            fn $m(self, rhs: &MPoly) -> MPoly {
                (&self).$m(rhs)
            }
        }
        impl $tr<MPoly> for &MPoly {
            type Output = MPoly;
            fn $m(self, rhs: MPoly) -> MPoly {
                self.$m(&rhs)
            }
        }
    };
}

owned_ops!(Add, add);
owned_ops!(Sub, sub);
owned_ops!(Mul, mul);

impl From<Var> for MPoly {
    fn from(v: Var) -> MPoly {
        MPoly::var(v)
    }
}

impl From<i64> for MPoly {
    fn from(c: i64) -> MPoly {
        MPoly::int(c)
    }
}

impl From<Rat> for MPoly {
    fn from(c: Rat) -> MPoly {
        MPoly::constant(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: Var) -> MPoly {
        MPoly::var(x)
    }

    #[test]
    fn difference_of_squares() {
        let k = v(Var::K);
        let a = &k + &MPoly::int(1);
        let b = &k - &MPoly::int(1);
        assert_eq!((&a * &b).to_string(), "k^2 - 1");
    }

    #[test]
    fn additive_identity_and_empty_power() {
        let p = v(Var::P);
        assert_eq!(&p + &MPoly::zero(), p);
        let nr = &v(Var::N) + &v(Var::R);
        assert_eq!(nr.pow(0), MPoly::one());
    }

    #[test]
    fn graded_lex_rendering() {
        let n = v(Var::N);
        let k = v(Var::K);
        let poly = &(&(&k * &k) * &n) + &(&n * &MPoly::constant(Rat::new(-3, 2))) + MPoly::int(4) + &k.pow(2);
        assert_eq!(poly.to_string(), "n*k^2 + k^2 - 3/2*n + 4");
        assert_eq!(poly.render_latex(), "n k^{2} + k^{2} - \\frac{3}{2} n + 4");
    }

    #[test]
    fn collect_in_examples() {
        let (n, k, r, s) = (v(Var::N), v(Var::K), v(Var::R), v(Var::S));
        let pol = &(&n * &k.pow(2)) + &(&r * &k) + &s;
        assert_eq!(pol.collect_in(Var::K), vec![s, r, n]);
        assert_eq!(MPoly::int(5).collect_in(Var::K), vec![MPoly::int(5)]);
        assert!(MPoly::zero().collect_in(Var::K).is_empty());
    }

    #[test]
    fn division() {
        let k = v(Var::K);
        let n = v(Var::N);
        let a = &(&k + &n) * &(&k - &MPoly::int(2));
        let b = &k + &n;
        assert_eq!(a.exact_div(&b).unwrap(), &k - &MPoly::int(2));
        assert!(a.exact_div(&(&k + &MPoly::int(7))).is_none());
        let (q, rem) = (&a + &MPoly::int(3)).div_rem(&b);
        assert_eq!(&(&q * &b) + &rem, &a + &MPoly::int(3));
    }

    #[test]
    fn substitution_and_derivative() {
        let r = v(Var::R);
        let s = v(Var::S);
        let p = &r.pow(2) * &s;
        assert_eq!(p.derivative(Var::R), &(&r * &s) * &MPoly::int(2));
        assert_eq!(p.shift(Var::R, 1), &(&r + &MPoly::int(1)).pow(2) * &s);
        assert_eq!(p.subs_value(Var::R, &Rat::new(1, 2)), s.scale(&Rat::new(1, 4)));
    }
}
