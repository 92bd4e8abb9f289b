//! Hypergeometric terms as factor lists with cached shift quotients.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::algebra::{MPoly, Rat, RatFunc, Var};
use crate::error::EvalError;

/// Integer-affine form `a*n + b*k + c`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Affine {
    pub n: i64,
    pub k: i64,
    pub c: i64,
}

impl Affine {
    pub const fn new(n: i64, k: i64, c: i64) -> Affine {
        Affine { n, k, c }
    }

    pub fn constant(c: i64) -> Affine {
        Affine { n: 0, k: 0, c }
    }

    pub fn is_constant(&self) -> bool {
        self.n == 0 && self.k == 0
    }

    pub fn eval(&self, n: i64, k: i64) -> i64 {
        self.n * n + self.k * k + self.c
    }

    /// Change of value under `n -> n+dn, k -> k+dk`.
    pub fn delta(&self, dn: i64, dk: i64) -> i64 {
        self.n * dn + self.k * dk
    }

    pub fn to_poly(&self) -> MPoly {
        &(&MPoly::var(Var::N) * &MPoly::int(self.n)) + &(&(&MPoly::var(Var::K) * &MPoly::int(self.k)) + &MPoly::int(self.c))
    }

    pub fn add(&self, o: &Affine) -> Affine {
        Affine { n: self.n + o.n, k: self.k + o.k, c: self.c + o.c }
    }

    pub fn sub(&self, o: &Affine) -> Affine {
        Affine { n: self.n - o.n, k: self.k - o.k, c: self.c - o.c }
    }

    pub fn scale(&self, m: i64) -> Affine {
        Affine { n: self.n * m, k: self.k * m, c: self.c * m }
    }
}

impl fmt::Display for Affine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_poly())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum PowerBase {
    X,
    Const(Rat),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum FactorKind {
    Binomial(Affine, Affine),
    Factorial(Affine),
    /// A bare affine factor such as `(n+1)`.
    Linear(Affine),
    Power { base: PowerBase, exponent: Affine },
    Constant(Rat),
}

/// One factor of a hypergeometric term, raised to an integer power.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HyperFactor {
    pub kind: FactorKind,
    pub exp: i64,
}

/// `(L + delta)! / L!` as a rational function.
fn factorial_ratio(l: &Affine, delta: i64) -> RatFunc {
    let lp = l.to_poly();
    let mut num = MPoly::one();
    let mut den = MPoly::one();
    if delta > 0 {
        for t in 1..=delta {
            num = &num * &(&lp + &MPoly::int(t));
        }
    } else {
        for t in 0..-delta {
            den = &den * &(&lp - &MPoly::int(t));
        }
    }
    RatFunc::new(num, den).expect("nonzero product")
}

impl HyperFactor {
    pub fn new(kind: FactorKind, exp: i64) -> HyperFactor {
        HyperFactor { kind, exp }
    }

    /// `factor(n+dn, k+dk) / factor(n, k)` computed directly from the factor's
    /// definition.
    pub fn shift_ratio(&self, dn: i64, dk: i64) -> RatFunc {
        let base = match &self.kind {
            FactorKind::Factorial(l) => factorial_ratio(l, l.delta(dn, dk)),
            FactorKind::Binomial(a, b) => {
                let d = a.sub(b);
                let top = factorial_ratio(a, a.delta(dn, dk));
                let bottom = &factorial_ratio(b, b.delta(dn, dk)) * &factorial_ratio(&d, d.delta(dn, dk));
                &top / &bottom
            }
            FactorKind::Linear(l) => {
                let lp = l.to_poly();
                RatFunc::new(&lp + &MPoly::int(l.delta(dn, dk)), lp).expect("nonzero linear factor")
            }
            FactorKind::Power { base, exponent } => {
                let d = exponent.delta(dn, dk);
                match base {
                    PowerBase::X => RatFunc::var(Var::X).pow(d),
                    PowerBase::Const(c) => RatFunc::constant(c.pow(d)),
                }
            }
            FactorKind::Constant(_) => RatFunc::one(),
        };
        base.pow(self.exp)
    }

    /// Exact value at integer `(n, k)` with `x` given. Reciprocals of
    /// factorials at negative integers are zero.
    pub fn eval(&self, n: i64, k: i64, x: &Rat) -> Result<Rat, EvalError> {
        let undefined = |what: &str| EvalError::Undefined { n, k, what: what.to_string() };
        let raw = match &self.kind {
            FactorKind::Factorial(l) => {
                let v = l.eval(n, k);
                if v < 0 {
                    if self.exp < 0 {
                        return Ok(Rat::zero());
                    }
                    return Err(undefined("factorial of a negative integer"));
                }
                Rat::from_int(factorial(v as u64))
            }
            FactorKind::Binomial(a, b) => Rat::from_int(binomial(a.eval(n, k), b.eval(n, k))),
            FactorKind::Linear(l) => Rat::from(l.eval(n, k)),
            FactorKind::Power { base, exponent } => {
                let e = exponent.eval(n, k);
                let b = match base {
                    PowerBase::X => x.clone(),
                    PowerBase::Const(c) => c.clone(),
                };
                if b.is_zero() && e < 0 {
                    return Err(undefined("zero base with negative exponent"));
                }
                b.pow(e)
            }
            FactorKind::Constant(c) => c.clone(),
        };
        if raw.is_zero() && self.exp < 0 {
            return Err(undefined("division by a vanishing factor"));
        }
        Ok(raw.pow(self.exp))
    }

    pub fn mentions_x(&self) -> bool {
        matches!(self.kind, FactorKind::Power { base: PowerBase::X, .. })
    }
}

/// Parenthesize compound affine forms.
fn wrap(l: &Affine) -> String {
    let t = l.to_string();
    if t.contains(' ') || t.starts_with('-') {
        format!("({t})")
    } else {
        t
    }
}

impl fmt::Display for HyperFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let body = match &self.kind {
            FactorKind::Binomial(a, b) => format!("binomial({a}, {b})"),
            FactorKind::Factorial(l) => format!("{}!", wrap(l)),
            FactorKind::Linear(l) => format!("({l})"),
            FactorKind::Power { base, exponent } => {
                let b = match base {
                    PowerBase::X => "x".to_string(),
                    PowerBase::Const(c) if c.is_integer() && !c.is_negative() => c.to_string(),
                    PowerBase::Const(c) => format!("({c})"),
                };
                if *exponent == Affine::constant(1) {
                    b
                } else {
                    format!("{b}^{}", wrap(exponent))
                }
            }
            FactorKind::Constant(c) => format!("({c})"),
        };
        if self.exp == 1 {
            write!(f, "{body}")
        } else {
            write!(f, "{body}^({})", self.exp)
        }
    }
}

pub fn factorial(m: u64) -> BigInt {
    (1..=m).fold(BigInt::one(), |acc, i| acc * i)
}

/// Integer binomial coefficient, extended by `C(a, b) = 0` for `b < 0` and by
/// the falling-factorial formula for negative `a`.
pub fn binomial(a: i64, b: i64) -> BigInt {
    if b < 0 || (a >= 0 && b > a) {
        return BigInt::zero();
    }
    let mut num = BigInt::one();
    for t in 0..b {
        num *= a - t;
    }
    num / factorial(b as u64)
}

/// A hypergeometric term `F(n,k)` with its shift quotients
/// `rho_n = F(n+1,k)/F(n,k)` and `rho_k = F(n,k+1)/F(n,k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct HyperTerm {
    factors: Vec<HyperFactor>,
    rho_n: RatFunc,
    rho_k: RatFunc,
}

impl HyperTerm {
    pub fn from_factors(factors: Vec<HyperFactor>) -> HyperTerm {
        let prod = |dn, dk| factors.iter().fold(RatFunc::one(), |acc, f| &acc * &f.shift_ratio(dn, dk));
        let rho_n = prod(1, 0);
        let rho_k = prod(0, 1);
        HyperTerm { factors, rho_n, rho_k }
    }

    /// The constant term `F = 1`.
    pub fn unit() -> HyperTerm {
        HyperTerm::from_factors(Vec::new())
    }

    pub fn factors(&self) -> &[HyperFactor] {
        &self.factors
    }

    pub fn rho_n(&self) -> &RatFunc {
        &self.rho_n
    }

    pub fn rho_k(&self) -> &RatFunc {
        &self.rho_k
    }

    pub fn mentions_x(&self) -> bool {
        self.factors.iter().any(HyperFactor::mentions_x)
    }

    /// `F(n+dn, k+dk) / F(n, k)`, telescoped from the two unit quotients:
    /// first walk `n`, then walk `k` at the shifted `n`.
    pub fn shift_ratio(&self, dn: i64, dk: i64) -> RatFunc {
        let mut acc = RatFunc::one();
        if dn >= 0 {
            for t in 0..dn {
                acc = &acc * &self.rho_n.shift(Var::N, t);
            }
        } else {
            for t in 1..=-dn {
                acc = &acc / &self.rho_n.shift(Var::N, -t);
            }
        }
        let rho_k = self.rho_k.shift(Var::N, dn);
        if dk >= 0 {
            for u in 0..dk {
                acc = &acc * &rho_k.shift(Var::K, u);
            }
        } else {
            for u in 1..=-dk {
                acc = &acc / &rho_k.shift(Var::K, -u);
            }
        }
        acc
    }

    /// The same quotient computed factor by factor from the definitions.
    pub fn factorwise_shift_ratio(&self, dn: i64, dk: i64) -> RatFunc {
        self.factors.iter().fold(RatFunc::one(), |acc, f| &acc * &f.shift_ratio(dn, dk))
    }

    /// Exact `F(n, k)`.
    pub fn eval(&self, n: i64, k: i64, x: &Rat) -> Result<Rat, EvalError> {
        let mut acc = Rat::one();
        for f in &self.factors {
            let v = f.eval(n, k, x)?;
            if v.is_zero() {
                return Ok(Rat::zero());
            }
            acc *= &v;
        }
        Ok(acc)
    }
}

impl fmt::Display for HyperTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return f.write_str("1");
        }
        let parts: Vec<String> = self.factors.iter().map(|x| x.to_string()).collect();
        f.write_str(&parts.join("*"))
    }
}

/// Compatibility alias for the free-function form.
pub fn hyper_shift_ratio(t: &HyperTerm, dn: i64, dk: i64) -> RatFunc {
    t.shift_ratio(dn, dk)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomial_values() {
        assert_eq!(binomial(5, 2), BigInt::from(10));
        assert_eq!(binomial(3, 4), BigInt::zero());
        assert_eq!(binomial(3, -1), BigInt::zero());
        assert_eq!(binomial(-2, 2), BigInt::from(3));
        assert_eq!(binomial(0, 0), BigInt::one());
    }

    #[test]
    fn factorial_reciprocal_vanishes_at_negatives() {
        let f = HyperFactor::new(FactorKind::Factorial(Affine::new(1, -1, 0)), -1);
        assert_eq!(f.eval(1, 2, &Rat::one()).unwrap(), Rat::zero());
        let g = HyperFactor::new(FactorKind::Factorial(Affine::new(1, -1, 0)), 1);
        assert!(g.eval(1, 2, &Rat::one()).is_err());
    }
}
