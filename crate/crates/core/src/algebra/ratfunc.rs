//! Normalized quotients of polynomials.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use super::gcd::gcd;
use super::mpoly::MPoly;
use super::rat::Rat;
use super::var::Var;
use crate::error::AlgebraError;

/// A reduced quotient `num / den`. The denominator has coprime integer
/// coefficients and a positive leading coefficient, so every rational
/// function has exactly one representation. Zero is `0/1`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatFunc {
    num: MPoly,
    den: MPoly,
}

impl RatFunc {
    pub fn zero() -> RatFunc {
        RatFunc { num: MPoly::zero(), den: MPoly::one() }
    }

    pub fn one() -> RatFunc {
        RatFunc::from_poly(MPoly::one())
    }

    pub fn from_poly(p: MPoly) -> RatFunc {
        RatFunc { num: p, den: MPoly::one() }
    }

    pub fn constant(c: Rat) -> RatFunc {
        RatFunc::from_poly(MPoly::constant(c))
    }

    pub fn var(v: Var) -> RatFunc {
        RatFunc::from_poly(MPoly::var(v))
    }

    /// Reduce `num / den` to canonical form.
    pub fn new(num: MPoly, den: MPoly) -> Result<RatFunc, AlgebraError> {
        if den.is_zero() {
            return Err(AlgebraError::ZeroDenominator);
        }
        if num.is_zero() {
            return Ok(RatFunc::zero());
        }
        let g = gcd(&num, &den);
        let (num, den) = if g.is_one() {
            (num, den)
        } else {
            (num.exact_div(&g).expect("gcd divides"), den.exact_div(&g).expect("gcd divides"))
        };
        Ok(RatFunc::from_coprime(num, den))
    }

    /// Normalizes the unit of a quotient already known to be reduced.
    pub(crate) fn from_coprime(num: MPoly, den: MPoly) -> RatFunc {
        let lc = den.leading_coeff();
        let mut c = den.content();
        if lc.is_negative() {
            c = -c;
        }
        if c.is_one() {
            RatFunc { num, den }
        } else {
            let inv = c.recip();
            RatFunc { num: num.scale(&inv), den: den.scale(&inv) }
        }
    }

    pub fn num(&self) -> &MPoly {
        &self.num
    }

    pub fn den(&self) -> &MPoly {
        &self.den
    }

    pub fn into_parts(self) -> (MPoly, MPoly) {
        (self.num, self.den)
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    pub fn contains_var(&self, v: Var) -> bool {
        self.num.contains_var(v) || self.den.contains_var(v)
    }

    pub fn recip(&self) -> Result<RatFunc, AlgebraError> {
        if self.is_zero() {
            return Err(AlgebraError::ZeroDenominator);
        }
        Ok(RatFunc::from_coprime(self.den.clone(), self.num.clone()))
    }

    pub fn scale(&self, c: &Rat) -> RatFunc {
        if c.is_zero() {
            return RatFunc::zero();
        }
        RatFunc { num: self.num.scale(c), den: self.den.clone() }
    }

    pub fn mul_poly(&self, p: &MPoly) -> RatFunc {
        if p.is_zero() || self.is_zero() {
            return RatFunc::zero();
        }
        let g = gcd(p, &self.den);
        let pr = p.exact_div(&g).expect("gcd divides");
        let dr = self.den.exact_div(&g).expect("gcd divides");
        RatFunc::from_coprime(&self.num * &pr, dr)
    }

    /// Integer power; negative exponents invert.
    pub fn pow(&self, e: i64) -> RatFunc {
        let base = if e < 0 { self.recip().expect("zero to a negative power") } else { self.clone() };
        let m = e.unsigned_abs() as u32;
        RatFunc::from_coprime(base.num.pow(m), base.den.pow(m))
    }

    /// Exact partial derivative.
    pub fn derivative(&self, v: Var) -> RatFunc {
        let dn = self.num.derivative(v);
        if self.den.is_constant() {
            return RatFunc::from_coprime(dn, self.den.clone());
        }
        let dd = self.den.derivative(v);
        let num = &(&dn * &self.den) - &(&self.num * &dd);
        RatFunc::new(num, self.den.pow(2)).expect("nonzero denominator")
    }

    /// Replace `v` by `v + delta`. Shifts are ring automorphisms, so the
    /// quotient stays reduced.
    pub fn shift(&self, v: Var, delta: i64) -> RatFunc {
        if delta == 0 || !self.contains_var(v) {
            return self.clone();
        }
        RatFunc::from_coprime(self.num.shift(v, delta), self.den.shift(v, delta))
    }

    /// Replace `v` by a polynomial.
    pub fn substitute(&self, v: Var, value: &MPoly) -> Result<RatFunc, AlgebraError> {
        if !self.contains_var(v) {
            return Ok(self.clone());
        }
        RatFunc::new(self.num.substitute(v, value), self.den.substitute(v, value))
    }

    /// Replace `v` by a rational number.
    pub fn subs_value(&self, v: Var, value: &Rat) -> Result<RatFunc, AlgebraError> {
        if !self.contains_var(v) {
            return Ok(self.clone());
        }
        let den = self.den.subs_value(v, value);
        if den.is_zero() {
            return Err(AlgebraError::PoleAtPoint);
        }
        RatFunc::new(self.num.subs_value(v, value), den)
    }

    /// Exact evaluation at a point covering every occurring variable.
    pub fn eval(&self, assign: impl Fn(Var) -> Option<Rat>) -> Result<Rat, AlgebraError> {
        let d = self.den.eval(&assign).ok_or(AlgebraError::UnassignedVariable)?;
        if d.is_zero() {
            return Err(AlgebraError::PoleAtPoint);
        }
        let n = self.num.eval(&assign).ok_or(AlgebraError::UnassignedVariable)?;
        Ok(&n / &d)
    }

    pub fn render_latex(&self) -> String {
        if self.den.is_one() {
            self.num.render_latex()
        } else {
            format!("\\frac{{{}}}{{{}}}", self.num.render_latex(), self.den.render_latex())
        }
    }
}

/// Normalize a quotient of polynomials.
pub fn rf_normalize(num: MPoly, den: MPoly) -> Result<RatFunc, AlgebraError> {
    RatFunc::new(num, den)
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            let wrap = |p: &MPoly| if p.len() > 1 { format!("({p})") } else { p.to_string() };
            write!(f, "{}/{}", wrap(&self.num), wrap(&self.den))
        }
    }
}

impl fmt::Debug for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Add<&RatFunc> for &RatFunc {
    type Output = RatFunc;

    fn add(self, rhs: &RatFunc) -> RatFunc {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        if self.den == rhs.den {
            return RatFunc::new(&self.num + &rhs.num, self.den.clone()).expect("nonzero");
        }
        let g = gcd(&self.den, &rhs.den);
        let a = self.den.exact_div(&g).expect("gcd divides");
        let b = rhs.den.exact_div(&g).expect("gcd divides");
        let num = &(&self.num * &b) + &(&rhs.num * &a);
        let den = &self.den * &b;
        RatFunc::new(num, den).expect("nonzero")
    }
}

impl Neg for &RatFunc {
    type Output = RatFunc;

    fn neg(self) -> RatFunc {
        RatFunc { num: -&self.num, den: self.den.clone() }
    }
}

impl Neg for RatFunc {
    type Output = RatFunc;

    fn neg(self) -> RatFunc {
        -&self
    }
}

impl Sub<&RatFunc> for &RatFunc {
    type Output = RatFunc;

    fn sub(self, rhs: &RatFunc) -> RatFunc {
        self + &(-rhs)
    }
}

impl Mul<&RatFunc> for &RatFunc {
    type Output = RatFunc;

    fn mul(self, rhs: &RatFunc) -> RatFunc {
        if self.is_zero() || rhs.is_zero() {
            return RatFunc::zero();
        }
        let g1 = gcd(&self.num, &rhs.den);
        let g2 = gcd(&rhs.num, &self.den);
        let n1 = self.num.exact_div(&g1).unwrap();
        let d2 = rhs.den.exact_div(&g1).unwrap();
        let n2 = rhs.num.exact_div(&g2).unwrap();
        let d1 = self.den.exact_div(&g2).unwrap();
        RatFunc::from_coprime(&n1 * &n2, &d1 * &d2)
    }
}

impl Div<&RatFunc> for &RatFunc {
    type Output = RatFunc;

    fn div(self, rhs: &RatFunc) -> RatFunc {
        self * &rhs.recip().expect("division by zero rational function")
    }
}

macro_rules! owned_ops {
    ($tr:ident, $m:ident) => {
        impl $tr<RatFunc> for RatFunc {
            type Output = RatFunc;
            fn $m(self, rhs: RatFunc) -> RatFunc {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&RatFunc> for RatFunc {
            type Output = RatFunc;
            fn $m(self, rhs: &RatFunc) -> RatFunc {
                (&self).$m(rhs)
            }
        }
    };
}

owned_ops!(Add, add);
owned_ops!(Sub, sub);
owned_ops!(Mul, mul);
owned_ops!(Div, div);

impl From<MPoly> for RatFunc {
    fn from(p: MPoly) -> RatFunc {
        RatFunc::from_poly(p)
    }
}

impl From<Var> for RatFunc {
    fn from(v: Var) -> RatFunc {
        RatFunc::var(v)
    }
}

impl From<i64> for RatFunc {
    fn from(c: i64) -> RatFunc {
        RatFunc::from_poly(MPoly::int(c))
    }
}
