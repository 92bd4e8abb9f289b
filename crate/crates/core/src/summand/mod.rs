//! Abel summands `F(n,k) * K(n,k,r,s)`: a hypergeometric part times a kernel
//! whose standard form is `(r+k)^(k-1+p) (s-k)^(n-k+q) x^k`.
//!
//! Everything symbolic here is a quotient relative to the unshifted summand,
//! so the non-rational kernel powers never have to be represented.

mod parse;
mod term;

pub use parse::parse_term;
pub use term::{binomial, factorial, hyper_shift_ratio, Affine, FactorKind, HyperFactor, HyperTerm, PowerBase};

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::algebra::{parse_poly, MPoly, Rat, RatFunc, Var};
use crate::error::{EvalError, SolveError};

/// One kernel factor `base^exponent` with `base` affine in `r, s, k` and
/// `exponent` affine in `n, k, p, q`, all coefficients integers.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelFactor {
    base: MPoly,
    exponent: MPoly,
}

fn is_integer_affine(p: &MPoly, allowed: &[Var]) -> bool {
    p.terms().iter().all(|(m, c)| {
        c.is_integer() && m.degree() <= 1 && p.vars().iter().all(|v| allowed.contains(v))
    })
}

impl KernelFactor {
    pub fn new(base: MPoly, exponent: MPoly) -> Result<KernelFactor, SolveError> {
        if base.contains_var(Var::N) {
            return Err(SolveError::KernelNotDifferentiable(format!("base {base} depends on n")));
        }
        if !is_integer_affine(&base, &[Var::R, Var::S, Var::K]) {
            return Err(SolveError::KernelNotDifferentiable(format!(
                "base {base} must be integer-affine in r, s, k"
            )));
        }
        if !is_integer_affine(&exponent, &[Var::N, Var::K, Var::P, Var::Q]) {
            return Err(SolveError::KernelNotDifferentiable(format!(
                "exponent {exponent} must be integer-affine in n, k, p, q"
            )));
        }
        Ok(KernelFactor { base, exponent })
    }

    pub fn base(&self) -> &MPoly {
        &self.base
    }

    pub fn exponent(&self) -> &MPoly {
        &self.exponent
    }

    /// Coefficient of `n` in the exponent.
    fn n_slope(&self) -> i64 {
        self.exponent.collect_in(Var::N).get(1).and_then(|c| c.as_constant()).and_then(|c| c.to_i64()).unwrap_or(0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum KernelMode {
    Abel,
    General,
}

/// The kernel multiplying the hypergeometric part.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelSpec {
    mode: KernelMode,
    factors: Vec<KernelFactor>,
    geometric: bool,
}

impl KernelSpec {
    /// `(r+k)^(k-1+p) (s-k)^(n-k+q)`, times `x^k` when `geometric`.
    pub fn abel(geometric: bool) -> KernelSpec {
        let f = |b: &str, e: &str| KernelFactor { base: parse_poly(b).unwrap(), exponent: parse_poly(e).unwrap() };
        KernelSpec { mode: KernelMode::Abel, factors: vec![f("r + k", "k - 1 + p"), f("s - k", "n - k + q")], geometric }
    }

    pub fn general(factors: Vec<KernelFactor>, geometric: bool) -> KernelSpec {
        KernelSpec { mode: KernelMode::General, factors, geometric }
    }

    /// Parse a product like `(r+k)^(k-1+p)*(s-k)^(n-k+q)*x^k`. A factor `x^k`
    /// switches on the geometric part; every other factor is `(base)^(exp)`.
    pub fn parse_general(src: &str) -> Result<KernelSpec, SolveError> {
        let bad = |why: &str| SolveError::KernelNotDifferentiable(format!("{src:?}: {why}"));
        let src = src.replace("**", "^");
        let mut factors = Vec::new();
        let mut geometric = false;
        for part in split_top_level(&src, '*') {
            let part = part.trim();
            if part.replace(' ', "") == "x^k" {
                geometric = true;
                continue;
            }
            let (base_txt, exp_txt) = match split_top_level(part, '^').as_slice() {
                [b] => (b.to_string(), "1".to_string()),
                [b, e] => (b.to_string(), e.to_string()),
                _ => return Err(bad("expected base^exponent")),
            };
            let base = parse_poly(&base_txt).map_err(|e| bad(&e.to_string()))?;
            let exponent = parse_poly(&exp_txt).map_err(|e| bad(&e.to_string()))?;
            factors.push(KernelFactor::new(base, exponent)?);
        }
        if factors.is_empty() && !geometric {
            return Err(bad("empty kernel"));
        }
        Ok(KernelSpec::general(factors, geometric))
    }

    pub fn mode(&self) -> KernelMode {
        self.mode
    }

    pub fn factors(&self) -> &[KernelFactor] {
        &self.factors
    }

    pub fn geometric(&self) -> bool {
        self.geometric
    }
}

fn split_top_level(s: &str, sep: char) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    for c in s.chars() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            _ => {}
        }
        if c == sep && depth == 0 {
            out.push(std::mem::take(&mut cur));
        } else {
            cur.push(c);
        }
    }
    out.push(cur);
    out
}

impl fmt::Display for KernelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self.factors.iter().map(|kf| format!("({})^({})", kf.base, kf.exponent)).collect();
        if self.geometric {
            parts.push("x^k".into());
        }
        if parts.is_empty() {
            parts.push("1".into());
        }
        f.write_str(&parts.join("*"))
    }
}

/// Values pinned for a whole session; unpinned symbols stay symbolic.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Pins {
    pub x: Option<Rat>,
    pub p: Option<i64>,
    pub q: Option<i64>,
}

/// A concrete evaluation point for the summation variables.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalPoint {
    pub r: Rat,
    pub s: Rat,
    pub x: Rat,
    pub p: i64,
    pub q: i64,
}

impl EvalPoint {
    pub fn new(r: impl Into<Rat>, s: impl Into<Rat>) -> EvalPoint {
        EvalPoint { r: r.into(), s: s.into(), x: Rat::one(), p: 0, q: 0 }
    }

    pub fn with_x(mut self, x: impl Into<Rat>) -> EvalPoint {
        self.x = x.into();
        self
    }

    pub fn with_pq(mut self, p: i64, q: i64) -> EvalPoint {
        self.p = p;
        self.q = q;
        self
    }

    fn value(&self, v: Var, n: i64, k: i64) -> Option<Rat> {
        Some(match v {
            Var::N => Rat::from(n),
            Var::K => Rat::from(k),
            Var::R => self.r.clone(),
            Var::S => self.s.clone(),
            Var::X => self.x.clone(),
            Var::P => Rat::from(self.p),
            Var::Q => Rat::from(self.q),
            _ => return None,
        })
    }
}

impl fmt::Display for EvalPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "r={}, s={}, x={}, p={}, q={}", self.r, self.s, self.x, self.p, self.q)
    }
}

/// Which way a `j`-shift moves `k` against `(r, s)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Orientation {
    /// Column `(i, j)` is `F̄_{n+i,k-j}(r+j, s-j)`; sums read `a_{n+i}(r+j, s-j)`.
    #[default]
    Abel,
    /// Column `(i, j)` is `F̄_{n+i,k+j}(r-j, s+j)`; sums read `a_{n+i}(r-j, s+j)`.
    Literal,
}

impl Orientation {
    /// `(r shift, k shift)` for ansatz index `j`.
    pub fn shifts(self, j: i64) -> (i64, i64) {
        match self {
            Orientation::Abel => (j, -j),
            Orientation::Literal => (-j, j),
        }
    }
}

/// `F̄_{n,k}(r,s)`: a hypergeometric term with its kernel.
#[derive(Debug, Clone, PartialEq)]
pub struct AbelSummand {
    pub term: HyperTerm,
    pub kernel: KernelSpec,
    pub pins: Pins,
}

impl AbelSummand {
    pub fn new(term: HyperTerm, kernel: KernelSpec) -> AbelSummand {
        AbelSummand { term, kernel, pins: Pins::default() }
    }

    /// The standard Abel summand for a parsed term; the kernel carries `x^k`
    /// unless the term already does.
    pub fn abel(term: HyperTerm) -> AbelSummand {
        let geometric = !term.mentions_x();
        AbelSummand::new(term, KernelSpec::abel(geometric))
    }

    pub fn parse(src: &str) -> Result<AbelSummand, crate::error::ParseError> {
        Ok(AbelSummand::abel(parse_term(src)?))
    }

    pub fn with_pins(mut self, pins: Pins) -> AbelSummand {
        self.pins = pins;
        self
    }

    pub fn pin_x(mut self, x: impl Into<Rat>) -> AbelSummand {
        self.pins.x = Some(x.into());
        self
    }

    pub fn pin_pq(mut self, p: i64, q: i64) -> AbelSummand {
        self.pins.p = Some(p);
        self.pins.q = Some(q);
        self
    }

    /// Substitute pinned symbols into a symbolic ratio.
    pub fn apply_pins(&self, f: RatFunc) -> RatFunc {
        let mut f = f;
        if let Some(x) = &self.pins.x {
            f = f.subs_value(Var::X, x).expect("pinned x gives no pole");
        }
        if let Some(p) = self.pins.p {
            f = f.subs_value(Var::P, &Rat::from(p)).expect("pinned p gives no pole");
        }
        if let Some(q) = self.pins.q {
            f = f.subs_value(Var::Q, &Rat::from(q)).expect("pinned q gives no pole");
        }
        f
    }

    pub fn pinned_point(&self, pt: &EvalPoint) -> EvalPoint {
        let mut pt = pt.clone();
        if let Some(x) = &self.pins.x {
            pt.x = x.clone();
        }
        if let Some(p) = self.pins.p {
            pt.p = p;
        }
        if let Some(q) = self.pins.q {
            pt.q = q;
        }
        pt
    }

    fn require_abel(&self) -> Result<(), SolveError> {
        match self.kernel.mode {
            KernelMode::Abel => Ok(()),
            KernelMode::General => Err(SolveError::KernelMode),
        }
    }

    /// Quotient of `F̄_{n+dn, k+dk}(r+dr, s-dr)` by the reference summand of
    /// its family `f = dr + dk`, namely
    /// `F(n,k) (r+k+f)^(k-1+p) (s-k-f)^(n-k+q) x^k`.
    ///
    /// Summands from different families differ by non-rational factors and
    /// have to be compared family by family; family 0 is `F̄_{n,k}(r,s)`.
    pub fn family_ratio(&self, dn: i64, dr: i64, dk: i64) -> Result<(i64, RatFunc), SolveError> {
        self.require_abel()?;
        let family = dr + dk;
        let shifted_r = &(&MPoly::var(Var::R) + &MPoly::var(Var::K)) + &MPoly::int(family);
        let shifted_s = &(&MPoly::var(Var::S) - &MPoly::var(Var::K)) - &MPoly::int(family);
        let mut ratio = self.term.shift_ratio(dn, dk);
        ratio = &ratio * &RatFunc::from_poly(shifted_r).pow(dk);
        ratio = &ratio * &RatFunc::from_poly(shifted_s).pow(dn - dk);
        if self.kernel.geometric {
            ratio = &ratio * &RatFunc::var(Var::X).pow(dk);
        }
        Ok((family, self.apply_pins(ratio)))
    }

    /// `F̄_{n+i,k-j}(r+j,s-j) / F̄_{n,k}(r,s)`. Free of `p` and `q`.
    pub fn abel_shift_ratio(&self, i: i64, j: i64) -> Result<RatFunc, SolveError> {
        self.oriented_shift_ratio(i, j, Orientation::Abel)
    }

    pub fn oriented_shift_ratio(&self, i: i64, j: i64, orientation: Orientation) -> Result<RatFunc, SolveError> {
        let (dr, dk) = orientation.shifts(j);
        let (family, ratio) = self.family_ratio(i, dr, dk)?;
        debug_assert_eq!(family, 0);
        Ok(ratio)
    }

    /// `(∂^order/∂var^order F̄_{n+nshift,k}) / F̄_{n,k}`.
    pub fn kernel_derivative_ratio(&self, var: Var, order: u32, nshift: i64) -> Result<RatFunc, SolveError> {
        match self.kernel.mode {
            KernelMode::Abel => Ok(self.apply_pins(self.abel_derivative_ratio(var, order, nshift))),
            KernelMode::General => self.general_derivative_ratio(var, order, nshift),
        }
    }

    /// Closed form for the Abel kernel: each `r`-derivative lowers the power
    /// of `(r+k)` and contributes a falling factor of `k-1+p`; each
    /// `s`-derivative does the same with `(s-k)` and `n+j-k+q`.
    fn abel_derivative_ratio(&self, var: Var, order: u32, j: i64) -> RatFunc {
        let h = self.term.shift_ratio(j, 0);
        let s_minus_k = RatFunc::from_poly(parse_poly("s - k").unwrap());
        let order = order as i64;
        match var {
            Var::R => {
                let r_plus_k = RatFunc::from_poly(parse_poly("r + k").unwrap());
                let top = parse_poly("k - 1 + p").unwrap();
                let falling = (0..order).fold(MPoly::one(), |acc, t| &acc * &(&top - &MPoly::int(t)));
                &(&h * &s_minus_k.pow(j)) * &RatFunc::from_poly(falling) * r_plus_k.pow(-order)
            }
            Var::S => {
                let top = &parse_poly("n - k + q").unwrap() + &MPoly::int(j);
                let falling = (0..order).fold(MPoly::one(), |acc, t| &acc * &(&top - &MPoly::int(t)));
                &(&h * &s_minus_k.pow(j - order)) * &RatFunc::from_poly(falling)
            }
            _ => panic!("derivatives are taken in r or s"),
        }
    }

    /// Any admissible kernel, through the logarithmic derivative:
    /// `D_0 = 1`, `D_{m+1} = ∂D_m + D_m * λ` with `λ = Σ e (∂b)/b` at `n+j`.
    fn general_derivative_ratio(&self, var: Var, order: u32, j: i64) -> Result<RatFunc, SolveError> {
        if var != Var::R && var != Var::S {
            return Err(SolveError::KernelNotDifferentiable(format!("variable {var}")));
        }
        let mut shift_part = self.term.shift_ratio(j, 0);
        let mut log_deriv = RatFunc::zero();
        for kf in &self.kernel.factors {
            if kf.base.contains_var(Var::N) {
                return Err(SolveError::KernelNotDifferentiable(format!("base {} depends on n", kf.base)));
            }
            let base = RatFunc::from_poly(kf.base.clone());
            shift_part = &shift_part * &base.pow(kf.n_slope() * j);
            let db = kf.base.derivative(var);
            if !db.is_zero() {
                let e = kf.exponent.shift(Var::N, j);
                log_deriv = &log_deriv + &RatFunc::new(&e * &db, kf.base.clone()).expect("nonzero base");
            }
        }
        let mut d = RatFunc::one();
        for _ in 0..order {
            d = &d.derivative(var) + &(&d * &log_deriv);
        }
        Ok(self.apply_pins(&shift_part * &d))
    }

    /// Exact `F̄_{n,k}(r,s)`, with `0^0 = 1`.
    pub fn eval_summand(&self, n: i64, k: i64, pt: &EvalPoint) -> Result<Rat, EvalError> {
        let pt = self.pinned_point(pt);
        let f = self.term.eval(n, k, &pt.x)?;
        if f.is_zero() {
            return Ok(Rat::zero());
        }
        let mut acc = f;
        for kf in &self.kernel.factors {
            let b = kf.base.eval(|v| pt.value(v, n, k)).expect("kernel variables assigned");
            let e = kf.exponent.eval(|v| pt.value(v, n, k)).expect("kernel variables assigned");
            let e = e.to_i64().expect("integer exponent");
            if b.is_zero() && e < 0 {
                return Err(EvalError::ZeroToNegativePower { k });
            }
            acc *= &b.pow(e);
        }
        if self.kernel.geometric {
            if pt.x.is_zero() && k < 0 {
                return Err(EvalError::ZeroToNegativePower { k });
            }
            acc *= &pt.x.pow(k);
        }
        Ok(acc)
    }

    /// `a_n(r,s) = Σ_{k=0}^{n} F̄_{n,k}(r,s)`.
    pub fn eval_abel_sum(&self, n: i64, pt: &EvalPoint) -> Result<Rat, EvalError> {
        (0..=n).try_fold(Rat::zero(), |acc, k| Ok(acc + self.eval_summand(n, k, pt)?))
    }

    /// `a_n` as an exact rational function of `var` (`r` or `s`), all other
    /// parameters taken from `pt`.
    pub fn sum_in_var(&self, var: Var, n: i64, pt: &EvalPoint) -> Result<RatFunc, EvalError> {
        let pt = self.pinned_point(pt);
        let mut total = RatFunc::zero();
        for k in 0..=n {
            let f = self.term.eval(n, k, &pt.x)?;
            if f.is_zero() {
                continue;
            }
            let mut t = RatFunc::constant(f);
            for kf in &self.kernel.factors {
                let mut b = kf.base.clone();
                for v in [Var::R, Var::S, Var::K] {
                    if v != var {
                        b = b.subs_value(v, &pt.value(v, n, k).unwrap());
                    }
                }
                let e = kf.exponent.eval(|v| pt.value(v, n, k)).expect("kernel variables assigned");
                let e = e.to_i64().expect("integer exponent");
                if b.is_zero() && e < 0 {
                    return Err(EvalError::ZeroToNegativePower { k });
                }
                t = &t * &RatFunc::from_poly(b).pow(e);
            }
            if self.kernel.geometric {
                t = t.scale(&pt.x.pow(k));
            }
            total = &total + &t;
        }
        Ok(total)
    }
}

impl fmt::Display for AbelSummand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}*{}", self.term, self.kernel)
    }
}
