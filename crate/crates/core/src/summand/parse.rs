//! Parser for hypergeometric summand text such as `binomial(n,k)*x^k` or
//! `1/(k!^2*(n-k)!)`.
//!
//! ```text
//! sum     := product (('+' | '-') product)*
//! product := unary (('*' | '/') unary)*
//! unary   := '-' unary | postfix
//! postfix := atom '!'* ('^' exponent)?        ('**' is accepted for '^')
//! atom    := 'binomial' '(' sum ',' sum ')' | '(' sum ')' | integer | 'n' | 'k' | 'x'
//! ```
//!
//! Sums are only meaningful where they denote integer-affine forms in `n`
//! and `k`; the lowering step rejects anything that is not a product of
//! hypergeometric factors.

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use super::term::{Affine, FactorKind, HyperFactor, HyperTerm, PowerBase};
use crate::algebra::Rat;
use crate::error::ParseError;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Sym(char),
}

#[derive(Debug, Clone)]
enum Node {
    Num(BigInt),
    Var(char),
    Neg(Box<Ast>),
    Add(Box<Ast>, Box<Ast>),
    Sub(Box<Ast>, Box<Ast>),
    Mul(Box<Ast>, Box<Ast>),
    Div(Box<Ast>, Box<Ast>),
    Pow(Box<Ast>, Box<Ast>),
    Fact(Box<Ast>),
    Binom(Box<Ast>, Box<Ast>),
}

#[derive(Debug, Clone)]
struct Ast {
    at: usize,
    node: Node,
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            out.push((start, Tok::Num(s.parse().expect("digits"))));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push((start, Tok::Ident(chars[start..i].iter().collect())));
        } else if c == '*' && chars.get(i + 1) == Some(&'*') {
            out.push((i, Tok::Sym('^')));
            i += 2;
        } else if "+-*/^()!,".contains(c) {
            out.push((i, Tok::Sym(c)));
            i += 1;
        } else {
            return Err(ParseError::new(i, "a number, name or operator"));
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.1)
    }

    fn at(&self) -> usize {
        self.toks.get(self.pos).map(|t| t.0).unwrap_or(self.end)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(ParseError::new(self.at(), format!("'{c}'")))
        }
    }

    fn sum(&mut self) -> Result<Ast, ParseError> {
        let mut lhs = self.product()?;
        loop {
            let at = self.at();
            if self.eat('+') {
                let rhs = self.product()?;
                lhs = Ast { at, node: Node::Add(Box::new(lhs), Box::new(rhs)) };
            } else if self.eat('-') {
                let rhs = self.product()?;
                lhs = Ast { at, node: Node::Sub(Box::new(lhs), Box::new(rhs)) };
            } else {
                return Ok(lhs);
            }
        }
    }

    fn product(&mut self) -> Result<Ast, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let at = self.at();
            if self.eat('*') {
                let rhs = self.unary()?;
                lhs = Ast { at, node: Node::Mul(Box::new(lhs), Box::new(rhs)) };
            } else if self.eat('/') {
                let rhs = self.unary()?;
                lhs = Ast { at, node: Node::Div(Box::new(lhs), Box::new(rhs)) };
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Ast, ParseError> {
        let at = self.at();
        if self.eat('-') {
            let inner = self.unary()?;
            return Ok(Ast { at, node: Node::Neg(Box::new(inner)) });
        }
        self.postfix()
    }

    fn postfix(&mut self) -> Result<Ast, ParseError> {
        let mut base = self.atom()?;
        loop {
            let at = self.at();
            if self.eat('!') {
                base = Ast { at, node: Node::Fact(Box::new(base)) };
            } else {
                break;
            }
        }
        let at = self.at();
        if self.eat('^') {
            let exp = self.unary_exponent()?;
            base = Ast { at, node: Node::Pow(Box::new(base), Box::new(exp)) };
        }
        Ok(base)
    }

    fn unary_exponent(&mut self) -> Result<Ast, ParseError> {
        let at = self.at();
        if self.eat('-') {
            let inner = self.unary_exponent()?;
            return Ok(Ast { at, node: Node::Neg(Box::new(inner)) });
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Ast, ParseError> {
        let at = self.at();
        match self.peek().cloned() {
            Some(Tok::Num(v)) => {
                self.pos += 1;
                Ok(Ast { at, node: Node::Num(v) })
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                match name.as_str() {
                    "binomial" => {
                        self.expect('(')?;
                        let a = self.sum()?;
                        self.expect(',')?;
                        let b = self.sum()?;
                        self.expect(')')?;
                        Ok(Ast { at, node: Node::Binom(Box::new(a), Box::new(b)) })
                    }
                    "n" | "k" | "x" => Ok(Ast { at, node: Node::Var(name.chars().next().unwrap()) }),
                    _ => Err(ParseError::unknown_variable(at, &name)),
                }
            }
            Some(Tok::Sym('(')) => {
                self.pos += 1;
                let inner = self.sum()?;
                self.expect(')')?;
                Ok(inner)
            }
            _ => Err(ParseError::new(at, "a number, 'n', 'k', 'x', 'binomial' or '('")),
        }
    }
}

fn as_affine(e: &Ast) -> Option<Affine> {
    match &e.node {
        Node::Num(v) => Some(Affine::constant(v.to_i64()?)),
        Node::Var('n') => Some(Affine::new(1, 0, 0)),
        Node::Var('k') => Some(Affine::new(0, 1, 0)),
        Node::Var(_) => None,
        Node::Neg(a) => Some(as_affine(a)?.scale(-1)),
        Node::Add(a, b) => Some(as_affine(a)?.add(&as_affine(b)?)),
        Node::Sub(a, b) => Some(as_affine(a)?.sub(&as_affine(b)?)),
        Node::Mul(a, b) => {
            let (a, b) = (as_affine(a)?, as_affine(b)?);
            if a.is_constant() {
                Some(b.scale(a.c))
            } else if b.is_constant() {
                Some(a.scale(b.c))
            } else {
                None
            }
        }
        _ => None,
    }
}

fn as_const(e: &Ast) -> Option<Rat> {
    match &e.node {
        Node::Num(v) => Some(Rat::from_int(v.clone())),
        Node::Neg(a) => Some(-as_const(a)?),
        Node::Add(a, b) => Some(as_const(a)? + as_const(b)?),
        Node::Sub(a, b) => Some(as_const(a)? - as_const(b)?),
        Node::Mul(a, b) => Some(as_const(a)? * as_const(b)?),
        Node::Div(a, b) => {
            let d = as_const(b)?;
            if d.is_zero() {
                None
            } else {
                Some(as_const(a)? / d)
            }
        }
        Node::Pow(a, b) => {
            let e = as_const(b)?.to_i64()?;
            let base = as_const(a)?;
            if base.is_zero() && e < 0 {
                None
            } else {
                Some(base.pow(e))
            }
        }
        _ => None,
    }
}

fn with_exp(mut fs: Vec<HyperFactor>, m: i64) -> Vec<HyperFactor> {
    for f in &mut fs {
        f.exp *= m;
    }
    fs
}

fn affine_or_err(e: &Ast) -> Result<Affine, ParseError> {
    as_affine(e).ok_or_else(|| ParseError::new(e.at, "an integer-affine expression in n and k"))
}

fn lower(e: &Ast) -> Result<Vec<HyperFactor>, ParseError> {
    if let Some(c) = as_const(e) {
        if c.is_zero() {
            return Err(ParseError::new(e.at, "a nonzero factor"));
        }
        return Ok(vec![HyperFactor::new(FactorKind::Constant(c), 1)]);
    }
    match &e.node {
        Node::Mul(a, b) => {
            let mut out = lower(a)?;
            out.extend(lower(b)?);
            Ok(out)
        }
        Node::Div(a, b) => {
            let mut out = lower(a)?;
            out.extend(with_exp(lower(b)?, -1));
            Ok(out)
        }
        Node::Neg(a) => {
            let mut out = vec![HyperFactor::new(FactorKind::Constant(Rat::from(-1)), 1)];
            out.extend(lower(a)?);
            Ok(out)
        }
        Node::Pow(base, exp) => {
            if let Some(m) = as_const(exp) {
                let m = m.to_i64().ok_or_else(|| ParseError::new(exp.at, "an integer exponent"))?;
                return Ok(with_exp(lower(base)?, m));
            }
            let exponent = affine_or_err(exp)?;
            let base = match (&base.node, as_const(base)) {
                (Node::Var('x'), _) => PowerBase::X,
                (_, Some(c)) if !c.is_zero() => PowerBase::Const(c),
                _ => return Err(ParseError::new(base.at, "'x' or a nonzero constant as base of a symbolic power")),
            };
            Ok(vec![HyperFactor::new(FactorKind::Power { base, exponent }, 1)])
        }
        Node::Fact(a) => Ok(vec![HyperFactor::new(FactorKind::Factorial(affine_or_err(a)?), 1)]),
        Node::Binom(a, b) => {
            Ok(vec![HyperFactor::new(FactorKind::Binomial(affine_or_err(a)?, affine_or_err(b)?), 1)])
        }
        Node::Var('x') => Ok(vec![HyperFactor::new(
            FactorKind::Power { base: PowerBase::X, exponent: Affine::constant(1) },
            1,
        )]),
        _ => match as_affine(e) {
            Some(l) => Ok(vec![HyperFactor::new(FactorKind::Linear(l), 1)]),
            None => Err(ParseError::new(e.at, "a product of hypergeometric factors")),
        },
    }
}

/// Parse summand text into a [`HyperTerm`] with its shift quotients.
pub fn parse_term(src: &str) -> Result<HyperTerm, ParseError> {
    let toks = lex(src)?;
    let mut p = Parser { toks, pos: 0, end: src.chars().count() };
    let ast = p.sum()?;
    if p.pos != p.toks.len() {
        return Err(ParseError::new(p.at(), "end of input"));
    }
    Ok(HyperTerm::from_factors(lower(&ast)?))
}
