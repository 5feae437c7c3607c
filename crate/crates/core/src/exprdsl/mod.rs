//! Expression language for scalar functions of `x1, x2, x3`, a curve
//! parameter `t`, or patch parameters `u1, u2`.
//!
//! Expressions evaluate over any [`Scalar`]; with [`Jet`] this gives exact
//! forward-mode derivatives up to order 3.

mod jet;
mod parse;

use std::collections::BTreeSet;
use std::fmt;

pub use jet::{Jet, JET_ORDER, JET_VARS};
pub use parse::{parse, ParseError};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Var {
    X1,
    X2,
    X3,
    T,
    U1,
    U2,
}

impl Var {
    pub const ALL: [Var; 6] = [Var::X1, Var::X2, Var::X3, Var::T, Var::U1, Var::U2];
    pub const XYZ: [Var; 3] = [Var::X1, Var::X2, Var::X3];

    pub fn name(self) -> &'static str {
        match self {
            Var::X1 => "x1",
            Var::X2 => "x2",
            Var::X3 => "x3",
            Var::T => "t",
            Var::U1 => "u1",
            Var::U2 => "u2",
        }
    }

    pub fn from_name(s: &str) -> Option<Var> {
        Var::ALL.into_iter().find(|v| v.name() == s)
    }

    fn index(self) -> usize {
        self as usize
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Func {
    Exp,
    Log,
    Sin,
    Cos,
    Sqrt,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Sqrt => "sqrt",
        }
    }

    pub fn from_name(s: &str) -> Option<Func> {
        Some(match s {
            "exp" => Func::Exp,
            "log" | "ln" => Func::Log,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "sqrt" => Func::Sqrt,
            _ => return None,
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Const(f64),
    Var(Var),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    Pow(Box<Expr>, i32),
    Func(Func, Box<Expr>),
}

/// Number-like types an [`Expr`] can be evaluated over.
pub trait Scalar: Clone {
    fn constant(v: f64) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn div(&self, o: &Self) -> Result<Self>;
    fn neg(&self) -> Self;
    fn powi(&self, n: i32) -> Result<Self>;
    fn exp(&self) -> Self;
    fn ln(&self) -> Result<Self>;
    fn sin(&self) -> Self;
    fn cos(&self) -> Self;
    fn sqrt(&self) -> Result<Self>;
}

impl Scalar for f64 {
    fn constant(v: f64) -> Self {
        v
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Result<Self> {
        if *o == 0.0 {
            return Err(Error::FunctionDomain {
                function: "division",
                value: *o,
            });
        }
        Ok(self / o)
    }
    fn neg(&self) -> Self {
        -self
    }
    fn powi(&self, n: i32) -> Result<Self> {
        if n < 0 && *self == 0.0 {
            return Err(Error::FunctionDomain {
                function: "division",
                value: 0.0,
            });
        }
        Ok(f64::powi(*self, n))
    }
    fn exp(&self) -> Self {
        f64::exp(*self)
    }
    fn ln(&self) -> Result<Self> {
        if !(*self > 0.0) {
            return Err(Error::FunctionDomain {
                function: "log",
                value: *self,
            });
        }
        Ok(f64::ln(*self))
    }
    fn sin(&self) -> Self {
        f64::sin(*self)
    }
    fn cos(&self) -> Self {
        f64::cos(*self)
    }
    fn sqrt(&self) -> Result<Self> {
        if *self < 0.0 {
            return Err(Error::FunctionDomain {
                function: "sqrt",
                value: *self,
            });
        }
        Ok(f64::sqrt(*self))
    }
}

impl Scalar for Jet {
    fn constant(v: f64) -> Self {
        Jet::constant(v)
    }
    fn add(&self, o: &Self) -> Self {
        Jet::add(self, o)
    }
    fn sub(&self, o: &Self) -> Self {
        Jet::sub(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        Jet::mul(self, o)
    }
    fn div(&self, o: &Self) -> Result<Self> {
        Jet::div(self, o)
    }
    fn neg(&self) -> Self {
        Jet::neg(self)
    }
    fn powi(&self, n: i32) -> Result<Self> {
        Jet::powi(self, n)
    }
    fn exp(&self) -> Self {
        Jet::exp(self)
    }
    fn ln(&self) -> Result<Self> {
        Jet::ln(self)
    }
    fn sin(&self) -> Self {
        Jet::sin(self)
    }
    fn cos(&self) -> Self {
        Jet::cos(self)
    }
    fn sqrt(&self) -> Result<Self> {
        Jet::sqrt(self)
    }
}

/// Variable assignment, indexed by [`Var`].
#[derive(Clone, Debug)]
pub struct Env<S> {
    vals: [Option<S>; 6],
}

impl<S: Clone> Default for Env<S> {
    fn default() -> Self {
        Env {
            vals: [None, None, None, None, None, None],
        }
    }
}

impl<S: Clone> Env<S> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, v: Var, value: S) -> Self {
        self.vals[v.index()] = Some(value);
        self
    }

    pub fn set(&mut self, v: Var, value: S) {
        self.vals[v.index()] = Some(value);
    }

    pub fn get(&self, v: Var) -> Option<&S> {
        self.vals[v.index()].as_ref()
    }
}

impl Env<f64> {
    pub fn xyz(p: [f64; 3]) -> Self {
        Env::new()
            .with(Var::X1, p[0])
            .with(Var::X2, p[1])
            .with(Var::X3, p[2])
    }

    /// Lifts to jets: the variables in `wrt` become jet slots, every other
    /// bound variable a constant.
    pub fn to_jets(&self, wrt: &[Var], order: u8) -> Result<Env<Jet>> {
        assert!(wrt.len() <= JET_VARS, "at most {JET_VARS} jet variables");
        let mut out = Env::new();
        for v in Var::ALL {
            if let Some(x) = self.get(v) {
                out.set(v, Jet::constant(*x));
            }
        }
        for (slot, v) in wrt.iter().enumerate() {
            let x = *self
                .get(*v)
                .ok_or_else(|| Error::UnboundVariable(v.name().to_string()))?;
            out.set(*v, Jet::variable(x, slot, order));
        }
        Ok(out)
    }
}

impl Expr {
    pub fn parse(src: &str) -> Result<Expr> {
        Ok(parse(src)?)
    }

    pub fn constant(v: f64) -> Expr {
        Expr::Const(v)
    }

    pub fn var(v: Var) -> Expr {
        Expr::Var(v)
    }

    pub fn eval<S: Scalar>(&self, env: &Env<S>) -> Result<S> {
        Ok(match self {
            Expr::Const(c) => S::constant(*c),
            Expr::Var(v) => env
                .get(*v)
                .cloned()
                .ok_or_else(|| Error::UnboundVariable(v.name().to_string()))?,
            Expr::Add(a, b) => a.eval(env)?.add(&b.eval(env)?),
            Expr::Sub(a, b) => a.eval(env)?.sub(&b.eval(env)?),
            Expr::Mul(a, b) => a.eval(env)?.mul(&b.eval(env)?),
            Expr::Div(a, b) => a.eval(env)?.div(&b.eval(env)?)?,
            Expr::Neg(a) => a.eval(env)?.neg(),
            Expr::Pow(a, n) => a.eval(env)?.powi(*n)?,
            Expr::Func(f, a) => {
                let x = a.eval(env)?;
                match f {
                    Func::Exp => x.exp(),
                    Func::Log => x.ln()?,
                    Func::Sin => x.sin(),
                    Func::Cos => x.cos(),
                    Func::Sqrt => x.sqrt()?,
                }
            }
        })
    }

    pub fn eval_f64(&self, env: &Env<f64>) -> Result<f64> {
        self.eval(env)
    }

    /// Order-3 jet with respect to `wrt` (slot order follows the slice).
    pub fn eval_jet3(&self, env: &Env<f64>, wrt: &[Var]) -> Result<Jet> {
        self.eval(&env.to_jets(wrt, JET_ORDER)?)
    }

    /// Jet in `(x1, x2, x3)` at a point.
    pub fn jet_xyz(&self, p: [f64; 3]) -> Result<Jet> {
        self.eval_jet3(&Env::xyz(p), &Var::XYZ)
    }

    /// Jet in `t` (slot 0).
    pub fn jet_t(&self, t: f64) -> Result<Jet> {
        self.eval_jet3(&Env::new().with(Var::T, t), &[Var::T])
    }

    /// Jet in `(u1, u2)` (slots 0, 1).
    pub fn jet_u(&self, u1: f64, u2: f64) -> Result<Jet> {
        self.eval_jet3(
            &Env::new().with(Var::U1, u1).with(Var::U2, u2),
            &[Var::U1, Var::U2],
        )
    }

    pub fn free_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<Var>) {
        match self {
            Expr::Const(_) => {}
            Expr::Var(v) => {
                out.insert(*v);
            }
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Func(_, a) => a.collect_vars(out),
        }
    }

    /// Replaces every occurrence of `v` with `with`.
    pub fn substitute(&self, v: Var, with: &Expr) -> Expr {
        let s = |e: &Expr| Box::new(e.substitute(v, with));
        match self {
            Expr::Const(_) => self.clone(),
            Expr::Var(w) if *w == v => with.clone(),
            Expr::Var(_) => self.clone(),
            Expr::Add(a, b) => Expr::Add(s(a), s(b)),
            Expr::Sub(a, b) => Expr::Sub(s(a), s(b)),
            Expr::Mul(a, b) => Expr::Mul(s(a), s(b)),
            Expr::Div(a, b) => Expr::Div(s(a), s(b)),
            Expr::Neg(a) => Expr::Neg(s(a)),
            Expr::Pow(a, n) => Expr::Pow(s(a), *n),
            Expr::Func(f, a) => Expr::Func(*f, s(a)),
        }
    }

    /// Simultaneous substitution of several variables.
    pub fn substitute_all(&self, map: &[(Var, &Expr)]) -> Expr {
        match self {
            Expr::Var(w) => map
                .iter()
                .find(|(v, _)| v == w)
                .map_or_else(|| self.clone(), |(_, e)| (*e).clone()),
            Expr::Const(_) => self.clone(),
            Expr::Add(a, b) => Expr::Add(
                Box::new(a.substitute_all(map)),
                Box::new(b.substitute_all(map)),
            ),
            Expr::Sub(a, b) => Expr::Sub(
                Box::new(a.substitute_all(map)),
                Box::new(b.substitute_all(map)),
            ),
            Expr::Mul(a, b) => Expr::Mul(
                Box::new(a.substitute_all(map)),
                Box::new(b.substitute_all(map)),
            ),
            Expr::Div(a, b) => Expr::Div(
                Box::new(a.substitute_all(map)),
                Box::new(b.substitute_all(map)),
            ),
            Expr::Neg(a) => Expr::Neg(Box::new(a.substitute_all(map))),
            Expr::Pow(a, n) => Expr::Pow(Box::new(a.substitute_all(map)), *n),
            Expr::Func(f, a) => Expr::Func(*f, Box::new(a.substitute_all(map))),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Neg(_) => 3,
            Expr::Const(c) if c.is_sign_negative() => 3,
            Expr::Pow(..) => 4,
            _ => 5,
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        if self.precedence() < min {
            write!(f, "(")?;
            self.fmt_prec(f, 0)?;
            return write!(f, ")");
        }
        match self {
            Expr::Const(c) => write!(f, "{c:?}"),
            Expr::Var(v) => write!(f, "{}", v.name()),
            Expr::Add(a, b) => {
                a.fmt_prec(f, 1)?;
                write!(f, " + ")?;
                b.fmt_prec(f, 2)
            }
            Expr::Sub(a, b) => {
                a.fmt_prec(f, 1)?;
                write!(f, " - ")?;
                b.fmt_prec(f, 2)
            }
            Expr::Mul(a, b) => {
                a.fmt_prec(f, 2)?;
                write!(f, "*")?;
                b.fmt_prec(f, 3)
            }
            Expr::Div(a, b) => {
                a.fmt_prec(f, 2)?;
                write!(f, "/")?;
                b.fmt_prec(f, 3)
            }
            Expr::Neg(a) => {
                write!(f, "-")?;
                // a negative literal here would fold on reparse
                let min = if matches!(**a, Expr::Const(_)) { 6 } else { 3 };
                a.fmt_prec(f, min)
            }
            Expr::Pow(a, n) => {
                a.fmt_prec(f, 5)?;
                write!(f, "^{n}")
            }
            Expr::Func(func, a) => {
                write!(f, "{}(", func.name())?;
                a.fmt_prec(f, 0)?;
                write!(f, ")")
            }
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

impl std::str::FromStr for Expr {
    type Err = ParseError;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        parse(s)
    }
}
