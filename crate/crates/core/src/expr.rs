//! Expression trees evaluated over `f64` or over jets.

use alloc::boxed::Box;
use core::fmt;

use crate::jet::Jet;

/// Arithmetic shared by `f64` and [`Jet`].
pub trait Scalar: Clone {
    /// A constant living in the same space as `self`.
    fn lift(&self, c: f64) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn div(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn exp(&self) -> Self;
    fn ln(&self) -> Self;
    fn powi(&self, e: i32) -> Self;
}

impl Scalar for f64 {
    fn lift(&self, c: f64) -> Self {
        c
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
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn exp(&self) -> Self {
        libm::exp(*self)
    }
    fn ln(&self) -> Self {
        libm::log(*self)
    }
    fn powi(&self, e: i32) -> Self {
        libm::pow(*self, f64::from(e))
    }
}

impl Scalar for Jet<'_> {
    fn lift(&self, c: f64) -> Self {
        self.algebra().constant(c)
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
    fn div(&self, o: &Self) -> Self {
        Jet::div(self, o)
    }
    fn neg(&self) -> Self {
        self.scale(-1.0)
    }
    fn exp(&self) -> Self {
        Jet::exp(self)
    }
    fn ln(&self) -> Self {
        Jet::ln(self)
    }
    fn powi(&self, e: i32) -> Self {
        Jet::powi(self, e)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    /// Zero-based variable index.
    Var(usize),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    Pow(Box<Expr>, i32),
    Exp(Box<Expr>),
    Ln(Box<Expr>),
}

impl Expr {
    /// Evaluates with `vars[i]` bound to `Var(i)`. `vars` must be nonempty and
    /// cover every variable index (see [`Expr::max_var`]).
    pub fn eval<S: Scalar>(&self, vars: &[S]) -> S {
        match self {
            Expr::Const(c) => vars[0].lift(*c),
            Expr::Var(i) => vars[*i].clone(),
            Expr::Add(a, b) => a.eval(vars).add(&b.eval(vars)),
            Expr::Sub(a, b) => a.eval(vars).sub(&b.eval(vars)),
            Expr::Mul(a, b) => a.eval(vars).mul(&b.eval(vars)),
            Expr::Div(a, b) => a.eval(vars).div(&b.eval(vars)),
            Expr::Neg(a) => a.eval(vars).neg(),
            Expr::Pow(a, e) => a.eval(vars).powi(*e),
            Expr::Exp(a) => a.eval(vars).exp(),
            Expr::Ln(a) => a.eval(vars).ln(),
        }
    }

    pub fn max_var(&self) -> Option<usize> {
        match self {
            Expr::Const(_) => None,
            Expr::Var(i) => Some(*i),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                match (a.max_var(), b.max_var()) {
                    (Some(x), Some(y)) => Some(x.max(y)),
                    (x, y) => x.or(y),
                }
            }
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Exp(a) | Expr::Ln(a) => a.max_var(),
        }
    }

    pub fn var(i: usize) -> Self {
        Expr::Var(i)
    }

    pub fn add(self, o: Expr) -> Self {
        Expr::Add(Box::new(self), Box::new(o))
    }

    pub fn sub(self, o: Expr) -> Self {
        Expr::Sub(Box::new(self), Box::new(o))
    }

    pub fn mul(self, o: Expr) -> Self {
        Expr::Mul(Box::new(self), Box::new(o))
    }

    pub fn div(self, o: Expr) -> Self {
        Expr::Div(Box::new(self), Box::new(o))
    }

    pub fn pow(self, e: i32) -> Self {
        Expr::Pow(Box::new(self), e)
    }

    pub fn exp(self) -> Self {
        Expr::Exp(Box::new(self))
    }

    pub fn ln(self) -> Self {
        Expr::Ln(Box::new(self))
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => write!(f, "{c}"),
            Expr::Var(i) => write!(f, "mu{}", i + 1),
            Expr::Add(a, b) => write!(f, "({a} + {b})"),
            Expr::Sub(a, b) => write!(f, "({a} - {b})"),
            Expr::Mul(a, b) => write!(f, "({a} * {b})"),
            Expr::Div(a, b) => write!(f, "({a} / {b})"),
            Expr::Neg(a) => write!(f, "(-{a})"),
            Expr::Pow(a, e) => write!(f, "{a}^{e}"),
            Expr::Exp(a) => write!(f, "exp({a})"),
            Expr::Ln(a) => write!(f, "log({a})"),
        }
    }
}
