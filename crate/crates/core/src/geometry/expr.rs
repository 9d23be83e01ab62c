//! A small scalar expression language used for matrix entries and explicit closed forms.

use std::ops;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{BigScalar, Real};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum Expr {
    /// A binary constant, exact at any precision.
    Const { value: f64 },
    /// A decimal constant parsed at evaluation precision.
    Dec { value: String },
    Pi,
    Var { index: usize },
    Neg { arg: Box<Expr> },
    Add { a: Box<Expr>, b: Box<Expr> },
    Sub { a: Box<Expr>, b: Box<Expr> },
    Mul { a: Box<Expr>, b: Box<Expr> },
    Div { a: Box<Expr>, b: Box<Expr> },
    Powi { arg: Box<Expr>, n: i32 },
    Sqrt { arg: Box<Expr> },
    Exp { arg: Box<Expr> },
    Ln { arg: Box<Expr> },
    Sin { arg: Box<Expr> },
    Cos { arg: Box<Expr> },
    Atan2 { y: Box<Expr>, x: Box<Expr> },
}

pub fn c(value: f64) -> Expr {
    Expr::Const { value }
}

pub fn var(index: usize) -> Expr {
    Expr::Var { index }
}

pub fn dec(value: &str) -> Expr {
    Expr::Dec { value: value.to_string() }
}

impl Expr {
    pub fn as_const(&self) -> Option<f64> {
        match self {
            Expr::Const { value } => Some(*value),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.as_const() == Some(0.0)
    }

    /// Largest variable index used, if any.
    pub fn max_var(&self) -> Option<usize> {
        match self {
            Expr::Const { .. } | Expr::Dec { .. } | Expr::Pi => None,
            Expr::Var { index } => Some(*index),
            Expr::Neg { arg }
            | Expr::Powi { arg, .. }
            | Expr::Sqrt { arg }
            | Expr::Exp { arg }
            | Expr::Ln { arg }
            | Expr::Sin { arg }
            | Expr::Cos { arg } => arg.max_var(),
            Expr::Add { a, b } | Expr::Sub { a, b } | Expr::Mul { a, b } | Expr::Div { a, b } => {
                a.max_var().max(b.max_var())
            }
            Expr::Atan2 { y, x } => y.max_var().max(x.max_var()),
        }
    }

    pub fn powi(self, n: i32) -> Expr {
        match self.as_const() {
            Some(v) if n >= 0 && v.powi(n).is_finite() && (v == v.trunc()) => c(v.powi(n)),
            _ => Expr::Powi { arg: Box::new(self), n },
        }
    }

    pub fn sqrt(self) -> Expr {
        Expr::Sqrt { arg: Box::new(self) }
    }

    pub fn exp(self) -> Expr {
        Expr::Exp { arg: Box::new(self) }
    }

    pub fn ln(self) -> Expr {
        Expr::Ln { arg: Box::new(self) }
    }

    pub fn sin(self) -> Expr {
        Expr::Sin { arg: Box::new(self) }
    }

    pub fn cos(self) -> Expr {
        Expr::Cos { arg: Box::new(self) }
    }

    pub fn atan2(y: Expr, x: Expr) -> Expr {
        Expr::Atan2 { y: Box::new(y), x: Box::new(x) }
    }

    pub fn eval(&self, vars: &[Real], bits: usize) -> Result<Real> {
        Ok(match self {
            Expr::Const { value } => Real::from_f64(*value, bits),
            Expr::Dec { value } => Real::from_big(BigScalar::parse(value, bits)?),
            Expr::Pi => Real::from_big(BigScalar::pi(bits)),
            Expr::Var { index } => vars
                .get(*index)
                .cloned()
                .ok_or_else(|| Error::Dimension(format!("expression uses x{index} but the point has {} coordinates", vars.len())))?,
            Expr::Neg { arg } => arg.eval(vars, bits)?.neg(),
            Expr::Add { a, b } => a.eval(vars, bits)?.add(&b.eval(vars, bits)?)?,
            Expr::Sub { a, b } => a.eval(vars, bits)?.sub(&b.eval(vars, bits)?)?,
            Expr::Mul { a, b } => a.eval(vars, bits)?.mul(&b.eval(vars, bits)?)?,
            Expr::Div { a, b } => a.eval(vars, bits)?.div(&b.eval(vars, bits)?)?,
            Expr::Powi { arg, n } => arg.eval(vars, bits)?.powi(*n)?,
            Expr::Sqrt { arg } => arg.eval(vars, bits)?.sqrt()?,
            Expr::Exp { arg } => arg.eval(vars, bits)?.exp()?,
            Expr::Ln { arg } => arg.eval(vars, bits)?.ln()?,
            Expr::Sin { arg } => arg.eval(vars, bits)?.sin()?,
            Expr::Cos { arg } => arg.eval(vars, bits)?.cos()?,
            Expr::Atan2 { y, x } => Real::atan2(&y.eval(vars, bits)?, &x.eval(vars, bits)?)?,
        })
    }

    /// Evaluates a constant expression as `f64`.
    pub fn const_f64(&self) -> Result<f64> {
        if self.max_var().is_some() {
            return Err(Error::Unsupported("expression is not constant".into()));
        }
        Ok(self.eval(&[], 128)?.to_f64())
    }
}

impl From<f64> for Expr {
    fn from(value: f64) -> Self {
        c(value)
    }
}

impl From<i64> for Expr {
    fn from(value: i64) -> Self {
        c(value as f64)
    }
}

impl ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        match self {
            Expr::Const { value } => c(-value),
            Expr::Neg { arg } => *arg,
            e => Expr::Neg { arg: Box::new(e) },
        }
    }
}

impl ops::Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        match (self.as_const(), rhs.as_const()) {
            (Some(0.0), _) => rhs,
            (_, Some(0.0)) => self,
            (Some(a), Some(b)) if (a + b) - a == b => c(a + b),
            _ => Expr::Add { a: Box::new(self), b: Box::new(rhs) },
        }
    }
}

impl ops::Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        match (self.as_const(), rhs.as_const()) {
            (_, Some(0.0)) => self,
            (Some(0.0), _) => -rhs,
            (Some(a), Some(b)) if a - (a - b) == b => c(a - b),
            _ => Expr::Sub { a: Box::new(self), b: Box::new(rhs) },
        }
    }
}

impl ops::Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        match (self.as_const(), rhs.as_const()) {
            (Some(0.0), _) | (_, Some(0.0)) => c(0.0),
            (Some(1.0), _) => rhs,
            (_, Some(1.0)) => self,
            (Some(-1.0), _) => -rhs,
            (_, Some(-1.0)) => -self,
            (Some(a), Some(b)) if a == a.trunc() && b == b.trunc() && (a * b).abs() < 2f64.powi(52) => c(a * b),
            _ => Expr::Mul { a: Box::new(self), b: Box::new(rhs) },
        }
    }
}

impl ops::Div for Expr {
    type Output = Expr;
    fn div(self, rhs: Expr) -> Expr {
        match (self.as_const(), rhs.as_const()) {
            (Some(0.0), _) => c(0.0),
            (_, Some(1.0)) => self,
            (_, Some(-1.0)) => -self,
            _ => Expr::Div { a: Box::new(self), b: Box::new(rhs) },
        }
    }
}

/// Determinant of a square matrix of expressions (cofactor expansion).
pub fn det(m: &[Vec<Expr>]) -> Expr {
    let n = m.len();
    match n {
        0 => c(1.0),
        1 => m[0][0].clone(),
        _ => {
            let mut acc = c(0.0);
            for j in 0..n {
                if m[0][j].is_zero() {
                    continue;
                }
                let term = m[0][j].clone() * det(&minor(m, 0, j));
                acc = if j % 2 == 0 { acc + term } else { acc - term };
            }
            acc
        }
    }
}

fn minor(m: &[Vec<Expr>], row: usize, col: usize) -> Vec<Vec<Expr>> {
    m.iter()
        .enumerate()
        .filter(|(i, _)| *i != row)
        .map(|(_, r)| r.iter().enumerate().filter(|(j, _)| *j != col).map(|(_, e)| e.clone()).collect())
        .collect()
}

/// Symbolic inverse via the adjugate; `None` when the determinant is the constant 0.
pub fn inverse(m: &[Vec<Expr>]) -> Option<Vec<Vec<Expr>>> {
    let n = m.len();
    let d = det(m);
    if d.is_zero() {
        return None;
    }
    let mut out = vec![vec![c(0.0); n]; n];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, entry) in row.iter_mut().enumerate() {
            let cof = det(&minor(m, j, i));
            let cof = if (i + j) % 2 == 0 { cof } else { -cof };
            *entry = cof / d.clone();
        }
    }
    Some(out)
}
