//! Expression trees for metric components.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::Result;
use crate::jets::{jet_elementary, ElemFn, Jet};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

/// Elementary functions admitted by the grammar.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MathFn {
    Sin,
    Cos,
    Tan,
    Exp,
    Log,
    Sqrt,
    Sinh,
    Cosh,
    Tanh,
}

impl MathFn {
    pub fn from_name(name: &str) -> Option<MathFn> {
        Some(match name {
            "sin" => MathFn::Sin,
            "cos" => MathFn::Cos,
            "tan" => MathFn::Tan,
            "exp" => MathFn::Exp,
            "log" => MathFn::Log,
            "sqrt" => MathFn::Sqrt,
            "sinh" => MathFn::Sinh,
            "cosh" => MathFn::Cosh,
            "tanh" => MathFn::Tanh,
            _ => return None,
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            MathFn::Sin => "sin",
            MathFn::Cos => "cos",
            MathFn::Tan => "tan",
            MathFn::Exp => "exp",
            MathFn::Log => "log",
            MathFn::Sqrt => "sqrt",
            MathFn::Sinh => "sinh",
            MathFn::Cosh => "cosh",
            MathFn::Tanh => "tanh",
        }
    }

    fn elem(&self) -> ElemFn {
        match self {
            MathFn::Sin => ElemFn::Sin,
            MathFn::Cos => ElemFn::Cos,
            MathFn::Tan => ElemFn::Tan,
            MathFn::Exp => ElemFn::Exp,
            MathFn::Log => ElemFn::Log,
            MathFn::Sqrt => ElemFn::Sqrt,
            MathFn::Sinh => ElemFn::Sinh,
            MathFn::Cosh => ElemFn::Cosh,
            MathFn::Tanh => ElemFn::Tanh,
        }
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        match self {
            MathFn::Sin => x.sin(),
            MathFn::Cos => x.cos(),
            MathFn::Tan => x.tan(),
            MathFn::Exp => x.exp(),
            MathFn::Log => x.ln(),
            MathFn::Sqrt => x.sqrt(),
            MathFn::Sinh => x.sinh(),
            MathFn::Cosh => x.cosh(),
            MathFn::Tanh => x.tanh(),
        }
    }
}

/// Metric component expression.
///
/// Numeric literals are stored non-negative except when the parser folds a
/// leading unary minus into them, so `Display` and the parser round-trip
/// structurally.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Ident(String),
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Call(MathFn, Box<Expr>),
}

/// Evaluation context: coordinates and parameters as jets, plus the raw
/// parameter values for constant-folding exponents.
pub struct JetEnv<'a> {
    pub vars: &'a BTreeMap<String, Jet>,
    pub params: &'a BTreeMap<String, f64>,
    pub dim: usize,
    pub order: usize,
}

impl Expr {
    /// Constant value, when the subtree involves only literals and parameters.
    pub fn const_value(&self, params: &BTreeMap<String, f64>) -> Option<f64> {
        match self {
            Expr::Num(v) => Some(*v),
            Expr::Ident(name) => params.get(name).copied(),
            Expr::Neg(e) => e.const_value(params).map(|v| -v),
            Expr::Bin(op, l, r) => {
                let (a, b) = (l.const_value(params)?, r.const_value(params)?);
                Some(match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => a / b,
                    BinOp::Pow => a.powf(b),
                })
            }
            Expr::Call(f, e) => e.const_value(params).map(|v| f.eval_f64(v)),
        }
    }

    pub fn eval_jet(&self, env: &JetEnv) -> Result<Jet> {
        match self {
            Expr::Num(v) => Jet::constant(env.dim, env.order, *v),
            Expr::Ident(name) => Ok(env.vars[name].clone()),
            Expr::Neg(e) => Ok(e.eval_jet(env)?.neg()),
            Expr::Bin(BinOp::Pow, base, exp) => {
                let b = base.eval_jet(env)?;
                match exp.const_value(env.params) {
                    Some(p) if p.fract() == 0.0 && p.abs() <= 12.0 => b.powi(p as i64),
                    Some(p) => jet_elementary(&b, ElemFn::PowConst(p)),
                    None => {
                        // variable exponent: exp(e * log(b)), base must be positive
                        let e = exp.eval_jet(env)?;
                        let lb = jet_elementary(&b, ElemFn::Log)?;
                        jet_elementary(&e.mul(&lb)?, ElemFn::Exp)
                    }
                }
            }
            Expr::Bin(op, l, r) => {
                let (a, b) = (l.eval_jet(env)?, r.eval_jet(env)?);
                match op {
                    BinOp::Add => a.add(&b),
                    BinOp::Sub => a.sub(&b),
                    BinOp::Mul => a.mul(&b),
                    BinOp::Div => a.div(&b),
                    BinOp::Pow => unreachable!(),
                }
            }
            Expr::Call(f, e) => jet_elementary(&e.eval_jet(env)?, f.elem()),
        }
    }

    pub fn collect_idents<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            Expr::Num(_) => {}
            Expr::Ident(name) => out.push(name),
            Expr::Neg(e) | Expr::Call(_, e) => e.collect_idents(out),
            Expr::Bin(_, l, r) => {
                l.collect_idents(out);
                r.collect_idents(out);
            }
        }
    }

    /// Grammar level: additive 0, multiplicative 1, power 2, unary 3, atom 4.
    fn level(&self) -> u8 {
        match self {
            Expr::Bin(BinOp::Add | BinOp::Sub, ..) => 0,
            Expr::Bin(BinOp::Mul | BinOp::Div, ..) => 1,
            Expr::Bin(BinOp::Pow, ..) => 2,
            Expr::Neg(_) => 3,
            Expr::Num(_) | Expr::Ident(_) | Expr::Call(..) => 4,
        }
    }

    fn fmt_at(&self, min: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.level() < min {
            write!(f, "(")?;
            self.fmt_at(0, f)?;
            return write!(f, ")");
        }
        match self {
            Expr::Num(v) => write!(f, "{v}"),
            Expr::Ident(name) => write!(f, "{name}"),
            Expr::Neg(e) => {
                write!(f, "-")?;
                e.fmt_at(3, f)
            }
            Expr::Bin(op, l, r) => match op {
                BinOp::Add | BinOp::Sub => {
                    l.fmt_at(0, f)?;
                    write!(f, "{}", if *op == BinOp::Add { "+" } else { "-" })?;
                    r.fmt_at(1, f)
                }
                BinOp::Mul | BinOp::Div => {
                    l.fmt_at(1, f)?;
                    write!(f, "{}", if *op == BinOp::Mul { "*" } else { "/" })?;
                    r.fmt_at(2, f)
                }
                BinOp::Pow => {
                    // right-associative; the base sits at unary level
                    l.fmt_at(3, f)?;
                    write!(f, "^")?;
                    r.fmt_at(2, f)
                }
            },
            Expr::Call(fun, e) => {
                write!(f, "{}(", fun.name())?;
                e.fmt_at(0, f)?;
                write!(f, ")")
            }
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_at(0, f)
    }
}
