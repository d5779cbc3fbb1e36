//! Component-expression DSL: parsing, jet evaluation and a finite-difference oracle.

mod jet;
mod parse;

use std::fmt;

use thiserror::Error;

pub use jet::{Jet, JetFamily, MAX_DIM, MAX_ORDER};

use crate::scalar::Scalar;

/// Line/column (1-based) and byte offset of a location in expression source.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Position {
    pub offset: usize,
    pub line: usize,
    pub column: usize,
}

impl Position {
    pub fn locate(src: &str, offset: usize) -> Self {
        let before = &src[..offset.min(src.len())];
        let line = before.matches('\n').count() + 1;
        let column = before.rfind('\n').map_or(before.chars().count(), |nl| before[nl + 1..].chars().count()) + 1;
        Self { offset, line, column }
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {} (byte {})", self.line, self.column, self.offset)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExprError {
    #[error("syntax error at {at}: {message}")]
    Syntax { at: Position, message: String },
    #[error("unknown identifier '{name}' at {at}")]
    UnknownIdentifier { name: String, at: Position },
    #[error("unknown function '{name}' at {at}")]
    UnknownFunction { name: String, at: Position },
    #[error("pow exponent must be constant (at {at})")]
    NonConstantExponent { at: Position },
    #[error("duplicate variable name '{0}'")]
    DuplicateVariable(String),
    #[error("domain violation in `{subexpr}`: {reason}")]
    Domain { subexpr: String, reason: String },
    #[error("point has {got} coordinates, expression expects {expected}")]
    PointDimension { expected: usize, got: usize },
    #[error("jet order {0} outside the supported range")]
    Order(usize),
    #[error("finite-difference step must be positive")]
    Step,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Exp,
    Log,
    Sin,
    Cos,
    Sqrt,
}

impl Func {
    fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Sqrt => "sqrt",
        }
    }
}

/// Expression tree node. Variables and parameters are indices into the owning [`Expr`].
#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Const(f64),
    Var(usize),
    Param(usize),
    Neg(Box<Node>),
    Binary(BinOp, Box<Node>, Box<Node>),
    Call(Func, Box<Node>),
    /// Base and a variable-free exponent.
    Pow(Box<Node>, Box<Node>),
}

impl Node {
    /// True when no chart variable occurs in the subtree.
    pub fn is_constant(&self) -> bool {
        match self {
            Node::Const(_) | Node::Param(_) => true,
            Node::Var(_) => false,
            Node::Neg(a) | Node::Call(_, a) => a.is_constant(),
            Node::Binary(_, a, b) | Node::Pow(a, b) => a.is_constant() && b.is_constant(),
        }
    }
}

/// How parameters are bound at parse time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ParamMode {
    /// Replace parameters by their values.
    Substitute,
    /// Keep parameter nodes; values are looked up at evaluation.
    #[default]
    Retain,
}

/// A parsed, immutable expression over a fixed list of chart variables.
#[derive(Debug, Clone, PartialEq)]
pub struct Expr {
    root: Node,
    vars: Vec<String>,
    params: Vec<(String, f64)>,
}

/// Parses `src` against chart variables `vars` and named parameters.
pub fn parse_expression(
    src: &str,
    vars: &[String],
    params: &[(String, f64)],
    mode: ParamMode,
) -> Result<Expr, ExprError> {
    for (i, v) in vars.iter().enumerate() {
        if vars[..i].contains(v) {
            return Err(ExprError::DuplicateVariable(v.clone()));
        }
    }
    let scope = parse::Scope {
        vars,
        params,
        substitute: mode == ParamMode::Substitute,
    };
    let root = parse::Parser::new(src, scope)?.parse()?;
    Ok(Expr {
        root,
        vars: vars.to_vec(),
        params: params.to_vec(),
    })
}

impl Expr {
    pub fn root(&self) -> &Node {
        &self.root
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn dim(&self) -> usize {
        self.vars.len()
    }

    /// Plain evaluation at a point.
    pub fn eval<S: Scalar>(&self, point: &[S]) -> Result<S, ExprError> {
        Ok(self.eval_jet(point, 0)?.value())
    }

    /// Evaluates the expression as a jet of the given order at `point`.
    pub fn eval_jet<S: Scalar>(&self, point: &[S], order: usize) -> Result<Jet<S>, ExprError> {
        if order > MAX_ORDER {
            return Err(ExprError::Order(order));
        }
        if point.len() != self.dim() {
            return Err(ExprError::PointDimension {
                expected: self.dim(),
                got: point.len(),
            });
        }
        self.eval_node(&self.root, point, order)
    }

    fn domain(&self, node: &Node, reason: &str) -> ExprError {
        ExprError::Domain {
            subexpr: self.render(node),
            reason: reason.to_string(),
        }
    }

    fn eval_node<S: Scalar>(&self, node: &Node, point: &[S], order: usize) -> Result<Jet<S>, ExprError> {
        let dim = point.len();
        Ok(match node {
            Node::Const(v) => Jet::constant(S::lit(*v), dim, order),
            Node::Param(i) => Jet::constant(S::lit(self.params[*i].1), dim, order),
            Node::Var(i) => Jet::variable(point[*i], *i, dim, order),
            Node::Neg(a) => -self.eval_node(a, point, order)?,
            Node::Binary(op, a, b) => {
                let a = self.eval_node(a, point, order)?;
                let b_jet = self.eval_node(b, point, order)?;
                match op {
                    BinOp::Add => a + b_jet,
                    BinOp::Sub => a - b_jet,
                    BinOp::Mul => a * b_jet,
                    BinOp::Div => {
                        let r = b_jet.recip().ok_or_else(|| self.domain(b, "division by zero"))?;
                        a * r
                    }
                }
            }
            Node::Call(func, a) => {
                let x = self.eval_node(a, point, order)?;
                match func {
                    Func::Exp => x.exp(),
                    Func::Sin => x.sin(),
                    Func::Cos => x.cos(),
                    Func::Log => x.ln().ok_or_else(|| self.domain(a, "log of a non-positive value"))?,
                    Func::Sqrt => x.sqrt().ok_or_else(|| self.domain(a, "sqrt of a non-positive value"))?,
                }
            }
            Node::Pow(base, exponent) => {
                let p = self.eval_node(exponent, point, 0)?.value();
                let b = self.eval_node(base, point, order)?;
                b.powf(p)
                    .ok_or_else(|| self.domain(node, "power outside its real domain"))?
            }
        })
    }

    /// Source text of a subtree, parseable against the same variables and parameters.
    pub fn render(&self, node: &Node) -> String {
        let mut out = String::new();
        self.write_node(node, 0, &mut out);
        out
    }

    fn write_node(&self, node: &Node, parent_prec: u8, out: &mut String) {
        // precedence: 1 additive, 2 multiplicative, 3 unary, 4 atom
        let prec = match node {
            Node::Binary(BinOp::Add | BinOp::Sub, ..) => 1,
            Node::Binary(BinOp::Mul | BinOp::Div, ..) => 2,
            Node::Neg(_) => 3,
            Node::Const(v) if *v < 0.0 || v.is_sign_negative() => 3,
            _ => 4,
        };
        let wrap = prec < parent_prec;
        if wrap {
            out.push('(');
        }
        match node {
            Node::Const(v) => out.push_str(&format!("{v:?}")),
            Node::Var(i) => out.push_str(&self.vars[*i]),
            Node::Param(i) => out.push_str(&self.params[*i].0),
            Node::Neg(a) => {
                out.push('-');
                self.write_node(a, 3, out);
            }
            Node::Binary(op, a, b) => {
                let sym = match op {
                    BinOp::Add => " + ",
                    BinOp::Sub => " - ",
                    BinOp::Mul => " * ",
                    BinOp::Div => " / ",
                };
                self.write_node(a, prec, out);
                out.push_str(sym);
                // right operand binds tighter to keep left associativity
                self.write_node(b, prec + 1, out);
            }
            Node::Call(func, a) => {
                out.push_str(func.name());
                out.push('(');
                self.write_node(a, 0, out);
                out.push(')');
            }
            Node::Pow(a, b) => {
                out.push_str("pow(");
                self.write_node(a, 0, out);
                out.push_str(", ");
                self.write_node(b, 0, out);
                out.push(')');
            }
        }
        if wrap {
            out.push(')');
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(&self.root))
    }
}

/// Central-difference estimate of the jet of `expr` at `point` (order 1 or 2).
///
/// Used as an independent oracle for [`Expr::eval_jet`]; it only ever calls
/// plain evaluation.
pub fn fd_jet<S: Scalar>(expr: &Expr, point: &[S], order: usize, h: S) -> Result<Jet<S>, ExprError> {
    if !(1..=2).contains(&order) {
        return Err(ExprError::Order(order));
    }
    if !(h > S::zero()) {
        return Err(ExprError::Step);
    }
    let dim = expr.dim();
    if point.len() != dim {
        return Err(ExprError::PointDimension { expected: dim, got: point.len() });
    }
    let at = |offsets: &[(usize, S)]| -> Result<S, ExprError> {
        let mut p = point.to_vec();
        for &(i, d) in offsets {
            p[i] = p[i] + d;
        }
        expr.eval(&p)
    };
    let two = S::lit(2.0);
    let f0 = at(&[])?;
    let family = JetFamily::get(dim);
    let mut coeffs = vec![S::zero(); family.len(order)];
    coeffs[0] = f0;
    let mut plus = vec![S::zero(); dim];
    let mut minus = vec![S::zero(); dim];
    for i in 0..dim {
        plus[i] = at(&[(i, h)])?;
        minus[i] = at(&[(i, -h)])?;
        coeffs[1 + i] = (plus[i] - minus[i]) / (two * h);
    }
    if order == 2 {
        for i in 0..dim {
            for j in i..dim {
                let mut exps = vec![0u8; dim];
                exps[i] += 1;
                exps[j] += 1;
                let idx = family.index_of(&exps).expect("degree-2 monomial");
                // Taylor coefficient: ∂²f/2 on the diagonal, ∂²f off it
                coeffs[idx] = if i == j {
                    (plus[i] - two * f0 + minus[i]) / (two * h * h)
                } else {
                    let pp = at(&[(i, h), (j, h)])?;
                    let pm = at(&[(i, h), (j, -h)])?;
                    let mp = at(&[(i, -h), (j, h)])?;
                    let mm = at(&[(i, -h), (j, -h)])?;
                    (pp - pm - mp + mm) / (S::lit(4.0) * h * h)
                };
            }
        }
    }
    Ok(Jet::from_taylor(dim, order, coeffs))
}
