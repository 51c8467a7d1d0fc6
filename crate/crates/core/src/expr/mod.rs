//! Analytic coordinate expressions such as `x[0]*x[0]*(1-x[0])`.
//!
//! Grammar, loosest binding first:
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := primary ('^' unary)?          right associative
//! primary := number | 'pi' | 'x' '[' digits ']'
//!          | func '(' expr ')' | '(' expr ')'
//! func    := 'sin' | 'cos' | 'exp' | 'sqrt'
//! ```

mod parser;

use std::fmt;

use thiserror::Error;

pub use parser::parse;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExprError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("coordinate x[{index}] is out of range for a {dim}D expression")]
    Dimension { index: usize, dim: usize },
    #[error("expression is {expected}D but the point has {got} coordinates")]
    PointDimension { expected: usize, got: usize },
    #[error("non-finite value {value} from subexpression `{subexpr}`")]
    NonFinite { subexpr: String, value: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Sqrt,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Sqrt => "sqrt",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        match name {
            "sin" => Some(Func::Sin),
            "cos" => Some(Func::Cos),
            "exp" => Some(Func::Exp),
            "sqrt" => Some(Func::Sqrt),
            _ => None,
        }
    }

    fn apply(self, v: f64) -> f64 {
        match self {
            Func::Sin => v.sin(),
            Func::Cos => v.cos(),
            Func::Exp => v.exp(),
            Func::Sqrt => v.sqrt(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
            BinOp::Pow => '^',
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Literal(f64),
    Pi,
    Coord(usize),
    Neg(Box<Node>),
    Binary(BinOp, Box<Node>, Box<Node>),
    Call(Func, Box<Node>),
}

impl Node {
    fn precedence(&self) -> u8 {
        match self {
            Node::Binary(BinOp::Add | BinOp::Sub, ..) => 1,
            Node::Binary(BinOp::Mul | BinOp::Div, ..) => 2,
            Node::Neg(_) => 3,
            Node::Binary(BinOp::Pow, ..) => 4,
            _ => 5,
        }
    }

    fn max_coord(&self) -> Option<usize> {
        match self {
            Node::Literal(_) | Node::Pi => None,
            Node::Coord(i) => Some(*i),
            Node::Neg(a) | Node::Call(_, a) => a.max_coord(),
            Node::Binary(_, a, b) => match (a.max_coord(), b.max_coord()) {
                (Some(x), Some(y)) => Some(x.max(y)),
                (x, y) => x.or(y),
            },
        }
    }

    /// Evaluates without finiteness checks.
    #[inline]
    fn value(&self, x: &[f64]) -> f64 {
        match self {
            Node::Literal(v) => *v,
            Node::Pi => std::f64::consts::PI,
            Node::Coord(i) => x[*i],
            Node::Neg(a) => -a.value(x),
            Node::Binary(op, a, b) => apply_binary(*op, a.value(x), b, x),
            Node::Call(f, a) => f.apply(a.value(x)),
        }
    }

    /// Evaluates, reporting the innermost subexpression that went non-finite.
    fn checked(&self, x: &[f64]) -> Result<f64, ExprError> {
        let v = match self {
            Node::Literal(v) => *v,
            Node::Pi => std::f64::consts::PI,
            Node::Coord(i) => x[*i],
            Node::Neg(a) => -a.checked(x)?,
            Node::Binary(op, a, b) => {
                let l = a.checked(x)?;
                b.checked(x)?;
                apply_binary(*op, l, b, x)
            }
            Node::Call(f, a) => f.apply(a.checked(x)?),
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(ExprError::NonFinite {
                subexpr: self.to_string(),
                value: v,
            })
        }
    }

    fn write(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Node::Literal(v) => write!(f, "{v}"),
            Node::Pi => f.write_str("pi"),
            Node::Coord(i) => write!(f, "x[{i}]"),
            Node::Neg(a) => {
                f.write_str("-")?;
                a.write_child(f, 3)
            }
            Node::Call(func, a) => {
                write!(f, "{}(", func.name())?;
                a.write(f)?;
                f.write_str(")")
            }
            Node::Binary(op, a, b) => {
                let (left, right) = match op {
                    BinOp::Add | BinOp::Sub => (1, 2),
                    BinOp::Mul | BinOp::Div => (2, 3),
                    BinOp::Pow => (5, 3),
                };
                a.write_child(f, left)?;
                write!(f, "{}", op.symbol())?;
                b.write_child(f, right)
            }
        }
    }

    fn write_child(&self, f: &mut fmt::Formatter<'_>, min_prec: u8) -> fmt::Result {
        if self.precedence() < min_prec {
            f.write_str("(")?;
            self.write(f)?;
            f.write_str(")")
        } else {
            self.write(f)
        }
    }
}

#[inline]
fn apply_binary(op: BinOp, l: f64, rhs: &Node, x: &[f64]) -> f64 {
    match op {
        BinOp::Add => l + rhs.value(x),
        BinOp::Sub => l - rhs.value(x),
        BinOp::Mul => l * rhs.value(x),
        BinOp::Div => l / rhs.value(x),
        BinOp::Pow => match rhs {
            Node::Literal(e) if e.fract() == 0.0 && e.abs() <= i32::MAX as f64 => l.powi(*e as i32),
            _ => l.powf(rhs.value(x)),
        },
    }
}

impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(f)
    }
}

/// A parsed expression over the coordinates `x[0..dim)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Expr {
    root: Node,
    dim: usize,
}

impl Expr {
    /// Wraps a tree, checking that every coordinate index is below `dim`.
    pub fn new(root: Node, dim: usize) -> Result<Self, ExprError> {
        if let Some(index) = root.max_coord() {
            if index >= dim {
                return Err(ExprError::Dimension { index, dim });
            }
        }
        Ok(Expr { root, dim })
    }

    pub fn root(&self) -> &Node {
        &self.root
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Evaluates at `point` (exactly `dim` coordinates). Non-finite results
    /// are errors naming the first subexpression that produced one.
    pub fn eval(&self, point: &[f64]) -> Result<f64, ExprError> {
        if point.len() != self.dim {
            return Err(ExprError::PointDimension {
                expected: self.dim,
                got: point.len(),
            });
        }
        let v = self.root.value(point);
        if v.is_finite() {
            Ok(v)
        } else {
            self.root.checked(point)
        }
    }

    /// Raw IEEE evaluation; `point` needs at least `dim` entries.
    #[inline]
    pub fn eval_unchecked(&self, point: &[f64]) -> f64 {
        self.root.value(point)
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.root.fmt(f)
    }
}

pub fn eval_expr(ast: &Expr, point: &[f64]) -> Result<f64, ExprError> {
    ast.eval(point)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn cubic_parses_to_expected_tree() {
        let e = parse("x[0] *x[0] *(1-x[0] )", 2).unwrap();
        let v = e.eval(&[2.0 / 3.0, 0.3]).unwrap();
        assert!((v - 4.0 / 27.0).abs() < 1e-15);
        let want = Node::Binary(
            BinOp::Mul,
            Box::new(Node::Binary(
                BinOp::Mul,
                Box::new(Node::Coord(0)),
                Box::new(Node::Coord(0)),
            )),
            Box::new(Node::Binary(
                BinOp::Sub,
                Box::new(Node::Literal(1.0)),
                Box::new(Node::Coord(0)),
            )),
        );
        assert_eq!(e.root(), &want);
    }

    #[test]
    fn precedence_and_associativity() {
        let ev = |s: &str| parse(s, 2).unwrap().eval(&[0.0, 0.0]).unwrap();
        assert_eq!(ev("1+2*3"), 7.0);
        assert_eq!(ev("8-3-2"), 3.0);
        assert_eq!(ev("8/4/2"), 1.0);
        assert_eq!(ev("2^3^2"), 512.0);
        assert_eq!(ev("-2^2"), -4.0);
        assert_eq!(ev("(-2)^2"), 4.0);
        assert_eq!(ev("2^-1"), 0.5);
        assert_eq!(ev("-3*-2"), 6.0);
        assert_eq!(ev("1.5e1 + .5"), 15.5);
    }

    #[test]
    fn helmholtz_forcing_at_origin() {
        let e = parse("(1.0+8.0*pi^2)*cos(2*pi*x[0])*cos(2*pi*x[1])", 2).unwrap();
        let v = e.eval(&[0.0, 0.0]).unwrap();
        assert!((v - (1.0 + 8.0 * PI * PI)).abs() < 1e-12);
        assert!((v - 79.956835).abs() < 1e-6);
    }

    #[test]
    fn dimension_errors() {
        assert_eq!(
            parse("x[2]", 2),
            Err(ExprError::Dimension { index: 2, dim: 2 })
        );
        assert!(parse("x[2]", 3).is_ok());
        let e = parse("x[0]", 2).unwrap();
        assert!(matches!(
            e.eval(&[1.0]),
            Err(ExprError::PointDimension { .. })
        ));
    }

    #[test]
    fn non_finite_reports_subexpression() {
        let e = parse("1 + 1/x[0]", 2).unwrap();
        match e.eval(&[0.0, 0.0]) {
            Err(ExprError::NonFinite { subexpr, .. }) => assert_eq!(subexpr, "1/x[0]"),
            other => panic!("{other:?}"),
        }
        let e = parse("sqrt(x[0] - 1)", 2).unwrap();
        match e.eval(&[0.0, 0.0]) {
            Err(ExprError::NonFinite { subexpr, value }) => {
                assert_eq!(subexpr, "sqrt(x[0]-1)");
                assert!(value.is_nan());
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn deterministic() {
        let e = parse("exp(sin(x[0]))*sqrt(x[1]+2)/3", 2).unwrap();
        let p = [0.37, 0.91];
        assert_eq!(e.eval(&p).unwrap().to_bits(), e.eval(&p).unwrap().to_bits());
    }

    #[test]
    fn argmax_of_cubic_near_two_thirds() {
        let e = parse("x[0]*x[0]*(1-x[0])", 2).unwrap();
        let (best, _) = (0..=10000)
            .map(|i| i as f64 / 10000.0)
            .map(|x| (x, e.eval(&[x, 0.0]).unwrap()))
            .fold((0.0, f64::NEG_INFINITY), |acc, (x, v)| {
                if v > acc.1 {
                    (x, v)
                } else {
                    acc
                }
            });
        assert!((best - 2.0 / 3.0).abs() <= 1e-4);
    }

    #[test]
    fn printing_uses_minimal_parentheses() {
        let cases = [
            ("x[0]*x[0]*(1-x[0])", "x[0]*x[0]*(1-x[0])"),
            ("a", ""),
            ("(1+2)+3", "1+2+3"),
            ("1+(2+3)", "1+(2+3)"),
            ("-(2^2)", "-2^2"),
            ("(2^3)^2", "(2^3)^2"),
            ("-(1*2)", "-(1*2)"),
        ];
        for (src, want) in cases {
            match parse(src, 2) {
                Ok(e) => assert_eq!(e.to_string(), want),
                Err(_) => assert!(want.is_empty()),
            }
        }
    }
}
