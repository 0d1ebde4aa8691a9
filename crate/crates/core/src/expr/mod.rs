//! Exact multivariate rational functions over a named chart, and the text
//! parser for them.

mod chart;
mod parse;
mod poly;
mod rational;

pub use chart::Chart;
pub use parse::parse_expression;
pub use poly::{denominator_lcm, format_rational, rational_to_f64, Monomial, Polynomial};
pub use rational::{CompiledFunction, Displayed, RationalFunction};

use num_rational::BigRational;
use thiserror::Error;

/// Per-variable exponent bound.
pub const MAX_EXPONENT: u32 = 1 << 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExprError {
    #[error("syntax error at offset {pos}: {message}")]
    Syntax { pos: usize, message: String },
    #[error("unknown identifier '{name}' at offset {pos}")]
    UnknownIdentifier { name: String, pos: usize },
    #[error("division by zero{}", .pos.map(|p| format!(" at offset {p}")).unwrap_or_default())]
    DivisionByZero { pos: Option<usize> },
    #[error("exponent {exponent} exceeds the bound {MAX_EXPONENT}")]
    ExponentOverflow { exponent: u64 },
    #[error("pole: denominator vanishes at the evaluation point")]
    Pole,
    #[error("unknown coordinate '{0}'")]
    UnknownCoordinate(String),
    #[error("point has {got} components, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid chart: {0}")]
    InvalidChart(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
    /// Negates `a`; `b` is ignored.
    Neg,
}

pub fn arith(
    a: &RationalFunction,
    b: &RationalFunction,
    op: ArithOp,
) -> Result<RationalFunction, ExprError> {
    match op {
        ArithOp::Add => a.checked_add(b),
        ArithOp::Sub => a.checked_add(&-b),
        ArithOp::Mul => a.checked_mul(b),
        ArithOp::Div => a.checked_div(b),
        ArithOp::Neg => Ok(-a),
    }
}

/// Derivative with respect to a named coordinate or constant of `chart`.
pub fn partial_derivative(
    f: &RationalFunction,
    var: &str,
    chart: &Chart,
) -> Result<RationalFunction, ExprError> {
    let i = chart
        .index_of(var)
        .ok_or_else(|| ExprError::UnknownCoordinate(var.to_string()))?;
    Ok(f.partial(i))
}

/// Exact evaluation at a point with one value per chart variable
/// (coordinates, then constants).
pub fn evaluate(
    f: &RationalFunction,
    chart: &Chart,
    point: &[BigRational],
) -> Result<BigRational, ExprError> {
    if point.len() != chart.nvars() {
        return Err(ExprError::DimensionMismatch { expected: chart.nvars(), got: point.len() });
    }
    f.eval_exact(point)
}

pub fn evaluate_f64(f: &RationalFunction, chart: &Chart, point: &[f64]) -> Result<f64, ExprError> {
    if point.len() != chart.nvars() {
        return Err(ExprError::DimensionMismatch { expected: chart.nvars(), got: point.len() });
    }
    f.eval_f64(point)
}
