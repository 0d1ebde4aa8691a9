//! Exterior calculus on a single chart: forms, vector fields, (1,1)-tensors,
//! Lie derivatives, and the structural checks built on them.

use std::sync::Arc;

use thiserror::Error;

use crate::expr::{Chart, ExprError, RationalFunction};

mod checks;
mod field;
mod form;
mod tensor;

pub use checks::{
    alternative_from_symmetry, check_normal_form, AlternativeDescription, derived_description, is_hamiltonian_description,
    validate_structures, CheckOptions, DerivedDescription, HamiltonianReport, NamedCheck,
    NormalFormReport, StructureKind, StructureReport, Verdict,
};
pub use field::{lie_bracket, parse_field, VectorField};
pub use form::{parse_form, DifferentialForm};
pub use tensor::{lie_derivative_tensor, omega_tf, parse_tensor, twisted_differential, Tensor11};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeomError {
    #[error("objects live on different charts")]
    ChartMismatch,
    #[error("degree mismatch: expected {expected}, got {got}")]
    DegreeMismatch { expected: usize, got: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("syntax error at {pos}: {message}")]
    Syntax { pos: usize, message: String },
    #[error("chart dimension {0} is odd")]
    OddDimension(usize),
    #[error("no pole-free sample points found")]
    NoSamplePoints,
    #[error(transparent)]
    Expr(#[from] ExprError),
}

impl GeomError {
    /// Wraps an expression error raised on a substring starting at `off`.
    pub(crate) fn at_offset(e: ExprError, off: usize) -> Self {
        GeomError::Expr(match e {
            ExprError::Syntax { pos, message } => ExprError::Syntax { pos: pos + off, message },
            ExprError::UnknownIdentifier { name, pos } => ExprError::UnknownIdentifier { name, pos: pos + off },
            ExprError::DivisionByZero { pos } => ExprError::DivisionByZero { pos: pos.map(|p| p + off) },
            other => other,
        })
    }

    pub(crate) fn shifted(self, off: usize) -> Self {
        match self {
            GeomError::Syntax { pos, message } => GeomError::Syntax { pos: pos + off, message },
            GeomError::Expr(e) => GeomError::at_offset(e, off),
            other => other,
        }
    }

    /// Byte offset of a syntax problem, if any.
    pub fn position(&self) -> Option<usize> {
        match self {
            GeomError::Syntax { pos, .. } => Some(*pos),
            GeomError::Expr(ExprError::Syntax { pos, .. })
            | GeomError::Expr(ExprError::UnknownIdentifier { pos, .. }) => Some(*pos),
            GeomError::Expr(ExprError::DivisionByZero { pos }) => *pos,
            _ => None,
        }
    }
}

pub(crate) fn same_chart(a: &Arc<Chart>, b: &Arc<Chart>) -> Result<(), GeomError> {
    if Arc::ptr_eq(a, b) || **a == **b {
        Ok(())
    } else {
        Err(GeomError::ChartMismatch)
    }
}

/// Objects with a Lie derivative along a vector field.
pub trait LieDerivative: Sized {
    fn lie_derivative(&self, x: &VectorField) -> Result<Self, GeomError>;
}

impl LieDerivative for RationalFunction {
    fn lie_derivative(&self, x: &VectorField) -> Result<Self, GeomError> {
        Ok(x.apply(self))
    }
}

impl LieDerivative for DifferentialForm {
    /// Cartan: `L_X β = i_X dβ + d i_X β`.
    fn lie_derivative(&self, x: &VectorField) -> Result<Self, GeomError> {
        same_chart(self.chart(), x.chart())?;
        if self.degree() == 0 {
            let f = self.as_function().unwrap_or_else(RationalFunction::zero);
            return Ok(DifferentialForm::function(self.chart(), x.apply(&f)));
        }
        let b = self.interior_product(x)?.exterior_derivative();
        if self.degree() == self.chart().dim() {
            return Ok(b);
        }
        let a = self.exterior_derivative().interior_product(x)?;
        a.add(&b)
    }
}

impl LieDerivative for VectorField {
    fn lie_derivative(&self, x: &VectorField) -> Result<Self, GeomError> {
        x.bracket(self)
    }
}

impl LieDerivative for Tensor11 {
    fn lie_derivative(&self, x: &VectorField) -> Result<Self, GeomError> {
        lie_derivative_tensor(x, self)
    }
}

/// `L_X target`.
pub fn lie_derivative<T: LieDerivative>(x: &VectorField, target: &T) -> Result<T, GeomError> {
    target.lie_derivative(x)
}
