use std::sync::Arc;

use crate::expr::{parse_expression, Chart, RationalFunction};

use super::form::split_top_level;
use super::{same_chart, GeomError};

/// Vector field given by one component per chart coordinate.
#[derive(Clone, Debug)]
pub struct VectorField {
    chart: Arc<Chart>,
    components: Vec<RationalFunction>,
}

impl VectorField {
    pub fn new(chart: &Arc<Chart>, components: Vec<RationalFunction>) -> Result<Self, GeomError> {
        if components.len() != chart.dim() {
            return Err(GeomError::DimensionMismatch {
                expected: chart.dim(),
                got: components.len(),
            });
        }
        Ok(VectorField { chart: chart.clone(), components })
    }

    pub fn zero(chart: &Arc<Chart>) -> Self {
        VectorField {
            chart: chart.clone(),
            components: vec![RationalFunction::zero(); chart.dim()],
        }
    }

    /// Coordinate field `∂/∂x^i`.
    pub fn coordinate(chart: &Arc<Chart>, i: usize) -> Result<Self, GeomError> {
        if i >= chart.dim() {
            return Err(GeomError::IndexOutOfRange { index: i, dim: chart.dim() });
        }
        let mut v = Self::zero(chart);
        v.components[i] = RationalFunction::one();
        Ok(v)
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn component(&self, i: usize) -> &RationalFunction {
        &self.components[i]
    }

    pub fn components(&self) -> &[RationalFunction] {
        &self.components
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(RationalFunction::is_zero)
    }

    /// Directional derivative `X(f) = Σ X^i ∂_i f`.
    pub fn apply(&self, f: &RationalFunction) -> RationalFunction {
        self.components
            .iter()
            .enumerate()
            .filter(|(_, xi)| !xi.is_zero())
            .map(|(i, xi)| xi * &f.partial(i))
            .sum()
    }

    pub fn add(&self, other: &Self) -> Result<Self, GeomError> {
        same_chart(&self.chart, &other.chart)?;
        Ok(VectorField {
            chart: self.chart.clone(),
            components: self.components.iter().zip(&other.components).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self, GeomError> {
        self.add(&other.scale(&RationalFunction::from_int(-1)))
    }

    pub fn scale(&self, f: &RationalFunction) -> Self {
        VectorField {
            chart: self.chart.clone(),
            components: self.components.iter().map(|c| c * f).collect(),
        }
    }

    /// `[X, Y]^i = X(Y^i) − Y(X^i)`.
    pub fn bracket(&self, other: &Self) -> Result<Self, GeomError> {
        same_chart(&self.chart, &other.chart)?;
        let components = (0..self.chart.dim())
            .map(|i| &self.apply(&other.components[i]) - &other.apply(&self.components[i]))
            .collect();
        Ok(VectorField { chart: self.chart.clone(), components })
    }

    pub fn display(&self) -> String {
        let parts: Vec<String> = self.components.iter().map(|c| c.display(&self.chart)).collect();
        format!("[{}]", parts.join(", "))
    }
}

impl PartialEq for VectorField {
    fn eq(&self, other: &Self) -> bool {
        *self.chart == *other.chart && self.components == other.components
    }
}

/// `[X, Y]`.
pub fn lie_bracket(x: &VectorField, y: &VectorField) -> Result<VectorField, GeomError> {
    x.bracket(y)
}

/// Parses a bracketed list of expressions `[e1, e2, …]`, one per coordinate.
pub fn parse_field(text: &str, chart: &Arc<Chart>) -> Result<VectorField, GeomError> {
    let items = parse_list(text)?;
    let mut comps = Vec::with_capacity(items.len());
    for (off, item) in items {
        comps.push(parse_expression(item, chart).map_err(|e| GeomError::at_offset(e, off))?);
    }
    VectorField::new(chart, comps)
}

/// Splits `[a, b, c]` into trimmed items with their byte offsets.
pub(crate) fn parse_list(text: &str) -> Result<Vec<(usize, &str)>, GeomError> {
    let lead = text.len() - text.trim_start().len();
    let t = text.trim();
    if !t.starts_with('[') || !t.ends_with(']') {
        return Err(GeomError::Syntax { pos: lead, message: "expected '[ ... ]'".into() });
    }
    let inner = &t[1..t.len() - 1];
    if inner.trim().is_empty() {
        return Ok(Vec::new());
    }
    Ok(split_top_level(inner, b',')
        .into_iter()
        .map(|(o, s)| (lead + 1 + o + (s.len() - s.trim_start().len()), s.trim()))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chart() -> Arc<Chart> {
        Arc::new(Chart::new(&["q1", "q2"]).unwrap())
    }

    #[test]
    fn coordinate_fields_commute() {
        let c = chart();
        let a = VectorField::coordinate(&c, 0).unwrap();
        let b = VectorField::coordinate(&c, 1).unwrap();
        assert!(lie_bracket(&a, &b).unwrap().is_zero());
    }

    #[test]
    fn bracket_with_linear_field() {
        // [q1 ∂/∂q1, ∂/∂q1] = −∂/∂q1
        let c = chart();
        let x = parse_field("[q1, 0]", &c).unwrap();
        let d = VectorField::coordinate(&c, 0).unwrap();
        let expected = parse_field("[-1, 0]", &c).unwrap();
        assert_eq!(lie_bracket(&x, &d).unwrap(), expected);
    }

    #[test]
    fn self_bracket_vanishes() {
        let c = chart();
        let x = parse_field("[q1*q2^2, q1/(1+q2^2)]", &c).unwrap();
        assert!(lie_bracket(&x, &x).unwrap().is_zero());
    }

    #[test]
    fn parse_rejects_wrong_length() {
        let c = chart();
        assert!(matches!(
            parse_field("[q1]", &c),
            Err(GeomError::DimensionMismatch { expected: 2, got: 1 })
        ));
        assert!(parse_field("q1, q2", &c).is_err());
        let x = parse_field("[q1, q2^2]", &c).unwrap();
        assert_eq!(parse_field(&x.display(), &c).unwrap(), x);
    }
}
