use std::fmt;

use super::ExprError;

/// Named coordinate chart. Coordinates come first, free symbolic constants
/// (such as `omega`) are appended after them and share the variable index
/// space, so a polynomial exponent vector is indexed by `0..nvars()`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Chart {
    coords: Vec<String>,
    constants: Vec<String>,
}

fn valid_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl Chart {
    pub fn new<S: AsRef<str>>(coords: &[S]) -> Result<Self, ExprError> {
        Self::with_constants(coords, &[] as &[&str])
    }

    pub fn with_constants<S: AsRef<str>, T: AsRef<str>>(
        coords: &[S],
        constants: &[T],
    ) -> Result<Self, ExprError> {
        if coords.is_empty() {
            return Err(ExprError::InvalidChart("chart needs at least one coordinate".into()));
        }
        let coords: Vec<String> = coords.iter().map(|s| s.as_ref().to_string()).collect();
        let constants: Vec<String> = constants.iter().map(|s| s.as_ref().to_string()).collect();
        let mut seen = std::collections::HashSet::new();
        for name in coords.iter().chain(constants.iter()) {
            if !valid_identifier(name) {
                return Err(ExprError::InvalidChart(format!("invalid identifier '{name}'")));
            }
            if !seen.insert(name.as_str()) {
                return Err(ExprError::InvalidChart(format!("duplicate name '{name}'")));
            }
        }
        Ok(Chart { coords, constants })
    }

    /// Number of real coordinates.
    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    /// Coordinates plus constants.
    pub fn nvars(&self) -> usize {
        self.coords.len() + self.constants.len()
    }

    pub fn coords(&self) -> &[String] {
        &self.coords
    }

    pub fn constants(&self) -> &[String] {
        &self.constants
    }

    pub fn var_name(&self, index: usize) -> &str {
        if index < self.coords.len() {
            &self.coords[index]
        } else {
            &self.constants[index - self.coords.len()]
        }
    }

    pub fn is_constant(&self, index: usize) -> bool {
        index >= self.coords.len()
    }

    /// Variable index of a coordinate or constant.
    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.coords
            .iter()
            .chain(self.constants.iter())
            .position(|n| n == name)
    }

    pub fn coord_index(&self, name: &str) -> Option<usize> {
        self.coords.iter().position(|n| n == name)
    }
}

impl fmt::Display for Chart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.coords.join(", "))?;
        if !self.constants.is_empty() {
            write!(f, " const ({})", self.constants.join(", "))?;
        }
        Ok(())
    }
}
