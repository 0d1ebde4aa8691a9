use std::collections::BTreeMap;
use std::sync::Arc;

use crate::expr::{parse_expression, Chart, RationalFunction};

use super::{same_chart, GeomError, VectorField};

/// A differential k-form on a chart: coefficients indexed by strictly
/// increasing coordinate tuples. Missing tuples are zero coefficients; zero
/// coefficients are never stored.
#[derive(Clone, Debug)]
pub struct DifferentialForm {
    chart: Arc<Chart>,
    degree: usize,
    coeffs: BTreeMap<Vec<usize>, RationalFunction>,
}

/// Sign of the permutation sorting `idx`, or `None` if an index repeats.
fn sort_sign(idx: &mut [usize]) -> Option<i64> {
    let mut sign = 1;
    for i in 1..idx.len() {
        let mut j = i;
        while j > 0 && idx[j - 1] > idx[j] {
            idx.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
        if j > 0 && idx[j - 1] == idx[j] {
            return None;
        }
    }
    Some(sign)
}

impl DifferentialForm {
    /// Zero form. Degrees above the chart dimension are clamped to it.
    pub fn zero(chart: &Arc<Chart>, degree: usize) -> Self {
        DifferentialForm {
            chart: chart.clone(),
            degree: degree.min(chart.dim()),
            coeffs: BTreeMap::new(),
        }
    }

    pub fn function(chart: &Arc<Chart>, f: RationalFunction) -> Self {
        let mut out = Self::zero(chart, 0);
        out.add_term(Vec::new(), f);
        out
    }

    /// `f dx^{i1} ∧ … ∧ dx^{ik}` for arbitrary (possibly unsorted) indices.
    pub fn monomial(
        chart: &Arc<Chart>,
        indices: &[usize],
        f: RationalFunction,
    ) -> Result<Self, GeomError> {
        if let Some(&bad) = indices.iter().find(|&&i| i >= chart.dim()) {
            return Err(GeomError::IndexOutOfRange { index: bad, dim: chart.dim() });
        }
        let mut out = Self::zero(chart, indices.len());
        let mut idx = indices.to_vec();
        if let Some(sign) = sort_sign(&mut idx) {
            out.add_term(idx, if sign < 0 { -f } else { f });
        }
        Ok(out)
    }

    /// Coordinate differential `dx^i`.
    pub fn basis(chart: &Arc<Chart>, i: usize) -> Result<Self, GeomError> {
        Self::monomial(chart, &[i], RationalFunction::one())
    }

    /// `df` for a function on the chart.
    pub fn differential(chart: &Arc<Chart>, f: &RationalFunction) -> Self {
        let mut out = Self::zero(chart, 1);
        for i in 0..chart.dim() {
            out.add_term(vec![i], f.partial(i));
        }
        out
    }

    pub fn from_coefficients<I>(chart: &Arc<Chart>, degree: usize, terms: I) -> Result<Self, GeomError>
    where
        I: IntoIterator<Item = (Vec<usize>, RationalFunction)>,
    {
        let mut out = Self::zero(chart, degree);
        for (idx, f) in terms {
            if idx.len() != degree {
                return Err(GeomError::DegreeMismatch { expected: degree, got: idx.len() });
            }
            out = out.add(&Self::monomial(chart, &idx, f)?)?;
        }
        Ok(out)
    }

    fn add_term(&mut self, idx: Vec<usize>, f: RationalFunction) {
        if f.is_zero() || self.degree > self.chart.dim() {
            return;
        }
        let merged = match self.coeffs.remove(&idx) {
            Some(prev) => &prev + &f,
            None => f,
        };
        if !merged.is_zero() {
            self.coeffs.insert(idx, merged);
        }
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coefficients(&self) -> impl Iterator<Item = (&Vec<usize>, &RationalFunction)> {
        self.coeffs.iter()
    }

    /// Coefficient of a strictly increasing index tuple.
    pub fn coefficient(&self, idx: &[usize]) -> RationalFunction {
        self.coeffs.get(idx).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// The function of a 0-form.
    pub fn as_function(&self) -> Option<RationalFunction> {
        (self.degree == 0).then(|| self.coefficient(&[]))
    }

    pub fn add(&self, other: &Self) -> Result<Self, GeomError> {
        same_chart(&self.chart, &other.chart)?;
        if self.degree != other.degree {
            return Err(GeomError::DegreeMismatch { expected: self.degree, got: other.degree });
        }
        let mut out = self.clone();
        for (idx, f) in &other.coeffs {
            out.add_term(idx.clone(), f.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, GeomError> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(&RationalFunction::from_int(-1))
    }

    /// Multiplication by a function.
    pub fn scale(&self, f: &RationalFunction) -> Self {
        let mut out = Self::zero(&self.chart, self.degree);
        for (idx, c) in &self.coeffs {
            out.add_term(idx.clone(), c * f);
        }
        out
    }

    /// Graded-antisymmetric exterior product.
    pub fn wedge(&self, other: &Self) -> Result<Self, GeomError> {
        same_chart(&self.chart, &other.chart)?;
        let mut out = Self::zero(&self.chart, self.degree + other.degree);
        if self.degree + other.degree > self.chart.dim() {
            return Ok(out);
        }
        for (ia, fa) in &self.coeffs {
            for (ib, fb) in &other.coeffs {
                let mut idx: Vec<usize> = ia.iter().chain(ib.iter()).copied().collect();
                if let Some(sign) = sort_sign(&mut idx) {
                    let c = fa * fb;
                    out.add_term(idx, if sign < 0 { -c } else { c });
                }
            }
        }
        Ok(out)
    }

    /// Exterior derivative. The derivative of a top-degree form is the zero
    /// form of top degree.
    pub fn exterior_derivative(&self) -> Self {
        let dim = self.chart.dim();
        let mut out = Self::zero(&self.chart, self.degree + 1);
        if self.degree >= dim {
            return out;
        }
        for (idx, f) in &self.coeffs {
            for j in 0..dim {
                if idx.contains(&j) {
                    continue;
                }
                let df = f.partial(j);
                if df.is_zero() {
                    continue;
                }
                let mut full = Vec::with_capacity(idx.len() + 1);
                full.push(j);
                full.extend_from_slice(idx);
                let sign = sort_sign(&mut full).expect("distinct indices");
                out.add_term(full, if sign < 0 { -df } else { df });
            }
        }
        out
    }

    /// Contraction `i_X` into the first slot.
    pub fn interior_product(&self, x: &VectorField) -> Result<Self, GeomError> {
        same_chart(&self.chart, x.chart())?;
        if self.degree == 0 {
            return Ok(Self::zero(&self.chart, 0));
        }
        let mut out = Self::zero(&self.chart, self.degree - 1);
        for (idx, f) in &self.coeffs {
            for (r, &i) in idx.iter().enumerate() {
                let xi = x.component(i);
                if xi.is_zero() {
                    continue;
                }
                let mut rest = idx.clone();
                rest.remove(r);
                let c = f * xi;
                out.add_term(rest, if r % 2 == 1 { -c } else { c });
            }
        }
        Ok(out)
    }

    /// Evaluates a 1-form on a vector field.
    pub fn pair(&self, x: &VectorField) -> Result<RationalFunction, GeomError> {
        if self.degree != 1 {
            return Err(GeomError::DegreeMismatch { expected: 1, got: self.degree });
        }
        Ok(self.interior_product(x)?.coefficient(&[]))
    }

    /// Coefficient matrix of a 2-form: `ω = Σ_{i<j} M_ij dx^i ∧ dx^j`,
    /// `M_ji = −M_ij`.
    pub fn matrix(&self) -> Result<Vec<Vec<RationalFunction>>, GeomError> {
        if self.degree != 2 {
            return Err(GeomError::DegreeMismatch { expected: 2, got: self.degree });
        }
        let n = self.chart.dim();
        let mut m = vec![vec![RationalFunction::zero(); n]; n];
        for (idx, f) in &self.coeffs {
            m[idx[0]][idx[1]] = f.clone();
            m[idx[1]][idx[0]] = -f;
        }
        Ok(m)
    }

    /// Text form mirroring the system-file syntax, e.g.
    /// `2-form: (1) dq1^dp1 + (1) dq2^dp2`.
    pub fn display(&self) -> String {
        let mut out = format!("{}-form: ", self.degree);
        if self.coeffs.is_empty() {
            out.push('0');
            return out;
        }
        for (k, (idx, f)) in self.coeffs.iter().enumerate() {
            if k > 0 {
                out.push_str(" + ");
            }
            out.push('(');
            out.push_str(&f.display(&self.chart));
            out.push(')');
            if !idx.is_empty() {
                out.push(' ');
                let basis: Vec<String> =
                    idx.iter().map(|&i| format!("d{}", self.chart.var_name(i))).collect();
                out.push_str(&basis.join("^"));
            }
        }
        out
    }
}

impl PartialEq for DifferentialForm {
    fn eq(&self, other: &Self) -> bool {
        *self.chart == *other.chart
            && self.degree == other.degree
            && self.coeffs.len() == other.coeffs.len()
            && self
                .coeffs
                .iter()
                .all(|(idx, f)| other.coeffs.get(idx).is_some_and(|g| f == g))
    }
}

/// Splits at top-level occurrences of the given byte, outside parentheses and
/// brackets, returning (offset, piece) pairs.
pub(crate) fn split_top_level(text: &str, sep: u8) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, b) in text.bytes().enumerate() {
        match b {
            b'(' | b'[' => depth += 1,
            b')' | b']' => depth -= 1,
            _ if b == sep && depth == 0 => {
                out.push((start, &text[start..i]));
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push((start, &text[start..]));
    out
}

/// Parses the form syntax produced by [`DifferentialForm::display`]: an
/// optional `k-form:` prefix followed by signed terms `(coef) dx^dy`. The
/// coefficient may be omitted (`dq1^dp1`, `- dq1`).
pub fn parse_form(text: &str, chart: &Arc<Chart>) -> Result<DifferentialForm, GeomError> {
    let (declared, body, base) = match text.find("-form:") {
        Some(p) => {
            let deg: usize = text[..p].trim().parse().map_err(|_| GeomError::Syntax {
                pos: 0,
                message: "invalid degree prefix".into(),
            })?;
            (Some(deg), &text[p + 6..], p + 6)
        }
        None => (None, text, 0),
    };
    let mut terms: Vec<(bool, usize, &str)> = Vec::new();
    // split on top-level + and -, keeping signs
    let bytes = body.as_bytes();
    let mut depth = 0i32;
    let mut start = 0;
    let mut negative = false;
    for i in 0..=bytes.len() {
        let b = bytes.get(i).copied();
        match b {
            Some(b'(') => depth += 1,
            Some(b')') => depth -= 1,
            Some(c @ (b'+' | b'-')) if depth == 0 => {
                let piece = &body[start..i];
                if !piece.trim().is_empty() {
                    terms.push((negative, base + start, piece));
                } else if start != 0 {
                    return Err(GeomError::Syntax { pos: base + i, message: "dangling operator".into() });
                }
                negative = c == b'-';
                start = i + 1;
            }
            None => {
                let piece = &body[start..];
                if !piece.trim().is_empty() {
                    terms.push((negative, base + start, piece));
                } else if start != 0 {
                    return Err(GeomError::Syntax { pos: base + i, message: "expected term".into() });
                }
            }
            _ => {}
        }
    }
    if terms.len() == 1 && terms[0].2.trim() == "0" && !terms[0].0 {
        let degree = declared.ok_or(GeomError::Syntax {
            pos: base,
            message: "zero form needs a 'k-form:' prefix".into(),
        })?;
        return Ok(DifferentialForm::zero(chart, degree));
    }
    let mut result: Option<DifferentialForm> = None;
    for (negative, offset, piece) in terms {
        let trimmed_start = piece.len() - piece.trim_start().len();
        let piece_t = piece.trim();
        let off = offset + trimmed_start;
        let (coef, rest, rest_off) = if piece_t.starts_with('(') {
            let mut depth = 0;
            let mut close = None;
            for (i, b) in piece_t.bytes().enumerate() {
                match b {
                    b'(' => depth += 1,
                    b')' => {
                        depth -= 1;
                        if depth == 0 {
                            close = Some(i);
                            break;
                        }
                    }
                    _ => {}
                }
            }
            let close = close.ok_or(GeomError::Syntax { pos: off, message: "unbalanced '('".into() })?;
            let inner = &piece_t[1..close];
            let f = parse_expression(inner, chart).map_err(|e| GeomError::at_offset(e, off + 1))?;
            (f, &piece_t[close + 1..], off + close + 1)
        } else {
            (RationalFunction::one(), piece_t, off)
        };
        let rest_t = rest.trim();
        let mut idx = Vec::new();
        if !rest_t.is_empty() {
            for (o, b) in split_top_level(rest_t, b'^') {
                let name = b.trim();
                let Some(coord) = name.strip_prefix('d') else {
                    return Err(GeomError::Syntax {
                        pos: rest_off + o,
                        message: format!("expected a differential 'd<coordinate>', found '{name}'"),
                    });
                };
                let i = chart.coord_index(coord).ok_or_else(|| GeomError::Syntax {
                    pos: rest_off + o,
                    message: format!("unknown coordinate '{coord}'"),
                })?;
                idx.push(i);
            }
        }
        let coef = if negative { -coef } else { coef };
        let term = DifferentialForm::monomial(chart, &idx, coef)?;
        result = Some(match result {
            None => term,
            Some(acc) => acc.add(&term)?,
        });
    }
    let form = result.ok_or(GeomError::Syntax { pos: base, message: "empty form".into() })?;
    if let Some(d) = declared {
        if d != form.degree() {
            return Err(GeomError::DegreeMismatch { expected: d, got: form.degree() });
        }
    }
    Ok(form)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expression;

    fn chart() -> Arc<Chart> {
        Arc::new(Chart::new(&["q1", "q2", "p1", "p2"]).unwrap())
    }

    fn f(text: &str, c: &Chart) -> RationalFunction {
        parse_expression(text, c).unwrap()
    }

    #[test]
    fn wedge_antisymmetry() {
        let c = chart();
        let dq1 = DifferentialForm::basis(&c, 0).unwrap();
        let dp1 = DifferentialForm::basis(&c, 2).unwrap();
        assert!(dq1.wedge(&dq1).unwrap().is_zero());
        let a = dq1.wedge(&dp1).unwrap();
        let b = dp1.wedge(&dq1).unwrap();
        assert_eq!(a, b.neg());
        assert_eq!(a.degree(), 2);
    }

    #[test]
    fn wedge_of_oscillator_invariants() {
        // d(p1²+p2²+q1²+q2²) ∧ d(p1p2+q1q2), expanded by hand
        let c = chart();
        let r = f("p1^2+p2^2+q1^2+q2^2", &c);
        let g = f("p1*p2+q1*q2", &c);
        let w = DifferentialForm::differential(&c, &r)
            .wedge(&DifferentialForm::differential(&c, &g))
            .unwrap();
        // dR = 2q1 dq1 + 2q2 dq2 + 2p1 dp1 + 2p2 dp2 ; dG = q2 dq1 + q1 dq2 + p2 dp1 + p1 dp2
        let expected = parse_form(
            "(2*q1^2 - 2*q2^2) dq1^dq2 + (2*q1*p2 - 2*p1*q2) dq1^dp1 + (2*q1*p1 - 2*p2*q2) dq1^dp2 \
             + (2*q2*p2 - 2*p1*q1) dq2^dp1 + (2*q2*p1 - 2*p2*q1) dq2^dp2 + (2*p1^2 - 2*p2^2) dp1^dp2",
            &c,
        )
        .unwrap();
        assert_eq!(w, expected);
    }

    #[test]
    fn wedge_beyond_top_degree_is_zero() {
        let c = Arc::new(Chart::new(&["x", "y"]).unwrap());
        let w = DifferentialForm::monomial(&c, &[0, 1], RationalFunction::one()).unwrap();
        let dx = DifferentialForm::basis(&c, 0).unwrap();
        let z = w.wedge(&dx).unwrap();
        assert!(z.is_zero());
        assert_eq!(w.exterior_derivative().degree(), 2);
        assert!(w.exterior_derivative().is_zero());
    }

    #[test]
    fn derivative_of_quadratic() {
        let c = Arc::new(Chart::new(&["q1", "p1"]).unwrap());
        let h = DifferentialForm::function(&c, f("1/2*(p1^2+q1^2)", &c));
        let expected = parse_form("(p1) dp1 + (q1) dq1", &c).unwrap();
        assert_eq!(h.exterior_derivative(), expected);
    }

    #[test]
    fn angular_form_is_closed() {
        let c = Arc::new(Chart::new(&["q", "p"]).unwrap());
        let a = parse_form("(p/(p^2+q^2)) dq + (-q/(p^2+q^2)) dp", &c).unwrap();
        assert!(a.exterior_derivative().is_zero());
    }

    #[test]
    fn display_round_trip() {
        let c = chart();
        let w = parse_form("dq1^dp1 - (1/2*q2) dp2^dq2 + (q1/(p1^2+1)) dq1^dq2", &c).unwrap();
        let text = w.display();
        assert_eq!(parse_form(&text, &c).unwrap(), w);
        let z = DifferentialForm::zero(&c, 3);
        assert_eq!(z.display(), "3-form: 0");
        assert_eq!(parse_form("3-form: 0", &c).unwrap(), z);
    }

    #[test]
    fn parse_errors() {
        let c = chart();
        assert!(parse_form("(q1) dx", &c).is_err());
        assert!(parse_form("(q1 dq1", &c).is_err());
        assert!(parse_form("2-form: dq1", &c).is_err());
        assert!(parse_form("dq1 +", &c).is_err());
    }
}
