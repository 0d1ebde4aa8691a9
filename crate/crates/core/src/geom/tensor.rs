use std::sync::Arc;

use crate::expr::{Chart, RationalFunction};

use super::field::parse_list;
use super::{same_chart, DifferentialForm, GeomError, VectorField};

/// Mixed (1,1)-tensor stored as `components[out][in]`, so `T(∂_j) = Σ_i T[i][j] ∂_i`
/// and `T = Σ T[i][j] dx^j ⊗ ∂_i`.
#[derive(Clone, Debug)]
pub struct Tensor11 {
    chart: Arc<Chart>,
    components: Vec<Vec<RationalFunction>>,
}

impl Tensor11 {
    pub fn new(chart: &Arc<Chart>, components: Vec<Vec<RationalFunction>>) -> Result<Self, GeomError> {
        let n = chart.dim();
        if components.len() != n || components.iter().any(|r| r.len() != n) {
            return Err(GeomError::DimensionMismatch {
                expected: n,
                got: components.iter().map(Vec::len).find(|&l| l != n).unwrap_or(components.len()),
            });
        }
        Ok(Tensor11 { chart: chart.clone(), components })
    }

    pub fn zero(chart: &Arc<Chart>) -> Self {
        let n = chart.dim();
        Tensor11 { chart: chart.clone(), components: vec![vec![RationalFunction::zero(); n]; n] }
    }

    pub fn identity(chart: &Arc<Chart>) -> Self {
        let mut t = Self::zero(chart);
        for i in 0..chart.dim() {
            t.components[i][i] = RationalFunction::one();
        }
        t
    }

    /// Adds `f dx^input ⊗ ∂/∂x^output`.
    pub fn with_term(mut self, input: usize, output: usize, f: RationalFunction) -> Self {
        self.components[output][input] = &self.components[output][input] + &f;
        self
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn component(&self, out: usize, input: usize) -> &RationalFunction {
        &self.components[out][input]
    }

    pub fn rows(&self) -> &[Vec<RationalFunction>] {
        &self.components
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().flatten().all(RationalFunction::is_zero)
    }

    pub fn is_constant(&self) -> bool {
        self.components.iter().flatten().all(|f| f.as_constant().is_some())
    }

    /// `T(X)`.
    pub fn apply(&self, x: &VectorField) -> Result<VectorField, GeomError> {
        same_chart(&self.chart, x.chart())?;
        let n = self.chart.dim();
        let comps = (0..n)
            .map(|i| (0..n).map(|j| &self.components[i][j] * x.component(j)).sum())
            .collect();
        VectorField::new(&self.chart, comps)
    }

    /// Composition `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Result<Self, GeomError> {
        same_chart(&self.chart, &other.chart)?;
        let n = self.chart.dim();
        let comps = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| (0..n).map(|k| &self.components[i][k] * &other.components[k][j]).sum())
                    .collect()
            })
            .collect();
        Tensor11::new(&self.chart, comps)
    }

    /// Pull-back of a coordinate differential: `T*(dx^i) = Σ_j T[i][j] dx^j`.
    fn pullback_basis(&self, i: usize) -> DifferentialForm {
        let n = self.chart.dim();
        DifferentialForm::from_coefficients(
            &self.chart,
            1,
            (0..n).map(|j| (vec![j], self.components[i][j].clone())),
        )
        .expect("valid basis indices")
    }

    /// Degree-zero derivation `i_T` of forms:
    /// `(i_T β)(X_1,…,X_k) = Σ_r β(X_1,…,T X_r,…,X_k)`, vanishing on functions.
    pub fn derivation(&self, beta: &DifferentialForm) -> Result<DifferentialForm, GeomError> {
        same_chart(&self.chart, beta.chart())?;
        let mut out = DifferentialForm::zero(&self.chart, beta.degree());
        for (idx, f) in beta.coefficients() {
            for r in 0..idx.len() {
                let mut term = DifferentialForm::function(&self.chart, f.clone());
                for (s, &i) in idx.iter().enumerate() {
                    let factor = if s == r {
                        self.pullback_basis(i)
                    } else {
                        DifferentialForm::basis(&self.chart, i)?
                    };
                    term = term.wedge(&factor)?;
                }
                out = out.add(&term)?;
            }
        }
        Ok(out)
    }

    /// Frölicher–Nijenhuis differential `d_T = i_T d − d i_T`. On functions it
    /// reduces to the twisted differential `d_T f = df ∘ T`.
    pub fn twisted_d(&self, beta: &DifferentialForm) -> Result<DifferentialForm, GeomError> {
        let first = self.derivation(&beta.exterior_derivative())?;
        let second = self.derivation(beta)?.exterior_derivative();
        first.sub(&second)
    }

    /// `[[row0…], [row1…], …]` with rows indexed by the output coordinate.
    pub fn display(&self) -> String {
        let rows: Vec<String> = self
            .components
            .iter()
            .map(|r| {
                let items: Vec<String> = r.iter().map(|c| c.display(&self.chart)).collect();
                format!("[{}]", items.join(", "))
            })
            .collect();
        format!("[{}]", rows.join(", "))
    }
}

impl PartialEq for Tensor11 {
    fn eq(&self, other: &Self) -> bool {
        *self.chart == *other.chart && self.components == other.components
    }
}

/// `d_T f`: the 1-form with `(d_T f)(X) = df(T X)`, components
/// `Σ_j ∂_j f T[j][i]`.
pub fn twisted_differential(t: &Tensor11, f: &RationalFunction) -> DifferentialForm {
    let n = t.chart.dim();
    let grads: Vec<RationalFunction> = (0..n).map(|j| f.partial(j)).collect();
    DifferentialForm::from_coefficients(
        &t.chart,
        1,
        (0..n).map(|i| {
            let c: RationalFunction = (0..n)
                .filter(|&j| !grads[j].is_zero())
                .map(|j| &grads[j] * &t.components[j][i])
                .sum();
            (vec![i], c)
        }),
    )
    .expect("valid basis indices")
}

/// `ω_{T,F} = d d_T F`; closed by construction.
pub fn omega_tf(t: &Tensor11, f: &RationalFunction) -> DifferentialForm {
    twisted_differential(t, f).exterior_derivative()
}

/// Lie derivative of a (1,1)-tensor:
/// `(L_X T)^i_j = X(T^i_j) − T^k_j ∂_k X^i + T^i_k ∂_j X^k`.
pub fn lie_derivative_tensor(x: &VectorField, t: &Tensor11) -> Result<Tensor11, GeomError> {
    same_chart(x.chart(), &t.chart)?;
    let n = t.chart.dim();
    let dx: Vec<Vec<RationalFunction>> = (0..n)
        .map(|i| (0..n).map(|k| x.component(i).partial(k)).collect())
        .collect();
    let comps = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let mut acc = x.apply(&t.components[i][j]);
                    for k in 0..n {
                        if !dx[i][k].is_zero() {
                            acc = &acc - &(&t.components[k][j] * &dx[i][k]);
                        }
                        if !dx[k][j].is_zero() {
                            acc = &acc + &(&t.components[i][k] * &dx[k][j]);
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect();
    Tensor11::new(&t.chart, comps)
}

pub fn parse_tensor(text: &str, chart: &Arc<Chart>) -> Result<Tensor11, GeomError> {
    let rows = parse_list(text)?;
    let mut comps = Vec::with_capacity(rows.len());
    for (off, row) in rows {
        let items = parse_list(row).map_err(|e| e.shifted(off))?;
        let mut r = Vec::with_capacity(items.len());
        for (o, item) in items {
            r.push(
                crate::expr::parse_expression(item, chart)
                    .map_err(|e| GeomError::at_offset(e, off + o))?,
            );
        }
        comps.push(r);
    }
    Tensor11::new(chart, comps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expression;
    use crate::geom::parse_field;

    fn chart() -> Arc<Chart> {
        Arc::new(Chart::new(&["q1", "q2", "p1", "p2"]).unwrap())
    }

    #[test]
    fn identity_tensor_gives_plain_differential() {
        let c = chart();
        let f = parse_expression("q1^2*p2 + q2/(1+p1^2)", &c).unwrap();
        assert_eq!(
            twisted_differential(&Tensor11::identity(&c), &f),
            DifferentialForm::differential(&c, &f)
        );
        assert!(twisted_differential(&Tensor11::zero(&c), &f).is_zero());
        assert!(omega_tf(&Tensor11::identity(&c), &f).is_zero());
    }

    #[test]
    fn twisted_differential_evaluates_df_of_tx() {
        let c = chart();
        let t = parse_tensor("[[q1, 0, 1, 0], [0, 0, 0, p2], [0, 1, 0, 0], [1, 0, 0, q2]]", &c).unwrap();
        let f = parse_expression("q1*p1 + q2^2", &c).unwrap();
        let x = parse_field("[1, q1, p2, 2]", &c).unwrap();
        let lhs = twisted_differential(&t, &f).pair(&x).unwrap();
        let rhs = DifferentialForm::differential(&c, &f).pair(&t.apply(&x).unwrap()).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn derivation_on_functions_vanishes_and_twisted_d_matches() {
        let c = chart();
        let t = parse_tensor("[[0, 1, 0, 0], [0, 0, 0, 0], [q1, 0, 0, 0], [0, 0, 1, 0]]", &c).unwrap();
        let f = parse_expression("q1*q2*p1 + p2^3", &c).unwrap();
        let f0 = DifferentialForm::function(&c, f.clone());
        assert!(t.derivation(&f0).unwrap().is_zero());
        assert_eq!(t.twisted_d(&f0).unwrap(), twisted_differential(&t, &f));
    }

    #[test]
    fn parse_shape_errors() {
        let c = chart();
        assert!(parse_tensor("[[1,0],[0,1]]", &c).is_err());
        let t = Tensor11::identity(&c);
        assert_eq!(parse_tensor(&t.display(), &c).unwrap(), t);
    }
}
