//! Factorization `A = Λ·H` of linear vector fields `ẋ = A x` into a
//! nondegenerate skew matrix and a symmetric matrix, and alternative
//! factorizations generated by linear symmetries of `A`.
//!
//! `Λ` acts as the Poisson matrix: the field is `ẋ = Λ ∇H(x)` for the
//! quadratic Hamiltonian `H(x) = ½ xᵀ H x`.

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::linalg;

mod matrix;

pub use matrix::ExactMatrix;

/// Reason a matrix could not be factorized.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NotDecomposable {
    NoSkewSolution,
    NoInvertibleWithinBudget,
    /// Every skew matrix of odd size is singular.
    OddDimension,
}

impl NotDecomposable {
    pub fn message(self) -> &'static str {
        match self {
            NotDecomposable::NoSkewSolution => "no skew solution",
            NotDecomposable::NoInvertibleWithinBudget => "no invertible element found within budget",
            NotDecomposable::OddDimension => "odd dimension: every skew matrix is singular",
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinfactError {
    #[error("matrix has no rows")]
    Empty,
    #[error("matrix is not square: {rows} rows, a row of length {cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("not decomposable: {}", .0.message())]
    NotDecomposable(NotDecomposable),
    #[error("transformation is singular")]
    Singular,
    #[error("transformation does not commute with the matrix")]
    NotASymmetry,
    #[error("exponent k must be at least 1")]
    InvalidPower,
}

/// Outcome of the odd-trace condition `Tr A^{2k+1} = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OddTrace {
    /// Necessary for a factorization; sufficient only for generic `A`.
    Pass,
    /// First failing exponent `2k+1` and its trace.
    Fail { k: u32, value: BigRational },
}

impl OddTrace {
    pub fn passed(&self) -> bool {
        matches!(self, OddTrace::Pass)
    }
}

/// Checks `Tr A^{2k+1} = 0` for every odd exponent up to `2n − 1`, `n` the
/// size of `A`. The first `n` power sums determine the spectrum, so higher
/// powers add nothing.
pub fn odd_trace_test(a: &ExactMatrix) -> OddTrace {
    let n = a.dim() as u32;
    let a2 = a.pow(2);
    let mut p = a.clone();
    for k in 0..n {
        let t = p.trace();
        if !t.is_zero() {
            return OddTrace::Fail { k, value: t };
        }
        p = &p * &a2;
    }
    OddTrace::Pass
}

/// `source = lambda · ham`, `lambda` skew and invertible, `ham` symmetric.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    pub lambda: ExactMatrix,
    pub ham: ExactMatrix,
    pub source: ExactMatrix,
}

impl Factorization {
    /// Checks every invariant exactly.
    pub fn verify(&self) -> bool {
        self.lambda.is_skew()
            && self.ham.is_symmetric()
            && !self.lambda.determinant().is_zero()
            && &self.lambda * &self.ham == self.source
    }
}

/// Search budget for an invertible element of the skew solution space.
#[derive(Clone, Copy, Debug)]
pub struct FactorizeOptions {
    pub seed: u64,
    /// Cap on the deterministic sweep over coefficients in `[-3, 3]`.
    pub sweep_limit: usize,
    pub random_trials: usize,
}

impl Default for FactorizeOptions {
    fn default() -> Self {
        FactorizeOptions { seed: 42, sweep_limit: 20_000, random_trials: 1000 }
    }
}

fn int(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

/// Basis of `{Ω skew : Ω A + Aᵀ Ω = 0}`.
pub fn skew_solutions(a: &ExactMatrix) -> Vec<ExactMatrix> {
    let n = a.dim();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let m = pairs.len();
    // The image of a skew Ω is skew, so its upper triangle determines it.
    let mut system = vec![vec![BigRational::zero(); m]; m];
    let at = a.transpose();
    for (col, &(i, j)) in pairs.iter().enumerate() {
        let mut e = ExactMatrix::zero(n);
        e.set(i, j, int(1));
        e.set(j, i, int(-1));
        let image = &(&e * a) + &(&at * &e);
        for (row, &(r, s)) in pairs.iter().enumerate() {
            system[row][col] = image.get(r, s).clone();
        }
    }
    linalg::kernel_fraction_free(&system, m)
        .into_iter()
        .map(|v| {
            let mut e = ExactMatrix::zero(n);
            for (c, &(i, j)) in v.iter().zip(&pairs) {
                e.set(i, j, c.clone());
                e.set(j, i, -c);
            }
            e
        })
        .collect()
}

fn combine(basis: &[ExactMatrix], coeffs: &[i64]) -> ExactMatrix {
    let n = basis[0].dim();
    basis
        .iter()
        .zip(coeffs)
        .filter(|(_, &c)| c != 0)
        .fold(ExactMatrix::zero(n), |acc, (b, &c)| &acc + &b.scale(&int(c)))
}

/// Finds `A = Λ·H` by solving `Ω A + Aᵀ Ω = 0` for skew `Ω` and picking an
/// invertible solution: basis elements first, then a sweep of integer
/// combinations with coefficients in `[-3, 3]`, then seeded random
/// combinations. Returns `Λ = Ω⁻¹`, `H = Ω A`, verified exactly.
pub fn hamiltonian_factorize(a: &ExactMatrix, opts: &FactorizeOptions) -> Result<Factorization, LinfactError> {
    let n = a.dim();
    let basis = skew_solutions(a);
    if basis.is_empty() {
        return Err(LinfactError::NotDecomposable(NotDecomposable::NoSkewSolution));
    }
    if n % 2 == 1 {
        return Err(LinfactError::NotDecomposable(NotDecomposable::OddDimension));
    }
    let omega = find_invertible(&basis, opts)
        .ok_or(LinfactError::NotDecomposable(NotDecomposable::NoInvertibleWithinBudget))?;
    // Prefer the sign that makes H positive on average.
    let mut ham = &omega * a;
    let mut omega = omega;
    if ham.trace().is_negative() {
        omega = -&omega;
        ham = -&ham;
    }
    let lambda = omega.inverse().expect("invertible by construction");
    let f = Factorization { lambda, ham, source: a.clone() };
    assert!(f.verify(), "factorization failed its exact verification");
    Ok(f)
}

fn find_invertible(basis: &[ExactMatrix], opts: &FactorizeOptions) -> Option<ExactMatrix> {
    let r = basis.len();
    let invertible = |m: &ExactMatrix| !m.determinant().is_zero();
    if let Some(b) = basis.iter().find(|b| invertible(b)) {
        return Some(b.clone());
    }
    // Odometer over [-3, 3]^r, skipping the zero vector.
    let mut coeffs = vec![-3i64; r];
    let mut tried = 0;
    loop {
        if coeffs.iter().any(|&c| c != 0) {
            let m = combine(basis, &coeffs);
            if invertible(&m) {
                return Some(m);
            }
            tried += 1;
            if tried >= opts.sweep_limit {
                break;
            }
        }
        let mut pos = 0;
        while pos < r && coeffs[pos] == 3 {
            coeffs[pos] = -3;
            pos += 1;
        }
        if pos == r {
            break;
        }
        coeffs[pos] += 1;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    for _ in 0..opts.random_trials {
        let coeffs: Vec<i64> = (0..r).map(|_| rng.random_range(-100..=100)).collect();
        let m = combine(basis, &coeffs);
        if invertible(&m) {
            return Some(m);
        }
    }
    None
}

/// `e^{log_scale} · base`, keeping the exponential symbolic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScaledMatrix {
    pub log_scale: BigRational,
    pub base: ExactMatrix,
}

impl ScaledMatrix {
    pub fn to_f64(&self) -> DMatrix<f64> {
        self.base.to_f64() * crate::expr::rational_to_f64(&self.log_scale).exp()
    }
}

/// A linear symmetry `T` of `A`.
#[derive(Clone, Debug, PartialEq)]
pub enum Symmetry {
    /// `T = e^{log_scale} · I`.
    Scalar { log_scale: BigRational },
    Exact(ExactMatrix),
    Float(DMatrix<f64>),
}

impl Symmetry {
    pub fn to_f64(&self, n: usize) -> DMatrix<f64> {
        match self {
            Symmetry::Scalar { log_scale } => {
                DMatrix::identity(n, n) * crate::expr::rational_to_f64(log_scale).exp()
            }
            Symmetry::Exact(m) => m.to_f64(),
            Symmetry::Float(m) => m.clone(),
        }
    }
}

fn norm_inf(m: &DMatrix<f64>) -> f64 {
    m.row_iter().map(|r| r.iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max)
}

/// Float tolerance, relative to `max(1, ‖reference‖∞)`.
pub const FLOAT_TOL: f64 = 1e-12;

/// `‖T A T⁻¹ − A‖∞ / max(1, ‖A‖∞)`, or infinity when `T` is singular.
pub fn commutation_error(t: &DMatrix<f64>, a: &DMatrix<f64>) -> f64 {
    match t.clone().try_inverse() {
        Some(ti) => norm_inf(&(t * a * ti - a)) / norm_inf(a).max(1.0),
        None => f64::INFINITY,
    }
}

/// `T = exp(lam · A^{2k})`, a symmetry of `A` that is in general not
/// canonical. Exact when `A^{2k} = c·I`; otherwise a float matrix exponential.
pub fn noncanonical_symmetry(a: &ExactMatrix, k: u32, lam: &BigRational) -> Result<Symmetry, LinfactError> {
    if k == 0 {
        return Err(LinfactError::InvalidPower);
    }
    let p = a.pow(2 * k);
    if let Some(c) = p.as_scalar() {
        return Ok(Symmetry::Scalar { log_scale: lam * c });
    }
    let exponent = p.scale(lam).to_f64();
    Ok(Symmetry::Float(exponent.exp()))
}

/// A factorization after a change by a symmetry.
#[derive(Clone, Debug, PartialEq)]
pub enum Description {
    Exact(Factorization),
    Scaled { lambda: ScaledMatrix, ham: ScaledMatrix, source: ExactMatrix },
    Float { lambda: DMatrix<f64>, ham: DMatrix<f64>, source: ExactMatrix, residual: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Transformed {
    pub description: Description,
    /// `TΛTᵀ = Λ`: the symmetry is canonical and gives nothing new.
    pub same_description: bool,
}

/// `(Λ', H') = (TΛTᵀ, T⁻ᵀ H T⁻¹)`, re-verified against `A`.
pub fn transform_description(f: &Factorization, t: &Symmetry) -> Result<Transformed, LinfactError> {
    let a = &f.source;
    let n = a.dim();
    match t {
        Symmetry::Scalar { log_scale } => {
            let two = int(2);
            let lambda = ScaledMatrix { log_scale: log_scale * &two, base: f.lambda.clone() };
            let ham = ScaledMatrix { log_scale: -(log_scale * &two), base: f.ham.clone() };
            // The scales cancel in the product.
            debug_assert!(&lambda.log_scale + &ham.log_scale == BigRational::zero());
            Ok(Transformed {
                same_description: log_scale.is_zero(),
                description: Description::Scaled { lambda, ham, source: a.clone() },
            })
        }
        Symmetry::Exact(m) => {
            if m.dim() != n {
                return Err(LinfactError::DimensionMismatch { expected: n, got: m.dim() });
            }
            let inv = m.inverse().ok_or(LinfactError::Singular)?;
            if &(m * a) * &inv != *a {
                return Err(LinfactError::NotASymmetry);
            }
            let lambda = &(m * &f.lambda) * &m.transpose();
            let ham = &(&inv.transpose() * &f.ham) * &inv;
            let g = Factorization { lambda, ham, source: a.clone() };
            if !g.verify() {
                return Err(LinfactError::NotASymmetry);
            }
            Ok(Transformed { same_description: g.lambda == f.lambda, description: Description::Exact(g) })
        }
        Symmetry::Float(m) => {
            if m.nrows() != n || m.ncols() != n {
                return Err(LinfactError::DimensionMismatch { expected: n, got: m.nrows() });
            }
            let af = a.to_f64();
            let inv = m.clone().try_inverse().ok_or(LinfactError::Singular)?;
            if commutation_error(m, &af) > FLOAT_TOL {
                return Err(LinfactError::NotASymmetry);
            }
            let l0 = f.lambda.to_f64();
            let lambda = m * &l0 * m.transpose();
            let ham = inv.transpose() * f.ham.to_f64() * &inv;
            let residual = norm_inf(&(&lambda * &ham - &af)) / norm_inf(&af).max(1.0);
            let same = norm_inf(&(&lambda - &l0)) <= FLOAT_TOL * norm_inf(&l0).max(1.0);
            Ok(Transformed {
                same_description: same,
                description: Description::Float { lambda, ham, source: a.clone(), residual },
            })
        }
    }
}

/// `TΛTᵀ = Λ`, exactly or to [`FLOAT_TOL`] for float `T`.
pub fn is_canonical(t: &Symmetry, lambda: &ExactMatrix) -> bool {
    match t {
        Symmetry::Scalar { log_scale } => log_scale.is_zero() || lambda.is_zero(),
        Symmetry::Exact(m) => m.dim() == lambda.dim() && &(m * lambda) * &m.transpose() == *lambda,
        Symmetry::Float(m) => {
            let l = lambda.to_f64();
            m.nrows() == l.nrows()
                && norm_inf(&(m * &l * m.transpose() - &l)) <= FLOAT_TOL * norm_inf(&l).max(1.0)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> ExactMatrix {
        ExactMatrix::from_i64(rows).unwrap()
    }

    fn oscillator() -> ExactMatrix {
        m(&[&[0, 0, 1, 0], &[0, 0, 0, 1], &[-1, 0, 0, 0], &[0, -1, 0, 0]])
    }

    #[test]
    fn odd_trace_examples() {
        assert_eq!(odd_trace_test(&m(&[&[0, 1], &[-1, 0]])), OddTrace::Pass);
        assert_eq!(odd_trace_test(&ExactMatrix::identity(2)), OddTrace::Fail { k: 0, value: int(2) });
        // Tr A = 0 but Tr A³ ≠ 0.
        let a = m(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, -2]]);
        assert_eq!(odd_trace_test(&a), OddTrace::Fail { k: 1, value: int(-6) });
    }

    #[test]
    fn rotation_factorizes_with_positive_hamiltonian() {
        let a = m(&[&[0, 1], &[-1, 0]]);
        let f = hamiltonian_factorize(&a, &FactorizeOptions::default()).unwrap();
        assert_eq!(f.lambda, a);
        assert_eq!(f.ham, ExactMatrix::identity(2));
        // The skew solution Ω = Λ⁻¹ satisfies the defining equation.
        let omega = f.lambda.inverse().unwrap();
        assert!((&(&omega * &a) + &(&a.transpose() * &omega)).is_zero());
    }

    #[test]
    fn identity_has_no_skew_solution() {
        assert_eq!(
            hamiltonian_factorize(&ExactMatrix::identity(4), &FactorizeOptions::default()),
            Err(LinfactError::NotDecomposable(NotDecomposable::NoSkewSolution))
        );
    }

    #[test]
    fn odd_sized_matrices_are_rejected() {
        let zero = ExactMatrix::zero(3);
        assert_eq!(
            hamiltonian_factorize(&zero, &FactorizeOptions::default()),
            Err(LinfactError::NotDecomposable(NotDecomposable::OddDimension))
        );
    }

    #[test]
    fn oscillator_descriptions() {
        let a = oscillator();
        let f = hamiltonian_factorize(&a, &FactorizeOptions::default()).unwrap();
        assert!(f.verify());
        // Two descriptions of the isotropic oscillator in (q1, q2, p1, p2).
        let l1 = oscillator();
        let h1 = ExactMatrix::identity(4);
        let l2 = m(&[&[0, 0, 0, 1], &[0, 0, 1, 0], &[0, -1, 0, 0], &[-1, 0, 0, 0]]);
        let h2 = m(&[&[0, 1, 0, 0], &[1, 0, 0, 0], &[0, 0, 0, 1], &[0, 0, 1, 0]]);
        for (l, h) in [(l1, h1), (l2, h2)] {
            assert!(Factorization { lambda: l, ham: h, source: a.clone() }.verify());
        }
    }

    #[test]
    fn scalar_symmetry_of_oscillator() {
        let a = oscillator();
        let lam = BigRational::new(1.into(), 3.into());
        let t = noncanonical_symmetry(&a, 1, &lam).unwrap();
        assert_eq!(t, Symmetry::Scalar { log_scale: -lam.clone() });
        let f = hamiltonian_factorize(&a, &FactorizeOptions::default()).unwrap();
        let g = transform_description(&f, &t).unwrap();
        assert!(!g.same_description);
        match g.description {
            Description::Scaled { lambda, ham, .. } => {
                assert_eq!(lambda.log_scale, -&lam * int(2));
                assert_eq!(ham.log_scale, &lam * int(2));
                assert_eq!(&lambda.base * &ham.base, a);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(!is_canonical(&t, &f.lambda));
        let zero = noncanonical_symmetry(&a, 1, &BigRational::zero()).unwrap();
        assert!(is_canonical(&zero, &f.lambda));
        assert!(transform_description(&f, &zero).unwrap().same_description);
    }

    #[test]
    fn canonical_rotation_gives_same_description() {
        let a = oscillator();
        let f = hamiltonian_factorize(&a, &FactorizeOptions::default()).unwrap();
        // Rotation in the (q1,p1) plane by a quarter turn: a canonical symmetry.
        let r = m(&[&[0, 0, 1, 0], &[0, 1, 0, 0], &[-1, 0, 0, 0], &[0, 0, 0, 1]]);
        let t = Symmetry::Exact(r);
        assert!(is_canonical(&t, &oscillator()));
        let g = transform_description(&f, &Symmetry::Exact(ExactMatrix::identity(4))).unwrap();
        assert!(g.same_description);
        assert_eq!(g.description, Description::Exact(f.clone()));
        let not_sym = Symmetry::Exact(m(&[&[1, 1, 0, 0], &[0, 1, 0, 0], &[0, 0, 1, 0], &[0, 0, 0, 1]]));
        assert_eq!(transform_description(&f, &not_sym), Err(LinfactError::NotASymmetry));
    }
}
