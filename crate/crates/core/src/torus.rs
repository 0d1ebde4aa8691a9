//! Resonance lattices of frequency vectors and the integrability type they
//! imply for the closure of generic orbits on invariant tori.
//!
//! Frequencies are given exactly as rational combinations of symbols that are
//! assumed linearly independent over the rationals; nothing is decided
//! numerically.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TorusError {
    #[error("no frequencies given")]
    Empty,
    #[error("empty symbol basis")]
    EmptyBasis,
    #[error("frequency row {row} has {got} coefficients, expected {expected}")]
    RowLength { row: usize, expected: usize, got: usize },
    #[error("frequency {0} is zero")]
    ZeroFrequency(usize),
    #[error("all modes are at rest")]
    NoExcitedMode,
}

/// `ω_i = Σ_j coeffs[i][j] · β_j` over symbols `β_j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrequencySpec {
    basis: Vec<String>,
    coeffs: Vec<Vec<BigRational>>,
}

impl FrequencySpec {
    pub fn new(basis: Vec<String>, coeffs: Vec<Vec<BigRational>>) -> Result<Self, TorusError> {
        if basis.is_empty() {
            return Err(TorusError::EmptyBasis);
        }
        if coeffs.is_empty() {
            return Err(TorusError::Empty);
        }
        for (i, row) in coeffs.iter().enumerate() {
            if row.len() != basis.len() {
                return Err(TorusError::RowLength { row: i, expected: basis.len(), got: row.len() });
            }
            if row.iter().all(Zero::is_zero) {
                return Err(TorusError::ZeroFrequency(i));
            }
        }
        Ok(FrequencySpec { basis, coeffs })
    }

    /// Rational frequencies over the single symbol `1`.
    pub fn rational(omega: &[BigRational]) -> Result<Self, TorusError> {
        Self::new(vec!["1".into()], omega.iter().map(|w| vec![w.clone()]).collect())
    }

    pub fn n(&self) -> usize {
        self.coeffs.len()
    }

    pub fn basis(&self) -> &[String] {
        &self.basis
    }

    pub fn coeffs(&self) -> &[Vec<BigRational>] {
        &self.coeffs
    }

    /// The independence assumption the results depend on.
    pub fn assumption(&self) -> String {
        if self.basis.len() == 1 {
            format!("frequencies are rational multiples of {}", self.basis[0])
        } else {
            format!("symbols {} are assumed linearly independent over the rationals", self.basis.join(", "))
        }
    }

    pub fn scaled(&self, c: &BigRational) -> Self {
        FrequencySpec {
            basis: self.basis.clone(),
            coeffs: self.coeffs.iter().map(|r| r.iter().map(|v| v * c).collect()).collect(),
        }
    }

    /// Frequencies reordered so that new position `i` holds old `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        FrequencySpec { basis: self.basis.clone(), coeffs: perm.iter().map(|&i| self.coeffs[i].clone()).collect() }
    }
}

/// Integer vectors `k` with `Σ k_i ω_i = 0`, as rows of a matrix in Hermite
/// normal form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResonanceLattice {
    n: usize,
    basis: Vec<Vec<BigInt>>,
}

impl ResonanceLattice {
    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn basis(&self) -> &[Vec<BigInt>] {
        &self.basis
    }

    /// Integer coefficients expressing `k` in the basis, if `k` lies in the
    /// lattice.
    pub fn coordinates(&self, k: &[BigInt]) -> Option<Vec<BigInt>> {
        let mut rem = k.to_vec();
        let mut coords = Vec::with_capacity(self.basis.len());
        for row in &self.basis {
            let p = row.iter().position(|v| !v.is_zero()).expect("non-zero basis row");
            let (q, r) = rem[p].div_rem(&row[p]);
            if !r.is_zero() {
                return None;
            }
            for (x, b) in rem.iter_mut().zip(row) {
                *x -= &q * b;
            }
            coords.push(q);
        }
        rem.iter().all(Zero::is_zero).then_some(coords)
    }

    pub fn contains(&self, k: &[BigInt]) -> bool {
        self.coordinates(k).is_some()
    }
}

/// Row-style Hermite normal form of the lattice spanned by `rows`: zero rows
/// dropped, positive pivots, entries above each pivot reduced into `[0, pivot)`.
pub fn hermite_normal_form(rows: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let Some(cols) = rows.first().map(Vec::len) else {
        return Vec::new();
    };
    let mut a: Vec<Vec<BigInt>> = rows.to_vec();
    let mut r = 0;
    for c in 0..cols {
        if r == a.len() {
            break;
        }
        eliminate_column(&mut a, r, c);
        if a[r][c].is_zero() {
            continue;
        }
        if a[r][c].is_negative() {
            for v in a[r].iter_mut() {
                *v = -&*v;
            }
        }
        for i in 0..r {
            let q = a[i][c].div_floor(&a[r][c]);
            if !q.is_zero() {
                let sub: Vec<BigInt> = a[r].iter().map(|v| v * &q).collect();
                for (x, s) in a[i].iter_mut().zip(sub) {
                    *x -= s;
                }
            }
        }
        r += 1;
    }
    a.truncate(r);
    a
}

/// Unimodular row operations on rows `r..` that leave the gcd of column `c`
/// in row `r` and zeros below it.
fn eliminate_column(a: &mut [Vec<BigInt>], r: usize, c: usize) {
    for i in r + 1..a.len() {
        if a[i][c].is_zero() {
            continue;
        }
        if a[r][c].is_zero() {
            a.swap(r, i);
            continue;
        }
        let e = a[r][c].extended_gcd(&a[i][c]);
        let (g, x, y) = (e.gcd, e.x, e.y);
        let p = &a[r][c] / &g;
        let q = &a[i][c] / &g;
        let len = a[r].len();
        for j in 0..len {
            let u = &a[r][j];
            let v = &a[i][j];
            let new_r = &x * u + &y * v;
            let new_i = &p * v - &q * u;
            a[r][j] = new_r;
            a[i][j] = new_i;
        }
    }
}

/// Exact integer kernel `{k ∈ Zⁿ : Σ_i k_i C_ij = 0 for all j}`, saturated and
/// in Hermite normal form.
pub fn resonance_lattice(spec: &FrequencySpec) -> ResonanceLattice {
    let n = spec.n();
    let m = spec.basis.len();
    // Clearing denominators column by column leaves the kernel unchanged.
    let col_lcm: Vec<BigInt> = (0..m)
        .map(|j| spec.coeffs.iter().fold(BigInt::one(), |acc, r| acc.lcm(r[j].denom())))
        .collect();
    let mut aug: Vec<Vec<BigInt>> = spec
        .coeffs
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut v: Vec<BigInt> = row
                .iter()
                .zip(&col_lcm)
                .map(|(c, l)| (c * BigRational::from_integer(l.clone())).to_integer())
                .collect();
            v.extend((0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }));
            v
        })
        .collect();
    let mut r = 0;
    for c in 0..m {
        if r == n {
            break;
        }
        eliminate_column(&mut aug, r, c);
        if !aug[r][c].is_zero() {
            r += 1;
        }
    }
    // Rows whose frequency part vanished span the kernel; the transform is
    // unimodular, so they span all of it over the integers.
    let kernel: Vec<Vec<BigInt>> = aug[r..].iter().map(|row| row[m..].to_vec()).collect();
    ResonanceLattice { n, basis: hermite_normal_form(&kernel) }
}

/// Dimension of the closure of a generic orbit: `n − rank`.
pub fn orbit_closure_dimension(spec: &FrequencySpec) -> usize {
    spec.n() - resonance_lattice(spec).rank()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Classification {
    /// Generic orbits are dense in the full torus.
    Integrable,
    /// `extra` additional independent first integrals.
    Superintegrable { extra: usize },
    /// One-dimensional orbit closures; `2n − 1` integrals in total.
    MaximallySuperintegrable,
}

impl Classification {
    pub fn extra_integrals(self, n: usize) -> usize {
        match self {
            Classification::Integrable => 0,
            Classification::Superintegrable { extra } => extra,
            Classification::MaximallySuperintegrable => n - 1,
        }
    }
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Classification::Integrable => f.write_str("integrable"),
            Classification::Superintegrable { extra } => write!(f, "superintegrable({extra})"),
            Classification::MaximallySuperintegrable => f.write_str("maximally_superintegrable"),
        }
    }
}

pub fn classify(spec: &FrequencySpec) -> Classification {
    let n = spec.n();
    let d = orbit_closure_dimension(spec);
    if d == n {
        Classification::Integrable
    } else if d == 1 {
        Classification::MaximallySuperintegrable
    } else {
        Classification::Superintegrable { extra: n - d }
    }
}

/// Frequencies of `H = Σ_a s_a H_a²` at one initial condition, given the
/// action values `H_a = ½(p_a² + q_a²)` as rows over `basis`. The frequency
/// of mode `a` is `2 s_a H_a`; modes at rest carry no angle and are dropped.
/// Returns the spec and the indices of the excited modes.
pub fn nonlinear_oscillator_frequencies(
    signs: &[i8],
    basis: Vec<String>,
    actions: &[Vec<BigRational>],
) -> Result<(FrequencySpec, Vec<usize>), TorusError> {
    let two = BigRational::from_integer(BigInt::from(2));
    let mut rows = Vec::new();
    let mut excited = Vec::new();
    for (a, (s, h)) in signs.iter().zip(actions).enumerate() {
        if h.iter().all(Zero::is_zero) {
            continue;
        }
        let factor = &two * BigRational::from_integer(BigInt::from(*s));
        rows.push(h.iter().map(|v| v * &factor).collect());
        excited.push(a);
    }
    if rows.is_empty() {
        return Err(TorusError::NoExcitedMode);
    }
    Ok((FrequencySpec::new(basis, rows)?, excited))
}

/// Action values `H_a = ½(p_a² + q_a²)` at a rational point ordered
/// `(q_1, …, q_n, p_1, …, p_n)`.
pub fn actions_at(x0: &[BigRational]) -> Vec<Vec<BigRational>> {
    let n = x0.len() / 2;
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    (0..n)
        .map(|a| vec![&half * (&x0[a] * &x0[a] + &x0[n + a] * &x0[n + a])])
        .collect()
}
