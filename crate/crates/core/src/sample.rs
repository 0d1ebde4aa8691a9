//! Seeded random generation of rational points and symbolic objects, used for
//! sample-point checks and property tests.

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rand::Rng;

use crate::expr::{Chart, Monomial, Polynomial, RationalFunction};
use crate::geom::{DifferentialForm, Tensor11, VectorField};
use crate::linfact::ExactMatrix;

/// Random rational in `[lo, hi]` with denominator at most `max_den`.
pub fn random_rational<R: Rng + ?Sized>(rng: &mut R, lo: i64, hi: i64, max_den: i64) -> BigRational {
    let den = rng.random_range(1..=max_den);
    let num = rng.random_range(lo * den..=hi * den);
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Point in `[-10, 10]^n` with small denominators.
pub fn random_point<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<BigRational> {
    (0..n).map(|_| random_rational(rng, -10, 10, 4)).collect()
}

/// Up to `count` points (one value per chart variable) at which none of the
/// `avoid` functions has a pole. Gives up after `100 * count` attempts.
pub fn pole_free_points<R: Rng + ?Sized>(
    rng: &mut R,
    chart: &Chart,
    count: usize,
    avoid: &[&RationalFunction],
) -> Vec<Vec<BigRational>> {
    let mut out = Vec::with_capacity(count);
    let mut attempts = 0;
    while out.len() < count && attempts < 100 * count.max(1) {
        attempts += 1;
        let p = random_point(rng, chart.nvars());
        if avoid.iter().all(|f| f.eval_exact(&p).is_ok()) {
            out.push(p);
        }
    }
    out
}

/// Random polynomial in `nvars` variables with at most `terms` terms of total
/// degree at most `max_degree` and integer coefficients in `[-5, 5]`.
pub fn random_polynomial<R: Rng + ?Sized>(
    rng: &mut R,
    nvars: usize,
    max_degree: u32,
    terms: usize,
) -> Polynomial {
    let mut parts = Vec::with_capacity(terms);
    for _ in 0..terms {
        let mut exps = vec![0u32; nvars];
        let deg = rng.random_range(0..=max_degree);
        for _ in 0..deg {
            exps[rng.random_range(0..nvars)] += 1;
        }
        let c = rng.random_range(-5i64..=5);
        parts.push((Monomial::from_exponents(&exps), BigRational::from_integer(c.into())));
    }
    Polynomial::from_terms(parts)
}

/// Random rational function whose denominator is `1 + p²` for a random
/// polynomial `p`, hence pole free on the reals.
pub fn random_rational_function<R: Rng + ?Sized>(rng: &mut R, nvars: usize) -> RationalFunction {
    let num = random_polynomial(rng, nvars, 2, 3);
    if rng.random_bool(0.5) {
        return RationalFunction::from_poly(num);
    }
    let p = random_polynomial(rng, nvars, 1, 2);
    let den = &Polynomial::one() + &(&p * &p);
    RationalFunction::new(num, den).expect("positive denominator")
}

pub fn random_function<R: Rng + ?Sized>(rng: &mut R, chart: &Chart, rational: bool) -> RationalFunction {
    if rational {
        random_rational_function(rng, chart.dim())
    } else {
        RationalFunction::from_poly(random_polynomial(rng, chart.dim(), 3, 4))
    }
}

pub fn random_field<R: Rng + ?Sized>(rng: &mut R, chart: &Arc<Chart>, rational: bool) -> VectorField {
    let comps = (0..chart.dim()).map(|_| random_function(rng, chart, rational)).collect();
    VectorField::new(chart, comps).expect("one component per coordinate")
}

pub fn random_form<R: Rng + ?Sized>(
    rng: &mut R,
    chart: &Arc<Chart>,
    degree: usize,
    rational: bool,
) -> DifferentialForm {
    let n = chart.dim();
    let mut form = DifferentialForm::zero(chart, degree);
    for _ in 0..3 {
        let mut idx: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            idx.swap(i, rng.random_range(0..=i));
        }
        idx.truncate(degree);
        let term = DifferentialForm::monomial(chart, &idx, random_function(rng, chart, rational))
            .expect("indices in range");
        form = form.add(&term).expect("same chart and degree");
    }
    form
}

pub fn random_tensor<R: Rng + ?Sized>(rng: &mut R, chart: &Arc<Chart>, rational: bool) -> Tensor11 {
    let n = chart.dim();
    let comps = (0..n)
        .map(|_| {
            (0..n)
                .map(|_| {
                    if rng.random_bool(0.5) {
                        RationalFunction::zero()
                    } else {
                        random_function(rng, chart, rational)
                    }
                })
                .collect()
        })
        .collect();
    Tensor11::new(chart, comps).expect("square components")
}

/// Random skew matrix with small integer entries, retried until invertible.
pub fn random_skew_invertible<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ExactMatrix {
    loop {
        let mut m = ExactMatrix::zero(n);
        for i in 0..n {
            for j in i + 1..n {
                let v = BigRational::from_integer(rng.random_range(-3i64..=3).into());
                m.set(i, j, v.clone());
                m.set(j, i, -v);
            }
        }
        if !m.determinant().is_zero() {
            return m;
        }
    }
}

pub fn random_symmetric<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ExactMatrix {
    let mut m = ExactMatrix::zero(n);
    for i in 0..n {
        for j in i..n {
            let v = random_rational(rng, -4, 4, 2);
            m.set(i, j, v.clone());
            m.set(j, i, v);
        }
    }
    m
}

/// `Λ₀ H₀` for random skew invertible `Λ₀` and random symmetric `H₀`, of size `2n`.
pub fn random_decomposable<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ExactMatrix {
    let l = random_skew_invertible(rng, 2 * n);
    let h = random_symmetric(rng, 2 * n);
    &l * &h
}

/// Random integer matrix with non-zero trace.
pub fn random_trace_violating<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ExactMatrix {
    loop {
        let mut m = ExactMatrix::zero(n);
        for i in 0..n {
            for j in 0..n {
                m.set(i, j, BigRational::from_integer(rng.random_range(-5i64..=5).into()));
            }
        }
        if !m.trace().is_zero() {
            return m;
        }
    }
}
