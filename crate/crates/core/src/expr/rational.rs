use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::poly::{rational_to_f64, Polynomial};
use super::{Chart, ExprError};

/// Quotient of a polynomial by a product of powers of monic factors.
///
/// Factors are kept separate so that sums over a shared set of denominators
/// only multiply by what is missing. Representations are not reduced to
/// lowest terms; equality is decided by testing the difference for zero.
#[derive(Clone, Debug)]
pub struct RationalFunction {
    num: Polynomial,
    den: Vec<(Polynomial, u32)>,
}

/// Splits a non-zero polynomial into `c * Π f_i^{e_i}` with monic
/// non-constant `f_i`: single variables from the monomial content, and the
/// monic remainder.
fn factor_basic(p: &Polynomial) -> (BigRational, Vec<(Polynomial, u32)>) {
    let mut factors = Vec::new();
    let content = p.monomial_content();
    let rest = if content.is_one() { p.clone() } else { p.div_monomial(&content) };
    for (i, &e) in content.exponents().iter().enumerate() {
        if e > 0 {
            factors.push((Polynomial::var(i), e));
        }
    }
    let (_, lc) = rest.leading().expect("non-zero polynomial");
    let lc = lc.clone();
    if rest.as_constant().is_none() {
        factors.push((rest.scale(&lc.recip()), 1));
    }
    (lc, factors)
}

fn insert_factor(den: &mut Vec<(Polynomial, u32)>, f: Polynomial, e: u32) {
    if e == 0 {
        return;
    }
    if let Some(slot) = den.iter_mut().find(|(g, _)| *g == f) {
        slot.1 += e;
        return;
    }
    // Split against an existing factor when one divides the other.
    for k in 0..den.len() {
        let (g, eg) = den[k].clone();
        if g.degree() < f.degree() {
            if let Some(h) = f.exact_div(&g) {
                insert_factor(den, g, e);
                if h.as_constant().is_none() {
                    insert_factor(den, h, e);
                }
                return;
            }
        } else if f.degree() < g.degree() {
            if let Some(h) = g.exact_div(&f) {
                den.remove(k);
                insert_factor(den, f.clone(), eg + e);
                if h.as_constant().is_none() {
                    insert_factor(den, h, eg);
                }
                return;
            }
        }
    }
    den.push((f, e));
}

fn expand(factors: &[(Polynomial, u32)]) -> Result<Polynomial, ExprError> {
    let mut out = Polynomial::one();
    for (f, e) in factors {
        out = out.checked_mul(&f.checked_pow(*e)?)?;
    }
    Ok(out)
}

/// Divides `num` by factors of `den` while the division is exact.
fn cancel(mut num: Polynomial, den: &mut Vec<(Polynomial, u32)>) -> Polynomial {
    if num.is_zero() {
        den.clear();
        return num;
    }
    for (f, e) in den.iter_mut() {
        while *e > 0 && f.degree() <= num.degree() {
            match num.exact_div(f) {
                Some(q) => {
                    num = q;
                    *e -= 1;
                }
                None => break,
            }
        }
    }
    den.retain(|(_, e)| *e > 0);
    num
}

impl RationalFunction {
    pub fn new(num: Polynomial, den: Polynomial) -> Result<Self, ExprError> {
        if den.is_zero() {
            return Err(ExprError::DivisionByZero { pos: None });
        }
        if num.is_zero() {
            return Ok(Self::zero());
        }
        let (c, factors) = factor_basic(&den);
        let mut fs = Vec::new();
        for (f, e) in factors {
            insert_factor(&mut fs, f, e);
        }
        Ok(Self::build(num.scale(&c.recip()), fs))
    }

    fn build(num: Polynomial, mut den: Vec<(Polynomial, u32)>) -> Self {
        let num = cancel(num, &mut den);
        den.sort_by(|a, b| b.0.degree().cmp(&a.0.degree()).then_with(|| a.0.len().cmp(&b.0.len())));
        RationalFunction { num, den }
    }

    pub fn from_poly(p: Polynomial) -> Self {
        RationalFunction { num: p, den: Vec::new() }
    }

    pub fn zero() -> Self {
        Self::from_poly(Polynomial::zero())
    }

    pub fn one() -> Self {
        Self::from_poly(Polynomial::one())
    }

    pub fn constant(c: BigRational) -> Self {
        Self::from_poly(Polynomial::constant(c))
    }

    pub fn from_int(c: i64) -> Self {
        Self::from_poly(Polynomial::from_int(c))
    }

    pub fn var(index: usize) -> Self {
        Self::from_poly(Polynomial::var(index))
    }

    pub fn numerator(&self) -> &Polynomial {
        &self.num
    }

    /// Expanded denominator.
    pub fn denominator(&self) -> Polynomial {
        expand(&self.den).expect("denominator already within exponent bound")
    }

    /// Denominator factors with multiplicities.
    pub fn denominator_factors(&self) -> &[(Polynomial, u32)] {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_empty()
    }

    pub fn as_constant(&self) -> Option<BigRational> {
        if self.den.is_empty() {
            self.num.as_constant()
        } else {
            None
        }
    }

    /// Number of stored terms, a rough size measure.
    pub fn size(&self) -> usize {
        self.num.len() + self.den.iter().map(|(f, _)| f.len()).sum::<usize>()
    }

    /// Least common denominator and the cofactors each side is multiplied by.
    fn common_denominator(&self, other: &Self) -> (Vec<(Polynomial, u32)>, Vec<(Polynomial, u32)>, Vec<(Polynomial, u32)>) {
        let mut lcm = self.den.clone();
        for (g, eg) in &other.den {
            match lcm.iter_mut().find(|(f, _)| f == g) {
                Some(slot) => slot.1 = slot.1.max(*eg),
                None => lcm.push((g.clone(), *eg)),
            }
        }
        let missing = |own: &[(Polynomial, u32)]| -> Vec<(Polynomial, u32)> {
            lcm.iter()
                .filter_map(|(f, e)| {
                    let have = own.iter().find(|(g, _)| g == f).map_or(0, |(_, k)| *k);
                    (*e > have).then(|| (f.clone(), e - have))
                })
                .collect()
        };
        let a = missing(&self.den);
        let b = missing(&other.den);
        (lcm, a, b)
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, ExprError> {
        if other.is_zero() {
            return Ok(self.clone());
        }
        if self.is_zero() {
            return Ok(other.clone());
        }
        let (lcm, ca, cb) = self.common_denominator(other);
        let num = &self.num.checked_mul(&expand(&ca)?)? + &other.num.checked_mul(&expand(&cb)?)?;
        Ok(Self::build(num, lcm))
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, ExprError> {
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero());
        }
        let mut da = self.den.clone();
        let mut db = other.den.clone();
        let na = cancel(self.num.clone(), &mut db);
        let nb = cancel(other.num.clone(), &mut da);
        for (f, e) in db {
            insert_factor(&mut da, f, e);
        }
        Ok(Self::build(na.checked_mul(&nb)?, da))
    }

    pub fn recip(&self) -> Result<Self, ExprError> {
        if self.is_zero() {
            return Err(ExprError::DivisionByZero { pos: None });
        }
        let (c, factors) = factor_basic(&self.num);
        let mut den = Vec::new();
        for (f, e) in factors {
            insert_factor(&mut den, f, e);
        }
        Ok(Self::build(expand(&self.den)?.scale(&c.recip()), den))
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self, ExprError> {
        self.checked_mul(&other.recip()?)
    }

    pub fn checked_pow(&self, exp: u32) -> Result<Self, ExprError> {
        if exp == 0 {
            return Ok(Self::one());
        }
        let mut den = Vec::with_capacity(self.den.len());
        for (f, e) in &self.den {
            let total = u64::from(*e) * u64::from(exp);
            if total > u64::from(super::MAX_EXPONENT) {
                return Err(ExprError::ExponentOverflow { exponent: total });
            }
            den.push((f.clone(), total as u32));
        }
        Ok(RationalFunction { num: self.num.checked_pow(exp)?, den })
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        RationalFunction { num: self.num.scale(c), den: self.den.clone() }
    }

    /// Derivative with respect to variable `var`; each denominator factor
    /// gains at most one power.
    pub fn partial(&self, var: usize) -> Self {
        let dn = self.num.partial(var);
        let moving: Vec<usize> = (0..self.den.len())
            .filter(|&i| !self.den[i].0.partial(var).is_zero())
            .collect();
        if moving.is_empty() {
            return Self::build(dn, self.den.clone());
        }
        // n/Π f_i^{e_i} with only the f_i in `moving` depending on var:
        // derivative = (n' P − n Σ e_i f_i' P/f_i) / (Π f_i^{e_i} · P), P = Π_{moving} f_i.
        let p: Polynomial = moving.iter().fold(Polynomial::one(), |acc, &i| &acc * &self.den[i].0);
        let mut num = &dn * &p;
        for &i in &moving {
            let (f, e) = &self.den[i];
            let others = moving
                .iter()
                .filter(|&&j| j != i)
                .fold(Polynomial::one(), |acc, &j| &acc * &self.den[j].0);
            let term = (&self.num * &f.partial(var)).scale(&BigRational::from_integer((*e).into()));
            num = &num - &(&term * &others);
        }
        let mut den = self.den.clone();
        for &i in &moving {
            den[i].1 += 1;
        }
        Self::build(num, den)
    }

    pub fn substitute(&self, var: usize, value: &BigRational) -> Result<Self, ExprError> {
        let mut out = Self::from_poly(self.num.substitute(var, value));
        for (f, e) in &self.den {
            let g = f.substitute(var, value);
            let piece = Self::new(Polynomial::one(), g)?.checked_pow(*e)?;
            out = out.checked_mul(&piece)?;
        }
        Ok(out)
    }

    pub fn eval_exact(&self, point: &[BigRational]) -> Result<BigRational, ExprError> {
        self.check_span(point.len())?;
        let mut d = BigRational::one();
        for (f, e) in &self.den {
            let v = f.eval_exact(point);
            if v.is_zero() {
                return Err(ExprError::Pole);
            }
            d *= num_traits::pow(v, *e as usize);
        }
        Ok(self.num.eval_exact(point) / d)
    }

    pub fn eval_f64(&self, point: &[f64]) -> Result<f64, ExprError> {
        self.check_span(point.len())?;
        let mut d = 1.0;
        for (f, e) in &self.den {
            let v = f.eval_f64(point);
            if v == 0.0 {
                return Err(ExprError::Pole);
            }
            d *= v.powi(*e as i32);
        }
        Ok(self.num.eval_f64(point) / d)
    }

    fn check_span(&self, len: usize) -> Result<(), ExprError> {
        let need = self.var_span();
        if len < need {
            return Err(ExprError::DimensionMismatch { expected: need, got: len });
        }
        Ok(())
    }

    pub fn var_span(&self) -> usize {
        self.den.iter().map(|(f, _)| f.var_span()).fold(self.num.var_span(), usize::max)
    }

    pub fn compile(&self) -> CompiledFunction {
        CompiledFunction {
            num: compile_poly(&self.num),
            den: self.den.iter().map(|(f, e)| (compile_poly(f), *e as i32)).collect(),
        }
    }

    /// `num` for polynomials, otherwise `(num)/(f1^e1*f2*…)` with multi-term
    /// factors parenthesised.
    pub fn display(&self, chart: &Chart) -> String {
        if self.den.is_empty() {
            return self.num.display(chart);
        }
        let factors: Vec<String> = self
            .den
            .iter()
            .map(|(f, e)| {
                let base = if f.len() == 1 && f.degree() == 1 {
                    f.display(chart)
                } else {
                    format!("({})", f.display(chart))
                };
                if *e == 1 {
                    base
                } else {
                    format!("{base}^{e}")
                }
            })
            .collect();
        format!("({})/({})", self.num.display(chart), factors.join("*"))
    }

    pub fn displayed<'a>(&'a self, chart: &'a Chart) -> Displayed<'a> {
        Displayed { f: self, chart }
    }
}

pub struct Displayed<'a> {
    f: &'a RationalFunction,
    chart: &'a Chart,
}

impl fmt::Display for Displayed<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.f.display(self.chart))
    }
}

impl PartialEq for RationalFunction {
    fn eq(&self, other: &Self) -> bool {
        if self.den == other.den {
            return self.num == other.num;
        }
        (self - other).is_zero()
    }
}

impl Eq for RationalFunction {}

impl Default for RationalFunction {
    fn default() -> Self {
        Self::zero()
    }
}

impl From<Polynomial> for RationalFunction {
    fn from(p: Polynomial) -> Self {
        Self::from_poly(p)
    }
}

impl From<i64> for RationalFunction {
    fn from(c: i64) -> Self {
        Self::from_int(c)
    }
}

impl From<BigRational> for RationalFunction {
    fn from(c: BigRational) -> Self {
        Self::constant(c)
    }
}

// Operator forms panic on exponent overflow or division by zero; the checked
// methods are the fallible API.
impl Add for &RationalFunction {
    type Output = RationalFunction;
    fn add(self, rhs: &RationalFunction) -> RationalFunction {
        self.checked_add(rhs).expect("polynomial exponent bound exceeded")
    }
}

impl Sub for &RationalFunction {
    type Output = RationalFunction;
    fn sub(self, rhs: &RationalFunction) -> RationalFunction {
        self + &(-rhs)
    }
}

impl Mul for &RationalFunction {
    type Output = RationalFunction;
    fn mul(self, rhs: &RationalFunction) -> RationalFunction {
        self.checked_mul(rhs).expect("polynomial exponent bound exceeded")
    }
}

impl Div for &RationalFunction {
    type Output = RationalFunction;
    fn div(self, rhs: &RationalFunction) -> RationalFunction {
        self.checked_div(rhs).expect("division by zero rational function")
    }
}

impl Neg for &RationalFunction {
    type Output = RationalFunction;
    fn neg(self) -> RationalFunction {
        RationalFunction { num: -&self.num, den: self.den.clone() }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for RationalFunction {
            type Output = RationalFunction;
            fn $m(self, rhs: RationalFunction) -> RationalFunction {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&RationalFunction> for RationalFunction {
            type Output = RationalFunction;
            fn $m(self, rhs: &RationalFunction) -> RationalFunction {
                (&self).$m(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl Neg for RationalFunction {
    type Output = RationalFunction;
    fn neg(self) -> RationalFunction {
        -&self
    }
}

impl std::iter::Sum for RationalFunction {
    fn sum<I: Iterator<Item = RationalFunction>>(iter: I) -> Self {
        iter.fold(RationalFunction::zero(), |a, b| &a + &b)
    }
}

/// Float evaluator with coefficients converted once; used on hot paths such as
/// ODE right-hand sides.
#[derive(Clone, Debug)]
pub struct CompiledFunction {
    num: Vec<(f64, Vec<(usize, i32)>)>,
    den: Vec<(Vec<(f64, Vec<(usize, i32)>)>, i32)>,
}

fn compile_poly(p: &Polynomial) -> Vec<(f64, Vec<(usize, i32)>)> {
    p.terms()
        .map(|(m, c)| {
            let powers = m
                .exponents()
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(i, &e)| (i, e as i32))
                .collect();
            (rational_to_f64(c), powers)
        })
        .collect()
}

fn eval_compiled(terms: &[(f64, Vec<(usize, i32)>)], x: &[f64]) -> f64 {
    terms
        .iter()
        .map(|(c, powers)| powers.iter().fold(*c, |acc, &(i, e)| acc * x[i].powi(e)))
        .sum()
}

impl CompiledFunction {
    /// Evaluates without a pole check; a vanishing denominator yields inf/NaN.
    pub fn eval(&self, x: &[f64]) -> f64 {
        let n = eval_compiled(&self.num, x);
        self.den.iter().fold(n, |acc, (d, e)| acc / eval_compiled(d, x).powi(*e))
    }

    pub fn has_pole_at(&self, x: &[f64]) -> bool {
        self.den.iter().any(|(d, _)| eval_compiled(d, x) == 0.0)
    }
}
