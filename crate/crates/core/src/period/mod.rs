//! Numerical flows of rational vector fields, period detection, and the
//! energy–period tests.

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use thiserror::Error;

use crate::expr::{Chart, CompiledFunction, RationalFunction};
use crate::geom::{DifferentialForm, GeomError, VectorField};

mod dopri;

pub use dopri::Segment;
use dopri::Stepper;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PeriodError {
    #[error("phase space dimension {0} is odd")]
    OddDimension(usize),
    #[error("expression uses {0} variables but the chart has only the coordinates")]
    FreeConstants(usize),
    #[error("field does not satisfy i_Γ(Σ dq∧dp) = dH")]
    NotHamiltonian,
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("step size underflow at t = {t}")]
    StepSizeUnderflow { t: f64 },
    #[error("step budget exhausted at t = {t}")]
    StepBudget { t: f64 },
    #[error("pole encountered at t = {t}")]
    Pole { t: f64 },
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("table fails the dependence test")]
    NotDependent,
    #[error(transparent)]
    Geom(#[from] GeomError),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FlowOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Radius of the return ball.
    pub eps: f64,
    pub t_max: f64,
}

impl Default for FlowOptions {
    fn default() -> Self {
        FlowOptions { rtol: 1e-10, atol: 1e-12, eps: 1e-6, t_max: 1e3 }
    }
}

impl FlowOptions {
    fn validate(&self) -> Result<(), PeriodError> {
        let ok = |v: f64| v.is_finite() && v > 0.0;
        if !(ok(self.rtol) && ok(self.atol) && ok(self.eps) && ok(self.t_max)) {
            return Err(PeriodError::InvalidInput("tolerances, eps and t_max must be positive".into()));
        }
        Ok(())
    }
}

/// A Hamiltonian and the field whose flow is integrated. Coordinates are
/// ordered `(q_1, …, q_n, p_1, …, p_n)`.
#[derive(Clone, Debug)]
pub struct FlowSystem {
    chart: Arc<Chart>,
    hamiltonian: RationalFunction,
    field: VectorField,
    h_fn: CompiledFunction,
    grad: Vec<CompiledFunction>,
    rhs: Vec<CompiledFunction>,
}

impl FlowSystem {
    /// `q̇_k = ∂H/∂p_k`, `ṗ_k = −∂H/∂q_k`, checked symbolically against
    /// `i_Γ(Σ dq_k∧dp_k) = dH`.
    pub fn from_hamiltonian(chart: &Arc<Chart>, h: RationalFunction) -> Result<Self, PeriodError> {
        let dim = chart.dim();
        if dim % 2 != 0 {
            return Err(PeriodError::OddDimension(dim));
        }
        let n = dim / 2;
        let comps: Vec<RationalFunction> =
            (0..n).map(|k| h.partial(n + k)).chain((0..n).map(|k| -h.partial(k))).collect();
        let field = VectorField::new(chart, comps)?;
        let mut omega = DifferentialForm::zero(chart, 2);
        for k in 0..n {
            let dq = DifferentialForm::basis(chart, k)?;
            let dp = DifferentialForm::basis(chart, n + k)?;
            omega = omega.add(&dq.wedge(&dp)?)?;
        }
        if omega.interior_product(&field)? != DifferentialForm::differential(chart, &h) {
            return Err(PeriodError::NotHamiltonian);
        }
        Self::with_field(chart, h, field)
    }

    /// A user-supplied field; `h` is only used to measure energy.
    pub fn with_field(chart: &Arc<Chart>, h: RationalFunction, field: VectorField) -> Result<Self, PeriodError> {
        let dim = chart.dim();
        if dim % 2 != 0 {
            return Err(PeriodError::OddDimension(dim));
        }
        let span = field.components().iter().map(RationalFunction::var_span).fold(h.var_span(), usize::max);
        if span > dim {
            return Err(PeriodError::FreeConstants(span));
        }
        Ok(FlowSystem {
            chart: chart.clone(),
            h_fn: h.compile(),
            grad: (0..dim).map(|i| h.partial(i).compile()).collect(),
            rhs: field.components().iter().map(RationalFunction::compile).collect(),
            hamiltonian: h,
            field,
        })
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn hamiltonian(&self) -> &RationalFunction {
        &self.hamiltonian
    }

    pub fn field(&self) -> &VectorField {
        &self.field
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    pub fn energy(&self, x: &[f64]) -> f64 {
        self.h_fn.eval(x)
    }

    pub fn velocity(&self, x: &[f64], out: &mut [f64]) {
        for (o, f) in out.iter_mut().zip(&self.rhs) {
            *o = f.eval(x);
        }
    }

    fn check_point(&self, x0: &[f64]) -> Result<(), PeriodError> {
        if x0.len() != self.dim() {
            return Err(PeriodError::InvalidInput(format!("point has {} components, expected {}", x0.len(), self.dim())));
        }
        if self.rhs.iter().chain([&self.h_fn]).any(|f| f.has_pole_at(x0)) {
            return Err(PeriodError::Pole { t: 0.0 });
        }
        Ok(())
    }
}

/// Accepted steps of one integration with their dense output.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub x0: Vec<f64>,
    pub energy0: f64,
    pub segments: Vec<Segment>,
    /// Largest `|H(x) − H(x0)|` over the step nodes.
    pub energy_drift: f64,
}

impl Trajectory {
    pub fn t_end(&self) -> f64 {
        self.segments.last().map_or(0.0, Segment::t1)
    }

    pub fn final_state(&self) -> Vec<f64> {
        self.segments.last().map_or_else(|| self.x0.clone(), |s| s.y1.clone())
    }

    /// Dense-output state at `t ∈ [0, t_end]`.
    pub fn state_at(&self, t: f64) -> Vec<f64> {
        let i = self.segments.partition_point(|s| s.t1() < t);
        match self.segments.get(i) {
            Some(s) => s.eval(t),
            None => self.final_state(),
        }
    }

    /// `(t, x)` at every step node, starting at `t = 0`.
    pub fn nodes(&self) -> Vec<(f64, Vec<f64>)> {
        std::iter::once((0.0, self.x0.clone())).chain(self.segments.iter().map(|s| (s.t1(), s.y1.clone()))).collect()
    }
}

pub fn integrate(sys: &FlowSystem, x0: &[f64], t_end: f64, rtol: f64, atol: f64) -> Result<Trajectory, PeriodError> {
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(PeriodError::InvalidInput("t_end must be positive".into()));
    }
    FlowOptions { rtol, atol, eps: 1.0, t_max: t_end }.validate()?;
    sys.check_point(x0)?;
    let f = |x: &[f64], out: &mut [f64]| sys.velocity(x, out);
    let mut stepper = Stepper::new(&f, x0, rtol, atol, t_end)?;
    let energy0 = sys.energy(x0);
    let mut traj = Trajectory { x0: x0.to_vec(), energy0, segments: Vec::new(), energy_drift: 0.0 };
    while stepper.t() < t_end {
        let seg = stepper.step(t_end)?;
        traj.energy_drift = traj.energy_drift.max((sys.energy(&seg.y1) - energy0).abs());
        traj.segments.push(seg);
    }
    Ok(traj)
}

#[derive(Clone, Debug, PartialEq)]
pub enum PeriodOutcome {
    Periodic {
        tau: f64,
        /// `|x(τ) − x0|` at the refined return.
        distance: f64,
        /// The refined return is farther than `eps/10`.
        ambiguous: bool,
        energy_drift: f64,
    },
    NotPeriodic {
        /// Closest approach to `x0` seen after leaving the ball, if any.
        closest: Option<f64>,
        energy_drift: f64,
    },
}

impl PeriodOutcome {
    pub fn period(&self) -> Option<f64> {
        match self {
            PeriodOutcome::Periodic { tau, .. } => Some(*tau),
            PeriodOutcome::NotPeriodic { .. } => None,
        }
    }
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

fn dot_offset(x: &[f64], x0: &[f64], v: &[f64]) -> f64 {
    x.iter().zip(x0).zip(v).map(|((a, b), c)| (a - b) * c).sum()
}

/// Minimizes `|seg(t) − x0|` on `[a, b]` by golden section.
fn golden_min(seg: &Segment, x0: &[f64], mut a: f64, mut b: f64) -> (f64, f64) {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let d = |t: f64| dist(&seg.eval(t), x0);
    let mut c = b - g * (b - a);
    let mut e = a + g * (b - a);
    let (mut fc, mut fe) = (d(c), d(e));
    for _ in 0..200 {
        if (b - a).abs() <= 4.0 * f64::EPSILON * b.abs().max(1.0) {
            break;
        }
        if fc < fe {
            b = e;
            e = c;
            fe = fc;
            c = b - g * (b - a);
            fc = d(c);
        } else {
            a = c;
            c = e;
            fc = fe;
            e = a + g * (b - a);
            fe = d(e);
        }
    }
    let t = 0.5 * (a + b);
    (t, d(t))
}

/// Interior samples per step at which the approach rate is checked, so a
/// closest approach inside a long step is not missed.
const PROBES: usize = 4;

/// First return of the full phase-space state to the `eps`-ball around `x0`
/// after leaving it.
pub fn detect_period(sys: &FlowSystem, x0: &[f64], opts: &FlowOptions) -> Result<PeriodOutcome, PeriodError> {
    opts.validate()?;
    sys.check_point(x0)?;
    let f = |x: &[f64], out: &mut [f64]| sys.velocity(x, out);
    let mut stepper = Stepper::new(&f, x0, opts.rtol, opts.atol, opts.t_max)?;
    let energy0 = sys.energy(x0);
    let mut drift = 0.0f64;
    if stepper.derivative().iter().all(|v| *v == 0.0) {
        return Ok(PeriodOutcome::NotPeriodic { closest: None, energy_drift: 0.0 });
    }
    let mut left = false;
    let mut closest: Option<f64> = None;
    let mut v = vec![0.0; x0.len()];
    let mut prev_rate = 0.0;
    while stepper.t() < opts.t_max {
        let seg = stepper.step(opts.t_max)?;
        drift = drift.max((sys.energy(&seg.y1) - energy0).abs());
        let mut t_prev = seg.t0;
        for j in 1..=PROBES + 1 {
            let t = seg.t0 + seg.h * j as f64 / (PROBES + 1) as f64;
            let (x, rate) = if j == PROBES + 1 {
                (seg.y1.clone(), dot_offset(&seg.y1, x0, &seg.f1))
            } else {
                let x = seg.eval(t);
                sys.velocity(&x, &mut v);
                let r = dot_offset(&x, x0, &v);
                (x, r)
            };
            if !left {
                if dist(&x, x0) > opts.eps {
                    left = true;
                }
            } else if prev_rate < 0.0 && rate >= 0.0 {
                let (tau, d) = golden_min(&seg, x0, t_prev, t);
                closest = Some(closest.map_or(d, |c: f64| c.min(d)));
                if d <= opts.eps {
                    return Ok(PeriodOutcome::Periodic {
                        tau,
                        distance: d,
                        ambiguous: d > opts.eps / 10.0,
                        energy_drift: drift,
                    });
                }
            }
            prev_rate = rate;
            t_prev = t;
        }
    }
    Ok(PeriodOutcome::NotPeriodic { closest, energy_drift: drift })
}

#[derive(Clone, Debug, PartialEq)]
pub struct PeriodRecord {
    /// Requested energy of the level this record belongs to.
    pub level: f64,
    pub seed: Vec<f64>,
    /// `H(seed)`.
    pub energy: f64,
    pub period: Option<f64>,
    pub converged: bool,
    pub energy_drift: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct PeriodTable {
    pub records: Vec<PeriodRecord>,
    /// Requested energies for which no seed point was found.
    pub empty_levels: Vec<f64>,
}

impl PeriodTable {
    /// Records grouped by level in table order.
    pub fn levels(&self) -> Vec<(f64, Vec<usize>)> {
        let mut out: Vec<(f64, Vec<usize>)> = Vec::new();
        for (i, r) in self.records.iter().enumerate() {
            match out.iter_mut().find(|(l, _)| *l == r.level) {
                Some((_, idx)) => idx.push(i),
                None => out.push((r.level, vec![i])),
            }
        }
        out
    }

    pub fn periods(&self) -> Vec<f64> {
        self.records.iter().filter_map(|r| r.period).collect()
    }
}

/// Detects the period from each `(level, seed)` pair; integrations run in
/// parallel and the table keeps the input order.
pub fn period_table_from_seeds(
    sys: &FlowSystem,
    seeds: &[(f64, Vec<f64>)],
    opts: &FlowOptions,
) -> Result<PeriodTable, PeriodError> {
    let records: Result<Vec<PeriodRecord>, PeriodError> = seeds
        .par_iter()
        .map(|(level, x0)| {
            let outcome = detect_period(sys, x0, opts)?;
            let (period, converged, energy_drift) = match outcome {
                PeriodOutcome::Periodic { tau, ambiguous, energy_drift, .. } => (Some(tau), !ambiguous, energy_drift),
                PeriodOutcome::NotPeriodic { energy_drift, .. } => (None, false, energy_drift),
            };
            Ok(PeriodRecord { level: *level, seed: x0.clone(), energy: sys.energy(x0), period, converged, energy_drift })
        })
        .collect();
    Ok(PeriodTable { records: records?, empty_levels: Vec::new() })
}

/// Scale `s > 0` with `H(s·u) = e`: a doubling search for a sign change,
/// bisection, then Newton polishing inside the bracket.
fn scale_to_energy(sys: &FlowSystem, u: &[f64], e: f64) -> Option<Vec<f64>> {
    let at = |s: f64| -> Vec<f64> { u.iter().map(|v| v * s).collect() };
    let g = |s: f64| sys.energy(&at(s)) - e;
    let g0 = g(0.0);
    if !g0.is_finite() {
        return None;
    }
    if g0 == 0.0 {
        return Some(at(0.0));
    }
    let mut lo = 0.0;
    let mut hi = 1e-3;
    let mut found = false;
    for _ in 0..80 {
        let v = g(hi);
        if v.is_finite() && v.signum() != g0.signum() {
            found = true;
            break;
        }
        lo = hi;
        hi *= 2.0;
    }
    if !found {
        return None;
    }
    let sign_lo = g(lo).signum();
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let v = g(mid);
        if v == 0.0 {
            return Some(at(mid));
        }
        if v.signum() == sign_lo {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo) <= 1e-8 * hi {
            break;
        }
    }
    let mut s = 0.5 * (lo + hi);
    for _ in 0..8 {
        let x = at(s);
        let slope: f64 = sys.grad.iter().zip(u).map(|(gr, ui)| gr.eval(&x) * ui).sum();
        if slope == 0.0 || !slope.is_finite() {
            break;
        }
        let next = s - g(s) / slope;
        if !(next >= lo && next <= hi) {
            break;
        }
        s = next;
    }
    Some(at(s))
}

/// Seeds on each requested energy level from random directions scaled to the
/// level, then the period from each seed.
pub fn period_energy_scan(
    sys: &FlowSystem,
    energies: &[f64],
    seeds_per_energy: usize,
    seed: u64,
    opts: &FlowOptions,
) -> Result<PeriodTable, PeriodError> {
    opts.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = sys.dim();
    let mut seeds = Vec::new();
    let mut empty = Vec::new();
    for &e in energies {
        let mut level = Vec::new();
        for _ in 0..seeds_per_energy {
            let mut u: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(&mut rng)).collect();
            let norm = u.iter().map(|v| v * v).sum::<f64>().sqrt();
            u.iter_mut().for_each(|v| *v /= norm);
            if let Some(x) = scale_to_energy(sys, &u, e) {
                level.push((e, x));
            }
        }
        if level.is_empty() && seeds_per_energy > 0 {
            empty.push(e);
        }
        seeds.extend(level);
    }
    let mut table = period_table_from_seeds(sys, &seeds, opts)?;
    table.empty_levels = empty;
    Ok(table)
}

#[derive(Clone, Debug, PartialEq)]
pub struct LevelViolation {
    pub level: f64,
    /// `(max − min)/min` of the periods on the level.
    pub spread: f64,
    pub records: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Dependence {
    Dependent {
        /// No level had two periods to compare.
        insufficient_sampling: bool,
    },
    Violated(Vec<LevelViolation>),
}

impl Dependence {
    pub fn is_dependent(&self) -> bool {
        matches!(self, Dependence::Dependent { .. })
    }
}

fn relative_spread(periods: &[f64]) -> f64 {
    let max = periods.iter().copied().fold(f64::MIN, f64::max);
    let min = periods.iter().copied().fold(f64::MAX, f64::min);
    (max - min) / min
}

/// The period is a function of the energy on the sampled levels iff every
/// level's periods agree within `rel_tol`. Records without a period are left
/// out of the comparison.
pub fn dependence_test(table: &PeriodTable, rel_tol: f64) -> Result<Dependence, PeriodError> {
    if table.periods().is_empty() {
        return Err(PeriodError::InsufficientData("no record has a detected period".into()));
    }
    let mut compared = false;
    let mut violations = Vec::new();
    for (level, idx) in table.levels() {
        let with_period: Vec<usize> = idx.into_iter().filter(|&i| table.records[i].period.is_some()).collect();
        if with_period.len() < 2 {
            continue;
        }
        compared = true;
        let periods: Vec<f64> = with_period.iter().filter_map(|&i| table.records[i].period).collect();
        let spread = relative_spread(&periods);
        if spread > rel_tol {
            violations.push(LevelViolation { level, spread, records: with_period });
        }
    }
    if violations.is_empty() {
        Ok(Dependence::Dependent { insufficient_sampling: !compared })
    } else {
        Ok(Dependence::Violated(violations))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Obstruction {
    Obstructed(String),
    Inconclusive,
}

/// Compares the observed period sets of two systems. One-sided: differing
/// period behaviour rules out a diffeomorphism, agreement proves nothing.
pub fn equivalence_obstruction(a: &PeriodTable, b: &PeriodTable, rel_tol: f64) -> Result<Obstruction, PeriodError> {
    for t in [a, b] {
        if !dependence_test(t, rel_tol)?.is_dependent() {
            return Err(PeriodError::NotDependent);
        }
    }
    let (pa, pb) = (a.periods(), b.periods());
    let (ca, cb) = (relative_spread(&pa) <= rel_tol, relative_spread(&pb) <= rel_tol);
    if ca != cb {
        return Ok(Obstruction::Obstructed("constant vs. energy-dependent period".into()));
    }
    let range = |p: &[f64]| (p.iter().copied().fold(f64::MAX, f64::min), p.iter().copied().fold(f64::MIN, f64::max));
    let ((alo, ahi), (blo, bhi)) = (range(&pa), range(&pb));
    if ahi * (1.0 + rel_tol) < blo || bhi * (1.0 + rel_tol) < alo {
        return Ok(Obstruction::Obstructed("disjoint period ranges".into()));
    }
    Ok(Obstruction::Inconclusive)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expression;
    use std::f64::consts::PI;

    fn system(h: &str, n: usize) -> FlowSystem {
        let names: Vec<String> = (1..=n).map(|k| format!("q{k}")).chain((1..=n).map(|k| format!("p{k}"))).collect();
        let chart = Arc::new(Chart::new(&names).unwrap());
        let h = parse_expression(h, &chart).unwrap();
        FlowSystem::from_hamiltonian(&chart, h).unwrap()
    }

    #[test]
    fn harmonic_returns_after_two_pi() {
        let sys = system("(p1^2 + q1^2)/2", 1);
        let traj = integrate(&sys, &[1.0, 0.0], 2.0 * PI, 1e-10, 1e-12).unwrap();
        assert!(dist(&traj.final_state(), &[1.0, 0.0]) < 1e-8);
        // q̇ = p, ṗ = −q: at π/2 the state is (0, −1).
        assert!(dist(&traj.state_at(PI / 2.0), &[0.0, -1.0]) < 1e-8);
    }

    #[test]
    fn zero_field_is_constant() {
        let chart = Arc::new(Chart::new(&["q1", "p1"]).unwrap());
        let sys = FlowSystem::with_field(&chart, RationalFunction::zero(), VectorField::zero(&chart)).unwrap();
        let traj = integrate(&sys, &[0.3, -0.7], 5.0, 1e-10, 1e-12).unwrap();
        assert_eq!(traj.final_state(), vec![0.3, -0.7]);
        let out = detect_period(&sys, &[0.3, -0.7], &FlowOptions::default()).unwrap();
        assert!(out.period().is_none());
    }

    #[test]
    fn quartic_period() {
        let sys = system("(p1^2 + q1^2)^2", 1);
        let x0 = [0.8, 0.5];
        let e = sys.energy(&x0);
        let tau = detect_period(&sys, &x0, &FlowOptions::default()).unwrap().period().unwrap();
        assert!((tau - PI / (2.0 * e.sqrt())).abs() < 1e-6);
    }

    #[test]
    fn free_particle_is_not_periodic() {
        let sys = system("p1^2/2", 1);
        let out = detect_period(&sys, &[0.0, 1.0], &FlowOptions::default()).unwrap();
        assert!(matches!(out, PeriodOutcome::NotPeriodic { .. }));
    }

    #[test]
    fn scan_hits_requested_energies() {
        let sys = system("(p1^2 + q1^2 + p2^2 + q2^2)/2", 2);
        let table = period_energy_scan(&sys, &[0.5, 2.0], 2, 7, &FlowOptions::default()).unwrap();
        assert_eq!(table.records.len(), 4);
        for r in &table.records {
            assert!((r.energy - r.level).abs() < 1e-9 * r.level, "{} vs {}", r.energy, r.level);
        }
        assert!(period_energy_scan(&sys, &[], 3, 7, &FlowOptions::default()).unwrap().records.is_empty());
    }

    #[test]
    fn unattainable_energy_is_empty() {
        let sys = system("(p1^2 + q1^2)/2", 1);
        let table = period_energy_scan(&sys, &[-1.0], 2, 1, &FlowOptions::default()).unwrap();
        assert!(table.records.is_empty());
        assert_eq!(table.empty_levels, vec![-1.0]);
    }

    #[test]
    fn odd_dimension_and_bad_options() {
        let chart = Arc::new(Chart::new(&["x"]).unwrap());
        let h = parse_expression("x", &chart).unwrap();
        assert_eq!(FlowSystem::from_hamiltonian(&chart, h).unwrap_err(), PeriodError::OddDimension(1));
        let sys = system("(p1^2 + q1^2)/2", 1);
        assert!(integrate(&sys, &[1.0, 0.0], -1.0, 1e-10, 1e-12).is_err());
        let bad = FlowOptions { eps: 0.0, ..FlowOptions::default() };
        assert!(detect_period(&sys, &[1.0, 0.0], &bad).is_err());
    }

    fn record(level: f64, period: Option<f64>) -> PeriodRecord {
        PeriodRecord { level, seed: vec![0.0, 0.0], energy: level, period, converged: period.is_some(), energy_drift: 0.0 }
    }

    #[test]
    fn dependence_on_synthetic_tables() {
        let t = PeriodTable { records: vec![record(1.0, Some(2.0)), record(1.0, Some(2.0 + 1e-9)), record(2.0, Some(1.0))], empty_levels: vec![] };
        assert_eq!(dependence_test(&t, 1e-6).unwrap(), Dependence::Dependent { insufficient_sampling: false });
        let t = PeriodTable { records: vec![record(1.0, Some(2.0)), record(2.0, Some(1.0))], empty_levels: vec![] };
        assert_eq!(dependence_test(&t, 1e-6).unwrap(), Dependence::Dependent { insufficient_sampling: true });
        let t = PeriodTable { records: vec![record(1.0, Some(2.0)), record(1.0, Some(3.0))], empty_levels: vec![] };
        assert!(matches!(dependence_test(&t, 1e-6).unwrap(), Dependence::Violated(v) if v[0].records == vec![0, 1]));
        let t = PeriodTable { records: vec![record(1.0, None)], empty_levels: vec![] };
        assert!(dependence_test(&t, 1e-6).is_err());
    }

    #[test]
    fn obstruction_on_synthetic_tables() {
        let constant = PeriodTable { records: vec![record(1.0, Some(6.0)), record(2.0, Some(6.0))], empty_levels: vec![] };
        let varying = PeriodTable { records: vec![record(1.0, Some(1.5)), record(4.0, Some(0.75))], empty_levels: vec![] };
        let other = PeriodTable { records: vec![record(1.0, Some(3.0)), record(2.0, Some(3.0))], empty_levels: vec![] };
        assert!(matches!(equivalence_obstruction(&constant, &varying, 1e-6).unwrap(), Obstruction::Obstructed(_)));
        assert_eq!(equivalence_obstruction(&constant, &constant, 1e-6).unwrap(), Obstruction::Inconclusive);
        assert_eq!(
            equivalence_obstruction(&constant, &other, 1e-6).unwrap(),
            Obstruction::Obstructed("disjoint period ranges".into())
        );
    }
}
