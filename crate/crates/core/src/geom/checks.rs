use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_rational::BigRational;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::expr::{rational_to_f64, Chart, RationalFunction};
use crate::linalg;
use crate::sample::pole_free_points;

use super::{
    lie_derivative, lie_derivative_tensor, omega_tf, same_chart, twisted_differential,
    DifferentialForm, GeomError, Tensor11, VectorField,
};

/// Three-valued outcome for checks that cannot always be decided.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    True,
    False,
    Unknown,
}

impl Verdict {
    pub fn from_bool(b: bool) -> Self {
        if b {
            Verdict::True
        } else {
            Verdict::False
        }
    }

    pub fn and(self, other: Verdict) -> Verdict {
        match (self, other) {
            (Verdict::False, _) | (_, Verdict::False) => Verdict::False,
            (Verdict::True, Verdict::True) => Verdict::True,
            _ => Verdict::Unknown,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::True => "true",
            Verdict::False => "false",
            Verdict::Unknown => "unknown",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Sampling parameters for pointwise checks.
#[derive(Clone, Copy, Debug)]
pub struct CheckOptions {
    pub samples: usize,
    pub seed: u64,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions { samples: 8, seed: 42 }
    }
}

fn sample_points(
    chart: &Chart,
    opts: &CheckOptions,
    avoid: &[&RationalFunction],
) -> Vec<Vec<BigRational>> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    pole_free_points(&mut rng, chart, opts.samples, avoid)
}

fn eval_matrix(m: &[Vec<RationalFunction>], point: &[BigRational]) -> Result<Vec<Vec<BigRational>>, GeomError> {
    m.iter()
        .map(|row| row.iter().map(|f| f.eval_exact(point).map_err(GeomError::from)).collect())
        .collect()
}

/// Symbolic determinant of the coefficient matrix of a 2-form.
fn form_determinant(omega: &DifferentialForm) -> Result<RationalFunction, GeomError> {
    Ok(linalg::determinant(&omega.matrix()?))
}

#[derive(Clone, Debug)]
pub struct HamiltonianReport {
    /// `i_Γ ω = dH` and `dω = 0`, both exactly.
    pub holds: bool,
    pub closed: bool,
    pub nondegenerate: Verdict,
    /// Determinant of the coefficient matrix of ω.
    pub determinant: RationalFunction,
    /// Number of sample points at which the determinant vanishes.
    pub degenerate_samples: usize,
    pub samples: usize,
    /// `i_Γ ω − dH`.
    pub residual: DifferentialForm,
}

/// Decides whether `(ω, H)` is a Hamiltonian description of `Γ`, with the
/// convention `i_Γ ω = dH`.
pub fn is_hamiltonian_description(
    gamma: &VectorField,
    omega: &DifferentialForm,
    h: &RationalFunction,
    opts: &CheckOptions,
) -> Result<HamiltonianReport, GeomError> {
    let chart = gamma.chart();
    same_chart(chart, omega.chart())?;
    if omega.degree() != 2 {
        return Err(GeomError::DegreeMismatch { expected: 2, got: omega.degree() });
    }
    if chart.dim() % 2 != 0 {
        return Err(GeomError::OddDimension(chart.dim()));
    }
    let residual = omega.interior_product(gamma)?.sub(&DifferentialForm::differential(chart, h))?;
    let closed = omega.exterior_derivative().is_zero();
    let determinant = form_determinant(omega)?;
    let nondegenerate = Verdict::from_bool(!determinant.is_zero());
    let points = sample_points(chart, opts, &[&determinant]);
    let mut degenerate_samples = 0;
    for p in &points {
        if determinant.eval_exact(p)? == BigRational::from_integer(0.into()) {
            degenerate_samples += 1;
        }
    }
    Ok(HamiltonianReport {
        holds: residual.is_zero() && closed,
        closed,
        nondegenerate,
        determinant,
        degenerate_samples,
        samples: points.len(),
        residual,
    })
}

#[derive(Clone, Debug)]
pub struct NormalFormReport {
    /// (i): `df_1 ∧ ⋯ ∧ df_n` is a non-zero form.
    pub independent: bool,
    /// Sample points at which the differentials have full rank.
    pub independent_samples: usize,
    /// (ii): pairwise brackets vanish and the fields have full rank somewhere.
    pub commuting: bool,
    pub brackets_vanish: bool,
    pub fields_full_rank_samples: usize,
    /// (iii): `L_{X_j} f_l = 0` for all pairs.
    pub invariant_integrals: bool,
    /// Every `f_l` is a first integral of Γ.
    pub first_integrals: bool,
    /// `Γ = Σ ν^j X_j` exactly, when ν was supplied.
    pub decomposition_exact: Option<bool>,
    /// Largest least-squares residual of `Γ = Σ ν^j X_j` over the samples, when ν
    /// was not supplied.
    pub decomposition_residual: Option<f64>,
    /// Completeness of the `X_j` is never checked.
    pub completeness_assumed: bool,
    pub samples: usize,
    pub holds: bool,
}

/// Least-squares residual below which a pointwise decomposition is accepted.
const DECOMPOSITION_TOL: f64 = 1e-9;

/// Checks the normal-form conditions for `Γ = ν^j(f) X_j`.
pub fn check_normal_form(
    gamma: &VectorField,
    integrals: &[RationalFunction],
    fields: &[VectorField],
    nu: Option<&[RationalFunction]>,
    opts: &CheckOptions,
) -> Result<NormalFormReport, GeomError> {
    let chart = gamma.chart();
    let dim = chart.dim();
    let n = fields.len();
    if integrals.len() != n {
        return Err(GeomError::DimensionMismatch { expected: n, got: integrals.len() });
    }
    if n > dim {
        return Err(GeomError::DimensionMismatch { expected: dim, got: n });
    }
    if let Some(nu) = nu {
        if nu.len() != n {
            return Err(GeomError::DimensionMismatch { expected: n, got: nu.len() });
        }
    }
    for x in fields {
        same_chart(chart, x.chart())?;
    }

    let mut wedge = DifferentialForm::function(chart, RationalFunction::one());
    for f in integrals {
        wedge = wedge.wedge(&DifferentialForm::differential(chart, f))?;
    }
    let independent = n == 0 || !wedge.is_zero();

    let mut brackets_vanish = true;
    for j in 0..n {
        for l in j + 1..n {
            if !fields[j].bracket(&fields[l])?.is_zero() {
                brackets_vanish = false;
            }
        }
    }
    let invariant_integrals = fields
        .iter()
        .all(|x| integrals.iter().all(|f| x.apply(f).is_zero()));
    let first_integrals = integrals.iter().all(|f| gamma.apply(f).is_zero());

    let decomposition_exact = match nu {
        Some(nu) => {
            let mut sum = VectorField::zero(chart);
            for (x, c) in fields.iter().zip(nu) {
                sum = sum.add(&x.scale(c))?;
            }
            Some(sum == *gamma)
        }
        None => None,
    };

    let grads: Vec<Vec<RationalFunction>> = integrals
        .iter()
        .map(|f| (0..dim).map(|i| f.partial(i)).collect())
        .collect();
    let field_rows: Vec<Vec<RationalFunction>> =
        fields.iter().map(|x| x.components().to_vec()).collect();
    let mut avoid: Vec<&RationalFunction> = integrals.iter().collect();
    avoid.extend(field_rows.iter().flatten());
    avoid.extend(gamma.components());
    if let Some(nu) = nu {
        avoid.extend(nu);
    }
    let points = sample_points(chart, opts, &avoid);
    if points.is_empty() && opts.samples > 0 {
        return Err(GeomError::NoSamplePoints);
    }

    let mut independent_samples = 0;
    let mut fields_full_rank_samples = 0;
    let mut worst_residual: f64 = 0.0;
    for p in &points {
        if linalg::rank(&eval_matrix(&grads, p)?) == n {
            independent_samples += 1;
        }
        let xs = eval_matrix(&field_rows, p)?;
        if linalg::rank(&xs) == n {
            fields_full_rank_samples += 1;
        }
        if nu.is_none() && n > 0 {
            let m = DMatrix::from_fn(dim, n, |i, j| rational_to_f64(&xs[j][i]));
            let mut b = DVector::zeros(dim);
            for i in 0..dim {
                b[i] = rational_to_f64(&gamma.component(i).eval_exact(p)?);
            }
            let svd = m.clone().svd(true, true);
            let sol = svd.solve(&b, 1e-12).map_err(|_| GeomError::NoSamplePoints)?;
            let r = (&m * sol - &b).norm() / b.norm().max(1.0);
            worst_residual = worst_residual.max(r);
        }
    }

    let decomposition_residual = if nu.is_none() {
        Some(if n == 0 { gamma.is_zero().then_some(0.0).unwrap_or(f64::INFINITY) } else { worst_residual })
    } else {
        None
    };
    let commuting = brackets_vanish && (n == 0 || fields_full_rank_samples > 0);
    let independent = independent && (n == 0 || independent_samples > 0);
    let decomposes = match (decomposition_exact, decomposition_residual) {
        (Some(e), _) => e,
        (None, Some(r)) => r <= DECOMPOSITION_TOL,
        _ => false,
    };
    Ok(NormalFormReport {
        independent,
        independent_samples,
        commuting,
        brackets_vanish,
        fields_full_rank_samples,
        invariant_integrals,
        first_integrals,
        decomposition_exact,
        decomposition_residual,
        completeness_assumed: true,
        samples: points.len(),
        holds: independent && commuting && invariant_integrals && decomposes,
    })
}

/// The geometric structures that can be validated.
#[derive(Clone, Debug)]
pub enum StructureKind {
    /// Soldering tensor `S` and Liouville field `Δ`.
    Tangent { s: Tensor11, delta: VectorField },
    /// Liouville 1-form `θ` and field `Δ`.
    Cotangent { theta: DifferentialForm, delta: VectorField },
    /// Euler-type field of a linear structure.
    Linear { delta: VectorField },
}

#[derive(Clone, Debug)]
pub struct NamedCheck {
    pub name: &'static str,
    pub verdict: Verdict,
    /// Informational checks do not enter the overall verdict.
    pub informational: bool,
}

#[derive(Clone, Debug)]
pub struct StructureReport {
    pub kind: &'static str,
    pub checks: Vec<NamedCheck>,
    pub valid: Verdict,
}

fn check(name: &'static str, verdict: Verdict) -> NamedCheck {
    NamedCheck { name, verdict, informational: false }
}

pub fn validate_structures(kind: &StructureKind, opts: &CheckOptions) -> Result<StructureReport, GeomError> {
    let (label, checks) = match kind {
        StructureKind::Tangent { s, delta } => ("tangent", tangent_checks(s, delta)?),
        StructureKind::Cotangent { theta, delta } => ("cotangent", cotangent_checks(theta, delta)?),
        StructureKind::Linear { delta } => ("linear", linear_checks(delta, opts)?),
    };
    let valid = checks
        .iter()
        .filter(|c| !c.informational)
        .fold(Verdict::True, |acc, c| acc.and(c.verdict));
    Ok(StructureReport { kind: label, checks, valid })
}

fn tangent_checks(s: &Tensor11, delta: &VectorField) -> Result<Vec<NamedCheck>, GeomError> {
    let chart = s.chart();
    same_chart(chart, delta.chart())?;
    let dim = chart.dim();
    let square_zero = s.compose(s)?.is_zero();
    let kills_delta = s.apply(delta)?.is_zero();
    let ker_im = if s.is_constant() && dim % 2 == 0 {
        let consts: Vec<Vec<BigRational>> = s
            .rows()
            .iter()
            .map(|r| r.iter().map(|f| f.as_constant().expect("constant tensor")).collect())
            .collect();
        Verdict::from_bool(square_zero && linalg::rank(&consts) == dim / 2)
    } else if s.is_constant() {
        Verdict::False
    } else {
        Verdict::Unknown
    };
    let mut ds_squared = true;
    for i in 0..dim {
        let xi = RationalFunction::var(i);
        if !s.twisted_d(&twisted_differential(s, &xi))?.is_zero() {
            ds_squared = false;
        }
    }
    Ok(vec![
        check("S∘S = 0", Verdict::from_bool(square_zero)),
        check("S(Δ) = 0", Verdict::from_bool(kills_delta)),
        check("ker S = Im S", ker_im),
        check("d_S d_S x = 0", Verdict::from_bool(ds_squared)),
    ])
}

fn cotangent_checks(theta: &DifferentialForm, delta: &VectorField) -> Result<Vec<NamedCheck>, GeomError> {
    same_chart(theta.chart(), delta.chart())?;
    if theta.degree() != 1 {
        return Err(GeomError::DegreeMismatch { expected: 1, got: theta.degree() });
    }
    let dtheta = theta.exterior_derivative();
    let liouville = dtheta.interior_product(delta)? == *theta;
    let nondegenerate = theta.chart().dim() % 2 == 0 && !form_determinant(&dtheta)?.is_zero();
    Ok(vec![
        check("i_Δ dθ = θ", Verdict::from_bool(liouville)),
        check("dθ nondegenerate", Verdict::from_bool(nondegenerate)),
    ])
}

fn linear_checks(delta: &VectorField, opts: &CheckOptions) -> Result<Vec<NamedCheck>, GeomError> {
    let chart: &Arc<Chart> = delta.chart();
    let dim = chart.dim();
    let mut origin_rng = ChaCha8Rng::seed_from_u64(opts.seed);
    // Constants keep random values; coordinates are set to zero.
    let consts = crate::sample::random_point(&mut origin_rng, chart.nvars() - dim);
    let zero = BigRational::from_integer(0.into());
    let mut origin = vec![zero.clone(); dim];
    origin.extend(consts);
    let vanishes_at_origin = delta
        .components()
        .iter()
        .all(|c| c.eval_exact(&origin).map(|v| v == zero).unwrap_or(false));

    let avoid: Vec<&RationalFunction> = delta.components().iter().collect();
    let points = sample_points(chart, opts, &avoid);
    let mut stray_zero = false;
    for p in &points {
        let off_origin = p[..dim].iter().any(|v| *v != zero);
        let all_zero = delta
            .components()
            .iter()
            .all(|c| c.eval_exact(p).map(|v| v == zero).unwrap_or(false));
        if off_origin && all_zero {
            stray_zero = true;
        }
    }
    let euler = (0..dim).all(|i| {
        lie_derivative(delta, &RationalFunction::var(i)).map(|v| v == RationalFunction::var(i)).unwrap_or(false)
    });
    Ok(vec![
        check("Δ vanishes at the origin", Verdict::from_bool(vanishes_at_origin)),
        check("no sampled zeros of Δ away from the origin", Verdict::from_bool(!stray_zero)),
        NamedCheck {
            name: "coordinates are Δ-homogeneous of degree one",
            verdict: if euler { Verdict::True } else { Verdict::Unknown },
            informational: true,
        },
    ])
}

/// Alternative description built from an invariant tensor and a constant of
/// the motion.
#[derive(Clone, Debug)]
pub struct DerivedDescription {
    /// `L_Γ T = 0`.
    pub tensor_invariant: bool,
    /// `L_Γ F = 0`.
    pub f_conserved: bool,
    /// `ω_{T,F} = d d_T F`.
    pub omega: DifferentialForm,
    /// `−dF(TΓ)`.
    pub hamiltonian: RationalFunction,
    /// `i_Γ ω_{T,F} = dH` exactly.
    pub verified: bool,
    pub nondegenerate: Verdict,
}

pub fn derived_description(
    gamma: &VectorField,
    t: &Tensor11,
    f: &RationalFunction,
) -> Result<DerivedDescription, GeomError> {
    same_chart(gamma.chart(), t.chart())?;
    let tensor_invariant = lie_derivative_tensor(gamma, t)?.is_zero();
    let f_conserved = gamma.apply(f).is_zero();
    let omega = omega_tf(t, f);
    let hamiltonian = -twisted_differential(t, f).pair(gamma)?;
    let verified = omega
        .interior_product(gamma)?
        .sub(&DifferentialForm::differential(gamma.chart(), &hamiltonian))?
        .is_zero();
    let nondegenerate = nondegeneracy(&omega)?;
    Ok(DerivedDescription { tensor_invariant, f_conserved, omega, hamiltonian, verified, nondegenerate })
}

fn nondegeneracy(omega: &DifferentialForm) -> Result<Verdict, GeomError> {
    if omega.chart().dim() % 2 != 0 {
        return Ok(Verdict::False);
    }
    Ok(Verdict::from_bool(!form_determinant(omega)?.is_zero()))
}

/// Candidate description `(L_X ω, L_X H)` from an infinitesimal symmetry `X`.
#[derive(Clone, Debug)]
pub struct AlternativeDescription {
    /// `[Γ, X] = 0`.
    pub symmetry: bool,
    pub omega: DifferentialForm,
    pub hamiltonian: RationalFunction,
    /// `i_Γ L_X ω = d L_X H` exactly.
    pub verified: bool,
    pub nondegenerate: Verdict,
}

pub fn alternative_from_symmetry(
    gamma: &VectorField,
    x: &VectorField,
    omega: &DifferentialForm,
    h: &RationalFunction,
) -> Result<AlternativeDescription, GeomError> {
    same_chart(gamma.chart(), x.chart())?;
    let symmetry = gamma.bracket(x)?.is_zero();
    let new_omega = lie_derivative(x, omega)?;
    let new_h = x.apply(h);
    let verified = new_omega
        .interior_product(gamma)?
        .sub(&DifferentialForm::differential(gamma.chart(), &new_h))?
        .is_zero();
    let nondegenerate = if new_omega.degree() == 2 { nondegeneracy(&new_omega)? } else { Verdict::False };
    Ok(AlternativeDescription { symmetry, omega: new_omega, hamiltonian: new_h, verified, nondegenerate })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expression;
    use crate::geom::{parse_field, parse_form, parse_tensor};

    fn r4() -> Arc<Chart> {
        Arc::new(Chart::with_constants(&["q1", "q2", "p1", "p2"], &["omega"]).unwrap())
    }

    fn osc(c: &Arc<Chart>) -> VectorField {
        parse_field("[omega*p1, omega*p2, -omega*q1, -omega*q2]", c).unwrap()
    }

    #[test]
    fn oscillator_has_two_descriptions() {
        let c = r4();
        let g = osc(&c);
        let o = CheckOptions::default();
        let w1 = parse_form("2-form: (1) dq1^dp1 + (1) dq2^dp2", &c).unwrap();
        let h1 = parse_expression("omega/2*(p1^2+p2^2+q1^2+q2^2)", &c).unwrap();
        let r = is_hamiltonian_description(&g, &w1, &h1, &o).unwrap();
        assert!(r.holds && r.closed);
        assert_eq!(r.nondegenerate, Verdict::True);

        let w2 = parse_form("2-form: (1) dq2^dp1 + (1) dq1^dp2", &c).unwrap();
        let h2 = parse_expression("omega*(p1*p2+q1*q2)", &c).unwrap();
        assert!(is_hamiltonian_description(&g, &w2, &h2, &o).unwrap().holds);

        let bad = &h1 + &parse_expression("q1", &c).unwrap();
        let r = is_hamiltonian_description(&g, &w1, &bad, &o).unwrap();
        assert!(!r.holds);
        assert!(!r.residual.is_zero());
    }

    #[test]
    fn degenerate_form_is_reported() {
        let c = r4();
        let w = parse_form("2-form: (1) dq1^dp1", &c).unwrap();
        let r = is_hamiltonian_description(&osc(&c), &w, &RationalFunction::zero(), &CheckOptions::default())
            .unwrap();
        assert_eq!(r.nondegenerate, Verdict::False);
        assert_eq!(r.degenerate_samples, r.samples);
    }

    #[test]
    fn normal_form_of_isotropic_oscillator() {
        let c = r4();
        let f = vec![
            parse_expression("(p1^2+q1^2)/2", &c).unwrap(),
            parse_expression("(p2^2+q2^2)/2", &c).unwrap(),
        ];
        let x = vec![
            parse_field("[p1, 0, -q1, 0]", &c).unwrap(),
            parse_field("[0, p2, 0, -q2]", &c).unwrap(),
        ];
        let nu = vec![parse_expression("omega", &c).unwrap(), parse_expression("omega", &c).unwrap()];
        let o = CheckOptions::default();
        let r = check_normal_form(&osc(&c), &f, &x, Some(&nu), &o).unwrap();
        assert!(r.holds && r.independent && r.commuting && r.invariant_integrals && r.first_integrals);
        assert_eq!(r.decomposition_exact, Some(true));
        assert!(r.completeness_assumed);
        let r = check_normal_form(&osc(&c), &f, &x, None, &o).unwrap();
        assert!(r.holds);
        assert!(r.decomposition_residual.unwrap() < 1e-12);
    }

    #[test]
    fn normal_form_failures() {
        let c = r4();
        let o = CheckOptions::default();
        let x = vec![parse_field("[1, 0, 0, 0]", &c).unwrap(), parse_field("[0, q1, 0, 0]", &c).unwrap()];
        let f = vec![parse_expression("p1", &c).unwrap(), parse_expression("p2", &c).unwrap()];
        let r = check_normal_form(&osc(&c), &f, &x, None, &o).unwrap();
        assert!(!r.brackets_vanish && !r.commuting && !r.holds);

        let h = parse_expression("(p1^2+q1^2)/2", &c).unwrap();
        let f = vec![h.clone(), &h * &h];
        let x = vec![
            parse_field("[p1, 0, -q1, 0]", &c).unwrap(),
            parse_field("[0, p2, 0, -q2]", &c).unwrap(),
        ];
        let r = check_normal_form(&osc(&c), &f, &x, None, &o).unwrap();
        assert!(!r.independent);
        assert_eq!(r.independent_samples, 0);
    }

    #[test]
    fn tangent_cotangent_linear_structures() {
        let c = Arc::new(Chart::new(&["q", "v"]).unwrap());
        let o = CheckOptions::default();
        let s = parse_tensor("[[0, 0], [1, 0]]", &c).unwrap();
        let delta = parse_field("[0, v]", &c).unwrap();
        let r = validate_structures(&StructureKind::Tangent { s, delta: delta.clone() }, &o).unwrap();
        assert_eq!(r.valid, Verdict::True, "{r:?}");
        let r = validate_structures(&StructureKind::Tangent { s: Tensor11::identity(&c), delta }, &o).unwrap();
        assert_eq!(r.valid, Verdict::False);
        assert_eq!(r.checks[0].verdict, Verdict::False);

        let c = Arc::new(Chart::new(&["q", "p"]).unwrap());
        let theta = parse_form("1-form: (p) dq", &c).unwrap();
        let delta = parse_field("[0, p]", &c).unwrap();
        let r = validate_structures(&StructureKind::Cotangent { theta, delta }, &o).unwrap();
        assert_eq!(r.valid, Verdict::True);

        let euler = parse_field("[q, p]", &c).unwrap();
        let r = validate_structures(&StructureKind::Linear { delta: euler }, &o).unwrap();
        assert_eq!(r.valid, Verdict::True);
        let shifted = parse_field("[q - 1, p]", &c).unwrap();
        let r = validate_structures(&StructureKind::Linear { delta: shifted }, &o).unwrap();
        assert_eq!(r.valid, Verdict::False);
    }

    #[test]
    fn non_constant_soldering_rank_is_unknown() {
        let c = Arc::new(Chart::new(&["q", "v"]).unwrap());
        let s = parse_tensor("[[0, 0], [q, 0]]", &c).unwrap();
        let delta = parse_field("[0, v]", &c).unwrap();
        let r = validate_structures(&StructureKind::Tangent { s, delta }, &CheckOptions::default()).unwrap();
        assert_eq!(r.checks[2].verdict, Verdict::Unknown);
    }

    #[test]
    fn symmetry_generates_alternative() {
        // X = q1∂q1 + p1∂p1 commutes with the oscillator and rescales ω, H.
        let c = r4();
        let g = osc(&c);
        let x = parse_field("[q1, 0, p1, 0]", &c).unwrap();
        let w1 = parse_form("2-form: (1) dq1^dp1 + (1) dq2^dp2", &c).unwrap();
        let h1 = parse_expression("omega/2*(p1^2+p2^2+q1^2+q2^2)", &c).unwrap();
        let alt = alternative_from_symmetry(&g, &x, &w1, &h1).unwrap();
        assert!(alt.symmetry && alt.verified);
        assert_eq!(alt.omega, parse_form("2-form: (2) dq1^dp1", &c).unwrap());
        assert_eq!(alt.nondegenerate, Verdict::False);
    }
}
