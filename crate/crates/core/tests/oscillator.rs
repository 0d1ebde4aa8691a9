use std::sync::Arc;

use hamkit::expr::{parse_expression, Chart, RationalFunction};
use hamkit::geom::{
    derived_description, is_hamiltonian_description, lie_derivative, omega_tf, parse_field, parse_form,
    parse_tensor, CheckOptions, DifferentialForm, Verdict,
};

fn chart() -> Arc<Chart> {
    Arc::new(Chart::with_constants(&["q1", "q2", "p1", "p2"], &["omega"]).unwrap())
}

fn gamma(c: &Arc<Chart>) -> hamkit::geom::VectorField {
    parse_field("[omega*p1, omega*p2, -omega*q1, -omega*q2]", c).unwrap()
}

fn swap_tensor(c: &Arc<Chart>) -> hamkit::geom::Tensor11 {
    parse_tensor("[[0, 1, 0, 0], [1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]]", c).unwrap()
}

fn f(c: &Arc<Chart>) -> RationalFunction {
    parse_expression("(p1^2+p2^2+q1^2+q2^2)^2/4", c).unwrap()
}

#[test]
fn two_descriptions_of_isotropic_oscillator() {
    let c = chart();
    let g = gamma(&c);
    let o = CheckOptions::default();
    let w1 = parse_form("dq1^dp1 + dq2^dp2", &c).unwrap();
    let h1 = parse_expression("1/2*omega*(p1^2+p2^2+q1^2+q2^2)", &c).unwrap();
    assert!(is_hamiltonian_description(&g, &w1, &h1, &o).unwrap().holds);
    let w2 = parse_form("dq2^dp1 + dq1^dp2", &c).unwrap();
    let h2 = parse_expression("omega*(p1*p2+q1*q2)", &c).unwrap();
    assert!(is_hamiltonian_description(&g, &w2, &h2, &o).unwrap().holds);
}

#[test]
fn swap_tensor_is_invariant() {
    let c = chart();
    assert!(lie_derivative(&gamma(&c), &swap_tensor(&c)).unwrap().is_zero());
}

#[test]
fn time_one_form_pairs_to_one() {
    let c = Arc::new(Chart::new(&["q1", "q2", "p1", "p2"]).unwrap());
    let g = parse_field("[p1, p2, -q1, -q2]", &c).unwrap();
    let dtau = parse_form(
        "(1/2*p1/(p1^2+q1^2)) dq1 + (-1/2*q1/(p1^2+q1^2)) dp1 + (1/2*p2/(p2^2+q2^2)) dq2 + (-1/2*q2/(p2^2+q2^2)) dp2",
        &c,
    )
    .unwrap();
    assert_eq!(dtau.pair(&g).unwrap(), RationalFunction::one());
    assert!(dtau.exterior_derivative().is_zero());
}

#[test]
fn omega_tf_equals_wedge_of_invariants() {
    // d_T F = R dG with R = Σ squares and G = q1 q2 + p1 p2, so d d_T F = dR ∧ dG.
    let c = chart();
    let r = parse_expression("p1^2+p2^2+q1^2+q2^2", &c).unwrap();
    let gg = parse_expression("p1*p2+q1*q2", &c).unwrap();
    let expected = DifferentialForm::differential(&c, &r)
        .wedge(&DifferentialForm::differential(&c, &gg))
        .unwrap();
    assert_eq!(omega_tf(&swap_tensor(&c), &f(&c)), expected);
}

#[test]
fn extra_term_in_displayed_form_is_not_closed() {
    let c = chart();
    let extra = parse_form("(2*(p1^2+p2^2+q1^2+q2^2)) dq2^dq1 + (2*(p1^2+p2^2+q1^2+q2^2)) dp1^dp2", &c).unwrap();
    assert!(!extra.exterior_derivative().is_zero());
}

#[test]
fn derived_description_of_oscillator() {
    let c = chart();
    let d = derived_description(&gamma(&c), &swap_tensor(&c), &f(&c)).unwrap();
    assert!(d.tensor_invariant && d.f_conserved && d.verified);
    // −dF(TΓ) = −R Γ(G) and Γ(G) = 0.
    assert!(d.hamiltonian.is_zero());
    assert_eq!(d.nondegenerate, Verdict::False);
}
