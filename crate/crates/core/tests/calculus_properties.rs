use std::sync::Arc;

use hamkit::expr::Chart;
use hamkit::geom::{lie_bracket, lie_derivative, omega_tf, DifferentialForm, VectorField};
use hamkit::sample::{random_field, random_form, random_function, random_tensor};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn chart(n: usize) -> Arc<Chart> {
    let names: Vec<String> = (0..n).map(|i| format!("x{i}")).collect();
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    Arc::new(Chart::new(&refs).unwrap())
}

fn setup(seed: u64) -> (ChaCha8Rng, Arc<Chart>, bool) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(2..=4);
    let rational = rng.random_bool(0.3);
    (rng, chart(n), rational)
}

/// Leibniz expansion of the Lie derivative of `β = Σ β_J dx^J`:
/// `L_X β = Σ X(β_J) dx^J + Σ_J Σ_r β_J dx^{J_1} ∧ ⋯ ∧ dX^{J_r} ∧ ⋯`.
fn lie_by_components(x: &VectorField, beta: &DifferentialForm) -> DifferentialForm {
    let c = beta.chart().clone();
    let mut out = DifferentialForm::zero(&c, beta.degree());
    for (idx, f) in beta.coefficients() {
        out = out.add(&DifferentialForm::monomial(&c, idx, x.apply(f)).unwrap()).unwrap();
    }
    // For each basis index J, replace dx^{J_r} by d(X^{J_r}).
    for (idx, f) in beta.coefficients() {
        for r in 0..idx.len() {
            let mut term = DifferentialForm::function(&c, f.clone());
            for (s, &i) in idx.iter().enumerate() {
                let factor = if s == r {
                    DifferentialForm::differential(&c, x.component(i))
                } else {
                    DifferentialForm::basis(&c, i).unwrap()
                };
                term = term.wedge(&factor).unwrap();
            }
            out = out.add(&term).unwrap();
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn d_squared_vanishes(seed: u64) {
        let (mut rng, c, rational) = setup(seed);
        let k = rng.random_range(0..c.dim());
        let beta = random_form(&mut rng, &c, k, rational);
        prop_assert!(beta.exterior_derivative().exterior_derivative().is_zero());
    }

    #[test]
    fn cartan_matches_component_expansion(seed: u64) {
        let (mut rng, c, rational) = setup(seed);
        let k = rng.random_range(1..=c.dim());
        let beta = random_form(&mut rng, &c, k, rational);
        let x = random_field(&mut rng, &c, false);
        prop_assert_eq!(lie_derivative(&x, &beta).unwrap(), lie_by_components(&x, &beta));
    }

    #[test]
    fn interior_product_squares_to_zero(seed: u64) {
        let (mut rng, c, rational) = setup(seed);
        let k = rng.random_range(1..=c.dim());
        let beta = random_form(&mut rng, &c, k, rational);
        let x = random_field(&mut rng, &c, rational);
        prop_assert!(beta.interior_product(&x).unwrap().interior_product(&x).unwrap().is_zero());
    }

    #[test]
    fn interior_of_differential_is_directional_derivative(seed: u64) {
        let (mut rng, c, rational) = setup(seed);
        let f = random_function(&mut rng, &c, rational);
        let x = random_field(&mut rng, &c, rational);
        let lhs = DifferentialForm::differential(&c, &f).interior_product(&x).unwrap();
        prop_assert_eq!(lhs.as_function().unwrap(), lie_derivative(&x, &f).unwrap());
    }

    #[test]
    fn wedge_is_graded_commutative(seed: u64) {
        let (mut rng, c, rational) = setup(seed);
        let a = rng.random_range(0..=c.dim());
        let b = rng.random_range(0..=c.dim() - a);
        let alpha = random_form(&mut rng, &c, a, rational);
        let beta = random_form(&mut rng, &c, b, rational);
        let ab = alpha.wedge(&beta).unwrap();
        let ba = beta.wedge(&alpha).unwrap();
        let expected = if (a * b) % 2 == 0 { ba } else { ba.neg() };
        prop_assert_eq!(ab, expected);
    }

    #[test]
    fn bracket_is_antisymmetric_and_satisfies_jacobi(seed: u64) {
        let (mut rng, c, _) = setup(seed);
        let x = random_field(&mut rng, &c, false);
        let y = random_field(&mut rng, &c, false);
        let z = random_field(&mut rng, &c, false);
        let xy = lie_bracket(&x, &y).unwrap();
        prop_assert!(xy.add(&lie_bracket(&y, &x).unwrap()).unwrap().is_zero());
        let j = lie_bracket(&x, &lie_bracket(&y, &z).unwrap()).unwrap()
            .add(&lie_bracket(&y, &lie_bracket(&z, &x).unwrap()).unwrap()).unwrap()
            .add(&lie_bracket(&z, &xy).unwrap()).unwrap();
        prop_assert!(j.is_zero());
    }

    #[test]
    fn omega_tf_is_closed(seed: u64) {
        let (mut rng, c, rational) = setup(seed);
        let t = random_tensor(&mut rng, &c, rational);
        let f = random_function(&mut rng, &c, rational);
        prop_assert!(omega_tf(&t, &f).exterior_derivative().is_zero());
    }

    #[test]
    fn tensor_lie_derivative_is_leibniz_compatible(seed: u64) {
        let (mut rng, c, _) = setup(seed);
        let t = random_tensor(&mut rng, &c, false);
        let x = random_field(&mut rng, &c, false);
        let y = random_field(&mut rng, &c, false);
        let lhs = lie_derivative(&x, &t.apply(&y).unwrap()).unwrap();
        let rhs = lie_derivative(&x, &t).unwrap().apply(&y).unwrap()
            .add(&t.apply(&lie_derivative(&x, &y).unwrap()).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn lie_derivative_of_zero_field_vanishes(seed: u64) {
        let (mut rng, c, rational) = setup(seed);
        let f = random_function(&mut rng, &c, rational);
        prop_assert!(lie_derivative(&VectorField::zero(&c), &f).unwrap().is_zero());
    }
}

/// Linear oscillator `Σ ω_a (p_a ∂q_a − q_a ∂p_a)` on (q_1..q_n, p_1..p_n), a
/// tensor that is a polynomial in its matrix, and a function of the actions.
fn invariant_instance(seed: u64) -> (VectorField, hamkit::geom::Tensor11, hamkit::expr::RationalFunction) {
    use hamkit::expr::RationalFunction as RF;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(1..=2);
    let c = {
        let mut names: Vec<String> = (1..=n).map(|a| format!("q{a}")).collect();
        names.extend((1..=n).map(|a| format!("p{a}")));
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        Arc::new(Chart::new(&refs).unwrap())
    };
    let dim = 2 * n;
    let freqs: Vec<i64> = (0..n).map(|_| rng.random_range(1..=3)).collect();
    let mut a = vec![vec![0i64; dim]; dim];
    for k in 0..n {
        a[k][n + k] = freqs[k];
        a[n + k][k] = -freqs[k];
    }
    let x = |i: usize| RF::var(i);
    let comps = (0..dim)
        .map(|i| (0..dim).map(|j| &RF::from_int(a[i][j]) * &x(j)).sum())
        .collect();
    let gamma = VectorField::new(&c, comps).unwrap();
    let matmul = |m: &Vec<Vec<i64>>, k: &Vec<Vec<i64>>| -> Vec<Vec<i64>> {
        (0..dim).map(|i| (0..dim).map(|j| (0..dim).map(|l| m[i][l] * k[l][j]).sum()).collect()).collect()
    };
    let mut power: Vec<Vec<i64>> = (0..dim).map(|i| (0..dim).map(|j| i64::from(i == j)).collect()).collect();
    let mut t = vec![vec![0i64; dim]; dim];
    for _ in 0..4 {
        let coef = rng.random_range(-3..=3);
        for i in 0..dim {
            for j in 0..dim {
                t[i][j] += coef * power[i][j];
            }
        }
        power = matmul(&power, &a);
    }
    let tensor = hamkit::geom::Tensor11::new(
        &c,
        t.iter().map(|r| r.iter().map(|&v| RF::from_int(v)).collect()).collect(),
    )
    .unwrap();
    let actions: Vec<RF> = (0..n).map(|k| &(&x(k) * &x(k)) + &(&x(n + k) * &x(n + k))).collect();
    let mut f = RF::zero();
    for _ in 0..3 {
        let mut term = RF::from_int(rng.random_range(-4..=4));
        for _ in 0..rng.random_range(0..=2) {
            term = &term * &actions[rng.random_range(0..n)];
        }
        f = &f + &term;
    }
    (gamma, tensor, f)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn derived_description_theorem(seed: u64) {
        let (gamma, t, f) = invariant_instance(seed);
        let d = hamkit::geom::derived_description(&gamma, &t, &f).unwrap();
        prop_assert!(d.tensor_invariant && d.f_conserved);
        prop_assert!(d.verified);
        prop_assert!(d.omega.exterior_derivative().is_zero());
    }
}
