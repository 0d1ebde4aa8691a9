use hamkit::torus::{classify, hermite_normal_form, resonance_lattice, Classification, FrequencySpec};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use proptest::prelude::*;

const BOX: i64 = 5;

fn spec_from(basis_len: usize, rows: &[Vec<(i64, i64)>]) -> FrequencySpec {
    let basis = ["1", "sqrt2", "sqrt3"][..basis_len].iter().map(|s| s.to_string()).collect();
    let coeffs = rows
        .iter()
        .map(|r| r.iter().map(|&(n, d)| BigRational::new(n.into(), d.into())).collect())
        .collect();
    FrequencySpec::new(basis, coeffs).unwrap()
}

fn annihilates(spec: &FrequencySpec, k: &[i64]) -> bool {
    (0..spec.basis().len()).all(|j| {
        spec.coeffs()
            .iter()
            .zip(k)
            .fold(BigRational::zero(), |acc, (row, &ki)| acc + &row[j] * BigRational::from_integer(ki.into()))
            .is_zero()
    })
}

/// Every nonzero `k` with `‖k‖∞ ≤ BOX` annihilating the frequencies.
fn brute_force(spec: &FrequencySpec) -> Vec<Vec<i64>> {
    let n = spec.n();
    let side = (2 * BOX + 1) as usize;
    let mut out = Vec::new();
    for idx in 0..side.pow(n as u32) {
        let mut rest = idx;
        let k: Vec<i64> = (0..n)
            .map(|_| {
                let v = (rest % side) as i64 - BOX;
                rest /= side;
                v
            })
            .collect();
        if k.iter().any(|&v| v != 0) && annihilates(spec, &k) {
            out.push(k);
        }
    }
    out
}

fn big(k: &[i64]) -> Vec<BigInt> {
    k.iter().map(|&v| BigInt::from(v)).collect()
}

fn frequency_rows() -> impl Strategy<Value = (usize, Vec<Vec<(i64, i64)>>)> {
    (1usize..=2, 2usize..=4).prop_flat_map(|(m, n)| {
        // Small coefficients with few distinct values so resonances are common.
        let entry = (-2i64..=2, prop::sample::select(vec![1i64, 2, 3]));
        let row = prop::collection::vec(entry, m)
            .prop_filter("nonzero frequency", |r| r.iter().any(|&(a, _)| a != 0));
        (Just(m), prop::collection::vec(row, n))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(80))]

    #[test]
    fn lattice_matches_brute_force((m, rows) in frequency_rows()) {
        let spec = spec_from(m, &rows);
        let lattice = resonance_lattice(&spec);
        for row in lattice.basis() {
            let k: Vec<i64> = row.iter().map(|v| i64::try_from(v).unwrap()).collect();
            prop_assert!(annihilates(&spec, &k));
        }
        prop_assert_eq!(hermite_normal_form(lattice.basis()), lattice.basis().to_vec());
        let found = brute_force(&spec);
        for k in &found {
            prop_assert!(lattice.contains(&big(k)), "relation {:?} missing", k);
        }
        // When the basis fits in the box, the enumerated relations generate
        // the same lattice, which pins down saturation.
        let fits = lattice.basis().iter().all(|r| r.iter().all(|v| i64::try_from(v).is_ok_and(|x| x.abs() <= BOX)));
        if fits {
            let gens: Vec<Vec<BigInt>> = found.iter().map(|k| big(k)).collect();
            prop_assert_eq!(hermite_normal_form(&gens), lattice.basis().to_vec());
        }
    }

    #[test]
    fn classification_is_scale_invariant((m, rows) in frequency_rows(), num in 1i64..20, den in 1i64..20) {
        let spec = spec_from(m, &rows);
        let c = BigRational::new(num.into(), den.into());
        prop_assert_eq!(classify(&spec), classify(&spec.scaled(&c)));
        prop_assert_eq!(resonance_lattice(&spec), resonance_lattice(&spec.scaled(&c)));
    }

    #[test]
    fn permutation_equivariance((m, rows) in frequency_rows(), shuffle in any::<u64>()) {
        let spec = spec_from(m, &rows);
        let n = spec.n();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut s = shuffle;
        for i in (1..n).rev() {
            perm.swap(i, (s % (i as u64 + 1)) as usize);
            s /= i as u64 + 1;
        }
        let permuted = resonance_lattice(&spec.permuted(&perm));
        // Permute the original basis rows and re-canonicalize.
        let moved: Vec<Vec<BigInt>> = resonance_lattice(&spec)
            .basis()
            .iter()
            .map(|row| perm.iter().map(|&i| row[i].clone()).collect())
            .collect();
        prop_assert_eq!(hermite_normal_form(&moved), permuted.basis().to_vec());
    }
}

#[test]
fn paper_examples() {
    let iso = spec_from(1, &vec![vec![(1, 1)]; 4]);
    assert_eq!(classify(&iso), Classification::MaximallySuperintegrable);
    let irr = spec_from(2, &[vec![(1, 1), (0, 1)], vec![(0, 1), (1, 1)]]);
    assert_eq!(classify(&irr), Classification::Integrable);
    let mixed = spec_from(2, &[vec![(1, 1), (0, 1)], vec![(1, 1), (0, 1)], vec![(0, 1), (1, 1)]]);
    assert_eq!(classify(&mixed), Classification::Superintegrable { extra: 1 });
}

#[test]
fn two_four_three_against_enumeration() {
    let spec = spec_from(1, &[vec![(2, 1)], vec![(4, 1)], vec![(3, 1)]]);
    let lattice = resonance_lattice(&spec);
    assert_eq!(lattice.basis(), &[big(&[1, 1, -2]), big(&[0, 3, -4])]);
    let found = brute_force(&spec);
    assert!(found.iter().all(|k| lattice.contains(&big(k))));
    let gens: Vec<Vec<BigInt>> = found.iter().map(|k| big(k)).collect();
    assert_eq!(hermite_normal_form(&gens), lattice.basis().to_vec());
}
