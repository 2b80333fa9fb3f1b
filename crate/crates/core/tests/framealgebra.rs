use curvint_core::curvature::elementary_symmetric;
use curvint_core::framealgebra::{
    alpha_composed, alpha_explicit, dual_definition_check, lemma21_check, mirror_check,
    pullback_check, wedge, wedge_identity_check, weingarten_pullback, Convention, ExteriorForm,
};
use curvint_core::linalg::Matrix;
use curvint_core::BigRational;
use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_rational(rng: &mut ChaCha8Rng) -> BigRational {
    BigRational::new(
        BigInt::from(rng.random_range(-9i64..=9)),
        BigInt::from(rng.random_range(1i64..=7)),
    )
}

#[test]
fn dual_definitions_agree_up_to_five() {
    for n in 2..=5 {
        for i in 0..=n {
            assert!(
                dual_definition_check(n, i, Convention::Alternating).unwrap(),
                "n={n} i={i}"
            );
        }
    }
}

#[test]
fn signed_convention_fails_somewhere_for_each_n() {
    for n in 2..=4 {
        assert!((0..=n).any(|i| !dual_definition_check(n, i, Convention::Signed).unwrap()));
    }
}

#[test]
fn mirror_composition_up_to_five() {
    for n in 2..=5 {
        for i in 0..=n {
            assert!(lemma21_check(n, i).unwrap(), "n={n} i={i}");
        }
    }
}

#[test]
fn wedge_identity_up_to_five() {
    for n in 2..=5 {
        for j in 0..=n {
            assert!(wedge_identity_check(n, j).unwrap(), "n={n} j={j}");
        }
    }
}

#[test]
fn alpha_forms_are_homogeneous_of_degree_n() {
    for n in 2..=5 {
        for i in 0..=n {
            let a = alpha_explicit(n, i as i64).unwrap();
            assert!(a
                .terms()
                .keys()
                .all(|k| k.len() == n && k.windows(2).all(|w| w[0] < w[1])));
            // exactly n−i horizontal slots
            assert!(a
                .terms()
                .keys()
                .all(|k| k.iter().filter(|&&x| x <= n).count() == n - i));
            assert!(a
                .terms()
                .values()
                .all(|c| *c != BigRational::from_integer(0.into())));
        }
    }
}

#[test]
fn pullback_is_elementary_symmetric_on_random_rational_matrices() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for k in 0..50 {
        let n = 2 + k % 3;
        let w = Matrix::from_fn(n, n, |_, _| random_rational(&mut rng));
        assert!(pullback_check(&w).unwrap());
        let e = elementary_symmetric(&w);
        assert_eq!(
            weingarten_pullback(n, n as i64, &w).unwrap(),
            w.determinant()
        );
        assert_eq!(weingarten_pullback(n, 1, &w).unwrap(), e[1]);
    }
}

#[test]
fn mirror_identities() {
    for n in 2..=6 {
        assert!(mirror_check(n));
    }
}

#[test]
fn wedge_is_graded_antisymmetric() {
    let n = 3;
    let a = alpha_explicit(n, 1).unwrap();
    let one = ExteriorForm::basis(n, 2);
    let lhs = wedge(&a, &one);
    let rhs = wedge(&one, &a);
    // degrees 3 and 1: sign (−1)^3
    assert_eq!(lhs, rhs.scale(&BigRational::from_integer((-1).into())));
}

#[test]
fn six_dimensional_model_is_within_guard() {
    assert!(dual_definition_check(6, 3, Convention::Alternating).unwrap());
    assert!(alpha_composed(7, 0, Convention::Alternating).is_err());
}
