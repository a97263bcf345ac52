use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;
use proptest::prelude::*;

use spinreal::algebra::{e_matrix, kron3, one_e, theta, theta_inverse, vec};
use spinreal::ito::{ccr_residual, ccr_residual_in, ito_product, nondemolition_residual, ItoIncrement};
use spinreal::model::{master_mean_oracle, max_trajectory_deviation, realize, simulate_mean};
use spinreal::pauli::{commutator, PauliOperator};
use spinreal::realizability::{
    check_ccr_preservation, check_physical_realizability, extract_parameters, RealizabilityCondition,
};
use spinreal::{BilinearQsde, PhysicalParams, DEFAULT_TOL};

fn unit() -> impl Strategy<Value = f64> {
    -1.0..1.0f64
}

fn vec3() -> impl Strategy<Value = Vector3<f64>> {
    [unit(), unit(), unit()].prop_map(Vector3::from)
}

fn mat3() -> impl Strategy<Value = Matrix3<f64>> {
    proptest::array::uniform9(unit()).prop_map(|a| Matrix3::from_row_slice(&a))
}

fn complex() -> impl Strategy<Value = Complex64> {
    (unit(), unit()).prop_map(|(re, im)| Complex64::new(re, im))
}

fn pauli() -> impl Strategy<Value = PauliOperator> {
    [complex(), complex(), complex(), complex()].prop_map(PauliOperator::new)
}

fn params(scale: f64) -> impl Strategy<Value = PhysicalParams> {
    let c = -scale..scale;
    ([c.clone(), c.clone(), c.clone()], [[c.clone(), c.clone()], [c.clone(), c.clone()], [c.clone(), c]])
        .prop_map(|(a, l)| PhysicalParams::from_arrays(a, l).unwrap())
}

fn increment() -> impl Strategy<Value = ItoIncrement> {
    (pauli(), pauli(), pauli()).prop_map(|(a, b, c)| ItoIncrement { dt_part: a, dw1_part: b, dw2_part: c })
}

fn max_diff(a: &PauliOperator, b: &PauliOperator) -> f64 {
    (a.clone() - b.clone()).max_abs()
}

fn increment_diff(a: &ItoIncrement, b: &ItoIncrement) -> f64 {
    (a.clone() - b.clone()).max_abs()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn theta_is_antisymmetric_and_linear(a in vec3(), b in vec3(), s in unit()) {
        let t = theta(&a);
        prop_assert_eq!(t.transpose(), -t);
        let lhs = theta(&(a * s + b));
        let rhs = theta(&a) * s + theta(&b);
        prop_assert!((lhs - rhs).amax() < 1e-15);
        prop_assert!((theta_inverse(&t, 1e-12).unwrap() - a).amax() < 1e-15);
    }

    #[test]
    fn theta_matches_cross_product(a in vec3(), b in vec3()) {
        // Θ(a)b = −a × b
        prop_assert!((theta(&a) * b + a.cross(&b)).amax() < 1e-15);
    }

    #[test]
    fn vec_of_theta_is_e_times_beta(b in vec3()) {
        prop_assert!((vec(&theta(&b)) - e_matrix() * b).amax() < 1e-15);
    }

    #[test]
    fn commutation_matrix_swaps_kronecker_factors(a in mat3(), b in mat3()) {
        let k = one_e();
        prop_assert!((k * kron3(&a, &b) * k.transpose() - kron3(&b, &a)).amax() < 1e-14);
        prop_assert!((k * vec(&a) - vec(&a.transpose())).amax() == 0.0);
    }

    #[test]
    fn commutator_is_antisymmetric(a in pauli(), b in pauli()) {
        let ab = commutator(&a, &b);
        let ba = commutator(&b, &a);
        prop_assert!((ab + ba).max_abs() < 1e-14);
    }

    #[test]
    fn jacobi_identity(a in pauli(), b in pauli(), c in pauli()) {
        let j = commutator(&a, &commutator(&b, &c))
            + commutator(&b, &commutator(&c, &a))
            + commutator(&c, &commutator(&a, &b));
        prop_assert!(j.max_abs() < 1e-13);
    }

    #[test]
    fn product_matches_matrix_product(a in pauli(), b in pauli()) {
        let via_matrix = PauliOperator::from_matrix(&(a.to_matrix() * b.to_matrix()));
        prop_assert!(max_diff(&(&a * &b), &via_matrix) < 1e-14);
    }

    #[test]
    fn ito_product_is_bilinear_and_associative(a in increment(), b in increment(), c in increment(), s in complex()) {
        let lhs = ito_product(&(a.clone() + b.clone()), &c);
        prop_assert!(increment_diff(&lhs, &(ito_product(&a, &c) + ito_product(&b, &c))) < 1e-14);
        let lhs = ito_product(&a, &c.scale(&s));
        prop_assert!(increment_diff(&lhs, &ito_product(&a, &c).scale(&s)) < 1e-14);
        let left = ito_product(&ito_product(&a, &b), &c);
        let right = ito_product(&a, &ito_product(&b, &c));
        prop_assert!(left.max_abs() == 0.0 && right.max_abs() == 0.0);
    }

    #[test]
    fn round_trip_recovers_parameters(p in params(10.0)) {
        let sys = realize(&p).unwrap();
        let q = extract_parameters(&sys);
        prop_assert!(p.max_abs_diff(&q) < 1e-10, "{:?} vs {:?}", p, q);
        prop_assert!(check_physical_realizability(&sys, DEFAULT_TOL).verdict);
    }

    #[test]
    fn realized_systems_preserve_commutation(p in params(2.0)) {
        let sys = realize(&p).unwrap();
        prop_assert!(check_ccr_preservation(&sys, DEFAULT_TOL).verdict);
        prop_assert!(ccr_residual_in::<f64>(&sys).max() < 1e-12);
    }

    #[test]
    fn overlapping_conditions_agree(sys in arbitrary_qsde()) {
        let t1 = check_physical_realizability(&sys, DEFAULT_TOL);
        let t2 = check_ccr_preservation(&sys, DEFAULT_TOL);
        let a = t1.residual(RealizabilityCondition::DriftBalance);
        let b = t2.residual(spinreal::realizability::CcrCondition::DriftBalance);
        prop_assert!((a - b).abs() <= 1e-14);
    }

    #[test]
    fn scaling_coupling_rescales_outputs(p in params(2.0), c in prop::sample::select(vec![0.5, 2.0])) {
        let sys = realize(&p).unwrap();
        let scaled = PhysicalParams::new(p.alpha, p.lambda * Complex64::new(c, 0.0)).unwrap();
        let ssys = realize(&scaled).unwrap();
        prop_assert!((ssys.f0 - sys.f0 * (c * c)).amax() < 1e-12);
        prop_assert!((ssys.h1 - sys.h1 * c).amax() < 1e-12);
        prop_assert!((ssys.h2 - sys.h2 * c).amax() < 1e-12);
        prop_assert!(check_physical_realizability(&ssys, DEFAULT_TOL).verdict);
        prop_assert!(check_ccr_preservation(&ssys, DEFAULT_TOL).verdict);
    }
}

fn arbitrary_qsde() -> impl Strategy<Value = BilinearQsde> {
    (vec3(), mat3(), mat3(), mat3(), vec3(), vec3()).prop_map(|(f0, f, g1, g2, h1, h2)| BilinearQsde {
        f0,
        f,
        g1,
        g2,
        h1: h1.transpose(),
        h2: h2.transpose(),
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn oracle_agrees_with_reduced_check(sys in arbitrary_qsde()) {
        let oracle = ccr_residual(&sys) <= DEFAULT_TOL;
        prop_assert_eq!(oracle, check_ccr_preservation(&sys, DEFAULT_TOL).verdict);
    }

    #[test]
    fn output_oracle_agrees_with_noise_conditions(sys in arbitrary_qsde(), p in params(2.0), shift in vec3()) {
        for q in [sys, BilinearQsde { h1: shift.transpose(), ..realize(&p).unwrap() }] {
            let pr = check_physical_realizability(&q, DEFAULT_TOL);
            let oracle = nondemolition_residual(&q).failing(DEFAULT_TOL);
            let reduced: Vec<_> = pr
                .failing()
                .into_iter()
                .filter(|c| matches!(c, RealizabilityCondition::NoiseOne | RealizabilityCondition::NoiseTwo))
                .collect();
            prop_assert_eq!(oracle, reduced);
        }
    }

    #[test]
    fn bloch_ball_is_invariant(p in params(1.0), r in vec3()) {
        let r0 = if r.norm() > 1.0 { r / r.norm() } else { r };
        let traj = simulate_mean(&realize(&p).unwrap(), &r0, 1.0, 1e-2).unwrap();
        for s in &traj {
            prop_assert!(s.r.norm() <= 1.0 + 1e-9);
        }
    }

    #[test]
    fn mean_dynamics_match_master_equation(p in params(1.0), r in vec3()) {
        let r0 = if r.norm() > 1.0 { r / r.norm() } else { r };
        let a = simulate_mean(&realize(&p).unwrap(), &r0, 1.0, 1e-2).unwrap();
        let b = master_mean_oracle(&p, &r0, 1.0, 1e-2).unwrap();
        prop_assert!(max_trajectory_deviation(&a, &b) < 1e-6);
    }
}
