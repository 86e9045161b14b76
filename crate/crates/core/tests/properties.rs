use std::f64::consts::{PI, TAU};

use cohstat_core::fock::{build_ladder, coherent_amplitude, poisson_pmf, poisson_tail_mass, wh_multiply};
use cohstat_core::inference::{
    azimuthal_spread, coherent_transform, plane_quadrature, sphere_quadrature, CoherentFamily,
};
use cohstat_core::linops::{
    adjoint, commutator, hermitian_eigendecomposition, matrix_exponential, DEFAULT_EXP_TOL,
    DEFAULT_HERMITIAN_TOL,
};
use cohstat_core::pv_measure::{born_distribution, expectation_trace, pv_from_observable};
use cohstat_core::spin::{binomial_pmf, build_spin_rep, coset_element};
use cohstat_core::{
    Complex64, ComplexMatrix, ComplexVector, HalfInt, Observable, SpherePoint, StateOperator,
    VectorState, WHGroupElement,
};
use proptest::prelude::*;

fn complex() -> impl Strategy<Value = Complex64> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(re, im)| Complex64::new(re, im))
}

fn square(dim: usize) -> impl Strategy<Value = ComplexMatrix> {
    prop::collection::vec(complex(), dim * dim).prop_map(move |e| ComplexMatrix::from_fn(dim, |i, j| e[i * dim + j]))
}

fn hermitian(dim: usize) -> impl Strategy<Value = ComplexMatrix> {
    square(dim).prop_map(|m| (&m + &adjoint(&m)).scale(Complex64::new(0.5, 0.0)))
}

fn unit_vector(dim: usize) -> impl Strategy<Value = VectorState> {
    prop::collection::vec(complex(), dim)
        .prop_filter("nonzero", |v| v.iter().map(|z| z.norm_sqr()).sum::<f64>() > 1e-3)
        .prop_map(|v| VectorState::from_unnormalized(ComplexVector::new(v).unwrap()).unwrap())
}

fn identity_defect(m: &ComplexMatrix) -> f64 {
    (m - &ComplexMatrix::identity(m.dim())).max_abs()
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 64,
        failure_persistence: None,
        ..ProptestConfig::default()
    })]

    #[test]
    fn exponential_of_skew_hermitian_is_unitary(h in (1usize..7).prop_flat_map(hermitian)) {
        let u = matrix_exponential(&h.scale(Complex64::new(0.0, 1.0)), DEFAULT_EXP_TOL).unwrap();
        prop_assert!(identity_defect(&(&adjoint(&u) * &u)) < 1e-10);
    }

    #[test]
    fn exponential_commutes_with_adjoint(m in (1usize..6).prop_flat_map(square)) {
        let lhs = adjoint(&matrix_exponential(&m, DEFAULT_EXP_TOL).unwrap());
        let rhs = matrix_exponential(&adjoint(&m), DEFAULT_EXP_TOL).unwrap();
        prop_assert!((&lhs - &rhs).max_abs() < 1e-10);
    }

    #[test]
    fn jacobi_identity(
        (a, b, c) in (1usize..6).prop_flat_map(|d| (square(d), square(d), square(d)))
    ) {
        let t1 = commutator(&a, &commutator(&b, &c).unwrap()).unwrap();
        let t2 = commutator(&b, &commutator(&c, &a).unwrap()).unwrap();
        let t3 = commutator(&c, &commutator(&a, &b).unwrap()).unwrap();
        prop_assert!((&(&t1 + &t2) + &t3).max_abs() < 1e-12);
    }

    #[test]
    fn eigendecomposition_reconstructs(h in (1usize..8).prop_flat_map(hermitian)) {
        let s = hermitian_eigendecomposition(&h, DEFAULT_HERMITIAN_TOL).unwrap();
        prop_assert!((&s.reconstruct() - &h).max_abs() < 1e-10);
        prop_assert!(s.orthonormality_defect() < 1e-10);
        prop_assert!(s.eigenvalues.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn born_probabilities_sum_to_one_and_match_trace(
        (h, psi) in (1usize..7).prop_flat_map(|d| (hermitian(d), unit_vector(d)))
    ) {
        let obs = Observable::new(h).unwrap();
        let pv = pv_from_observable(&obs);
        prop_assert!(pv.invariant_defect() < 1e-10);
        let probs = born_distribution(&psi, &pv).unwrap();
        prop_assert!((probs.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        prop_assert!(probs.iter().all(|&p| p >= 0.0));
        let mean: f64 = pv.outcomes.iter().zip(&probs).map(|(y, p)| y * p).sum();
        let trace = expectation_trace(&StateOperator::pure(&psi), &obs).unwrap();
        prop_assert!((mean - trace).abs() < 1e-10);
    }

    #[test]
    fn born_probabilities_ignore_global_phase(
        (h, psi) in (1usize..6).prop_flat_map(|d| (hermitian(d), unit_vector(d))),
        phase in 0.0..std::f64::consts::TAU,
    ) {
        let pv = pv_from_observable(&Observable::new(h).unwrap());
        let turned = psi.with_phase(Complex64::from_polar(1.0, phase)).unwrap();
        let a = born_distribution(&psi, &pv).unwrap();
        let b = born_distribution(&turned, &pv).unwrap();
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() < 1e-13);
        }
    }

    #[test]
    fn poisson_pmf_depends_on_modulus_only(r in 0.0..5.0f64, t1 in 0.0..6.3f64, t2 in 0.0..6.3f64, n in 0u64..40) {
        let a = poisson_pmf(Complex64::from_polar(r, t1), n);
        let b = poisson_pmf(Complex64::from_polar(r, t2), n);
        prop_assert!((a - b).abs() <= 1e-13 * a.max(1e-300));
        let amp = coherent_amplitude(Complex64::from_polar(r, t1), n as usize);
        prop_assert!((amp.norm_sqr() - a).abs() <= 1e-13 * a.max(1e-300));
    }

    #[test]
    fn poisson_head_plus_tail_is_one(r in 0.0..6.0f64, dim in 2usize..80) {
        let alpha = Complex64::new(r, 0.0);
        let head: f64 = (0..dim as u64).map(|n| poisson_pmf(alpha, n)).sum();
        prop_assert!((head + poisson_tail_mass(alpha, dim) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn binomial_pmf_is_azimuth_free(twice_j in 0i32..21, theta in 0.0..PI, g1 in 0.0..TAU, g2 in 0.0..TAU) {
        let rep = build_spin_rep(HalfInt::from_twice(twice_j)).unwrap();
        let p1 = SpherePoint::new(theta, g1).unwrap();
        let p2 = SpherePoint::new(theta, g2).unwrap();
        let mut total = 0.0;
        for ell in rep.labels() {
            let a = binomial_pmf(&rep, &p1, ell).unwrap();
            prop_assert!((a - binomial_pmf(&rep, &p2, ell).unwrap()).abs() < 1e-15);
            total += a;
        }
        prop_assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn coset_elements_lie_in_su2(theta in 0.0..PI, gamma in 0.0..TAU) {
        let u = coset_element(&SpherePoint::new(theta, gamma).unwrap());
        prop_assert!(identity_defect(&(&adjoint(&u) * &u)) < 1e-13);
        let det = u.get(0, 0) * u.get(1, 1) - u.get(0, 1) * u.get(1, 0);
        prop_assert!((det - Complex64::new(1.0, 0.0)).norm() < 1e-13);
    }

    #[test]
    fn wh_group_is_associative(
        s in prop::array::uniform3(-3.0..3.0f64),
        z in prop::array::uniform3(complex()),
    ) {
        let g: Vec<_> = (0..3).map(|i| WHGroupElement::new(s[i], z[i])).collect();
        let left = wh_multiply(wh_multiply(g[0], g[1]), g[2]);
        let right = wh_multiply(g[0], wh_multiply(g[1], g[2]));
        prop_assert!((left.s - right.s).abs() < 1e-12);
        prop_assert!((left.alpha - right.alpha).norm() < 1e-12);
        let e = wh_multiply(g[0], g[0].inverse());
        prop_assert!(e.s.abs() < 1e-12 && e.alpha.norm() < 1e-12);
    }

    #[test]
    fn wh_joint_density_is_azimuth_free(r in 0.0..4.0f64, k in 0usize..16) {
        let fam = CoherentFamily::from(&build_ladder(16).unwrap());
        let rule = plane_quadrature(6.0, 4, 17).unwrap();
        prop_assert!(azimuthal_spread(&fam, &rule, k, r) < 1e-12);
    }

    #[test]
    fn spin_joint_density_is_azimuth_free(twice_j in 0u32..12, theta in 0.0..PI) {
        let fam = CoherentFamily::Spin { twice_j };
        let (nt, ng) = cohstat_core::inference::minimal_sphere_orders(twice_j);
        let rule = sphere_quadrature(twice_j, nt, ng).unwrap();
        for k in 0..=twice_j as usize {
            prop_assert!(azimuthal_spread(&fam, &rule, k, theta) < 1e-12);
        }
    }

    #[test]
    fn pov_probabilities_are_nonnegative(twice_j in 0u32..8, psi_seed in prop::collection::vec(complex(), 9)) {
        let dim = twice_j as usize + 1;
        let v: Vec<_> = psi_seed.into_iter().take(dim).collect();
        prop_assume!(v.iter().map(|z| z.norm_sqr()).sum::<f64>() > 1e-3);
        let psi = VectorState::from_unnormalized(ComplexVector::new(v).unwrap()).unwrap();
        let fam = CoherentFamily::Spin { twice_j };
        let (nt, ng) = cohstat_core::inference::minimal_sphere_orders(twice_j);
        let rule = sphere_quadrature(twice_j, nt, ng).unwrap();
        let t = coherent_transform(&psi, &fam, &rule).unwrap();
        prop_assert!((t.norm_squared() - 1.0).abs() < 1e-12);
        let p = t.box_probability((0.0, 1.5), (0.0, 3.0));
        prop_assert!((0.0..=1.0 + 1e-12).contains(&p));
    }
}
