use std::f64::consts::PI;

use nalgebra::DMatrix;
use proptest::prelude::*;

use phasespace::correspondence::{expectation_phase_space, general_cfunction, mh_cfunction};
use phasespace::hilbert::{coefficients, make_density, reconstruct, DensityMatrix, Grid, PhysicalConfig};
use phasespace::models::{random_hermitian, random_state, OperatorPair};
use phasespace::quasidist::{
    characteristic_function, general_distribution, kernel_relation_check, marginal_alpha, marginal_beta,
    mh_distribution, mh_distribution_from_density, Kernel,
};
use phasespace::transform::validate_transform;

fn balanced(n: usize) -> Grid {
    let l = (2.0 * PI * n as f64).sqrt();
    Grid::over(n, -l / 2.0, l / 2.0).unwrap()
}

fn random_pair(n: usize, seed: u64) -> (Grid, OperatorPair) {
    let g = balanced(n);
    let a = random_hermitian(&g, seed);
    let b = random_hermitian(&g, seed ^ 0x5555);
    (g.clone(), OperatorPair::new(&a, &b).unwrap())
}

fn kernel(i: usize) -> Kernel {
    match i {
        0 => Kernel::wigner(),
        1 => Kernel::margenau_hill(),
        2 => Kernel::rihaczek(),
        _ => Kernel::gaussian(1.3).unwrap(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn coefficients_round_trip(n in 4usize..14, seed in 0u64..1000) {
        let (g, pair) = random_pair(n, seed);
        let psi = random_state(&g, seed + 1);
        for basis in [&pair.basis_a, &pair.basis_b] {
            let back = reconstruct(&coefficients(&psi, basis).unwrap(), basis).unwrap();
            prop_assert!((back.amplitudes() - psi.amplitudes()).camax() < 1e-10);
        }
    }

    #[test]
    fn transform_is_unitary(n in 4usize..14, seed in 0u64..1000) {
        let (_, pair) = random_pair(n, seed);
        let r = validate_transform(&pair.transform);
        prop_assert!(r.unitarity_deviation < 1e-10, "{}", r.unitarity_deviation);
        prop_assert!(r.adjoint_deviation < 1e-10);
    }

    #[test]
    fn mh_marginals_and_mass(n in 4usize..14, seed in 0u64..1000) {
        let (g, pair) = random_pair(n, seed);
        let psi = random_state(&g, seed + 7);
        let (a, b) = pair.coefficients(&psi).unwrap();
        let p = mh_distribution(&a, &b, &pair.transform).unwrap();
        prop_assert!((p.total() - 1.0).norm() < 1e-12);
        let ma = marginal_alpha(&p).unwrap();
        let mb = marginal_beta(&p).unwrap();
        let (wa, wb) = (pair.basis_a.measure(), pair.basis_b.measure());
        for ((x, w), y) in ma.values.iter().zip(wa).zip(&a.probabilities()) {
            prop_assert!((x * w - y).abs() < 1e-12);
        }
        for ((x, w), y) in mb.values.iter().zip(wb).zip(&b.probabilities()) {
            prop_assert!((x * w - y).abs() < 1e-12);
        }
        prop_assert!(ma.max_imag < 1e-12 && mb.max_imag < 1e-12);
    }

    #[test]
    fn distribution_is_gauge_invariant(
        n in 4usize..12,
        seed in 0u64..1000,
        phases in proptest::collection::vec(0.0..2.0 * PI, 24),
        k in 0usize..4,
    ) {
        let (g, pair) = random_pair(n, seed);
        let rotated = pair.regauged(&phases[..n], &phases[12..12 + n]).unwrap();
        let psi = random_state(&g, seed + 3);
        let op = random_hermitian(&g, seed + 4);
        let kern = kernel(k);
        let mut values = Vec::new();
        for pr in [&pair, &rotated] {
            let (a, b) = pr.coefficients(&psi).unwrap();
            let grid = pr.phase_grid(1.0).unwrap();
            let p = general_distribution(&a, &b, &pr.transform, &kern, &grid).unwrap();
            // the gaussian kernel underflows on these wide working grids, so it has no c-function here
            let e = match k {
                1 => {
                    let c = mh_cfunction(&op, &pr.basis_a, &pr.basis_b, &pr.transform).unwrap();
                    expectation_phase_space(&c, &mh_distribution(&a, &b, &pr.transform).unwrap()).unwrap()
                }
                3 => phasespace::C64::from(0.0),
                _ => {
                    let c = general_cfunction(&op, &pr.basis_a, &pr.basis_b, &pr.transform, &kern, &grid).unwrap();
                    expectation_phase_space(&c, &p).unwrap()
                }
            };
            values.push((p, e));
        }
        prop_assert!((values[0].0.values() - values[1].0.values()).camax() < 1e-10);
        prop_assert!((values[0].1 - values[1].1).norm() < 1e-10);
    }

    #[test]
    fn mh_is_linear_in_the_density(n in 4usize..12, seed in 0u64..1000, w in 0.05f64..0.95) {
        let (g, pair) = random_pair(n, seed);
        let (s1, s2) = (random_state(&g, seed + 1), random_state(&g, seed + 2));
        let r1 = make_density(&[(1.0, s1.clone())]).unwrap();
        let r2 = make_density(&[(1.0, s2.clone())]).unwrap();
        let mix = DensityMatrix::mix(&[(w, &r1), (1.0 - w, &r2)]).unwrap();
        let t = &pair.transform;
        let pm = mh_distribution_from_density(&mix, &pair.basis_a, &pair.basis_b, t).unwrap();
        let p1 = mh_distribution_from_density(&r1, &pair.basis_a, &pair.basis_b, t).unwrap();
        let p2 = mh_distribution_from_density(&r2, &pair.basis_a, &pair.basis_b, t).unwrap();
        let want: DMatrix<_> = p1.values() * phasespace::C64::from(w) + p2.values() * phasespace::C64::from(1.0 - w);
        prop_assert!((pm.values() - want).camax() < 1e-10);
        let (a, b) = pair.coefficients(&s1).unwrap();
        prop_assert!((p1.values() - mh_distribution(&a, &b, t).unwrap().values()).camax() < 1e-10);
    }

    #[test]
    fn kernel_relation_on_random_states(seed in 0u64..1000, k in 0usize..4) {
        let g = balanced(16);
        let cfg = PhysicalConfig::default();
        let pair = OperatorPair::qp(&g, &cfg).unwrap();
        let grid = pair.phase_grid(1.0).unwrap();
        let psi = random_state(&g, seed);
        let (a, b) = pair.coefficients(&psi).unwrap();
        let r = kernel_relation_check(&a, &b, &pair.transform, &kernel(k), &grid).unwrap();
        prop_assert!(r.max_deviation < 1e-10, "{}", r.max_deviation);
    }

    #[test]
    fn characteristic_function_is_one_at_origin(n in 4usize..12, seed in 0u64..1000, k in 0usize..4) {
        let (g, pair) = random_pair(n, seed);
        let psi = random_state(&g, seed + 9);
        let (a, b) = pair.coefficients(&psi).unwrap();
        let grid = pair.phase_grid(1.0).unwrap();
        let p = general_distribution(&a, &b, &pair.transform, &kernel(k), &grid).unwrap();
        let m = characteristic_function(&p, &[0.0], &[0.0]).unwrap();
        prop_assert!((m.values()[(0, 0)] - 1.0).norm() < 1e-9);
    }
}
