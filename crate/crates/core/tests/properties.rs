mod common;

use proptest::prelude::*;
use rydberg_core::analysis::{fit_joint_power_law, fit_power_law, fit_saturation, saturation_model};
use rydberg_core::cloud::{sample_positions, CloudSpec, SuperatomEnsemble, SuperatomEntry};
use rydberg_core::exact::{
    build_hamiltonian, enumerate_restricted_basis, evolve, rydberg_number, AtomPositions, BasisKind, HamiltonianSpec,
    QuantumState,
};
use rydberg_core::physics::{
    angular_to_hz, blockade_radius_collective, blockade_radius_simple, hz_to_angular, sphere_volume, two_photon_rabi,
    PhysicalParams, TwoPhotonInputs,
};
use rydberg_core::superatom::{simulate_cloud, superatom_population, ExcitationCurve};

use common::reference_params;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn positions(max: usize, side: f64) -> impl Strategy<Value = AtomPositions> {
    prop::collection::vec(prop::array::uniform3(0.0..side), 1..=max)
        .prop_filter_map("coincident atoms", |pts| AtomPositions::new(pts).ok())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn two_photon_is_bilinear_and_inverse_in_detuning(
        w1 in 1e3..1e9f64, w2 in 1e3..1e9f64, delta in 1e6..1e11f64, k in 0.1..10.0f64,
    ) {
        let base = two_photon_rabi(TwoPhotonInputs { omega1: w1, omega2: w2, delta }).unwrap();
        let a = two_photon_rabi(TwoPhotonInputs { omega1: k * w1, omega2: w2, delta }).unwrap();
        let b = two_photon_rabi(TwoPhotonInputs { omega1: w1, omega2: k * w2, delta }).unwrap();
        let c = two_photon_rabi(TwoPhotonInputs { omega1: w1, omega2: w2, delta: k * delta }).unwrap();
        prop_assert!(rel(a, k * base) < 1e-12);
        prop_assert!(rel(b, k * base) < 1e-12);
        prop_assert!(rel(c, base / k) < 1e-12);
    }

    #[test]
    fn blockade_radius_sixth_root(f in 1e3..1e7f64, k in 0.01..100.0f64) {
        let p = reference_params(210e3).with_omega0(hz_to_angular(f)).unwrap();
        let r = blockade_radius_simple(&p);
        let faster = blockade_radius_simple(&p.with_omega0(p.omega0 * k).unwrap());
        prop_assert!(rel(faster, r * k.powf(-1.0 / 6.0)) < 1e-12);
        let stronger = PhysicalParams::new(p.omega0, p.c6 * k).unwrap();
        prop_assert!(rel(blockade_radius_simple(&stronger), r * k.powf(1.0 / 6.0)) < 1e-12);
    }

    #[test]
    fn collective_reduces_to_simple_for_one_atom(f in 1e3..1e7f64, kappa in 0.5..2.0f64) {
        let p = reference_params(f).with_kappa(kappa).unwrap();
        let rb0 = blockade_radius_simple(&p.with_kappa(1.0).unwrap());
        let density = 1.0 / sphere_volume(rb0);
        let col = blockade_radius_collective(&p, density).unwrap();
        prop_assert!(rel(col.radius, blockade_radius_simple(&p)) < 1e-12);
    }

    #[test]
    fn frequency_round_trip(f in -1e9..1e9f64) {
        prop_assert!((angular_to_hz(hz_to_angular(f)) - f).abs() <= 1e-15 * f.abs().max(1.0));
    }

    #[test]
    fn saturation_fit_scale_equivariance(
        n_sat in 10.0..1e4f64, rate in 1e6..1e9f64, k in 0.01..100.0f64, wiggle in 0.0..0.02f64,
    ) {
        let t_max = 4.0 * n_sat / rate;
        let times: Vec<f64> = (0..41).map(|i| t_max * i as f64 / 40.0).collect();
        let values: Vec<f64> = times
            .iter()
            .enumerate()
            .map(|(i, &t)| saturation_model(n_sat, rate, t) + wiggle * n_sat * (i as f64 * 1.7).sin())
            .collect();
        let scaled: Vec<f64> = values.iter().map(|v| k * v).collect();
        let a = fit_saturation(&ExcitationCurve::new(times.clone(), values).unwrap()).unwrap();
        let b = fit_saturation(&ExcitationCurve::new(times, scaled).unwrap()).unwrap();
        prop_assert!(a.converged && b.converged);
        prop_assert!(rel(b.n_sat, k * a.n_sat) < 1e-6);
        prop_assert!(rel(b.rate, k * a.rate) < 1e-6);
        prop_assert!((b.residual_rms / k - a.residual_rms).abs() <= 1e-6 * n_sat);
    }

    #[test]
    fn power_law_exponent_ignores_x_scale(
        pts in prop::collection::vec((1e-3..1e3f64, 1e-3..1e3f64), 3..30), alpha in 1e-3..1e3f64,
    ) {
        prop_assume!(pts.iter().any(|p| (p.0 / pts[0].0 - 1.0).abs() > 1e-3));
        let a = fit_power_law(&pts).unwrap();
        let moved: Vec<(f64, f64)> = pts.iter().map(|&(x, y)| (alpha * x, y)).collect();
        let b = fit_power_law(&moved).unwrap();
        prop_assert!((a.exponent - b.exponent).abs() <= 1e-12 * a.exponent.abs().max(1.0));
        prop_assert!(rel(b.prefactor, a.prefactor * alpha.powf(-a.exponent)) < 1e-9);
    }

    #[test]
    fn exact_power_laws_fit_without_residual(
        xs in prop::collection::vec((0.1..100.0f64, 0.1..100.0f64), 4..20),
        e1 in -2.0..2.0f64, e2 in -2.0..2.0f64, pre in 0.01..100.0f64,
    ) {
        let grid: Vec<[f64; 2]> = xs.iter().map(|&(a, b)| [a, b]).collect();
        let ys: Vec<f64> = grid.iter().map(|x| pre * x[0].powf(e1) * x[1].powf(e2)).collect();
        if let Ok(fit) = fit_joint_power_law(&grid, &ys) {
            prop_assert!(fit.residual_rms < 1e-10);
        }
    }

    #[test]
    fn ensemble_order_does_not_matter(
        entries in prop::collection::vec((1.0..1e4f64, 0.01..100.0f64), 1..40),
        rot in 0usize..40,
    ) {
        let make = |es: &[(f64, f64)]| {
            SuperatomEnsemble::from_entries(
                es.iter().map(|&(n_per, weight)| SuperatomEntry { n_per, weight, center: [0.0; 3] }).collect(),
            )
            .unwrap()
        };
        let mut shuffled = entries.clone();
        shuffled.reverse();
        let len = shuffled.len();
        shuffled.rotate_left(rot % len);
        let params = reference_params(210e3);
        let grid: Vec<f64> = (0..50).map(|i| i as f64 * 1e-7).collect();
        let a = simulate_cloud(&make(&entries), &params, &grid).unwrap();
        let b = simulate_cloud(&make(&shuffled), &params, &grid).unwrap();
        let total: f64 = entries.iter().map(|e| e.1).sum();
        for (x, y) in a.values.iter().zip(&b.values) {
            prop_assert!((x - y).abs() <= 1e-12 * total);
        }
    }

    #[test]
    fn superatom_population_is_a_probability(
        n_per in 0.0..1e6f64, t in 0.0..1e-3f64, gamma in prop_oneof![Just(0.0), 0.0..1e8f64],
    ) {
        let p = superatom_population(n_per, hz_to_angular(210e3), t, gamma);
        prop_assert!((0.0..=1.0).contains(&p));
    }

    #[test]
    fn sampling_is_seed_deterministic(seed in any::<u64>(), count in 1usize..200) {
        let spec = CloudSpec::new(1e6, [10e-6, 12e-6, 30e-6]).unwrap();
        let a = sample_positions(&spec, count, seed).unwrap();
        let b = sample_positions(&spec, count, seed).unwrap();
        prop_assert_eq!(a.to_table(), b.to_table());
        let c = sample_positions(&spec, count, seed.wrapping_add(1)).unwrap();
        prop_assert_ne!(a.to_table(), c.to_table());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn hamiltonian_is_real_symmetric(pos in positions(7, 8e-6), restricted in any::<bool>()) {
        let params = reference_params(210e3);
        let spec = HamiltonianSpec::new(pos, params.omega0, params.c6);
        let kind = if restricted {
            BasisKind::Restricted { radius: blockade_radius_simple(&params) }
        } else {
            BasisKind::Full
        };
        let h = build_hamiltonian(&spec, kind).unwrap();
        prop_assert!(h.is_symmetric());
        let dense = h.to_dense();
        prop_assert_eq!(&dense, &dense.transpose());
    }

    #[test]
    fn restricted_basis_matches_brute_force(pos in positions(10, 12e-6), radius in 1e-6..8e-6f64) {
        let m = pos.len();
        let pts = pos.as_slice();
        let d = |i: usize, j: usize| {
            let (a, b) = (pts[i], pts[j]);
            ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
        };
        let brute: Vec<u32> = (0u32..1 << m)
            .filter(|&mask| {
                (0..m).all(|i| (i + 1..m).all(|j| !(mask >> i & 1 == 1 && mask >> j & 1 == 1 && d(i, j) < radius)))
            })
            .collect();
        let mut found: Vec<u32> = enumerate_restricted_basis(&pos, radius).into_iter().map(|s| s.0).collect();
        found.sort_unstable();
        prop_assert_eq!(found, brute);
    }

    #[test]
    fn evolution_keeps_rydberg_number_in_range(pos in positions(6, 6e-6), t in 0.0..5e-6f64) {
        let params = reference_params(210e3);
        let m = pos.len() as f64;
        let spec = HamiltonianSpec::new(pos, params.omega0, params.c6);
        let h = build_hamiltonian(&spec, BasisKind::Full).unwrap();
        let states = evolve(&h, &QuantumState::ground(h.basis()), &[0.0, t]).unwrap();
        let last = &states[1];
        prop_assert!((last.norm_sqr() - 1.0).abs() < 1e-9);
        let n = rydberg_number(last);
        prop_assert!(n >= -1e-12 && n <= m + 1e-12);
    }
}
