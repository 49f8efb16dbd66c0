mod common;

use std::f64::consts::PI;

use rydberg_core::analysis::fit_saturation;
use rydberg_core::cloud::{partition_superatoms, BlockadeModel, CloudSpec, PartitionOptions};
use rydberg_core::grid::linspace;
use rydberg_core::superatom::{crossover_time, noninteracting_reference, simulate_cloud};

use common::reference_params;

#[test]
fn peak_curve_saturates_near_half_the_superatom_count() {
    let params = reference_params(210e3);
    let cloud = CloudSpec::isotropic_with_peak(1.5e7, 8.2e19).unwrap();
    let ens = partition_superatoms(&cloud, &params, BlockadeModel::Collective, &PartitionOptions::default()).unwrap();
    let grid = linspace(0.0, 20e-6, 201);
    let curve = simulate_cloud(&ens, &params, &grid).unwrap();
    assert_eq!(curve.values[0], 0.0);
    let fit = fit_saturation(&curve).unwrap();
    assert!(fit.converged);
    let half = ens.superatom_count() / 2.0;
    assert!(fit.n_sat > half / 2.0 && fit.n_sat < 2.0 * half, "N_sat {} vs Σw/2 {half}", fit.n_sat);
    assert!(curve.values.iter().all(|&v| v >= 0.0 && v <= cloud.n_atoms));
}

#[test]
fn curve_stays_below_reference_after_crossover() {
    let params = reference_params(210e3);
    let cloud = CloudSpec::isotropic_with_peak(1.5e7, 8.2e19).unwrap();
    let ens = partition_superatoms(&cloud, &params, BlockadeModel::Collective, &PartitionOptions::default()).unwrap();
    // Up to the reference maximum at t = π/Ω₀.
    let grid = linspace(0.0, PI / params.omega0, 500);
    let curve = simulate_cloud(&ens, &params, &grid).unwrap();
    let reference = noninteracting_reference(cloud.n_atoms, params.omega0, &grid).unwrap();
    let t_cross = crossover_time(&curve, &reference, 0.1).unwrap().expect("crossover inside the window");
    for ((t, c), r) in grid.iter().zip(&curve.values).zip(&reference.values) {
        if *t >= t_cross {
            assert!(c <= r, "t={t}: {c} > {r}");
        }
    }
}

#[test]
fn long_time_mean_is_half_the_superatom_count() {
    let params = reference_params(210e3);
    let cloud = CloudSpec::isotropic_with_peak(2e5, 2.8e18).unwrap();
    let ens = partition_superatoms(&cloud, &params, BlockadeModel::Collective, &PartitionOptions::default()).unwrap();
    let slowest = ens.entries.iter().map(|e| e.n_per).fold(f64::INFINITY, f64::min);
    let period = 2.0 * PI / (slowest.sqrt() * params.omega0);
    let grid = linspace(0.0, 20.0 * period, 20_001);
    let curve = simulate_cloud(&ens, &params, &grid).unwrap();
    let mean = curve.values.iter().sum::<f64>() / curve.len() as f64;
    let half = ens.superatom_count() / 2.0;
    assert!((mean / half - 1.0).abs() <= 0.02, "mean {mean} vs {half}");
}

#[test]
fn short_time_quadratic_without_floor() {
    let params = reference_params(42e3);
    let cloud = CloudSpec::isotropic_with_peak(1.5e7, 2.8e18).unwrap();
    let opts = PartitionOptions {
        n_min: 0.0,
        ..PartitionOptions::default()
    };
    let ens = partition_superatoms(&cloud, &params, BlockadeModel::Collective, &opts).unwrap();
    let t_lim = 0.1 / (ens.max_n_per().sqrt() * params.omega0);
    let grid: Vec<f64> = (1..=10).map(|k| t_lim * k as f64 / 10.0).collect();
    let curve = simulate_cloud(&ens, &params, &grid).unwrap();
    for (t, v) in grid.iter().zip(&curve.values) {
        let q = cloud.n_atoms * (params.omega0 * t / 2.0).powi(2);
        assert!((v / q - 1.0).abs() <= 0.01, "t={t}");
    }
}

#[test]
fn zero_only_grid_gives_zero() {
    let params = reference_params(210e3);
    let cloud = CloudSpec::isotropic_with_peak(1.5e7, 8.2e19).unwrap();
    let ens = partition_superatoms(&cloud, &params, BlockadeModel::Simple, &PartitionOptions::default()).unwrap();
    let curve = simulate_cloud(&ens, &params, &[0.0]).unwrap();
    assert_eq!(curve.values, vec![0.0]);
}

#[test]
fn dephasing_pushes_toward_half_filling() {
    let params = reference_params(210e3).with_gamma(2e6).unwrap();
    let cloud = CloudSpec::isotropic_with_peak(1e6, 1e19).unwrap();
    let ens = partition_superatoms(&cloud, &params, BlockadeModel::Collective, &PartitionOptions::default()).unwrap();
    let curve = simulate_cloud(&ens, &params, &[50e-6]).unwrap();
    assert!((curve.values[0] / (ens.superatom_count() / 2.0) - 1.0).abs() < 1e-6);
}
