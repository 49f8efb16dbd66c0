mod common;

use rydberg_core::analysis::fit_power_law;
use rydberg_core::cloud::{
    density_at, partition_superatoms, peak_density, sample_positions, BlockadeModel, CloudSpec, PartitionOptions,
};
use rydberg_core::physics::hz_to_angular;

use common::reference_params;

fn reference_cloud() -> CloudSpec {
    CloudSpec::isotropic_with_peak(1.5e7, 8.2e19).unwrap()
}

fn no_floor() -> PartitionOptions {
    PartitionOptions {
        n_min: 0.0,
        ..PartitionOptions::default()
    }
}

#[test]
fn sample_moments() {
    let spec = CloudSpec::new(1e6, [10e-6, 20e-6, 35e-6]).unwrap();
    let count = 100_000;
    let pos = sample_positions(&spec, count, 2024).unwrap();
    for axis in 0..3 {
        let xs: Vec<f64> = pos.as_slice().iter().map(|p| p[axis]).collect();
        let mean = xs.iter().sum::<f64>() / count as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (count - 1) as f64;
        let sigma = spec.sigma[axis];
        assert!(mean.abs() < 5.0 * sigma / (count as f64).sqrt(), "axis {axis}: mean {mean}");
        assert!((var / sigma.powi(2) - 1.0).abs() < 0.05, "axis {axis}: var ratio {}", var / sigma.powi(2));
    }
    let again = sample_positions(&spec, count, 2024).unwrap();
    assert_eq!(pos.to_table(), again.to_table());
}

#[test]
fn density_off_axis_point() {
    let spec = CloudSpec::new(2e7, [15e-6, 25e-6, 40e-6]).unwrap();
    let p = [7e-6, -12e-6, 31e-6];
    let expo = -(7.0f64 / 15.0).powi(2) / 2.0 - (12.0f64 / 25.0).powi(2) / 2.0 - (31.0f64 / 40.0).powi(2) / 2.0;
    let n0 = 2e7 / ((2.0 * std::f64::consts::PI).powf(1.5) * 15e-6 * 25e-6 * 40e-6);
    assert!((density_at(&spec, p) / (n0 * expo.exp()) - 1.0).abs() < 1e-12);
    assert!((peak_density(&spec) / n0 - 1.0).abs() < 1e-14);
}

#[test]
fn conservation_and_coverage() {
    let params = reference_params(210e3);
    for model in [BlockadeModel::Simple, BlockadeModel::Collective] {
        let ens = partition_superatoms(&reference_cloud(), &params, model, &no_floor()).unwrap();
        assert!(ens.total_atoms_covered <= 1.5e7 * (1.0 + 1e-9));
        assert!(ens.total_atoms_covered >= 0.999 * 1.5e7, "{model}: {}", ens.total_atoms_covered);
        assert!(ens.entries.iter().all(|e| e.weight > 0.0 && e.n_per >= 0.0));
        let floored = partition_superatoms(&reference_cloud(), &params, model, &PartitionOptions::default()).unwrap();
        assert!(floored.entries.iter().all(|e| e.n_per >= 1.0));
        assert!(floored.total_atoms_covered <= ens.total_atoms_covered);
    }
}

#[test]
fn raising_rabi_frequency_adds_simple_cells() {
    let cloud = reference_cloud();
    let mut last = 0;
    for f in [42e3, 80e3, 150e3, 210e3] {
        let ens = partition_superatoms(&cloud, &reference_params(f), BlockadeModel::Simple, &PartitionOptions::default()).unwrap();
        assert!(ens.entries.len() > last, "{f}: {} entries", ens.entries.len());
        last = ens.entries.len();
    }
}

#[test]
fn collective_superatom_count_scaling() {
    let cloud = reference_cloud();
    let base = reference_params(100e3);
    let opts = no_floor();
    let densities = rydberg_core::grid::geomspace(8.2e18, 8.2e19, 5);
    let pts: Vec<(f64, f64)> = densities
        .iter()
        .map(|&n| {
            let c = cloud.with_peak_density(n).unwrap();
            let ens = partition_superatoms(&c, &base, BlockadeModel::Collective, &opts).unwrap();
            (n, ens.superatom_count())
        })
        .collect();
    let density_exp = fit_power_law(&pts).unwrap().exponent;
    assert!((density_exp / 0.2 - 1.0).abs() <= 0.05, "density exponent {density_exp}");

    let omegas = rydberg_core::grid::geomspace(21e3, 210e3, 5);
    let pts: Vec<(f64, f64)> = omegas
        .iter()
        .map(|&f| {
            let p = base.with_omega0(hz_to_angular(f)).unwrap();
            let ens = partition_superatoms(&cloud, &p, BlockadeModel::Collective, &opts).unwrap();
            (f, ens.superatom_count())
        })
        .collect();
    let omega_exp = fit_power_law(&pts).unwrap().exponent;
    assert!((omega_exp / 0.4 - 1.0).abs() <= 0.05, "omega exponent {omega_exp}");
}

#[test]
fn partition_is_deterministic_and_csv_stable() {
    let params = reference_params(150e3);
    let a = partition_superatoms(&reference_cloud(), &params, BlockadeModel::Collective, &PartitionOptions::default()).unwrap();
    let b = partition_superatoms(&reference_cloud(), &params, BlockadeModel::Collective, &PartitionOptions::default()).unwrap();
    assert_eq!(a, b);
    let csv = a.to_csv();
    assert!(csv.starts_with("x_m,y_m,z_m,n_per,weight\n"));
    assert_eq!(csv.lines().count(), a.entries.len() + 1);
}

#[test]
fn central_cell_matches_sphere_count() {
    let params = reference_params(210e3);
    let ens = partition_superatoms(&reference_cloud(), &params, BlockadeModel::Collective, &PartitionOptions::default()).unwrap();
    let rb = common::rb(&params);
    // N = n·(4π/3)·(r_b·N^{-1/12})³ solved for N.
    let oracle = (8.2e19 * 4.0 / 3.0 * std::f64::consts::PI * rb.powi(3)).powf(0.8);
    let central = ens.max_n_per();
    assert!((central / oracle - 1.0).abs() < 0.05, "central {central} vs {oracle}");
    assert!(central > 3e3 && central < 3e4);
}
