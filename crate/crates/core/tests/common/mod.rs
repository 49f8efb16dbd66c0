#![allow(dead_code)]

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rydberg_core::exact::{AtomPositions, Vec3};
use rydberg_core::physics::{blockade_radius_simple, convert_c6_atomic_units, hz_to_angular, PhysicalParams};

pub const C6_AU: f64 = 1.7e19;

pub fn reference_params(omega_hz: f64) -> PhysicalParams {
    PhysicalParams::new(hz_to_angular(omega_hz), convert_c6_atomic_units(C6_AU).unwrap()).unwrap()
}

/// `m` roughly evenly spread points on a sphere of radius `radius`.
pub fn fibonacci_sphere(m: usize, radius: f64) -> AtomPositions {
    let golden = PI * (3.0 - 5.0f64.sqrt());
    let points: Vec<Vec3> = (0..m)
        .map(|i| {
            let z = if m == 1 { 0.0 } else { 1.0 - 2.0 * i as f64 / (m - 1) as f64 };
            let rho = (1.0 - z * z).max(0.0).sqrt();
            let phi = golden * i as f64;
            [radius * rho * phi.cos(), radius * rho * phi.sin(), radius * z]
        })
        .collect();
    AtomPositions::new(points).unwrap()
}

/// `m` points uniform in a ball of `radius`, deterministic in `seed`.
pub fn sample_ball(m: usize, radius: f64, seed: u64) -> AtomPositions {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = Vec::with_capacity(m);
    while points.len() < m {
        let p: Vec3 = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
        if p.iter().map(|x| x * x).sum::<f64>() <= 1.0 {
            points.push([p[0] * radius, p[1] * radius, p[2] * radius]);
        }
    }
    AtomPositions::new(points).unwrap()
}

/// `m` points uniform in a cube of side `side`.
pub fn sample_box(m: usize, side: f64, seed: u64) -> AtomPositions {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points = (0..m)
        .map(|_| [rng.random_range(0.0..side), rng.random_range(0.0..side), rng.random_range(0.0..side)])
        .collect();
    AtomPositions::new(points).unwrap()
}

pub fn rb(params: &PhysicalParams) -> f64 {
    blockade_radius_simple(params)
}

/// Time of the first local maximum above `floor`, refined by a parabola
/// through the three neighbouring samples.
pub fn first_maximum(times: &[f64], values: &[f64], floor: f64) -> Option<(f64, f64)> {
    for i in 1..values.len() - 1 {
        if values[i] > floor && values[i] >= values[i - 1] && values[i] > values[i + 1] {
            let (y0, y1, y2) = (values[i - 1], values[i], values[i + 1]);
            let h = times[i + 1] - times[i];
            let denom = y0 - 2.0 * y1 + y2;
            let shift = if denom != 0.0 { 0.5 * (y0 - y2) / denom } else { 0.0 };
            return Some((times[i] + shift * h, y1));
        }
    }
    None
}
