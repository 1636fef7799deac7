#![allow(dead_code)]

use bistable::measures::EmpiricalMeasure;
use bistable::metric::{distance_matrix, FiniteMetricSpace, Metric, PointCloud};
use bistable::rng::{sample_box, stage_rng};
use proptest::prelude::*;
use rand::Rng;

pub fn cloud(seed: u64, n: usize, dim: usize, metric: Metric) -> PointCloud {
    PointCloud::new(sample_box(&mut stage_rng(seed, 0), n, dim, 0.0, 1.0), metric).unwrap()
}

pub fn space(seed: u64, n: usize) -> FiniteMetricSpace {
    distance_matrix(&cloud(seed, n, 3, Metric::L1))
}

/// A random probability measure on some of the `n` points.
pub fn measure(rng: &mut impl Rng, n: usize) -> EmpiricalMeasure {
    let size = rng.gen_range(1..=n);
    let mut atoms: Vec<usize> = (0..n).collect();
    for i in 0..size {
        let j = rng.gen_range(i..n);
        atoms.swap(i, j);
    }
    atoms.truncate(size);
    let raw: Vec<f64> = (0..size).map(|_| rng.gen_range(1..=8) as f64).collect();
    let total: f64 = raw.iter().sum();
    EmpiricalMeasure::new(atoms, raw.iter().map(|w| w / total).collect()).unwrap()
}

/// Points with coordinates on a coarse lattice, so ties between distances
/// actually happen.
pub fn lattice_points(max_n: usize, dim: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(prop::collection::vec((0u8..6).prop_map(|x| x as f64 / 4.0), dim), 1..=max_n)
}

pub fn real_points(max_n: usize, dim: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(prop::collection::vec(-1.0f64..1.0, dim), 1..=max_n)
}
