//! Degree-Rips modules are not continuous in the Prohorov distance of
//! unnormalized data: `Z^n = Y^n ∪ {0}` with `Y` the standard basis of R^3
//! gets Prohorov-close to `Y` as `n` grows, yet the `H_0` Hilbert functions
//! keep disagreeing at a fixed grid point.

use serde::{Deserialize, Serialize};

use crate::complexes::degree::DegreeRips;
use crate::complexes::grades::{Bigrade, GridSpec};
use crate::error::{Error, Result};
use crate::homology::Bifiltration;
use crate::measures::{cloud_measure, prohorov_flow, EmpiricalMeasure};
use crate::metric::{Metric, PointCloud};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscontinuityReport {
    pub n_max: usize,
    /// `d_Pr(ν_Y, ν_{Z^n})` for `n = 1..=n_max`.
    pub d_pr: Vec<f64>,
    /// First grid point (row by row) where every `Z^n` differs from `Y`.
    pub witness: Option<Bigrade>,
    pub dim_y: Option<usize>,
    pub dim_z: Vec<usize>,
}

/// The demo grid: `k = i/20` for `i = 20..1`, `r = j/10` for `j = 1..20`.
pub fn discontinuity_grid() -> GridSpec {
    GridSpec::new((1..=20).rev().map(|i| i as f64 / 20.0).collect(), (1..=20).map(|j| j as f64 / 10.0).collect())
        .expect("fixed grid is valid")
}

pub fn discontinuity_demo(n_max: usize) -> Result<DiscontinuityReport> {
    if n_max == 0 {
        return Err(Error::InvalidInput("n_max must be at least 1".into()));
    }
    let basis: Vec<Vec<f64>> = (0..3)
        .map(|i| {
            let mut p = vec![0.0; 3];
            p[i] = 1.0;
            p
        })
        .collect();
    let y = DegreeRips::from_cloud(&PointCloud::new(basis.clone(), Metric::L2)?)?;
    let grid = discontinuity_grid();
    let hy = y.hilbert(0, &grid)?;
    let mut rows = basis;
    rows.push(vec![0.0; 3]);
    let mut d_pr = Vec::with_capacity(n_max);
    let mut differs = vec![true; grid.len()];
    let mut z_modules = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let z = PointCloud::with_multiplicities(rows.clone(), vec![n, n, n, 1], Metric::L2)?;
        let nu_y = EmpiricalMeasure::new(vec![0, 1, 2], vec![1.0 / 3.0; 3])?;
        d_pr.push(prohorov_flow(&z.row_distances(), &nu_y, &cloud_measure(&z), 1e-12)?);
        let hz = DegreeRips::from_cloud(&z)?.hilbert(0, &grid)?;
        for (idx, (i, j, _)) in grid.points().enumerate() {
            differs[idx] &= hz.get(i, j) != hy.get(i, j);
        }
        z_modules.push(hz);
    }
    let found = grid.points().zip(&differs).find(|(_, &d)| d).map(|(p, _)| p);
    Ok(DiscontinuityReport {
        n_max,
        d_pr,
        witness: found.map(|p| p.2),
        dim_y: found.map(|(i, j, _)| hy.get(i, j)),
        dim_z: found.map_or(Vec::new(), |(i, j, _)| z_modules.iter().map(|h| h.get(i, j)).collect()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn witness_persists() {
        let rep = discontinuity_demo(8).unwrap();
        for (n, d) in rep.d_pr.iter().enumerate() {
            assert!((d - 1.0 / (3.0 * (n + 1) as f64 + 1.0)).abs() < 1e-12);
        }
        assert_eq!(rep.witness, Some(Bigrade::new(1.0, 0.6)));
        assert_eq!(rep.dim_y, Some(0));
        assert!(rep.dim_z.iter().all(|&d| d == 1));
    }
}
