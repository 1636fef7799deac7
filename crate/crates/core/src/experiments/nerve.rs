//! The multicover nerve check: on small planar clouds, the k-fold Čech
//! complex and the subdivision-Čech slice at `(k, r)` have the same
//! homology in degrees 0 and 1 for every integer `k` and every radius.
//!
//! Both sides only change at minimum enclosing ball radii of subsets of the
//! cloud, so it suffices to evaluate between consecutive such radii and
//! past the largest one.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::complexes::{cech_filtration, kfold_cech_complex, subdivision_bifiltration, Bigrade};
use crate::error::Result;
use crate::homology::homology_dim;
use crate::metric::{Metric, PointCloud};
use crate::rng::{sample_box, stage_rng};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NerveConfig {
    pub seed: u64,
    pub clouds: usize,
    pub n_min: usize,
    pub n_max: usize,
}

impl Default for NerveConfig {
    fn default() -> Self {
        NerveConfig { seed: 0, clouds: 20, n_min: 3, n_max: 8 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NerveMismatch {
    pub k: usize,
    pub r: f64,
    pub degree: usize,
    pub kfold: usize,
    pub subdivision: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NerveCloudReport {
    pub n: usize,
    /// Number of `(k, r, degree)` comparisons.
    pub checked: usize,
    pub mismatches: Vec<NerveMismatch>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NerveReport {
    pub config: NerveConfig,
    pub clouds: Vec<NerveCloudReport>,
    pub checked: usize,
    pub mismatches: usize,
    pub seconds: f64,
}

impl NerveReport {
    pub fn to_json(&self) -> serde_json::Value {
        let mut v = serde_json::to_value(self).expect("report serializes");
        v["schema"] = crate::io::SCHEMA.into();
        v
    }
}

/// Radii at which to compare: midpoints between consecutive distinct
/// critical radii, and one past the largest.
fn probe_radii(critical: &mut Vec<f64>) -> Vec<f64> {
    critical.sort_by(f64::total_cmp);
    critical.dedup();
    let mut out: Vec<f64> = critical.windows(2).map(|w| 0.5 * (w[0] + w[1])).filter(|&r| r > 0.0).collect();
    if let Some(&last) = critical.last() {
        out.push(last + 1.0);
    }
    out
}

/// Compares both sides on one cloud.
pub fn nerve_check_cloud(cloud: &PointCloud) -> Result<NerveCloudReport> {
    let n = cloud.total_multiplicity();
    let filtration = cech_filtration(cloud, n.saturating_sub(1))?;
    let (subdivision, _) = subdivision_bifiltration(&filtration, 2, false)?;
    let mut critical: Vec<f64> = filtration.iter().map(|(_, r)| *r).collect();
    let radii = probe_radii(&mut critical);
    let mut report = NerveCloudReport { n, checked: 0, mismatches: Vec::new() };
    for k in 1..=n {
        for &r in &radii {
            let (kfold, _) = kfold_cech_complex(cloud, k, r, 2)?;
            let slice = subdivision.slice(Bigrade::new(k as f64, r));
            for degree in 0..2 {
                let (a, b) = (homology_dim(&kfold, degree), homology_dim(&slice, degree));
                report.checked += 1;
                if a != b {
                    report.mismatches.push(NerveMismatch { k, r, degree, kfold: a, subdivision: b });
                }
            }
        }
    }
    Ok(report)
}

/// Runs the check on `clouds` seeded clouds in the unit square, with sizes
/// cycling through `n_min..=n_max`.
pub fn nerve_check(cfg: &NerveConfig) -> Result<NerveReport> {
    let start = Instant::now();
    let sizes: Vec<usize> = (cfg.n_min.max(1)..=cfg.n_max.max(cfg.n_min.max(1))).collect();
    let mut clouds = Vec::with_capacity(cfg.clouds);
    for c in 0..cfg.clouds {
        let n = sizes[c % sizes.len()];
        let points = sample_box(&mut stage_rng(cfg.seed, c as u64), n, 2, 0.0, 1.0);
        clouds.push(nerve_check_cloud(&PointCloud::new(points, Metric::L2)?)?);
    }
    Ok(NerveReport {
        config: cfg.clone(),
        checked: clouds.iter().map(|c| c.checked).sum(),
        mismatches: clouds.iter().map(|c| c.mismatches.len()).sum(),
        clouds,
        seconds: start.elapsed().as_secs_f64(),
    })
}
