//! The annulus study: a clean annulus sample `X`, the same sample with
//! interior noise `Y ⊇ X`, and a disc sample `Z`, compared through the H1
//! modules of their closed degree-Rips bifiltrations on a grid.
//!
//! Beyond the three invariants (Hilbert function, bigraded Betti numbers,
//! fibered barcodes) the study uses the nested interleaving between `X` and
//! `Y` to predict part of the support of `Y`'s module from `X`'s alone:
//! wherever `X`'s internal map `a → γ'ζ(a)` is nonzero it factors through
//! `Y` at `ζ(a)`, so `Y`'s Hilbert function must be positive there.

use std::collections::VecDeque;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::complexes::{Bigrade, DegreeRips, GridSpec, RConvention};
use crate::error::Result;
use crate::homology::{Barcode, BettiTable, Bifiltration, GridModule, Line};
use crate::interleave::{compose, stability_audit, AffineShift, AuditConfig, AuditMode, AuditReport, Construction, SweepLimits};
use crate::measures::{nested_prohorov_bound, prohorov_flow, EmpiricalMeasure};
use crate::metric::{Metric, PointCloud};
use crate::rng::{sample_annulus, sample_disc, stage_rng};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AppendixAConfig {
    pub seed: u64,
    pub n_annulus: usize,
    pub n_noise: usize,
    pub n_disc: usize,
    pub inner: f64,
    pub outer: f64,
    /// Noise is drawn from the disc of this radius.
    pub noise_radius: f64,
    /// Lines per axis of the Hilbert grid.
    pub grid_lines: usize,
    pub r_max: f64,
    /// Betti numbers and audits use every `coarse_step`-th grid line.
    pub coarse_step: usize,
    /// Fibered barcode lines as `(angle in degrees, offset)`.
    pub lines: Vec<(f64, f64)>,
    pub audits: bool,
    /// The corner block `k ≤ corner.0, r ≤ corner.1` excluded when measuring
    /// how much of `Z`'s module lies away from the origin.
    pub corner: (f64, f64),
    /// Added to every shift parameter so strict inequalities hold.
    pub margin: f64,
}

impl Default for AppendixAConfig {
    fn default() -> Self {
        AppendixAConfig {
            seed: 0,
            n_annulus: 475,
            n_noise: 25,
            n_disc: 500,
            inner: 0.4,
            outer: 0.5,
            noise_radius: 0.4,
            grid_lines: 100,
            r_max: 0.5,
            coarse_step: 5,
            lines: vec![(72.0, 0.135)],
            audits: true,
            corner: (0.1, 0.1),
            margin: 1e-9,
        }
    }
}

/// The clouds `X`, `Y = X ∪ noise` and `Z`, each from its own RNG stage.
pub fn appendix_a_clouds(cfg: &AppendixAConfig) -> Result<(PointCloud, PointCloud, PointCloud)> {
    let x = sample_annulus(&mut stage_rng(cfg.seed, 0), cfg.n_annulus, cfg.inner, cfg.outer);
    let noise = sample_disc(&mut stage_rng(cfg.seed, 1), cfg.n_noise, cfg.noise_radius);
    let z = sample_disc(&mut stage_rng(cfg.seed, 2), cfg.n_disc, cfg.outer);
    let y: Vec<Vec<f64>> = x.iter().chain(&noise).cloned().collect();
    Ok((PointCloud::new(x, Metric::L2)?, PointCloud::new(y, Metric::L2)?, PointCloud::new(z, Metric::L2)?))
}

/// The closed degree-Rips bifiltration of `cloud`, rounded onto `grid`.
pub fn closed_degree_rips(cloud: &PointCloud, grid: &GridSpec) -> Result<DegreeRips> {
    Ok(DegreeRips::from_cloud(cloud)?.with_convention(RConvention::Closed).coarsen(grid))
}

/// Cells of the largest 4-connected region where `module` equals `value`,
/// as `(k index, r index)`.
pub fn largest_region(module: &GridModule, value: usize) -> Vec<(usize, usize)> {
    let (nk, nr) = (module.grid.nk(), module.grid.nr());
    let mut seen = vec![vec![false; nr]; nk];
    let mut best: Vec<(usize, usize)> = Vec::new();
    for i in 0..nk {
        for j in 0..nr {
            if seen[i][j] || module.get(i, j) != value {
                continue;
            }
            let mut region = Vec::new();
            let mut queue = VecDeque::from([(i, j)]);
            seen[i][j] = true;
            while let Some((a, b)) = queue.pop_front() {
                region.push((a, b));
                let nbrs = [(a.wrapping_sub(1), b), (a + 1, b), (a, b.wrapping_sub(1)), (a, b + 1)];
                for (p, q) in nbrs {
                    if p < nk && q < nr && !seen[p][q] && module.get(p, q) == value {
                        seen[p][q] = true;
                        queue.push_back((p, q));
                    }
                }
            }
            if region.len() > best.len() {
                best = region;
            }
        }
    }
    best.sort_unstable();
    best
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionSummary {
    pub cells: usize,
    pub fraction: f64,
    /// Whether the region reaches the smallest-`k` row of the grid.
    pub reaches_k_min: bool,
    /// Largest grid radius in the region.
    pub r_top: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LineBarcodes {
    pub angle: f64,
    pub offset: f64,
    pub x: Barcode,
    pub y: Barcode,
    pub z: Barcode,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AppendixAReport {
    pub config: AppendixAConfig,
    /// Exact Prohorov distance of the uniform measures on `X` and `Y`.
    pub d_pr: f64,
    /// `|Y \ X| / |X|`.
    pub nested_bound: f64,
    pub hilbert: [GridModule; 3],
    pub betti: [BettiTable; 3],
    pub barcodes: Vec<LineBarcodes>,
    pub delta: RegionSummary,
    pub zeta: AffineShift,
    pub gamma: AffineShift,
    /// Cells `a` of the region with a nonzero map `a → γ'ζ(a)` in `X`.
    pub omega: Vec<Bigrade>,
    pub zeta_omega: Vec<Bigrade>,
    /// Points of `ζ(Ω)` where `Y`'s module vanishes; empty when the
    /// prediction holds.
    pub zeta_omega_misses: Vec<Bigrade>,
    pub nested_audit: Option<AuditReport>,
    pub symmetric_audit: Option<AuditReport>,
    /// Fraction of grid cells outside the corner block where `Z` has
    /// `dim ≥ 1`.
    pub z_outside_corner: f64,
    pub seconds: f64,
}

impl AppendixAReport {
    pub fn zeta_omega_contained(&self) -> bool {
        self.zeta_omega_misses.is_empty()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let names = ["x", "y", "z"];
        let hilbert: serde_json::Map<_, _> =
            names.iter().zip(&self.hilbert).map(|(n, m)| (n.to_string(), m.to_json())).collect();
        let betti: serde_json::Map<_, _> =
            names.iter().zip(&self.betti).map(|(n, b)| (n.to_string(), b.to_json())).collect();
        json!({
            "schema": crate::io::SCHEMA,
            "config": self.config,
            "d_pr": self.d_pr,
            "nested_bound": self.nested_bound,
            "hilbert": hilbert,
            "betti": betti,
            "barcodes": self.barcodes.iter().map(|l| json!({
                "angle": l.angle,
                "offset": l.offset,
                "x": l.x.to_json(),
                "y": l.y.to_json(),
                "z": l.z.to_json(),
            })).collect::<Vec<_>>(),
            "delta": self.delta,
            "zeta": self.zeta,
            "gamma": self.gamma,
            "omega": self.omega,
            "zeta_omega": self.zeta_omega,
            "zeta_omega_misses": self.zeta_omega_misses,
            "zeta_omega_contained": self.zeta_omega_contained(),
            "nested_audit": self.nested_audit.as_ref().map(|a| a.to_json()),
            "symmetric_audit": self.symmetric_audit.as_ref().map(|a| a.to_json()),
            "z_outside_corner": self.z_outside_corner,
            "seconds": self.seconds,
        })
    }
}

fn uniform_prohorov(x: &PointCloud, y: &PointCloud) -> Result<f64> {
    // Y lists X first, so the ground space is Y and X's atoms are a prefix
    let space = y.row_distances();
    let mu = EmpiricalMeasure::uniform((0..x.len()).collect())?;
    let eta = EmpiricalMeasure::uniform((0..y.len()).collect())?;
    prohorov_flow(&space, &mu, &eta, 1e-12)
}

pub fn appendix_a(cfg: &AppendixAConfig) -> Result<AppendixAReport> {
    let start = Instant::now();
    let (x, y, z) = appendix_a_clouds(cfg)?;
    let grid = GridSpec::uniform(1.0, cfg.r_max, cfg.grid_lines, cfg.grid_lines)?;
    let coarse = grid.subgrid(cfg.coarse_step)?;
    let bifs = [closed_degree_rips(&x, &grid)?, closed_degree_rips(&y, &grid)?, closed_degree_rips(&z, &grid)?];

    let hilbert = [bifs[0].hilbert(1, &grid)?, bifs[1].hilbert(1, &grid)?, bifs[2].hilbert(1, &grid)?];
    let betti = [bifs[0].betti(1, &coarse)?, bifs[1].betti(1, &coarse)?, bifs[2].betti(1, &coarse)?];
    let mut barcodes = Vec::new();
    for &(angle, offset) in &cfg.lines {
        let line = Line::from_angle_offset(angle, offset)?;
        barcodes.push(LineBarcodes {
            angle,
            offset,
            x: bifs[0].fibered_barcode(&line, 1)?,
            y: bifs[1].fibered_barcode(&line, 1)?,
            z: bifs[2].fibered_barcode(&line, 1)?,
        });
    }

    let d_pr = uniform_prohorov(&x, &y)?;
    let nested_bound = nested_prohorov_bound(x.len(), y.len());

    let region = largest_region(&hilbert[0], 1);
    let k_min_row = grid.nk() - 1;
    let delta = RegionSummary {
        cells: region.len(),
        fraction: region.len() as f64 / grid.len() as f64,
        reaches_k_min: region.iter().any(|&(i, _)| i == k_min_row),
        r_top: region.iter().map(|&(_, j)| grid.r()[j]).fold(0.0, f64::max),
    };

    // ζ' = τ^{s+m} ∘ κ ∘ τ^m and γ' = τ^{s+m} ∘ γ^{δ,3} ∘ τ^m
    let (m, s) = (cfg.margin, grid.slack());
    let pad = |t: AffineShift| -> Result<AffineShift> {
        Ok(compose(compose(AffineShift::tau(m)?, t), AffineShift::tau(s + m)?))
    };
    let zeta = pad(AffineShift::kappa(x.len() as f64 / y.len() as f64)?)?;
    let gamma = pad(AffineShift::gamma(d_pr + m, 3.0)?)?;
    // rows below the last k line are clamped onto it
    let limits = SweepLimits { k_floor: grid.k().last().copied(), r_max: None };
    let mut omega = Vec::new();
    for &(i, j) in &region {
        let a = grid.point(i, j);
        let mid = zeta.apply(a);
        let top = gamma.apply(mid);
        if [a, mid, top].iter().all(|&p| limits.admits(p)) && bifs[0].rank(a, top, 1)? >= 1 {
            omega.push(a);
        }
    }
    let zeta_omega: Vec<Bigrade> = omega.iter().map(|&a| zeta.apply(a)).collect();
    let mut zeta_omega_misses = Vec::new();
    for &p in &zeta_omega {
        if bifs[1].dim_at(p, 1)? == 0 {
            zeta_omega_misses.push(p);
        }
    }

    let (nested_audit, symmetric_audit) = if cfg.audits {
        let audit = |mode| {
            let mut a = AuditConfig::new(Construction::Rips, mode, 1, coarse.clone());
            a.coarsen = true;
            a.margin = cfg.margin;
            stability_audit(&x, &y, &a)
        };
        (Some(audit(AuditMode::Nested)?), Some(audit(AuditMode::Symmetric)?))
    } else {
        (None, None)
    };

    let (ck, cr) = cfg.corner;
    let outside = grid
        .points()
        .filter(|&(i, j, p)| !(p.k <= ck && p.r <= cr) && hilbert[2].get(i, j) >= 1)
        .count();

    Ok(AppendixAReport {
        config: cfg.clone(),
        d_pr,
        nested_bound,
        hilbert,
        betti,
        barcodes,
        delta,
        zeta,
        gamma,
        omega,
        zeta_omega,
        zeta_omega_misses,
        nested_audit,
        symmetric_audit,
        z_outside_corner: outside as f64 / grid.len() as f64,
        seconds: start.elapsed().as_secs_f64(),
    })
}
