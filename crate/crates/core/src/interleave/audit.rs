//! Stability audits: given two data sets, compute the interleaving the
//! stability theorems guarantee and check that no rank certificate
//! contradicts it.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::obstruction::{internal_maps_vanish, interleaving_obstruction_within, ObstructionCertificate, SweepLimits};
use super::shift::{compose, AffineShift};
use crate::complexes::degree::{degree_cech_bifiltration, DegreeRips};
use crate::complexes::grades::{Bigrade, GridSpec};
use crate::error::{Error, Result};
use crate::homology::Bifiltration;
use crate::measures::{nested_prohorov_bound, prohorov_flow, EmpiricalMeasure};
use crate::metric::{FiniteMetricSpace, PointCloud};

/// Ground spaces with more distinct points than this fall back to the
/// nested bound for δ.
pub const EXACT_PROHOROV_LIMIT: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AuditMode {
    /// `γ^δ` both ways, `δ > d_Pr`.
    Symmetric,
    /// `X ⊆ Y`: `κ^{|X|/|Y|}` from X to Y and `γ^δ` back.
    Nested,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Construction {
    /// Normalized degree-Rips, degrees 0 and 1.
    Rips,
    /// Normalized degree-Čech, built explicitly.
    Cech,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DeltaSource {
    Exact,
    NestedBound,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditConfig {
    pub construction: Construction,
    pub mode: AuditMode,
    pub degree: usize,
    /// Base points of the sweep.
    pub grid: GridSpec,
    /// Audit the grid-coarsened modules, composing the coarsening slack into
    /// the shifts. Otherwise the modules are evaluated exactly.
    pub coarsen: bool,
    /// `δ = δ₀ + margin`, and the coarsening shifts use `τ^margin` too.
    pub margin: f64,
    /// Values of `c` tried with `γ^{δ,c}` both ways.
    pub probe: Vec<f64>,
}

impl AuditConfig {
    pub fn new(construction: Construction, mode: AuditMode, degree: usize, grid: GridSpec) -> Self {
        AuditConfig {
            construction,
            mode,
            degree,
            grid,
            coarsen: false,
            margin: 1e-9,
            probe: (0..=8).map(|i| 1.0 + 0.25 * i as f64).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbePoint {
    pub c: f64,
    pub fired: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub construction: Construction,
    pub mode: AuditMode,
    pub degree: usize,
    pub delta0: f64,
    pub delta_source: DeltaSource,
    pub delta: f64,
    pub slack: f64,
    /// Shift from X to Y, slack included.
    pub gamma: AffineShift,
    /// Shift from Y to X, slack included.
    pub kappa: AffineShift,
    /// A certificate here contradicts the stability theorem.
    pub certificate: Option<ObstructionCertificate>,
    pub consistent: bool,
    /// Every internal map across the guaranteed shifts vanishes on the grid,
    /// so the guarantee says nothing about these modules.
    pub vacuous: bool,
    pub probe: Vec<ProbePoint>,
    pub smallest_firing_c: Option<f64>,
}

impl AuditReport {
    pub fn to_json(&self) -> serde_json::Value {
        let mut v = serde_json::to_value(self).expect("report serializes");
        v["schema"] = crate::io::SCHEMA.into();
        v
    }
}

fn row_key(p: &[f64]) -> Vec<u64> {
    p.iter().map(|x| if *x == 0.0 { 0 } else { x.to_bits() }).collect()
}

/// Distinct rows of both clouds and the uniform measures on them.
fn joint_measures(x: &PointCloud, y: &PointCloud) -> Result<(FiniteMetricSpace, EmpiricalMeasure, EmpiricalMeasure)> {
    let mut index: HashMap<Vec<u64>, usize> = HashMap::new();
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut atoms = |cloud: &PointCloud| -> (Vec<usize>, Vec<f64>) {
        let total = cloud.total_multiplicity() as f64;
        (0..cloud.len())
            .map(|i| {
                let p = cloud.point(i);
                let id = *index.entry(row_key(p)).or_insert_with(|| {
                    rows.push(p.to_vec());
                    rows.len() - 1
                });
                (id, cloud.multiplicities()[i] as f64 / total)
            })
            .unzip()
    };
    let (ax, wx) = atoms(x);
    let (ay, wy) = atoms(y);
    let ground = PointCloud::new(rows, x.metric())?;
    Ok((ground.row_distances(), EmpiricalMeasure::new(ax, wx)?, EmpiricalMeasure::new(ay, wy)?))
}

/// Whether every row of `x`, with its multiplicity, occurs in `y`.
fn is_submultiset(x: &PointCloud, y: &PointCloud) -> bool {
    let mut avail: HashMap<Vec<u64>, usize> = HashMap::new();
    for i in 0..y.len() {
        *avail.entry(row_key(y.point(i))).or_default() += y.multiplicities()[i];
    }
    (0..x.len()).all(|i| {
        let slot = avail.entry(row_key(x.point(i))).or_default();
        match slot.checked_sub(x.multiplicities()[i]) {
            Some(rest) => {
                *slot = rest;
                true
            }
            None => false,
        }
    })
}

/// Smallest `k` and largest `r` over all grades.
fn extent<'a>(grades: impl Iterator<Item = &'a Bigrade>) -> (f64, f64) {
    grades.fold((f64::INFINITY, 0.0), |(k, r), g| (k.min(g.k), r.max(g.r)))
}

/// The module of `cloud` and the region where it can be trusted: coarsening
/// clamps grades below the last `k` line onto it and drops grades past the
/// last `r` line.
fn build(cloud: &PointCloud, cfg: &AuditConfig) -> Result<(Box<dyn Bifiltration>, SweepLimits)> {
    let grid = &cfg.grid;
    let limits = |(k_lo, r_hi): (f64, f64)| {
        let k_min = *grid.k().last().unwrap();
        let r_max = *grid.r().last().unwrap();
        SweepLimits {
            k_floor: (cfg.coarsen && k_lo < k_min).then_some(k_min),
            r_max: (cfg.coarsen && r_hi > r_max).then_some(r_max),
        }
    };
    match cfg.construction {
        Construction::Rips => {
            let dr = DegreeRips::from_cloud(cloud)?;
            let n = dr.len();
            let radii = (0..n).flat_map(|u| (0..n).map(move |v| (u, v))).map(|(u, v)| dr.edge_radius(u, v));
            let (k_lo, r_hi) = extent((0..n).flat_map(|v| dr.vertex_grades(v)));
            let lim = limits((k_lo, radii.fold(r_hi, f64::max)));
            Ok((if cfg.coarsen { Box::new(dr.coarsen(grid)) } else { Box::new(dr) }, lim))
        }
        Construction::Cech => {
            let maxdim = cfg.degree + 1;
            let sampled = if cfg.coarsen { Some(grid) } else { None };
            let bif = degree_cech_bifiltration(cloud, maxdim, sampled)?;
            let lim = limits(extent((0..bif.len()).flat_map(|i| bif.grades(i))));
            Ok((if cfg.coarsen { Box::new(bif.coarsen(grid)) } else { Box::new(bif) }, lim))
        }
    }
}

fn merge(a: SweepLimits, b: SweepLimits) -> SweepLimits {
    let max = |x: Option<f64>, y: Option<f64>| x.into_iter().chain(y).reduce(f64::max);
    let min = |x: Option<f64>, y: Option<f64>| x.into_iter().chain(y).reduce(f64::min);
    SweepLimits { k_floor: max(a.k_floor, b.k_floor), r_max: min(a.r_max, b.r_max) }
}

/// Audits the interleaving between the modules of `x` and `y` guaranteed
/// by the stability theorems.
///
/// δ₀ is the exact Prohorov distance of the uniform measures when the
/// joint support is small enough, and the nested bound `|Y \ X|/|X|`
/// otherwise (nested mode only). In coarsened audits each guaranteed shift
/// `s` becomes `τ^{slack+margin} ∘ s ∘ τ^{margin}`, and base points whose
/// shifted points reach a region distorted by clamping or truncation are
/// skipped.
pub fn stability_audit(x: &PointCloud, y: &PointCloud, cfg: &AuditConfig) -> Result<AuditReport> {
    if x.is_empty() || y.is_empty() {
        return Err(Error::EmptyInput);
    }
    if x.metric() != y.metric() || x.dim() != y.dim() {
        return Err(Error::InvalidInput("clouds must share a metric and an ambient dimension".into()));
    }
    if !(cfg.margin > 0.0 && cfg.margin.is_finite()) {
        return Err(Error::InvalidInput("margin must be positive".into()));
    }
    if cfg.mode == AuditMode::Nested && !is_submultiset(x, y) {
        return Err(Error::NotASubcomplex);
    }
    let (ground, mu_x, mu_y) = joint_measures(x, y)?;
    let (delta0, delta_source) = if ground.len() <= EXACT_PROHOROV_LIMIT {
        (prohorov_flow(&ground, &mu_x, &mu_y, 1e-12)?, DeltaSource::Exact)
    } else if cfg.mode == AuditMode::Nested {
        (nested_prohorov_bound(x.total_multiplicity(), y.total_multiplicity()), DeltaSource::NestedBound)
    } else {
        return Err(Error::GuardExceeded(format!(
            "{} distinct points exceed the exact Prohorov limit {EXACT_PROHOROV_LIMIT}; symmetric audits need the exact value",
            ground.len()
        )));
    };
    let delta = delta0 + cfg.margin;
    let slack = if cfg.coarsen { cfg.grid.slack() } else { 0.0 };
    let pad = |s: AffineShift| -> Result<AffineShift> {
        if !cfg.coarsen {
            return Ok(s);
        }
        Ok(compose(compose(AffineShift::tau(cfg.margin)?, s), AffineShift::tau(slack + cfg.margin)?))
    };
    let (gamma, kappa) = match cfg.mode {
        AuditMode::Symmetric => (AffineShift::gamma(delta, 3.0)?, AffineShift::gamma(delta, 3.0)?),
        AuditMode::Nested => (
            AffineShift::kappa(x.total_multiplicity() as f64 / y.total_multiplicity() as f64)?,
            AffineShift::gamma(delta, 3.0)?,
        ),
    };
    let (gamma, kappa) = (pad(gamma)?, pad(kappa)?);

    let ((mx, lx), (my, ly)) = (build(x, cfg)?, build(y, cfg)?);
    let (mx, my, limits) = (mx.as_ref(), my.as_ref(), merge(lx, ly));
    let i = cfg.degree;
    let certificate = interleaving_obstruction_within(mx, my, i, &gamma, &kappa, &cfg.grid, limits)?;
    let vacuous = internal_maps_vanish(mx, my, i, &gamma, &kappa, &cfg.grid, limits)?;
    let mut probe = Vec::with_capacity(cfg.probe.len());
    for &c in &cfg.probe {
        let s = pad(AffineShift::gamma(delta, c)?)?;
        let fired = interleaving_obstruction_within(mx, my, i, &s, &s, &cfg.grid, limits)?.is_some();
        probe.push(ProbePoint { c, fired });
    }
    let smallest_firing_c = probe.iter().filter(|p| p.fired).map(|p| p.c).fold(None, |acc: Option<f64>, c| {
        Some(acc.map_or(c, |a| a.min(c)))
    });
    Ok(AuditReport {
        construction: cfg.construction,
        mode: cfg.mode,
        degree: i,
        delta0,
        delta_source,
        delta,
        slack,
        gamma,
        kappa,
        consistent: certificate.is_none(),
        certificate,
        vacuous,
        probe,
        smallest_firing_c,
    })
}
