//! Constructions showing that the constant `c` in `γ^{δ,c}` cannot be
//! lowered: pairs of point sets at Prohorov distance below `δ` whose
//! degree-Rips modules admit a rank certificate against `γ^{δ,c}`.
//!
//! Both constructions live in L1 spaces. Parameter windows are derived
//! below and checked before anything is built.
//!
//! Warmup in R^3, `Y = {r·e_i}`, `Z = Y ∪ {0}`, base `a = (3/4, r/2 + ε)`:
//! - `Z_a` is the vertex 0 alone, since 0 has normalized degree 1 and each
//!   `r·e_i` has `2/4 < 3/4`;
//! - `Y_{γa}` is empty when `1/3 < 3/4 − δ` and `c(r/2 + ε) + δ ≤ r`;
//! - `γγa` stays in J when `δ < 3/8`.
//! With `d_Pr(ν_Y, ν_Z) = 1/4 < δ` this gives `δ ∈ (1/4, 3/8)`,
//! `r(1 − c/2) > δ` (so `c < 2`) and `0 < ε ≤ (r(1 − c/2) − δ)/c`.
//!
//! Main construction in R^{2+3m}: a square loop `Ŝ` of `m` points with
//! spacing `r`, and at each `ŝ_i` a block `Y_i` of three points at distance
//! `r` from `ŝ_i` (pairwise `2r`), each with `C` copies. `W = ∪ Y_i`,
//! `X = W ∪ Ŝ`, `|X| = m(3C + 1)`. At the base `a = (1/m, r/2 + ε)` the slice
//! of X is the `m`-cycle on `Ŝ` (`ŝ_i` has closed degree `3C + 3`, a block
//! point `C + 1`, and `1/m = (3C + 1)/|X|` sits between them).
//! - `W_{γa}` has no 1-cycles while `c(r/2 + ε) + δ ≤ 3r/2`: below that
//!   scale `W` is a disjoint union of block simplices. Equivalently
//!   `ε ≤ (r(3 − c) − 2δ)/(2c)`.
//! - `γγa = (1/m − 2δ, c²(r/2 + ε) + (c + 1)δ)` must stay in J, so
//!   `δ < 1/(2m)`; with `d_Pr(ν_W, ν_X) = 1/(3C + 1)` the δ window is
//!   nonempty only when `3C + 1 > 2m`.
//! - The loop must survive to `γγa`. The scale `t*` where it dies is
//!   computed, which caps `c` by `c²(r/2 + ε) + (c + 1)δ ≤ t*`. In L1 the
//!   loop's opposite sides are only `(m/4)·r` apart, so at small `m` this cap
//!   sits well below 3.

use serde::{Deserialize, Serialize};

use super::obstruction::{interleaving_obstruction, obstruction_at, ObstructionCertificate, Side, SweepLimits};
use super::shift::AffineShift;
use crate::complexes::degree::DegreeRips;
use crate::complexes::grades::{Bigrade, GridSpec};
use crate::complexes::rips::EXPLICIT_SIMPLEX_GUARD;
use crate::error::{Error, Result};
use crate::homology::Bifiltration;
use crate::measures::{cloud_measure, prohorov_flow, EmpiricalMeasure};
use crate::metric::{Metric, PointCloud};

fn out_of_window(msg: String) -> Error {
    Error::ParameterOutOfWindow(msg)
}

fn positive(name: &str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("{name} must be positive and finite, got {x}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WarmupReport {
    pub c: f64,
    pub r0: f64,
    pub delta: f64,
    pub eps: f64,
    pub d_pr: f64,
    pub base: Bigrade,
    pub certificate: Option<ObstructionCertificate>,
}

/// `Y = {r·e_1, r·e_2, r·e_3}` and `Z = Y ∪ {0}` in L1 R^3.
pub fn warmup_clouds(r0: f64) -> Result<(PointCloud, PointCloud)> {
    positive("r0", r0)?;
    let y: Vec<Vec<f64>> = (0..3)
        .map(|i| {
            let mut p = vec![0.0; 3];
            p[i] = r0;
            p
        })
        .collect();
    let mut z = y.clone();
    z.push(vec![0.0; 3]);
    Ok((PointCloud::new(y, Metric::L1)?, PointCloud::new(z, Metric::L1)?))
}

/// Exact `d_Pr` between the uniform measures of a cloud and a sub-cloud
/// whose rows are rows `sub_rows` of `full`, with multiplicities `sub_mult`.
fn nested_prohorov(full: &PointCloud, sub_rows: &[usize], sub_mult: &[usize]) -> Result<f64> {
    let space = full.row_distances();
    let total: usize = sub_mult.iter().sum();
    let sub = EmpiricalMeasure::new(sub_rows.to_vec(), sub_mult.iter().map(|&m| m as f64 / total as f64).collect())?;
    prohorov_flow(&space, &cloud_measure(full), &sub, 1e-12)
}

/// The warmup certificate for `c ∈ [1, 2)`.
///
/// Defaults: `δ = 0.3`, `r0 = 2δ/(1 − c/2)`, `ε` half its upper bound.
pub fn tightness_warmup(c: f64, r0: Option<f64>, delta: Option<f64>, eps: Option<f64>) -> Result<WarmupReport> {
    if !(1.0..2.0).contains(&c) {
        return Err(out_of_window(format!("the warmup needs c in [1, 2), got {c}")));
    }
    let delta = delta.unwrap_or(0.3);
    if !(delta > 0.25 && delta < 0.375) {
        return Err(out_of_window(format!("delta must lie in (1/4, 3/8), got {delta}")));
    }
    let r0 = r0.unwrap_or(2.0 * delta / (1.0 - c / 2.0));
    positive("r0", r0)?;
    let eps_max = (r0 * (1.0 - c / 2.0) - delta) / c;
    if !(eps_max > 0.0) {
        return Err(out_of_window(format!(
            "empty eps window: need r0·(1 − c/2) > delta, i.e. r0 > {}",
            delta / (1.0 - c / 2.0)
        )));
    }
    let eps = eps.unwrap_or(eps_max / 2.0);
    if !(eps > 0.0 && eps <= eps_max && eps < r0 / 2.0) {
        return Err(out_of_window(format!("eps must lie in (0, {}], got {eps}", eps_max.min(r0 / 2.0))));
    }
    let (y, z) = warmup_clouds(r0)?;
    let d_pr = nested_prohorov(&z, &[0, 1, 2], &[1, 1, 1])?;
    let (my, mz) = (DegreeRips::from_cloud(&y)?, DegreeRips::from_cloud(&z)?);
    let shift = AffineShift::gamma(delta, c)?;
    let base = Bigrade::new(0.75, r0 / 2.0 + eps);
    let grid = GridSpec::new(vec![0.75, 0.5], vec![base.r, r0])?;
    let certificate = interleaving_obstruction(&mz, &my, 0, &shift, &shift, &grid)?;
    Ok(WarmupReport { c, r0, delta, eps, d_pr, base, certificate })
}

/// Points of a square loop with `m` vertices and unit spacing, in order.
fn square_loop(m: usize) -> Vec<[f64; 2]> {
    let side = (m / 4) as f64;
    let mut out = Vec::with_capacity(m);
    let l = m / 4;
    for t in 0..l {
        out.push([t as f64, 0.0]);
    }
    for t in 0..l {
        out.push([side, t as f64]);
    }
    for t in 0..l {
        out.push([side - t as f64, side]);
    }
    for t in 0..l {
        out.push([0.0, side - t as f64]);
    }
    out
}

/// `(W, X)` of the main construction. Rows `0..m` of X are the loop, row
/// `m + 3i + j` is point `j` of block `i`; W holds the block rows in the
/// same order.
pub fn main_clouds(m: usize, copies: usize, r: f64) -> Result<(PointCloud, PointCloud)> {
    if m < 12 || m % 4 != 0 {
        return Err(out_of_window(format!("m must be a multiple of 4 and at least 12, got {m}")));
    }
    if copies < 2 {
        return Err(out_of_window(format!("copies must be at least 2, got {copies}")));
    }
    positive("r", r)?;
    let dim = 2 + 3 * m;
    let square = square_loop(m);
    let hat = |i: usize| {
        let mut p = vec![0.0; dim];
        p[0] = r * square[i][0];
        p[1] = r * square[i][1];
        p
    };
    let mut blocks = Vec::with_capacity(3 * m);
    for i in 0..m {
        for j in 0..3 {
            let mut p = hat(i);
            p[2 + 3 * i + j] = r;
            blocks.push(p);
        }
    }
    let w = PointCloud::with_multiplicities(blocks.clone(), vec![copies; 3 * m], Metric::L1)?;
    let mut rows: Vec<Vec<f64>> = (0..m).map(hat).collect();
    rows.extend(blocks);
    let mut mult = vec![1; m];
    mult.extend(vec![copies; 3 * m]);
    let x = PointCloud::with_multiplicities(rows, mult, Metric::L1)?;
    Ok((w, x))
}

/// Simplices of the degree-Rips slice of X at the double shift, counted on
/// the multiset: every block with all its copies, up to triangles.
fn estimated_slice_size(m: usize, copies: usize) -> f64 {
    let b = 3.0 * copies as f64;
    m as f64 * (b + b * (b - 1.0) / 2.0 + b * (b - 1.0) * (b - 2.0) / 6.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MainWindow {
    pub d_pr: f64,
    /// Upper end of the δ window, `1/(2m)`, capped by `r(3 − c)/2`.
    pub delta_max: f64,
    /// Scale at which the loop dies after the double shift in k.
    pub loop_death: f64,
    /// Largest `c` allowed by the W condition.
    pub c_w: f64,
    /// Largest `c` allowed by the loop's survival.
    pub c_q: f64,
    pub c_cap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MainReport {
    pub m: usize,
    pub copies: usize,
    pub c: f64,
    pub r0: f64,
    pub delta: f64,
    pub eps: f64,
    pub window: MainWindow,
    pub base: Bigrade,
    pub base_h0: usize,
    pub base_h1: usize,
    /// `dim H_1(W)` at the once-shifted point.
    pub mid_h1: usize,
    /// Rank of `H_1(X_a) → H_1(X_{γγa})`.
    pub loop_rank: usize,
    pub certificate: Option<ObstructionCertificate>,
}

/// Sup of the `t` with `rank(H_1(X_base) → H_1(X_{(k, t)})) ≥ 1`, over the
/// edge radii of X. Infinite when the class never dies.
fn loop_death(x: &DegreeRips, base: Bigrade, k: f64) -> Result<f64> {
    let n = x.len();
    let mut radii: Vec<f64> = (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .map(|(u, v)| x.edge_radius(u, v))
        .filter(|&r| r >= base.r)
        .collect();
    radii.push(base.r);
    radii.sort_by(f64::total_cmp);
    radii.dedup();
    // rank just past candidate j, i.e. on (radii[j], radii[j+1])
    let past = |j: usize| -> Result<usize> {
        let t = match radii.get(j + 1) {
            Some(&next) => (radii[j] + next) / 2.0,
            None => radii[j] + 1.0,
        };
        x.rank(base, Bigrade::new(k, t), 1)
    };
    if past(radii.len() - 1)? > 0 {
        return Ok(f64::INFINITY);
    }
    // smallest j with rank zero past radii[j]
    let (mut lo, mut hi) = (0, radii.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if past(mid)? == 0 {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Ok(radii[lo])
}

/// The main certificate. Defaults: `r0 = 1`, `ε = r0/100`, δ the midpoint
/// of its window.
pub fn tightness_main(
    m: usize,
    copies: usize,
    c: f64,
    r0: Option<f64>,
    delta: Option<f64>,
    eps: Option<f64>,
) -> Result<MainReport> {
    if !(1.0..3.0).contains(&c) {
        return Err(out_of_window(format!("c must lie in [1, 3), got {c}")));
    }
    let size = estimated_slice_size(m, copies);
    if size > EXPLICIT_SIMPLEX_GUARD as f64 {
        return Err(Error::GuardExceeded(format!(
            "m = {m} with {copies} copies gives about {size:.3e} simplices in the shifted slice (limit \
             {EXPLICIT_SIMPLEX_GUARD}); the desk-scale construction uses m = 12 with 8 to 10 copies"
        )));
    }
    let r0 = r0.unwrap_or(1.0);
    let (w, x) = main_clouds(m, copies, r0)?;
    let block_rows: Vec<usize> = (m..4 * m).collect();
    let d_pr = nested_prohorov(&x, &block_rows, &vec![copies; 3 * m])?;
    let k0 = 1.0 / m as f64;
    let delta_max = (k0 / 2.0).min(r0 * (3.0 - c) / 2.0);
    if !(d_pr < delta_max) {
        return Err(out_of_window(format!(
            "empty delta window ({d_pr}, {delta_max}): the double shift leaves J unless 3·copies + 1 > 2m; \
             m = {m} needs copies >= {}",
            (2 * m - 1) / 3 + 1
        )));
    }
    let delta = delta.unwrap_or((d_pr + delta_max) / 2.0);
    if !(delta > d_pr && delta < delta_max) {
        return Err(out_of_window(format!("delta must lie in ({d_pr}, {delta_max}), got {delta}")));
    }
    let eps_max = (r0 / 2.0).min((r0 * (3.0 - c) - 2.0 * delta) / (2.0 * c));
    let eps = eps.unwrap_or((r0 / 100.0).min(eps_max));
    if !(eps > 0.0 && eps <= eps_max && eps < r0 / 2.0) {
        return Err(out_of_window(format!("eps must lie in (0, {eps_max}], got {eps}")));
    }
    let s = r0 / 2.0 + eps;
    let base = Bigrade::new(k0, s);
    let (dw, dx) = (DegreeRips::from_cloud(&w)?, DegreeRips::from_cloud(&x)?);

    let death = loop_death(&dx, base, k0 - 2.0 * delta)?;
    let c_w = (1.5 * r0 - delta) / s;
    let c_q = if death.is_finite() {
        (-delta + (delta * delta + 4.0 * s * (death - delta)).sqrt()) / (2.0 * s)
    } else {
        f64::INFINITY
    };
    let window = MainWindow { d_pr, delta_max, loop_death: death, c_w, c_q, c_cap: c_w.min(c_q).min(3.0) };
    if c > window.c_cap {
        return Err(out_of_window(format!(
            "c = {c} exceeds the cap {:.4} for m = {m}, copies = {copies}, r0 = {r0}, delta = {delta}, eps = {eps}",
            window.c_cap
        )));
    }

    let shift = AffineShift::gamma(delta, c)?;
    let mid = shift.apply(base);
    let top = shift.apply(mid);
    let report = MainReport {
        m,
        copies,
        c,
        r0,
        delta,
        eps,
        base,
        base_h0: dx.dim_at(base, 0)?,
        base_h1: dx.dim_at(base, 1)?,
        mid_h1: dw.dim_at(mid, 1)?,
        loop_rank: dx.rank(base, top, 1)?,
        certificate: obstruction_at(&dx, &dw, 1, &shift, &shift, base, Side::M, SweepLimits::default())?,
        window,
    };
    Ok(report)
}
