//! Rank certificates that no interleaving exists.
//!
//! In a `(γ, κ)` interleaving of `M` and `N`, the internal map
//! `M_a → M_{κγa}` factors through `N_{γa}`, so its rank is at most
//! `dim N_{γa}`. A base point where the rank is larger certifies that no such
//! interleaving exists. The same holds with the roles of `M` and `N` swapped.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::shift::AffineShift;
use crate::complexes::grades::{Bigrade, GridSpec};
use crate::error::Result;
use crate::homology::Bifiltration;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    M,
    N,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObstructionCertificate {
    pub base: Bigrade,
    pub gamma: AffineShift,
    pub kappa: AffineShift,
    pub degree: usize,
    /// Rank of the internal map at `base`.
    pub rank: usize,
    /// Dimension of the other module at the intermediate point.
    pub bound: usize,
    pub side: Side,
}

impl ObstructionCertificate {
    pub fn to_json(&self) -> serde_json::Value {
        let mut v = serde_json::to_value(self).expect("certificate serializes");
        v["schema"] = crate::io::SCHEMA.into();
        v
    }

    /// Intermediate and final points of the factorization.
    pub fn path(&self) -> (Bigrade, Bigrade) {
        let (first, second) = match self.side {
            Side::M => (self.gamma, self.kappa),
            Side::N => (self.kappa, self.gamma),
        };
        let mid = first.apply(self.base);
        (mid, second.apply(mid))
    }
}

/// The region where the modules are trusted. A base point is skipped when
/// it or one of its shifted points falls outside.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SweepLimits {
    /// Points need `k` strictly above this value.
    pub k_floor: Option<f64>,
    /// Points need `r` at most this value.
    pub r_max: Option<f64>,
}

impl SweepLimits {
    pub fn admits(&self, p: Bigrade) -> bool {
        p.in_j() && self.k_floor.map_or(true, |k| p.k > k) && self.r_max.map_or(true, |r| p.r <= r)
    }
}

/// The certificate at one base point and side, if there is one.
///
/// Base points whose shifted points leave J (`k ≤ 0`) or `limits` yield
/// `None`. Ranks are only computed when `dim` at the base already exceeds the
/// bound.
#[allow(clippy::too_many_arguments)]
pub fn obstruction_at<M, N>(
    m: &M,
    n: &N,
    i: usize,
    gamma: &AffineShift,
    kappa: &AffineShift,
    base: Bigrade,
    side: Side,
    limits: SweepLimits,
) -> Result<Option<ObstructionCertificate>>
where
    M: Bifiltration + ?Sized,
    N: Bifiltration + ?Sized,
{
    let (first, second) = match side {
        Side::M => (gamma, kappa),
        Side::N => (kappa, gamma),
    };
    let mid = first.apply(base);
    let top = second.apply(mid);
    if ![base, mid, top].iter().all(|&p| limits.admits(p)) {
        return Ok(None);
    }
    let (bound, dim) = match side {
        Side::M => (n.dim_at(mid, i)?, m.dim_at(base, i)?),
        Side::N => (m.dim_at(mid, i)?, n.dim_at(base, i)?),
    };
    if dim <= bound {
        return Ok(None);
    }
    let rank = match side {
        Side::M => m.rank(base, top, i)?,
        Side::N => n.rank(base, top, i)?,
    };
    Ok((rank > bound).then_some(ObstructionCertificate {
        base,
        gamma: *gamma,
        kappa: *kappa,
        degree: i,
        rank,
        bound,
        side,
    }))
}

/// First certificate over the grid, sweeping side `M` row by row, then side
/// `N`. `None` means the test found no obstruction, not that an interleaving
/// exists.
pub fn interleaving_obstruction<M, N>(
    m: &M,
    n: &N,
    i: usize,
    gamma: &AffineShift,
    kappa: &AffineShift,
    grid: &GridSpec,
) -> Result<Option<ObstructionCertificate>>
where
    M: Bifiltration + ?Sized,
    N: Bifiltration + ?Sized,
{
    interleaving_obstruction_within(m, n, i, gamma, kappa, grid, SweepLimits::default())
}

/// [`interleaving_obstruction`] restricted by `limits`.
pub fn interleaving_obstruction_within<M, N>(
    m: &M,
    n: &N,
    i: usize,
    gamma: &AffineShift,
    kappa: &AffineShift,
    grid: &GridSpec,
    limits: SweepLimits,
) -> Result<Option<ObstructionCertificate>>
where
    M: Bifiltration + ?Sized,
    N: Bifiltration + ?Sized,
{
    gamma.validate()?;
    kappa.validate()?;
    let points: Vec<Bigrade> = grid.points().map(|p| p.2).collect();
    for side in [Side::M, Side::N] {
        let found = points.par_iter().find_map_first(|&base| {
            match obstruction_at(m, n, i, gamma, kappa, base, side, limits) {
                Ok(None) => None,
                other => Some(other),
            }
        });
        if let Some(result) = found {
            return result;
        }
    }
    Ok(None)
}

/// Whether every internal map `M_a → M_{κγa}` and `N_a → N_{γκa}` over the
/// grid has rank zero. Then the zero morphisms form a `(γ, κ)` interleaving
/// on the tested points and the stability bound carries no information.
pub fn internal_maps_vanish<M, N>(
    m: &M,
    n: &N,
    i: usize,
    gamma: &AffineShift,
    kappa: &AffineShift,
    grid: &GridSpec,
    limits: SweepLimits,
) -> Result<bool>
where
    M: Bifiltration + ?Sized,
    N: Bifiltration + ?Sized,
{
    let points: Vec<Bigrade> = grid.points().map(|p| p.2).collect();
    let nonzero = |module: &(dyn Fn(Bigrade, Bigrade) -> Result<usize> + Sync), first: &AffineShift, second: &AffineShift| {
        points.par_iter().find_map_any(|&base| {
            let mid = first.apply(base);
            let top = second.apply(mid);
            if ![base, mid, top].iter().all(|&p| limits.admits(p)) {
                return None;
            }
            match module(base, top) {
                Ok(0) => None,
                Ok(_) => Some(Ok(())),
                Err(e) => Some(Err(e)),
            }
        })
    };
    let rank_m = |a: Bigrade, b: Bigrade| if m.dim_at(a, i)? == 0 { Ok(0) } else { m.rank(a, b, i) };
    let rank_n = |a: Bigrade, b: Bigrade| if n.dim_at(a, i)? == 0 { Ok(0) } else { n.rank(a, b, i) };
    for found in [nonzero(&rank_m, gamma, kappa), nonzero(&rank_n, kappa, gamma)] {
        match found {
            Some(Ok(())) => return Ok(false),
            Some(Err(e)) => return Err(e),
            None => {}
        }
    }
    Ok(true)
}
