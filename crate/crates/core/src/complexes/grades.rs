use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point `(k, r)` of `J = (0,∞)^op × (0,∞)`: `k` is a density threshold
/// (larger is earlier), `r` a scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "(f64, f64)", into = "(f64, f64)")]
pub struct Bigrade {
    pub k: f64,
    pub r: f64,
}

impl From<(f64, f64)> for Bigrade {
    fn from((k, r): (f64, f64)) -> Self {
        Bigrade { k, r }
    }
}

impl From<Bigrade> for (f64, f64) {
    fn from(b: Bigrade) -> Self {
        (b.k, b.r)
    }
}

impl Bigrade {
    pub fn new(k: f64, r: f64) -> Self {
        Bigrade { k, r }
    }

    /// Order of J: `(k,r) ≤ (k',r')` iff `k ≥ k'` and `r ≤ r'`.
    pub fn leq(self, other: Bigrade) -> bool {
        self.k >= other.k && self.r <= other.r
    }

    pub fn in_j(self) -> bool {
        self.k > 0.0 && self.r > 0.0
    }
}

/// How a critical radius is read: `Open` grades appear strictly after their
/// radius (the raw constructions, built on open balls), `Closed` grades at it
/// (grid-coarsened data).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RConvention {
    Open,
    Closed,
}

impl RConvention {
    /// Whether something with minimal grade `grade` is present at `at`.
    #[inline]
    pub fn present(self, grade: Bigrade, at: Bigrade) -> bool {
        at.k <= grade.k && self.reached(grade.r, at.r)
    }

    /// Whether scale `r` has reached the critical radius `entry`.
    #[inline]
    pub fn reached(self, entry: f64, r: f64) -> bool {
        match self {
            RConvention::Open => r > entry,
            RConvention::Closed => r >= entry,
        }
    }

    /// Whether an interval with the given entry and exit values is alive at
    /// `t` under this convention.
    #[inline]
    pub fn alive(self, birth: f64, death: f64, t: f64) -> bool {
        match self {
            RConvention::Open => birth < t && t <= death,
            RConvention::Closed => birth <= t && t < death,
        }
    }
}

/// Drops every grade dominated by another one. The result is sorted by
/// descending `k`, so its `r` values strictly decrease.
pub fn minimal_antichain(mut grades: Vec<Bigrade>) -> Vec<Bigrade> {
    grades.sort_by(|a, b| b.k.total_cmp(&a.k).then(a.r.total_cmp(&b.r)));
    let mut out: Vec<Bigrade> = Vec::with_capacity(grades.len());
    for g in grades {
        if out.last().map_or(true, |last| g.r < last.r) {
            out.push(g);
        }
    }
    out
}

/// Finite grid in J: `k` descending, `r` ascending.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    k: Vec<f64>,
    r: Vec<f64>,
}

impl GridSpec {
    pub fn new(k: Vec<f64>, r: Vec<f64>) -> Result<Self> {
        if k.len() < 2 || r.len() < 2 {
            return Err(Error::EmptyGrid);
        }
        if k.windows(2).any(|w| !(w[0] > w[1])) {
            return Err(Error::InvalidInput("grid k values must be strictly descending".into()));
        }
        if r.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidInput("grid r values must be strictly ascending".into()));
        }
        if k.iter().chain(&r).any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput("grid values must be finite".into()));
        }
        Ok(GridSpec { k, r })
    }

    /// `nk` values `k_max·(nk−i)/nk` and `nr` values `r_max·(j+1)/nr`.
    pub fn uniform(k_max: f64, r_max: f64, nk: usize, nr: usize) -> Result<Self> {
        let k = (0..nk).map(|i| k_max * (nk - i) as f64 / nk as f64).collect();
        let r = (0..nr).map(|j| r_max * (j + 1) as f64 / nr as f64).collect();
        Self::new(k, r)
    }

    pub fn k(&self) -> &[f64] {
        &self.k
    }

    pub fn r(&self) -> &[f64] {
        &self.r
    }

    pub fn nk(&self) -> usize {
        self.k.len()
    }

    pub fn nr(&self) -> usize {
        self.r.len()
    }

    pub fn len(&self) -> usize {
        self.nk() * self.nr()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn point(&self, i: usize, j: usize) -> Bigrade {
        Bigrade { k: self.k[i], r: self.r[j] }
    }

    pub fn points(&self) -> impl Iterator<Item = (usize, usize, Bigrade)> + '_ {
        (0..self.nk()).flat_map(move |i| (0..self.nr()).map(move |j| (i, j, self.point(i, j))))
    }

    /// Largest grid step on either axis: the coarsening slack.
    pub fn slack(&self) -> f64 {
        let dk = self.k.windows(2).map(|w| w[0] - w[1]).fold(0.0, f64::max);
        let dr = self.r.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
        dk.max(dr)
    }

    /// Largest grid point below `at` in J, if any.
    pub fn floor(&self, at: Bigrade) -> Option<(usize, usize)> {
        // smallest k_i >= at.k: k is descending, so the last index with k_i >= at.k
        let i = self.k.partition_point(|&k| k >= at.k).checked_sub(1)?;
        let j = self.r.partition_point(|&r| r <= at.r).checked_sub(1)?;
        Some((i, j))
    }

    /// The coarsening rule: smallest grid bigrade above `g` in J, with `k`
    /// clamped to the last line when it falls below the grid. `None` when `r`
    /// is past the last grid line.
    pub fn round_up(&self, g: Bigrade) -> Option<Bigrade> {
        self.round_up_from(g, RConvention::Closed)
    }

    /// [`GridSpec::round_up`] for a grade read under `convention`: an open
    /// grade sitting exactly on a grid line moves to the next line, so the
    /// coarsened object agrees with the original at every grid point.
    pub fn round_up_from(&self, g: Bigrade, convention: RConvention) -> Option<Bigrade> {
        let j = self.r.partition_point(|&r| !convention.reached(g.r, r));
        let r = *self.r.get(j)?;
        let i = self.k.partition_point(|&k| k > g.k);
        let k = *self.k.get(i).unwrap_or(self.k.last().unwrap());
        Some(Bigrade { k, r })
    }

    /// Every `step`-th line on both axes, keeping the first line of each.
    pub fn subgrid(&self, step: usize) -> Result<GridSpec> {
        let step = step.max(1);
        GridSpec::new(
            self.k.iter().step_by(step).cloned().collect(),
            self.r.iter().step_by(step).cloned().collect(),
        )
    }

    /// Index of the grid value equal to `k`, if any.
    pub fn k_index(&self, k: f64) -> Option<usize> {
        self.k.iter().position(|&x| x == k)
    }

    pub fn r_index(&self, r: f64) -> Option<usize> {
        self.r.iter().position(|&x| x == r)
    }
}
