//! Grid invariants of bipersistence modules: Hilbert functions, bigraded
//! Betti numbers and fibered barcodes.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::barcode::Barcode;
use crate::complexes::grades::{Bigrade, GridSpec, RConvention};
use crate::error::{Error, Result};

/// A bifiltered complex whose homology can be queried pointwise.
///
/// `joint_rank` and `diagonal_rank` are the two maps of the Koszul complex;
/// everything else has a default in terms of them and of `row_dims`.
pub trait Bifiltration: Sync {
    fn convention(&self) -> RConvention;

    /// `dim H_i` at `(k, r)` for each `r` in `rs`.
    fn row_dims(&self, k: f64, rs: &[f64], i: usize) -> Result<Vec<usize>>;

    /// Rank of `⊕_s H_i(s) → H_i(target)`; every source must lie below the
    /// target.
    fn joint_rank(&self, sources: &[Bigrade], target: Bigrade, i: usize) -> Result<usize>;

    /// Rank of the diagonal map `H_i(source) → ⊕_t H_i(t)`.
    fn diagonal_rank(&self, source: Bigrade, targets: &[Bigrade], i: usize) -> Result<usize>;

    fn fibered_barcode(&self, line: &Line, i: usize) -> Result<Barcode>;

    fn dim_at(&self, at: Bigrade, i: usize) -> Result<usize> {
        Ok(self.row_dims(at.k, &[at.r], i)?[0])
    }

    /// Rank of the internal map `H_i(from) → H_i(to)`.
    fn rank(&self, from: Bigrade, to: Bigrade, i: usize) -> Result<usize> {
        self.joint_rank(&[from], to, i)
    }

    fn hilbert(&self, i: usize, grid: &GridSpec) -> Result<GridModule> {
        let dims = grid.k().par_iter().map(|&k| self.row_dims(k, grid.r(), i)).collect::<Result<Vec<_>>>()?;
        Ok(GridModule { grid: grid.clone(), degree: i, dims })
    }

    fn betti(&self, i: usize, grid: &GridSpec) -> Result<BettiTable> {
        let module = self.hilbert(i, grid)?;
        bigraded_betti_from(self, &module)
    }
}

pub(crate) fn require_leq(from: Bigrade, to: Bigrade) -> Result<()> {
    if from.leq(to) {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!(
            "({}, {}) is not below ({}, {}) in J",
            from.k, from.r, to.k, to.r
        )))
    }
}

/// Koszul Betti numbers on the grid of `module`, which must be the Hilbert
/// function of `bif` in the same degree.
pub fn bigraded_betti_from<B: Bifiltration + ?Sized>(bif: &B, module: &GridModule) -> Result<BettiTable> {
    let grid = &module.grid;
    let i = module.degree;
    let cells: Vec<(usize, usize)> = (0..grid.nk()).flat_map(|a| (0..grid.nr()).map(move |b| (a, b))).collect();
    let values = cells
        .par_iter()
        .map(|&(a, b)| -> Result<[usize; 3]> {
            let dim = |p: Option<(usize, usize)>| p.map_or(0, |(x, y)| module.dims[x][y]);
            // predecessors: next larger k (row a-1) and next smaller r (column b-1)
            let pa = (a > 0).then(|| (a - 1, b));
            let pb = (b > 0).then(|| (a, b - 1));
            let pd = (a > 0 && b > 0).then(|| (a - 1, b - 1));
            let here = grid.point(a, b);
            let preds: Vec<Bigrade> = [pa, pb].into_iter().flatten().filter(|&p| dim(Some(p)) > 0).map(|(x, y)| grid.point(x, y)).collect();
            let (dim_a, dim_b, dim_d) = (dim(pa), dim(pb), dim(pd));
            let into_here = if preds.is_empty() || module.dims[a][b] == 0 {
                0
            } else {
                bif.joint_rank(&preds, here, i)?
            };
            let diag = match pd {
                Some((x, y)) if dim_d > 0 && !preds.is_empty() => bif.diagonal_rank(grid.point(x, y), &preds, i)?,
                _ => 0,
            };
            let beta0 = module.dims[a][b] - into_here;
            let beta2 = dim_d - diag;
            let beta1 = dim_a + dim_b - diag - into_here;
            Ok([beta0, beta1, beta2])
        })
        .collect::<Result<Vec<_>>>()?;
    let mut beta = [vec![vec![0; grid.nr()]; grid.nk()], vec![vec![0; grid.nr()]; grid.nk()], vec![vec![0; grid.nr()]; grid.nk()]];
    for (&(a, b), v) in cells.iter().zip(values) {
        for (layer, x) in beta.iter_mut().zip(v) {
            layer[a][b] = x;
        }
    }
    Ok(BettiTable { grid: grid.clone(), degree: i, beta })
}

pub fn hilbert_function<B: Bifiltration + ?Sized>(bif: &B, i: usize, grid: &GridSpec) -> Result<GridModule> {
    bif.hilbert(i, grid)
}

pub fn bigraded_betti<B: Bifiltration + ?Sized>(bif: &B, i: usize, grid: &GridSpec) -> Result<BettiTable> {
    bif.betti(i, grid)
}

pub fn fibered_barcode<B: Bifiltration + ?Sized>(bif: &B, i: usize, line: &Line) -> Result<Barcode> {
    bif.fibered_barcode(line, i)
}

/// Pointwise homology dimensions on a grid; `dims[a][b]` sits at
/// `(k[a], r[b])`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridModule {
    pub grid: GridSpec,
    pub degree: usize,
    pub dims: Vec<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
struct GridModuleJson {
    #[serde(default)]
    schema: Option<String>,
    degree: usize,
    k: Vec<f64>,
    r: Vec<f64>,
    dims: Vec<Vec<usize>>,
}

impl GridModule {
    pub fn get(&self, a: usize, b: usize) -> usize {
        self.dims[a][b]
    }

    /// Number of cells with nonzero dimension.
    pub fn support_size(&self) -> usize {
        self.dims.iter().flatten().filter(|&&d| d > 0).count()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(GridModuleJson {
            schema: Some(crate::io::SCHEMA.into()),
            degree: self.degree,
            k: self.grid.k().to_vec(),
            r: self.grid.r().to_vec(),
            dims: self.dims.clone(),
        })
        .expect("serializable")
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        let doc: GridModuleJson = serde_json::from_value(value.clone())?;
        let grid = GridSpec::new(doc.k, doc.r)?;
        if doc.dims.len() != grid.nk() || doc.dims.iter().any(|row| row.len() != grid.nr()) {
            return Err(Error::Parse("dims do not match the grid".into()));
        }
        Ok(GridModule { grid, degree: doc.degree, dims: doc.dims })
    }

    /// Checks `dim M(a) = Σ_{b ≤ a} (β0 − β1 + β2)(b)` at every grid point.
    pub fn satisfies_euler(&self, betti: &BettiTable) -> bool {
        let (nk, nr) = (self.grid.nk(), self.grid.nr());
        // b ≤ a in J means row index ≤ and column index ≤
        let mut prefix = vec![vec![0i64; nr + 1]; nk + 1];
        for a in 0..nk {
            for b in 0..nr {
                let chi = betti.beta[0][a][b] as i64 - betti.beta[1][a][b] as i64 + betti.beta[2][a][b] as i64;
                prefix[a + 1][b + 1] = chi + prefix[a][b + 1] + prefix[a + 1][b] - prefix[a][b];
                if prefix[a + 1][b + 1] != self.dims[a][b] as i64 {
                    return false;
                }
            }
        }
        true
    }
}

/// Bigraded Betti numbers `β0, β1, β2` on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct BettiTable {
    pub grid: GridSpec,
    pub degree: usize,
    pub beta: [Vec<Vec<usize>>; 3],
}

#[derive(Serialize, Deserialize)]
struct BettiJson {
    #[serde(default)]
    schema: Option<String>,
    degree: usize,
    k: Vec<f64>,
    r: Vec<f64>,
    beta0: Vec<Vec<usize>>,
    beta1: Vec<Vec<usize>>,
    beta2: Vec<Vec<usize>>,
}

impl BettiTable {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(BettiJson {
            schema: Some(crate::io::SCHEMA.into()),
            degree: self.degree,
            k: self.grid.k().to_vec(),
            r: self.grid.r().to_vec(),
            beta0: self.beta[0].clone(),
            beta1: self.beta[1].clone(),
            beta2: self.beta[2].clone(),
        })
        .expect("serializable")
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        let doc: BettiJson = serde_json::from_value(value.clone())?;
        Ok(BettiTable { grid: GridSpec::new(doc.k, doc.r)?, degree: doc.degree, beta: [doc.beta0, doc.beta1, doc.beta2] })
    }
}

/// An affine line `base + t·dir` in J, with `dir` a unit vector along which
/// `k` does not increase and `r` does not decrease. Barcodes along the line
/// are reported in the arc-length parameter `t`.
///
/// Endpoints follow the radius convention. An endpoint set by a density
/// threshold is really closed on the other side, since `k ≥ k0` is a closed
/// condition, so only horizontal lines are exact at their endpoints.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Line {
    pub base: Bigrade,
    pub dir_k: f64,
    pub dir_r: f64,
}

impl Line {
    /// The line through two comparable, distinct points of J, directed
    /// upward; `t = 0` at the lower point.
    pub fn through(p1: Bigrade, p2: Bigrade) -> Result<Self> {
        let finite = [p1.k, p1.r, p2.k, p2.r].iter().all(|x| x.is_finite());
        let (lo, hi) = if p1.leq(p2) { (p1, p2) } else { (p2, p1) };
        if !finite || !lo.leq(hi) || lo == hi {
            return Err(Error::NonMonotoneLine);
        }
        let (dk, dr) = (hi.k - lo.k, hi.r - lo.r);
        let len = dk.hypot(dr);
        Ok(Line { base: lo, dir_k: dk / len, dir_r: dr / len })
    }

    /// Angle (degrees, in `[0, 90]`) and signed offset, read in the plane
    /// with `x = −k` and `y = r`: the line makes angle `θ` with the x-axis and
    /// passes at signed distance `offset` from the origin. The base point is
    /// the foot of the perpendicular, `(k, r) = (offset·sin θ, offset·cos θ)`,
    /// and the direction is `(−cos θ, sin θ)`. At 90° this is the horizontal
    /// line `k = offset`.
    pub fn from_angle_offset(angle_deg: f64, offset: f64) -> Result<Self> {
        if !(0.0..=90.0).contains(&angle_deg) || !offset.is_finite() {
            return Err(Error::NonMonotoneLine);
        }
        let th = angle_deg.to_radians();
        let (s, c) = if angle_deg == 90.0 { (1.0, 0.0) } else if angle_deg == 0.0 { (0.0, 1.0) } else { th.sin_cos() };
        Ok(Line { base: Bigrade::new(offset * s, offset * c), dir_k: -c, dir_r: s })
    }

    /// The line of constant density `k`, parametrized by `r`.
    pub fn horizontal(k: f64) -> Self {
        Line { base: Bigrade::new(k, 0.0), dir_k: 0.0, dir_r: 1.0 }
    }

    pub fn point(&self, t: f64) -> Bigrade {
        Bigrade::new(self.base.k + t * self.dir_k, self.base.r + t * self.dir_r)
    }

    /// First parameter at which the density coordinate has reached `k`.
    fn k_entry(&self, k: f64) -> f64 {
        if self.dir_k < 0.0 {
            (k - self.base.k) / self.dir_k
        } else if self.base.k <= k {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    }

    /// Parameter from which scale `r` counts as reached under `convention`.
    pub fn r_entry(&self, r: f64, convention: RConvention) -> f64 {
        if self.dir_r > 0.0 {
            (r - self.base.r) / self.dir_r
        } else if convention.reached(r, self.base.r) {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    }

    /// Entry parameter of a grade: the least `t` with `point(t) ≥ g`.
    pub fn entry(&self, g: Bigrade, convention: RConvention) -> f64 {
        self.k_entry(g.k).max(self.r_entry(g.r, convention))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_validation() {
        assert_eq!(Line::through(Bigrade::new(0.5, 0.1), Bigrade::new(0.6, 0.2)), Err(Error::NonMonotoneLine));
        assert_eq!(Line::through(Bigrade::new(0.5, 0.1), Bigrade::new(0.5, 0.1)), Err(Error::NonMonotoneLine));
        let l = Line::through(Bigrade::new(0.3, 0.5), Bigrade::new(0.6, 0.1)).unwrap();
        assert_eq!(l.base, Bigrade::new(0.6, 0.1));
        assert!((l.dir_k + 0.6).abs() < 1e-12 && (l.dir_r - 0.8).abs() < 1e-12);
        assert!((l.entry(Bigrade::new(0.3, 0.1), RConvention::Closed) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn angle_offset_convention() {
        let l = Line::from_angle_offset(90.0, 0.25).unwrap();
        assert_eq!(l, Line { base: Bigrade::new(0.25, 0.0), dir_k: 0.0, dir_r: 1.0 });
        let l = Line::from_angle_offset(0.0, 0.3).unwrap();
        assert_eq!(l.base, Bigrade::new(0.0, 0.3));
        assert!(Line::from_angle_offset(120.0, 0.1).is_err());
    }

    #[test]
    fn euler_prefix_sums() {
        let grid = GridSpec::new(vec![1.0, 0.5], vec![0.1, 0.2]).unwrap();
        let m = GridModule { grid: grid.clone(), degree: 0, dims: vec![vec![1, 1], vec![1, 1]] };
        let mut beta = [vec![vec![0; 2]; 2], vec![vec![0; 2]; 2], vec![vec![0; 2]; 2]];
        beta[0][0][0] = 1;
        assert!(m.satisfies_euler(&BettiTable { grid: grid.clone(), degree: 0, beta: beta.clone() }));
        beta[0][1][1] = 1;
        assert!(!m.satisfies_euler(&BettiTable { grid, degree: 0, beta }));
    }
}
