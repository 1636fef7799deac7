//! Point clouds, finite metric spaces and ball predicates.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance for the triangle-inequality check on explicit matrices.
pub const TRIANGLE_TOL: f64 = 1e-9;

/// Points this close to the boundary of a candidate ball count as inside it.
pub const MEB_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Metric {
    L1,
    L2,
    #[serde(rename = "LINF")]
    LInf,
}

impl Metric {
    pub fn dist(self, a: &[f64], b: &[f64]) -> f64 {
        let diffs = a.iter().zip(b).map(|(x, y)| (x - y).abs());
        match self {
            Metric::L1 => diffs.sum(),
            Metric::L2 => diffs.map(|d| d * d).sum::<f64>().sqrt(),
            Metric::LInf => diffs.fold(0.0, f64::max),
        }
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "L1" => Ok(Metric::L1),
            "L2" => Ok(Metric::L2),
            "LINF" | "L_INF" | "LINFINITY" => Ok(Metric::LInf),
            other => Err(Error::UnsupportedMetric(other.to_string())),
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Metric::L1 => "L1",
            Metric::L2 => "L2",
            Metric::LInf => "LINF",
        })
    }
}

/// Points in R^d with positive integer multiplicities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointCloud {
    points: Vec<Vec<f64>>,
    multiplicities: Vec<usize>,
    metric: Metric,
}

impl PointCloud {
    pub fn new(points: Vec<Vec<f64>>, metric: Metric) -> Result<Self> {
        let m = vec![1; points.len()];
        Self::with_multiplicities(points, m, metric)
    }

    pub fn with_multiplicities(
        points: Vec<Vec<f64>>,
        multiplicities: Vec<usize>,
        metric: Metric,
    ) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptyInput);
        }
        if points.len() != multiplicities.len() {
            return Err(Error::InvalidInput(format!(
                "{} points but {} multiplicities",
                points.len(),
                multiplicities.len()
            )));
        }
        let d = points[0].len();
        if d == 0 {
            return Err(Error::InvalidInput("points must have dimension >= 1".into()));
        }
        if let Some(i) = points.iter().position(|p| p.len() != d) {
            return Err(Error::InvalidInput(format!(
                "point {i} has dimension {} but point 0 has {d}",
                points[i].len()
            )));
        }
        if points.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput("non-finite coordinate".into()));
        }
        if multiplicities.iter().any(|&m| m == 0) {
            return Err(Error::InvalidInput("multiplicities must be >= 1".into()));
        }
        Ok(PointCloud { points, multiplicities, metric })
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i]
    }

    pub fn multiplicities(&self) -> &[usize] {
        &self.multiplicities
    }

    pub fn metric(&self) -> Metric {
        self.metric
    }

    pub fn with_metric(mut self, metric: Metric) -> Self {
        self.metric = metric;
        self
    }

    /// Number of distinct rows (ignoring multiplicities).
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points[0].len()
    }

    pub fn total_multiplicity(&self) -> usize {
        self.multiplicities.iter().sum()
    }

    pub fn dist(&self, i: usize, j: usize) -> f64 {
        self.metric.dist(&self.points[i], &self.points[j])
    }

    /// The same multiset with every copy listed as its own row.
    pub fn expanded(&self) -> PointCloud {
        let mut points = Vec::with_capacity(self.total_multiplicity());
        for (p, &m) in self.points.iter().zip(&self.multiplicities) {
            for _ in 0..m {
                points.push(p.clone());
            }
        }
        let n = points.len();
        PointCloud { points, multiplicities: vec![1; n], metric: self.metric }
    }

    /// Row index of each expanded copy.
    pub fn expansion_owner(&self) -> Vec<usize> {
        let mut owner = Vec::with_capacity(self.total_multiplicity());
        for (i, &m) in self.multiplicities.iter().enumerate() {
            owner.extend(std::iter::repeat(i).take(m));
        }
        owner
    }

    /// Pairwise distances between the distinct rows, without expanding
    /// multiplicities.
    pub fn row_distances(&self) -> FiniteMetricSpace {
        let n = self.len();
        let mut dist = vec![0.0; n * n];
        for i in 0..n {
            for j in i + 1..n {
                let d = self.dist(i, j);
                dist[i * n + j] = d;
                dist[j * n + i] = d;
            }
        }
        FiniteMetricSpace { n, dist }
    }
}

/// A finite pseudometric space given by its distance matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiniteMetricSpace {
    n: usize,
    dist: Vec<f64>,
}

impl FiniteMetricSpace {
    /// Validates symmetry, zero diagonal, nonnegativity and the triangle
    /// inequality (up to [`TRIANGLE_TOL`]).
    pub fn from_matrix(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::EmptyInput);
        }
        let mut dist = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidInput(format!("row {i} has length {}", row.len())));
            }
            dist.extend_from_slice(row);
        }
        for i in 0..n {
            if dist[i * n + i] != 0.0 {
                return Err(Error::InvalidInput(format!("nonzero diagonal at {i}")));
            }
            for j in 0..n {
                let d = dist[i * n + j];
                if !d.is_finite() || d < 0.0 {
                    return Err(Error::InvalidInput(format!("bad distance at ({i},{j})")));
                }
                if d != dist[j * n + i] {
                    return Err(Error::InvalidInput(format!("asymmetric at ({i},{j})")));
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if dist[i * n + k] > dist[i * n + j] + dist[j * n + k] + TRIANGLE_TOL {
                        return Err(Error::InvalidInput(format!(
                            "triangle inequality fails for ({i},{j},{k})"
                        )));
                    }
                }
            }
        }
        Ok(FiniteMetricSpace { n, dist })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.dist[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.dist[i * self.n..(i + 1) * self.n]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.n).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn diameter(&self) -> f64 {
        self.dist.iter().cloned().fold(0.0, f64::max)
    }

    /// Subspace on the listed indices, in the given order.
    pub fn subspace(&self, idx: &[usize]) -> FiniteMetricSpace {
        let n = idx.len();
        let mut dist = Vec::with_capacity(n * n);
        for &i in idx {
            for &j in idx {
                dist.push(self.get(i, j));
            }
        }
        FiniteMetricSpace { n, dist }
    }
}

/// Distance matrix of the multiplicity-expanded cloud; copies of a point sit
/// at distance 0 from each other.
pub fn distance_matrix(cloud: &PointCloud) -> FiniteMetricSpace {
    cloud.expanded().row_distances()
}

/// Isometric embedding into (R^n, LINF): point i has coordinates dist[i][·].
pub fn kuratowski_embed(space: &FiniteMetricSpace) -> PointCloud {
    PointCloud {
        points: space.rows(),
        multiplicities: vec![1; space.len()],
        metric: Metric::LInf,
    }
}

/// Radius of the smallest ball containing `points` in the given metric.
///
/// LINF uses the coordinate-range formula; L2 runs Welzl's algorithm in
/// dimension at most 3. One or two points are handled exactly for every
/// metric (radius half the distance); L1 otherwise fails.
pub fn min_enclosing_ball_radius<P: AsRef<[f64]>>(points: &[P], metric: Metric) -> Result<f64> {
    if points.is_empty() {
        return Err(Error::EmptyInput);
    }
    if points.len() == 1 {
        return Ok(0.0);
    }
    if points.len() == 2 {
        return Ok(metric.dist(points[0].as_ref(), points[1].as_ref()) / 2.0);
    }
    let d = points[0].as_ref().len();
    match metric {
        Metric::LInf => {
            let mut best: f64 = 0.0;
            for j in 0..d {
                let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
                for p in points {
                    lo = lo.min(p.as_ref()[j]);
                    hi = hi.max(p.as_ref()[j]);
                }
                best = best.max((hi - lo) / 2.0);
            }
            Ok(best)
        }
        Metric::L2 if d <= 3 => {
            let pts: Vec<&[f64]> = points.iter().map(|p| p.as_ref()).collect();
            Ok(welzl(&pts).radius)
        }
        Metric::L2 => Err(Error::UnsupportedMetric(format!(
            "L2 enclosing balls need dimension <= 3, got {d}"
        ))),
        Metric::L1 => Err(Error::UnsupportedMetric(
            "L1 enclosing balls of more than two points".into(),
        )),
    }
}

/// Whether the open balls of radius `r` around `centers` share a point.
pub fn balls_intersect<P: AsRef<[f64]>>(centers: &[P], r: f64, metric: Metric) -> Result<bool> {
    Ok(min_enclosing_ball_radius(centers, metric)? < r)
}

/// Hausdorff distance between two index sets of a finite space.
pub fn hausdorff_distance(a: &[usize], b: &[usize], space: &FiniteMetricSpace) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptyInput);
    }
    let directed = |from: &[usize], to: &[usize]| {
        from.iter()
            .map(|&x| to.iter().map(|&y| space.get(x, y)).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    Ok(directed(a, b).max(directed(b, a)))
}

#[derive(Debug, Clone)]
struct Ball {
    center: Vec<f64>,
    radius: f64,
}

impl Ball {
    fn contains(&self, p: &[f64]) -> bool {
        Metric::L2.dist(&self.center, p) <= self.radius + MEB_TOL
    }
}

fn welzl(points: &[&[f64]]) -> Ball {
    let d = points[0].len();
    let mut boundary = Vec::with_capacity(d + 1);
    welzl_rec(points, points.len(), &mut boundary, d)
}

fn welzl_rec<'a>(points: &[&'a [f64]], n: usize, boundary: &mut Vec<&'a [f64]>, d: usize) -> Ball {
    if n == 0 || boundary.len() == d + 1 {
        return ball_on_boundary(boundary, d);
    }
    let p = points[n - 1];
    let ball = welzl_rec(points, n - 1, boundary, d);
    if ball.contains(p) {
        return ball;
    }
    boundary.push(p);
    let ball = welzl_rec(points, n - 1, boundary, d);
    boundary.pop();
    ball
}

/// Smallest ball with all of `boundary` on its sphere; falls back to the
/// smallest ball enclosing `boundary` when the points are affinely dependent.
fn ball_on_boundary(boundary: &[&[f64]], d: usize) -> Ball {
    match boundary.len() {
        0 => Ball { center: vec![0.0; d], radius: -1.0 },
        1 => Ball { center: boundary[0].to_vec(), radius: 0.0 },
        _ => circumball(boundary).unwrap_or_else(|| brute_force_ball(boundary)),
    }
}

/// Ball through all points with center in their affine hull.
fn circumball(pts: &[&[f64]]) -> Option<Ball> {
    let p0 = pts[0];
    let m = pts.len() - 1;
    let v: Vec<Vec<f64>> = pts[1..]
        .iter()
        .map(|p| p.iter().zip(p0).map(|(a, b)| a - b).collect())
        .collect();
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    // 2 (v_i . v_j) lambda_j = |v_i|^2
    let mut a: Vec<Vec<f64>> = (0..m)
        .map(|i| {
            let mut row: Vec<f64> = (0..m).map(|j| 2.0 * dot(&v[i], &v[j])).collect();
            row.push(dot(&v[i], &v[i]));
            row
        })
        .collect();
    let scale = a.iter().flat_map(|r| r[..m].iter()).fold(0.0f64, |s, x| s.max(x.abs()));
    for col in 0..m {
        let piv = (col..m).max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))?;
        if a[piv][col].abs() <= 1e-12 * scale.max(1e-300) {
            return None;
        }
        a.swap(col, piv);
        for row in 0..m {
            if row != col {
                let f = a[row][col] / a[col][col];
                for k in col..=m {
                    a[row][k] -= f * a[col][k];
                }
            }
        }
    }
    let lambda: Vec<f64> = (0..m).map(|i| a[i][m] / a[i][i]).collect();
    let mut center = p0.to_vec();
    for (l, vi) in lambda.iter().zip(&v) {
        for (c, x) in center.iter_mut().zip(vi) {
            *c += l * x;
        }
    }
    let radius = pts.iter().map(|p| Metric::L2.dist(&center, p)).fold(0.0, f64::max);
    Some(Ball { center, radius })
}

fn brute_force_ball(pts: &[&[f64]]) -> Ball {
    let mut best: Option<Ball> = None;
    let n = pts.len();
    for mask in 1u32..(1 << n) {
        let sub: Vec<&[f64]> = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| pts[i]).collect();
        let ball = if sub.len() == 1 {
            Ball { center: sub[0].to_vec(), radius: 0.0 }
        } else {
            match circumball(&sub) {
                Some(b) => b,
                None => continue,
            }
        };
        if pts.iter().all(|p| ball.contains(p))
            && best.as_ref().map_or(true, |b| ball.radius < b.radius)
        {
            best = Some(ball);
        }
    }
    best.expect("some pair of points always yields an enclosing ball")
}
