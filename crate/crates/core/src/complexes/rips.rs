use std::collections::HashMap;

use super::simplicial::{facets, for_each_clique, Simplex, SimplicialComplex};
use crate::error::{Error, Result};
use crate::metric::{min_enclosing_ball_radius, FiniteMetricSpace, PointCloud};

/// Explicit builders refuse to enumerate more simplices than this.
pub const EXPLICIT_SIMPLEX_GUARD: usize = 4_000_000;

fn check_radius(r: f64) -> Result<()> {
    if r > 0.0 && r.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("radius must be positive and finite, got {r}")))
    }
}

/// Number of simplices of dimension at most `maxdim` on `n` vertices.
pub fn full_simplex_count(n: usize, maxdim: usize) -> usize {
    let mut total = 0usize;
    let mut binom = 1usize; // C(n, j)
    for j in 1..=maxdim + 1 {
        binom = binom.saturating_mul(n + 1 - j) / j;
        total = total.saturating_add(binom);
        if j >= n {
            break;
        }
    }
    total
}

fn guard_full(n: usize, maxdim: usize) -> Result<()> {
    let count = full_simplex_count(n, maxdim);
    if count > EXPLICIT_SIMPLEX_GUARD {
        return Err(Error::SizeGuard(format!(
            "{count} simplices on {n} vertices up to dimension {maxdim}; limit is {EXPLICIT_SIMPLEX_GUARD}"
        )));
    }
    Ok(())
}

fn upper_neighbors(n: usize, adjacent: impl Fn(usize, usize) -> bool) -> Vec<Vec<u32>> {
    (0..n).map(|u| (u + 1..n).filter(|&v| adjacent(u, v)).map(|v| v as u32).collect()).collect()
}

/// Vietoris-Rips complex at scale `r`: cliques of the graph with an edge
/// wherever `d(x, y) < 2r`.
pub fn rips_complex(space: &FiniteMetricSpace, r: f64, maxdim: usize) -> Result<SimplicialComplex> {
    check_radius(r)?;
    let nbrs = upper_neighbors(space.len(), |u, v| space.get(u, v) < 2.0 * r);
    let mut out = Vec::new();
    for_each_clique(&nbrs, maxdim, |c| out.push(c.to_vec()));
    SimplicialComplex::from_simplices_unchecked(out)
}

/// The whole Rips filtration up to `maxdim`, with each simplex entering at
/// half its diameter. Presence at `r` means `r > entry`.
pub fn rips_filtration(space: &FiniteMetricSpace, maxdim: usize) -> Result<Vec<(Simplex, f64)>> {
    let n = space.len();
    guard_full(n, maxdim)?;
    let nbrs = upper_neighbors(n, |_, _| true);
    let mut out = Vec::new();
    for_each_clique(&nbrs, maxdim, |c| {
        let mut entry = 0.0f64;
        for (a, &u) in c.iter().enumerate() {
            for &v in &c[a + 1..] {
                entry = entry.max(space.get(u as usize, v as usize) / 2.0);
            }
        }
        out.push((c.to_vec(), entry));
    });
    Ok(out)
}

/// Čech complex at scale `r` of the multiplicity-expanded cloud: a simplex is
/// present iff the open `r`-balls around its vertices share a point.
pub fn cech_complex(cloud: &PointCloud, r: f64, maxdim: usize) -> Result<SimplicialComplex> {
    check_radius(r)?;
    let cloud = cloud.expanded();
    let nbrs = upper_neighbors(cloud.len(), |u, v| cloud.dist(u, v) / 2.0 < r);
    let mut cliques = Vec::new();
    for_each_clique(&nbrs, maxdim, |c| cliques.push(c.to_vec()));
    let out = monotone_meb(&cloud, cliques)?.into_iter().filter(|(_, e)| *e < r).map(|(s, _)| s);
    SimplicialComplex::from_simplices_unchecked(out)
}

/// Enclosing radii of a face-closed list, each raised to the largest of
/// its facets'. Exact radii are monotone already; this only removes
/// rounding noise, so filtrations and complexes stay face-closed.
fn monotone_meb(cloud: &PointCloud, mut simplices: Vec<Simplex>) -> Result<Vec<(Simplex, f64)>> {
    simplices.sort_by_key(|s| s.len());
    let mut entry: HashMap<Simplex, f64> = HashMap::with_capacity(simplices.len());
    let mut out = Vec::with_capacity(simplices.len());
    for s in simplices {
        let mut r = meb(cloud, &s, cloud.metric())?;
        if s.len() > 2 {
            for f in facets(&s) {
                r = r.max(entry.get(&f).copied().unwrap_or(f64::INFINITY));
            }
        }
        entry.insert(s.clone(), r);
        out.push((s, r));
    }
    Ok(out)
}

fn meb(cloud: &PointCloud, simplex: &[u32], metric: crate::metric::Metric) -> Result<f64> {
    let pts: Vec<&[f64]> = simplex.iter().map(|&v| cloud.point(v as usize)).collect();
    min_enclosing_ball_radius(&pts, metric)
}

/// The whole Čech filtration of the expanded cloud up to `maxdim`; entries
/// are minimum enclosing ball radii.
pub fn cech_filtration(cloud: &PointCloud, maxdim: usize) -> Result<Vec<(Simplex, f64)>> {
    let cloud = cloud.expanded();
    let n = cloud.len();
    guard_full(n, maxdim)?;
    let nbrs = upper_neighbors(n, |_, _| true);
    let mut simplices = Vec::new();
    for_each_clique(&nbrs, maxdim, |c| simplices.push(c.to_vec()));
    monotone_meb(&cloud, simplices)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::Metric;

    fn equilateral() -> PointCloud {
        PointCloud::new(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.5, 3f64.sqrt() / 2.0]], Metric::L2).unwrap()
    }

    #[test]
    fn rips_is_strict() {
        let rows = (0..3).map(|i| (0..3).map(|j| if i == j { 0.0 } else { 1.0 }).collect()).collect();
        let space = FiniteMetricSpace::from_matrix(rows).unwrap();
        let c = rips_complex(&space, 0.5, 2).unwrap();
        assert_eq!((c.count(0), c.count(1)), (3, 0));
        let c = rips_complex(&space, 0.51, 2).unwrap();
        assert_eq!((c.count(1), c.count(2)), (3, 1));
        assert!(rips_complex(&space, 0.0, 1).is_err());
    }

    #[test]
    fn cech_triangle_lags_edges() {
        let cloud = equilateral();
        let c = cech_complex(&cloud, 0.55, 2).unwrap();
        assert_eq!((c.count(1), c.count(2)), (3, 0));
        let c = cech_complex(&cloud, 0.577, 2).unwrap();
        assert_eq!(c.count(2), 0);
        let c = cech_complex(&cloud, 0.578, 2).unwrap();
        assert_eq!(c.count(2), 1);
    }

    #[test]
    fn counts_and_guard() {
        assert_eq!(full_simplex_count(3, 2), 7);
        assert_eq!(full_simplex_count(3, 5), 7);
        assert_eq!(full_simplex_count(500, 1), 500 + 124_750);
        let space = FiniteMetricSpace::from_matrix(vec![vec![0.0; 400]; 400]).unwrap();
        assert!(matches!(rips_filtration(&space, 3), Err(Error::SizeGuard(_))));
    }
}
