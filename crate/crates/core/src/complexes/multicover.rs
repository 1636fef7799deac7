//! The multicover bifiltration through its k-fold Čech nerve, and the
//! membership predicates for the multicover and degree-cover regions.

use std::collections::HashMap;

use super::rips::EXPLICIT_SIMPLEX_GUARD;
use super::simplicial::{Simplex, SimplicialComplex};
use crate::error::{Error, Result};
use crate::metric::{min_enclosing_ball_radius, PointCloud};

/// Largest number of k-subsets the k-fold Čech builder will enumerate.
pub const KFOLD_SUBSET_GUARD: usize = 5000;

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc = 1usize;
    for j in 0..k {
        acc = acc.saturating_mul(n - j) / (j + 1);
    }
    acc
}

fn k_subsets(n: usize, k: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur: Vec<u32> = (0..k as u32).collect();
    if k == 0 || k > n {
        return out;
    }
    loop {
        out.push(cur.clone());
        let mut i = k;
        while i > 0 && cur[i - 1] as usize == n - k + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return out;
        }
        cur[i - 1] += 1;
        for j in i..k {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

/// Memoized enclosing-ball radii of point subsets.
struct MebCache<'a> {
    cloud: &'a PointCloud,
    radii: HashMap<Vec<u32>, f64>,
}

impl MebCache<'_> {
    fn radius(&mut self, subset: &[u32]) -> Result<f64> {
        if let Some(&r) = self.radii.get(subset) {
            return Ok(r);
        }
        let pts: Vec<&[f64]> = subset.iter().map(|&v| self.cloud.point(v as usize)).collect();
        let r = min_enclosing_ball_radius(&pts, self.cloud.metric())?;
        self.radii.insert(subset.to_vec(), r);
        Ok(r)
    }
}

fn union(a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out: Vec<u32> = a.iter().chain(b).copied().collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// The k-fold Čech complex at scale `r`: one vertex per k-subset of the
/// multiplicity-expanded cloud whose open `r`-balls share a point, and a
/// simplex wherever the balls of the union of its subsets share a point.
///
/// Returns the complex and the subset behind each vertex.
pub fn kfold_cech_complex(cloud: &PointCloud, k: usize, r: f64, maxdim: usize) -> Result<(SimplicialComplex, Vec<Vec<u32>>)> {
    if k == 0 {
        return Err(Error::InvalidInput("k must be at least 1".into()));
    }
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::InvalidInput(format!("radius must be positive and finite, got {r}")));
    }
    let cloud = cloud.expanded();
    let n = cloud.len();
    let count = binomial(n, k);
    if count > KFOLD_SUBSET_GUARD {
        return Err(Error::GuardExceeded(format!("C({n}, {k}) = {count} subsets; limit is {KFOLD_SUBSET_GUARD}")));
    }
    let mut cache = MebCache { cloud: &cloud, radii: HashMap::new() };
    let mut labels = Vec::new();
    for s in k_subsets(n, k) {
        if cache.radius(&s)? < r {
            labels.push(s);
        }
    }
    let m = labels.len();
    let mut nbrs: Vec<Vec<u32>> = vec![Vec::new(); m];
    for a in 0..m {
        for b in a + 1..m {
            if cache.radius(&union(&labels[a], &labels[b]))? < r {
                nbrs[a].push(b as u32);
            }
        }
    }
    // grow simplices one vertex at a time; a failed union prunes its cofaces
    let mut out: Vec<Simplex> = Vec::new();
    let mut stack: Vec<(Simplex, Vec<u32>, Vec<u32>)> =
        (0..m).map(|a| (vec![a as u32], labels[a].clone(), nbrs[a].clone())).collect();
    while let Some((simplex, points, candidates)) = stack.pop() {
        if out.len() >= EXPLICIT_SIMPLEX_GUARD {
            return Err(Error::SizeGuard(format!("k-fold Čech complex exceeds {EXPLICIT_SIMPLEX_GUARD} simplices")));
        }
        if simplex.len() <= maxdim {
            for (pos, &c) in candidates.iter().enumerate() {
                let merged = union(&points, &labels[c as usize]);
                if cache.radius(&merged)? < r {
                    let mut next = simplex.clone();
                    next.push(c);
                    let rest: Vec<u32> =
                        candidates[pos + 1..].iter().copied().filter(|x| nbrs[c as usize].binary_search(x).is_ok()).collect();
                    stack.push((next, merged, rest));
                }
            }
        }
        out.push(simplex);
    }
    Ok((SimplicialComplex::from_simplices_unchecked(out)?, labels))
}

/// `kfold_cech_complex` at the given radii, one complex per radius.
pub fn kfold_cech_filtration(cloud: &PointCloud, k: usize, radii: &[f64], maxdim: usize) -> Result<Vec<SimplicialComplex>> {
    radii.iter().map(|&r| kfold_cech_complex(cloud, k, r, maxdim).map(|c| c.0)).collect()
}

/// Whether `y` lies in the open `r`-balls of at least `k` points of the
/// cloud, counted with multiplicity. With `normalized`, the threshold is
/// `k` times the total multiplicity.
pub fn multicover_contains(cloud: &PointCloud, y: &[f64], k: f64, r: f64, normalized: bool) -> bool {
    let metric = cloud.metric();
    let covered: usize = (0..cloud.len())
        .filter(|&i| metric.dist(y, cloud.point(i)) < r)
        .map(|i| cloud.multiplicities()[i])
        .sum();
    let threshold = if normalized { k * cloud.total_multiplicity() as f64 } else { k };
    covered as f64 >= threshold
}

/// Whether `y` lies within `r` of a vertex of the normalized degree-Čech
/// complex at `(k, r)`.
pub fn dcov_contains(cloud: &PointCloud, y: &[f64], k: f64, r: f64) -> bool {
    let metric = cloud.metric();
    let total = cloud.total_multiplicity() as f64;
    (0..cloud.len()).any(|p| {
        if metric.dist(y, cloud.point(p)) >= r {
            return false;
        }
        // the point itself, its copies and everything whose ball meets its ball
        let closed_degree: usize = (0..cloud.len())
            .filter(|&q| q == p || metric.dist(cloud.point(p), cloud.point(q)) < 2.0 * r)
            .map(|q| cloud.multiplicities()[q])
            .sum();
        closed_degree as f64 >= k * total
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complexes::rips::cech_complex;
    use crate::metric::Metric;

    #[test]
    fn k_one_is_cech() {
        let cloud = PointCloud::new(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.5, 0.8], vec![3.0, 0.0]], Metric::L2).unwrap();
        for r in [0.3, 0.55, 0.6, 1.2, 2.0] {
            let (kf, labels) = kfold_cech_complex(&cloud, 1, r, 2).unwrap();
            let relabeled: Vec<Simplex> =
                kf.iter().map(|s| s.iter().map(|&v| labels[v as usize][0]).collect()).collect();
            let cech = cech_complex(&cloud, r, 2).unwrap();
            assert_eq!(SimplicialComplex::new(relabeled).unwrap(), cech, "r = {r}");
        }
    }

    #[test]
    fn pair_at_k_two() {
        let cloud = PointCloud::new(vec![vec![0.0, 0.0], vec![1.0, 0.0]], Metric::L2).unwrap();
        let (c, _) = kfold_cech_complex(&cloud, 2, 0.6, 2).unwrap();
        assert_eq!((c.count(0), c.count(1)), (1, 0));
        let (c, _) = kfold_cech_complex(&cloud, 3, 0.6, 2).unwrap();
        assert!(c.is_empty());
        let big = PointCloud::new((0..20).map(|i| vec![i as f64]).collect(), Metric::L2).unwrap();
        assert!(matches!(kfold_cech_complex(&big, 10, 1.0, 1), Err(Error::GuardExceeded(_))));
    }

    #[test]
    fn cover_predicates() {
        let cloud =
            PointCloud::with_multiplicities(vec![vec![0.0, 0.0], vec![0.1, 0.0], vec![5.0, 5.0]], vec![2, 1, 1], Metric::L2)
                .unwrap();
        assert!(multicover_contains(&cloud, &[0.0, 0.0], 1.0, 0.01, false));
        assert!(multicover_contains(&cloud, &[0.0, 0.0], 3.0, 0.2, false));
        assert!(!multicover_contains(&cloud, &[0.0, 0.0], 5.0, 100.0, false));
        assert!(multicover_contains(&cloud, &[0.0, 0.0], 0.75, 0.2, true));
        // the outlier has closed degree 1 of 4
        assert!(dcov_contains(&cloud, &[5.0, 5.0], 0.25, 0.1));
        assert!(!dcov_contains(&cloud, &[5.0, 5.0], 0.5, 0.1));
        assert!(dcov_contains(&cloud, &[0.05, 0.0], 0.75, 0.1));
    }
}
