//! Empirical measures, Prohorov and Wasserstein distances, and the measure
//! bifiltration.
//!
//! Measures live on a shared [`FiniteMetricSpace`]: atoms are row indices of
//! the space. Thickenings are open, `A^δ = {z : d(z, A) < δ}`.
//!
//! For discrete measures the supremum over closed sets in the Prohorov
//! condition `μ(A) ≤ η(A^δ) + δ` is attained on subsets of the support of
//! `μ`: removing a point of `A` outside the support leaves `μ(A)` unchanged and
//! can only shrink `A^δ`, and `η(A^δ)` only depends on which atoms of `η` lie
//! within distance `< δ` of `A`.

pub mod flow;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::{FiniteMetricSpace, PointCloud};
use flow::Network;

/// Support size above which [`prohorov_bruteforce`] refuses to run.
pub const BRUTE_FORCE_GUARD: usize = 22;

/// Weighted atoms over a ground space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalMeasure {
    pub atoms: Vec<usize>,
    pub weights: Vec<f64>,
}

impl EmpiricalMeasure {
    pub fn new(atoms: Vec<usize>, weights: Vec<f64>) -> Result<Self> {
        if atoms.len() != weights.len() {
            return Err(Error::InvalidInput("atoms and weights differ in length".into()));
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidInput("weights must be finite and nonnegative".into()));
        }
        let m = Self { atoms, weights };
        if m.total_mass() <= 0.0 {
            return Err(Error::InvalidInput("total mass must be positive".into()));
        }
        Ok(m)
    }

    /// Mass `1/len` on each listed atom; repeated atoms accumulate.
    pub fn uniform(atoms: Vec<usize>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::EmptyInput);
        }
        let w = 1.0 / atoms.len() as f64;
        let n = atoms.len();
        Self::new(atoms, vec![w; n])
    }

    /// Mass 1 per listed atom.
    pub fn counting(atoms: Vec<usize>) -> Result<Self> {
        let n = atoms.len();
        Self::new(atoms, vec![1.0; n])
    }

    pub fn total_mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn is_normalized(&self) -> bool {
        (self.total_mass() - 1.0).abs() <= 1e-12
    }

    /// Distinct atoms with accumulated positive weight, sorted by index.
    pub fn support(&self) -> Vec<(usize, f64)> {
        let mut pairs: Vec<(usize, f64)> = self.atoms.iter().cloned().zip(self.weights.iter().cloned()).collect();
        pairs.sort_by_key(|p| p.0);
        let mut out: Vec<(usize, f64)> = Vec::with_capacity(pairs.len());
        for (a, w) in pairs {
            match out.last_mut() {
                Some(last) if last.0 == a => last.1 += w,
                _ => out.push((a, w)),
            }
        }
        out.retain(|p| p.1 > 0.0);
        out
    }

    fn check_ground(&self, space: &FiniteMetricSpace) -> Result<()> {
        match self.atoms.iter().find(|&&a| a >= space.len()) {
            Some(a) => Err(Error::InvalidInput(format!("atom {a} outside a space of {} points", space.len()))),
            None => Ok(()),
        }
    }
}

/// Uniform measure on the rows of a cloud, weighted by multiplicity.
pub fn cloud_measure(cloud: &PointCloud) -> EmpiricalMeasure {
    let total = cloud.total_multiplicity() as f64;
    EmpiricalMeasure {
        atoms: (0..cloud.len()).collect(),
        weights: cloud.multiplicities().iter().map(|&m| m as f64 / total).collect(),
    }
}

/// Exact Prohorov distance by enumerating all subsets of each support.
pub fn prohorov_bruteforce(space: &FiniteMetricSpace, mu: &EmpiricalMeasure, eta: &EmpiricalMeasure) -> Result<f64> {
    mu.check_ground(space)?;
    eta.check_ground(space)?;
    let (a, b) = (mu.support(), eta.support());
    let mut union: Vec<usize> = a.iter().chain(&b).map(|p| p.0).collect();
    union.sort_unstable();
    union.dedup();
    if union.len() > BRUTE_FORCE_GUARD {
        return Err(Error::GuardExceeded(format!(
            "combined support {} exceeds {BRUTE_FORCE_GUARD}",
            union.len()
        )));
    }
    Ok(directed_bruteforce(space, &a, &b).max(directed_bruteforce(space, &b, &a)))
}

/// Smallest δ with `μ(A) ≤ η(A^δ) + δ` for every `A ⊆ supp μ`.
fn directed_bruteforce(space: &FiniteMetricSpace, mu: &[(usize, f64)], eta: &[(usize, f64)]) -> f64 {
    struct Walk<'a> {
        space: &'a FiniteMetricSpace,
        mu: &'a [(usize, f64)],
        eta: &'a [(usize, f64)],
        best: f64,
        scratch: Vec<(f64, f64)>,
    }

    impl Walk<'_> {
        fn visit(&mut self, next: usize, mass: f64, mind: &[f64]) {
            if mass > 0.0 {
                let inf = self.infimum(mass, mind);
                self.best = self.best.max(inf);
            }
            for i in next..self.mu.len() {
                let (atom, w) = self.mu[i];
                let updated: Vec<f64> = self
                    .eta
                    .iter()
                    .zip(mind)
                    .map(|(&(z, _), &d)| d.min(self.space.get(atom, z)))
                    .collect();
                self.visit(i + 1, mass + w, &updated);
            }
        }

        /// Infimum of feasible δ for one set A with mass `mass` and atom
        /// distances `mind` to A. On `(t_j, t_{j+1}]` the thickening holds the
        /// atoms at distance `<= t_j`.
        fn infimum(&mut self, mass: f64, mind: &[f64]) -> f64 {
            self.scratch.clear();
            self.scratch.extend(mind.iter().cloned().zip(self.eta.iter().map(|p| p.1)));
            self.scratch.sort_by(|x, y| x.0.total_cmp(&y.0));
            let mut best = mass; // t = 0 with nothing at distance 0 yet counted
            let mut covered = 0.0;
            let mut i = 0;
            while i < self.scratch.len() {
                let t = self.scratch[i].0;
                while i < self.scratch.len() && self.scratch[i].0 == t {
                    covered += self.scratch[i].1;
                    i += 1;
                }
                best = best.min(t.max(mass - covered));
            }
            best.max(0.0)
        }
    }

    let mut walk = Walk { space, mu, eta, best: 0.0, scratch: Vec::new() };
    walk.visit(0, 0.0, &vec![f64::INFINITY; eta.len()]);
    walk.best
}

/// Prohorov distance via max-flow feasibility.
///
/// The flow from `μ` to `η` along pairs at distance `< δ` equals
/// `M_μ − max_A (μ(A) − η(A^δ))` by max-flow/min-cut, so δ is feasible iff
/// the max flow is at least `max(M_μ, M_η) − δ`. The flow is constant on the
/// intervals between consecutive pairwise distances, so a binary search over
/// those intervals yields the exact infimum; `tol` only bounds the accepted
/// rounding.
pub fn prohorov_flow(space: &FiniteMetricSpace, mu: &EmpiricalMeasure, eta: &EmpiricalMeasure, tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(Error::InvalidInput("tol must be positive".into()));
    }
    mu.check_ground(space)?;
    eta.check_ground(space)?;
    let (a, b) = (mu.support(), eta.support());
    let total = mu.total_mass().max(eta.total_mass());

    let mut cuts: Vec<f64> = vec![0.0];
    for &(x, _) in &a {
        for &(y, _) in &b {
            cuts.push(space.get(x, y));
        }
    }
    cuts.sort_by(|x, y| x.total_cmp(y));
    cuts.dedup();

    let flow_at = |threshold: f64| {
        let (s, t) = (a.len() + b.len(), a.len() + b.len() + 1);
        let mut net = Network::new(a.len() + b.len() + 2);
        for (i, &(_, w)) in a.iter().enumerate() {
            net.add_edge(s, i, w, 0.0);
        }
        for (j, &(_, w)) in b.iter().enumerate() {
            net.add_edge(a.len() + j, t, w, 0.0);
        }
        for (i, &(x, _)) in a.iter().enumerate() {
            for (j, &(y, _)) in b.iter().enumerate() {
                if space.get(x, y) <= threshold {
                    net.add_edge(i, a.len() + j, f64::INFINITY, 0.0);
                }
            }
        }
        net.max_flow(s, t)
    };
    let candidate = |j: usize| -> (f64, bool) {
        let deficit = (total - flow_at(cuts[j])).max(0.0);
        let upper = cuts.get(j + 1).cloned().unwrap_or(f64::INFINITY);
        (cuts[j].max(deficit), deficit <= upper)
    };

    let (mut lo, mut hi) = (0usize, cuts.len() - 1);
    let mut best = None;
    while lo < hi {
        let mid = (lo + hi) / 2;
        let (value, ok) = candidate(mid);
        if ok {
            best = Some(value);
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    // `best` was computed at `lo` unless the search never succeeded before the
    // last interval, which is always feasible.
    Ok(match best {
        Some(v) if hi == lo => v,
        _ => candidate(lo).0,
    })
}

/// Wasserstein-p distance by min-cost flow on the complete bipartite graph.
pub fn wasserstein_p(space: &FiniteMetricSpace, mu: &EmpiricalMeasure, eta: &EmpiricalMeasure, p: f64) -> Result<f64> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::InvalidInput(format!("p must be a finite real >= 1, got {p}")));
    }
    mu.check_ground(space)?;
    eta.check_ground(space)?;
    let (ma, mb) = (mu.total_mass(), eta.total_mass());
    if (ma - mb).abs() > 1e-9 {
        return Err(Error::MassMismatch(ma, mb));
    }
    let (a, b) = (mu.support(), eta.support());
    let (s, t) = (a.len() + b.len(), a.len() + b.len() + 1);
    let mut net = Network::new(a.len() + b.len() + 2);
    for (i, &(_, w)) in a.iter().enumerate() {
        net.add_edge(s, i, w, 0.0);
    }
    for (j, &(_, w)) in b.iter().enumerate() {
        net.add_edge(a.len() + j, t, w, 0.0);
    }
    for (i, &(x, _)) in a.iter().enumerate() {
        for (j, &(y, _)) in b.iter().enumerate() {
            net.add_edge(i, a.len() + j, f64::INFINITY, space.get(x, y).powf(p));
        }
    }
    let (_, cost) = net.min_cost_max_flow(s, t);
    Ok(cost.max(0.0).powf(1.0 / p))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrWassReport {
    pub prohorov: f64,
    pub wasserstein: f64,
    pub p: f64,
    pub sqrt_bound: f64,
    pub power_bound: f64,
    pub pass: bool,
}

/// Checks `d_Pr ≤ min(W_p^{1/2}, W_p^{p/(p+1)})`.
pub fn check_pr_wass_bounds(space: &FiniteMetricSpace, mu: &EmpiricalMeasure, eta: &EmpiricalMeasure, p: f64) -> Result<PrWassReport> {
    let prohorov = prohorov_flow(space, mu, eta, 1e-12)?;
    let wasserstein = wasserstein_p(space, mu, eta, p)?;
    let sqrt_bound = wasserstein.sqrt();
    let power_bound = wasserstein.powf(p / (p + 1.0));
    Ok(PrWassReport {
        prohorov,
        wasserstein,
        p,
        sqrt_bound,
        power_bound,
        pass: prohorov <= sqrt_bound.min(power_bound) + 1e-9,
    })
}

/// Upper bound on the Prohorov distance between uniform measures on nested
/// finite sets `X ⊆ Y`: `|Y \ X| / |X|`.
pub fn nested_prohorov_bound(x_len: usize, y_len: usize) -> f64 {
    (y_len - x_len) as f64 / x_len as f64
}

/// Gromov-Prohorov upper bound from an explicit common embedding: the
/// Prohorov distance between the uniform pushforwards of `x_map` and `y_map`.
pub fn gromov_prohorov_upper_bound(ground: &FiniteMetricSpace, x_map: &[usize], y_map: &[usize]) -> Result<f64> {
    let mu = EmpiricalMeasure::uniform(x_map.to_vec())?;
    let eta = EmpiricalMeasure::uniform(y_map.to_vec())?;
    prohorov_flow(ground, &mu, &eta, 1e-12)
}

/// Membership of the atom `y` in the measure bifiltration at `(k, r)`: the open
/// ball `B(y, r)` has mass at least `k`.
pub fn measure_bifiltration_contains(space: &FiniteMetricSpace, mu: &EmpiricalMeasure, y: usize, k: f64, r: f64) -> bool {
    let mass: f64 = mu
        .atoms
        .iter()
        .zip(&mu.weights)
        .filter(|(&a, _)| space.get(y, a) < r)
        .map(|(_, w)| w)
        .sum();
    mass >= k
}

/// Same as [`measure_bifiltration_contains`] for an arbitrary point of the
/// ambient space of `cloud`, with atoms indexing rows of `cloud`.
pub fn measure_bifiltration_contains_point(cloud: &PointCloud, mu: &EmpiricalMeasure, y: &[f64], k: f64, r: f64) -> bool {
    let metric = cloud.metric();
    let mass: f64 = mu
        .atoms
        .iter()
        .zip(&mu.weights)
        .filter(|(&a, _)| metric.dist(y, cloud.point(a)) < r)
        .map(|(_, w)| w)
        .sum();
    mass >= k
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityViolation {
    pub query: usize,
    pub k: f64,
    pub r: f64,
    /// `"mu->eta"` or `"eta->mu"`.
    pub direction: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub delta: f64,
    pub checked: usize,
    pub violations: Vec<StabilityViolation>,
}

/// Checks `B(μ)_(k,r) ⊆ B(η)_(k−δ, r+δ)` and the symmetric inclusion at
/// every query atom and grid point with `k > δ`.
pub fn verify_measure_stability(
    space: &FiniteMetricSpace,
    mu: &EmpiricalMeasure,
    eta: &EmpiricalMeasure,
    delta: f64,
    grid: &[(f64, f64)],
    queries: &[usize],
) -> StabilityReport {
    let mut report = StabilityReport { delta, checked: 0, violations: Vec::new() };
    for &y in queries {
        for &(k, r) in grid {
            if k <= delta {
                continue;
            }
            for (from, to, direction) in [(mu, eta, "mu->eta"), (eta, mu, "eta->mu")] {
                report.checked += 1;
                if measure_bifiltration_contains(space, from, y, k, r)
                    && !measure_bifiltration_contains(space, to, y, k - delta, r + delta)
                {
                    report.violations.push(StabilityViolation { query: y, k, r, direction: direction.into() });
                }
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(points: &[f64]) -> FiniteMetricSpace {
        let rows = points.iter().map(|a| points.iter().map(|b| (a - b).abs()).collect()).collect();
        FiniteMetricSpace::from_matrix(rows).unwrap()
    }

    #[test]
    fn dirac_pairs() {
        for (d, want) in [(0.3, 0.3), (2.0, 1.0)] {
            let s = line(&[0.0, d]);
            let mu = EmpiricalMeasure::new(vec![0], vec![1.0]).unwrap();
            let eta = EmpiricalMeasure::new(vec![1], vec![1.0]).unwrap();
            let brute = prohorov_bruteforce(&s, &mu, &eta).unwrap();
            let flow = prohorov_flow(&s, &mu, &eta, 1e-9).unwrap();
            assert!((brute - want).abs() < 1e-12, "{brute}");
            assert!((flow - want).abs() < 1e-12, "{flow}");
        }
    }

    #[test]
    fn identical_measures() {
        let s = line(&[0.0, 1.0, 2.5]);
        let mu = EmpiricalMeasure::new(vec![0, 1, 2], vec![0.2, 0.3, 0.5]).unwrap();
        assert_eq!(prohorov_bruteforce(&s, &mu, &mu).unwrap(), 0.0);
        assert_eq!(prohorov_flow(&s, &mu, &mu, 1e-9).unwrap(), 0.0);
        assert_eq!(wasserstein_p(&s, &mu, &mu, 2.0).unwrap(), 0.0);
    }

    #[test]
    fn guard() {
        let s = line(&(0..23).map(|i| i as f64).collect::<Vec<_>>());
        let mu = EmpiricalMeasure::uniform((0..12).collect()).unwrap();
        let eta = EmpiricalMeasure::uniform((11..23).collect()).unwrap();
        assert!(matches!(prohorov_bruteforce(&s, &mu, &eta), Err(Error::GuardExceeded(_))));
    }

    #[test]
    fn wasserstein_square() {
        // unit square corners a=(0,0) b=(1,0) c=(0,1) d=(1,1); mu on {a,d}, eta on {b,c}
        let pts: [[f64; 2]; 4] = [[0.0, 0.0], [1.0, 1.0], [1.0, 0.0], [0.0, 1.0]];
        let rows = pts
            .iter()
            .map(|p| pts.iter().map(|q| ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)).sqrt()).collect())
            .collect();
        let s = FiniteMetricSpace::from_matrix(rows).unwrap();
        let mu = EmpiricalMeasure::new(vec![0, 1], vec![0.5, 0.5]).unwrap();
        let eta = EmpiricalMeasure::new(vec![2, 3], vec![0.5, 0.5]).unwrap();
        // both matchings move each half unit of mass by 1
        let w = wasserstein_p(&s, &mu, &eta, 1.0).unwrap();
        assert!((w - 1.0).abs() < 1e-12);
    }

    #[test]
    fn wasserstein_mass_mismatch() {
        let s = line(&[0.0, 1.0]);
        let mu = EmpiricalMeasure::new(vec![0], vec![1.0]).unwrap();
        let eta = EmpiricalMeasure::new(vec![1], vec![0.5]).unwrap();
        assert!(matches!(wasserstein_p(&s, &mu, &eta, 1.0), Err(Error::MassMismatch(..))));
    }

    #[test]
    fn pr_wass_dirac() {
        let s = line(&[0.0, 4.0]);
        let mu = EmpiricalMeasure::new(vec![0], vec![1.0]).unwrap();
        let eta = EmpiricalMeasure::new(vec![1], vec![1.0]).unwrap();
        let rep = check_pr_wass_bounds(&s, &mu, &eta, 1.0).unwrap();
        assert_eq!(rep.prohorov, 1.0);
        assert_eq!(rep.wasserstein, 4.0);
        assert!(rep.pass);
    }

    #[test]
    fn measure_membership() {
        let s = line(&[0.0, 1.0]);
        let mu = EmpiricalMeasure::new(vec![0, 1], vec![0.25, 0.75]).unwrap();
        assert!(measure_bifiltration_contains(&s, &mu, 0, 0.25, 1e-6));
        assert!(!measure_bifiltration_contains(&s, &mu, 0, 1.5, 10.0));
        assert!(!measure_bifiltration_contains(&s, &mu, 0, 1.0, 1.0));
        assert!(measure_bifiltration_contains(&s, &mu, 0, 1.0, 1.0 + 1e-9));
    }

    #[test]
    fn stability_identity() {
        let s = line(&[0.0, 0.4, 1.1]);
        let mu = EmpiricalMeasure::uniform(vec![0, 1, 2]).unwrap();
        let grid: Vec<(f64, f64)> = (1..=5).flat_map(|i| (1..=5).map(move |j| (i as f64 / 5.0, j as f64 / 4.0))).collect();
        let rep = verify_measure_stability(&s, &mu, &mu, 0.0, &grid, &[0, 1, 2]);
        assert!(rep.violations.is_empty());
        assert!(rep.checked > 0);
    }
}
