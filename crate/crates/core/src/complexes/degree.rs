//! Normalized degree bifiltrations.
//!
//! A vertex of degree `d` (in the full 1-skeleton at scale `r`) over `N`
//! points qualifies at every density `k <= (1 + d) / N`; a simplex is present
//! at `(k, r)` when it is present in the underlying filtration at `r` and all
//! of its vertices qualify.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use super::bifiltration::BifilteredComplex;
use super::grades::{minimal_antichain, Bigrade, GridSpec, RConvention};
use super::rips::{cech_filtration, rips_filtration};
use super::simplicial::{Simplex, SimplicialComplex};
use crate::error::{Error, Result};
use crate::homology::flag::{FlagBars, FlagFiltration};
use crate::metric::{FiniteMetricSpace, PointCloud};

/// Vertices of degree at least `k − 1` in the 1-skeleton of `complex`, with
/// every simplex spanned by them.
pub fn degree_filtration(complex: &SimplicialComplex, k: f64) -> SimplicialComplex {
    let mut degree: HashMap<u32, usize> = complex.vertices().into_iter().map(|v| (v, 0)).collect();
    for e in complex.simplices(1) {
        *degree.get_mut(&e[0]).unwrap() += 1;
        *degree.get_mut(&e[1]).unwrap() += 1;
    }
    let keep = |v: &u32| degree[v] as f64 >= k - 1.0;
    SimplicialComplex::from_simplices_unchecked(complex.iter().filter(|s| s.iter().all(keep)).cloned())
        .expect("subsets of a valid complex")
}

/// Degree bifiltration of a 1-parameter filtration on vertices `0..n`, whose
/// entries are read in the open convention (present at `r` iff `r > entry`).
///
/// Without `radii` the exact staircases are recorded. With `radii`, the
/// bifiltration is sampled at those scales and returned in the closed
/// convention on them.
pub fn degree_bifiltration(n: usize, filtered: &[(Simplex, f64)], radii: Option<&[f64]>) -> Result<BifilteredComplex> {
    if n == 0 {
        return Err(Error::EmptyInput);
    }
    let mut incident: Vec<Vec<f64>> = vec![Vec::new(); n];
    for (s, e) in filtered {
        if s.len() == 2 {
            for &v in s {
                incident.get_mut(v as usize).ok_or_else(|| Error::InvalidInput(format!("vertex {v} >= {n}")))?.push(*e);
            }
        }
    }
    for list in &mut incident {
        list.sort_by(f64::total_cmp);
    }
    let norm = n as f64;
    // qualifying density of `s` when edges with entry `<= rho` (or `< rho`) count
    let density = |s: &Simplex, rho: f64, strict: bool| -> f64 {
        s.iter()
            .map(|&v| {
                let list = &incident[v as usize];
                let deg = if strict { list.partition_point(|&x| x < rho) } else { list.partition_point(|&x| x <= rho) };
                (1 + deg) as f64 / norm
            })
            .fold(f64::INFINITY, f64::min)
    };

    let mut entries = Vec::with_capacity(filtered.len());
    match radii {
        None => {
            for (s, e) in filtered {
                let mut candidates: Vec<f64> = vec![*e];
                for &v in s {
                    let list = incident.get(v as usize).ok_or_else(|| Error::InvalidInput(format!("vertex {v} >= {n}")))?;
                    candidates.extend(list.iter().copied().filter(|x| x > e));
                }
                candidates.sort_by(f64::total_cmp);
                candidates.dedup();
                let grades = candidates.into_iter().map(|rho| Bigrade::new(density(s, rho, false), rho)).collect();
                entries.push((s.clone(), minimal_antichain(grades)));
            }
            BifilteredComplex::new(n, entries, RConvention::Open)
        }
        Some(radii) => {
            for (s, e) in filtered {
                let grades: Vec<Bigrade> =
                    radii.iter().filter(|&&r| r > *e).map(|&r| Bigrade::new(density(s, r, true), r)).collect();
                if !grades.is_empty() {
                    entries.push((s.clone(), minimal_antichain(grades)));
                }
            }
            BifilteredComplex::new(n, entries, RConvention::Closed)
        }
    }
}

/// Explicit degree-Rips bifiltration of a metric space, one vertex per row.
pub fn degree_rips_bifiltration(space: &FiniteMetricSpace, maxdim: usize, rcritical: Option<&[f64]>) -> Result<BifilteredComplex> {
    degree_bifiltration(space.len(), &rips_filtration(space, maxdim)?, rcritical)
}

/// Explicit degree-Čech bifiltration of the expanded cloud; sampled at the
/// grid's radii when a grid is given.
pub fn degree_cech_bifiltration(cloud: &PointCloud, maxdim: usize, grid: Option<&GridSpec>) -> Result<BifilteredComplex> {
    let filtration = cech_filtration(cloud, maxdim)?;
    degree_bifiltration(cloud.total_multiplicity(), &filtration, grid.map(|g| g.r()))
}

pub const FLAG_KIND: &str = "degree-rips-flag";

#[derive(serde::Serialize, serde::Deserialize)]
struct FlagJson {
    #[serde(default)]
    schema: String,
    kind: String,
    n: usize,
    total: usize,
    convention: RConvention,
    grades: Vec<Vec<Bigrade>>,
    radius: Vec<Option<f64>>,
    #[serde(default)]
    grid: Option<(Vec<f64>, Vec<f64>)>,
}

/// Degree-Rips bifiltration kept implicit as a weighted flag complex.
///
/// Each distinct row is one vertex carrying its multiplicity. Copies of a
/// point share every neighbor and are adjacent at every positive scale, so
/// collapsing them changes no slice's homotopy type while the degree counts
/// still see every copy.
#[derive(Debug)]
pub struct DegreeRips {
    n: usize,
    total: usize,
    radius: Vec<f64>,
    grades: Vec<Vec<Bigrade>>,
    convention: RConvention,
    grid: Option<GridSpec>,
    cache: Mutex<HashMap<u64, Arc<FlagBars>>>,
}

impl Clone for DegreeRips {
    fn clone(&self) -> Self {
        DegreeRips {
            n: self.n,
            total: self.total,
            radius: self.radius.clone(),
            grades: self.grades.clone(),
            convention: self.convention,
            grid: self.grid.clone(),
            cache: Mutex::new(HashMap::new()),
        }
    }
}

impl DegreeRips {
    pub fn from_cloud(cloud: &PointCloud) -> Result<Self> {
        Self::from_space(&cloud.row_distances(), cloud.multiplicities().to_vec())
    }

    /// `weights[v]` copies of row `v` of `space`.
    pub fn from_space(space: &FiniteMetricSpace, weights: Vec<usize>) -> Result<Self> {
        let n = space.len();
        if n == 0 {
            return Err(Error::EmptyInput);
        }
        if weights.len() != n || weights.iter().any(|&w| w == 0) {
            return Err(Error::InvalidInput("need one positive weight per row".into()));
        }
        let total: usize = weights.iter().sum();
        let mut radius = vec![0.0; n * n];
        for u in 0..n {
            for v in 0..n {
                radius[u * n + v] = space.get(u, v) / 2.0;
            }
        }
        let grades = (0..n)
            .map(|v| {
                let mut by_radius: Vec<(f64, usize)> =
                    (0..n).filter(|&u| u != v).map(|u| (radius[v * n + u], weights[u])).collect();
                by_radius.sort_by(|a, b| a.0.total_cmp(&b.0));
                let mut deg = weights[v] - 1;
                let mut staircase = Vec::new();
                let mut idx = 0;
                let mut rho = 0.0;
                loop {
                    while idx < by_radius.len() && by_radius[idx].0 <= rho {
                        deg += by_radius[idx].1;
                        idx += 1;
                    }
                    staircase.push(Bigrade::new((1 + deg) as f64 / total as f64, rho));
                    match by_radius.get(idx) {
                        Some(&(next, _)) => rho = next,
                        None => break,
                    }
                }
                minimal_antichain(staircase)
            })
            .collect();
        Ok(DegreeRips {
            n,
            total,
            radius,
            grades,
            convention: RConvention::Open,
            grid: None,
            cache: Mutex::new(HashMap::new()),
        })
    }

    /// Reads every grade with `convention`: `Closed` gives the variant built
    /// from closed balls, whose grades coincide with the open ones.
    pub fn with_convention(self, convention: RConvention) -> Self {
        DegreeRips { convention, cache: Mutex::new(HashMap::new()), ..self }
    }

    /// The flag JSON: vertex grades, the upper triangle of edge radii row by
    /// row (`null` for edges never present) and the grid when coarsened.
    pub fn to_json(&self) -> serde_json::Value {
        let n = self.n;
        let radius: Vec<Option<f64>> = (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .map(|(u, v)| Some(self.radius[u * n + v]).filter(|x| x.is_finite()))
            .collect();
        serde_json::to_value(FlagJson {
            schema: crate::io::SCHEMA.into(),
            kind: FLAG_KIND.into(),
            n,
            total: self.total,
            convention: self.convention,
            grades: self.grades.clone(),
            radius,
            grid: self.grid.as_ref().map(|g| (g.k().to_vec(), g.r().to_vec())),
        })
        .expect("serializable")
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        let doc: FlagJson = serde_json::from_value(value.clone())?;
        if doc.kind != FLAG_KIND {
            return Err(Error::Parse(format!("expected kind {FLAG_KIND}, got {}", doc.kind)));
        }
        let n = doc.n;
        if n == 0 {
            return Err(Error::EmptyInput);
        }
        if doc.grades.len() != n || doc.radius.len() != n * (n - 1) / 2 || doc.total < n {
            return Err(Error::Parse("flag JSON sizes do not match n".into()));
        }
        if doc.grades.iter().any(|g| g.is_empty()) {
            return Err(Error::Parse("every vertex needs a grade".into()));
        }
        let mut radius = vec![0.0; n * n];
        let mut it = doc.radius.into_iter();
        for u in 0..n {
            for v in u + 1..n {
                let x = it.next().flatten().unwrap_or(f64::INFINITY);
                if x < 0.0 || x.is_nan() {
                    return Err(Error::Parse(format!("bad radius {x} on edge ({u}, {v})")));
                }
                radius[u * n + v] = x;
                radius[v * n + u] = x;
            }
        }
        let grid = doc.grid.map(|(k, r)| GridSpec::new(k, r)).transpose()?;
        Ok(DegreeRips {
            n,
            total: doc.total,
            radius,
            grades: doc.grades.into_iter().map(minimal_antichain).collect(),
            convention: doc.convention,
            grid,
            cache: Mutex::new(HashMap::new()),
        })
    }

    /// Number of (distinct) vertices.
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Total multiplicity, the normalizing count.
    pub fn total_weight(&self) -> usize {
        self.total
    }

    pub fn convention(&self) -> RConvention {
        self.convention
    }

    pub fn grid(&self) -> Option<&GridSpec> {
        self.grid.as_ref()
    }

    pub fn vertex_grades(&self, v: usize) -> &[Bigrade] {
        &self.grades[v]
    }

    /// Entry radius of edge `uv` (half the distance, or its rounding).
    pub fn edge_radius(&self, u: usize, v: usize) -> f64 {
        self.radius[u * self.n + v]
    }

    /// Rounds every vertex grade and edge radius up onto `grid` (closed
    /// convention). Edges longer than the last grid radius are dropped.
    pub fn coarsen(&self, grid: &GridSpec) -> DegreeRips {
        let rs = grid.r();
        let c = self.convention;
        let round_r = |x: f64| -> f64 {
            let j = rs.partition_point(|&r| !c.reached(x, r));
            rs.get(j).copied().unwrap_or(f64::INFINITY)
        };
        let radius = self.radius.iter().map(|&x| round_r(x)).collect();
        let grades = self
            .grades
            .iter()
            .map(|gs| minimal_antichain(gs.iter().filter_map(|&g| grid.round_up_from(g, c)).collect()))
            .collect();
        DegreeRips {
            n: self.n,
            total: self.total,
            radius,
            grades,
            convention: RConvention::Closed,
            grid: Some(grid.clone()),
            cache: Mutex::new(HashMap::new()),
        }
    }

    /// Entry radius of vertex `v` along the row at density `k`.
    pub fn vertex_entry(&self, v: usize, k: f64) -> f64 {
        let gs = &self.grades[v];
        // grades run by descending k and descending r
        match gs.partition_point(|g| g.k >= k) {
            0 => f64::INFINITY,
            p => gs[p - 1].r,
        }
    }

    /// The 1-parameter flag filtration along the row at density `k`.
    pub fn row(&self, k: f64) -> FlagFiltration {
        let n = self.n;
        let vertex: Vec<f64> = (0..n).map(|v| self.vertex_entry(v, k)).collect();
        let mut edge = vec![f64::INFINITY; n * n];
        for u in 0..n {
            if vertex[u].is_infinite() {
                continue;
            }
            for v in u + 1..n {
                let e = self.radius[u * n + v].max(vertex[u]).max(vertex[v]);
                edge[u * n + v] = e;
                edge[v * n + u] = e;
            }
        }
        FlagFiltration { n, vertex, edge }
    }

    /// Row persistence at density `k` with cocycles, cached.
    pub fn row_bars(&self, k: f64) -> Arc<FlagBars> {
        // on a coarsened object every k shares its row with the next grid line up
        let k = match &self.grid {
            Some(g) => match g.k().partition_point(|&x| x >= k) {
                0 => k,
                i => g.k()[i - 1],
            },
            None => k,
        };
        if let Some(hit) = self.cache.lock().unwrap().get(&k.to_bits()) {
            return hit.clone();
        }
        let bars = Arc::new(crate::homology::flag::flag_persistence(&self.row(k), true));
        self.cache.lock().unwrap().insert(k.to_bits(), bars.clone());
        bars
    }

    pub fn clear_cache(&self) {
        self.cache.lock().unwrap().clear();
    }

    /// Vertex and edge presence at `at`.
    pub fn slice_graph(&self, at: Bigrade) -> (Vec<bool>, Vec<bool>) {
        let row = self.row(at.k);
        let c = self.convention;
        let vertices = row.vertex.iter().map(|&e| e.is_finite() && c.reached(e, at.r)).collect();
        let edges = row.edge.iter().map(|&e| e.is_finite() && c.reached(e, at.r)).collect();
        (vertices, edges)
    }

    /// The flag complex at `at`, up to dimension `maxdim`.
    pub fn slice(&self, at: Bigrade, maxdim: usize) -> SimplicialComplex {
        let n = self.n;
        let (vertices, edges) = self.slice_graph(at);
        let nbrs: Vec<Vec<u32>> = (0..n)
            .map(|u| {
                if !vertices[u] {
                    return Vec::new();
                }
                (u + 1..n).filter(|&v| edges[u * n + v]).map(|v| v as u32).collect()
            })
            .collect();
        let mut out = Vec::new();
        // the enumeration seeds every vertex, present or not
        super::simplicial::for_each_clique(&nbrs, maxdim, |c| {
            if vertices[c[0] as usize] {
                out.push(c.to_vec())
            }
        });
        SimplicialComplex::from_simplices_unchecked(out).expect("cliques are valid simplices")
    }

    /// Explicit bifiltration of the flag complex on the distinct rows.
    pub fn to_bifiltered(&self, maxdim: usize) -> Result<BifilteredComplex> {
        let n = self.n;
        let nbrs: Vec<Vec<u32>> = (0..n)
            .map(|u| (u + 1..n).filter(|&v| self.radius[u * n + v].is_finite()).map(|v| v as u32).collect())
            .collect();
        let mut cliques = Vec::new();
        super::simplicial::for_each_clique(&nbrs, maxdim, |c| cliques.push(c.to_vec()));
        if cliques.len() > super::rips::EXPLICIT_SIMPLEX_GUARD {
            return Err(Error::SizeGuard(format!("{} simplices", cliques.len())));
        }
        let mut entries = Vec::with_capacity(cliques.len());
        for s in cliques {
            let mut radius = 0.0f64;
            for (a, &u) in s.iter().enumerate() {
                for &v in &s[a + 1..] {
                    radius = radius.max(self.radius[u as usize * n + v as usize]);
                }
            }
            // joins of one grade per vertex, lifted to the edge radius
            let mut grades = vec![Bigrade::new(f64::INFINITY, radius)];
            for &v in &s {
                let mut next = Vec::new();
                for g in &grades {
                    for h in &self.grades[v as usize] {
                        next.push(Bigrade::new(g.k.min(h.k), g.r.max(h.r)));
                    }
                }
                grades = minimal_antichain(next);
            }
            if !grades.is_empty() {
                entries.push((s, grades));
            }
        }
        BifilteredComplex::new(n, entries, self.convention)
    }
}
