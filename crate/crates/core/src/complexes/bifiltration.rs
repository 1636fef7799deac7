use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::grades::{minimal_antichain, Bigrade, GridSpec, RConvention};
use super::simplicial::{facets, Simplex, SimplicialComplex};
use crate::error::{Error, Result};

/// Simplices with their minimal bigrades of appearance.
///
/// Simplices are kept sorted by dimension, then lexicographically; each grade
/// list is a minimal antichain sorted by descending `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct BifilteredComplex {
    n_vertices: usize,
    simplices: Vec<Simplex>,
    grades: Vec<Vec<Bigrade>>,
    convention: RConvention,
    index: HashMap<Simplex, usize>,
}

#[derive(Serialize, Deserialize)]
struct JsonSimplex {
    verts: Simplex,
    grades: Vec<Bigrade>,
}

#[derive(Serialize, Deserialize)]
struct JsonBifiltration {
    #[serde(default = "schema_tag")]
    schema: String,
    n_vertices: usize,
    #[serde(default = "default_convention")]
    convention: RConvention,
    simplices: Vec<JsonSimplex>,
}

fn schema_tag() -> String {
    crate::io::SCHEMA.to_string()
}

fn default_convention() -> RConvention {
    RConvention::Open
}

impl BifilteredComplex {
    /// Validates vertex range, non-empty grade sets, presence of every facet and
    /// face monotonicity; grade sets are reduced to minimal antichains.
    pub fn new(n_vertices: usize, entries: Vec<(Simplex, Vec<Bigrade>)>, convention: RConvention) -> Result<Self> {
        let mut merged: HashMap<Simplex, Vec<Bigrade>> = HashMap::new();
        for (mut s, g) in entries {
            s.sort_unstable();
            if s.is_empty() || s.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidInput(format!("bad simplex {s:?}")));
            }
            if s.iter().any(|&v| v as usize >= n_vertices) {
                return Err(Error::InvalidInput(format!("simplex {s:?} uses a vertex >= {n_vertices}")));
            }
            if g.is_empty() {
                return Err(Error::InvalidInput(format!("simplex {s:?} has no grades")));
            }
            merged.entry(s).or_default().extend(g);
        }
        let mut pairs: Vec<(Simplex, Vec<Bigrade>)> =
            merged.into_iter().map(|(s, g)| (s, minimal_antichain(g))).collect();
        pairs.sort_by(|a, b| a.0.len().cmp(&b.0.len()).then_with(|| a.0.cmp(&b.0)));
        let c = Self::assemble(n_vertices, pairs, convention);
        c.validate()?;
        Ok(c)
    }

    fn assemble(n_vertices: usize, pairs: Vec<(Simplex, Vec<Bigrade>)>, convention: RConvention) -> Self {
        let index = pairs.iter().enumerate().map(|(i, p)| (p.0.clone(), i)).collect();
        let (simplices, grades) = pairs.into_iter().unzip();
        BifilteredComplex { n_vertices, simplices, grades, convention, index }
    }

    /// Face closure and face monotonicity: every grade of a simplex dominates
    /// some grade of each facet.
    pub fn validate(&self) -> Result<()> {
        for (s, gs) in self.simplices.iter().zip(&self.grades) {
            if s.len() < 2 {
                continue;
            }
            for f in facets(s) {
                let Some(&fi) = self.index.get(&f) else {
                    return Err(Error::InvalidInput(format!("face {f:?} of {s:?} is missing")));
                };
                for g in gs {
                    if !self.grades[fi].iter().any(|h| h.leq(*g)) {
                        return Err(Error::MonotonicityViolation(format!(
                            "{s:?} appears at ({}, {}) before its face {f:?}",
                            g.k, g.r
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn convention(&self) -> RConvention {
        self.convention
    }

    pub fn len(&self) -> usize {
        self.simplices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.simplices.is_empty()
    }

    pub fn simplices(&self) -> &[Simplex] {
        &self.simplices
    }

    pub fn grades(&self, idx: usize) -> &[Bigrade] {
        &self.grades[idx]
    }

    pub fn index_of(&self, s: &[u32]) -> Option<usize> {
        self.index.get(s).copied()
    }

    pub fn present(&self, idx: usize, at: Bigrade) -> bool {
        self.grades[idx].iter().any(|&g| self.convention.present(g, at))
    }

    /// Indices of the simplices present at `at`.
    pub fn slice_indices(&self, at: Bigrade) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.present(i, at)).collect()
    }

    pub fn slice(&self, at: Bigrade) -> SimplicialComplex {
        SimplicialComplex::from_simplices_unchecked(self.slice_indices(at).into_iter().map(|i| self.simplices[i].clone()))
            .expect("stored simplices are valid")
    }

    /// Critical radius of a simplex along the horizontal line at density `k`:
    /// the least `r` over grades with `g.k >= k`.
    pub fn entry_at_k(&self, idx: usize, k: f64) -> Option<f64> {
        self.grades[idx].iter().filter(|g| g.k >= k).map(|g| g.r).reduce(f64::min)
    }

    /// The 1-parameter filtration at fixed density `k` (entries per the
    /// complex's convention).
    pub fn row_filtration(&self, k: f64) -> Vec<(Simplex, f64)> {
        (0..self.len())
            .filter_map(|i| self.entry_at_k(i, k).map(|r| (self.simplices[i].clone(), r)))
            .collect()
    }

    /// Rounds every grade up onto `grid` and re-minimalizes. Simplices whose
    /// every grade lies past the last `r` line are dropped.
    pub fn coarsen(&self, grid: &GridSpec) -> BifilteredComplex {
        let pairs: Vec<(Simplex, Vec<Bigrade>)> = self
            .simplices
            .iter()
            .zip(&self.grades)
            .filter_map(|(s, gs)| {
                let rounded: Vec<Bigrade> = gs.iter().filter_map(|&g| grid.round_up_from(g, self.convention)).collect();
                (!rounded.is_empty()).then(|| (s.clone(), minimal_antichain(rounded)))
            })
            .collect();
        Self::assemble(self.n_vertices, pairs, RConvention::Closed)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let doc = JsonBifiltration {
            schema: schema_tag(),
            n_vertices: self.n_vertices,
            convention: self.convention,
            simplices: self
                .simplices
                .iter()
                .zip(&self.grades)
                .map(|(s, g)| JsonSimplex { verts: s.clone(), grades: g.clone() })
                .collect(),
        };
        serde_json::to_value(doc).expect("serializable")
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        let doc: JsonBifiltration = serde_json::from_value(value.clone())?;
        Self::new(
            doc.n_vertices,
            doc.simplices.into_iter().map(|s| (s.verts, s.grades)).collect(),
            doc.convention,
        )
    }
}
