use std::collections::HashSet;

use crate::error::{Error, Result};

/// A simplex as a strictly increasing list of vertex indices.
pub type Simplex = Vec<u32>;

/// Finite simplicial complex, stored by dimension with each dimension sorted
/// lexicographically.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimplicialComplex {
    by_dim: Vec<Vec<Simplex>>,
    lookup: HashSet<Simplex>,
}

impl Default for SimplicialComplex {
    fn default() -> Self {
        SimplicialComplex { by_dim: Vec::new(), lookup: HashSet::new() }
    }
}

impl SimplicialComplex {
    /// Builds a complex from a list that must already be closed under faces.
    /// Vertex lists are sorted; duplicates are dropped.
    pub fn new<I: IntoIterator<Item = Simplex>>(simplices: I) -> Result<Self> {
        let c = Self::from_simplices_unchecked(simplices)?;
        c.check_closed()?;
        Ok(c)
    }

    /// Smallest complex containing every listed simplex.
    pub fn closure<I: IntoIterator<Item = Simplex>>(simplices: I) -> Result<Self> {
        let mut all = HashSet::new();
        for s in simplices {
            let s = normalize(s)?;
            add_faces(&s, &mut all);
        }
        Self::from_simplices_unchecked(all)
    }

    pub(crate) fn from_simplices_unchecked<I: IntoIterator<Item = Simplex>>(simplices: I) -> Result<Self> {
        let mut lookup = HashSet::new();
        for s in simplices {
            lookup.insert(normalize(s)?);
        }
        let mut by_dim: Vec<Vec<Simplex>> = Vec::new();
        for s in &lookup {
            let d = s.len() - 1;
            if by_dim.len() <= d {
                by_dim.resize(d + 1, Vec::new());
            }
            by_dim[d].push(s.clone());
        }
        for layer in &mut by_dim {
            layer.sort();
        }
        Ok(SimplicialComplex { by_dim, lookup })
    }

    fn check_closed(&self) -> Result<()> {
        for s in self.iter() {
            if s.len() < 2 {
                continue;
            }
            for f in facets(s) {
                if !self.lookup.contains(&f) {
                    return Err(Error::InvalidInput(format!("face {f:?} of {s:?} is missing")));
                }
            }
        }
        Ok(())
    }

    pub fn empty() -> Self {
        Self::default()
    }

    /// Highest dimension present, `None` for the empty complex.
    pub fn dim(&self) -> Option<usize> {
        self.by_dim.len().checked_sub(1)
    }

    pub fn simplices(&self, d: usize) -> &[Simplex] {
        self.by_dim.get(d).map_or(&[], |v| v.as_slice())
    }

    pub fn count(&self, d: usize) -> usize {
        self.simplices(d).len()
    }

    pub fn len(&self) -> usize {
        self.lookup.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lookup.is_empty()
    }

    pub fn contains(&self, s: &[u32]) -> bool {
        self.lookup.contains(s)
    }

    /// Vertices in increasing order.
    pub fn vertices(&self) -> Vec<u32> {
        self.simplices(0).iter().map(|s| s[0]).collect()
    }

    /// All simplices, by dimension then lexicographically.
    pub fn iter(&self) -> impl Iterator<Item = &Simplex> {
        self.by_dim.iter().flatten()
    }

    pub fn is_subcomplex_of(&self, other: &SimplicialComplex) -> bool {
        self.iter().all(|s| other.contains(s))
    }

    /// Same complex without simplices above dimension `d`.
    pub fn truncated(&self, d: usize) -> SimplicialComplex {
        let by_dim: Vec<Vec<Simplex>> = self.by_dim.iter().take(d + 1).cloned().collect();
        let lookup = by_dim.iter().flatten().cloned().collect();
        SimplicialComplex { by_dim, lookup }
    }
}

fn normalize(mut s: Simplex) -> Result<Simplex> {
    if s.is_empty() {
        return Err(Error::InvalidInput("empty simplex".into()));
    }
    s.sort_unstable();
    if s.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidInput(format!("repeated vertex in {s:?}")));
    }
    Ok(s)
}

fn add_faces(s: &Simplex, out: &mut HashSet<Simplex>) {
    if !out.insert(s.clone()) || s.len() == 1 {
        return;
    }
    for f in facets(s) {
        add_faces(&f, out);
    }
}

/// Codimension-one faces, each omitting one vertex (in order of the omitted
/// position).
pub fn facets(s: &[u32]) -> impl Iterator<Item = Simplex> + '_ {
    (0..s.len()).map(move |i| {
        let mut f = Vec::with_capacity(s.len() - 1);
        f.extend_from_slice(&s[..i]);
        f.extend_from_slice(&s[i + 1..]);
        f
    })
}

/// Calls `f` on every clique of size at most `maxdim + 1` of the graph on
/// `0..n` whose (upper) adjacency lists are `nbrs` (neighbors larger than the
/// vertex, sorted). Cliques are produced with sorted vertex lists.
pub(crate) fn for_each_clique<F: FnMut(&[u32])>(nbrs: &[Vec<u32>], maxdim: usize, mut f: F) {
    fn extend<F: FnMut(&[u32])>(nbrs: &[Vec<u32>], clique: &mut Vec<u32>, candidates: &[u32], maxdim: usize, f: &mut F) {
        f(clique);
        if clique.len() > maxdim {
            return;
        }
        for (idx, &w) in candidates.iter().enumerate() {
            let next: Vec<u32> = intersect_sorted(&candidates[idx + 1..], &nbrs[w as usize]);
            clique.push(w);
            extend(nbrs, clique, &next, maxdim, f);
            clique.pop();
        }
    }
    let mut clique = Vec::with_capacity(maxdim + 1);
    for v in 0..nbrs.len() {
        clique.push(v as u32);
        extend(nbrs, &mut clique, &nbrs[v], maxdim, &mut f);
        clique.pop();
    }
}

pub(crate) fn intersect_sorted(a: &[u32], b: &[u32]) -> Vec<u32> {
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::new();
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}
