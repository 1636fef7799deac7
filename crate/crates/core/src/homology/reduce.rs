//! Boundary-matrix reduction for explicitly listed filtrations.

use std::collections::HashMap;

use super::barcode::Barcode;
use super::linalg::xor_sorted;
use crate::complexes::simplicial::{facets, Simplex, SimplicialComplex};
use crate::error::{Error, Result};

/// Persistence pairing of a 1-parameter filtration.
#[derive(Debug, Clone)]
pub struct Persistence {
    simplices: Vec<Simplex>,
    values: Vec<f64>,
    pairs: Vec<(usize, usize)>,
    essential: Vec<usize>,
}

impl Persistence {
    /// Simplices in filtration order: by value, then dimension, then
    /// lexicographically.
    pub fn simplices(&self) -> &[Simplex] {
        &self.simplices
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Barcode in degree `i`, zero-length bars dropped.
    pub fn barcode(&self, i: usize) -> Barcode {
        let mut bars: Vec<(f64, f64)> = self
            .pairs
            .iter()
            .filter(|&&(b, _)| self.simplices[b].len() == i + 1)
            .map(|&(b, d)| (self.values[b], self.values[d]))
            .collect();
        bars.extend(
            self.essential
                .iter()
                .filter(|&&b| self.simplices[b].len() == i + 1)
                .map(|&b| (self.values[b], f64::INFINITY)),
        );
        Barcode::new(i, bars)
    }
}

/// Reduces the boundary matrix of `filtration` over Z/2, processing
/// dimensions from the top down so that columns paired as births in the
/// dimension above are cleared without work.
pub fn reduce_filtration(filtration: &[(Simplex, f64)]) -> Result<Persistence> {
    let mut items: Vec<(Simplex, f64)> = Vec::with_capacity(filtration.len());
    for (s, v) in filtration {
        let mut s = s.clone();
        s.sort_unstable();
        if s.is_empty() || s.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidInput(format!("bad simplex {s:?}")));
        }
        if v.is_nan() {
            return Err(Error::InvalidInput(format!("NaN entry for {s:?}")));
        }
        items.push((s, *v));
    }
    items.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.len().cmp(&b.0.len())).then_with(|| a.0.cmp(&b.0)));
    let index: HashMap<&Simplex, usize> = items.iter().enumerate().map(|(i, (s, _))| (s, i)).collect();
    if index.len() != items.len() {
        return Err(Error::InvalidInput("duplicate simplex in filtration".into()));
    }

    let n = items.len();
    let maxdim = items.iter().map(|(s, _)| s.len() - 1).max().unwrap_or(0);
    let mut by_dim: Vec<Vec<usize>> = vec![Vec::new(); maxdim + 1];
    let mut boundary: Vec<Vec<u32>> = vec![Vec::new(); n];
    for (j, (s, v)) in items.iter().enumerate() {
        by_dim[s.len() - 1].push(j);
        if s.len() < 2 {
            continue;
        }
        let mut col = Vec::with_capacity(s.len());
        for f in facets(s) {
            match index.get(&f) {
                Some(&fi) if fi < j => col.push(fi as u32),
                Some(_) => {
                    return Err(Error::MonotonicityViolation(format!(
                        "{s:?} enters at {v} before its face {f:?}"
                    )))
                }
                None => return Err(Error::MonotonicityViolation(format!("face {f:?} of {s:?} is missing"))),
            }
        }
        col.sort_unstable();
        boundary[j] = col;
    }

    let mut is_low = vec![false; n];
    let mut pairs = Vec::new();
    let mut nonzero = vec![false; n];
    for d in (1..=maxdim).rev() {
        let mut pivot_of: HashMap<u32, Vec<u32>> = HashMap::new();
        for &j in &by_dim[d] {
            if is_low[j] {
                continue;
            }
            let mut col = std::mem::take(&mut boundary[j]);
            while let Some(&low) = col.last() {
                match pivot_of.get(&low) {
                    Some(other) => col = xor_sorted(&col, other),
                    None => break,
                }
            }
            if let Some(&low) = col.last() {
                is_low[low as usize] = true;
                nonzero[j] = true;
                pairs.push((low as usize, j));
                pivot_of.insert(low, col);
            }
        }
    }
    let essential = (0..n).filter(|&j| !is_low[j] && !nonzero[j]).collect();
    pairs.sort_unstable();
    let (simplices, values) = items.into_iter().unzip();
    Ok(Persistence { simplices, values, pairs, essential })
}

pub fn persistence_barcode(filtration: &[(Simplex, f64)], i: usize) -> Result<Barcode> {
    Ok(reduce_filtration(filtration)?.barcode(i))
}

/// `dim H_i` of a complex over Z/2.
pub fn homology_dim(complex: &SimplicialComplex, i: usize) -> usize {
    let filtration: Vec<(Simplex, f64)> = complex.iter().map(|s| (s.clone(), 0.0)).collect();
    reduce_filtration(&filtration).expect("complexes are closed").barcode(i).len()
}

/// Rank of `H_i(sub) → H_i(sup)`, via the two-step filtration that puts `sub`
/// at 0 and the rest of `sup` at 1.
pub fn induced_rank(sub: &SimplicialComplex, sup: &SimplicialComplex, i: usize) -> Result<usize> {
    if !sub.is_subcomplex_of(sup) {
        return Err(Error::NotASubcomplex);
    }
    let filtration: Vec<(Simplex, f64)> =
        sup.iter().map(|s| (s.clone(), if sub.contains(s) { 0.0 } else { 1.0 })).collect();
    let bars = reduce_filtration(&filtration)?.barcode(i);
    Ok(bars.bars.iter().filter(|&&(b, d)| b == 0.0 && d.is_infinite()).count())
}
