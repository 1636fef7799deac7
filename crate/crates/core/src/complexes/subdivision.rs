use std::collections::HashMap;

use super::bifiltration::BifilteredComplex;
use super::grades::{Bigrade, RConvention};
use super::simplicial::{Simplex, SimplicialComplex};
use crate::error::{Error, Result};

/// Inputs with more simplices than this are refused.
pub const SUBDIVISION_GUARD: usize = 1 << 16;

/// Chains `σ_1 ⊂ … ⊂ σ_m` of simplices (as indices into `simplices`), of
/// length at most `max_len`, each listed from the smallest simplex up.
fn flags(simplices: &[Simplex], max_len: usize) -> Vec<Vec<usize>> {
    let index: HashMap<&Simplex, usize> = simplices.iter().enumerate().map(|(i, s)| (s, i)).collect();
    let faces: Vec<Vec<usize>> = simplices
        .iter()
        .map(|s| {
            // proper nonempty faces present in the complex
            let d = s.len();
            (1u64..(1u64 << d) - 1)
                .filter_map(|mask| {
                    let f: Simplex = (0..d).filter(|&b| mask >> b & 1 == 1).map(|b| s[b]).collect();
                    index.get(&f).copied()
                })
                .collect()
        })
        .collect();
    let mut out = Vec::new();
    fn grow(top: usize, chain: &mut Vec<usize>, faces: &[Vec<usize>], max_len: usize, out: &mut Vec<Vec<usize>>) {
        let mut flag = chain.clone();
        flag.reverse();
        out.push(flag);
        if chain.len() == max_len {
            return;
        }
        for &f in &faces[top] {
            chain.push(f);
            grow(f, chain, faces, max_len, out);
            chain.pop();
        }
    }
    for top in 0..simplices.len() {
        let mut chain = vec![top];
        grow(top, &mut chain, &faces, max_len, &mut out);
    }
    out
}

fn check_size(n: usize) -> Result<()> {
    if n > SUBDIVISION_GUARD {
        return Err(Error::SizeGuard(format!("{n} simplices; subdivision is limited to {SUBDIVISION_GUARD}")));
    }
    Ok(())
}

/// Barycentric subdivision: one vertex per simplex (vertex `i` stands for
/// `labels[i]`) and one simplex per flag.
pub fn barycentric_subdivision(complex: &SimplicialComplex) -> Result<(SimplicialComplex, Vec<Simplex>)> {
    check_size(complex.len())?;
    let labels: Vec<Simplex> = complex.iter().cloned().collect();
    let max_len = complex.dim().map_or(0, |d| d + 1);
    let simplices = flags(&labels, max_len).into_iter().map(|f| {
        let mut s: Simplex = f.into_iter().map(|x| x as u32).collect();
        s.sort_unstable();
        s
    });
    Ok((SimplicialComplex::from_simplices_unchecked(simplices)?, labels))
}

/// Subdivision bifiltration of a 1-parameter filtration (open convention).
///
/// Vertex `i` of the result is the simplex `labels[i]`; the flag
/// `σ_1 ⊂ … ⊂ σ_m` enters at `(dim σ_1 + 1, entry(σ_m))`, with the density
/// divided by the number of original vertices when `normalize` is set. Flags
/// longer than `maxdim + 1` are not built.
pub fn subdivision_bifiltration(
    filtered: &[(Simplex, f64)],
    maxdim: usize,
    normalize: bool,
) -> Result<(BifilteredComplex, Vec<Simplex>)> {
    check_size(filtered.len())?;
    let mut items: Vec<(Simplex, f64)> = filtered
        .iter()
        .map(|(s, v)| {
            let mut s = s.clone();
            s.sort_unstable();
            (s, *v)
        })
        .collect();
    items.sort_by(|a, b| a.0.len().cmp(&b.0.len()).then_with(|| a.0.cmp(&b.0)));
    let entry: HashMap<&Simplex, f64> = items.iter().map(|(s, v)| (s, *v)).collect();
    for (s, v) in &items {
        if s.len() < 2 {
            continue;
        }
        for f in super::simplicial::facets(s) {
            match entry.get(&f) {
                Some(&fv) if fv <= *v => {}
                _ => return Err(Error::MonotonicityViolation(format!("face {f:?} of {s:?} is missing or enters later"))),
            }
        }
    }
    let n_vertices = items.iter().filter(|(s, _)| s.len() == 1).count().max(1);
    let scale = if normalize { n_vertices as f64 } else { 1.0 };
    let labels: Vec<Simplex> = items.iter().map(|(s, _)| s.clone()).collect();
    let entries = flags(&labels, maxdim + 1)
        .into_iter()
        .map(|f| {
            let k = labels[f[0]].len() as f64 / scale;
            let r = items[*f.last().unwrap()].1;
            let mut s: Simplex = f.into_iter().map(|x| x as u32).collect();
            s.sort_unstable();
            (s, vec![Bigrade::new(k, r)])
        })
        .collect();
    Ok((BifilteredComplex::new(labels.len(), entries, RConvention::Open)?, labels))
}
