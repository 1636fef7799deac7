//! Sparse linear algebra over Z/2. Vectors are strictly increasing index
//! lists; the pivot of a vector is its largest index.

use std::collections::HashMap;

/// Symmetric difference of two sorted index lists.
pub fn xor_sorted(a: &[u32], b: &[u32]) -> Vec<u32> {
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::with_capacity(a.len() + b.len());
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// Incrementally built echelon basis of a subspace.
#[derive(Debug, Default, Clone)]
pub struct Echelon {
    pivots: HashMap<u32, Vec<u32>>,
}

impl Echelon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Reduces `v` against the basis.
    pub fn reduce(&self, mut v: Vec<u32>) -> Vec<u32> {
        while let Some(&p) = v.last() {
            match self.pivots.get(&p) {
                Some(b) => v = xor_sorted(&v, b),
                None => break,
            }
        }
        v
    }

    /// Adds `v` to the span; returns whether it was independent.
    pub fn insert(&mut self, v: Vec<u32>) -> bool {
        let v = self.reduce(v);
        match v.last() {
            Some(&p) => {
                self.pivots.insert(p, v);
                true
            }
            None => false,
        }
    }

    pub fn contains(&self, v: Vec<u32>) -> bool {
        self.reduce(v).is_empty()
    }
}

/// Rank of a family of vectors.
pub fn rank<I: IntoIterator<Item = Vec<u32>>>(vectors: I) -> usize {
    let mut e = Echelon::new();
    for v in vectors {
        e.insert(v);
    }
    e.rank()
}
