use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Multiset of half-open intervals `[birth, death)` in one homology degree.
/// Infinite deaths are `f64::INFINITY` in memory and `null` in JSON.
#[derive(Debug, Clone, PartialEq)]
pub struct Barcode {
    pub degree: usize,
    pub bars: Vec<(f64, f64)>,
}

#[derive(Serialize, Deserialize)]
struct BarcodeJson {
    #[serde(default)]
    schema: Option<String>,
    degree: usize,
    bars: Vec<(f64, Option<f64>)>,
}

impl Barcode {
    /// Drops zero-length bars and sorts by (birth, death).
    pub fn new(degree: usize, mut bars: Vec<(f64, f64)>) -> Self {
        bars.retain(|&(b, d)| b < d);
        bars.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.total_cmp(&y.1)));
        Barcode { degree, bars }
    }

    pub fn len(&self) -> usize {
        self.bars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bars.is_empty()
    }

    pub fn infinite(&self) -> usize {
        self.bars.iter().filter(|b| b.1.is_infinite()).count()
    }

    /// Number of bars containing `t` as `[birth, death)`.
    pub fn rank_at(&self, t: f64) -> usize {
        self.bars.iter().filter(|&&(b, d)| b <= t && t < d).count()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let doc = BarcodeJson {
            schema: Some(crate::io::SCHEMA.into()),
            degree: self.degree,
            bars: self.bars.iter().map(|&(b, d)| (b, d.is_finite().then_some(d))).collect(),
        };
        serde_json::to_value(doc).expect("serializable")
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        let doc: BarcodeJson = serde_json::from_value(value.clone())?;
        Ok(Barcode::new(doc.degree, doc.bars.into_iter().map(|(b, d)| (b, d.unwrap_or(f64::INFINITY))).collect()))
    }
}

/// Exact bottleneck distance. Infinite bars are matched among themselves by
/// sorted births; finite bars by binary search over candidate costs with a
/// bipartite matching test in which every bar may also go to the diagonal at
/// half its length.
pub fn bottleneck_distance(b1: &Barcode, b2: &Barcode) -> Result<f64> {
    let split = |b: &Barcode| -> (Vec<(f64, f64)>, Vec<f64>) {
        let mut fin = Vec::new();
        let mut inf = Vec::new();
        for &(s, d) in &b.bars {
            if d.is_infinite() {
                inf.push(s);
            } else {
                fin.push((s, d));
            }
        }
        inf.sort_by(f64::total_cmp);
        (fin, inf)
    };
    let (f1, i1) = split(b1);
    let (f2, i2) = split(b2);
    if i1.len() != i2.len() {
        return Err(Error::InfiniteMismatch(i1.len(), i2.len()));
    }
    let inf_cost = i1.iter().zip(&i2).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);

    let pair = |a: (f64, f64), b: (f64, f64)| (a.0 - b.0).abs().max((a.1 - b.1).abs());
    let diag = |a: (f64, f64)| (a.1 - a.0) / 2.0;
    let mut candidates: Vec<f64> = vec![0.0];
    for &a in &f1 {
        candidates.push(diag(a));
        for &b in &f2 {
            candidates.push(pair(a, b));
        }
    }
    candidates.extend(f2.iter().map(|&b| diag(b)));
    candidates.sort_by(f64::total_cmp);
    candidates.dedup();

    // Left: bars of f1 then diagonal copies of f2; right: bars of f2 then
    // diagonal copies of f1. Diagonal-to-diagonal edges are free.
    let (n1, n2) = (f1.len(), f2.len());
    let feasible = |eps: f64| -> bool {
        let n = n1 + n2;
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
        for i in 0..n1 {
            for j in 0..n2 {
                if pair(f1[i], f2[j]) <= eps {
                    adj[i].push(j);
                }
            }
            if diag(f1[i]) <= eps {
                adj[i].push(n2 + i);
            }
        }
        for j in 0..n2 {
            if diag(f2[j]) <= eps {
                adj[n1 + j].push(j);
            }
            adj[n1 + j].extend(n2..n2 + n1);
        }
        perfect_matching(&adj, n)
    };
    let (mut lo, mut hi) = (0usize, candidates.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if feasible(candidates[mid]) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Ok(candidates[lo].max(inf_cost))
}

/// Kuhn's augmenting paths on a square bipartite graph.
fn perfect_matching(adj: &[Vec<usize>], n: usize) -> bool {
    fn augment(u: usize, adj: &[Vec<usize>], seen: &mut [bool], owner: &mut [usize]) -> bool {
        for &v in &adj[u] {
            if seen[v] {
                continue;
            }
            seen[v] = true;
            if owner[v] == usize::MAX || augment(owner[v], adj, seen, owner) {
                owner[v] = u;
                return true;
            }
        }
        false
    }
    let mut owner = vec![usize::MAX; n];
    for u in 0..n {
        let mut seen = vec![false; n];
        if !augment(u, adj, &mut seen, &mut owner) {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn endpoint_shift() {
        let a = Barcode::new(0, vec![(0.0, 2.0)]);
        let b = Barcode::new(0, vec![(0.0, 3.0)]);
        assert_eq!(bottleneck_distance(&a, &b).unwrap(), 1.0);
        assert_eq!(bottleneck_distance(&a, &a).unwrap(), 0.0);
    }

    #[test]
    fn diagonal_and_infinite() {
        let a = Barcode::new(1, vec![(0.0, 0.4), (1.0, f64::INFINITY)]);
        let b = Barcode::new(1, vec![(1.5, f64::INFINITY)]);
        assert_eq!(bottleneck_distance(&a, &b).unwrap(), 0.5);
        let c = Barcode::new(1, vec![]);
        assert_eq!(bottleneck_distance(&a, &c), Err(Error::InfiniteMismatch(1, 0)));
    }

    #[test]
    fn json_roundtrip() {
        let a = Barcode::new(1, vec![(0.5, f64::INFINITY), (0.1, 0.2), (0.3, 0.3)]);
        assert_eq!(a.len(), 2);
        let v = a.to_json();
        assert_eq!(v["bars"][1][1], serde_json::Value::Null);
        assert_eq!(Barcode::from_json(&v).unwrap(), a);
    }
}
