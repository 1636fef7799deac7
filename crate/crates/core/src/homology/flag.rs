//! Persistent cohomology of flag filtrations in degrees 0 and 1.
//!
//! Degree 0 is Kruskal's algorithm with the elder rule. Degree 1 reduces the
//! coboundary matrix of edges against triangles, which are never stored:
//! coboundaries are enumerated on the fly, apparent pairs are taken without
//! reduction, and merge edges from degree 0 are cleared. The reduction also
//! yields a cocycle for every bar, which the rank computations restrict to
//! smaller slices.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};

/// A flag filtration given by vertex and edge entries; `INFINITY` means
/// absent. Edge entries must dominate the entries of their endpoints.
#[derive(Debug, Clone)]
pub struct FlagFiltration {
    pub n: usize,
    pub vertex: Vec<f64>,
    /// Row-major `n × n`, symmetric; the diagonal is ignored.
    pub edge: Vec<f64>,
}

/// Bars of a flag filtration. `cocycles[b]`, when requested, is a cocycle
/// representing `h1[b]` at every parameter in the bar.
#[derive(Debug, Clone, Default)]
pub struct FlagBars {
    pub h0: Vec<(f64, f64)>,
    pub h1: Vec<(f64, f64)>,
    pub cocycles: Vec<Vec<(u32, u32)>>,
}

type Key = (u64, u64);

/// Bits of `x` whose unsigned order is the numeric order, negatives included.
fn ordered_bits(x: f64) -> u64 {
    let b = x.to_bits();
    if b >> 63 == 1 {
        !b
    } else {
        b | 1 << 63
    }
}

fn from_ordered_bits(b: u64) -> f64 {
    f64::from_bits(if b >> 63 == 1 { b & !(1 << 63) } else { !b })
}

fn binom2(x: u64) -> u64 {
    x * x.saturating_sub(1) / 2
}

fn binom3(x: u64) -> u64 {
    if x < 3 {
        0
    } else {
        x * (x - 1) * (x - 2) / 6
    }
}

/// Colexicographic index of the triangle on three distinct vertices.
fn triangle_index(a: u32, b: u32, c: u32) -> u64 {
    let mut t = [a as u64, b as u64, c as u64];
    t.sort_unstable();
    binom3(t[2]) + binom2(t[1]) + t[0]
}

struct Edges {
    u: Vec<u32>,
    v: Vec<u32>,
    entry: Vec<f64>,
}

pub fn flag_persistence(f: &FlagFiltration, want_cocycles: bool) -> FlagBars {
    let n = f.n;
    let mut order: Vec<(f64, u64, u32, u32)> = Vec::new();
    for v in 0..n {
        for u in 0..v {
            let e = f.edge[u * n + v];
            if e.is_finite() {
                order.push((e, binom2(v as u64) + u as u64, u as u32, v as u32));
            }
        }
    }
    order.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let edges = Edges {
        u: order.iter().map(|x| x.2).collect(),
        v: order.iter().map(|x| x.3).collect(),
        entry: order.iter().map(|x| x.0).collect(),
    };
    drop(order);

    let mut out = FlagBars::default();

    // degree 0
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let older = |a: usize, b: usize| (f.vertex[a], a) < (f.vertex[b], b);
    let mut cleared = vec![false; edges.u.len()];
    for i in 0..edges.u.len() {
        let ru = find(&mut parent, edges.u[i] as usize);
        let rv = find(&mut parent, edges.v[i] as usize);
        if ru == rv {
            continue;
        }
        cleared[i] = true;
        let (keep, die) = if older(ru, rv) { (ru, rv) } else { (rv, ru) };
        out.h0.push((f.vertex[die], edges.entry[i]));
        parent[die] = keep;
    }
    for v in 0..n {
        if f.vertex[v].is_finite() && find(&mut parent, v) == v {
            out.h0.push((f.vertex[v], f64::INFINITY));
        }
    }
    out.h0.retain(|b| b.0 < b.1);

    // degree 1
    let key_of = |entry: f64, idx: u64| -> Key { (ordered_bits(entry), idx) };
    let coboundary = |i: usize, heap: &mut BinaryHeap<Reverse<Key>>| {
        let (u, v, e) = (edges.u[i] as usize, edges.v[i] as usize, edges.entry[i]);
        for w in 0..n {
            if w == u || w == v {
                continue;
            }
            let (a, b) = (f.edge[u * n + w], f.edge[v * n + w]);
            if a.is_finite() && b.is_finite() {
                heap.push(Reverse(key_of(e.max(a).max(b), triangle_index(u as u32, v as u32, w as u32))));
            }
        }
    };
    let pop_pivot = |heap: &mut BinaryHeap<Reverse<Key>>| -> Option<Key> {
        while let Some(Reverse(top)) = heap.pop() {
            let mut odd = true;
            while heap.peek() == Some(&Reverse(top)) {
                heap.pop();
                odd = !odd;
            }
            if odd {
                heap.push(Reverse(top));
                return Some(top);
            }
        }
        None
    };

    let mut pivots: HashMap<u64, u32> = HashMap::new();
    let mut columns: HashMap<u32, Vec<u32>> = HashMap::new();
    let mut h1 = Vec::new();
    for i in (0..edges.u.len()).rev() {
        if cleared[i] {
            continue;
        }
        let (u, v, e) = (edges.u[i] as usize, edges.v[i] as usize, edges.entry[i]);
        // apparent pair: the first cofacet (in colex order) at the edge's
        // own entry is the smallest, and if nobody owns it we are done
        let mut apparent = None;
        for w in 0..n {
            if w == u || w == v {
                continue;
            }
            let (a, b) = (f.edge[u * n + w], f.edge[v * n + w]);
            if a.is_finite() && b.is_finite() && a <= e && b <= e {
                apparent = Some(triangle_index(u as u32, v as u32, w as u32));
                break;
            }
        }
        if let Some(t) = apparent {
            if !pivots.contains_key(&t) {
                pivots.insert(t, i as u32);
                // zero-length bar, but its column may be needed later
                columns.insert(i as u32, vec![i as u32]);
                continue;
            }
        }

        let mut heap = BinaryHeap::new();
        let mut v_col: Vec<u32> = vec![i as u32];
        coboundary(i, &mut heap);
        let death = loop {
            match pop_pivot(&mut heap) {
                None => break None,
                Some((bits, t)) => match pivots.get(&t) {
                    Some(&j) => {
                        // the pivot stays on the heap and cancels against `other`'s
                        let other = &columns[&j];
                        for &x in other {
                            coboundary(x as usize, &mut heap);
                        }
                        v_col.extend_from_slice(other);
                    }
                    None => break Some((from_ordered_bits(bits), t)),
                },
            }
        };
        v_col.sort_unstable();
        let mut reduced = Vec::with_capacity(v_col.len());
        for x in v_col {
            if reduced.last() == Some(&x) {
                reduced.pop();
            } else {
                reduced.push(x);
            }
        }
        let d = match death {
            Some((d, t)) => {
                pivots.insert(t, i as u32);
                d
            }
            None => f64::INFINITY,
        };
        if e < d {
            h1.push((e, d, reduced.clone()));
        }
        if death.is_some() {
            columns.insert(i as u32, reduced);
        }
    }
    h1.reverse();
    for (b, d, col) in h1 {
        out.h1.push((b, d));
        if want_cocycles {
            out.cocycles.push(col.into_iter().map(|x| (edges.u[x as usize], edges.v[x as usize])).collect());
        }
    }
    out
}
