//! Module queries on the implicit degree-Rips bifiltration.
//!
//! Ranks go through cohomology: over a field, `rank(H_i(S) → H_i(T))` equals
//! the rank of the restriction `H^i(T) → H^i(S)`. A basis of `H^1(T)` comes
//! from the row persistence cocycles alive at `T`. A 1-cocycle restricted to
//! `S` is put in canonical form against a spanning forest of `S` (potentials
//! propagated along tree edges from each root); the residual on the
//! remaining edges vanishes exactly for coboundaries, so it is a faithful
//! coordinate vector for `H^1(S)`. In degree 0 the basis is the component
//! indicators and the coordinates are values on the components of `S`.

use std::collections::VecDeque;

use super::barcode::Barcode;
use super::flag::{flag_persistence, FlagFiltration};
use super::linalg::rank;
use super::module::{require_leq, Bifiltration, Line};
use crate::complexes::degree::DegreeRips;
use crate::complexes::grades::{Bigrade, RConvention};
use crate::error::{Error, Result};

fn check_degree(i: usize) -> Result<()> {
    if i <= 1 {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("the flag engine computes degrees 0 and 1, not {i}")))
    }
}

/// Spanning forest of one slice's 1-skeleton.
struct SliceForest {
    n: usize,
    edges: Vec<bool>,
    root: Vec<u32>,
    /// Vertices in BFS order with their tree parent (`u32::MAX` for roots).
    order: Vec<(u32, u32)>,
}

impl SliceForest {
    fn new(bif: &DegreeRips, at: Bigrade) -> Self {
        let n = bif.len();
        let (vertices, edges) = bif.slice_graph(at);
        let mut root = vec![u32::MAX; n];
        let mut order = Vec::new();
        for s in 0..n {
            if !vertices[s] || root[s] != u32::MAX {
                continue;
            }
            root[s] = s as u32;
            order.push((s as u32, u32::MAX));
            let mut queue = VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                for v in 0..n {
                    if v != u && edges[u * n + v] && root[v] == u32::MAX {
                        root[v] = s as u32;
                        order.push((v as u32, u as u32));
                        queue.push_back(v);
                    }
                }
            }
        }
        SliceForest { n, edges, root, order }
    }

    fn components(&self) -> impl Iterator<Item = u32> + '_ {
        self.order.iter().filter(|p| p.1 == u32::MAX).map(|p| p.0)
    }

    /// Coordinates of a 1-cocycle (given by its edge set) in `H^1` of this
    /// slice.
    fn canonical_1(&self, cocycle: &[(u32, u32)]) -> Vec<u32> {
        let n = self.n;
        let mut omega = vec![false; n * n];
        for &(u, v) in cocycle {
            omega[u as usize * n + v as usize] = true;
            omega[v as usize * n + u as usize] = true;
        }
        let mut f = vec![false; n];
        for &(v, p) in &self.order {
            if p != u32::MAX {
                f[v as usize] = f[p as usize] ^ omega[p as usize * n + v as usize];
            }
        }
        let mut out = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                let idx = u * n + v;
                if self.edges[idx] && (omega[idx] ^ f[u] ^ f[v]) {
                    out.push(idx as u32);
                }
            }
        }
        out
    }

    /// Coordinates of the indicator of `other`'s component `c` in `H^0` of
    /// this slice: the components of this slice inside `c`.
    fn canonical_0(&self, other: &SliceForest, c: u32) -> Vec<u32> {
        self.components().filter(|&s| other.root[s as usize] == c).collect()
    }
}

/// A basis of `H^i` at one slice, in a form that restricts to subslices.
enum CoBasis {
    Components(SliceForest),
    Cocycles(Vec<Vec<(u32, u32)>>),
}

impl DegreeRips {
    fn cobasis(&self, at: Bigrade, i: usize) -> CoBasis {
        if i == 0 {
            return CoBasis::Components(SliceForest::new(self, at));
        }
        let bars = self.row_bars(at.k);
        let c = self.convention();
        CoBasis::Cocycles(
            bars.h1
                .iter()
                .zip(&bars.cocycles)
                .filter(|(b, _)| c.alive(b.0, b.1, at.r))
                .map(|(_, z)| z.clone())
                .collect(),
        )
    }

    /// Coordinates in `H^i(sub)` of the restriction of each basis element.
    fn restrict(&self, basis: &CoBasis, sub: &SliceForest) -> Vec<Vec<u32>> {
        match basis {
            CoBasis::Components(top) => top.components().map(|c| sub.canonical_0(top, c)).collect(),
            CoBasis::Cocycles(zs) => zs.iter().map(|z| sub.canonical_1(z)).collect(),
        }
    }
}

impl Bifiltration for DegreeRips {
    fn convention(&self) -> RConvention {
        DegreeRips::convention(self)
    }

    fn row_dims(&self, k: f64, rs: &[f64], i: usize) -> Result<Vec<usize>> {
        check_degree(i)?;
        let bars = self.row_bars(k);
        let list = if i == 0 { &bars.h0 } else { &bars.h1 };
        let c = DegreeRips::convention(self);
        Ok(rs.iter().map(|&r| list.iter().filter(|&&(b, d)| c.alive(b, d, r)).count()).collect())
    }

    fn joint_rank(&self, sources: &[Bigrade], target: Bigrade, i: usize) -> Result<usize> {
        check_degree(i)?;
        for &s in sources {
            require_leq(s, target)?;
        }
        let basis = self.cobasis(target, i);
        let stride = (self.len() * self.len()) as u32;
        let mut rows: Vec<Vec<u32>> = Vec::new();
        for (q, &s) in sources.iter().enumerate() {
            let sub = SliceForest::new(self, s);
            for (row, coords) in self.restrict(&basis, &sub).into_iter().enumerate() {
                if rows.len() <= row {
                    rows.push(Vec::new());
                }
                rows[row].extend(coords.into_iter().map(|x| x + q as u32 * stride));
            }
        }
        Ok(rank(rows))
    }

    fn diagonal_rank(&self, source: Bigrade, targets: &[Bigrade], i: usize) -> Result<usize> {
        check_degree(i)?;
        for &t in targets {
            require_leq(source, t)?;
        }
        let sub = SliceForest::new(self, source);
        let mut rows = Vec::new();
        for &t in targets {
            rows.extend(self.restrict(&self.cobasis(t, i), &sub));
        }
        Ok(rank(rows))
    }

    fn fibered_barcode(&self, line: &Line, i: usize) -> Result<Barcode> {
        check_degree(i)?;
        let n = self.len();
        let c = DegreeRips::convention(self);
        let vertex: Vec<f64> = (0..n)
            .map(|v| self.vertex_grades(v).iter().map(|&g| line.entry(g, c)).fold(f64::INFINITY, f64::min))
            .collect();
        let mut edge = vec![f64::INFINITY; n * n];
        for u in 0..n {
            for v in u + 1..n {
                let rho = self.edge_radius(u, v);
                if rho.is_finite() {
                    let e = line.r_entry(rho, c).max(vertex[u]).max(vertex[v]);
                    edge[u * n + v] = e;
                    edge[v * n + u] = e;
                }
            }
        }
        let bars = flag_persistence(&FlagFiltration { n, vertex, edge }, false);
        Ok(Barcode::new(i, if i == 0 { bars.h0 } else { bars.h1 }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complexes::grades::GridSpec;
    use crate::metric::{distance_matrix, Metric, PointCloud};

    fn two_loops() -> PointCloud {
        // two unit squares sharing an edge, plus a far point
        PointCloud::new(
            vec![
                vec![0.0, 0.0],
                vec![1.0, 0.0],
                vec![2.0, 0.0],
                vec![0.0, 1.0],
                vec![1.0, 1.0],
                vec![2.0, 1.0],
                vec![5.0, 5.0],
            ],
            Metric::LInf,
        )
        .unwrap()
    }

    #[test]
    fn agrees_with_explicit() {
        let cloud = two_loops().with_metric(Metric::L2);
        let implicit = DegreeRips::from_cloud(&cloud).unwrap();
        let explicit = crate::complexes::degree::degree_rips_bifiltration(&distance_matrix(&cloud), 2, None).unwrap();
        let grid = GridSpec::uniform(1.0, 1.0, 7, 10).unwrap();
        for i in 0..2 {
            assert_eq!(implicit.hilbert(i, &grid).unwrap(), explicit.hilbert(i, &grid).unwrap());
            assert_eq!(implicit.betti(i, &grid).unwrap(), explicit.betti(i, &grid).unwrap());
        }
        let line = Line::from_angle_offset(60.0, 0.3).unwrap();
        assert_eq!(implicit.fibered_barcode(&line, 1).unwrap(), explicit.fibered_barcode(&line, 1).unwrap());
    }

    #[test]
    fn ranks_across_loops() {
        let cloud = two_loops().with_metric(Metric::L2);
        let dr = DegreeRips::from_cloud(&cloud).unwrap();
        let lo = Bigrade::new(1.0 / 7.0, 0.55);
        assert_eq!(dr.dim_at(lo, 1).unwrap(), 2);
        assert_eq!(dr.rank(lo, Bigrade::new(1.0 / 7.0, 0.6), 1).unwrap(), 2);
        assert_eq!(dr.rank(lo, Bigrade::new(1.0 / 7.0, 0.75), 1).unwrap(), 0);
        assert_eq!(dr.rank(lo, Bigrade::new(1.0 / 7.0, 3.0), 0).unwrap(), 1);
        assert_eq!(dr.dim_at(lo, 0).unwrap(), 2);
    }
}
