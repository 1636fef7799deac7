//! Module queries on explicit bifiltrations. Chains of every slice live in
//! the chain space of the total complex (coordinates are global simplex
//! indices), so induced maps are literally inclusions of cycle vectors.

use super::barcode::Barcode;
use super::linalg::{xor_sorted, Echelon};
use super::module::{require_leq, Bifiltration, Line};
use super::reduce::{persistence_barcode, reduce_filtration};
use crate::complexes::bifiltration::BifilteredComplex;
use crate::complexes::grades::{Bigrade, RConvention};
use crate::complexes::simplicial::facets;
use crate::error::Result;

/// Cycle basis of `Z_i` and the boundary generators of `B_i` at a slice.
struct SliceChains {
    cycles: Vec<Vec<u32>>,
    boundaries: Vec<Vec<u32>>,
}

impl BifilteredComplex {
    fn boundary_column(&self, idx: usize) -> Vec<u32> {
        let s = &self.simplices()[idx];
        if s.len() < 2 {
            return Vec::new();
        }
        let mut col: Vec<u32> = facets(s).map(|f| self.index_of(&f).expect("faces are present") as u32).collect();
        col.sort_unstable();
        col
    }

    fn chains(&self, at: Bigrade, i: usize) -> SliceChains {
        let present = self.slice_indices(at);
        let dim = |idx: usize| self.simplices()[idx].len() - 1;
        let mut cycles = Vec::new();
        let mut pivots: std::collections::HashMap<u32, (Vec<u32>, Vec<u32>)> = Default::default();
        for &j in present.iter().filter(|&&j| dim(j) == i) {
            let mut col = self.boundary_column(j);
            let mut v = vec![j as u32];
            while let Some(&low) = col.last() {
                match pivots.get(&low) {
                    Some((c, w)) => {
                        col = xor_sorted(&col, c);
                        v = xor_sorted(&v, w);
                    }
                    None => break,
                }
            }
            match col.last() {
                Some(&low) => {
                    pivots.insert(low, (col, v));
                }
                None => cycles.push(v),
            }
        }
        let boundaries = present.iter().filter(|&&j| dim(j) == i + 1).map(|&j| self.boundary_column(j)).collect();
        SliceChains { cycles, boundaries }
    }
}

fn shifted(v: &[u32], offset: u32) -> impl Iterator<Item = u32> + '_ {
    v.iter().map(move |&x| x + offset)
}

impl Bifiltration for BifilteredComplex {
    fn convention(&self) -> RConvention {
        BifilteredComplex::convention(self)
    }

    fn row_dims(&self, k: f64, rs: &[f64], i: usize) -> Result<Vec<usize>> {
        let filtration = self.row_filtration(k);
        if filtration.is_empty() {
            return Ok(vec![0; rs.len()]);
        }
        let bars = reduce_filtration(&filtration)?.barcode(i);
        let c = BifilteredComplex::convention(self);
        Ok(rs.iter().map(|&r| bars.bars.iter().filter(|&&(b, d)| c.alive(b, d, r)).count()).collect())
    }

    fn joint_rank(&self, sources: &[Bigrade], target: Bigrade, i: usize) -> Result<usize> {
        for &s in sources {
            require_leq(s, target)?;
        }
        let mut e = Echelon::new();
        for b in self.chains(target, i).boundaries {
            e.insert(b);
        }
        let base = e.rank();
        for &s in sources {
            for z in self.chains(s, i).cycles {
                e.insert(z);
            }
        }
        Ok(e.rank() - base)
    }

    fn diagonal_rank(&self, source: Bigrade, targets: &[Bigrade], i: usize) -> Result<usize> {
        for &t in targets {
            require_leq(source, t)?;
        }
        let stride = self.len() as u32;
        let mut e = Echelon::new();
        for (q, &t) in targets.iter().enumerate() {
            for b in self.chains(t, i).boundaries {
                e.insert(shifted(&b, q as u32 * stride).collect());
            }
        }
        let base = e.rank();
        for z in self.chains(source, i).cycles {
            let v: Vec<u32> = (0..targets.len()).flat_map(|q| shifted(&z, q as u32 * stride).collect::<Vec<_>>()).collect();
            e.insert(v);
        }
        Ok(e.rank() - base)
    }

    fn fibered_barcode(&self, line: &Line, i: usize) -> Result<Barcode> {
        let c = BifilteredComplex::convention(self);
        let filtration: Vec<_> = (0..self.len())
            .filter_map(|idx| {
                let t = self.grades(idx).iter().map(|&g| line.entry(g, c)).fold(f64::INFINITY, f64::min);
                t.is_finite().then(|| (self.simplices()[idx].clone(), t))
            })
            .collect();
        if filtration.is_empty() {
            return Ok(Barcode::new(i, Vec::new()));
        }
        persistence_barcode(&filtration, i)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complexes::grades::GridSpec;

    /// A square whose diagonal arrives late in r and whose fourth vertex
    /// arrives late in k.
    fn square() -> BifilteredComplex {
        let g = |k, r| vec![Bigrade::new(k, r)];
        BifilteredComplex::new(
            4,
            vec![
                (vec![0], g(1.0, 0.0)),
                (vec![1], g(1.0, 0.0)),
                (vec![2], g(1.0, 0.0)),
                (vec![3], g(0.5, 0.0)),
                (vec![0, 1], g(1.0, 0.1)),
                (vec![1, 2], g(1.0, 0.1)),
                (vec![2, 3], g(0.5, 0.1)),
                (vec![0, 3], g(0.5, 0.1)),
                (vec![0, 2], g(1.0, 0.3)),
                (vec![0, 1, 2], g(1.0, 0.3)),
                (vec![0, 2, 3], g(0.5, 0.3)),
            ],
            RConvention::Closed,
        )
        .unwrap()
    }

    #[test]
    fn hilbert_and_ranks() {
        let c = square();
        let grid = GridSpec::new(vec![1.0, 0.5], vec![0.1, 0.2, 0.3]).unwrap();
        let h1 = c.hilbert(1, &grid).unwrap();
        assert_eq!(h1.dims, vec![vec![0, 0, 0], vec![1, 1, 0]]);
        let h0 = c.hilbert(0, &grid).unwrap();
        assert_eq!(h0.dims, vec![vec![1, 1, 1], vec![1, 1, 1]]);
        assert_eq!(c.rank(Bigrade::new(0.5, 0.1), Bigrade::new(0.5, 0.2), 1).unwrap(), 1);
        assert_eq!(c.rank(Bigrade::new(0.5, 0.1), Bigrade::new(0.5, 0.3), 1).unwrap(), 0);
        assert!(c.rank(Bigrade::new(0.5, 0.2), Bigrade::new(1.0, 0.3), 1).is_err());
    }

    #[test]
    fn betti_of_square() {
        let c = square();
        let grid = GridSpec::new(vec![1.0, 0.5], vec![0.1, 0.2, 0.3]).unwrap();
        let h1 = c.hilbert(1, &grid).unwrap();
        let b = c.betti(1, &grid).unwrap();
        assert_eq!(b.beta[0], vec![vec![0, 0, 0], vec![1, 0, 0]]);
        assert_eq!(b.beta[1], vec![vec![0, 0, 0], vec![0, 0, 1]]);
        assert!(h1.satisfies_euler(&b));
    }

    #[test]
    fn fibered_horizontal() {
        let c = square();
        let bars = c.fibered_barcode(&Line::horizontal(0.5), 1).unwrap();
        assert_eq!(bars.bars, vec![(0.1, 0.3)]);
    }
}
