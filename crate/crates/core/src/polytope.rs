//! Lattice points of rational polyhedra {u : a_k · u <= b_k}.

use itertools::Itertools;
use num_integer::Integer;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::lattice::cone::extreme_rays;
use crate::lattice::matrix::{dot, q, q_vec, RationalMatrix, Q};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polyhedron {
    pub dim: usize,
    pub normals: Vec<Vec<i64>>,
    pub bounds: Vec<i64>,
}

impl Polyhedron {
    pub fn new(dim: usize, normals: Vec<Vec<i64>>, bounds: Vec<i64>) -> Polyhedron {
        debug_assert_eq!(normals.len(), bounds.len());
        Polyhedron { dim, normals, bounds }
    }

    pub fn contains(&self, u: &[i64]) -> bool {
        self.normals.iter().zip(&self.bounds).all(|(a, b)| a.iter().zip(u).map(|(x, y)| x * y).sum::<i64>() <= *b)
    }

    /// True when the recession cone is {0}.
    pub fn is_bounded(&self) -> bool {
        if self.dim == 0 {
            return true;
        }
        let a = RationalMatrix::from_i64_rows(self.dim, &self.normals);
        if a.rank() != self.dim {
            return false;
        }
        let neg: Vec<Vec<Q>> = self.normals.iter().map(|r| r.iter().map(|&x| q(-x)).collect()).collect();
        extreme_rays(self.dim, &neg, &[]).is_empty()
    }

    pub fn vertices(&self) -> Vec<Vec<Q>> {
        let normals: Vec<Vec<Q>> = self.normals.iter().map(|r| q_vec(r)).collect();
        let mut out: Vec<Vec<Q>> = Vec::new();
        for subset in (0..self.normals.len()).combinations(self.dim) {
            let m = RationalMatrix::from_rows(self.dim, subset.iter().map(|&k| normals[k].clone()).collect());
            if m.rank() != self.dim {
                continue;
            }
            let rhs: Vec<Q> = subset.iter().map(|&k| q(self.bounds[k])).collect();
            let Some(x) = m.solve(&rhs) else { continue };
            let feasible = normals.iter().zip(&self.bounds).all(|(a, b)| dot(a, &x) <= q(*b));
            if feasible && !out.contains(&x) {
                out.push(x);
            }
        }
        out
    }

    pub fn lattice_points(&self) -> Result<Vec<Vec<i64>>> {
        if !self.is_bounded() {
            return Err(Error::Unbounded);
        }
        if self.dim == 0 {
            return Ok(if self.bounds.iter().all(|&b| b >= 0) { vec![Vec::new()] } else { Vec::new() });
        }
        let Some(bx) = bounding_box(self.dim, &self.vertices()) else { return Ok(Vec::new()) };
        Ok(box_points(&bx).into_iter().filter(|u| self.contains(u)).collect())
    }
}

/// Integer box [floor(min), ceil(max)] around a point set; `None` when empty.
pub fn bounding_box(dim: usize, pts: &[Vec<Q>]) -> Option<Vec<(i64, i64)>> {
    if pts.is_empty() {
        return None;
    }
    let to_i = |x: &Q, up: bool| -> i64 {
        let (n, d) = (x.numer(), x.denom());
        let v = if up { n.div_ceil(d) } else { n.div_floor(d) };
        v.to_i64().expect("coordinate fits in i64")
    };
    Some(
        (0..dim)
            .map(|k| {
                let lo = pts.iter().map(|p| to_i(&p[k], false)).min().unwrap_or(0);
                let hi = pts.iter().map(|p| to_i(&p[k], true)).max().unwrap_or(0);
                (lo, hi)
            })
            .collect(),
    )
}

pub fn box_points(bx: &[(i64, i64)]) -> Vec<Vec<i64>> {
    if bx.is_empty() {
        return vec![Vec::new()];
    }
    bx.iter().map(|&(lo, hi)| lo..=hi).multi_cartesian_product().collect()
}

/// Vertices of the arrangement of hyperplanes {normal_k · u = c} with c ranging over
/// the closed interval attached to each normal. Only the interval endpoints matter for
/// the convex hull.
pub fn arrangement_vertices(dim: usize, normals: &[Vec<i64>], ranges: &[(i64, i64)]) -> Vec<Vec<Q>> {
    let qn: Vec<Vec<Q>> = normals.iter().map(|r| q_vec(r)).collect();
    let mut out: Vec<Vec<Q>> = Vec::new();
    for subset in (0..normals.len()).combinations(dim) {
        let m = RationalMatrix::from_rows(dim, subset.iter().map(|&k| qn[k].clone()).collect());
        if m.rank() != dim {
            continue;
        }
        for corner in subset.iter().map(|&k| [ranges[k].0, ranges[k].1]).multi_cartesian_product() {
            let rhs: Vec<Q> = corner.iter().map(|&c| q(c)).collect();
            if let Some(x) = m.solve(&rhs) {
                if !out.contains(&x) {
                    out.push(x);
                }
            }
        }
    }
    out
}
