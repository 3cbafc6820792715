//! Graded sections, Čech cohomology over the cover by maximal cones, and Ext.
//!
//! A character u has sections E_τ(u) = ⋂_{ρ∈τ(1)} E^ρ(⟨u,ρ⟩) over the chart of τ.
//! Everything depends on u only through the clamped evaluation levels, so complexes are
//! cached per level tuple.

use std::collections::{BTreeMap, HashMap};

use itertools::Itertools;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::bundle_ops::{dual, tensor};
use crate::error::{Error, Result};
use crate::filtration::KlyachkoBundle;
use crate::lattice::matrix::{rank_of_rows, Q};
use crate::lattice::{Fan, Subspace};
use crate::polytope::{arrangement_vertices, bounding_box, box_points, Polyhedron};

/// Nonzero dimensions indexed by character.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct GradedDims {
    pub entries: BTreeMap<Vec<i64>, usize>,
}

impl GradedDims {
    pub fn total(&self) -> usize {
        self.entries.values().sum()
    }

    pub fn get(&self, u: &[i64]) -> usize {
        self.entries.get(u).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    fn insert(&mut self, u: Vec<i64>, d: usize) {
        if d > 0 {
            self.entries.insert(u, d);
        }
    }

    /// Restriction to characters satisfying `keep`.
    pub fn filter(&self, keep: impl Fn(&[i64]) -> bool) -> GradedDims {
        GradedDims { entries: self.entries.iter().filter(|(u, _)| keep(u)).map(|(u, d)| (u.clone(), *d)).collect() }
    }
}

/// The polyhedron {u : ⟨u,ρ⟩ <= i_ρ}, i_ρ the last level with E^ρ(i) != 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeBox {
    pub bounds: Vec<i64>,
    pub polyhedron: Polyhedron,
}

pub fn degree_box(v: &KlyachkoBundle) -> Result<DegreeBox> {
    let fan = v.fan()?;
    let bounds: Vec<i64> = v.filtrations().iter().map(|f| f.bounds().1).collect();
    let normals: Vec<Vec<i64>> = fan.rays().iter().map(|r| r.to_i64()).collect();
    Ok(DegreeBox { polyhedron: Polyhedron::new(fan.rank(), normals, bounds.clone()), bounds })
}

fn pairing(fan: &Fan, u: &[i64]) -> Vec<i64> {
    fan.rays().iter().map(|r| r.pair(u)).collect()
}

pub fn sections_degree(v: &KlyachkoBundle, u: &[i64]) -> Result<Subspace> {
    let fan = v.fan()?;
    if u.len() != fan.rank() {
        return Err(Error::DimensionMismatch { expected: fan.rank(), found: u.len() });
    }
    let levels = pairing(fan, u);
    let spaces: Vec<Subspace> = v.filtrations().iter().zip(&levels).map(|(f, &l)| f.evaluate(l)).collect();
    Ok(Subspace::meet_all(v.rank(), spaces.iter()))
}

pub fn global_sections(v: &KlyachkoBundle) -> Result<GradedDims> {
    let b = degree_box(v)?;
    let mut out = GradedDims::default();
    if v.rank() == 0 {
        return Ok(out);
    }
    for u in b.polyhedron.lattice_points()? {
        let d = sections_degree(v, &u)?.dim();
        out.insert(u, d);
    }
    Ok(out)
}

/// Čech cohomology of a bundle on a complete fan, all degrees at once.
pub struct CechEngine<'a> {
    v: &'a KlyachkoBundle,
    fan: &'a Fan,
    /// Nonempty subsets of maximal cones, grouped by size, with the rays of their intersection.
    nerve: Vec<Vec<(Vec<usize>, Vec<usize>)>>,
    ranges: Vec<(i64, i64)>,
    cache: HashMap<Vec<i64>, Vec<usize>>,
}

impl<'a> CechEngine<'a> {
    pub fn new(v: &'a KlyachkoBundle) -> Result<CechEngine<'a>> {
        let fan = v.fan()?.as_ref();
        fan.require_complete()?;
        let cones = fan.maximal_cones();
        let mut nerve = Vec::new();
        for size in 1..=cones.len() {
            let level: Vec<(Vec<usize>, Vec<usize>)> = (0..cones.len())
                .combinations(size)
                .map(|j| {
                    let rays: Vec<usize> =
                        cones[j[0]].iter().copied().filter(|r| j.iter().all(|&k| cones[k].contains(r))).collect();
                    (j, rays)
                })
                .collect();
            nerve.push(level);
        }
        let ranges = v.filtrations().iter().map(|f| f.bounds()).collect();
        Ok(CechEngine { v, fan, nerve, ranges, cache: HashMap::new() })
    }

    fn clamp(&self, levels: &[i64]) -> Vec<i64> {
        levels.iter().zip(&self.ranges).map(|(&l, &(lo, hi))| l.clamp(lo, hi + 1)).collect()
    }

    /// h^p at u for every p.
    pub fn dims_at(&mut self, u: &[i64]) -> Vec<usize> {
        let key = self.clamp(&pairing(self.fan, u));
        if let Some(d) = self.cache.get(&key) {
            return d.clone();
        }
        let d = self.compute(&key);
        self.cache.insert(key, d.clone());
        d
    }

    fn compute(&self, levels: &[i64]) -> Vec<usize> {
        let r = self.v.rank();
        let space = |rays: &[usize]| -> Subspace {
            let sp: Vec<Subspace> = rays.iter().map(|&k| self.v.filtration(k).evaluate(levels[k])).collect();
            Subspace::meet_all(r, sp.iter())
        };
        let spaces: Vec<Vec<Subspace>> =
            self.nerve.iter().map(|lv| lv.iter().map(|(_, rays)| space(rays)).collect()).collect();
        let dims: Vec<usize> = spaces.iter().map(|lv| lv.iter().map(|s| s.dim()).sum()).collect();
        // rank of d^p : C^p -> C^{p+1}
        let mut ranks = vec![0usize; self.nerve.len()];
        for p in 0..self.nerve.len().saturating_sub(1) {
            if dims[p] == 0 || dims[p + 1] == 0 {
                continue;
            }
            let target = &self.nerve[p + 1];
            let index: HashMap<&Vec<usize>, usize> = target.iter().enumerate().map(|(i, (j, _))| (j, i)).collect();
            let width = target.len() * r;
            let mut rows: Vec<Vec<Q>> = Vec::new();
            for ((j, _), s) in self.nerve[p].iter().zip(&spaces[p]) {
                for b in s.vectors() {
                    let mut row = vec![Q::zero(); width];
                    for (t, (jj, _)) in target.iter().enumerate() {
                        if spaces[p + 1][t].is_zero() || !j.iter().all(|x| jj.contains(x)) {
                            continue;
                        }
                        let missing = jj.iter().position(|x| !j.contains(x)).expect("one extra cone");
                        let sign = if missing % 2 == 0 { Q::one() } else { -Q::one() };
                        let t = index[jj];
                        for c in 0..r {
                            row[t * r + c] = &b[c] * &sign;
                        }
                    }
                    rows.push(row);
                }
            }
            ranks[p] = rank_of_rows(rows, width);
        }
        (0..self.nerve.len())
            .map(|p| dims[p] - ranks[p] - if p > 0 { ranks[p - 1] } else { 0 })
            .collect()
    }

    /// Characters in the bounding box of the arrangement {⟨u,ρ⟩ = lo_ρ .. hi_ρ + 1};
    /// every bounded level chamber lies inside it.
    pub fn candidate_box(&self) -> Vec<(i64, i64)> {
        let n = self.fan.rank();
        let normals: Vec<Vec<i64>> = self.fan.rays().iter().map(|r| r.to_i64()).collect();
        let ranges: Vec<(i64, i64)> = self.ranges.iter().map(|&(lo, hi)| (lo, hi + 1)).collect();
        let verts = arrangement_vertices(n, &normals, &ranges);
        bounding_box(n, &verts).unwrap_or_else(|| vec![(0, 0); n])
    }

    /// All nonzero h^p, one GradedDims per p. Checks that the layer just outside the
    /// candidate box vanishes and widens the box otherwise.
    pub fn all(&mut self) -> Vec<GradedDims> {
        let len = self.nerve.len().max(1);
        if self.v.rank() == 0 {
            return vec![GradedDims::default(); len];
        }
        let mut bx = self.candidate_box();
        loop {
            let shell: Vec<Vec<i64>> = box_points(&bx.iter().map(|&(a, b)| (a - 1, b + 1)).collect::<Vec<_>>())
                .into_iter()
                .filter(|u| u.iter().zip(&bx).any(|(x, &(a, b))| *x < a || *x > b))
                .collect();
            if shell.iter().all(|u| self.dims_at(u).iter().all(|&d| d == 0)) {
                break;
            }
            bx = bx.iter().map(|&(a, b)| (a - 1, b + 1)).collect();
        }
        let mut out = vec![GradedDims::default(); len];
        for u in box_points(&bx) {
            let d = self.dims_at(&u);
            for (p, &x) in d.iter().enumerate() {
                out[p].insert(u.clone(), x);
            }
        }
        out
    }
}

pub fn cech_all(v: &KlyachkoBundle) -> Result<Vec<GradedDims>> {
    Ok(CechEngine::new(v)?.all())
}

pub fn cech_cohomology(v: &KlyachkoBundle, i: usize) -> Result<GradedDims> {
    let all = cech_all(v)?;
    Ok(all.get(i).cloned().unwrap_or_default())
}

/// Graded Ext^i(V, W) = H^i(V* ⊗ W).
pub fn ext_graded(v: &KlyachkoBundle, w: &KlyachkoBundle, i: usize) -> Result<GradedDims> {
    cech_cohomology(&tensor(&dual(v)?, w)?, i)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EulerCharacteristic {
    pub per_degree: BTreeMap<Vec<i64>, i64>,
    pub total: i64,
}

pub fn euler_characteristic(v: &KlyachkoBundle) -> Result<EulerCharacteristic> {
    let all = cech_all(v)?;
    let mut per_degree: BTreeMap<Vec<i64>, i64> = BTreeMap::new();
    for (p, g) in all.iter().enumerate() {
        let s = if p % 2 == 0 { 1 } else { -1 };
        for (u, &d) in &g.entries {
            *per_degree.entry(u.clone()).or_insert(0) += s * d as i64;
        }
    }
    per_degree.retain(|_, x| *x != 0);
    let total = per_degree.values().sum();
    Ok(EulerCharacteristic { per_degree, total })
}
