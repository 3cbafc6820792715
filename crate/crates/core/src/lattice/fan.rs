//! Fans, their face posets and star fans.

use std::collections::BTreeSet;

use serde::Serialize;

use super::cone::{extreme_rays, Cone, LatticeVector};
use super::matrix::{IntMatrix, Q};
use super::snf::smith_normal_form;
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct Fan {
    rank: usize,
    rays: Vec<LatticeVector>,
    cones: Vec<Vec<usize>>,
    cone_objs: Vec<Cone>,
    faces: Vec<Vec<usize>>,
}

impl PartialEq for Fan {
    fn eq(&self, other: &Self) -> bool {
        self.rank == other.rank && self.rays == other.rays && self.cones == other.cones
    }
}

impl Eq for Fan {}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct FanDiagnostics {
    pub smooth: bool,
    pub simplicial: bool,
    pub complete: bool,
}

impl Fan {
    /// Builds a fan from ray generators and maximal cones given as ray-index lists.
    /// Rejects non-primitive duplicates, unused rays, non-maximal cones and pairs of
    /// cones that do not meet in a common face.
    pub fn new(rank: usize, rays: Vec<LatticeVector>, cones: Vec<Vec<usize>>) -> Result<Fan> {
        let mut prim: Vec<LatticeVector> = Vec::with_capacity(rays.len());
        for r in &rays {
            if r.dim() != rank {
                return Err(Error::DimensionMismatch { expected: rank, found: r.dim() });
            }
            if r.is_zero() {
                return Err(Error::InvalidFan("zero ray".into()));
            }
            let p = r.primitive();
            if prim.contains(&p) {
                return Err(Error::InvalidFan(format!("ray {:?} listed twice", p)));
            }
            prim.push(p);
        }
        let mut sorted_cones = Vec::with_capacity(cones.len());
        let mut cone_objs = Vec::with_capacity(cones.len());
        for c in &cones {
            let mut c = c.clone();
            c.sort_unstable();
            c.dedup();
            if let Some(&bad) = c.iter().find(|&&i| i >= prim.len()) {
                return Err(Error::InvalidFan(format!("ray index {} out of range", bad)));
            }
            let cone = Cone::new(rank, c.iter().map(|&i| prim[i].clone()).collect())
                .map_err(|e| Error::InvalidFan(format!("cone {:?}: {}", c, e)))?;
            sorted_cones.push(c);
            cone_objs.push(cone);
        }
        if sorted_cones.is_empty() {
            return Err(Error::InvalidFan("no cones".into()));
        }
        for i in 0..prim.len() {
            if !sorted_cones.iter().any(|c| c.contains(&i)) {
                return Err(Error::InvalidFan(format!("ray {} is not used by any cone", i)));
            }
        }
        for a in 0..sorted_cones.len() {
            for b in 0..sorted_cones.len() {
                if a == b {
                    continue;
                }
                if sorted_cones[a] == sorted_cones[b] {
                    return Err(Error::InvalidFan(format!("cone {} listed twice", a)));
                }
                let sub = sorted_cones[a].iter().all(|i| sorted_cones[b].contains(i));
                if sub {
                    return Err(Error::InvalidFan(format!("cone {} is contained in cone {}", a, b)));
                }
            }
        }
        let fan_faces = |k: usize| -> Vec<Vec<usize>> {
            cone_objs[k]
                .faces()
                .iter()
                .map(|f| f.iter().map(|&j| sorted_cones[k][j]).collect())
                .collect()
        };
        for a in 0..sorted_cones.len() {
            for b in a + 1..sorted_cones.len() {
                let common: Vec<usize> =
                    sorted_cones[a].iter().copied().filter(|i| sorted_cones[b].contains(i)).collect();
                if !fan_faces(a).contains(&common) || !fan_faces(b).contains(&common) {
                    return Err(Error::InvalidFan(format!(
                        "cones {} and {} share rays {:?} that do not form a common face",
                        a, b, common
                    )));
                }
                let (mut ineqs, mut eqs) = cone_objs[a].h_representation();
                let (i2, e2) = cone_objs[b].h_representation();
                ineqs.extend(i2);
                eqs.extend(e2);
                let tau: BTreeSet<LatticeVector> = common.iter().map(|&i| prim[i].clone()).collect();
                let tau_cone = Cone::new(rank, tau.iter().cloned().collect())?;
                for x in extreme_rays(rank, &ineqs, &eqs) {
                    if !tau_cone.contains(&x.to_q()) {
                        return Err(Error::InvalidFan(format!(
                            "cones {} and {} overlap beyond their common face",
                            a, b
                        )));
                    }
                }
            }
        }
        let mut faces: BTreeSet<Vec<usize>> = BTreeSet::new();
        for k in 0..sorted_cones.len() {
            faces.extend(fan_faces(k));
        }
        let mut faces: Vec<Vec<usize>> = faces.into_iter().collect();
        faces.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));
        Ok(Fan { rank, rays: prim, cones: sorted_cones, cone_objs, faces })
    }

    pub fn from_i64(rank: usize, rays: &[Vec<i64>], cones: &[Vec<usize>]) -> Result<Fan> {
        Fan::new(rank, rays.iter().map(|r| LatticeVector::from_i64(r)).collect(), cones.to_vec())
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn rays(&self) -> &[LatticeVector] {
        &self.rays
    }

    pub fn ray(&self, i: usize) -> &LatticeVector {
        &self.rays[i]
    }

    /// Maximal cones as sorted ray-index lists.
    pub fn maximal_cones(&self) -> &[Vec<usize>] {
        &self.cones
    }

    pub fn cone(&self, k: usize) -> &Cone {
        &self.cone_objs[k]
    }

    /// Every cone of the fan as a sorted ray-index list, including the zero cone.
    pub fn faces(&self) -> &[Vec<usize>] {
        &self.faces
    }

    pub fn ray_index(&self, v: &LatticeVector) -> Option<usize> {
        self.rays.iter().position(|r| r == v)
    }

    pub fn is_smooth(&self) -> bool {
        self.cone_objs.iter().all(|c| c.is_smooth())
    }

    pub fn is_simplicial(&self) -> bool {
        self.cone_objs.iter().all(|c| c.is_simplicial())
    }

    /// Every maximal cone is full dimensional and each of its facets lies in exactly
    /// one other maximal cone.
    pub fn is_complete(&self) -> bool {
        if self.cone_objs.iter().any(|c| c.dim() != self.rank) {
            return false;
        }
        for (k, c) in self.cone_objs.iter().enumerate() {
            for (facet, _) in c.facets() {
                let rays: Vec<usize> = facet.iter().map(|&j| self.cones[k][j]).collect();
                let partners = (0..self.cones.len())
                    .filter(|&o| o != k)
                    .filter(|&o| {
                        let local: Option<Vec<usize>> = rays
                            .iter()
                            .map(|r| self.cones[o].iter().position(|x| x == r))
                            .collect();
                        local.is_some_and(|l| self.cone_objs[o].is_face(&l))
                    })
                    .count();
                if partners != 1 {
                    return false;
                }
            }
        }
        true
    }

    /// Maximal cones containing every ray in `rays`.
    pub fn cones_containing(&self, rays: &[usize]) -> Vec<usize> {
        (0..self.cones.len()).filter(|&k| rays.iter().all(|r| self.cones[k].contains(r))).collect()
    }

    pub fn require_smooth(&self) -> Result<()> {
        if self.is_smooth() {
            Ok(())
        } else {
            Err(Error::NotSmooth)
        }
    }

    pub fn require_complete(&self) -> Result<()> {
        if self.is_complete() {
            Ok(())
        } else {
            Err(Error::NotComplete)
        }
    }
}

pub fn fan_validate(fan: &Fan) -> FanDiagnostics {
    FanDiagnostics { smooth: fan.is_smooth(), simplicial: fan.is_simplicial(), complete: fan.is_complete() }
}

/// The fan of the invariant divisor of a ray, living in N/<ray>.
#[derive(Clone, Debug)]
pub struct StarFan {
    pub fan: Fan,
    /// Rows give N -> N/<ray> in the chosen basis.
    pub projection: IntMatrix,
    /// For each star ray, the ray of the original fan it comes from.
    pub ray_origin: Vec<usize>,
    /// For each star maximal cone, the maximal cone of the original fan it comes from.
    pub cone_origin: Vec<usize>,
}

pub fn star_fan(fan: &Fan, rho: usize) -> Result<StarFan> {
    if rho >= fan.rays.len() {
        return Err(Error::NotARay(rho));
    }
    let n = fan.rank;
    let col = IntMatrix::from_columns(n, &[fan.rays[rho].0.clone()]);
    let s = smith_normal_form(&col);
    let projection = IntMatrix::from_rows(n, (1..n).map(|i| s.u.row(i).to_vec()).collect());
    let mut star_rays: Vec<LatticeVector> = Vec::new();
    let mut ray_origin = Vec::new();
    let mut star_cones = Vec::new();
    let mut cone_origin = Vec::new();
    for k in fan.cones_containing(&[rho]) {
        let cone = &fan.cone_objs[k];
        let local_rho = fan.cones[k].iter().position(|&r| r == rho).expect("cone contains the ray");
        let mut members = Vec::new();
        for (j, &g) in fan.cones[k].iter().enumerate() {
            if g == rho || !cone.is_face(&[local_rho, j]) {
                continue;
            }
            let img = LatticeVector(projection.mul_vec(&fan.rays[g].0)).primitive();
            let idx = match star_rays.iter().position(|r| *r == img) {
                Some(i) => i,
                None => {
                    star_rays.push(img);
                    ray_origin.push(g);
                    star_rays.len() - 1
                }
            };
            members.push(idx);
        }
        star_cones.push(members);
        cone_origin.push(k);
    }
    let fan = Fan::new(n - 1, star_rays, star_cones)?;
    Ok(StarFan { fan, projection, ray_origin, cone_origin })
}

/// Rational image of a vector under an integer matrix.
pub fn apply_q(m: &IntMatrix, v: &[Q]) -> Vec<Q> {
    m.to_rational().mul_vec(v)
}
