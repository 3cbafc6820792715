//! Prefans (posets of cones that may repeat geometrically) and stacky prefans.

use std::collections::BTreeSet;

use num_traits::{One, Signed, Zero};

use super::cone::{Cone, LatticeVector};
use super::matrix::{IntMatrix, Z};
use super::snf::{clear_denominators, integer_kernel, lattice_eq, saturation, smith_normal_form, solve_integer};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Prefan {
    ambient: usize,
    names: Vec<String>,
    cones: Vec<Cone>,
    /// leq[a][b] iff a <= b
    leq: Vec<Vec<bool>>,
    minimum: usize,
}

impl Prefan {
    /// `covers` lists pairs (a, b) with a < b; the order is their reflexive transitive closure.
    pub fn new(ambient: usize, names: Vec<String>, cones: Vec<Cone>, covers: &[(usize, usize)]) -> Result<Prefan> {
        let k = cones.len();
        if names.len() != k {
            return Err(Error::InvalidPrefan("one name per element required".into()));
        }
        if let Some(c) = cones.iter().find(|c| c.ambient_dim() != ambient) {
            return Err(Error::DimensionMismatch { expected: ambient, found: c.ambient_dim() });
        }
        let mut leq = vec![vec![false; k]; k];
        for (i, row) in leq.iter_mut().enumerate() {
            row[i] = true;
        }
        for &(a, b) in covers {
            if a >= k || b >= k {
                return Err(Error::InvalidPrefan(format!("relation ({}, {}) out of range", a, b)));
            }
            leq[a][b] = true;
        }
        for m in 0..k {
            for a in 0..k {
                if leq[a][m] {
                    for b in 0..k {
                        if leq[m][b] {
                            leq[a][b] = true;
                        }
                    }
                }
            }
        }
        for a in 0..k {
            for b in 0..k {
                if a != b && leq[a][b] && leq[b][a] {
                    return Err(Error::InvalidPrefan(format!("elements {} and {} form a cycle", a, b)));
                }
            }
        }
        let minimal: Vec<usize> = (0..k).filter(|&a| (0..k).all(|b| !leq[b][a] || b == a)).collect();
        if minimal.len() != 1 || !(0..k).all(|b| leq[minimal[0]][b]) {
            return Err(Error::InvalidPrefan("no unique minimal element".into()));
        }
        let minimum = minimal[0];
        if cones[minimum].dim() != 0 {
            return Err(Error::InvalidPrefan("minimal element must map to the zero cone".into()));
        }
        let p = Prefan { ambient, names, cones, leq, minimum };
        for s in 0..k {
            p.check_down_set(s)?;
        }
        Ok(p)
    }

    /// The down-set of `s` must map bijectively and order-preservingly onto the faces of its cone.
    fn check_down_set(&self, s: usize) -> Result<()> {
        let sigma = &self.cones[s];
        let faces: Vec<BTreeSet<LatticeVector>> = sigma.faces().iter().map(|f| sigma.generator_set(f)).collect();
        let down: Vec<usize> = (0..self.len()).filter(|&t| self.leq[t][s]).collect();
        let mut image = Vec::with_capacity(down.len());
        for &t in &down {
            let gens: BTreeSet<LatticeVector> = self.cones[t].generators().iter().cloned().collect();
            match faces.iter().position(|f| *f == gens) {
                Some(i) => image.push(i),
                None => {
                    return Err(Error::InvalidPrefan(format!(
                        "cone of {} is not a face of the cone of {}",
                        self.names[t], self.names[s]
                    )))
                }
            }
        }
        let distinct: BTreeSet<usize> = image.iter().copied().collect();
        if distinct.len() != down.len() || distinct.len() != faces.len() {
            return Err(Error::InvalidPrefan(format!(
                "down-set of {} is not isomorphic to the face lattice of its cone",
                self.names[s]
            )));
        }
        for (x, &t1) in down.iter().enumerate() {
            for (y, &t2) in down.iter().enumerate() {
                let sub = faces[image[x]].is_subset(&faces[image[y]]);
                if sub != self.leq[t1][t2] {
                    return Err(Error::InvalidPrefan(format!(
                        "order below {} does not match face inclusion",
                        self.names[s]
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn len(&self) -> usize {
        self.cones.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cones.is_empty()
    }

    pub fn name(&self, e: usize) -> &str {
        &self.names[e]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn cone(&self, e: usize) -> &Cone {
        &self.cones[e]
    }

    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.leq[a][b]
    }

    pub fn minimum(&self) -> usize {
        self.minimum
    }

    /// Elements whose cone is a ray.
    pub fn rays(&self) -> Vec<usize> {
        (0..self.len()).filter(|&e| self.cones[e].dim() == 1).collect()
    }

    pub fn maximal_elements(&self) -> Vec<usize> {
        (0..self.len()).filter(|&a| (0..self.len()).all(|b| b == a || !self.leq[a][b])).collect()
    }

    /// Covering relations a < b with nothing in between.
    pub fn covers(&self) -> Vec<(usize, usize)> {
        let k = self.len();
        let mut out = Vec::new();
        for a in 0..k {
            for b in 0..k {
                if a == b || !self.leq[a][b] {
                    continue;
                }
                if !(0..k).any(|c| c != a && c != b && self.leq[a][c] && self.leq[c][b]) {
                    out.push((a, b));
                }
            }
        }
        out
    }
}

/// A prefan with a finite-index sublattice attached to every element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StackyPrefan {
    prefan: Prefan,
    sublattices: Vec<Vec<LatticeVector>>,
}

impl StackyPrefan {
    pub fn new(prefan: Prefan, sublattices: Vec<Vec<LatticeVector>>) -> Result<StackyPrefan> {
        let n = prefan.ambient_dim();
        if sublattices.len() != prefan.len() {
            return Err(Error::InvalidPrefan("one sublattice per element required".into()));
        }
        for (e, basis) in sublattices.iter().enumerate() {
            let cone = prefan.cone(e);
            if basis.len() != cone.dim() {
                return Err(Error::InvalidPrefan(format!("sublattice of {} has wrong rank", prefan.name(e))));
            }
            let vecs: Vec<Vec<Z>> = basis.iter().map(|b| b.0.clone()).collect();
            if !vecs.is_empty() && IntMatrix::from_columns(n, &vecs).rank() != basis.len() {
                return Err(Error::InvalidPrefan(format!("sublattice of {} is degenerate", prefan.name(e))));
            }
            if !basis.iter().all(|b| cone.span().contains(&b.to_q())) {
                return Err(Error::InvalidPrefan(format!(
                    "sublattice of {} leaves the span of its cone",
                    prefan.name(e)
                )));
            }
        }
        let sp = StackyPrefan { prefan, sublattices };
        for s in 0..sp.prefan.len() {
            for t in 0..sp.prefan.len() {
                if t != s && sp.prefan.leq(t, s) {
                    let meet = sp.restrict(s, t);
                    let own: Vec<Vec<Z>> = sp.sublattices[t].iter().map(|b| b.0.clone()).collect();
                    if !lattice_eq(n, &meet, &own) {
                        return Err(Error::InvalidPrefan(format!(
                            "sublattice of {} is not the restriction of the sublattice of {}",
                            sp.prefan.name(t),
                            sp.prefan.name(s)
                        )));
                    }
                }
            }
        }
        Ok(sp)
    }

    /// Every element gets the full lattice N_sigma.
    pub fn trivial(prefan: Prefan) -> Result<StackyPrefan> {
        let n = prefan.ambient_dim();
        let subs = (0..prefan.len())
            .map(|e| {
                let gens: Vec<Vec<Z>> = prefan.cone(e).generators().iter().map(|g| g.0.clone()).collect();
                saturation(n, &gens).into_iter().map(LatticeVector).collect()
            })
            .collect();
        StackyPrefan::new(prefan, subs)
    }

    /// Basis of N_tau ∩ N^0_sigma.
    fn restrict(&self, s: usize, t: usize) -> Vec<Vec<Z>> {
        let n = self.prefan.ambient_dim();
        let b: Vec<Vec<Z>> = self.sublattices[s].iter().map(|v| v.0.clone()).collect();
        if b.is_empty() {
            return Vec::new();
        }
        let bm = IntMatrix::from_columns(n, &b);
        let ann = self.prefan.cone(t).span().annihilator();
        if ann.is_zero() {
            return b;
        }
        let a = clear_denominators(ann.basis());
        let ker = integer_kernel(&a.mul(&bm));
        ker.iter().map(|x| bm.mul_vec(x)).collect()
    }

    pub fn prefan(&self) -> &Prefan {
        &self.prefan
    }

    pub fn sublattice(&self, e: usize) -> &[LatticeVector] {
        &self.sublattices[e]
    }

    /// Invariant factors (> 1) of G_sigma = N_sigma / N^0_sigma.
    pub fn stabilizer(&self, e: usize) -> Vec<Z> {
        let n = self.prefan.ambient_dim();
        let sub: Vec<Vec<Z>> = self.sublattices[e].iter().map(|v| v.0.clone()).collect();
        if sub.is_empty() {
            return Vec::new();
        }
        let gens: Vec<Vec<Z>> = self.prefan.cone(e).generators().iter().map(|g| g.0.clone()).collect();
        let sat = saturation(n, &gens);
        let sm = IntMatrix::from_columns(n, &sat);
        let cols: Vec<Vec<Z>> = sub
            .iter()
            .map(|v| solve_integer(&sm, v).expect("sublattice lies in the saturated lattice"))
            .collect();
        let x = IntMatrix::from_columns(sat.len(), &cols);
        smith_normal_form(&x).invariant_factors().into_iter().filter(|d| !d.is_one()).collect()
    }

    /// Generator of N^0 on the ray `r <= s`, in coordinates of the sublattice basis of `s`.
    pub fn ray_coordinates(&self, s: usize, r: usize) -> Vec<Z> {
        let n = self.prefan.ambient_dim();
        let b: Vec<Vec<Z>> = self.sublattices[s].iter().map(|v| v.0.clone()).collect();
        let bm = IntMatrix::from_columns(n, &b);
        let gen = &self.sublattices[r][0];
        let dir = &self.prefan.cone(r).generators()[0];
        let same = gen.0.iter().zip(&dir.0).map(|(a, b)| a * b).sum::<Z>().is_positive();
        let g = if same { gen.clone() } else { gen.neg() };
        let x = solve_integer(&bm, &g.0).expect("ray generator lies in the sublattice");
        debug_assert!(!x.iter().all(|c| c.is_zero()));
        x
    }
}
