//! Strongly convex rational polyhedral cones given by primitive generators.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use itertools::Itertools;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::matrix::{dot, IntMatrix, RationalMatrix, Q, Z};
use super::snf::smith_normal_form;
use super::subspace::Subspace;
use crate::error::{Error, Result};

/// An element of N or M.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatticeVector(pub Vec<Z>);

impl fmt::Debug for LatticeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        write!(f, "({})", c.join(","))
    }
}

impl LatticeVector {
    pub fn from_i64(v: &[i64]) -> Self {
        LatticeVector(v.iter().map(|&x| Z::from(x)).collect())
    }

    pub fn zero(n: usize) -> Self {
        LatticeVector(vec![Z::zero(); n])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|x| x.is_zero())
    }

    pub fn content(&self) -> Z {
        self.0.iter().fold(Z::zero(), |g, x| g.gcd(x))
    }

    pub fn is_primitive(&self) -> bool {
        self.content().is_one()
    }

    pub fn primitive(&self) -> Self {
        let g = self.content();
        if g.is_zero() {
            return self.clone();
        }
        LatticeVector(self.0.iter().map(|x| x / &g).collect())
    }

    pub fn to_q(&self) -> Vec<Q> {
        self.0.iter().map(|x| Q::from_integer(x.clone())).collect()
    }

    pub fn neg(&self) -> Self {
        LatticeVector(self.0.iter().map(|x| -x).collect())
    }

    /// Pairing with a character given by machine integers.
    pub fn pair(&self, u: &[i64]) -> i64 {
        let s: Z = self.0.iter().zip(u).map(|(a, &b)| a * Z::from(b)).sum();
        i64::try_from(&s).expect("pairing overflows i64")
    }

    pub fn pair_q(&self, u: &[Q]) -> Q {
        dot(&self.to_q(), u)
    }

    pub fn to_i64(&self) -> Vec<i64> {
        self.0.iter().map(|x| i64::try_from(x).expect("coordinate overflows i64")).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cone {
    ambient: usize,
    gens: Vec<LatticeVector>,
    dim: usize,
    span: Subspace,
    /// Facets as generator-index sets with an inward normal.
    facets: Vec<(Vec<usize>, Vec<Q>)>,
    /// All faces as sorted generator-index sets, ordered by size then lexicographically.
    faces: Vec<Vec<usize>>,
}

impl Cone {
    /// Generators are divided by their content; duplicates, zero vectors, redundant
    /// generators and cones containing a line are rejected.
    pub fn new(ambient: usize, gens: Vec<LatticeVector>) -> Result<Cone> {
        let mut prim = Vec::with_capacity(gens.len());
        for g in gens {
            if g.dim() != ambient {
                return Err(Error::DimensionMismatch { expected: ambient, found: g.dim() });
            }
            if g.is_zero() {
                return Err(Error::InvalidCone("zero generator".into()));
            }
            let p = g.primitive();
            if prim.contains(&p) {
                return Err(Error::InvalidCone(format!("duplicate generator {:?}", p)));
            }
            prim.push(p);
        }
        let span = Subspace::span(ambient, prim.iter().map(|g| g.to_q()).collect());
        let dim = span.dim();
        let k = prim.len();
        if k == 0 {
            return Ok(Cone { ambient, gens: prim, dim, span, facets: Vec::new(), faces: vec![Vec::new()] });
        }
        // coordinates of the generators with respect to the canonical basis of the span
        let bt = span.basis().transpose();
        let coords: Vec<Vec<Q>> = prim
            .iter()
            .map(|g| bt.solve(&g.to_q()).expect("generator lies in its span"))
            .collect();
        let mut facets: Vec<(Vec<usize>, Vec<Q>)> = Vec::new();
        for subset in (0..k).combinations(dim - 1) {
            let m = RationalMatrix::from_rows(dim, subset.iter().map(|&i| coords[i].clone()).collect());
            if m.rank() != dim - 1 {
                continue;
            }
            let ker = m.kernel();
            let mut w = ker[0].clone();
            let vals: Vec<Q> = coords.iter().map(|c| dot(&w, c)).collect();
            let pos = vals.iter().any(|x| x.is_positive());
            let neg = vals.iter().any(|x| x.is_negative());
            if pos && neg {
                continue;
            }
            if neg {
                w = w.iter().map(|x| -x).collect();
            }
            let zero_set: Vec<usize> = (0..k).filter(|&i| vals[i].is_zero()).collect();
            if facets.iter().any(|(s, _)| *s == zero_set) {
                continue;
            }
            // lift the functional from span coordinates to the ambient space
            let lifted = span.basis().solve(&w).expect("basis has full row rank");
            facets.push((zero_set, lifted));
        }
        let normal_rank = RationalMatrix::from_rows(
            dim,
            facets.iter().map(|(_, w)| span.basis().mul_vec(w)).collect(),
        )
        .rank();
        if normal_rank < dim {
            return Err(Error::InvalidCone("cone contains a line".into()));
        }
        facets.sort();
        let all: Vec<usize> = (0..k).collect();
        let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
        seen.insert(all.clone());
        let mut queue = VecDeque::from([all]);
        while let Some(f) = queue.pop_front() {
            for (g, _) in &facets {
                let meet: Vec<usize> = f.iter().copied().filter(|i| g.contains(i)).collect();
                if seen.insert(meet.clone()) {
                    queue.push_back(meet);
                }
            }
        }
        let mut faces: Vec<Vec<usize>> = seen.into_iter().collect();
        faces.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));
        for i in 0..k {
            if !faces.contains(&vec![i]) {
                return Err(Error::InvalidCone(format!("generator {:?} is not extremal", prim[i])));
            }
        }
        Ok(Cone { ambient, gens: prim, dim, span, facets, faces })
    }

    pub fn from_i64(ambient: usize, gens: &[Vec<i64>]) -> Result<Cone> {
        Cone::new(ambient, gens.iter().map(|g| LatticeVector::from_i64(g)).collect())
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn generators(&self) -> &[LatticeVector] {
        &self.gens
    }

    pub fn span(&self) -> &Subspace {
        &self.span
    }

    pub fn facets(&self) -> &[(Vec<usize>, Vec<Q>)] {
        &self.facets
    }

    pub fn faces(&self) -> &[Vec<usize>] {
        &self.faces
    }

    pub fn is_face(&self, subset: &[usize]) -> bool {
        let mut s = subset.to_vec();
        s.sort_unstable();
        self.faces.contains(&s)
    }

    pub fn is_simplicial(&self) -> bool {
        self.gens.len() == self.dim
    }

    /// Generators extend to a basis of N.
    pub fn is_smooth(&self) -> bool {
        if !self.is_simplicial() {
            return false;
        }
        if self.gens.is_empty() {
            return true;
        }
        let m = IntMatrix::from_columns(self.ambient, &self.gens.iter().map(|g| g.0.clone()).collect::<Vec<_>>());
        smith_normal_form(&m).invariant_factors().iter().all(|d| d.is_one())
    }

    /// Index of the sublattice generated by the generators in the saturated lattice of the span.
    pub fn multiplicity(&self) -> Z {
        if self.gens.is_empty() {
            return Z::one();
        }
        let m = IntMatrix::from_columns(self.ambient, &self.gens.iter().map(|g| g.0.clone()).collect::<Vec<_>>());
        smith_normal_form(&m).invariant_factors().iter().product()
    }

    /// Linear constraints describing the cone: `ineqs · x >= 0` and `eqs · x = 0`.
    pub fn h_representation(&self) -> (Vec<Vec<Q>>, Vec<Vec<Q>>) {
        let ineqs = self.facets.iter().map(|(_, w)| w.clone()).collect();
        let eqs = self.span.annihilator().vectors();
        (ineqs, eqs)
    }

    pub fn contains(&self, x: &[Q]) -> bool {
        let (ineqs, eqs) = self.h_representation();
        eqs.iter().all(|e| dot(e, x).is_zero()) && ineqs.iter().all(|w| !dot(w, x).is_negative())
    }

    pub fn generator_set(&self, subset: &[usize]) -> BTreeSet<LatticeVector> {
        subset.iter().map(|&i| self.gens[i].clone()).collect()
    }
}

/// Primitive extreme rays of the pointed cone {x : ineqs·x >= 0, eqs·x = 0}.
pub fn extreme_rays(ambient: usize, ineqs: &[Vec<Q>], eqs: &[Vec<Q>]) -> Vec<LatticeVector> {
    let mut cons: Vec<Vec<Q>> = ineqs.to_vec();
    for e in eqs {
        cons.push(e.clone());
        cons.push(e.iter().map(|x| -x).collect());
    }
    let feasible = |x: &[Q]| {
        ineqs.iter().all(|w| !dot(w, x).is_negative()) && eqs.iter().all(|e| dot(e, x).is_zero())
    };
    let mut out: BTreeSet<LatticeVector> = BTreeSet::new();
    if ambient == 0 {
        return Vec::new();
    }
    for subset in (0..cons.len()).combinations(ambient - 1) {
        let m = RationalMatrix::from_rows(ambient, subset.iter().map(|&i| cons[i].clone()).collect());
        if m.rank() != ambient - 1 {
            continue;
        }
        let ker = m.kernel();
        let w = &ker[0];
        for sign in [Q::one(), -Q::one()] {
            let x: Vec<Q> = w.iter().map(|a| a * &sign).collect();
            if feasible(&x) {
                out.insert(LatticeVector(super::snf::primitive_integer_vector(&x)));
            }
        }
    }
    out.into_iter().collect()
}
