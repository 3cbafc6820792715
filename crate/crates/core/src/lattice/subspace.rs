//! Linear subspaces of Q^n in canonical reduced row echelon form.

use num_traits::{One, Zero};

use super::matrix::{rank_of_rows, RationalMatrix, Q};
use crate::error::{Error, Result};

/// A subspace of Q^n. Two values are equal iff they are the same subspace.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Subspace {
    ambient: usize,
    basis: RationalMatrix,
}

impl Subspace {
    pub fn span(ambient: usize, vectors: Vec<Vec<Q>>) -> Self {
        let (basis, _) = RationalMatrix::from_rows(ambient, vectors).rref();
        Subspace { ambient, basis }
    }

    pub fn from_i64(ambient: usize, vectors: &[Vec<i64>]) -> Self {
        let (basis, _) = RationalMatrix::from_i64_rows(ambient, vectors).rref();
        Subspace { ambient, basis }
    }

    pub fn zero(ambient: usize) -> Self {
        Subspace { ambient, basis: RationalMatrix::zeros(0, ambient) }
    }

    pub fn full(ambient: usize) -> Self {
        Subspace { ambient, basis: RationalMatrix::identity(ambient) }
    }

    pub fn coordinate(ambient: usize, idx: &[usize]) -> Self {
        let rows = idx
            .iter()
            .map(|&i| (0..ambient).map(|j| if i == j { Q::one() } else { Q::zero() }).collect())
            .collect();
        Self::span(ambient, rows)
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn is_zero(&self) -> bool {
        self.dim() == 0
    }

    pub fn is_full(&self) -> bool {
        self.dim() == self.ambient
    }

    /// Canonical basis rows.
    pub fn basis(&self) -> &RationalMatrix {
        &self.basis
    }

    pub fn vectors(&self) -> Vec<Vec<Q>> {
        self.basis.to_rows()
    }

    fn check(&self, other: &Subspace) -> Result<()> {
        if self.ambient != other.ambient {
            return Err(Error::DimensionMismatch { expected: self.ambient, found: other.ambient });
        }
        Ok(())
    }

    pub fn contains(&self, v: &[Q]) -> bool {
        let mut rows = self.vectors();
        rows.push(v.to_vec());
        rank_of_rows(rows, self.ambient) == self.dim()
    }

    pub fn is_subspace_of(&self, other: &Subspace) -> bool {
        self.ambient == other.ambient && self.basis.rows().all(|r| other.contains(r))
    }

    pub fn join(&self, other: &Subspace) -> Result<Subspace> {
        self.check(other)?;
        if other.is_zero() || self.is_full() {
            return Ok(self.clone());
        }
        if self.is_zero() || other.is_full() {
            return Ok(other.clone());
        }
        let mut rows = self.vectors();
        rows.extend(other.vectors());
        Ok(Subspace::span(self.ambient, rows))
    }

    pub fn meet(&self, other: &Subspace) -> Result<Subspace> {
        self.check(other)?;
        if self.is_full() || other.is_zero() {
            return Ok(other.clone());
        }
        if other.is_full() || self.is_zero() {
            return Ok(self.clone());
        }
        let ann = self.annihilator().join(&other.annihilator())?;
        Ok(ann.annihilator())
    }

    /// Orthogonal complement under the standard pairing (the annihilator in the dual space).
    pub fn annihilator(&self) -> Subspace {
        if self.is_zero() {
            return Subspace::full(self.ambient);
        }
        Subspace::span(self.ambient, self.basis.kernel())
    }

    /// Sum of a family of subspaces of Q^n.
    pub fn join_all<'a>(ambient: usize, spaces: impl IntoIterator<Item = &'a Subspace>) -> Subspace {
        let mut rows = Vec::new();
        for s in spaces {
            assert_eq!(s.ambient, ambient);
            rows.extend(s.vectors());
        }
        Subspace::span(ambient, rows)
    }

    pub fn meet_all<'a>(ambient: usize, spaces: impl IntoIterator<Item = &'a Subspace>) -> Subspace {
        let mut acc = Subspace::full(ambient);
        for s in spaces {
            acc = acc.meet(s).expect("ambient dimensions agree");
            if acc.is_zero() {
                break;
            }
        }
        acc
    }

    /// Block embedding into Q^(offset + ambient + trailing).
    pub fn embed(&self, offset: usize, total: usize) -> Subspace {
        let rows = self
            .basis
            .rows()
            .map(|r| {
                let mut v = vec![Q::zero(); total];
                v[offset..offset + self.ambient].clone_from_slice(r);
                v
            })
            .collect();
        Subspace::span(total, rows)
    }

    /// A ⊕ B inside Q^(a+b).
    pub fn direct_sum(&self, other: &Subspace) -> Subspace {
        let total = self.ambient + other.ambient;
        let mut rows = self.embed(0, total).vectors();
        rows.extend(other.embed(self.ambient, total).vectors());
        Subspace::span(total, rows)
    }

    /// A ⊗ B inside Q^(a*b), index (i, j) -> i * b + j.
    pub fn tensor(&self, other: &Subspace) -> Subspace {
        let total = self.ambient * other.ambient;
        let mut rows = Vec::with_capacity(self.dim() * other.dim());
        for a in self.basis.rows() {
            for b in other.basis.rows() {
                rows.push(kron(a, b));
            }
        }
        Subspace::span(total, rows)
    }
}

pub fn kron(a: &[Q], b: &[Q]) -> Vec<Q> {
    let mut v = Vec::with_capacity(a.len() * b.len());
    for x in a {
        for y in b {
            v.push(if x.is_zero() || y.is_zero() { Q::zero() } else { x * y });
        }
    }
    v
}

pub fn subspace_meet(a: &Subspace, b: &Subspace) -> Result<Subspace> {
    a.meet(b)
}

pub fn subspace_join(a: &Subspace, b: &Subspace) -> Result<Subspace> {
    a.join(b)
}

/// C with A ⊕ C = B, built greedily from the canonical basis rows of B in echelon order.
pub fn complement_in(a: &Subspace, b: &Subspace) -> Result<Subspace> {
    a.check(b)?;
    if !a.is_subspace_of(b) {
        return Err(Error::NotSubspace);
    }
    let n = a.ambient;
    let mut acc = a.vectors();
    let mut rank = a.dim();
    let mut chosen = Vec::new();
    for r in b.basis.rows() {
        if rank == b.dim() {
            break;
        }
        acc.push(r.to_vec());
        let nr = rank_of_rows(acc.clone(), n);
        if nr > rank {
            rank = nr;
            chosen.push(r.to_vec());
        } else {
            acc.pop();
        }
    }
    Ok(Subspace::span(n, chosen))
}
