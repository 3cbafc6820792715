//! Decreasing filtrations, Klyachko data and the compatibility decision procedure.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::lattice::matrix::IntMatrix;
use crate::lattice::snf::solve_integer;
use crate::lattice::{complement_in, Fan, StackyPrefan, Subspace};

/// A full decreasing filtration E(i) of Q^n. Each step records a distinct space together
/// with the last level at which it occurs; the first step is the full space.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Filtration {
    ambient: usize,
    steps: Vec<(i64, Subspace)>,
}

impl Filtration {
    pub fn new(ambient: usize, steps: Vec<(i64, Subspace)>) -> Result<Filtration> {
        for (_, s) in &steps {
            if s.ambient_dim() != ambient {
                return Err(Error::DimensionMismatch { expected: ambient, found: s.ambient_dim() });
            }
        }
        if ambient == 0 {
            return Ok(Filtration { ambient, steps: Vec::new() });
        }
        if steps.is_empty() {
            return Err(Error::InvalidFiltration("no steps".into()));
        }
        if !steps[0].1.is_full() {
            return Err(Error::InvalidFiltration("first step must be the full space".into()));
        }
        for w in steps.windows(2) {
            let ((i, a), (j, b)) = (&w[0], &w[1]);
            if i >= j {
                return Err(Error::InvalidFiltration("levels must increase strictly".into()));
            }
            if !b.is_subspace_of(a) || a == b {
                return Err(Error::InvalidFiltration("spaces must decrease strictly".into()));
            }
        }
        if steps.last().is_some_and(|(_, s)| s.is_zero()) {
            return Err(Error::InvalidFiltration("zero space is implicit above the last step".into()));
        }
        Ok(Filtration { ambient, steps })
    }

    /// E(i) = full for i <= level, 0 above.
    pub fn trivial(ambient: usize, level: i64) -> Filtration {
        if ambient == 0 {
            return Filtration { ambient, steps: Vec::new() };
        }
        Filtration { ambient, steps: vec![(level, Subspace::full(ambient))] }
    }

    /// Samples a decreasing family on [lo, hi]; full below lo and zero above hi are implied.
    pub fn from_fn(ambient: usize, lo: i64, hi: i64, f: impl Fn(i64) -> Subspace) -> Result<Filtration> {
        if ambient == 0 {
            return Ok(Filtration { ambient, steps: Vec::new() });
        }
        let mut vals: Vec<(i64, Subspace)> = Vec::new();
        vals.push((lo - 1, Subspace::full(ambient)));
        for i in lo..=hi {
            vals.push((i, f(i)));
        }
        vals.push((hi + 1, Subspace::zero(ambient)));
        let mut steps = Vec::new();
        for w in vals.windows(2) {
            if !w[1].1.is_subspace_of(&w[0].1) {
                return Err(Error::InvalidFiltration(format!("not decreasing at level {}", w[1].0)));
            }
            if w[0].1 != w[1].1 {
                steps.push(w[0].clone());
            }
        }
        Filtration::new(ambient, steps)
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn steps(&self) -> &[(i64, Subspace)] {
        &self.steps
    }

    /// Space of the smallest step level >= i; zero above every step.
    pub fn evaluate(&self, i: i64) -> Subspace {
        match self.steps.iter().find(|(l, _)| *l >= i) {
            Some((_, s)) => s.clone(),
            None => Subspace::zero(self.ambient),
        }
    }

    /// Last level with the full space and last level with a nonzero space;
    /// `(0, -1)` for the zero-dimensional filtration.
    pub fn bounds(&self) -> (i64, i64) {
        match (self.steps.first(), self.steps.last()) {
            (Some((lo, _)), Some((hi, _))) => (*lo, *hi),
            _ => (0, -1),
        }
    }

    /// Levels at which the space changes, as (level, dim of E(level) / E(level+1)).
    pub fn jumps(&self) -> Vec<(i64, usize)> {
        let mut out = Vec::new();
        for (k, (l, s)) in self.steps.iter().enumerate() {
            let next = self.steps.get(k + 1).map(|(_, t)| t.dim()).unwrap_or(0);
            out.push((*l, s.dim() - next));
        }
        out
    }
}

pub fn evaluate(f: &Filtration, i: i64) -> Subspace {
    f.evaluate(i)
}

/// Pieces of a simultaneous grading, keyed by multi-index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedDecomposition {
    pub pieces: BTreeMap<Vec<i64>, Subspace>,
}

/// The first filtration and level where the verification identity failed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DecompositionFailure {
    pub filtration: usize,
    pub level: i64,
}

fn box_indices(ranges: &[(i64, i64)]) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::new()];
    for &(lo, hi) in ranges {
        let mut next = Vec::new();
        for p in &out {
            for i in lo..=hi {
                let mut q = p.clone();
                q.push(i);
                next.push(q);
            }
        }
        out = next;
    }
    out
}

pub fn graded_decompose(
    filtrations: &[Filtration],
    allowed: &dyn Fn(&[i64]) -> bool,
) -> Result<std::result::Result<GradedDecomposition, DecompositionFailure>> {
    let n = match filtrations.first() {
        Some(f) => f.ambient_dim(),
        None => {
            return Err(Error::Precondition("graded_decompose needs the ambient dimension".into()))
        }
    };
    graded_decompose_in(n, filtrations, allowed)
}

/// As `graded_decompose`, with the ambient dimension given explicitly so that an empty
/// family of filtrations is allowed.
pub fn graded_decompose_in(
    n: usize,
    filtrations: &[Filtration],
    allowed: &dyn Fn(&[i64]) -> bool,
) -> Result<std::result::Result<GradedDecomposition, DecompositionFailure>> {
    for f in filtrations {
        if f.ambient_dim() != n {
            return Err(Error::DimensionMismatch { expected: n, found: f.ambient_dim() });
        }
    }
    let ranges: Vec<(i64, i64)> = filtrations.iter().map(|f| f.bounds()).collect();
    let levels: Vec<HashMap<i64, Subspace>> = filtrations
        .iter()
        .zip(&ranges)
        .map(|(f, &(lo, hi))| (lo..=hi + 1).map(|i| (i, f.evaluate(i))).collect())
        .collect();
    let mut cache: HashMap<Vec<i64>, Subspace> = HashMap::new();
    let mut inter = |u: &[i64]| -> Subspace {
        if let Some(s) = cache.get(u) {
            return s.clone();
        }
        let s = Subspace::meet_all(n, u.iter().zip(&levels).map(|(i, l)| &l[i]));
        cache.insert(u.to_vec(), s.clone());
        s
    };
    let mut idx = box_indices(&ranges);
    idx.reverse();
    let mut pieces = BTreeMap::new();
    for u in idx {
        if n > 0 && !allowed(&u) {
            continue;
        }
        let i_u = inter(&u);
        if i_u.is_zero() {
            continue;
        }
        let mut above = Vec::with_capacity(u.len());
        for j in 0..u.len() {
            let mut v = u.clone();
            v[j] += 1;
            above.push(inter(&v));
        }
        let b_u = Subspace::join_all(n, above.iter()).meet(&i_u)?;
        let piece = complement_in(&b_u, &i_u)?;
        if !piece.is_zero() {
            pieces.insert(u, piece);
        }
    }
    let dec = GradedDecomposition { pieces };
    Ok(match verify_decomposition(n, filtrations, &dec) {
        Some(fail) => Err(fail),
        None => Ok(dec),
    })
}

/// Checks E_j(i) = ⊕_{u_j >= i} piece(u) for every filtration and relevant level.
pub fn verify_decomposition(
    n: usize,
    filtrations: &[Filtration],
    dec: &GradedDecomposition,
) -> Option<DecompositionFailure> {
    let total: usize = dec.pieces.values().map(|p| p.dim()).sum();
    let all = Subspace::join_all(n, dec.pieces.values());
    if filtrations.is_empty() && (total != n || !all.is_full()) {
        return Some(DecompositionFailure { filtration: 0, level: 0 });
    }
    for (j, f) in filtrations.iter().enumerate() {
        let (lo, hi) = f.bounds();
        for i in lo..=hi + 1 {
            let sel: Vec<&Subspace> = dec.pieces.iter().filter(|(u, _)| u[j] >= i).map(|(_, p)| p).collect();
            let dim: usize = sel.iter().map(|p| p.dim()).sum();
            let sum = Subspace::join_all(n, sel);
            let target = f.evaluate(i);
            if dim != target.dim() || sum != target {
                return Some(DecompositionFailure { filtration: j, level: i });
            }
        }
    }
    None
}

#[derive(Clone, Debug)]
pub enum Base {
    Fan(Arc<Fan>),
    Stacky(Arc<StackyPrefan>),
}

impl PartialEq for Base {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Base::Fan(a), Base::Fan(b)) => Arc::ptr_eq(a, b) || a == b,
            (Base::Stacky(a), Base::Stacky(b)) => Arc::ptr_eq(a, b) || a == b,
            _ => false,
        }
    }
}

impl Base {
    pub fn num_rays(&self) -> usize {
        match self {
            Base::Fan(f) => f.rays().len(),
            Base::Stacky(s) => s.prefan().rays().len(),
        }
    }

    pub fn fan(&self) -> Option<&Arc<Fan>> {
        match self {
            Base::Fan(f) => Some(f),
            Base::Stacky(_) => None,
        }
    }

    /// For every maximal cone: its ray positions and the matrix whose rows pair
    /// characters of the cone's lattice with those rays.
    pub fn cone_charts(&self) -> Vec<(Vec<usize>, IntMatrix)> {
        match self {
            Base::Fan(f) => f
                .maximal_cones()
                .iter()
                .map(|c| {
                    let rows: Vec<Vec<BigInt>> = c.iter().map(|&r| f.ray(r).0.clone()).collect();
                    (c.clone(), IntMatrix::from_rows(f.rank(), rows))
                })
                .collect(),
            Base::Stacky(s) => {
                let p = s.prefan();
                let rays = p.rays();
                p.maximal_elements()
                    .into_iter()
                    .map(|m| {
                        let members: Vec<usize> = (0..rays.len()).filter(|&k| p.leq(rays[k], m)).collect();
                        let rows: Vec<Vec<BigInt>> =
                            members.iter().map(|&k| s.ray_coordinates(m, rays[k])).collect();
                        (members, IntMatrix::from_rows(s.sublattice(m).len(), rows))
                    })
                    .collect()
            }
        }
    }
}

/// Vector space with one filtration per ray of its base.
#[derive(Clone, Debug, PartialEq)]
pub struct KlyachkoBundle {
    rank: usize,
    base: Base,
    filtrations: Vec<Filtration>,
}

impl KlyachkoBundle {
    pub fn new(rank: usize, base: Base, filtrations: Vec<Filtration>) -> Result<KlyachkoBundle> {
        if filtrations.len() != base.num_rays() {
            return Err(Error::Precondition(format!(
                "expected {} filtrations, found {}",
                base.num_rays(),
                filtrations.len()
            )));
        }
        if let Some(f) = filtrations.iter().find(|f| f.ambient_dim() != rank) {
            return Err(Error::DimensionMismatch { expected: rank, found: f.ambient_dim() });
        }
        Ok(KlyachkoBundle { rank, base, filtrations })
    }

    pub fn on_fan(fan: &Arc<Fan>, rank: usize, filtrations: Vec<Filtration>) -> Result<KlyachkoBundle> {
        KlyachkoBundle::new(rank, Base::Fan(fan.clone()), filtrations)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn base(&self) -> &Base {
        &self.base
    }

    pub fn fan(&self) -> Result<&Arc<Fan>> {
        self.base.fan().ok_or_else(|| Error::Precondition("bundle must live on a fan".into()))
    }

    pub fn filtrations(&self) -> &[Filtration] {
        &self.filtrations
    }

    pub fn filtration(&self, ray: usize) -> &Filtration {
        &self.filtrations[ray]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CompatibilityFailure {
    /// Index of the maximal cone (or maximal prefan element) in chart order.
    pub cone: usize,
    /// Ray (index into the base's ray list) and level of the failed identity.
    pub ray: usize,
    pub level: i64,
}

pub type ConeDecompositions = Vec<(Vec<usize>, GradedDecomposition)>;

pub fn check_compatibility(v: &KlyachkoBundle) -> Result<std::result::Result<ConeDecompositions, CompatibilityFailure>> {
    let mut out = Vec::new();
    for (k, (rays, pairing)) in v.base.cone_charts().into_iter().enumerate() {
        let fils: Vec<Filtration> = rays.iter().map(|&r| v.filtrations[r].clone()).collect();
        let allowed = |u: &[i64]| {
            let b: Vec<BigInt> = u.iter().map(|&x| BigInt::from(x)).collect();
            solve_integer(&pairing, &b).is_some()
        };
        match graded_decompose_in(v.rank, &fils, &allowed)? {
            Ok(d) => out.push((rays, d)),
            Err(f) => {
                let ray = rays.get(f.filtration).copied().unwrap_or(0);
                return Ok(Err(CompatibilityFailure { cone: k, ray, level: f.level }));
            }
        }
    }
    Ok(Ok(out))
}

pub fn is_compatible(v: &KlyachkoBundle) -> Result<bool> {
    Ok(check_compatibility(v)?.is_ok())
}
