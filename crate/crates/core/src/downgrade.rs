//! Restricting the torus: quotient stacky prefan, contracted rays and downgraded filtrations.

use std::fmt::Write as _;
use std::sync::Arc;

use num_traits::One;

use crate::error::{Error, Result};
use crate::filtration::{graded_decompose_in, Base, Filtration, KlyachkoBundle};
use crate::lattice::matrix::{IntMatrix, Q, Z};
use crate::lattice::snf::{integer_kernel, saturation, smith_normal_form};
use crate::lattice::{Cone, Fan, LatticeVector, Prefan, StackyPrefan, Subspace};

/// A surjection mu : N' -> N-bar together with a basis of its kernel N.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProjectionData {
    pub mu: IntMatrix,
    /// Columns span ker mu.
    pub kernel: IntMatrix,
}

impl ProjectionData {
    pub fn new(mu: IntMatrix) -> Result<ProjectionData> {
        let s = smith_normal_form(&mu);
        if s.rank() != mu.nrows() || s.invariant_factors().iter().any(|d| !d.is_one()) {
            return Err(Error::NotSurjective);
        }
        let ker = integer_kernel(&mu);
        let kernel = IntMatrix::from_columns(mu.ncols(), &ker);
        Ok(ProjectionData { mu, kernel })
    }

    pub fn from_i64_rows(cols: usize, rows: &[Vec<i64>]) -> Result<ProjectionData> {
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Malformed("projection rows have unequal length".into()));
        }
        ProjectionData::new(IntMatrix::from_i64_rows(cols, rows))
    }

    pub fn identity(n: usize) -> ProjectionData {
        ProjectionData::new(IntMatrix::identity(n)).expect("identity is surjective")
    }

    pub fn source_rank(&self) -> usize {
        self.mu.ncols()
    }

    pub fn target_rank(&self) -> usize {
        self.mu.nrows()
    }

    pub fn apply(&self, v: &LatticeVector) -> LatticeVector {
        LatticeVector(self.mu.mul_vec(&v.0))
    }
}

#[derive(Clone, Debug)]
pub struct DowngradeResult {
    /// Cones of the original fan keeping their dimension, as ray-index lists; element `e`
    /// of the quotient prefan is `dm_subfan[e]`.
    pub dm_subfan: Vec<Vec<usize>>,
    /// Indices of the rays with mu(ρ) = 0.
    pub contracted_rays: Vec<usize>,
    pub contracted: Vec<LatticeVector>,
    pub quotient: Arc<StackyPrefan>,
    /// Invariant factors of G_σ per prefan element.
    pub stabilizers: Vec<Vec<Z>>,
    /// Original ray index of each quotient ray, in the order of the quotient's ray list.
    pub ray_map: Vec<usize>,
}

fn rank_of(vs: &[Vec<Z>], n: usize) -> usize {
    if vs.is_empty() {
        0
    } else {
        IntMatrix::from_columns(n, vs).rank()
    }
}

pub fn downgrade_fan(fan: &Fan, proj: &ProjectionData) -> Result<DowngradeResult> {
    let n = fan.rank();
    if proj.source_rank() != n {
        return Err(Error::DimensionMismatch { expected: n, found: proj.source_rank() });
    }
    let k = proj.target_rank();
    let mut dm_subfan = Vec::new();
    for f in fan.faces() {
        let gens: Vec<Vec<Z>> = f.iter().map(|&r| fan.ray(r).0.clone()).collect();
        let imgs: Vec<Vec<Z>> = f.iter().map(|&r| proj.apply(fan.ray(r)).0).collect();
        if rank_of(&gens, n) == rank_of(&imgs, k) {
            dm_subfan.push(f.clone());
        }
    }
    let contracted_rays: Vec<usize> =
        (0..fan.rays().len()).filter(|&r| proj.apply(fan.ray(r)).is_zero()).collect();
    let contracted = contracted_rays.iter().map(|&r| fan.ray(r).clone()).collect();

    let names: Vec<String> = dm_subfan.iter().map(|f| format!("{:?}", f)).collect();
    let cones = dm_subfan
        .iter()
        .map(|f| Cone::new(k, f.iter().map(|&r| proj.apply(fan.ray(r))).collect()))
        .collect::<Result<Vec<_>>>()?;
    let mut relations = Vec::new();
    for (a, fa) in dm_subfan.iter().enumerate() {
        for (b, fb) in dm_subfan.iter().enumerate() {
            if fa.len() < fb.len() && fa.iter().all(|r| fb.contains(r)) {
                relations.push((a, b));
            }
        }
    }
    let prefan = Prefan::new(k, names, cones, &relations)?;
    let subs: Vec<Vec<LatticeVector>> = dm_subfan
        .iter()
        .map(|f| {
            let gens: Vec<Vec<Z>> = f.iter().map(|&r| fan.ray(r).0.clone()).collect();
            saturation(n, &gens).into_iter().map(|b| LatticeVector(proj.mu.mul_vec(&b))).collect()
        })
        .collect();
    let quotient = StackyPrefan::new(prefan, subs)?;
    let stabilizers = (0..quotient.prefan().len()).map(|e| quotient.stabilizer(e)).collect();
    let ray_map = quotient.prefan().rays().iter().map(|&e| dm_subfan[e][0]).collect();
    Ok(DowngradeResult {
        dm_subfan,
        contracted_rays,
        contracted,
        quotient: Arc::new(quotient),
        stabilizers,
        ray_map,
    })
}

/// A decreasing family of subspaces of a fixed subspace `top`, zero above the last step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubFiltration {
    pub top: Subspace,
    pub steps: Vec<(i64, Subspace)>,
}

impl SubFiltration {
    pub fn evaluate(&self, i: i64) -> Subspace {
        match self.steps.iter().find(|(l, _)| *l >= i) {
            Some((_, s)) => s.clone(),
            None => Subspace::zero(self.top.ambient_dim()),
        }
    }
}

/// Level j of an H-filtration: the sub-bundle E^γ(j) with filtrations E^ρ(i) ∩ E^γ(j).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelativeLevel {
    pub level: i64,
    pub space: Subspace,
    /// One per quotient ray.
    pub filtrations: Vec<SubFiltration>,
}

impl RelativeLevel {
    /// The family in coordinates of the canonical basis of `space`.
    pub fn to_bundle(&self, base: &Base) -> Result<KlyachkoBundle> {
        let d = self.space.dim();
        let bt = self.space.basis().transpose();
        let coords = |s: &Subspace| -> Subspace {
            Subspace::span(d, s.vectors().iter().map(|v| bt.solve(v).expect("vector lies in the sub-bundle")).collect())
        };
        let fils = self
            .filtrations
            .iter()
            .map(|f| {
                let steps = f.steps.iter().map(|(l, s)| (*l, coords(s))).collect();
                Filtration::new(d, steps)
            })
            .collect::<Result<Vec<_>>>()?;
        KlyachkoBundle::new(d, base.clone(), fils)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HFiltration {
    /// Original ray index of γ.
    pub gamma: usize,
    /// Levels from the last full level to the last nonzero level.
    pub levels: Vec<RelativeLevel>,
}

impl HFiltration {
    pub fn at(&self, j: i64) -> Option<&RelativeLevel> {
        self.levels.iter().find(|l| l.level == j)
    }
}

#[derive(Clone, Debug)]
pub struct DowngradedBundle {
    pub result: DowngradeResult,
    pub stacky_bundle: KlyachkoBundle,
    pub h_filtrations: Vec<HFiltration>,
}

fn sub_filtration(f: &Filtration, top: &Subspace) -> SubFiltration {
    let (lo, hi) = f.bounds();
    let vals: Vec<(i64, Subspace)> =
        (lo..=hi + 1).map(|i| (i, f.evaluate(i).meet(top).expect("same ambient"))).collect();
    let mut steps = Vec::new();
    for (k, (i, s)) in vals.iter().enumerate() {
        if !s.is_zero() && vals.get(k + 1).is_none_or(|(_, t)| t != s) {
            steps.push((*i, s.clone()));
        }
    }
    SubFiltration { top: top.clone(), steps }
}

pub fn downgrade_bundle(v: &KlyachkoBundle, proj: &ProjectionData) -> Result<DowngradedBundle> {
    let fan = v.fan()?;
    let result = downgrade_fan(fan, proj)?;
    let base = Base::Stacky(result.quotient.clone());
    let fils: Vec<Filtration> = result.ray_map.iter().map(|&r| v.filtration(r).clone()).collect();
    let stacky_bundle = KlyachkoBundle::new(v.rank(), base, fils)?;
    let mut h_filtrations = Vec::new();
    for &g in &result.contracted_rays {
        let fg = v.filtration(g);
        let (lo, hi) = fg.bounds();
        let levels = (lo..=hi)
            .map(|j| {
                let space = fg.evaluate(j);
                let filtrations =
                    result.ray_map.iter().map(|&r| sub_filtration(v.filtration(r), &space)).collect();
                RelativeLevel { level: j, space, filtrations }
            })
            .collect();
        h_filtrations.push(HFiltration { gamma: g, levels });
    }
    Ok(DowngradedBundle { result, stacky_bundle, h_filtrations })
}

/// One rank-one summand: its generating line and the raw jump at every quotient ray.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SummandProfile {
    pub line: Subspace,
    pub jumps: Vec<i64>,
}

impl SummandProfile {
    /// Divisor coefficients under the convention a_ρ = -jump.
    pub fn divisor(&self) -> Vec<i64> {
        self.jumps.iter().map(|j| -j).collect()
    }
}

/// Splits the downgraded bundle into rank-one summands by a simultaneous grading of all
/// quotient ray filtrations. Pieces of dimension > 1 are cut into the lines of their
/// canonical basis.
pub fn line_summand_profile(d: &DowngradedBundle) -> Result<Vec<SummandProfile>> {
    let v = &d.stacky_bundle;
    match graded_decompose_in(v.rank(), v.filtrations(), &|_| true)? {
        Ok(dec) => {
            let mut out = Vec::new();
            for (u, piece) in &dec.pieces {
                for b in piece.vectors() {
                    out.push(SummandProfile { line: Subspace::span(v.rank(), vec![b]), jumps: u.clone() });
                }
            }
            Ok(out)
        }
        Err(f) => Err(Error::Precondition(format!(
            "downgraded bundle does not split (filtration {}, level {})",
            f.filtration, f.level
        ))),
    }
}

/// Text rendering of a stacky prefan: one block per maximal element listing its faces,
/// then the sublattice table.
pub fn render_prefan(sp: &StackyPrefan) -> String {
    let p = sp.prefan();
    let mut s = String::new();
    let gens = |e: usize| -> String {
        let g: Vec<String> = p.cone(e).generators().iter().map(|v| format!("{:?}", v)).collect();
        format!("cone({})", g.join(", "))
    };
    let _ = writeln!(s, "elements:");
    for e in 0..p.len() {
        let _ = writeln!(s, "  {} -> {}", p.name(e), gens(e));
    }
    let _ = writeln!(s, "covers:");
    for (a, b) in p.covers() {
        let _ = writeln!(s, "  {} < {}", p.name(a), p.name(b));
    }
    let _ = writeln!(s, "charts:");
    for m in p.maximal_elements() {
        let below: Vec<&str> = (0..p.len()).filter(|&t| p.leq(t, m)).map(|t| p.name(t)).collect();
        let _ = writeln!(s, "  {}: {}", p.name(m), below.join(" "));
    }
    let _ = writeln!(s, "sublattices:");
    for e in 0..p.len() {
        let b: Vec<String> = sp.sublattice(e).iter().map(|v| format!("{:?}", v)).collect();
        let st: Vec<String> = sp.stabilizer(e).iter().map(|z| z.to_string()).collect();
        let _ = writeln!(s, "  {}: basis [{}] stabilizer [{}]", p.name(e), b.join(", "), st.join(", "));
    }
    s
}

/// Index of the generator of μ(N'_σ) relative to the primitive generator, for a ray element.
pub fn ray_multiplicity(sp: &StackyPrefan, e: usize) -> Z {
    let g = &sp.sublattice(e)[0];
    g.content()
}

/// Rational vector mu_Q(v).
pub fn apply_rational(proj: &ProjectionData, v: &[Q]) -> Vec<Q> {
    proj.mu.to_rational().mul_vec(v)
}
