//! Global vector fields on complete rational complexity-one T-varieties.
//!
//! The quotient is covered by charts, each a projective line with marked points P carrying
//! v_P ∈ N_Q. Degree-u sections are computed per chart from the case formula and, for several
//! charts, as an intersection of explicit spaces of rational vector fields in a shared
//! coordinate y.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use serde::Serialize;

use crate::cohomology::GradedDims;
use crate::downgrade::ProjectionData;
use crate::error::{Error, Result};
use crate::lattice::matrix::{dot, q, q_vec, qz, RationalMatrix, Q};
use crate::lattice::snf::solve_integer;
use crate::lattice::{Fan, Subspace};
use crate::polytope::Polyhedron;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Location {
    Finite(Q),
    Infinity,
}

impl Location {
    pub fn is_infinity(&self) -> bool {
        matches!(self, Location::Infinity)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct C1Point {
    pub label: String,
    pub location: Location,
    pub v: Vec<Q>,
}

impl C1Point {
    /// Smallest n > 0 with n·v ∈ N.
    pub fn n(&self) -> BigInt {
        self.v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct C1Chart {
    pub points: Vec<C1Point>,
}

/// Complexity-one data: torus lattice N of rank m, contracted set 𝓗 ⊂ N, and one or more charts
/// sharing the coordinate y and the torus coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct C1Data {
    pub rank: usize,
    pub h: Vec<Vec<i64>>,
    pub charts: Vec<C1Chart>,
}

impl C1Data {
    pub fn separated(rank: usize, h: Vec<Vec<i64>>, points: Vec<C1Point>) -> C1Data {
        C1Data { rank, h, charts: vec![C1Chart { points }] }
    }

    pub fn validate(&self) -> Result<()> {
        if self.charts.is_empty() {
            return Err(Error::Malformed("no charts".into()));
        }
        for h in &self.h {
            if h.len() != self.rank {
                return Err(Error::DimensionMismatch { expected: self.rank, found: h.len() });
            }
            if h.iter().all(|&x| x == 0) {
                return Err(Error::Malformed("zero element in H".into()));
            }
        }
        for c in &self.charts {
            for (i, p) in c.points.iter().enumerate() {
                if p.v.len() != self.rank {
                    return Err(Error::DimensionMismatch { expected: self.rank, found: p.v.len() });
                }
                if c.points[..i].iter().any(|o| o.location == p.location) {
                    return Err(Error::Malformed(format!("point {} repeats a location", p.label)));
                }
            }
        }
        Ok(())
    }
}

pub fn point(label: &str, location: Location, v: &[i64]) -> C1Point {
    C1Point { label: label.to_string(), location, v: q_vec(v) }
}

fn floor_i64(x: &Q) -> i64 {
    x.floor().to_integer().to_i64().expect("coefficient fits in i64")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlphaGamma {
    pub alpha: Vec<Q>,
    /// ⌊α_P(u)⌋ per point.
    pub gamma: Vec<i64>,
    /// Membership in 𝒫(u); the complement is 𝒫̄(u).
    pub integral: Vec<bool>,
    pub v_sum: Vec<Q>,
}

pub fn alpha_gamma(rank: usize, chart: &C1Chart, u: &[i64]) -> AlphaGamma {
    let uq = q_vec(u);
    let mut alpha = Vec::new();
    let mut v_sum = vec![Q::zero(); rank];
    let mut integral = Vec::new();
    for p in &chart.points {
        let n = qz(&p.n());
        let a = -dot(&uq, &p.v) + (Q::one() - &n) / &n;
        let int = a.is_integer();
        if int {
            for (s, x) in v_sum.iter_mut().zip(&p.v) {
                *s += x;
            }
        }
        integral.push(int);
        alpha.push(a);
    }
    let gamma = alpha.iter().map(floor_i64).collect();
    AlphaGamma { alpha, gamma, integral, v_sum }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum VfCase {
    /// u(ρ) < 1 on 𝓗, 𝒫(u) = 𝒫, 𝐯(u) ≠ 0.
    Full,
    /// u(ρ) < 1 on 𝓗 otherwise.
    Split,
    /// u(ρ) = 1 for exactly one ρ ∈ 𝓗, index given.
    Boundary(usize),
    Zero,
}

pub fn classify(data: &C1Data, chart: &C1Chart, u: &[i64]) -> VfCase {
    let vals: Vec<i64> = data.h.iter().map(|h| h.iter().zip(u).map(|(a, b)| a * b).sum()).collect();
    if vals.iter().all(|&x| x < 1) {
        let ag = alpha_gamma(data.rank, chart, u);
        if ag.integral.iter().all(|&b| b) && ag.v_sum.iter().any(|x| !x.is_zero()) {
            VfCase::Full
        } else {
            VfCase::Split
        }
    } else {
        let ones: Vec<usize> = (0..vals.len()).filter(|&k| vals[k] == 1).collect();
        if ones.len() == 1 && vals.iter().all(|&x| x <= 1) {
            VfCase::Boundary(ones[0])
        } else {
            VfCase::Zero
        }
    }
}

/// Divisor on P¹: coefficients at finite points plus a coefficient at ∞.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct P1Divisor {
    pub finite: BTreeMap<Q, i64>,
    pub infinity: i64,
}

impl P1Divisor {
    fn from_chart(chart: &C1Chart, coeffs: &[i64]) -> P1Divisor {
        let mut d = P1Divisor::default();
        for (p, &c) in chart.points.iter().zip(coeffs) {
            match &p.location {
                Location::Finite(a) => *d.finite.entry(a.clone()).or_insert(0) += c,
                Location::Infinity => d.infinity += c,
            }
        }
        d
    }

    pub fn degree(&self) -> i64 {
        self.finite.values().sum::<i64>() + self.infinity
    }

    pub fn h0(&self) -> usize {
        (self.degree() + 1).max(0) as usize
    }

    fn twist_infinity(&self, k: i64) -> P1Divisor {
        P1Divisor { finite: self.finite.clone(), infinity: self.infinity + k }
    }

    /// y^k · Π (y-P)^{-d_P}, k = 0..deg.
    pub fn sections(&self) -> Vec<RatFn> {
        let mut base = RatFn::constant(Q::one());
        for (p, &d) in &self.finite {
            if d > 0 {
                base.terms[0].1.insert(p.clone(), d as u32);
            } else {
                for _ in 0..(-d) {
                    base.terms[0].0 = poly_mul(&base.terms[0].0, &linear(p));
                }
            }
        }
        (0..self.h0()).map(|k| base.mul(&RatFn::monomial(k))).collect()
    }
}

/// L^{-u} = O(Σ ⌊-u(v_P)⌋ P).
pub fn l_minus_u(chart: &C1Chart, u: &[i64]) -> P1Divisor {
    let uq = q_vec(u);
    let c: Vec<i64> = chart.points.iter().map(|p| floor_i64(&-dot(&uq, &p.v))).collect();
    P1Divisor::from_chart(chart, &c)
}

pub fn gamma_divisor(rank: usize, chart: &C1Chart, u: &[i64]) -> P1Divisor {
    P1Divisor::from_chart(chart, &alpha_gamma(rank, chart, u).gamma)
}

pub fn chart_dim(data: &C1Data, chart: &C1Chart, u: &[i64]) -> usize {
    let m = data.rank;
    let l = l_minus_u(chart, u).h0();
    let g = gamma_divisor(m, chart, u);
    match classify(data, chart, u) {
        VfCase::Full => l * (m - 1) + 2 * g.twist_infinity(1).h0(),
        VfCase::Split => l * m + g.twist_infinity(2).h0(),
        VfCase::Boundary(_) => l,
        VfCase::Zero => 0,
    }
}

fn poly_mul(a: &[Q], b: &[Q]) -> Vec<Q> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Q::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// y - p
fn linear(p: &Q) -> Vec<Q> {
    vec![-p.clone(), Q::one()]
}

/// Finite sum of terms num(y) / Π (y-P)^e.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatFn {
    pub terms: Vec<(Vec<Q>, BTreeMap<Q, u32>)>,
}

impl RatFn {
    pub fn zero() -> RatFn {
        RatFn { terms: Vec::new() }
    }

    pub fn constant(c: Q) -> RatFn {
        RatFn { terms: vec![(vec![c], BTreeMap::new())] }
    }

    pub fn monomial(k: usize) -> RatFn {
        let mut p = vec![Q::zero(); k + 1];
        p[k] = Q::one();
        RatFn { terms: vec![(p, BTreeMap::new())] }
    }

    /// c / (y - p)
    pub fn simple_pole(c: Q, p: &Q) -> RatFn {
        RatFn { terms: vec![(vec![c], BTreeMap::from([(p.clone(), 1)]))] }
    }

    pub fn add(&self, other: &RatFn) -> RatFn {
        RatFn { terms: self.terms.iter().chain(&other.terms).cloned().collect() }
    }

    pub fn scale(&self, c: &Q) -> RatFn {
        RatFn { terms: self.terms.iter().map(|(n, d)| (n.iter().map(|x| x * c).collect(), d.clone())).collect() }
    }

    pub fn mul(&self, other: &RatFn) -> RatFn {
        let mut terms = Vec::new();
        for (n1, d1) in &self.terms {
            for (n2, d2) in &other.terms {
                let mut d = d1.clone();
                for (p, e) in d2 {
                    *d.entry(p.clone()).or_insert(0) += e;
                }
                terms.push((poly_mul(n1, n2), d));
            }
        }
        RatFn { terms }
    }

    fn poles(&self, acc: &mut BTreeMap<Q, u32>) {
        for (_, d) in &self.terms {
            for (p, &e) in d {
                let slot = acc.entry(p.clone()).or_insert(0);
                *slot = (*slot).max(e);
            }
        }
    }

    /// Numerator over the common denominator Π (y-P)^{den_P}.
    fn numerator(&self, den: &BTreeMap<Q, u32>) -> Vec<Q> {
        let mut out: Vec<Q> = Vec::new();
        for (n, d) in &self.terms {
            let mut num = n.clone();
            for (p, &e) in den {
                for _ in 0..e - d.get(p).copied().unwrap_or(0) {
                    num = poly_mul(&num, &linear(p));
                }
            }
            if out.len() < num.len() {
                out.resize(num.len(), Q::zero());
            }
            for (o, x) in out.iter_mut().zip(num) {
                *o += x;
            }
        }
        out
    }
}

/// A vector field f_y ∂_y + Σ f_i ∂_{e_i}: component 0 is ∂_y, then one per basis vector of N.
pub type VectorField = Vec<RatFn>;

/// Spanning set of a space of rational vector fields.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalFunctionSpace {
    pub components: usize,
    pub basis: Vec<VectorField>,
}

/// Flattens several spaces into coefficient rows over one common denominator.
fn flatten(spaces: &[&RationalFunctionSpace]) -> Result<(usize, Vec<Vec<Vec<Q>>>)> {
    let c = spaces.first().map(|s| s.components).unwrap_or(0);
    if spaces.iter().any(|s| s.components != c || s.basis.iter().any(|f| f.len() != c)) {
        return Err(Error::Malformed("vector fields with different numbers of components".into()));
    }
    let mut den = BTreeMap::new();
    for s in spaces {
        for f in &s.basis {
            for g in f {
                g.poles(&mut den);
            }
        }
    }
    let nums: Vec<Vec<Vec<Vec<Q>>>> =
        spaces.iter().map(|s| s.basis.iter().map(|f| f.iter().map(|g| g.numerator(&den)).collect()).collect()).collect();
    let len = nums.iter().flatten().flatten().map(|p| p.len()).max().unwrap_or(0).max(1);
    let width = c * len;
    let rows = nums
        .into_iter()
        .map(|s| {
            s.into_iter()
                .map(|f| {
                    let mut row = vec![Q::zero(); width];
                    for (k, p) in f.into_iter().enumerate() {
                        for (i, x) in p.into_iter().enumerate() {
                            row[k * len + i] = x;
                        }
                    }
                    row
                })
                .collect()
        })
        .collect();
    Ok((width, rows))
}

pub fn explicit_dim(space: &RationalFunctionSpace) -> Result<usize> {
    let (width, rows) = flatten(&[space])?;
    Ok(Subspace::span(width, rows.into_iter().next().unwrap_or_default()).dim())
}

/// Dimension of the intersection of the spaces inside the rational vector fields.
pub fn chart_intersect(spaces: &[RationalFunctionSpace]) -> Result<usize> {
    if spaces.is_empty() {
        return Err(Error::Malformed("no charts to intersect".into()));
    }
    let refs: Vec<&RationalFunctionSpace> = spaces.iter().collect();
    let (width, rows) = flatten(&refs)?;
    let subs: Vec<Subspace> = rows.into_iter().map(|r| Subspace::span(width, r)).collect();
    Ok(Subspace::meet_all(width, subs.iter()).dim())
}

/// The choices left open by the case formula: the hyperplane V(u) = ker φ and the point used in ε.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Choices {
    pub phi: Option<Vec<i64>>,
    pub eps_pick: usize,
}

impl Choices {
    pub fn random<R: Rng>(rng: &mut R, rank: usize) -> Choices {
        Choices { phi: Some((0..rank).map(|_| rng.gen_range(-3..=3)).collect()), eps_pick: rng.gen_range(0..8) }
    }
}

fn hyperplane_avoiding(v: &[Q], choices: &Choices) -> Vec<Vec<Q>> {
    let m = v.len();
    let phi: Vec<Q> = match &choices.phi {
        Some(p) if !dot(&q_vec(p), v).is_zero() => q_vec(p),
        _ => {
            let j = v.iter().position(|x| !x.is_zero()).expect("nonzero vector");
            (0..m).map(|i| if i == j { Q::one() } else { Q::zero() }).collect()
        }
    };
    RationalMatrix::from_rows(m, vec![phi]).kernel()
}

fn constant_field(m: usize, f: &RatFn, v: &[Q]) -> VectorField {
    let mut out = vec![RatFn::zero(); m + 1];
    for (j, x) in v.iter().enumerate() {
        if !x.is_zero() {
            out[j + 1] = f.scale(x);
        }
    }
    out
}

fn e_field(m: usize, chart: &C1Chart, ag: &AlphaGamma, choices: &Choices) -> VectorField {
    let mut out = vec![RatFn::zero(); m + 1];
    out[0] = RatFn::constant(Q::one());
    for (p, &int) in chart.points.iter().zip(&ag.integral) {
        if let (true, Location::Finite(a)) = (int, &p.location) {
            for j in 0..m {
                if !p.v[j].is_zero() {
                    out[j + 1] = out[j + 1].add(&RatFn::simple_pole(p.v[j].clone(), a));
                }
            }
        }
    }
    let candidates: Vec<&Q> = chart
        .points
        .iter()
        .zip(&ag.integral)
        .filter_map(|(p, &int)| match (&p.location, int) {
            (Location::Finite(a), false) => Some(a),
            _ => None,
        })
        .collect();
    if !candidates.is_empty() {
        let a = candidates[choices.eps_pick % candidates.len()];
        for j in 0..m {
            if !ag.v_sum[j].is_zero() {
                out[j + 1] = out[j + 1].add(&RatFn::simple_pole(-ag.v_sum[j].clone(), a));
            }
        }
    }
    out
}

fn times(f: &RatFn, field: &VectorField) -> VectorField {
    field.iter().map(|g| f.mul(g)).collect()
}

/// Explicit spanning set of the degree-u vector fields over one chart.
pub fn chart_space(data: &C1Data, chart: &C1Chart, u: &[i64], choices: &Choices) -> RationalFunctionSpace {
    let m = data.rank;
    let ag = alpha_gamma(m, chart, u);
    let lsec = l_minus_u(chart, u).sections();
    let g = P1Divisor::from_chart(chart, &ag.gamma);
    let mut basis: Vec<VectorField> = Vec::new();
    let unit = |i: usize| -> Vec<Q> { (0..m).map(|j| if i == j { Q::one() } else { Q::zero() }).collect() };
    match classify(data, chart, u) {
        VfCase::Full => {
            for w in hyperplane_avoiding(&ag.v_sum, choices) {
                basis.extend(lsec.iter().map(|f| constant_field(m, f, &w)));
            }
            let e = e_field(m, chart, &ag, choices);
            let one = RatFn::constant(Q::one());
            let shifted: VectorField = times(&RatFn::monomial(1), &e)
                .into_iter()
                .zip(constant_field(m, &one, &ag.v_sum))
                .map(|(a, b)| a.add(&b.scale(&-Q::one())))
                .collect();
            for f in g.twist_infinity(1).sections() {
                basis.push(times(&f, &e));
                basis.push(times(&f, &shifted));
            }
        }
        VfCase::Split => {
            for i in 0..m {
                basis.extend(lsec.iter().map(|f| constant_field(m, f, &unit(i))));
            }
            let e = e_field(m, chart, &ag, choices);
            for f in g.twist_infinity(2).sections() {
                basis.push(times(&f, &e));
            }
        }
        VfCase::Boundary(k) => {
            let rho = q_vec(&data.h[k]);
            basis.extend(lsec.iter().map(|f| constant_field(m, f, &rho)));
        }
        VfCase::Zero => {}
    }
    RationalFunctionSpace { components: m + 1, basis }
}

pub fn vf_sections_degree_with(data: &C1Data, u: &[i64], choices: &Choices) -> Result<usize> {
    data.validate()?;
    if u.len() != data.rank {
        return Err(Error::DimensionMismatch { expected: data.rank, found: u.len() });
    }
    if data.charts.len() == 1 {
        return Ok(chart_dim(data, &data.charts[0], u));
    }
    let spaces: Vec<RationalFunctionSpace> = data.charts.iter().map(|c| chart_space(data, c, u, choices)).collect();
    chart_intersect(&spaces)
}

pub fn vf_sections_degree(data: &C1Data, u: &[i64]) -> Result<usize> {
    vf_sections_degree_with(data, u, &Choices::default())
}

/// {u(ρ) <= 1 on 𝓗} cut by u(Σ_P v_P) <= 2 on every chart.
pub fn degree_region(data: &C1Data) -> Polyhedron {
    let mut normals = data.h.clone();
    let mut bounds = vec![1; data.h.len()];
    for c in &data.charts {
        let mut s = vec![Q::zero(); data.rank];
        for p in &c.points {
            for (a, b) in s.iter_mut().zip(&p.v) {
                *a += b;
            }
        }
        if s.iter().all(|x| x.is_zero()) {
            continue;
        }
        let l = s.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        let lq = qz(&l);
        normals.push(s.iter().map(|x| (x * &lq).to_integer().to_i64().expect("small")).collect());
        bounds.push(2 * l.to_i64().expect("small"));
    }
    Polyhedron::new(data.rank, normals, bounds)
}

pub fn total_vf(data: &C1Data) -> Result<GradedDims> {
    data.validate()?;
    let mut out = GradedDims::default();
    for u in degree_region(data).lattice_points()? {
        let d = vf_sections_degree(data, &u)?;
        if d > 0 {
            out.entries.insert(u, d);
        }
    }
    Ok(out)
}

/// Complexity-one data of a toric variety for a projection μ: N -> Z. The torus lattice is ker μ in
/// the basis of `proj.kernel`; rays with μρ > 0 become points at 0, rays with μρ < 0 points at ∞,
/// and each chart pairs one of each.
pub fn from_projection(fan: &Fan, proj: &ProjectionData) -> Result<C1Data> {
    if proj.target_rank() != 1 {
        return Err(Error::Precondition("complexity-one data needs a rank-one quotient".into()));
    }
    if proj.source_rank() != fan.rank() {
        return Err(Error::DimensionMismatch { expected: fan.rank(), found: proj.source_rank() });
    }
    let s1 = solve_integer(&proj.mu, &[BigInt::one()]).ok_or(Error::NotSurjective)?;
    let s1q: Vec<Q> = s1.iter().map(qz).collect();
    let f = proj.kernel.to_rational();
    let coords = |x: &[Q]| -> Result<Vec<Q>> {
        f.solve(x).ok_or_else(|| Error::Precondition("vector outside ker mu".into()))
    };
    let mut h = Vec::new();
    let mut pos = Vec::new();
    let mut neg = Vec::new();
    for (r, ray) in fan.rays().iter().enumerate() {
        let k = proj.apply(ray).0[0].clone();
        if k.is_zero() {
            let c = coords(&ray.to_q())?;
            h.push(c.iter().map(|x| x.to_integer().to_i64().expect("small")).collect());
            continue;
        }
        let kq = qz(&k.abs());
        let sign = if k.is_positive() { q(1) } else { q(-1) };
        let x: Vec<Q> = ray.to_q().iter().zip(&s1q).map(|(a, s)| a / &kq - &sign * s).collect();
        let v = coords(&x)?;
        let (location, side) = if k.is_positive() { (Location::Finite(Q::zero()), &mut pos) } else { (Location::Infinity, &mut neg) };
        side.push(C1Point { label: format!("r{}", r), location, v });
    }
    if pos.is_empty() || neg.is_empty() {
        return Err(Error::Precondition("quotient is not complete".into()));
    }
    let charts = pos
        .iter()
        .flat_map(|a| neg.iter().map(move |b| C1Chart { points: vec![a.clone(), b.clone()] }))
        .collect();
    Ok(C1Data { rank: fan.rank() - 1, h, charts })
}
