//! Constructors and functorial operations on Klyachko data.
//!
//! Sign convention for divisors: the line bundle of D = Σ a_ρ D_ρ has its single jump
//! at level -a_ρ on the ray ρ. Every other module reads divisors through this file.

use std::collections::HashMap;
use std::sync::Arc;

use itertools::Itertools;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::filtration::{Base, Filtration, KlyachkoBundle};
use crate::lattice::matrix::{RationalMatrix, Q};
use crate::lattice::{Fan, Subspace};

/// Integer coefficient a_ρ for every ray of a fan.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DivisorData {
    pub coefficients: Vec<i64>,
}

impl DivisorData {
    pub fn new(coefficients: Vec<i64>) -> Self {
        DivisorData { coefficients }
    }

    pub fn zero(num_rays: usize) -> Self {
        DivisorData { coefficients: vec![0; num_rays] }
    }

    pub fn add(&self, other: &DivisorData) -> DivisorData {
        DivisorData {
            coefficients: self.coefficients.iter().zip(&other.coefficients).map(|(a, b)| a + b).collect(),
        }
    }
}

fn same_base(v: &KlyachkoBundle, w: &KlyachkoBundle) -> Result<()> {
    if v.base() != w.base() {
        return Err(Error::BaseMismatch);
    }
    Ok(())
}

fn per_ray(
    v: &KlyachkoBundle,
    rank: usize,
    f: impl Fn(usize) -> Result<Filtration>,
) -> Result<KlyachkoBundle> {
    let fils = (0..v.base().num_rays()).map(f).collect::<Result<Vec<_>>>()?;
    KlyachkoBundle::new(rank, v.base().clone(), fils)
}

pub fn trivial(base: &Base, rank: usize) -> Result<KlyachkoBundle> {
    KlyachkoBundle::new(rank, base.clone(), vec![Filtration::trivial(rank, 0); base.num_rays()])
}

pub fn direct_sum(v: &KlyachkoBundle, w: &KlyachkoBundle) -> Result<KlyachkoBundle> {
    same_base(v, w)?;
    let rank = v.rank() + w.rank();
    per_ray(v, rank, |r| {
        let (e, f) = (v.filtration(r), w.filtration(r));
        let (a, b) = (e.bounds(), f.bounds());
        let lo = lo_of(&[(e, a), (f, b)]);
        let hi = a.1.max(b.1);
        Filtration::from_fn(rank, lo, hi, |i| e.evaluate(i).direct_sum(&f.evaluate(i)))
    })
}

/// Smallest lower bound among the nonzero filtrations.
fn lo_of(items: &[(&Filtration, (i64, i64))]) -> i64 {
    items.iter().filter(|(f, _)| f.ambient_dim() > 0).map(|(_, b)| b.0).min().unwrap_or(0)
}

pub fn tensor(v: &KlyachkoBundle, w: &KlyachkoBundle) -> Result<KlyachkoBundle> {
    same_base(v, w)?;
    let rank = v.rank() * w.rank();
    per_ray(v, rank, |r| {
        let (e, f) = (v.filtration(r), w.filtration(r));
        let ((le, he), (lf, hf)) = (e.bounds(), f.bounds());
        Filtration::from_fn(rank, le + lf, he + hf, |i| {
            let terms: Vec<Subspace> = (le..=he).map(|s| e.evaluate(s).tensor(&f.evaluate(i - s))).collect();
            Subspace::join_all(rank, terms.iter())
        })
    })
}

/// Non-decreasing k-tuples of levels in [lo, hi] with the given sum.
fn level_tuples(lo: i64, hi: i64, k: usize, sum: i64) -> Vec<Vec<i64>> {
    fn rec(start: i64, hi: i64, k: usize, sum: i64, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if k == 0 {
            if sum == 0 {
                out.push(cur.clone());
            }
            return;
        }
        for s in start..=hi {
            let rest = sum - s;
            let kk = (k - 1) as i64;
            if rest < s * kk || rest > hi * kk {
                continue;
            }
            cur.push(s);
            rec(s, hi, k - 1, rest, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(lo, hi, k, sum, &mut Vec::new(), &mut out);
    out
}

/// Shared driver for exterior and symmetric powers.
fn power(
    v: &KlyachkoBundle,
    k: usize,
    dim: usize,
    product: &dyn Fn(&[&[Q]]) -> Vec<Q>,
) -> Result<KlyachkoBundle> {
    if k == 0 {
        return trivial(v.base(), 1);
    }
    per_ray(v, dim, |r| {
        let e = v.filtration(r);
        let (lo, hi) = e.bounds();
        let kk = k as i64;
        Filtration::from_fn(dim, kk * lo, kk * hi, |i| {
            let mut rows: Vec<Vec<Q>> = Vec::new();
            for t in level_tuples(lo, hi, k, i) {
                let spaces: Vec<Vec<Vec<Q>>> = t.iter().map(|&s| e.evaluate(s).vectors()).collect();
                for choice in spaces.iter().map(|s| s.iter()).multi_cartesian_product() {
                    let vs: Vec<&[Q]> = choice.iter().map(|x| x.as_slice()).collect();
                    let p = product(&vs);
                    if p.iter().any(|x| !x.is_zero()) {
                        rows.push(p);
                    }
                }
            }
            Subspace::span(dim, rows)
        })
    })
}

/// Basis of the k-th exterior power: k-subsets of 0..n in lexicographic order.
pub fn wedge_basis(n: usize, k: usize) -> Vec<Vec<usize>> {
    (0..n).combinations(k).collect()
}

/// Basis of the k-th symmetric power: k-multisets of 0..n in lexicographic order.
pub fn sym_basis(n: usize, k: usize) -> Vec<Vec<usize>> {
    (0..n).combinations_with_replacement(k).collect()
}

pub fn wedge_vectors(n: usize, vs: &[&[Q]]) -> Vec<Q> {
    let k = vs.len();
    wedge_basis(n, k)
        .iter()
        .map(|s| {
            let m = RationalMatrix::from_rows(k, vs.iter().map(|v| s.iter().map(|&c| v[c].clone()).collect()).collect());
            m.det()
        })
        .collect()
}

pub fn sym_vectors(n: usize, vs: &[&[Q]]) -> Vec<Q> {
    let k = vs.len();
    let mut poly: HashMap<Vec<usize>, Q> = HashMap::from([(Vec::new(), Q::from_integer(1.into()))]);
    for v in vs {
        let mut next: HashMap<Vec<usize>, Q> = HashMap::new();
        for (m, c) in &poly {
            for (a, x) in v.iter().enumerate() {
                if x.is_zero() {
                    continue;
                }
                let mut mm = m.clone();
                let pos = mm.partition_point(|&y| y <= a);
                mm.insert(pos, a);
                *next.entry(mm).or_insert_with(Q::zero) += c * x;
            }
        }
        poly = next;
    }
    sym_basis(n, k).into_iter().map(|m| poly.get(&m).cloned().unwrap_or_else(Q::zero)).collect()
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

pub fn wedge(v: &KlyachkoBundle, k: usize) -> Result<KlyachkoBundle> {
    let n = v.rank();
    let dim = binomial(n, k);
    if dim == 0 {
        return KlyachkoBundle::new(0, v.base().clone(), vec![Filtration::trivial(0, 0); v.base().num_rays()]);
    }
    power(v, k, dim, &|vs| wedge_vectors(n, vs))
}

pub fn sym(v: &KlyachkoBundle, k: usize) -> Result<KlyachkoBundle> {
    let n = v.rank();
    let dim = if n == 0 { usize::from(k == 0) } else { binomial(n + k - 1, k) };
    if dim == 0 {
        return KlyachkoBundle::new(0, v.base().clone(), vec![Filtration::trivial(0, 0); v.base().num_rays()]);
    }
    power(v, k, dim, &|vs| sym_vectors(n, vs))
}

/// Level i of the dual is the annihilator of E(1 - i).
pub fn dual(v: &KlyachkoBundle) -> Result<KlyachkoBundle> {
    let rank = v.rank();
    per_ray(v, rank, |r| {
        let e = v.filtration(r);
        let (lo, hi) = e.bounds();
        Filtration::from_fn(rank, -hi, -lo, |i| e.evaluate(1 - i).annihilator())
    })
}

/// Rank-one bundle with its jump at -a_ρ on every ray ρ.
pub fn line_bundle(fan: &Arc<Fan>, d: &DivisorData) -> Result<KlyachkoBundle> {
    if d.coefficients.len() != fan.rays().len() {
        return Err(Error::DimensionMismatch { expected: fan.rays().len(), found: d.coefficients.len() });
    }
    let fils = d.coefficients.iter().map(|&a| Filtration::trivial(1, -a)).collect();
    KlyachkoBundle::on_fan(fan, 1, fils)
}

/// Full space for i <= 0, the ray itself at 1, zero above.
pub fn tangent(fan: &Arc<Fan>) -> Result<KlyachkoBundle> {
    fan.require_smooth()?;
    let n = fan.rank();
    let fils = fan
        .rays()
        .iter()
        .map(|r| {
            let line = Subspace::span(n, vec![r.to_q()]);
            Filtration::from_fn(n, 0, 1, |i| if i <= 0 { Subspace::full(n) } else { line.clone() })
        })
        .collect::<Result<Vec<_>>>()?;
    KlyachkoBundle::on_fan(fan, n, fils)
}

pub fn cotangent(fan: &Arc<Fan>) -> Result<KlyachkoBundle> {
    dual(&tangent(fan)?)
}

/// Rank one with its jump at -1 on every ray.
pub fn canonical(fan: &Arc<Fan>) -> Result<KlyachkoBundle> {
    fan.require_smooth()?;
    line_bundle(fan, &DivisorData::new(vec![1; fan.rays().len()]))
}

/// Top exterior power.
pub fn determinant(v: &KlyachkoBundle) -> Result<KlyachkoBundle> {
    wedge(v, v.rank())
}
