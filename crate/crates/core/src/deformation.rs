//! Deformations of tangent bundles: graded Ext, the divisor-restriction side of the
//! obstruction isomorphism, and Fano checks.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::One;
use serde::Serialize;

use crate::bundle_ops::{line_bundle, tangent, DivisorData};
use crate::cohomology::{cech_cohomology, ext_graded, GradedDims};
use crate::error::{Error, Result};
use crate::lattice::fan::star_fan;
use crate::lattice::matrix::{dot, q, qz, RationalMatrix, Q};
use crate::lattice::Fan;

pub fn tangent_ext(fan: &Arc<Fan>, i: usize) -> Result<GradedDims> {
    fan.require_smooth()?;
    fan.require_complete()?;
    let t = tangent(fan)?;
    ext_graded(&t, &t, i)
}

/// m_σ with ⟨m_σ, ρ⟩ = values[ρ] for the rays of maximal cone k (simplicial, full dimensional).
fn cartier_on_cone(fan: &Fan, k: usize, values: &[Q]) -> Option<Vec<Q>> {
    let cone = &fan.maximal_cones()[k];
    let a = RationalMatrix::from_rows(fan.rank(), cone.iter().map(|&r| fan.ray(r).to_q()).collect());
    let b: Vec<Q> = cone.iter().map(|&r| values[r].clone()).collect();
    a.solve(&b)
}

/// Strict convexity of the anticanonical support function: on every maximal cone,
/// the m_σ with ⟨m_σ,ρ⟩ = -1 on its rays has ⟨m_σ,ρ⟩ > -1 on all other rays.
pub fn is_fano(fan: &Fan) -> bool {
    if !fan.is_simplicial() || !fan.is_complete() {
        return false;
    }
    let n = fan.rank();
    let minus_one = vec![-Q::one(); fan.rays().len()];
    for (k, cone) in fan.maximal_cones().iter().enumerate() {
        if cone.len() != n {
            return false;
        }
        let Some(m) = cartier_on_cone(fan, k, &minus_one) else { return false };
        for (r, ray) in fan.rays().iter().enumerate() {
            if !cone.contains(&r) && dot(&m, &ray.to_q()) <= -Q::one() {
                return false;
            }
        }
    }
    true
}

pub fn require_fano(fan: &Fan) -> Result<()> {
    if is_fano(fan) {
        Ok(())
    } else {
        Err(Error::NotFano)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RestrictedDivisor {
    pub rho: usize,
    pub gamma: usize,
    /// Coefficients on the rays of the star fan of ρ.
    pub coefficients: Vec<i64>,
    pub dim: usize,
}

/// Coefficients of D|_{D_ρ} on the star fan of ρ, read from Cartier data of D on the
/// maximal cones containing ρ. Requires a_ρ = 0.
pub fn restrict_divisor(fan: &Fan, rho: usize, d: &DivisorData) -> Result<(crate::lattice::StarFan, Vec<i64>)> {
    if d.coefficients.get(rho).copied().unwrap_or(0) != 0 {
        return Err(Error::Precondition("divisor must not contain the restricting divisor".into()));
    }
    let star = star_fan(fan, rho)?;
    let values: Vec<Q> = d.coefficients.iter().map(|&a| q(-a)).collect();
    let p = star.projection.to_rational();
    let mut coeffs: Vec<Option<i64>> = vec![None; star.fan.rays().len()];
    for (sk, &k) in star.cone_origin.iter().enumerate() {
        let m = cartier_on_cone(fan, k, &values).ok_or(Error::NotSmooth)?;
        // m vanishes on ρ, so it factors through N/<ρ>: m = P^T m-bar
        let mbar = p.transpose().solve(&m).ok_or_else(|| Error::Precondition("Cartier data does not descend".into()))?;
        for &sr in &star.fan.maximal_cones()[sk] {
            let img: Vec<Q> = star.fan.ray(sr).0.iter().map(qz).collect();
            let val = -dot(&mbar, &img);
            if !val.is_integer() {
                return Err(Error::NotSmooth);
            }
            let c: i64 = val.to_integer().try_into().map_err(|_| Error::Malformed("coefficient overflow".into()))?;
            match coeffs[sr] {
                Some(prev) if prev != c => {
                    return Err(Error::Precondition("restricted divisor is not well defined".into()))
                }
                _ => coeffs[sr] = Some(c),
            }
        }
    }
    let coeffs = coeffs.into_iter().map(|c| c.unwrap_or(0)).collect();
    Ok((star, coeffs))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ObstructionReport {
    pub i: usize,
    pub lhs: GradedDims,
    pub rhs: Vec<RestrictedDivisor>,
    pub lhs_total: usize,
    pub rhs_total: usize,
    pub matches: bool,
}

/// ⊕_{γ≠ρ} H^{i-1}(D_ρ, O_{D_ρ}(D_γ)), one entry per ordered pair.
pub fn obstruction_rhs(fan: &Arc<Fan>, i: usize) -> Result<Vec<RestrictedDivisor>> {
    fan.require_smooth()?;
    fan.require_complete()?;
    require_fano(fan)?;
    if i < 2 {
        return Err(Error::Precondition("the isomorphism holds for i >= 2".into()));
    }
    let k = fan.rays().len();
    let mut out = Vec::new();
    for rho in 0..k {
        for gamma in (0..k).filter(|&g| g != rho) {
            let mut d = DivisorData::zero(k);
            d.coefficients[gamma] = 1;
            let (star, coefficients) = restrict_divisor(fan, rho, &d)?;
            let sf = Arc::new(star.fan);
            let l = line_bundle(&sf, &DivisorData::new(coefficients.clone()))?;
            let dim = cech_cohomology(&l, i - 1)?.total();
            out.push(RestrictedDivisor { rho, gamma, coefficients, dim });
        }
    }
    Ok(out)
}

pub fn obstruction_report(fan: &Arc<Fan>, i: usize) -> Result<ObstructionReport> {
    let rhs = obstruction_rhs(fan, i)?;
    let lhs = tangent_ext(fan, i)?;
    let lhs_total = lhs.total();
    let rhs_total = rhs.iter().map(|r| r.dim).sum();
    Ok(ObstructionReport { i, lhs, rhs, lhs_total, rhs_total, matches: lhs_total == rhs_total })
}

/// Every invariant prime divisor is Fano.
pub fn unobstructed_fano(fan: &Fan) -> Result<bool> {
    fan.require_smooth()?;
    fan.require_complete()?;
    require_fano(fan)?;
    for rho in 0..fan.rays().len() {
        if !is_fano(&star_fan(fan, rho)?.fan) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Pairing values ⟨m_σ, ρ⟩ of the anticanonical Cartier data, per maximal cone and ray.
pub fn anticanonical_table(fan: &Fan) -> BTreeMap<(usize, usize), Q> {
    let minus_one = vec![-Q::one(); fan.rays().len()];
    let mut out = BTreeMap::new();
    for k in 0..fan.maximal_cones().len() {
        if let Some(m) = cartier_on_cone(fan, k, &minus_one) {
            for (r, ray) in fan.rays().iter().enumerate() {
                out.insert((k, r), dot(&m, &ray.to_q()));
            }
        }
    }
    out
}
