//! Equivariant splitting into line bundles by simultaneous grading of all ray filtrations.

use crate::bundle_ops::DivisorData;
use crate::error::Result;
use crate::filtration::{graded_decompose_in, KlyachkoBundle};
use crate::lattice::Subspace;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SplittingResult {
    /// One divisor and generating line per summand; a_ρ = -jump_ρ.
    Split { summands: Vec<(DivisorData, Subspace)> },
    /// First ray and level where no common grading reproduces the filtration.
    NotSplit { ray: usize, level: i64 },
}

impl SplittingResult {
    pub fn is_split(&self) -> bool {
        matches!(self, SplittingResult::Split { .. })
    }
}

pub fn split_into_line_bundles(v: &KlyachkoBundle) -> Result<SplittingResult> {
    let fan = v.fan()?;
    fan.require_smooth()?;
    fan.require_complete()?;
    let dec = match graded_decompose_in(v.rank(), v.filtrations(), &|_| true)? {
        Ok(d) => d,
        Err(f) => return Ok(SplittingResult::NotSplit { ray: f.filtration, level: f.level }),
    };
    let mut summands = Vec::new();
    for (u, piece) in &dec.pieces {
        for b in piece.vectors() {
            let d = DivisorData::new(u.iter().map(|j| -j).collect());
            summands.push((d, Subspace::span(v.rank(), vec![b])));
        }
    }
    if let Some((ray, level)) = reconstruction_failure(v, &summands) {
        return Ok(SplittingResult::NotSplit { ray, level });
    }
    Ok(SplittingResult::Split { summands })
}

/// Checks E^ρ(i) = ⊕_{-a_ρ >= i} line for every ray and level, with matching dimensions.
pub fn reconstruction_failure(v: &KlyachkoBundle, summands: &[(DivisorData, Subspace)]) -> Option<(usize, i64)> {
    let r = v.rank();
    let lines = Subspace::join_all(r, summands.iter().map(|(_, l)| l));
    if summands.len() != r || !lines.is_full() {
        return Some((0, 0));
    }
    for (k, f) in v.filtrations().iter().enumerate() {
        let (lo, hi) = f.bounds();
        for i in lo - 1..=hi + 1 {
            let sel: Vec<&Subspace> =
                summands.iter().filter(|(d, _)| -d.coefficients[k] >= i).map(|(_, l)| l).collect();
            let count = sel.len();
            let sum = Subspace::join_all(r, sel);
            let target = f.evaluate(i);
            if count != target.dim() || sum != target {
                return Some((k, i));
            }
        }
    }
    None
}

pub fn is_split(v: &KlyachkoBundle) -> Result<bool> {
    Ok(split_into_line_bundles(v)?.is_split())
}
