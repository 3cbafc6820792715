//! Seeded random filtration data for property checks.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::filtration::{is_compatible, Filtration, KlyachkoBundle};
use crate::lattice::matrix::{q, Q};
use crate::lattice::{Fan, Subspace};

/// Nonzero integer vectors with entries in [-bound, bound].
pub fn random_pool<R: Rng>(rng: &mut R, dim: usize, size: usize, bound: i64) -> Vec<Vec<Q>> {
    let mut out = Vec::with_capacity(size);
    while out.len() < size {
        let v: Vec<i64> = (0..dim).map(|_| rng.gen_range(-bound..=bound)).collect();
        if v.iter().any(|&x| x != 0) {
            out.push(v.into_iter().map(q).collect());
        }
    }
    out
}

/// A filtration whose steps are spans of initial segments of a shuffled pool.
pub fn random_filtration<R: Rng>(rng: &mut R, dim: usize, pool: &[Vec<Q>], max_jump: i64) -> Filtration {
    if dim == 0 {
        return Filtration::trivial(0, 0);
    }
    let mut order: Vec<usize> = (0..pool.len()).collect();
    order.shuffle(rng);
    let mut chain: Vec<Subspace> = Vec::new();
    let mut acc: Vec<Vec<Q>> = Vec::new();
    for &i in &order {
        acc.push(pool[i].clone());
        let s = Subspace::span(dim, acc.clone());
        if s.is_full() {
            break;
        }
        if chain.last().is_none_or(|t| t.dim() < s.dim()) {
            chain.push(s);
        }
    }
    chain.retain(|_| rng.gen_bool(0.6));
    chain.reverse();
    let mut level = rng.gen_range(-max_jump..=max_jump);
    let mut steps = vec![(level, Subspace::full(dim))];
    for s in chain {
        level += rng.gen_range(1..=2);
        steps.push((level, s));
    }
    Filtration::new(dim, steps).expect("strictly decreasing chain")
}

pub fn random_bundle<R: Rng>(rng: &mut R, fan: &Arc<Fan>, rank: usize, pool_size: usize) -> KlyachkoBundle {
    let pool = random_pool(rng, rank, pool_size, 2);
    let fils = (0..fan.rays().len()).map(|_| random_filtration(rng, rank, &pool, 1)).collect();
    KlyachkoBundle::on_fan(fan, rank, fils).expect("filtrations of the right size")
}

/// Draws random bundles and keeps the compatible ones, giving up after `attempts` draws.
pub fn compatible_bundles<R: Rng>(
    rng: &mut R,
    fan: &Arc<Fan>,
    rank: usize,
    pool_size: usize,
    count: usize,
    attempts: usize,
) -> Vec<KlyachkoBundle> {
    let mut out = Vec::new();
    for _ in 0..attempts {
        if out.len() == count {
            break;
        }
        let v = random_bundle(rng, fan, rank, pool_size);
        if is_compatible(&v).unwrap_or(false) {
            out.push(v);
        }
    }
    out
}
