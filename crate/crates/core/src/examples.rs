//! Standard fans used throughout tests and the command line.

use std::sync::Arc;

use itertools::Itertools;

use crate::lattice::Fan;

fn cycle(rank: usize, rays: &[Vec<i64>]) -> Arc<Fan> {
    let k = rays.len();
    let cones: Vec<Vec<usize>> = (0..k).map(|i| vec![i, (i + 1) % k]).collect();
    Arc::new(Fan::from_i64(rank, rays, &cones).expect("standard fan"))
}

pub fn p1() -> Arc<Fan> {
    Arc::new(Fan::from_i64(1, &[vec![1], vec![-1]], &[vec![0], vec![1]]).expect("standard fan"))
}

/// Projective space: rays e_1, ..., e_n, -(e_1 + ... + e_n).
pub fn projective_space(n: usize) -> Arc<Fan> {
    let mut rays: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect();
    rays.push(vec![-1; n]);
    let cones: Vec<Vec<usize>> = (0..=n).combinations(n).collect();
    Arc::new(Fan::from_i64(n, &rays, &cones).expect("standard fan"))
}

pub fn p2() -> Arc<Fan> {
    projective_space(2)
}

pub fn p3() -> Arc<Fan> {
    projective_space(3)
}

pub fn p4() -> Arc<Fan> {
    projective_space(4)
}

/// P^2 with rays (1,1), (0,1), (-1,-2).
pub fn p2_alt() -> Arc<Fan> {
    cycle(2, &[vec![1, 1], vec![0, 1], vec![-1, -2]])
}

pub fn p1xp1() -> Arc<Fan> {
    cycle(2, &[vec![1, 0], vec![0, 1], vec![-1, 0], vec![0, -1]])
}

/// Rays (1,0), (1,1), (0,1), (-1,-1).
pub fn bl1p2() -> Arc<Fan> {
    cycle(2, &[vec![1, 0], vec![1, 1], vec![0, 1], vec![-1, -1]])
}

pub fn bl2p2() -> Arc<Fan> {
    cycle(2, &[vec![1, 0], vec![1, 1], vec![0, 1], vec![-1, 0], vec![-1, -1]])
}

pub fn bl3p2() -> Arc<Fan> {
    cycle(2, &[vec![1, 0], vec![1, 1], vec![0, 1], vec![-1, 0], vec![-1, -1], vec![0, -1]])
}

/// Hirzebruch surface F_a: rays (1,0), (0,1), (-1,a), (0,-1).
pub fn hirzebruch(a: i64) -> Arc<Fan> {
    cycle(2, &[vec![1, 0], vec![0, 1], vec![-1, a], vec![0, -1]])
}

/// The four smooth toric Fano surfaces whose tangent bundle is not rigid.
pub fn nonrigid_fano_surfaces() -> Vec<(&'static str, Arc<Fan>)> {
    vec![("p1xp1", p1xp1()), ("bl1p2", bl1p2()), ("bl2p2", bl2p2()), ("bl3p2", bl3p2())]
}

pub fn by_name(name: &str) -> Option<Arc<Fan>> {
    Some(match name {
        "p1" => p1(),
        "p2" => p2(),
        "p3" => p3(),
        "p4" => p4(),
        "p2alt" => p2_alt(),
        "p1xp1" => p1xp1(),
        "bl1p2" => bl1p2(),
        "bl2p2" => bl2p2(),
        "bl3p2" => bl3p2(),
        "f2" => hirzebruch(2),
        _ => return None,
    })
}

pub const NAMES: [&str; 10] = ["p1", "p2", "p3", "p4", "p2alt", "p1xp1", "bl1p2", "bl2p2", "bl3p2", "f2"];
