#![allow(dead_code)]

use std::collections::BTreeSet;

use rand::Rng;

use tvb_core::filtration::Filtration;
use tvb_core::lattice::matrix::{q, RationalMatrix, Q};
use tvb_core::lattice::Subspace;

/// E(i) = span of the basis vectors whose jump is >= i.
pub fn filtration_from_jumps(basis: &[Vec<Q>], jumps: &[i64]) -> Filtration {
    let n = basis.len();
    let lo = jumps.iter().copied().min().unwrap_or(0);
    let hi = jumps.iter().copied().max().unwrap_or(0);
    Filtration::from_fn(n, lo, hi, |i| {
        Subspace::span(n, basis.iter().zip(jumps).filter(|(_, &j)| j >= i).map(|(b, _)| b.clone()).collect())
    })
    .unwrap()
}

pub fn random_invertible<R: Rng>(rng: &mut R, n: usize) -> Vec<Vec<Q>> {
    loop {
        let rows: Vec<Vec<Q>> = (0..n).map(|_| (0..n).map(|_| q(rng.gen_range(-3..=3))).collect()).collect();
        if RationalMatrix::from_rows(n, rows.clone()).rank() == n {
            return rows;
        }
    }
}

/// Closure of the generators under meet and join, then the distributive identity on all triples.
pub fn brute_distributive(n: usize, gens: &[Subspace]) -> bool {
    let mut set: BTreeSet<Vec<Vec<Q>>> = BTreeSet::new();
    let mut elems: Vec<Subspace> = Vec::new();
    let mut push = |s: Subspace, elems: &mut Vec<Subspace>| {
        if set.insert(s.vectors()) {
            elems.push(s);
        }
    };
    push(Subspace::zero(n), &mut elems);
    push(Subspace::full(n), &mut elems);
    for g in gens {
        push(g.clone(), &mut elems);
    }
    let mut start = 0;
    while start < elems.len() {
        let end = elems.len();
        for a in 0..end {
            for b in start.max(a)..end {
                let m = elems[a].meet(&elems[b]).unwrap();
                let j = elems[a].join(&elems[b]).unwrap();
                push(m, &mut elems);
                push(j, &mut elems);
            }
        }
        start = end;
        assert!(elems.len() < 200, "generated lattice is unexpectedly large");
    }
    for a in &elems {
        for b in &elems {
            for c in &elems {
                let lhs = a.meet(&b.join(c).unwrap()).unwrap();
                let rhs = a.meet(b).unwrap().join(&a.meet(c).unwrap()).unwrap();
                if lhs != rhs {
                    return false;
                }
            }
        }
    }
    true
}

/// Random filtrations of Q^n with jumps in {0, 1}: full at 0, a random subspace at 1.
pub fn random_01_filtrations<R: Rng>(rng: &mut R, n: usize, k: usize) -> (Vec<Filtration>, Vec<Subspace>) {
    let mut fils = Vec::new();
    let mut gens = Vec::new();
    for _ in 0..k {
        let d = if n > 1 && rng.gen_bool(0.8) { rng.gen_range(1..n) } else { rng.gen_range(0..=n) };
        let vs: Vec<Vec<Q>> = (0..d).map(|_| (0..n).map(|_| q(rng.gen_range(-1..=1))).collect()).collect();
        let s = Subspace::span(n, vs);
        let mut steps = vec![(0, Subspace::full(n))];
        if !s.is_zero() && !s.is_full() {
            steps.push((1, s.clone()));
        }
        let steps = if s.is_full() { vec![(1, s.clone())] } else { steps };
        fils.push(Filtration::new(n, steps).unwrap());
        gens.push(s);
    }
    (fils, gens)
}

pub const CLI_SUITE: &[&str] = &[
    "validate --fan bl1p2 --emit json",
    "tangent --fan p2 --emit json",
    "tangent --fan bl1p2 --emit filtrations",
    "compat --fan p2 --emit json",
    "compat --fan p3 --random-rank 2 --seed 5 --emit json",
    "sections --fan p2 --emit json",
    "sections --fan bl1p2 --emit graded",
    "cohom --fan p2 --bundle canonical --emit json",
    "ext --fan p1xp1 --i 1 --emit json",
    "ext --fan bl1p2 --i 1 --graded --emit json",
    "line-bundle --fan p2 --divisor -1,-1,-1 --emit json",
    "ops wedge --fan p2 --emit json",
    "ops tensor --fan p1xp1 --with cotangent --emit json",
    "ops det --fan bl1p2 --emit json",
    "downgrade --fan bl1p2 --mu 0,1 --bundle tangent --emit json",
    "downgrade --fan p2alt --mu 0,1 --emit json",
    "split --fan p1xp1 --emit json",
    "split --fan p2 --emit json",
    "split --fan p3 --random-rank 2 --seed 9 --emit json",
    "obstructions --fan bl2p2 --emit json",
    "obstructions --fan f2 --emit json",
    "c1-sections --fan bl1p2 --mu 1,-1 --samples 3 --seed 4 --emit json",
    "c1-sections --fan p1xp1 --mu 0,1 --u 0,0 --samples 4 --seed 1 --emit json",
];

/// Runs the command-line suite in-process and returns (command, exit code, stdout) triples.
pub fn run_cli_suite() -> Vec<(String, i32, String)> {
    CLI_SUITE
        .iter()
        .map(|c| {
            let args = std::iter::once("tvb").chain(c.split_whitespace());
            let out = tvb_core::cli::run(args);
            (c.to_string(), out.code, out.stdout)
        })
        .collect()
}
