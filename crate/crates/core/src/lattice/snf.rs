//! Smith normal form and the integer linear algebra built on it.

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::matrix::{IntMatrix, RationalMatrix, Z};

/// `u * a * v == d` with `u`, `v` unimodular and `d` diagonal, d1 | d2 | ...
#[derive(Clone, Debug)]
pub struct Smith {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
}

impl Smith {
    pub fn rank(&self) -> usize {
        (0..self.d.nrows().min(self.d.ncols()))
            .take_while(|&i| !self.d.get(i, i).is_zero())
            .count()
    }

    /// Nonzero diagonal entries.
    pub fn invariant_factors(&self) -> Vec<Z> {
        (0..self.rank()).map(|i| self.d.get(i, i).clone()).collect()
    }
}

fn min_nonzero(d: &IntMatrix, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for i in t..d.nrows() {
        for j in t..d.ncols() {
            let x = d.get(i, j);
            if x.is_zero() {
                continue;
            }
            match best {
                Some((bi, bj)) if d.get(bi, bj).abs() <= x.abs() => {}
                _ => best = Some((i, j)),
            }
        }
    }
    best
}

pub fn smith_normal_form(a: &IntMatrix) -> Smith {
    let (m, n) = (a.nrows(), a.ncols());
    let mut d = a.clone();
    let mut u = IntMatrix::identity(m);
    let mut v = IntMatrix::identity(n);
    for t in 0..m.min(n) {
        loop {
            let Some((pi, pj)) = min_nonzero(&d, t) else {
                return Smith { u, d, v };
            };
            d.swap_rows(t, pi);
            u.swap_rows(t, pi);
            d.swap_cols(t, pj);
            v.swap_cols(t, pj);
            let p = d.get(t, t).clone();
            let mut clean = true;
            for i in t + 1..m {
                if d.get(i, t).is_zero() {
                    continue;
                }
                let f = -d.get(i, t).div_floor(&p);
                d.add_row(i, t, &f);
                u.add_row(i, t, &f);
                clean &= d.get(i, t).is_zero();
            }
            for j in t + 1..n {
                if d.get(t, j).is_zero() {
                    continue;
                }
                let f = -d.get(t, j).div_floor(&p);
                d.add_col(j, t, &f);
                v.add_col(j, t, &f);
                clean &= d.get(t, j).is_zero();
            }
            if !clean {
                continue;
            }
            let bad = (t + 1..m).find(|&i| (t + 1..n).any(|j| !d.get(i, j).is_multiple_of(&p)));
            match bad {
                Some(i) => {
                    d.add_row(t, i, &Z::one());
                    u.add_row(t, i, &Z::one());
                }
                None => break,
            }
        }
        if d.get(t, t).is_negative() {
            d.negate_row(t);
            u.negate_row(t);
        }
    }
    Smith { u, d, v }
}

/// Integer solution of `a x = b`, if one exists.
pub fn solve_integer(a: &IntMatrix, b: &[Z]) -> Option<Vec<Z>> {
    let s = smith_normal_form(a);
    let ub = s.u.mul_vec(b);
    let r = s.rank();
    let mut y = vec![Z::zero(); a.ncols()];
    for (i, x) in ub.iter().enumerate() {
        if i < r {
            let di = s.d.get(i, i);
            if !x.is_multiple_of(di) {
                return None;
            }
            y[i] = x / di;
        } else if !x.is_zero() {
            return None;
        }
    }
    Some(s.v.mul_vec(&y))
}

/// Basis (as columns) of the integer kernel of `a`.
pub fn integer_kernel(a: &IntMatrix) -> Vec<Vec<Z>> {
    let s = smith_normal_form(a);
    (s.rank()..a.ncols()).map(|j| s.v.column(j)).collect()
}

/// A lattice basis of the subgroup of Z^n generated by `gens`.
pub fn lattice_basis(n: usize, gens: &[Vec<Z>]) -> Vec<Vec<Z>> {
    if gens.is_empty() {
        return Vec::new();
    }
    image_basis(&IntMatrix::from_columns(n, gens))
}

/// Basis of the column image of `a` over Z.
pub fn image_basis(a: &IntMatrix) -> Vec<Vec<Z>> {
    // U A V = D  =>  A V = U^{-1} D; the first r columns of A V form a basis of the image.
    let s = smith_normal_form(a);
    let av = a.mul(&s.v);
    (0..s.rank()).map(|j| av.column(j)).collect()
}

/// Saturation of the span of `gens` inside Z^n: a basis of span_Q(gens) ∩ Z^n.
pub fn saturation(n: usize, gens: &[Vec<Z>]) -> Vec<Vec<Z>> {
    if gens.is_empty() {
        return Vec::new();
    }
    let a = IntMatrix::from_columns(n, gens).to_rational();
    let ann = RationalMatrix::from_rows(n, a.transpose().kernel());
    // ann rows span the annihilator; the saturated lattice is the integer kernel of ann.
    if ann.nrows() == 0 {
        return (0..n)
            .map(|i| (0..n).map(|j| if i == j { Z::one() } else { Z::zero() }).collect())
            .collect();
    }
    let ann_int = clear_denominators(&ann);
    integer_kernel(&ann_int)
}

/// Scales each row of a rational matrix to a primitive integer row.
pub fn clear_denominators(m: &RationalMatrix) -> IntMatrix {
    let rows = m.rows().map(primitive_integer_vector).collect();
    IntMatrix::from_rows(m.ncols(), rows)
}

/// The primitive integer vector on the ray through a nonzero rational vector.
pub fn primitive_integer_vector(v: &[super::matrix::Q]) -> Vec<Z> {
    let mut l = Z::one();
    for x in v {
        l = l.lcm(x.denom());
    }
    let ints: Vec<Z> = v.iter().map(|x| (x * super::matrix::qz(&l)).to_integer()).collect();
    let g = ints.iter().fold(Z::zero(), |g, x| g.gcd(x));
    if g.is_zero() {
        return ints;
    }
    ints.into_iter().map(|x| x / &g).collect()
}

/// Whether every generator of `sub` lies in the lattice spanned by `sup`.
pub fn lattice_contains(n: usize, sup: &[Vec<Z>], sub: &[Vec<Z>]) -> bool {
    if sup.is_empty() {
        return sub.iter().all(|v| v.iter().all(|x| x.is_zero()));
    }
    let a = IntMatrix::from_columns(n, sup);
    sub.iter().all(|v| solve_integer(&a, v).is_some())
}

pub fn lattice_eq(n: usize, a: &[Vec<Z>], b: &[Vec<Z>]) -> bool {
    lattice_contains(n, a, b) && lattice_contains(n, b, a)
}
