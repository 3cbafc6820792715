use std::collections::BTreeMap;

use num_bigint::BigInt;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use tvb_core::bundle_ops::tangent;
use tvb_core::cohomology::global_sections;
use tvb_core::complexity_one::{
    alpha_gamma, chart_dim, chart_intersect, chart_space, classify, explicit_dim, from_projection, point, total_vf,
    vf_sections_degree, vf_sections_degree_with, C1Chart, C1Data, C1Point, Choices, Location, P1Divisor, RatFn,
    RationalFunctionSpace, VfCase,
};
use tvb_core::downgrade::ProjectionData;
use tvb_core::examples;
use tvb_core::lattice::matrix::{q, Q};
use tvb_core::Error;

fn frac(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

fn at(x: i64) -> Location {
    Location::Finite(q(x))
}

fn space(fns: Vec<RatFn>) -> RationalFunctionSpace {
    RationalFunctionSpace { components: 1, basis: fns.into_iter().map(|f| vec![f]).collect() }
}

/// Synthetic data with four points, two of them with n_P > 1.
fn synthetic() -> C1Data {
    let pts = vec![
        point("a", at(0), &[1, 0]),
        C1Point { label: "b".into(), location: at(1), v: vec![q(0), frac(1, 2)] },
        C1Point { label: "c".into(), location: at(3), v: vec![frac(1, 3), frac(1, 3)] },
        point("d", Location::Infinity, &[-1, -1]),
    ];
    C1Data::separated(2, vec![], pts)
}

#[test]
fn alpha_values() {
    let chart = C1Chart {
        points: vec![
            C1Point { label: "p".into(), location: at(0), v: vec![frac(1, 2)] },
            point("q", Location::Infinity, &[3]),
        ],
    };
    let ag = alpha_gamma(1, &chart, &[1]);
    assert_eq!(ag.alpha, vec![q(-1), q(-3)]);
    assert_eq!(ag.integral, vec![true, true]);
    assert_eq!(ag.gamma, vec![-1, -3]);
    let ag = alpha_gamma(1, &chart, &[2]);
    assert_eq!(ag.alpha[0], frac(-3, 2));
    assert_eq!(ag.integral, vec![false, true]);
    assert_eq!(ag.gamma[0], -2);
    assert_eq!(ag.v_sum, vec![q(3)]);
    assert_eq!(chart.points[0].n(), BigInt::from(2));
}

#[test]
fn alpha_at_zero_with_lattice_points() {
    let chart = C1Chart { points: vec![point("a", at(0), &[1, 2]), point("b", at(5), &[0, -1]), point("c", Location::Infinity, &[-2, 0])] };
    let ag = alpha_gamma(2, &chart, &[0, 0]);
    assert!(ag.integral.iter().all(|&b| b));
    assert!(ag.gamma.iter().all(|&g| g == 0));
    assert_eq!(ag.v_sum, vec![q(-1), q(1)]);
    let ag = alpha_gamma(2, &chart, &[1, -1]);
    assert_eq!(ag.alpha, vec![q(1), q(-1), q(2)]);
}

#[test]
fn two_violations_of_h_give_zero() {
    let data = C1Data::separated(2, vec![vec![1, 0], vec![0, 1]], vec![point("a", at(0), &[1, 1]), point("b", Location::Infinity, &[-1, -1])]);
    assert_eq!(classify(&data, &data.charts[0], &[1, 1]), VfCase::Zero);
    assert_eq!(vf_sections_degree(&data, &[1, 1]).unwrap(), 0);
    assert_eq!(vf_sections_degree(&data, &[2, 0]).unwrap(), 0);
    assert_eq!(classify(&data, &data.charts[0], &[1, 0]), VfCase::Boundary(0));
    assert_eq!(classify(&data, &data.charts[0], &[0, 0]), VfCase::Split);
    assert_eq!(classify(&synthetic(), &synthetic().charts[0], &[0, 0]), VfCase::Split);
    assert_eq!(classify(&synthetic(), &synthetic().charts[0], &[0, 1]), VfCase::Full);
}

#[test]
fn degenerate_zero_vector_branch() {
    let data = C1Data::separated(1, vec![], vec![point("a", at(0), &[0])]);
    assert_eq!(classify(&data, &data.charts[0], &[0]), VfCase::Split);
    // N ⊗ O plus the sections of O(2∞) times ∂_y
    assert_eq!(vf_sections_degree(&data, &[0]).unwrap(), 4);
    assert_eq!(vf_sections_degree(&data, &[3]).unwrap(), 4);
    assert!(matches!(total_vf(&data), Err(Error::Unbounded)));
}

#[test]
fn empty_region_gives_zero() {
    let data = C1Data::separated(1, vec![vec![1], vec![-1]], vec![point("a", at(0), &[1]), point("b", Location::Infinity, &[-1])]);
    assert_eq!(vf_sections_degree(&data, &[2]).unwrap(), 0);
    assert_eq!(vf_sections_degree(&data, &[-2]).unwrap(), 0);
    let empty = C1Data::separated(2, vec![vec![1, 0], vec![0, 1], vec![-1, -1]], vec![point("a", at(0), &[0, 0])]);
    let t = total_vf(&empty).unwrap();
    assert!(t.entries.keys().all(|u| u.iter().all(|&x| x.abs() <= 2)));
}

#[test]
fn malformed_data_is_rejected() {
    let data = C1Data::separated(1, vec![], vec![point("a", at(0), &[1]), point("b", at(0), &[2])]);
    assert!(matches!(vf_sections_degree(&data, &[0]), Err(Error::Malformed(_))));
    let data = C1Data::separated(2, vec![vec![1]], vec![]);
    assert!(matches!(vf_sections_degree(&data, &[0, 0]), Err(Error::DimensionMismatch { .. })));
    assert!(chart_intersect(&[]).is_err());
}

#[test]
fn p1_divisor_sections() {
    let d = P1Divisor { finite: BTreeMap::from([(q(1), -1)]), infinity: 2 };
    assert_eq!(d.degree(), 1);
    assert_eq!(d.h0(), 2);
    assert_eq!(d.sections().len(), 2);
    let d = P1Divisor { finite: BTreeMap::from([(q(0), 1), (q(2), 1)]), infinity: -3 };
    assert_eq!(d.h0(), 0);
}

#[test]
fn chart_intersections() {
    let one = space(vec![RatFn::constant(q(1))]);
    assert_eq!(chart_intersect(&[one.clone(), one.clone()]).unwrap(), 1);
    let a = P1Divisor { finite: BTreeMap::from([(q(1), -1)]), infinity: 2 };
    let b = P1Divisor { finite: BTreeMap::from([(q(2), -1)]), infinity: 2 };
    let sa = space(a.sections());
    let sb = space(b.sections());
    assert_eq!(explicit_dim(&sa).unwrap(), 2);
    assert_eq!(chart_intersect(&[sa.clone(), sb]).unwrap(), 1);
    assert_eq!(chart_intersect(&[sa.clone(), sa.clone()]).unwrap(), 2);
    let poles = space(vec![RatFn::simple_pole(q(1), &q(0)), RatFn::constant(q(1))]);
    assert_eq!(chart_intersect(&[poles, one]).unwrap(), 1);
}

fn oracle_pairs() -> Vec<(&'static str, Vec<i64>)> {
    let mut out = Vec::new();
    for name in ["p2", "p1xp1", "bl1p2", "bl2p2", "bl3p2", "f2"] {
        for mu in [vec![1, 0], vec![0, 1], vec![1, -1], vec![1, 1]] {
            out.push((name, mu));
        }
    }
    out
}

#[test]
fn oracle_equivalence_with_toric_sections() {
    for (name, mu) in oracle_pairs() {
        let f = examples::by_name(name).unwrap();
        let proj = ProjectionData::from_i64_rows(2, std::slice::from_ref(&mu)).unwrap();
        let Ok(data) = from_projection(&f, &proj) else { continue };
        let toric = global_sections(&tangent(&f).unwrap()).unwrap();
        let c1 = total_vf(&data).unwrap();
        assert_eq!(c1.total(), toric.total(), "{} {:?}", name, mu);
        // restrict characters of the big torus to the subtorus ker mu
        let k: Vec<i64> = (0..2).map(|i| proj.kernel.get(i, 0).try_into().unwrap()).collect();
        let mut agg: BTreeMap<Vec<i64>, usize> = BTreeMap::new();
        for (u, d) in &toric.entries {
            *agg.entry(vec![u[0] * k[0] + u[1] * k[1]]).or_insert(0) += d;
        }
        assert_eq!(c1.entries, agg, "{} {:?}", name, mu);
    }
}

#[test]
fn separated_quotients_of_the_running_examples() {
    let cases = [("bl1p2", vec![1, -1], 2), ("p1xp1", vec![0, 1], 2)];
    for (name, mu, h) in cases {
        let f = examples::by_name(name).unwrap();
        let data = from_projection(&f, &ProjectionData::from_i64_rows(2, &[mu]).unwrap()).unwrap();
        assert_eq!(data.charts.len(), 1);
        assert_eq!(data.h.len(), h);
        assert_eq!(total_vf(&data).unwrap().total(), 6);
    }
    let data = from_projection(&examples::bl1p2(), &ProjectionData::from_i64_rows(2, &[vec![0, 1]]).unwrap()).unwrap();
    assert_eq!(data.charts.len(), 2);
    assert_eq!(total_vf(&data).unwrap().total(), 6);
}

#[test]
fn explicit_spaces_match_the_case_formula() {
    let data = synthetic();
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for u0 in -3..=3 {
        for u1 in -3..=3 {
            let u = [u0, u1];
            let want = chart_dim(&data, &data.charts[0], &u);
            for _ in 0..3 {
                let c = Choices::random(&mut rng, 2);
                assert_eq!(explicit_dim(&chart_space(&data, &data.charts[0], &u, &c)).unwrap(), want, "{:?}", u);
            }
        }
    }
}

#[test]
fn choice_independence_across_charts() {
    let base = synthetic();
    let pts = &base.charts[0].points;
    let second = C1Chart { points: vec![C1Point { label: "a2".into(), location: at(0), v: vec![q(0), q(1)] }, pts[1].clone(), pts[2].clone(), pts[3].clone()] };
    let data = C1Data { rank: 2, h: vec![], charts: vec![base.charts[0].clone(), second] };
    let mut rng = ChaCha8Rng::seed_from_u64(19);
    let mut nonzero = 0;
    for u0 in -2..=2 {
        for u1 in -2..=2 {
            let u = [u0, u1];
            let first = vf_sections_degree(&data, &u).unwrap();
            nonzero += usize::from(first > 0);
            for _ in 0..4 {
                assert_eq!(vf_sections_degree_with(&data, &u, &Choices::random(&mut rng, 2)).unwrap(), first, "{:?}", u);
            }
        }
    }
    assert!(nonzero > 0);
}

#[test]
fn rank_one_quotient_required() {
    let f = examples::p3();
    let proj = ProjectionData::from_i64_rows(3, &[vec![1, 0, 0], vec![0, 1, 0]]).unwrap();
    assert!(matches!(from_projection(&f, &proj), Err(Error::Precondition(_))));
}
