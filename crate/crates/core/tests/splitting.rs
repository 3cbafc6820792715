use std::sync::Arc;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use tvb_core::bundle_ops::{direct_sum, line_bundle, tangent, tensor, DivisorData};
use tvb_core::examples;
use tvb_core::filtration::KlyachkoBundle;
use tvb_core::lattice::{Fan, Subspace};
use tvb_core::sampling::compatible_bundles;
use tvb_core::splitting::{is_split, reconstruction_failure, split_into_line_bundles, SplittingResult};
use tvb_core::Error;

fn lb(fan: &Arc<Fan>, a: &[i64]) -> KlyachkoBundle {
    line_bundle(fan, &DivisorData::new(a.to_vec())).unwrap()
}

fn summands(v: &KlyachkoBundle) -> Vec<(DivisorData, Subspace)> {
    match split_into_line_bundles(v).unwrap() {
        SplittingResult::Split { summands } => summands,
        other => panic!("expected a splitting, got {:?}", other),
    }
}

fn nontrivial(v: &KlyachkoBundle) -> bool {
    v.filtrations().iter().any(|f| f.steps().len() > 1)
}

#[test]
fn sum_of_line_bundles_round_trips() {
    let f = examples::p2();
    let (a, b) = (vec![1, 0, -2], vec![0, 3, 1]);
    let v = direct_sum(&lb(&f, &a), &lb(&f, &b)).unwrap();
    let mut got: Vec<Vec<i64>> = summands(&v).into_iter().map(|(d, _)| d.coefficients).collect();
    got.sort();
    let mut want = vec![a, b];
    want.sort();
    assert_eq!(got, want);
}

#[test]
fn tangent_bundles() {
    assert!(!is_split(&tangent(&examples::p2()).unwrap()).unwrap());
    assert!(!is_split(&tangent(&examples::bl1p2()).unwrap()).unwrap());
    assert!(!is_split(&tangent(&examples::p3()).unwrap()).unwrap());
    let t = tangent(&examples::p1xp1()).unwrap();
    let s = summands(&t);
    assert_eq!(s.len(), 2);
    assert!(reconstruction_failure(&t, &s).is_none());
    assert!(matches!(split_into_line_bundles(&tangent(&examples::p2()).unwrap()).unwrap(), SplittingResult::NotSplit { .. }));
}

#[test]
fn line_bundles_split() {
    for name in examples::NAMES {
        let f = examples::by_name(name).unwrap();
        let a: Vec<i64> = (0..f.rays().len() as i64).map(|k| k - 1).collect();
        let s = summands(&lb(&f, &a));
        assert_eq!(s, vec![(DivisorData::new(a), Subspace::full(1))], "{}", name);
    }
}

#[test]
fn requires_smooth_complete_fans() {
    let sing = Arc::new(
        Fan::from_i64(2, &[vec![1, 0], vec![1, 2], vec![-1, -1]], &[vec![0, 1], vec![1, 2], vec![2, 0]]).unwrap(),
    );
    assert!(matches!(split_into_line_bundles(&lb(&sing, &[0, 0, 0])), Err(Error::NotSmooth)));
    let open = Arc::new(Fan::from_i64(2, &[vec![1, 0], vec![0, 1]], &[vec![0, 1]]).unwrap());
    assert!(matches!(split_into_line_bundles(&lb(&open, &[0, 0])), Err(Error::NotComplete)));
}

#[test]
fn reconstruction_detects_wrong_summands() {
    let f = examples::p1xp1();
    let t = tangent(&f).unwrap();
    let mut s = summands(&t);
    s[0].0.coefficients[0] -= 1;
    assert!(reconstruction_failure(&t, &s).is_some());
}

#[test]
fn rank_two_bundles_on_p3_and_p4_split() {
    for (fan, seed) in [(examples::p3(), 21), (examples::p4(), 22)] {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let vs = compatible_bundles(&mut rng, &fan, 2, 3, 30, 3000);
        assert_eq!(vs.len(), 30);
        assert!(vs.iter().filter(|v| nontrivial(v)).count() >= 10);
        for v in &vs {
            let s = summands(v);
            assert!(reconstruction_failure(v, &s).is_none());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn twisting_preserves_splitting(a in prop::collection::vec(-2i64..=2, 4), b in prop::collection::vec(-2i64..=2, 4), d in prop::collection::vec(-2i64..=2, 4)) {
        let f = examples::p1xp1();
        let v = direct_sum(&lb(&f, &a), &lb(&f, &b)).unwrap();
        let w = tensor(&v, &lb(&f, &d)).unwrap();
        let mut got: Vec<Vec<i64>> = summands(&w).into_iter().map(|(x, _)| x.coefficients).collect();
        got.sort();
        let shift = |x: &[i64]| x.iter().zip(&d).map(|(p, q)| p + q).collect::<Vec<_>>();
        let mut want = vec![shift(&a), shift(&b)];
        want.sort();
        prop_assert_eq!(got, want);
    }

    #[test]
    fn returned_splittings_reconstruct(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = examples::bl1p2();
        for v in compatible_bundles(&mut rng, &f, 2, 3, 3, 40) {
            if let SplittingResult::Split { summands } = split_into_line_bundles(&v).unwrap() {
                prop_assert!(reconstruction_failure(&v, &summands).is_none());
            }
        }
    }
}
