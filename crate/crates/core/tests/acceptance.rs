//! One PASS/FAIL line per acceptance criterion. All quantities are exact integers or exact
//! subspaces; the tolerance is zero throughout.

mod common;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{brute_distributive, random_01_filtrations, run_cli_suite};
use tvb_core::bundle_ops::{canonical, direct_sum, dual, line_bundle, tangent, tensor, trivial, DivisorData};
use tvb_core::cohomology::{cech_all, ext_graded, global_sections, GradedDims};
use tvb_core::complexity_one::{from_projection, total_vf, vf_sections_degree_with, Choices};
use tvb_core::deformation::{obstruction_rhs, tangent_ext};
use tvb_core::downgrade::{downgrade_bundle, downgrade_fan, line_summand_profile, ray_multiplicity, ProjectionData};
use tvb_core::examples;
use tvb_core::filtration::{graded_decompose, Base};
use tvb_core::lattice::{Fan, Subspace};
use tvb_core::sampling::compatible_bundles;
use tvb_core::splitting::{is_split, reconstruction_failure, split_into_line_bundles, SplittingResult};

/// Every comparison is exact.
const TOLERANCE: &str = "0 (exact integers and subspaces)";
const SPLIT_INSTANCES: usize = 50;
const ORACLE_INSTANCES: usize = 200;

type Check = Result<(), String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Check {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn exact(got: usize, want: usize, what: &str) -> Check {
    ensure(got == want, || format!("{}: got {}, expected {}", what, got, want))
}

fn c1_tangent_filtrations() -> Check {
    for (name, f) in [("p2", examples::p2()), ("bl1p2", examples::bl1p2())] {
        let t = tangent(&f).map_err(|e| e.to_string())?;
        for (k, r) in f.rays().iter().enumerate() {
            let e = t.filtration(k);
            let line = Subspace::span(2, vec![r.to_q()]);
            for i in -3..=3 {
                let want = match i {
                    i if i <= 0 => Subspace::full(2),
                    1 => line.clone(),
                    _ => Subspace::zero(2),
                };
                ensure(e.evaluate(i) == want, || format!("{} ray {} level {}", name, k, i))?;
            }
        }
    }
    Ok(())
}

/// Demazure roots of the tangent: u with <u,ρ> = 1 on one ray and <= 0 on the rest.
fn root_count(f: &Fan) -> usize {
    let mut n = 0;
    for x in -4i64..=4 {
        for y in -4i64..=4 {
            let vals: Vec<i64> = f.rays().iter().map(|r| r.pair(&[x, y])).collect();
            if vals.iter().filter(|&&v| v == 1).count() == 1 && vals.iter().all(|&v| v <= 1) {
                n += 1;
            }
        }
    }
    n
}

fn c2_global_sections() -> Check {
    for (name, want) in [("p2", 8), ("p1xp1", 6), ("bl1p2", 6)] {
        let f = examples::by_name(name).unwrap();
        let g = global_sections(&tangent(&f).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        exact(g.total(), want, name)?;
        exact(2 + root_count(&f), want, &format!("{} automorphism oracle", name))?;
        exact(g.get(&[0, 0]), 2, &format!("{} at u=0", name))?;
        for (u, &d) in &g.entries {
            if u != &vec![0, 0] {
                exact(d, 1, &format!("{} at {:?}", name, u))?;
            }
        }
        // exhaustive enumeration over a wide box
        let t = tangent(&f).unwrap();
        let mut brute = GradedDims::default();
        for x in -6i64..=6 {
            for y in -6i64..=6 {
                let d = tvb_core::cohomology::sections_degree(&t, &[x, y]).unwrap().dim();
                if d > 0 {
                    brute.entries.insert(vec![x, y], d);
                }
            }
        }
        ensure(brute == g, || format!("{}: enumeration differs", name))?;
    }
    Ok(())
}

fn c3_anticanonical() -> Check {
    let f = examples::p2();
    let l = line_bundle(&f, &DivisorData::new(vec![-1, -1, -1])).map_err(|e| e.to_string())?;
    let g = global_sections(&l).map_err(|e| e.to_string())?;
    let triangle = (-3i64..=3)
        .flat_map(|x| (-3i64..=3).map(move |y| (x, y)))
        .filter(|&(x, y)| x <= 1 && y <= 1 && -x - y <= 1)
        .count();
    exact(triangle, 10, "triangle lattice points")?;
    exact(g.total(), triangle, "h0(-K)")
}

fn negate(g: &GradedDims) -> GradedDims {
    GradedDims { entries: g.entries.iter().map(|(u, &d)| (u.iter().map(|x| -x).collect(), d)).collect() }
}

fn c4_serre_duality() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    for name in ["p1", "p2", "p1xp1", "bl1p2"] {
        let f = examples::by_name(name).unwrap();
        let n = f.rank();
        let k = f.rays().len();
        let omega = canonical(&f).unwrap();
        let mut bundles = vec![tangent(&f).unwrap(), omega.clone()];
        for _ in 0..5 {
            let mut draw = || DivisorData::new((0..k).map(|_| rng.gen_range(-2..=2)).collect());
            let a = line_bundle(&f, &draw()).unwrap();
            let b = line_bundle(&f, &draw()).unwrap();
            bundles.push(direct_sum(&a, &b).unwrap());
        }
        for (j, v) in bundles.iter().enumerate() {
            let a = cech_all(v).map_err(|e| e.to_string())?;
            let b = cech_all(&tensor(&dual(v).unwrap(), &omega).unwrap()).map_err(|e| e.to_string())?;
            for i in 0..=n {
                ensure(a[i] == negate(&b[n - i]), || format!("{} bundle {} i={}", name, j, i))?;
            }
        }
    }
    Ok(())
}

fn c5_structure_sheaf() -> Check {
    for (name, f) in examples::nonrigid_fano_surfaces() {
        let all = cech_all(&trivial(&Base::Fan(f.clone()), 1).unwrap()).map_err(|e| e.to_string())?;
        for i in 1..=2 {
            exact(all[i].total(), 0, &format!("{} h{}", name, i))?;
        }
    }
    Ok(())
}

fn c6_ext_dimensions() -> Check {
    let f = examples::p1xp1();
    let t = tangent(&f).unwrap();
    let e0 = ext_graded(&t, &t, 0).map_err(|e| e.to_string())?;
    exact(e0.total(), 2, "Ext0 P1xP1")?;
    exact(e0.get(&[0, 0]), 2, "Ext0 P1xP1 at 0")?;
    let e1 = ext_graded(&t, &t, 1).map_err(|e| e.to_string())?;
    exact(e1.filter(|u| u[1] == 0).total(), 4, "Ext1 P1xP1 first axis")?;
    exact(e1.filter(|u| u[0] == 0).total(), 4, "Ext1 P1xP1 second axis")?;
    ensure(e1.entries.keys().all(|u| u[0] == 0 || u[1] == 0), || "Ext1 P1xP1 off the axes".into())?;

    let f = examples::bl1p2();
    let t = tangent(&f).unwrap();
    let e1 = ext_graded(&t, &t, 1).map_err(|e| e.to_string())?;
    exact(e1.get(&[0, 0]), 1, "Ext1 Bl1 at (0,0)")?;
    exact(e1.get(&[1, 0]), 1, "Ext1 Bl1 at (1,0)")?;
    exact(e1.filter(|u| u[0] + u[1] == 0).total(), 3, "Ext1 Bl1 along (1,-1)")?;

    let f = examples::p2();
    let t = tangent(&f).unwrap();
    exact(ext_graded(&t, &t, 1).map_err(|e| e.to_string())?.total(), 0, "Ext1 P2")
}

fn c7_obstructions() -> Check {
    for (name, f) in examples::nonrigid_fano_surfaces() {
        let lhs = tangent_ext(&f, 2).map_err(|e| e.to_string())?.total();
        let rhs: usize = obstruction_rhs(&f, 2).map_err(|e| e.to_string())?.iter().map(|r| r.dim).sum();
        exact(lhs, 0, &format!("{} Ext2", name))?;
        exact(rhs, 0, &format!("{} restriction side", name))?;
    }
    Ok(())
}

fn c8_blowup_downgrade() -> Check {
    let f = examples::bl1p2();
    let mu = ProjectionData::from_i64_rows(2, &[vec![0, 1]]).map_err(|e| e.to_string())?;
    let d = downgrade_fan(&f, &mu).map_err(|e| e.to_string())?;
    let mut rays = d.ray_map.clone();
    rays.sort_unstable();
    ensure(rays == vec![1, 2, 3], || format!("DM rays {:?}", rays))?;
    let h: Vec<Vec<i64>> = d.contracted.iter().map(|v| v.to_i64()).collect();
    ensure(h == vec![vec![1, 0]], || format!("H = {:?}", h))?;
    let p = d.quotient.prefan();
    ensure(p.len() == 4 && p.maximal_elements().len() == 3 && p.rays().len() == 3, || "prefan shape".into())?;
    let imgs: Vec<Vec<i64>> = p.rays().iter().map(|&e| p.cone(e).generators()[0].to_i64()).collect();
    ensure(imgs.iter().filter(|g| **g == vec![1]).count() == 2, || format!("ray images {:?}", imgs))?;
    ensure(d.stabilizers.iter().flatten().all(|z| *z == 1.into()), || "nontrivial stabilizer".into())?;

    let db = downgrade_bundle(&tangent(&f).unwrap(), &mu).map_err(|e| e.to_string())?;
    let lvl = db.h_filtrations[0].at(1).ok_or("no level 1")?;
    let rho1 = Subspace::from_i64(2, &[vec![1, 0]]);
    for fil in &lvl.filtrations {
        for i in -2..=2 {
            let want = if i <= 0 { rho1.clone() } else { Subspace::zero(2) };
            ensure(fil.evaluate(i) == want, || format!("F(i) at level {}", i))?;
        }
    }
    let mut prof = line_summand_profile(&db).map_err(|e| e.to_string())?;
    prof.sort_by(|a, b| a.jumps.cmp(&b.jumps));
    // quotient rays in ray_map order: 0_1, 0_2, ∞; O([0_1]+[∞]) ⊕ O([0_2])
    let jumps: Vec<Vec<i64>> = prof.iter().map(|p| p.jumps.clone()).collect();
    ensure(jumps == vec![vec![0, 1, 0], vec![1, 0, 1]], || format!("summand jumps {:?}", jumps))
}

fn c9_stacky_downgrade() -> Check {
    let f = examples::p2_alt();
    let mu = ProjectionData::from_i64_rows(2, &[vec![0, 1]]).map_err(|e| e.to_string())?;
    let d = downgrade_fan(&f, &mu).map_err(|e| e.to_string())?;
    ensure(d.contracted.is_empty(), || "H not empty".into())?;
    let p = d.quotient.prefan();
    let pos = d.ray_map.iter().position(|&r| r == 2).ok_or("rho_3 missing")?;
    let e3 = p.rays()[pos];
    ensure(ray_multiplicity(&d.quotient, e3) == 2.into(), || "Sigma0(rho_3) != 2N".into())
}

fn c10_splitting() -> Check {
    ensure(!is_split(&tangent(&examples::p2()).unwrap()).unwrap(), || "T_P2 split".into())?;
    ensure(!is_split(&tangent(&examples::bl1p2()).unwrap()).unwrap(), || "T_Bl1 split".into())?;
    ensure(is_split(&tangent(&examples::p1xp1()).unwrap()).unwrap(), || "T_P1xP1 not split".into())?;
    let mut rng = ChaCha8Rng::seed_from_u64(1010);
    let f = examples::p3();
    let vs = compatible_bundles(&mut rng, &f, 2, 3, SPLIT_INSTANCES, 20 * SPLIT_INSTANCES);
    ensure(vs.len() >= SPLIT_INSTANCES, || format!("only {} instances", vs.len()))?;
    for (k, v) in vs.iter().enumerate() {
        match split_into_line_bundles(v).map_err(|e| e.to_string())? {
            SplittingResult::Split { summands } => {
                ensure(reconstruction_failure(v, &summands).is_none(), || format!("instance {} reconstruction", k))?
            }
            SplittingResult::NotSplit { .. } => return Err(format!("instance {} did not split", k)),
        }
    }
    Ok(())
}

fn c11_compatibility_oracle() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(1111);
    let mut disagreements = 0;
    let mut negatives = 0;
    for _ in 0..ORACLE_INSTANCES {
        let n = rng.gen_range(1..=3);
        let k = rng.gen_range(1..=3);
        let (fils, gens) = random_01_filtrations(&mut rng, n, k);
        let greedy = graded_decompose(&fils, &|_| true).map_err(|e| e.to_string())?.is_ok();
        disagreements += usize::from(greedy != brute_distributive(n, &gens));
        negatives += usize::from(!greedy);
    }
    exact(disagreements, 0, "disagreements")?;
    ensure(negatives > 0, || "no failing instance sampled".into())
}

fn c12_complexity_one() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(1212);
    for (name, mu, want) in [("bl1p2", vec![1, -1], 6), ("p1xp1", vec![0, 1], 6), ("bl1p2", vec![0, 1], 6)] {
        let f = examples::by_name(name).unwrap();
        let proj = ProjectionData::from_i64_rows(2, std::slice::from_ref(&mu)).map_err(|e| e.to_string())?;
        let data = from_projection(&f, &proj).map_err(|e| e.to_string())?;
        let g = total_vf(&data).map_err(|e| e.to_string())?;
        let toric = global_sections(&tangent(&f).unwrap()).unwrap().total();
        exact(toric, want, &format!("{} toric h0", name))?;
        exact(g.total(), toric, &format!("{} {:?} total_vf", name, mu))?;
        for _ in 0..4 {
            let c = Choices::random(&mut rng, data.rank);
            for (u, &d) in &g.entries {
                exact(vf_sections_degree_with(&data, u, &c).map_err(|e| e.to_string())?, d, "resampled")?;
            }
        }
    }
    Ok(())
}

fn c13_determinism() -> Check {
    let a = run_cli_suite();
    let b = run_cli_suite();
    ensure(a.len() == common::CLI_SUITE.len(), || "suite incomplete".into())?;
    for ((cmd, ca, oa), (_, cb, ob)) in a.iter().zip(&b) {
        ensure(ca == cb && oa.as_bytes() == ob.as_bytes(), || format!("{} differs between runs", cmd))?;
    }
    Ok(())
}

#[test]
fn acceptance() {
    let criteria: Vec<Criterion> = vec![
        ("tangent filtrations", c1_tangent_filtrations),
        ("global sections of the tangent bundle", c2_global_sections),
        ("anticanonical sections", c3_anticanonical),
        ("Serre duality", c4_serre_duality),
        ("structure sheaf vanishing", c5_structure_sheaf),
        ("Ext dimensions", c6_ext_dimensions),
        ("obstruction cross-check", c7_obstructions),
        ("downgrade of the blowup", c8_blowup_downgrade),
        ("stacky downgrade", c9_stacky_downgrade),
        ("splitting", c10_splitting),
        ("compatibility oracle", c11_compatibility_oracle),
        ("complexity-one oracle", c12_complexity_one),
        ("determinism", c13_determinism),
    ];
    let mut failed = Vec::new();
    for (k, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(()) => println!("PASS {:>2} {} (tolerance {})", k + 1, name, TOLERANCE),
            Err(why) => {
                println!("FAIL {:>2} {}: {}", k + 1, name, why);
                failed.push(k + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failing criteria: {:?}", failed);
}
