//! Finite-field verification of the two explicit cubic fourfolds: scroll
//! point counts, containments, pairwise intersection points, transversality
//! and rational singular-point scans over F_29.

use fano_census::fqgeom::{
    intersection_points, jacobian_rank_at, projective_scan, singular_point_scan,
    verify_containment, FpPoly, FpProjPoint,
};
use fano_census::scenario::AppendixData;

fn canonical_points(raw: &[Vec<u64>], p: u64) -> Vec<FpProjPoint> {
    let mut pts: Vec<FpProjPoint> = raw
        .iter()
        .map(|c| FpProjPoint::new(c.clone(), p).expect("nonzero point"))
        .collect();
    pts.sort();
    pts
}

#[test]
fn scroll_point_counts_are_900() {
    for name in ["syz", "nonsyz"] {
        let a = AppendixData::builtin(name, None).unwrap();
        for scroll in &a.scrolls {
            let scan = projective_scan(&scroll.system(&a), a.nvars).unwrap();
            // blow-up of P^2 at a point: p^2 + 2p + 1 rational points
            assert_eq!(
                scan.points.len(),
                900,
                "{name}/{}: bad point count",
                scroll.name
            );
            // the full iteration count is (p^6 - 1)/(p - 1)
            assert_eq!(scan.candidates, (29u64.pow(6) - 1) / 28);
        }
    }
}

#[test]
fn scrolls_are_contained_in_the_cubic_and_their_hyperplanes() {
    for name in ["syz", "nonsyz"] {
        let a = AppendixData::builtin(name, None).unwrap();
        for scroll in &a.scrolls {
            let (in_cubic, count) =
                verify_containment(&scroll.system(&a), &a.cubic, a.nvars).unwrap();
            assert!(in_cubic, "{name}/{} not in the cubic", scroll.name);
            assert_eq!(count, a.scroll_point_count);
            let h = &a.hyperplanes[scroll.hyperplane];
            let (in_h, _) = verify_containment(&scroll.system(&a), h, a.nvars).unwrap();
            assert!(in_h, "{name}/{} not in its hyperplane", scroll.name);
        }
    }
}

#[test]
fn containment_is_monotone_under_adding_the_cubic() {
    // adding the cubic to the scroll system does not change the point set
    let a = AppendixData::builtin("syz", None).unwrap();
    let t1 = a.scroll("T1").unwrap();
    let scan = projective_scan(&t1.system(&a), a.nvars).unwrap();
    let mut with_cubic = t1.system(&a);
    with_cubic.push(a.cubic.clone());
    let scan2 = projective_scan(&with_cubic, a.nvars).unwrap();
    assert_eq!(scan.points, scan2.points);
}

#[test]
fn pairwise_intersections_match_the_listed_points() {
    for name in ["syz", "nonsyz"] {
        let a = AppendixData::builtin(name, None).unwrap();
        for (s1, s2, expected) in &a.intersections {
            let q1 = a.scroll(s1).unwrap().system(&a);
            let q2 = a.scroll(s2).unwrap().system(&a);
            let mut got = intersection_points(&q1, &q2, a.nvars).unwrap();
            got.sort();
            let want = canonical_points(expected, a.prime);
            assert_eq!(got, want, "{name}: {s1} cap {s2}");
        }
    }
}

#[test]
fn listed_points_lie_on_every_claimed_variety() {
    for name in ["syz", "nonsyz"] {
        let a = AppendixData::builtin(name, None).unwrap();
        for (s1, s2, expected) in &a.intersections {
            for raw in expected {
                let pt = FpProjPoint::new(raw.clone(), a.prime).unwrap();
                for s in [s1, s2] {
                    for q in &a.scroll(s).unwrap().quadrics {
                        assert_eq!(q.eval(&pt.coords), 0, "{name}: {pt} not on {s}");
                    }
                }
                assert_eq!(a.cubic.eval(&pt.coords), 0, "{name}: {pt} not on the cubic");
            }
        }
    }
}

#[test]
fn intersections_are_transverse() {
    // stacked Jacobian of the two quadric triples has rank 5 at each listed
    // intersection point: the affine tangent cones meet in the radial line
    for name in ["syz", "nonsyz"] {
        let a = AppendixData::builtin(name, None).unwrap();
        for (s1, s2, expected) in &a.intersections {
            let mut stacked = a.scroll(s1).unwrap().system(&a);
            stacked.extend(a.scroll(s2).unwrap().system(&a));
            for raw in expected {
                let pt = FpProjPoint::new(raw.clone(), a.prime).unwrap();
                let rank = jacobian_rank_at(&stacked, &pt).unwrap();
                assert_eq!(rank, 5, "{name}: {s1} cap {s2} at {pt}");
            }
        }
    }
}

#[test]
fn scroll_points_are_smooth_surface_points() {
    // tangent space of the affine cone has dimension 3 at the first listed
    // point of each example
    for name in ["syz", "nonsyz"] {
        let a = AppendixData::builtin(name, None).unwrap();
        let (_, _, pts) = &a.intersections[0];
        let pt = FpProjPoint::new(pts[0].clone(), a.prime).unwrap();
        let t1 = a.scroll("T1").unwrap();
        assert_eq!(jacobian_rank_at(&t1.system(&a), &pt).unwrap(), 3);
    }
}

#[test]
fn cubic_surfaces_have_no_rational_singular_points() {
    for name in ["syz", "nonsyz"] {
        let a = AppendixData::builtin(name, None).unwrap();
        let n = a.hyperplanes.len();
        for i in 0..n {
            for j in (i + 1)..n {
                let system = vec![
                    a.hyperplanes[i].clone(),
                    a.hyperplanes[j].clone(),
                    a.cubic.clone(),
                ];
                let singular = singular_point_scan(&system, a.nvars, 3).unwrap();
                assert!(
                    singular.is_empty(),
                    "{name}: Sigma_{i}{j} has rational singular points {singular:?}"
                );
            }
        }
    }
}

#[test]
fn hyperplane_sections_have_at_most_six_nodes() {
    // the scan reports the rational singular points; the bound is the node
    // count over the closure
    for name in ["syz", "nonsyz"] {
        let a = AppendixData::builtin(name, None).unwrap();
        for (i, h) in a.hyperplanes.iter().enumerate() {
            let system = vec![h.clone(), a.cubic.clone()];
            let singular = singular_point_scan(&system, a.nvars, 2).unwrap();
            assert!(
                singular.len() <= a.max_nodes,
                "{name}: Y_{i} has {} rational singular points",
                singular.len()
            );
            // each reported point really is singular: the Jacobian drops rank
            for pt in &singular {
                assert!(jacobian_rank_at(&system, pt).unwrap() < 2);
            }
        }
    }
}

#[test]
fn the_cubic_fourfolds_are_smooth() {
    for name in ["syz", "nonsyz"] {
        let a = AppendixData::builtin(name, None).unwrap();
        let singular = singular_point_scan(&[a.cubic.clone()], a.nvars, 1).unwrap();
        assert!(
            singular.is_empty(),
            "{name}: X has rational singular points"
        );
    }
}

#[test]
fn smaller_prime_pipeline_runs() {
    // the same pipeline parameterized over F_7: claims are reported, the
    // F_29 expectations are not asserted
    let a = AppendixData::builtin("syz", Some(7)).unwrap();
    assert!(!a.exact_expectations(29));
    let t1 = a.scroll("T1").unwrap();
    let scan = projective_scan(&t1.system(&a), a.nvars).unwrap();
    // scroll over F_7: 7^2 + 2*7 + 1 points
    assert_eq!(scan.points.len(), 64);
    assert_eq!(scan.candidates, (7u64.pow(6) - 1) / 6);
}

#[test]
fn t3_vanishes_on_its_quadrics_and_spans_h3() {
    let a = AppendixData::builtin("nonsyz", None).unwrap();
    let t3 = a.scroll("T3").unwrap();
    for q in &t3.quadrics {
        assert_eq!(q.homogeneous_degree(), Some(2));
    }
    let h3 = &a.hyperplanes[t3.hyperplane];
    let (contained, count) = verify_containment(&t3.system(&a), h3, a.nvars).unwrap();
    assert!(contained);
    assert_eq!(count, 900);
}

#[test]
fn parse_failures_surface_as_errors() {
    assert!(FpPoly::parse("x9 + x0", 29, 6).is_err());
    assert!(FpPoly::parse("", 29, 6).unwrap().is_zero());
    assert!(AppendixData::builtin("bogus", None).is_err());
}
