use std::collections::BTreeSet;

use annulus_core::curves::{PlanePoint, Rect};
use annulus_core::maps::{zoo, LiftMap};
use annulus_core::nielsen::{nielsen_report, nielsen_residue_at_lift, SweepConfig, Verdict, INTEGER_TOLERANCE, PERIODIC_TOLERANCE};
use serde_json::json;

fn power(d: i64) -> LiftMap {
    zoo("power", &json!({ "d": d })).unwrap()
}

fn region() -> Rect {
    Rect::new(-6.0, 6.0, -1.5, 1.5).unwrap()
}

/// Does a single lift `F^n + (k, 0)` fix some lifts of both points?
fn common_lift(map: &LiftMap, n: u32, p: PlanePoint, q: PlanePoint) -> bool {
    let fn_map = map.iterate(n).unwrap();
    let offset = |z: PlanePoint| (z.x - fn_map.eval(z).unwrap().x).round() as i64;
    let (kp, kq) = (offset(p), offset(q));
    // Moving a lift by j changes its offset by j (1 - d^n).
    let step = 1 - map.degree().pow(n);
    (-20..=20).any(|j| kq + j * step == kp)
}

#[test]
fn residues_partition_points_by_common_lift() {
    for d in [2, 3] {
        let map = power(d);
        for n in [1, 2] {
            let report = nielsen_report(&map, n, region(), &SweepConfig::with_resolution(1e-3)).unwrap();
            assert!(report.errors.is_empty(), "{:?}", report.errors);
            let centers: Vec<(PlanePoint, u64)> = report
                .fixed_boxes
                .iter()
                .map(|b| (b.fixed.rect.center(), b.residue))
                .collect();
            assert!(centers.len() as u64 >= report.modulus);
            for (i, &(p, rp)) in centers.iter().enumerate() {
                for &(q, rq) in &centers[i + 1..] {
                    assert_eq!(rp == rq, common_lift(&map, n, p, q), "power({d}) n={n} {p} {q}");
                }
            }
        }
    }
}

#[test]
fn deck_conjugate_base_lift_realizes_the_same_residue_set() {
    for d in [2, 3, -2] {
        let base = power(d);
        let conj = base.conjugate_by_deck(1);
        for n in 1..=3 {
            let a = nielsen_report(&base, n, region(), &SweepConfig::default()).unwrap();
            let b = nielsen_report(&conj, n, region(), &SweepConfig::default()).unwrap();
            let sa: BTreeSet<u64> = a.realized_residues.iter().copied().collect();
            let sb: BTreeSet<u64> = b.realized_residues.iter().copied().collect();
            assert_eq!(sa, sb, "power({d}) n={n}");
            assert_eq!(a.modulus, b.modulus);
        }
    }
}

#[test]
fn conjugate_labels_differ_by_a_fixed_shift() {
    let base = power(3);
    let conj = base.conjugate_by_deck(1);
    let m = 8;
    for x in [0.0, 0.125, 0.25, 0.375] {
        let p = PlanePoint::new(-x, 0.0);
        let r0 = nielsen_residue_at_lift(&base, p, 2, PERIODIC_TOLERANCE, INTEGER_TOLERANCE).unwrap();
        let r1 = nielsen_residue_at_lift(&conj, p, 2, PERIODIC_TOLERANCE, INTEGER_TOLERANCE).unwrap();
        // T F T^-1 = F + (1 - d); its n-th iterate adds (1 - d)(1 + d + ... ) = 1 - d^n.
        assert_eq!((r1 + m - r0) % m, 0);
    }
}

#[test]
fn zoo_maps_with_a_mechanism_are_complete_up_to_four() {
    let cases = [
        ("power", json!({ "d": 2 })),
        ("perturbed_power", json!({ "d": 2, "eps": 0.05 })),
        ("ends_attracting", json!({ "d": 2, "lambda": 1.0 })),
        ("ends_repelling", json!({ "d": 2, "lambda": 0.5 })),
        ("ends_repelling", json!({ "d": -2, "lambda": 1.0 })),
    ];
    for (name, params) in cases {
        let map = zoo(name, &params).unwrap();
        let reports = annulus_core::completeness_check(&map, 4, None, 1e-3).unwrap();
        for r in reports {
            assert_eq!(r.verdict, Verdict::Complete, "{} n={}: {:?}", r.map, r.period, r.errors);
            assert!(!r.exploratory);
        }
    }
}

#[test]
fn even_end_swap_iterates_are_flagged() {
    let map = zoo("end_swap", &json!({ "d": -3 })).unwrap();
    let r = nielsen_report(&map, 2, Rect::new(-2.0, 2.0, -1.0, 1.0).unwrap(), &SweepConfig::with_resolution(1e-2)).unwrap();
    assert_eq!(r.verdict, Verdict::SingleClassContinuum);
    assert!(r.exploratory);
    assert!(!r.continuum_residues.is_empty());
}

#[test]
fn degree_minus_one_even_periods_record_a_degenerate_modulus() {
    let map = zoo("counterexample_deg_minus1", &json!({})).unwrap();
    let r = nielsen_report(&map, 2, Rect::new(0.0, 1.0, -0.1, 0.1).unwrap(), &SweepConfig::with_resolution(1e-2)).unwrap();
    assert_eq!(r.modulus, 0);
    assert_eq!(r.verdict, Verdict::Incomplete);
    assert_eq!(r.errors.len(), 1);
}
