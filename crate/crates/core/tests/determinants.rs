use num_traits::Signed;
use proptest::prelude::*;

use holey::matrices::{
    build_e, build_q, closed_form_discrepancies, count_region, det_exact, half_count, path_count, verify_lu,
    verify_lu_with, ClosedForm, CountKind, Half, LuFactor, PathVariant,
};
use holey::oracle::{
    count_families, count_tilings, count_weighted_tilings, enumerate_families, enumerate_tilings, Constraint,
    DEFAULT_BUDGET,
};
use holey::arith::{rat, Int};
use holey::regions::{build_region, enumerate_specs, lgv_points, LatticePoint, PathPicture, RegionKind, RegionSpec};

fn spec(n: i64, m: i64, l: &[i64], r: &[i64]) -> RegionSpec {
    RegionSpec::validate(n, m, l, r).unwrap()
}

fn even_specs() -> Vec<RegionSpec> {
    let mut out = Vec::new();
    for n in [2, 4, 6] {
        for m in 1..=2 {
            for p in 0..=2 {
                out.extend(enumerate_specs(n, m, p));
            }
        }
    }
    out
}

#[test]
fn frozen_counts() {
    let full = |s: &RegionSpec| count_region(s, CountKind::Full).unwrap().value;
    assert_eq!(full(&RegionSpec::unholed(2, 1)), Int::from(20));
    assert_eq!(full(&RegionSpec::unholed(3, 1)), Int::from(175));
    let s = spec(4, 1, &[-2], &[2]);
    let oracle = count_tilings(&build_region(&s, RegionKind::Full).unwrap(), DEFAULT_BUDGET).unwrap();
    assert_eq!(full(&s), oracle);
}

#[test]
fn reflected_path_counts() {
    let s = LatticePoint::new(0, 0);
    let e = LatticePoint::new(3, 2);
    assert_eq!(path_count(s, e, PathVariant::Plain), Int::from(10));
    // paths to (3,2) staying strictly below x = y from (1,0): ballot numbers
    let s1 = LatticePoint::new(1, 0);
    assert_eq!(path_count(s1, e, PathVariant::AvoidDiagonal), Int::from(2));
    assert_eq!(path_count(e, s, PathVariant::Plain), Int::from(0));
}

#[test]
fn half_counts_agree_with_path_families() {
    for s in even_specs() {
        let (a, e) = lgv_points(&s, PathPicture::Lower);
        let fam = count_families(&a, &e, Constraint::AvoidDiagonal, DEFAULT_BUDGET).unwrap();
        assert_eq!(count_region(&s, CountKind::Lower).unwrap().value, fam.weighted, "{s}");
        let upper = count_weighted_tilings(&build_region(&s, RegionKind::Upper).unwrap(), DEFAULT_BUDGET).unwrap();
        assert_eq!(count_region(&s, CountKind::UpperWeighted).unwrap().value, upper, "{s}");
    }
}

#[test]
fn enumerations_match_counts() {
    for s in [spec(4, 1, &[-2], &[0]), spec(4, 2, &[2], &[-2]), RegionSpec::unholed(3, 1)] {
        let region = build_region(&s, RegionKind::Full).unwrap();
        let tilings = enumerate_tilings(&region, DEFAULT_BUDGET).unwrap();
        assert_eq!(Int::from(tilings.len()), count_tilings(&region, DEFAULT_BUDGET).unwrap());
        assert!(tilings.iter().all(|t| t.is_valid_for(&region)));
    }
    let s = spec(4, 1, &[0], &[2]);
    let (a, e) = lgv_points(&s, PathPicture::Upper);
    let fams = enumerate_families(&a, &e, Constraint::WeightedBelow, DEFAULT_BUDGET).unwrap();
    let total: Int = fams.iter().map(|f| f.weight.clone()).sum();
    assert_eq!(total, count_families(&a, &e, Constraint::WeightedBelow, DEFAULT_BUDGET).unwrap().weighted);
}

#[test]
fn schur_complement_factorisation() {
    for s in even_specs() {
        for half in [Half::Lower, Half::Upper] {
            let (q, _, _) = half_count(&s, half).unwrap();
            assert_eq!(q, count_region(&s, if half == Half::Lower { CountKind::Lower } else { CountKind::UpperWeighted }).unwrap().value);
            assert_eq!(det_exact(&build_q(&s, half)).abs().to_integer(), q);
            assert_eq!(build_e(&s, half).unwrap().order, s.p());
        }
    }
}

#[test]
fn lu_factors_reproduce_q() {
    for s in even_specs().into_iter().filter(|s| s.p() > 0) {
        for half in [Half::Lower, Half::Upper] {
            assert!(verify_lu(&s, half).unwrap().passed(), "{s} {}", half.name());
        }
    }
    let s = spec(4, 1, &[-2], &[2]);
    let report = verify_lu_with(&s, Half::Lower, |f, i, j| {
        let v = holey::matrices::lu_entry(f, i, j, &s)?;
        Ok(if f == LuFactor::B && i == s.m as usize + 1 { v + rat(1) } else { v })
    })
    .unwrap();
    assert!(!report.passed());
}

#[test]
fn corrected_closed_forms_match() {
    for s in even_specs().into_iter().filter(|s| s.p() > 0) {
        for half in [Half::Lower, Half::Upper] {
            assert!(closed_form_discrepancies(&s, half, ClosedForm::Corrected).unwrap().is_empty(), "{s}");
        }
        assert!(closed_form_discrepancies(&s, Half::Lower, ClosedForm::Printed).unwrap().is_empty(), "{s}");
    }
}

#[test]
fn json_fields() {
    let v = count_region(&spec(4, 1, &[-2], &[2]), CountKind::Full).unwrap().to_json();
    for key in ["spec", "kind", "count", "factors"] {
        assert!(v.get(key).is_some(), "{key}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn full_count_matches_tilings(n in 2i64..=5, m in 1i64..=2, seed in 0usize..1000) {
        let specs: Vec<_> = (0..=2).flat_map(|p| enumerate_specs(n, m, p)).collect();
        let s = &specs[seed % specs.len()];
        let oracle = count_tilings(&build_region(s, RegionKind::Full).unwrap(), DEFAULT_BUDGET).unwrap();
        prop_assert_eq!(count_region(s, CountKind::Full).unwrap().value, oracle);
    }
}
