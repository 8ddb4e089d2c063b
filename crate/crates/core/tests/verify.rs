use nks3::exec::Execution;
use nks3::hypersurface::{Family, FamilyParams};
use nks3::verify::*;
use nks3::GeometryError;

fn residuals(r: &SuiteReport) -> Vec<(String, u64)> {
    r.checks
        .iter()
        .map(|c| (c.id.clone(), c.max_residual.to_bits()))
        .collect()
}

#[test]
fn structure_suite_passes() {
    let r = run_structure_suite(42, 100).unwrap();
    assert!(r.all_pass(), "{:?}", r.failures().collect::<Vec<_>>());
    assert_eq!(r.checks.len(), 11);
    assert!(r.checks.iter().all(|c| c.samples == 100));
}

#[test]
fn structure_suite_is_deterministic_across_modes() {
    let a = run_structure_suite_with(9, 200, Execution::Parallel).unwrap();
    let b = run_structure_suite_with(9, 200, Execution::Parallel).unwrap();
    let c = run_structure_suite_with(9, 200, Execution::Sequential).unwrap();
    assert_eq!(residuals(&a), residuals(&b));
    assert_eq!(residuals(&a), residuals(&c));
    assert_ne!(residuals(&a), residuals(&run_structure_suite(10, 200).unwrap()));
}

#[test]
fn passing_checks_stay_passing_with_more_samples() {
    let small = run_isometry_suite(3, 100).unwrap();
    let large = run_isometry_suite(3, 1000).unwrap();
    assert!(small.all_pass() && large.all_pass());
    for (s, l) in small.checks.iter().zip(&large.checks) {
        assert!(l.max_residual >= s.max_residual, "{}", s.id);
    }
}

#[test]
fn zero_samples_is_a_precondition_error() {
    assert!(matches!(
        run_structure_suite(42, 0),
        Err(GeometryError::Precondition(_))
    ));
    assert!(matches!(
        run_hypersurface_suite(Family::M1, FamilyParams::radius(0.6), 1, 0),
        Err(GeometryError::Precondition(_))
    ));
}

#[test]
fn radius_example_suite() {
    let r = run_hypersurface_suite(Family::M1, FamilyParams::radius(0.6), 7, 20).unwrap();
    assert!(r.all_pass(), "{:?}", r.failures().collect::<Vec<_>>());
    assert!(r.check("theta-radius").is_some() && r.check("gauss").is_some());
}

#[test]
fn reflect_family_at_unit_radius_is_minimal() {
    let r = run_hypersurface_suite(Family::M3, FamilyParams::radius(1.0), 7, 5).unwrap();
    assert!(r.all_pass());
    assert!(r.check("trace").unwrap().max_residual < 1e-6);
    assert_eq!(expected_class(Family::M3).name(), "REFLECT");
}

#[test]
fn torus_example_suite() {
    let r = run_hypersurface_suite(Family::M5, FamilyParams::torus(0.6, 0.8), 7, 5).unwrap();
    assert!(r.all_pass(), "{:?}", r.failures().collect::<Vec<_>>());
    assert!(r.check("theta-radius").is_none());
}

#[test]
fn invalid_params_propagate() {
    assert!(matches!(
        run_hypersurface_suite(Family::M4, FamilyParams::torus(0.6, 0.6), 1, 1),
        Err(GeometryError::Domain(_))
    ));
    assert!(run_hypersurface_suite(Family::M1, FamilyParams::torus(0.6, 0.8), 1, 1).is_err());
}

#[test]
fn report_json_schema() {
    let r = run_isometry_suite(1, 4).unwrap();
    let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
    for key in ["suite", "seed", "checks", "duration_ms"] {
        assert!(v.get(key).is_some(), "{key}");
    }
    let check = &v["checks"][0];
    for key in ["id", "anchor", "samples", "max_residual", "tolerance", "pass"] {
        assert!(check.get(key).is_some(), "{key}");
    }
    assert_eq!(v["suite"], "isometry");
    assert_eq!(v["seed"], 1);
}

#[test]
fn combined_report_prefixes_ids() {
    let r = run_all(5, SampleCounts::uniform(2), Execution::default()).unwrap();
    assert!(r.all_pass(), "{:?}", r.failures().collect::<Vec<_>>());
    assert!(r.check("structure/g-antisymmetric").is_some());
    assert!(r.check("isometry/f2-p").is_some());
    assert!(r.check("hypersurface/m6[k=0.6,l=0.8]/pxi-class").is_some());
}
