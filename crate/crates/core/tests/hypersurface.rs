use nalgebra::Vector5;
use nks3::hypersurface::closed_form::{radius_spectrum, spectrum_distance, theta_from_radius, torus_spectrum};
use nks3::hypersurface::residuals::orthogonal_to_structure;
use nks3::hypersurface::*;
use nks3::isometry::IsometryMap;
use nks3::{FrameVector, GeometryError, ImaginaryQuaternion, Quaternion};
use rand::Rng;

const U: DomainPoint = [0.05, -0.03, 0.02, 0.01, -0.04];

fn example(family: Family, params: FamilyParams, seed: u64) -> Immersion {
    let mut rng = nks3::seeded_rng(seed);
    make_example(family, params)
        .unwrap()
        .with_base(ChartBase::random(&mut rng))
}

fn random_coords(rng: &mut impl Rng) -> Vector5<f64> {
    Vector5::from_fn(|_, _| rng.gen_range(-1.0..1.0))
}

#[test]
fn point_data_invariants() {
    for family in Family::ALL {
        let params = if family.is_radius_family() {
            FamilyParams::radius(0.6)
        } else {
            FamilyParams::torus(0.6, 0.8)
        };
        let d = analyze_point(&example(family, params, 11), &U).unwrap();
        assert!(d.normal_defect() < 1e-9, "{family}");
        assert!(d.structure_defect() < 1e-9, "{family}");
        assert!(d.symmetry_residual < 1e-8, "{family}");
        assert!(d.almost_contact_residual() < 1e-8, "{family}");
        let s = spectral_report(&d);
        assert_eq!(s.multiplicities.iter().sum::<usize>(), 5);
        assert!(s.c >= 0.0);
        assert!((s.a * s.a + s.b * s.b + s.c * s.c - 1.0).abs() < 1e-8);
    }
}

#[test]
fn structure_derivative_identity() {
    let mut rng = nks3::seeded_rng(5);
    for (f, p) in [
        (Family::M1, FamilyParams::radius(0.6)),
        (Family::M5, FamilyParams::torus(0.6, 0.8)),
    ] {
        let d = analyze_point(&example(f, p, 2), &U).unwrap();
        for _ in 0..3 {
            assert!(d.structure_derivative_residual(&random_coords(&mut rng)) < 1e-5);
        }
    }
}

#[test]
fn gauss_equation() {
    let mut rng = nks3::seeded_rng(6);
    let m = example(Family::M1, FamilyParams::radius(1.0), 3);
    let (x, y, z) = (
        random_coords(&mut rng),
        random_coords(&mut rng),
        random_coords(&mut rng),
    );
    assert!(gauss_residual(&m, &U, &x, &y, &z).unwrap() < 1e-3);
    assert!(gauss_residual(&m, &U, &x, &x, &z).unwrap() < 1e-12);
}

#[test]
fn codazzi_equation() {
    let mut rng = nks3::seeded_rng(7);
    for (f, p) in [
        (Family::M1, FamilyParams::radius(0.6)),
        (Family::M4, FamilyParams::torus(0.6, 0.8)),
    ] {
        let m = example(f, p, 4);
        let (x, y) = (random_coords(&mut rng), random_coords(&mut rng));
        assert!(codazzi_residual(&m, &U, &x, &y).unwrap() < 1e-3, "{f}");
        assert!(codazzi_residual(&m, &U, &x, &x).unwrap() < 1e-12, "{f}");
    }
}

#[test]
fn hopf_identity_on_structure_complement() {
    let mut rng = nks3::seeded_rng(8);
    for (f, r) in [(Family::M1, 0.6), (Family::M3, 0.8)] {
        let d = analyze_point(&example(f, FamilyParams::radius(r), 5), &U).unwrap();
        let x = orthogonal_to_structure(&d, &random_coords(&mut rng));
        let y = orthogonal_to_structure(&d, &random_coords(&mut rng));
        assert!(hopf_identity_residual(&d, &x, &y).unwrap() < 1e-5, "{f}");
        assert!(hopf_identity_residual(&d, &x, &x).unwrap() < 1e-5, "{f}");
    }
}

#[test]
fn hopf_identity_on_principal_vector() {
    // X = Y an eigenvector of A orthogonal to U
    let d = analyze_point(&example(Family::M1, FamilyParams::radius(0.6), 9), &U).unwrap();
    let (values, vectors) = analysis::sorted_eigen(&d.shape);
    let i = (0..5)
        .find(|&i| values[i].abs() > 1e-3 && d.eta.dot(&vectors[i]).abs() < 1e-8)
        .unwrap();
    assert!(hopf_identity_residual(&d, &vectors[i], &vectors[i]).unwrap() < 1e-5);
}

#[test]
fn hopf_identity_preconditions() {
    let d = analyze_point(&example(Family::M1, FamilyParams::radius(0.6), 1), &U).unwrap();
    let x = d.structure_coords();
    assert!(matches!(
        hopf_identity_residual(&d, &x, &x),
        Err(GeometryError::Precondition(_))
    ));
    let mut bent = d.clone();
    bent.hopf_residual = 1.0;
    let y = orthogonal_to_structure(&d, &Vector5::from_element(1.0));
    assert!(matches!(
        hopf_identity_residual(&bent, &y, &y),
        Err(GeometryError::Precondition(_))
    ));
}

#[test]
fn leaf_curvatures() {
    for r in [0.6, 1.0] {
        let m = example(Family::M1, FamilyParams::radius(r), 12);
        // x-chart directions sweep the totally geodesic S³ factor
        let k = coordinate_surface_curvature(&m, &U, [0, 1]).unwrap();
        assert!((k - 0.75).abs() < 1e-3, "{k}");
        let t = theta_from_radius(r);
        let want = (1.0 + 2.0 * t * t) / (4.0 * t * t);
        let k = coordinate_surface_curvature(&m, &U, [3, 4]).unwrap();
        assert!((k - want).abs() < 1e-3, "{k} vs {want}");
        assert!((want - 3.0 / (4.0 * r * r)).abs() < 1e-12);
    }
}

#[test]
fn sectional_curvature_matches_gauss_formula() {
    // in the x-chart plane, intrinsic K equals the value the Gauss equation predicts
    let m = example(Family::M1, FamilyParams::radius(0.6), 13);
    let d = analyze_point(&m, &U).unwrap();
    let x = d.coords(&(d.coordinate_frame[0]));
    let y = d.coords(&(d.coordinate_frame[1]));
    let k = sectional_curvature(&m, &U, &x, &y).unwrap();
    let rhs = residuals::gauss_rhs(&d, &x, &y, &y).dot(&x) / (x.norm_squared() * y.norm_squared() - x.dot(&y).powi(2));
    assert!((k - rhs).abs() < 1e-3 && (k - 0.75).abs() < 1e-3);
}

#[test]
fn theta_radius_relation() {
    for r in [0.3, 0.6, 0.9, 1.0] {
        let rep = theta_r_consistency(&example(Family::M1, FamilyParams::radius(r), 14), &U).unwrap();
        assert!(
            rep.radius_residual < 1e-6 && rep.curvature_residual < 1e-6,
            "{r}: {rep:?}"
        );
        assert!(rep.product_residual < 1e-8 && rep.computed_product_residual < 1e-8);
    }
    let rep = theta_r_consistency(&example(Family::M1, FamilyParams::radius(0.6), 1), &U).unwrap();
    assert!((rep.theta - (0.36f64 / 2.28).sqrt()).abs() < 1e-6);
    let rep = theta_r_consistency(&example(Family::M2, FamilyParams::radius(1.0), 1), &U).unwrap();
    assert!((rep.theta - 1.0).abs() < 1e-6);
    let torus = example(Family::M4, FamilyParams::torus(0.6, 0.8), 1);
    assert!(matches!(theta_r_consistency(&torus, &U), Err(GeometryError::Domain(_))));
}

#[test]
fn normal_flip_negates_spectrum() {
    let d = analyze_point(&example(Family::M4, FamilyParams::torus(0.6, 0.8), 15), &U).unwrap();
    let before = spectral_report(&d).eigenvalues;
    let mut flipped = d.clone();
    flipped.flip();
    let after = spectral_report(&flipped).eigenvalues;
    for (a, b) in before.iter().zip(after.iter().rev()) {
        assert!((a + b).abs() < 1e-12);
    }
    assert!(spectrum_distance(&after, &torus_spectrum(0.6, 0.8)) < 1e-6);
}

#[test]
fn minimal_only_at_unit_radius() {
    for f in [Family::M1, Family::M2, Family::M3] {
        let at_one = spectral_report(&analyze_point(&example(f, FamilyParams::radius(1.0), 16), &U).unwrap());
        assert!(at_one.trace.abs() < 1e-6, "{f}");
        let at_06 = spectral_report(&analyze_point(&example(f, FamilyParams::radius(0.6), 16), &U).unwrap());
        assert!(at_06.trace.abs() > 0.1, "{f}");
        assert!((at_06.mean_curvature - at_06.trace / 5.0).abs() < 1e-15);
    }
}

#[test]
fn composed_family_matches_isometry_image() {
    // M₂ = F₁(M₁) point by point with the same chart
    let m1 = example(Family::M1, FamilyParams::radius(0.7), 17);
    let m2 = Immersion {
        family: Family::M2,
        ..m1
    };
    let (p1, push1) = m1.pushforward(&U);
    let (p2, push2) = m2.pushforward(&U);
    assert!(IsometryMap::F1.apply(&p1).max_abs_diff(&p2) < 1e-14);
    for (a, b) in push1.iter().zip(&push2) {
        assert!(IsometryMap::F1.differential(a).max_abs_diff(b) < 1e-12);
    }
    let s1 = spectral_report(&analyze_point(&m1, &U).unwrap());
    let s2 = spectral_report(&analyze_point(&m2, &U).unwrap());
    assert!(spectrum_distance(&s2.eigenvalues, &s1.eigenvalues) < 1e-8);
    assert!(spectrum_distance(&s2.eigenvalues, &radius_spectrum(0.7)) < 1e-6);
}

#[test]
fn classes_and_non_applicable_case() {
    for (f, want) in [
        (Family::M1, PXiClass::Plus),
        (Family::M2, PXiClass::Minus),
        (Family::M3, PXiClass::Reflect),
    ] {
        for r in [0.4, 1.0] {
            let d = analyze_point(&example(f, FamilyParams::radius(r), 18), &U).unwrap();
            assert_eq!(classify_p_xi(&d).unwrap(), want);
        }
    }
    // a normal with a component along Pξ's complement: replace ξ by a generic unit vector
    let mut d = analyze_point(&example(Family::M1, FamilyParams::radius(0.6), 19), &U).unwrap();
    let t = nks3::frame::tables();
    let v = FrameVector::new([1.0, 0.3, -0.2, 0.1, 0.5, 0.7]);
    d.normal = v * (1.0 / t.norm(&v));
    assert!(matches!(classify_p_xi(&d), Err(GeometryError::NotApplicable(_))));
}

#[test]
fn degenerate_chart_is_reported() {
    let mut m = make_example(Family::M1, FamilyParams::radius(0.6)).unwrap();
    m.base = ChartBase {
        x0: Quaternion::ONE,
        y0: ImaginaryQuaternion::new(0.0, 0.0, 0.0),
        angles: [0.0, 0.0],
    };
    assert!(matches!(
        analyze_point(&m, &[0.0; 5]),
        Err(GeometryError::DegenerateImmersion(_))
    ));
}

#[test]
fn sample_spectra_are_constant_across_points() {
    let m = example(Family::M6, FamilyParams::torus(0.8, 0.6), 20);
    let mut rng = nks3::seeded_rng(21);
    let reference = spectral_report(&analyze_point(&m, &U).unwrap()).eigenvalues;
    for _ in 0..4 {
        let u: DomainPoint = std::array::from_fn(|_| rng.gen_range(-0.3..0.3));
        let s = spectral_report(&analyze_point(&m, &u).unwrap()).eigenvalues;
        for (a, b) in s.iter().zip(&reference) {
            assert!((a - b).abs() < 1e-6);
        }
    }
}
