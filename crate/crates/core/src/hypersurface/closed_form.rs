//! Closed-form principal curvatures of the example families and the
//! `θ`–`r` relations, used as references for the computed spectra.

use crate::hypersurface::immersion::FamilyParams;

/// `(λ, β)` of `M₁, M₂, M₃` at radius `r`:
/// `√(1−r²)/(2r) ∓ √(3−2r²)/(2√3 r)`.
pub fn radius_curvatures(r: f64) -> (f64, f64) {
    let a = (1.0 - r * r).sqrt() / (2.0 * r);
    let b = (3.0 - 2.0 * r * r).sqrt() / (2.0 * 3f64.sqrt() * r);
    (a - b, a + b)
}

/// `{0, λ, λ, β, β}` sorted ascending.
pub fn radius_spectrum(r: f64) -> [f64; 5] {
    let (l, b) = radius_curvatures(r);
    sorted([0.0, l, l, b, b])
}

/// `λ₁..λ₄` of `M₄, M₅, M₆`.
pub fn torus_curvatures(k: f64, l: f64) -> [f64; 4] {
    let s1 = (9.0 * k * k + 3.0 * l * l).sqrt();
    let s2 = (3.0 * k * k + 9.0 * l * l).sqrt();
    [
        (3.0 * k - s1) / (6.0 * l),
        (3.0 * k + s1) / (6.0 * l),
        (-3.0 * l - s2) / (6.0 * k),
        (-3.0 * l + s2) / (6.0 * k),
    ]
}

/// `{0, λ₁, λ₂, λ₃, λ₄}` sorted ascending.
pub fn torus_spectrum(k: f64, l: f64) -> [f64; 5] {
    let [a, b, c, d] = torus_curvatures(k, l);
    sorted([0.0, a, b, c, d])
}

pub fn expected_spectrum(params: &FamilyParams) -> [f64; 5] {
    match *params {
        FamilyParams::Radius { r } => radius_spectrum(r),
        FamilyParams::Torus { k, l } => torus_spectrum(k, l),
    }
}

fn sorted(mut v: [f64; 5]) -> [f64; 5] {
    v.sort_by(f64::total_cmp);
    v
}

/// Distance between two spectra as multisets up to one global sign: the
/// smaller of the sorted max-differences against `expected` and `−expected`.
pub fn spectrum_distance(computed: &[f64; 5], expected: &[f64; 5]) -> f64 {
    let c = sorted(*computed);
    let e = sorted(*expected);
    let neg = sorted(e.map(|x| -x));
    let d = |a: &[f64; 5], b: &[f64; 5]| a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
    d(&c, &e).min(d(&c, &neg))
}

/// `θ` such that `r = √3θ/√(1+2θ²)`, i.e. `θ = r/√(3−2r²)`.
pub fn theta_from_radius(r: f64) -> f64 {
    r / (3.0 - 2.0 * r * r).sqrt()
}

/// `r = √3θ/√(1+2θ²)`.
pub fn radius_from_theta(theta: f64) -> f64 {
    3f64.sqrt() * theta / (1.0 + 2.0 * theta * theta).sqrt()
}

/// `(λ, β) = ((√(1−θ²)+1)/(2√3θ), (√(1−θ²)−1)/(2√3θ))`, the principal
/// curvatures in terms of the Kähler angle of the `λ`-eigenspace.
pub fn theta_curvatures(theta: f64) -> (f64, f64) {
    let s = (1.0 - theta * theta).max(0.0).sqrt();
    let d = 2.0 * 3f64.sqrt() * theta;
    ((s + 1.0) / d, (s - 1.0) / d)
}

/// Sectional curvature `(1+2θ²)/(4θ²)` of the 2-dimensional leaf.
pub fn sphere_leaf_curvature(theta: f64) -> f64 {
    (1.0 + 2.0 * theta * theta) / (4.0 * theta * theta)
}

/// Sectional curvature of the 3-dimensional totally geodesic leaf.
pub const GROUP_LEAF_CURVATURE: f64 = 0.75;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn radius_values() {
        // hand evaluation at r = 0.6: √0.64 = 0.8, √(3 − 0.72) = √2.28
        let (l, b) = radius_curvatures(0.6);
        let expected_l = 0.8 / 1.2 - 2.28f64.sqrt() / (1.2 * 3f64.sqrt());
        assert!((l - expected_l).abs() < 1e-15);
        assert!((l + 0.0598165).abs() < 1e-6, "{l}");
        assert!((b - 1.3931498).abs() < 1e-6, "{b}");
        let (l, b) = radius_curvatures(1.0);
        assert!((l + 3f64.sqrt() / 6.0).abs() < 1e-15);
        assert!((b - 3f64.sqrt() / 6.0).abs() < 1e-15);
        for r in [0.2, 0.5, 0.9] {
            let (l, b) = radius_curvatures(r);
            assert!((l + b - (1.0 - r * r).sqrt() / r).abs() < 1e-12);
            assert!((l * b + 1.0 / 12.0).abs() < 1e-12);
        }
    }

    #[test]
    fn torus_values() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let s = torus_spectrum(h, h);
        let want = [
            -1.0773502691896257,
            -0.07735026918962584,
            0.0,
            0.07735026918962584,
            1.0773502691896257,
        ];
        for (a, b) in s.iter().zip(want) {
            assert!((a - b).abs() < 1e-12);
        }
        // 9k² + 3l² = 5.16 and 3k² + 9l² = 6.84 at (k, l) = (0.6, 0.8)
        let [a, b, c, d] = torus_curvatures(0.6, 0.8);
        assert!((a - (1.8 - 5.16f64.sqrt()) / 4.8).abs() < 1e-15);
        assert!((b - (1.8 + 5.16f64.sqrt()) / 4.8).abs() < 1e-15);
        assert!((c - (-2.4 - 6.84f64.sqrt()) / 3.6).abs() < 1e-15);
        assert!((d - (-2.4 + 6.84f64.sqrt()) / 3.6).abs() < 1e-15);
        assert!((a + 0.0982424).abs() < 1e-6 && (b - 0.8482424).abs() < 1e-6);
        assert!((c + 1.3931498).abs() < 1e-6 && (d - 0.0598165).abs() < 1e-6);
    }

    #[test]
    fn theta_relations() {
        let t = theta_from_radius(0.6);
        assert!((t - (0.36f64 / 2.28).sqrt()).abs() < 1e-15);
        assert!((t - 0.397360).abs() < 1e-6);
        assert!((theta_from_radius(1.0) - 1.0).abs() < 1e-15);
        for r in [0.1, 0.3, 0.77, 1.0] {
            assert!((radius_from_theta(theta_from_radius(r)) - r).abs() < 1e-14);
            let (l, b) = theta_curvatures(theta_from_radius(r));
            let (rl, rb) = radius_curvatures(r);
            // same pair up to the orientation sign
            assert!(
                (l + rl).abs() < 1e-12 && (b + rb).abs() < 1e-12 || (l - rb).abs() < 1e-12 && (b - rl).abs() < 1e-12
            );
            assert!((sphere_leaf_curvature(theta_from_radius(r)) - 3.0 / (4.0 * r * r)).abs() < 1e-12);
        }
    }

    #[test]
    fn signed_multiset_distance() {
        let e = radius_spectrum(0.6);
        let flipped = e.map(|x| -x);
        assert!(spectrum_distance(&flipped, &e) < 1e-15);
        assert!(spectrum_distance(&[0.0; 5], &e) > 0.1);
    }
}
