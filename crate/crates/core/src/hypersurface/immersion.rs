//! The example families `M₁ … M₆` as charted immersions of a 5-dimensional
//! parameter domain.
//!
//! `M₁` is `(x, √(1−r²) + r y)` with `x ∈ S³`, `y ∈ S² ⊂ Im ℍ`; `M₄` is
//! `(x, (k cos φ₁, k sin φ₁, l cos φ₂, l sin φ₂))`. `M₂, M₃` (resp. `M₅, M₆`)
//! are the images of `M₁` (resp. `M₄`) under `F₁` and `F₂`.
//!
//! Charts are centred at a base point: the `S³` factor uses the gnomonic chart
//! `x(u) = (x₀ + Σ uᵢ x₀eᵢ)/|·|`, the `S²` factor the analogous chart in the
//! plane orthogonal to `y₀`, and the torus factor offsets the base angles.
//! Every pushforward is closed form.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{GeometryError, Result};
use crate::isometry::IsometryMap;
use crate::pointwise::{AmbientPoint, TangentVector};
use crate::quat::{sample_unit, sample_unit_imaginary, ImaginaryQuaternion, Quaternion};

/// Smallest radius accepted by the command line; spectra blow up like `1/r`.
pub const MIN_CLI_RADIUS: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, PartialOrd, Ord)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    M1,
    M2,
    M3,
    M4,
    M5,
    M6,
}

impl Family {
    pub const ALL: [Family; 6] = [Family::M1, Family::M2, Family::M3, Family::M4, Family::M5, Family::M6];

    /// Whether the family is built from `M₁` (parameter `r`) rather than `M₄`.
    pub fn is_radius_family(self) -> bool {
        matches!(self, Family::M1 | Family::M2 | Family::M3)
    }

    /// The isometry applied to the base family, if any.
    pub fn isometry(self) -> Option<IsometryMap> {
        match self {
            Family::M1 | Family::M4 => None,
            Family::M2 | Family::M5 => Some(IsometryMap::F1),
            Family::M3 | Family::M6 => Some(IsometryMap::F2),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::M1 => "m1",
            Family::M2 => "m2",
            Family::M3 => "m3",
            Family::M4 => "m4",
            Family::M5 => "m5",
            Family::M6 => "m6",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = GeometryError;
    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| GeometryError::Domain(format!("unknown family '{s}' (expected m1..m6)")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FamilyParams {
    Radius { r: f64 },
    Torus { k: f64, l: f64 },
}

impl FamilyParams {
    pub fn radius(r: f64) -> Self {
        Self::Radius { r }
    }

    pub fn torus(k: f64, l: f64) -> Self {
        Self::Torus { k, l }
    }

    pub fn r(&self) -> Option<f64> {
        match *self {
            Self::Radius { r } => Some(r),
            Self::Torus { .. } => None,
        }
    }

    pub fn kl(&self) -> Option<(f64, f64)> {
        match *self {
            Self::Torus { k, l } => Some((k, l)),
            Self::Radius { .. } => None,
        }
    }
}

impl fmt::Display for FamilyParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Radius { r } => write!(f, "r={r}"),
            Self::Torus { k, l } => write!(f, "k={k},l={l}"),
        }
    }
}

/// Centre of the chart: `x₀ ∈ S³`, `y₀ ∈ S²` for the radius families and the
/// base angles for the torus families.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChartBase {
    pub x0: Quaternion,
    pub y0: ImaginaryQuaternion,
    pub angles: [f64; 2],
}

impl Default for ChartBase {
    fn default() -> Self {
        Self {
            x0: Quaternion::ONE,
            y0: ImaginaryQuaternion::new(1.0, 0.0, 0.0),
            angles: [0.0, 0.0],
        }
    }
}

impl ChartBase {
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let tau = std::f64::consts::TAU;
        Self {
            x0: sample_unit(rng),
            y0: sample_unit_imaginary(rng),
            angles: [rng.gen::<f64>() * tau, rng.gen::<f64>() * tau],
        }
    }
}

/// Point of the 5-dimensional parameter domain.
pub type DomainPoint = [f64; 5];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Immersion {
    pub family: Family,
    pub params: FamilyParams,
    pub base: ChartBase,
}

/// Validates parameters and builds the family with the default chart base.
pub fn make_example(family: Family, params: FamilyParams) -> Result<Immersion> {
    match (family.is_radius_family(), params) {
        (true, FamilyParams::Radius { r }) => {
            if !(r > 0.0 && r <= 1.0) {
                return Err(GeometryError::Domain(format!("radius r={r} must lie in (0, 1]")));
            }
        }
        (false, FamilyParams::Torus { k, l }) => {
            if !(k > 0.0 && k < 1.0 && l > 0.0 && l < 1.0) {
                return Err(GeometryError::Domain(format!("k={k}, l={l} must lie in (0, 1)")));
            }
            if (k * k + l * l - 1.0).abs() > 1e-12 {
                return Err(GeometryError::Domain(format!("k²+l² = {} must equal 1", k * k + l * l)));
            }
        }
        (true, _) => return Err(GeometryError::Domain(format!("{family} takes a radius r"))),
        (false, _) => return Err(GeometryError::Domain(format!("{family} takes a pair (k, l)"))),
    }
    Ok(Immersion {
        family,
        params,
        base: ChartBase::default(),
    })
}

/// Gnomonic chart on a unit sphere: `n(b + Σ sᵢtᵢ)` and its partials.
fn gnomonic<const N: usize>(base: Quaternion, dirs: [Quaternion; N], s: &[f64]) -> (Quaternion, [Quaternion; N]) {
    let mut v = base;
    for (t, si) in dirs.iter().zip(s) {
        v = v + t.scale(*si);
    }
    let n = v.norm();
    let x = v.scale(1.0 / n);
    let partials = dirs.map(|t| (t - x.scale(x.dot(t))).scale(1.0 / n));
    (x, partials)
}

/// Orthonormal pair completing `y₀` to a basis of `Im ℍ`.
fn complement(y0: ImaginaryQuaternion) -> (ImaginaryQuaternion, ImaginaryQuaternion) {
    let n = y0.norm();
    let y = ImaginaryQuaternion::new(y0.x / n, y0.y / n, y0.z / n);
    let seed = if y.x.abs() < 0.9 {
        ImaginaryQuaternion::new(1.0, 0.0, 0.0)
    } else {
        ImaginaryQuaternion::new(0.0, 1.0, 0.0)
    };
    let t1 = seed.cross(y);
    let t1n = t1.norm();
    let t1 = ImaginaryQuaternion::new(t1.x / t1n, t1.y / t1n, t1.z / t1n);
    (t1, y.cross(t1))
}

impl Immersion {
    pub fn with_base(mut self, base: ChartBase) -> Self {
        self.base = base;
        self
    }

    fn x_factor(&self, u: &DomainPoint) -> (Quaternion, [Quaternion; 3]) {
        let x0 = self.base.x0;
        let dirs = [x0 * Quaternion::I, x0 * Quaternion::J, x0 * Quaternion::K];
        gnomonic(x0, dirs, &u[0..3])
    }

    /// Point and pushforward of the underlying `M₁` or `M₄` immersion.
    fn base_family(&self, u: &DomainPoint) -> (AmbientPoint, [(Quaternion, Quaternion); 5]) {
        let (x, dx) = self.x_factor(u);
        let z = Quaternion::ZERO;
        match self.params {
            FamilyParams::Radius { r } => {
                let y0 = self.base.y0;
                let (t1, t2) = complement(y0);
                let (y, dy) = gnomonic(y0.to_quaternion(), [t1.to_quaternion(), t2.to_quaternion()], &u[3..5]);
                let q = Quaternion::real((1.0 - r * r).max(0.0).sqrt()) + y.scale(r);
                let push = [
                    (dx[0], z),
                    (dx[1], z),
                    (dx[2], z),
                    (z, dy[0].scale(r)),
                    (z, dy[1].scale(r)),
                ];
                (AmbientPoint::new(x, q), push)
            }
            FamilyParams::Torus { k, l } => {
                let a1 = self.base.angles[0] + u[3];
                let a2 = self.base.angles[1] + u[4];
                let (s1, c1) = a1.sin_cos();
                let (s2, c2) = a2.sin_cos();
                let q = Quaternion::new(k * c1, k * s1, l * c2, l * s2);
                let push = [
                    (dx[0], z),
                    (dx[1], z),
                    (dx[2], z),
                    (z, Quaternion::new(-k * s1, k * c1, 0.0, 0.0)),
                    (z, Quaternion::new(0.0, 0.0, -l * s2, l * c2)),
                ];
                (AmbientPoint::new(x, q), push)
            }
        }
    }

    pub fn point(&self, u: &DomainPoint) -> AmbientPoint {
        let (pt, _) = self.base_family(u);
        match self.family.isometry() {
            Some(map) => map.apply(&pt),
            None => pt,
        }
    }

    /// Images of the five coordinate directions.
    pub fn pushforward(&self, u: &DomainPoint) -> (AmbientPoint, [TangentVector; 5]) {
        let (pt, push) = self.base_family(u);
        let vectors = push.map(|(a, b)| TangentVector::new_unchecked(pt, a, b));
        match self.family.isometry() {
            Some(map) => (map.apply(&pt), vectors.map(|v| map.differential(&v))),
            None => (pt, vectors),
        }
    }

    /// Point on the `M₄` torus factor, `(y₁, y₂, y₃, y₄)` as a quaternion.
    pub fn torus_factor(&self, u: &DomainPoint) -> Option<Quaternion> {
        match self.params {
            FamilyParams::Torus { .. } => Some(self.base_family(u).0.q),
            FamilyParams::Radius { .. } => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seeded_rng;

    #[test]
    fn m1_formula() {
        let m = make_example(Family::M1, FamilyParams::radius(1.0)).unwrap();
        let base = ChartBase {
            x0: Quaternion::new(0.5, 0.5, -0.5, 0.5),
            y0: ImaginaryQuaternion::new(0.0, 0.6, 0.8),
            angles: [0.0; 2],
        };
        let pt = m.with_base(base).point(&[0.0; 5]);
        assert!(pt.p.max_abs_diff(base.x0) < 1e-15);
        assert!(pt.q.max_abs_diff(base.y0.to_quaternion()) < 1e-15);

        let m = make_example(Family::M1, FamilyParams::radius(0.6)).unwrap();
        let pt = m.point(&[0.0; 5]);
        assert_eq!(pt.p, Quaternion::ONE);
        assert!(pt.q.max_abs_diff(Quaternion::new(0.8, 0.6, 0.0, 0.0)) < 1e-15);
    }

    #[test]
    fn m4_torus_constraint() {
        let (k, l) = (0.6, 0.8);
        let m = make_example(Family::M4, FamilyParams::torus(k, l)).unwrap();
        let mut rng = seeded_rng(3);
        for _ in 0..20 {
            let m = m.with_base(ChartBase::random(&mut rng));
            let y = m.torus_factor(&[0.1, -0.2, 0.3, 0.4, -0.5]).unwrap();
            assert!((y.w * y.w + y.x * y.x - k * k).abs() < 1e-12);
            assert!((y.y * y.y + y.z * y.z - l * l).abs() < 1e-12);
        }
    }

    #[test]
    fn parameter_validation() {
        for r in [0.0, -0.1, 1.1, f64::NAN] {
            assert!(make_example(Family::M1, FamilyParams::radius(r)).is_err());
        }
        assert!(make_example(Family::M4, FamilyParams::torus(0.6, 0.81)).is_err());
        assert!(make_example(Family::M4, FamilyParams::torus(1.0, 0.0)).is_err());
        assert!(make_example(Family::M4, FamilyParams::radius(0.5)).is_err());
        assert!(make_example(Family::M2, FamilyParams::torus(0.6, 0.8)).is_err());
        assert!(make_example(Family::M6, FamilyParams::torus(0.6, 0.8)).is_ok());
        assert_eq!("M5".parse::<Family>().unwrap(), Family::M5);
        assert!("m7".parse::<Family>().is_err());
    }

    #[test]
    fn pushforward_matches_central_differences() {
        let mut rng = seeded_rng(21);
        let h = 1e-6;
        for family in Family::ALL {
            let params = if family.is_radius_family() {
                FamilyParams::radius(0.7)
            } else {
                FamilyParams::torus(0.6, 0.8)
            };
            let m = make_example(family, params)
                .unwrap()
                .with_base(ChartBase::random(&mut rng));
            let u = [0.05, -0.1, 0.2, 0.15, -0.05];
            let (_, push) = m.pushforward(&u);
            for (k, v) in push.iter().enumerate() {
                let (mut a, mut b) = (u, u);
                a[k] += h;
                b[k] -= h;
                let (pa, pb) = (m.point(&a), m.point(&b));
                let du = (pa.p - pb.p).scale(0.5 / h);
                let dv = (pa.q - pb.q).scale(0.5 / h);
                assert!(du.max_abs_diff(v.u) < 1e-8, "{family} dir {k}");
                assert!(dv.max_abs_diff(v.v) < 1e-8, "{family} dir {k}");
                assert!(v.tangency_defect() < 1e-12);
            }
        }
    }
}
