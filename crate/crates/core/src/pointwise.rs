//! Pointwise quaternionic formulas for the nearly Kähler structure.
//!
//! A tangent vector at `(p, q)` is a pair `(U, V)` with `⟨U, p⟩ = ⟨V, q⟩ = 0`.
//! Everything here is evaluated directly from the quaternion expressions and
//! serves as the reference the frame engine is checked against.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::quat::{sample_gaussian, sample_unit, Quaternion};

/// Tolerance on `|p|, |q|` and on tangency.
pub const TANGENCY_TOL: f64 = 1e-10;

/// A point `(p, q)` of `S³×S³`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AmbientPoint {
    pub p: Quaternion,
    pub q: Quaternion,
}

impl AmbientPoint {
    pub const IDENTITY: Self = Self {
        p: Quaternion::ONE,
        q: Quaternion::ONE,
    };

    pub fn new(p: Quaternion, q: Quaternion) -> Self {
        Self { p, q }
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Self::new(sample_unit(rng), sample_unit(rng))
    }

    /// Largest deviation of `|p|` or `|q|` from one.
    pub fn unit_defect(&self) -> f64 {
        (self.p.norm() - 1.0).abs().max((self.q.norm() - 1.0).abs())
    }

    pub fn to_array(&self) -> [f64; 8] {
        let (p, q) = (self.p, self.q);
        [p.w, p.x, p.y, p.z, q.w, q.x, q.y, q.z]
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.p.max_abs_diff(other.p).max(self.q.max_abs_diff(other.q))
    }
}

/// A tangent vector `Z = (U, V)` anchored at a point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TangentVector {
    pub at: AmbientPoint,
    pub u: Quaternion,
    pub v: Quaternion,
}

impl TangentVector {
    /// Builds a tangent vector without projecting; callers guarantee tangency.
    pub fn new_unchecked(at: AmbientPoint, u: Quaternion, v: Quaternion) -> Self {
        Self { at, u, v }
    }

    pub fn zero(at: AmbientPoint) -> Self {
        Self::new_unchecked(at, Quaternion::ZERO, Quaternion::ZERO)
    }

    pub fn random<R: Rng + ?Sized>(at: AmbientPoint, rng: &mut R) -> Self {
        project_tangent(&at, sample_gaussian(rng), sample_gaussian(rng))
    }

    pub fn tangency_defect(&self) -> f64 {
        self.u.dot(self.at.p).abs().max(self.v.dot(self.at.q).abs())
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::new_unchecked(self.at, self.u + other.u, self.v + other.v)
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self::new_unchecked(self.at, self.u - other.u, self.v - other.v)
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new_unchecked(self.at, self.u.scale(s), self.v.scale(s))
    }

    /// The product (round) inner product `⟨Z, Z'⟩` on `ℝ⁴ ⊕ ℝ⁴`.
    pub fn euclidean_dot(&self, other: &Self) -> f64 {
        self.u.dot(other.u) + self.v.dot(other.v)
    }

    pub fn to_array(&self) -> [f64; 8] {
        let (u, v) = (self.u, self.v);
        [u.w, u.x, u.y, u.z, v.w, v.x, v.y, v.z]
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.u.max_abs_diff(other.u).max(self.v.max_abs_diff(other.v))
    }
}

/// Removes the radial components `⟨U,p⟩p` and `⟨V,q⟩q`.
pub fn project_tangent(at: &AmbientPoint, u: Quaternion, v: Quaternion) -> TangentVector {
    let pu = u - at.p.scale(u.dot(at.p) / at.p.norm_squared());
    let pv = v - at.q.scale(v.dot(at.q) / at.q.norm_squared());
    TangentVector::new_unchecked(*at, pu, pv)
}

fn reproject(z: &TangentVector) -> TangentVector {
    if z.tangency_defect() > TANGENCY_TOL {
        project_tangent(&z.at, z.u, z.v)
    } else {
        *z
    }
}

/// `JZ = (1/√3)(2pq⁻¹V − U, −2qp⁻¹U + V)`.
pub fn apply_j(z: &TangentVector) -> TangentVector {
    let z = reproject(z);
    let (p, q) = (z.at.p, z.at.q);
    let s = 1.0 / 3f64.sqrt();
    let u = (p * q.inv() * z.v).scale(2.0) - z.u;
    let v = z.v - (q * p.inv() * z.u).scale(2.0);
    TangentVector::new_unchecked(z.at, u.scale(s), v.scale(s))
}

/// The nearly Kähler metric in its explicit form
/// `4/3(⟨U,U'⟩ + ⟨V,V'⟩) − 2/3(⟨p⁻¹U, q⁻¹V'⟩ + ⟨p⁻¹U', q⁻¹V⟩)`.
pub fn metric_g(z: &TangentVector, w: &TangentVector) -> f64 {
    let (z, w) = (reproject(z), reproject(w));
    let (pi, qi) = (z.at.p.inv(), z.at.q.inv());
    4.0 / 3.0 * (z.u.dot(w.u) + z.v.dot(w.v)) - 2.0 / 3.0 * ((pi * z.u).dot(qi * w.v) + (pi * w.u).dot(qi * z.v))
}

/// The same metric written as `½(⟨Z,Z'⟩ + ⟨JZ,JZ'⟩)`.
pub fn metric_g_hermitian(z: &TangentVector, w: &TangentVector) -> f64 {
    0.5 * (z.euclidean_dot(w) + apply_j(z).euclidean_dot(&apply_j(w)))
}

pub fn norm_g(z: &TangentVector) -> f64 {
    metric_g(z, z).max(0.0).sqrt()
}

/// Almost product structure `PZ = (pq⁻¹V, qp⁻¹U)`.
pub fn apply_p(z: &TangentVector) -> TangentVector {
    let z = reproject(z);
    let (p, q) = (z.at.p, z.at.q);
    TangentVector::new_unchecked(z.at, p * q.inv() * z.v, q * p.inv() * z.u)
}

/// Product structure `QZ = (−U, V)`.
pub fn apply_q(z: &TangentVector) -> TangentVector {
    TangentVector::new_unchecked(z.at, -z.u, z.v)
}

/// `Q` rebuilt from `P` and `J` as `(2PJZ − JZ)/√3`.
pub fn apply_q_via_pj(z: &TangentVector) -> TangentVector {
    let jz = apply_j(z);
    apply_p(&jz).scale(2.0).sub(&jz).scale(1.0 / 3f64.sqrt())
}
