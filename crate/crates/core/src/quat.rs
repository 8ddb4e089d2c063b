//! Real quaternions in double precision.
//!
//! `S³` is the set of unit quaternions and `S²` the unit imaginary ones. The
//! left-invariant frame on `S³` uses the generators `e₁ = i`, `e₂ = j`,
//! `e₃ = k`.

use std::ops::{Add, Mul, Neg, Sub};

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::GeometryError;

/// A quaternion `w + x i + y j + z k`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Quaternion {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Quaternion {
    pub const ZERO: Self = Self::new(0.0, 0.0, 0.0, 0.0);
    pub const ONE: Self = Self::new(1.0, 0.0, 0.0, 0.0);
    pub const I: Self = Self::new(0.0, 1.0, 0.0, 0.0);
    pub const J: Self = Self::new(0.0, 0.0, 1.0, 0.0);
    pub const K: Self = Self::new(0.0, 0.0, 0.0, 1.0);

    pub const fn new(w: f64, x: f64, y: f64, z: f64) -> Self {
        Self { w, x, y, z }
    }

    pub const fn real(w: f64) -> Self {
        Self::new(w, 0.0, 0.0, 0.0)
    }

    pub fn from_array(a: [f64; 4]) -> Self {
        Self::new(a[0], a[1], a[2], a[3])
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.w, self.x, self.y, self.z]
    }

    /// The imaginary unit `e_{index+1}`, i.e. `i`, `j` or `k`.
    pub fn basis(index: usize) -> Self {
        match index {
            0 => Self::I,
            1 => Self::J,
            2 => Self::K,
            _ => panic!("imaginary basis index {index} out of range"),
        }
    }

    /// Hamilton product.
    pub fn mul(self, rhs: Self) -> Self {
        Self::new(
            self.w * rhs.w - self.x * rhs.x - self.y * rhs.y - self.z * rhs.z,
            self.w * rhs.x + self.x * rhs.w + self.y * rhs.z - self.z * rhs.y,
            self.w * rhs.y - self.x * rhs.z + self.y * rhs.w + self.z * rhs.x,
            self.w * rhs.z + self.x * rhs.y - self.y * rhs.x + self.z * rhs.w,
        )
    }

    pub fn conjugate(self) -> Self {
        Self::new(self.w, -self.x, -self.y, -self.z)
    }

    /// Euclidean inner product on `ℍ ≅ ℝ⁴`.
    pub fn dot(self, rhs: Self) -> f64 {
        self.w * rhs.w + self.x * rhs.x + self.y * rhs.y + self.z * rhs.z
    }

    pub fn norm_squared(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.norm_squared().sqrt()
    }

    pub fn scale(self, s: f64) -> Self {
        Self::new(self.w * s, self.x * s, self.y * s, self.z * s)
    }

    pub fn inverse(self) -> Result<Self, GeometryError> {
        let n2 = self.norm_squared();
        if n2 == 0.0 || !n2.is_finite() {
            return Err(GeometryError::Domain("cannot invert the zero quaternion".into()));
        }
        Ok(self.conjugate().scale(1.0 / n2))
    }

    /// Inverse of a quaternion already known to be nonzero; for unit
    /// quaternions this is the conjugate up to rounding.
    pub(crate) fn inv(self) -> Self {
        self.conjugate().scale(1.0 / self.norm_squared())
    }

    pub fn normalized(self) -> Result<Self, GeometryError> {
        let n = self.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(GeometryError::Domain("cannot normalize the zero quaternion".into()));
        }
        Ok(self.scale(1.0 / n))
    }

    pub fn imaginary(self) -> ImaginaryQuaternion {
        ImaginaryQuaternion::new(self.x, self.y, self.z)
    }

    pub fn max_abs_diff(self, other: Self) -> f64 {
        (self - other).to_array().iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

impl Add for Quaternion {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.w + rhs.w, self.x + rhs.x, self.y + rhs.y, self.z + rhs.z)
    }
}

impl Sub for Quaternion {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.w - rhs.w, self.x - rhs.x, self.y - rhs.y, self.z - rhs.z)
    }
}

impl Neg for Quaternion {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale(-1.0)
    }
}

impl Mul for Quaternion {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Quaternion::mul(self, rhs)
    }
}

impl Mul<f64> for Quaternion {
    type Output = Self;
    fn mul(self, rhs: f64) -> Self {
        self.scale(rhs)
    }
}

impl Mul<Quaternion> for f64 {
    type Output = Quaternion;
    fn mul(self, rhs: Quaternion) -> Quaternion {
        rhs.scale(self)
    }
}

/// A purely imaginary quaternion, identified with a vector of `ℝ³`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ImaginaryQuaternion {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl ImaginaryQuaternion {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn to_quaternion(self) -> Quaternion {
        Quaternion::new(0.0, self.x, self.y, self.z)
    }

    pub fn dot(self, rhs: Self) -> f64 {
        self.x * rhs.x + self.y * rhs.y + self.z * rhs.z
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn cross(self, rhs: Self) -> Self {
        Self::new(
            self.y * rhs.z - self.z * rhs.y,
            self.z * rhs.x - self.x * rhs.z,
            self.x * rhs.y - self.y * rhs.x,
        )
    }

    /// The commutator bracket `½(uv − vu)`; equals the cross product.
    pub fn bracket(self, rhs: Self) -> Self {
        let u = self.to_quaternion();
        let v = rhs.to_quaternion();
        (u * v - v * u).scale(0.5).imaginary()
    }
}

impl From<ImaginaryQuaternion> for Quaternion {
    fn from(u: ImaginaryQuaternion) -> Self {
        u.to_quaternion()
    }
}

/// Draws a quaternion uniformly from `S³` by normalizing a 4D Gaussian.
pub fn sample_unit<R: Rng + ?Sized>(rng: &mut R) -> Quaternion {
    loop {
        let q = Quaternion::new(
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
        );
        if let Ok(u) = q.normalized() {
            if q.norm() > 1e-8 {
                return u;
            }
        }
    }
}

/// Draws a unit imaginary quaternion uniformly from `S²`.
pub fn sample_unit_imaginary<R: Rng + ?Sized>(rng: &mut R) -> ImaginaryQuaternion {
    loop {
        let v = ImaginaryQuaternion::new(
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
        );
        let n = v.norm();
        if n > 1e-8 {
            return ImaginaryQuaternion::new(v.x / n, v.y / n, v.z / n);
        }
    }
}

/// A quaternion with independent standard Gaussian components.
pub fn sample_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Quaternion {
    Quaternion::new(
        rng.sample(StandardNormal),
        rng.sample(StandardNormal),
        rng.sample(StandardNormal),
        rng.sample(StandardNormal),
    )
}
