//! Structure-constant model of the nearly Kähler `S³×S³`.
//!
//! In the global left-invariant frame `E_i = (p e_i, 0)`, `F_i = (0, q e_i)`
//! the tensors `g`, `J`, `P`, `Q` have constant coefficients and the Lie
//! brackets are `[E_u, E_v] = E_{2u×v}`, `[F_u, F_v] = F_{2u×v}`,
//! `[E, F] = 0`. Since every frame inner product is constant the Koszul
//! formula reduces to bracket terms, so `∇̃`, `G = ∇̃J` and `R̃` follow from
//! table algebra alone.
//!
//! Frame coefficients are ordered `(E₁, E₂, E₃, F₁, F₂, F₃)`.

use std::sync::OnceLock;

use nalgebra::{Matrix6, Vector6};
use rand::Rng;
use rand_distr::StandardNormal;
use serde_json::{json, Value};

use crate::pointwise::{project_tangent, AmbientPoint, TangentVector};
use crate::quat::{ImaginaryQuaternion, Quaternion};

/// Six coefficients on `E₁..E₃, F₁..F₃`.
///
/// The frame is global, so a coefficient vector means the same thing at every
/// point; [`FrameVector::to_tangent`] anchors it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameVector(pub Vector6<f64>);

impl FrameVector {
    pub fn new(coeffs: [f64; 6]) -> Self {
        Self(Vector6::from_column_slice(&coeffs))
    }

    pub fn zero() -> Self {
        Self(Vector6::zeros())
    }

    /// `E_{i+1}` for `i < 3`, `F_{i-2}` for `3 ≤ i < 6`.
    pub fn basis(index: usize) -> Self {
        let mut v = Vector6::zeros();
        v[index] = 1.0;
        Self(v)
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Self(Vector6::from_fn(|_, _| rng.sample(StandardNormal)))
    }

    pub fn e_part(&self) -> ImaginaryQuaternion {
        ImaginaryQuaternion::new(self.0[0], self.0[1], self.0[2])
    }

    pub fn f_part(&self) -> ImaginaryQuaternion {
        ImaginaryQuaternion::new(self.0[3], self.0[4], self.0[5])
    }

    pub fn from_parts(e: ImaginaryQuaternion, f: ImaginaryQuaternion) -> Self {
        Self::new([e.x, e.y, e.z, f.x, f.y, f.z])
    }

    /// `(p·Σcᵢeᵢ, q·Σdᵢeᵢ)`.
    pub fn to_tangent(&self, at: &AmbientPoint) -> TangentVector {
        TangentVector::new_unchecked(
            *at,
            at.p * self.e_part().to_quaternion(),
            at.q * self.f_part().to_quaternion(),
        )
    }

    /// Reads off `cᵢ = ⟨U, p eᵢ⟩`, `dᵢ = ⟨V, q eᵢ⟩`.
    pub fn from_tangent(z: &TangentVector) -> Self {
        let e = (z.at.p.conjugate() * z.u).imaginary();
        let f = (z.at.q.conjugate() * z.v).imaginary();
        Self::from_parts(e, f)
    }

    pub fn scale(&self, s: f64) -> Self {
        Self(self.0 * s)
    }

    pub fn max_abs(&self) -> f64 {
        self.0.amax()
    }
}

impl std::ops::Add for FrameVector {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self(self.0 + rhs.0)
    }
}

impl std::ops::Sub for FrameVector {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self(self.0 - rhs.0)
    }
}

impl std::ops::Neg for FrameVector {
    type Output = Self;
    fn neg(self) -> Self {
        Self(-self.0)
    }
}

impl std::ops::Mul<f64> for FrameVector {
    type Output = Self;
    fn mul(self, rhs: f64) -> Self {
        self.scale(rhs)
    }
}

type Table = [[Vector6<f64>; 6]; 6];

/// Constant-coefficient tables of the homogeneous structure.
#[derive(Debug, Clone)]
pub struct StructureTables {
    pub metric: Matrix6<f64>,
    pub metric_inv: Matrix6<f64>,
    pub j: Matrix6<f64>,
    pub p: Matrix6<f64>,
    pub q: Matrix6<f64>,
    /// `bracket[a][b] = [X_a, X_b]`.
    pub bracket: Table,
    /// `connection[a][b] = ∇̃_{X_a} X_b`.
    pub connection: Table,
    /// `g_tensor[a][b] = G(X_a, X_b)`.
    pub g_tensor: Table,
}

/// Shared, lazily built tables.
pub fn tables() -> &'static StructureTables {
    static TABLES: OnceLock<StructureTables> = OnceLock::new();
    TABLES.get_or_init(build_tables)
}

impl Default for StructureTables {
    fn default() -> Self {
        build_tables()
    }
}

pub fn build_tables() -> StructureTables {
    let s = 1.0 / 3f64.sqrt();
    let mut metric = Matrix6::zeros();
    let mut j = Matrix6::zeros();
    let mut p = Matrix6::zeros();
    let mut q = Matrix6::zeros();
    for i in 0..3 {
        let (e, f) = (i, i + 3);
        metric[(e, e)] = 4.0 / 3.0;
        metric[(f, f)] = 4.0 / 3.0;
        metric[(e, f)] = -2.0 / 3.0;
        metric[(f, e)] = -2.0 / 3.0;
        // J E_i = -(E_i + 2F_i)/√3, J F_i = (2E_i + F_i)/√3; columns are images.
        j[(e, e)] = -s;
        j[(f, e)] = -2.0 * s;
        j[(e, f)] = 2.0 * s;
        j[(f, f)] = s;
        p[(f, e)] = 1.0;
        p[(e, f)] = 1.0;
        q[(e, e)] = -1.0;
        q[(f, f)] = 1.0;
    }
    let metric_inv = metric.try_inverse().expect("frame metric is positive definite");

    let mut bracket = [[Vector6::zeros(); 6]; 6];
    for a in 0..6 {
        for b in 0..6 {
            if a / 3 != b / 3 {
                continue;
            }
            let u = ImaginaryQuaternion::from_array(unit3(a % 3));
            let v = ImaginaryQuaternion::from_array(unit3(b % 3));
            let w = u.cross(v);
            let off = 3 * (a / 3);
            bracket[a][b][off] = 2.0 * w.x;
            bracket[a][b][off + 1] = 2.0 * w.y;
            bracket[a][b][off + 2] = 2.0 * w.z;
        }
    }

    let g = |x: &Vector6<f64>, y: &Vector6<f64>| (x.transpose() * metric * y)[(0, 0)];
    let mut connection = [[Vector6::zeros(); 6]; 6];
    for a in 0..6 {
        for b in 0..6 {
            let mut lowered = Vector6::zeros();
            for c in 0..6 {
                let ec = Vector6::from_fn(|r, _| if r == c { 1.0 } else { 0.0 });
                let ea = Vector6::from_fn(|r, _| if r == a { 1.0 } else { 0.0 });
                let eb = Vector6::from_fn(|r, _| if r == b { 1.0 } else { 0.0 });
                lowered[c] = g(&bracket[a][b], &ec) - g(&bracket[a][c], &eb) - g(&bracket[b][c], &ea);
            }
            connection[a][b] = 0.5 * metric_inv * lowered;
        }
    }

    let mut tables = StructureTables {
        metric,
        metric_inv,
        j,
        p,
        q,
        bracket,
        connection,
        g_tensor: [[Vector6::zeros(); 6]; 6],
    };
    for a in 0..6 {
        for b in 0..6 {
            let (x, y) = (FrameVector::basis(a), FrameVector::basis(b));
            let jy = tables.apply_j(&y);
            tables.g_tensor[a][b] = (tables.nabla(&x, &jy) - tables.apply_j(&tables.nabla(&x, &y))).0;
        }
    }
    tables
}

fn unit3(i: usize) -> [f64; 3] {
    let mut v = [0.0; 3];
    v[i] = 1.0;
    v
}

fn bilinear(table: &Table, x: &FrameVector, y: &FrameVector) -> FrameVector {
    let mut out = Vector6::zeros();
    for a in 0..6 {
        if x.0[a] == 0.0 {
            continue;
        }
        for b in 0..6 {
            if y.0[b] == 0.0 {
                continue;
            }
            out += table[a][b] * (x.0[a] * y.0[b]);
        }
    }
    FrameVector(out)
}

impl StructureTables {
    pub fn g(&self, x: &FrameVector, y: &FrameVector) -> f64 {
        (x.0.transpose() * self.metric * y.0)[(0, 0)]
    }

    pub fn norm(&self, x: &FrameVector) -> f64 {
        self.g(x, x).max(0.0).sqrt()
    }

    pub fn apply_j(&self, x: &FrameVector) -> FrameVector {
        FrameVector(self.j * x.0)
    }

    pub fn apply_p(&self, x: &FrameVector) -> FrameVector {
        FrameVector(self.p * x.0)
    }

    pub fn apply_q(&self, x: &FrameVector) -> FrameVector {
        FrameVector(self.q * x.0)
    }

    /// Lie bracket of the left-invariant fields with coefficients `x`, `y`.
    pub fn bracket(&self, x: &FrameVector, y: &FrameVector) -> FrameVector {
        bilinear(&self.bracket, x, y)
    }

    /// `∇̃_X Y` for left-invariant `X`, `Y`.
    pub fn nabla(&self, x: &FrameVector, y: &FrameVector) -> FrameVector {
        bilinear(&self.connection, x, y)
    }

    /// `G(X, Y) = (∇̃_X J) Y`.
    pub fn tensor_g(&self, x: &FrameVector, y: &FrameVector) -> FrameVector {
        bilinear(&self.g_tensor, x, y)
    }

    /// `(∇̃_X P) Y`.
    pub fn nabla_p(&self, x: &FrameVector, y: &FrameVector) -> FrameVector {
        self.nabla(x, &self.apply_p(y)) - self.apply_p(&self.nabla(x, y))
    }

    /// `R̃(X,Y)Z = ∇̃_X∇̃_Y Z − ∇̃_Y∇̃_X Z − ∇̃_{[X,Y]} Z` on left-invariant fields.
    pub fn curvature(&self, x: &FrameVector, y: &FrameVector, z: &FrameVector) -> FrameVector {
        self.nabla(x, &self.nabla(y, z)) - self.nabla(y, &self.nabla(x, z)) - self.nabla(&self.bracket(x, y), z)
    }

    /// Closed-form curvature of the nearly Kähler `S³×S³` in terms of `g`, `J`, `P`.
    pub fn curvature_closed_form(&self, x: &FrameVector, y: &FrameVector, z: &FrameVector) -> FrameVector {
        let (jx, jy, jz) = (self.apply_j(x), self.apply_j(y), self.apply_j(z));
        let (px, py) = (self.apply_p(x), self.apply_p(y));
        let (jpx, jpy) = (self.apply_j(&px), self.apply_j(&py));
        let g = |a: &FrameVector, b: &FrameVector| self.g(a, b);
        (*x * g(y, z) - *y * g(x, z)) * (5.0 / 12.0)
            + (jx * g(&jy, z) - jy * g(&jx, z) - jz * (2.0 * g(&jx, y))) * (1.0 / 12.0)
            + (px * g(&py, z) - py * g(&px, z) + jpx * g(&jpy, z) - jpy * g(&jpx, z)) * (1.0 / 3.0)
    }

    /// `|2(∇̃_X P)Y − JG(X,PY) − JPG(X,Y)|_g`.
    pub fn nabla_p_residual(&self, x: &FrameVector, y: &FrameVector) -> f64 {
        let lhs = self.nabla_p(x, y) * 2.0;
        let rhs = self.apply_j(&self.tensor_g(x, &self.apply_p(y))) + self.apply_j(&self.apply_p(&self.tensor_g(x, y)));
        self.norm(&(lhs - rhs))
    }

    /// Largest torsion `∇̃_a b − ∇̃_b a − [a,b]` over frame pairs.
    pub fn torsion_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for a in 0..6 {
            for b in 0..6 {
                let t = self.connection[a][b] - self.connection[b][a] - self.bracket[a][b];
                worst = worst.max(t.amax());
            }
        }
        worst
    }

    /// Largest `g(∇̃_a b, c) + g(b, ∇̃_a c)` over frame triples; vanishes
    /// because frame inner products are constant.
    pub fn metric_compatibility_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for a in 0..6 {
            for b in 0..6 {
                for c in 0..6 {
                    let (xb, xc) = (FrameVector::basis(b), FrameVector::basis(c));
                    let r = self.g(&FrameVector(self.connection[a][b]), &xc)
                        + self.g(&xb, &FrameVector(self.connection[a][c]));
                    worst = worst.max(r.abs());
                }
            }
        }
        worst
    }

    /// Euclidean connection of the round product metric applied to
    /// left-invariant fields: flat `ℝ⁸` derivative projected back to the
    /// tangent space at `at`.
    pub fn euclidean_nabla(&self, at: &AmbientPoint, x: &FrameVector, y: &FrameVector) -> FrameVector {
        // Y = (p y_E, q y_F) is linear in (p, q); its flat derivative along
        // X = (p x_E, q x_F) is (p x_E y_E, q x_F y_F).
        let u = at.p * x.e_part().to_quaternion() * y.e_part().to_quaternion();
        let v = at.q * x.f_part().to_quaternion() * y.f_part().to_quaternion();
        FrameVector::from_tangent(&project_tangent(at, u, v))
    }

    /// `|∇^E_X Y − ∇̃_X Y − ½(JG(X,PY) + JG(Y,PX))|_g` at `at`.
    pub fn euclidean_relation_residual(&self, at: &AmbientPoint, x: &FrameVector, y: &FrameVector) -> f64 {
        let lhs = self.euclidean_nabla(at, x, y);
        let correction =
            self.apply_j(&self.tensor_g(x, &self.apply_p(y))) + self.apply_j(&self.tensor_g(y, &self.apply_p(x)));
        let rhs = self.nabla(x, y) + correction * 0.5;
        self.norm(&(lhs - rhs))
    }

    /// JSON document with every table, matrices row-major and reals as
    /// decimal strings.
    pub fn to_json(&self) -> Value {
        let mat = |m: &Matrix6<f64>| -> Value {
            Value::Array(
                (0..6)
                    .map(|r| Value::Array((0..6).map(|c| Value::String(format!("{}", m[(r, c)]))).collect()))
                    .collect(),
            )
        };
        let table = |t: &Table| -> Value {
            Value::Array(
                t.iter()
                    .map(|row| {
                        Value::Array(
                            row.iter()
                                .map(|v| Value::Array(v.iter().map(|x| Value::String(format!("{x}"))).collect()))
                                .collect(),
                        )
                    })
                    .collect(),
            )
        };
        json!({
            "basis": ["E1", "E2", "E3", "F1", "F2", "F3"],
            "metric": mat(&self.metric),
            "j": mat(&self.j),
            "p": mat(&self.p),
            "q": mat(&self.q),
            "bracket": table(&self.bracket),
            "connection": table(&self.connection),
            "g_tensor": table(&self.g_tensor),
        })
    }
}

/// Expresses `(p u, q v)` for arbitrary quaternions in the frame after
/// projecting to the tangent space.
pub fn frame_from_raw(at: &AmbientPoint, u: Quaternion, v: Quaternion) -> FrameVector {
    FrameVector::from_tangent(&project_tangent(at, u, v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pointwise::{apply_j, apply_p, apply_q, metric_g};
    use crate::seeded_rng;

    fn tables() -> StructureTables {
        build_tables()
    }

    #[test]
    fn table_values() {
        let t = tables();
        let (e1, f1) = (FrameVector::basis(0), FrameVector::basis(3));
        assert!((t.g(&e1, &f1) + 2.0 / 3.0).abs() < 1e-15);
        assert!((t.g(&e1, &e1) - 4.0 / 3.0).abs() < 1e-15);
        assert_eq!(t.apply_p(&FrameVector::basis(1)), FrameVector::basis(4));
        assert!((t.j * t.j + Matrix6::identity()).amax() <= 1e-12);
        assert!((t.p * t.p - Matrix6::identity()).amax() <= 1e-12);
        assert!((t.q * t.q - Matrix6::identity()).amax() <= 1e-12);
        assert!((t.metric - t.metric.transpose()).amax() == 0.0);
        assert!(t.metric.cholesky().is_some());
        assert!((t.metric * t.p - (t.metric * t.p).transpose()).amax() <= 1e-12);
        assert!((t.p * t.j + t.j * t.p).amax() <= 1e-12);
        // J is g-orthogonal
        assert!((t.j.transpose() * t.metric * t.j - t.metric).amax() <= 1e-12);
    }

    #[test]
    fn brackets_match_commutators() {
        let t = tables();
        let e = |i| FrameVector::basis(i);
        assert_eq!(t.bracket(&e(0), &e(1)), e(2) * 2.0);
        assert_eq!(t.bracket(&e(4), &e(5)), e(3) * 2.0);
        assert_eq!(t.bracket(&e(0), &e(3)), FrameVector::zero());
        // [X_u, X_v] at p is the flat derivative difference p(uv − vu)
        let mut rng = seeded_rng(4);
        for _ in 0..20 {
            let at = AmbientPoint::random(&mut rng);
            let (x, y) = (FrameVector::random(&mut rng), FrameVector::random(&mut rng));
            let (xu, yu) = (x.e_part().to_quaternion(), y.e_part().to_quaternion());
            let (xv, yv) = (x.f_part().to_quaternion(), y.f_part().to_quaternion());
            let flat = frame_from_raw(&at, at.p * (xu * yu - yu * xu), at.q * (xv * yv - yv * xv));
            assert!((flat - t.bracket(&x, &y)).max_abs() <= 1e-12);
        }
    }

    #[test]
    fn connection_is_levi_civita() {
        let t = tables();
        assert!(t.torsion_residual() <= 1e-12);
        assert!(t.metric_compatibility_residual() <= 1e-12);
    }

    #[test]
    fn frame_round_trip() {
        let mut rng = seeded_rng(9);
        for _ in 0..50 {
            let at = AmbientPoint::random(&mut rng);
            let x = FrameVector::random(&mut rng);
            let back = FrameVector::from_tangent(&x.to_tangent(&at));
            assert!((back - x).max_abs() <= 1e-12);
        }
    }

    #[test]
    fn agrees_with_pointwise_formulas() {
        let t = tables();
        let mut rng = seeded_rng(10);
        for _ in 0..100 {
            let at = AmbientPoint::random(&mut rng);
            let x = FrameVector::random(&mut rng);
            let y = FrameVector::random(&mut rng);
            let (zx, zy) = (x.to_tangent(&at), y.to_tangent(&at));
            assert!((FrameVector::from_tangent(&apply_j(&zx)) - t.apply_j(&x)).max_abs() <= 1e-10);
            assert!((FrameVector::from_tangent(&apply_p(&zx)) - t.apply_p(&x)).max_abs() <= 1e-10);
            assert!((FrameVector::from_tangent(&apply_q(&zx)) - t.apply_q(&x)).max_abs() <= 1e-10);
            assert!((metric_g(&zx, &zy) - t.g(&x, &y)).abs() <= 1e-10);
        }
    }

    #[test]
    fn g_tensor_identities() {
        let t = tables();
        let mut rng = seeded_rng(12);
        for _ in 0..200 {
            let [x, y, z, w] = [0; 4].map(|_| FrameVector::random(&mut rng));
            assert!(t.norm(&t.tensor_g(&x, &x)) <= 1e-12);
            assert!(t.norm(&(t.tensor_g(&x, &y) + t.tensor_g(&y, &x))) <= 1e-12);
            assert!(t.norm(&(t.tensor_g(&x, &t.apply_j(&y)) + t.apply_j(&t.tensor_g(&x, &y)))) <= 1e-10);
            assert!((t.g(&t.tensor_g(&x, &y), &z) + t.g(&t.tensor_g(&x, &z), &y)).abs() <= 1e-10);
            let lhs = t.g(&t.tensor_g(&x, &y), &t.tensor_g(&z, &w));
            let (jx, jz, jw) = (t.apply_j(&x), t.apply_j(&z), t.apply_j(&w));
            let rhs = (t.g(&x, &z) * t.g(&y, &w) - t.g(&x, &w) * t.g(&y, &z) + t.g(&jx, &z) * t.g(&jw, &y)
                - t.g(&jx, &w) * t.g(&jz, &y))
                / 3.0;
            assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + rhs.abs()), "{lhs} vs {rhs}");
            let pg = t.apply_p(&t.tensor_g(&x, &y)) + t.tensor_g(&t.apply_p(&x), &t.apply_p(&y));
            assert!(t.norm(&pg) <= 1e-10);
            assert!(t.nabla_p_residual(&x, &y) <= 1e-10);
            assert!(t.nabla_p_residual(&x, &x) <= 1e-10);
        }
        for a in 0..6 {
            for b in 0..6 {
                let r = t.nabla_p_residual(&FrameVector::basis(a), &FrameVector::basis(b));
                assert!(r <= 1e-12, "{a} {b} {r}");
            }
        }
    }

    #[test]
    fn curvature_two_routes_agree() {
        let t = tables();
        let mut rng = seeded_rng(13);
        for _ in 0..100 {
            let [x, y, z] = [0; 3].map(|_| FrameVector::random(&mut rng));
            let a = t.curvature(&x, &y, &z);
            let b = t.curvature_closed_form(&x, &y, &z);
            assert!(t.norm(&(a - b)) <= 1e-10, "{}", t.norm(&(a - b)));
            assert!(t.norm(&t.curvature(&x, &x, &z)) <= 1e-12);
        }
    }

    #[test]
    fn euclidean_relation_holds() {
        let t = tables();
        let mut rng = seeded_rng(14);
        for _ in 0..100 {
            let at = AmbientPoint::random(&mut rng);
            let (x, y) = (FrameVector::random(&mut rng), FrameVector::random(&mut rng));
            assert!(t.euclidean_relation_residual(&at, &x, &y) <= 1e-10);
        }
    }

    #[test]
    fn json_dump_has_decimal_strings() {
        let v = tables().to_json();
        assert_eq!(v["metric"][0][3], Value::String(format!("{}", -2.0 / 3.0)));
        assert_eq!(v["p"][3][0], Value::String("1".into()));
        assert_eq!(v["bracket"][0][1][2], Value::String("2".into()));
    }
}
