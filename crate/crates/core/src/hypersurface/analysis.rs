//! Pointwise hypersurface apparatus: unit normal, almost contact structure,
//! shape operator and its spectrum.
//!
//! The shape operator is `AX = −(∇̃_X ξ)ᵀ` with
//! `∇̃_X ξ = ∇^E_X ξ − ½[JG(X,Pξ) + JG(ξ,PX)]`, where `∇^E_X ξ` is the central
//! difference of the ambient normal field along a parameter line, projected
//! to the tangent space of `S³×S³`.

use nalgebra::{Matrix5, SymmetricEigen, Vector5};
use serde::{Deserialize, Serialize};

use crate::error::{GeometryError, Result};
use crate::frame::{frame_from_raw, tables, FrameVector, StructureTables};
use crate::hypersurface::immersion::{DomainPoint, Immersion};
use crate::pointwise::{AmbientPoint, TangentVector};

/// Step for the central differences of `ξ` and `U`.
pub const NORMAL_STEP: f64 = 1e-5;
/// Lower bound on the smallest eigenvalue of the pushforward Gram matrix.
pub const RANK_TOL: f64 = 1e-6;
/// Relative gap under which eigenvalues are clustered together.
pub const CLUSTER_REL_TOL: f64 = 1e-6;
/// Absolute floor of the clustering gap.
pub const CLUSTER_ABS_TOL: f64 = 1e-9;
/// Residual `|Pξ − aξ − bU|_g` under which `dim 𝔇 = 2`.
pub const DISTRIBUTION_TOL: f64 = 1e-6;
/// Tolerance for matching `(a, b)` against the three `Pξ` cases.
pub const PXI_TOL: f64 = 1e-6;

/// Unit normal and frames at one parameter value, before any derivative.
#[derive(Debug, Clone, Copy)]
struct NormalSample {
    point: AmbientPoint,
    coordinate_frame: [FrameVector; 5],
    frame: [FrameVector; 5],
    frame_coeffs: Matrix5<f64>,
    normal: FrameVector,
}

impl NormalSample {
    fn ambient_normal(&self) -> TangentVector {
        self.normal.to_tangent(&self.point)
    }

    fn ambient_structure(&self, t: &StructureTables) -> TangentVector {
        (-t.apply_j(&self.normal)).to_tangent(&self.point)
    }

    fn flip(&mut self) {
        self.normal = -self.normal;
    }
}

fn gram(t: &StructureTables, w: &[FrameVector; 5]) -> Matrix5<f64> {
    Matrix5::from_fn(|i, j| t.g(&w[i], &w[j]))
}

fn normal_sample(m: &Immersion, u: &DomainPoint) -> Result<NormalSample> {
    let t = tables();
    let (point, push) = m.pushforward(u);
    let coordinate_frame = push.map(|v| FrameVector::from_tangent(&v));
    let g = gram(t, &coordinate_frame);
    let smallest = SymmetricEigen::new(g).eigenvalues.min();
    if !(smallest > RANK_TOL) {
        return Err(GeometryError::DegenerateImmersion(format!(
            "pushforward Gram matrix has smallest eigenvalue {smallest:e} at {u:?}"
        )));
    }
    let chol = g
        .cholesky()
        .ok_or_else(|| GeometryError::DegenerateImmersion("pushforward Gram matrix is not positive definite".into()))?;
    let frame_coeffs = chol
        .l()
        .try_inverse()
        .ok_or_else(|| GeometryError::DegenerateImmersion("singular Cholesky factor".into()))?;
    let frame: [FrameVector; 5] = std::array::from_fn(|i| {
        (0..5).fold(FrameVector::zero(), |acc, k| {
            acc + coordinate_frame[k] * frame_coeffs[(i, k)]
        })
    });

    // g-orthogonal complement: the frame basis vector with the largest residual.
    let residual = |v: FrameVector| frame.iter().fold(v, |acc, e| acc - *e * t.g(&acc, e));
    let mut best = FrameVector::zero();
    let mut best_norm = 0.0;
    for a in 0..6 {
        let r = residual(FrameVector::basis(a));
        let n = t.norm(&r);
        if n > best_norm {
            best = r;
            best_norm = n;
        }
    }
    let normal = residual(best);
    let normal = normal * (1.0 / t.norm(&normal));
    Ok(NormalSample {
        point,
        coordinate_frame,
        frame,
        frame_coeffs,
        normal,
    })
}

fn aligned_sample(m: &Immersion, u: &DomainPoint, reference: &TangentVector) -> Result<NormalSample> {
    let mut s = normal_sample(m, u)?;
    if s.ambient_normal().euclidean_dot(reference) < 0.0 {
        s.flip();
    }
    Ok(s)
}

/// Everything the hypersurface structure equations need at one point.
#[derive(Debug, Clone)]
pub struct HypersurfacePointData {
    pub u: DomainPoint,
    pub point: AmbientPoint,
    /// Pushforwards of the coordinate directions `∂₁..∂₅`.
    pub coordinate_frame: [FrameVector; 5],
    /// g-orthonormal tangent frame `eᵢ = Σ_k Cᵢₖ ∂ₖ`.
    pub frame: [FrameVector; 5],
    /// The matrix `C`.
    pub frame_coeffs: Matrix5<f64>,
    /// Unit normal `ξ`.
    pub normal: FrameVector,
    /// Structure vector `U = −Jξ`.
    pub structure: FrameVector,
    pub alpha: f64,
    /// `φ` in the orthonormal frame, `φᵢⱼ = g(eᵢ, J eⱼ)`.
    pub phi: Matrix5<f64>,
    /// `η(eᵢ) = g(eᵢ, U)`.
    pub eta: Vector5<f64>,
    /// Shape operator `g(eᵢ, A eⱼ)` before symmetrization.
    pub shape_raw: Matrix5<f64>,
    pub shape: Matrix5<f64>,
    /// `∇̃_{∂ₖ} ξ`.
    pub nabla_normal: [FrameVector; 5],
    /// `∇̃_{∂ₖ} U`.
    pub nabla_structure: [FrameVector; 5],
    /// `|AU − αU|_g`.
    pub hopf_residual: f64,
    pub symmetry_residual: f64,
}

impl HypersurfacePointData {
    pub fn tables(&self) -> &'static StructureTables {
        tables()
    }

    /// Ambient vector with orthonormal-frame coordinates `x`.
    pub fn tangent(&self, x: &Vector5<f64>) -> FrameVector {
        (0..5).fold(FrameVector::zero(), |acc, i| acc + self.frame[i] * x[i])
    }

    /// Orthonormal-frame coordinates of the tangential part of `v`.
    pub fn coords(&self, v: &FrameVector) -> Vector5<f64> {
        let t = tables();
        Vector5::from_fn(|i, _| t.g(v, &self.frame[i]))
    }

    /// Chart components `X^k` of the tangent vector with frame coordinates `x`.
    pub fn chart_components(&self, x: &Vector5<f64>) -> Vector5<f64> {
        self.frame_coeffs.transpose() * x
    }

    /// `v − g(v, ξ) ξ`.
    pub fn tangential(&self, v: &FrameVector) -> FrameVector {
        *v - self.normal * tables().g(v, &self.normal)
    }

    fn along(&self, fields: &[FrameVector; 5], x: &Vector5<f64>) -> FrameVector {
        let c = self.chart_components(x);
        (0..5).fold(FrameVector::zero(), |acc, k| acc + fields[k] * c[k])
    }

    /// `∇̃_X ξ`.
    pub fn nabla_normal_along(&self, x: &Vector5<f64>) -> FrameVector {
        self.along(&self.nabla_normal, x)
    }

    /// `∇̃_X U`.
    pub fn nabla_structure_along(&self, x: &Vector5<f64>) -> FrameVector {
        self.along(&self.nabla_structure, x)
    }

    /// Frame coordinates of `U`.
    pub fn structure_coords(&self) -> Vector5<f64> {
        self.eta
    }

    /// Worst of `|g(ξ,ξ) − 1|` and `|g(ξ, eᵢ)|`.
    pub fn normal_defect(&self) -> f64 {
        let t = tables();
        let mut worst = (t.g(&self.normal, &self.normal) - 1.0).abs();
        for e in &self.frame {
            worst = worst.max(t.g(&self.normal, e).abs());
        }
        worst
    }

    /// Worst of `|g(U,U) − 1|` and the normal component of `U`.
    pub fn structure_defect(&self) -> f64 {
        let t = tables();
        (t.g(&self.structure, &self.structure) - 1.0)
            .abs()
            .max(t.g(&self.structure, &self.normal).abs())
    }

    /// Worst entry of the almost contact metric identities
    /// `φ² = −I + η⊗U`, `φU = 0`, `φᵀφ = I − η⊗η`, `η∘φ = 0`.
    pub fn almost_contact_residual(&self) -> f64 {
        let id = Matrix5::identity();
        let eta_eta = self.eta * self.eta.transpose();
        let a = (self.phi * self.phi + id - eta_eta).amax();
        let b = (self.phi * self.eta).amax();
        let c = (self.phi.transpose() * self.phi - id + eta_eta).amax();
        let d = (self.eta.transpose() * self.phi).amax();
        let e = (self.phi + self.phi.transpose()).amax();
        a.max(b).max(c).max(d).max(e)
    }

    /// Coefficients `a = g(Pξ,ξ)`, `b = g(Pξ,U)` and the residual norm
    /// `c = |Pξ − aξ − bU|_g`.
    pub fn p_xi_coefficients(&self) -> (f64, f64, f64) {
        let t = tables();
        let pxi = t.apply_p(&self.normal);
        let a = t.g(&pxi, &self.normal);
        let b = t.g(&pxi, &self.structure);
        let rest = pxi - self.normal * a - self.structure * b;
        (a, b, t.norm(&rest))
    }

    /// `sup |η(PX)|` over unit tangent `X ⊥ U`.
    pub fn holomorphic_p_defect(&self) -> f64 {
        let t = tables();
        let pu = t.apply_p(&self.structure);
        let mut c = self.coords(&pu);
        c -= self.eta * self.eta.dot(&c);
        c.norm()
    }

    /// `|∇_X U − φAX + G(X,ξ)|_g` with `∇_X U` the tangential part of the
    /// finite-difference `∇̃_X U`.
    pub fn structure_derivative_residual(&self, x: &Vector5<f64>) -> f64 {
        let t = tables();
        let lhs = self.coords(&self.nabla_structure_along(x));
        let g_x_xi = t.tensor_g(&self.tangent(x), &self.normal);
        let rhs = self.phi * self.shape * x - self.coords(&g_x_xi);
        (lhs - rhs).norm()
    }

    /// Flips the normal orientation.
    pub fn flip(&mut self) {
        self.normal = -self.normal;
        self.structure = -self.structure;
        self.eta = -self.eta;
        self.shape_raw = -self.shape_raw;
        self.shape = -self.shape;
        self.alpha = -self.alpha;
        for v in self.nabla_normal.iter_mut().chain(self.nabla_structure.iter_mut()) {
            *v = -*v;
        }
    }
}

/// Analysis with the normal sign aligned to `reference`, without applying the
/// orientation convention.
pub fn analyze_aligned(
    m: &Immersion,
    u: &DomainPoint,
    reference: Option<&TangentVector>,
) -> Result<HypersurfacePointData> {
    let t = tables();
    let center = match reference {
        Some(r) => aligned_sample(m, u, r)?,
        None => normal_sample(m, u)?,
    };
    let ref_normal = center.ambient_normal();
    let h = NORMAL_STEP;

    let mut nabla_normal = [FrameVector::zero(); 5];
    let mut nabla_structure = [FrameVector::zero(); 5];
    let xi = center.normal;
    let pxi = t.apply_p(&xi);
    let structure = -t.apply_j(&xi);
    let pu = t.apply_p(&structure);
    for k in 0..5 {
        let (mut up, mut um) = (*u, *u);
        up[k] += h;
        um[k] -= h;
        let sp = aligned_sample(m, &up, &ref_normal)?;
        let sm = aligned_sample(m, &um, &ref_normal)?;
        let s = 0.5 / h;

        let (np, nm) = (sp.ambient_normal(), sm.ambient_normal());
        let flat_xi = frame_from_raw(&center.point, (np.u - nm.u).scale(s), (np.v - nm.v).scale(s));
        let (sp_u, sm_u) = (sp.ambient_structure(t), sm.ambient_structure(t));
        let flat_u = frame_from_raw(&center.point, (sp_u.u - sm_u.u).scale(s), (sp_u.v - sm_u.v).scale(s));

        let x = center.coordinate_frame[k];
        let px = t.apply_p(&x);
        let corr_xi = t.apply_j(&t.tensor_g(&x, &pxi)) + t.apply_j(&t.tensor_g(&xi, &px));
        let corr_u = t.apply_j(&t.tensor_g(&x, &pu)) + t.apply_j(&t.tensor_g(&structure, &px));
        nabla_normal[k] = flat_xi - corr_xi * 0.5;
        nabla_structure[k] = flat_u - corr_u * 0.5;
    }

    let frame = center.frame;
    let c = center.frame_coeffs;
    // A eⱼ = −Σₖ Cⱼₖ (∇̃_{∂ₖ} ξ)ᵀ; the tangential projection is implicit in g(eᵢ, ·).
    let shape_raw = Matrix5::from_fn(|i, j| {
        let v = (0..5).fold(FrameVector::zero(), |acc, k| acc + nabla_normal[k] * c[(j, k)]);
        -t.g(&frame[i], &v)
    });
    let shape = (shape_raw + shape_raw.transpose()) * 0.5;
    let symmetry_residual = (shape_raw - shape_raw.transpose()).amax();
    let phi = Matrix5::from_fn(|i, j| t.g(&frame[i], &t.apply_j(&frame[j])));
    let eta = Vector5::from_fn(|i, _| t.g(&frame[i], &structure));
    let au = shape * eta;
    let alpha = eta.dot(&au);
    let hopf_residual = (au - eta * alpha).norm();

    Ok(HypersurfacePointData {
        u: *u,
        point: center.point,
        coordinate_frame: center.coordinate_frame,
        frame,
        frame_coeffs: c,
        normal: xi,
        structure,
        alpha,
        phi,
        eta,
        shape_raw,
        shape,
        nabla_normal,
        nabla_structure,
        hopf_residual,
        symmetry_residual,
    })
}

/// Full point analysis with the deterministic orientation convention: the
/// normal is chosen so that `trace A > 0`; when the trace vanishes (within
/// 1e-9) the first frame coefficient of `ξ` exceeding 1e-9 in magnitude is
/// made positive.
pub fn analyze_point(m: &Immersion, u: &DomainPoint) -> Result<HypersurfacePointData> {
    let mut data = analyze_aligned(m, u, None)?;
    let trace = data.shape.trace();
    let flip = if trace.abs() > 1e-9 {
        trace < 0.0
    } else {
        data.normal.0.iter().find(|c| c.abs() > 1e-9).is_some_and(|c| *c < 0.0)
    };
    if flip {
        data.flip();
    }
    Ok(data)
}

/// A group of numerically equal eigenvalues.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenCluster {
    pub value: f64,
    pub multiplicity: usize,
    /// Index of the first member in the ascending eigenvalue list.
    pub start: usize,
}

/// The three special values of `Pξ` for Hopf hypersurfaces with a
/// `P`-invariant holomorphic distribution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum PXiClass {
    /// `Pξ = ½ξ + (√3/2)Jξ`, i.e. `(a, b) = (½, −√3/2)`.
    Plus,
    /// `Pξ = ½ξ − (√3/2)Jξ`, i.e. `(a, b) = (½, √3/2)`.
    Minus,
    /// `Pξ = −ξ`.
    Reflect,
    Other,
}

impl PXiClass {
    pub fn name(self) -> &'static str {
        match self {
            PXiClass::Plus => "PLUS",
            PXiClass::Minus => "MINUS",
            PXiClass::Reflect => "REFLECT",
            PXiClass::Other => "OTHER",
        }
    }

    /// The ideal `(a, b)` of the class.
    pub fn coefficients(self) -> Option<(f64, f64)> {
        let h = 3f64.sqrt() / 2.0;
        match self {
            PXiClass::Plus => Some((0.5, -h)),
            PXiClass::Minus => Some((0.5, h)),
            PXiClass::Reflect => Some((-1.0, 0.0)),
            PXiClass::Other => None,
        }
    }
}

impl std::fmt::Display for PXiClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralReport {
    /// Principal curvatures in ascending order.
    pub eigenvalues: [f64; 5],
    pub clusters: Vec<EigenCluster>,
    /// Multiplicities in ascending eigenvalue order.
    pub multiplicities: Vec<usize>,
    pub alpha: f64,
    pub hopf_residual: f64,
    pub trace: f64,
    pub mean_curvature: f64,
    pub distribution_dim: usize,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    /// `|g(JX₁, X₂)|` for an orthonormal basis of a 2-dimensional eigenspace.
    pub theta: Option<f64>,
    /// `sup |η(PX)|` over unit `X ⊥ U`.
    pub holomorphic_p_defect: f64,
    /// Set when `α` shares its cluster with another principal curvature.
    pub alpha_coincides: bool,
}

impl SpectralReport {
    /// Multiplicity pattern sorted ascending, e.g. `"1,2,2"`.
    pub fn mult_pattern(&self) -> String {
        let mut m = self.multiplicities.clone();
        m.sort_unstable();
        m.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
    }
}

/// Groups sorted values whose consecutive gaps are below
/// `max(CLUSTER_ABS_TOL, CLUSTER_REL_TOL·max(|a|,|b|))`.
pub fn cluster_sorted(values: &[f64]) -> Vec<EigenCluster> {
    let mut clusters: Vec<EigenCluster> = Vec::new();
    let mut members: Vec<f64> = Vec::new();
    for (i, &v) in values.iter().enumerate() {
        let joins = members
            .last()
            .is_some_and(|&prev| (v - prev).abs() <= CLUSTER_ABS_TOL.max(CLUSTER_REL_TOL * v.abs().max(prev.abs())));
        if !joins && !members.is_empty() {
            let start = i - members.len();
            clusters.push(EigenCluster {
                value: members.iter().sum::<f64>() / members.len() as f64,
                multiplicity: members.len(),
                start,
            });
            members.clear();
        }
        members.push(v);
    }
    if !members.is_empty() {
        clusters.push(EigenCluster {
            value: members.iter().sum::<f64>() / members.len() as f64,
            multiplicity: members.len(),
            start: values.len() - members.len(),
        });
    }
    clusters
}

/// Eigen-decomposition of `A` sorted ascending: values and g-orthonormal
/// eigenvectors in frame coordinates.
pub fn sorted_eigen(shape: &Matrix5<f64>) -> ([f64; 5], [Vector5<f64>; 5]) {
    let eig = SymmetricEigen::new(*shape);
    let mut idx: Vec<usize> = (0..5).collect();
    idx.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = std::array::from_fn(|i| eig.eigenvalues[idx[i]]);
    let vectors = std::array::from_fn(|i| eig.eigenvectors.column(idx[i]).into_owned());
    (values, vectors)
}

pub fn spectral_report(data: &HypersurfacePointData) -> SpectralReport {
    let (eigenvalues, vectors) = sorted_eigen(&data.shape);
    let clusters = cluster_sorted(&eigenvalues);
    let multiplicities = clusters.iter().map(|c| c.multiplicity).collect();
    let (a, b, c) = data.p_xi_coefficients();
    let distribution_dim = if c <= DISTRIBUTION_TOL { 2 } else { 4 };

    let theta = clusters
        .iter()
        .filter(|c| c.multiplicity == 2)
        .max_by(|x, y| x.value.abs().total_cmp(&y.value.abs()))
        .map(|cl| {
            let (x1, x2) = (vectors[cl.start], vectors[cl.start + 1]);
            (x2.transpose() * data.phi * x1)[(0, 0)].abs()
        });

    let alpha_coincides = clusters.iter().any(|cl| {
        cl.multiplicity > 1
            && (cl.value - data.alpha).abs() <= CLUSTER_ABS_TOL.max(CLUSTER_REL_TOL * cl.value.abs()) * 10.0
    });

    let trace = data.shape.trace();
    SpectralReport {
        eigenvalues,
        clusters,
        multiplicities,
        alpha: data.alpha,
        hopf_residual: data.hopf_residual,
        trace,
        mean_curvature: trace / 5.0,
        distribution_dim,
        a,
        b,
        c,
        theta,
        holomorphic_p_defect: data.holomorphic_p_defect(),
        alpha_coincides,
    }
}

/// Matches `(a, b)` against the three special values of `Pξ`.
pub fn classify_p_xi(data: &HypersurfacePointData) -> Result<PXiClass> {
    let (a, b, c) = data.p_xi_coefficients();
    if c > DISTRIBUTION_TOL {
        return Err(GeometryError::NotApplicable(format!(
            "dim 𝔇 = 4 (|Pξ − aξ − bU| = {c:e}); the holomorphic distribution is not P-invariant"
        )));
    }
    Ok(classify_coefficients(a, b))
}

pub fn classify_coefficients(a: f64, b: f64) -> PXiClass {
    [PXiClass::Plus, PXiClass::Minus, PXiClass::Reflect]
        .into_iter()
        .find(|cls| {
            let (ea, eb) = cls.coefficients().expect("named class");
            (a - ea).abs() <= PXI_TOL && (b - eb).abs() <= PXI_TOL
        })
        .unwrap_or(PXiClass::Other)
}
