//! Residuals of the hypersurface structure equations on the examples.
//!
//! The intrinsic side of the Gauss and Codazzi equations is computed in chart
//! coordinates from the pulled-back metric alone: Christoffel symbols from
//! central differences of the metric, curvature from central differences of
//! the Christoffel symbols. The extrinsic side uses the point data from
//! [`analyze_point`].

use nalgebra::{DMatrix, Matrix5, Vector5};
use serde::{Deserialize, Serialize};

use crate::error::{GeometryError, Result};
use crate::frame::{tables, FrameVector};
use crate::hypersurface::analysis::{analyze_aligned, analyze_point, spectral_report, HypersurfacePointData};
use crate::hypersurface::closed_form::{radius_from_theta, theta_curvatures};
use crate::hypersurface::immersion::{DomainPoint, FamilyParams, Immersion};

/// Step of the second-level differences inside the Gauss and Codazzi residuals.
pub const SECOND_STEP: f64 = 1e-4;
/// Bound on `|η(X)|` for arguments of the Hopf identity.
pub const ETA_TOL: f64 = 1e-8;
/// Bound on the Hopf residual required by the Hopf identity.
pub const HOPF_TOL: f64 = 1e-6;

/// Pulled-back metric `g(f_*∂ᵢ, f_*∂ⱼ)` restricted to `coords`.
fn chart_metric(m: &Immersion, u: &DomainPoint, coords: &[usize]) -> DMatrix<f64> {
    let t = tables();
    let (_, push) = m.pushforward(u);
    let w: Vec<FrameVector> = coords.iter().map(|&k| FrameVector::from_tangent(&push[k])).collect();
    DMatrix::from_fn(coords.len(), coords.len(), |i, j| t.g(&w[i], &w[j]))
}

fn offset(u: &DomainPoint, k: usize, h: f64) -> DomainPoint {
    let mut v = *u;
    v[k] += h;
    v
}

/// Christoffel symbols `Γˡᵢⱼ`, stored as `gamma[l][i][j]`.
type Christoffel = Vec<Vec<Vec<f64>>>;

fn christoffel(m: &Immersion, u: &DomainPoint, coords: &[usize], h: f64) -> Result<Christoffel> {
    let n = coords.len();
    let g = chart_metric(m, u, coords);
    let ginv = g
        .try_inverse()
        .ok_or_else(|| GeometryError::DegenerateImmersion("singular chart metric".into()))?;
    let dg: Vec<DMatrix<f64>> = coords
        .iter()
        .map(|&k| (chart_metric(m, &offset(u, k, h), coords) - chart_metric(m, &offset(u, k, -h), coords)) * (0.5 / h))
        .collect();
    let mut gamma = vec![vec![vec![0.0; n]; n]; n];
    for l in 0..n {
        for i in 0..n {
            for j in 0..n {
                let mut s = 0.0;
                for mm in 0..n {
                    s += ginv[(l, mm)] * (dg[i][(mm, j)] + dg[j][(mm, i)] - dg[mm][(i, j)]);
                }
                gamma[l][i][j] = 0.5 * s;
            }
        }
    }
    Ok(gamma)
}

/// Intrinsic curvature `R(∂ᵢ,∂ⱼ)∂ₖ = Σₗ Rˡᵢⱼₖ ∂ₗ` of the submanifold swept by
/// the chart coordinates `coords` (all five for the hypersurface itself),
/// stored as `r[l][i][j][k]`.
pub fn intrinsic_curvature(m: &Immersion, u: &DomainPoint, coords: &[usize]) -> Result<Vec<Vec<Vec<Vec<f64>>>>> {
    let n = coords.len();
    let h = SECOND_STEP;
    let gamma = christoffel(m, u, coords, h)?;
    let mut dgamma = Vec::with_capacity(n);
    for &k in coords {
        let plus = christoffel(m, &offset(u, k, h), coords, h)?;
        let minus = christoffel(m, &offset(u, k, -h), coords, h)?;
        let mut d = vec![vec![vec![0.0; n]; n]; n];
        for l in 0..n {
            for i in 0..n {
                for j in 0..n {
                    d[l][i][j] = (plus[l][i][j] - minus[l][i][j]) * (0.5 / h);
                }
            }
        }
        dgamma.push(d);
    }
    let mut r = vec![vec![vec![vec![0.0; n]; n]; n]; n];
    for l in 0..n {
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let mut s = dgamma[i][l][j][k] - dgamma[j][l][i][k];
                    for mm in 0..n {
                        s += gamma[mm][j][k] * gamma[l][i][mm] - gamma[mm][i][k] * gamma[l][j][mm];
                    }
                    r[l][i][j][k] = s;
                }
            }
        }
    }
    Ok(r)
}

fn contract(r: &[Vec<Vec<Vec<f64>>>], x: &[f64], y: &[f64], z: &[f64]) -> Vec<f64> {
    let n = x.len();
    (0..n)
        .map(|l| {
            let mut s = 0.0;
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        s += r[l][i][j][k] * x[i] * y[j] * z[k];
                    }
                }
            }
            s
        })
        .collect()
}

/// Frame coordinates of the tangent vector with chart components `v`.
fn chart_to_frame(data: &HypersurfacePointData, v: &Vector5<f64>) -> Vector5<f64> {
    let amb = (0..5).fold(FrameVector::zero(), |acc, k| acc + data.coordinate_frame[k] * v[k]);
    data.coords(&amb)
}

/// Intrinsic `R(X,Y)Z` in frame coordinates.
pub fn intrinsic_rxyz(
    m: &Immersion,
    data: &HypersurfacePointData,
    x: &Vector5<f64>,
    y: &Vector5<f64>,
    z: &Vector5<f64>,
) -> Result<Vector5<f64>> {
    let all = [0, 1, 2, 3, 4];
    let r = intrinsic_curvature(m, &data.u, &all)?;
    let (xc, yc, zc) = (
        data.chart_components(x),
        data.chart_components(y),
        data.chart_components(z),
    );
    let out = contract(&r, xc.as_slice(), yc.as_slice(), zc.as_slice());
    Ok(chart_to_frame(data, &Vector5::from_column_slice(&out)))
}

/// Right-hand side of the Gauss equation in frame coordinates.
pub fn gauss_rhs(data: &HypersurfacePointData, x: &Vector5<f64>, y: &Vector5<f64>, z: &Vector5<f64>) -> Vector5<f64> {
    let t = tables();
    let (xa, ya, za) = (data.tangent(x), data.tangent(y), data.tangent(z));
    let g = |a: &FrameVector, b: &FrameVector| t.g(a, b);
    let (jx, jy) = (t.apply_j(&xa), t.apply_j(&ya));
    let (px, py) = (t.apply_p(&xa), t.apply_p(&ya));
    let (jpx, jpy) = (t.apply_j(&px), t.apply_j(&py));
    let phi = &data.phi;
    let a = &data.shape;
    let c = |v: &FrameVector| data.coords(v);

    let mut out = (x * g(&ya, &za) - y * g(&xa, &za)) * (5.0 / 12.0);
    out += (phi * x * g(&jy, &za) - phi * y * g(&jx, &za) - phi * z * (2.0 * g(&jx, &ya))) / 12.0;
    out += (c(&px) * g(&py, &za) - c(&py) * g(&px, &za) + c(&jpx) * g(&jpy, &za) - c(&jpy) * g(&jpx, &za)) / 3.0;
    out += a * x * (a * z).dot(y) - a * y * (a * z).dot(x);
    out
}

/// `|R(X,Y)Z − RHS|_g` for the Gauss equation, with `R` the intrinsic
/// curvature from the pulled-back metric. Arguments are frame coordinates.
pub fn gauss_residual(
    m: &Immersion,
    u: &DomainPoint,
    x: &Vector5<f64>,
    y: &Vector5<f64>,
    z: &Vector5<f64>,
) -> Result<f64> {
    let data = analyze_point(m, u)?;
    let lhs = intrinsic_rxyz(m, &data, x, y, z)?;
    Ok((lhs - gauss_rhs(&data, x, y, z)).norm())
}

/// Sectional curvature of the hypersurface on the plane of `x`, `y`.
pub fn sectional_curvature(m: &Immersion, u: &DomainPoint, x: &Vector5<f64>, y: &Vector5<f64>) -> Result<f64> {
    let data = analyze_point(m, u)?;
    let ryy = intrinsic_rxyz(m, &data, x, y, y)?;
    let denom = x.norm_squared() * y.norm_squared() - x.dot(y).powi(2);
    Ok(ryy.dot(x) / denom)
}

/// Gaussian curvature of the surface swept by the two chart coordinates
/// `coords` with everything else held fixed, from its own induced metric.
pub fn coordinate_surface_curvature(m: &Immersion, u: &DomainPoint, coords: [usize; 2]) -> Result<f64> {
    let r = intrinsic_curvature(m, u, &coords)?;
    let g = chart_metric(m, u, &coords);
    // R₁₂₂₁ = g(R(∂₁,∂₂)∂₂, ∂₁)
    let r1221: f64 = (0..2).map(|l| r[l][0][1][1] * g[(l, 0)]).sum();
    Ok(r1221 / g.determinant())
}

/// Shape operator as a `(1,1)` tensor in chart components: `C S C^{-T}`
/// transposed into `Aᶦₖ` with `A∂ₖ = Σᵢ Aᶦₖ ∂ᵢ`.
fn chart_shape(data: &HypersurfacePointData) -> Result<Matrix5<f64>> {
    let c = data.frame_coeffs;
    let cinv_t = c
        .transpose()
        .try_inverse()
        .ok_or_else(|| GeometryError::DegenerateImmersion("singular frame matrix".into()))?;
    Ok(c.transpose() * data.shape * cinv_t)
}

/// Right-hand side of the Codazzi equation in frame coordinates.
pub fn codazzi_rhs(data: &HypersurfacePointData, x: &Vector5<f64>, y: &Vector5<f64>) -> Vector5<f64> {
    let t = tables();
    let (xa, ya) = (data.tangent(x), data.tangent(y));
    let (px, py) = (t.apply_p(&xa), t.apply_p(&ya));
    let (jpx, jpy) = (t.apply_j(&px), t.apply_j(&py));
    let eta = &data.eta;
    let (xi, u) = (data.normal, data.structure);
    let c = |v: &FrameVector| data.coords(v);
    let mut out =
        (data.phi * y * eta.dot(x) - data.phi * x * eta.dot(y) - eta * (2.0 * t.g(&t.apply_j(&xa), &ya))) / 12.0;
    out += (c(&py) * t.g(&px, &xi) - c(&px) * t.g(&py, &xi) + c(&jpy) * t.g(&px, &u) - c(&jpx) * t.g(&py, &u)) / 3.0;
    out
}

/// `|(∇_X A)Y − (∇_Y A)X − RHS|_g`; `∇A` from central differences of the
/// chart shape tensor plus Christoffel terms.
pub fn codazzi_residual(m: &Immersion, u: &DomainPoint, x: &Vector5<f64>, y: &Vector5<f64>) -> Result<f64> {
    let data = analyze_point(m, u)?;
    if (x - y).amax() == 0.0 {
        return Ok(0.0);
    }
    let h = SECOND_STEP;
    let reference = data.normal.to_tangent(&data.point);
    let all = [0, 1, 2, 3, 4];
    let gamma = christoffel(m, u, &all, h)?;
    let a0 = chart_shape(&data)?;
    let mut da = Vec::with_capacity(5);
    for k in 0..5 {
        let plus = chart_shape(&analyze_aligned(m, &offset(u, k, h), Some(&reference))?)?;
        let minus = chart_shape(&analyze_aligned(m, &offset(u, k, -h), Some(&reference))?)?;
        da.push((plus - minus) * (0.5 / h));
    }
    // (∇ₘA)ᶦₖ = ∂ₘAᶦₖ + Γᶦₘₗ Aˡₖ − Γˡₘₖ Aᶦₗ
    let nabla_a = |mm: usize| -> Matrix5<f64> {
        Matrix5::from_fn(|i, k| {
            let mut s = da[mm][(i, k)];
            for l in 0..5 {
                s += gamma[i][mm][l] * a0[(l, k)] - gamma[l][mm][k] * a0[(i, l)];
            }
            s
        })
    };
    let (xc, yc) = (data.chart_components(x), data.chart_components(y));
    let mut lhs = Vector5::zeros();
    for mm in 0..5 {
        let na = nabla_a(mm);
        lhs += na * yc * xc[mm] - na * xc * yc[mm];
    }
    let lhs = chart_to_frame(&data, &lhs);
    Ok((lhs - codazzi_rhs(&data, x, y)).norm())
}

/// Both sides of the Hopf identity for `X, Y ⊥ U`.
pub fn hopf_identity_sides(data: &HypersurfacePointData, x: &Vector5<f64>, y: &Vector5<f64>) -> Result<(f64, f64)> {
    if data.hopf_residual > HOPF_TOL {
        return Err(GeometryError::Precondition(format!(
            "point is not Hopf (|AU − αU| = {:e})",
            data.hopf_residual
        )));
    }
    let (ex, ey) = (data.eta.dot(x), data.eta.dot(y));
    if ex.abs() > ETA_TOL || ey.abs() > ETA_TOL {
        return Err(GeometryError::Precondition(format!(
            "arguments must be orthogonal to U (η(X) = {ex:e}, η(Y) = {ey:e})"
        )));
    }
    let t = tables();
    let (xa, ya) = (data.tangent(x), data.tangent(y));
    let (xi, u) = (data.normal, data.structure);
    let (px, py) = (t.apply_p(&xa), t.apply_p(&ya));
    let phi = &data.phi;
    let a = &data.shape;
    let alpha = data.alpha;
    let lhs = (phi * x).dot(y) / 6.0 - 2.0 / 3.0 * (t.g(&px, &xi) * t.g(&py, &u) - t.g(&px, &u) * t.g(&py, &xi));

    let alpha_minus_a = Matrix5::identity() * alpha - a;
    let g_x_xi = data.coords(&t.tensor_g(&xa, &xi));
    let shifted = data.tangent(&(alpha_minus_a * x));
    let g_shift_xi = data.coords(&t.tensor_g(&shifted, &xi));
    let rhs = (alpha_minus_a * g_x_xi).dot(y) + g_shift_xi.dot(y) - alpha * ((a * phi + phi * a) * x).dot(y)
        + 2.0 * (a * phi * a * x).dot(y);
    Ok((lhs, rhs))
}

pub fn hopf_identity_residual(data: &HypersurfacePointData, x: &Vector5<f64>, y: &Vector5<f64>) -> Result<f64> {
    let (lhs, rhs) = hopf_identity_sides(data, x, y)?;
    Ok((lhs - rhs).abs())
}

/// Projects frame coordinates onto `{U}^⊥`.
pub fn orthogonal_to_structure(data: &HypersurfacePointData, x: &Vector5<f64>) -> Vector5<f64> {
    x - data.eta * data.eta.dot(x)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThetaReport {
    pub theta: f64,
    /// `|r − √3θ/√(1+2θ²)|`.
    pub radius_residual: f64,
    /// Set distance between `{|λ|, |β|}` and the values predicted by `θ`.
    pub curvature_residual: f64,
    /// `|λβ + 1/12|` for the `θ`-predicted pair.
    pub product_residual: f64,
    /// `|λβ + 1/12|` for the computed pair.
    pub computed_product_residual: f64,
}

/// Recovers `θ` from the computed spectrum of a radius family and checks it
/// against `r` and the `θ`-form of the principal curvatures.
pub fn theta_r_consistency(m: &Immersion, u: &DomainPoint) -> Result<ThetaReport> {
    let r = match m.params {
        FamilyParams::Radius { r } => r,
        FamilyParams::Torus { .. } => {
            return Err(GeometryError::Domain(
                "θ–r relation applies to the radius families".into(),
            ))
        }
    };
    let data = analyze_point(m, u)?;
    let report = spectral_report(&data);
    let theta = report.theta.ok_or_else(|| {
        GeometryError::DegenerateEigenspace(format!(
            "no 2-dimensional eigenspace (multiplicities {:?})",
            report.multiplicities
        ))
    })?;
    let pairs: Vec<f64> = report
        .clusters
        .iter()
        .filter(|c| c.multiplicity == 2)
        .map(|c| c.value)
        .collect();
    if pairs.len() != 2 {
        return Err(GeometryError::DegenerateEigenspace(format!(
            "expected two 2-dimensional eigenspaces, found {}",
            pairs.len()
        )));
    }
    let (pl, pb) = theta_curvatures(theta);
    let mut predicted = [pl.abs(), pb.abs()];
    let mut computed = [pairs[0].abs(), pairs[1].abs()];
    predicted.sort_by(f64::total_cmp);
    computed.sort_by(f64::total_cmp);
    let curvature_residual = (predicted[0] - computed[0])
        .abs()
        .max((predicted[1] - computed[1]).abs());
    Ok(ThetaReport {
        theta,
        radius_residual: (r - radius_from_theta(theta)).abs(),
        curvature_residual,
        product_residual: (pl * pb + 1.0 / 12.0).abs(),
        computed_product_residual: (pairs[0] * pairs[1] + 1.0 / 12.0).abs(),
    })
}
