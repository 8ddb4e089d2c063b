//! Seeded verification suites.
//!
//! Each suite draws `samples` independent random inputs (sample `i` uses
//! [`sample_rng`]`(seed, i)`), evaluates a fixed list of residuals on each and
//! keeps the worst value per check. A check passes when its worst residual is
//! finite and at most its tolerance; a NaN anywhere fails the check without
//! aborting the suite.

use std::time::Instant;

use nalgebra::Vector5;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{GeometryError, Result};
use crate::exec::{map_indexed, Execution};
use crate::frame::{tables, FrameVector};
use crate::hypersurface::{
    analyze_point, closed_form, cluster_sorted, codazzi_residual, gauss_residual, hopf_identity_residual, make_example,
    residuals::orthogonal_to_structure, spectral_report, theta_r_consistency, ChartBase, DomainPoint, Family,
    FamilyParams, Immersion, PXiClass,
};
use crate::isometry::composition_checks;
use crate::pointwise::{apply_j, apply_p, apply_q, apply_q_via_pj, metric_g, AmbientPoint};
use crate::sample_rng;

/// Default sample counts used by the CLI when `--samples` is absent.
pub const DEFAULT_STRUCTURE_SAMPLES: usize = 1000;
pub const DEFAULT_HYPERSURFACE_SAMPLES: usize = 20;
pub const DEFAULT_ISOMETRY_SAMPLES: usize = 100;

/// Half-width of the box of chart parameters sampled by the hypersurface suite.
const DOMAIN_RADIUS: f64 = 0.2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub id: String,
    /// The identity or property being checked.
    pub anchor: String,
    pub samples: usize,
    pub max_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl CheckResult {
    pub fn new(
        id: impl Into<String>,
        anchor: impl Into<String>,
        samples: usize,
        max_residual: f64,
        tolerance: f64,
    ) -> Self {
        Self {
            id: id.into(),
            anchor: anchor.into(),
            samples,
            max_residual,
            tolerance,
            pass: max_residual.is_finite() && max_residual <= tolerance,
        }
    }
}

/// Where a report was produced.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Environment {
    pub crate_version: String,
    pub arch: String,
    pub os: String,
    pub float_model: String,
    pub parallel: bool,
    pub threads: usize,
}

impl Environment {
    pub fn capture(mode: Execution) -> Self {
        Self {
            crate_version: env!("CARGO_PKG_VERSION").to_string(),
            arch: std::env::consts::ARCH.to_string(),
            os: std::env::consts::OS.to_string(),
            float_model: "ieee754-binary64, round-to-nearest-even".to_string(),
            parallel: mode.is_parallel(),
            threads: if mode.is_parallel() { thread_count() } else { 1 },
        }
    }
}

fn thread_count() -> usize {
    #[cfg(feature = "parallel")]
    {
        rayon::current_num_threads()
    }
    #[cfg(not(feature = "parallel"))]
    {
        1
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub checks: Vec<CheckResult>,
    pub duration_ms: f64,
    pub environment: Environment,
}

impl SuiteReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn check(&self, id: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.id == id)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// `max` that keeps NaN.
fn worst(a: f64, b: f64) -> f64 {
    if a.is_nan() || b.is_nan() {
        f64::NAN
    } else {
        a.max(b)
    }
}

/// Column-wise worst over per-sample residual rows.
fn fold_rows(rows: &[Vec<f64>], width: usize) -> Vec<f64> {
    rows.iter().fold(vec![0.0; width], |acc, row| {
        acc.iter().zip(row).map(|(a, b)| worst(*a, *b)).collect()
    })
}

struct CheckDef {
    id: &'static str,
    anchor: &'static str,
    tolerance: f64,
}

const fn check_def(id: &'static str, anchor: &'static str, tolerance: f64) -> CheckDef {
    CheckDef { id, anchor, tolerance }
}

const STRUCTURE_CHECKS: [CheckDef; 11] = [
    check_def("g-antisymmetric", "G(X,Y) + G(Y,X) = 0", 1e-12),
    check_def("g-j-anticommute", "G(X,JY) + JG(X,Y) = 0", 1e-10),
    check_def("g-skew-adjoint", "g(G(X,Y),Z) + g(G(X,Z),Y) = 0", 1e-10),
    check_def(
        "g-inner-product",
        "g(G(X,Y),G(Z,W)) = 1/3[g(X,Z)g(Y,W) - g(X,W)g(Y,Z) + g(JX,Z)g(JW,Y) - g(JX,W)g(JZ,Y)]",
        1e-10,
    ),
    check_def(
        "g-unit-norm",
        "g(G(X,Y),G(X,Y)) = 1/3 for orthonormal X, Y with g(JX,Y) = 0",
        1e-10,
    ),
    check_def("nabla-p", "2(∇̃_X P)Y = JG(X,PY) + JPG(X,Y)", 1e-10),
    check_def("p-g-twist", "PG(X,Y) + G(PX,PY) = 0", 1e-10),
    check_def("q-via-pj", "QZ = (2PJZ - JZ)/√3", 1e-10),
    check_def(
        "euclidean-connection",
        "∇^E_X Y = ∇̃_X Y + 1/2(JG(X,PY) + JG(Y,PX))",
        1e-10,
    ),
    check_def(
        "curvature-closed-form",
        "R̃(X,Y)Z from the connection equals the closed form in g, J, P",
        1e-10,
    ),
    check_def(
        "frame-vs-pointwise",
        "frame tables for g, J, P agree with the quaternion formulas",
        1e-10,
    ),
];

/// Unit vector `g`-orthogonal to both `x` and `Jx`, built from `seed_vec`.
fn orthonormal_partner(x: &FrameVector, seed_vec: &FrameVector) -> FrameVector {
    let t = tables();
    let jx = t.apply_j(x);
    let mut y = *seed_vec;
    for b in [x, &jx] {
        y = y - *b * t.g(&y, b);
    }
    y * (1.0 / t.norm(&y))
}

fn structure_sample(seed: u64, index: usize) -> Vec<f64> {
    let t = tables();
    let mut rng = sample_rng(seed, index as u64);
    let at = AmbientPoint::random(&mut rng);
    let [x, y, z, w] = std::array::from_fn(|_| FrameVector::random(&mut rng));
    let n = |v: &FrameVector| t.norm(v);
    let (jx, jy, jz, jw) = (t.apply_j(&x), t.apply_j(&y), t.apply_j(&z), t.apply_j(&w));
    let gxy = t.tensor_g(&x, &y);

    let antisym = n(&(gxy + t.tensor_g(&y, &x)));
    let j_anti = n(&(t.tensor_g(&x, &jy) + t.apply_j(&gxy)));
    let skew = (t.g(&gxy, &z) + t.g(&t.tensor_g(&x, &z), &y)).abs();
    let g = |a: &FrameVector, b: &FrameVector| t.g(a, b);
    let inner_rhs =
        (g(&x, &z) * g(&y, &w) - g(&x, &w) * g(&y, &z) + g(&jx, &z) * g(&jw, &y) - g(&jx, &w) * g(&jz, &y)) / 3.0;
    let inner = (g(&gxy, &t.tensor_g(&z, &w)) - inner_rhs).abs();

    let xu = x * (1.0 / n(&x));
    let yu = orthonormal_partner(&xu, &y);
    let gu = t.tensor_g(&xu, &yu);
    let unit = (g(&gu, &gu) - 1.0 / 3.0).abs();

    let nabla_p = t.nabla_p_residual(&x, &y);
    let twist = n(&(t.apply_p(&gxy) + t.tensor_g(&t.apply_p(&x), &t.apply_p(&y))));

    let zt = z.to_tangent(&at);
    let q_pj = apply_q(&zt).max_abs_diff(&apply_q_via_pj(&zt));

    let euclid = t.euclidean_relation_residual(&at, &x, &y);
    let curv = n(&(t.curvature(&x, &y, &z) - t.curvature_closed_form(&x, &y, &z)));

    let (xt, yt) = (x.to_tangent(&at), y.to_tangent(&at));
    let frame_j = (FrameVector::from_tangent(&apply_j(&xt)) - jx).max_abs();
    let frame_p = (FrameVector::from_tangent(&apply_p(&xt)) - t.apply_p(&x)).max_abs();
    let frame_g = (metric_g(&xt, &yt) - g(&x, &y)).abs();
    let frame = frame_j.max(frame_p).max(frame_g);

    vec![
        antisym, j_anti, skew, inner, unit, nabla_p, twist, q_pj, euclid, curv, frame,
    ]
}

/// Every identity of the ambient structure on `samples` random points and
/// tangent vectors.
pub fn run_structure_suite(seed: u64, samples: usize) -> Result<SuiteReport> {
    run_structure_suite_with(seed, samples, Execution::default())
}

pub fn run_structure_suite_with(seed: u64, samples: usize, mode: Execution) -> Result<SuiteReport> {
    require_samples(samples)?;
    let start = Instant::now();
    let rows = map_indexed(mode, samples, |i| structure_sample(seed, i));
    let worst = fold_rows(&rows, STRUCTURE_CHECKS.len());
    let checks = STRUCTURE_CHECKS
        .iter()
        .zip(worst)
        .map(|(s, r)| CheckResult::new(s.id, s.anchor, samples, r, s.tolerance))
        .collect();
    Ok(finish("structure", seed, checks, start, mode))
}

fn require_samples(samples: usize) -> Result<()> {
    if samples == 0 {
        return Err(GeometryError::Precondition("samples must be at least 1".into()));
    }
    Ok(())
}

fn finish(suite: &str, seed: u64, checks: Vec<CheckResult>, start: Instant, mode: Execution) -> SuiteReport {
    SuiteReport {
        suite: suite.to_string(),
        seed,
        checks,
        duration_ms: start.elapsed().as_secs_f64() * 1e3,
        environment: Environment::capture(mode),
    }
}

/// The `Pξ` class each family is expected to realise.
pub fn expected_class(family: Family) -> PXiClass {
    match family {
        Family::M1 | Family::M4 => PXiClass::Plus,
        Family::M2 | Family::M5 => PXiClass::Minus,
        Family::M3 | Family::M6 => PXiClass::Reflect,
    }
}

/// A random point of `m`: random chart base, chart parameters in a small box.
pub fn random_surface_point(m: &Immersion, seed: u64, index: usize) -> (Immersion, DomainPoint) {
    let mut rng = sample_rng(seed, index as u64);
    let base = ChartBase::random(&mut rng);
    let u: DomainPoint = std::array::from_fn(|_| rng.gen_range(-DOMAIN_RADIUS..DOMAIN_RADIUS));
    (m.with_base(base), u)
}

fn random_coords(rng: &mut impl Rng) -> Vector5<f64> {
    Vector5::from_fn(|_, _| rng.gen_range(-1.0..1.0))
}

fn hypersurface_checks_for(radius: bool) -> Vec<CheckDef> {
    let mut v = vec![
        check_def("hopf", "AU = αU", 1e-6),
        check_def("alpha", "α = 0", 1e-6),
        check_def(
            "spectrum",
            "principal curvatures equal the closed-form values up to sign",
            1e-6,
        ),
        check_def("multiplicities", "eigenvalue multiplicities match the closed form", 0.0),
        check_def("distribution-dim", "dim 𝔇 = 2", 0.0),
        check_def("holomorphic-p", "η(PX) = 0 for X ⊥ U", 1e-8),
        check_def("pxi-class", "Pξ = aξ + bJξ with the family's (a, b)", 1e-6),
        check_def(
            "trace",
            "|trace A| equals the closed-form mean curvature; zero iff minimal",
            1e-6,
        ),
        check_def("structure-derivative", "∇_X U = φAX - G(X,ξ)", 1e-5),
        check_def("gauss", "Gauss equation for R(X,Y)Z", 1e-3),
        check_def("codazzi", "Codazzi equation for (∇_X A)Y - (∇_Y A)X", 1e-3),
        check_def("hopf-identity", "g((αI - A)G(X,ξ),Y) identity for X, Y ⊥ U", 1e-5),
    ];
    if radius {
        v.push(check_def(
            "theta-radius",
            "r = √3θ/√(1+2θ²) and λ, β in terms of θ",
            1e-6,
        ));
        v.push(check_def("theta-product", "λβ = -1/12", 1e-8));
    }
    v
}

fn hypersurface_sample(m: &Immersion, seed: u64, index: usize, expected: &[f64; 5], pattern: &str) -> Result<Vec<f64>> {
    let (m, u) = random_surface_point(m, seed, index);
    let mut rng = sample_rng(seed ^ 0x5eed_0fc0_ffee, index as u64);
    let data = analyze_point(&m, &u)?;
    let report = spectral_report(&data);
    let class = expected_class(m.family).coefficients().expect("named class");
    let expected_trace = expected.iter().sum::<f64>().abs();

    let (x, y, z) = (
        random_coords(&mut rng),
        random_coords(&mut rng),
        random_coords(&mut rng),
    );
    let (xo, yo) = (orthogonal_to_structure(&data, &x), orthogonal_to_structure(&data, &y));

    let mut row = vec![
        report.hopf_residual,
        report.alpha.abs(),
        closed_form::spectrum_distance(&report.eigenvalues, expected),
        f64::from(u8::from(report.mult_pattern() != pattern)),
        (report.distribution_dim as f64 - 2.0).abs(),
        report.holomorphic_p_defect,
        (report.a - class.0).abs().max((report.b - class.1).abs()).max(report.c),
        (report.trace.abs() - expected_trace).abs(),
        data.structure_derivative_residual(&x),
        gauss_residual(&m, &u, &x, &y, &z)?,
        codazzi_residual(&m, &u, &x, &y)?,
        hopf_identity_residual(&data, &xo, &yo)?,
    ];
    if m.family.is_radius_family() {
        let th = theta_r_consistency(&m, &u)?;
        row.push(th.radius_residual.max(th.curvature_residual));
        row.push(th.computed_product_residual);
    }
    Ok(row)
}

fn expected_pattern(expected: &[f64; 5]) -> String {
    let mut m: Vec<usize> = cluster_sorted(expected).iter().map(|c| c.multiplicity).collect();
    m.sort_unstable();
    m.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
}

fn hypersurface_checks(m: &Immersion, seed: u64, samples: usize, mode: Execution, prefix: &str) -> Vec<CheckResult> {
    let expected = closed_form::expected_spectrum(&m.params);
    let pattern = expected_pattern(&expected);
    let defs = hypersurface_checks_for(m.family.is_radius_family());
    let rows = map_indexed(mode, samples, |i| {
        hypersurface_sample(m, seed, i, &expected, &pattern).unwrap_or_else(|_| vec![f64::NAN; defs.len()])
    });
    let worst = fold_rows(&rows, defs.len());
    defs.iter()
        .zip(worst)
        .map(|(s, r)| CheckResult::new(format!("{prefix}{}", s.id), s.anchor, samples, r, s.tolerance))
        .collect()
}

/// Properties of one example hypersurface at `samples` random points.
pub fn run_hypersurface_suite(family: Family, params: FamilyParams, seed: u64, samples: usize) -> Result<SuiteReport> {
    run_hypersurface_suite_with(family, params, seed, samples, Execution::default())
}

pub fn run_hypersurface_suite_with(
    family: Family,
    params: FamilyParams,
    seed: u64,
    samples: usize,
    mode: Execution,
) -> Result<SuiteReport> {
    let m = make_example(family, params)?;
    require_samples(samples)?;
    let start = Instant::now();
    let checks = hypersurface_checks(&m, seed, samples, mode, "");
    Ok(finish(
        &format!("hypersurface:{family}[{params}]"),
        seed,
        checks,
        start,
        mode,
    ))
}

/// The examples exercised when no family is named: the radius families at
/// `r = 0.6` and the minimal `r = 1`, the torus families at `(0.6, 0.8)`.
pub fn default_examples() -> Vec<(Family, FamilyParams)> {
    let mut v = Vec::new();
    for r in [0.6, 1.0] {
        for f in [Family::M1, Family::M2, Family::M3] {
            v.push((f, FamilyParams::radius(r)));
        }
    }
    for f in [Family::M4, Family::M5, Family::M6] {
        v.push((f, FamilyParams::torus(0.6, 0.8)));
    }
    v
}

/// The hypersurface suite over [`default_examples`]; check ids are prefixed
/// with `family[params]/`.
pub fn run_hypersurface_examples(seed: u64, samples: usize, mode: Execution) -> Result<SuiteReport> {
    require_samples(samples)?;
    let start = Instant::now();
    let mut checks = Vec::new();
    for (family, params) in default_examples() {
        let m = make_example(family, params)?;
        checks.extend(hypersurface_checks(
            &m,
            seed,
            samples,
            mode,
            &format!("{family}[{params}]/"),
        ));
    }
    Ok(finish("hypersurface", seed, checks, start, mode))
}

/// Metric pullback, `J`/`P` relations of the differentials and the point-map
/// composition identities.
pub fn run_isometry_suite(seed: u64, samples: usize) -> Result<SuiteReport> {
    run_isometry_suite_with(seed, samples, Execution::default())
}

pub fn run_isometry_suite_with(seed: u64, samples: usize, mode: Execution) -> Result<SuiteReport> {
    require_samples(samples)?;
    let start = Instant::now();
    let r = composition_checks(seed, samples, mode);
    let c = |id, anchor, value, tol| CheckResult::new(id, anchor, samples, value, tol);
    let checks = vec![
        c(
            "metric-pullback",
            "g(dF Z, dF W) = g(Z, W) for F₁, F₂, F_abc",
            r.metric_pullback,
            1e-10,
        ),
        c("f1-j", "dF₁∘J = -J∘dF₁", r.f1_anticommutes_j, 1e-10),
        c("f1-p", "dF₁∘P = P∘dF₁", r.f1_commutes_p, 1e-10),
        c("f2-j", "dF₂∘J = -J∘dF₂", r.f2_anticommutes_j, 1e-10),
        c("f2-p", "dF₂∘P = (-½P + (√3/2)JP)∘dF₂", r.f2_twists_p, 1e-10),
        c(
            "differential-fd",
            "closed-form differentials match central differences",
            r.differential_fd,
            1e-6,
        ),
        c("f1-involution", "F₁∘F₁ = id", r.f1_involution, 1e-10),
        c("f2-involution", "F₂∘F₂ = id", r.f2_involution, 1e-10),
        c("fabc-f1", "F_abc∘F₁ = F₁∘F_bac", r.fabc_f1, 1e-10),
        c("fabc-f2", "F_abc∘F₂ = F₂∘F_cba", r.fabc_f2, 1e-10),
    ];
    Ok(finish("isometry", seed, checks, start, mode))
}

/// Sample counts for [`run_all`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SampleCounts {
    pub structure: usize,
    pub hypersurface: usize,
    pub isometry: usize,
}

impl Default for SampleCounts {
    fn default() -> Self {
        Self {
            structure: DEFAULT_STRUCTURE_SAMPLES,
            hypersurface: DEFAULT_HYPERSURFACE_SAMPLES,
            isometry: DEFAULT_ISOMETRY_SAMPLES,
        }
    }
}

impl SampleCounts {
    pub fn uniform(n: usize) -> Self {
        Self {
            structure: n,
            hypersurface: n,
            isometry: n,
        }
    }
}

/// All three suites in one report, ids prefixed with the suite name.
pub fn run_all(seed: u64, samples: SampleCounts, mode: Execution) -> Result<SuiteReport> {
    let start = Instant::now();
    let parts = [
        run_structure_suite_with(seed, samples.structure, mode)?,
        run_hypersurface_examples(seed, samples.hypersurface, mode)?,
        run_isometry_suite_with(seed, samples.isometry, mode)?,
    ];
    let checks = parts
        .into_iter()
        .flat_map(|p| {
            let suite = p.suite;
            p.checks.into_iter().map(move |mut c| {
                c.id = format!("{suite}/{}", c.id);
                c
            })
        })
        .collect();
    Ok(finish("all", seed, checks, start, mode))
}
