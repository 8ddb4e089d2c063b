//! The isometries `F₁(p,q) = (q,p)`, `F₂(p,q) = (p̄, qp̄)` and
//! `F_abc(p,q) = (apc̄, bqc̄)` of the nearly Kähler `S³×S³`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::pointwise::{apply_j, apply_p, metric_g, AmbientPoint, TangentVector};
use crate::quat::{sample_unit, Quaternion};
use crate::sample_rng;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum IsometryMap {
    F1,
    F2,
    Fabc {
        a: Quaternion,
        b: Quaternion,
        c: Quaternion,
    },
}

impl IsometryMap {
    pub fn fabc(a: Quaternion, b: Quaternion, c: Quaternion) -> Self {
        Self::Fabc { a, b, c }
    }

    pub fn random_fabc<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Self::fabc(sample_unit(rng), sample_unit(rng), sample_unit(rng))
    }

    pub fn apply(&self, pt: &AmbientPoint) -> AmbientPoint {
        let (p, q) = (pt.p, pt.q);
        match *self {
            Self::F1 => AmbientPoint::new(q, p),
            Self::F2 => AmbientPoint::new(p.conjugate(), q * p.conjugate()),
            Self::Fabc { a, b, c } => AmbientPoint::new(a * p * c.conjugate(), b * q * c.conjugate()),
        }
    }

    /// Pushes `z` forward; the result is anchored at the image point.
    pub fn differential(&self, z: &TangentVector) -> TangentVector {
        let (p, q) = (z.at.p, z.at.q);
        let image = self.apply(&z.at);
        let (u, v) = (z.u, z.v);
        let (du, dv) = match *self {
            Self::F1 => (v, u),
            Self::F2 => {
                let pb = p.conjugate();
                let bar_u = -(pb * u * pb);
                (bar_u, v * pb + q * bar_u)
            }
            Self::Fabc { a, b, c } => (a * u * c.conjugate(), b * v * c.conjugate()),
        };
        TangentVector::new_unchecked(image, du, dv)
    }

    /// Central-difference approximation of the differential along the curve
    /// `t ↦ normalize(p + tU, q + tV)`.
    pub fn differential_fd(&self, z: &TangentVector, step: f64) -> TangentVector {
        let curve = |t: f64| {
            AmbientPoint::new(
                (z.at.p + z.u.scale(t)).normalized().expect("nonzero"),
                (z.at.q + z.v.scale(t)).normalized().expect("nonzero"),
            )
        };
        let plus = self.apply(&curve(step));
        let minus = self.apply(&curve(-step));
        let s = 0.5 / step;
        TangentVector::new_unchecked(
            self.apply(&z.at),
            (plus.p - minus.p).scale(s),
            (plus.q - minus.q).scale(s),
        )
    }
}

/// Worst residuals of the isometry identities over a batch of random samples.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct IsometryReport {
    pub samples: usize,
    /// `|g(dF Z, dF Z') − g(Z, Z')|` over all three maps.
    pub metric_pullback: f64,
    /// `|dF₁(JZ) + J dF₁(Z)|`.
    pub f1_anticommutes_j: f64,
    /// `|dF₁(PZ) − P dF₁(Z)|`.
    pub f1_commutes_p: f64,
    /// `|dF₂(JZ) + J dF₂(Z)|`.
    pub f2_anticommutes_j: f64,
    /// `|dF₂(PZ) − (−½P + (√3/2)JP) dF₂(Z)|`.
    pub f2_twists_p: f64,
    /// Closed-form differential against central differences (step 1e-6).
    pub differential_fd: f64,
    pub f1_involution: f64,
    pub f2_involution: f64,
    /// `F_abc∘F₁` against `F₁∘F_bac`.
    pub fabc_f1: f64,
    /// `F_abc∘F₂` against `F₂∘F_cba`.
    pub fabc_f2: f64,
}

impl IsometryReport {
    pub fn differential_max(&self) -> f64 {
        self.metric_pullback
            .max(self.f1_anticommutes_j)
            .max(self.f1_commutes_p)
            .max(self.f2_anticommutes_j)
            .max(self.f2_twists_p)
    }

    pub fn composition_max(&self) -> f64 {
        self.f1_involution
            .max(self.f2_involution)
            .max(self.fabc_f1)
            .max(self.fabc_f2)
    }

    fn merge(mut self, o: &Self) -> Self {
        self.samples += o.samples;
        self.metric_pullback = self.metric_pullback.max(o.metric_pullback);
        self.f1_anticommutes_j = self.f1_anticommutes_j.max(o.f1_anticommutes_j);
        self.f1_commutes_p = self.f1_commutes_p.max(o.f1_commutes_p);
        self.f2_anticommutes_j = self.f2_anticommutes_j.max(o.f2_anticommutes_j);
        self.f2_twists_p = self.f2_twists_p.max(o.f2_twists_p);
        self.differential_fd = self.differential_fd.max(o.differential_fd);
        self.f1_involution = self.f1_involution.max(o.f1_involution);
        self.f2_involution = self.f2_involution.max(o.f2_involution);
        self.fabc_f1 = self.fabc_f1.max(o.fabc_f1);
        self.fabc_f2 = self.fabc_f2.max(o.fabc_f2);
        self
    }
}

fn g_norm(z: &TangentVector) -> f64 {
    metric_g(z, z).max(0.0).sqrt()
}

/// Evaluates every isometry identity on one random sample.
pub fn check_sample(seed: u64, index: u64) -> IsometryReport {
    let mut rng = sample_rng(seed, index);
    let at = AmbientPoint::random(&mut rng);
    let z = TangentVector::random(at, &mut rng);
    let w = TangentVector::random(at, &mut rng);
    let fabc = IsometryMap::random_fabc(&mut rng);
    let maps = [IsometryMap::F1, IsometryMap::F2, fabc];

    let mut r = IsometryReport {
        samples: 1,
        ..Default::default()
    };
    for map in &maps {
        let (dz, dw) = (map.differential(&z), map.differential(&w));
        r.metric_pullback = r.metric_pullback.max((metric_g(&dz, &dw) - metric_g(&z, &w)).abs());
        let fd = map.differential_fd(&z, 1e-6);
        r.differential_fd = r.differential_fd.max(fd.max_abs_diff(&dz));
    }

    let f1 = IsometryMap::F1;
    let d1z = f1.differential(&z);
    r.f1_anticommutes_j = g_norm(&f1.differential(&apply_j(&z)).add(&apply_j(&d1z)));
    r.f1_commutes_p = g_norm(&f1.differential(&apply_p(&z)).sub(&apply_p(&d1z)));

    let f2 = IsometryMap::F2;
    let d2z = f2.differential(&z);
    r.f2_anticommutes_j = g_norm(&f2.differential(&apply_j(&z)).add(&apply_j(&d2z)));
    let pd = apply_p(&d2z);
    let twisted = pd.scale(-0.5).add(&apply_j(&pd).scale(3f64.sqrt() / 2.0));
    r.f2_twists_p = g_norm(&f2.differential(&apply_p(&z)).sub(&twisted));

    r.f1_involution = f1.apply(&f1.apply(&at)).max_abs_diff(&at);
    r.f2_involution = f2.apply(&f2.apply(&at)).max_abs_diff(&at);
    if let IsometryMap::Fabc { a, b, c } = fabc {
        let lhs = fabc.apply(&f1.apply(&at));
        let rhs = f1.apply(&IsometryMap::fabc(b, a, c).apply(&at));
        r.fabc_f1 = lhs.max_abs_diff(&rhs);
        let lhs = fabc.apply(&f2.apply(&at));
        let rhs = f2.apply(&IsometryMap::fabc(c, b, a).apply(&at));
        r.fabc_f2 = lhs.max_abs_diff(&rhs);
    }
    r
}

/// Runs [`check_sample`] over `samples` seeded draws and keeps the worst
/// residual of each identity.
pub fn composition_checks(seed: u64, samples: usize, mode: crate::exec::Execution) -> IsometryReport {
    crate::exec::map_indexed(mode, samples, |i| check_sample(seed, i as u64))
        .iter()
        .fold(IsometryReport::default(), |acc, r| acc.merge(r))
}
