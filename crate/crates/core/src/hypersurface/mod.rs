//! Hypersurfaces of the nearly Kähler `S³×S³`: the example families and the
//! diagnostics computed on them.

pub mod analysis;
pub mod closed_form;
pub mod immersion;
pub mod residuals;

pub use analysis::{
    analyze_aligned, analyze_point, classify_p_xi, cluster_sorted, spectral_report, EigenCluster,
    HypersurfacePointData, PXiClass, SpectralReport,
};
pub use immersion::{make_example, ChartBase, DomainPoint, Family, FamilyParams, Immersion};
pub use residuals::{
    codazzi_residual, coordinate_surface_curvature, gauss_residual, hopf_identity_residual, sectional_curvature,
    theta_r_consistency, ThetaReport,
};
