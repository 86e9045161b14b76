//! Invariant measures, POV measures and inferred distributions on the
//! parameter spaces of the two coherent-state families.

pub mod distribution;
pub mod pov;
pub mod quadrature;

pub use distribution::{
    analytic_binomial, analytic_poisson, credible_interval, inferred_density_binomial,
    inferred_density_poisson, lambda_grid, p_grid, InferredDistribution, Parameter, Source,
    DEFAULT_LAMBDA_POINTS, DEFAULT_P_POINTS,
};
pub use pov::{
    azimuthal_spread, coherent_transform, infer_via_pov, resolution_of_identity_check,
    resolution_of_identity_check_on, CoherentFamily, CoherentTransform,
};
pub use quadrature::{
    gauss_legendre, minimal_sphere_orders, plane_quadrature, sphere_quadrature, Domain, Node,
    QuadratureRule,
};

/// Radial cutoff `√λ_max + 8` for a plane rule covering a λ grid.
pub fn default_radial_cutoff(lambda_max: f64) -> f64 {
    lambda_max.max(0.0).sqrt() + 8.0
}
