//! The resolvent `R(λ) = (λ - Δ)^{-1}`: Hankel functions, integral kernels,
//! spectral application and Schur-test integrals over sectors.

mod hankel;
mod kernel;
mod schur;
mod spectral;

pub use hankel::{
    bessel_j_series, bessel_y_series, gamma, hankel1, hankel1_asymptotic, hankel1_half_integer, hankel1_series,
    CROSSOVER,
};
pub use kernel::{principal_sqrt, resolvent_kernel, resolvent_kernel_d3, resolvent_kernel_hankel};
pub use schur::{
    schur_integrals, sector_samples, sector_sweep, SectorPoint, SectorSweepRow, DEFAULT_KAPPA, DEFAULT_OMEGA,
};
pub use spectral::{resolvent_apply, resolvent_apply_kernel, resolvent_identity_residual, weighted_lp_complex};
