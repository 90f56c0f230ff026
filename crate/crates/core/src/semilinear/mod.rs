//! The semilinear problem `u_t = Δu + φ - ψu³` with `ψ >= 0` in `R³`:
//! equilibria `Δu = ψu³ - φ` by Newton–Krylov in the `n = 1` asymptotic
//! space, their multipole coefficients, the time flow, Picard iteration of
//! the mild formulation and genericity statistics.

mod checks;
mod equilibrium;
mod flow;
mod genericity;
mod krylov;
mod multipole;
mod picard;
mod problem;

pub use checks::{max_principle_checks, max_principle_checks_with, MaxPrincipleReport, SPHERE_MAX_SLACK};
pub use equilibrium::{
    equilibrium_residual, equilibrium_solve, equilibrium_solve_with, linearization_check, Decomposition,
    EquilibriumResult, EquilibriumSummary, ExtendedInverse, LinearizationReport,
};
pub use flow::{flow, flow_with, phi1_apply, semilinear_step, FlowMonitor, FlowOptions, FlowResult};
pub use genericity::{genericity_sweep, random_perturbation, GenericityOptions, GenericityStats};
pub use krylov::{gmres, KrylovStats};
pub use multipole::{
    chart_from_moments, chart_from_modes, eigenfunction_check, multipole_extract, multipole_extract_with_noise,
    solid_moments, MultipoleReport, PurityEntry,
};
pub use picard::{picard_iterate, picard_iterate_weights, PicardRun, FACTOR_WINDOW};
pub use problem::{semilinear_cutoff, SemilinearProblem, Tolerances, BOUNDARY_TOLERANCE};
