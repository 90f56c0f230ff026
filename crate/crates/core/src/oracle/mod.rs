//! Brute-force references. Nothing here calls into the spectral, sphere or
//! stencil code of the primary modules: quadrature rules, stencils and the
//! low-degree harmonics are all written out independently.

mod convolve;
mod fd;
mod harmonics;
mod newton_potential;

pub use convolve::{gaussian_convolve, gaussian_convolve_at};
pub use fd::{fd_gradient, fd_laplacian, l_delta_apply, l_delta_conjugation_check};
pub use harmonics::{far_field_fit, real_harmonic};
pub use newton_potential::{newtonian_potential, newtonian_potential_at, SELF_CELL_INTEGRAL};

/// 8-point Gauss–Legendre rule on [-1, 1].
pub(crate) const GL8_NODES: [f64; 8] = [
    -0.960_289_856_497_536_3,
    -0.796_666_477_413_626_7,
    -0.525_532_409_916_329,
    -0.183_434_642_495_649_8,
    0.183_434_642_495_649_8,
    0.525_532_409_916_329,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
pub(crate) const GL8_WEIGHTS: [f64; 8] = [
    0.101_228_536_290_376_3,
    0.222_381_034_453_374_5,
    0.313_706_645_877_887_3,
    0.362_683_783_378_362,
    0.362_683_783_378_362,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

/// Composite 8-point rule on `[a, b]` with `panels` panels.
pub(crate) fn composite_gl8(a: f64, b: f64, panels: usize) -> Vec<(f64, f64)> {
    let w = (b - a) / panels as f64;
    let mut out = Vec::with_capacity(8 * panels);
    for p in 0..panels {
        let mid = a + (p as f64 + 0.5) * w;
        for (x, wt) in GL8_NODES.iter().zip(GL8_WEIGHTS) {
            out.push((mid + 0.5 * w * x, 0.5 * w * wt));
        }
    }
    out
}
