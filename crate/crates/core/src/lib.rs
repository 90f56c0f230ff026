//! Heat flow on function spaces with spatial asymptotic expansions.
//!
//! A function `v` on `R^d` (`d = 2, 3`) is represented as
//! `χ(r) Σ_{k=n}^{N*} a_k(θ)/r^k + f(x)`: a chart of sphere coefficients
//! glued in by a radial cutoff, plus a rapidly decaying remainder sampled on
//! a box. The heat semigroup acts on the chart by an exact polynomial-in-time
//! recursion and on the remainder by a Fourier multiplier, coupled through a
//! Duhamel source supported near the cutoff annulus.
//!
//! The crate is organised as:
//!
//! * [`spaces`]: grids, charts, cutoffs, weighted norms, file formats.
//! * [`sphere`]: harmonic analysis on `S^{d-1}`.
//! * [`heatflow`]: the semigroup, its generator and estimate harnesses.
//! * [`resolvent`]: Hankel functions, resolvent kernels, sector sweeps.
//! * [`semilinear`]: `u_t = Δu + φ - ψu³`, its equilibria and mild solutions.
//! * [`oracle`]: brute-force references used to validate everything above.

pub mod error;
pub mod fft;
pub mod numeric;
pub mod oracle;
pub mod resolvent;
pub mod semilinear;
pub mod heatflow;
pub mod spaces;
pub mod sphere;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub mod introduction {}
    #[doc = include_str!("../../../book/src/spaces.md")]
    pub mod spaces {}
    #[doc = include_str!("../../../book/src/sphere.md")]
    pub mod sphere {}
    #[doc = include_str!("../../../book/src/heatflow.md")]
    pub mod heatflow {}
    #[doc = include_str!("../../../book/src/resolvent.md")]
    pub mod resolvent {}
    #[doc = include_str!("../../../book/src/semilinear.md")]
    pub mod semilinear {}
    #[doc = include_str!("../../../book/src/verification.md")]
    pub mod verification {}
}
