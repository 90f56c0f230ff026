//! The heat semigroup on asymptotic function spaces.
//!
//! `S(t) v` splits into three parts: the chart coefficients evolve by an
//! exact polynomial recursion ([`evolve_coefficients`]), the remainder is
//! propagated spectrally ([`heat_apply`]), and the mismatch created by the
//! cutoff and the truncated tail enters as a Duhamel source
//! ([`assemble_source`], [`duhamel_integral`]).

mod coefficients;
mod harness;
mod semigroup;
mod source;

pub use coefficients::{evolve_coefficients, CoefficientFlow};
pub use harness::{
    derivative_estimate_harness, growth_bound_harness, growth_exponent_bound, nonsmoothing_check,
    semigroup_property_check, CompositionErrors, DerivativeReport, GrowthReport, NonsmoothingReport,
};
pub use semigroup::{
    cauchy_riemann_residual, duhamel_integral, duhamel_integral_complex, duhamel_integral_with,
    generator_apply, heat_apply, heat_apply_complex, heat_symbol, phi_function, semigroup_apply,
    semigroup_apply_sector, ComplexAsymptoticFunction, DuhamelMethod, HeatSemigroup,
};
pub use source::{assemble_source, DuhamelSource, MAX_SOURCE_SPACING};

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};

/// A point of the closed sector `{0} ∪ {|arg z| <= π/2 - ε}` with `Re z > 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ComplexTime {
    z: Complex64,
    eps: f64,
}

impl ComplexTime {
    pub fn new(z: Complex64, eps: f64) -> Result<Self> {
        if !(eps > 0.0 && eps < std::f64::consts::FRAC_PI_2) {
            return Err(invalid("eps", format!("sector margin must lie in (0, π/2), got {eps}")));
        }
        if !(z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::NonFinite("complex time"));
        }
        if z == Complex64::new(0.0, 0.0) {
            return Ok(Self { z, eps });
        }
        if z.re <= 0.0 {
            return Err(Error::OutsideSector(format!("Re z = {} must be positive", z.re)));
        }
        if z.arg().abs() > std::f64::consts::FRAC_PI_2 - eps {
            return Err(Error::OutsideSector(format!(
                "|arg z| = {} exceeds π/2 - ε = {}",
                z.arg().abs(),
                std::f64::consts::FRAC_PI_2 - eps
            )));
        }
        Ok(Self { z, eps })
    }

    /// Real time `t >= 0` (sector margin 0.1, irrelevant on the real axis).
    pub fn real(t: f64) -> Result<Self> {
        Self::new(Complex64::new(t, 0.0), 0.1)
    }

    /// `|z| e^{iθ}`.
    pub fn polar(modulus: f64, angle: f64, eps: f64) -> Result<Self> {
        Self::new(Complex64::from_polar(modulus, angle), eps)
    }

    pub fn value(&self) -> Complex64 {
        self.z
    }

    pub fn margin(&self) -> f64 {
        self.eps
    }

    pub fn is_zero(&self) -> bool {
        self.z == Complex64::new(0.0, 0.0)
    }
}
