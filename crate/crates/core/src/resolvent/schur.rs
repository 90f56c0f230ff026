//! Sector sampling and the Schur-test integrals behind the resolvent bound.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::hankel::hankel1;
use super::kernel::principal_sqrt;
use crate::error::{invalid, Error, Result};
use crate::numeric::gauss_legendre_interval;

/// Default lower bound on `|λ|` for sector sweeps.
pub const DEFAULT_KAPPA: f64 = 0.5;
/// Default sector vertex.
pub const DEFAULT_OMEGA: f64 = 1.0;

/// A spectral parameter together with the sector `|arg(λ - ω)| < π - ε` it is
/// tested against.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SectorPoint {
    pub lambda: Complex64,
    pub omega: f64,
    pub eps: f64,
    pub inside: bool,
}

impl SectorPoint {
    pub fn new(lambda: Complex64, omega: f64, eps: f64) -> Result<Self> {
        if !(omega >= 0.0 && omega.is_finite()) {
            return Err(invalid("omega", format!("must be finite and >= 0, got {omega}")));
        }
        if !(eps > 0.0 && eps < std::f64::consts::PI) {
            return Err(invalid("eps", format!("must lie in (0, π), got {eps}")));
        }
        let w = lambda - omega;
        let inside = w != Complex64::new(0.0, 0.0) && w.arg().abs() < std::f64::consts::PI - eps;
        Ok(Self { lambda, omega, eps, inside })
    }

    /// `|λ - ω|`.
    pub fn distance(&self) -> f64 {
        (self.lambda - self.omega).norm()
    }
}

/// `count` points `λ = ω + ρ e^{iφ}` with `|φ| < π - ε`, `log ρ` uniform on
/// `[ln ρ_min, ln ρ_max]` and `|λ| >= κ`.
pub fn sector_samples(
    count: usize,
    omega: f64,
    eps: f64,
    kappa: f64,
    rho_range: (f64, f64),
    seed: u64,
) -> Result<Vec<SectorPoint>> {
    let (lo, hi) = rho_range;
    if !(lo > 0.0 && hi > lo) {
        return Err(invalid("rho_range", format!("need 0 < min < max, got ({lo}, {hi})")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let max_arg = std::f64::consts::PI - eps;
    let mut out = Vec::with_capacity(count);
    let mut guard = 0;
    while out.len() < count {
        guard += 1;
        if guard > 1000 * count.max(1) {
            return Err(invalid("kappa", "no sector points with |λ| >= κ in the requested range"));
        }
        let rho = (lo.ln() + rng.random::<f64>() * (hi.ln() - lo.ln())).exp();
        let phi = (2.0 * rng.random::<f64>() - 1.0) * max_arg * 0.999;
        let lambda = omega + Complex64::from_polar(rho, phi);
        if lambda.norm() < kappa {
            continue;
        }
        out.push(SectorPoint::new(lambda, omega, eps)?);
    }
    Ok(out)
}

/// Row integrals of the weighted resolvent kernel magnitude,
///
/// `I₁ = |λ|^{ν/2} ∫_0^{1/Re√λ} (1+r²)^{|δ|/2} r^{d-1-ν} |H_ν(i√λ r)| dr`
///
/// and `I₂`, the same integrand over `(1/Re√λ, ∞)`, with `ν = (d-2)/2`.
pub fn schur_integrals(point: &SectorPoint, delta: f64, d: usize, kappa: f64) -> Result<(f64, f64)> {
    if d < 2 {
        return Err(invalid("d", format!("dimension must be at least 2, got {d}")));
    }
    if !point.inside {
        return Err(Error::OutsideSector(format!("λ = {} is outside the sector", point.lambda)));
    }
    let lambda = point.lambda;
    if lambda.norm() < kappa {
        return Err(Error::OutsideSector(format!("|λ| = {} is below κ = {kappa}", lambda.norm())));
    }
    let s = principal_sqrt(lambda)?;
    let a = s.re;
    let nu = (d as f64 - 2.0) / 2.0;
    let pre = lambda.norm().powf(nu / 2.0);
    let i = Complex64::i();
    // Substitute r = σ / Re√λ so the split sits at σ = 1 and the tail decays
    // like e^{-σ}.
    let integrand = |sigma: f64| -> Result<f64> {
        let r = sigma / a;
        let h = hankel1(nu, i * s * r)?;
        Ok((1.0 + r * r).powf(delta.abs() / 2.0) * r.powf(d as f64 - 1.0 - nu) * h.norm() / a)
    };
    let mut panels = Vec::new();
    // Geometric grading towards the origin.
    let mut right = 1.0;
    for _ in 0..40 {
        panels.push((right / 2.0, right));
        right /= 2.0;
    }
    let mut i1 = 0.0;
    for &(p, q) in panels.iter().rev() {
        let (x, w) = gauss_legendre_interval(16, p, q);
        for (xi, wi) in x.iter().zip(&w) {
            i1 += wi * integrand(*xi)?;
        }
    }
    let mut i2 = 0.0;
    let mut left: f64 = 1.0;
    while left < 200.0 {
        let width = (0.5 * left).clamp(0.5, 4.0);
        let (x, w) = gauss_legendre_interval(16, left, left + width);
        for (xi, wi) in x.iter().zip(&w) {
            i2 += wi * integrand(*xi)?;
        }
        left += width;
    }
    Ok((pre * i1, pre * i2))
}

/// Summary of a sector sweep.
#[derive(Clone, Debug, Serialize)]
pub struct SectorSweepRow {
    pub lambda: Complex64,
    pub i1: f64,
    pub i2: f64,
    /// `|λ| (I₁ + I₂)`.
    pub scaled: f64,
    /// `(I₁ + I₂) |λ| sin²(ε/2)`; at most `√(2/π)` in `d = 3` with `δ = 0`.
    pub sector_ratio: f64,
}

/// Evaluate the Schur integrals over sector samples.
pub fn sector_sweep(points: &[SectorPoint], delta: f64, d: usize, kappa: f64) -> Result<Vec<SectorSweepRow>> {
    use rayon::prelude::*;
    points
        .par_iter()
        .map(|pt| {
            let (i1, i2) = schur_integrals(pt, delta, d, kappa)?;
            let m = pt.lambda.norm();
            Ok(SectorSweepRow {
                lambda: pt.lambda,
                i1,
                i2,
                scaled: m * (i1 + i2),
                sector_ratio: (i1 + i2) * m * (pt.eps / 2.0).sin().powi(2),
            })
        })
        .collect()
}
