use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Result};
use crate::fft::{self, Wavenumbers};
use crate::numeric::{fixed_sum_by, linear_fit};
use crate::spaces::{asymptotic_norm, bracket, weighted_norm, AsymptoticFunction, NormFamily, NormSpec, RemainderField};

use super::semigroup::{heat_symbol, HeatSemigroup};
use super::ComplexTime;

/// `μ = (N + N* + 2)/2`, the polynomial growth rate of `S(t)` on the
/// asymptotic space.
pub fn growth_exponent_bound(order: usize, n_star: usize) -> f64 {
    (order + n_star + 2) as f64 / 2.0
}

#[derive(Clone, Debug, Serialize)]
pub struct NonsmoothingReport {
    /// Largest change of `a_n`, `a_{n+1}` over all times; zero by construction.
    pub max_drift: f64,
    pub per_time: Vec<(f64, f64)>,
    /// `(k, max_t ‖a_k(t) - b_k‖)` for the higher coefficients.
    pub higher_drift: Vec<(usize, f64)>,
}

/// Check that the two leading coefficients do not move under the flow.
pub fn nonsmoothing_check(v: &AsymptoticFunction, times: &[f64]) -> Result<NonsmoothingReport> {
    let chart = &v.chart;
    let n = chart.start();
    if chart.order() < n + 2 {
        return Err(invalid("N", format!("need N >= n + 2, got N = {}, n = {n}", chart.order())));
    }
    let flow = super::evolve_coefficients(chart);
    let mut per_time = Vec::new();
    let mut higher: Vec<(usize, f64)> = (n + 2..=chart.n_star()).map(|k| (k, 0.0)).collect();
    for &t in times {
        let at = flow.eval(t);
        let mut drift: f64 = 0.0;
        for k in [n, n + 1] {
            let a = at.coeff(k).expect("in range");
            let b = chart.coeff(k).expect("in range").with_l_max(a.l_max());
            for (x, y) in a.coeffs().iter().zip(b.coeffs()) {
                drift = drift.max((x - y).abs());
            }
        }
        per_time.push((t, drift));
        for (k, h) in higher.iter_mut() {
            let a = at.coeff(*k).expect("in range");
            let b = chart.coeff(*k).expect("in range").with_l_max(a.l_max());
            *h = h.max(a.add_scaled(&b, -1.0).l2_norm());
        }
    }
    Ok(NonsmoothingReport {
        max_drift: per_time.iter().map(|p| p.1).fold(0.0, f64::max),
        per_time,
        higher_drift: higher,
    })
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct CompositionErrors {
    /// Largest coefficient difference of the charts.
    pub chart: f64,
    /// Relative `L^2` difference of the remainders.
    pub remainder: f64,
    /// Relative `L^2` difference of chart-plus-remainder on the grid.
    pub composed: f64,
}

fn relative(diff: f64, reference: f64) -> f64 {
    if reference > 0.0 {
        diff / reference
    } else {
        diff
    }
}

/// Compare `S(t1) S(t2) v` with `S(t1 + t2) v`.
pub fn semigroup_property_check(v: &AsymptoticFunction, t1: f64, t2: f64) -> Result<CompositionErrors> {
    let s = HeatSemigroup::new(v)?;
    let inner = s.apply(t2)?;
    let lhs = HeatSemigroup::new(&inner)?.apply(t1)?;
    let rhs = s.apply(t1 + t2)?;
    let mut chart: f64 = 0.0;
    for (a, b) in lhs.chart.coeffs().iter().zip(rhs.chart.coeffs()) {
        for (x, y) in a.coeffs().iter().zip(b.coeffs()) {
            chart = chart.max((x - y).abs());
        }
    }
    let remainder = relative(lhs.remainder.sub(&rhs.remainder).l2_norm(), rhs.remainder.l2_norm());
    let (gl, gr) = (lhs.to_grid(), rhs.to_grid());
    let composed = relative(gl.sub(&gr).l2_norm(), gr.l2_norm());
    Ok(CompositionErrors {
        chart,
        remainder,
        composed,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct GrowthReport {
    pub times: Vec<f64>,
    /// Largest `‖S(t)v‖/‖v‖` over the samples at each time.
    pub ratios: Vec<f64>,
    /// Slope of `ln ratio` against `ln(1 + t)` over the fitted window.
    pub exponent: f64,
    /// `exp(intercept)` of the same fit.
    pub constant: f64,
}

fn norm_of(v: &AsymptoticFunction, spec: &NormSpec) -> Result<f64> {
    match spec.family {
        NormFamily::AAsymptotic => asymptotic_norm(v, spec),
        _ => weighted_norm(&v.remainder, spec),
    }
}

/// Measure `‖S(t)v‖/‖v‖` over `times` and fit the large-time exponent using
/// the times `>= fit_from`.
pub fn growth_bound_harness(
    samples: &[AsymptoticFunction],
    spec: &NormSpec,
    times: &[f64],
    fit_from: f64,
) -> Result<GrowthReport> {
    if samples.is_empty() {
        return Err(invalid("samples", "need at least one sample"));
    }
    let mut ratios = vec![0.0f64; times.len()];
    for v in samples {
        let base = norm_of(v, spec)?;
        if base == 0.0 {
            continue;
        }
        let s = HeatSemigroup::new(v)?;
        for (i, &t) in times.iter().enumerate() {
            let r = norm_of(&s.apply(t)?, spec)? / base;
            ratios[i] = ratios[i].max(r);
        }
    }
    let (x, y): (Vec<f64>, Vec<f64>) = times
        .iter()
        .zip(&ratios)
        .filter(|(t, r)| **t >= fit_from && **r > 0.0)
        .map(|(t, r)| ((1.0 + t).ln(), r.ln()))
        .unzip();
    let (exponent, intercept) = if x.len() >= 2 { linear_fit(&x, &y) } else { (0.0, 0.0) };
    Ok(GrowthReport {
        times: times.to_vec(),
        ratios,
        exponent,
        constant: intercept.exp(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct DerivativeReport {
    pub times: Vec<f64>,
    /// `max_f ‖∇S(t)f‖_{L^p_δ} t^{1/2} (1+t)^{-|δ|/2} / ‖f‖_{L^p_δ}` per time.
    pub scaled: Vec<f64>,
    /// Unscaled `max_f ‖∇S(t)f‖/‖f‖` per time.
    pub ratios: Vec<f64>,
    /// `-slope` of `ln ratio` against `ln t` for `t <= small_t_max`.
    pub small_t_rate: f64,
    /// Largest ratio between the ray `arg z = π/4` and the real axis at the
    /// same modulus; `None` when that ray lies outside the sector.
    pub sector_factor: Option<f64>,
}

fn weighted_lp_complex(grid: &crate::spaces::Grid, data: &[Complex64], p: f64, delta: f64) -> f64 {
    fixed_sum_by(grid.len(), |i| {
        let w = if delta == 0.0 { 1.0 } else { bracket(&grid.point(i)).powf(delta) };
        grid.trapezoid_weight(i) * (w * data[i].norm()).powf(p)
    })
    .powf(1.0 / p)
}

/// `Σ_j ‖∂_j S(z) f‖_{L^p_δ}` from a precomputed spectrum of `f`.
fn gradient_norm(grid: &crate::spaces::Grid, spectrum: &[Complex64], z: Complex64, p: f64, delta: f64) -> f64 {
    let wn = Wavenumbers::new(grid);
    let mut total = 0.0;
    for axis in 0..grid.dimension() {
        let mut g: Vec<Complex64> = spectrum
            .par_iter()
            .enumerate()
            .map(|(i, s)| {
                let idx = grid.unravel(i);
                let a = wn.norm_sq(&idx);
                s * Complex64::new(0.0, wn.derivative_axes[axis][idx[axis]]) * heat_symbol(z, a)
            })
            .collect();
        fft::inverse(&mut g, grid.shape());
        total += weighted_lp_complex(grid, &g, p, delta);
    }
    total
}

/// Smoothing estimate for one spatial derivative of `S(z)`.
pub fn derivative_estimate_harness(
    samples: &[RemainderField],
    delta: f64,
    p: f64,
    times: &[f64],
    small_t_max: f64,
    eps: f64,
) -> Result<DerivativeReport> {
    if samples.is_empty() {
        return Err(invalid("samples", "need at least one sample"));
    }
    let ray = std::f64::consts::FRAC_PI_4;
    let ray_ok = ray <= std::f64::consts::FRAC_PI_2 - eps;
    let mut scaled = vec![0.0f64; times.len()];
    let mut ratios = vec![0.0f64; times.len()];
    let mut sector: f64 = 0.0;
    for f in samples {
        let grid = f.grid();
        let base = crate::spaces::weighted_lp(f, p, delta);
        if base == 0.0 {
            continue;
        }
        let mut spec: Vec<Complex64> = f.data().iter().map(|&v| Complex64::new(v, 0.0)).collect();
        fft::forward(&mut spec, grid.shape());
        for (i, &t) in times.iter().enumerate() {
            ComplexTime::real(t)?;
            let g = gradient_norm(grid, &spec, Complex64::new(t, 0.0), p, delta) / base;
            ratios[i] = ratios[i].max(g);
            scaled[i] = scaled[i].max(g * t.sqrt() * (1.0 + t).powf(-delta.abs() / 2.0));
            if ray_ok {
                let z = ComplexTime::polar(t, ray, eps)?;
                let gz = gradient_norm(grid, &spec, z.value(), p, delta) / base;
                if g > 0.0 {
                    sector = sector.max(gz / g);
                }
            }
        }
    }
    let (x, y): (Vec<f64>, Vec<f64>) = times
        .iter()
        .zip(&ratios)
        .filter(|(t, r)| **t <= small_t_max && **r > 0.0)
        .map(|(t, r)| (t.ln(), r.ln()))
        .unzip();
    let small_t_rate = if x.len() >= 2 { -linear_fit(&x, &y).0 } else { f64::NAN };
    Ok(DerivativeReport {
        times: times.to_vec(),
        scaled,
        ratios,
        small_t_rate,
        sector_factor: ray_ok.then_some(sector),
    })
}
