use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{invalid, Result};
use crate::fft::{self, Wavenumbers};
use crate::numeric::gauss_legendre_interval;
use crate::spaces::{AsymptoticChart, AsymptoticFunction, ComplexField, CutoffSpec, RemainderField};

use super::coefficients::{evolve_coefficients, CoefficientFlow};
use super::source::{assemble_source, DuhamelSource};
use super::ComplexTime;

/// Heat multiplier `exp(-z a)` at `a = |ξ|^2`.
#[inline]
pub fn heat_symbol(z: Complex64, a: f64) -> Complex64 {
    (-z * a).exp()
}

/// `S(t) f` for real `t >= 0` as a periodic Fourier multiplier.
pub fn heat_apply(f: &RemainderField, t: f64) -> Result<RemainderField> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(invalid("t", format!("heat flow needs t >= 0, got {t}")));
    }
    if t == 0.0 {
        return Ok(f.clone());
    }
    Ok(fft::radial_multiplier_real(f, |a| (-t * a).exp()))
}

/// `S(z) f` for complex time in a closed subsector.
pub fn heat_apply_complex(f: &ComplexField, z: ComplexTime) -> ComplexField {
    if z.is_zero() {
        return f.clone();
    }
    let zz = z.value();
    fft::radial_multiplier_complex(f, |a| heat_symbol(zz, a))
}

/// `φ_k(x) = Σ_{i≥0} x^i / (i+k)!`, the entire functions of exponential
/// integrators (`φ_0 = e^x`, `φ_{k+1}(x) = (φ_k(x) - 1/k!)/x`).
pub fn phi_function(k: usize, x: Complex64) -> Complex64 {
    if x.norm() < 2.0 {
        let mut term = Complex64::new(1.0 / factorial(k), 0.0);
        let mut sum = term;
        for i in 1..60 {
            term *= x / (i + k) as f64;
            sum += term;
            if term.norm() < 1e-18 * sum.norm() {
                break;
            }
        }
        sum
    } else {
        let mut phi = x.exp();
        for j in 0..k {
            phi = (phi - 1.0 / factorial(j)) / x;
        }
        phi
    }
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// How the Duhamel integral `∫_0^t S(t-s) h(s) ds` is evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DuhamelMethod {
    /// Mode-wise closed form for polynomial sources via φ-functions.
    Exact,
    /// Gauss–Legendre in `s` with the given node count.
    GaussLegendre(usize),
}

impl Default for DuhamelMethod {
    fn default() -> Self {
        Self::Exact
    }
}

fn source_spectra(h: &DuhamelSource) -> Vec<Vec<Complex64>> {
    let shape = h.grid().shape().to_vec();
    h.terms()
        .iter()
        .map(|term| {
            let mut s: Vec<Complex64> = term.data().iter().map(|&v| Complex64::new(v, 0.0)).collect();
            fft::forward(&mut s, &shape);
            s
        })
        .collect()
}

fn duhamel_spectral(h: &DuhamelSource, z: Complex64, method: DuhamelMethod) -> ComplexField {
    let grid = h.grid();
    if z == Complex64::new(0.0, 0.0) || h.is_zero() {
        return ComplexField::new(grid.clone(), vec![Complex64::new(0.0, 0.0); grid.len()])
            .expect("shape");
    }
    let spectra = source_spectra(h);
    let wn = Wavenumbers::new(grid);
    let mut out = vec![Complex64::new(0.0, 0.0); grid.len()];
    match method {
        DuhamelMethod::Exact => {
            // ∫_0^z e^{-(z-s)a} s^j ds = j! z^{j+1} φ_{j+1}(-z a)
            let weights: Vec<Complex64> = (0..spectra.len())
                .map(|j| factorial(j) * z.powu(j as u32 + 1))
                .collect();
            out.par_iter_mut().enumerate().for_each(|(i, o)| {
                let a = wn.norm_sq(&grid.unravel(i));
                let x = -z * a;
                for (j, s) in spectra.iter().enumerate() {
                    *o += s[i] * weights[j] * phi_function(j + 1, x);
                }
            });
        }
        DuhamelMethod::GaussLegendre(nodes) => {
            // Straight path s = τ z, τ ∈ [0, 1].
            let (tau, w) = gauss_legendre_interval(nodes, 0.0, 1.0);
            out.par_iter_mut().enumerate().for_each(|(i, o)| {
                let a = wn.norm_sq(&grid.unravel(i));
                for (tq, wq) in tau.iter().zip(&w) {
                    let s = z * *tq;
                    let mut hs = Complex64::new(0.0, 0.0);
                    let mut sj = Complex64::new(1.0, 0.0);
                    for spec in &spectra {
                        hs += spec[i] * sj;
                        sj *= s;
                    }
                    *o += hs * heat_symbol(z - s, a) * z * *wq;
                }
            });
        }
    }
    fft::inverse(&mut out, grid.shape());
    ComplexField::new(grid.clone(), out).expect("shape")
}

/// `∫_0^t S(t-s) h(s) ds`, evaluated exactly mode by mode.
pub fn duhamel_integral(h: &DuhamelSource, t: f64) -> Result<RemainderField> {
    duhamel_integral_with(h, t, DuhamelMethod::Exact)
}

pub fn duhamel_integral_with(h: &DuhamelSource, t: f64, method: DuhamelMethod) -> Result<RemainderField> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(invalid("t", format!("Duhamel integral needs t >= 0, got {t}")));
    }
    Ok(duhamel_spectral(h, Complex64::new(t, 0.0), method).re())
}

/// Complex-time Duhamel integral along the segment `[0, z]`.
pub fn duhamel_integral_complex(h: &DuhamelSource, z: ComplexTime) -> ComplexField {
    duhamel_spectral(h, z.value(), DuhamelMethod::Exact)
}

/// An asymptotic function evaluated at complex time.
#[derive(Clone, Debug)]
pub struct ComplexAsymptoticFunction {
    pub chart_re: AsymptoticChart,
    pub chart_im: AsymptoticChart,
    pub remainder: ComplexField,
    pub cutoff: CutoffSpec,
}

/// The heat semigroup acting on one initial datum, with its coefficient
/// flow and Duhamel source precomputed.
#[derive(Clone, Debug)]
pub struct HeatSemigroup {
    initial: AsymptoticFunction,
    flow: CoefficientFlow,
    source: DuhamelSource,
    method: DuhamelMethod,
}

impl HeatSemigroup {
    pub fn new(v: &AsymptoticFunction) -> Result<Self> {
        let flow = evolve_coefficients(&v.chart);
        let source = if v.chart.is_zero() {
            DuhamelSource::zero(v.remainder.grid().clone())
        } else {
            assemble_source(&flow, &v.cutoff, v.remainder.grid())?
        };
        Ok(Self {
            initial: v.clone(),
            flow,
            source,
            method: DuhamelMethod::Exact,
        })
    }

    pub fn with_method(mut self, method: DuhamelMethod) -> Self {
        self.method = method;
        self
    }

    pub fn flow(&self) -> &CoefficientFlow {
        &self.flow
    }

    pub fn source(&self) -> &DuhamelSource {
        &self.source
    }

    pub fn initial(&self) -> &AsymptoticFunction {
        &self.initial
    }

    /// `S(t) v` for real `t >= 0`.
    pub fn apply(&self, t: f64) -> Result<AsymptoticFunction> {
        if t == 0.0 {
            return Ok(self.initial.clone());
        }
        let free = heat_apply(&self.initial.remainder, t)?;
        let forced = duhamel_integral_with(&self.source, t, self.method)?;
        AsymptoticFunction::new(self.flow.eval(t), free.add(&forced), self.initial.cutoff)
    }

    /// `S(z) v` for complex `z` in a closed subsector.
    pub fn apply_complex(&self, z: ComplexTime) -> ComplexAsymptoticFunction {
        let (chart_re, chart_im) = self.flow.eval_complex(z.value());
        let free = heat_apply_complex(&ComplexField::from_real(&self.initial.remainder), z);
        let forced = duhamel_integral_complex(&self.source, z);
        ComplexAsymptoticFunction {
            chart_re,
            chart_im,
            remainder: free.add_scaled(&forced, Complex64::new(1.0, 0.0)),
            cutoff: self.initial.cutoff,
        }
    }
}

/// `S(t) v = S₁ + S₂ + S₃`: evolved chart, propagated remainder and the
/// Duhamel response to the cutoff source.
pub fn semigroup_apply(v: &AsymptoticFunction, t: f64) -> Result<AsymptoticFunction> {
    HeatSemigroup::new(v)?.apply(t)
}

pub fn semigroup_apply_sector(v: &AsymptoticFunction, z: ComplexTime) -> Result<ComplexAsymptoticFunction> {
    Ok(HeatSemigroup::new(v)?.apply_complex(z))
}

/// The generator `Λ v`: chart `(Λv)_k = (Δ_θ + (k-2)(k-d)) b_{k-2}` and
/// remainder `Δ f + h(0)`.
pub fn generator_apply(v: &AsymptoticFunction) -> Result<AsymptoticFunction> {
    let chart = &v.chart;
    let d = chart.dimension() as i64;
    let n = chart.start();
    let l_max = chart.l_max();
    let coeffs = chart
        .ks()
        .map(|k| {
            if k >= n + 2 {
                let shift = ((k as i64 - 2) * (k as i64 - d)) as f64;
                chart.coeff(k - 2).expect("in range").with_l_max(l_max).shifted_laplacian(shift)
            } else {
                crate::sphere::SphereFunction::zeros(chart.dimension(), l_max)
            }
        })
        .collect();
    let semigroup = HeatSemigroup::new(v)?;
    let remainder = fft::laplacian(&v.remainder).add(&semigroup.source.eval(0.0));
    AsymptoticFunction::new(chart.with_coeffs(coeffs)?, remainder, v.cutoff)
}

/// Cauchy–Riemann residual of `z ↦ S(z) f`, mode by mode.
///
/// With `F = exp(-z a) = R + iI`, the partials along `x = Re z` and
/// `y = Im z` are taken by a complex step in a second imaginary unit `j`
/// commuting with `i`: `F(z + jηd) = F(z)(cos(aηd) - j sin(aηd))`, so the
/// `j`-part divided by `η` is the directional derivative along `d ∈ {1, i}`
/// free of cancellation. Returns
/// `Σ|f̂|(|R_x - I_y| + |R_y + I_x|) / Σ|f̂|(|R_x| + |R_y|)`.
pub fn cauchy_riemann_residual(f: &RemainderField, z: ComplexTime) -> f64 {
    let grid = f.grid();
    let mut spec: Vec<Complex64> = f.data().iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft::forward(&mut spec, grid.shape());
    let wn = Wavenumbers::new(grid);
    let zz = z.value();
    let eta = 1e-20;
    let step = |a: f64, d: Complex64| -heat_symbol(zz, a) * (d * (a * eta)).sin() / eta;
    let terms: Vec<(f64, f64)> = spec
        .par_iter()
        .enumerate()
        .map(|(k, s)| {
            let a = wn.norm_sq(&grid.unravel(k));
            let dx = step(a, Complex64::new(1.0, 0.0));
            let dy = step(a, Complex64::i());
            let (rx, ix, ry, iy) = (dx.re, dx.im, dy.re, dy.im);
            let w = s.norm();
            (w * ((rx - iy).abs() + (ry + ix).abs()), w * (rx.abs() + ry.abs()))
        })
        .collect();
    let (num, den) = terms.iter().fold((0.0, 0.0), |p, q| (p.0 + q.0, p.1 + q.1));
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}
