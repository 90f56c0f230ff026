//! Time integration of `u_t = Δu + φ - ψu³` in the asymptotic representation.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::problem::SemilinearProblem;
use crate::error::{invalid, Error, Result};
use crate::fft::{self, radial_multiplier_real, Wavenumbers};
use crate::heatflow::{phi_function, CoefficientFlow, HeatSemigroup};
use crate::spaces::{weighted_lp, AsymptoticChart, AsymptoticFunction, CutoffSpec, Grid, RemainderField};
use crate::sphere::{basis_values, mode_count};

/// `τ φ₁(τΔ) f = ∫_0^τ e^{(τ-s)Δ} f ds` as a Fourier multiplier.
pub fn phi1_apply(f: &RemainderField, tau: f64) -> RemainderField {
    radial_multiplier_real(f, |k2| {
        let a = tau * k2;
        if a < 1e-8 {
            tau * (1.0 - 0.5 * a)
        } else {
            -(-a).exp_m1() / k2
        }
    })
}

fn check_state(u: &AsymptoticFunction, prob: &SemilinearProblem) -> Result<()> {
    if u.dimension() != 3 || u.chart.start() != 1 {
        return Err(invalid("u", "semilinear states live in the d = 3, n = 1 asymptotic space"));
    }
    if u.remainder.grid() != prob.grid() {
        return Err(Error::ShapeMismatch("state and problem grids differ".into()));
    }
    Ok(())
}

fn reaction_field(u: &AsymptoticFunction, prob: &SemilinearProblem) -> Result<RemainderField> {
    RemainderField::new(prob.grid().clone(), prob.reaction(u.to_grid().data()))
}

/// One step of the exponential midpoint rule. The linear part (chart
/// recursion, spectral heat flow of the remainder and the Duhamel source of
/// the cutoff) is propagated exactly; the reaction `φ - ψu³` is frozen at the
/// start for the half step and at the midpoint for the full step, and
/// integrated exactly against the heat kernel. Equilibria are fixed points
/// and `a_1`, `a_2` are never touched.
pub fn semilinear_step(u: &AsymptoticFunction, dt: f64, prob: &SemilinearProblem) -> Result<AsymptoticFunction> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(invalid("dt", format!("must be positive, got {dt}")));
    }
    check_state(u, prob)?;
    let sg = HeatSemigroup::new(u)?;
    let n0 = reaction_field(u, prob)?;
    let mut half = sg.apply(0.5 * dt)?;
    half.remainder = half.remainder.add(&phi1_apply(&n0, 0.5 * dt));
    let n1 = reaction_field(&half, prob)?;
    let mut full = sg.apply(dt)?;
    full.remainder = full.remainder.add(&phi1_apply(&n1, dt));
    Ok(full)
}

/// Angular basis, cutoff and `1/r` at every grid node where `χ > 0`, so that
/// charts sharing one `l_max` can be sampled without re-evaluating harmonics.
struct ChartCache {
    nodes: Vec<usize>,
    chi: Vec<f64>,
    inv_r: Vec<f64>,
    basis: Vec<f64>,
    nmodes: usize,
    len: usize,
}

impl ChartCache {
    fn new(grid: &Grid, cutoff: &CutoffSpec, l_max: usize) -> Self {
        let nmodes = mode_count(3, l_max);
        let rows: Vec<(usize, f64, f64, Vec<f64>)> = (0..grid.len())
            .into_par_iter()
            .filter_map(|i| {
                let x = grid.point(i);
                let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
                let chi = cutoff.eval(r);
                if chi == 0.0 {
                    return None;
                }
                let mut b = vec![0.0; nmodes];
                basis_values(3, l_max, &x, &mut b);
                Some((i, chi, 1.0 / r, b))
            })
            .collect();
        let mut cache = Self {
            nodes: Vec::with_capacity(rows.len()),
            chi: Vec::with_capacity(rows.len()),
            inv_r: Vec::with_capacity(rows.len()),
            basis: Vec::with_capacity(rows.len() * nmodes),
            nmodes,
            len: grid.len(),
        };
        for (i, chi, inv_r, b) in rows {
            cache.nodes.push(i);
            cache.chi.push(chi);
            cache.inv_r.push(inv_r);
            cache.basis.extend(b);
        }
        cache
    }

    fn sample(&self, chart: &AsymptoticChart) -> Vec<f64> {
        let start = chart.start() as i32;
        let coeffs: Vec<&[f64]> = chart.coeffs().iter().map(|a| a.coeffs()).collect();
        let vals: Vec<f64> = (0..self.nodes.len())
            .into_par_iter()
            .map(|j| {
                let b = &self.basis[j * self.nmodes..(j + 1) * self.nmodes];
                let s = self.inv_r[j];
                let mut pow = s.powi(start);
                let mut acc = 0.0;
                for c in &coeffs {
                    acc += pow * c.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
                    pow *= s;
                }
                self.chi[j] * acc
            })
            .collect();
        let mut out = vec![0.0; self.len];
        for (&i, v) in self.nodes.iter().zip(vals) {
            out[i] = v;
        }
        out
    }
}

/// Fourier multipliers of one step length: `e^{-τk²}` and the weights
/// `j! τ^{j+1} φ_{j+1}(-τk²)` of the polynomial source terms.
struct StepMultipliers {
    tau: f64,
    decay: Vec<f64>,
    phis: Vec<Vec<f64>>,
}

impl StepMultipliers {
    fn new(k2: &[f64], tau: f64, terms: usize) -> Self {
        let decay = k2.par_iter().map(|&a| (-tau * a).exp()).collect();
        let mut fact = 1.0;
        let phis = (0..terms)
            .map(|j| {
                if j > 0 {
                    fact *= j as f64;
                }
                let w = fact * tau.powi(j as i32 + 1);
                k2.par_iter()
                    .map(|&a| w * phi_function(j + 1, Complex64::new(-tau * a, 0.0)).re)
                    .collect()
            })
            .collect();
        Self { tau, decay, phis }
    }
}

/// The exponential midpoint rule of [`semilinear_step`] for a whole run.
/// The chart flow and the Duhamel source are polynomials in `t` fixed by
/// the initial chart, so they are built once; each step then costs one
/// spectral round trip per stage.
struct FlowEngine<'a> {
    prob: &'a SemilinearProblem,
    flow: CoefficientFlow,
    /// Spectra of the source terms `h_j` of `h(t) = Σ_j h_j t^j`.
    source: Vec<Vec<Complex64>>,
    cache: ChartCache,
    cutoff: CutoffSpec,
    k2: Vec<f64>,
    shape: Vec<usize>,
    stages: Vec<StepMultipliers>,
}

impl<'a> FlowEngine<'a> {
    fn new(v: &AsymptoticFunction, prob: &'a SemilinearProblem) -> Result<Self> {
        let sg = HeatSemigroup::new(v)?;
        let grid = prob.grid();
        let wn = Wavenumbers::new(grid);
        let k2 = (0..grid.len()).into_par_iter().map(|i| wn.norm_sq(&grid.unravel(i))).collect();
        let shape = grid.shape().to_vec();
        let source = sg.source().terms().iter().map(|h| spectrum(h.data(), &shape)).collect();
        Ok(Self {
            prob,
            flow: sg.flow().clone(),
            source,
            cache: ChartCache::new(grid, &v.cutoff, v.chart.l_max()),
            cutoff: v.cutoff,
            k2,
            shape,
            stages: Vec::new(),
        })
    }

    fn multipliers(&mut self, tau: f64) -> usize {
        if let Some(i) = self.stages.iter().position(|m| m.tau == tau) {
            return i;
        }
        // The reaction is one extra constant-in-time term.
        let terms = self.source.len().max(1);
        self.stages.push(StepMultipliers::new(&self.k2, tau, terms));
        self.stages.len() - 1
    }

    /// Spectra of the source restarted at `t0`: `s ↦ h(t0 + s)`.
    fn shifted_source(&self, t0: f64) -> Vec<Vec<Complex64>> {
        let deg = self.source.len();
        (0..deg)
            .map(|i| {
                let mut acc = self.source[i].clone();
                let mut binom = 1.0;
                let mut pow = 1.0;
                for j in i + 1..deg {
                    binom = binom * j as f64 / (j - i) as f64;
                    pow *= t0;
                    let w = binom * pow;
                    acc.par_iter_mut().zip(&self.source[j]).for_each(|(a, b)| *a += b * w);
                }
                acc
            })
            .collect()
    }

    /// `e^{τΔ} f + ∫_0^τ e^{(τ-s)Δ} (h(s) + n) ds` from the spectra of `f`,
    /// of the restarted source and of the frozen reaction `n`.
    fn propagate(&mut self, f: &[Complex64], source: &[Vec<Complex64>], n: &[f64], tau: f64) -> Vec<f64> {
        let m = self.multipliers(tau);
        let n = spectrum(n, &self.shape);
        let mult = &self.stages[m];
        let mut acc: Vec<Complex64> = f
            .par_iter()
            .zip(&n)
            .enumerate()
            .map(|(i, (f, n))| {
                let mut a = f * mult.decay[i] + n * mult.phis[0][i];
                for (j, h) in source.iter().enumerate() {
                    a += h[i] * mult.phis[j][i];
                }
                a
            })
            .collect();
        fft::inverse(&mut acc, &self.shape);
        acc.into_iter().map(|c| c.re).collect()
    }

    fn state(&self, t: f64, f: &[f64]) -> Result<AsymptoticFunction> {
        let remainder = RemainderField::new(self.prob.grid().clone(), f.to_vec())?;
        AsymptoticFunction::new(self.flow.eval(t), remainder, self.cutoff)
    }

    fn values(&self, t: f64, f: &[f64]) -> Vec<f64> {
        let mut g = self.cache.sample(&self.flow.eval(t));
        g.par_iter_mut().zip(f).for_each(|(a, b)| *a += b);
        g
    }

    fn step(&mut self, t: f64, f: &[f64], dt: f64) -> Vec<f64> {
        let source = self.shifted_source(t);
        let fs = spectrum(f, &self.shape);
        let n0 = self.prob.reaction(&self.values(t, f));
        let half = self.propagate(&fs, &source, &n0, 0.5 * dt);
        let n1 = self.prob.reaction(&self.values(t + 0.5 * dt, &half));
        self.propagate(&fs, &source, &n1, dt)
    }
}

fn spectrum(data: &[f64], shape: &[usize]) -> Vec<Complex64> {
    let mut s: Vec<Complex64> = data.par_iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft::forward(&mut s, shape);
    s
}

/// Options for [`flow_with`].
#[derive(Clone, Debug, Serialize)]
pub struct FlowOptions {
    pub t_end: f64,
    pub dt: f64,
    /// Keep a snapshot every this many steps (0 keeps only the end state).
    pub snapshot_every: usize,
    /// Exponents of the monitored `L^p_δ` norms.
    pub monitor_p: Vec<f64>,
    pub delta: f64,
}

/// One row of the monitor table.
#[derive(Clone, Debug, Serialize)]
pub struct FlowMonitor {
    pub t: f64,
    /// `‖u(t)‖_{L^p_δ}` over the box, one entry per monitored `p`.
    pub lp_norms: Vec<f64>,
    pub sup_norm: f64,
    /// `‖a_k(t) - a_k(0)‖` for `k = 1..=N*`.
    pub drift: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct FlowResult {
    pub snapshots: Vec<(f64, AsymptoticFunction)>,
    pub monitors: Vec<FlowMonitor>,
    pub final_state: AsymptoticFunction,
}

impl FlowResult {
    /// Largest increase between consecutive monitored values of the `j`-th norm.
    pub fn max_increase(&self, j: usize) -> f64 {
        self.monitors
            .windows(2)
            .map(|w| w[1].lp_norms[j] - w[0].lp_norms[j])
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Largest coefficient drift over the run for each `k`.
    pub fn max_drift(&self) -> Vec<f64> {
        let n = self.monitors.first().map(|m| m.drift.len()).unwrap_or(0);
        (0..n)
            .map(|k| self.monitors.iter().map(|m| m.drift[k]).fold(0.0, f64::max))
            .collect()
    }
}

fn monitor(t: f64, values: &RemainderField, chart: &AsymptoticChart, v: &AsymptoticFunction, opts: &FlowOptions) -> FlowMonitor {
    FlowMonitor {
        t,
        lp_norms: opts.monitor_p.iter().map(|&p| weighted_lp(values, p, opts.delta)).collect(),
        sup_norm: values.sup_norm(),
        drift: chart
            .coeffs()
            .iter()
            .zip(v.chart.coeffs())
            .map(|(a, b)| a.add_scaled(b, -1.0).l2_norm())
            .collect(),
    }
}

/// Integrate to `t_end` with step `dt`, monitoring every step.
pub fn flow(v: &AsymptoticFunction, prob: &SemilinearProblem, t_end: f64, dt: f64) -> Result<FlowResult> {
    let opts = FlowOptions { t_end, dt, snapshot_every: 0, monitor_p: vec![2.0, prob.p], delta: 0.0 };
    flow_with(v, prob, &opts)
}

/// Same scheme as repeated [`semilinear_step`], with the linear data of the
/// run shared between steps.
pub fn flow_with(v: &AsymptoticFunction, prob: &SemilinearProblem, opts: &FlowOptions) -> Result<FlowResult> {
    check_state(v, prob)?;
    if !(opts.t_end >= 0.0 && opts.dt > 0.0) {
        return Err(invalid("dt", "need t_end >= 0 and dt > 0"));
    }
    let steps = (opts.t_end / opts.dt - 1e-9).ceil().max(0.0) as usize;
    let mut engine = FlowEngine::new(v, prob)?;
    let grid = prob.grid().clone();
    let mut f = v.remainder.data().to_vec();
    let mut t = 0.0;
    let values = RemainderField::new(grid.clone(), engine.values(0.0, &f))?;
    let mut monitors = vec![monitor(0.0, &values, &v.chart, v, opts)];
    let mut snapshots = vec![(0.0, v.clone())];
    for s in 0..steps {
        let h = (opts.t_end - t).min(opts.dt);
        f = engine.step(t, &f, h);
        t = if s + 1 == steps { opts.t_end } else { t + h };
        let values = RemainderField::new(grid.clone(), engine.values(t, &f))?;
        let m = monitor(t, &values, &engine.flow.eval(t), v, opts);
        if !(m.sup_norm <= prob.tolerances.blow_up) {
            return Err(Error::BlowUp { t, sup: m.sup_norm });
        }
        monitors.push(m);
        if opts.snapshot_every > 0 && (s + 1) % opts.snapshot_every == 0 {
            snapshots.push((t, engine.state(t, &f)?));
        }
    }
    let final_state = engine.state(t, &f)?;
    Ok(FlowResult { snapshots, monitors, final_state })
}
