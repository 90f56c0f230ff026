//! Picard iteration for the mild formulation
//! `u(t) = S(t)v + ∫_0^t S(t-s)(φ - ψu(s)³) ds`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::problem::SemilinearProblem;
use crate::error::{invalid, Error, Result};
use crate::fft::{forward, inverse, Wavenumbers};
use crate::heatflow::{phi_function, HeatSemigroup};
use crate::spaces::{AsymptoticFunction, RemainderField};

/// Iterates and `e^{-kt}`-weighted distances of a Picard run.
#[derive(Clone, Debug, Serialize)]
pub struct PicardRun {
    pub times: Vec<f64>,
    pub weights: Vec<f64>,
    /// `distances[w][i] = sup_t e^{-k_w t} ‖u^{(i+1)}(t) - u^{(i)}(t)‖_∞`.
    pub distances: Vec<Vec<f64>>,
    /// `ratios[w][i] = distances[w][i+1] / distances[w][i]`.
    pub ratios: Vec<Vec<f64>>,
    /// Geometric mean of the first contraction ratios after the start-up
    /// iterate, one per weight.
    pub contraction_factors: Vec<f64>,
    /// `‖DΦ(u)‖` in the `e^{-kt}`-weighted sup norm at the fixed point, one
    /// per weight. The derivative `δ ↦ -∫_0^t S(t-s)(3ψu²δ)(s) ds` is a
    /// positive operator up to sign, so its norm is attained at `δ = e^{kt}`.
    pub lipschitz_factors: Vec<f64>,
    /// Index of the first iterate that reproduced itself to tolerance.
    pub iterations: usize,
    #[serde(skip)]
    pub fixed_point: Vec<RemainderField>,
}

/// Number of ratios entering the contraction factor.
pub const FACTOR_WINDOW: usize = 3;

pub fn picard_iterate(v: &AsymptoticFunction, prob: &SemilinearProblem, t_end: f64, k_weight: f64) -> Result<PicardRun> {
    picard_iterate_weights(v, prob, t_end, &[k_weight])
}

/// Picard iteration on the time grid `t_j = j Δt`, `Δt = tolerances.dt`.
/// The reaction is interpolated linearly in time on each step and integrated
/// exactly against the heat kernel. The iterates do not depend on the
/// weights, so several weights share one run.
pub fn picard_iterate_weights(
    v: &AsymptoticFunction,
    prob: &SemilinearProblem,
    t_end: f64,
    weights: &[f64],
) -> Result<PicardRun> {
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(invalid("T", format!("must be positive, got {t_end}")));
    }
    if weights.iter().any(|k| !(*k > 0.0)) {
        return Err(invalid("k_weight", "weights must be positive"));
    }
    if v.remainder.grid() != prob.grid() || v.dimension() != 3 {
        return Err(Error::ShapeMismatch("state and problem grids differ".into()));
    }
    let grid = prob.grid().clone();
    let shape = grid.shape().to_vec();
    let n = grid.len();
    let steps = (t_end / prob.tolerances.dt).ceil().max(1.0) as usize;
    let dt = t_end / steps as f64;
    let times: Vec<f64> = (0..=steps).map(|j| j as f64 * dt).collect();

    let sg = HeatSemigroup::new(v)?;
    let linear: Vec<Vec<f64>> = times
        .iter()
        .map(|&t| Ok(sg.apply(t)?.to_grid().into_data()))
        .collect::<Result<_>>()?;

    let wn = Wavenumbers::new(&grid);
    let k2: Vec<f64> = (0..n).into_par_iter().map(|i| wn.norm_sq(&grid.unravel(i))).collect();
    let decay: Vec<f64> = k2.iter().map(|&a| (-dt * a).exp()).collect();
    let (c_prev, c_next): (Vec<f64>, Vec<f64>) = k2
        .iter()
        .map(|&a| {
            let x = Complex64::new(-dt * a, 0.0);
            let p1 = phi_function(1, x).re;
            let p2 = phi_function(2, x).re;
            (dt * (p1 - p2), dt * p2)
        })
        .unzip();

    // ∫_0^{t_j} S(t_j - s) g(s) ds for g sampled on the time grid.
    let volterra = |g: &[Vec<f64>]| -> Vec<Vec<f64>> {
        let spectra: Vec<Vec<Complex64>> = g
            .par_iter()
            .map(|u| {
                let mut f: Vec<Complex64> = u.iter().map(|&x| Complex64::new(x, 0.0)).collect();
                forward(&mut f, &shape);
                f
            })
            .collect();
        let mut acc = vec![Complex64::new(0.0, 0.0); n];
        let mut integrals: Vec<Vec<Complex64>> = vec![acc.clone()];
        for j in 0..steps {
            acc.par_iter_mut().enumerate().for_each(|(i, a)| {
                *a = decay[i] * *a + c_prev[i] * spectra[j][i] + c_next[i] * spectra[j + 1][i];
            });
            integrals.push(acc.clone());
        }
        integrals
            .into_par_iter()
            .map(|mut s| {
                inverse(&mut s, &shape);
                s.into_iter().map(|c| c.re).collect()
            })
            .collect()
    };

    // Zeroth iterate: the free evolution S(t)v.
    let mut current: Vec<Vec<f64>> = linear.clone();
    let mut distances = vec![Vec::new(); weights.len()];
    let sup = |u: &Vec<Vec<f64>>| u.iter().flatten().fold(0.0f64, |m, x| m.max(x.abs()));
    for iter in 0..prob.tolerances.picard_max_iter {
        let reactions: Vec<Vec<f64>> = current.par_iter().map(|u| prob.reaction(u)).collect();
        let next: Vec<Vec<f64>> = volterra(&reactions)
            .into_par_iter()
            .zip(linear.par_iter())
            .map(|(s, lin)| s.iter().zip(lin).map(|(a, b)| a + b).collect())
            .collect();
        let diffs: Vec<f64> = next
            .iter()
            .zip(&current)
            .map(|(a, b)| a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs())))
            .collect();
        for (w, &k) in weights.iter().enumerate() {
            let d = diffs.iter().zip(&times).map(|(d, t)| (-k * t).exp() * d).fold(0.0, f64::max);
            distances[w].push(d);
        }
        let scale = sup(&next).max(1.0);
        current = next;
        let plain = diffs.iter().cloned().fold(0.0, f64::max);
        if plain <= prob.tolerances.picard_tol * scale {
            let ratios: Vec<Vec<f64>> = distances
                .iter()
                .map(|d| d.windows(2).map(|p| if p[0] > 0.0 { p[1] / p[0] } else { 0.0 }).collect())
                .collect();
            let contraction_factors = ratios
                .iter()
                .map(|r: &Vec<f64>| {
                    let window: Vec<f64> = r.iter().skip(1).take(FACTOR_WINDOW).cloned().collect();
                    if window.is_empty() || window.iter().any(|x| *x <= 0.0) {
                        0.0
                    } else {
                        (window.iter().map(|x| x.ln()).sum::<f64>() / window.len() as f64).exp()
                    }
                })
                .collect();
            let lipschitz_factors = weights
                .iter()
                .map(|&k| {
                    let probe: Vec<Vec<f64>> = current
                        .iter()
                        .zip(&times)
                        .map(|(u, &t)| {
                            let e = (k * t).exp();
                            u.iter().zip(prob.psi.data()).map(|(u, q)| 3.0 * q * u * u * e).collect()
                        })
                        .collect();
                    volterra(&probe)
                        .iter()
                        .zip(&times)
                        .map(|(w, t)| (-k * t).exp() * w.iter().fold(0.0f64, |m, x| m.max(x.abs())))
                        .fold(0.0, f64::max)
                })
                .collect();
            let fixed_point = current
                .into_iter()
                .map(|u| RemainderField::new(grid.clone(), u))
                .collect::<Result<_>>()?;
            return Ok(PicardRun {
                times,
                weights: weights.to_vec(),
                distances,
                ratios,
                contraction_factors,
                lipschitz_factors,
                iterations: iter,
                fixed_point,
            });
        }
        if !scale.is_finite() {
            break;
        }
    }
    Err(Error::PicardDiverged { iterations: prob.tolerances.picard_max_iter })
}
