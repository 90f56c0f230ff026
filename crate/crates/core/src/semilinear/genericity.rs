//! Random perturbation statistics for the non-vanishing of equilibrium
//! coefficients.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use super::equilibrium::{equilibrium_solve_with, ExtendedInverse};
use super::problem::SemilinearProblem;
use crate::error::{invalid, Result};
use crate::sphere::{basis_constant, basis_values, mode_count};
use crate::spaces::{Grid, RemainderField};

/// Settings for [`genericity_sweep`].
#[derive(Clone, Debug, Serialize)]
pub struct GenericityOptions {
    pub trials: usize,
    /// Amplitude `ε` of the perturbation `φ + ε η`.
    pub scale: f64,
    /// `a_k` counts as vanishing when `‖a_k‖ <= threshold · ‖a_1‖`.
    pub threshold: f64,
    /// Largest `k` whose coefficient must be non-zero.
    pub k_max: usize,
    pub seed: u64,
}

impl Default for GenericityOptions {
    fn default() -> Self {
        Self { trials: 100, scale: 0.1, threshold: 1e-8, k_max: 3, seed: 0 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GenericityStats {
    /// `‖a_k‖`, `k = 1..=N*`, of the unperturbed equilibrium.
    pub base_norms: Vec<f64>,
    /// Which `a_k` (`k <= k_max`) vanish for the unperturbed problem.
    pub base_vanishing: Vec<bool>,
    pub trial_norms: Vec<Vec<f64>>,
    /// Fraction of trials with every `a_k`, `k <= k_max`, above threshold.
    pub fraction: f64,
    pub options: GenericityOptions,
}

/// `e^{-|x|²} Σ_{l<=3, m} g_{lm} |x|^l Y_{lm}` with standard normal `g`,
/// normalized to unit sup norm.
pub fn random_perturbation(grid: &Grid, rng: &mut ChaCha8Rng) -> Result<RemainderField> {
    let l_max = 3;
    let nm = mode_count(3, l_max);
    let g: Vec<f64> = (0..nm).map(|_| StandardNormal.sample(rng)).collect();
    let field = RemainderField::from_fn(grid.clone(), |x| {
        let r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
        let r = r2.sqrt();
        let env = (-r2).exp();
        if r == 0.0 {
            return env * g[0] * basis_constant(3);
        }
        let mut b = vec![0.0; nm];
        basis_values(3, l_max, x, &mut b);
        let mut s = 0.0;
        let mut rl = 1.0;
        for l in 0..=l_max {
            for j in l * l..(l + 1) * (l + 1) {
                s += g[j] * rl * b[j];
            }
            rl *= r;
        }
        env * s
    });
    let sup = field.sup_norm();
    Ok(if sup > 0.0 { field.scale(1.0 / sup) } else { field })
}

fn coefficient_norms(prob: &SemilinearProblem, inv: &ExtendedInverse) -> Result<Vec<f64>> {
    let res = equilibrium_solve_with(prob, inv)?;
    Ok(res.u_star.chart.coeffs().iter().map(|a| a.l2_norm()).collect())
}

fn all_nonzero(norms: &[f64], opts: &GenericityOptions) -> bool {
    let scale = norms.first().copied().unwrap_or(0.0);
    norms.iter().take(opts.k_max).all(|&n| n > opts.threshold * scale || (opts.threshold == 0.0 && n >= 0.0))
}

pub fn genericity_sweep(prob: &SemilinearProblem, opts: &GenericityOptions) -> Result<GenericityStats> {
    if opts.trials == 0 {
        return Err(invalid("trials", "need at least one trial"));
    }
    let inv = ExtendedInverse::new(prob.grid(), &prob.cutoff, prob.order, prob.p)?;
    if inv.n_star() < opts.k_max {
        return Err(invalid("k_max", format!("chart only reaches N* = {}", inv.n_star())));
    }
    let base_norms = coefficient_norms(prob, &inv)?;
    let scale = base_norms[0];
    let base_vanishing = base_norms.iter().take(opts.k_max).map(|&n| n <= opts.threshold * scale).collect();
    let trial_norms: Vec<Vec<f64>> = (0..opts.trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_add(t as u64));
            let eta = random_perturbation(prob.grid(), &mut rng)?;
            let mut p = prob.clone();
            p.phi = prob.phi.add_scaled(&eta, opts.scale);
            coefficient_norms(&p, &inv)
        })
        .collect::<Result<_>>()?;
    let good = trial_norms.iter().filter(|n| all_nonzero(n, opts)).count();
    Ok(GenericityStats {
        base_norms,
        base_vanishing,
        trial_norms,
        fraction: good as f64 / opts.trials as f64,
        options: opts.clone(),
    })
}
