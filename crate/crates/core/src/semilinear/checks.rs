//! Maximum-principle diagnostics for equilibria.

use rayon::prelude::*;
use serde::Serialize;

use super::equilibrium::{EquilibriumResult, ExtendedInverse};
use super::krylov::gmres;
use super::problem::SemilinearProblem;
use crate::error::Result;
use crate::oracle::newtonian_potential_at;
use crate::spaces::RemainderField;

/// Outcome of [`max_principle_checks`].
#[derive(Clone, Debug, Serialize)]
pub struct MaxPrincipleReport {
    pub u_sup: f64,
    /// Largest `|Δ^{-1}φ|` over the sampled targets; a lower bound for
    /// `‖Δ^{-1}φ‖_∞`, which makes the bound check conservative.
    pub potential_sup: f64,
    pub targets: usize,
    /// `2 ‖Δ^{-1}φ‖_∞ + 1e-8 - ‖u*‖_∞`.
    pub margin: f64,
    pub bound_holds: bool,
    /// `(R, max over the ball, max over the sphere)` for the test function
    /// `w` with `Δw = 3ψu*² w`, `w → 1`.
    pub nested_balls: Vec<(f64, f64, f64)>,
    pub monotone: bool,
}

/// Slack allowed between grid maxima over a ball and interpolated maxima
/// over its boundary sphere.
pub const SPHERE_MAX_SLACK: f64 = 1e-6;

fn fibonacci_sphere(n: usize) -> Vec<[f64; 3]> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|i| {
            let z = 1.0 - 2.0 * (i as f64 + 0.5) / n as f64;
            let r = (1.0 - z * z).sqrt();
            let t = golden * i as f64;
            [r * t.cos(), r * t.sin(), z]
        })
        .collect()
}

pub fn max_principle_checks(result: &EquilibriumResult, prob: &SemilinearProblem) -> Result<MaxPrincipleReport> {
    let inv = ExtendedInverse::new(prob.grid(), &prob.cutoff, prob.order, prob.p)?;
    max_principle_checks_with(result, prob, &inv)
}

pub fn max_principle_checks_with(
    result: &EquilibriumResult,
    prob: &SemilinearProblem,
    inv: &ExtendedInverse,
) -> Result<MaxPrincipleReport> {
    let grid = prob.grid();
    let u = &result.values;
    let u_sup = u.iter().fold(0.0f64, |m, v| m.max(v.abs()));

    // Targets: argmax |u*|, argmax |φ| and a coarse lattice near the origin.
    let argmax = |v: &[f64]| -> usize {
        let mut best = 0;
        for (i, x) in v.iter().enumerate() {
            if x.abs() > v[best].abs() {
                best = i;
            }
        }
        best
    };
    let mut ids = vec![argmax(u), argmax(prob.phi.data())];
    let stride = (grid.shape()[0] / 12).max(1);
    for i in 0..grid.len() {
        let idx = grid.unravel(i);
        let x = grid.point(i);
        if idx[..3].iter().all(|k| k % stride == 0) && x.iter().map(|v| v * v).sum::<f64>() < 16.0 {
            ids.push(i);
        }
    }
    ids.sort_unstable();
    ids.dedup();
    let targets: Vec<[f64; 3]> = ids.iter().map(|&i| grid.point(i)).collect();
    let pot = newtonian_potential_at(&prob.phi, &targets)?;
    let potential_sup = pot.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let margin = 2.0 * potential_sup + 1e-8 - u_sup;

    // w = 1 + w̃ with w̃ - Δ^{-1}(3ψu² w̃) = Δ^{-1}(3ψu²).
    let coef: Vec<f64> = u.iter().zip(prob.psi.data()).map(|(v, s)| 3.0 * s * v * v).collect();
    let rhs = inv.apply(&coef)?.values;
    let apply = |w: &[f64]| -> Vec<f64> {
        let kw: Vec<f64> = w.iter().zip(&coef).map(|(a, c)| a * c).collect();
        let gw = inv.apply(&kw).expect("moment matrix factorizes").values;
        w.iter().zip(&gw).map(|(a, b)| a - b).collect()
    };
    let tol = &prob.tolerances;
    let (wt, _) = gmres(apply, &rhs, tol.gmres_tol, tol.gmres_restart, tol.gmres_max_iter)?;
    let w = RemainderField::new(grid.clone(), wt.iter().map(|v| 1.0 + v).collect())?;

    let dirs = fibonacci_sphere(2000);
    let r_max = (grid.half_width() - 1.0).floor() as usize;
    let nested: Vec<(f64, f64, f64)> = (1..=r_max)
        .into_par_iter()
        .map(|ri| {
            let r = ri as f64;
            let mut ball: f64 = 0.0;
            for i in 0..grid.len() {
                let x = grid.point(i);
                if x.iter().map(|v| v * v).sum::<f64>() <= r * r {
                    ball = ball.max(w.data()[i].abs());
                }
            }
            let sphere = dirs
                .iter()
                .map(|d| w.interpolate(&[r * d[0], r * d[1], r * d[2]]).abs())
                .fold(0.0, f64::max);
            (r, ball, sphere)
        })
        .collect();
    let monotone = nested.iter().all(|&(_, b, s)| b <= s + SPHERE_MAX_SLACK * s.max(1.0));
    Ok(MaxPrincipleReport {
        u_sup,
        potential_sup,
        targets: targets.len(),
        margin,
        bound_holds: margin >= 0.0,
        nested_balls: nested,
        monotone,
    })
}
