//! Newton–Krylov solver for `Δu = ψu³ - φ` in the `n = 1` asymptotic space.

use rayon::prelude::*;
use serde::Serialize;

use super::krylov::gmres;
use super::multipole::{chart_from_modes, eigenfunction_check, multipole_extract, solid_moments, PurityEntry};
use super::problem::SemilinearProblem;
use crate::error::{Error, Result};
use crate::fft::{laplacian, radial_multiplier_real};
use crate::heatflow::{assemble_source, evolve_coefficients};
use crate::numeric::solve_dense;
use crate::spaces::{chart_on_grid, n_star, AsymptoticChart, AsymptoticFunction, CutoffSpec, Grid, RemainderField};

/// `Δ^{-1}` on decaying sources, returning an element of the `n = 1`
/// asymptotic space.
///
/// The chart coefficients are chosen so that the annulus source
/// `Δ(χ Σ a_k/r^k)` has the same discrete solid-harmonic moments as the
/// input up to degree `N* - 1`; what is left has zero mean and fast decay and
/// is inverted by the periodic spectral Laplacian.
#[derive(Clone, Debug)]
pub struct ExtendedInverse {
    grid: Grid,
    cutoff: CutoffSpec,
    order: usize,
    p: f64,
    n_star: usize,
    support: Vec<usize>,
    /// `annulus[j][s]`: `Δ(χ e_j)` at `support[s]` for unit mode `j`.
    annulus: Vec<Vec<f64>>,
    /// Discrete moment matrix, row-major, `moment_i(Δ(χ e_j))`.
    moment_matrix: Vec<f64>,
}

/// Output of [`ExtendedInverse::apply`].
#[derive(Clone, Debug)]
pub struct Decomposition {
    /// Chart modes in sphere-index order, degree `k - 1` for `a_k`.
    pub modes: Vec<f64>,
    pub chart: AsymptoticChart,
    pub remainder: RemainderField,
    /// `χ·chart + remainder` on the grid.
    pub values: Vec<f64>,
}

impl ExtendedInverse {
    pub fn new(grid: &Grid, cutoff: &CutoffSpec, order: usize, p: f64) -> Result<Self> {
        if grid.dimension() != 3 {
            return Err(Error::DimensionMismatch { expected: 3, found: grid.dimension() });
        }
        let ns = n_star(order, 3, p);
        let nm = ns * ns;
        let fields = (0..nm)
            .map(|j| {
                let mut modes = vec![0.0; nm];
                modes[j] = 1.0;
                let chart = chart_from_modes(&modes, order, p)?;
                Ok(assemble_source(&evolve_coefficients(&chart), cutoff, grid)?.eval(0.0))
            })
            .collect::<Result<Vec<_>>>()?;
        let support: Vec<usize> =
            (0..grid.len()).filter(|&i| fields.iter().any(|f| f.data()[i] != 0.0)).collect();
        let annulus: Vec<Vec<f64>> =
            fields.iter().map(|f| support.iter().map(|&i| f.data()[i]).collect()).collect();
        let mut moment_matrix = vec![0.0; nm * nm];
        for (j, f) in fields.iter().enumerate() {
            let q = solid_moments(f.data(), grid, ns - 1);
            for i in 0..nm {
                moment_matrix[i * nm + j] = q[i];
            }
        }
        Ok(Self {
            grid: grid.clone(),
            cutoff: cutoff.clone(),
            order,
            p,
            n_star: ns,
            support,
            annulus,
            moment_matrix,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn n_star(&self) -> usize {
        self.n_star
    }

    /// The discrete moment matrix; close to `-(2l+1) I` on fine grids.
    pub fn moment_matrix(&self) -> &[f64] {
        &self.moment_matrix
    }

    /// `Δ(χ Σ a_k/r^k)` on the grid for the given chart modes.
    pub fn annulus_source(&self, modes: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.grid.len()];
        for (s, &i) in self.support.iter().enumerate() {
            out[i] = modes.iter().zip(&self.annulus).map(|(c, a)| c * a[s]).sum();
        }
        out
    }

    /// `u` with `Δ_h u = ρ`, as chart plus remainder.
    pub fn apply(&self, rho: &[f64]) -> Result<Decomposition> {
        let nm = self.n_star * self.n_star;
        let q = solid_moments(rho, &self.grid, self.n_star - 1);
        let modes = solve_dense(&self.moment_matrix, &q, nm).ok_or(Error::SingularKernel)?;
        let h = self.annulus_source(&modes);
        let rest: Vec<f64> = rho.iter().zip(&h).map(|(r, a)| r - a).collect();
        let rest = RemainderField::new(self.grid.clone(), rest)?;
        let remainder = radial_multiplier_real(&rest, |k2| if k2 == 0.0 { 0.0 } else { -1.0 / k2 });
        // The periodic inverse leaves the constant free; pick the one that
        // makes the remainder vanish on average on the box faces.
        let offset = face_mean(&remainder);
        let remainder = remainder.map(|v| v - offset);
        let chart = chart_from_modes(&modes, self.order, self.p)?;
        let mut values = chart_on_grid(&chart, &self.cutoff, &self.grid).into_data();
        values.iter_mut().zip(remainder.data()).for_each(|(v, f)| *v += f);
        Ok(Decomposition { modes, chart, remainder, values })
    }

    /// `Δ_h` of a decomposition: the annulus source plus the spectral
    /// Laplacian of the remainder.
    pub fn laplacian(&self, dec: &Decomposition) -> Vec<f64> {
        let mut out = self.annulus_source(&dec.modes);
        let lf = laplacian(&dec.remainder);
        out.iter_mut().zip(lf.data()).for_each(|(o, v)| *o += v);
        out
    }

    pub fn cutoff(&self) -> &CutoffSpec {
        &self.cutoff
    }
}

fn face_mean(f: &RemainderField) -> f64 {
    let grid = f.grid();
    let shape = grid.shape();
    let (mut sum, mut count) = (0.0, 0usize);
    for i in 0..grid.len() {
        let idx = grid.unravel(i);
        if (0..3).any(|a| idx[a] == 0 || idx[a] + 1 == shape[a]) {
            sum += f.data()[i];
            count += 1;
        }
    }
    sum / count as f64
}

/// A converged equilibrium and its diagnostics.
#[derive(Clone, Debug)]
pub struct EquilibriumResult {
    pub u_star: AsymptoticFunction,
    /// `‖Δ_h u* - ψu*³ + φ‖_{L²}`.
    pub residual: f64,
    pub iterations: usize,
    pub residual_history: Vec<f64>,
    pub gmres_iterations: Vec<usize>,
    pub purity: Vec<PurityEntry>,
    /// Chart of the continuum multipole formula applied to `ψu*³ - φ`.
    pub multipole_chart: AsymptoticChart,
    pub values: Vec<f64>,
}

/// Serializable summary of an [`EquilibriumResult`].
#[derive(Clone, Debug, Serialize)]
pub struct EquilibriumSummary {
    pub residual: f64,
    pub iterations: usize,
    pub residual_history: Vec<f64>,
    pub residual_ratios: Vec<f64>,
    pub gmres_iterations: Vec<usize>,
    pub coefficient_norms: Vec<f64>,
    pub purity: Vec<PurityEntry>,
    pub sup_norm: f64,
}

impl EquilibriumResult {
    /// Successive ratios `r_{j+1} / r_j^2`, bounded for quadratic convergence.
    pub fn residual_ratios(&self) -> Vec<f64> {
        self.residual_history
            .windows(2)
            .map(|w| if w[0] > 0.0 { w[1] / (w[0] * w[0]) } else { 0.0 })
            .collect()
    }

    pub fn summary(&self) -> EquilibriumSummary {
        EquilibriumSummary {
            residual: self.residual,
            iterations: self.iterations,
            residual_history: self.residual_history.clone(),
            residual_ratios: self.residual_ratios(),
            gmres_iterations: self.gmres_iterations.clone(),
            coefficient_norms: self.u_star.chart.coeffs().iter().map(|a| a.l2_norm()).collect(),
            purity: self.purity.clone(),
            sup_norm: self.values.iter().fold(0.0, |m, v| m.max(v.abs())),
        }
    }
}

fn l2(grid: &Grid, v: &[f64]) -> f64 {
    crate::numeric::fixed_sum_by(v.len(), |i| grid.trapezoid_weight(i) * v[i] * v[i]).sqrt()
}

/// `‖Δ_h u - ψu³ + φ‖_{L²}` for a decomposed `u`.
pub fn equilibrium_residual(prob: &SemilinearProblem, inv: &ExtendedInverse, dec: &Decomposition) -> f64 {
    let lap = inv.laplacian(dec);
    let src = prob.source(&dec.values);
    let diff: Vec<f64> = lap.iter().zip(&src).map(|(a, b)| a - b).collect();
    l2(prob.grid(), &diff)
}

pub fn equilibrium_solve(prob: &SemilinearProblem) -> Result<EquilibriumResult> {
    let inv = ExtendedInverse::new(prob.grid(), &prob.cutoff, prob.order, prob.p)?;
    equilibrium_solve_with(prob, &inv)
}

/// Damped Newton on `u = Δ^{-1}(ψu³ - φ)`; each linear step solves
/// `w - Δ^{-1}(3ψu² w) = Δ^{-1}(ψu³ - φ) - u` by GMRES.
pub fn equilibrium_solve_with(prob: &SemilinearProblem, inv: &ExtendedInverse) -> Result<EquilibriumResult> {
    prob.validate()?;
    if inv.grid() != prob.grid() {
        return Err(Error::ShapeMismatch("extended inverse built for a different grid".into()));
    }
    let tol = &prob.tolerances;
    let n = prob.grid().len();
    // `dec` is always `G(rho)`; Newton steps stay in the range of `G`.
    let mut rho = prob.source(&vec![0.0; n]);
    let mut dec = inv.apply(&rho)?;
    let mut res = equilibrium_residual(prob, inv, &dec);
    let mut history = vec![res];
    let mut gmres_counts = Vec::new();
    let mut iterations = 0;
    while res > tol.newton_tol {
        if iterations >= tol.newton_max_iter {
            return Err(Error::NewtonDiverged { iterations, residual: res, history });
        }
        let u = dec.values.clone();
        let src = prob.source(&u);
        let g = inv.apply(&src)?;
        let rhs: Vec<f64> = g.values.iter().zip(&u).map(|(a, b)| a - b).collect();
        let coef: Vec<f64> = u.iter().zip(prob.psi.data()).map(|(v, s)| 3.0 * s * v * v).collect();
        let apply = |w: &[f64]| -> Vec<f64> {
            let kw: Vec<f64> = w.par_iter().zip(&coef).map(|(a, c)| a * c).collect();
            let gw = inv.apply(&kw).expect("moment matrix already factorized once").values;
            w.iter().zip(&gw).map(|(a, b)| a - b).collect()
        };
        let (w, stats) = gmres(apply, &rhs, tol.gmres_tol, tol.gmres_restart, tol.gmres_max_iter)?;
        gmres_counts.push(stats.iterations);
        // u + s w = G((1 - s) rho + s (src + 3ψu² w)) by linearity of G.
        let target: Vec<f64> = src.iter().zip(&coef).zip(&w).map(|((a, c), b)| a + c * b).collect();
        let mut step = 1.0;
        loop {
            let mix: Vec<f64> = rho.iter().zip(&target).map(|(a, b)| a + step * (b - a)).collect();
            let cand = inv.apply(&mix)?;
            let cres = equilibrium_residual(prob, inv, &cand);
            if cres < res {
                dec = cand;
                rho = mix;
                res = cres;
                break;
            }
            step *= 0.5;
            if step < 1e-4 {
                history.push(cres);
                return Err(Error::NewtonDiverged { iterations: iterations + 1, residual: res, history });
            }
        }
        iterations += 1;
        history.push(res);
    }
    let src = RemainderField::new(prob.grid().clone(), prob.source(&dec.values))?;
    let multipole_chart = multipole_extract(&src, prob.order, prob.p)?;
    let purity = eigenfunction_check(&dec.chart)?;
    let u_star = AsymptoticFunction::new(dec.chart.clone(), dec.remainder.clone(), prob.cutoff.clone())?;
    Ok(EquilibriumResult {
        u_star,
        residual: res,
        iterations,
        residual_history: history,
        gmres_iterations: gmres_counts,
        purity,
        multipole_chart,
        values: dec.values,
    })
}

/// Central-difference check of `d_u𝓕(w) = Δw - 3ψu²w` for
/// `𝓕(u) = Δu - ψu³` on periodic remainder fields.
#[derive(Clone, Debug, Serialize)]
pub struct LinearizationReport {
    pub eps: Vec<f64>,
    pub errors: Vec<f64>,
    /// Observed order between consecutive `eps`.
    pub orders: Vec<f64>,
}

pub fn linearization_check(
    prob: &SemilinearProblem,
    u: &RemainderField,
    w: &RemainderField,
    eps: &[f64],
) -> Result<LinearizationReport> {
    let psi = &prob.psi;
    let map = |v: &RemainderField| -> RemainderField {
        let lap = laplacian(v);
        let cubic = v.zip_with(psi, |a, s| s * a * a * a);
        lap.sub(&cubic)
    };
    let exact = laplacian(w).sub(&u.zip_with(psi, |a, s| 3.0 * s * a * a).zip_with(w, |c, b| c * b));
    let norm = exact.l2_norm().max(f64::MIN_POSITIVE);
    let errors: Vec<f64> = eps
        .iter()
        .map(|&e| {
            let plus = map(&u.add_scaled(w, e));
            let minus = map(&u.add_scaled(w, -e));
            let fd = plus.sub(&minus).scale(1.0 / (2.0 * e));
            fd.sub(&exact).l2_norm() / norm
        })
        .collect();
    let orders = eps
        .windows(2)
        .zip(errors.windows(2))
        .map(|(e, r)| (r[0] / r[1]).ln() / (e[0] / e[1]).ln())
        .collect();
    Ok(LinearizationReport { eps: eps.to_vec(), errors, orders })
}
