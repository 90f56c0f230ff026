//! Far-field multipole coefficients of Newtonian potentials.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::sphere::{basis_values, mode_count, SphereFunction};
use crate::spaces::{n_star, AsymptoticChart, Grid, RemainderField};
use crate::sphere::basis_constant;

const CHUNK: usize = 4096;

/// Solid-harmonic moments `q_{lm} = ∫ ρ(x) |x|^l Y_{lm}(x/|x|) dx` for
/// `l <= l_max`, by the uniform-weight rule on the grid. Entry order follows
/// the sphere mode index `l² + l + m`.
pub fn solid_moments(values: &[f64], grid: &Grid, l_max: usize) -> Vec<f64> {
    let nm = mode_count(3, l_max);
    let w = grid.cell_volume();
    let partials: Vec<Vec<f64>> = (0..values.len().div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let mut acc = vec![0.0; nm];
            let mut b = vec![0.0; nm];
            for i in c * CHUNK..((c + 1) * CHUNK).min(values.len()) {
                let v = values[i];
                if v == 0.0 {
                    continue;
                }
                let x = grid.point(i);
                let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
                if r == 0.0 {
                    acc[0] += v * basis_constant(3);
                    continue;
                }
                basis_values(3, l_max, &x, &mut b);
                let mut rl = 1.0;
                for l in 0..=l_max {
                    for j in l * l..(l + 1) * (l + 1) {
                        acc[j] += v * rl * b[j];
                    }
                    rl *= r;
                }
            }
            acc
        })
        .collect();
    let mut out = vec![0.0; nm];
    for p in &partials {
        for (o, v) in out.iter_mut().zip(p) {
            *o += v;
        }
    }
    out.iter_mut().for_each(|v| *v *= w);
    out
}

/// Chart coefficients from moments: `a_k = -(1/(2k-1)) Σ_m q_{k-1,m} Y_{k-1,m}`.
pub fn chart_from_moments(moments: &[f64], order: usize, p: f64) -> Result<AsymptoticChart> {
    let ns = n_star(order, 3, p);
    if moments.len() < ns * ns {
        return Err(Error::ShapeMismatch(format!("need {} moments for N* = {ns}, got {}", ns * ns, moments.len())));
    }
    let coeffs = (1..=ns)
        .map(|k| {
            let l = k - 1;
            let mut a = SphereFunction::zeros(3, ns - 1);
            for j in l * l..(l + 1) * (l + 1) {
                a.coeffs_mut()[j] = -moments[j] / (2 * l + 1) as f64;
            }
            a
        })
        .collect();
    AsymptoticChart::new(3, 1, order, p, 0, coeffs)
}

/// Place a flat vector of degree-`(k-1)` coefficients (sphere mode order)
/// into an `n = 1` chart.
pub fn chart_from_modes(modes: &[f64], order: usize, p: f64) -> Result<AsymptoticChart> {
    let ns = n_star(order, 3, p);
    if modes.len() != ns * ns {
        return Err(Error::ShapeMismatch(format!("need {} modes for N* = {ns}, got {}", ns * ns, modes.len())));
    }
    let coeffs = (1..=ns)
        .map(|k| {
            let l = k - 1;
            let mut a = SphereFunction::zeros(3, ns - 1);
            a.coeffs_mut()[l * l..(l + 1) * (l + 1)].copy_from_slice(&modes[l * l..(l + 1) * (l + 1)]);
            a
        })
        .collect();
    AsymptoticChart::new(3, 1, order, p, 0, coeffs)
}

/// Chart of `Δ^{-1} ρ` in the `n = 1` subspace: `Δ^{-1}ρ ~ Σ_{k=1}^{N*} a_k(θ)/r^k`.
pub fn multipole_extract(rho: &RemainderField, order: usize, p: f64) -> Result<AsymptoticChart> {
    Ok(multipole_extract_with_noise(rho, order, p)?.chart)
}

/// A multipole chart with a quadrature-noise estimate per coefficient.
#[derive(Clone, Debug)]
pub struct MultipoleReport {
    pub chart: AsymptoticChart,
    /// `‖a_k‖` for `k = 1..=N*`.
    pub norms: Vec<f64>,
    /// Difference against the same moments on the grid subsampled by two.
    pub noise: Vec<f64>,
    /// Coefficients whose noise exceeds 10% of their size.
    pub warnings: Vec<String>,
}

pub fn multipole_extract_with_noise(rho: &RemainderField, order: usize, p: f64) -> Result<MultipoleReport> {
    if rho.dimension() != 3 {
        return Err(invalid("d", "multipole extraction is implemented for d = 3"));
    }
    let ns = n_star(order, 3, p);
    let l_max = ns - 1;
    let grid = rho.grid();
    let fine = solid_moments(rho.data(), grid, l_max);
    let chart = chart_from_moments(&fine, order, p)?;

    // A second rule on the sub-lattice of even indices (spacing 2h).
    let masked: Vec<f64> = (0..grid.len())
        .map(|i| {
            let idx = grid.unravel(i);
            if idx.iter().all(|v| v % 2 == 0) {
                8.0 * rho.data()[i]
            } else {
                0.0
            }
        })
        .collect();
    let coarse = solid_moments(&masked, grid, l_max);
    let noise: Vec<f64> = (1..=ns)
        .map(|k| {
            let l = k - 1;
            ((l * l)..(l + 1) * (l + 1))
                .map(|j| ((coarse[j] - fine[j]) / (2 * l + 1) as f64).powi(2))
                .sum::<f64>()
                .sqrt()
        })
        .collect();
    let norms: Vec<f64> = chart.coeffs().iter().map(|a| a.l2_norm()).collect();
    let scale = norms.iter().cloned().fold(0.0, f64::max);
    let warnings = norms
        .iter()
        .zip(&noise)
        .enumerate()
        .filter(|(_, (n, e))| **n > 1e-10 * scale && **e > 0.1 * **n)
        .map(|(j, (n, e))| format!("a_{}: quadrature noise {e:.2e} exceeds 10% of |a_k| = {n:.2e}", j + 1))
        .collect();
    Ok(MultipoleReport { chart, norms, noise, warnings })
}

/// Per-coefficient check that `a_k` is an eigenfunction of `Δ_θ` with
/// eigenvalue `-k(k-1)`.
#[derive(Clone, Debug, Serialize)]
pub struct PurityEntry {
    pub k: usize,
    /// Fraction of spectral mass in degree `k - 1`; 1 for a zero coefficient.
    pub purity: f64,
    /// `‖Δ_θ a_k + k(k-1) a_k‖ / ‖a_k‖`, 0 for a zero coefficient.
    pub eigen_residual: f64,
    pub norm: f64,
}

pub fn eigenfunction_check(chart: &AsymptoticChart) -> Result<Vec<PurityEntry>> {
    if chart.dimension() != 3 || chart.start() != 1 {
        return Err(invalid("chart", "eigenfunction check expects a d = 3 chart starting at k = 1"));
    }
    Ok(chart
        .ks()
        .zip(chart.coeffs())
        .map(|(k, a)| {
            let spec = a.degree_spectrum();
            let total: f64 = spec.iter().sum();
            let norm = total.sqrt();
            if total == 0.0 {
                return PurityEntry { k, purity: 1.0, eigen_residual: 0.0, norm };
            }
            let inside = spec.get(k - 1).copied().unwrap_or(0.0);
            let shifted = a.shifted_laplacian((k * (k - 1)) as f64);
            PurityEntry { k, purity: inside / total, eigen_residual: shifted.l2_norm() / a.l2_norm(), norm }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pure_and_impure_coefficients() {
        let mut chart = AsymptoticChart::zeros(3, 1, 3, 4.0, 0, 2).unwrap();
        chart.set_coeff(1, SphereFunction::constant(3, 2, 0.3)).unwrap();
        chart.set_coeff(2, SphereFunction::mode(3, 2, 1, -1)).unwrap();
        let mut mixed = SphereFunction::mode(3, 2, 2, 0);
        mixed.coeffs_mut()[1] = 0.5;
        chart.set_coeff(3, mixed).unwrap();
        let rep = eigenfunction_check(&chart).unwrap();
        assert!((rep[0].purity - 1.0).abs() < 1e-15 && rep[0].eigen_residual < 1e-15);
        assert!((rep[1].purity - 1.0).abs() < 1e-15 && rep[1].eigen_residual < 1e-15);
        assert!(rep[2].purity < 0.99);
    }
}
