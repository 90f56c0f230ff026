use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::spaces::{CutoffSpec, Grid, RemainderField};
use crate::sphere::{basis_values, mode_count, SphereFunction};

use super::coefficients::CoefficientFlow;

/// Coarsest spacing that still resolves the cutoff annulus `1 <= r <= 2`.
pub const MAX_SOURCE_SPACING: f64 = 0.25;

/// Polynomial-in-time forcing `h(t) = Σ_j h_j t^j` of the remainder.
#[derive(Clone, Debug, PartialEq)]
pub struct DuhamelSource {
    grid: Grid,
    terms: Vec<RemainderField>,
}

impl DuhamelSource {
    pub fn zero(grid: Grid) -> Self {
        Self {
            terms: vec![RemainderField::zeros(grid.clone())],
            grid,
        }
    }

    pub fn from_terms(grid: Grid, terms: Vec<RemainderField>) -> Result<Self> {
        if terms.is_empty() {
            return Ok(Self::zero(grid));
        }
        if terms.iter().any(|t| t.grid() != &grid) {
            return Err(Error::ShapeMismatch("source terms on different grids".into()));
        }
        Ok(Self { grid, terms })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// `h_j`, lowest power first.
    pub fn terms(&self) -> &[RemainderField] {
        &self.terms
    }

    /// Degree in `t`, ignoring identically zero top terms.
    pub fn degree(&self) -> usize {
        self.terms
            .iter()
            .rposition(|t| t.data().iter().any(|&v| v != 0.0))
            .unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(|t| t.data().iter().all(|&v| v == 0.0))
    }

    pub fn eval(&self, t: f64) -> RemainderField {
        let mut acc = self.terms.last().expect("nonempty").clone();
        for h in self.terms.iter().rev().skip(1) {
            acc = h.add_scaled(&acc, t);
        }
        acc
    }

    /// The source of the flow restarted at `t0`: `s ↦ h(t0 + s)`.
    pub fn shifted(&self, t0: f64) -> Self {
        let deg = self.terms.len();
        let terms = (0..deg)
            .map(|i| {
                let mut acc = RemainderField::zeros(self.grid.clone());
                let mut binom = 1.0;
                let mut pow = 1.0;
                for (j, h) in self.terms.iter().enumerate().skip(i) {
                    if j > i {
                        binom = binom * j as f64 / (j - i) as f64;
                        pow *= t0;
                    }
                    acc.axpy_in_place(binom * pow, h);
                }
                acc
            })
            .collect();
        Self {
            grid: self.grid.clone(),
            terms,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.terms.len().max(other.terms.len());
        let zero = RemainderField::zeros(self.grid.clone());
        let terms = (0..n)
            .map(|j| {
                let a = self.terms.get(j).unwrap_or(&zero);
                let b = other.terms.get(j).unwrap_or(&zero);
                a.add(b)
            })
            .collect();
        Self {
            grid: self.grid.clone(),
            terms,
        }
    }
}

/// Sample the forcing produced by the cutoff and the truncated tail:
///
/// `h = χ [T_{N*-1}/r^{N*+1} + T_{N*}/r^{N*+2}] + 2χ' ∂_r ã + (χ'' + (d-1)χ'/r) ã`
///
/// with `T_k = Δ_θ a_k + k(k+2-d) a_k` and `ã = Σ_k a_k/r^k`.
pub fn assemble_source(flow: &CoefficientFlow, cutoff: &CutoffSpec, grid: &Grid) -> Result<DuhamelSource> {
    if grid.spacing() > MAX_SOURCE_SPACING {
        return Err(Error::GridTooCoarse {
            spacing: grid.spacing(),
            max: MAX_SOURCE_SPACING,
        });
    }
    let chart = flow.chart();
    let d = chart.dimension();
    if grid.dimension() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: grid.dimension(),
        });
    }
    let n = chart.start();
    let ns = chart.n_star();
    let l_max = chart.l_max();
    let nmodes = mode_count(d, l_max);
    let nterms = flow.max_degree() + 1;
    let ks: Vec<usize> = chart.ks().collect();

    // coeff[j][ik]: coefficient of t^j in a_{ks[ik]}; tails[j]: (k, T_k part).
    let zero = SphereFunction::zeros(d, l_max);
    let coeff: Vec<Vec<SphereFunction>> = (0..nterms)
        .map(|j| {
            ks.iter()
                .map(|&k| flow.polynomial(k).get(j).cloned().unwrap_or_else(|| zero.clone()))
                .collect()
        })
        .collect();
    let tail_ks: Vec<usize> = [ns.checked_sub(1), Some(ns)]
        .into_iter()
        .flatten()
        .filter(|&k| k >= n)
        .collect();
    let tails: Vec<Vec<(usize, SphereFunction)>> = (0..nterms)
        .map(|j| {
            tail_ks
                .iter()
                .map(|&k| {
                    let shift = (k as i64 * (k as i64 + 2 - d as i64)) as f64;
                    (k, coeff[j][k - n].shifted_laplacian(shift))
                })
                .collect()
        })
        .collect();

    let npts = grid.len();
    let mut flat = vec![0.0; npts * nterms];
    flat.par_chunks_mut(nterms).enumerate().for_each(|(i, out)| {
        let x = grid.point(i);
        let r = x[..d].iter().map(|v| v * v).sum::<f64>().sqrt();
        let (chi, dchi, ddchi) = cutoff.eval_with_derivatives(r);
        if chi == 0.0 && dchi == 0.0 && ddchi == 0.0 {
            return;
        }
        let mut b = vec![0.0; nmodes];
        basis_values(d, l_max, &x[..d], &mut b);
        let dot = |a: &SphereFunction| -> f64 { a.coeffs().iter().zip(&b).map(|(c, v)| c * v).sum() };
        let lap_chi = ddchi + (d as f64 - 1.0) * dchi / r;
        for j in 0..nterms {
            let mut v = 0.0;
            if chi != 0.0 {
                for (k, tk) in &tails[j] {
                    v += chi * dot(tk) / r.powi(*k as i32 + 2);
                }
            }
            if dchi != 0.0 || ddchi != 0.0 {
                for (ik, &k) in ks.iter().enumerate() {
                    let a = dot(&coeff[j][ik]);
                    let rk = r.powi(k as i32);
                    v += a * (lap_chi / rk - 2.0 * k as f64 * dchi / (rk * r));
                }
            }
            out[j] = v;
        }
    });
    let terms = (0..nterms)
        .map(|j| {
            let data = (0..npts).map(|i| flat[i * nterms + j]).collect();
            RemainderField::new(grid.clone(), data)
        })
        .collect::<Result<Vec<_>>>()?;
    DuhamelSource::from_terms(grid.clone(), terms)
}
