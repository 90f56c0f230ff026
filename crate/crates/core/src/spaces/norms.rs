use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::numeric::{fd_weights, fixed_sum_by};
use crate::sphere::sphere_sobolev_norm;

use super::chart::AsymptoticFunction;
use super::field::{lp_norm_weighted, Grid, RemainderField};

/// Largest derivative order supported by the stencil tables.
pub const MAX_NORM_ORDER: u32 = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormFamily {
    /// `Σ_{|α|≤m} ‖⟨x⟩^δ ∂^α f‖_{L^p}`.
    HWeighted,
    /// `Σ_{|α|≤m} ‖⟨x⟩^{δ+|α|} ∂^α f‖_{L^p}`.
    WWeighted,
    /// Sphere norms of the chart plus the remainder norm.
    AAsymptotic,
    /// Norm of a single sphere function.
    SphereSobolev,
}

/// Selects which norm to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormSpec {
    pub family: NormFamily,
    pub m: u32,
    pub p: f64,
    /// `δ` for the H family, `γ` for the W family; ignored by the A family,
    /// whose remainder weight is the chart order `N`.
    pub delta: f64,
    #[serde(default)]
    pub gamma0: Option<f64>,
}

impl NormSpec {
    pub fn h(m: u32, p: f64, delta: f64) -> Self {
        Self {
            family: NormFamily::HWeighted,
            m,
            p,
            delta,
            gamma0: None,
        }
    }

    pub fn w(m: u32, p: f64, gamma: f64) -> Self {
        Self {
            family: NormFamily::WWeighted,
            m,
            p,
            delta: gamma,
            gamma0: None,
        }
    }

    pub fn asymptotic(m: u32, p: f64) -> Self {
        Self {
            family: NormFamily::AAsymptotic,
            m,
            p,
            delta: 0.0,
            gamma0: None,
        }
    }

    pub fn validate(&self, d: usize) -> Result<()> {
        if !(self.p > 1.0 && self.p.is_finite()) {
            return Err(invalid("p", format!("must lie in (1, ∞), got {}", self.p)));
        }
        if !self.delta.is_finite() {
            return Err(invalid("delta", "must be finite"));
        }
        if let Some(g) = self.gamma0 {
            let s = g + d as f64 / self.p;
            if !(0.0 < s && s < 1.0) {
                return Err(invalid("gamma0", format!("need 0 < γ0 + d/p < 1, got {s}")));
            }
        }
        Ok(())
    }
}

/// Default `γ0` for the W family: `(1 - d/p)/2` when `p > d`, otherwise
/// `1/2 - d/p` so that `γ0 + d/p = 1/2`.
pub fn default_gamma0(d: usize, p: f64) -> f64 {
    let r = d as f64 / p;
    if p > d as f64 {
        0.5 * (1.0 - r)
    } else {
        0.5 - r
    }
}

/// `⟨x⟩ = (1 + |x|^2)^{1/2}`.
#[inline]
pub fn bracket(x: &[f64; 3]) -> f64 {
    (1.0 + x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt()
}

#[inline]
fn weight(x: &[f64; 3], w: f64) -> f64 {
    if w == 0.0 {
        1.0
    } else {
        bracket(x).powf(w)
    }
}

/// The weight map `J_δ f = ⟨x⟩^δ f`.
pub fn j_delta(f: &RemainderField, delta: f64) -> RemainderField {
    f.map_with_point(|x, v| weight(x, delta) * v)
}

/// Finite-difference derivative along one axis with a centered window of
/// `width` points, shifted inward near the faces.
pub(crate) struct AxisStencil {
    width: usize,
    half: usize,
    /// `weights[offset]` for a node sitting at `offset` inside its window.
    weights: Vec<Vec<f64>>,
}

impl AxisStencil {
    pub(crate) fn new(order: usize, h: f64) -> Self {
        let width = if order <= 2 { 5 } else { 7 };
        let nodes: Vec<f64> = (0..width).map(|j| j as f64).collect();
        let scale = h.powi(order as i32);
        let weights = (0..width)
            .map(|off| {
                fd_weights(off as f64, &nodes, order)
                    .into_iter()
                    .map(|w| w / scale)
                    .collect()
            })
            .collect();
        Self {
            width,
            half: width / 2,
            weights,
        }
    }

    pub(crate) fn apply(&self, grid: &Grid, data: &[f64], axis: usize) -> Vec<f64> {
        let n = grid.shape()[axis];
        let stride = grid.strides()[axis];
        (0..data.len())
            .into_par_iter()
            .map(|i| {
                let pos = (i / stride) % n;
                let start = pos.saturating_sub(self.half).min(n - self.width);
                let w = &self.weights[pos - start];
                let base = i - (pos - start) * stride;
                w.iter()
                    .enumerate()
                    .map(|(j, c)| c * data[base + j * stride])
                    .sum()
            })
            .collect()
    }
}

fn multi_indices(d: usize, m: u32) -> Vec<[u32; 3]> {
    let mut out = Vec::new();
    for a in 0..=m {
        for b in 0..=m {
            for c in 0..=m {
                let idx = [a, if d > 1 { b } else { 0 }, if d > 2 { c } else { 0 }];
                if (d < 2 && b > 0) || (d < 3 && c > 0) {
                    continue;
                }
                if idx.iter().sum::<u32>() <= m {
                    out.push(idx);
                }
            }
        }
    }
    out
}

/// Weighted Sobolev norm of a grid function in the H or W family.
pub fn weighted_norm(f: &RemainderField, spec: &NormSpec) -> Result<f64> {
    let grid = f.grid();
    spec.validate(grid.dimension())?;
    let w_family = match spec.family {
        NormFamily::HWeighted => false,
        NormFamily::WWeighted => true,
        other => {
            return Err(invalid(
                "family",
                format!("weighted_norm evaluates H or W norms, got {other:?}"),
            ))
        }
    };
    if spec.m > MAX_NORM_ORDER {
        return Err(invalid(
            "m",
            format!("derivative order {} exceeds the stencil table limit {MAX_NORM_ORDER}", spec.m),
        ));
    }
    if f.data().iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("weighted_norm input"));
    }
    if spec.m > 0 && grid.shape().iter().any(|&n| n < 7) {
        return Err(Error::ShapeMismatch(
            "derivative stencils need at least 7 samples per axis".into(),
        ));
    }
    let d = grid.dimension();
    let h = grid.spacing();
    let stencils: Vec<AxisStencil> = (1..=spec.m as usize).map(|o| AxisStencil::new(o, h)).collect();
    let mut total = 0.0;
    for alpha in multi_indices(d, spec.m) {
        let order: u32 = alpha.iter().sum();
        let mut g = std::borrow::Cow::Borrowed(f.data());
        for (axis, &k) in alpha.iter().enumerate().take(d) {
            if k > 0 {
                g = std::borrow::Cow::Owned(stencils[k as usize - 1].apply(grid, &g, axis));
            }
        }
        let wexp = if w_family { spec.delta + order as f64 } else { spec.delta };
        total += lp_norm_weighted(grid, spec.p, |i| weight(&grid.point(i), wexp) * g[i]);
    }
    Ok(total)
}

/// Norm in the asymptotic space: sphere norms of the chart coefficients at
/// regularity `m + 1 + N* - k` plus the remainder in `H^{m,p}_N`.
pub fn asymptotic_norm(v: &AsymptoticFunction, spec: &NormSpec) -> Result<f64> {
    if spec.family != NormFamily::AAsymptotic {
        return Err(invalid("family", "asymptotic_norm needs the A family"));
    }
    spec.validate(v.dimension())?;
    let chart = &v.chart;
    let mut total = 0.0;
    for (k, a) in chart.ks().zip(chart.coeffs()) {
        let reg = (spec.m as i64 + 1 + chart.n_star() as i64 - k as i64).max(0) as u32;
        total += sphere_sobolev_norm(a, reg, spec.p)?;
    }
    let rem = NormSpec::h(spec.m, spec.p, chart.order() as f64);
    Ok(total + weighted_norm(&v.remainder, &rem)?)
}

/// Maximum of `⟨x⟩^δ ⟨y⟩^{-δ} / ⟨x - y⟩^{|δ|}` over the given pairs.
pub fn weight_inequality_check(delta: f64, samples: &[([f64; 3], [f64; 3])]) -> f64 {
    samples
        .iter()
        .map(|(x, y)| {
            let diff = [x[0] - y[0], x[1] - y[1], x[2] - y[2]];
            (bracket(x) / bracket(y)).powf(delta) / bracket(&diff).powf(delta.abs())
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

/// `‖f‖_{L^p_δ}` (the `m = 0` weighted norm).
pub fn weighted_lp(f: &RemainderField, p: f64, delta: f64) -> f64 {
    let grid = f.grid();
    let data = f.data();
    let s = fixed_sum_by(grid.len(), |i| {
        grid.trapezoid_weight(i) * (weight(&grid.point(i), delta) * data[i]).abs().powf(p)
    });
    s.powf(1.0 / p)
}
