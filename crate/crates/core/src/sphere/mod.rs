//! Spectral toolkit on the unit sphere `S^{d-1}` for `d = 2, 3`.
//!
//! Functions are stored as coefficient vectors in a real orthonormal basis.
//! The ordering is documented in `docs/modes.md`:
//!
//! * `d = 2`: index 0 is `1/sqrt(2π)`, index `2l-1` is `cos(lφ)/sqrt(π)` and
//!   index `2l` is `sin(lφ)/sqrt(π)`.
//! * `d = 3`: index `l^2 + l + m` holds `Y_{l,m}`; `m > 0` carries
//!   `cos(mφ)`, `m < 0` carries `sin(|m|φ)`.

mod grid;
pub mod legendre;

pub use grid::SphereGrid;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use legendre::{normalized_legendre, table_len, tri_index};

const INV_SQRT_PI: f64 = 0.564_189_583_547_756_3;
const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// Number of basis modes up to degree `l_max`.
pub fn mode_count(d: usize, l_max: usize) -> usize {
    match d {
        2 => 2 * l_max + 1,
        _ => (l_max + 1) * (l_max + 1),
    }
}

/// Coefficient index of mode `(l, m)`.
///
/// For `d = 2` only `m ∈ {-l, 0, l}` is meaningful: `m = l` is the cosine
/// mode, `m = -l` the sine mode and `m = 0` is reserved for `l = 0`.
pub fn mode_index(d: usize, l: usize, m: i64) -> usize {
    match d {
        2 => {
            if l == 0 {
                0
            } else if m >= 0 {
                2 * l - 1
            } else {
                2 * l
            }
        }
        _ => ((l * l + l) as i64 + m) as usize,
    }
}

/// Degree `l` of the mode stored at `index`.
pub fn mode_degree(d: usize, index: usize) -> usize {
    match d {
        2 => index.div_ceil(2),
        _ => (index as f64).sqrt().floor() as usize,
    }
}

/// Eigenvalue of `-Δ_θ` on degree-`l` harmonics: `l(l + d - 2)`.
pub fn eigenvalue(d: usize, l: usize) -> f64 {
    (l * (l + d - 2)) as f64
}

/// Area of `S^{d-1}`.
pub fn sphere_area(d: usize) -> f64 {
    match d {
        2 => 2.0 * std::f64::consts::PI,
        _ => 4.0 * std::f64::consts::PI,
    }
}

/// Value of the constant basis function, `1/sqrt(|S^{d-1}|)`.
pub fn basis_constant(d: usize) -> f64 {
    1.0 / sphere_area(d).sqrt()
}

/// Values of all basis modes at the direction of `x` (need not be
/// normalized, must be nonzero). Writes `mode_count(d, l_max)` entries.
pub fn basis_values(d: usize, l_max: usize, x: &[f64], out: &mut [f64]) {
    match d {
        2 => {
            let phi = x[1].atan2(x[0]);
            out[0] = INV_SQRT_2PI;
            for l in 1..=l_max {
                let (s, c) = (l as f64 * phi).sin_cos();
                out[2 * l - 1] = c * INV_SQRT_PI;
                out[2 * l] = s * INV_SQRT_PI;
            }
        }
        _ => {
            let rho = x[0].hypot(x[1]);
            let r = rho.hypot(x[2]);
            let (ct, st) = (x[2] / r, rho / r);
            let phi = x[1].atan2(x[0]);
            let mut p = vec![0.0; table_len(l_max)];
            normalized_legendre(l_max, ct, st, &mut p);
            for l in 0..=l_max {
                let base = l * l + l;
                out[base] = p[tri_index(l, 0)] * INV_SQRT_2PI;
                for m in 1..=l {
                    let (s, c) = (m as f64 * phi).sin_cos();
                    let pl = p[tri_index(l, m)] * INV_SQRT_PI;
                    out[base + m] = pl * c;
                    out[base - m] = pl * s;
                }
            }
        }
    }
}

/// A real function on `S^{d-1}` in the harmonic basis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SphereFunction {
    d: usize,
    l_max: usize,
    coeffs: Vec<f64>,
}

impl SphereFunction {
    pub fn new(d: usize, l_max: usize, coeffs: Vec<f64>) -> Result<Self> {
        check_dimension(d)?;
        let expected = mode_count(d, l_max);
        if coeffs.len() != expected {
            return Err(Error::ShapeMismatch(format!(
                "sphere function with d = {d}, L_max = {l_max} needs {expected} coefficients, got {}",
                coeffs.len()
            )));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite("sphere function coefficients"));
        }
        Ok(Self { d, l_max, coeffs })
    }

    pub fn zeros(d: usize, l_max: usize) -> Self {
        Self {
            d,
            l_max,
            coeffs: vec![0.0; mode_count(d, l_max)],
        }
    }

    /// The constant function with value `c`.
    pub fn constant(d: usize, l_max: usize, c: f64) -> Self {
        let mut f = Self::zeros(d, l_max);
        f.coeffs[0] = c * sphere_area(d).sqrt();
        f
    }

    /// A single unit basis mode.
    pub fn mode(d: usize, l_max: usize, l: usize, m: i64) -> Self {
        assert!(l <= l_max, "degree {l} exceeds L_max {l_max}");
        let mut f = Self::zeros(d, l_max);
        f.coeffs[mode_index(d, l, m)] = 1.0;
        f
    }

    pub fn dimension(&self) -> usize {
        self.d
    }

    pub fn l_max(&self) -> usize {
        self.l_max
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [f64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0.0)
    }

    /// Point value at the direction of `x`.
    pub fn eval(&self, x: &[f64]) -> f64 {
        let mut b = vec![0.0; self.coeffs.len()];
        basis_values(self.d, self.l_max, x, &mut b);
        self.coeffs.iter().zip(&b).map(|(c, v)| c * v).sum()
    }

    /// Mode-wise map `c ↦ f(l) c`.
    pub fn map_degree(&self, f: impl Fn(usize) -> f64) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c * f(mode_degree(self.d, i)))
            .collect();
        Self { coeffs, ..*self }
    }

    /// Laplace–Beltrami operator, diagonal in this basis.
    pub fn laplace_beltrami(&self) -> Self {
        let d = self.d;
        self.map_degree(|l| -eigenvalue(d, l))
    }

    /// `Δ_θ a + c a` for a scalar shift `c`.
    pub fn shifted_laplacian(&self, c: f64) -> Self {
        let d = self.d;
        self.map_degree(|l| c - eigenvalue(d, l))
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
            ..*self
        }
    }

    /// `self + s * other`, widened to the larger degree.
    pub fn add_scaled(&self, other: &Self, s: f64) -> Self {
        assert_eq!(self.d, other.d, "sphere dimensions differ");
        let mut out = self.with_l_max(self.l_max.max(other.l_max));
        for (i, c) in other.coeffs.iter().enumerate() {
            out.coeffs[i] += s * c;
        }
        out
    }

    /// Copy truncated or zero-padded to a new maximal degree. The mode
    /// ordering is degree-major, so this is a prefix operation.
    pub fn with_l_max(&self, l_max: usize) -> Self {
        let n = mode_count(self.d, l_max);
        let mut coeffs = vec![0.0; n];
        let k = n.min(self.coeffs.len());
        coeffs[..k].copy_from_slice(&self.coeffs[..k]);
        Self {
            d: self.d,
            l_max,
            coeffs,
        }
    }

    /// L² norm on the sphere (coefficient 2-norm, by orthonormality).
    pub fn l2_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    pub fn inner(&self, other: &Self) -> f64 {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a * b)
            .sum()
    }

    /// Spectral mass per degree, `Σ_m c_{l,m}^2` for `l = 0..=L_max`.
    pub fn degree_spectrum(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.l_max + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            out[mode_degree(self.d, i)] += c * c;
        }
        out
    }
}

/// Sobolev norm of order `l` in `L^p(S^{d-1})`.
///
/// For `p = 2` this is the spectral norm `(Σ (1 + λ_mode)^l c^2)^{1/2}`. For
/// other `p` it is the quadrature `L^p` norm of the Bessel potential
/// `(1 - Δ_θ)^{l/2} a`, synthesized on a grid oversampled by a factor 4 in
/// degree. Both agree at `p = 2`.
pub fn sphere_sobolev_norm(a: &SphereFunction, l: u32, p: f64) -> Result<f64> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(invalid("p", format!("must lie in (1, ∞), got {p}")));
    }
    let d = a.d;
    if p == 2.0 {
        let s: f64 = a
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| (1.0 + eigenvalue(d, mode_degree(d, i))).powi(l as i32) * c * c)
            .sum();
        return Ok(s.sqrt());
    }
    if a.is_zero() {
        return Ok(0.0);
    }
    let lifted = a.map_degree(|deg| (1.0 + eigenvalue(d, deg)).powf(0.5 * l as f64));
    let grid = SphereGrid::new(d, 4 * a.l_max + 4)?;
    let values = grid.synthesize(&lifted)?;
    let s: f64 = values
        .iter()
        .zip(grid.weights())
        .map(|(v, w)| w * v.abs().powf(p))
        .sum();
    Ok(s.powf(1.0 / p))
}

pub(crate) fn check_dimension(d: usize) -> Result<()> {
    if d == 2 || d == 3 {
        Ok(())
    } else {
        Err(invalid("d", format!("only d = 2 and d = 3 are supported, got {d}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mode_indexing_roundtrip() {
        for d in [2, 3] {
            for l in 0..6usize {
                let ms: Vec<i64> = if d == 2 {
                    if l == 0 { vec![0] } else { vec![-(l as i64), l as i64] }
                } else {
                    (-(l as i64)..=l as i64).collect()
                };
                for m in ms {
                    assert_eq!(mode_degree(d, mode_index(d, l, m)), l);
                }
            }
        }
        assert_eq!(mode_index(3, 1, 0), 2);
        assert_eq!(mode_index(2, 3, 3), 5);
    }

    #[test]
    fn laplace_beltrami_eigenvalues() {
        let y10 = SphereFunction::mode(3, 2, 1, 0);
        assert_eq!(y10.laplace_beltrami(), y10.scale(-2.0));
        let c3 = SphereFunction::mode(2, 4, 3, 3);
        assert_eq!(c3.laplace_beltrami(), c3.scale(-9.0));
        let one = SphereFunction::constant(3, 3, 1.0);
        assert!(one.laplace_beltrami().is_zero());
    }

    #[test]
    fn sobolev_norm_examples() {
        let y10 = SphereFunction::mode(3, 1, 1, 0);
        assert_eq!(sphere_sobolev_norm(&y10, 0, 2.0).unwrap(), 1.0);
        let n1 = sphere_sobolev_norm(&y10, 1, 2.0).unwrap();
        assert!((n1 - 3f64.sqrt()).abs() < 1e-15);
        assert_eq!(sphere_sobolev_norm(&SphereFunction::zeros(3, 2), 3, 4.0).unwrap(), 0.0);
    }

    #[test]
    fn constant_evaluates_to_its_value() {
        let c = SphereFunction::constant(3, 2, 2.5);
        assert!((c.eval(&[0.3, -0.2, 0.9]) - 2.5).abs() < 1e-14);
        let c = SphereFunction::constant(2, 2, -1.5);
        assert!((c.eval(&[0.3, -0.2]) + 1.5).abs() < 1e-14);
    }
}
