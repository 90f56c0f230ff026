//! Resolvent applied to grid fields.

use num_complex::Complex64;
use rayon::prelude::*;

use super::kernel::principal_sqrt;
use crate::error::{Error, Result};
use crate::fft::{radial_multiplier, radial_multiplier_complex};
use crate::numeric::{composite_gauss_legendre, fixed_sum_by};
use crate::spaces::{bracket, ComplexField, RemainderField};

/// `R(λ) f` by the multiplier `1/(λ + |ξ|^2)` on the periodic box.
pub fn resolvent_apply(f: &RemainderField, lambda: Complex64) -> Result<ComplexField> {
    principal_sqrt(lambda)?;
    Ok(radial_multiplier(f, |k2| 1.0 / (lambda + k2)))
}

/// `‖(λ - Δ_h) R(λ) f - f‖_2 / ‖f‖_2` with the discrete spectral Laplacian.
pub fn resolvent_identity_residual(f: &RemainderField, lambda: Complex64) -> Result<f64> {
    let u = resolvent_apply(f, lambda)?;
    let back = radial_multiplier_complex(&u, |k2| lambda + k2);
    let diff = back.add_scaled(&ComplexField::from_real(f), Complex64::new(-1.0, 0.0));
    let norm = f.l2_norm();
    if norm == 0.0 {
        return Ok(diff.lp_norm(2.0));
    }
    Ok(diff.lp_norm(2.0) / norm)
}

/// `R(λ) f` at `targets` by direct quadrature of the `d = 3` kernel in polar
/// coordinates centred at each target, so the `1/r` singularity cancels
/// against the volume element. `f` is an exact pointwise evaluator.
pub fn resolvent_apply_kernel<F>(f: F, lambda: Complex64, targets: &[[f64; 3]], radius: f64) -> Result<Vec<Complex64>>
where
    F: Fn(&[f64; 3]) -> f64 + Sync,
{
    let s = principal_sqrt(lambda)?;
    if !(radius > 0.0) {
        return Err(Error::InvalidParameter { name: "radius", reason: format!("must be positive, got {radius}") });
    }
    let radial = composite_gauss_legendre(16, 48, 0.0, radius);
    let polar = composite_gauss_legendre(16, 2, -1.0, 1.0);
    let n_az = 48;
    let two_pi = 2.0 * std::f64::consts::PI;
    let values = targets
        .par_iter()
        .map(|x| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (&r, &wr) in radial.0.iter().zip(&radial.1) {
                let mut shell = 0.0;
                for (&c, &wc) in polar.0.iter().zip(&polar.1) {
                    let sn = (1.0 - c * c).max(0.0).sqrt();
                    let ring = fixed_sum_by(n_az, |j| {
                        let phi = two_pi * (j as f64 + 0.5) / n_az as f64;
                        let y = [x[0] + r * sn * phi.cos(), x[1] + r * sn * phi.sin(), x[2] + r * c];
                        f(&y)
                    });
                    shell += wc * ring * two_pi / n_az as f64;
                }
                acc += wr * r * (-s * r).exp() * shell / (4.0 * std::f64::consts::PI);
            }
            acc
        })
        .collect();
    Ok(values)
}

/// `‖⟨x⟩^δ |u|‖_{L^p}` of a complex field by the trapezoid rule.
pub fn weighted_lp_complex(u: &ComplexField, p: f64, delta: f64) -> f64 {
    let grid = u.grid();
    let data = u.data();
    let s = fixed_sum_by(grid.len(), |i| {
        let x = grid.point(i);
        grid.trapezoid_weight(i) * (bracket(&x).powf(delta) * data[i].norm()).powf(p)
    });
    s.powf(1.0 / p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::Grid;

    #[test]
    fn identity_residual_is_roundoff() {
        let g = Grid::centered(2, 64, 8.0).unwrap();
        let f = RemainderField::from_fn(g, |x| (-(x[0] * x[0] + 2.0 * x[1] * x[1])).exp() * (1.0 + x[0]));
        let r = resolvent_identity_residual(&f, Complex64::new(-3.0, 0.5)).unwrap();
        assert!(r < 1e-12, "{r}");
    }

    #[test]
    fn negative_axis_is_rejected() {
        let g = Grid::centered(2, 8, 1.0).unwrap();
        let f = RemainderField::zeros(g);
        assert!(resolvent_apply(&f, Complex64::new(-1.0, 0.0)).is_err());
    }
}
