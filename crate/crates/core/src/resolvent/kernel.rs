//! Integral kernels of `(λ - Δ)^{-1}`.

use num_complex::Complex64;

use super::hankel::hankel1;
use crate::error::{invalid, Error, Result};

/// Principal square root, checked to have positive real part.
pub fn principal_sqrt(lambda: Complex64) -> Result<Complex64> {
    let s = lambda.sqrt();
    if !(s.re > 0.0) {
        return Err(Error::OutsideSector(format!(
            "λ = {lambda} lies on the spectrum (-∞, 0]: Re √λ = {}",
            s.re
        )));
    }
    Ok(s)
}

/// Closed form for `d = 3`: `e^{-√λ r} / (4π r)`.
pub fn resolvent_kernel_d3(r: f64, lambda: Complex64) -> Result<Complex64> {
    let s = principal_sqrt(lambda)?;
    if !(r > 0.0) {
        return Err(Error::SingularKernel);
    }
    Ok((-s * r).exp() / (4.0 * std::f64::consts::PI * r))
}

/// General form `(i/4) (i√λ / (2π r))^ν H^{(1)}_ν(i√λ r)` with `ν = (d-2)/2`.
pub fn resolvent_kernel_hankel(r: f64, lambda: Complex64, d: usize) -> Result<Complex64> {
    if d < 2 {
        return Err(invalid("d", format!("dimension must be at least 2, got {d}")));
    }
    let s = principal_sqrt(lambda)?;
    if !(r > 0.0) {
        return Err(Error::SingularKernel);
    }
    let nu = (d as f64 - 2.0) / 2.0;
    let i = Complex64::i();
    let z = i * s * r;
    let pre = (z / (2.0 * std::f64::consts::PI * r * r)).powf(nu);
    Ok(i / 4.0 * pre * hankel1(nu, z)?)
}

/// `K(x, y; λ)`. Uses the closed form in `d = 3` and the Hankel form otherwise.
pub fn resolvent_kernel(x: &[f64], y: &[f64], lambda: Complex64, d: usize) -> Result<Complex64> {
    if x.len() < d || y.len() < d {
        return Err(Error::DimensionMismatch { expected: d, found: x.len().min(y.len()) });
    }
    let r = (0..d).map(|a| (x[a] - y[a]).powi(2)).sum::<f64>().sqrt();
    if r == 0.0 {
        return Err(Error::SingularKernel);
    }
    if d == 3 {
        resolvent_kernel_d3(r, lambda)
    } else {
        resolvent_kernel_hankel(r, lambda, d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_distance_value() {
        let k = resolvent_kernel(&[0.0, 0.0, 0.0], &[1.0, 0.0, 0.0], Complex64::new(1.0, 0.0), 3).unwrap();
        assert!((k.re - 0.029_274_915_762_159_584).abs() < 1e-16);
        assert_eq!(k.im, 0.0);
    }

    #[test]
    fn hankel_form_reduces_in_three_dimensions() {
        for &(lam, r) in &[(Complex64::new(2.0, 1.0), 0.3), (Complex64::new(-1.0, 0.5), 2.0), (Complex64::new(30.0, -40.0), 1.7)] {
            let a = resolvent_kernel_d3(r, lam).unwrap();
            let b = resolvent_kernel_hankel(r, lam, 3).unwrap();
            assert!((a - b).norm() <= 1e-12 * a.norm());
        }
    }

    #[test]
    fn real_lambda_gives_positive_kernel_in_two_dimensions() {
        let k = resolvent_kernel(&[0.0, 0.0], &[0.5, 0.2], Complex64::new(3.0, 0.0), 2).unwrap();
        assert!(k.re > 0.0 && k.im.abs() < 1e-14);
    }

    #[test]
    fn coincident_points_are_singular() {
        assert!(matches!(
            resolvent_kernel(&[1.0, 0.0, 0.0], &[1.0, 0.0, 0.0], Complex64::new(1.0, 0.0), 3),
            Err(Error::SingularKernel)
        ));
        assert!(resolvent_kernel_d3(1.0, Complex64::new(-2.0, 0.0)).is_err());
    }
}
