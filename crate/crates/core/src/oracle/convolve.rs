use rayon::prelude::*;

use crate::spaces::{Grid, RemainderField};

use super::composite_gl8;

/// Kernel mass left outside the integration ball.
const TAIL_MASS: f64 = 1e-12;

fn cutoff_radius(t: f64) -> f64 {
    (4.0 * t * (1.0 / TAIL_MASS).ln()).sqrt() * 1.1
}

/// `(4πt)^{-d/2} ∫ exp(-|x-y|^2/4t) v(y) dy` at a single point `x`, by polar
/// quadrature centered at `x`: composite Gauss–Legendre in the radius and in
/// `cos θ`, trapezoid in the azimuth.
pub fn gaussian_convolve_at<F>(v: &F, d: usize, t: f64, x: &[f64; 3], radial_panels: usize) -> f64
where
    F: Fn(&[f64; 3]) -> f64 + Sync + ?Sized,
{
    let pi = std::f64::consts::PI;
    let big_r = cutoff_radius(t);
    let radial = composite_gl8(0.0, big_r, radial_panels);
    match d {
        2 => {
            let nphi = 256;
            let norm = 1.0 / (4.0 * pi * t);
            let mut total = 0.0;
            for (rho, wr) in &radial {
                let k = norm * (-rho * rho / (4.0 * t)).exp() * rho * wr;
                let mut ring = 0.0;
                for j in 0..nphi {
                    let phi = 2.0 * pi * j as f64 / nphi as f64;
                    let y = [x[0] + rho * phi.cos(), x[1] + rho * phi.sin(), 0.0];
                    ring += v(&y);
                }
                total += k * ring * 2.0 * pi / nphi as f64;
            }
            total
        }
        _ => {
            let nphi = 64;
            let polar = composite_gl8(-1.0, 1.0, 4);
            let norm = (4.0 * pi * t).powf(-1.5);
            let mut total = 0.0;
            for (rho, wr) in &radial {
                let k = norm * (-rho * rho / (4.0 * t)).exp() * rho * rho * wr;
                let mut shell = 0.0;
                for (ct, wc) in &polar {
                    let st = (1.0 - ct * ct).sqrt();
                    let mut ring = 0.0;
                    for j in 0..nphi {
                        let phi = 2.0 * pi * j as f64 / nphi as f64;
                        let y = [
                            x[0] + rho * st * phi.cos(),
                            x[1] + rho * st * phi.sin(),
                            x[2] + rho * ct,
                        ];
                        ring += v(&y);
                    }
                    shell += wc * ring * 2.0 * pi / nphi as f64;
                }
                total += k * shell;
            }
            total
        }
    }
}

/// Convolution evaluated at every `stride`-th node of `grid` along each
/// axis; the other nodes are left at zero. Returns the field and the flat
/// indices that were evaluated.
pub fn gaussian_convolve<F>(v: &F, t: f64, grid: &Grid, stride: usize) -> (RemainderField, Vec<usize>)
where
    F: Fn(&[f64; 3]) -> f64 + Sync + ?Sized,
{
    let d = grid.dimension();
    let stride = stride.max(1);
    let targets: Vec<usize> = (0..grid.len())
        .filter(|&i| {
            let idx = grid.unravel(i);
            (0..d).all(|a| idx[a] % stride == 0)
        })
        .collect();
    let panels = ((cutoff_radius(t) / 0.25).ceil() as usize).max(8);
    let values: Vec<f64> = targets
        .par_iter()
        .map(|&i| gaussian_convolve_at(v, d, t, &grid.point(i), panels))
        .collect();
    let mut data = vec![0.0; grid.len()];
    for (&i, val) in targets.iter().zip(values) {
        data[i] = val;
    }
    (RemainderField::new(grid.clone(), data).expect("finite"), targets)
}
