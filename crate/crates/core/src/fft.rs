//! N-dimensional FFTs on a [`Grid`] treated as one period of a periodic box,
//! and Fourier multipliers built on them.

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;

use crate::spaces::{ComplexField, Grid, RemainderField};

/// Angular wavenumbers `2π k / (n h)` in FFT order for one axis.
pub fn wavenumbers(n: usize, h: f64) -> Vec<f64> {
    let scale = 2.0 * std::f64::consts::PI / (n as f64 * h);
    (0..n)
        .map(|k| {
            let k = k as i64;
            let signed = if 2 * k <= n as i64 { k } else { k - n as i64 };
            signed as f64 * scale
        })
        .collect()
}

/// Wavenumbers for odd-order derivatives: the Nyquist mode is zeroed so that
/// real fields stay real.
pub fn derivative_wavenumbers(n: usize, h: f64) -> Vec<f64> {
    let mut k = wavenumbers(n, h);
    if n % 2 == 0 {
        k[n / 2] = 0.0;
    }
    k
}

fn transform_axis(data: &mut [Complex64], shape: &[usize], axis: usize, inverse: bool) {
    let n = shape[axis];
    let stride: usize = shape[axis + 1..].iter().product();
    let mut planner = FftPlanner::<f64>::new();
    let plan = if inverse {
        planner.plan_fft_inverse(n)
    } else {
        planner.plan_fft_forward(n)
    };
    if stride == 1 {
        data.par_chunks_mut(n).for_each(|line| plan.process(line));
        return;
    }
    let block = n * stride;
    // Gather strided lines into contiguous storage, transform, scatter back.
    let mut lines = vec![Complex64::new(0.0, 0.0); data.len()];
    {
        let src = &*data;
        lines.par_chunks_mut(n).enumerate().for_each(|(li, line)| {
            let outer = li / stride;
            let j = li % stride;
            let base = outer * block + j;
            for (k, v) in line.iter_mut().enumerate() {
                *v = src[base + k * stride];
            }
            plan.process(line);
        });
    }
    data.par_chunks_mut(stride).enumerate().for_each(|(row, out)| {
        let outer = row / n;
        let k = row % n;
        for (j, v) in out.iter_mut().enumerate() {
            *v = lines[(outer * stride + j) * n + k];
        }
    });
}

/// Unnormalized forward transform over every axis, in place.
pub fn forward(data: &mut [Complex64], shape: &[usize]) {
    for axis in 0..shape.len() {
        transform_axis(data, shape, axis, false);
    }
}

/// Normalized inverse transform over every axis, in place.
pub fn inverse(data: &mut [Complex64], shape: &[usize]) {
    for axis in 0..shape.len() {
        transform_axis(data, shape, axis, true);
    }
    let scale = 1.0 / data.len() as f64;
    data.par_iter_mut().for_each(|v| *v *= scale);
}

/// Per-axis wavenumber tables for a grid.
pub struct Wavenumbers {
    pub axes: Vec<Vec<f64>>,
    pub derivative_axes: Vec<Vec<f64>>,
}

impl Wavenumbers {
    pub fn new(grid: &Grid) -> Self {
        let h = grid.spacing();
        Self {
            axes: grid.shape().iter().map(|&n| wavenumbers(n, h)).collect(),
            derivative_axes: grid.shape().iter().map(|&n| derivative_wavenumbers(n, h)).collect(),
        }
    }

    /// `|ξ|^2` at a multi-index.
    pub fn norm_sq(&self, idx: &[usize; 3]) -> f64 {
        self.axes.iter().enumerate().map(|(a, k)| k[idx[a]] * k[idx[a]]).sum()
    }
}

/// Apply a multiplier `m(ξ)` to complex samples in place. The closure sees
/// the full wavenumber vector (trailing entries 0 in `d = 2`) and `|ξ|^2`.
pub fn apply_symbol<M>(grid: &Grid, data: &mut [Complex64], symbol: M)
where
    M: Fn(&[f64; 3], f64) -> Complex64 + Sync,
{
    let shape = grid.shape().to_vec();
    forward(data, &shape);
    let wn = Wavenumbers::new(grid);
    data.par_iter_mut().enumerate().for_each(|(i, v)| {
        let idx = grid.unravel(i);
        let mut xi = [0.0; 3];
        for a in 0..shape.len() {
            xi[a] = wn.axes[a][idx[a]];
        }
        let k2 = wn.norm_sq(&idx);
        *v *= symbol(&xi, k2);
    });
    inverse(data, &shape);
}

/// Radial multiplier `m(|ξ|^2)` applied to a real field; complex output.
pub fn radial_multiplier<M>(f: &RemainderField, m: M) -> ComplexField
where
    M: Fn(f64) -> Complex64 + Sync,
{
    let mut data: Vec<Complex64> = f.data().iter().map(|&v| Complex64::new(v, 0.0)).collect();
    apply_symbol(f.grid(), &mut data, |_, k2| m(k2));
    ComplexField::new(f.grid().clone(), data).expect("shape preserved")
}

/// Radial multiplier applied to a complex field.
pub fn radial_multiplier_complex<M>(f: &ComplexField, m: M) -> ComplexField
where
    M: Fn(f64) -> Complex64 + Sync,
{
    let mut data = f.data().to_vec();
    apply_symbol(f.grid(), &mut data, |_, k2| m(k2));
    ComplexField::new(f.grid().clone(), data).expect("shape preserved")
}

/// Real radial multiplier on a real field; the imaginary roundoff is dropped.
pub fn radial_multiplier_real<M>(f: &RemainderField, m: M) -> RemainderField
where
    M: Fn(f64) -> f64 + Sync,
{
    radial_multiplier(f, |k2| Complex64::new(m(k2), 0.0)).re()
}

/// Spectral Laplacian `-|ξ|^2`.
pub fn laplacian(f: &RemainderField) -> RemainderField {
    radial_multiplier_real(f, |k2| -k2)
}

/// Spectral partial derivative along `axis`.
pub fn partial(f: &RemainderField, axis: usize) -> RemainderField {
    let grid = f.grid();
    let kd = derivative_wavenumbers(grid.shape()[axis], grid.spacing());
    let mut data: Vec<Complex64> = f.data().iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let shape = grid.shape().to_vec();
    forward(&mut data, &shape);
    data.par_iter_mut().enumerate().for_each(|(i, v)| {
        let idx = grid.unravel(i);
        *v *= Complex64::new(0.0, kd[idx[axis]]);
    });
    inverse(&mut data, &shape);
    ComplexField::new(grid.clone(), data).expect("shape preserved").re()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_is_identity() {
        let shape = [6, 5, 4];
        let n: usize = shape.iter().product();
        let orig: Vec<Complex64> = (0..n)
            .map(|i| Complex64::new((i as f64).sin(), (i as f64 * 0.3).cos()))
            .collect();
        let mut v = orig.clone();
        forward(&mut v, &shape);
        inverse(&mut v, &shape);
        for (a, b) in v.iter().zip(&orig) {
            assert!((a - b).norm() < 1e-13);
        }
    }

    #[test]
    fn forward_matches_naive_dft() {
        let shape = [3, 4];
        let n = 12;
        let x: Vec<Complex64> = (0..n).map(|i| Complex64::new(i as f64, 0.5 * i as f64)).collect();
        let mut y = x.clone();
        forward(&mut y, &shape);
        for k0 in 0..3 {
            for k1 in 0..4 {
                let mut s = Complex64::new(0.0, 0.0);
                for j0 in 0..3 {
                    for j1 in 0..4 {
                        let ph = -2.0 * std::f64::consts::PI
                            * (k0 as f64 * j0 as f64 / 3.0 + k1 as f64 * j1 as f64 / 4.0);
                        s += x[j0 * 4 + j1] * Complex64::from_polar(1.0, ph);
                    }
                }
                assert!((s - y[k0 * 4 + k1]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn spectral_derivative_of_a_periodic_mode() {
        let g = Grid::centered(2, 32, std::f64::consts::PI).unwrap();
        let f = RemainderField::from_fn(g.clone(), |x| (3.0 * x[0]).sin() * (2.0 * x[1]).cos());
        let dx = partial(&f, 0);
        let lap = laplacian(&f);
        for i in 0..g.len() {
            let x = g.point(i);
            let e = 3.0 * (3.0 * x[0]).cos() * (2.0 * x[1]).cos();
            assert!((dx.data()[i] - e).abs() < 1e-11);
            assert!((lap.data()[i] + 13.0 * f.data()[i]).abs() < 1e-10);
        }
    }
}
