use asympheat::oracle::*;
use asympheat::spaces::{Grid, RemainderField};
use std::f64::consts::PI;

fn r2(x: &[f64; 3]) -> f64 {
    x[0] * x[0] + x[1] * x[1] + x[2] * x[2]
}

fn heat_kernel(d: usize, s: f64, x: &[f64; 3]) -> f64 {
    (4.0 * PI * s).powf(-(d as f64) / 2.0) * (-r2(x) / (4.0 * s)).exp()
}

#[test]
fn convolution_reproduces_gaussians_and_constants() {
    for d in [2, 3] {
        let v = |y: &[f64; 3]| heat_kernel(d, 0.5, y);
        for x in [[0.0, 0.0, 0.0], [0.7, -0.3, 0.2], [1.5, 1.0, -0.5]] {
            let mut x = x;
            if d == 2 {
                x[2] = 0.0;
            }
            let got = gaussian_convolve_at(&v, d, 0.75, &x, 32);
            let want = heat_kernel(d, 1.25, &x);
            assert!((got - want).abs() < 1e-6 * heat_kernel(d, 1.25, &[0.0; 3]), "d={d} {x:?}");
        }
        let one = gaussian_convolve_at(&|_: &[f64; 3]| 1.0, d, 2.0, &[0.3, 0.1, 0.0], 32);
        assert!((one - 1.0).abs() < 1e-10, "d={d}");
    }
}

#[test]
fn strided_convolution_fills_only_the_requested_nodes() {
    let grid = Grid::centered(2, 16, 4.0).unwrap();
    let (field, idx) = gaussian_convolve(&|_: &[f64; 3]| 1.0, 0.5, &grid, 4);
    assert_eq!(idx.len(), 16);
    for i in 0..grid.len() {
        let v = field.data()[i];
        if idx.contains(&i) {
            assert!((v - 1.0).abs() < 1e-10);
        } else {
            assert_eq!(v, 0.0);
        }
    }
}

fn ball(grid: &Grid, radius: f64) -> RemainderField {
    RemainderField::from_fn(grid.clone(), |x| if r2(x) <= radius * radius { 1.0 } else { 0.0 })
}

#[test]
fn potential_of_a_ball_is_a_point_charge_outside() {
    let grid = Grid::centered(3, 24, 3.0).unwrap();
    let rho = ball(&grid, 1.0);
    let mass: f64 = rho.data().iter().sum::<f64>() * grid.cell_volume();
    let targets = [[4.0, 0.0, 0.0], [0.0, 3.0, 4.0], [-3.0, 3.0, 3.0]];
    let pot = newtonian_potential_at(&rho, &targets).unwrap();
    for (x, u) in targets.iter().zip(&pot) {
        let want = -mass / (4.0 * PI * r2(x).sqrt());
        assert!((u - want).abs() < 1e-3 * want.abs(), "{x:?}: {u} vs {want}");
    }
    // Odd data give an odd potential.
    let odd = rho.map_with_point(|x, v| v * x[0]);
    let p = newtonian_potential_at(&odd, &[[2.0, 0.5, 0.3], [-2.0, 0.5, 0.3]]).unwrap();
    assert!((p[0] + p[1]).abs() < 1e-12 * p[0].abs());
    assert!(newtonian_potential_at(&RemainderField::zeros(Grid::cube(2, 8, 1.0).unwrap()), &targets).is_err());
}

#[test]
fn laplacian_of_the_potential_recovers_the_density() {
    let grid = Grid::centered(3, 24, 3.0).unwrap();
    let rho = RemainderField::from_fn(grid.clone(), |x| (-2.0 * r2(x)).exp());
    let pot = newtonian_potential(&rho).unwrap();
    let lap = fd_laplacian(&pot, 4).unwrap();
    let (mut num, mut den) = (0.0, 0.0);
    for i in 0..grid.len() {
        if r2(&grid.point(i)) < 1.0 {
            num += (lap.data()[i] - rho.data()[i]).powi(2);
            den += rho.data()[i].powi(2);
        }
    }
    // Midpoint-rule potential against a smooth density: limited by h^2.
    assert!((num / den).sqrt() < 2e-2, "{}", (num / den).sqrt());
}

#[test]
fn fd_laplacian_examples() {
    let grid = Grid::centered(3, 20, 2.0).unwrap();
    let quad = RemainderField::from_fn(grid.clone(), r2);
    for order in [2, 4] {
        let lap = fd_laplacian(&quad, order).unwrap();
        for i in 0..grid.len() {
            let idx = grid.unravel(i);
            if (0..3).all(|a| idx[a] >= 2 && idx[a] + 2 < 20) {
                assert!((lap.data()[i] - 6.0).abs() < 1e-10);
            }
        }
    }
    assert!(fd_laplacian(&quad, 3).is_err());
}

#[test]
fn fd_laplacian_converges_at_its_order() {
    let f = |x: &[f64; 3]| (-r2(x)).exp();
    let lf = |x: &[f64; 3]| (4.0 * r2(x) - 4.0) * (-r2(x)).exp();
    for (order, ratio) in [(2usize, 3.8), (4, 14.0)] {
        let errs: Vec<f64> = [64usize, 128]
            .iter()
            .map(|&n| {
                let grid = Grid::centered(2, n, 5.0).unwrap();
                let lap = fd_laplacian(&RemainderField::from_fn(grid.clone(), f), order).unwrap();
                (0..grid.len()).fold(0.0f64, |m, i| m.max((lap.data()[i] - lf(&grid.point(i))).abs()))
            })
            .collect();
        assert!(errs[0] / errs[1] > ratio, "order {order}: {errs:?}");
    }
}

#[test]
fn conjugated_laplacian_matches_its_expansion() {
    let f = |x: &[f64; 3]| (-r2(x) / 2.0).exp();
    let coarse = RemainderField::from_fn(Grid::centered(2, 64, 8.0).unwrap(), f);
    let fine = RemainderField::from_fn(Grid::centered(2, 128, 8.0).unwrap(), f);
    assert!(l_delta_conjugation_check(&fine, 0.0) < 1e-14);
    let (ec, ef) = (l_delta_conjugation_check(&coarse, 2.0), l_delta_conjugation_check(&fine, 2.0));
    let h = fine.grid().spacing();
    assert!(ef < 2.0 * h * h, "{ef}");
    assert!(ec / ef > 3.5, "{ec} {ef}");
}

#[test]
fn far_field_fit_recovers_multipoles() {
    let mut pts = Vec::new();
    for i in 0..40 {
        let z = -1.0 + (i as f64 + 0.5) / 20.0;
        let phi = 2.4 * i as f64;
        let s = (1.0 - z * z).sqrt();
        let r = 5.0 + (i % 3) as f64;
        pts.push([r * s * phi.cos(), r * s * phi.sin(), r * z]);
    }
    let u = |p: &[f64; 3]| {
        let r = r2(p).sqrt();
        let w = [p[0] / r, p[1] / r, p[2] / r];
        2.0 * real_harmonic(0, 0, &w) / r - 0.5 * real_harmonic(1, 1, &w) / (r * r)
            + 0.25 * real_harmonic(2, -1, &w) / r.powi(3)
    };
    let vals: Vec<f64> = pts.iter().map(u).collect();
    let c = far_field_fit(&pts, &vals, 2).unwrap();
    let want = [vec![2.0], vec![0.0, 0.0, -0.5], vec![0.0, 0.25, 0.0, 0.0, 0.0]];
    for (got, want) in c.iter().zip(&want) {
        for (g, w) in got.iter().zip(want) {
            assert!((g - w).abs() < 1e-10, "{c:?}");
        }
    }
    assert!(far_field_fit(&pts, &vals, 4).is_err());
}

#[test]
fn harmonics_are_orthonormal() {
    // Gauss-Legendre in z times trapezoid in φ, exact through degree 6.
    let gl: [(f64, f64); 6] = [
        (-0.932_469_514_203_152, 0.171_324_492_379_170),
        (-0.661_209_386_466_265, 0.360_761_573_048_139),
        (-0.238_619_186_083_197, 0.467_913_934_572_691),
        (0.238_619_186_083_197, 0.467_913_934_572_691),
        (0.661_209_386_466_265, 0.360_761_573_048_139),
        (0.932_469_514_203_152, 0.171_324_492_379_170),
    ];
    let nphi = 8;
    let mut nodes = Vec::new();
    for &(z, w) in &gl {
        let s = (1.0 - z * z).sqrt();
        for j in 0..nphi {
            let phi = 2.0 * PI * j as f64 / nphi as f64;
            nodes.push(([s * phi.cos(), s * phi.sin(), z], w * 2.0 * PI / nphi as f64));
        }
    }
    let modes: Vec<(usize, i64)> = (0..=3usize).flat_map(|l| (-(l as i64)..=l as i64).map(move |m| (l, m))).collect();
    for &(l1, m1) in &modes {
        for &(l2, m2) in &modes {
            let ip: f64 = nodes.iter().map(|(u, w)| w * real_harmonic(l1, m1, u) * real_harmonic(l2, m2, u)).sum();
            let want = if (l1, m1) == (l2, m2) { 1.0 } else { 0.0 };
            assert!((ip - want).abs() < 1e-12, "({l1},{m1}) ({l2},{m2}): {ip}");
        }
    }
}
