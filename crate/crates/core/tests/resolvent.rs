use asympheat::resolvent::*;
use asympheat::spaces::{Grid, RemainderField};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn overlap_difference(radii: &[f64]) -> f64 {
    let mut worst: f64 = 0.0;
    for &nu in &[0.0, 1.0, 0.3, 2.0] {
        for &m in radii {
            for &im in &[0.0, 1.5, 3.0, -2.0] {
                let z = Complex64::new((m * m - im * im as f64).sqrt(), im);
                let s = hankel1_series(nu, z);
                let a = hankel1_asymptotic(nu, z, 200);
                worst = worst.max((s - a).norm() / a.norm());
            }
        }
    }
    worst
}

#[test]
fn series_and_asymptotic_agree_in_overlap() {
    let inner = overlap_difference(&[9.0, 10.0, 11.0, 12.0]);
    eprintln!("overlap |z| in [9, 12]: worst relative difference {inner:e}");
    assert!(inner < 1e-8, "{inner}");
    // At |z| = 8 the optimally truncated expansion is only good to about e^{-2|z|}.
    let edge = overlap_difference(&[8.0]);
    eprintln!("overlap |z| = 8: worst relative difference {edge:e}");
    assert!(edge < 3e-8, "{edge}");
}

#[test]
fn large_argument_leading_terms() {
    let z = Complex64::new(50.0, 0.0);
    // Fully summed expansion; its truncation error at |z| = 50 is below e^{-100}.
    let exact = hankel1(1.0, z).unwrap();
    let lead = hankel1_asymptotic(1.0, z, 1);
    let two = hankel1_asymptotic(1.0, z, 2);
    assert!((exact - lead).norm() / exact.norm() < 1e-2);
    assert!((exact - two).norm() / exact.norm() < 1e-4);
    let exact = hankel1_half_integer(1, z);
    assert!((exact - hankel1_asymptotic(1.5, z, 200)).norm() / exact.norm() < 1e-14);
    let z = Complex64::new(30.0, 5.0);
    assert!((hankel1_half_integer(2, z) - hankel1_asymptotic(2.5, z, 200)).norm() / hankel1_half_integer(2, z).norm() < 1e-13);
}

#[test]
fn wronskian_at_random_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..50 {
        let z = Complex64::from_polar(rng.random_range(0.2..7.0), rng.random_range(-2.5..2.5));
        let nu: f64 = rng.random_range(0.0..3.0);
        let w = bessel_j_series(nu + 1.0, z) * bessel_y_series(nu, z) - bessel_j_series(nu, z) * bessel_y_series(nu + 1.0, z);
        let expect = 2.0 / (std::f64::consts::PI * z);
        assert!((w - expect).norm() < 1e-9 * expect.norm(), "nu={nu} z={z}");
    }
}

#[test]
fn hankel_kernel_matches_closed_form_at_random_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..100 {
        let lam = Complex64::from_polar(rng.random_range(0.01f64..100.0), rng.random_range(-3.0..3.0));
        let r = rng.random_range(0.05..5.0);
        let a = resolvent_kernel_d3(r, lam).unwrap();
        let b = resolvent_kernel_hankel(r, lam, 3).unwrap();
        assert!((a - b).norm() <= 1e-12 * a.norm());
    }
}

#[test]
fn kernel_quadrature_matches_spectral_path() {
    let lambda = Complex64::new(2.0, 0.0);
    let g = Grid::centered(3, 64, 10.0).unwrap();
    let gauss = |x: &[f64; 3]| (-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2])).exp();
    let f = RemainderField::from_fn(g.clone(), |x| gauss(x));
    let spectral = resolvent_apply(&f, lambda).unwrap();
    let targets: Vec<usize> = (0..g.len()).filter(|&i| {
        let idx = g.unravel(i);
        idx.iter().take(3).all(|&k| k % 8 == 4) && { let x = g.point(i); x.iter().map(|v| v * v).sum::<f64>() < 16.0 }
    }).collect();
    let pts: Vec<[f64; 3]> = targets.iter().map(|&i| g.point(i)).collect();
    let quad = resolvent_apply_kernel(gauss, lambda, &pts, 8.0).unwrap();
    let (mut num, mut den) = (0.0, 0.0);
    for (k, &i) in targets.iter().enumerate() {
        num += (quad[k] - spectral.data()[i]).norm_sqr();
        den += quad[k].norm_sqr();
    }
    let rel = (num / den).sqrt();
    eprintln!("kernel vs spectral relative L2 {rel:e} on {} points", pts.len());
    assert!(rel < 1e-3);
}

#[test]
fn sector_sweep_is_bounded() {
    let pts = sector_samples(50, DEFAULT_OMEGA, 0.3, DEFAULT_KAPPA, (0.5, 1e4), 5).unwrap();
    let rows = sector_sweep(&pts, 2.0, 3, DEFAULT_KAPPA).unwrap();
    let max = rows.iter().map(|r| r.scaled).fold(0.0, f64::max);
    eprintln!("max |λ|(I1+I2) with δ=2: {max}");
    assert!(max.is_finite() && max < 1e3);
    let rows0 = sector_sweep(&pts, 0.0, 3, DEFAULT_KAPPA).unwrap();
    for r in &rows0 {
        assert!(r.sector_ratio <= (2.0 / std::f64::consts::PI).sqrt() * (1.0 + 1e-9));
    }
}

#[test]
fn tail_share_decreases_for_large_real_lambda() {
    let ratio = |lam: f64| {
        let pt = SectorPoint::new(Complex64::new(lam, 0.0), 0.0, 0.3).unwrap();
        let (i1, i2) = schur_integrals(&pt, 2.0, 3, 0.5).unwrap();
        i2 / i1
    };
    let rs: Vec<f64> = [1.0, 10.0, 100.0, 1000.0].iter().map(|&l| ratio(l)).collect();
    eprintln!("I2/I1: {rs:?}");
    assert!(rs.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn sectorial_resolvent_ratio_is_bounded() {
    let g = Grid::centered(2, 64, 12.0).unwrap();
    let f = RemainderField::from_fn(g, |x| (-(x[0] * x[0] + x[1] * x[1]) / 2.0).exp() * (1.0 + 0.5 * x[1]));
    let pts = sector_samples(50, DEFAULT_OMEGA, 0.3, DEFAULT_KAPPA, (0.5, 1e4), 9).unwrap();
    let fnorm = weighted_lp_complex(&asympheat::spaces::ComplexField::from_real(&f), 2.0, 1.0);
    let mut worst: f64 = 0.0;
    for pt in &pts {
        let u = resolvent_apply(&f, pt.lambda).unwrap();
        worst = worst.max(pt.distance() * weighted_lp_complex(&u, 2.0, 1.0) / fnorm);
    }
    eprintln!("max |λ-ω| ‖R f‖/‖f‖ = {worst}");
    assert!(worst.is_finite() && worst < 100.0);
}
