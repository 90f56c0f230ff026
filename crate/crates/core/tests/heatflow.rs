use asympheat::heatflow::*;
use asympheat::oracle::{fd_laplacian, gaussian_convolve};
use asympheat::spaces::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn chart_2d() -> AsymptoticChart {
    // d = 2, N = 3, p = 2 → N* = 4
    let l = 3;
    let mut c = AsymptoticChart::zeros(2, 0, 3, 2.0, 0, l).unwrap();
    let mk = |v: &[f64]| SphereFunction::new(2, l, v.to_vec()).unwrap();
    c.set_coeff(0, mk(&[0.4, 0.2, -0.1, 0.0, 0.05, 0.0, 0.0])).unwrap();
    c.set_coeff(1, mk(&[0.1, 0.0, 0.3, -0.2, 0.0, 0.0, 0.1])).unwrap();
    c.set_coeff(2, mk(&[-0.2, 0.1, 0.0, 0.0, 0.2, 0.0, 0.0])).unwrap();
    c.set_coeff(3, mk(&[0.0, 0.0, 0.1, 0.0, 0.0, 0.3, 0.0])).unwrap();
    c.set_coeff(4, mk(&[0.3, 0.0, 0.0, 0.1, 0.0, 0.0, -0.2])).unwrap();
    c
}

fn remainder_exact(x: &[f64; 3]) -> f64 {
    (-(x[0] * x[0] + x[1] * x[1]) / 2.0).exp() * (1.0 + 0.3 * x[0])
}

#[test]
fn oracle_cross_validation_2d() {
    let grid = Grid::centered(2, 256, 20.0).unwrap();
    let chart = chart_2d();
    let v = AsymptoticFunction::new(
        chart.clone(),
        RemainderField::from_fn(grid.clone(), remainder_exact),
        CutoffSpec::default(),
    )
    .unwrap();
    let t = 0.5;
    let out = semigroup_apply(&v, t).unwrap();
    let full = out.to_grid();
    let exact_v = |y: &[f64; 3]| {
        let r = (y[0] * y[0] + y[1] * y[1]).sqrt();
        let c = CutoffSpec::default().eval(r);
        let tail = if c == 0.0 { 0.0 } else { c * chart.eval_tail(y) };
        tail + remainder_exact(y)
    };
    let (oracle, targets) = gaussian_convolve(&exact_v, t, &grid, 16);
    let (mut num, mut den) = (0.0, 0.0);
    for &i in &targets {
        num += (full.data()[i] - oracle.data()[i]).powi(2);
        den += oracle.data()[i].powi(2);
    }
    let rel = (num / den).sqrt();
    eprintln!("oracle rel L2 = {rel:e} over {} targets", targets.len());
    assert!(rel < 1e-3);
}

fn r2(x: &[f64; 3]) -> f64 {
    x[0] * x[0] + x[1] * x[1] + x[2] * x[2]
}

fn random_chart(rng: &mut ChaCha8Rng, d: usize, n: usize, order: usize, p: f64, l_max: usize) -> AsymptoticChart {
    let mut c = AsymptoticChart::zeros(d, n, order, p, 0, l_max).unwrap();
    let len = SphereFunction::zeros(d, l_max).coeffs().len();
    for k in c.ks() {
        let v = (0..len).map(|_| rng.random_range(-1.0..1.0)).collect();
        c.set_coeff(k, SphereFunction::new(d, l_max, v).unwrap()).unwrap();
    }
    c
}

fn function(chart: AsymptoticChart, rem: RemainderField) -> AsymptoticFunction {
    AsymptoticFunction::new(chart, rem, CutoffSpec::default()).unwrap()
}

fn sup_diff(a: &RemainderField, b: &RemainderField) -> f64 {
    a.sub(b).sup_norm()
}

#[test]
fn coefficient_examples() {
    let mut chart = AsymptoticChart::zeros(3, 0, 2, 4.0, 0, 2).unwrap();
    chart.set_coeff(0, SphereFunction::mode(3, 2, 1, 0)).unwrap();
    let flow = evolve_coefficients(&chart);
    for t in [0.25, 1.0, 4.0] {
        let a2 = flow.eval(t).coeffs()[2].clone();
        assert!(a2.add_scaled(&SphereFunction::mode(3, 2, 1, 0), 2.0 * t).l2_norm() < 1e-14);
    }
    let mut chart = AsymptoticChart::zeros(3, 0, 2, 4.0, 0, 2).unwrap();
    chart.set_coeff(0, SphereFunction::constant(3, 2, 0.8)).unwrap();
    chart.set_coeff(2, SphereFunction::mode(3, 2, 2, -1)).unwrap();
    let flow = evolve_coefficients(&chart);
    assert_eq!(flow.eval(3.0).coeffs()[2], chart.coeffs()[2]);
}

#[test]
fn leading_coefficients_are_frozen_and_the_rest_drift() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let g = Grid::cube(3, 16, 0.25).unwrap();
    // The n = 1 subspace: a₁ and a₂ stay put.
    let v = function(random_chart(&mut rng, 3, 1, 3, 4.0, 3), RemainderField::zeros(g));
    let rep = nonsmoothing_check(&v, &[0.1, 1.0, 10.0]).unwrap();
    assert_eq!(rep.max_drift, 0.0);
    assert!(rep.higher_drift.iter().all(|(_, d)| *d > 0.0), "{:?}", rep.higher_drift);
    let flow = evolve_coefficients(&v.chart);
    for k in v.chart.ks() {
        assert!(flow.degree(k) <= k / 2);
    }
}

#[test]
fn source_vanishes_for_the_zero_chart() {
    let g = Grid::cube(3, 16, 0.25).unwrap();
    let chart = AsymptoticChart::zeros(3, 0, 2, 4.0, 0, 2).unwrap();
    let h = assemble_source(&evolve_coefficients(&chart), &CutoffSpec::default(), &g).unwrap();
    assert!(h.is_zero());
    let coarse = Grid::cube(3, 16, 0.3).unwrap();
    let err = assemble_source(&evolve_coefficients(&chart), &CutoffSpec::default(), &coarse);
    assert!(matches!(err, Err(asympheat::Error::GridTooCoarse { .. })));
}

/// Largest `|h(t) - Δ(χ ã(t)) + χ ∂_t ã(t)|` away from the faces, with a
/// fourth-order stencil for `Δ`, and the scale of the reference.
fn source_defect(chart: &AsymptoticChart, n: usize, spacing: f64, t: f64) -> (f64, f64) {
    let g = Grid::cube(3, n, spacing).unwrap();
    let flow = evolve_coefficients(chart);
    let cutoff = CutoffSpec::default();
    let h = assemble_source(&flow, &cutoff, &g).unwrap();
    let glued = |c: &AsymptoticChart| {
        RemainderField::from_fn(g.clone(), |x| {
            let chi = cutoff.eval(r2(x).sqrt());
            if chi == 0.0 { 0.0 } else { chi * c.eval_tail(x) }
        })
    };
    let e = 1e-3;
    // ã is linear in t for N* = 3, so the central difference is exact.
    let dt = glued(&flow.eval(t + e)).sub(&glued(&flow.eval(t - e))).scale(0.5 / e);
    let expect = fd_laplacian(&glued(&flow.eval(t)), 4).unwrap().sub(&dt);
    let got = h.eval(t);
    let (mut worst, mut scale): (f64, f64) = (0.0, 0.0);
    for i in 0..g.len() {
        let idx = g.unravel(i);
        if idx.iter().take(3).all(|&k| k >= 3 && k + 3 < n) {
            worst = worst.max((got.data()[i] - expect.data()[i]).abs());
            scale = scale.max(expect.data()[i].abs());
        }
        if r2(&g.point(i)) < 1.0 {
            assert_eq!(got.data()[i], 0.0);
        }
    }
    (worst, scale)
}

#[test]
fn source_is_the_forcing_of_the_glued_chart() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let chart = random_chart(&mut rng, 3, 0, 3, 4.0, 2);
    let small = Grid::cube(3, 16, 0.25).unwrap();
    let h = assemble_source(&evolve_coefficients(&chart), &CutoffSpec::default(), &small).unwrap();
    assert_eq!(h.degree(), chart.n_star() / 2);
    let coarse = source_defect(&chart, 48, 0.1, 0.7);
    let fine = source_defect(&chart, 96, 0.05, 0.7);
    // The smoothstep is C³, so the stencil error at r = 1, 2 is O(h²).
    assert!(coarse.0 / fine.0 > 3.5, "{coarse:?} {fine:?}");
    assert!(fine.0 < 1e-2 * fine.1, "{fine:?}");
}

#[test]
fn heat_flow_basics() {
    let g = Grid::cube(3, 32, 0.3).unwrap();
    let f = RemainderField::from_fn(g.clone(), |x| (-r2(x)).exp() * (1.0 + 0.8 * (2.0 * x[0]).sin()));
    let same = heat_apply(&f, 0.0).unwrap();
    assert!(same.data().iter().zip(f.data()).all(|(a, b)| a.to_bits() == b.to_bits()));
    let c = heat_apply_complex(&ComplexField::from_real(&f), ComplexTime::new(num_complex::Complex64::new(0.0, 0.0), 0.1).unwrap());
    assert_eq!(c.re(), f);
    for t in [0.1, 1.0, 5.0] {
        let u = heat_apply(&f, t).unwrap();
        // The zero mode is the plain grid sum.
        let (a, b): (f64, f64) = (u.data().iter().sum(), f.data().iter().sum());
        assert!((a - b).abs() < 1e-12 * b.abs());
        assert!(u.sup_norm() <= f.sup_norm() + 1e-10);
        assert!(u.data().iter().all(|&v| v >= -1e-10));
    }
    assert!(heat_apply(&f, -1.0).is_err());
    assert!(ComplexTime::new(num_complex::Complex64::new(-0.1, 1.0), 0.1).is_err());
    assert!(ComplexTime::polar(1.0, 1.5, 0.1).is_err());
}

#[test]
fn duhamel_integral_of_a_single_mode() {
    let g = Grid::cube(2, 64, 0.25).unwrap();
    let xi = 2.0 * std::f64::consts::PI * 3.0 / 16.0;
    let phi = RemainderField::from_fn(g.clone(), |x| (xi * x[0]).cos());
    let h = DuhamelSource::from_terms(g.clone(), vec![phi.clone()]).unwrap();
    let t = 0.8;
    let expect = phi.scale((1.0 - (-t * xi * xi).exp()) / (xi * xi));
    let exact = duhamel_integral(&h, t).unwrap();
    assert!(sup_diff(&exact, &expect) < 1e-13);
    let gl32 = duhamel_integral_with(&h, t, DuhamelMethod::GaussLegendre(32)).unwrap();
    let gl64 = duhamel_integral_with(&h, t, DuhamelMethod::GaussLegendre(64)).unwrap();
    assert!(sup_diff(&gl32, &gl64) < 1e-10);
    assert!(sup_diff(&gl32, &expect) < 1e-10);
    let zero = DuhamelSource::zero(g);
    assert_eq!(duhamel_integral(&zero, t).unwrap().sup_norm(), 0.0);
}

#[test]
fn duhamel_quadrature_converges_to_the_exact_rule() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let g = Grid::cube(2, 128, 0.125).unwrap();
    let chart = random_chart(&mut rng, 2, 0, 3, 2.0, 3);
    let h = assemble_source(&evolve_coefficients(&chart), &CutoffSpec::default(), &g).unwrap();
    let exact = duhamel_integral(&h, 0.5).unwrap();
    let gl32 = duhamel_integral_with(&h, 0.5, DuhamelMethod::GaussLegendre(32)).unwrap();
    let gl64 = duhamel_integral_with(&h, 0.5, DuhamelMethod::GaussLegendre(64)).unwrap();
    let e32 = sup_diff(&gl32, &exact);
    let e64 = sup_diff(&gl64, &exact);
    assert!(e64 < e32 && e64 < 1e-6 * exact.sup_norm(), "{e32} {e64}");
}

#[test]
fn semigroup_special_cases() {
    let mut rng = ChaCha8Rng::seed_from_u64(24);
    let g = Grid::cube(2, 64, 0.25).unwrap();
    let v = function(random_chart(&mut rng, 2, 0, 3, 2.0, 3), RemainderField::from_fn(g.clone(), remainder_exact));
    let same = semigroup_apply(&v, 0.0).unwrap();
    assert_eq!(same.chart, v.chart);
    assert_eq!(same.remainder, v.remainder);
    let free = function(AsymptoticChart::zeros(2, 0, 3, 2.0, 0, 3).unwrap(), v.remainder.clone());
    let s = semigroup_apply(&free, 0.6).unwrap();
    assert!(s.chart.is_zero());
    assert_eq!(s.remainder, heat_apply(&v.remainder, 0.6).unwrap());
    let e = semigroup_property_check(&v, 0.4, 0.0).unwrap();
    assert_eq!(e.chart, 0.0);
    assert!(e.composed < 1e-15);
}

#[test]
fn sector_evaluation_agrees_with_real_time() {
    let mut rng = ChaCha8Rng::seed_from_u64(25);
    let g = Grid::cube(2, 64, 0.25).unwrap();
    let v = function(random_chart(&mut rng, 2, 0, 3, 2.0, 3), RemainderField::from_fn(g, remainder_exact));
    let t = 0.35;
    let real = semigroup_apply(&v, t).unwrap();
    let z = semigroup_apply_sector(&v, ComplexTime::real(t).unwrap()).unwrap();
    assert!(sup_diff(&z.remainder.re(), &real.remainder) < 1e-12);
    assert!(z.remainder.im().sup_norm() < 1e-12);
    let f = RemainderField::from_fn(Grid::cube(2, 64, 0.25).unwrap(), remainder_exact);
    for angle in [0.0, 0.5, -1.2] {
        let r = cauchy_riemann_residual(&f, ComplexTime::polar(0.7, angle, 0.2).unwrap());
        assert!(r < 1e-10, "angle {angle}: {r}");
    }
}

#[test]
fn generator_examples() {
    let g = Grid::cube(3, 32, 0.25).unwrap();
    let mut chart = AsymptoticChart::zeros(3, 0, 2, 4.0, 0, 2).unwrap();
    chart.set_coeff(0, SphereFunction::constant(3, 2, 0.5)).unwrap();
    let v = function(chart.clone(), RemainderField::zeros(g.clone()));
    let lv = generator_apply(&v).unwrap();
    assert!(lv.chart.is_zero());
    let h0 = assemble_source(&evolve_coefficients(&chart), &CutoffSpec::default(), &g).unwrap().eval(0.0);
    assert!(sup_diff(&lv.remainder, &h0) < 1e-15);

    let g = Grid::cube(3, 48, 0.25).unwrap();
    let zero = AsymptoticChart::zeros(3, 0, 2, 4.0, 0, 2).unwrap();
    let gauss = RemainderField::from_fn(g.clone(), |x| (-r2(x)).exp());
    let lg = generator_apply(&function(zero, gauss)).unwrap();
    let exact = RemainderField::from_fn(g, |x| (4.0 * r2(x) - 6.0) * (-r2(x)).exp());
    assert!(sup_diff(&lg.remainder, &exact) < 1e-6);
}

#[test]
fn difference_quotients_converge_to_the_generator() {
    // First order needs Λ²v in L², which the C³ smoothstep does not give.
    let mut rng = ChaCha8Rng::seed_from_u64(26);
    let g = Grid::cube(2, 128, 0.125).unwrap();
    let chart = random_chart(&mut rng, 2, 0, 3, 2.0, 3);
    let v = AsymptoticFunction::new(chart, RemainderField::from_fn(g, remainder_exact), CutoffSpec::bump()).unwrap();
    let lv = generator_apply(&v).unwrap().to_grid();
    let base = v.to_grid();
    let errs: Vec<f64> = [1e-4, 5e-5, 2.5e-5]
        .iter()
        .map(|&t| {
            let q = semigroup_apply(&v, t).unwrap().to_grid().sub(&base).scale(1.0 / t);
            q.sub(&lv).l2_norm()
        })
        .collect();
    // First order; the next term of the expansion shows up as a deficit
    // proportional to t.
    let orders = [(errs[0] / errs[1]).log2(), (errs[1] / errs[2]).log2()];
    assert!(orders[1] > orders[0] && (orders[1] - 1.0).abs() < 0.02, "{errs:?}");
}

#[test]
fn growth_on_remainders_and_charts() {
    let mut rng = ChaCha8Rng::seed_from_u64(27);
    let g = Grid::cube(3, 32, 0.25).unwrap();
    let zero = AsymptoticChart::zeros(3, 0, 2, 4.0, 0, 2).unwrap();
    let rem: Vec<AsymptoticFunction> = (0..3)
        .map(|j| {
            let c = 0.4 * j as f64;
            function(zero.clone(), RemainderField::from_fn(g.clone(), move |x| (-r2(x) - c * x[1]).exp() * (1.0 + c * x[0])))
        })
        .collect();
    let times = [0.5, 1.0, 2.0, 4.0, 8.0];
    let rep = growth_bound_harness(&rem, &NormSpec::h(0, 2.0, 0.0), &times, 1.0).unwrap();
    assert!(rep.ratios.iter().all(|&r| r <= 1.0 + 1e-12), "{:?}", rep.ratios);

    // N = 2, d = 3, p = 4: N* = 2 and μ = 3.
    let samples: Vec<AsymptoticFunction> = (0..3)
        .map(|_| function(random_chart(&mut rng, 3, 0, 2, 4.0, 2), RemainderField::from_fn(g.clone(), |x| (-r2(x)).exp())))
        .collect();
    assert_eq!(growth_exponent_bound(2, samples[0].chart.n_star()), 3.0);
    let rep = growth_bound_harness(&samples, &NormSpec::asymptotic(0, 4.0), &times, 2.0).unwrap();
    assert!(rep.exponent <= 3.1, "{}", rep.exponent);

    // Chart-only growth is polynomial of degree at most N*/2 = 1.
    let only: Vec<AsymptoticFunction> = samples.iter().map(|v| function(v.chart.clone(), RemainderField::zeros(g.clone()))).collect();
    for v in &only {
        let flow = evolve_coefficients(&v.chart);
        let big = [100.0, 200.0].map(|t| flow.eval(t).coeffs().iter().map(|a| a.l2_norm()).sum::<f64>());
        assert!((big[1] / big[0]).log2() <= 1.0 + 1e-2, "{big:?}");
    }
}

#[test]
fn gradient_estimate_for_a_gaussian() {
    let g = Grid::cube(2, 128, 0.25).unwrap();
    let f = RemainderField::from_fn(g, |x| (-r2(x)).exp());
    let times: Vec<f64> = (0..11).map(|j| 1e-3 * 10f64.powf(j as f64 / 2.0)).collect();
    let rep = derivative_estimate_harness(&[f], 0.0, 2.0, &times, 1e-2, 0.2).unwrap();
    let max = rep.scaled.iter().cloned().fold(0.0, f64::max);
    assert!(max.is_finite() && max < 1.0, "{:?}", rep.scaled);
    let c = rep.sector_factor.unwrap();
    assert!(c.is_finite() && c < 5.0, "{c}");
}
