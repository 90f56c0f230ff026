use std::f64::consts::PI;

use asympheat::heatflow::{heat_apply, nonsmoothing_check, semigroup_apply, HeatSemigroup};
use asympheat::oracle::{gaussian_convolve, l_delta_conjugation_check, newtonian_potential_at};
use asympheat::resolvent::{resolvent_apply, resolvent_apply_kernel};
use asympheat::spaces::{n_star, AsymptoticChart, AsymptoticFunction, CutoffSpec, Grid, RemainderField};
use asympheat::sphere::{basis_constant, SphereGrid};
use clap::ValueEnum;
use num_complex::Complex64;
use serde::Serialize;

use super::{CmdResult, Run};
use crate::config::{ChartConfig, Profile};
use crate::report::Check;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    /// Identity and zero cases; runs in well under a second.
    Trivial,
    /// Primary paths against the brute-force oracles.
    Oracle,
}

fn r2(x: &[f64; 3]) -> f64 {
    x[0] * x[0] + x[1] * x[1] + x[2] * x[2]
}

fn max_abs_diff(a: &RemainderField, b: &RemainderField) -> f64 {
    a.sub(b).sup_norm()
}

pub fn verify(run: Run<'_>, suite: Suite) -> CmdResult {
    run.report.set("suite", suite);
    match suite {
        Suite::Trivial => trivial(run),
        Suite::Oracle => oracle(run),
    }
}

fn trivial(run: Run<'_>) -> CmdResult {
    let report = run.report;
    report.at_most("n_star(2, 3, 4) = 2", (n_star(2, 3, 4.0) as f64 - 2.0).abs(), 0.0);

    let grid = Grid::centered(2, 32, 4.0)?;
    let cutoff = CutoffSpec::default();
    report.at_most("cutoff vanishes at r0", cutoff.eval(1.0), 0.0);
    report.at_most("cutoff is one at r1", (cutoff.eval(2.0) - 1.0).abs(), 0.0);

    let zero_chart = AsymptoticChart::zeros(2, 0, 2, 4.0, 1, 2)?;
    let zero = AsymptoticFunction::new(zero_chart, RemainderField::zeros(grid.clone()), cutoff)?;
    let s = semigroup_apply(&zero, 1.0)?;
    report.at_most("S(t) 0 = 0", s.to_grid().sup_norm(), 0.0);

    let chart = ChartConfig::default().build(2, run.seed)?;
    let v = AsymptoticFunction::new(chart, Profile::default().sample(&grid), cutoff)?;
    let s0 = HeatSemigroup::new(&v)?.apply(0.0)?;
    report.at_most("S(0) v = v", max_abs_diff(&s0.to_grid(), &v.to_grid()), 0.0);
    let ns = nonsmoothing_check(&v, &[0.1, 1.0, 10.0])?;
    report.at_most("a_0, a_1 frozen", ns.max_drift, 0.0);

    let one = RemainderField::from_fn(grid.clone(), |_| 1.0);
    report.at_most("heat flow keeps constants", max_abs_diff(&heat_apply(&one, 0.7)?, &one), 1e-14);

    let r = resolvent_apply(&RemainderField::zeros(grid.clone()), Complex64::new(1.0, 2.0))?;
    report.at_most("R(λ) 0 = 0", r.sup_norm(), 0.0);

    let sg = SphereGrid::new(3, 4)?;
    let a = sg.analyze(&vec![1.0; sg.len()], 4)?;
    let c = a.coeffs();
    let off = c[1..].iter().fold(0.0f64, |m, x| m.max(x.abs()));
    report.at_most("sphere analysis of a constant", (c[0] * basis_constant(3) - 1.0).abs().max(off), 1e-13);

    report.at_most("L_0 equals the Laplacian", l_delta_conjugation_check(&Profile::default().sample(&grid), 0.0), 1e-14);
    Ok(())
}

fn oracle(run: Run<'_>) -> CmdResult {
    let mut checks = Vec::new();
    let mut check = |name: &str, value: f64, threshold: f64| {
        checks.push(Check { name: name.to_string(), passed: value <= threshold, value, threshold });
    };

    // Spectral semigroup on a full asymptotic datum vs direct convolution.
    let grid = Grid::centered(2, 256, 20.0)?;
    let chart = ChartConfig::default().build(2, run.seed)?;
    let cutoff = CutoffSpec::default();
    let rem = Profile { width: 2f64.sqrt(), tilt: [0.3, 0.0, 0.0], ..Profile::default() };
    let v = AsymptoticFunction::new(chart.clone(), rem.sample(&grid), cutoff)?;
    let t = 0.5;
    let full = semigroup_apply(&v, t)?.to_grid();
    let exact_v = |y: &[f64; 3]| {
        let c = cutoff.eval((y[0] * y[0] + y[1] * y[1]).sqrt());
        let tail = if c == 0.0 { 0.0 } else { c * chart.eval_tail(y) };
        tail + rem.eval(y)
    };
    let (conv, targets) = gaussian_convolve(&exact_v, t, &grid, 32);
    let (mut num, mut den) = (0.0, 0.0);
    for &i in &targets {
        num += (full.data()[i] - conv.data()[i]).powi(2);
        den += conv.data()[i].powi(2);
    }
    check("semigroup vs gaussian convolution", (num / den).sqrt(), 1e-3);

    // Heat flow of a Gaussian against its closed form.
    let g3 = Grid::centered(3, 64, 16.0)?;
    let gauss = RemainderField::from_fn(g3.clone(), |x| (-r2(x) / 4.0).exp());
    let exact = RemainderField::from_fn(g3.clone(), |x| 2f64.powf(-1.5) * (-r2(x) / 8.0).exp());
    check("gaussian heat flow vs closed form", max_abs_diff(&heat_apply(&gauss, 1.0)?, &exact), 1e-8);

    // Newtonian potential of a ball outside its support.
    let g = Grid::centered(3, 24, 3.0)?;
    let ball = RemainderField::from_fn(g.clone(), |x| if r2(x) <= 1.0 { 1.0 } else { 0.0 });
    let mass = ball.data().iter().sum::<f64>() * g.cell_volume();
    let pts = [[4.0, 0.0, 0.0], [0.0, 3.0, 4.0], [-3.0, 3.0, 3.0]];
    let pot = newtonian_potential_at(&ball, &pts)?;
    let err = pts
        .iter()
        .zip(&pot)
        .map(|(x, u)| {
            let want = -mass / (4.0 * PI * r2(x).sqrt());
            ((u - want) / want).abs()
        })
        .fold(0.0, f64::max);
    check("newtonian potential vs point charge", err, 1e-3);

    // Conjugated Laplacian against its expansion.
    let fine = Profile { width: 2f64.sqrt(), ..Profile::default() }.sample(&Grid::centered(2, 128, 8.0)?);
    let h = fine.grid().spacing();
    check("conjugated laplacian identity", l_delta_conjugation_check(&fine, 2.0), 2.0 * h * h);

    // Spectral resolvent against kernel quadrature.
    let lambda = Complex64::new(2.0, 0.0);
    let gk = Grid::centered(3, 64, 10.0)?;
    let f = |x: &[f64; 3]| (-r2(x)).exp();
    let spectral = resolvent_apply(&RemainderField::from_fn(gk.clone(), f), lambda)?;
    let idx: Vec<usize> = (0..gk.len())
        .filter(|&i| {
            let k = gk.unravel(i);
            k.iter().all(|&j| j % 8 == 4) && r2(&gk.point(i)) < 16.0
        })
        .collect();
    let tp: Vec<[f64; 3]> = idx.iter().map(|&i| gk.point(i)).collect();
    let quad = resolvent_apply_kernel(f, lambda, &tp, 8.0)?;
    let (mut num, mut den) = (0.0, 0.0);
    for (k, &i) in idx.iter().enumerate() {
        num += (quad[k] - spectral.data()[i]).norm_sqr();
        den += quad[k].norm_sqr();
    }
    check("spectral resolvent vs kernel quadrature", (num / den).sqrt(), 1e-3);

    for c in &checks {
        run.report.push(&c.name, c.passed, c.value, c.threshold);
    }
    run.out.write_json("oracle_report.json", &checks)?;
    Ok(())
}
