use asympheat::semilinear::{
    chart_from_modes, equilibrium_solve_with, flow_with, genericity_sweep, max_principle_checks_with,
    EquilibriumResult, ExtendedInverse, FlowOptions, GenericityOptions, SemilinearProblem,
};
use asympheat::spaces::{n_star, serialize_field, write_chart, AsymptoticFunction, RemainderField};

use super::{CliError, CmdResult, Run};
use crate::config::{Config, FlowStart};
use crate::report::{time_label, Report};

/// Purity an extracted `a_k` must reach to count as a `Δ_θ` eigenfunction.
const MIN_PURITY: f64 = 0.99;

fn problem(cfg: &Config) -> Result<SemilinearProblem, CliError> {
    cfg.grid.validate()?;
    cfg.problem.validate(&cfg.grid)?;
    let grid = cfg.grid.build()?;
    let (phi, psi) = cfg.problem.fields(&grid)?;
    let pc = &cfg.problem;
    Ok(SemilinearProblem::new(phi, psi, pc.order, pc.p)?
        .with_cutoff(pc.cutoff)
        .with_tolerances(pc.tolerances.clone()))
}

/// Solve, or record the failure as a failed check.
fn solve(prob: &SemilinearProblem, inv: &ExtendedInverse, report: &mut Report) -> Result<Option<EquilibriumResult>, CliError> {
    match equilibrium_solve_with(prob, inv) {
        Ok(res) => Ok(Some(res)),
        Err(asympheat::Error::NewtonDiverged { iterations, residual, history }) => {
            report.at_most("newton residual", residual, prob.tolerances.newton_tol);
            report.set("newton_iterations", iterations);
            report.set("residual_history", history);
            Ok(None)
        }
        Err(e) => Err(e.into()),
    }
}

pub fn equilibrium(run: Run<'_>) -> CmdResult {
    let cfg = run.config;
    let prob = problem(cfg)?;
    let inv = ExtendedInverse::new(prob.grid(), &prob.cutoff, prob.order, prob.p)?;
    let report = run.report;
    let Some(res) = solve(&prob, &inv, report)? else {
        return Ok(());
    };
    let values = RemainderField::new(prob.grid().clone(), res.values.clone())?;
    serialize_field(&values, run.out.path("u_star.json"))?;
    write_chart(&res.u_star.chart, run.out.path("chart.json"))?;

    report.at_most("newton residual", res.residual, prob.tolerances.newton_tol);
    let purity = res.purity.iter().map(|p| p.purity).fold(1.0, f64::min);
    report.at_least("eigenfunction purity", purity, MIN_PURITY);
    if !cfg.problem.skip_max_principle {
        let mp = max_principle_checks_with(&res, &prob, &inv)?;
        report.at_least("max principle margin", mp.margin, 0.0);
        report.push("nested ball maxima monotone", mp.monotone, if mp.monotone { 0.0 } else { 1.0 }, 0.0);
        report.set("max_principle", &mp);
    }
    report.set("summary", res.summary());
    report.set("chart", asympheat::spaces::chart_json(&res.u_star.chart));
    report.set("multipole_chart", asympheat::spaces::chart_json(&res.multipole_chart));
    Ok(())
}

pub fn flow(run: Run<'_>) -> CmdResult {
    let cfg = run.config;
    let fc = &cfg.flow;
    fc.validate()?;
    let prob = problem(cfg)?;
    let report = run.report;
    let mut start = match fc.start {
        FlowStart::Equilibrium => {
            let inv = ExtendedInverse::new(prob.grid(), &prob.cutoff, prob.order, prob.p)?;
            let Some(res) = solve(&prob, &inv, report)? else {
                return Ok(());
            };
            res.u_star
        }
        FlowStart::Zero => {
            let ns = n_star(prob.order, 3, prob.p);
            let chart = chart_from_modes(&vec![0.0; ns * ns], prob.order, prob.p)?;
            AsymptoticFunction::new(chart, RemainderField::zeros(prob.grid().clone()), prob.cutoff)?
        }
    };
    let u_star = start.clone();
    if let Some(p) = &fc.perturbation {
        start.remainder = start.remainder.add(&p.sample(prob.grid()));
    }
    let opts = FlowOptions {
        t_end: fc.t_end,
        dt: fc.dt,
        snapshot_every: fc.snapshot_every,
        monitor_p: fc.monitor_p.clone(),
        delta: fc.delta,
    };
    let result = match flow_with(&start, &prob, &opts) {
        Ok(r) => r,
        Err(asympheat::Error::BlowUp { t, sup }) => {
            report.at_most("sup norm bounded", sup, prob.tolerances.blow_up);
            report.set("blow_up_time", t);
            return Ok(());
        }
        Err(e) => return Err(e.into()),
    };

    let mut header = vec!["t".to_string()];
    header.extend(fc.monitor_p.iter().map(|p| format!("lp_norm_p{p}")));
    header.push("sup_norm".into());
    let ks = result.monitors.first().map(|m| m.drift.len()).unwrap_or(0);
    header.extend((1..=ks).map(|k| format!("a{k}_drift")));
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let mut csv = run.out.csv("monitors.csv", &header)?;
    for m in &result.monitors {
        let mut row = vec![m.t];
        row.extend(&m.lp_norms);
        row.push(m.sup_norm);
        row.extend(&m.drift);
        csv.row(&row)?;
    }
    csv.finish()?;
    for (t, s) in result.snapshots.iter().skip(1) {
        let label = time_label(*t);
        write_chart(&s.chart, run.out.path(&format!("chart_{label}.json")))?;
        serialize_field(&s.remainder, run.out.path(&format!("remainder_{label}.json")))?;
    }

    let drift = result.max_drift();
    let frozen = drift.iter().take(2).fold(0.0, |m: f64, d| m.max(*d));
    report.at_most("a1, a2 invariant", frozen, 0.0);
    if prob.phi.data().iter().all(|v| *v == 0.0) && fc.delta == 0.0 {
        for (j, p) in fc.monitor_p.iter().enumerate() {
            report.at_most(&format!("L^{p} norm non-increasing"), result.max_increase(j), fc.monotone_slack);
        }
    }
    if fc.start == FlowStart::Equilibrium && fc.perturbation.is_none() {
        let target = u_star.to_grid();
        let mut dist: f64 = 0.0;
        for (_, s) in result.snapshots.iter().chain(std::iter::once(&(fc.t_end, result.final_state.clone()))) {
            dist = dist.max(s.to_grid().sub(&target).sup_norm());
        }
        report.at_most("stays at equilibrium", dist, fc.stationary_tol);
    }
    report.set("max_drift", drift);
    report.set("final_sup_norm", result.monitors.last().map(|m| m.sup_norm));
    report.set("steps", result.monitors.len() - 1);
    Ok(())
}

/// Genericity sweep over random perturbations of `φ`.
pub fn sweep(run: Run<'_>) -> CmdResult {
    let cfg = run.config;
    let prob = problem(cfg)?;
    let sc = &cfg.sweep;
    sc.validate(n_star(prob.order, 3, prob.p))?;
    let opts = GenericityOptions {
        trials: sc.trials,
        scale: sc.scale,
        threshold: sc.threshold,
        k_max: sc.k_max,
        seed: run.seed,
    };
    let stats = genericity_sweep(&prob, &opts)?;
    let ks = stats.base_norms.len();
    let mut header = vec!["trial".to_string()];
    header.extend((1..=ks).map(|k| format!("a{k}_norm")));
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let mut csv = run.out.csv("sweep.csv", &header)?;
    for (i, norms) in stats.trial_norms.iter().enumerate() {
        let mut row = vec![i as f64];
        row.extend(norms);
        csv.row(&row)?;
    }
    csv.finish()?;
    run.report.at_least("non-vanishing fraction", stats.fraction, sc.min_fraction);
    run.report.set("genericity", &stats);
    Ok(())
}
