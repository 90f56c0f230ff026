use asympheat::heatflow::{growth_exponent_bound, HeatSemigroup};
use asympheat::numeric::linear_fit;
use asympheat::spaces::{asymptotic_norm, serialize_field, write_chart, AsymptoticFunction, NormSpec};
use serde::Serialize;

use super::{CmdResult, Run};
use crate::config::ConfigError;
use crate::report::time_label;

#[derive(Serialize)]
struct Row {
    t: f64,
    sup_norm: f64,
    l2_norm: f64,
    remainder_l2: f64,
    asymptotic_norm: f64,
    leading_drift: f64,
    coefficient_norms: Vec<f64>,
}

/// Heat flow of one asymptotic function with snapshots and norm curves.
pub fn evolve(run: Run<'_>) -> CmdResult {
    let cfg = run.config;
    cfg.validate_common()?;
    let grid = cfg.grid.build()?;
    let ev = &cfg.evolve;
    if ev.times.is_empty() {
        return Err(ConfigError::new("evolve.times", "need at least one time").into());
    }
    for (i, w) in ev.times.windows(2).enumerate() {
        if !(w[1] > w[0]) {
            return Err(ConfigError::new(format!("evolve.times[{}]", i + 1), "times must increase").into());
        }
    }
    if !(ev.times[0] >= 0.0) || !ev.times.iter().all(|t| t.is_finite()) {
        return Err(ConfigError::new("evolve.times", "times must be finite and non-negative").into());
    }
    let chart = cfg.chart.build(grid.dimension(), run.seed)?;
    cfg.remainder.validate("remainder")?;
    let remainder = cfg.remainder.sample(&grid);
    let v = AsymptoticFunction::new(chart, remainder, cfg.cutoff)?;
    let semigroup = HeatSemigroup::new(&v)?;
    let spec = NormSpec::asymptotic(0, v.chart.p());
    let base_norm = asymptotic_norm(&v, &spec)?;

    let n = v.chart.start();
    let leading: Vec<usize> = (n..=(n + 1).min(v.chart.n_star())).collect();
    let mut header = vec!["t", "sup_norm", "l2_norm", "remainder_l2", "asymptotic_norm", "leading_drift"];
    let names: Vec<String> = v.chart.ks().map(|k| format!("a{k}_norm")).collect();
    header.extend(names.iter().map(String::as_str));
    let mut csv = run.out.csv("curves.csv", &header)?;
    let mut rows = Vec::new();
    let mut finite = true;
    for &t in &ev.times {
        let w = semigroup.apply(t)?;
        let values = w.to_grid();
        let mut drift: f64 = 0.0;
        for &k in &leading {
            let a = w.chart.coeff(k).expect("in range");
            let b = v.chart.coeff(k).expect("in range").with_l_max(a.l_max());
            drift = drift.max(a.add_scaled(&b, -1.0).coeffs().iter().fold(0.0, |m, x| m.max(x.abs())));
        }
        let row = Row {
            t,
            sup_norm: values.sup_norm(),
            l2_norm: values.l2_norm(),
            remainder_l2: w.remainder.l2_norm(),
            asymptotic_norm: asymptotic_norm(&w, &spec)?,
            leading_drift: drift,
            coefficient_norms: w.chart.coeffs().iter().map(|a| a.l2_norm()).collect(),
        };
        finite &= values.data().iter().all(|x| x.is_finite());
        let mut cells = vec![row.t, row.sup_norm, row.l2_norm, row.remainder_l2, row.asymptotic_norm, row.leading_drift];
        cells.extend(&row.coefficient_norms);
        csv.row(&cells)?;
        if ev.snapshots {
            let label = time_label(t);
            write_chart(&w.chart, run.out.path(&format!("chart_{label}.json")))?;
            serialize_field(&w.remainder, run.out.path(&format!("remainder_{label}.json")))?;
        }
        rows.push(row);
    }
    csv.finish()?;

    let report = run.report;
    report.push("finite values", finite, if finite { 0.0 } else { 1.0 }, 0.0);
    let max_drift = rows.iter().map(|r| r.leading_drift).fold(0.0, f64::max);
    report.at_most("leading coefficients frozen", max_drift, 0.0);
    let mu = growth_exponent_bound(v.chart.order(), v.chart.n_star());
    let (x, y): (Vec<f64>, Vec<f64>) = rows
        .iter()
        .filter(|r| r.t >= ev.fit_from && base_norm > 0.0)
        .map(|r| ((1.0 + r.t).ln(), (r.asymptotic_norm / base_norm).ln()))
        .unzip();
    let exponent = if x.len() >= 2 { Some(linear_fit(&x, &y).0) } else { None };
    if ev.check_growth {
        match exponent {
            Some(e) => report.at_most("growth exponent", e, mu + 0.1),
            None => {
                return Err(ConfigError::new("evolve.fit_from", "fewer than two times in the fit window").into())
            }
        }
    }
    report.set("n_star", v.chart.n_star());
    report.set("mu", mu);
    report.set("growth_exponent", exponent);
    report.set("rows", &rows);
    Ok(())
}
