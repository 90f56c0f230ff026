use asympheat::resolvent::{
    resolvent_apply, resolvent_identity_residual, resolvent_kernel_d3, resolvent_kernel_hankel, sector_samples,
    sector_sweep, weighted_lp_complex,
};
use asympheat::spaces::ComplexField;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{CmdResult, Run};
use crate::config::Profile;

const KERNEL_TOL: f64 = 1e-12;
const IDENTITY_TOL: f64 = 1e-10;

/// Kernel cross-check, resolvent identity and a sector sweep.
pub fn resolvent(run: Run<'_>) -> CmdResult {
    let cfg = run.config;
    let rc = &cfg.resolvent;
    rc.validate()?;
    let grid = cfg.grid.build()?;
    let report = run.report;

    if rc.d == 3 && rc.kernel_points > 0 {
        let mut rng = ChaCha8Rng::seed_from_u64(run.seed);
        let mut err: f64 = 0.0;
        for _ in 0..rc.kernel_points {
            let lam = Complex64::from_polar(rng.random_range(0.01f64..100.0), rng.random_range(-3.0..3.0));
            let r = rng.random_range(0.05..5.0);
            let a = resolvent_kernel_d3(r, lam)?;
            let b = resolvent_kernel_hankel(r, lam, 3)?;
            err = err.max((a - b).norm() / a.norm());
        }
        report.at_most("hankel kernel vs closed form", err, KERNEL_TOL);
    }

    let f = Profile { tilt: [0.0, 0.5, 0.0], ..Profile::default() }.sample(&grid);
    let mut identity: f64 = 0.0;
    for l in &rc.identity_lambdas {
        identity = identity.max(resolvent_identity_residual(&f, Complex64::new(l[0], l[1]))?);
    }
    if !rc.identity_lambdas.is_empty() {
        report.at_most("resolvent identity", identity, IDENTITY_TOL);
    }

    let points = sector_samples(rc.count, rc.omega, rc.eps, rc.kappa, (rc.rho_min, rc.rho_max), run.seed)?;
    let rows = sector_sweep(&points, rc.delta, rc.d, rc.kappa)?;
    let fnorm = weighted_lp_complex(&ComplexField::from_real(&f), 2.0, rc.delta);
    let mut csv = run.out.csv(
        "sector_sweep.csv",
        &["lambda_re", "lambda_im", "i1", "i2", "scaled", "sector_ratio", "spectral_ratio"],
    )?;
    let mut max_sector: f64 = 0.0;
    let mut max_spectral: f64 = 0.0;
    for (pt, row) in points.iter().zip(&rows) {
        let u = resolvent_apply(&f, pt.lambda)?;
        let spectral = pt.lambda.norm() * weighted_lp_complex(&u, 2.0, rc.delta) / fnorm;
        max_sector = max_sector.max(row.sector_ratio);
        max_spectral = max_spectral.max(spectral);
        csv.row(&[pt.lambda.re, pt.lambda.im, row.i1, row.i2, row.scaled, row.sector_ratio, spectral])?;
    }
    csv.finish()?;
    if rc.d == 3 && rc.delta == 0.0 {
        let bound = (2.0 / std::f64::consts::PI).sqrt();
        report.at_most("schur sector ratio", max_sector, bound * (1.0 + 1e-6));
    }
    report.push("spectral sector ratio finite", max_spectral.is_finite(), max_spectral, f64::MAX);
    report.set("identity_residual", identity);
    report.set("max_sector_ratio", max_sector);
    report.set("max_spectral_ratio", max_spectral);
    Ok(())
}
