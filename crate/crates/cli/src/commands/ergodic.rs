
use lamperti_core::ergodics::{running_average, ErgodicReport, ReportOptions};
use lamperti_core::sampler::{fmt_f64, sample_stationary};
use lamperti_core::{Autocovariance, TimeGrid};

use super::{count, positive, scaled_model};
use crate::config::{parse_grid, Settings};
use crate::error::CliResult;
use crate::output::Run;

pub const REPORT: &str = "ergodic_report.json";
pub const RUNNING: &str = "running_moments.csv";
pub const ECF: &str = "ecf.csv";

/// One long stationary trajectory: time averages, characteristic function,
/// decay-rate fit and tail integrals.
pub fn run(settings: Settings) -> CliResult<()> {
    let (model, acf) = scaled_model(&settings)?;
    let n = count(&settings, "n", 2)?;
    let t_end = positive(&settings, "t_end")?;
    let stride = count(&settings, "stride", 1)?;
    let ks = parse_grid(settings.str("k_grid")?)?;
    let seed = settings.u64("seed")?;
    let mut run = Run::start("ergodic", settings)?;

    let grid = TimeGrid::latent_uniform(0.0, t_end, n)?;
    let ens = sample_stationary(&acf, &model, &grid, 1, seed)?;
    let path = ens.paths.row(0).to_vec();
    let opts = ReportOptions { ks, ..ReportOptions::standard(acf.nominal_rate()) };
    let report = ErgodicReport::build(&acf, &grid, &path, &opts)?;

    let running: Vec<Vec<(f64, f64)>> = [1, 2, 4]
        .iter()
        .map(|&k| running_average(&grid, &path, |x| x.powi(k), stride))
        .collect::<Result<_, _>>()?;
    run.write(RUNNING, |w| {
        writeln!(w, "t,m1,m2,m4")?;
        for ((a, b), c) in running[0].iter().zip(&running[1]).zip(&running[2]) {
            writeln!(w, "{},{},{},{}", fmt_f64(a.0), fmt_f64(a.1), fmt_f64(b.1), fmt_f64(c.1))?;
        }
        Ok(())
    })?;
    run.write(ECF, |w| {
        writeln!(w, "k,re,im,theoretical")?;
        for e in &report.ecf {
            writeln!(w, "{},{},{},{}", fmt_f64(e.k), fmt_f64(e.re), fmt_f64(e.im), fmt_f64(e.theoretical))?;
        }
        Ok(())
    })?;
    let path = run.write_json(REPORT, &report)?;

    run.record("ensemble", ens.manifest());
    println!("wrote {}", path.display());
    for m in &report.time_avg_moments {
        println!("k={} time average {:.6} target {:.6} (tolerance {:.4})", m.k, m.estimate, m.target, m.tolerance);
    }
    println!("max |ECF - Gaussian| = {:.4}", report.ecf_max_deviation);
    println!(
        "fitted rate {:.5} (nominal {:.5})",
        report.fitted_rate.lambda_hat, report.nominal_rate
    );
    run.finish()?;
    Ok(())
}
