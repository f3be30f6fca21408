use lamperti_core::ergodics::fit_decay_rate_table;
use lamperti_core::exec;
use lamperti_core::kernels::{bi_fbm_cov, sub_fbm_cov};
use lamperti_core::langevin::{langevin_cov, langevin_lt_cov, write_acf_csv, LangevinSpec, QuadratureConfig};
use lamperti_core::HurstParams;
use serde_json::json;

use super::{count, driver, params, Driver};
use crate::config::Settings;
use crate::error::{CliError, CliResult};
use crate::output::Run;

pub const FILE: &str = "langevin_acf.csv";
pub const REPORT: &str = "langevin_report.json";

const ORACLE_TIMES: [f64; 5] = [0.25, 0.5, 1.0, 2.0, 4.0];
const ORACLE_TOL: f64 = 1e-5;

fn spec(d: Driver, p: HurstParams, c: f64) -> CliResult<LangevinSpec> {
    Ok(match d {
        Driver::Sub => LangevinSpec::sub(p, c)?,
        Driver::Bi => LangevinSpec::bi(p, c)?,
    })
}

/// Largest relative deviation of the quadrature covariance at `α = 1`,
/// `c = 1` from the driver's closed form on a 5×5 grid.
fn oracle_check(d: Driver, p: HurstParams, q: &QuadratureConfig) -> CliResult<f64> {
    let unit = spec(d, HurstParams::new(p.h(), p.k(), 1.0)?, 1.0)?;
    let pairs: Vec<(f64, f64)> = ORACLE_TIMES
        .iter()
        .flat_map(|&u| ORACLE_TIMES.iter().map(move |&v| (u, v)))
        .collect();
    let devs = exec::map_indices(pairs.len(), |i| -> lamperti_core::Result<f64> {
        let (u, v) = pairs[i];
        let got = langevin_cov(&unit, u, v, q)?;
        let want = match d {
            Driver::Sub => sub_fbm_cov(u, v, p.h())?,
            Driver::Bi => bi_fbm_cov(u, v, p.h(), p.k())?,
        };
        Ok((got / want - 1.0).abs())
    });
    let mut worst = 0.0f64;
    for d in devs {
        worst = worst.max(d?);
    }
    Ok(worst)
}

/// Autocovariance of the Lamperti image of the Langevin-type process,
/// tabulated by quadrature, with a decay-rate fit.
pub fn run(settings: Settings) -> CliResult<()> {
    let d = driver(&settings)?;
    let p = params(&settings, d)?;
    let q = QuadratureConfig::with_rel_tol(settings.f64("rel_tol")?)?;
    let mut spec = spec(d, p, settings.f64("c_norm")?)?;
    if settings.bool("normalize")? {
        spec = spec.normalized(&q)?;
    }
    let lags = count(&settings, "lags", 2)?;
    let lag_max = super::positive(&settings, "lag_max")?;
    let (fit_lo, fit_hi) = (settings.f64("fit_lo")?, settings.f64("fit_hi")?);
    let check = settings.bool("check_oracle")?;
    let mut run = Run::start("langevin", settings)?;

    let ts: Vec<f64> = (0..lags).map(|i| lag_max * i as f64 / (lags - 1) as f64).collect();
    let values = exec::map_indices(ts.len(), |i| langevin_lt_cov(&spec, ts[i], 0.0, &q));
    let table: Vec<(f64, f64)> = ts
        .iter()
        .zip(values)
        .map(|(&t, r)| r.map(|r| (t, r)))
        .collect::<Result<_, _>>()?;
    let window: Vec<(f64, f64)> = table.iter().copied().filter(|(t, _)| *t >= fit_lo && *t <= fit_hi).collect();
    if window.len() < 2 {
        return Err(CliError::usage(format!("fit window [{fit_lo}, {fit_hi}] holds fewer than two tabulated lags")));
    }
    let fit = fit_decay_rate_table(&window)?;
    let oracle = if check { Some(oracle_check(d, p, &q)?) } else { None };

    let path = run.write(FILE, |w| write_acf_csv(&table, w))?;
    let report = json!({
        "c_norm": spec.c_norm(),
        "beta": spec.beta(),
        "variance": table[0].1,
        "fitted_rate": fit,
        "expected_rate": spec.decay_rate(),
        "oracle_check": oracle.map(|dev| json!({
            "times": ORACLE_TIMES,
            "max_relative_deviation": dev,
            "tolerance": ORACLE_TOL,
            "passed": dev <= ORACLE_TOL,
        })),
    });
    run.write_json(REPORT, &report)?;
    run.record("summary", &report);
    println!("wrote {} ({lags} lags)", path.display());
    println!(
        "fitted rate {:.5} on [{fit_lo}, {fit_hi}] (residual {:.2e}); expected {:.5}",
        fit.lambda_hat,
        fit.residual,
        spec.decay_rate()
    );
    if let Some(dev) = oracle {
        println!("unit-alpha oracle: max relative deviation {dev:.3e} (tolerance {ORACLE_TOL:e})");
    }
    run.finish()?;
    Ok(())
}
