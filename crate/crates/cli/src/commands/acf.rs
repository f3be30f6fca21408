
use lamperti_core::ergodics::empirical_acf;
use lamperti_core::lamperti::LampertiMap;
use lamperti_core::sampler::{fmt_f64, prepare, sample_ensemble, JitterPolicy};
use lamperti_core::TimeGrid;
use serde_json::json;

use super::{count, positive, scaled_model};
use crate::config::Settings;
use crate::error::CliResult;
use crate::output::Run;

pub const FILE: &str = "acf.csv";

/// Closed-form autocovariance of the Lamperti image next to the estimate
/// from a fresh ensemble.
pub fn run(settings: Settings) -> CliResult<()> {
    let (model, acf) = scaled_model(&settings)?;
    let n = count(&settings, "n", 2)?;
    let m = count(&settings, "M", 2)?;
    let t_end = positive(&settings, "t_end")?;
    let lag_max = settings.f64("lag_max")?;
    let seed = settings.u64("seed")?;
    let mut run = Run::start("acf", settings)?;

    let grid = TimeGrid::geometric_from_latent(1.0, 0.0, t_end, n)?;
    let raw = sample_ensemble(&prepare(&model, &grid, &JitterPolicy::default())?, m, seed)?;
    let lt = LampertiMap::for_model(&model).forward_ensemble(&raw)?;
    let rows = empirical_acf(&lt, lag_max)?;
    let closed: Vec<f64> = rows.iter().map(|r| acf.eval(r.lag)).collect::<Result<_, _>>()?;

    let path = run.write(FILE, |w| {
        writeln!(w, "lag,estimate,se,closed_form")?;
        for (r, c) in rows.iter().zip(&closed) {
            writeln!(w, "{},{},{},{}", fmt_f64(r.lag), fmt_f64(r.estimate), fmt_f64(r.se), fmt_f64(*c))?;
        }
        Ok(())
    })?;

    let worst = rows
        .iter()
        .zip(&closed)
        .map(|(r, c)| (r.estimate - c).abs() / r.se)
        .fold(0.0, f64::max);
    run.record("ensemble", raw.manifest());
    run.record("summary", json!({ "lags": rows.len(), "max_studentized_deviation": worst }));
    println!("wrote {} ({} lags)", path.display(), rows.len());
    println!("max |estimate - closed form| / se = {worst:.3}");
    run.finish()?;
    Ok(())
}
