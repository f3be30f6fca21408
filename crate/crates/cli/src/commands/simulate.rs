
use lamperti_core::lamperti::LampertiMap;
use lamperti_core::sampler::{fmt_f64, prepare, sample_ensemble, JitterPolicy};
use lamperti_core::TimeGrid;
use serde_json::json;

use super::{count, positive, scaled_model};
use crate::config::Settings;
use crate::error::CliResult;
use crate::output::Run;

pub const FILE: &str = "trajectories.csv";

/// Raw paths of `X(t^α)` on `t = e^u`, `u ∈ [0, t_end]`, next to their
/// Lamperti transforms.
pub fn run(settings: Settings) -> CliResult<()> {
    let (model, acf) = scaled_model(&settings)?;
    let n = count(&settings, "n", 2)?;
    let m = count(&settings, "M", 1)?;
    let t_end = positive(&settings, "t_end")?;
    let seed = settings.u64("seed")?;
    let mut run = Run::start("simulate", settings)?;

    let grid = TimeGrid::geometric_from_latent(1.0, 0.0, t_end, n)?;
    let prepared = prepare(&model, &grid, &JitterPolicy::default())?;
    let raw = sample_ensemble(&prepared, m, seed)?;
    let lt = LampertiMap::for_model(&model).forward_ensemble(&raw)?;

    let path = run.write(FILE, |w| {
        let mut line = String::from("u,t");
        for p in 0..m {
            line.push_str(&format!(",raw_{p},lamperti_{p}"));
        }
        writeln!(w, "{line}")?;
        for (i, (u, t)) in lt.grid.points().iter().zip(grid.points()).enumerate() {
            line.clear();
            line.push_str(&fmt_f64(*u));
            line.push(',');
            line.push_str(&fmt_f64(*t));
            for p in 0..m {
                line.push(',');
                line.push_str(&fmt_f64(raw.paths[[p, i]]));
                line.push(',');
                line.push_str(&fmt_f64(lt.paths[[p, i]]));
            }
            writeln!(w, "{line}")?;
        }
        Ok(())
    })?;

    let variance = lt.paths.iter().map(|x| x * x).sum::<f64>() / lt.paths.len() as f64;
    let target = acf.variance()?;
    run.record("ensemble", raw.manifest());
    run.record(
        "summary",
        json!({
            "lamperti_variance": variance,
            "target_variance": target,
            "relative_deviation": variance / target - 1.0,
        }),
    );
    println!("wrote {} ({m} paths, {n} points)", path.display());
    println!("Lamperti variance {variance:.6} (stationary target {target:.6})");
    run.finish()?;
    Ok(())
}
