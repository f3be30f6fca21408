use lamperti_core::ergodics::fit_decay_rate;
use lamperti_core::kernels::{mixing_rate_bi, mixing_rate_sub};
use lamperti_core::{AcfEvaluator, HurstParams};
use serde::Serialize;
use serde_json::json;

use crate::config::Settings;
use crate::error::CliResult;
use crate::output::Run;

pub const FILE: &str = "rates.json";

#[derive(Debug, Serialize)]
#[allow(non_snake_case)]
struct Row {
    H: f64,
    K: Option<f64>,
    alpha: f64,
    lambda_s: f64,
    fitted_s: f64,
    rel_err_s: f64,
    lambda_b: Option<f64>,
    fitted_b: Option<f64>,
    rel_err_b: Option<f64>,
}

fn row(h: f64, k: Option<f64>, alpha: f64) -> CliResult<Row> {
    let ps = HurstParams::sub(h, alpha)?;
    let lambda_s = mixing_rate_sub(&ps);
    let fitted_s = fit_decay_rate(&AcfEvaluator::sub_lamperti(ps), None)?.lambda_hat;
    let mut out = Row {
        H: h,
        K: k,
        alpha,
        lambda_s,
        fitted_s,
        rel_err_s: fitted_s / lambda_s - 1.0,
        lambda_b: None,
        fitted_b: None,
        rel_err_b: None,
    };
    if let Some(k) = k {
        let pb = HurstParams::new(h, k, alpha)?;
        let lambda_b = mixing_rate_bi(&pb);
        let fitted_b = fit_decay_rate(&AcfEvaluator::bi_lamperti(pb), None)?.lambda_hat;
        out.lambda_b = Some(lambda_b);
        out.fitted_b = Some(fitted_b);
        out.rel_err_b = Some(fitted_b / lambda_b - 1.0);
    }
    Ok(out)
}

fn default_sweep() -> Vec<(f64, Option<f64>, f64)> {
    let mut v = Vec::new();
    for h in [0.3, 0.6, 0.8] {
        for alpha in [1.0, 1.5, 3.0] {
            v.push((h, None, alpha));
        }
    }
    for h in [0.4, 0.7] {
        for k in [0.6, 0.9] {
            for alpha in [1.5, 3.0] {
                v.push((h, Some(k), alpha));
            }
        }
    }
    v
}

/// Closed-form mixing rates against rates fitted to the autocovariances.
pub fn run(settings: Settings) -> CliResult<()> {
    let cases = match settings.opt_f64("H")? {
        Some(h) => vec![(h, settings.opt_f64("K")?, settings.opt_f64("alpha")?.unwrap_or(1.0))],
        None => default_sweep(),
    };
    let rows = cases
        .into_iter()
        .map(|(h, k, a)| row(h, k, a))
        .collect::<CliResult<Vec<_>>>()?;
    let mut run = Run::start("rates", settings)?;
    let path = run.write_json(FILE, &json!({ "rows": rows }))?;
    println!("{:>5} {:>5} {:>6} {:>9} {:>9} {:>9} {:>9}", "H", "K", "alpha", "lambda_S", "fit_S", "lambda_B", "fit_B");
    for r in &rows {
        let opt = |x: Option<f64>| x.map_or("-".to_string(), |x| format!("{x:.5}"));
        println!(
            "{:>5} {:>5} {:>6} {:>9.5} {:>9.5} {:>9} {:>9}",
            r.H,
            r.K.map_or("-".to_string(), |k| k.to_string()),
            r.alpha,
            r.lambda_s,
            r.fitted_s,
            opt(r.lambda_b),
            opt(r.fitted_b)
        );
    }
    println!("wrote {}", path.display());
    run.finish()?;
    Ok(())
}
