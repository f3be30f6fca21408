mod acf;
mod ergodic;
mod langevin;
mod rates;
mod simulate;

pub use acf::run as acf;
pub use ergodic::run as ergodic;
pub use langevin::run as langevin;
pub use rates::run as rates;
pub use simulate::run as simulate;

use lamperti_core::{AcfEvaluator, Family, HurstParams, ModelSpec};

use crate::config::Settings;
use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Driver {
    Sub,
    Bi,
}

pub fn driver(s: &Settings) -> CliResult<Driver> {
    match s.str("family")? {
        "sub" => Ok(Driver::Sub),
        "bi" => Ok(Driver::Bi),
        other => Err(CliError::usage(format!("family must be `sub` or `bi`, got `{other}`"))),
    }
}

/// `(H, K, α)`; `K` is required for the bi family and must be absent or 1
/// for the sub family.
pub fn params(s: &Settings, d: Driver) -> CliResult<HurstParams> {
    let h = s.f64("H")?;
    let alpha = s.f64("alpha")?;
    let k = match d {
        Driver::Sub => {
            if s.opt_f64("K")?.is_some_and(|k| k != 1.0) {
                return Err(CliError::usage("K only applies to the bi family"));
            }
            1.0
        }
        Driver::Bi => s.f64("K")?,
    };
    Ok(HurstParams::new(h, k, alpha)?)
}

/// Time-changed model `X(t^α)` and the autocovariance of its Lamperti image.
pub fn scaled_model(s: &Settings) -> CliResult<(ModelSpec, AcfEvaluator)> {
    let d = driver(s)?;
    let p = params(s, d)?;
    Ok(match d {
        Driver::Sub => (ModelSpec::new(Family::ScaledSubFbm, p), AcfEvaluator::sub_lamperti(p)),
        Driver::Bi => (ModelSpec::new(Family::ScaledBiFbm, p), AcfEvaluator::bi_lamperti(p)),
    })
}

pub fn positive(s: &Settings, name: &str) -> CliResult<f64> {
    let x = s.f64(name)?;
    if !(x > 0.0 && x.is_finite()) {
        return Err(CliError::usage(format!("`{name}` must be positive, got {x}")));
    }
    Ok(x)
}

pub fn count(s: &Settings, name: &str, min: usize) -> CliResult<usize> {
    let n = s.usize(name)?;
    if n < min {
        return Err(CliError::usage(format!("`{name}` must be at least {min}, got {n}")));
    }
    Ok(n)
}
