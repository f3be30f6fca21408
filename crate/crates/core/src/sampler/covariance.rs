use ndarray::Array2;

use super::{Family, ModelSpec, TimeGrid};
use crate::exec;
use crate::kernels::{bi_fbm_cov_unchecked, sub_fbm_cov_unchecked};
use crate::langevin::{self, LangevinSpec};
use crate::Result;

/// `Cov(X(t_i), X(t_j))` on the grid. Closed-form families are assembled row
/// by row (upper triangle, then mirrored); Langevin families go through the
/// double quadrature entry by entry.
pub fn covariance_matrix(model: &ModelSpec, grid: &TimeGrid) -> Result<Array2<f64>> {
    let p = model.params;
    let (h, k, alpha) = (p.h(), p.k(), p.alpha());
    let times: Vec<f64> = match model.family {
        Family::ScaledSubFbm | Family::ScaledBiFbm => grid.points().iter().map(|t| t.powf(alpha)).collect(),
        _ => grid.points().to_vec(),
    };
    let kernel: Box<dyn Fn(f64, f64) -> f64 + Sync> = match model.family {
        Family::SubFbm | Family::ScaledSubFbm => Box::new(move |s, t| sub_fbm_cov_unchecked(s, t, h)),
        Family::BiFbm | Family::ScaledBiFbm => Box::new(move |s, t| bi_fbm_cov_unchecked(s, t, h, k)),
        Family::LangevinSub | Family::LangevinBi => {
            let spec = LangevinSpec::from_model(model)?;
            return langevin::covariance_matrix(&spec, grid, &Default::default());
        }
    };
    let n = times.len();
    let rows = exec::map_indices(n, |i| (i..n).map(|j| kernel(times[i], times[j])).collect::<Vec<f64>>());
    let mut m = Array2::zeros((n, n));
    for (i, row) in rows.into_iter().enumerate() {
        for (off, v) in row.into_iter().enumerate() {
            m[[i, i + off]] = v;
            m[[i + off, i]] = v;
        }
    }
    Ok(m)
}
