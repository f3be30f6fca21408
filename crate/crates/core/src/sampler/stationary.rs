//! Exact sampling of stationary Gaussian sequences on a uniform grid by the
//! Durbin–Levinson recursion: O(n²) time and O(n) memory per path.

use ndarray::Array2;

use super::{Domain, ModelSpec, PathEnsemble, TimeGrid};
use crate::kernels::Autocovariance;
use crate::{exec, rng};
use crate::{Error, Result};

/// Autocovariance sequence `r_0, r_1, ...` with its reflection coefficients
/// and innovation variances.
#[derive(Debug, Clone)]
pub struct ToeplitzSampler {
    r: Vec<f64>,
    reflection: Vec<f64>,
    innovation: Vec<f64>,
}

impl ToeplitzSampler {
    /// Fails with a factorization error at the first lag where the sequence
    /// stops being positive definite.
    pub fn new(r: Vec<f64>) -> Result<Self> {
        let n = r.len();
        if n == 0 {
            return Err(Error::Argument("empty autocovariance sequence".into()));
        }
        if !(r[0] > 0.0) || r.iter().any(|x| !x.is_finite()) {
            return Err(Error::Factorization { pivot: 0, jitter: 0.0 });
        }
        let mut reflection = vec![0.0; n];
        let mut innovation = vec![0.0; n];
        innovation[0] = r[0];
        let mut phi = vec![0.0; n];
        let mut prev = vec![0.0; n];
        for k in 1..n {
            let mut acc = r[k];
            for j in 1..k {
                acc -= phi[j] * r[k - j];
            }
            let kappa = acc / innovation[k - 1];
            let v = innovation[k - 1] * (1.0 - kappa * kappa);
            if !(v > 0.0 && kappa.abs() < 1.0) {
                return Err(Error::Factorization { pivot: k, jitter: 0.0 });
            }
            prev[1..k].copy_from_slice(&phi[1..k]);
            for j in 1..k {
                phi[j] = prev[j] - kappa * prev[k - j];
            }
            phi[k] = kappa;
            reflection[k] = kappa;
            innovation[k] = v;
        }
        Ok(Self { r, reflection, innovation })
    }

    pub fn len(&self) -> usize {
        self.r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }

    pub fn innovation_variances(&self) -> &[f64] {
        &self.innovation
    }

    /// Map i.i.d. standard normals `z` to a path with autocovariance `r`.
    pub fn color(&self, z: &[f64], out: &mut [f64]) {
        let n = self.len();
        let mut phi = vec![0.0; n];
        let mut prev = vec![0.0; n];
        out[0] = self.innovation[0].sqrt() * z[0];
        for k in 1..n {
            let kappa = self.reflection[k];
            prev[1..k].copy_from_slice(&phi[1..k]);
            for j in 1..k {
                phi[j] = prev[j] - kappa * prev[k - j];
            }
            phi[k] = kappa;
            let mut mean = 0.0;
            for j in 1..=k {
                mean += phi[j] * out[k - j];
            }
            out[k] = mean + self.innovation[k].sqrt() * z[k];
        }
    }
}

/// `M` paths of the stationary process with autocovariance `acf` on a uniform
/// (latent) grid. `model` records which raw process the ACF belongs to.
pub fn sample_stationary(
    acf: &dyn Autocovariance,
    model: &ModelSpec,
    grid: &TimeGrid,
    m: usize,
    master_seed: u64,
) -> Result<PathEnsemble> {
    let step = grid
        .step()
        .ok_or_else(|| Error::Interface("stationary sampling needs a uniform grid".into()))?;
    if m == 0 {
        return Err(Error::Argument("ensemble size must be at least 1".into()));
    }
    let n = grid.len();
    let r = exec::map_indices(n, |k| acf.acf(k as f64 * step));
    let r = r.into_iter().collect::<Result<Vec<f64>>>()?;
    let sampler = ToeplitzSampler::new(r)?;
    let mut paths = Array2::zeros((m, n));
    let data = paths.as_slice_mut().expect("fresh array is contiguous");
    exec::for_each_chunk_mut(data, n, |path, row| {
        let z = rng::standard_normals(master_seed, path as u64, n);
        sampler.color(&z, row);
    });
    PathEnsemble::from_parts(grid.clone(), paths, *model, Domain::Lamperti, master_seed)
}
