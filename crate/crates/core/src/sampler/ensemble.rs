use std::io::Write;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use super::{covariance_matrix, factorize, CholeskyFactor, JitterPolicy, ModelSpec, TimeGrid};
use crate::{exec, rng};
use crate::{Error, Result};

/// Whether paths hold the raw self-similar process or its stationary
/// Lamperti image (indexed by latent time).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Domain {
    Raw,
    Lamperti,
}

/// `M` paths on a shared grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PathEnsemble {
    pub grid: TimeGrid,
    /// `M × n`, one path per row.
    pub paths: Array2<f64>,
    pub master_seed: u64,
    pub model: ModelSpec,
    pub domain: Domain,
    pub jitter_applied: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[allow(non_snake_case)]
pub struct EnsembleManifest {
    pub family: String,
    pub H: f64,
    pub K: f64,
    pub alpha: f64,
    pub seed: u64,
    pub n: usize,
    pub M: usize,
    pub jitter_applied: f64,
}

impl PathEnsemble {
    pub fn from_parts(grid: TimeGrid, paths: Array2<f64>, model: ModelSpec, domain: Domain, master_seed: u64) -> Result<Self> {
        if paths.ncols() != grid.len() || paths.nrows() == 0 {
            return Err(Error::Argument(format!(
                "paths have shape {:?}, grid has {} points",
                paths.dim(),
                grid.len()
            )));
        }
        Ok(Self { grid, paths, master_seed, model, domain, jitter_applied: 0.0 })
    }

    pub fn n_paths(&self) -> usize {
        self.paths.nrows()
    }

    pub fn n_points(&self) -> usize {
        self.paths.ncols()
    }

    pub fn manifest(&self) -> EnsembleManifest {
        let p = self.model.params;
        EnsembleManifest {
            family: self.model.family.name().to_string(),
            H: p.h(),
            K: p.k(),
            alpha: p.alpha(),
            seed: self.master_seed,
            n: self.n_points(),
            M: self.n_paths(),
            jitter_applied: self.jitter_applied,
        }
    }

    /// CSV with header `t,path_0,...,path_{M-1}`, one row per grid point.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let mut line = String::from("t");
        for m in 0..self.n_paths() {
            line.push_str(&format!(",path_{m}"));
        }
        writeln!(w, "{line}")?;
        for (i, t) in self.grid.points().iter().enumerate() {
            line.clear();
            line.push_str(&fmt_f64(*t));
            for m in 0..self.n_paths() {
                line.push(',');
                line.push_str(&fmt_f64(self.paths[[m, i]]));
            }
            writeln!(w, "{line}")?;
        }
        Ok(())
    }

    pub fn write_manifest<W: Write>(&self, w: W) -> Result<()> {
        serde_json::to_writer_pretty(w, &self.manifest())?;
        Ok(())
    }
}

/// Round-trip exact decimal form (17 significant digits).
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// A model with its factorized covariance on a fixed grid, ready to sample.
#[derive(Debug, Clone)]
pub struct PreparedModel {
    pub model: ModelSpec,
    pub grid: TimeGrid,
    pub factor: CholeskyFactor,
}

pub fn prepare(model: &ModelSpec, grid: &TimeGrid, policy: &JitterPolicy) -> Result<PreparedModel> {
    let cov = covariance_matrix(model, grid)?;
    let factor = factorize(&cov, policy)?;
    Ok(PreparedModel { model: *model, grid: grid.clone(), factor })
}

/// `M × n` array whose row `m` is `L·z_m`, `z_m` drawn from substream
/// `(master_seed, m)`.
pub fn sample_paths(factor: &CholeskyFactor, m: usize, master_seed: u64) -> Array2<f64> {
    let n = factor.dim();
    let mut out = Array2::zeros((m, n));
    let data = out.as_slice_mut().expect("fresh array is contiguous");
    exec::for_each_chunk_mut(data, n, |path, row| {
        let z = rng::standard_normals(master_seed, path as u64, n);
        factor.apply(&z, row);
    });
    out
}

pub fn sample_ensemble(prepared: &PreparedModel, m: usize, master_seed: u64) -> Result<PathEnsemble> {
    if m == 0 {
        return Err(Error::Argument("ensemble size must be at least 1".into()));
    }
    Ok(PathEnsemble {
        grid: prepared.grid.clone(),
        paths: sample_paths(&prepared.factor, m, master_seed),
        master_seed,
        model: prepared.model,
        domain: Domain::Raw,
        jitter_applied: prepared.factor.jitter(),
    })
}
