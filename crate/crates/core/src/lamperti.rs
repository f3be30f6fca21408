//! Scaled Lamperti transform between a self-similar process on a geometric
//! grid and a stationary process on its uniform latent grid.
//!
//! A process `X` that is `γ`-self-similar and sampled at `τ_i = e^{r·u_i}`
//! becomes stationary in `u` after multiplying by `e^{-γ·r·u_i}`. The map is
//! parametrised by `α` and `h_eff`, with exponent `α·h_eff = γ·r`. For the
//! unscaled drivers (`γ = H` or `HK`) this means a grid rate of `α`; for the
//! time-changed families (`γ = αH` or `αHK`) a grid rate of 1. Both give the
//! same stationary process.

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::exec;
use crate::sampler::{Domain, GridKind, ModelSpec, PathEnsemble, TimeGrid};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LampertiMap {
    alpha: f64,
    h_eff: f64,
}

impl LampertiMap {
    pub fn new(alpha: f64, h_eff: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::Domain(format!("alpha must be positive, got {alpha}")));
        }
        if !(h_eff > 0.0 && h_eff < 1.0) {
            return Err(Error::Domain(format!("h_eff must lie in (0, 1), got {h_eff}")));
        }
        Ok(Self { alpha, h_eff })
    }

    /// Map whose image of `model` is the stationary Lamperti process.
    pub fn for_model(model: &ModelSpec) -> Self {
        Self { alpha: model.params.alpha(), h_eff: model.params.h_eff() }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn h_eff(&self) -> f64 {
        self.h_eff
    }

    /// `α·h_eff`.
    pub fn exponent(&self) -> f64 {
        self.alpha * self.h_eff
    }

    fn latent<'a>(&self, grid: &'a TimeGrid) -> Result<&'a [f64]> {
        match (grid.kind(), grid.latent()) {
            (GridKind::Geometric { .. }, Some(u)) => Ok(u),
            _ => Err(Error::Interface("the Lamperti transform needs a geometric grid".into())),
        }
    }

    /// `e^{-α·h_eff·u_i}·raw_i` on the latent times of a geometric grid.
    pub fn forward(&self, grid: &TimeGrid, raw: &[f64]) -> Result<Vec<f64>> {
        let u = self.latent(grid)?;
        check_len(u.len(), raw.len())?;
        let a = self.exponent();
        Ok(u.iter().zip(raw).map(|(u, x)| (-a * u).exp() * x).collect())
    }

    /// `e^{α·h_eff·u_i}·stationary_i`, the raw path at `τ_i` of the geometric
    /// grid.
    pub fn inverse(&self, grid: &TimeGrid, stationary: &[f64]) -> Result<Vec<f64>> {
        let u = self.latent(grid)?;
        check_len(u.len(), stationary.len())?;
        let a = self.exponent();
        Ok(u.iter().zip(stationary).map(|(u, x)| (a * u).exp() * x).collect())
    }

    /// Transform every path of a raw ensemble. The grid rate must match the
    /// self-similarity index of the ensemble's model, otherwise the result
    /// would not be stationary.
    pub fn forward_ensemble(&self, ens: &PathEnsemble) -> Result<PathEnsemble> {
        if ens.domain != Domain::Raw {
            return Err(Error::Interface("ensemble is already in the Lamperti domain".into()));
        }
        let rate = match ens.grid.kind() {
            GridKind::Geometric { rate } => rate,
            _ => return Err(Error::Interface("the Lamperti transform needs a geometric grid".into())),
        };
        let gamma = ens.model.self_similarity_index();
        if ((gamma * rate) - self.exponent()).abs() > 1e-12 * self.exponent() {
            return Err(Error::Interface(format!(
                "grid rate {rate} with self-similarity index {gamma} does not match exponent {}",
                self.exponent()
            )));
        }
        let u = self.latent(&ens.grid)?.to_vec();
        let a = self.exponent();
        let scale: Vec<f64> = u.iter().map(|u| (-a * u).exp()).collect();
        let paths = scale_rows(&ens.paths, &scale);
        Ok(PathEnsemble {
            grid: ens.grid.latent_grid()?,
            paths,
            master_seed: ens.master_seed,
            model: ens.model,
            domain: Domain::Lamperti,
            jitter_applied: ens.jitter_applied,
        })
    }

    /// Raw ensemble at `τ_i = e^{rate·u_i}` from a stationary ensemble on a
    /// uniform latent grid.
    pub fn inverse_ensemble(&self, ens: &PathEnsemble, rate: f64) -> Result<PathEnsemble> {
        if ens.domain != Domain::Lamperti {
            return Err(Error::Interface("ensemble is not in the Lamperti domain".into()));
        }
        if ens.grid.step().is_none() {
            return Err(Error::Interface("stationary ensemble needs a uniform latent grid".into()));
        }
        let u = ens.grid.points();
        let grid = TimeGrid::geometric_from_latent(rate, u[0], u[u.len() - 1], u.len())?;
        let a = self.exponent();
        let scale: Vec<f64> = grid.latent().expect("geometric").iter().map(|u| (a * u).exp()).collect();
        Ok(PathEnsemble {
            grid,
            paths: scale_rows(&ens.paths, &scale),
            master_seed: ens.master_seed,
            model: ens.model,
            domain: Domain::Raw,
            jitter_applied: ens.jitter_applied,
        })
    }

    /// `E[X(t)^k]` of the raw process from the `k`-th moment of its
    /// stationary image: `t^{k·α·h_eff}·m_k`.
    pub fn moment_reconstruct(&self, stationary_moment: f64, t: f64, k: u32) -> Result<f64> {
        if !(t > 0.0) {
            return Err(Error::Domain(format!("t must be positive, got {t}")));
        }
        Ok(t.powf(k as f64 * self.exponent()) * stationary_moment)
    }
}

fn check_len(grid: usize, path: usize) -> Result<()> {
    if grid != path {
        return Err(Error::Argument(format!("path has {path} values, grid has {grid}")));
    }
    Ok(())
}

fn scale_rows(paths: &Array2<f64>, scale: &[f64]) -> Array2<f64> {
    let mut out = paths.to_owned();
    let n = out.ncols();
    let data = out.as_slice_mut().expect("owned array is contiguous");
    exec::for_each_chunk_mut(data, n, |_, row| {
        for (x, s) in row.iter_mut().zip(scale) {
            *x *= s;
        }
    });
    out
}
