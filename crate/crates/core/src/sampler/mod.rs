//! Exact Gaussian sampling of the supported families on finite grids.

mod cholesky;
mod covariance;
mod ensemble;
mod grid;
mod stationary;

pub use cholesky::{factorize, CholeskyFactor, JitterPolicy};
pub use covariance::covariance_matrix;
pub use ensemble::{fmt_f64, prepare, sample_ensemble, sample_paths, Domain, EnsembleManifest, PathEnsemble, PreparedModel};
pub use grid::{build_grid, GridKind, TimeGrid};
pub use stationary::{sample_stationary, ToeplitzSampler};

use serde::{Deserialize, Serialize};

use crate::kernels::HurstParams;
use crate::Result;

/// Gaussian family of a raw (non-stationary) process.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    SubFbm,
    BiFbm,
    /// `S_H(t^α)`
    ScaledSubFbm,
    /// `B_{H,K}(t^α)`
    ScaledBiFbm,
    /// `c ∫_0^t y^{H(α-1)} dS_H(y)`
    LangevinSub,
    /// `c ∫_0^t y^{HK(α-1)} dB_{H,K}(y)`
    LangevinBi,
}

impl Family {
    pub fn is_bi(self) -> bool {
        matches!(self, Family::BiFbm | Family::ScaledBiFbm | Family::LangevinBi)
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::SubFbm => "sub_fbm",
            Family::BiFbm => "bi_fbm",
            Family::ScaledSubFbm => "scaled_sub_fbm",
            Family::ScaledBiFbm => "scaled_bi_fbm",
            Family::LangevinSub => "langevin_sub",
            Family::LangevinBi => "langevin_bi",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub family: Family,
    pub params: HurstParams,
    /// Normalisation constant of the Langevin families; ignored otherwise.
    pub c_norm: f64,
}

impl ModelSpec {
    pub fn new(family: Family, params: HurstParams) -> Self {
        let params = if family.is_bi() {
            params
        } else {
            HurstParams::new(params.h(), 1.0, params.alpha()).expect("valid params stay valid with K = 1")
        };
        Self { family, params, c_norm: 1.0 }
    }

    pub fn with_c_norm(mut self, c_norm: f64) -> Self {
        self.c_norm = c_norm;
        self
    }

    /// Index `β` such that `X(ct) = c^β X(t)` in distribution.
    pub fn self_similarity_index(&self) -> f64 {
        let p = &self.params;
        match self.family {
            Family::SubFbm | Family::BiFbm => p.h_eff(),
            _ => p.hk_exp(),
        }
    }

    /// Variance at unit time, which is also the variance of the Lamperti image.
    pub fn unit_variance(&self) -> Result<f64> {
        match self.family {
            Family::SubFbm | Family::ScaledSubFbm => Ok(2.0 - (2.0 * self.params.h() - 1.0).exp2()),
            Family::BiFbm | Family::ScaledBiFbm => Ok(1.0),
            Family::LangevinSub | Family::LangevinBi => {
                let spec = crate::langevin::LangevinSpec::from_model(self)?;
                crate::langevin::langevin_cov(&spec, 1.0, 1.0, &Default::default())
            }
        }
    }
}
