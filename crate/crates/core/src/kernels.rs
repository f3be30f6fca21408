//! Covariance kernels of sub-fractional and bi-fractional Brownian motion,
//! the stationary autocovariances of their scaled Lamperti transforms, and
//! the associated exponential mixing rates.
//!
//! All functions here are pure and allocation-free. The stationary
//! autocovariances are evaluated with the dominant exponential factored out
//! analytically, so they stay finite (and decay smoothly to zero) for lags
//! far beyond the point where `e^{2αH|t|}` overflows.

use serde::{Deserialize, Serialize};

use crate::langevin::{self, LangevinSpec, QuadratureConfig};
use crate::{Error, Result};

/// Hurst-type parameters shared by every family.
///
/// `k` is the bi-fractional exponent; sub-fractional calls use `k = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HurstParams {
    h: f64,
    k: f64,
    alpha: f64,
}

impl HurstParams {
    pub fn new(h: f64, k: f64, alpha: f64) -> Result<Self> {
        if !(h > 0.0 && h < 1.0) {
            return Err(Error::Domain(format!("H must lie in (0, 1), got {h}")));
        }
        if !(k > 0.0 && k <= 1.0) {
            return Err(Error::Domain(format!("K must lie in (0, 1], got {k}")));
        }
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::Domain(format!("alpha must be positive, got {alpha}")));
        }
        Ok(Self { h, k, alpha })
    }

    /// Parameters for the sub-fractional family (`K = 1`).
    pub fn sub(h: f64, alpha: f64) -> Result<Self> {
        Self::new(h, 1.0, alpha)
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Self-similarity index of the unscaled driver: `H·K`.
    pub fn h_eff(&self) -> f64 {
        self.h * self.k
    }

    /// Self-similarity index of the time-changed process: `α·H·K`.
    pub fn hk_exp(&self) -> f64 {
        self.alpha * self.h * self.k
    }
}

fn check_times(s: f64, t: f64) -> Result<()> {
    if !(s >= 0.0 && t >= 0.0 && s.is_finite() && t.is_finite()) {
        return Err(Error::Domain(format!("times must be finite and >= 0, got ({s}, {t})")));
    }
    Ok(())
}

/// `x^p` for `x >= 0`, `p > 0`, with `0^p = 0` spelled out.
#[inline]
fn pow_pos(x: f64, p: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x.powf(p)
    }
}

/// Sub-fBm covariance `s^{2H} + t^{2H} - ½((s+t)^{2H} + |t-s|^{2H})`.
pub fn sub_fbm_cov(s: f64, t: f64, h: f64) -> Result<f64> {
    check_times(s, t)?;
    if !(h > 0.0 && h < 1.0) {
        return Err(Error::Domain(format!("H must lie in (0, 1), got {h}")));
    }
    Ok(sub_fbm_cov_unchecked(s, t, h))
}

#[inline]
pub(crate) fn sub_fbm_cov_unchecked(s: f64, t: f64, h: f64) -> f64 {
    if s == 0.0 || t == 0.0 {
        return 0.0;
    }
    let two_h = 2.0 * h;
    pow_pos(s, two_h) + pow_pos(t, two_h)
        - 0.5 * (pow_pos(s + t, two_h) + pow_pos((t - s).abs(), two_h))
}

/// Bi-fBm covariance `2^{-K}((s^{2H} + t^{2H})^K - |t-s|^{2HK})`.
pub fn bi_fbm_cov(s: f64, t: f64, h: f64, k: f64) -> Result<f64> {
    check_times(s, t)?;
    HurstParams::new(h, k, 1.0)?;
    Ok(bi_fbm_cov_unchecked(s, t, h, k))
}

#[inline]
pub(crate) fn bi_fbm_cov_unchecked(s: f64, t: f64, h: f64, k: f64) -> f64 {
    if s == 0.0 || t == 0.0 {
        return 0.0;
    }
    let two_h = 2.0 * h;
    let base = pow_pos(s, two_h) + pow_pos(t, two_h);
    (-k * std::f64::consts::LN_2).exp()
        * (base.powf(k) - pow_pos((t - s).abs(), two_h * k))
}

/// Fractional Brownian motion covariance `½(s^{2H} + t^{2H} - |t-s|^{2H})`.
pub fn fbm_cov(s: f64, t: f64, h: f64) -> f64 {
    let two_h = 2.0 * h;
    0.5 * (pow_pos(s, two_h) + pow_pos(t, two_h) - pow_pos((t - s).abs(), two_h))
}

/// Stationary autocovariance of the Lamperti image of scaled sub-fBm,
/// `e^{-αH|t|}(e^{2αH|t|} + 1 - ½[(e^{α|t|}+1)^{2H} + (e^{α|t|}-1)^{2H}])`.
pub fn acf_sub_lamperti(t: f64, p: &HurstParams) -> f64 {
    let h = p.h;
    let s = p.alpha * t.abs();
    if s == 0.0 {
        return 2.0 - (2.0 * h - 1.0).exp2();
    }
    if s < std::f64::consts::LN_2 {
        let x = s.exp();
        let two_h = 2.0 * h;
        return x.powf(-h)
            * (x.powf(two_h) + 1.0 - 0.5 * ((x + 1.0).powf(two_h) + (x - 1.0).powf(two_h)));
    }
    // With z = e^{-s} <= 1/2 the bracket 1 - ½[(1+z)^{2H} + (1-z)^{2H}] is
    // -Σ_{m>=1} C(2H, 2m) z^{2m}; multiplying through by e^{Hs} gives a sum
    // of decaying exponentials with no cancellation.
    let lead = (-h * s).exp();
    let a = 2.0 * h;
    let mut coef = 1.0;
    let mut tail = 0.0;
    for j in 1..400 {
        coef *= (a - j as f64 + 1.0) / j as f64;
        if j % 2 == 1 {
            continue;
        }
        let rel = coef * (-(j as f64) * s).exp();
        tail += coef * (-(j as f64 - h) * s).exp();
        if rel.abs() < 1e-18 || coef == 0.0 {
            break;
        }
    }
    lead - tail
}

/// Stationary autocovariance of the Lamperti image of scaled bi-fBm,
/// `2^{-K} e^{-αHK|t|}((e^{2αH|t|}+1)^K - |e^{α|t|}-1|^{2HK})`.
pub fn acf_bi_lamperti(t: f64, p: &HurstParams) -> f64 {
    let (h, k) = (p.h, p.k);
    let s = p.alpha * t.abs();
    if s == 0.0 {
        return 1.0;
    }
    // Factor e^{2HKs}: bracket = [(1+w)^K - 1] + [1 - (1-z)^{2HK}] with
    // w = e^{-2Hs}, z = e^{-s}; both pieces are positive.
    let w = (-2.0 * h * s).exp();
    let z = (-s).exp();
    let ratio_w = if w > 0.0 { (k * w.ln_1p()).exp_m1() / w } else { k };
    let ratio_z = if z > 0.0 {
        -(2.0 * h * k * (-z).ln_1p()).exp_m1() / z
    } else {
        2.0 * h * k
    };
    let first = (h * k * s - 2.0 * h * s + ratio_w.ln()).exp();
    let second = (h * k * s - s + ratio_z.ln()).exp();
    (-k * std::f64::consts::LN_2).exp() * (first + second)
}

/// Two-term large-lag expansion `e^{-αHt} - H(2H-1) e^{-(2-H)αt}` of
/// [`acf_sub_lamperti`].
pub fn asymp_sub_two_term(t: f64, p: &HurstParams) -> f64 {
    let (h, a) = (p.h, p.alpha);
    (-a * h * t).exp() - h * (2.0 * h - 1.0) * (-(2.0 - h) * a * t).exp()
}

/// Leading large-lag terms of [`acf_bi_lamperti`] as `(coefficient, rate)`
/// pairs: `2^{-K}K e^{-α(2H-HK)t}` and `2^{-K}2HK e^{-α(1-HK)t}`.
pub fn asymp_bi_terms(p: &HurstParams) -> [(f64, f64); 2] {
    let (h, k, a) = (p.h, p.k, p.alpha);
    let scale = (-k * std::f64::consts::LN_2).exp();
    [
        (scale * k, a * (2.0 * h - h * k)),
        (scale * 2.0 * h * k, a * (1.0 - h * k)),
    ]
}

/// Exponential mixing rate `αH` of the sub-fBm Lamperti image.
pub fn mixing_rate_sub(p: &HurstParams) -> f64 {
    p.alpha * p.h
}

/// Exponential mixing rate `α·min{2H - HK, 1 - HK}` of the bi-fBm Lamperti
/// image.
pub fn mixing_rate_bi(p: &HurstParams) -> f64 {
    let hk = p.h * p.k;
    p.alpha * (2.0 * p.h - hk).min(1.0 - hk)
}

/// A stationary autocovariance `R(t)` together with the exponential rate it
/// is expected to decay at.
pub trait Autocovariance: Sync {
    fn acf(&self, lag: f64) -> Result<f64>;
    fn nominal_rate(&self) -> f64;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AcfFamily {
    SubLamperti,
    BiLamperti,
    LangevinSubLamperti,
    LangevinBiLamperti,
}

/// Autocovariance of one of the four stationary Lamperti images.
///
/// The first two families are closed form; the Langevin families go through
/// the singular double quadrature of [`crate::langevin`].
#[derive(Debug, Clone)]
pub struct AcfEvaluator {
    family: AcfFamily,
    params: HurstParams,
    nominal_rate: f64,
    langevin: Option<(LangevinSpec, QuadratureConfig)>,
}

impl AcfEvaluator {
    pub fn sub_lamperti(params: HurstParams) -> Self {
        Self {
            family: AcfFamily::SubLamperti,
            params,
            nominal_rate: mixing_rate_sub(&params),
            langevin: None,
        }
    }

    pub fn bi_lamperti(params: HurstParams) -> Self {
        Self {
            family: AcfFamily::BiLamperti,
            params,
            nominal_rate: mixing_rate_bi(&params),
            langevin: None,
        }
    }

    /// Lamperti image of a Langevin-type process.
    pub fn langevin(spec: LangevinSpec, quadrature: QuadratureConfig) -> Self {
        let family = match spec.kind() {
            langevin::DriverKind::Sub => AcfFamily::LangevinSubLamperti,
            langevin::DriverKind::Bi => AcfFamily::LangevinBiLamperti,
        };
        let params = *spec.params();
        Self {
            family,
            params,
            nominal_rate: spec.decay_rate(),
            langevin: Some((spec, quadrature)),
        }
    }

    pub fn family(&self) -> AcfFamily {
        self.family
    }

    pub fn params(&self) -> &HurstParams {
        &self.params
    }

    /// Variance `R(0)` of the stationary process.
    pub fn variance(&self) -> Result<f64> {
        self.eval(0.0)
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        match self.family {
            AcfFamily::SubLamperti => Ok(acf_sub_lamperti(t, &self.params)),
            AcfFamily::BiLamperti => Ok(acf_bi_lamperti(t, &self.params)),
            AcfFamily::LangevinSubLamperti | AcfFamily::LangevinBiLamperti => {
                let (spec, q) = self.langevin.as_ref().expect("langevin evaluator without spec");
                langevin::langevin_lt_cov(spec, t.abs(), 0.0, q)
            }
        }
    }
}

impl Autocovariance for AcfEvaluator {
    fn acf(&self, lag: f64) -> Result<f64> {
        self.eval(lag)
    }

    fn nominal_rate(&self) -> f64 {
        self.nominal_rate
    }
}
