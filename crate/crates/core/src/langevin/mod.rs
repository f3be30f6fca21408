//! Langevin-type scaled processes `Ȳ(t) = c ∫_0^t y^β dD(y)` driven by
//! sub-fBm or bi-fBm in the pathwise (Young) regime.
//!
//! Covariances are double integrals of the mixed derivative of the driver's
//! covariance against `(xy)^β`; see [`langevin_cov`].

mod quadrature;

use std::io::Write;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::exec;
use crate::kernels::HurstParams;
use crate::sampler::{Domain, Family, ModelSpec, PathEnsemble, TimeGrid};
use crate::{Error, Result};

use quadrature::Integrand;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DriverKind {
    Sub,
    Bi,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LangevinSpec {
    kind: DriverKind,
    params: HurstParams,
    beta: f64,
    c_norm: f64,
}

impl LangevinSpec {
    /// Sub-fBm driver; needs `H > 1/2`.
    pub fn sub(params: HurstParams, c_norm: f64) -> Result<Self> {
        let params = HurstParams::sub(params.h(), params.alpha())?;
        Self::build(DriverKind::Sub, params, c_norm)
    }

    /// Bi-fBm driver; needs `HK > 1/2`.
    pub fn bi(params: HurstParams, c_norm: f64) -> Result<Self> {
        Self::build(DriverKind::Bi, params, c_norm)
    }

    fn build(kind: DriverKind, params: HurstParams, c_norm: f64) -> Result<Self> {
        let h_eff = params.h_eff();
        if h_eff <= 0.5 {
            return Err(Error::UnsupportedRegime(format!(
                "pathwise Langevin integrals need an effective Hurst index above 1/2, got {h_eff}"
            )));
        }
        if !(c_norm > 0.0 && c_norm.is_finite()) {
            return Err(Error::Domain(format!("c_norm must be positive, got {c_norm}")));
        }
        Ok(Self { kind, params, beta: h_eff * (params.alpha() - 1.0), c_norm })
    }

    pub fn from_model(model: &ModelSpec) -> Result<Self> {
        match model.family {
            Family::LangevinSub => Self::sub(model.params, model.c_norm),
            Family::LangevinBi => Self::bi(model.params, model.c_norm),
            other => Err(Error::Interface(format!("{} is not a Langevin family", other.name()))),
        }
    }

    pub fn model(&self) -> ModelSpec {
        let family = match self.kind {
            DriverKind::Sub => Family::LangevinSub,
            DriverKind::Bi => Family::LangevinBi,
        };
        ModelSpec::new(family, self.params).with_c_norm(self.c_norm)
    }

    pub fn kind(&self) -> DriverKind {
        self.kind
    }

    pub fn params(&self) -> &HurstParams {
        &self.params
    }

    pub fn h_eff(&self) -> f64 {
        self.params.h_eff()
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn c_norm(&self) -> f64 {
        self.c_norm
    }

    pub fn with_c_norm(mut self, c_norm: f64) -> Result<Self> {
        if !(c_norm > 0.0 && c_norm.is_finite()) {
            return Err(Error::Domain(format!("c_norm must be positive, got {c_norm}")));
        }
        self.c_norm = c_norm;
        Ok(self)
    }

    /// Expected exponential decay rate of the Lamperti autocovariance.
    ///
    /// The prefactor contributes `α·h_eff`; the large-argument growth of the
    /// covariance integral caps it at `2 − H` (sub) or `1 − HK` (bi).
    pub fn decay_rate(&self) -> f64 {
        let a = self.params.alpha() * self.h_eff();
        match self.kind {
            DriverKind::Sub => a.min(2.0 - self.params.h()),
            DriverKind::Bi => a.min(1.0 - self.h_eff()),
        }
    }

    /// Variance of the driver at time 1.
    pub fn driver_unit_variance(&self) -> f64 {
        match self.kind {
            DriverKind::Sub => 2.0 - (2.0 * self.params.h() - 1.0).exp2(),
            DriverKind::Bi => 1.0,
        }
    }

    /// Copy with `c_norm` chosen so that `Var(Ȳ(1))` equals the driver's
    /// variance at time 1.
    pub fn normalized(&self, q: &QuadratureConfig) -> Result<Self> {
        let unit = self.with_c_norm(1.0)?;
        let v = langevin_cov(&unit, 1.0, 1.0, q)?;
        unit.with_c_norm((self.driver_unit_variance() / v).sqrt())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    pub rel_tol: f64,
    /// Maximum number of mesh refinement levels.
    pub max_subdivisions: usize,
    pub diagonal_split: bool,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self { rel_tol: 1e-6, max_subdivisions: 6, diagonal_split: true }
    }
}

impl QuadratureConfig {
    pub fn with_rel_tol(rel_tol: f64) -> Result<Self> {
        let q = Self { rel_tol, ..Self::default() };
        q.validate()?;
        Ok(q)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.rel_tol <= 1e-2) {
            return Err(Error::Argument(format!("rel_tol must lie in (0, 1e-2], got {}", self.rel_tol)));
        }
        if self.max_subdivisions < 2 {
            return Err(Error::Argument("max_subdivisions must be at least 2".into()));
        }
        if !self.diagonal_split {
            return Err(Error::Argument("the diagonal split cannot be disabled".into()));
        }
        Ok(())
    }
}

fn check_kernel_args(x: f64, y: f64) -> Result<()> {
    if !(x > 0.0 && y > 0.0 && x.is_finite() && y.is_finite()) {
        return Err(Error::Domain(format!("kernel arguments must be positive, got ({x}, {y})")));
    }
    if x == y {
        return Err(Error::SingularPoint(x));
    }
    Ok(())
}

/// `∂²/∂x∂y` of the sub-fBm covariance, off the diagonal.
pub fn mixed_deriv_sub(x: f64, y: f64, h: f64) -> Result<f64> {
    if !(h > 0.5 && h < 1.0) {
        return Err(Error::UnsupportedRegime(format!("the mixed derivative kernel needs 1/2 < H < 1, got {h}")));
    }
    check_kernel_args(x, y)?;
    Ok(sub_kernel(x, y, (x - y).abs(), h))
}

/// `∂²/∂x∂y` of the bi-fBm covariance, off the diagonal.
pub fn mixed_deriv_bi(x: f64, y: f64, h: f64, k: f64) -> Result<f64> {
    if !(h > 0.0 && h < 1.0 && k > 0.0 && k <= 1.0) {
        return Err(Error::Domain(format!("need 0 < H < 1 and 0 < K <= 1, got ({h}, {k})")));
    }
    if h * k <= 0.5 {
        return Err(Error::UnsupportedRegime(format!("the mixed derivative kernel needs HK > 1/2, got {}", h * k)));
    }
    check_kernel_args(x, y)?;
    Ok(bi_kernel(x, y, (x - y).abs(), h, k))
}

#[inline]
fn sub_kernel(x: f64, y: f64, d: f64, h: f64) -> f64 {
    let e = 2.0 * h - 2.0;
    h * (2.0 * h - 1.0) * (d.powf(e) - (x + y).powf(e))
}

#[inline]
fn bi_kernel(x: f64, y: f64, d: f64, h: f64, k: f64) -> f64 {
    let h2 = 2.0 * h;
    let hk = h * k;
    let cross = if k == 1.0 {
        0.0
    } else {
        4.0 * h * h * k * (k - 1.0) * (x * y).powf(h2 - 1.0) * (x.powf(h2) + y.powf(h2)).powf(k - 2.0)
    };
    (-k).exp2() * (cross + 2.0 * hk * (2.0 * hk - 1.0) * d.powf(2.0 * hk - 2.0))
}

struct Weighted<'a>(&'a LangevinSpec);

impl Integrand for Weighted<'_> {
    #[inline]
    fn eval(&self, x: f64, y: f64, d: f64) -> f64 {
        let s = self.0;
        let w = if s.beta == 0.0 { 1.0 } else { (x * y).powf(s.beta) };
        let k = match s.kind {
            DriverKind::Sub => sub_kernel(x, y, d, s.params.h()),
            DriverKind::Bi => bi_kernel(x, y, d, s.params.h(), s.params.k()),
        };
        w * k
    }

    fn beta(&self) -> f64 {
        self.0.beta
    }

    fn diag_h(&self) -> f64 {
        self.0.h_eff()
    }
}

/// `Cov(Ȳ(u), Ȳ(v))` with its estimated absolute error.
pub fn langevin_cov_with_error(spec: &LangevinSpec, u: f64, v: f64, q: &QuadratureConfig) -> Result<(f64, f64)> {
    q.validate()?;
    if !(u >= 0.0 && v >= 0.0 && u.is_finite() && v.is_finite()) {
        return Err(Error::Domain(format!("times must be finite and >= 0, got ({u}, {v})")));
    }
    let c2 = spec.c_norm * spec.c_norm;
    match quadrature::integrate(&Weighted(spec), u, v, q.rel_tol, q.max_subdivisions) {
        Ok((i, e)) => Ok((c2 * i, c2 * e)),
        Err(Error::Accuracy { estimate, error_bound }) => {
            Err(Error::Accuracy { estimate: c2 * estimate, error_bound: c2 * error_bound })
        }
        Err(e) => Err(e),
    }
}

/// `Cov(Ȳ(u), Ȳ(v)) = c² ∬_{[0,u]×[0,v]} (xy)^β ∂²R(x,y)/∂x∂y dx dy`.
pub fn langevin_cov(spec: &LangevinSpec, u: f64, v: f64, q: &QuadratureConfig) -> Result<f64> {
    langevin_cov_with_error(spec, u, v, q).map(|(c, _)| c)
}

/// Covariance of the Lamperti image `e^{-α·h_eff·t}·Ȳ(e^t)` at `(t, s)`.
pub fn langevin_lt_cov(spec: &LangevinSpec, t: f64, s: f64, q: &QuadratureConfig) -> Result<f64> {
    let a = spec.params.alpha() * spec.h_eff();
    let c = langevin_cov(spec, t.exp(), s.exp(), q)?;
    Ok((-a * (t + s)).exp() * c)
}

/// `(t, R(t))` with `R(t) = langevin_lt_cov(t, 0)` for every lag.
pub fn tabulate_lt_acf(spec: &LangevinSpec, lags: &[f64], q: &QuadratureConfig) -> Result<Vec<(f64, f64)>> {
    lags.iter()
        .map(|&t| langevin_lt_cov(spec, t, 0.0, q).map(|r| (t, r)))
        .collect()
}

/// CSV `t,R(t)`.
pub fn write_acf_csv<W: Write>(table: &[(f64, f64)], mut w: W) -> Result<()> {
    writeln!(w, "t,R(t)")?;
    for (t, r) in table {
        writeln!(w, "{t:.16e},{r:.16e}")?;
    }
    Ok(())
}

/// Covariance matrix of `Ȳ` on a grid, one quadrature per entry.
pub fn covariance_matrix(spec: &LangevinSpec, grid: &TimeGrid, q: &QuadratureConfig) -> Result<Array2<f64>> {
    let t = grid.points();
    let n = t.len();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect();
    let values = exec::map_indices(pairs.len(), |p| {
        let (i, j) = pairs[p];
        crate::exec::sequential(|| langevin_cov(spec, t[i], t[j], q))
    });
    let mut m = Array2::zeros((n, n));
    for (&(i, j), v) in pairs.iter().zip(values) {
        let v = v?;
        m[[i, j]] = v;
        m[[j, i]] = v;
    }
    Ok(m)
}

/// Riemann–Stieltjes sums `Ȳ(t_j) = c Σ_{i<j} m_i^β (D(t_{i+1}) − D(t_i))`
/// with midpoints `m_i`, applied to every driver path.
pub fn sample_langevin_path(driver: &PathEnsemble, spec: &LangevinSpec) -> Result<PathEnsemble> {
    let expected = match spec.kind {
        DriverKind::Sub => Family::SubFbm,
        DriverKind::Bi => Family::BiFbm,
    };
    if driver.model.family != expected || driver.domain != Domain::Raw {
        return Err(Error::Interface(format!(
            "driver must be a raw {} ensemble, got {}",
            expected.name(),
            driver.model.family.name()
        )));
    }
    let (dp, sp) = (driver.model.params, spec.params);
    if dp.h() != sp.h() || (spec.kind == DriverKind::Bi && dp.k() != sp.k()) {
        return Err(Error::Interface("driver parameters differ from the Langevin spec".into()));
    }
    let t = driver.grid.points();
    if t[0] != 0.0 {
        return Err(Error::Interface("driver grid must start at 0".into()));
    }
    let weights: Vec<f64> = t
        .windows(2)
        .map(|w| spec.c_norm * (0.5 * (w[0] + w[1])).powf(spec.beta))
        .collect();
    let n = t.len();
    let mut paths = Array2::zeros(driver.paths.dim());
    let src = driver.paths.as_standard_layout();
    let src = src.as_slice().expect("standard layout");
    let data = paths.as_slice_mut().expect("fresh array is contiguous");
    exec::for_each_chunk_mut(data, n, |m, row| {
        let d = &src[m * n..(m + 1) * n];
        if spec.beta == 0.0 {
            // the sum telescopes
            for (y, x) in row.iter_mut().zip(d) {
                *y = spec.c_norm * (x - d[0]);
            }
            return;
        }
        let mut acc = 0.0;
        row[0] = 0.0;
        for i in 0..n - 1 {
            acc += weights[i] * (d[i + 1] - d[i]);
            row[i + 1] = acc;
        }
    });
    Ok(PathEnsemble {
        grid: driver.grid.clone(),
        paths,
        master_seed: driver.master_seed,
        model: spec.model(),
        domain: Domain::Raw,
        jitter_applied: driver.jitter_applied,
    })
}

#[cfg(test)]
mod tests;
