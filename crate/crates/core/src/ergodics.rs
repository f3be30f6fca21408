//! Single-path and ensemble diagnostics for the stationary images: time
//! averages, empirical characteristic functions, autocovariance estimates,
//! decay-rate fits and tail integrals of `|R|`.

use serde::{Deserialize, Serialize};

use crate::exec;
use crate::gauss::Rule;
use crate::kernels::Autocovariance;
use crate::sampler::{Domain, PathEnsemble, TimeGrid};
use crate::{Error, Result};

const FIT_POINTS: usize = 64;
const TAIL_FLOOR: f64 = 1e-14;
const PANEL_ORDER: usize = 20;

fn uniform_step(grid: &TimeGrid, path: &[f64]) -> Result<f64> {
    let step = grid
        .step()
        .ok_or_else(|| Error::Interface("time averages need a uniform grid".into()))?;
    if path.len() != grid.len() {
        return Err(Error::Argument(format!("path has {} values, grid has {}", path.len(), grid.len())));
    }
    Ok(step)
}

/// Trapezoidal `(1/T) ∫ f(X(s)) ds` over the grid.
pub fn time_average(grid: &TimeGrid, path: &[f64], f: impl Fn(f64) -> f64) -> Result<f64> {
    uniform_step(grid, path)?;
    let n = path.len();
    let inner: f64 = path[1..n - 1].iter().map(|&x| f(x)).sum();
    let ends = 0.5 * (f(path[0]) + f(path[n - 1]));
    Ok((inner + ends) / (n - 1) as f64)
}

/// Running trapezoidal averages over `[t_0, t_j]`, reported every `stride`
/// points.
pub fn running_average(grid: &TimeGrid, path: &[f64], f: impl Fn(f64) -> f64, stride: usize) -> Result<Vec<(f64, f64)>> {
    let step = uniform_step(grid, path)?;
    let stride = stride.max(1);
    let t = grid.points();
    let mut out = Vec::new();
    let mut integral = 0.0;
    let mut prev = f(path[0]);
    for j in 1..path.len() {
        let cur = f(path[j]);
        integral += 0.5 * step * (prev + cur);
        prev = cur;
        if j % stride == 0 || j == path.len() - 1 {
            out.push((t[j] - t[0], integral / (t[j] - t[0])));
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CfValue {
    pub k: f64,
    pub re: f64,
    pub im: f64,
}

/// Time average of `e^{ikX(s)}` for each `k`.
pub fn empirical_cf(grid: &TimeGrid, path: &[f64], ks: &[f64]) -> Result<Vec<CfValue>> {
    uniform_step(grid, path)?;
    let vals = exec::map_indices(ks.len(), |i| {
        let k = ks[i];
        let re = time_average(grid, path, |x| (k * x).cos())?;
        let im = time_average(grid, path, |x| (k * x).sin())?;
        Ok(CfValue { k, re, im })
    });
    vals.into_iter().collect()
}

/// Characteristic function of `N(0, variance)`.
pub fn gaussian_cf(k: f64, variance: f64) -> f64 {
    (-0.5 * k * k * variance).exp()
}

/// `max_k |φ̂(k) − φ(k)|` (complex modulus).
pub fn max_cf_deviation(values: &[CfValue], variance: f64) -> f64 {
    values
        .iter()
        .map(|c| (c.re - gaussian_cf(c.k, variance)).hypot(c.im))
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AcfEstimate {
    pub lag: f64,
    pub estimate: f64,
    pub se: f64,
}

/// Jackknife mean and standard error of per-path statistics.
fn jackknife(stats: &[f64]) -> (f64, f64) {
    let m = stats.len() as f64;
    let total: f64 = stats.iter().sum();
    let mean = total / m;
    if stats.len() < 2 {
        return (mean, f64::NAN);
    }
    let loo: Vec<f64> = stats.iter().map(|s| (total - s) / (m - 1.0)).collect();
    let loo_mean = loo.iter().sum::<f64>() / m;
    let var = (m - 1.0) / m * loo.iter().map(|x| (x - loo_mean).powi(2)).sum::<f64>();
    (mean, var.sqrt())
}

fn stationary_step(ens: &PathEnsemble) -> Result<f64> {
    if ens.domain != Domain::Lamperti {
        return Err(Error::Interface("ensemble is not stationary (apply the Lamperti transform first)".into()));
    }
    ens.grid
        .step()
        .ok_or_else(|| Error::Interface("stationary ensemble needs a uniform latent grid".into()))
}

/// Autocovariance at lags `0, Δ, 2Δ, ... ≤ max_lag`, averaged over time and
/// paths, with jackknife-over-paths standard errors. Uses the known zero
/// mean.
pub fn empirical_acf(ens: &PathEnsemble, max_lag: f64) -> Result<Vec<AcfEstimate>> {
    let step = stationary_step(ens)?;
    if !(max_lag >= 0.0) || max_lag >= ens.grid.span() {
        return Err(Error::Argument(format!(
            "max_lag must lie in [0, {}), got {max_lag}",
            ens.grid.span()
        )));
    }
    let lags = (max_lag / step + 1e-9).floor() as usize;
    let n = ens.n_points();
    let per_path = exec::map_indices(ens.n_paths(), |m| {
        let x = ens.paths.row(m);
        let x = x.as_slice().expect("rows are contiguous");
        (0..=lags)
            .map(|l| x[..n - l].iter().zip(&x[l..]).map(|(a, b)| a * b).sum::<f64>() / (n - l) as f64)
            .collect::<Vec<f64>>()
    });
    Ok((0..=lags)
        .map(|l| {
            let stats: Vec<f64> = per_path.iter().map(|p| p[l]).collect();
            let (estimate, se) = jackknife(&stats);
            AcfEstimate { lag: l as f64 * step, estimate, se }
        })
        .collect())
}

/// Ensemble estimate of `E[X(t_i) X(t_j)]` with jackknife standard error.
pub fn pair_covariance(ens: &PathEnsemble, i: usize, j: usize) -> Result<(f64, f64)> {
    if i >= ens.n_points() || j >= ens.n_points() {
        return Err(Error::Argument(format!("grid index out of range: ({i}, {j})")));
    }
    let stats: Vec<f64> = ens.paths.rows().into_iter().map(|r| r[i] * r[j]).collect();
    Ok(jackknife(&stats))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub lambda_hat: f64,
    pub intercept: f64,
    /// Root-mean-square residual of the log-linear fit.
    pub residual: f64,
    pub window: (f64, f64),
}

/// Default fit window `[5/λ, 15/λ]`.
pub fn default_window(nominal_rate: f64) -> (f64, f64) {
    (5.0 / nominal_rate, 15.0 / nominal_rate)
}

/// Least-squares fit of `log R(t)` on a line over tabulated points.
pub fn fit_decay_rate_table(points: &[(f64, f64)]) -> Result<RateFit> {
    if points.len() < 2 {
        return Err(Error::Argument("a rate fit needs at least two points".into()));
    }
    if let Some(&(t, _)) = points.iter().find(|(_, r)| !(*r > 0.0)) {
        return Err(Error::Window { first_crossing: t });
    }
    let n = points.len() as f64;
    let tm = points.iter().map(|p| p.0).sum::<f64>() / n;
    let ym = points.iter().map(|p| p.1.ln()).sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for &(t, r) in points {
        sxy += (t - tm) * (r.ln() - ym);
        sxx += (t - tm) * (t - tm);
    }
    let slope = sxy / sxx;
    let intercept = ym - slope * tm;
    let rss: f64 = points
        .iter()
        .map(|&(t, r)| (r.ln() - intercept - slope * t).powi(2))
        .sum();
    Ok(RateFit {
        lambda_hat: -slope,
        intercept,
        residual: (rss / n).sqrt(),
        window: (points[0].0, points[points.len() - 1].0),
    })
}

/// Fit `λ̂ = −slope` of `log R` on 64 equispaced points of the window
/// (default `[5/λ, 15/λ]` for the evaluator's nominal rate).
pub fn fit_decay_rate(acf: &dyn Autocovariance, window: Option<(f64, f64)>) -> Result<RateFit> {
    let (lo, hi) = window.unwrap_or_else(|| default_window(acf.nominal_rate()));
    if !(hi > lo && lo >= 0.0) {
        return Err(Error::Argument(format!("invalid fit window [{lo}, {hi}]")));
    }
    let ts: Vec<f64> = (0..FIT_POINTS)
        .map(|i| lo + (hi - lo) * i as f64 / (FIT_POINTS - 1) as f64)
        .collect();
    let rs = exec::map_indices(ts.len(), |i| acf.acf(ts[i]));
    let points = ts
        .iter()
        .zip(rs)
        .map(|(&t, r)| r.map(|r| (t, r)))
        .collect::<Result<Vec<_>>>()?;
    fit_decay_rate_table(&points)
}

/// `∫ g` over `[h, ∞)` on panels of width `1/rate`, truncated once
/// `|R| < 1e-14` and closed with `|R(T)|/rate`. `g` receives `(t, R(t))`.
fn panel_tail(acf: &dyn Autocovariance, h: f64, rate: f64, g: impl Fn(f64) -> f64) -> Result<f64> {
    let width = 1.0 / rate;
    let rule = Rule::composite(&[0.0, width], PANEL_ORDER);
    let mut total = 0.0;
    let mut a = h;
    for _ in 0..100_000 {
        let r_a = acf.acf(a)?;
        if r_a.abs() < TAIL_FLOOR {
            return Ok(total + g(r_a.abs()) * width);
        }
        let mut panel = 0.0;
        for (x, w) in rule.nodes.iter().zip(&rule.weights) {
            panel += w * g(acf.acf(a + x)?);
        }
        total += panel;
        a += width;
    }
    Err(Error::Accuracy { estimate: total, error_bound: f64::INFINITY })
}

/// `∫_{|t|≥h} |R(t)| dt`.
pub fn mixing_tail(acf: &dyn Autocovariance, h: f64) -> Result<f64> {
    if !(h > 0.0) {
        return Err(Error::Argument(format!("h must be positive, got {h}")));
    }
    Ok(2.0 * panel_tail(acf, h, acf.nominal_rate(), f64::abs)?)
}

/// `sup_t |R(t)|·e^{λt}` sampled on `[0, 200/λ]`, so that
/// `∫_{|t|≥h}|R| ≤ (2C/λ)·e^{−λh}`.
pub fn decay_constant(acf: &dyn Autocovariance) -> Result<f64> {
    let rate = acf.nominal_rate();
    let pts = 4001;
    let vals = exec::map_indices(pts, |i| {
        let t = 200.0 / rate * i as f64 / (pts - 1) as f64;
        acf.acf(t).map(|r| r.abs() * (rate * t).exp())
    });
    let mut c = 0.0f64;
    for v in vals {
        c = c.max(v?);
    }
    Ok(c)
}

/// Functionals whose time averages are reported.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Observable {
    Moment(u32),
    Cos(f64),
    Sin(f64),
}

impl Observable {
    pub fn apply(&self, x: f64) -> f64 {
        match *self {
            Observable::Moment(k) => x.powi(k as i32),
            Observable::Cos(k) => (k * x).cos(),
            Observable::Sin(k) => (k * x).sin(),
        }
    }

    /// Stationary mean under `N(0, σ²)`.
    pub fn target(&self, var: f64) -> Result<f64> {
        match *self {
            Observable::Moment(k) if k % 2 == 1 => Ok(0.0),
            Observable::Moment(k) => {
                let double_fact: f64 = (1..k).step_by(2).map(|j| j as f64).product();
                Ok(double_fact * var.powi(k as i32 / 2))
            }
            Observable::Cos(k) => Ok(gaussian_cf(k, var)),
            Observable::Sin(_) => Ok(0.0),
        }
    }

    /// `Cov(g(X_t), g(X_0))` as a function of `R(t)`, for jointly Gaussian
    /// `X` with variance `σ²`.
    fn covariance(&self, r: f64, var: f64) -> Result<f64> {
        match *self {
            Observable::Moment(1) => Ok(r),
            Observable::Moment(2) => Ok(2.0 * r * r),
            Observable::Moment(3) => Ok(9.0 * var * var * r + 6.0 * r.powi(3)),
            Observable::Moment(4) => Ok(72.0 * var.powi(2) * r * r + 24.0 * r.powi(4)),
            Observable::Moment(k) => Err(Error::Argument(format!("moment order {k} is not supported (1..=4)"))),
            Observable::Cos(k) => Ok((-k * k * var).exp() * ((k * k * r).cosh() - 1.0)),
            Observable::Sin(k) => Ok((-k * k * var).exp() * (k * k * r).sinh()),
        }
    }
}

/// Standard deviation of the time average of `obs` over a span `T`:
/// `Var = (2/T) ∫_0^T (1 − t/T) Cov(g(X_t), g(X_0)) dt`.
pub fn time_average_sd(acf: &dyn Autocovariance, obs: Observable, span: f64) -> Result<f64> {
    let var = acf.acf(0.0)?;
    obs.covariance(0.0, var)?;
    let rate = acf.nominal_rate();
    let width = (1.0 / rate).min(span);
    let rule = Rule::composite(&[0.0, width], PANEL_ORDER);
    let mut total = 0.0;
    let mut a = 0.0;
    while a < span {
        let b = (a + width).min(span);
        let scale = (b - a) / width;
        let mut panel = 0.0;
        for (x, w) in rule.nodes.iter().zip(&rule.weights) {
            let t = a + x * scale;
            panel += w * scale * (1.0 - t / span) * obs.covariance(acf.acf(t)?, var)?;
        }
        total += panel;
        if acf.acf(b)?.abs() < TAIL_FLOOR {
            break;
        }
        a = b;
    }
    Ok((2.0 * total / span).max(0.0).sqrt())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentEntry {
    pub k: u32,
    pub estimate: f64,
    pub target: f64,
    /// Four standard deviations of the time average.
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EcfEntry {
    pub k: f64,
    pub re: f64,
    pub im: f64,
    pub theoretical: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailEntry {
    pub h: f64,
    pub tail: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErgodicReport {
    pub variance: f64,
    pub time_span: f64,
    pub time_avg_moments: Vec<MomentEntry>,
    pub ecf: Vec<EcfEntry>,
    pub ecf_max_deviation: f64,
    pub nominal_rate: f64,
    pub fitted_rate: RateFit,
    pub mixing_tail: Vec<TailEntry>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportOptions {
    pub moments: Vec<u32>,
    pub ks: Vec<f64>,
    pub tail_lags: Vec<f64>,
    pub window: Option<(f64, f64)>,
}

impl ReportOptions {
    /// Moments 1, 2, 4; `k ∈ [−4, 4]` in steps of 0.1; tail lags
    /// `{3, 6, 9, 12}/λ`.
    pub fn standard(nominal_rate: f64) -> Self {
        Self {
            moments: vec![1, 2, 4],
            ks: (-40..=40).map(|i| i as f64 / 10.0).collect(),
            tail_lags: [3.0, 6.0, 9.0, 12.0].iter().map(|c| c / nominal_rate).collect(),
            window: None,
        }
    }
}

impl ErgodicReport {
    /// Diagnostics of one stationary path against the autocovariance `acf`.
    pub fn build(acf: &dyn Autocovariance, grid: &TimeGrid, path: &[f64], opts: &ReportOptions) -> Result<Self> {
        let var = acf.acf(0.0)?;
        let span = grid.span();
        let mut moments = Vec::new();
        for &k in &opts.moments {
            let obs = Observable::Moment(k);
            moments.push(MomentEntry {
                k,
                estimate: time_average(grid, path, |x| obs.apply(x))?,
                target: obs.target(var)?,
                tolerance: 4.0 * time_average_sd(acf, obs, span)?,
            });
        }
        let cf = empirical_cf(grid, path, &opts.ks)?;
        let ecf_max_deviation = max_cf_deviation(&cf, var);
        let ecf = cf
            .iter()
            .map(|c| EcfEntry { k: c.k, re: c.re, im: c.im, theoretical: gaussian_cf(c.k, var) })
            .collect();
        let fitted_rate = fit_decay_rate(acf, opts.window)?;
        let lambda = acf.nominal_rate();
        let c = decay_constant(acf)?;
        let mut tails = Vec::new();
        for &h in &opts.tail_lags {
            tails.push(TailEntry { h, tail: mixing_tail(acf, h)?, bound: 2.0 * c / lambda * (-lambda * h).exp() });
        }
        Ok(Self {
            variance: var,
            time_span: span,
            time_avg_moments: moments,
            ecf,
            ecf_max_deviation,
            nominal_rate: lambda,
            fitted_rate,
            mixing_tail: tails,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::{AcfEvaluator, HurstParams};
    use crate::sampler::{Family, ModelSpec};
    use ndarray::Array2;

    struct Exp(f64);

    impl Autocovariance for Exp {
        fn acf(&self, lag: f64) -> Result<f64> {
            Ok((-self.0 * lag.abs()).exp())
        }
        fn nominal_rate(&self) -> f64 {
            self.0
        }
    }

    #[test]
    fn constant_path_averages() {
        let g = TimeGrid::uniform(0.0, 3.0, 31).unwrap();
        let p = vec![1.5; 31];
        assert!((time_average(&g, &p, |x| x * x).unwrap() - 2.25).abs() < 1e-14);
        let cf = empirical_cf(&g, &vec![0.0; 31], &[0.0, 1.0, -3.0]).unwrap();
        for c in cf {
            assert_eq!((c.re, c.im), (1.0, 0.0));
        }
        let cf = empirical_cf(&g, &p, &[0.0]).unwrap();
        assert_eq!((cf[0].re, cf[0].im), (1.0, 0.0));
    }

    #[test]
    fn non_uniform_grid_is_rejected() {
        let g = TimeGrid::geometric_from_latent(1.0, 0.0, 1.0, 4).unwrap();
        assert!(matches!(time_average(&g, &[0.0; 4], |x| x), Err(Error::Interface(_))));
    }

    #[test]
    fn trapezoid_is_exact_for_linear_paths() {
        let g = TimeGrid::uniform(0.0, 2.0, 11).unwrap();
        let p: Vec<f64> = g.points().to_vec();
        assert!((time_average(&g, &p, |x| x).unwrap() - 1.0).abs() < 1e-15);
        let run = running_average(&g, &p, |x| x, 5).unwrap();
        assert!((run.last().unwrap().1 - 1.0).abs() < 1e-15);
    }

    #[test]
    fn exponential_fit_is_exact() {
        let fit = fit_decay_rate(&Exp(2.0), Some((0.5, 4.0))).unwrap();
        assert!((fit.lambda_hat - 2.0).abs() < 1e-10);
        assert!(fit.residual < 1e-12);
    }

    #[test]
    fn fit_is_invariant_under_rescaling() {
        let acf = AcfEvaluator::bi_lamperti(HurstParams::new(0.7, 0.6, 1.5).unwrap());
        let base = fit_decay_rate(&acf, None).unwrap();
        let ts: Vec<f64> = (0..64).map(|i| 1.0 + i as f64 * 0.1).collect();
        let pts: Vec<(f64, f64)> = ts.iter().map(|&t| (t, acf.eval(t).unwrap())).collect();
        let scaled: Vec<(f64, f64)> = pts.iter().map(|&(t, r)| (t, 37.5 * r)).collect();
        let a = fit_decay_rate_table(&pts).unwrap();
        let b = fit_decay_rate_table(&scaled).unwrap();
        assert!((a.lambda_hat - b.lambda_hat).abs() <= 1e-12 * a.lambda_hat);
        assert!(base.lambda_hat > 0.0);
    }

    #[test]
    fn window_error_reports_crossing() {
        let pts = [(0.0, 1.0), (1.0, 0.5), (2.0, -0.1), (3.0, 0.1)];
        match fit_decay_rate_table(&pts) {
            Err(Error::Window { first_crossing }) => assert_eq!(first_crossing, 2.0),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn exponential_tail_is_analytic() {
        for (lambda, h) in [(2.0, 0.7), (0.3, 5.0), (1.8, 4.0)] {
            let tail = mixing_tail(&Exp(lambda), h).unwrap();
            let exact = 2.0 * (-lambda * h).exp() / lambda;
            assert!((tail - exact).abs() <= 1e-8 * exact, "{tail} vs {exact}");
        }
    }

    #[test]
    fn sub_tail_ratio() {
        let acf = AcfEvaluator::sub_lamperti(HurstParams::sub(0.6, 3.0).unwrap());
        let ratio = mixing_tail(&acf, 4.0).unwrap() / mixing_tail(&acf, 2.0).unwrap();
        let want = (-3.6f64).exp();
        assert!((ratio / want - 1.0).abs() < 0.05);
        let mut prev = f64::INFINITY;
        for h in [0.1, 0.5, 1.0, 2.0, 4.0, 8.0] {
            let t = mixing_tail(&acf, h).unwrap();
            assert!(t < prev);
            prev = t;
        }
    }

    #[test]
    fn time_average_sd_of_exponential_mean() {
        // Var of the mean of an OU process: (2/T²)(T/λ − (1 − e^{−λT})/λ²)
        let (lambda, span) = (1.5, 40.0);
        let sd = time_average_sd(&Exp(lambda), Observable::Moment(1), span).unwrap();
        let var = 2.0 / span.powi(2) * (span / lambda - (1.0 - (-lambda * span).exp()) / lambda.powi(2));
        assert!((sd - var.sqrt()).abs() < 1e-10);
    }

    #[test]
    fn gaussian_targets() {
        assert_eq!(Observable::Moment(2).target(0.8).unwrap(), 0.8);
        assert!((Observable::Moment(4).target(0.8).unwrap() - 3.0 * 0.64).abs() < 1e-15);
        assert_eq!(Observable::Moment(3).target(0.8).unwrap(), 0.0);
    }

    fn white_noise(m: usize, n: usize, seed: u64) -> PathEnsemble {
        let grid = TimeGrid::latent_uniform(0.0, (n - 1) as f64 * 0.1, n).unwrap();
        let data: Vec<f64> = (0..m).flat_map(|p| crate::rng::standard_normals(seed, p as u64, n)).collect();
        let model = ModelSpec::new(Family::ScaledSubFbm, HurstParams::sub(0.5, 1.0).unwrap());
        PathEnsemble::from_parts(grid, Array2::from_shape_vec((m, n), data).unwrap(), model, Domain::Lamperti, seed).unwrap()
    }

    #[test]
    fn white_noise_acf_vanishes_off_zero() {
        let ens = white_noise(200, 300, 11);
        let acf = empirical_acf(&ens, 2.0).unwrap();
        assert_eq!(acf.len(), 21);
        assert!((acf[0].estimate - 1.0).abs() < 5.0 * acf[0].se);
        for a in &acf[1..] {
            assert!(a.estimate.abs() < 5.0 * a.se, "{a:?}");
        }
        assert!(matches!(empirical_acf(&ens, 30.0), Err(Error::Argument(_))));
    }

    #[test]
    fn jackknife_of_mean_is_standard_error() {
        let xs = [1.0, 2.0, 4.0, 7.0, 11.0];
        let (mean, se) = jackknife(&xs);
        let m = xs.len() as f64;
        let sd = (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (m - 1.0)).sqrt();
        assert!((se - sd / m.sqrt()).abs() < 1e-12);
    }
}
