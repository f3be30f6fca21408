use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum GridKind {
    Uniform,
    /// Points `exp(rate·u_i)` for a uniform latent grid `u_i`.
    Geometric { rate: f64 },
    Explicit,
}

/// Strictly increasing, non-negative sampling times.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    kind: GridKind,
    points: Vec<f64>,
    /// Latent coordinates of a geometric grid.
    latent: Option<Vec<f64>>,
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    let step = (b - a) / (n - 1) as f64;
    let mut v: Vec<f64> = (0..n).map(|i| a + step * i as f64).collect();
    v[n - 1] = b;
    v
}

fn check_bounds(t_start: f64, t_end: f64, n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::Argument(format!("a grid needs at least 2 points, got {n}")));
    }
    if !(t_start.is_finite() && t_end.is_finite() && t_end > t_start) {
        return Err(Error::Argument(format!("grid bounds must satisfy start < end, got [{t_start}, {t_end}]")));
    }
    Ok(())
}

impl TimeGrid {
    pub fn uniform(t_start: f64, t_end: f64, n: usize) -> Result<Self> {
        check_bounds(t_start, t_end, n)?;
        if t_start < 0.0 {
            return Err(Error::Argument(format!("uniform grid must start at t >= 0, got {t_start}")));
        }
        Ok(Self { kind: GridKind::Uniform, points: linspace(t_start, t_end, n), latent: None })
    }

    /// Uniform grid on `[u_start, u_end]` that may start below zero. Used for
    /// the latent axis of stationary processes.
    pub fn latent_uniform(u_start: f64, u_end: f64, n: usize) -> Result<Self> {
        check_bounds(u_start, u_end, n)?;
        Ok(Self { kind: GridKind::Uniform, points: linspace(u_start, u_end, n), latent: None })
    }

    /// Geometric grid with physical bounds `0 < τ_start < τ_end`.
    pub fn geometric(rate: f64, tau_start: f64, tau_end: f64, n: usize) -> Result<Self> {
        if !(tau_start > 0.0) {
            return Err(Error::Argument(format!("geometric grid needs tau_start > 0, got {tau_start}")));
        }
        check_bounds(tau_start, tau_end, n)?;
        Self::geometric_from_latent(rate, tau_start.ln() / rate, tau_end.ln() / rate, n)
    }

    /// Geometric grid `exp(rate·u_i)` for `n` uniform latent points on
    /// `[u_start, u_end]`.
    pub fn geometric_from_latent(rate: f64, u_start: f64, u_end: f64, n: usize) -> Result<Self> {
        if !(rate > 0.0 && rate.is_finite()) {
            return Err(Error::Argument(format!("geometric rate must be positive, got {rate}")));
        }
        check_bounds(u_start, u_end, n)?;
        let latent = linspace(u_start, u_end, n);
        let points: Vec<f64> = latent.iter().map(|u| (rate * u).exp()).collect();
        if points[0] <= 0.0 || !points[n - 1].is_finite() || points.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Argument("geometric grid is not representable in f64".into()));
        }
        Ok(Self { kind: GridKind::Geometric { rate }, points, latent: Some(latent) })
    }

    /// Any strictly increasing list of non-negative times.
    pub fn explicit(points: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Argument("explicit grid is empty".into()));
        }
        if points.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
            return Err(Error::Argument("grid times must be finite and >= 0".into()));
        }
        if points.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Argument("grid times must be strictly increasing".into()));
        }
        Ok(Self { kind: GridKind::Explicit, points, latent: None })
    }

    pub fn kind(&self) -> GridKind {
        self.kind
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn latent(&self) -> Option<&[f64]> {
        self.latent.as_deref()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Spacing of a uniform grid.
    pub fn step(&self) -> Option<f64> {
        match self.kind {
            GridKind::Uniform => Some((self.points[self.len() - 1] - self.points[0]) / (self.len() - 1) as f64),
            _ => None,
        }
    }

    pub fn span(&self) -> f64 {
        self.points[self.len() - 1] - self.points[0]
    }

    /// Latent axis as a uniform grid (for geometric grids), or the grid itself
    /// if it is already uniform.
    pub fn latent_grid(&self) -> Result<TimeGrid> {
        match (&self.kind, &self.latent) {
            (GridKind::Geometric { .. }, Some(u)) => Ok(Self { kind: GridKind::Uniform, points: u.clone(), latent: None }),
            (GridKind::Uniform, _) => Ok(self.clone()),
            _ => Err(Error::Interface("grid has no uniform latent axis".into())),
        }
    }
}

/// Build a grid from bounds. For geometric grids the bounds are physical
/// times, which must be positive.
pub fn build_grid(kind: GridKind, t_start: f64, t_end: f64, n: usize) -> Result<TimeGrid> {
    match kind {
        GridKind::Uniform => TimeGrid::uniform(t_start, t_end, n),
        GridKind::Geometric { rate } => TimeGrid::geometric(rate, t_start, t_end, n),
        GridKind::Explicit => Err(Error::Argument("explicit grids are built from a point list".into())),
    }
}
