//! Double integrals `∬_{[0,u]×[0,v]} (xy)^β k(x, y) dx dy` for kernels with an
//! integrable singularity `|x−y|^{2h−2}` on the diagonal.
//!
//! With `a = min(u, v)` and `b = max(u, v)` the square splits into two
//! mirror-image triangles below and above the diagonal plus the rectangle
//! `[a, b] × [0, a]`. On the triangle the distance to the diagonal is
//! substituted as `s = a·z^q` with `q = 1/(2h−1)`, which turns the diagonal
//! factor into a bounded one. Remaining corner and edge singularities are
//! resolved by tensor Gauss rules on geometrically graded meshes. The error
//! estimate is the difference between two successive mesh levels.

use crate::exec;
use crate::gauss::{graded_breaks, graded_breaks_left, Rule};
use crate::{Error, Result};

const GRADING: f64 = 0.2;

/// Symmetric integrand `(xy)^β k(x, y)` with `k` singular like
/// `|x−y|^{2·diag_h−2}` on the diagonal.
pub(crate) trait Integrand: Sync {
    /// Value at `(x, y)` with `d = |x − y| > 0` supplied exactly.
    fn eval(&self, x: f64, y: f64, d: f64) -> f64;
    fn beta(&self) -> f64;
    fn diag_h(&self) -> f64;
}

struct Rules {
    z: Rule,
    w: Rule,
    rho_unit: Rule,
    order: usize,
}

impl Rules {
    fn level(level: usize) -> Self {
        let order = 8 + 4 * level;
        let layers = 10 + 6 * level;
        Self {
            z: Rule::composite(&graded_breaks(layers, GRADING, 0.25), order),
            w: Rule::composite(&graded_breaks(layers, GRADING, 0.25), order),
            rho_unit: Rule::composite(&graded_breaks_left(layers, GRADING, 0.25), order),
            order,
        }
    }

    /// Rule for `ρ ∈ [0, len]`: graded toward 0 on the first unit, then
    /// unit-width cells.
    fn rho(&self, len: f64) -> Rule {
        let first = len.min(1.0);
        let mut rule = Rule {
            nodes: self.rho_unit.nodes.iter().map(|x| x * first).collect(),
            weights: self.rho_unit.weights.iter().map(|w| w * first).collect(),
        };
        if len > 1.0 {
            let cells = (len - 1.0).ceil() as usize;
            let breaks: Vec<f64> = (0..=cells).map(|i| 1.0 + (len - 1.0) * i as f64 / cells as f64).collect();
            let tail = Rule::composite(&breaks, self.order);
            rule.nodes.extend(tail.nodes);
            rule.weights.extend(tail.weights);
        }
        rule
    }
}

/// Exponent of the substitution `y = a·ω^p` that removes `y^β` for `β < 0`.
fn edge_power(beta: f64) -> f64 {
    if beta < 0.0 {
        1.0 / (1.0 + beta)
    } else {
        1.0
    }
}

/// Integral over the triangle `0 < y < x < a`.
fn triangle<F: Integrand>(f: &F, a: f64, rules: &Rules) -> f64 {
    let q = 1.0 / (2.0 * f.diag_h() - 1.0);
    let pw = edge_power(f.beta());
    let per_z = exec::map_indices(rules.z.len(), |i| {
        let z = rules.z.nodes[i];
        let s = a * z.powf(q);
        let rest = a * (-(q * z.ln()).exp_m1());
        if !(s > 0.0 && rest > 0.0) {
            return 0.0;
        }
        let jz = a * q * z.powf(q - 1.0) * rest;
        let mut acc = 0.0;
        for (w, ww) in rules.w.nodes.iter().zip(&rules.w.weights) {
            let y = rest * w.powf(pw);
            let jw = pw * w.powf(pw - 1.0);
            acc += ww * jw * f.eval(y + s, y, s);
        }
        rules.z.weights[i] * jz * acc
    });
    exec::ordered_sum(&per_z)
}

/// Integral over `a < x < b`, `0 < y < a`, with `x = a·e^ρ`, `y = a·ω^p`.
fn rectangle<F: Integrand>(f: &F, a: f64, b: f64, rules: &Rules) -> f64 {
    let rho = rules.rho((b / a).ln());
    let pw = edge_power(f.beta());
    let per_rho = exec::map_indices(rho.len(), |i| {
        let r = rho.nodes[i];
        let x = a * r.exp();
        let em1 = r.exp_m1();
        let mut acc = 0.0;
        for (w, ww) in rules.w.nodes.iter().zip(&rules.w.weights) {
            let wl = w.ln();
            let y = a * (pw * wl).exp();
            // x − y = a·((e^ρ − 1) + (1 − ω^p)), both terms non-negative
            let d = a * (em1 - (pw * wl).exp_m1());
            if !(d > 0.0 && y > 0.0) {
                continue;
            }
            let jw = a * pw * (( pw - 1.0) * wl).exp();
            acc += ww * jw * f.eval(x, y, d);
        }
        rho.weights[i] * x * acc
    });
    exec::ordered_sum(&per_rho)
}

fn square<F: Integrand>(f: &F, u: f64, v: f64, level: usize) -> f64 {
    let (a, b) = if u <= v { (u, v) } else { (v, u) };
    let rules = Rules::level(level);
    let mut total = 2.0 * triangle(f, a, &rules);
    if b > a {
        total += rectangle(f, a, b, &rules);
    }
    total
}

/// `(estimate, error_estimate)` of the integral over `[0,u]×[0,v]`.
pub(crate) fn integrate<F: Integrand>(f: &F, u: f64, v: f64, rel_tol: f64, max_levels: usize) -> Result<(f64, f64)> {
    if u == 0.0 || v == 0.0 {
        return Ok((0.0, 0.0));
    }
    let mut prev = square(f, u, v, 0);
    let mut err = f64::INFINITY;
    for level in 1..max_levels.max(2) {
        let cur = square(f, u, v, level);
        err = (cur - prev).abs();
        if err <= rel_tol * cur.abs() {
            return Ok((cur, err));
        }
        prev = cur;
    }
    Err(Error::Accuracy { estimate: prev, error_bound: err })
}
