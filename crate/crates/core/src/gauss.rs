//! Gauss–Legendre rules and composite rules on graded meshes.

use std::f64::consts::PI;

/// Nodes and weights of the `order`-point Gauss–Legendre rule on [-1, 1].
///
/// Nodes are found by Newton iteration on the Legendre recurrence, starting
/// from the Tricomi approximation; accurate to rounding for the orders used
/// here (up to a few dozen points).
pub fn legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(order >= 1, "Gauss rule needs at least one node");
    let n = order;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_eval(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_eval(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// P_n(x) and P_n'(x).
fn legendre_eval(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// A one-dimensional quadrature rule: `∫ f ≈ Σ w_i f(x_i)`.
#[derive(Debug, Clone, Default)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    /// Composite Gauss rule with `order` points on each cell of `breaks`.
    pub fn composite(breaks: &[f64], order: usize) -> Self {
        let (x, w) = legendre(order);
        let mut rule = Rule::default();
        for cell in breaks.windows(2) {
            let (a, b) = (cell[0], cell[1]);
            if b <= a {
                continue;
            }
            let half = 0.5 * (b - a);
            let mid = 0.5 * (a + b);
            for (xi, wi) in x.iter().zip(&w) {
                rule.nodes.push(mid + half * xi);
                rule.weights.push(half * wi);
            }
        }
        rule
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Breakpoints on [0, 1] refined geometrically toward both endpoints:
/// `layers` cells of ratio `ratio` next to each end, separated by cells of
/// width at most `max_width`.
pub fn graded_breaks(layers: usize, ratio: f64, max_width: f64) -> Vec<f64> {
    let mut left = vec![0.0];
    let mut edge: Vec<f64> = (0..layers)
        .map(|k| 0.5 * ratio.powi((layers - k) as i32))
        .collect();
    left.append(&mut edge);
    left.push(0.5);
    let mut breaks = left.clone();
    // middle is already covered by the two geometric sequences meeting at
    // 0.5; split any cell wider than max_width
    let mut right: Vec<f64> = left.iter().rev().skip(1).map(|x| 1.0 - x).collect();
    breaks.append(&mut right);
    refine_wide(&breaks, max_width)
}

/// Breakpoints on [0, 1] refined geometrically toward 0 only.
pub fn graded_breaks_left(layers: usize, ratio: f64, max_width: f64) -> Vec<f64> {
    let mut breaks = vec![0.0];
    breaks.extend((0..layers).map(|k| ratio.powi((layers - k) as i32)));
    breaks.push(1.0);
    refine_wide(&breaks, max_width)
}

fn refine_wide(breaks: &[f64], max_width: f64) -> Vec<f64> {
    let mut out = vec![breaks[0]];
    for cell in breaks.windows(2) {
        let (a, b) = (cell[0], cell[1]);
        let pieces = ((b - a) / max_width).ceil().max(1.0) as usize;
        for p in 1..=pieces {
            out.push(a + (b - a) * p as f64 / pieces as f64);
        }
    }
    out.dedup();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_is_exact_for_polynomials() {
        for order in 1..=20 {
            let (x, w) = legendre(order);
            for deg in 0..(2 * order) {
                let approx: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32)).sum();
                let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
                assert!((approx - exact).abs() < 1e-13, "order {order} deg {deg}");
            }
        }
    }

    #[test]
    fn graded_rule_handles_endpoint_singularity() {
        // ∫_0^1 x^{-0.5} dx = 2
        let rule = Rule::composite(&graded_breaks_left(60, 0.3, 0.25), 12);
        let v = rule.integrate(|x| x.powf(-0.5));
        assert!((v - 2.0).abs() < 1e-12, "{v}");
    }

    #[test]
    fn breaks_are_sorted_and_span_unit_interval() {
        let b = graded_breaks(10, 0.2, 0.1);
        assert_eq!(b[0], 0.0);
        assert_eq!(*b.last().unwrap(), 1.0);
        assert!(b.windows(2).all(|w| w[1] > w[0]));
        assert!(b.windows(2).all(|w| w[1] - w[0] <= 0.1 + 1e-15));
    }
}
