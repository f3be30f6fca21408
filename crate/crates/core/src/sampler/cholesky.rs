use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::exec;
use crate::{Error, Result};

const BLOCK: usize = 64;

/// Diagonal loadings tried in turn, as multiples of `trace / n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JitterPolicy {
    pub ladder: Vec<f64>,
}

impl Default for JitterPolicy {
    fn default() -> Self {
        Self { ladder: vec![0.0, 1e-12, 1e-10, 1e-8] }
    }
}

impl JitterPolicy {
    /// Exact factorization only.
    pub fn none() -> Self {
        Self { ladder: vec![0.0] }
    }
}

/// Lower-triangular `L` with `L·Lᵀ = A + δI`.
#[derive(Debug, Clone)]
pub struct CholeskyFactor {
    l: Array2<f64>,
    jitter: f64,
}

impl CholeskyFactor {
    pub fn l(&self) -> &Array2<f64> {
        &self.l
    }

    /// The applied `δ`.
    pub fn jitter(&self) -> f64 {
        self.jitter
    }

    pub fn dim(&self) -> usize {
        self.l.nrows()
    }

    /// `max |L·Lᵀ − (A + δI)|`.
    pub fn reconstruction_error(&self, a: &Array2<f64>) -> f64 {
        let n = self.dim();
        let l = &self.l;
        let rows = exec::map_indices(n, |i| {
            let mut worst = 0.0f64;
            for j in 0..=i {
                let mut s = 0.0;
                for k in 0..=j {
                    s += l[[i, k]] * l[[j, k]];
                }
                let target = a[[i, j]] + if i == j { self.jitter } else { 0.0 };
                worst = worst.max((s - target).abs());
            }
            worst
        });
        rows.into_iter().fold(0.0, f64::max)
    }

    /// `L·z`.
    pub fn apply(&self, z: &[f64], out: &mut [f64]) {
        let n = self.dim();
        let l = self.l.as_slice().expect("factor is stored in standard layout");
        for i in 0..n {
            out[i] = dot(&l[i * n..i * n + i + 1], &z[..i + 1]);
        }
    }
}

/// Cholesky factorization with the jitter ladder of `policy`.
///
/// Fails with the pivot index of the last attempt if every rung fails.
pub fn factorize(a: &Array2<f64>, policy: &JitterPolicy) -> Result<CholeskyFactor> {
    let n = a.nrows();
    if n == 0 || a.ncols() != n {
        return Err(Error::Argument(format!("matrix must be square and non-empty, got {:?}", a.dim())));
    }
    let scale = a.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    for i in 0..n {
        for j in 0..i {
            if (a[[i, j]] - a[[j, i]]).abs() > 1e-12 * scale {
                return Err(Error::Argument(format!("matrix is not symmetric at ({i}, {j})")));
            }
        }
    }
    if a.iter().any(|x| !x.is_finite()) {
        return Err(Error::Argument("matrix has non-finite entries".into()));
    }
    let trace: f64 = (0..n).map(|i| a[[i, i]]).sum();
    let unit = trace / n as f64;
    let mut last = Error::Factorization { pivot: 0, jitter: 0.0 };
    for &rel in &policy.ladder {
        let delta = rel * unit;
        let mut buf: Vec<f64> = a.iter().copied().collect();
        for i in 0..n {
            buf[i * n + i] += delta;
        }
        match cholesky_in_place(&mut buf, n) {
            Ok(()) => {
                let l = Array2::from_shape_vec((n, n), buf).expect("shape matches buffer");
                return Ok(CholeskyFactor { l, jitter: delta });
            }
            Err(pivot) => last = Error::Factorization { pivot, jitter: delta },
        }
    }
    Err(last)
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len().min(b.len());
    let (a, b) = (&a[..n], &b[..n]);
    let mut acc = [0.0f64; 4];
    let chunks = n / 4;
    for c in 0..chunks {
        let i = 4 * c;
        acc[0] += a[i] * b[i];
        acc[1] += a[i + 1] * b[i + 1];
        acc[2] += a[i + 2] * b[i + 2];
        acc[3] += a[i + 3] * b[i + 3];
    }
    let mut s = (acc[0] + acc[1]) + (acc[2] + acc[3]);
    for i in 4 * chunks..n {
        s += a[i] * b[i];
    }
    s
}

/// Right-looking blocked Cholesky on a row-major `n×n` buffer. On success
/// the lower triangle holds `L` and the upper triangle is zeroed.
fn cholesky_in_place(a: &mut [f64], n: usize) -> std::result::Result<(), usize> {
    let mut k0 = 0;
    while k0 < n {
        let k1 = (k0 + BLOCK).min(n);
        let b = k1 - k0;
        for i in k0..k1 {
            for j in k0..=i {
                let s = a[i * n + j] - dot(&a[i * n + k0..i * n + j], &a[j * n + k0..j * n + j]);
                if i == j {
                    if !(s > 0.0 && s.is_finite()) {
                        return Err(i);
                    }
                    a[i * n + i] = s.sqrt();
                } else {
                    a[i * n + j] = s / a[j * n + j];
                }
            }
        }
        if k1 == n {
            break;
        }
        let mut diag = vec![0.0; b * b];
        for r in 0..b {
            diag[r * b..(r + 1) * b].copy_from_slice(&a[(k0 + r) * n + k0..(k0 + r) * n + k1]);
        }
        let trailing = &mut a[k1 * n..];
        exec::for_each_chunk_mut(trailing, n, |_, row| {
            for j in 0..b {
                let s = row[k0 + j] - dot(&row[k0..k0 + j], &diag[j * b..j * b + j]);
                row[k0 + j] = s / diag[j * b + j];
            }
        });
        let m = n - k1;
        let mut panel = vec![0.0; m * b];
        for r in 0..m {
            panel[r * b..(r + 1) * b].copy_from_slice(&trailing[r * n + k0..r * n + k1]);
        }
        exec::for_each_chunk_mut(trailing, n, |r, row| {
            let pr = &panel[r * b..(r + 1) * b];
            for c in 0..=r {
                row[k1 + c] -= dot(pr, &panel[c * b..(c + 1) * b]);
            }
        });
        k0 = k1;
    }
    for i in 0..n {
        a[i * n + i + 1..(i + 1) * n].fill(0.0);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::arr2;
    use proptest::prelude::*;

    #[test]
    fn hand_factorization() {
        let f = factorize(&arr2(&[[1.0, 1.0], [1.0, 2.0]]), &JitterPolicy::default()).unwrap();
        assert_eq!(f.l(), &arr2(&[[1.0, 0.0], [1.0, 1.0]]));
        assert_eq!(f.jitter(), 0.0);
    }

    #[test]
    fn identity() {
        let id = Array2::<f64>::eye(5);
        let f = factorize(&id, &JitterPolicy::default()).unwrap();
        assert_eq!(f.l(), &id);
        assert_eq!(f.jitter(), 0.0);
    }

    #[test]
    fn rank_deficient_needs_jitter() {
        let a = arr2(&[[1.0, 1.0], [1.0, 1.0]]);
        let f = factorize(&a, &JitterPolicy::default()).unwrap();
        assert!(f.jitter() > 0.0);
        assert!(f.reconstruction_error(&a) <= 2.0 * f.jitter());
    }

    #[test]
    fn indefinite_reports_pivot() {
        let a = arr2(&[[1.0, 0.0, 0.0], [0.0, 1.0, 2.0], [0.0, 2.0, 1.0]]);
        match factorize(&a, &JitterPolicy::default()) {
            Err(Error::Factorization { pivot, .. }) => assert_eq!(pivot, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_asymmetric() {
        let a = arr2(&[[1.0, 0.5], [0.0, 1.0]]);
        assert!(matches!(factorize(&a, &JitterPolicy::default()), Err(Error::Argument(_))));
    }

    fn random_spd(n: usize, seed: u64) -> Array2<f64> {
        let g = crate::rng::standard_normals(seed, 0, n * n);
        let g = Array2::from_shape_vec((n, n), g).unwrap();
        let mut a = g.dot(&g.t());
        for i in 0..n {
            a[[i, i]] += n as f64;
        }
        a
    }

    #[test]
    fn blocked_path_matches_reference_across_blocks() {
        // n spans several blocks and a ragged last block
        let a = random_spd(150, 9);
        let f = factorize(&a, &JitterPolicy::none()).unwrap();
        let scale = a.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        assert!(f.reconstruction_error(&a) <= 1e-12 * scale);
        let g = exec::sequential(|| factorize(&a, &JitterPolicy::none())).unwrap();
        assert_eq!(f.l(), g.l());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn reconstructs_random_spd(n in 1usize..90, seed in 0u64..1000) {
            let a = random_spd(n, seed);
            let f = factorize(&a, &JitterPolicy::default()).unwrap();
            let scale = a.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            prop_assert!(f.reconstruction_error(&a) <= 1e-12 * scale);
            prop_assert!((0..n).all(|i| (i + 1..n).all(|j| f.l()[[i, j]] == 0.0)));
        }
    }
}
