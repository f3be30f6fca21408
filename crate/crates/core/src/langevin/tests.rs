use super::*;
use crate::kernels::{bi_fbm_cov, fbm_cov, sub_fbm_cov};

fn q() -> QuadratureConfig {
    QuadratureConfig::default()
}

fn sub(h: f64, alpha: f64) -> LangevinSpec {
    LangevinSpec::sub(HurstParams::sub(h, alpha).unwrap(), 1.0).unwrap()
}

fn bi(h: f64, k: f64, alpha: f64) -> LangevinSpec {
    LangevinSpec::bi(HurstParams::new(h, k, alpha).unwrap(), 1.0).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

#[test]
fn kernel_examples() {
    let v = mixed_deriv_sub(2.0, 1.0, 0.75).unwrap();
    assert!((v - 0.158_493_649_053_890_34).abs() < 1e-15);
    let v = mixed_deriv_bi(2.0, 1.0, 0.8, 0.9).unwrap();
    assert!((v - 0.299_157_669_795_763_3).abs() < 1e-15);
    let h = 0.7;
    let v = mixed_deriv_bi(3.0, 1.2, h, 1.0).unwrap();
    assert!((v - h * (2.0 * h - 1.0) * 1.8f64.powf(2.0 * h - 2.0)).abs() < 1e-15);
    assert_eq!(mixed_deriv_sub(1.3, 0.4, 0.8).unwrap(), mixed_deriv_sub(0.4, 1.3, 0.8).unwrap());
    assert_eq!(mixed_deriv_bi(1.3, 0.4, 0.8, 0.7).unwrap(), mixed_deriv_bi(0.4, 1.3, 0.8, 0.7).unwrap());
    assert!(mixed_deriv_sub(2.0, 1.0, 0.500_001).unwrap() < 1e-5);
}

#[test]
fn kernel_errors() {
    assert!(matches!(mixed_deriv_sub(1.0, 1.0, 0.7), Err(Error::SingularPoint(_))));
    assert!(matches!(mixed_deriv_sub(2.0, 1.0, 0.5), Err(Error::UnsupportedRegime(_))));
    assert!(matches!(mixed_deriv_bi(2.0, 1.0, 0.7, 0.7), Err(Error::UnsupportedRegime(_))));
    assert!(matches!(mixed_deriv_bi(2.0, 2.0, 0.8, 0.9), Err(Error::SingularPoint(_))));
    assert!(matches!(LangevinSpec::sub(HurstParams::sub(0.4, 2.0).unwrap(), 1.0), Err(Error::UnsupportedRegime(_))));
    assert!(LangevinSpec::sub(HurstParams::sub(0.7, 2.0).unwrap(), 0.0).is_err());
}

#[test]
fn beta_follows_params() {
    assert!((sub(0.75, 1.5).beta() - 0.375).abs() < 1e-15);
    assert!((bi(0.8, 0.9, 2.0).beta() - 0.72).abs() < 1e-15);
}

#[test]
fn unit_alpha_collapses_to_driver() {
    let v = langevin_cov(&sub(0.7, 1.0), 1.0, 2.0, &q()).unwrap();
    assert!(rel(v, sub_fbm_cov(1.0, 2.0, 0.7).unwrap()) < 1e-5);
    let v = langevin_cov(&bi(0.7, 1.0, 1.0), 1.0, 1.0, &q()).unwrap();
    assert!(rel(v, 1.0) < 1e-5);
    let v = langevin_cov(&bi(0.8, 0.8, 1.0), 0.3, 2.5, &q()).unwrap();
    assert!(rel(v, bi_fbm_cov(0.3, 2.5, 0.8, 0.8).unwrap()) < 1e-5);
}

#[test]
fn zero_time_gives_zero() {
    assert_eq!(langevin_cov(&sub(0.8, 2.0), 0.0, 3.0, &q()).unwrap(), 0.0);
    assert_eq!(langevin_cov(&bi(0.8, 0.9, 2.0), 1.0, 0.0, &q()).unwrap(), 0.0);
}

#[test]
fn lamperti_examples() {
    let v = langevin_lt_cov(&sub(0.7, 1.0), 0.0, 0.0, &q()).unwrap();
    assert!((v - 0.680_492_089_227_105_7).abs() < 1e-5);
    let spec = bi(0.7, 1.0, 1.0);
    let v = langevin_lt_cov(&spec, 1.0, 0.0, &q()).unwrap();
    let want = (-0.7f64).exp() * fbm_cov(1.0f64.exp(), 1.0, 0.7);
    assert!(rel(v, want) < 1e-5);
    let a = langevin_lt_cov(&spec, 0.4, 1.3, &q()).unwrap();
    let b = langevin_lt_cov(&spec, 1.3, 0.4, &q()).unwrap();
    assert!(rel(a, b) < 1e-9);
}

#[test]
fn c_norm_enters_squared() {
    let s = sub(0.75, 1.5);
    let a = langevin_cov(&s, 0.7, 1.9, &q()).unwrap();
    let b = langevin_cov(&s.with_c_norm(3.0).unwrap(), 0.7, 1.9, &q()).unwrap();
    assert_eq!(b, 9.0 * a);
}

#[test]
fn self_similarity() {
    for spec in [sub(0.75, 1.5), bi(0.8, 0.9, 0.7)] {
        let gamma = 2.0 * spec.params().alpha() * spec.h_eff();
        let base = langevin_cov(&spec, 0.8, 1.7, &q()).unwrap();
        for c in [0.5, 2.0, 4.0] {
            let v = langevin_cov(&spec, c * 0.8, c * 1.7, &q()).unwrap();
            assert!(rel(v, c.powf(gamma) * base) < 1e-4, "c = {c}");
        }
    }
}

#[test]
fn lamperti_image_is_shift_invariant() {
    for spec in [sub(0.75, 1.5), bi(0.8, 0.9, 2.0)] {
        let base = langevin_lt_cov(&spec, 1.5, 0.2, &q()).unwrap();
        for u in [0.3, 1.0] {
            let v = langevin_lt_cov(&spec, 1.5 + u, 0.2 + u, &q()).unwrap();
            assert!(rel(v, base) < 1e-4, "shift {u}");
        }
    }
}

#[test]
fn tighter_tolerance_moves_less_than_error_estimate() {
    let spec = sub(0.9, 2.0);
    let (a, err) = langevin_cov_with_error(&spec, 0.6, 2.2, &q()).unwrap();
    let tight = QuadratureConfig::with_rel_tol(0.5e-6).unwrap();
    let (b, _) = langevin_cov_with_error(&spec, 0.6, 2.2, &tight).unwrap();
    assert!((a - b).abs() <= err.max(1e-15 * a.abs()));
}

#[test]
fn config_validation() {
    assert!(QuadratureConfig::with_rel_tol(0.0).is_err());
    assert!(QuadratureConfig::with_rel_tol(0.05).is_err());
    let q = QuadratureConfig { diagonal_split: false, ..QuadratureConfig::default() };
    assert!(q.validate().is_err());
}

#[test]
fn normalization_matches_driver_variance() {
    let spec = sub(0.75, 1.5).normalized(&q()).unwrap();
    let v = langevin_cov(&spec, 1.0, 1.0, &q()).unwrap();
    assert!(rel(v, spec.driver_unit_variance()) < 1e-9);
}

fn ensemble(family: Family, params: HurstParams, grid: TimeGrid, paths: Vec<Vec<f64>>) -> PathEnsemble {
    let m = paths.len();
    let n = grid.len();
    let data = Array2::from_shape_vec((m, n), paths.concat()).unwrap();
    PathEnsemble::from_parts(grid, data, ModelSpec::new(family, params), Domain::Raw, 0).unwrap()
}

#[test]
fn zero_beta_telescopes() {
    let grid = TimeGrid::uniform(0.0, 1.0, 5).unwrap();
    let p = HurstParams::sub(0.7, 1.0).unwrap();
    let ens = ensemble(Family::SubFbm, p, grid, vec![vec![0.3, 0.1, -0.4, 0.9, 1.7]]);
    let out = sample_langevin_path(&ens, &sub(0.7, 1.0)).unwrap();
    assert_eq!(out.paths.row(0).to_vec(), vec![0.0, 0.1 - 0.3, -0.4 - 0.3, 0.9 - 0.3, 1.7 - 0.3]);
}

#[test]
fn deterministic_driver_riemann_sum() {
    // β = H(α − 1) = 1
    let h = 0.75;
    let alpha = 1.0 + 1.0 / h;
    let spec = sub(h, alpha);
    assert!((spec.beta() - 1.0).abs() < 1e-15);
    // the midpoint rule is exact for the linear integrand
    for n in [11, 101, 1001] {
        let grid = TimeGrid::uniform(0.0, 1.0, n).unwrap();
        let path = grid.points().to_vec();
        let ens = ensemble(Family::SubFbm, HurstParams::sub(h, alpha).unwrap(), grid, vec![path]);
        let out = sample_langevin_path(&ens, &spec).unwrap();
        assert!((out.paths[[0, n - 1]] - 0.5).abs() < 1e-12);
    }
}

#[test]
fn driver_must_match() {
    let grid = TimeGrid::uniform(0.0, 1.0, 3).unwrap();
    let ens = ensemble(Family::BiFbm, HurstParams::new(0.8, 0.9, 1.0).unwrap(), grid.clone(), vec![vec![0.0; 3]]);
    assert!(matches!(sample_langevin_path(&ens, &sub(0.8, 1.0)), Err(Error::Interface(_))));
    let shifted = TimeGrid::uniform(0.5, 1.0, 3).unwrap();
    let ens = ensemble(Family::SubFbm, HurstParams::sub(0.8, 1.0).unwrap(), shifted, vec![vec![0.0; 3]]);
    assert!(matches!(sample_langevin_path(&ens, &sub(0.8, 1.0)), Err(Error::Interface(_))));
}
