use chaplygin_wasm::{density_map_impl, measure_check_impl, roll_3d_impl};

#[test]
fn fourth_integral_only_at_eps_one() {
    let m = [1.0, 1.6, 2.3];
    let k = [0.4, -0.7, 0.5];
    let g = [0.0, 0.6, 0.8];
    let plane = roll_3d_impl(1.0, 0.5, &m, &k, &g, 10.0, 1e-3).unwrap();
    assert!(plane.f4_drift < 1e-8, "{}", plane.f4_drift);
    assert!(plane.energy_drift < 1e-8);
    let sphere = roll_3d_impl(0.7, 0.5, &m, &k, &g, 10.0, 1e-3).unwrap();
    assert!(sphere.f4_drift > 1e-3, "{}", sphere.f4_drift);
    assert_eq!(sphere.gamma.len(), 3 * sphere.t.len());
    assert!(sphere.t.len() <= 2001);
    let bf = roll_3d_impl(-1.0, 0.5, &m, &k, &g, 10.0, 1e-3).unwrap();
    assert!(bf.f4_tilde_drift < 1e-8, "{}", bf.f4_tilde_drift);
    assert!(roll_3d_impl(1.0, 0.5, &m[..2], &k, &g, 1.0, 1e-3).is_err());
}

#[test]
fn density_map_matches_closed_form() {
    let a = [1.2, 1.7, 2.6];
    let eps = 0.3;
    let r = density_map_impl(&a, eps, 9, 16).unwrap();
    assert_eq!(r.density.len(), 144);
    // north pole: s = a₃, density s^{1/(2ε) − 1} for n = 3
    let expected = a[2].powf(1.0 / (2.0 * eps) - 1.0);
    assert!((r.density[0] - expected).abs() < 1e-12 * expected);
    assert!((r.multiplier[0] - eps * expected).abs() < 1e-12);
    assert!(density_map_impl(&a, 0.5, 5, 5).unwrap().jk_coefficient.abs() < 1e-15);
    assert!(density_map_impl(&a[..2], eps, 5, 5).is_err());
}

#[test]
fn measure_check_and_control() {
    let ok = measure_check_impl("reduced-special", 3, 0.3, 10, 1).unwrap();
    assert!(ok.passed && ok.max_abs_div < 1e-5);
    let ctl = measure_check_impl("negative-control", 3, 0.3, 10, 1).unwrap();
    assert!(ctl.negative_control && ctl.passed && ctl.min_abs_div > 1e-2);
    assert!(measure_check_impl("all", 3, 0.3, 10, 1).is_err());
    assert!(measure_check_impl("rubber", 9, 0.3, 10, 1).is_err());
}
