use proptest::prelude::*;
use wlab::consts::{a_tilde, clifford_area};
use wlab::moebius::{
    area_of_inverted, plane_to_sphere, psi0, psi0_cartesian, psi0_expanded, psi0_plane, solve_xi, sphere_point, t_omega,
    z0_map, z_map, MoebiusParam,
};

/// Distance to the sphere of radius Ã about −Ã e_x, the limit before the x-reflection.
fn dist_to_limit_sphere(p: [f64; 3]) -> f64 {
    let a = a_tilde();
    (((p[0] + a).powi(2) + p[1] * p[1] + p[2] * p[2]).sqrt() - a).abs()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn psi0_forms_agree(theta in 0.01f64..3.13, phi in 0.0f64..std::f64::consts::TAU) {
        let a = psi0(theta, phi);
        prop_assert!((a - psi0_expanded(theta, phi)).abs() < 1e-13);
        prop_assert!((a - psi0_cartesian(&sphere_point(theta, phi))).abs() < 1e-12);
    }

    #[test]
    fn plane_form_is_the_sphere_form(pb in -20.0f64..20.0, tb in -20.0f64..20.0) {
        let (t, p) = plane_to_sphere(pb, tb);
        prop_assert!((psi0_plane(pb, tb) - psi0(t, p)).abs() < 1e-11);
    }
}

#[test]
fn limit_chart_parametrises_the_limit_sphere() {
    for (pb, tb) in [(0.0, 0.0), (0.3, -0.2), (-2.0, 1.5), (10.0, 4.0)] {
        assert!(dist_to_limit_sphere(z0_map(pb, tb)) < 1e-13);
    }
}

#[test]
fn blown_up_chart_converges_to_the_limit() {
    let pts = [(0.0, 0.0), (0.4, -0.3), (-1.0, 0.8), (2.0, 1.0)];
    let mut prev = f64::INFINITY;
    for eta in [0.1, 0.05, 0.025] {
        let st = solve_xi(eta).unwrap();
        let err = pts
            .iter()
            .map(|&(pb, tb)| {
                let (z, z0) = (z_map(pb, tb, &st), z0_map(pb, tb));
                ((z[0] - z0[0]).powi(2) + (z[1] - z0[1]).powi(2) + (z[2] - z0[2]).powi(2)).sqrt()
            })
            .fold(0.0, f64::max);
        assert!(err < prev, "error {err} at eta = {eta} did not decrease from {prev}");
        prev = err;
    }
    assert!(prev < 0.05);
}

#[test]
fn area_constraint_holds_along_the_family() {
    for eta in [0.3, 0.1, 0.03] {
        let st = solve_xi(eta).unwrap();
        let a = area_of_inverted(eta, st.xi).unwrap();
        assert!((a / clifford_area() - 1.0).abs() < 1e-9, "eta = {eta}: area {a}");
    }
}

#[test]
fn nearly_degenerate_image_hugs_the_limit_sphere() {
    // points of the torus far from the handle land near the sphere once |ω| → 1
    let om = MoebiusParam::radial(0.99).unwrap();
    let st = solve_xi(om.eta()).unwrap();
    let mut worst = 0.0f64;
    for (pb, tb) in [(0.5, 0.2), (-1.0, 0.7), (3.0, -2.0)] {
        let z = z_map(pb, tb, &st);
        worst = worst.max(dist_to_limit_sphere(z));
    }
    assert!(worst < 0.05, "distance {worst}");
    assert!(t_omega(&om, &[0.0, 0.0, 0.0]).is_ok());
    assert!(MoebiusParam::radial(1.0).is_err());
}
