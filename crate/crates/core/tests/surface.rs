use std::f64::consts::PI;
use wlab::consts::clifford_willmore;
use wlab::linalg::{rot_x, rot_z, matmul};
use wlab::surface::{
    area, first_variation, geometry_at, hawking_mass, willmore_energy, Chart, CliffordTorus, ParamSurface, RoundSphere,
    Rotated, Scaled,
};
use wlab::{AmbientMetric, CurvatureData, Real};

/// Torus of revolution with radii `(R, r)`, normal moved by `t·φ`.
#[derive(Clone, Copy)]
struct PushedTorus {
    big: f64,
    small: f64,
    t: f64,
}

fn phi_field<T: Real>(u: T, v: T) -> T {
    u.cos() * 0.7 + (v * 2.0).sin() * 0.3 + (u + v).cos() * 0.2
}

impl Chart for PushedTorus {
    fn eval<T: Real>(&self, u: T, v: T) -> [T; 3] {
        let rho = u.cos() * self.small + self.big;
        let n = [u.cos() * v.cos(), u.cos() * v.sin(), u.sin()];
        let s = phi_field(u, v) * self.t;
        [rho * v.cos() + n[0] * s, rho * v.sin() + n[1] * s, u.sin() * self.small + n[2] * s]
    }
    fn orientation(&self) -> f64 {
        -1.0
    }
}

fn curved(eps: f64) -> AmbientMetric {
    AmbientMetric::new(eps, CurvatureData::from_eigenvalues([1.0, 2.0, 3.0]))
}

#[test]
fn round_sphere_values() {
    let flat = AmbientMetric::flat();
    let s = ParamSurface::sphere(RoundSphere { rho: 1.7, center: [0.3, -0.2, 0.1] }, 48, 48);
    assert!((willmore_energy(&s, &flat).unwrap() - 16.0 * PI).abs() < 1e-10);
    assert!((area(&s, &flat).unwrap() - 4.0 * PI * 1.7 * 1.7).abs() < 1e-10);
    assert!(hawking_mass(&s, &flat).unwrap().abs() < 1e-11);
    let g = geometry_at(&s.chart, &flat, 0.9, 2.0);
    assert!((g.h - 2.0 / 1.7).abs() < 1e-13);
}

#[test]
fn willmore_is_scale_and_rotation_invariant() {
    let flat = AmbientMetric::flat();
    let rot = matmul(&rot_z(0.3), &rot_x(1.1));
    let s = ParamSurface::torus(Rotated { base: Scaled { base: CliffordTorus, lambda: 0.37 }, rot }, 128, 128);
    assert!((willmore_energy(&s, &flat).unwrap() / clifford_willmore() - 1.0).abs() < 1e-12);
    let a0 = area(&ParamSurface::torus(CliffordTorus, 128, 128), &flat).unwrap();
    assert!((area(&s, &flat).unwrap() / a0 - 0.37 * 0.37).abs() < 1e-12);
}

#[test]
fn second_fundamental_form_identity_in_curved_metric() {
    let am = curved(0.3);
    let chart = PushedTorus { big: 2.0, small: 0.8, t: 0.1 };
    for (u, v) in [(0.1, 0.2), (1.3, -2.0), (-2.7, 0.9), (3.0, 3.0)] {
        let g = geometry_at(&chart, &am, u, v);
        assert!((g.a0_sq + 0.5 * g.h * g.h - g.a_sq).abs() < 1e-11 * (1.0 + g.a_sq));
        // n is unit in the ambient metric and orthogonal to the tangent plane
        let gm = am.metric(&g.x);
        let ip = |a: &[f64; 3], b: &[f64; 3]| wlab::linalg::bilinear(&gm, a, b);
        assert!((ip(&g.n, &g.n) - 1.0).abs() < 1e-13);
        assert!(ip(&g.n, &g.xu).abs() < 1e-13 && ip(&g.n, &g.xv).abs() < 1e-13);
    }
}

fn w_of(t: f64, n: usize) -> f64 {
    let s = ParamSurface::torus(PushedTorus { big: 2.0, small: 0.8, t }, n, n);
    willmore_energy(&s, &AmbientMetric::flat()).unwrap()
}

#[test]
fn first_variation_matches_finite_difference() {
    let n = 96;
    let s = ParamSurface::torus(PushedTorus { big: 2.0, small: 0.8, t: 0.0 }, n, n);
    let flat = AmbientMetric::flat();
    // analytic torus normal is the outer unit normal used by the library
    let p = wlab::surface::el_at(&s.chart, &flat, 0.4, 1.2);
    let want = [0.4f64.cos() * 1.2f64.cos(), 0.4f64.cos() * 1.2f64.sin(), 0.4f64.sin()];
    assert!(p.n.iter().zip(&want).all(|(a, b)| (a - b).abs() < 1e-13));
    let dw = first_variation(&s, &flat, |u, v, _| phi_field(u, v));
    let h = 1e-3;
    let fd = (8.0 * (w_of(h, n) - w_of(-h, n)) - (w_of(2.0 * h, n) - w_of(-2.0 * h, n))) / (12.0 * h);
    assert!(dw.abs() > 1e-2, "variation too small to be a test: {dw}");
    assert!((dw - fd).abs() < 1e-6 * dw.abs().max(1.0), "variation {dw} vs difference {fd}");
}

#[test]
fn first_variation_is_linear_in_phi() {
    let am = curved(0.2);
    let s = ParamSurface::torus(PushedTorus { big: 2.0, small: 0.8, t: 0.05 }, 48, 48);
    let f1 = first_variation(&s, &am, |u, _, _| u.cos());
    let f2 = first_variation(&s, &am, |u, v, _| (u - v).sin());
    let f3 = first_variation(&s, &am, |u, v, _| u.cos() - 2.5 * (u - v).sin());
    assert!((f3 - (f1 - 2.5 * f2)).abs() < 1e-10 * (1.0 + f3.abs()));
}

#[test]
fn clifford_torus_is_willmore_in_flat_space() {
    let s = ParamSurface::torus(CliffordTorus, 64, 64);
    let flat = AmbientMetric::flat();
    let dw = first_variation(&s, &flat, |u, v, _| (u + 2.0 * v).cos() + u.sin());
    assert!(dw.abs() < 1e-10);
}
