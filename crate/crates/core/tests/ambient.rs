#![allow(clippy::needless_range_loop)]

use proptest::prelude::*;
use wlab::ambient::{f_function, h_tensor};
use wlab::linalg::{matmul, rot_x, rot_z, M3};
use wlab::{AmbientMetric, CurvatureData};

fn sym(v: [f64; 6]) -> M3<f64> {
    [[v[0], v[1], v[2]], [v[1], v[3], v[4]], [v[2], v[4], v[5]]]
}

fn kd(i: usize, j: usize) -> f64 {
    if i == j {
        1.0
    } else {
        0.0
    }
}

/// Riemann tensor of a 3-manifold from Ricci, with `R_{abab}` the sectional curvature.
fn riemann3(ric: &M3<f64>, sc: f64, a: usize, b: usize, c: usize, d: usize) -> f64 {
    ric[a][c] * kd(b, d) + ric[b][d] * kd(a, c) - ric[a][d] * kd(b, c) - ric[b][c] * kd(a, d)
        - 0.5 * sc * (kd(a, c) * kd(b, d) - kd(a, d) * kd(b, c))
}

fn central<F: Fn([f64; 3]) -> f64>(f: F, y: [f64; 3], k: usize, h: f64) -> f64 {
    let mut p = y;
    let mut m = y;
    p[k] += h;
    m[k] -= h;
    (f(p) - f(m)) / (2.0 * h)
}

fn coords() -> impl Strategy<Value = [f64; 3]> {
    [-2.0f64..2.0, -2.0f64..2.0, -2.0f64..2.0]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn h_is_the_normal_coordinate_quadratic(r in [-3.0f64..3.0, -3.0..3.0, -3.0..3.0, -3.0..3.0, -3.0..3.0, -3.0..3.0], y in coords()) {
        let ric = sym(r);
        let curv = CurvatureData::from_ric(ric).unwrap();
        let h = h_tensor(&curv, &y);
        for a in 0..3 {
            for b in 0..3 {
                let mut want = 0.0;
                for c in 0..3 {
                    for d in 0..3 {
                        want -= riemann3(&ric, curv.sc, a, c, b, d) * y[c] * y[d] / 3.0;
                    }
                }
                prop_assert!((h[a][b] - want).abs() < 1e-12, "h[{a}][{b}] = {} vs {}", h[a][b], want);
                prop_assert!((curv.riemann()[a][b][a][b] - riemann3(&ric, curv.sc, a, b, a, b)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn christoffel_matches_metric_differences(alpha in [-2.0f64..2.0, -2.0..2.0, -2.0..2.0], y in coords()) {
        let am = AmbientMetric::new(0.3, CurvatureData::from_eigenvalues(alpha));
        let gam = am.christoffel(&y);
        let gi = wlab::linalg::inv3(&am.metric(&y));
        let dg = |c: usize, a: usize, b: usize| central(|p| am.metric(&p)[a][b], y, c, 1e-4);
        for k in 0..3 {
            for l in 0..3 {
                for m in 0..3 {
                    let mut want = 0.0;
                    for x in 0..3 {
                        want += 0.5 * gi[k][x] * (dg(l, x, m) + dg(m, x, l) - dg(x, l, m));
                    }
                    prop_assert!((gam[k][l][m] - want).abs() < 1e-8);
                }
            }
        }
    }

    #[test]
    fn f_is_odd_under_quarter_turn(alpha in [-3.0f64..3.0, -3.0..3.0, -3.0..3.0], a in 0.0f64..6.3, b in 0.0f64..6.3) {
        let c = CurvatureData::from_eigenvalues(alpha);
        let r = matmul(&rot_z(a), &rot_x(b));
        let f = f_function(&c, &r).unwrap();
        let g = f_function(&c, &matmul(&r, &rot_x(std::f64::consts::FRAC_PI_2))).unwrap();
        prop_assert!((f + g).abs() < 1e-12);
    }
}

#[test]
fn ricci_at_base_point_is_eps_squared_ric() {
    let ric = sym([1.0, 0.3, -0.2, 2.0, 0.5, -1.0]);
    let am = AmbientMetric::new(0.2, CurvatureData::from_ric(ric).unwrap());
    let r0 = am.ricci(&[0.0; 3]);
    for a in 0..3 {
        for b in 0..3 {
            assert!((r0[a][b] - 0.04 * ric[a][b]).abs() < 1e-14);
        }
    }
}

/// `R_bd = ∂_a Γ^a_bd − ∂_d Γ^a_ab + Γ^a_ae Γ^e_bd − Γ^a_de Γ^e_ab` with the
/// derivatives taken by Richardson-extrapolated central differences.
#[test]
fn ricci_matches_christoffel_differences() {
    let am = AmbientMetric::new(0.5, CurvatureData::from_ric(sym([1.0, 0.3, -0.2, 2.0, 0.5, -1.0])).unwrap());
    for y in [[0.3, -0.7, 1.1], [1.5, 0.2, -0.4], [-1.0, -1.0, 0.5]] {
        let gam = am.christoffel(&y);
        let d = |c: usize, k: usize, l: usize, m: usize| {
            let f = |p: [f64; 3]| am.christoffel(&p)[k][l][m];
            let h = 1e-3;
            (4.0 * central(f, y, c, h / 2.0) - central(f, y, c, h)) / 3.0
        };
        let ric = am.ricci(&y);
        for b in 0..3 {
            for dd in 0..3 {
                let mut want = 0.0;
                for a in 0..3 {
                    want += d(a, a, b, dd) - d(dd, a, a, b);
                    for e in 0..3 {
                        want += gam[a][a][e] * gam[e][b][dd] - gam[a][dd][e] * gam[e][a][b];
                    }
                }
                assert!((ric[b][dd] - want).abs() < 1e-9, "Ric[{b}][{dd}] at {y:?}: {} vs {want}", ric[b][dd]);
            }
        }
    }
}

#[test]
fn isotropic_ricci_gives_zero_f() {
    let c = CurvatureData::from_eigenvalues([2.0, 2.0, 2.0]);
    let r = matmul(&rot_z(0.4), &rot_x(1.3));
    assert!(f_function(&c, &r).unwrap().abs() < 1e-14);
}

#[test]
fn chart_radius_and_rotation_are_checked() {
    let am = AmbientMetric::new(0.1, CurvatureData::from_eigenvalues([1.0, 2.0, 3.0]));
    assert!(am.metric_at(&[0.0, 0.0, 10.5]).is_err());
    let reflection = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, -1.0]];
    assert!(f_function(&am.curv, &reflection).is_err());
}
