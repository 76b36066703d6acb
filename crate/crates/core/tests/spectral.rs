#![allow(clippy::needless_range_loop)]

use wlab::consts::A_PSI;
use wlab::moebius::psi0;
use wlab::spectral::{laplace_beltrami, laplace_beltrami_divergence, sphere_laplacian_dfs, PeriodicGrid};
use wlab::sphere::laplacian_psi0;
use wlab::surface::{el_at, geometry_at, CliffordTorus};
use wlab::{AmbientMetric, CurvatureData};

#[test]
fn grid_laplacian_of_mean_curvature_matches_jets() {
    let am = AmbientMetric::new(0.3, CurvatureData::from_eigenvalues([1.0, 2.0, 3.0]));
    let grid = PeriodicGrid::torus(96, 96);
    let h = grid.sample(|u, v| geometry_at(&CliffordTorus, &am, u, v).h);
    let lap = laplace_beltrami(&CliffordTorus, &am, &grid, &h);
    let div = laplace_beltrami_divergence(&CliffordTorus, &am, &grid, &h);
    let (us, vs) = grid.nodes();
    let mut k = 0;
    let mut worst = (0.0f64, 0.0f64);
    for &u in &us {
        for &v in &vs {
            let want = el_at(&CliffordTorus, &am, u, v).lap_h;
            worst.0 = worst.0.max((lap[k] - want).abs());
            worst.1 = worst.1.max((div[k] - want).abs());
            k += 1;
        }
    }
    assert!(worst.0 < 1e-9 && worst.1 < 1e-9, "{worst:?}");
}

#[test]
fn sphere_laplacian_of_psi0() {
    let at = wlab::consts::a_tilde();
    // ψ₀ is not smooth at θ = π, so only the region away from that pole is compared
    for (t, p, l) in sphere_laplacian_dfs(psi0, at, 64, 64) {
        if t < 3.0 {
            assert!((l - laplacian_psi0(t, p).unwrap()).abs() < 1e-6, "θ = {t}");
        }
    }
    // the cos θ part is a first harmonic
    let l = sphere_laplacian_dfs(|t, _| A_PSI * t.cos(), at, 16, 8);
    assert!(l.iter().all(|(t, _, v)| (v + 2.0 * A_PSI * t.cos() / (at * at)).abs() < 1e-11));
}
