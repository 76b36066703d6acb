//! Fourier collocation on periodic grids: derivatives, a grid Laplace–Beltrami
//! operator in both assembly forms, and a double-Fourier sphere Laplacian.

use crate::ambient::AmbientMetric;
use crate::jet::J2;
use crate::real::Real;
use crate::surface::Chart;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use std::f64::consts::PI;

/// `d^order f/dx^order` of uniform samples of a `period`-periodic function.
pub fn fourier_derivative(samples: &[f64], order: u32, period: f64) -> Vec<f64> {
    let n = samples.len();
    if n == 0 || order == 0 {
        return samples.to_vec();
    }
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(n);
    let inv = planner.plan_fft_inverse(n);
    let mut buf: Vec<Complex<f64>> = samples.iter().map(|&x| Complex::new(x, 0.0)).collect();
    fwd.process(&mut buf);
    let base = 2.0 * PI / period;
    for (k, c) in buf.iter_mut().enumerate() {
        let kk = if 2 * k < n {
            k as f64
        } else if 2 * k > n {
            k as f64 - n as f64
        } else if order % 2 == 1 {
            0.0
        } else {
            k as f64
        };
        *c *= Complex::new(0.0, base * kk).powu(order);
    }
    inv.process(&mut buf);
    buf.iter().map(|c| c.re / n as f64).collect()
}

/// Row-major `n_u × n_v` samples on a doubly periodic grid.
#[derive(Clone, Debug)]
pub struct PeriodicGrid {
    pub n_u: usize,
    pub n_v: usize,
    pub period_u: f64,
    pub period_v: f64,
}

impl PeriodicGrid {
    /// The `[−π, π)²` grid used by `ParamSurface::torus`.
    pub fn torus(n_u: usize, n_v: usize) -> Self {
        PeriodicGrid { n_u, n_v, period_u: 2.0 * PI, period_v: 2.0 * PI }
    }

    pub fn nodes(&self) -> (Vec<f64>, Vec<f64>) {
        let u = (0..self.n_u).map(|i| -PI + self.period_u * i as f64 / self.n_u as f64).collect();
        let v = (0..self.n_v).map(|j| -PI + self.period_v * j as f64 / self.n_v as f64).collect();
        (u, v)
    }

    pub fn sample(&self, f: impl Fn(f64, f64) -> f64) -> Vec<f64> {
        let (u, v) = self.nodes();
        u.iter().flat_map(|&a| v.iter().map(move |&b| (a, b))).map(|(a, b)| f(a, b)).collect()
    }

    pub fn d_u(&self, f: &[f64], order: u32) -> Vec<f64> {
        let mut out = vec![0.0; f.len()];
        let mut col = vec![0.0; self.n_u];
        for j in 0..self.n_v {
            for i in 0..self.n_u {
                col[i] = f[i * self.n_v + j];
            }
            let d = fourier_derivative(&col, order, self.period_u);
            for i in 0..self.n_u {
                out[i * self.n_v + j] = d[i];
            }
        }
        out
    }

    pub fn d_v(&self, f: &[f64], order: u32) -> Vec<f64> {
        f.chunks(self.n_v).flat_map(|row| fourier_derivative(row, order, self.period_v)).collect()
    }
}

struct MetricNode {
    gi: [[f64; 2]; 2],
    sqrt_det: f64,
    /// `Γ^k_ij` of the induced metric.
    chr: [[[f64; 2]; 2]; 2],
}

fn induced_metric<C: Chart>(chart: &C, am: &AmbientMetric, u: f64, v: f64) -> MetricNode {
    let x = chart.eval(J2::var_u(u), J2::var_v(v));
    let xu = [x[0].du(), x[1].du(), x[2].du()];
    let xv = [x[0].dv(), x[1].dv(), x[2].dv()];
    let gam = am.metric(&x);
    let gx = |a: &[J2; 3], b: &[J2; 3]| {
        let mut s = J2::zero();
        for p in 0..3 {
            for q in 0..3 {
                s += gam[p][q] * a[p] * b[q];
            }
        }
        s
    };
    let gj = [[gx(&xu, &xu), gx(&xu, &xv)], [gx(&xv, &xu), gx(&xv, &xv)]];
    let g = [[gj[0][0].val(), gj[0][1].val()], [gj[1][0].val(), gj[1][1].val()]];
    let det = g[0][0] * g[1][1] - g[0][1] * g[1][0];
    let gi = [[g[1][1] / det, -g[0][1] / det], [-g[1][0] / det, g[0][0] / det]];
    // dg[k][i][j] = ∂_k g_ij
    let dg = [
        [[gj[0][0].deriv(1, 0), gj[0][1].deriv(1, 0)], [gj[1][0].deriv(1, 0), gj[1][1].deriv(1, 0)]],
        [[gj[0][0].deriv(0, 1), gj[0][1].deriv(0, 1)], [gj[1][0].deriv(0, 1), gj[1][1].deriv(0, 1)]],
    ];
    let mut chr = [[[0.0; 2]; 2]; 2];
    for k in 0..2 {
        for i in 0..2 {
            for j in 0..2 {
                for l in 0..2 {
                    chr[k][i][j] += 0.5 * gi[k][l] * (dg[i][l][j] + dg[j][l][i] - dg[l][i][j]);
                }
            }
        }
    }
    MetricNode { gi, sqrt_det: det.sqrt(), chr }
}

fn metric_nodes<C: Chart>(chart: &C, am: &AmbientMetric, grid: &PeriodicGrid) -> Vec<MetricNode> {
    let (u, v) = grid.nodes();
    u.iter().flat_map(|&a| v.iter().map(move |&b| (a, b))).map(|(a, b)| induced_metric(chart, am, a, b)).collect()
}

/// `ḡ^ij(∂_i∂_j f − Γ̄^k_ij ∂_k f)` with Fourier derivatives of `f` and the
/// induced metric from exact chart derivatives.
pub fn laplace_beltrami<C: Chart>(chart: &C, am: &AmbientMetric, grid: &PeriodicGrid, f: &[f64]) -> Vec<f64> {
    let m = metric_nodes(chart, am, grid);
    let fu = grid.d_u(f, 1);
    let fv = grid.d_v(f, 1);
    let fuu = grid.d_u(f, 2);
    let fvv = grid.d_v(f, 2);
    let fuv = grid.d_v(&fu, 1);
    (0..f.len())
        .map(|p| {
            let n = &m[p];
            let d1 = [fu[p], fv[p]];
            let d2 = [[fuu[p], fuv[p]], [fuv[p], fvv[p]]];
            let mut s = 0.0;
            for i in 0..2 {
                for j in 0..2 {
                    let c = n.chr[0][i][j] * d1[0] + n.chr[1][i][j] * d1[1];
                    s += n.gi[i][j] * (d2[i][j] - c);
                }
            }
            s
        })
        .collect()
}

/// `|ḡ|^{-1/2} ∂_i(|ḡ|^{1/2} ḡ^ij ∂_j f)`, every derivative spectral.
pub fn laplace_beltrami_divergence<C: Chart>(
    chart: &C,
    am: &AmbientMetric,
    grid: &PeriodicGrid,
    f: &[f64],
) -> Vec<f64> {
    let m = metric_nodes(chart, am, grid);
    let fu = grid.d_u(f, 1);
    let fv = grid.d_v(f, 1);
    let flux_u: Vec<f64> = (0..f.len()).map(|p| m[p].sqrt_det * (m[p].gi[0][0] * fu[p] + m[p].gi[0][1] * fv[p])).collect();
    let flux_v: Vec<f64> = (0..f.len()).map(|p| m[p].sqrt_det * (m[p].gi[1][0] * fu[p] + m[p].gi[1][1] * fv[p])).collect();
    let du = grid.d_u(&flux_u, 1);
    let dv = grid.d_v(&flux_v, 1);
    (0..f.len()).map(|p| (du[p] + dv[p]) / m[p].sqrt_det).collect()
}

/// Laplacian on the round sphere of radius `radius` by the double Fourier
/// sphere method: `f` is extended to `θ ∈ (0, 2π)` by `f(2π − θ, φ + π)`,
/// sampled on the pole-staggered grid `θ_k = (k + ½)π/n_theta`, and
/// differentiated spectrally. Returns `(θ_k, φ_l, Δf)` for `θ_k < π`.
pub fn sphere_laplacian_dfs(
    f: impl Fn(f64, f64) -> f64,
    radius: f64,
    n_theta: usize,
    n_phi: usize,
) -> Vec<(f64, f64, f64)> {
    assert!(n_phi.is_multiple_of(2), "n_phi must be even for the φ + π shift");
    let nt = 2 * n_theta;
    let theta: Vec<f64> = (0..nt).map(|k| (k as f64 + 0.5) * PI / n_theta as f64).collect();
    let phi: Vec<f64> = (0..n_phi).map(|l| 2.0 * PI * l as f64 / n_phi as f64).collect();
    let grid = PeriodicGrid { n_u: nt, n_v: n_phi, period_u: 2.0 * PI, period_v: 2.0 * PI };
    let mut vals = Vec::with_capacity(nt * n_phi);
    for &t in &theta {
        for (l, &p) in phi.iter().enumerate() {
            vals.push(if t < PI { f(t, p) } else { f(2.0 * PI - t, phi[(l + n_phi / 2) % n_phi]) });
        }
    }
    let ft = grid.d_u(&vals, 1);
    let ftt = grid.d_u(&vals, 2);
    let fpp = grid.d_v(&vals, 2);
    let mut out = Vec::with_capacity(n_theta * n_phi);
    for (k, &t) in theta.iter().enumerate().take(n_theta) {
        let (s, c) = t.sin_cos();
        for (l, &p) in phi.iter().enumerate() {
            let q = k * n_phi + l;
            out.push((t, p, (ftt[q] + c / s * ft[q] + fpp[q] / (s * s)) / (radius * radius)));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivative_of_trig() {
        let n = 32;
        let x: Vec<f64> = (0..n).map(|i| 2.0 * PI * i as f64 / n as f64).collect();
        let f: Vec<f64> = x.iter().map(|t| (3.0 * t).sin() + (5.0 * t).cos()).collect();
        let d = fourier_derivative(&f, 1, 2.0 * PI);
        let d2 = fourier_derivative(&f, 2, 2.0 * PI);
        for i in 0..n {
            let t = x[i];
            assert!((d[i] - (3.0 * (3.0 * t).cos() - 5.0 * (5.0 * t).sin())).abs() < 1e-12);
            assert!((d2[i] + 9.0 * (3.0 * t).sin() + 25.0 * (5.0 * t).cos()).abs() < 1e-11);
        }
    }

    #[test]
    fn nyquist_mode_has_no_odd_derivative() {
        let f: Vec<f64> = (0..8).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
        let d = fourier_derivative(&f, 1, 2.0 * PI);
        assert!(d.iter().all(|v| v.abs() < 1e-13));
    }

    #[test]
    fn sphere_laplacian_of_harmonics() {
        // Δ(cos θ) = −2 cos θ / ρ²
        let out = sphere_laplacian_dfs(|t, _| t.cos(), 1.5, 16, 8);
        for (t, _, l) in out {
            assert!((l + 2.0 * t.cos() / 2.25).abs() < 1e-11);
        }
    }
}
