//! Differential geometry of parametric surfaces in the model metric.
//!
//! Chart derivatives come from Taylor jets, so pointwise quantities
//! (`H`, `ΔH`, the Euler–Lagrange residual) are exact up to rounding; grid
//! resolution only enters through quadrature.

use crate::ambient::AmbientMetric;
use crate::error::{Result, WlabError};
use crate::jet::{J2, J4};
use crate::linalg::{cross, lift, M3, V3};
use crate::quadrature::{Rule1D, Rule2D};
use crate::real::Real;
use rayon::prelude::*;
use std::f64::consts::{PI, SQRT_2};

/// A smooth map `(u, v) ↦ ℝ³`, written once for any [`Real`].
pub trait Chart: Sync {
    fn eval<T: Real>(&self, u: T, v: T) -> V3<T>;

    /// `+1` when `X_u × X_v` is the outer normal, `−1` when it is the inner one.
    fn orientation(&self) -> f64;
}

impl<C: Chart> Chart for &C {
    fn eval<T: Real>(&self, u: T, v: T) -> V3<T> {
        (*self).eval(u, v)
    }
    fn orientation(&self) -> f64 {
        (*self).orientation()
    }
}

/// Clifford torus `((√2 + cos u) cos v, (√2 + cos u) sin v, sin u)`.
#[derive(Clone, Copy, Debug, Default)]
pub struct CliffordTorus;

impl Chart for CliffordTorus {
    fn eval<T: Real>(&self, u: T, v: T) -> V3<T> {
        let r = u.cos() + SQRT_2;
        [r * v.cos(), r * v.sin(), u.sin()]
    }
    fn orientation(&self) -> f64 {
        -1.0
    }
}

/// Round sphere of radius `rho` centred at `center`, chart `(θ, φ)`.
#[derive(Clone, Copy, Debug)]
pub struct RoundSphere {
    pub rho: f64,
    pub center: V3<f64>,
}

impl Chart for RoundSphere {
    fn eval<T: Real>(&self, th: T, ph: T) -> V3<T> {
        let s = th.sin();
        [
            th.cos() * self.rho + self.center[0],
            s * ph.cos() * self.rho + self.center[1],
            s * ph.sin() * self.rho + self.center[2],
        ]
    }
    fn orientation(&self) -> f64 {
        1.0
    }
}

/// A chart composed with `x ↦ λ x`.
#[derive(Clone, Copy, Debug)]
pub struct Scaled<C> {
    pub base: C,
    pub lambda: f64,
}

impl<C: Chart> Chart for Scaled<C> {
    fn eval<T: Real>(&self, u: T, v: T) -> V3<T> {
        let x = self.base.eval(u, v);
        [x[0] * self.lambda, x[1] * self.lambda, x[2] * self.lambda]
    }
    fn orientation(&self) -> f64 {
        self.base.orientation()
    }
}

/// A chart followed by a rigid rotation `x ↦ R x`.
#[derive(Clone, Copy, Debug)]
pub struct Rotated<C> {
    pub base: C,
    pub rot: M3<f64>,
}

impl<C: Chart> Chart for Rotated<C> {
    fn eval<T: Real>(&self, u: T, v: T) -> V3<T> {
        crate::linalg::matvec_f(&self.rot, &self.base.eval(u, v))
    }
    fn orientation(&self) -> f64 {
        self.base.orientation()
    }
}

/// Topology of the parameter domain.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Topology {
    /// Doubly periodic chart on `[−π, π]²`.
    Torus,
    /// Polar chart `(θ, φ) ∈ [0, π] × [0, 2π]`.
    Sphere,
}

/// A chart together with the quadrature grid it is sampled on.
#[derive(Clone, Debug)]
pub struct ParamSurface<C> {
    pub chart: C,
    pub rule: Rule2D,
    pub topology: Topology,
}

impl<C: Chart> ParamSurface<C> {
    pub fn new(chart: C, rule: Rule2D, topology: Topology) -> Self {
        ParamSurface { chart, rule, topology }
    }

    /// Periodic trapezoid grid with `n × m` nodes on `[−π, π)²`.
    pub fn torus(chart: C, n: usize, m: usize) -> Self {
        Self::new(chart, Rule2D::periodic_torus(n, m), Topology::Torus)
    }

    /// Gauss–Legendre in `θ` (never touching the poles), trapezoid in `φ`.
    pub fn sphere(chart: C, n_theta: usize, n_phi: usize) -> Self {
        let panels = (n_theta / 16).max(1);
        let breaks: Vec<f64> = (0..=panels).map(|k| PI * k as f64 / panels as f64).collect();
        let u = Rule1D::gl_panels(&breaks, n_theta.div_ceil(panels));
        let v = Rule1D::periodic(0.0, 2.0 * PI, n_phi, true);
        Self::new(chart, Rule2D::new(u, v), Topology::Sphere)
    }

    /// The same chart on a different grid.
    pub fn with_rule(&self, rule: Rule2D) -> ParamSurface<&C> {
        ParamSurface { chart: &self.chart, rule, topology: self.topology }
    }
}

/// Pointwise geometry at one chart point.
#[derive(Clone, Copy, Debug)]
pub struct LocalGeom<T> {
    pub x: V3<T>,
    pub xu: V3<T>,
    pub xv: V3<T>,
    pub gbar: [[T; 2]; 2],
    pub gbar_inv: [[T; 2]; 2],
    pub area_elem: T,
    /// Unit outer normal in the ambient metric.
    pub n: V3<T>,
    /// Second fundamental form, sign chosen so a round sphere has `H > 0`.
    pub a: [[T; 2]; 2],
    pub h: T,
    pub a_sq: T,
    pub a0_sq: T,
}

/// Assembles [`LocalGeom`] from chart derivatives.
#[allow(clippy::too_many_arguments)]
pub fn local_geometry<T: Real>(
    am: &AmbientMetric,
    orient: f64,
    x: V3<T>,
    xu: V3<T>,
    xv: V3<T>,
    xuu: V3<T>,
    xuv: V3<T>,
    xvv: V3<T>,
) -> LocalGeom<T> {
    let flat = am.is_flat();
    let g = am.metric(&x);
    let gb = |a: &V3<T>, b: &V3<T>| crate::linalg::bilinear(&g, a, b);
    let guu = gb(&xu, &xu);
    let guv = gb(&xu, &xv);
    let gvv = gb(&xv, &xv);
    let det = guu * gvv - guv * guv;
    let idet = det.recip();
    let gbar_inv = [[gvv * idet, -guv * idet], [-guv * idet, guu * idet]];
    // Conormal ν = X_u × X_v annihilates tangents; n = g⁻¹ν / |ν|_g.
    let nu = cross(&xu, &xv);
    let (ginv, gam) = if flat {
        (None, None)
    } else {
        (Some(crate::linalg::inv3(&g)), Some(am.christoffel(&x)))
    };
    let nvec = match &ginv {
        Some(gi) => crate::linalg::matvec(gi, &nu),
        None => nu,
    };
    let nn = crate::linalg::dot(&nu, &nvec);
    let inv_len = nn.sqrt().recip() * orient;
    let n = [nvec[0] * inv_len, nvec[1] * inv_len, nvec[2] * inv_len];
    let cov = |a: &V3<T>, b: &V3<T>, ab: &V3<T>| -> T {
        let mut w = *ab;
        if let Some(gm) = &gam {
            for k in 0..3 {
                let mut s = T::zero();
                for l in 0..3 {
                    for m in 0..3 {
                        s += gm[k][l][m] * a[l] * b[m];
                    }
                }
                w[k] += s;
            }
        }
        // g(∇, n) = ν·∇ / |ν|_g
        -(crate::linalg::dot(&nu, &w) * inv_len)
    };
    let auu = cov(&xu, &xu, &xuu);
    let auv = cov(&xu, &xv, &xuv);
    let avv = cov(&xv, &xv, &xvv);
    let a = [[auu, auv], [auv, avv]];
    let h = gbar_inv[0][0] * auu + gbar_inv[1][1] * avv + gbar_inv[0][1] * auv * 2.0;
    // |A|² = tr((ḡ⁻¹A)²)
    let m00 = gbar_inv[0][0] * auu + gbar_inv[0][1] * auv;
    let m01 = gbar_inv[0][0] * auv + gbar_inv[0][1] * avv;
    let m10 = gbar_inv[1][0] * auu + gbar_inv[1][1] * auv;
    let m11 = gbar_inv[1][0] * auv + gbar_inv[1][1] * avv;
    let a_sq = m00 * m00 + m01 * m10 * 2.0 + m11 * m11;
    let a0_sq = a_sq - h * h * 0.5;
    LocalGeom {
        x,
        xu,
        xv,
        gbar: [[guu, guv], [guv, gvv]],
        gbar_inv,
        area_elem: det.sqrt(),
        n,
        a,
        h,
        a_sq,
        a0_sq,
    }
}

/// Geometry at a chart point using second-order jets.
pub fn geometry_at<C: Chart>(chart: &C, am: &AmbientMetric, u: f64, v: f64) -> LocalGeom<f64> {
    let x = chart.eval(J2::var_u(u), J2::var_v(v));
    let d = |i: usize, j: usize| [x[0].deriv(i, j), x[1].deriv(i, j), x[2].deriv(i, j)];
    local_geometry(am, chart.orientation(), d(0, 0), d(1, 0), d(0, 1), d(2, 0), d(1, 1), d(0, 2))
}

/// Per-node geometry on a grid (row-major in `u`).
#[derive(Clone, Debug)]
pub struct SurfaceGeometry {
    pub nu: usize,
    pub nv: usize,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub weights: Vec<f64>,
    pub nodes: Vec<LocalGeom<f64>>,
}

impl SurfaceGeometry {
    pub fn area(&self) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(g, w)| w * g.area_elem).sum()
    }
    pub fn willmore(&self) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(g, w)| w * g.h * g.h * g.area_elem).sum()
    }
}

fn check_immersion(u: f64, v: f64, g: &LocalGeom<f64>) -> Result<()> {
    let det = g.gbar[0][0] * g.gbar[1][1] - g.gbar[0][1] * g.gbar[1][0];
    if !(det > 0.0) || !g.h.is_finite() {
        return Err(WlabError::Degenerate { u, v, what: format!("det ḡ = {det:e}") });
    }
    Ok(())
}

/// All pointwise geometric fields on the surface grid.
pub fn geometry<C: Chart>(s: &ParamSurface<C>, am: &AmbientMetric) -> Result<SurfaceGeometry> {
    let (ru, rv) = (&s.rule.u, &s.rule.v);
    let rows: Vec<Result<Vec<LocalGeom<f64>>>> = ru
        .x
        .par_iter()
        .map(|&u| {
            rv.x.iter()
                .map(|&v| {
                    let g = geometry_at(&s.chart, am, u, v);
                    check_immersion(u, v, &g).map(|_| g)
                })
                .collect()
        })
        .collect();
    let mut nodes = Vec::with_capacity(s.rule.len());
    for r in rows {
        nodes.extend(r?);
    }
    let weights = ru.w.iter().flat_map(|wu| rv.w.iter().map(move |wv| wu * wv)).collect();
    Ok(SurfaceGeometry {
        nu: ru.len(),
        nv: rv.len(),
        u: ru.x.clone(),
        v: rv.x.clone(),
        weights,
        nodes,
    })
}

/// `∫ f(node) dσ` over the grid with row-wise deterministic summation.
pub fn integrate_local<C: Chart>(
    s: &ParamSurface<C>,
    am: &AmbientMetric,
    f: impl Fn(f64, f64, &LocalGeom<f64>) -> f64 + Sync,
) -> Result<f64> {
    let (ru, rv) = (&s.rule.u, &s.rule.v);
    let rows: Vec<Result<f64>> = ru
        .x
        .par_iter()
        .zip(ru.w.par_iter())
        .map(|(&u, &wu)| {
            let mut acc = 0.0;
            for (&v, &wv) in rv.x.iter().zip(&rv.w) {
                let g = geometry_at(&s.chart, am, u, v);
                check_immersion(u, v, &g)?;
                acc += wv * f(u, v, &g) * g.area_elem;
            }
            Ok(acc * wu)
        })
        .collect();
    let mut total = 0.0;
    for r in rows {
        total += r?;
    }
    Ok(total)
}

pub fn area<C: Chart>(s: &ParamSurface<C>, am: &AmbientMetric) -> Result<f64> {
    integrate_local(s, am, |_, _, _| 1.0)
}

/// `W = ∫ H² dσ`.
pub fn willmore_energy<C: Chart>(s: &ParamSurface<C>, am: &AmbientMetric) -> Result<f64> {
    integrate_local(s, am, |_, _, g| g.h * g.h)
}

/// `W_{g_ε} − W_{g₀}` summed node by node on one grid, which keeps the
/// small metric contribution free of the flat quadrature error.
pub fn willmore_difference<C: Chart>(s: &ParamSurface<C>, am: &AmbientMetric) -> Result<f64> {
    let flat = AmbientMetric::flat();
    integrate_local(s, am, |u, v, g| {
        let g0 = geometry_at(&s.chart, &flat, u, v);
        g.h * g.h - g0.h * g0.h * g0.area_elem / g.area_elem
    })
}

/// Hawking mass `√Area (16π − W) / (64 π^{3/2})`.
pub fn hawking_mass<C: Chart>(s: &ParamSurface<C>, am: &AmbientMetric) -> Result<f64> {
    let a = area(s, am)?;
    let w = willmore_energy(s, am)?;
    Ok(hawking_mass_from(a, w))
}

pub fn hawking_mass_from(area: f64, willmore: f64) -> f64 {
    area.sqrt() * (16.0 * PI - willmore) / (64.0 * PI.powf(1.5))
}

/// Euler–Lagrange data at one chart point.
#[derive(Clone, Copy, Debug)]
pub struct ElPoint {
    pub h: f64,
    pub lap_h: f64,
    pub a0_sq: f64,
    pub ric_nn: f64,
    pub area_elem: f64,
    pub n: V3<f64>,
    pub x: V3<f64>,
    /// `ΔH + (|Å|² + Ric(n, n)) H`.
    pub residual: f64,
}

/// Willmore Euler–Lagrange operator at `(u, v)`, with `ΔH` from fourth-order
/// jets of the chart.
pub fn el_at<C: Chart>(chart: &C, am: &AmbientMetric, u: f64, v: f64) -> ElPoint {
    let x = chart.eval(J4::var_u(u), J4::var_v(v));
    let xu = [x[0].du(), x[1].du(), x[2].du()];
    let xv = [x[0].dv(), x[1].dv(), x[2].dv()];
    let xuu = [xu[0].du(), xu[1].du(), xu[2].du()];
    let xuv = [xu[0].dv(), xu[1].dv(), xu[2].dv()];
    let xvv = [xv[0].dv(), xv[1].dv(), xv[2].dv()];
    let lg = local_geometry(am, chart.orientation(), x, xu, xv, xuu, xuv, xvv);
    let h = lg.h;
    let hd = [h.deriv(1, 0), h.deriv(0, 1)];
    let hdd = [[h.deriv(2, 0), h.deriv(1, 1)], [h.deriv(1, 1), h.deriv(0, 2)]];
    let gi = [
        [lg.gbar_inv[0][0].val(), lg.gbar_inv[0][1].val()],
        [lg.gbar_inv[1][0].val(), lg.gbar_inv[1][1].val()],
    ];
    // ∂_k ḡ_ij
    let dg = [
        [
            [lg.gbar[0][0].deriv(1, 0), lg.gbar[0][1].deriv(1, 0)],
            [lg.gbar[1][0].deriv(1, 0), lg.gbar[1][1].deriv(1, 0)],
        ],
        [
            [lg.gbar[0][0].deriv(0, 1), lg.gbar[0][1].deriv(0, 1)],
            [lg.gbar[1][0].deriv(0, 1), lg.gbar[1][1].deriv(0, 1)],
        ],
    ];
    let mut lap = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            let mut t = hdd[i][j];
            for k in 0..2 {
                let mut chr = 0.0;
                for l in 0..2 {
                    chr += 0.5 * gi[k][l] * (dg[i][j][l] + dg[j][i][l] - dg[l][i][j]);
                }
                t -= chr * hd[k];
            }
            lap += gi[i][j] * t;
        }
    }
    let xv0 = [x[0].val(), x[1].val(), x[2].val()];
    let n0 = [lg.n[0].val(), lg.n[1].val(), lg.n[2].val()];
    let ric_nn = if am.is_flat() {
        0.0
    } else {
        let r = am.ricci(&xv0);
        crate::linalg::bilinear(&r, &n0, &n0)
    };
    let hv = h.val();
    let a0 = lg.a0_sq.val();
    ElPoint {
        h: hv,
        lap_h: lap,
        a0_sq: a0,
        ric_nn,
        area_elem: lg.area_elem.val(),
        n: n0,
        x: xv0,
        residual: lap + (a0 + ric_nn) * hv,
    }
}

/// Euler–Lagrange residual at every grid node (row-major in `u`).
pub fn el_residual<C: Chart>(s: &ParamSurface<C>, am: &AmbientMetric) -> Vec<f64> {
    let (ru, rv) = (&s.rule.u, &s.rule.v);
    ru.x.par_iter()
        .flat_map_iter(|&u| rv.x.iter().map(move |&v| el_at(&s.chart, am, u, v).residual))
        .collect()
}

/// `dW[φ] = −2 ∫ (ΔH + (|Å|² + Ric(n,n)) H) φ dσ` for the normal variation
/// `X + t φ n` of `W = ∫ H² dσ`. `phi` receives the chart point and the
/// Euler–Lagrange data there.
pub fn first_variation<C: Chart>(
    s: &ParamSurface<C>,
    am: &AmbientMetric,
    phi: impl Fn(f64, f64, &ElPoint) -> f64 + Sync,
) -> f64 {
    first_variation_on(s, am, |_, _| true, phi)
}

/// [`first_variation`] restricted to chart points where `support` holds;
/// `φ` must vanish elsewhere.
pub fn first_variation_on<C: Chart>(
    s: &ParamSurface<C>,
    am: &AmbientMetric,
    support: impl Fn(f64, f64) -> bool + Sync,
    phi: impl Fn(f64, f64, &ElPoint) -> f64 + Sync,
) -> f64 {
    let (ru, rv) = (&s.rule.u, &s.rule.v);
    let rows: Vec<f64> = ru
        .x
        .par_iter()
        .zip(ru.w.par_iter())
        .map(|(&u, &wu)| {
            let mut acc = 0.0;
            for (&v, &wv) in rv.x.iter().zip(&rv.w) {
                if !support(u, v) {
                    continue;
                }
                let p = el_at(&s.chart, am, u, v);
                let f = phi(u, v, &p);
                if f != 0.0 {
                    acc += wv * p.residual * f * p.area_elem;
                }
            }
            acc * wu
        })
        .collect();
    -2.0 * rows.iter().sum::<f64>()
}

/// First variation of area, `∫ H φ dσ`.
pub fn area_variation<C: Chart>(
    s: &ParamSurface<C>,
    am: &AmbientMetric,
    phi: impl Fn(f64, f64, &LocalGeom<f64>) -> f64 + Sync,
) -> Result<f64> {
    integrate_local(s, am, |u, v, g| g.h * phi(u, v, g))
}

/// Lifts an f64 point into any [`Real`].
pub fn lift3<T: Real>(x: &V3<f64>) -> V3<T> {
    lift(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_is_umbilic() {
        let s = RoundSphere { rho: 1.7, center: [0.3, -0.2, 0.1] };
        let am = AmbientMetric::flat();
        for &(t, p) in &[(0.3, 0.1), (1.2, 2.0), (2.9, -1.0)] {
            let g = geometry_at(&s, &am, t, p);
            assert!((g.h - 2.0 / 1.7).abs() < 1e-13);
            assert!(g.a0_sq.abs() < 1e-13);
        }
    }

    #[test]
    fn clifford_mean_curvature_closed_form() {
        let am = AmbientMetric::flat();
        for &(u, v) in &[(0.0, 0.0), (1.0, 0.5), (2.5, -1.3), (-3.0, 2.0)] {
            let g = geometry_at(&CliffordTorus, &am, u, v);
            let want = (SQRT_2 + 2.0 * f64::cos(u)) / (SQRT_2 + f64::cos(u));
            assert!((g.h - want).abs() < 1e-13, "{} vs {}", g.h, want);
            assert!((g.a0_sq + g.h * g.h / 2.0 - g.a_sq).abs() < 1e-12);
        }
    }

    #[test]
    fn normal_is_unit_and_orthogonal_in_curved_metric() {
        let am = AmbientMetric::new(0.3, crate::CurvatureData::from_eigenvalues([1.0, -2.0, 3.0]));
        let g = geometry_at(&CliffordTorus, &am, 0.7, -1.1);
        let m = am.metric(&g.x);
        let b = |a: &V3<f64>, c: &V3<f64>| crate::linalg::bilinear(&m, a, c);
        assert!((b(&g.n, &g.n) - 1.0).abs() < 1e-12);
        assert!(b(&g.n, &g.xu).abs() < 1e-12);
        assert!(b(&g.n, &g.xv).abs() < 1e-12);
        // outward: points away from the core circle
        let core = [SQRT_2 * f64::cos(-1.1), SQRT_2 * f64::sin(-1.1), 0.0];
        let d = crate::linalg::sub(&g.x, &core);
        assert!(crate::linalg::dot(&d, &g.n) > 0.0);
    }
}
