//! Möbius degeneration of the Clifford torus: inversions, the
//! area-preserving offset `ξ_η`, the family `T_ω`, the blown-up chart `Z`,
//! the normal speed `φ_η` and its limit `ψ₀`.

use crate::consts::{a_tilde, c0, clifford_area, A_PSI, B_PSI};
use crate::error::{Result, WlabError};
use crate::linalg::{matvec_f, rot_z, M3, V3};
use crate::quadrature::{graded_breaks, Rule1D, Rule2D};
use crate::real::Real;
use crate::surface::{Chart, CliffordTorus, ParamSurface, Topology};
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::{PI, SQRT_2};

/// `√2 + 1`, the outer radius of the Clifford torus.
pub const OUTER: f64 = SQRT_2 + 1.0;

/// Recommended η window; outside it a warning is logged.
pub const ETA_WINDOW: (f64, f64) = (0.02, 0.3);

/// Spherical inversion in `∂B_η(x₀)`.
pub fn inversion(x0: &V3<f64>, eta: f64, x: &V3<f64>) -> Result<V3<f64>> {
    let d = crate::linalg::sub(x, x0);
    let r2 = crate::linalg::norm2(&d);
    if r2 == 0.0 {
        return Err(WlabError::Domain("inversion centre coincides with the point".into()));
    }
    Ok(crate::linalg::add(&crate::linalg::scalef(&d, eta * eta / r2), x0))
}

/// Generic inversion about the origin, `η² x / |x|²`.
#[inline]
pub fn invert0<T: Real>(eta: f64, x: &V3<T>) -> V3<T> {
    let s = crate::linalg::norm2(x).recip() * (eta * eta);
    [x[0] * s, x[1] * s, x[2] * s]
}

/// Differential of `Φ_{0,η}` at `x`: `(η²/|x|²)(Id − 2 x̂ ⊗ x̂)`.
pub fn d_inversion(eta: f64, x: &V3<f64>) -> M3<f64> {
    let r2 = crate::linalg::norm2(x);
    let s = eta * eta / r2;
    let mut m = [[0.0; 3]; 3];
    for a in 0..3 {
        for b in 0..3 {
            let id = if a == b { 1.0 } else { 0.0 };
            m[a][b] = s * (id - 2.0 * x[a] * x[b] / r2);
        }
    }
    m
}

/// `Y(φ̃, θ̃) = X(φ̃, θ̃) − (√2 + 1 + ξ) e_x`.
#[inline]
pub fn shifted_torus<T: Real>(xi: f64, u: T, v: T) -> V3<T> {
    // X_x − (√2+1) = −(1 − cos φ̃) cos θ̃ − (√2+1)(1 − cos θ̃), free of cancellation
    let su = (u * 0.5).sin();
    let sv = (v * 0.5).sin();
    let cv = v.cos();
    let px = -(su * su * 2.0 * cv) - sv * sv * (2.0 * OUTER);
    let rho = u.cos() + SQRT_2;
    [px - xi, rho * v.sin(), u.sin()]
}

/// Grading of the tensor-product rule for inverted tori.
#[derive(Clone, Copy, Debug, Serialize, PartialEq)]
pub struct GradedGrid {
    /// Innermost panel width as a fraction of the handle scale.
    pub first_panel: f64,
    pub ratio: f64,
    pub max_panel: f64,
    pub points_per_panel: usize,
}

impl Default for GradedGrid {
    fn default() -> Self {
        GradedGrid { first_panel: 0.125, ratio: 2.0, max_panel: 0.5, points_per_panel: 12 }
    }
}

impl GradedGrid {
    pub fn with_points(mut self, n: usize) -> Self {
        self.points_per_panel = n;
        self
    }

    /// Rule on `[−π, π]²` resolving a peak of width `scale` in `φ̃` and
    /// `scale/(√2+1)` in `θ̃` at the origin.
    pub fn rule(&self, scale: f64) -> Rule2D {
        let h0 = (self.first_panel * scale).min(self.max_panel);
        let bu = graded_breaks(h0, self.ratio, self.max_panel, PI);
        let bv = graded_breaks(h0 / OUTER, self.ratio, self.max_panel, PI);
        Rule2D::new(
            Rule1D::gl_panels(&bu, self.points_per_panel),
            Rule1D::gl_panels(&bv, self.points_per_panel),
        )
    }
}

/// The three integrals behind the area constraint and `ξ'_η`.
#[derive(Clone, Copy, Debug, PartialEq)]
struct AreaIntegrals {
    /// `∬ (√2 + cos φ̃) / |Y|⁴`
    i4: f64,
    /// `∬ (√2 + cos φ̃) f / |Y|⁶`, `f = 2((√2+1) − (√2+cos φ̃) cos θ̃ + ξ)`
    i6: f64,
    /// `I₄ − ξ I₆ = ∬ (√2 + cos φ̃)(|X − (√2+1)e_x|² − ξ²) / |Y|⁶`
    j: f64,
}

fn area_integrals(xi: f64, rule: &Rule2D) -> AreaIntegrals {
    let rows: Vec<[f64; 3]> = rule
        .u
        .x
        .par_iter()
        .zip(rule.u.w.par_iter())
        .map(|(&u, &wu)| {
            let (su, cu) = u.sin_cos();
            let rho = SQRT_2 + cu;
            let omc_u = 2.0 * (0.5 * u).sin().powi(2);
            let mut acc = [0.0; 3];
            for (&v, &wv) in rule.v.x.iter().zip(&rule.v.w) {
                let (sv, cv) = v.sin_cos();
                // X − (√2+1)e_x, computed without cancellation near the origin
                let px = -omc_u * cv - OUTER * 2.0 * (0.5 * v).sin().powi(2);
                let (py, pz) = (rho * sv, su);
                let p2 = px * px + py * py + pz * pz;
                let yx = px - xi;
                let y2 = yx * yx + py * py + pz * pz;
                let inv2 = 1.0 / y2;
                let w4 = rho * inv2 * inv2;
                let w6 = w4 * inv2;
                let f = 2.0 * (xi - px);
                acc[0] += wv * w4;
                acc[1] += wv * w6 * f;
                acc[2] += wv * w6 * (p2 - xi * xi);
            }
            [acc[0] * wu, acc[1] * wu, acc[2] * wu]
        })
        .collect();
    let mut s = [0.0; 3];
    for r in rows {
        for k in 0..3 {
            s[k] += r[k];
        }
    }
    AreaIntegrals { i4: s[0], i6: s[1], j: s[2] }
}

/// Area of `Φ_{0,η}(T − (√2+1+ξ)e_x)` on a caller-supplied rule.
pub fn area_of_inverted_on(eta: f64, xi: f64, rule: &Rule2D) -> f64 {
    eta.powi(4) * area_integrals(xi, rule).i4
}

/// Area of the inverted, shifted Clifford torus, `η⁴ ∬ (√2 + cos φ̃)/|Y|⁴`,
/// on a graded rule; fails if doubling the rule changes more than 8 digits.
pub fn area_of_inverted(eta: f64, xi: f64) -> Result<f64> {
    if !(eta > 0.0 && xi > 0.0) {
        return Err(WlabError::Domain(format!("need η, ξ > 0 (got η = {eta}, ξ = {xi})")));
    }
    let scale = xi.max(eta * eta);
    let g = GradedGrid::default();
    let a = area_of_inverted_on(eta, xi, &g.rule(scale));
    let b = area_of_inverted_on(eta, xi, &g.with_points(2 * g.points_per_panel).rule(scale));
    if ((a - b) / b).abs() > 1e-8 {
        return Err(WlabError::NotConverged(format!(
            "graded quadrature for η = {eta}, ξ = {xi} unstable: {a} vs {b}"
        )));
    }
    Ok(b)
}

/// `η` together with the solved offset `ξ_η` and its derivative.
#[derive(Clone, Copy, Debug, Serialize, PartialEq)]
pub struct DegenerationState {
    pub eta: f64,
    pub xi: f64,
    pub xi_prime: f64,
    /// `ξ'_η η − 2ξ_η`, computed from a cancellation-free integral.
    pub xi_combo: f64,
    pub area_residual: f64,
    pub a_tilde: f64,
    pub c0: f64,
}

impl DegenerationState {
    /// `η⁴ / ξ_η²`.
    pub fn ratio(&self) -> f64 {
        self.eta.powi(4) / (self.xi * self.xi)
    }
    /// `η⁻⁴ (ξ'_η η − 2ξ_η)`.
    pub fn scaled_combo(&self) -> f64 {
        self.xi_combo / self.eta.powi(4)
    }
    /// Graded rule adapted to this state's handle scale.
    pub fn rule(&self, grid: &GradedGrid) -> Rule2D {
        grid.rule(self.xi)
    }
}

/// Solves the area constraint for `ξ_η` by bracketing, bisection and a
/// Newton polish, then evaluates `ξ'_η` from the implicit-function formula.
pub fn solve_xi(eta: f64) -> Result<DegenerationState> {
    solve_xi_with(eta, &GradedGrid::default())
}

pub fn solve_xi_with(eta: f64, grid: &GradedGrid) -> Result<DegenerationState> {
    if !(eta > 0.0 && eta < 1.0) {
        return Err(WlabError::Domain(format!("η = {eta} outside (0, 1)")));
    }
    if eta < ETA_WINDOW.0 || eta > ETA_WINDOW.1 {
        log::warn!("η = {eta} outside the recommended window [{}, {}]", ETA_WINDOW.0, ETA_WINDOW.1);
    }
    let target = clifford_area();
    let guess = eta * eta / (2.0 * a_tilde());
    let resid = |xi: f64, rule: &Rule2D| area_of_inverted_on(eta, xi, rule) - target;

    let mut rule = grid.rule(guess);
    let mut scan = Vec::new();
    let (mut lo, mut hi) = (guess, guess);
    let mut f_lo = resid(lo, &rule);
    scan.push((lo, f_lo));
    let mut k = 0;
    while f_lo <= 0.0 {
        lo *= 0.5;
        f_lo = resid(lo, &rule);
        scan.push((lo, f_lo));
        k += 1;
        if k > 60 {
            return Err(WlabError::NotConverged(format!("no lower bracket for ξ at η = {eta}: {scan:?}")));
        }
    }
    let mut f_hi = resid(hi, &rule);
    k = 0;
    while f_hi >= 0.0 {
        hi *= 2.0;
        f_hi = resid(hi, &rule);
        scan.push((hi, f_hi));
        k += 1;
        if k > 60 {
            return Err(WlabError::NotConverged(format!("no upper bracket for ξ at η = {eta}: {scan:?}")));
        }
    }
    for _ in 0..200 {
        if (hi - lo) <= 1e-3 * lo {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if resid(mid, &rule) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut xi = 0.5 * (lo + hi);
    // Fix the grading at the bracketed root so the Newton map is smooth.
    rule = grid.rule(xi);
    let mut ints = area_integrals(xi, &rule);
    for _ in 0..50 {
        let f = eta.powi(4) * ints.i4 - target;
        let df = -2.0 * eta.powi(4) * ints.i6;
        let step = f / df;
        xi -= step;
        ints = area_integrals(xi, &rule);
        if step.abs() <= 1e-15 * xi {
            break;
        }
    }
    let area = eta.powi(4) * ints.i4;
    let area_residual = (area - target) / target;
    if area_residual.abs() > 1e-8 {
        return Err(WlabError::NotConverged(format!(
            "area constraint residual {area_residual:e} at η = {eta}"
        )));
    }
    Ok(DegenerationState {
        eta,
        xi,
        xi_prime: 2.0 * ints.i4 / (eta * ints.i6),
        xi_combo: 2.0 * ints.j / ints.i6,
        area_residual,
        a_tilde: a_tilde(),
        c0: c0(),
    })
}

/// Parameter `ω` of the family `T_ω`, in the open unit disk.
#[derive(Clone, Copy, Debug, Serialize, PartialEq)]
pub struct MoebiusParam {
    pub omega: [f64; 2],
}

impl MoebiusParam {
    pub fn new(omega: [f64; 2]) -> Result<Self> {
        let r = (omega[0] * omega[0] + omega[1] * omega[1]).sqrt();
        if !(r < 1.0) {
            return Err(WlabError::Domain(format!("|ω| = {r} must be < 1")));
        }
        Ok(MoebiusParam { omega })
    }
    /// `ω = r e_x`.
    pub fn radial(r: f64) -> Result<Self> {
        Self::new([r, 0.0])
    }
    pub fn r(&self) -> f64 {
        (self.omega[0].powi(2) + self.omega[1].powi(2)).sqrt()
    }
    pub fn eta(&self) -> f64 {
        1.0 - self.r()
    }
    pub fn angle(&self) -> f64 {
        self.omega[1].atan2(self.omega[0])
    }
}

/// `Ref_x ∘ Φ_{0,η}` applied to the shifted Clifford torus, then rotated
/// about the z axis to the direction of `ω`.
#[derive(Clone, Copy, Debug, Serialize, PartialEq)]
pub struct InvertedTorus {
    pub eta: f64,
    pub xi: f64,
    pub xi_prime: f64,
    pub rot: M3<f64>,
}

impl InvertedTorus {
    pub fn new(state: &DegenerationState, angle: f64) -> Self {
        InvertedTorus { eta: state.eta, xi: state.xi, xi_prime: state.xi_prime, rot: rot_z(angle) }
    }

    /// `∂T/∂η` at a chart point (the chart is moved along the family).
    pub fn d_eta(&self, u: f64, v: f64) -> V3<f64> {
        let y = shifted_torus(self.xi, u, v);
        let r2 = crate::linalg::norm2(&y);
        let dphi = d_inversion(self.eta, &y);
        let s = 2.0 * self.eta / r2;
        let mut w = [s * y[0], s * y[1], s * y[2]];
        for a in 0..3 {
            w[a] -= dphi[a][0] * self.xi_prime;
        }
        w[0] = -w[0];
        matvec_f(&self.rot, &w)
    }
}

impl Chart for InvertedTorus {
    fn eval<T: Real>(&self, u: T, v: T) -> V3<T> {
        let z = invert0(self.eta, &shifted_torus(self.xi, u, v));
        matvec_f(&self.rot, &[-z[0], z[1], z[2]])
    }
    fn orientation(&self) -> f64 {
        -1.0
    }
}

/// A member of the family `T_ω(T)`: the Clifford torus itself at `ω = 0`.
#[derive(Clone, Copy, Debug, Serialize, PartialEq)]
pub enum TorusImage {
    Clifford,
    Inverted(InvertedTorus),
}

impl Chart for TorusImage {
    fn eval<T: Real>(&self, u: T, v: T) -> V3<T> {
        match self {
            TorusImage::Clifford => CliffordTorus.eval(u, v),
            TorusImage::Inverted(t) => t.eval(u, v),
        }
    }
    fn orientation(&self) -> f64 {
        -1.0
    }
}

impl TorusImage {
    /// Builds `T_ω(T)`, solving for `ξ_{1−|ω|}` when `ω ≠ 0`.
    pub fn new(omega: &MoebiusParam) -> Result<Self> {
        if omega.r() == 0.0 {
            return Ok(TorusImage::Clifford);
        }
        let st = solve_xi(omega.eta())?;
        Ok(TorusImage::Inverted(InvertedTorus::new(&st, omega.angle())))
    }

    pub fn from_state(state: &DegenerationState, angle: f64) -> Self {
        TorusImage::Inverted(InvertedTorus::new(state, angle))
    }

    /// Quadrature surface: trapezoid for the Clifford torus, graded
    /// Gauss–Legendre for inverted ones.
    pub fn surface(&self, grid: &GradedGrid, periodic_nodes: usize) -> ParamSurface<TorusImage> {
        match self {
            TorusImage::Clifford => ParamSurface::torus(*self, periodic_nodes, periodic_nodes),
            TorusImage::Inverted(t) => ParamSurface::new(*self, grid.rule(t.xi), Topology::Torus),
        }
    }
}

/// `T_ω(x)`: identity at `ω = 0`, otherwise translate, invert, reflect and
/// rotate.
pub fn t_omega(omega: &MoebiusParam, x: &V3<f64>) -> Result<V3<f64>> {
    if omega.r() == 0.0 {
        return Ok(*x);
    }
    let st = solve_xi(omega.eta())?;
    let y = [x[0] - (OUTER + st.xi), x[1], x[2]];
    let z = inversion(&[0.0; 3], st.eta, &y)?;
    Ok(matvec_f(&rot_z(omega.angle()), &[-z[0], z[1], z[2]]))
}

/// Blown-up chart near the handle, `Z(φ̄, θ̄, η) = Φ_{0,η}(Y(η²φ̄, η²θ̄))`.
pub fn z_map(pb: f64, tb: f64, state: &DegenerationState) -> V3<f64> {
    let e2 = state.eta * state.eta;
    invert0(state.eta, &shifted_torus(state.xi, e2 * pb, e2 * tb))
}

/// Limit chart `Z₀(φ̄, θ̄) = Φ_{0,1}(−e_x/(2Ã) + (√2+1)θ̄ e_y + φ̄ e_z)`.
pub fn z0_map(pb: f64, tb: f64) -> V3<f64> {
    invert0(1.0, &[-1.0 / (2.0 * a_tilde()), OUTER * tb, pb])
}

/// Normal speed of the degeneration,
/// `φ_η = −(η/|Y|²)(h + (ξ'η − 2ξ) cos φ̃ cos θ̃)`,
/// `h = 2(√2 cos φ̃ + 1 − (√2+1) cos φ̃ cos θ̃)`.
pub fn phi_eta(u: f64, v: f64, state: &DegenerationState) -> f64 {
    let y = shifted_torus(state.xi, u, v);
    let (cu, cv) = (u.cos(), v.cos());
    // h written to avoid cancellation near the origin:
    // √2 cu + 1 − (√2+1) cu cv = (1 − cu) + (√2+1) cu (1 − cv)
    let omc_u = 2.0 * (0.5 * u).sin().powi(2);
    let omc_v = 2.0 * (0.5 * v).sin().powi(2);
    let h = 2.0 * (omc_u + OUTER * cu * omc_v);
    -(state.eta / crate::linalg::norm2(&y)) * (h + state.xi_combo * cu * cv)
}

/// `ψ_η(φ̄, θ̄) = φ_η(η²φ̄, η²θ̄)/η`.
pub fn psi_eta(pb: f64, tb: f64, state: &DegenerationState) -> f64 {
    let e2 = state.eta * state.eta;
    phi_eta(e2 * pb, e2 * tb, state) / state.eta
}

/// `ψ₀ = (√2/2) cos θ + ((2 − √2)/4)(1 − cos θ) cos 2φ` on the limit sphere.
pub fn psi0(theta: f64, phi: f64) -> f64 {
    A_PSI * theta.cos() + B_PSI * (1.0 - theta.cos()) * (2.0 * phi).cos()
}

/// `ψ₀` in terms of sphere coordinates `x = Ã(1+cos θ)`, `y = Ã sin θ cos φ`,
/// `z = Ã sin θ sin φ`: `−(z² + y² − (2−√2)y²)/(2Ãx) + √2 x/(4Ã)`.
pub fn psi0_cartesian(p: &V3<f64>) -> f64 {
    let at = a_tilde();
    let (x, y, z) = (p[0], p[1], p[2]);
    -(z * z + y * y - (2.0 - SQRT_2) * y * y) / (2.0 * at * x) + SQRT_2 * x / (4.0 * at)
}

/// `ψ₀ = ½(cos θ − 1) + ((2−√2)/2)(1 − cos θ) cos²φ + (√2/4)(1 + cos θ)`.
pub fn psi0_expanded(theta: f64, phi: f64) -> f64 {
    let c = theta.cos();
    0.5 * (c - 1.0) + (2.0 - SQRT_2) / 2.0 * (1.0 - c) * phi.cos().powi(2) + SQRT_2 / 4.0 * (1.0 + c)
}

/// Point on the limit sphere `𝒳(θ, φ) = Ã(1 + cos θ, sin θ cos φ, sin θ sin φ)`.
pub fn sphere_point(theta: f64, phi: f64) -> V3<f64> {
    let at = a_tilde();
    [at * (1.0 + theta.cos()), at * theta.sin() * phi.cos(), at * theta.sin() * phi.sin()]
}

/// Plane form of `ψ₀`:
/// `−(φ̄² + (√2+1)θ̄² − √2/(8Ã²)) / (φ̄² + (√2+1)²θ̄² + 1/(4Ã²))`.
pub fn psi0_plane(pb: f64, tb: f64) -> f64 {
    let a2 = a_tilde().powi(2);
    -(pb * pb + OUTER * tb * tb - SQRT_2 / (8.0 * a2)) / (pb * pb + OUTER * OUTER * tb * tb + 1.0 / (4.0 * a2))
}

/// Sphere angles `(θ, φ)` of the plane point `(φ̄, θ̄)` under
/// `(x, y, z) = (1/(2ÃB'), (√2+1)θ̄/B', φ̄/B')`, `B'` the plane denominator.
pub fn plane_to_sphere(pb: f64, tb: f64) -> (f64, f64) {
    let at = a_tilde();
    let den = pb * pb + OUTER * OUTER * tb * tb + 1.0 / (4.0 * at * at);
    let x = 1.0 / (2.0 * at * den);
    let (y, z) = (OUTER * tb / den, pb / den);
    let c = (x / at - 1.0).clamp(-1.0, 1.0);
    (c.acos(), z.atan2(y))
}
