//! Closed forms and quadrature on the limit sphere `S²_Ã` centred at `Ã e_x`:
//! the Laplacian of `ψ₀`, the metric derivative `F` of the mean curvature,
//! and the cut-off sphere integrals.

use crate::ambient::{dh_tensor, h_tensor, CurvatureData};
use crate::consts::{a_tilde, A_PSI, B_PSI};
use crate::error::{Result, WlabError};
use crate::jet::Jet;
use crate::linalg::{bilinear, dot, V3};
use crate::moebius::psi0;
use crate::quadrature::Rule1D;
use crate::real::Real;
use serde::Serialize;
use std::f64::consts::PI;

type J1 = Jet<1, 3>;

/// Position, orthonormal frame and the auxiliary vector `f₁` at `(θ, φ)`.
#[derive(Clone, Copy, Debug)]
pub struct SphereFrame<T> {
    pub x: V3<T>,
    pub e1: V3<T>,
    pub e2: V3<T>,
    pub n0: V3<T>,
    pub f1: V3<T>,
}

impl<T: Real> SphereFrame<T> {
    pub fn at(theta: T, phi: T) -> Self {
        let at = a_tilde();
        let (st, ct) = (theta.sin(), theta.cos());
        let (sp, cp) = (phi.sin(), phi.cos());
        SphereFrame {
            x: [(ct + 1.0) * at, st * cp * at, st * sp * at],
            e1: [-st, ct * cp, ct * sp],
            e2: [T::zero(), -sp, cp],
            n0: [ct, st * cp, st * sp],
            f1: [st, -((ct + 1.0) * cp), -((ct + 1.0) * sp)],
        }
    }
}

/// Radial C² cut-off: 1 on `|x| ≤ δ`, 0 on `|x| ≥ 2δ`, quintic in between.
#[derive(Clone, Copy, Debug, Serialize, PartialEq)]
pub struct CutoffSpec {
    pub delta: f64,
}

impl CutoffSpec {
    pub fn new(delta: f64) -> Result<Self> {
        if !(delta > 0.0 && delta <= 0.5) {
            return Err(WlabError::Domain(format!("δ = {delta} outside (0, 1/2]")));
        }
        Ok(CutoffSpec { delta })
    }

    /// `χ_δ` as a function of `s = |x|`.
    pub fn chi(&self, s: f64) -> f64 {
        let t = (s - self.delta) / self.delta;
        if t <= 0.0 {
            1.0
        } else if t >= 1.0 {
            0.0
        } else {
            1.0 - t * t * t * (10.0 - 15.0 * t + 6.0 * t * t)
        }
    }

    /// `dχ_δ/ds`.
    pub fn chi_prime(&self, s: f64) -> f64 {
        let t = (s - self.delta) / self.delta;
        if !(0.0..1.0).contains(&t) {
            0.0
        } else {
            -30.0 * t * t * (1.0 - t) * (1.0 - t) / self.delta
        }
    }

    /// `d²χ_δ/ds²`.
    pub fn chi_second(&self, s: f64) -> f64 {
        let t = (s - self.delta) / self.delta;
        if !(0.0..1.0).contains(&t) {
            0.0
        } else {
            -60.0 * t * (1.0 - t) * (1.0 - 2.0 * t) / (self.delta * self.delta)
        }
    }

    /// Polar angle at which `|𝒳(θ)| = s`, using `|𝒳| = 2Ã cos(θ/2)`.
    pub fn theta_at_radius(s: f64) -> f64 {
        2.0 * (s / (2.0 * a_tilde())).clamp(-1.0, 1.0).acos()
    }
}

fn check_pole(theta: f64) -> Result<()> {
    if !(theta > 0.0 && theta < PI) {
        return Err(WlabError::Domain(format!("θ = {theta} is a pole of the sphere chart")));
    }
    Ok(())
}

/// `Δψ₀ = Ã⁻²[−2A cos θ + 2B cos 2φ {cos θ − 2(1 − cos θ)/sin²θ}]`.
pub fn laplacian_psi0(theta: f64, phi: f64) -> Result<f64> {
    check_pole(theta)?;
    Ok(laplacian_psi0_unchecked(theta, phi))
}

fn laplacian_psi0_unchecked(theta: f64, phi: f64) -> f64 {
    let c = theta.cos();
    // (1 − cos θ)/sin²θ = 1/(1 + cos θ)
    let bracket = c - 2.0 / (1.0 + c);
    (-2.0 * A_PSI * c + 2.0 * B_PSI * (2.0 * phi).cos() * bracket) / a_tilde().powi(2)
}

/// `h_{ni} = h(n₀, e_i)` at `𝒳(θ, φ)`, generic so the frame derivatives
/// `e_i(h_{ni})` come out of a jet evaluation.
fn h_ni<T: Real>(curv: &CurvatureData, theta: T, phi: T) -> [T; 2] {
    let f = SphereFrame::at(theta, phi);
    let h = h_tensor(curv, &f.x);
    [bilinear(&h, &f.n0, &f.e1), bilinear(&h, &f.n0, &f.e2)]
}

/// Closed form of `h_{ni}`:
/// `Ã²[−Sc/6 (1+⟨n₀,e_x⟩)⟨e_x,e_i⟩ + ⅓(1+⟨n₀,e_x⟩) Ric(e_x − n₀, e_i) + ⅓⟨e_x,e_i⟩ Ric(n₀ + e_x, n₀)]`.
pub fn h_ni_closed(curv: &CurvatureData, theta: f64, phi: f64) -> [f64; 2] {
    let f = SphereFrame::<f64>::at(theta, phi);
    let ex = [1.0, 0.0, 0.0];
    let a2 = a_tilde().powi(2);
    let c = 1.0 + f.n0[0];
    let emn = [1.0 - f.n0[0], -f.n0[1], -f.n0[2]];
    let npe = [f.n0[0] + 1.0, f.n0[1], f.n0[2]];
    let one = |e: &V3<f64>| {
        a2 * (-curv.sc / 6.0 * c * dot(&ex, e)
            + c / 3.0 * curv.ric_ab(&emn, e)
            + dot(&ex, e) / 3.0 * curv.ric_ab(&npe, &f.n0))
    };
    [one(&f.e1), one(&f.e2)]
}

/// `Σ_i e_i(h_{ni})` with `e₁ = Ã⁻¹∂_θ`, `e₂ = (Ã sin θ)⁻¹ ∂_φ`.
fn div_terms(curv: &CurvatureData, theta: f64, phi: f64) -> f64 {
    let at = a_tilde();
    let th = h_ni(curv, J1::var_u(theta), J1::var_v(phi));
    th[0].deriv(1, 0) / at + th[1].deriv(0, 1) / (at * theta.sin())
}

/// `t`-derivative of the mean curvature of `(S²_Ã, δ + t h)` at `t = 0`,
/// from its definition
/// `F = −Σ e_i(h_{ni}) + Σ h_{nj}⟨∇_{e_i}e_i, e_j⟩ − ½ h_{nn} H + ½ Σ (∂_n h)(e_i, e_i)`.
pub fn metric_derivative_h(theta: f64, phi: f64, curv: &CurvatureData) -> Result<f64> {
    check_pole(theta)?;
    Ok(metric_derivative_h_unchecked(theta, phi, curv))
}

fn metric_derivative_h_unchecked(theta: f64, phi: f64, curv: &CurvatureData) -> f64 {
    let at = a_tilde();
    let f = SphereFrame::<f64>::at(theta, phi);
    let h = h_tensor(curv, &f.x);
    let dh = dh_tensor(curv, &f.x);
    let hn = [bilinear(&h, &f.n0, &f.e1), bilinear(&h, &f.n0, &f.e2)];
    let hnn = bilinear(&h, &f.n0, &f.n0);
    // ⟨∇_{e₂}e₂, e₁⟩ = −cos θ/(Ã sin θ) is the only non-zero connection term
    let conn = hn[0] * (-theta.cos() / (at * theta.sin()));
    let mut dn = [[0.0; 3]; 3];
    for g in 0..3 {
        for a in 0..3 {
            for b in 0..3 {
                dn[a][b] += f.n0[g] * dh[g][a][b];
            }
        }
    }
    let tr_dn = bilinear(&dn, &f.e1, &f.e1) + bilinear(&dn, &f.e2, &f.e2);
    -div_terms(curv, theta, phi) + conn - 0.5 * hnn * (2.0 / at) + 0.5 * tr_dn
}

/// `F` in the rewritten form
/// `−Σ e_i(h_{ni}) + Ã{−Sc/6(1+cos θ) − ⅓Ric(f₁,e₁)cos θ − ⅓(1+cos θ)Ric(n₀,e_x) + ⅓Ric(n₀,n₀)cos θ + ⅓Ric(e_x,e_x)}`.
pub fn metric_derivative_h_rewritten(theta: f64, phi: f64, curv: &CurvatureData) -> Result<f64> {
    check_pole(theta)?;
    let at = a_tilde();
    let f = SphereFrame::<f64>::at(theta, phi);
    let ex = [1.0, 0.0, 0.0];
    let c = theta.cos();
    let bracket = -curv.sc / 6.0 * (1.0 + c) - curv.ric_ab(&f.f1, &f.e1) * c / 3.0
        - (1.0 + c) / 3.0 * curv.ric_ab(&f.n0, &ex)
        + curv.ric_ab(&f.n0, &f.n0) * c / 3.0
        + curv.ric_ab(&ex, &ex) / 3.0;
    Ok(-div_terms(curv, theta, phi) + at * bracket)
}

/// Cut-off sphere integrals and their limits.
#[derive(Clone, Copy, Debug, Serialize, PartialEq)]
pub struct AppendixIntegrals {
    pub delta: f64,
    /// `∫ (1 − χ_δ) H Ric(n₀, n₀) ψ₀ dσ`
    pub i_ric: f64,
    /// `∫ (1 − χ_δ) F Δψ₀ dσ`
    pub i_f: f64,
    pub i_total: f64,
    /// `(4/3)πÃB(R₂₂ − R₃₃)`
    pub target_ric: f64,
    /// `4πÃB(R₂₂ − R₃₃)`
    pub target_f: f64,
    /// `(16/3)πBÃ(R₂₂ − R₃₃)`
    pub target_total: f64,
}

/// Quadrature resolution for the sphere integrals.
#[derive(Clone, Copy, Debug, Serialize, PartialEq)]
pub struct SphereGrid {
    pub points_per_panel: usize,
    pub n_phi: usize,
}

impl Default for SphereGrid {
    fn default() -> Self {
        SphereGrid { points_per_panel: 16, n_phi: 48 }
    }
}

/// θ rule on `[0, θ_δ]` with breaks at the cut-off joints and geometric
/// grading toward the inner joint.
pub fn cutoff_theta_rule(cut: &CutoffSpec, n: usize) -> Rule1D {
    let t2 = CutoffSpec::theta_at_radius(2.0 * cut.delta);
    let t1 = CutoffSpec::theta_at_radius(cut.delta);
    let gap = PI - t2;
    let mut breaks = vec![t2];
    let mut w = gap;
    while breaks.last().unwrap() - w > 0.5 {
        let b = breaks.last().unwrap() - w;
        breaks.push(b);
        w = (2.0 * w).min(0.5);
    }
    let rest = *breaks.last().unwrap();
    let k = (rest / 0.5).ceil().max(1.0) as usize;
    for i in 1..=k {
        breaks.push(rest * (1.0 - i as f64 / k as f64));
    }
    breaks.reverse();
    for i in 1..=4 {
        breaks.push(t2 + (t1 - t2) * i as f64 / 4.0);
    }
    Rule1D::gl_panels(&breaks, n)
}

/// Evaluates the cut-off integrals for one `δ`.
pub fn appendix_integrals(delta: f64, curv: &CurvatureData) -> Result<AppendixIntegrals> {
    appendix_integrals_with(delta, curv, &SphereGrid::default())
}

pub fn appendix_integrals_with(delta: f64, curv: &CurvatureData, grid: &SphereGrid) -> Result<AppendixIntegrals> {
    if !(0.02..=0.3).contains(&delta) {
        return Err(WlabError::Domain(format!("δ = {delta} outside [0.02, 0.3]")));
    }
    let cut = CutoffSpec::new(delta)?;
    let (ir, iff) = cutoff_sums(&cut, curv, grid);
    let (ir2, iff2) = cutoff_sums(&cut, curv, &SphereGrid { points_per_panel: grid.points_per_panel * 2, ..*grid });
    let scale = 1.0 + ir2.abs() + iff2.abs();
    if (ir - ir2).abs() > 1e-8 * scale || (iff - iff2).abs() > 1e-8 * scale {
        return Err(WlabError::NotConverged(format!(
            "sphere quadrature at δ = {delta}: ({ir}, {iff}) vs ({ir2}, {iff2})"
        )));
    }
    let d = curv.ric[1][1] - curv.ric[2][2];
    Ok(AppendixIntegrals {
        delta,
        i_ric: ir2,
        i_f: iff2,
        i_total: ir2 + iff2,
        target_ric: crate::consts::ricci_integral_coeff() * d,
        target_f: crate::consts::f_integral_coeff() * d,
        target_total: crate::consts::derivative_coeff() * d,
    })
}

fn cutoff_sums(cut: &CutoffSpec, curv: &CurvatureData, grid: &SphereGrid) -> (f64, f64) {
    let at = a_tilde();
    let rt = cutoff_theta_rule(cut, grid.points_per_panel);
    let rp = Rule1D::periodic(0.0, 2.0 * PI, grid.n_phi, true);
    let (mut s_ric, mut s_f) = (0.0, 0.0);
    for (&th, &wt) in rt.x.iter().zip(&rt.w) {
        let weight = 1.0 - cut.chi(2.0 * at * (0.5 * th).cos());
        if weight == 0.0 {
            continue;
        }
        let da = at * at * th.sin();
        let (mut a, mut b) = (0.0, 0.0);
        for (&ph, &wp) in rp.x.iter().zip(&rp.w) {
            let f = SphereFrame::<f64>::at(th, ph);
            a += wp * (2.0 / at) * curv.ric_ab(&f.n0, &f.n0) * psi0(th, ph);
            b += wp * metric_derivative_h_unchecked(th, ph, curv) * laplacian_psi0_unchecked(th, ph);
        }
        s_ric += wt * weight * da * a;
        s_f += wt * weight * da * b;
    }
    (s_ric, s_f)
}

/// One row of the elementary integral table.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct BasicIntegral {
    pub name: &'static str,
    pub value: f64,
    pub exact: f64,
}

/// Elementary trigonometric integrals used in the sphere computations.
pub fn basic_integrals() -> Vec<BasicIntegral> {
    let gl = Rule1D::gl_panels(&[0.0, PI], 32);
    let tr = Rule1D::periodic(0.0, 2.0 * PI, 64, false);
    vec![
        BasicIntegral { name: "int_0^pi sin^3", value: gl.integrate(|t| t.sin().powi(3)), exact: 4.0 / 3.0 },
        BasicIntegral {
            name: "int_0^pi cos^3 sin",
            value: gl.integrate(|t| t.cos().powi(3) * t.sin()),
            exact: 0.0,
        },
        BasicIntegral {
            name: "int_0^2pi cos^2 cos2",
            value: tr.integrate(|p| p.cos().powi(2) * (2.0 * p).cos()),
            exact: PI / 2.0,
        },
        BasicIntegral {
            name: "int_0^2pi cos2 sin cos",
            value: tr.integrate(|p| (2.0 * p).cos() * p.sin() * p.cos()),
            exact: 0.0,
        },
        BasicIntegral {
            name: "int_0^pi cos^4 sin",
            value: gl.integrate(|t| t.cos().powi(4) * t.sin()),
            exact: 2.0 / 5.0,
        },
        BasicIntegral {
            name: "int_0^pi sin^3 cos^2",
            value: gl.integrate(|t| t.sin().powi(3) * t.cos().powi(2)),
            exact: 4.0 / 15.0,
        },
        BasicIntegral {
            name: "int_0^pi sin cos^2",
            value: gl.integrate(|t| t.sin() * t.cos().powi(2)),
            exact: 2.0 / 3.0,
        },
    ]
}

/// `∫_{S²_Ã} ψ₀ dσ`.
pub fn psi0_mean(n_theta: usize, n_phi: usize) -> f64 {
    let at = a_tilde();
    let rt = Rule1D::gl_panels(&[0.0, PI], n_theta);
    let rp = Rule1D::periodic(0.0, 2.0 * PI, n_phi, false);
    let mut s = 0.0;
    for (&t, &wt) in rt.x.iter().zip(&rt.w) {
        let row: f64 = rp.x.iter().zip(&rp.w).map(|(&p, &wp)| wp * psi0(t, p)).sum();
        s += wt * at * at * t.sin() * row;
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn laplacian_example() {
        let v = laplacian_psi0(PI / 2.0, 0.0).unwrap();
        assert!((v + 4.0 * B_PSI / a_tilde().powi(2)).abs() < 1e-14);
        assert!(laplacian_psi0(0.0, 0.0).is_err());
        assert!(laplacian_psi0(PI, 0.0).is_err());
    }

    #[test]
    fn cutoff_profile() {
        let c = CutoffSpec::new(0.1).unwrap();
        assert_eq!(c.chi(0.05), 1.0);
        assert_eq!(c.chi(0.25), 0.0);
        assert!((c.chi(0.15) - 0.5).abs() < 1e-15);
        let h = 1e-6;
        for &s in &[0.11, 0.13, 0.17, 0.19] {
            let fd = (c.chi(s + h) - c.chi(s - h)) / (2.0 * h);
            assert!((fd - c.chi_prime(s)).abs() < 1e-5);
            let fd2 = (c.chi_prime(s + h) - c.chi_prime(s - h)) / (2.0 * h);
            assert!((fd2 - c.chi_second(s)).abs() < 1e-3);
        }
    }

    #[test]
    fn flat_curvature_gives_zero_f() {
        let c = CurvatureData::flat();
        assert_eq!(metric_derivative_h(1.0, 0.3, &c).unwrap(), 0.0);
    }

    #[test]
    fn basic_table() {
        for b in basic_integrals() {
            assert!((b.value - b.exact).abs() < 1e-10, "{}", b.name);
        }
    }
}
