//! Critical points of `𝓕(R) = Ric(Re₂, Re₂) − Ric(Re₃, Re₃)` on SO(3) and
//! the Morse-inequality bookkeeping on `M × ℝP²`.

use crate::consts::rotation_weight;
use crate::error::{Result, WlabError};
use crate::linalg::{cross, solve_dense, sym_eigen, M3};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

/// A point of SO(3) in the embedding `(x₁..x₆) = (Re₂, Re₃)`, with
/// multipliers of the constrained problem and second-order data of `𝓕`.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct RotationPoint {
    pub rotation: M3<f64>,
    pub x: [f64; 6],
    pub lambda: f64,
    pub mu: f64,
    pub nu: f64,
    pub f_value: f64,
    /// Eigenvalues of the tangent Hessian, ascending.
    pub hessian: [f64; 3],
    pub index: usize,
    /// `(i, j)` with `Re₂ = ±e_i`, `Re₃ = ±e_j` (1-based), when known.
    pub label: Option<(usize, usize)>,
}

impl RotationPoint {
    /// `max |λ_k| / min |λ_k|` of the tangent Hessian.
    pub fn condition_number(&self) -> f64 {
        let mx = self.hessian.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let mn = self.hessian.iter().fold(f64::INFINITY, |m, v| m.min(v.abs()));
        mx / mn
    }

    /// `(|Σx_i² − 1|, |Σx_{i+3}² − 1|, |Σx_i x_{i+3}|)`.
    pub fn constraint_residuals(&self) -> [f64; 3] {
        let x = &self.x;
        [
            (x[0] * x[0] + x[1] * x[1] + x[2] * x[2] - 1.0).abs(),
            (x[3] * x[3] + x[4] * x[4] + x[5] * x[5] - 1.0).abs(),
            (x[0] * x[3] + x[1] * x[4] + x[2] * x[5]).abs(),
        ]
    }
}

fn check_distinct(alpha: &[f64; 3]) -> Result<f64> {
    let scale = alpha.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let mut gap = f64::INFINITY;
    for i in 0..3 {
        for j in (i + 1)..3 {
            gap = gap.min((alpha[i] - alpha[j]).abs());
        }
    }
    if gap <= 1e-12 * scale {
        return Err(WlabError::NotMorse(format!("Ricci eigenvalues {alpha:?} are not pairwise distinct")));
    }
    if gap < 1e-4 * scale {
        log::warn!("Ricci eigenvalues {alpha:?} nearly coincide; Hessian condition number ~ {:.1e}", scale / gap);
    }
    Ok(gap)
}

fn f_of(alpha: &[f64; 3], x: &[f64; 6]) -> f64 {
    (0..3).map(|m| alpha[m] * (x[m] * x[m] - x[m + 3] * x[m + 3])).sum()
}

fn rotation_from(x: &[f64; 6]) -> M3<f64> {
    let a = [x[0], x[1], x[2]];
    let b = [x[3], x[4], x[5]];
    let c = cross(&a, &b);
    [[c[0], a[0], b[0]], [c[1], a[1], b[1]], [c[2], a[2], b[2]]]
}

/// `½ tᵀ ∇²L t` on the tangent basis `{(c,0), (b,−a), (0,c)}`, `c = a × b`.
fn tangent_hessian(alpha: &[f64; 3], x: &[f64; 6], lambda: f64, mu: f64, nu: f64) -> [[f64; 3]; 3] {
    let a = [x[0], x[1], x[2]];
    let b = [x[3], x[4], x[5]];
    let c = cross(&a, &b);
    let t = [
        [c[0], c[1], c[2], 0.0, 0.0, 0.0],
        [b[0], b[1], b[2], -a[0], -a[1], -a[2]],
        [0.0, 0.0, 0.0, c[0], c[1], c[2]],
    ];
    let hess_apply = |v: &[f64; 6]| -> [f64; 6] {
        let mut o = [0.0; 6];
        for m in 0..3 {
            o[m] = 2.0 * (alpha[m] - lambda) * v[m] - nu * v[m + 3];
            o[m + 3] = -nu * v[m] - 2.0 * (alpha[m] + mu) * v[m + 3];
        }
        o
    };
    let mut out = [[0.0; 3]; 3];
    for p in 0..3 {
        let hv = hess_apply(&t[p]);
        for q in 0..3 {
            out[q][p] = 0.5 * (0..6).map(|k| t[q][k] * hv[k]).sum::<f64>();
        }
    }
    out
}

fn spectrum(m: &[[f64; 3]; 3]) -> [f64; 3] {
    let sym: Vec<Vec<f64>> = (0..3).map(|i| (0..3).map(|j| 0.5 * (m[i][j] + m[j][i])).collect()).collect();
    let (vals, _) = sym_eigen(&sym);
    [vals[0], vals[1], vals[2]]
}

fn make_point(alpha: &[f64; 3], x: [f64; 6], lambda: f64, mu: f64, nu: f64, label: Option<(usize, usize)>) -> RotationPoint {
    let hessian = spectrum(&tangent_hessian(alpha, &x, lambda, mu, nu));
    RotationPoint {
        rotation: rotation_from(&x),
        x,
        lambda,
        mu,
        nu,
        f_value: f_of(alpha, &x),
        hessian,
        index: hessian.iter().filter(|v| **v < 0.0).count(),
        label,
    }
}

/// The 24 critical points `R_(ij)`: `Re₂ = ±e_i`, `Re₃ = ±e_j`, `i ≠ j`.
pub fn f_critical_enumerate(alpha: [f64; 3]) -> Result<Vec<RotationPoint>> {
    check_distinct(&alpha)?;
    let mut out = Vec::with_capacity(24);
    for i in 0..3 {
        for j in 0..3 {
            if i == j {
                continue;
            }
            for si in [1.0, -1.0] {
                for sj in [1.0, -1.0] {
                    let mut x = [0.0; 6];
                    x[i] = si;
                    x[3 + j] = sj;
                    out.push(make_point(&alpha, x, alpha[i], -alpha[j], 0.0, Some((i + 1, j + 1))));
                }
            }
        }
    }
    Ok(out)
}

/// Analytic Hessian spectrum at `R_(ij)`: `{α_k−α_i, 2(α_j−α_i), α_j−α_k}`.
pub fn analytic_spectrum(alpha: &[f64; 3], i: usize, j: usize) -> [f64; 3] {
    let (i, j) = (i - 1, j - 1);
    let k = 3 - i - j;
    let mut s = [alpha[k] - alpha[i], 2.0 * (alpha[j] - alpha[i]), alpha[j] - alpha[k]];
    s.sort_by(|a, b| a.partial_cmp(b).unwrap());
    s
}

/// Residual of the Lagrange system in `z = (x₁..x₆, λ, μ, ν)`.
fn lagrange_residual(alpha: &[f64; 3], z: &[f64]) -> Vec<f64> {
    let (lambda, mu, nu) = (z[6], z[7], z[8]);
    let mut r = vec![0.0; 9];
    for m in 0..3 {
        r[m] = 2.0 * (alpha[m] - lambda) * z[m] - nu * z[m + 3];
        r[m + 3] = nu * z[m] + 2.0 * (mu + alpha[m]) * z[m + 3];
    }
    r[6] = z[0] * z[0] + z[1] * z[1] + z[2] * z[2] - 1.0;
    r[7] = z[3] * z[3] + z[4] * z[4] + z[5] * z[5] - 1.0;
    r[8] = z[0] * z[3] + z[1] * z[4] + z[2] * z[5];
    r
}

fn lagrange_jacobian(alpha: &[f64; 3], z: &[f64]) -> Vec<Vec<f64>> {
    let (lambda, mu, nu) = (z[6], z[7], z[8]);
    let mut j = vec![vec![0.0; 9]; 9];
    for m in 0..3 {
        j[m][m] = 2.0 * (alpha[m] - lambda);
        j[m][m + 3] = -nu;
        j[m][6] = -2.0 * z[m];
        j[m][8] = -z[m + 3];
        j[m + 3][m] = nu;
        j[m + 3][m + 3] = 2.0 * (mu + alpha[m]);
        j[m + 3][7] = 2.0 * z[m + 3];
        j[m + 3][8] = z[m];
        j[6][m] = 2.0 * z[m];
        j[7][m + 3] = 2.0 * z[m + 3];
        j[8][m] = z[m + 3];
        j[8][m + 3] = z[m];
    }
    j
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Damped Newton on the Lagrange system; `None` if it does not converge.
fn newton(alpha: &[f64; 3], mut z: Vec<f64>) -> Option<Vec<f64>> {
    let mut r = lagrange_residual(alpha, &z);
    let mut rn = norm(&r);
    for _ in 0..100 {
        if rn < 1e-14 {
            return Some(z);
        }
        let step = solve_dense(lagrange_jacobian(alpha, &z), r.iter().map(|v| -v).collect())?;
        let mut t = 1.0;
        loop {
            let trial: Vec<f64> = z.iter().zip(&step).map(|(a, b)| a + t * b).collect();
            let rt = lagrange_residual(alpha, &trial);
            let rtn = norm(&rt);
            if rtn < (1.0 - 1e-4 * t) * rn || t < 1e-6 {
                z = trial;
                r = rt;
                rn = rtn;
                break;
            }
            t *= 0.5;
        }
    }
    if rn < 1e-12 {
        Some(z)
    } else {
        None
    }
}

/// Uniform random rotation: Gram–Schmidt on a Gaussian frame.
fn random_frame(rng: &mut ChaCha8Rng) -> [f64; 6] {
    let mut g = || -> [f64; 3] {
        [
            StandardNormal.sample(rng),
            StandardNormal.sample(rng),
            StandardNormal.sample(rng),
        ]
    };
    let a = g();
    let b = g();
    let na = (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt();
    let a = [a[0] / na, a[1] / na, a[2] / na];
    let d = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
    let b = [b[0] - d * a[0], b[1] - d * a[1], b[2] - d * a[2]];
    let nb = (b[0] * b[0] + b[1] * b[1] + b[2] * b[2]).sqrt();
    [a[0], a[1], a[2], b[0] / nb, b[1] / nb, b[2] / nb]
}

/// Outcome of a seeded Newton search.
#[derive(Clone, Debug, Serialize)]
pub struct SearchReport {
    pub seeds: usize,
    pub converged: usize,
    pub points: Vec<RotationPoint>,
    /// Largest distance from a cluster to its enumerated partner.
    pub max_match_distance: f64,
    /// Largest deviation of a numerical Hessian spectrum from the analytic one.
    pub max_spectrum_error: f64,
}

pub const CLUSTER_RADIUS: f64 = 1e-4;

/// Newton search for constrained critical points from `n_seeds` random
/// frames, clustered and matched against [`f_critical_enumerate`].
pub fn f_critical_search(alpha: [f64; 3], n_seeds: usize, seed: u64) -> Result<SearchReport> {
    if n_seeds < 200 {
        return Err(WlabError::Invalid(format!("need at least 200 seeds, got {n_seeds}")));
    }
    let reference = f_critical_enumerate(alpha)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut found: Vec<Vec<f64>> = Vec::new();
    for _ in 0..n_seeds {
        let x = random_frame(&mut rng);
        let lambda: f64 = (0..3).map(|m| alpha[m] * x[m] * x[m]).sum();
        let mu: f64 = -(0..3).map(|m| alpha[m] * x[m + 3] * x[m + 3]).sum::<f64>();
        let mut z = x.to_vec();
        z.extend_from_slice(&[lambda, mu, 0.0]);
        if let Some(z) = newton(&alpha, z) {
            found.push(z);
        }
    }
    let converged = found.len();
    found.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut clusters: Vec<Vec<f64>> = Vec::new();
    for z in found {
        let near = clusters.iter().any(|c| {
            (0..6).map(|k| (c[k] - z[k]).powi(2)).sum::<f64>().sqrt() < CLUSTER_RADIUS
        });
        if !near {
            clusters.push(z);
        }
    }
    let mut points = Vec::with_capacity(clusters.len());
    let (mut max_d, mut max_s) = (0.0f64, 0.0f64);
    for z in clusters {
        let x: [f64; 6] = z[..6].try_into().unwrap();
        let (best, d) = reference
            .iter()
            .map(|r| (r, (0..6).map(|k| (r.x[k] - x[k]).powi(2)).sum::<f64>().sqrt()))
            .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
            .unwrap();
        if d > 1e-6 {
            return Err(WlabError::Invalid(format!(
                "critical point {x:?} found by Newton matches no enumerated point (distance {d:e})"
            )));
        }
        let mut p = make_point(&alpha, x, z[6], z[7], z[8], best.label);
        let (i, j) = best.label.unwrap();
        let an = analytic_spectrum(&alpha, i, j);
        for k in 0..3 {
            max_s = max_s.max((p.hessian[k] - an[k]).abs());
        }
        max_d = max_d.max(d);
        p.label = best.label;
        points.push(p);
    }
    Ok(SearchReport { seeds: n_seeds, converged, points, max_match_distance: max_d, max_spectrum_error: max_s })
}

/// Number of critical points of each index `0..=3`.
pub fn index_counts(points: &[RotationPoint]) -> [usize; 4] {
    let mut c = [0; 4];
    for p in points {
        c[p.index] += 1;
    }
    c
}

/// `C̃_q`: `C̃₂ = 4C₀`, `C̃_q = 4C_{q−2} + 2C_{q−3}` (`q = 3, 4, 5`), `C̃₆ = 2C₃`.
pub fn tilde_c(c: [u64; 4]) -> [u64; 7] {
    let at = |q: i64| if (0..4).contains(&q) { c[q as usize] } else { 0 };
    let mut out = [0; 7];
    for (q, o) in out.iter_mut().enumerate() {
        let q = q as i64;
        *o = 4 * at(q - 2) + 2 * at(q - 3);
    }
    out
}

/// `C̃_q` assembled directly from the SO(3) critical points with `𝓕 < 0`:
/// a point of 𝓕-index `k` shifts the index of `−Sc` by `3 − k`, and every
/// torus is counted twice. Returns `None` if the halving is not exact.
pub fn tilde_c_from_points(c: [u64; 4], points: &[RotationPoint]) -> Option<[u64; 7]> {
    let mut twice = [0u64; 7];
    for p in points.iter().filter(|p| p.f_value < 0.0) {
        let shift = 3 - p.index;
        for (q, &cq) in c.iter().enumerate() {
            twice[q + shift] += cq;
        }
    }
    if twice.iter().any(|v| v % 2 != 0) {
        return None;
    }
    Some(twice.map(|v| v / 2))
}

/// Betti numbers of `M × ℝP²` over ℤ₂ for connected, closed `M`:
/// `(1, β₁+1, β₁+β₂+1, β₁+β₂+1, β₂+1, 1, 0)`.
pub fn tilde_beta(beta: [u64; 4]) -> [u64; 7] {
    if beta[0] != 1 {
        log::warn!("β₀ = {} but M is assumed connected", beta[0]);
    }
    let (b1, b2) = (beta[1], beta[2]);
    [1, b1 + 1, b1 + b2 + 1, b1 + b2 + 1, b2 + 1, 1, 0]
}

/// Künneth convolution of `β(M)` with `β(ℝP²; ℤ₂) = (1, 1, 1)`.
pub fn kunneth_rp2(beta: [u64; 4]) -> [u64; 7] {
    let mut out = [0; 7];
    for (a, &b) in beta.iter().enumerate() {
        for k in 0..3 {
            out[a + k] += b;
        }
    }
    out
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct MorseTable {
    pub betti: [u64; 4],
    pub sc_counts: [u64; 4],
    pub tilde_beta: [u64; 7],
    pub tilde_c: [u64; 7],
    /// `(β̃_q − C̃_q)⁺` for `q = 0..=4`.
    pub surplus: [u64; 5],
    pub bound: u64,
}

/// `Σ_{q=0}^{4} (β̃_q − C̃_q)⁺` with the per-q breakdown.
pub fn multiplicity_bound(tb: &[u64; 7], tc: &[u64; 7]) -> ([u64; 5], u64) {
    let mut s = [0; 5];
    for q in 0..5 {
        s[q] = tb[q].saturating_sub(tc[q]);
    }
    (s, s.iter().sum())
}

pub fn morse_table(betti: [u64; 4], sc_counts: [u64; 4]) -> MorseTable {
    let tb = tilde_beta(betti);
    let tc = tilde_c(sc_counts);
    let (surplus, bound) = multiplicity_bound(&tb, &tc);
    MorseTable { betti, sc_counts, tilde_beta: tb, tilde_c: tc, surplus, bound }
}

/// Betti numbers over ℤ₂ of named 3-manifolds.
pub fn betti_preset(name: &str) -> Option<[u64; 4]> {
    match name {
        "s3" => Some([1, 0, 0, 1]),
        "s2xs1" => Some([1, 1, 1, 1]),
        "t3" => Some([1, 3, 3, 1]),
        _ => None,
    }
}

/// `G_r(P, R) = −Sc − (BÃ/(√2π)) 𝓕(P, R)(1 − r)²`.
pub fn g_r_eval(sc: f64, curv: &crate::CurvatureData, rot: &M3<f64>, r: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&r) {
        return Err(WlabError::Domain(format!("r = {r} outside [0, 1)")));
    }
    let f = crate::ambient::f_function(curv, rot)?;
    Ok(-sc - rotation_weight() * f * (1.0 - r).powi(2))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumeration_examples() {
        let pts = f_critical_enumerate([1.0, 2.0, 3.0]).unwrap();
        assert_eq!(pts.len(), 24);
        assert_eq!(index_counts(&pts), [4, 8, 8, 4]);
        for p in &pts {
            if p.index == 0 {
                assert_eq!(p.f_value, -2.0);
            }
            if p.index == 3 {
                assert_eq!(p.f_value, 2.0);
            }
            assert_eq!(p.index >= 2, p.f_value > 0.0);
        }
        let p23 = pts.iter().find(|p| p.label == Some((2, 3))).unwrap();
        assert_eq!(p23.hessian, [-1.0, 2.0, 2.0]);
        assert_eq!(p23.index, 1);
        assert_eq!(p23.f_value, -1.0);
    }

    #[test]
    fn degenerate_is_rejected() {
        assert!(matches!(f_critical_enumerate([2.0, 2.0, 2.0]), Err(WlabError::NotMorse(_))));
    }

    #[test]
    fn counting_examples() {
        assert_eq!(tilde_c([1, 0, 0, 1]), [0, 0, 4, 2, 0, 4, 2]);
        assert_eq!(tilde_c([1, 3, 3, 1]), [0, 0, 4, 14, 18, 10, 2]);
        assert_eq!(tilde_c([0; 4]), [0; 7]);
        assert_eq!(tilde_beta([1, 0, 0, 1]), [1, 1, 1, 1, 1, 1, 0]);
        assert_eq!(tilde_beta([1, 1, 1, 1]), [1, 2, 3, 3, 2, 1, 0]);
        assert_eq!(tilde_beta([1, 3, 3, 1]), [1, 4, 7, 7, 4, 1, 0]);
        assert_eq!(morse_table([1, 3, 3, 1], [1, 3, 3, 1]).bound, 8);
        assert_eq!(morse_table([1, 0, 0, 1], [1, 0, 0, 1]).bound, 3);
    }

    #[test]
    fn g_r_example() {
        let c = crate::CurvatureData::from_eigenvalues([1.0, 2.0, 3.0]);
        let v = g_r_eval(6.0, &c, &crate::linalg::identity(), 0.9).unwrap();
        assert!((v - (-6.0 + rotation_weight() * 0.01)).abs() < 1e-14);
    }
}
