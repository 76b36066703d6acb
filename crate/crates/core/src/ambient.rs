//! Quadratic normal-coordinate model of a curved 3-manifold near a point:
//! `g = δ + ε² h(y)` with `h` built from the scalar and Ricci curvature.

use crate::error::{Result, WlabError};
use crate::linalg::{column, det3, inv3, matmul, transpose, M3, V3};
use crate::real::Real;
use serde::{Deserialize, Serialize};

/// Radius of the ball on which the quadratic model is used.
pub const CHART_RADIUS: f64 = 10.0;

/// Scalar curvature and Ricci form at the base point, in an orthonormal frame.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CurvatureData {
    pub sc: f64,
    pub ric: M3<f64>,
    /// Eigenvalues (ascending as given) and eigenframe (columns), when known.
    pub eigen: Option<([f64; 3], M3<f64>)>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum CurvatureJson {
    Full { sc: f64, ric: M3<f64> },
    Eigen { eigenvalues: [f64; 3] },
}

impl CurvatureData {
    /// From a symmetric Ricci form; `Sc` is its trace.
    pub fn from_ric(ric: M3<f64>) -> Result<Self> {
        let sc = ric[0][0] + ric[1][1] + ric[2][2];
        Self::from_parts(sc, ric)
    }

    /// From `Sc` and `Ric`, checking symmetry and the trace identity.
    pub fn from_parts(sc: f64, ric: M3<f64>) -> Result<Self> {
        let scale = 1.0 + ric.iter().flatten().fold(0.0f64, |m, x| m.max(x.abs()));
        for a in 0..3 {
            for b in 0..3 {
                if (ric[a][b] - ric[b][a]).abs() > 1e-12 * scale {
                    return Err(WlabError::Invalid(format!("Ricci form not symmetric at ({a},{b})")));
                }
            }
        }
        let tr = ric[0][0] + ric[1][1] + ric[2][2];
        if (tr - sc).abs() > 1e-10 * scale {
            return Err(WlabError::Invalid(format!("trace of Ric is {tr}, but Sc = {sc}")));
        }
        Ok(CurvatureData { sc, ric, eigen: None })
    }

    /// Diagonal Ricci form with the given eigenvalues in the coordinate frame.
    pub fn from_eigenvalues(alpha: [f64; 3]) -> Self {
        let ric = [[alpha[0], 0.0, 0.0], [0.0, alpha[1], 0.0], [0.0, 0.0, alpha[2]]];
        CurvatureData {
            sc: alpha.iter().sum(),
            ric,
            eigen: Some((alpha, crate::linalg::identity())),
        }
    }

    /// Ricci form `Q diag(α) Qᵀ` for an orthogonal frame `Q`.
    pub fn from_eigen_frame(alpha: [f64; 3], q: M3<f64>) -> Self {
        let d = [[alpha[0], 0.0, 0.0], [0.0, alpha[1], 0.0], [0.0, 0.0, alpha[2]]];
        let ric = matmul(&matmul(&q, &d), &transpose(&q));
        CurvatureData { sc: alpha.iter().sum(), ric, eigen: Some((alpha, q)) }
    }

    pub fn flat() -> Self {
        CurvatureData { sc: 0.0, ric: [[0.0; 3]; 3], eigen: None }
    }

    /// Parses `{"sc": .., "ric": [[..]]}` or `{"eigenvalues": [..]}`.
    pub fn from_json(text: &str) -> Result<Self> {
        match serde_json::from_str::<CurvatureJson>(text)? {
            CurvatureJson::Full { sc, ric } => Self::from_parts(sc, ric),
            CurvatureJson::Eigen { eigenvalues } => Ok(Self::from_eigenvalues(eigenvalues)),
        }
    }

    /// `Ric(a, b)`.
    pub fn ric_ab<T: Real>(&self, a: &V3<T>, b: &V3<T>) -> T {
        let mut s = T::zero();
        for i in 0..3 {
            for j in 0..3 {
                if self.ric[i][j] != 0.0 {
                    s += a[i] * b[j] * self.ric[i][j];
                }
            }
        }
        s
    }

    /// Ricci form rebuilt from the stored eigen-data, if any.
    pub fn ric_from_eigen(&self) -> Option<M3<f64>> {
        self.eigen.map(|(a, q)| Self::from_eigen_frame(a, q).ric)
    }

    /// Riemann tensor `R_{abcd}` of a 3-manifold, reconstructed from Ricci and
    /// scalar curvature at the base point (flat metric there).
    pub fn riemann(&self) -> [[[[f64; 3]; 3]; 3]; 3] {
        let d = |i: usize, j: usize| if i == j { 1.0 } else { 0.0 };
        let r = &self.ric;
        let mut out = [[[[0.0; 3]; 3]; 3]; 3];
        for a in 0..3 {
            for b in 0..3 {
                for c in 0..3 {
                    for e in 0..3 {
                        out[a][b][c][e] = r[a][c] * d(b, e) + r[b][e] * d(a, c)
                            - r[a][e] * d(b, c)
                            - r[b][c] * d(a, e)
                            - 0.5 * self.sc * (d(a, c) * d(b, e) - d(a, e) * d(b, c));
                    }
                }
            }
        }
        out
    }
}

/// Quadratic curvature correction `h_{αβ}(y)` of the metric.
pub fn h_tensor<T: Real>(curv: &CurvatureData, y: &V3<T>) -> M3<T> {
    let r = &curv.ric;
    let y2 = y[0] * y[0] + y[1] * y[1] + y[2] * y[2];
    let ry: V3<T> = [
        y[0] * r[0][0] + y[1] * r[0][1] + y[2] * r[0][2],
        y[0] * r[1][0] + y[1] * r[1][1] + y[2] * r[1][2],
        y[0] * r[2][0] + y[1] * r[2][1] + y[2] * r[2][2],
    ];
    let ryy = ry[0] * y[0] + ry[1] * y[1] + ry[2] * y[2];
    let s6 = curv.sc / 6.0;
    let mut h = [[T::zero(); 3]; 3];
    for a in 0..3 {
        for b in a..3 {
            let mut v = (y[a] * ry[b] + y[b] * ry[a]) * (1.0 / 3.0) - y[a] * y[b] * s6 - y2 * (r[a][b] / 3.0);
            if a == b {
                v += y2 * s6 - ryy * (1.0 / 3.0);
            }
            h[a][b] = v;
            h[b][a] = v;
        }
    }
    h
}

/// `∂_γ h_{αβ}(y)`, indexed `[γ][α][β]`.
pub fn dh_tensor<T: Real>(curv: &CurvatureData, y: &V3<T>) -> [M3<T>; 3] {
    let r = &curv.ric;
    let s6 = curv.sc / 6.0;
    let ry: V3<T> = [
        y[0] * r[0][0] + y[1] * r[0][1] + y[2] * r[0][2],
        y[0] * r[1][0] + y[1] * r[1][1] + y[2] * r[1][2],
        y[0] * r[2][0] + y[1] * r[2][1] + y[2] * r[2][2],
    ];
    let d = |i: usize, j: usize| if i == j { 1.0 } else { 0.0 };
    let mut out = [[[T::zero(); 3]; 3]; 3];
    for g in 0..3 {
        for a in 0..3 {
            for b in a..3 {
                let v = y[g] * (2.0 * s6 * d(a, b) - 2.0 / 3.0 * r[a][b])
                    - y[b] * (s6 * d(a, g))
                    - y[a] * (s6 * d(b, g))
                    - ry[g] * (2.0 / 3.0 * d(a, b))
                    + ry[b] * (d(a, g) / 3.0)
                    + ry[a] * (d(b, g) / 3.0)
                    + y[a] * (r[b][g] / 3.0)
                    + y[b] * (r[a][g] / 3.0);
                out[g][a][b] = v;
                out[g][b][a] = v;
            }
        }
    }
    out
}

/// `∂_δ ∂_γ h_{αβ}`, constant in `y`, indexed `[δ][γ][α][β]`.
pub fn ddh_tensor(curv: &CurvatureData) -> [[M3<f64>; 3]; 3] {
    let r = &curv.ric;
    let s6 = curv.sc / 6.0;
    let d = |i: usize, j: usize| if i == j { 1.0 } else { 0.0 };
    let mut out = [[[[0.0; 3]; 3]; 3]; 3];
    for e in 0..3 {
        for g in 0..3 {
            for a in 0..3 {
                for b in 0..3 {
                    out[e][g][a][b] = s6 * (2.0 * d(g, e) * d(a, b) - d(a, g) * d(b, e) - d(a, e) * d(b, g))
                        - 2.0 / 3.0 * d(a, b) * r[g][e]
                        - 2.0 / 3.0 * d(g, e) * r[a][b]
                        + (d(a, g) * r[b][e] + d(a, e) * r[b][g] + d(b, g) * r[a][e] + d(b, e) * r[a][g]) / 3.0;
                }
            }
        }
    }
    out
}

/// The model metric `δ + ε² h` around a base point.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AmbientMetric {
    pub eps: f64,
    pub curv: CurvatureData,
}

fn check_domain(y: &V3<f64>) -> Result<()> {
    let r = (y[0] * y[0] + y[1] * y[1] + y[2] * y[2]).sqrt();
    if r > CHART_RADIUS {
        return Err(WlabError::Domain(format!("|y| = {r} exceeds the chart radius {CHART_RADIUS}")));
    }
    Ok(())
}

impl AmbientMetric {
    pub fn new(eps: f64, curv: CurvatureData) -> Self {
        AmbientMetric { eps, curv }
    }

    pub fn flat() -> Self {
        AmbientMetric { eps: 0.0, curv: CurvatureData::flat() }
    }

    pub fn is_flat(&self) -> bool {
        self.eps == 0.0 || (self.curv.sc == 0.0 && self.curv.ric.iter().flatten().all(|&x| x == 0.0))
    }

    /// Same curvature, different ε.
    pub fn with_eps(&self, eps: f64) -> Self {
        AmbientMetric { eps, curv: self.curv.clone() }
    }

    /// Metric components, without the chart-radius check.
    pub fn metric<T: Real>(&self, y: &V3<T>) -> M3<T> {
        let e2 = self.eps * self.eps;
        let mut g = if e2 == 0.0 { [[T::zero(); 3]; 3] } else { h_tensor(&self.curv, y) };
        for (a, row) in g.iter_mut().enumerate() {
            for (b, v) in row.iter_mut().enumerate() {
                *v = *v * e2;
                if a == b {
                    *v += T::one();
                }
            }
        }
        g
    }

    /// Christoffel symbols `Γ^κ_{λμ}` indexed `[κ][λ][μ]`, without the
    /// chart-radius check.
    pub fn christoffel<T: Real>(&self, y: &V3<T>) -> [M3<T>; 3] {
        let e2 = self.eps * self.eps;
        let mut gam = [[[T::zero(); 3]; 3]; 3];
        if self.is_flat() {
            return gam;
        }
        let ginv = inv3(&self.metric(y));
        let dh = dh_tensor(&self.curv, y);
        // lowered Γ_{ξλμ} = ½ ε² (∂_λ h_{ξμ} + ∂_μ h_{ξλ} − ∂_ξ h_{λμ})
        let mut low = [[[T::zero(); 3]; 3]; 3];
        for x in 0..3 {
            for l in 0..3 {
                for m in l..3 {
                    let v = (dh[l][x][m] + dh[m][x][l] - dh[x][l][m]) * (0.5 * e2);
                    low[x][l][m] = v;
                    low[x][m][l] = v;
                }
            }
        }
        for k in 0..3 {
            for l in 0..3 {
                for m in l..3 {
                    let v = ginv[k][0] * low[0][l][m] + ginv[k][1] * low[1][l][m] + ginv[k][2] * low[2][l][m];
                    gam[k][l][m] = v;
                    gam[k][m][l] = v;
                }
            }
        }
        gam
    }

    pub fn metric_at(&self, y: &V3<f64>) -> Result<M3<f64>> {
        check_domain(y)?;
        let g = self.metric(y);
        if det3(&g) <= 0.0 || g[0][0] <= 0.0 || g[0][0] * g[1][1] - g[0][1] * g[1][0] <= 0.0 {
            return Err(WlabError::Domain(format!("metric not positive definite at {y:?}")));
        }
        Ok(g)
    }

    pub fn christoffel_at(&self, y: &V3<f64>) -> Result<[M3<f64>; 3]> {
        check_domain(y)?;
        Ok(self.christoffel(y))
    }

    /// First-order (in ε²) Christoffel symbols, `½ε² δ^{κξ}(∂_λ h_{ξμ} + ∂_μ h_{ξλ} − ∂_ξ h_{λμ})`.
    pub fn christoffel_linear(&self, y: &V3<f64>) -> [M3<f64>; 3] {
        let e2 = self.eps * self.eps;
        let dh = dh_tensor(&self.curv, y);
        let mut gam = [[[0.0; 3]; 3]; 3];
        for (k, gk) in gam.iter_mut().enumerate() {
            for l in 0..3 {
                for m in 0..3 {
                    gk[l][m] = 0.5 * e2 * (dh[l][k][m] + dh[m][k][l] - dh[k][l][m]);
                }
            }
        }
        gam
    }

    /// Ricci tensor of the model metric, computed from exact first and second
    /// derivatives of `h`; no chart-radius check.
    pub fn ricci(&self, y: &V3<f64>) -> M3<f64> {
        if self.is_flat() {
            return [[0.0; 3]; 3];
        }
        let e2 = self.eps * self.eps;
        let g = self.metric(y);
        let ginv = inv3(&g);
        let dg = {
            let dh = dh_tensor(&self.curv, y);
            let mut dg = [[[0.0; 3]; 3]; 3];
            for e in 0..3 {
                for a in 0..3 {
                    for b in 0..3 {
                        dg[e][a][b] = e2 * dh[e][a][b];
                    }
                }
            }
            dg
        };
        let ddh = ddh_tensor(&self.curv);
        // S_{l i j} = ∂_i g_{lj} + ∂_j g_{li} − ∂_l g_{ij}
        let mut s = [[[0.0; 3]; 3]; 3];
        for l in 0..3 {
            for i in 0..3 {
                for j in 0..3 {
                    s[l][i][j] = dg[i][l][j] + dg[j][l][i] - dg[l][i][j];
                }
            }
        }
        let mut gam = [[[0.0; 3]; 3]; 3];
        for k in 0..3 {
            for i in 0..3 {
                for j in 0..3 {
                    gam[k][i][j] = 0.5 * (0..3).map(|l| ginv[k][l] * s[l][i][j]).sum::<f64>();
                }
            }
        }
        // ∂_e Γ^k_{ij}
        let mut dgam = [[[[0.0; 3]; 3]; 3]; 3];
        for e in 0..3 {
            // ∂_e g^{kl} = −g^{km} ∂_e g_{mn} g^{nl}
            let mut dginv = [[0.0; 3]; 3];
            for k in 0..3 {
                for l in 0..3 {
                    let mut v = 0.0;
                    for m in 0..3 {
                        for n in 0..3 {
                            v -= ginv[k][m] * dg[e][m][n] * ginv[n][l];
                        }
                    }
                    dginv[k][l] = v;
                }
            }
            for k in 0..3 {
                for i in 0..3 {
                    for j in 0..3 {
                        let mut v = 0.0;
                        for l in 0..3 {
                            let ds = e2 * (ddh[e][i][l][j] + ddh[e][j][l][i] - ddh[e][l][i][j]);
                            v += dginv[k][l] * s[l][i][j] + ginv[k][l] * ds;
                        }
                        dgam[e][k][i][j] = 0.5 * v;
                    }
                }
            }
        }
        let mut ric = [[0.0; 3]; 3];
        for a in 0..3 {
            for b in 0..3 {
                let mut v = 0.0;
                for c in 0..3 {
                    v += dgam[c][c][a][b] - dgam[b][c][a][c];
                    for d in 0..3 {
                        v += gam[c][c][d] * gam[d][a][b] - gam[c][b][d] * gam[d][a][c];
                    }
                }
                ric[a][b] = v;
            }
        }
        ric
    }

    pub fn ricci_of_perturbed(&self, y: &V3<f64>) -> Result<M3<f64>> {
        check_domain(y)?;
        Ok(self.ricci(y))
    }
}

/// Checks that `r` is a rotation matrix to within `1e-10`.
pub fn check_rotation(r: &M3<f64>) -> Result<()> {
    let p = matmul(&transpose(r), r);
    for i in 0..3 {
        for j in 0..3 {
            let e = if i == j { 1.0 } else { 0.0 };
            if (p[i][j] - e).abs() > 1e-10 {
                return Err(WlabError::Invalid("matrix is not orthogonal".into()));
            }
        }
    }
    if (det3(r) - 1.0).abs() > 1e-10 {
        return Err(WlabError::Invalid("matrix has determinant -1".into()));
    }
    Ok(())
}

/// `𝓕(P, R) = Ric(R e₂, R e₂) − Ric(R e₃, R e₃)`.
pub fn f_function(curv: &CurvatureData, r: &M3<f64>) -> Result<f64> {
    check_rotation(r)?;
    Ok(f_unchecked(curv, r))
}

pub(crate) fn f_unchecked(curv: &CurvatureData, r: &M3<f64>) -> f64 {
    let a = column(r, 1);
    let b = column(r, 2);
    curv.ric_ab(&a, &a) - curv.ric_ab(&b, &b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag123() -> CurvatureData {
        CurvatureData::from_eigenvalues([1.0, 2.0, 3.0])
    }

    #[test]
    fn h_example_at_e1() {
        let h = h_tensor(&diag123(), &[1.0, 0.0, 0.0]);
        let want = [[0.0, 0.0, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, -1.0 / 3.0]];
        for a in 0..3 {
            for b in 0..3 {
                assert!((h[a][b] - want[a][b]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn metric_example() {
        let am = AmbientMetric::new(0.1, diag123());
        let g = am.metric_at(&[1.0, 0.0, 0.0]).unwrap();
        assert!((g[0][0] - 1.0).abs() < 1e-15);
        assert!((g[1][1] - 1.0).abs() < 1e-15);
        assert!((g[2][2] - (1.0 - 0.01 / 3.0)).abs() < 1e-15);
        assert!(am.metric_at(&[11.0, 0.0, 0.0]).is_err());
    }

    #[test]
    fn f_examples() {
        let c = diag123();
        assert_eq!(f_function(&c, &crate::linalg::identity()).unwrap(), -1.0);
        // e₁ ↦ e₂, e₂ ↦ e₃, e₃ ↦ e₁
        let r = [[0.0, 0.0, 1.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]];
        assert_eq!(f_function(&c, &r).unwrap(), 2.0);
        let refl = [[-1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
        assert!(f_function(&c, &refl).is_err());
    }

    #[test]
    fn json_forms() {
        let a = CurvatureData::from_json(r#"{"eigenvalues": [1, 2, 3]}"#).unwrap();
        assert_eq!(a.sc, 6.0);
        let b = CurvatureData::from_json(r#"{"sc": 6, "ric": [[1,0,0],[0,2,0],[0,0,3]]}"#).unwrap();
        assert_eq!(a.ric, b.ric);
        assert!(CurvatureData::from_json(r#"{"sc": 5, "ric": [[1,0,0],[0,2,0],[0,0,3]]}"#).is_err());
        assert!(CurvatureData::from_json(r#"{"sc": 6, "ric": [[1,1,0],[0,2,0],[0,0,3]]}"#).is_err());
    }
}
