//! End-to-end sweeps: Euler–Lagrange residual scaling, energy expansion of
//! degenerating tori, the `r`-derivative of the energy, the handle
//! contribution, and the one-dimensional `ξ_η`, `ψ_η` and cutoff-integral
//! sweeps.

use crate::ambient::{f_function, AmbientMetric, CurvatureData};
use crate::consts::{clifford_willmore, derivative_coeff, rotation_weight, sc_energy_coeff, xi_ratio_limit};
use crate::error::{Result, WlabError};
use crate::fit::{loglog_fit, richardson, OrderFit};
use crate::io::{col, Table};
use crate::linalg::{bilinear, dot, identity, matmul, matvec_f, rot_x, M3};
use crate::moebius::{
    phi_eta, psi0_plane, psi_eta, solve_xi, DegenerationState, GradedGrid, InvertedTorus, TorusImage,
};
use crate::sphere::{appendix_integrals_with, AppendixIntegrals, CutoffSpec, SphereGrid};
use crate::surface::{
    el_residual, first_variation, first_variation_on, willmore_difference, willmore_energy, Chart, ParamSurface,
    Rotated, Topology,
};
use serde::Serialize;
use std::f64::consts::FRAC_PI_2;

/// Pass/fail thresholds, echoed into every report.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct Tolerances {
    pub el_order_min: f64,
    pub flat_el_max: f64,
    pub energy_order_min: f64,
    pub r_coefficient_rel: f64,
    pub route_agreement_rel: f64,
    pub derivative_rel: f64,
    pub flat_abs: f64,
    pub eps_factor: f64,
    pub eps_factor_rel: f64,
    pub delta_bound_rel: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            el_order_min: 1.9,
            flat_el_max: 1e-6,
            energy_order_min: 2.5,
            r_coefficient_rel: 0.2,
            route_agreement_rel: 0.01,
            derivative_rel: 0.25,
            flat_abs: 1e-9,
            eps_factor: 4.0,
            eps_factor_rel: 0.3,
            delta_bound_rel: 0.4,
        }
    }
}

/// Grids, curvature and resolution for one sweep.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct SweepConfig {
    pub eps: Vec<f64>,
    pub eta: Vec<f64>,
    pub r: Vec<f64>,
    pub delta: Vec<f64>,
    pub curvature: CurvatureData,
    /// Rotation `R` applied to the torus in normal coordinates.
    pub rotation: M3<f64>,
    /// Graded mesh for degenerating tori.
    pub grid: GradedGrid,
    /// Nodes per direction on periodic (Clifford) grids.
    pub periodic_nodes: usize,
    /// Relative step `h/η` of the finite difference in `η`.
    pub fd_step: f64,
    pub tol: Tolerances,
}

impl SweepConfig {
    fn base(eps: Vec<f64>, eta: Vec<f64>, r: Vec<f64>, delta: Vec<f64>) -> Self {
        SweepConfig {
            eps,
            eta,
            r,
            delta,
            curvature: CurvatureData::from_eigenvalues([1.0, 2.0, 3.0]),
            rotation: identity(),
            grid: GradedGrid::default(),
            periodic_nodes: 128,
            fd_step: 0.02,
            tol: Tolerances::default(),
        }
    }

    pub fn el_default() -> Self {
        let mut c = Self::base(vec![0.02, 0.04, 0.08], vec![0.5], vec![], vec![]);
        c.grid = GradedGrid::default().with_points(4);
        c.periodic_nodes = 64;
        c
    }

    pub fn energy_default() -> Self {
        Self::base(vec![0.02, 0.04, 0.08, 0.05], vec![], vec![0.8, 0.9], vec![])
    }

    pub fn derivative_default() -> Self {
        let mut c = Self::base(vec![0.05], vec![0.1], vec![], vec![]);
        c.grid = GradedGrid::default().with_points(6);
        c
    }

    pub fn handle_default() -> Self {
        let mut c = Self::base(vec![0.05, 0.025], vec![0.1, 0.05], vec![], vec![0.2, 0.1]);
        c.grid = GradedGrid::default().with_points(6);
        c
    }

    /// Operating windows: `ε ∈ (0, ½]`, `η ∈ (0, 1)`, `r ∈ [0, 1)`, `δ ∈ [0.02, 0.3]`.
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str, v: f64| Err(WlabError::Domain(format!("{what} = {v} outside its window")));
        for &e in &self.eps {
            if !(e > 0.0 && e <= 0.5) {
                return bad("ε", e);
            }
        }
        for &e in &self.eta {
            if !(e > 0.0 && e < 1.0) {
                return bad("η", e);
            }
        }
        for &r in &self.r {
            if !(0.0..1.0).contains(&r) {
                return bad("r", r);
            }
        }
        for &d in &self.delta {
            if !(0.02..=0.3).contains(&d) {
                return bad("δ", d);
            }
        }
        if self.periodic_nodes < 8 {
            return Err(WlabError::Invalid(format!("periodic_nodes = {} too small", self.periodic_nodes)));
        }
        crate::ambient::check_rotation(&self.rotation)
    }
}

/// One measured point of a sweep.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct ExpansionRow {
    pub case: String,
    pub eps: f64,
    pub eta: f64,
    pub delta: f64,
    pub measured: f64,
    pub prediction: f64,
    /// Always `measured − prediction`.
    pub residual: f64,
    /// Second measurement route, where one exists.
    pub alt: Option<f64>,
}

impl ExpansionRow {
    fn new(case: &str, eps: f64, eta: f64, delta: f64, measured: f64, prediction: f64) -> Self {
        ExpansionRow {
            case: case.into(),
            eps,
            eta,
            delta,
            measured,
            prediction,
            residual: measured - prediction,
            alt: None,
        }
    }
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct NamedFit {
    pub name: String,
    pub fit: OrderFit,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub value: f64,
    pub threshold: String,
}

impl Check {
    fn new(name: impl Into<String>, passed: bool, value: f64, threshold: impl Into<String>) -> Self {
        Check { name: name.into(), passed, value, threshold: threshold.into() }
    }
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct ExpansionReport {
    pub name: String,
    pub rows: Vec<ExpansionRow>,
    pub fits: Vec<NamedFit>,
    pub checks: Vec<Check>,
}

impl ExpansionReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    /// Numeric CSV view; `case` strings are indexed in order of appearance.
    pub fn table(&self) -> Table {
        let mut t = Table::new(vec![
            col("case", "index"),
            col("eps", "1"),
            col("eta", "1"),
            col("delta", "1"),
            col("measured", "energy"),
            col("prediction", "energy"),
            col("residual", "energy"),
            col("alt", "energy"),
        ]);
        let mut names: Vec<&str> = Vec::new();
        for r in &self.rows {
            let idx = names.iter().position(|n| *n == r.case).unwrap_or_else(|| {
                names.push(&r.case);
                names.len() - 1
            });
            t.rows.push(vec![
                idx as f64,
                r.eps,
                r.eta,
                r.delta,
                r.measured,
                r.prediction,
                r.residual,
                r.alt.unwrap_or(f64::NAN),
            ]);
        }
        t
    }

    pub fn case_names(&self) -> Vec<String> {
        let mut names: Vec<String> = Vec::new();
        for r in &self.rows {
            if !names.contains(&r.case) {
                names.push(r.case.clone());
            }
        }
        names
    }
}

/// A one-parameter sweep reported as a table.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct SweepReport {
    pub name: String,
    pub table: Table,
    pub fits: Vec<NamedFit>,
    pub checks: Vec<Check>,
}

impl SweepReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// `R · T_ω(T)` with `ω = (1 − η) e_x`; `η = None` is the Clifford torus.
fn torus_surface(state: Option<&DegenerationState>, rot: &M3<f64>, cfg: &SweepConfig) -> ParamSurface<Rotated<TorusImage>> {
    match state {
        None => ParamSurface::torus(Rotated { base: TorusImage::Clifford, rot: *rot }, cfg.periodic_nodes, cfg.periodic_nodes),
        Some(st) => ParamSurface::new(
            Rotated { base: TorusImage::from_state(st, 0.0), rot: *rot },
            st.rule(&cfg.grid),
            Topology::Torus,
        ),
    }
}

fn sup_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

/// `‖W'‖_∞` over the `ε` grid for the Clifford torus and `T_ω(T)` with
/// `|ω| = 1 − η` for each `η` in the config.
pub fn el_residual_sweep(cfg: &SweepConfig) -> Result<ExpansionReport> {
    cfg.validate()?;
    let mut cases: Vec<(String, Option<DegenerationState>)> = vec![("clifford".into(), None)];
    for &eta in &cfg.eta {
        cases.push((format!("omega={}", 1.0 - eta), Some(solve_xi(eta)?)));
    }
    let mut rows = Vec::new();
    let mut fits = Vec::new();
    let mut checks = Vec::new();
    for (name, st) in &cases {
        let s = torus_surface(st.as_ref(), &cfg.rotation, cfg);
        let eta = st.map_or(1.0, |s| s.eta);
        let flat = sup_abs(&el_residual(&s, &AmbientMetric::flat()));
        rows.push(ExpansionRow::new(name, 0.0, eta, 0.0, flat, 0.0));
        checks.push(Check::new(
            format!("{name}: flat residual"),
            flat <= cfg.tol.flat_el_max,
            flat,
            format!("<= {:e}", cfg.tol.flat_el_max),
        ));
        let mut ys = Vec::new();
        for &e in &cfg.eps {
            let m = sup_abs(&el_residual(&s, &AmbientMetric::new(e, cfg.curvature.clone())));
            rows.push(ExpansionRow::new(name, e, eta, 0.0, m, 0.0));
            ys.push(m);
        }
        if cfg.eps.len() >= 3 {
            let fit = loglog_fit(&cfg.eps, &ys);
            checks.push(Check::new(
                format!("{name}: eps-order"),
                fit.order >= cfg.tol.el_order_min,
                fit.order,
                format!(">= {}", cfg.tol.el_order_min),
            ));
            fits.push(NamedFit { name: name.clone(), fit });
        }
    }
    Ok(ExpansionReport { name: "el-residual".into(), rows, fits, checks })
}

/// `R · Rx(90°)`, which swaps the sign of `𝓕`.
pub fn flipped_rotation(rot: &M3<f64>) -> M3<f64> {
    matmul(rot, &rot_x(FRAC_PI_2))
}

/// `8π² − (8√2/3)π² ε² (Sc + (BÃ/(√2π))(1 − r)² 𝓕)`.
pub fn energy_prediction(eps: f64, r: f64, sc: f64, f: f64) -> f64 {
    clifford_willmore() - sc_energy_coeff() * eps * eps * (sc + rotation_weight() * (1.0 - r).powi(2) * f)
}

/// Energy expansion: the `ε`-order of the residual at `r = 0` over the first
/// three `ε` values, and the `(1 − r)²𝓕` coefficient at the last `ε` from
/// `W(R) − W(R·Rx(90°))` for each `r` in the config.
pub fn energy_expansion_check(cfg: &SweepConfig) -> Result<ExpansionReport> {
    cfg.validate()?;
    if cfg.eps.len() < 4 {
        return Err(WlabError::Invalid("need three ε for the order fit and one for the r sweep".into()));
    }
    let curv = &cfg.curvature;
    let f = f_function(curv, &cfg.rotation)?;
    let rot2 = flipped_rotation(&cfg.rotation);
    let f2 = f_function(curv, &rot2)?;
    let mut rows = Vec::new();
    let mut checks = Vec::new();

    let s0 = torus_surface(None, &cfg.rotation, cfg);
    let eps3 = &cfg.eps[..3];
    let mut res = Vec::new();
    for &e in eps3 {
        let w = willmore_energy(&s0, &AmbientMetric::new(e, curv.clone()))?;
        let row = ExpansionRow::new("r=0", e, 1.0, 0.0, w, energy_prediction(e, 0.0, curv.sc, f));
        res.push(row.residual);
        rows.push(row);
    }
    let fit = loglog_fit(eps3, &res);
    checks.push(Check::new(
        "r=0: residual eps-order",
        fit.order >= cfg.tol.energy_order_min,
        fit.order,
        format!(">= {}", cfg.tol.energy_order_min),
    ));

    let e = cfg.eps[3];
    let am = AmbientMetric::new(e, curv.clone());
    for &r in &cfg.r {
        let st = solve_xi(1.0 - r)?;
        let w1 = willmore_energy(&torus_surface(Some(&st), &cfg.rotation, cfg), &am)?;
        let w2 = willmore_energy(&torus_surface(Some(&st), &rot2, cfg), &am)?;
        let pred = energy_prediction(e, r, curv.sc, f) - energy_prediction(e, r, curv.sc, f2);
        let row = ExpansionRow::new(&format!("r={r}: W(R)-W(R')"), e, 1.0 - r, 0.0, w1 - w2, pred);
        let rel = row.residual.abs() / pred.abs();
        checks.push(Check::new(
            format!("r={r}: (1-r)^2 F coefficient"),
            rel <= cfg.tol.r_coefficient_rel,
            row.measured / pred,
            format!("ratio in 1 ± {}", cfg.tol.r_coefficient_rel),
        ));
        rows.push(row);
    }

    let flat = AmbientMetric::flat();
    let mut worst = 0.0f64;
    let w0 = willmore_energy(&s0, &flat)?;
    rows.push(ExpansionRow::new("flat r=0", 0.0, 1.0, 0.0, w0, clifford_willmore()));
    worst = worst.max((w0 / clifford_willmore() - 1.0).abs());
    if let Some(&r) = cfg.r.last() {
        let st = solve_xi(1.0 - r)?;
        let w = willmore_energy(&torus_surface(Some(&st), &cfg.rotation, cfg), &flat)?;
        rows.push(ExpansionRow::new(&format!("flat r={r}"), 0.0, 1.0 - r, 0.0, w, clifford_willmore()));
        worst = worst.max((w / clifford_willmore() - 1.0).abs());
    }
    checks.push(Check::new("flat: W = 8π²", worst <= cfg.tol.flat_abs, worst, format!("rel <= {:e}", cfg.tol.flat_abs)));

    Ok(ExpansionReport {
        name: "energy-expansion".into(),
        rows,
        fits: vec![NamedFit { name: "r=0 residual".into(), fit }],
        checks,
    })
}

/// The two routes for `∂W/∂r` at one `(ε, η)`.
#[derive(Clone, Copy, Debug, Serialize, PartialEq)]
pub struct DerivativeRoutes {
    /// `−dW[g_ε(∂_ηT, n)]`, the first variation along the family.
    pub variation: f64,
    /// `−(W(η + h) − W(η − h))/(2h)` on the nodes of the central `η`.
    pub finite_difference: f64,
}

/// `∂W/∂r` at `ω = (1 − η) e_x` by both routes (`∂_r = −∂_η`).
pub fn derivative_routes(am: &AmbientMetric, eta: f64, rot: &M3<f64>, cfg: &SweepConfig) -> Result<DerivativeRoutes> {
    let st = solve_xi(eta)?;
    let it = InvertedTorus::new(&st, 0.0);
    let rule = st.rule(&cfg.grid);
    let s = ParamSurface::new(Rotated { base: it, rot: *rot }, rule.clone(), Topology::Torus);
    let variation = -first_variation(&s, am, |u, v, p| {
        let d = matvec_f(rot, &it.d_eta(u, v));
        if am.is_flat() {
            dot(&d, &p.n)
        } else {
            bilinear(&am.metric(&p.x), &d, &p.n)
        }
    });
    let h = cfg.fd_step * eta;
    let mut w = [0.0; 2];
    for (k, e) in [eta + h, eta - h].into_iter().enumerate() {
        let sk = solve_xi(e)?;
        let chart = Rotated { base: InvertedTorus::new(&sk, 0.0), rot: *rot };
        // Flat energies are constant in η, so each η gets its own mesh; curved
        // ones are differenced node-wise against the flat value on shared nodes.
        w[k] = if am.is_flat() {
            let fine = GradedGrid { points_per_panel: cfg.grid.points_per_panel.max(12), ..cfg.grid };
            willmore_energy(&ParamSurface::new(chart, sk.rule(&fine), Topology::Torus), am)?
        } else {
            willmore_difference(&ParamSurface::new(chart, rule.clone(), Topology::Torus), am)?
        };
    }
    Ok(DerivativeRoutes { variation, finite_difference: -(w[0] - w[1]) / (2.0 * h) })
}

/// `∂W/∂r` against `η ε² (16/3)πBÃ 𝓕(P, R)` at every `(ε, η)` of the
/// config, with the sign test under `R ↦ R·Rx(90°)` and the flat case.
/// Routes disagreeing by more than the tolerance abort with
/// [`WlabError::RouteMismatch`].
pub fn derivative_check(cfg: &SweepConfig) -> Result<ExpansionReport> {
    cfg.validate()?;
    let mut rows = Vec::new();
    let mut checks = Vec::new();
    let tol = &cfg.tol;
    for &eps in &cfg.eps {
        for &eta in &cfg.eta {
            let am = AmbientMetric::new(eps, cfg.curvature.clone());
            let mut signs = Vec::new();
            for (label, rot) in [("R", cfg.rotation), ("R'", flipped_rotation(&cfg.rotation))] {
                let f = f_function(&cfg.curvature, &rot)?;
                let d = derivative_routes(&am, eta, &rot, cfg)?;
                let gap = (d.variation - d.finite_difference).abs() / d.finite_difference.abs();
                if gap > tol.route_agreement_rel {
                    return Err(WlabError::RouteMismatch(format!(
                        "∂W/∂r at ε = {eps}, η = {eta}: variation {:e} vs finite difference {:e}",
                        d.variation, d.finite_difference
                    )));
                }
                let pred = eta * eps * eps * derivative_coeff() * f;
                let mut row = ExpansionRow::new(&format!("{label}: dW/dr"), eps, eta, 0.0, d.variation, pred);
                row.alt = Some(d.finite_difference);
                checks.push(Check::new(
                    format!("{label} eps={eps} eta={eta}: routes agree"),
                    true,
                    gap,
                    format!("rel <= {}", tol.route_agreement_rel),
                ));
                for (route, v) in [("variation", d.variation), ("finite difference", d.finite_difference)] {
                    let rel = (v - pred).abs() / pred.abs();
                    checks.push(Check::new(
                        format!("{label} eps={eps} eta={eta}: {route} vs prediction"),
                        rel <= tol.derivative_rel,
                        v / pred,
                        format!("ratio in 1 ± {}", tol.derivative_rel),
                    ));
                }
                signs.push((d.variation.signum(), f.signum()));
                rows.push(row);
            }
            checks.push(Check::new(
                format!("eps={eps} eta={eta}: sign flips with F"),
                signs[0].0 == -signs[1].0 && signs[0].0 == signs[0].1,
                signs[0].0,
                "sign(dW/dr) = sign(F), flips under R'",
            ));
        }
    }
    let eta = cfg.eta[0];
    let d = derivative_routes(&AmbientMetric::flat(), eta, &cfg.rotation, cfg)?;
    let mut row = ExpansionRow::new("flat: dW/dr", 0.0, eta, 0.0, d.variation, 0.0);
    row.alt = Some(d.finite_difference);
    rows.push(row);
    let worst = d.variation.abs().max(d.finite_difference.abs());
    checks.push(Check::new("flat: dW/dr = 0", worst <= tol.flat_abs, worst, format!("<= {:e}", tol.flat_abs)));
    Ok(ExpansionReport { name: "derivative-check".into(), rows, fits: Vec::new(), checks })
}

/// `dW_{g_ε}[χ_δ φ_η] − dW_{g₀}[χ_δ φ_η]` on the inverted torus, with
/// `χ_δ` radial in the distance to the handle at the origin.
pub fn handle_contribution(curv: &CurvatureData, eps: f64, eta: f64, delta: f64, grid: &GradedGrid) -> Result<f64> {
    let st = solve_xi(eta)?;
    let it = InvertedTorus::new(&st, 0.0);
    let s = ParamSurface::new(it, st.rule(grid), Topology::Torus);
    let cut = CutoffSpec::new(delta)?;
    let support = |u: f64, v: f64| {
        let x: [f64; 3] = it.eval(u, v);
        dot(&x, &x) < 4.0 * delta * delta
    };
    let phi = |u: f64, v: f64, p: &crate::surface::ElPoint| cut.chi(dot(&p.x, &p.x).sqrt()) * phi_eta(u, v, &st);
    let curved = first_variation_on(&s, &AmbientMetric::new(eps, curv.clone()), support, phi);
    let flat = first_variation_on(&s, &AmbientMetric::flat(), support, phi);
    Ok(curved - flat)
}

/// Handle contribution at the base point `(ε₀, η₀, δ₀)` and with each
/// parameter moved to its second grid value; two-point slopes per parameter.
pub fn handle_contribution_check(cfg: &SweepConfig) -> Result<ExpansionReport> {
    cfg.validate()?;
    if cfg.eps.len() < 2 || cfg.eta.len() < 2 || cfg.delta.len() < 2 {
        return Err(WlabError::Invalid("handle check needs two values of each of ε, η, δ".into()));
    }
    let (e0, n0, d0) = (cfg.eps[0], cfg.eta[0], cfg.delta[0]);
    let pts = [(e0, n0, d0), (cfg.eps[1], n0, d0), (e0, cfg.eta[1], d0), (e0, n0, cfg.delta[1])];
    let mut rows = Vec::new();
    let mut vals = Vec::new();
    for &(e, n, d) in &pts {
        let v = handle_contribution(&cfg.curvature, e, n, d, &cfg.grid)?;
        vals.push(v);
        let mut row = ExpansionRow::new("handle", e, n, d, v, 0.0);
        row.alt = Some(v / (e * e * n * d));
        rows.push(row);
    }
    let flat = handle_contribution(&CurvatureData::flat(), e0, n0, d0, &cfg.grid)?;
    rows.push(ExpansionRow::new("handle flat", e0, n0, d0, flat, 0.0));

    let slope = |a: f64, b: f64, xa: f64, xb: f64| (a.abs() / b.abs()).ln() / (xa / xb).ln();
    let fits = [("eps", 1, e0, cfg.eps[1]), ("eta", 2, n0, cfg.eta[1]), ("delta", 3, d0, cfg.delta[1])]
        .into_iter()
        .map(|(name, k, xa, xb)| NamedFit {
            name: name.into(),
            fit: OrderFit { order: slope(vals[0], vals[k], xa, xb), log_c: f64::NAN, rms_residual: 0.0, points: 2 },
        })
        .collect();
    let tol = &cfg.tol;
    // normalized to an exact halving of ε
    let eps_ratio = (vals[0] / vals[1]) * 4.0 / (e0 / cfg.eps[1]).powi(2);
    let scaled = |k: usize, d: f64| vals[k].abs() / d;
    let delta_ratio = scaled(3, cfg.delta[1]) / scaled(0, d0);
    let checks = vec![
        Check::new("flat: difference = 0", flat.abs() <= tol.flat_abs, flat, format!("<= {:e}", tol.flat_abs)),
        Check::new(
            "eps factor (scaled to halving)",
            (eps_ratio - tol.eps_factor).abs() <= tol.eps_factor_rel * tol.eps_factor,
            eps_ratio,
            format!("{} ± {}%", tol.eps_factor, 100.0 * tol.eps_factor_rel),
        ),
        Check::new(
            "delta: |D|/δ stays bounded",
            delta_ratio <= 1.0 + tol.delta_bound_rel,
            delta_ratio,
            format!("<= {}", 1.0 + tol.delta_bound_rel),
        ),
    ];
    Ok(ExpansionReport { name: "handle-check".into(), rows, fits, checks })
}

/// `ξ_η` sweep: `(η, ξ, ξ', η⁴/ξ², η⁻⁴(ξ'η − 2ξ))` per row, slope of
/// `|η⁴/ξ² − 4√2π|` over the first four `η`, and the `c₀` limit at the last.
pub fn xi_sweep(etas: &[f64]) -> Result<SweepReport> {
    let mut table = Table::new(vec![
        col("eta", "1"),
        col("xi", "1"),
        col("xi_prime", "1"),
        col("eta4_over_xi2", "1"),
        col("combo_over_eta4", "1"),
    ]);
    let mut states = Vec::new();
    for &e in etas {
        let st = solve_xi(e)?;
        table.push(vec![e, st.xi, st.xi_prime, st.ratio(), st.scaled_combo()])?;
        states.push(st);
    }
    let mut fits = Vec::new();
    let mut checks = Vec::new();
    let n_fit = etas.len().min(4);
    if n_fit >= 3 {
        let errs: Vec<f64> = states[..n_fit].iter().map(|s| s.ratio() - xi_ratio_limit()).collect();
        let fit = loglog_fit(&etas[..n_fit], &errs);
        checks.push(Check::new("ratio slope", (fit.order - 2.0).abs() <= 0.3, fit.order, "2.0 ± 0.3"));
        fits.push(NamedFit { name: "eta4/xi2 - 4√2π".into(), fit });
    }
    if let Some(last) = states.last() {
        let rel = (last.scaled_combo() / last.c0 - 1.0).abs();
        checks.push(Check::new(
            format!("combo at eta={} vs c0", last.eta),
            rel <= 0.05,
            last.scaled_combo(),
            format!("within 5% of {:.6}", last.c0),
        ));
    }
    Ok(SweepReport { name: "verify-xi".into(), table, fits, checks })
}

/// `sup |ψ_η − ψ₀|` over a uniform `(n+1)²` grid on `[−L, L]²` of the
/// rescaled chart.
pub fn psi_deviation(state: &DegenerationState, half_width: f64, n: usize) -> f64 {
    let step = 2.0 * half_width / n as f64;
    let mut m = 0.0f64;
    for i in 0..=n {
        for j in 0..=n {
            let (pb, tb) = (-half_width + step * i as f64, -half_width + step * j as f64);
            m = m.max((psi_eta(pb, tb, state) - psi0_plane(pb, tb)).abs());
        }
    }
    m
}

/// `ψ₀` checks: mean over the limit sphere, the closed-form `Δψ₀` against a
/// spectral Laplacian, and `ψ_η → ψ₀` on `[−5, 5]²`.
pub fn psi_sweep(etas: &[f64], sphere: (usize, usize)) -> Result<SweepReport> {
    let mut table = Table::new(vec![col("eta", "1"), col("sup_psi_eta_minus_psi0", "1")]);
    let mut sups = Vec::new();
    for &e in etas {
        let st = solve_xi(e)?;
        let s = psi_deviation(&st, 5.0, 100);
        table.push(vec![e, s])?;
        sups.push(s);
    }
    let mean = crate::sphere::psi0_mean(sphere.0, sphere.1);
    let mut checks = vec![Check::new("integral of psi0", mean.abs() <= 1e-8, mean, "|.| <= 1e-8")];
    let lap = crate::spectral::sphere_laplacian_dfs(crate::moebius::psi0, crate::consts::a_tilde(), sphere.0, sphere.1);
    let mut worst = 0.0f64;
    for &(t, p, l) in lap.iter().filter(|q| q.0 < 3.0) {
        worst = worst.max((l - crate::sphere::laplacian_psi0(t, p)?).abs());
    }
    checks.push(Check::new("Laplacian of psi0 vs spectral (theta < 3)", worst <= 1e-6, worst, "<= 1e-6"));
    let decreasing = sups.windows(2).all(|w| w[1] < w[0]);
    checks.push(Check::new("sup |psi_eta - psi0| decreasing", decreasing, *sups.last().unwrap_or(&f64::NAN), "strictly decreasing in eta"));
    let fits = if etas.len() >= 3 {
        vec![NamedFit { name: "sup deviation".into(), fit: loglog_fit(etas, &sups) }]
    } else {
        Vec::new()
    };
    Ok(SweepReport { name: "verify-psi0".into(), table, fits, checks })
}

/// Cutoff integrals over a `δ` grid (descending), Richardson extrapolation
/// in `δ²` from the two smallest, and the `δ`-order of the error.
pub fn appendix_sweep(deltas: &[f64], curv: &CurvatureData, grid: &SphereGrid) -> Result<(SweepReport, Vec<AppendixIntegrals>)> {
    let mut table = Table::new(vec![
        col("delta", "1"),
        col("i_ric", "1"),
        col("i_f", "1"),
        col("i_total", "1"),
        col("target_ric", "1"),
        col("target_f", "1"),
        col("target_total", "1"),
        col("err_ric", "1"),
        col("err_f", "1"),
        col("err_total", "1"),
    ]);
    let mut out = Vec::new();
    for &d in deltas {
        let a = appendix_integrals_with(d, curv, grid)?;
        table.push(vec![
            d,
            a.i_ric,
            a.i_f,
            a.i_total,
            a.target_ric,
            a.target_f,
            a.target_total,
            a.i_ric - a.target_ric,
            a.i_f - a.target_f,
            a.i_total - a.target_total,
        ])?;
        out.push(a);
    }
    let mut fits = Vec::new();
    let mut checks = Vec::new();
    let n = out.len();
    if n >= 2 {
        let (a, b) = (&out[n - 2], &out[n - 1]);
        let ratio = a.delta / b.delta;
        let ext = if (ratio - 2.0).abs() < 1e-12 {
            richardson(a.i_total, b.i_total, 2.0)
        } else {
            crate::fit::extrapolate_power(&[a.delta, b.delta], &[a.i_total, b.i_total], 2.0)
        };
        let rel = (ext / b.target_total - 1.0).abs();
        checks.push(Check::new("Richardson I_total vs target", rel <= 0.01, ext, format!("within 1% of {:.6}", b.target_total)));
    }
    if n >= 3 {
        let errs: Vec<f64> = out.iter().map(|a| a.i_total - a.target_total).collect();
        let fit = loglog_fit(deltas, &errs);
        checks.push(Check::new("delta-order of I_total error", fit.order >= 1.7, fit.order, ">= 1.7"));
        fits.push(NamedFit { name: "I_total error".into(), fit });
    }
    Ok((SweepReport { name: "appendix-integrals".into(), table, fits, checks }, out))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_windows() {
        let mut c = SweepConfig::energy_default();
        assert!(c.validate().is_ok());
        c.delta = vec![0.5];
        assert!(c.validate().is_err());
        let mut c = SweepConfig::el_default();
        c.eps.push(0.7);
        assert!(matches!(c.validate(), Err(WlabError::Domain(_))));
    }

    #[test]
    fn prediction_reduces_to_sc_law_at_r_one() {
        let p = energy_prediction(0.1, 1.0 - 1e-12, 6.0, -1.0);
        assert!((p - (clifford_willmore() - sc_energy_coeff() * 0.01 * 6.0)).abs() < 1e-12);
    }

    #[test]
    fn flipped_rotation_negates_f() {
        let c = CurvatureData::from_eigenvalues([1.0, 2.0, 3.0]);
        let r = crate::linalg::rot_z(0.3);
        let f1 = f_function(&c, &r).unwrap();
        let f2 = f_function(&c, &flipped_rotation(&r)).unwrap();
        assert!((f1 + f2).abs() < 1e-14);
    }

    #[test]
    fn report_table_matches_rows() {
        let rep = ExpansionReport {
            name: "t".into(),
            rows: vec![ExpansionRow::new("a", 0.1, 0.2, 0.0, 3.0, 1.0), ExpansionRow::new("b", 0.1, 0.2, 0.0, 1.0, 1.0)],
            fits: vec![],
            checks: vec![],
        };
        let t = rep.table();
        assert_eq!(t.rows.len(), 2);
        assert_eq!(t.rows[0][6], 2.0);
        assert_eq!(t.rows[1][0], 1.0);
        assert_eq!(rep.case_names(), vec!["a".to_string(), "b".to_string()]);
    }
}
