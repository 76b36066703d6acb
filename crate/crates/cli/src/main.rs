use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use std::path::PathBuf;
use std::process::ExitCode;
use wlab::experiments::{self, Check, ExpansionReport, SweepConfig, SweepReport};
use wlab::io::{col, save_json, Meta, Table};
use wlab::moebius::{GradedGrid, MoebiusParam, TorusImage};
use wlab::morse;
use wlab::sphere::SphereGrid;
use wlab::surface::{self, ParamSurface, RoundSphere};
use wlab::{AmbientMetric, CurvatureData, WlabError};

const BUILD: &str = env!("WLAB_BUILD_TAG");

#[derive(Parser, Debug)]
#[command(name = "wlab", version = BUILD, about = "Willmore tori lab: sweeps, checks and Morse counts")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    #[command(flatten)]
    common: Common,
}

#[derive(Subcommand, Debug, Clone, Copy, Serialize, PartialEq)]
#[serde(rename_all = "kebab-case")]
enum Cmd {
    /// Area-preserving offset ξ_η and its derivative over an η grid.
    VerifyXi,
    /// Mean of ψ₀, its Laplacian, and ψ_η → ψ₀.
    VerifyPsi0,
    /// Area, Willmore energy and Hawking mass of a preset surface.
    Willmore,
    /// Euler–Lagrange residual scaling in ε.
    ElResidual,
    /// Energy of degenerating tori against the ε² expansion.
    EnergyExpansion,
    /// ∂W/∂r by two routes against the asymptotic prediction.
    DerivativeCheck,
    /// Handle-localized part of the variation.
    HandleCheck,
    /// Cutoff integrals on the limit sphere over a δ grid.
    AppendixIntegrals,
    /// Critical points of F on SO(3), enumerated and searched.
    So3Critical,
    /// Betti numbers, Morse counts and the multiplicity bound.
    MorseCounts,
    /// Every check above with default grids.
    All,
}

#[derive(Args, Debug, Clone, Serialize)]
struct Common {
    /// ε values, comma separated.
    #[arg(long, global = true, value_delimiter = ',')]
    eps: Option<Vec<f64>>,
    /// η = 1 − |ω| values.
    #[arg(long, global = true, value_delimiter = ',')]
    eta: Option<Vec<f64>>,
    /// r = |ω| values.
    #[arg(long, global = true, value_delimiter = ',')]
    r: Option<Vec<f64>>,
    /// Cutoff radii δ.
    #[arg(long, global = true, value_delimiter = ',')]
    delta: Option<Vec<f64>>,
    /// Ricci eigenvalues a,b,c (diagonal Ricci form).
    #[arg(long, global = true, value_delimiter = ',')]
    alphas: Option<Vec<f64>>,
    /// JSON file: {"sc": s, "ric": [[..],[..],[..]]} or {"eigenvalues": [a,b,c]}.
    #[arg(long, global = true)]
    curvature: Option<PathBuf>,
    /// Periodic grid NxM.
    #[arg(long, global = true, value_parser = parse_grid)]
    grid: Option<(usize, usize)>,
    #[arg(long, global = true, default_value = "wlab-out")]
    out: PathBuf,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Surface preset (willmore: clifford, sphere, torus-image) or manifold
    /// preset (morse-counts: s3, s2xs1, t3).
    #[arg(long, global = true)]
    preset: Option<String>,
    /// Morse counts C₀..C₃ of −Sc.
    #[arg(long, global = true, value_delimiter = ',')]
    sc_counts: Option<Vec<u64>>,
    /// morse-counts input JSON {"betti": [..], "sc_morse_counts": [..]}.
    #[arg(long, global = true)]
    input: Option<PathBuf>,
    /// Number of Newton seeds for so3-critical.
    #[arg(long, global = true, default_value_t = 500)]
    seeds: usize,
}

fn parse_grid(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(['x', 'X']).ok_or_else(|| format!("expected NxM, got '{s}'"))?;
    let n = a.parse::<usize>().map_err(|e| e.to_string())?;
    let m = b.parse::<usize>().map_err(|e| e.to_string())?;
    if n < 4 || m < 4 {
        return Err(format!("grid {n}x{m} too small"));
    }
    Ok((n, m))
}

enum Failure {
    Usage(String),
    Numeric(String),
}

impl From<WlabError> for Failure {
    fn from(e: WlabError) -> Self {
        match e {
            WlabError::NotConverged(_) | WlabError::Degenerate { .. } | WlabError::RouteMismatch(_) => {
                Failure::Numeric(e.to_string())
            }
            _ => Failure::Usage(e.to_string()),
        }
    }
}

type Res<T> = Result<T, Failure>;

/// Configuration echoed into every artifact.
#[derive(Serialize)]
struct Echo<'a, T: Serialize> {
    subcommand: Cmd,
    args: &'a Common,
    settings: &'a T,
}

struct Ctx {
    cmd: Cmd,
    common: Common,
    curv: CurvatureData,
}

impl Ctx {
    fn meta(&self, settings: &impl Serialize) -> Res<Meta> {
        let echo = Echo { subcommand: self.cmd, args: &self.common, settings };
        Ok(Meta::new(BUILD, self.common.seed, &echo)?)
    }

    fn write(&self, stem: &str, table: &Table, meta: &Meta, report: &impl Serialize) -> Res<()> {
        let dir = &self.common.out;
        std::fs::create_dir_all(dir).map_err(|e| Failure::Usage(format!("{}: {e}", dir.display())))?;
        table.save_csv(&dir.join(format!("{stem}.csv")), meta)?;
        save_json(&dir.join(format!("{stem}.json")), meta, report)?;
        Ok(())
    }

    fn sweep(&self, mut cfg: SweepConfig) -> Res<SweepConfig> {
        let c = &self.common;
        if let Some(v) = &c.eps {
            cfg.eps = v.clone();
        }
        if let Some(v) = &c.eta {
            cfg.eta = v.clone();
        }
        if let Some(v) = &c.r {
            cfg.r = v.clone();
        }
        if let Some(v) = &c.delta {
            cfg.delta = v.clone();
        }
        if let Some((n, _)) = c.grid {
            cfg.periodic_nodes = n;
        }
        cfg.curvature = self.curv.clone();
        cfg.validate()?;
        Ok(cfg)
    }

    fn expansion(&self, stem: &str, cfg: &SweepConfig, rep: &ExpansionReport) -> Res<Vec<Check>> {
        for r in &rep.rows {
            println!(
                "{:<22} eps={:<6} eta={:<6} delta={:<5} measured={:+.9e} prediction={:+.9e}{}",
                r.case,
                r.eps,
                r.eta,
                r.delta,
                r.measured,
                r.prediction,
                r.alt.map(|a| format!(" alt={a:+.9e}")).unwrap_or_default()
            );
        }
        for f in &rep.fits {
            println!("fit {}: order {:.4} (rms {:.2e}, {} points)", f.name, f.fit.order, f.fit.rms_residual, f.fit.points);
        }
        let meta = self.meta(&(cfg, rep.case_names()))?;
        self.write(stem, &rep.table(), &meta, rep)?;
        Ok(rep.checks.clone())
    }

    fn table_report(&self, stem: &str, settings: &impl Serialize, rep: &SweepReport) -> Res<Vec<Check>> {
        let names: Vec<&str> = rep.table.columns.iter().map(|c| c.name.as_str()).collect();
        println!("{}", names.join("  "));
        for row in &rep.table.rows {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:.10e}")).collect();
            println!("{}", cells.join("  "));
        }
        for f in &rep.fits {
            println!("fit {}: order {:.4} (rms {:.2e}, {} points)", f.name, f.fit.order, f.fit.rms_residual, f.fit.points);
        }
        let meta = self.meta(settings)?;
        self.write(stem, &rep.table, &meta, rep)?;
        Ok(rep.checks.clone())
    }
}

fn curvature(c: &Common) -> Res<CurvatureData> {
    match (&c.curvature, &c.alphas) {
        (Some(_), Some(_)) => Err(Failure::Usage("give either --curvature or --alphas, not both".into())),
        (Some(path), None) => {
            let text = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
            Ok(CurvatureData::from_json(&text)?)
        }
        (None, Some(a)) => Ok(CurvatureData::from_eigenvalues(three(a, "--alphas")?)),
        (None, None) => Ok(CurvatureData::from_eigenvalues([1.0, 2.0, 3.0])),
    }
}

fn three(v: &[f64], flag: &str) -> Res<[f64; 3]> {
    v.try_into().map_err(|_| Failure::Usage(format!("{flag} needs exactly three values")))
}

fn ricci_eigenvalues(curv: &CurvatureData) -> [f64; 3] {
    if let Some((a, _)) = curv.eigen {
        return a;
    }
    let m: Vec<Vec<f64>> = curv.ric.iter().map(|r| r.to_vec()).collect();
    let (vals, _) = wlab::linalg::sym_eigen(&m);
    [vals[0], vals[1], vals[2]]
}

fn verify_xi(ctx: &Ctx) -> Res<Vec<Check>> {
    let etas = ctx.common.eta.clone().unwrap_or_else(|| vec![0.2, 0.1, 0.05, 0.025, 0.02]);
    let rep = experiments::xi_sweep(&etas)?;
    ctx.table_report("verify-xi", &etas, &rep)
}

fn verify_psi0(ctx: &Ctx) -> Res<Vec<Check>> {
    let etas = ctx.common.eta.clone().unwrap_or_else(|| vec![0.1, 0.05, 0.025]);
    let (n, m) = ctx.common.grid.unwrap_or((64, 64));
    let rep = experiments::psi_sweep(&etas, (n, m))?;
    ctx.table_report("verify-psi0", &(etas, (n, m)), &rep)
}

#[derive(Serialize)]
struct WillmoreSettings {
    preset: String,
    grid: (usize, usize),
    graded: GradedGrid,
    r: f64,
}

fn willmore(ctx: &Ctx) -> Res<Vec<Check>> {
    let c = &ctx.common;
    let preset = c.preset.clone().unwrap_or_else(|| "clifford".into());
    let eps_list = c.eps.clone().unwrap_or_else(|| vec![0.0]);
    let r = c.r.as_ref().and_then(|v| v.first().copied()).unwrap_or(0.5);
    let graded = GradedGrid::default();
    let mut table = Table::new(vec![
        col("eps", "1"),
        col("area", "length^2"),
        col("willmore", "1"),
        col("hawking_mass", "length"),
        col("target", "1"),
    ]);
    let mut checks = Vec::new();
    for &eps in &eps_list {
        if !(0.0..=0.5).contains(&eps) {
            return Err(Failure::Usage(format!("ε = {eps} outside [0, 0.5]")));
        }
        let am = if eps == 0.0 { AmbientMetric::flat() } else { AmbientMetric::new(eps, ctx.curv.clone()) };
        let (area, w, target, rel_tol, name) = match preset.as_str() {
            "clifford" => {
                let g = c.grid.unwrap_or((256, 256));
                let s = ParamSurface::torus(TorusImage::Clifford, g.0, g.1);
                (surface::area(&s, &am)?, surface::willmore_energy(&s, &am)?, wlab::consts::clifford_willmore(), 1e-10, "8π²")
            }
            "sphere" => {
                let g = c.grid.unwrap_or((64, 64));
                let s = ParamSurface::sphere(RoundSphere { rho: 1.0, center: [0.0; 3] }, g.0, g.1);
                (surface::area(&s, &am)?, surface::willmore_energy(&s, &am)?, 16.0 * std::f64::consts::PI, 1e-10, "16π")
            }
            "torus-image" => {
                let g = c.grid.unwrap_or((256, 256));
                let t = TorusImage::new(&MoebiusParam::radial(r)?)?;
                let s = t.surface(&graded, g.0);
                (surface::area(&s, &am)?, surface::willmore_energy(&s, &am)?, wlab::consts::clifford_willmore(), 1e-6, "8π²")
            }
            other => return Err(Failure::Usage(format!("unknown surface preset '{other}'"))),
        };
        let mass = surface::hawking_mass_from(area, w);
        println!("eps = {eps}: area = {area:.12}  W = {w:.12}  (target {name} = {target:.12})  Hawking mass = {mass:.9e}");
        table.push(vec![eps, area, w, mass, target])?;
        if eps == 0.0 {
            let rel = (w / target - 1.0).abs();
            checks.push(Check {
                name: format!("{preset}: flat W = {name}"),
                passed: rel <= rel_tol,
                value: rel,
                threshold: format!("rel <= {rel_tol:e}"),
            });
        }
    }
    let settings = WillmoreSettings { preset: preset.clone(), grid: c.grid.unwrap_or((256, 256)), graded, r };
    let meta = ctx.meta(&settings)?;
    ctx.write("willmore", &table, &meta, &(&table, &checks))?;
    Ok(checks)
}

fn el_residual(ctx: &Ctx) -> Res<Vec<Check>> {
    let cfg = ctx.sweep(SweepConfig::el_default())?;
    let rep = experiments::el_residual_sweep(&cfg)?;
    ctx.expansion("el-residual", &cfg, &rep)
}

fn energy_expansion(ctx: &Ctx) -> Res<Vec<Check>> {
    let cfg = ctx.sweep(SweepConfig::energy_default())?;
    let rep = experiments::energy_expansion_check(&cfg)?;
    ctx.expansion("energy-expansion", &cfg, &rep)
}

fn derivative_check(ctx: &Ctx) -> Res<Vec<Check>> {
    let cfg = ctx.sweep(SweepConfig::derivative_default())?;
    let rep = experiments::derivative_check(&cfg)?;
    ctx.expansion("derivative-check", &cfg, &rep)
}

fn handle_check(ctx: &Ctx) -> Res<Vec<Check>> {
    let cfg = ctx.sweep(SweepConfig::handle_default())?;
    let rep = experiments::handle_contribution_check(&cfg)?;
    ctx.expansion("handle-check", &cfg, &rep)
}

fn appendix_integrals(ctx: &Ctx) -> Res<Vec<Check>> {
    let deltas = ctx.common.delta.clone().unwrap_or_else(|| vec![0.2, 0.1, 0.05, 0.025]);
    let grid = SphereGrid::default();
    let (rep, _) = experiments::appendix_sweep(&deltas, &ctx.curv, &grid)?;
    let mut checks = ctx.table_report("appendix-integrals", &(deltas, grid, &ctx.curv), &rep)?;
    let rows = wlab::sphere::basic_integrals();
    let worst = rows.iter().map(|b| (b.value - b.exact).abs()).fold(0.0f64, f64::max);
    for b in &rows {
        println!("{:<28} {:+.14e}  exact {:+.14e}", b.name, b.value, b.exact);
    }
    checks.push(Check { name: "basic integrals".into(), passed: worst <= 1e-10, value: worst, threshold: "<= 1e-10".into() });
    Ok(checks)
}

fn so3_critical(ctx: &Ctx) -> Res<Vec<Check>> {
    let alpha = ricci_eigenvalues(&ctx.curv);
    let rep = morse::f_critical_search(alpha, ctx.common.seeds, ctx.common.seed)?;
    let counts = morse::index_counts(&rep.points);
    println!(
        "{} critical points; indices {}/{}/{}/{}",
        rep.points.len(),
        counts[3],
        counts[2],
        counts[1],
        counts[0]
    );
    println!("converged seeds {}/{}; max match distance {:.2e}; max spectrum error {:.2e}", rep.converged, rep.seeds, rep.max_match_distance, rep.max_spectrum_error);
    let mut table = Table::new(vec![
        col("i", "1"),
        col("j", "1"),
        col("sign_i", "1"),
        col("sign_j", "1"),
        col("f_value", "curvature"),
        col("hess_0", "curvature"),
        col("hess_1", "curvature"),
        col("hess_2", "curvature"),
        col("index", "1"),
        col("condition", "1"),
    ]);
    let mut pts = rep.points.clone();
    pts.sort_by(|a, b| a.label.cmp(&b.label).then(a.x.partial_cmp(&b.x).unwrap()));
    for p in &pts {
        let (i, j) = p.label.unwrap_or((0, 0));
        table.push(vec![
            i as f64,
            j as f64,
            p.x[i - 1].signum(),
            p.x[j + 2].signum(),
            p.f_value,
            p.hessian[0],
            p.hessian[1],
            p.hessian[2],
            p.index as f64,
            p.condition_number(),
        ])?;
    }
    let meta = ctx.meta(&(alpha, ctx.common.seeds, morse::CLUSTER_RADIUS))?;
    ctx.write("so3-critical", &table, &meta, &rep)?;
    Ok(vec![
        Check { name: "24 critical points".into(), passed: pts.len() == 24, value: pts.len() as f64, threshold: "= 24".into() },
        Check {
            name: "index pattern 4/8/8/4".into(),
            passed: counts == [4, 8, 8, 4],
            value: counts[0] as f64,
            threshold: "(C0,C1,C2,C3) = (4,8,8,4)".into(),
        },
        Check {
            name: "Hessian spectra".into(),
            passed: rep.max_spectrum_error <= 1e-6,
            value: rep.max_spectrum_error,
            threshold: "<= 1e-6".into(),
        },
    ])
}

#[derive(serde::Deserialize)]
struct MorseInput {
    betti: [u64; 4],
    sc_morse_counts: [u64; 4],
}

fn morse_counts(ctx: &Ctx) -> Res<Vec<Check>> {
    let c = &ctx.common;
    let (betti, sc) = if let Some(path) = &c.input {
        let text = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
        let m: MorseInput = serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
        (m.betti, m.sc_morse_counts)
    } else {
        let name = c.preset.clone().unwrap_or_else(|| "s3".into());
        let b = morse::betti_preset(&name).ok_or_else(|| Failure::Usage(format!("unknown manifold preset '{name}'")))?;
        let sc = match &c.sc_counts {
            Some(v) => v.as_slice().try_into().map_err(|_| Failure::Usage("--sc-counts needs four values".into()))?,
            None => [1, 0, 0, 1],
        };
        (b, sc)
    };
    let table = morse::morse_table(betti, sc);
    println!("betti        {:?}", table.betti);
    println!("sc counts    {:?}", table.sc_counts);
    println!("tilde beta   {:?}", table.tilde_beta);
    println!("tilde C      {:?}", table.tilde_c);
    println!("surplus q<=4 {:?}", table.surplus);
    println!("bound {}", table.bound);
    let alpha = ricci_eigenvalues(&ctx.curv);
    let pts = morse::f_critical_enumerate(alpha)?;
    let from_points = morse::tilde_c_from_points(sc, &pts);
    let mut csv = Table::new(vec![col("q", "1"), col("tilde_beta", "1"), col("tilde_c", "1")]);
    for q in 0..7 {
        csv.push(vec![q as f64, table.tilde_beta[q] as f64, table.tilde_c[q] as f64])?;
    }
    let meta = ctx.meta(&(betti, sc, alpha))?;
    ctx.write("morse-counts", &csv, &meta, &table)?;
    Ok(vec![
        Check { name: "bound >= 2".into(), passed: table.bound >= 2, value: table.bound as f64, threshold: ">= 2".into() },
        Check {
            name: "tilde C from SO(3) points".into(),
            passed: from_points == Some(table.tilde_c),
            value: 0.0,
            threshold: "exact".into(),
        },
        Check {
            name: "tilde beta = Kunneth".into(),
            passed: betti[0] != 1 || morse::kunneth_rp2(betti) == table.tilde_beta,
            value: 0.0,
            threshold: "exact".into(),
        },
    ])
}

fn dispatch(ctx: &Ctx) -> Res<Vec<Check>> {
    match ctx.cmd {
        Cmd::VerifyXi => verify_xi(ctx),
        Cmd::VerifyPsi0 => verify_psi0(ctx),
        Cmd::Willmore => willmore(ctx),
        Cmd::ElResidual => el_residual(ctx),
        Cmd::EnergyExpansion => energy_expansion(ctx),
        Cmd::DerivativeCheck => derivative_check(ctx),
        Cmd::HandleCheck => handle_check(ctx),
        Cmd::AppendixIntegrals => appendix_integrals(ctx),
        Cmd::So3Critical => so3_critical(ctx),
        Cmd::MorseCounts => morse_counts(ctx),
        Cmd::All => {
            let mut all = Vec::new();
            for cmd in [
                Cmd::Willmore,
                Cmd::VerifyXi,
                Cmd::VerifyPsi0,
                Cmd::AppendixIntegrals,
                Cmd::ElResidual,
                Cmd::EnergyExpansion,
                Cmd::DerivativeCheck,
                Cmd::HandleCheck,
                Cmd::So3Critical,
                Cmd::MorseCounts,
            ] {
                println!("== {}", serde_json::to_string(&cmd).unwrap_or_default().trim_matches('"'));
                let sub = Ctx { cmd, common: ctx.common.clone(), curv: ctx.curv.clone() };
                let checks = dispatch(&sub)?;
                report(&checks);
                all.extend(checks);
            }
            Ok(all)
        }
    }
}

fn report(checks: &[Check]) {
    for c in checks {
        println!("[{}] {}: {} ({})", if c.passed { "PASS" } else { "FAIL" }, c.name, c.value, c.threshold);
    }
}

fn init_threads() {
    if let Some(n) = std::env::var("WLAB_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        if n > 0 {
            if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
                log::warn!("could not cap threads at {n}: {e}");
            }
        }
    }
}

fn run(cli: Cli) -> Res<Vec<Check>> {
    let curv = curvature(&cli.common)?;
    let ctx = Ctx { cmd: cli.cmd, common: cli.common, curv };
    let checks = dispatch(&ctx)?;
    if ctx.cmd != Cmd::All {
        report(&checks);
    }
    Ok(checks)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    init_threads();
    log::info!("artifacts in {}", cli.common.out.display());
    match run(cli) {
        Ok(checks) => {
            let failed: Vec<&Check> = checks.iter().filter(|c| !c.passed).collect();
            if failed.is_empty() {
                ExitCode::SUCCESS
            } else {
                eprintln!("{} check(s) failed:", failed.len());
                for c in failed {
                    eprintln!("  {}: {} ({})", c.name, c.value, c.threshold);
                }
                ExitCode::from(1)
            }
        }
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Numeric(m)) => {
            eprintln!("numerical failure: {m}");
            ExitCode::from(3)
        }
    }
}
