use std::collections::HashSet;

use serde::Serialize;

use sinhlayer::asymptotics::{expansion_report, half_height, layer_expansion, local_model_expansions, solve_b};
use sinhlayer::concentration::{
    empirical_pairing, standard_f_suite, standard_h_suite, weight_full, weight_window, Mode, Window,
};
use sinhlayer::harness::{analyze_sweep, dichotomy_check, solve_sweep, SweepReport};
use sinhlayer::solver::solve;
use sinhlayer::{Error, LayerPoint, ProblemParams, RadialSolution};

use crate::config::{ConfigError, Format, RunConfig};
use crate::output::{num, slug, write_json, Table};

/// How a command ended, short of a configuration error.
#[derive(Debug)]
pub enum Outcome {
    Pass,
    /// Ran to completion but a required check failed.
    Fail,
}

#[derive(Debug)]
pub enum Failure {
    Config(String),
    Solver(String),
    Io(String),
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e.0)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

fn is_numerical(e: &Error) -> bool {
    match e {
        Error::Divergence { .. } | Error::Root(_) | Error::Quadrature(_) => true,
        Error::Sweep { source, .. } => is_numerical(source),
        _ => false,
    }
}

#[derive(Serialize)]
struct Diagnostic<'a> {
    command: &'a str,
    status: &'static str,
    error: String,
    config: &'a RunConfig,
}

/// Classify a library error; numerical failures leave `error.json` behind.
fn fail(cfg: &RunConfig, command: &str, e: Error) -> Failure {
    if !is_numerical(&e) {
        return Failure::Config(e.to_string());
    }
    let diag = Diagnostic { command, status: "solver-failure", error: e.to_string(), config: cfg };
    match write_json(&cfg.out_dir().join("error.json"), &diag) {
        Ok(()) => Failure::Solver(e.to_string()),
        Err(io) => Failure::Solver(format!("{e} (diagnostic not written: {io})")),
    }
}

fn write_config(cfg: &RunConfig) -> Result<(), Failure> {
    Ok(write_json(&cfg.out_dir().join("config.json"), cfg)?)
}

/// Check every mesh of a sweep before solving anything.
fn check_meshes(cfg: &RunConfig) -> Result<(), Failure> {
    let base = cfg.params()?;
    for &e in cfg.eps_list.as_ref().unwrap() {
        cfg.mesh(&base.with_eps(e))?;
    }
    Ok(())
}

#[derive(Serialize)]
struct SolveSidecar<'a> {
    params: ProblemParams,
    model: &'static str,
    #[serde(rename = "C")]
    c: f64,
    residual: f64,
    tolerance: f64,
    iters: usize,
    nodes: usize,
    grading: sinhlayer::Grading,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<&'a str>,
}

#[derive(Serialize)]
struct Profile<'a> {
    r: &'a [f64],
    u: &'a [f64],
    du: &'a [f64],
    model: &'static str,
}

pub fn solve_cmd(cfg: &RunConfig) -> Result<Outcome, Failure> {
    let params = cfg.params()?;
    let mesh = cfg.mesh(&params)?;
    let model = cfg.model.unwrap();
    write_config(cfg)?;
    let dir = cfg.out_dir();
    let sol = match solve(&params, &mesh, model, &cfg.solver()) {
        Ok(s) => s,
        Err(e) => {
            let msg = e.to_string();
            let side = SolveSidecar {
                params,
                model: model.name(),
                c: f64::NAN,
                residual: f64::NAN,
                tolerance: cfg.solver().residual_tolerance(&params),
                iters: 0,
                nodes: mesh.len(),
                grading: mesh.grading,
                error: Some(&msg),
            };
            write_json(&dir.join("solve.json"), &side)?;
            return Err(fail(cfg, "solve", e));
        }
    };
    match cfg.format() {
        Format::Csv => {
            let mut t = Table::new(&["r", "u", "du", "model"]);
            for j in 0..sol.u.len() {
                t.row([num(sol.mesh.nodes[j]), num(sol.u[j]), num(sol.du[j]), model.name().to_string()]);
            }
            t.write(&dir.join("solution.csv"))?;
        }
        Format::Json => {
            let prof = Profile { r: &sol.mesh.nodes, u: &sol.u, du: &sol.du, model: model.name() };
            write_json(&dir.join("solution.json"), &prof)?;
        }
    }
    let side = SolveSidecar {
        params,
        model: model.name(),
        c: sol.c,
        residual: sol.residual_norm,
        tolerance: sol.tolerance,
        iters: sol.newton_iters,
        nodes: sol.mesh.len(),
        grading: sol.mesh.grading,
        error: None,
    };
    write_json(&dir.join("solve.json"), &side)?;
    Ok(Outcome::Pass)
}

#[derive(Serialize)]
struct GridRow {
    p: f64,
    q: f64,
    k_p: f64,
    u2: f64,
    du2: f64,
    v2: f64,
    dv2: f64,
}

pub fn expand_cmd(cfg: &RunConfig) -> Result<Outcome, Failure> {
    let params = cfg.params()?;
    let variant = cfg.variant.unwrap();
    let mut grid = cfg.grid()?;
    write_config(cfg)?;
    let dir = cfg.out_dir();
    let eps = params.eps;
    let report = expansion_report(&params, &LayerPoint::BOUNDARY, variant, None).map_err(|e| fail(cfg, "expand", e))?;
    write_json(&dir.join("expansion.json"), &report)?;
    // the half-height point closes the grid
    if solve_b(&params).map_err(|e| fail(cfg, "expand", e))? != 0.0 {
        let q_star = half_height(&params, variant).map_err(|e| fail(cfg, "expand", e))?.q_star;
        let pt = LayerPoint::new(0.0, q_star).map_err(|e| fail(cfg, "expand", e))?;
        if !grid.contains(&pt) {
            grid.push(pt);
        }
    }
    let mut rows = Vec::new();
    for pt in &grid {
        let lay = layer_expansion(&params, pt, variant).map_err(|e| fail(cfg, "expand", e))?;
        let loc = local_model_expansions(&params, pt, variant).map_err(|e| fail(cfg, "expand", e))?;
        rows.push(GridRow {
            p: pt.p,
            q: pt.q,
            k_p: lay.k,
            u2: lay.u.value(eps),
            du2: lay.du.value(eps),
            v2: loc.v_layer.value(eps),
            dv2: loc.dv_layer.value(eps),
        });
    }
    match cfg.format() {
        Format::Csv => {
            let mut t = Table::new(&["p", "q", "k_p", "u2", "du2", "v2", "dv2"]);
            for r in &rows {
                t.row([r.p, r.q, r.k_p, r.u2, r.du2, r.v2, r.dv2].map(num));
            }
            t.write(&dir.join("expansion_grid.csv"))?;
        }
        Format::Json => write_json(&dir.join("expansion_grid.json"), &rows)?,
    }
    Ok(Outcome::Pass)
}

#[derive(Serialize)]
struct RateSummary<'a> {
    pass: bool,
    trivial: bool,
    variant: &'static str,
    fits: &'a [sinhlayer::harness::RateFit],
    channels: Vec<ChannelSummary<'a>>,
}

#[derive(Serialize)]
struct ChannelSummary<'a> {
    name: &'a str,
    file: String,
    pass: bool,
    trivial: bool,
    final_relative: Option<f64>,
}

fn channel_files(report: &SweepReport) -> Vec<String> {
    let mut seen = HashSet::new();
    report
        .channels
        .iter()
        .map(|c| {
            let mut s = slug(&c.name);
            let base = s.clone();
            let mut i = 1;
            while !seen.insert(s.clone()) {
                i += 1;
                s = format!("{base}-{i}");
            }
            s
        })
        .collect()
}

pub fn sweep_cmd(cfg: &RunConfig) -> Result<Outcome, Failure> {
    let plan = cfg.sweep_plan()?;
    check_meshes(cfg)?;
    write_config(cfg)?;
    let dir = cfg.out_dir();
    let entries = solve_sweep(&plan).map_err(|e| fail(cfg, "sweep", e))?;
    let report = analyze_sweep(&plan, &entries).map_err(|e| fail(cfg, "sweep", e))?;
    let files = channel_files(&report);
    match cfg.format() {
        Format::Csv => {
            for (c, f) in report.channels.iter().zip(&files) {
                let mut t = Table::new(&["eps", "error"]);
                for (e, err) in c.eps.iter().zip(&c.errors) {
                    t.row([num(*e), num(*err)]);
                }
                t.write(&dir.join("channels").join(format!("{f}.csv")))?;
            }
        }
        Format::Json => write_json(&dir.join("sweep.json"), &report)?,
    }
    let summary = RateSummary {
        pass: report.pass,
        trivial: report.trivial,
        variant: plan.variant.name(),
        fits: &report.fits,
        channels: report
            .channels
            .iter()
            .zip(&files)
            .map(|(c, f)| ChannelSummary {
                name: &c.name,
                file: format!("channels/{f}.csv"),
                pass: c.pass,
                trivial: c.trivial,
                final_relative: c.final_relative(),
            })
            .collect(),
    };
    write_json(&dir.join("ratefits.json"), &summary)?;
    for c in report.channels.iter().filter(|c| !c.pass) {
        eprintln!("channel failed: {}", c.name);
    }
    Ok(if report.pass { Outcome::Pass } else { Outcome::Fail })
}

#[derive(Serialize)]
struct ConcentrationRow {
    f: String,
    h: String,
    mode: &'static str,
    window: String,
    eps: f64,
    empirical: f64,
    limit: f64,
    relerr: f64,
}

fn nonlocal_sweep(cfg: &RunConfig) -> Result<Vec<RadialSolution>, Failure> {
    let plan = cfg.sweep_plan()?;
    let params = cfg.params()?;
    let opts = cfg.solver();
    let mut sols = Vec::new();
    for &e in &plan.eps_list {
        let p = params.with_eps(e);
        let mesh = cfg.mesh(&p)?;
        sols.push(
            solve(&p, &mesh, sinhlayer::Model::Nonlocal, &opts)
                .map_err(|err| fail(cfg, "solve", Error::Sweep { eps: e, source: Box::new(err) }))?,
        );
    }
    Ok(sols)
}

pub fn concentrate_cmd(cfg: &RunConfig) -> Result<Outcome, Failure> {
    let params = cfg.params()?;
    check_meshes(cfg)?;
    write_config(cfg)?;
    let variant = cfg.variant.unwrap();
    let b = solve_b(&params).map_err(|e| fail(cfg, "concentrate", e))?.abs();
    let mut windows = vec![Window::Full];
    windows.extend(cfg.window_p.as_ref().unwrap().iter().filter(|&&p| p > 0.0).map(|&p| Window::Layer { p }));
    let sols = nonlocal_sweep(cfg)?;
    let sign = params.a0.signum();
    let mut rows = Vec::new();
    for f in standard_f_suite() {
        for mode in [Mode::Gradient, Mode::Value] {
            for &window in &windows {
                let weight = if b == 0.0 {
                    0.0
                } else {
                    match window {
                        Window::Full => weight_full(&f, b, mode),
                        Window::Layer { p } => {
                            let k = sinhlayer::asymptotics::solve_k_of_p(&params, p, variant)
                                .map_err(|e| fail(cfg, "concentrate", e))?
                                .abs();
                            weight_window(&f, b, k, mode)
                        }
                    }
                    .map_err(|e| fail(cfg, "concentrate", e))?
                };
                for h in standard_h_suite(params.radius) {
                    // h(R) below round-off counts as zero
                    let hr = if h.at_boundary.abs() < 1e-12 { 0.0 } else { h.at_boundary };
                    let limit = weight * hr;
                    for s in &sols {
                        // u is odd in a0: pair the positive profile
                        let pos = if sign < 0.0 { flip(s) } else { s.clone() };
                        let pr =
                            empirical_pairing(&pos, &f, &h, mode, window).map_err(|e| fail(cfg, "concentrate", e))?;
                        if pr.under_resolved {
                            eprintln!("warning: {} under-resolved at eps = {}", f.name, s.params.eps);
                        }
                        let diff = (pr.value - limit).abs();
                        rows.push(ConcentrationRow {
                            f: f.name.clone(),
                            h: h.name.clone(),
                            mode: mode.name(),
                            window: window.label(),
                            eps: s.params.eps,
                            empirical: pr.value,
                            limit,
                            relerr: if limit == 0.0 { diff } else { diff / limit.abs() },
                        });
                    }
                }
            }
        }
    }
    let dir = cfg.out_dir();
    match cfg.format() {
        Format::Csv => {
            let mut t = Table::new(&["F", "h", "mode", "window", "eps", "empirical", "limit", "relerr"]);
            for r in &rows {
                t.row([
                    r.f.clone(),
                    r.h.clone(),
                    r.mode.to_string(),
                    r.window.clone(),
                    num(r.eps),
                    num(r.empirical),
                    num(r.limit),
                    num(r.relerr),
                ]);
            }
            t.write(&dir.join("concentration.csv"))?;
        }
        Format::Json => write_json(&dir.join("concentration.json"), &rows)?,
    }
    Ok(Outcome::Pass)
}

fn flip(s: &RadialSolution) -> RadialSolution {
    let mut t = s.clone();
    t.params = t.params.with_a0(-t.params.a0);
    t.u.iter_mut().for_each(|v| *v = -*v);
    t.du.iter_mut().for_each(|v| *v = -*v);
    t
}

pub fn dichotomy_cmd(cfg: &RunConfig) -> Result<Outcome, Failure> {
    cfg.sweep_plan()?;
    check_meshes(cfg)?;
    write_config(cfg)?;
    let sols = nonlocal_sweep(cfg)?;
    let report = dichotomy_check(&sols, cfg.variant.unwrap()).map_err(|e| fail(cfg, "dichotomy", e))?;
    write_json(&cfg.out_dir().join("dichotomy.json"), &report)?;
    Ok(if report.pass { Outcome::Pass } else { Outcome::Fail })
}
