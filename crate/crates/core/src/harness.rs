//! eps-sweeps against the closed-form asymptotics.

use serde::{Deserialize, Serialize};

use crate::asymptotics::{
    comparison_limits, dtn_two_term, expand_boundary, half_height, layer_expansion, local_model_expansions, solve_b,
    solve_k_of_p, DecayBound, LayerVariant,
};
use crate::error::{Error, Result};
use crate::fd::{lagrange, window};
use crate::mesh::{build_mesh, Grading};
use crate::params::{LayerPoint, ProblemParams};
use crate::roots::bisect;
use crate::solver::{solve, Model, RadialSolution, SolverOptions};
use crate::twoterm::TwoTerm;

/// Mesh used for every entry of a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeshPolicy {
    pub n_interior: usize,
    pub grading: Grading,
}

impl Default for MeshPolicy {
    fn default() -> Self {
        Self { n_interior: 4000, grading: Grading::default() }
    }
}

/// Pass thresholds of the sweep channels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Thresholds {
    /// Minimum order of the `eps^(3/2)` boundary channels.
    pub boundary_order: f64,
    /// Minimum order of the DtN channel.
    pub dtn_order: f64,
    /// Largest log-log residual accepted for the boundary fits.
    pub max_log_residual: f64,
    /// Final relative size of the vanishing layer channels.
    pub layer_rel: f64,
    /// Final relative distance of the limit channels.
    pub limit_rel: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self { boundary_order: 1.3, dtn_order: 0.4, max_log_residual: 0.2, layer_rel: 0.05, limit_rel: 0.02 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepPlan {
    pub base: ProblemParams,
    pub eps_list: Vec<f64>,
    pub mesh: MeshPolicy,
    pub variant: LayerVariant,
    /// Layer depths `p` probed by the pointwise channels.
    pub layer_p: Vec<f64>,
    pub thresholds: Thresholds,
    pub solver: SolverOptions,
}

impl SweepPlan {
    pub fn new(base: ProblemParams, eps_list: Vec<f64>) -> Self {
        Self {
            base,
            eps_list,
            mesh: MeshPolicy::default(),
            variant: LayerVariant::Consistent,
            layer_p: vec![0.0, 0.5, 1.0, 2.0],
            thresholds: Thresholds::default(),
            solver: SolverOptions::default(),
        }
    }

    /// N=2, R=1, gamma=1, a0=2 over `eps = 0.08 / 2^k`, k = 0..5.
    pub fn reference() -> Self {
        Self::new(ProblemParams::reference(0.08), reference_eps())
    }

    pub fn validate(&self) -> Result<()> {
        self.base.validate()?;
        if self.eps_list.len() < 4 {
            return Err(Error::InvalidParam {
                name: "eps_list",
                reason: format!("rate fits need at least 4 values, got {}", self.eps_list.len()),
            });
        }
        if self.eps_list.iter().any(|&e| !(e > 0.0) || !e.is_finite()) {
            return Err(Error::InvalidParam { name: "eps_list", reason: "values must be positive".into() });
        }
        if self.eps_list.windows(2).any(|w| !(w[1] < w[0])) {
            return Err(Error::InvalidParam { name: "eps_list", reason: "must be strictly decreasing".into() });
        }
        if self.layer_p.iter().any(|&p| !(p >= 0.0) || !p.is_finite()) {
            return Err(Error::InvalidParam { name: "layer_p", reason: "depths must be >= 0".into() });
        }
        Ok(())
    }
}

pub fn reference_eps() -> Vec<f64> {
    vec![0.08, 0.04, 0.02, 0.01, 0.005, 0.0025]
}

/// How a channel is judged.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ChannelKind {
    /// Error fitted as `eps^order`, order at least `min_order`.
    Order { min_order: f64, max_residual: Option<f64> },
    /// Error decreasing along the sweep and ending below `rel_tol * scale`.
    Vanishing { scale: f64, rel_tol: f64 },
    /// Value converging to `limit`: final distance at most `rel_tol * scale`,
    /// `scale >= |limit|`.
    Limit { limit: f64, scale: f64, rel_tol: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Channel {
    pub name: String,
    pub kind: ChannelKind,
    pub eps: Vec<f64>,
    /// Raw measured quantity.
    pub values: Vec<f64>,
    /// Distance from the target (for order/vanishing channels equal to `values`).
    pub errors: Vec<f64>,
    pub pass: bool,
    /// All errors below `1e-12`: nothing to fit.
    pub trivial: bool,
}

impl Channel {
    fn new(name: String, kind: ChannelKind, eps: Vec<f64>, values: Vec<f64>) -> Self {
        let errors: Vec<f64> = match kind {
            ChannelKind::Limit { limit, .. } => values.iter().map(|v| (v - limit).abs()).collect(),
            _ => values.iter().map(|v| v.abs()).collect(),
        };
        let trivial = errors.iter().all(|e| *e < 1e-12)
            && match kind {
                ChannelKind::Limit { limit, .. } => limit.abs() < 1e-12,
                _ => true,
            };
        let last = *errors.last().unwrap_or(&0.0);
        let pass = trivial
            || match kind {
                ChannelKind::Order { min_order, max_residual } => fit_rate(&eps, &errors)
                    .map(|f| f.slope >= min_order && max_residual.is_none_or(|m| f.max_residual <= m))
                    .unwrap_or(false),
                ChannelKind::Vanishing { scale, rel_tol } => {
                    errors.windows(2).all(|w| w[1] < w[0]) && last <= rel_tol * scale.abs()
                }
                ChannelKind::Limit { scale, rel_tol, .. } => last <= rel_tol * scale.abs(),
            };
        Self { name, kind, eps, values, errors, pass, trivial }
    }

    /// Relative size of the last error against the channel's reference scale.
    pub fn final_relative(&self) -> Option<f64> {
        let last = *self.errors.last()?;
        match self.kind {
            ChannelKind::Vanishing { scale, .. } => Some(last / scale.abs()),
            ChannelKind::Limit { scale, .. } => Some(last / scale.abs()),
            ChannelKind::Order { .. } => None,
        }
    }
}

/// Least-squares fit of `log error = intercept + slope log eps`.
///
/// The fit fields are `None` when some error is zero (trivial channels).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub channel: String,
    pub slope: Option<f64>,
    pub intercept: Option<f64>,
    pub max_residual: Option<f64>,
    /// Slope after dropping the largest `eps`.
    pub slope_without_largest: Option<f64>,
    pub min_order: f64,
    pub pass: bool,
    pub trivial: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub max_residual: f64,
}

/// Fit a line to `(ln eps, ln err)`. `None` when any error is not positive.
pub fn fit_rate(eps: &[f64], err: &[f64]) -> Option<LineFit> {
    if eps.len() < 2 || eps.len() != err.len() || err.iter().any(|e| !(*e > 0.0) || !e.is_finite()) {
        return None;
    }
    let x: Vec<f64> = eps.iter().map(|e| e.ln()).collect();
    let y: Vec<f64> = err.iter().map(|e| e.ln()).collect();
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let max_residual = x.iter().zip(&y).map(|(a, b)| (b - intercept - slope * a).abs()).fold(0.0, f64::max);
    Some(LineFit { slope, intercept, max_residual })
}

fn rate_fit(ch: &Channel) -> Option<RateFit> {
    let ChannelKind::Order { min_order, .. } = ch.kind else {
        return None;
    };
    let fit = fit_rate(&ch.eps, &ch.errors);
    let drop = if ch.eps.len() > 4 { fit_rate(&ch.eps[1..], &ch.errors[1..]).map(|f| f.slope) } else { None };
    Some(RateFit {
        channel: ch.name.clone(),
        slope: fit.map(|f| f.slope),
        intercept: fit.map(|f| f.intercept),
        max_residual: fit.map(|f| f.max_residual),
        slope_without_largest: drop,
        min_order,
        pass: ch.pass,
        trivial: ch.trivial,
    })
}

/// Solution value and slope at an arbitrary radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointValue {
    pub r: f64,
    pub u: f64,
    pub du: f64,
    /// `|cubic - quintic|` for `u` and `u'`.
    pub u_err: f64,
    pub du_err: f64,
}

fn interp(nodes: &[f64], vals: &[f64], r: f64, j: usize, n: usize) -> f64 {
    let w = window(j, n, nodes.len());
    lagrange(r, &nodes[w.clone()]).iter().zip(&vals[w]).map(|(a, b)| a * b).sum()
}

/// Cubic interpolation of `u` and `u'` at radius `r`.
pub fn interpolate_radius(sol: &RadialSolution, r: f64) -> Result<PointValue> {
    let nodes = &sol.mesh.nodes;
    let radius = sol.params.radius;
    if !(0.0..=radius).contains(&r) {
        return Err(Error::Extrapolation { r, radius });
    }
    if let Ok(j) = nodes.binary_search_by(|x| x.total_cmp(&r)) {
        return Ok(PointValue { r, u: sol.u[j], du: sol.du[j], u_err: 0.0, du_err: 0.0 });
    }
    let j = sol.mesh.locate(r);
    let u = interp(nodes, &sol.u, r, j, 4);
    let du = interp(nodes, &sol.du, r, j, 4);
    let u5 = interp(nodes, &sol.u, r, j, 6);
    let du5 = interp(nodes, &sol.du, r, j, 6);
    Ok(PointValue { r, u, du, u_err: (u - u5).abs(), du_err: (du - du5).abs() })
}

/// Interpolated `u`, `u'` at the layer point `R - p eps - (q/R) eps^2`.
pub fn interpolate_at(sol: &RadialSolution, pt: &LayerPoint) -> Result<PointValue> {
    let r = pt.radius(&sol.params);
    interpolate_radius(sol, r)
}

/// Radius where `u` is half-way between `u(R)` and `b`.
pub fn half_height_point(sol: &RadialSolution) -> Result<PointValue> {
    let b = solve_b(&sol.params)?;
    let m = sol.u.len() - 1;
    let ur = sol.u[m];
    if b == 0.0 || ur == b {
        return Err(Error::Precondition("no layer: u(R) equals its limit".into()));
    }
    let target = 0.5 * (ur + b);
    let above = ur > b;
    let below = |v: f64| if above { v < target } else { v > target };
    let lo = (0..m)
        .rev()
        .find(|&j| below(sol.u[j]))
        .ok_or_else(|| Error::Precondition("half-height level not crossed on the mesh".into()))?;
    let nodes = &sol.mesh.nodes;
    let r = bisect(
        |r| {
            let j = sol.mesh.locate(r);
            interp(nodes, &sol.u, r, j, 4) - target
        },
        nodes[lo],
        nodes[m],
        200,
    )?;
    interpolate_radius(sol, r)
}

/// Nonlocal and local solutions at one `eps`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepEntry {
    pub eps: f64,
    pub u: RadialSolution,
    pub v: RadialSolution,
}

fn solve_entry(plan: &SweepPlan, eps: f64) -> Result<SweepEntry> {
    let p = plan.base.with_eps(eps);
    let wrap = |e: Error| Error::Sweep { eps, source: Box::new(e) };
    let mesh = build_mesh(&p, plan.mesh.n_interior, plan.mesh.grading).map_err(wrap)?;
    let u = solve(&p, &mesh, Model::Nonlocal, &plan.solver).map_err(wrap)?;
    let v = solve(&p, &mesh, Model::Local, &plan.solver).map_err(wrap)?;
    Ok(SweepEntry { eps, u, v })
}

/// Solve every entry of the plan; entries are independent and may run in parallel.
pub fn solve_sweep(plan: &SweepPlan) -> Result<Vec<SweepEntry>> {
    plan.validate()?;
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        plan.eps_list.par_iter().map(|&e| solve_entry(plan, e)).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        plan.eps_list.iter().map(|&e| solve_entry(plan, e)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub plan: SweepPlan,
    pub channels: Vec<Channel>,
    pub fits: Vec<RateFit>,
    pub trivial: bool,
    pub pass: bool,
}

impl SweepReport {
    pub fn channel(&self, name: &str) -> Option<&Channel> {
        self.channels.iter().find(|c| c.name == name)
    }

    pub fn fit(&self, name: &str) -> Option<&RateFit> {
        self.fits.iter().find(|c| c.channel == name)
    }
}

pub fn run_sweep(plan: &SweepPlan) -> Result<SweepReport> {
    let entries = solve_sweep(plan)?;
    analyze_sweep(plan, &entries)
}

/// Name of the pointwise layer channel for `u` at `(p, q)`.
pub fn layer_channel(prefix: &str, p: f64, q_star: bool) -> String {
    format!("{prefix}(p={p},q={})", if q_star { "q*" } else { "0" })
}

/// Channel errors from already computed solutions.
pub fn analyze_sweep(plan: &SweepPlan, entries: &[SweepEntry]) -> Result<SweepReport> {
    plan.validate()?;
    let th = plan.thresholds;
    let variant = plan.variant;
    let eps: Vec<f64> = entries.iter().map(|e| e.eps).collect();
    let base = plan.base;
    let mut channels = Vec::new();
    let order = |m| ChannelKind::Order { min_order: m, max_residual: Some(th.max_log_residual) };

    // boundary channels
    let mut rows: Vec<[f64; 6]> = Vec::new();
    for e in entries {
        let p = base.with_eps(e.eps);
        let bnd = expand_boundary(&p)?;
        let loc = local_model_expansions(&p, &LayerPoint::BOUNDARY, variant)?;
        let m = e.u.u.len() - 1;
        let (ur, dur) = (e.u.u[m], e.u.du[m]);
        let (vr, dvr) = (e.v.u[m], e.v.du[m]);
        let dtn = if bnd.b == 0.0 {
            0.0
        } else {
            let sign = p.a0.signum();
            let arg = TwoTerm::from_value(sign * bnd.b, sign * ur, e.eps, 0);
            dur - sign * dtn_two_term(&p, arg)?.value(e.eps)
        };
        rows.push([
            e.u.c - bnd.c2.value(e.eps),
            ur - bnd.u_r.value(e.eps),
            e.eps * (dur - bnd.du_r.value(e.eps)),
            dtn,
            vr - loc.v_r.value(e.eps),
            e.eps * (dvr - loc.dv_r.value(e.eps)),
        ]);
    }
    let col = |k: usize| rows.iter().map(|r| r[k]).collect::<Vec<f64>>();
    channels.push(Channel::new("C-c2".into(), order(th.boundary_order), eps.clone(), col(0)));
    channels.push(Channel::new("uR-uR2".into(), order(th.boundary_order), eps.clone(), col(1)));
    channels.push(Channel::new("eps*(duR-duR2)".into(), order(th.boundary_order), eps.clone(), col(2)));
    channels.push(Channel::new(
        "duR-dtn".into(),
        ChannelKind::Order { min_order: th.dtn_order, max_residual: None },
        eps.clone(),
        col(3),
    ));
    channels.push(Channel::new("vR-vR2".into(), order(th.boundary_order), eps.clone(), col(4)));
    channels.push(Channel::new("eps*(dvR-dvR2)".into(), order(th.boundary_order), eps.clone(), col(5)));

    // pointwise layer channels
    let q_star = half_height(&base, variant)?.q_star;
    for &pp in &plan.layer_p {
        let k = solve_k_of_p(&base, pp, variant)?.abs();
        let scale_u = k;
        let scale_du = 2.0 * (0.5 * k).sinh();
        for use_q in [false, true] {
            let pt = LayerPoint::new(pp, if use_q { q_star } else { 0.0 })?;
            let mut cols = [Vec::new(), Vec::new(), Vec::new(), Vec::new()];
            for e in entries {
                let p = base.with_eps(e.eps);
                let lay = layer_expansion(&p, &pt, variant)?;
                let loc = local_model_expansions(&p, &pt, variant)?;
                let uu = interpolate_at(&e.u, &pt)?;
                let vv = interpolate_at(&e.v, &pt)?;
                cols[0].push((uu.u - lay.u.value(e.eps)) / e.eps);
                cols[1].push(uu.du - lay.du.value(e.eps));
                cols[2].push((vv.u - loc.v_layer.value(e.eps)) / e.eps);
                cols[3].push(vv.du - loc.dv_layer.value(e.eps));
            }
            let [cu, cdu, cv, cdv] = cols;
            let van = |s: f64| ChannelKind::Vanishing { scale: s, rel_tol: th.layer_rel };
            channels.push(Channel::new(layer_channel("u_layer", pp, use_q), van(scale_u), eps.clone(), cu));
            channels.push(Channel::new(layer_channel("du_layer", pp, use_q), van(scale_du), eps.clone(), cdu));
            channels.push(Channel::new(layer_channel("v_layer", pp, use_q), van(scale_u), eps.clone(), cv));
            channels.push(Channel::new(layer_channel("dv_layer", pp, use_q), van(scale_du), eps.clone(), cdv));
        }
    }

    // uniformity over a dense p grid
    let grid: Vec<f64> = (0..=20).map(|i| 0.1 * i as f64).collect();
    let mut worst = Vec::new();
    for e in entries {
        let p = base.with_eps(e.eps);
        let mut w = 0.0f64;
        for &pp in &grid {
            let pt = LayerPoint::new(pp, 0.0)?;
            let lay = layer_expansion(&p, &pt, variant)?;
            let uu = interpolate_at(&e.u, &pt)?;
            w = w.max(((uu.u - lay.u.value(e.eps)) / e.eps).abs());
        }
        worst.push(w);
    }
    let b = solve_b(&base)?.abs();
    channels.push(Channel::new(
        "max_p u_layer".into(),
        ChannelKind::Vanishing { scale: b, rel_tol: th.layer_rel },
        eps.clone(),
        worst,
    ));

    // nonlocal minus local
    let lim0 = comparison_limits(&base, &LayerPoint::BOUNDARY, variant)?;
    // a layer limit may pass through zero; measure it against the O(1) boundary gap
    let lim = |l: f64, reference: f64| ChannelKind::Limit {
        limit: l,
        scale: l.abs().max(reference.abs()),
        rel_tol: th.limit_rel,
    };
    let gap_value: Vec<f64> =
        entries.iter().map(|e| (e.u.u[e.u.u.len() - 1] - e.v.u[e.v.u.len() - 1]) / e.eps).collect();
    let gap_slope: Vec<f64> = entries.iter().map(|e| e.u.du[e.u.du.len() - 1] - e.v.du[e.v.du.len() - 1]).collect();
    channels.push(Channel::new("(uR-vR)/eps".into(), lim(lim0.boundary_value, 0.0), eps.clone(), gap_value));
    channels.push(Channel::new("duR-dvR".into(), lim(lim0.boundary_slope, 0.0), eps.clone(), gap_slope));
    for &pp in plan.layer_p.iter().filter(|&&p| p > 0.0) {
        let pt = LayerPoint::new(pp, 0.0)?;
        let l = comparison_limits(&base, &pt, variant)?;
        let mut gv = Vec::new();
        let mut gs = Vec::new();
        for e in entries {
            let uu = interpolate_at(&e.u, &pt)?;
            let vv = interpolate_at(&e.v, &pt)?;
            gv.push((uu.u - vv.u) / e.eps);
            gs.push(uu.du - vv.du);
        }
        channels.push(Channel::new(
            format!("(u-v)/eps(p={pp})"),
            lim(l.layer_value, lim0.boundary_value),
            eps.clone(),
            gv,
        ));
        channels.push(Channel::new(format!("du-dv(p={pp})"), lim(l.layer_slope, lim0.boundary_slope), eps.clone(), gs));
    }

    let fits: Vec<RateFit> = channels.iter().filter_map(rate_fit).collect();
    let trivial = base.is_trivial();
    let pass = channels.iter().all(|c| c.pass);
    Ok(SweepReport { plan: plan.clone(), channels, fits, trivial, pass })
}

/// Evidence for the layer dichotomy at `R - c eps` and at `R - sqrt(eps)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DichotomyReport {
    pub trivial: bool,
    pub eps: Vec<f64>,
    pub inside: Vec<DichotomyInside>,
    pub outside: DichotomyOutside,
    pub pass: bool,
}

/// `u` and `eps u'` at `R - c eps` stay above positive floors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DichotomyInside {
    pub c: f64,
    pub floor_u: f64,
    pub floor_du: f64,
    pub u: Vec<f64>,
    pub eps_du: Vec<f64>,
    pub pass: bool,
}

/// `u` and `eps u'` at `R - sqrt(eps)` decrease below ceilings tending to 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DichotomyOutside {
    pub u: Vec<f64>,
    pub eps_du: Vec<f64>,
    pub ceiling_u: Vec<f64>,
    pub ceiling_du: Vec<f64>,
    pub pass: bool,
}

/// Depths `c` probed inside the layer.
pub const DICHOTOMY_DEPTHS: [f64; 3] = [0.5, 1.0, 2.0];

pub fn dichotomy_check(sols: &[RadialSolution], variant: LayerVariant) -> Result<DichotomyReport> {
    if sols.len() < 4 {
        return Err(Error::InvalidParam {
            name: "sols",
            reason: format!("need at least 4 solutions, got {}", sols.len()),
        });
    }
    let base = sols[0].params;
    let eps: Vec<f64> = sols.iter().map(|s| s.params.eps).collect();
    let sign = if base.a0 < 0.0 { -1.0 } else { 1.0 };
    if base.is_trivial() {
        let z = vec![0.0; sols.len()];
        return Ok(DichotomyReport {
            trivial: true,
            eps,
            inside: Vec::new(),
            outside: DichotomyOutside {
                u: z.clone(),
                eps_du: z.clone(),
                ceiling_u: z.clone(),
                ceiling_du: z,
                pass: true,
            },
            pass: true,
        });
    }
    let mut inside = Vec::new();
    for c in DICHOTOMY_DEPTHS {
        let k = solve_k_of_p(&base, c, variant)?.abs();
        let floor_u = 0.5 * k;
        let floor_du = 0.5 * 2.0 * (0.5 * k).sinh();
        let mut u = Vec::new();
        let mut du = Vec::new();
        for s in sols {
            let pv = interpolate_radius(s, s.params.radius - c * s.params.eps)?;
            u.push(sign * pv.u);
            du.push(sign * s.params.eps * pv.du);
        }
        let pass = u.iter().all(|&x| x > floor_u) && du.iter().all(|&x| x > floor_du);
        inside.push(DichotomyInside { c, floor_u, floor_du, u, eps_du: du, pass });
    }
    let mut out = DichotomyOutside { u: vec![], eps_du: vec![], ceiling_u: vec![], ceiling_du: vec![], pass: true };
    for s in sols {
        let p = &s.params;
        let r = p.radius - p.eps.sqrt();
        if r < 0.0 {
            return Err(Error::Domain(format!("R - sqrt(eps) < 0 at eps = {}", p.eps)));
        }
        let pv = interpolate_radius(s, r)?;
        let env = DecayBound::new(p).at(p, r)?;
        out.u.push(sign * pv.u);
        out.eps_du.push(sign * p.eps * pv.du);
        out.ceiling_u.push(env);
        out.ceiling_du.push(env / p.gamma);
    }
    let decreasing = |v: &[f64]| v.windows(2).all(|w| w[1] < w[0]);
    out.pass = decreasing(&out.u)
        && decreasing(&out.eps_du)
        && decreasing(&out.ceiling_u)
        && out.u.iter().zip(&out.ceiling_u).all(|(a, b)| a.abs() <= *b)
        && out.eps_du.iter().zip(&out.ceiling_du).all(|(a, b)| a.abs() <= *b);
    let pass = out.pass && inside.iter().all(|r| r.pass);
    Ok(DichotomyReport { trivial: false, eps, inside, outside: out, pass })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::solve_nonlocal;

    #[test]
    fn line_fit_recovers_power_law() {
        let eps = [0.1, 0.05, 0.025, 0.0125];
        let err: Vec<f64> = eps.iter().map(|e: &f64| 3.0 * e.powf(1.5)).collect();
        let f = fit_rate(&eps, &err).unwrap();
        assert!((f.slope - 1.5).abs() < 1e-12);
        assert!((f.intercept - 3f64.ln()).abs() < 1e-12);
        assert!(f.max_residual < 1e-12);
        assert!(fit_rate(&eps, &[1.0, 0.0, 1.0, 1.0]).is_none());
    }

    #[test]
    fn plan_validation() {
        let mut plan = SweepPlan::reference();
        assert!(plan.validate().is_ok());
        plan.eps_list = vec![0.1, 0.05, 0.05, 0.01];
        assert!(plan.validate().is_err());
        plan.eps_list = vec![0.1, 0.05, 0.01];
        assert!(plan.validate().is_err());
    }

    #[test]
    fn interpolation_at_boundary_is_node_value() {
        let p = ProblemParams::reference(0.02);
        let m = build_mesh(&p, 800, Grading::default()).unwrap();
        let s = solve_nonlocal(&p, &m, &SolverOptions::default()).unwrap();
        let v = interpolate_at(&s, &LayerPoint::BOUNDARY).unwrap();
        assert_eq!((v.u, v.du), (s.u[800], s.du[800]));
        assert!(interpolate_radius(&s, 1.01).is_err());
        assert!(interpolate_radius(&s, -0.01).is_err());
    }

    #[test]
    fn interpolated_slope_within_estimate_at_nodes() {
        let p = ProblemParams::reference(0.02);
        let m = build_mesh(&p, 800, Grading::default()).unwrap();
        let s = solve_nonlocal(&p, &m, &SolverOptions::default()).unwrap();
        for j in [300, 500, 700, 790] {
            let mid = 0.5 * (m.nodes[j] + m.nodes[j + 1]);
            let v = interpolate_radius(&s, mid).unwrap();
            let left = interpolate_radius(&s, m.nodes[j]).unwrap();
            assert_eq!(left.du, s.du[j]);
            assert!(v.u_err < 1e-6 && v.du_err < 1e-3);
        }
    }
}
