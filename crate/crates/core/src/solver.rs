//! Newton solver for the radial boundary-value problem
//!
//! ```text
//! eps^2 (u'' + (N-1)/r u') = C sinh u,   u'(0) = 0,   u(R) + gamma eps u'(R) = a0
//! ```
//!
//! with `C = 1` (local model) or `C = (N/R^N int_0^R s^(N-1) cosh u ds)^-1`
//! (nonlocal model, carried as an extra Newton unknown).

use serde::{Deserialize, Serialize};

use crate::asymptotics::{expand_boundary, solve_b};
use crate::banded::{BandLu, BandMatrix};
use crate::error::{Error, Result};
use crate::fd::fornberg;
use crate::mesh::{build_mesh, Mesh};
use crate::params::ProblemParams;
use crate::quadrature::NodalQuadrature;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Nonlocal,
    Local,
}

impl Model {
    pub fn name(&self) -> &'static str {
        match self {
            Model::Nonlocal => "nonlocal",
            Model::Local => "local",
        }
    }
}

impl std::str::FromStr for Model {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "nonlocal" => Ok(Model::Nonlocal),
            "local" => Ok(Model::Local),
            _ => Err(format!("unknown model `{s}` (expected nonlocal|local)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverOptions {
    /// Residual tolerance, multiplied by `max(1, |a0|)`.
    pub tol_residual: f64,
    /// Max-norm tolerance on the last Newton update.
    pub tol_step: f64,
    pub max_iters: usize,
    pub max_halvings: usize,
    /// Fall back to continuation in `eps` when the direct solve fails.
    pub continuation: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { tol_residual: 1e-10, tol_step: 1e-12, max_iters: 60, max_halvings: 30, continuation: true }
    }
}

impl SolverOptions {
    pub fn residual_tolerance(&self, params: &ProblemParams) -> f64 {
        self.tol_residual * params.a0.abs().max(1.0)
    }
}

/// Converged nodal solution and its diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialSolution {
    pub params: ProblemParams,
    pub mesh: Mesh,
    pub u: Vec<f64>,
    pub du: Vec<f64>,
    pub c: f64,
    pub newton_iters: usize,
    pub residual_norm: f64,
    pub tolerance: f64,
    pub model: Model,
}

impl RadialSolution {
    pub fn converged(&self) -> bool {
        self.residual_norm <= self.tolerance
    }

    pub fn energy(&self) -> f64 {
        energy(&self.params, &self.mesh, &self.u)
    }

    /// `u(R) + gamma eps u'(R) - a0`
    pub fn robin_residual(&self) -> f64 {
        let m = self.u.len() - 1;
        self.u[m] + self.params.gamma * self.params.eps * self.du[m] - self.params.a0
    }
}

/// One row of the discrete operator: sparse first/second derivative weights.
#[derive(Debug, Clone)]
struct Row {
    cols: Vec<usize>,
    d1: Vec<f64>,
    d2: Vec<f64>,
}

impl Row {
    fn from_points(z: f64, xs: &[f64], map: &[usize]) -> Self {
        let w = fornberg(z, xs, 2);
        let mut cols: Vec<usize> = Vec::new();
        let mut d1 = Vec::new();
        let mut d2 = Vec::new();
        for (k, &c) in map.iter().enumerate() {
            match cols.iter().position(|&x| x == c) {
                Some(i) => {
                    d1[i] += w[1][k];
                    d2[i] += w[2][k];
                }
                None => {
                    cols.push(c);
                    d1.push(w[1][k]);
                    d2.push(w[2][k]);
                }
            }
        }
        Row { cols, d1, d2 }
    }

    fn apply(&self, w: &[f64], u: &[f64]) -> f64 {
        self.cols.iter().zip(w).map(|(&c, w)| w * u[c]).sum()
    }
}

/// Discretisation of the radial operator on a fixed mesh.
#[derive(Debug, Clone)]
struct Operator {
    rows: Vec<Row>,
    /// `(N/R^N) w_j r_j^(N-1)`
    mass: Vec<f64>,
}

const KL: usize = 4;
const KU: usize = 2;

impl Operator {
    fn new(params: &ProblemParams, mesh: &Mesh) -> Result<Self> {
        let r = &mesh.nodes;
        let m = r.len() - 1;
        if m < 8 {
            return Err(Error::Domain(format!("mesh too small for the stencils ({m} intervals)")));
        }
        let mut rows = Vec::with_capacity(m + 1);
        // even reflection through the origin closes the two innermost rows
        rows.push(Row::from_points(0.0, &[-r[2], -r[1], 0.0, r[1], r[2]], &[2, 1, 0, 1, 2]));
        rows.push(Row::from_points(r[1], &[-r[1], 0.0, r[1], r[2], r[3]], &[1, 0, 1, 2, 3]));
        for j in 2..m - 1 {
            rows.push(Row::from_points(r[j], &r[j - 2..=j + 2], &[j - 2, j - 1, j, j + 1, j + 2]));
        }
        let tail: Vec<usize> = (m - 5..=m).collect();
        rows.push(Row::from_points(r[m - 1], &r[m - 5..=m], &tail));
        let robin: Vec<usize> = (m - 4..=m).collect();
        rows.push(Row::from_points(r[m], &r[m - 4..=m], &robin));
        let quad = NodalQuadrature::new(r);
        let scale = params.dim / params.radius.powf(params.dim);
        let mass = quad.weights().iter().zip(r).map(|(w, &x)| scale * w * x.powf(params.dim - 1.0)).collect();
        Ok(Self { rows, mass })
    }

    fn len(&self) -> usize {
        self.rows.len()
    }

    /// `(N/R^N) int r^(N-1) (cosh u - 1) dr`
    fn excess(&self, u: &[f64]) -> f64 {
        self.mass.iter().zip(u).map(|(m, &v)| m * (v.cosh() - 1.0)).sum()
    }

    fn coefficient(&self, u: &[f64]) -> f64 {
        1.0 / (1.0 + self.excess(u))
    }

    /// Residual of the differential rows for a given `C`.
    fn residual(&self, p: &ProblemParams, nodes: &[f64], u: &[f64], c: f64) -> Vec<f64> {
        let m = self.len() - 1;
        let e2 = p.eps * p.eps;
        let mut f = Vec::with_capacity(m + 1);
        for (j, row) in self.rows.iter().enumerate().take(m) {
            let lap = if j == 0 {
                p.dim * row.apply(&row.d2, u)
            } else {
                row.apply(&row.d2, u) + (p.dim - 1.0) / nodes[j] * row.apply(&row.d1, u)
            };
            f.push(e2 * lap - c * u[j].sinh());
        }
        let row = &self.rows[m];
        f.push(u[m] + p.gamma * p.eps * row.apply(&row.d1, u) - p.a0);
        f
    }

    fn jacobian(&self, p: &ProblemParams, nodes: &[f64], u: &[f64], c: f64) -> Option<BandLu> {
        let m = self.len() - 1;
        let e2 = p.eps * p.eps;
        let mut a = BandMatrix::zeros(m + 1, KL, KU);
        for (j, row) in self.rows.iter().enumerate() {
            for (k, &col) in row.cols.iter().enumerate() {
                let v = if j == m {
                    p.gamma * p.eps * row.d1[k]
                } else if j == 0 {
                    e2 * p.dim * row.d2[k]
                } else {
                    e2 * (row.d2[k] + (p.dim - 1.0) / nodes[j] * row.d1[k])
                };
                a.add(j, col, v);
            }
            if j < m {
                a.add(j, j, -c * u[j].cosh());
            } else {
                a.add(j, j, 1.0);
            }
        }
        a.factor()
    }
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |a, x| a.max(x.abs()))
}

/// Coupling of the coefficient `C` during a Newton solve.
#[derive(Debug, Clone, Copy)]
enum Coupling {
    /// `C` is an unknown tied to its defining integral.
    Full,
    /// `C` is held at the given value.
    Fixed(f64),
}

struct NewtonOutcome {
    u: Vec<f64>,
    c: f64,
    iters: usize,
    residual: f64,
}

fn merit(
    op: &Operator,
    p: &ProblemParams,
    nodes: &[f64],
    u: &[f64],
    c: f64,
    coupling: Coupling,
) -> (Vec<f64>, f64, f64) {
    let f = op.residual(p, nodes, u, c);
    let g = match coupling {
        Coupling::Full => c * (1.0 + op.excess(u)) - 1.0,
        Coupling::Fixed(_) => 0.0,
    };
    let norm = inf_norm(&f).max(g.abs());
    (f, g, norm)
}

fn newton(
    op: &Operator,
    p: &ProblemParams,
    nodes: &[f64],
    mut u: Vec<f64>,
    c0: f64,
    coupling: Coupling,
    opts: &SolverOptions,
    tol: f64,
) -> Result<NewtonOutcome> {
    let mut c = match coupling {
        Coupling::Full => c0,
        Coupling::Fixed(c) => c,
    };
    let (mut f, mut g, mut norm) = merit(op, p, nodes, &u, c, coupling);
    let m = u.len() - 1;
    for it in 0..opts.max_iters {
        if !norm.is_finite() {
            break;
        }
        if norm == 0.0 {
            return Ok(NewtonOutcome { u, c, iters: it, residual: norm });
        }
        let lu = op.jacobian(p, nodes, &u, c).ok_or(Error::Divergence { iters: it, residual: norm })?;
        let neg_f: Vec<f64> = f.iter().map(|v| -v).collect();
        let x1 = lu.solve(&neg_f);
        let (du, dc) = match coupling {
            Coupling::Fixed(_) => (x1, 0.0),
            Coupling::Full => {
                // bordered system: J du + j_c dc = -F, gv . du + g_c dc = -G
                let mut jc: Vec<f64> = u.iter().map(|v| -v.sinh()).collect();
                jc[m] = 0.0;
                let x2 = lu.solve(&jc);
                let gv: Vec<f64> = op.mass.iter().zip(&u).map(|(w, v)| c * w * v.sinh()).collect();
                let gc = 1.0 + op.excess(&u);
                let gx1: f64 = gv.iter().zip(&x1).map(|(a, b)| a * b).sum();
                let gx2: f64 = gv.iter().zip(&x2).map(|(a, b)| a * b).sum();
                let dc = (-g - gx1) / (gc - gx2);
                let du = x1.iter().zip(&x2).map(|(a, b)| a - dc * b).collect();
                (du, dc)
            }
        };
        let step = inf_norm(&du).max(dc.abs());
        let mut lambda = 1.0;
        let mut accepted = None;
        for _ in 0..=opts.max_halvings {
            let ut: Vec<f64> = u.iter().zip(&du).map(|(a, b)| a + lambda * b).collect();
            let ct = c + lambda * dc;
            let (ft, gt, nt) = merit(op, p, nodes, &ut, ct, coupling);
            if nt.is_finite() && (nt <= (1.0 - 1e-4 * lambda) * norm || nt <= 0.5 * tol) {
                accepted = Some((ut, ct, ft, gt, nt));
                break;
            }
            lambda *= 0.5;
        }
        match accepted {
            Some((ut, ct, ft, gt, nt)) => {
                u = ut;
                c = ct;
                f = ft;
                g = gt;
                norm = nt;
                if norm <= tol && lambda * step <= opts.tol_step {
                    return Ok(NewtonOutcome { u, c, iters: it + 1, residual: norm });
                }
            }
            None => {
                // no decrease possible: either converged to round-off or stuck
                if norm <= tol {
                    return Ok(NewtonOutcome { u, c, iters: it + 1, residual: norm });
                }
                return Err(Error::Divergence { iters: it + 1, residual: norm });
            }
        }
    }
    if norm <= tol {
        return Ok(NewtonOutcome { u, c, iters: opts.max_iters, residual: norm });
    }
    Err(Error::Divergence { iters: opts.max_iters, residual: norm })
}

/// Leading-order layer profile used as the Newton starting point.
fn initial_guess(p: &ProblemParams, nodes: &[f64]) -> Result<(Vec<f64>, f64)> {
    let b = solve_b(p)?;
    let t = (0.25 * b).tanh();
    let u = nodes.iter().map(|&r| 4.0 * (t * (-(p.radius - r) / p.eps).exp()).atanh()).collect();
    let c2 = expand_boundary(p)?.c2.value(p.eps);
    let c = c2.clamp(1.0 / p.a0.cosh(), 1.0);
    Ok((u, c))
}

/// Linear interpolation of `(xs, ys)` at `x` (clamped).
fn interp_linear(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    let i = xs.partition_point(|&t| t <= x);
    if i == 0 {
        return ys[0];
    }
    if i >= xs.len() {
        return ys[ys.len() - 1];
    }
    let (x0, x1) = (xs[i - 1], xs[i]);
    ys[i - 1] + (ys[i] - ys[i - 1]) * (x - x0) / (x1 - x0)
}

fn solve_with_guess(
    p: &ProblemParams,
    mesh: &Mesh,
    op: &Operator,
    model: Model,
    opts: &SolverOptions,
    u0: Vec<f64>,
    c0: f64,
) -> Result<NewtonOutcome> {
    let tol = opts.residual_tolerance(p);
    let coupling = match model {
        Model::Nonlocal => Coupling::Full,
        Model::Local => Coupling::Fixed(1.0),
    };
    newton(op, p, &mesh.nodes, u0, c0, coupling, opts, tol)
}

/// Continuation in `eps`: solve on a coarser-eps chain and step down.
fn continuation(
    p: &ProblemParams,
    mesh: &Mesh,
    op: &Operator,
    model: Model,
    opts: &SolverOptions,
) -> Result<NewtonOutcome> {
    let n = mesh.nodes.len() - 1;
    let mut chain = vec![p.eps];
    while *chain.last().unwrap() < 0.25 * p.radius && chain.len() < 40 {
        let e = chain.last().unwrap() * 2.0;
        chain.push(e);
    }
    chain.reverse();
    let mut prev: Option<(Vec<f64>, Vec<f64>, f64, f64)> = None; // nodes, u, c, eps
    for (i, &e) in chain.iter().enumerate() {
        let pe = p.with_eps(e);
        let last = i + 1 == chain.len();
        let (me, ope) = if last {
            (mesh.clone(), op.clone())
        } else {
            let me = build_mesh(&pe, n, mesh.grading)?;
            let ope = Operator::new(&pe, &me)?;
            (me, ope)
        };
        let (u0, c0) = match &prev {
            None => initial_guess(&pe, &me.nodes)?,
            Some((xs, ys, c, ep)) => {
                let ratio = ep / e;
                let u0 = me
                    .nodes
                    .iter()
                    .map(|&r| interp_linear(xs, ys, (pe.radius - (pe.radius - r) * ratio).max(0.0)))
                    .collect();
                (u0, *c)
            }
        };
        let out = solve_with_guess(&pe, &me, &ope, model, opts, u0, c0)?;
        if last {
            return Ok(out);
        }
        prev = Some((me.nodes.clone(), out.u, out.c, e));
    }
    unreachable!("continuation chain always ends at the target eps")
}

fn finish(
    p: &ProblemParams,
    mesh: &Mesh,
    model: Model,
    opts: &SolverOptions,
    out: NewtonOutcome,
    sign: f64,
) -> RadialSolution {
    let u: Vec<f64> = out.u.iter().map(|v| sign * v).collect();
    let du = derivative_on(&mesh.nodes, &u);
    RadialSolution {
        params: *p,
        mesh: mesh.clone(),
        u,
        du,
        c: out.c,
        newton_iters: out.iters,
        residual_norm: out.residual,
        tolerance: opts.residual_tolerance(p),
        model,
    }
}

/// Solve the nonlocal or local problem on `mesh`.
pub fn solve(params: &ProblemParams, mesh: &Mesh, model: Model, opts: &SolverOptions) -> Result<RadialSolution> {
    params.validate()?;
    check_mesh(params, mesh)?;
    // the equation is odd in u: solve with |a0| and flip
    let sign = if params.a0 < 0.0 { -1.0 } else { 1.0 };
    let p = params.positive();
    let op = Operator::new(&p, mesh)?;
    let (u0, c0) = initial_guess(&p, &mesh.nodes)?;
    let out = match solve_with_guess(&p, mesh, &op, model, opts, u0, c0) {
        Ok(out) => out,
        Err(e) if opts.continuation => continuation(&p, mesh, &op, model, opts).map_err(|_| e)?,
        Err(e) => return Err(e),
    };
    Ok(finish(params, mesh, model, opts, out, sign))
}

pub fn solve_nonlocal(params: &ProblemParams, mesh: &Mesh, opts: &SolverOptions) -> Result<RadialSolution> {
    solve(params, mesh, Model::Nonlocal, opts)
}

pub fn solve_local(params: &ProblemParams, mesh: &Mesh, opts: &SolverOptions) -> Result<RadialSolution> {
    solve(params, mesh, Model::Local, opts)
}

/// Nonlocal solve by fixed-point iteration on `C`, each step a local
/// Newton solve with `C` frozen. Slower; kept as an independent check.
pub fn solve_nonlocal_picard(params: &ProblemParams, mesh: &Mesh, opts: &SolverOptions) -> Result<RadialSolution> {
    params.validate()?;
    check_mesh(params, mesh)?;
    let sign = if params.a0 < 0.0 { -1.0 } else { 1.0 };
    let p = params.positive();
    let op = Operator::new(&p, mesh)?;
    let tol = opts.residual_tolerance(&p);
    let (mut u, _) = initial_guess(&p, &mesh.nodes)?;
    let mut c = 1.0;
    let mut total = 0;
    for _ in 0..500 {
        let out = newton(&op, &p, &mesh.nodes, u, c, Coupling::Fixed(c), opts, tol)?;
        total += out.iters;
        u = out.u;
        let c_new = op.coefficient(&u);
        let dc = (c_new - c).abs();
        c = c_new;
        if dc <= 1e-15 {
            let residual = inf_norm(&op.residual(&p, &mesh.nodes, &u, c));
            let out = NewtonOutcome { u, c, iters: total, residual };
            return Ok(finish(params, mesh, Model::Nonlocal, opts, out, sign));
        }
    }
    Err(Error::Divergence { iters: total, residual: f64::NAN })
}

fn check_mesh(params: &ProblemParams, mesh: &Mesh) -> Result<()> {
    let n = mesh.nodes.len();
    if n < 9 || mesh.nodes[0] != 0.0 || (mesh.nodes[n - 1] - params.radius).abs() > 1e-12 * params.radius {
        return Err(Error::Domain("mesh does not span [0, R]".into()));
    }
    let (width, need) = crate::mesh::required_layer_nodes(params);
    let have = mesh.nodes_within(width);
    if have < need {
        return Err(Error::UnderResolved { have, need });
    }
    Ok(())
}

/// Fourth-order nodal derivative of `u` on `nodes`.
///
/// Five-point stencils: one-sided at the ends, central inside.
pub fn derivative_on(nodes: &[f64], u: &[f64]) -> Vec<f64> {
    let m = nodes.len() - 1;
    (0..=m)
        .map(|j| {
            let s = j.saturating_sub(2).min(m - 4);
            let w = fornberg(nodes[j], &nodes[s..s + 5], 1);
            // weights sum to zero; differencing against u[j] limits cancellation
            w[1].iter().zip(&u[s..s + 5]).map(|(w, v)| w * (v - u[j])).sum()
        })
        .collect()
}

pub fn reconstruct_derivative(sol: &RadialSolution) -> Vec<f64> {
    derivative_on(&sol.mesh.nodes, &sol.u)
}

/// Discrete energy of a radial profile `u` (unit sphere area normalised to 1).
pub fn energy(params: &ProblemParams, mesh: &Mesh, u: &[f64]) -> f64 {
    let nodes = &mesh.nodes;
    let m = nodes.len() - 1;
    let n = params.dim;
    let quad = NodalQuadrature::new(nodes);
    let du = derivative_on(nodes, u);
    let grad: Vec<f64> = nodes.iter().zip(&du).map(|(r, d)| r.powf(n - 1.0) * d * d).collect();
    let rn = params.radius.powf(n);
    let excess: Vec<f64> = nodes.iter().zip(u).map(|(r, v)| r.powf(n - 1.0) * (v.cosh() - 1.0)).collect();
    let bulk = 0.5 * params.eps * params.eps * quad.integrate(&grad);
    let mean = (rn / n) * (n / rn * quad.integrate(&excess)).ln_1p();
    let wall = params.eps / (2.0 * params.gamma) * params.radius.powf(n - 1.0) * (u[m] - params.a0).powi(2);
    bulk + mean + wall
}

/// Constancy check of `eps^2/2 u'^2 + (N-1) eps^2 int_{R/2}^t u'^2/r dr - C cosh u`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IdentityCheck {
    /// Mean of the functional over `[R/2, R]`: an estimate of the integration constant.
    pub k_estimate: f64,
    pub max_deviation: f64,
    pub nodes: usize,
}

pub fn integro_identity_check(sol: &RadialSolution) -> Result<IdentityCheck> {
    if !sol.converged() || sol.model != Model::Nonlocal {
        return Err(Error::Precondition("identity check needs a converged nonlocal solution".into()));
    }
    let p = &sol.params;
    let nodes = &sol.mesh.nodes;
    let half = 0.5 * p.radius;
    let quad = NodalQuadrature::new(nodes);
    let g: Vec<f64> = nodes.iter().zip(&sol.du).map(|(&r, d)| if r > 0.0 { d * d / r } else { 0.0 }).collect();
    let cum = quad.cumulative(&g);
    let total = cum[cum.len() - 1];
    let base = total - quad.integrate_from(half, &g);
    let e2 = p.eps * p.eps;
    let phi: Vec<f64> = nodes
        .iter()
        .enumerate()
        .filter(|(_, &r)| r >= half)
        .map(|(j, _)| 0.5 * e2 * sol.du[j] * sol.du[j] + (p.dim - 1.0) * e2 * (cum[j] - base) - sol.c * sol.u[j].cosh())
        .collect();
    let mean = phi.iter().sum::<f64>() / phi.len() as f64;
    let dev = phi.iter().fold(0.0f64, |a, v| a.max((v - mean).abs()));
    Ok(IdentityCheck { k_estimate: mean, max_deviation: dev, nodes: phi.len() })
}
