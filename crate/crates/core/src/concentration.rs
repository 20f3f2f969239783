//! Weights of the Dirac masses that boundary-concentrating functionals of
//! the solution converge to, and their empirical counterparts.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{adaptive_gauss, NodalQuadrature};
use crate::solver::RadialSolution;

/// Absolute tolerance of the weight quadratures.
pub const WEIGHT_TOL: f64 = 1e-10;

type Func = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A locally Hölder continuous function with exponent `tau`.
#[derive(Clone)]
pub struct HolderFunction {
    pub name: String,
    pub tau: f64,
    f: Func,
}

impl fmt::Debug for HolderFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HolderFunction").field("name", &self.name).field("tau", &self.tau).finish()
    }
}

impl HolderFunction {
    pub fn new(name: impl Into<String>, tau: f64, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Result<Self> {
        if !(tau > 0.0 && tau <= 1.0) {
            return Err(Error::Domain(format!("Hölder exponent must lie in (0, 1], got {tau}")));
        }
        Ok(Self { name: name.into(), tau, f: Arc::new(f) })
    }

    pub fn eval(&self, x: f64) -> f64 {
        (self.f)(x)
    }

    pub fn f0(&self) -> f64 {
        self.eval(0.0)
    }

    /// Smallest `L` with `|F(x) - F(y)| <= L |x - y|^tau` over a sample grid of `[lo, hi]`.
    pub fn holder_constant(&self, lo: f64, hi: f64, samples: usize) -> f64 {
        let xs: Vec<f64> = (0..=samples).map(|i| lo + (hi - lo) * i as f64 / samples as f64).collect();
        let fs: Vec<f64> = xs.iter().map(|&x| self.eval(x)).collect();
        let mut l = 0.0f64;
        for i in 0..xs.len() {
            for j in i + 1..xs.len() {
                l = l.max((fs[j] - fs[i]).abs() / (xs[j] - xs[i]).powf(self.tau));
            }
        }
        l
    }
}

/// `s`, `s^2`, `|s|^(1/2)`, `2 asinh(s/2)`, `2 sinh(s/2)`.
pub fn standard_f_suite() -> Vec<HolderFunction> {
    let mk = |n: &str, tau, f: fn(f64) -> f64| HolderFunction::new(n, tau, f).expect("valid exponent");
    vec![
        mk("s", 1.0, |s| s),
        mk("s^2", 1.0, |s| s * s),
        mk("sqrt|s|", 0.5, |s| s.abs().sqrt()),
        mk("2asinh(s/2)", 1.0, |s| 2.0 * (0.5 * s).asinh()),
        mk("2sinh(s/2)", 1.0, |s| 2.0 * (0.5 * s).sinh()),
    ]
}

/// A continuous test function on `[0, R]`.
#[derive(Clone)]
pub struct TestFunction {
    pub name: String,
    /// Value at `r = R`.
    pub at_boundary: f64,
    f: Func,
}

impl fmt::Debug for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TestFunction").field("name", &self.name).field("at_boundary", &self.at_boundary).finish()
    }
}

impl TestFunction {
    pub fn new(name: impl Into<String>, radius: f64, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        let at_boundary = f(radius);
        Self { name: name.into(), at_boundary, f: Arc::new(f) }
    }

    pub fn eval(&self, r: f64) -> f64 {
        (self.f)(r)
    }
}

/// `1`, `r/R`, `cos(pi r / 2R)` and a hat of half-width `R/2` centred at `R/2`.
pub fn standard_h_suite(radius: f64) -> Vec<TestFunction> {
    let r = radius;
    vec![
        TestFunction::new("1", r, |_| 1.0),
        TestFunction::new("r/R", r, move |x| x / r),
        TestFunction::new("cos(pi r/2R)", r, move |x| (std::f64::consts::FRAC_PI_2 * x / r).cos()),
        TestFunction::new("hat(R/2)", r, move |x| (1.0 - (x - 0.5 * r).abs() / (0.5 * r)).max(0.0)),
    ]
}

/// Which quantity is concentrated: `F(eps u')` or `F(u)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Gradient,
    Value,
}

impl Mode {
    pub fn name(&self) -> &'static str {
        match self {
            Mode::Gradient => "gradient",
            Mode::Value => "value",
        }
    }

    /// Profile variable `t` mapped to the argument of `F`.
    fn argument(&self, t: f64) -> f64 {
        match self {
            Mode::Gradient => 2.0 * (0.5 * t).sinh(),
            Mode::Value => t,
        }
    }
}

/// Integration region of an empirical pairing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Window {
    Full,
    /// `[R - p eps, R]`
    Layer {
        p: f64,
    },
}

impl Window {
    pub fn label(&self) -> String {
        match self {
            Window::Full => "full".into(),
            Window::Layer { p } => format!("p={p}"),
        }
    }
}

/// Weight of the full-domain limit: `int_0^b [F(g(t)) - F(0)] / (2 sinh(t/2)) dt`,
/// with `g(t) = 2 sinh(t/2)` (gradient) or `t` (value).
///
/// The endpoint behaviour `t^(tau - 1)` is removed by `t = b s^(1/tau)`.
pub fn weight_full(f: &HolderFunction, b: f64, mode: Mode) -> Result<f64> {
    if !(b > 0.0) || !b.is_finite() {
        return Err(Error::Domain(format!("weight needs b > 0, got {b}")));
    }
    if !(f.tau > 0.0 && f.tau <= 1.0) {
        return Err(Error::Domain(format!("Hölder exponent must lie in (0, 1], got {}", f.tau)));
    }
    let f0 = f.f0();
    let inv = 1.0 / f.tau;
    let integrand = |s: f64| {
        if s <= 0.0 {
            return 0.0;
        }
        let t = b * s.powf(inv);
        let jac = b * inv * s.powf(inv - 1.0);
        (f.eval(mode.argument(t)) - f0) / (2.0 * (0.5 * t).sinh()) * jac
    };
    adaptive_gauss(integrand, 0.0, 1.0, WEIGHT_TOL)
        .map_err(|e| Error::Quadrature(format!("weight of `{}` not integrable: {e}", f.name)))
}

/// Weight of the windowed limit: `int_kp^b F(g(t)) / (2 sinh(t/2)) dt`.
pub fn weight_window(f: &HolderFunction, b: f64, kp: f64, mode: Mode) -> Result<f64> {
    if !(kp > 0.0) {
        return Err(Error::Domain(format!(
            "window weight needs k(p) > 0, got {kp}; use the full-domain weight instead"
        )));
    }
    if kp > b {
        return Err(Error::Domain(format!("k(p) = {kp} exceeds b = {b}")));
    }
    if kp == b {
        return Ok(0.0);
    }
    adaptive_gauss(|t| f.eval(mode.argument(t)) / (2.0 * (0.5 * t).sinh()), kp, b, WEIGHT_TOL)
}

/// An empirical pairing and its resolution flag.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pairing {
    pub value: f64,
    /// Fewer than `20/tau` nodes in `[R - eps, R]`.
    pub under_resolved: bool,
}

/// `int h(r) [F(eps u') - F(0)] / eps dr` (gradient) or the analogue with `u`.
/// Windowed pairings integrate `h F(.) / eps` over `[R - p eps, R]` without
/// subtracting `F(0)`.
pub fn empirical_pairing(
    sol: &RadialSolution,
    f: &HolderFunction,
    h: &TestFunction,
    mode: Mode,
    window: Window,
) -> Result<Pairing> {
    let p = &sol.params;
    let nodes = &sol.mesh.nodes;
    let eps = p.eps;
    let f0 = match window {
        Window::Full => f.f0(),
        Window::Layer { .. } => 0.0,
    };
    let vals: Vec<f64> = nodes
        .iter()
        .enumerate()
        .map(|(j, &r)| {
            let arg = match mode {
                Mode::Gradient => eps * sol.du[j],
                Mode::Value => sol.u[j],
            };
            h.eval(r) * (f.eval(arg) - f0) / eps
        })
        .collect();
    let quad = NodalQuadrature::new(nodes);
    let value = match window {
        Window::Full => quad.integrate(&vals),
        Window::Layer { p: depth } => {
            if !(depth >= 0.0) {
                return Err(Error::Domain(format!("window depth must be >= 0, got {depth}")));
            }
            let start = p.radius - depth * eps;
            if start < 0.0 {
                return Err(Error::Domain(format!("window start {start} below r = 0")));
            }
            quad.integrate_from(start, &vals)
        }
    };
    let need = (20.0 / f.tau).ceil() as usize;
    let under_resolved = sol.mesh.nodes_within(eps) < need;
    Ok(Pairing { value, under_resolved })
}

/// `int |F(eps u') - F(0)| / eps dr`
pub fn gradient_l1(sol: &RadialSolution, f: &HolderFunction) -> f64 {
    let eps = sol.params.eps;
    let f0 = f.f0();
    let vals: Vec<f64> = sol.du.iter().map(|d| (f.eval(eps * d) - f0).abs() / eps).collect();
    NodalQuadrature::new(&sol.mesh.nodes).integrate(&vals)
}
