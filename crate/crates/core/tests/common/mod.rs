//! Independent reference computations shared by the integration tests.
//!
//! Nothing here calls into the closed-form or quadrature code of the crate:
//! roots are found by plain bisection and integrals by a fixed midpoint rule.

#![allow(dead_code)]

use std::sync::OnceLock;

use sinhlayer::harness::{solve_sweep, SweepEntry, SweepPlan};

/// Bisection with a fixed iteration count on a sign change of `f`.
pub fn bisection(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, iters: usize) -> f64 {
    let flo = f(lo);
    for _ in 0..iters {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if (fm > 0.0) == (flo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Root of `b + 2 gamma sinh(b/2) = a0`, `a0 > 0`.
pub fn b_oracle(gamma: f64, a0: f64) -> f64 {
    bisection(|b| b + 2.0 * gamma * (0.5 * b).sinh() - a0, 0.0, a0, 200)
}

/// `k(p)` from the log-tanh relation, optionally with the curvature weight
/// `(N-1)/(2R)` in front of the log and `(N-1)/(4R)` on the tanh^2 term.
pub fn k_oracle(n: f64, r: f64, b: f64, p: f64, curvature: bool) -> f64 {
    let (w1, w2) = if curvature { ((n - 1.0) / (2.0 * r), (n - 1.0) / (4.0 * r)) } else { (0.0, 0.0) };
    let tb = (b / 4.0).tanh();
    let g = |k: f64| {
        let tk = (k / 4.0).tanh();
        (1.0 + w1) * (tb / tk).ln() + w2 * (tk * tk - tb * tb) - p
    };
    bisection(g, 1e-300, b, 200)
}

/// Composite midpoint rule with `panels` equal panels.
pub fn midpoint(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let h = (b - a) / panels as f64;
    let mut sum = 0.0;
    let mut comp = 0.0;
    for i in 0..panels {
        // Kahan summation keeps 1e6 panels at full precision
        let y = f(a + (i as f64 + 0.5) * h) - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    sum * h
}

pub const ORACLE_PANELS: usize = 1_000_000;

/// `int_0^b [F(g(t)) - F(0)] / (2 sinh(t/2)) dt` after `t = b s^2`, which
/// removes the `t^(-1/2)` endpoint behaviour of exponent-1/2 integrands.
pub fn weight_oracle(f: impl Fn(f64) -> f64, g: impl Fn(f64) -> f64, b: f64) -> f64 {
    let f0 = f(0.0);
    midpoint(
        |s| {
            let t = b * s * s;
            (f(g(t)) - f0) / (2.0 * (0.5 * t).sinh()) * 2.0 * b * s
        },
        0.0,
        1.0,
        ORACLE_PANELS,
    )
}

/// `int_k^b F(g(t)) / (2 sinh(t/2)) dt`
pub fn window_oracle(f: impl Fn(f64) -> f64, g: impl Fn(f64) -> f64, k: f64, b: f64) -> f64 {
    midpoint(|t| f(g(t)) / (2.0 * (0.5 * t).sinh()), k, b, ORACLE_PANELS)
}

pub fn grad_arg(t: f64) -> f64 {
    2.0 * (0.5 * t).sinh()
}

pub fn value_arg(t: f64) -> f64 {
    t
}

/// Closed forms written out term by term.
pub mod closed {
    pub fn c2(n: f64, r: f64, b: f64, eps: f64) -> f64 {
        1.0 - (2.0 * n / r) * ((b / 2.0).cosh() - 1.0) * eps
    }

    pub fn u_r2(n: f64, r: f64, g: f64, b: f64, eps: f64) -> f64 {
        let ch = (b / 2.0).cosh();
        b + (2.0 * eps / r) * g * (n * ch * ch - 1.0) * (b / 4.0).tanh() / (g * ch + 1.0)
    }

    pub fn du_r2(n: f64, r: f64, g: f64, b: f64, eps: f64) -> f64 {
        let ch = (b / 2.0).cosh();
        (2.0 / eps) * (b / 2.0).sinh() - (2.0 / r) * (n * ch * ch - 1.0) * (b / 4.0).tanh() / (g * ch + 1.0)
    }

    pub fn v_r2(n: f64, r: f64, g: f64, b: f64, eps: f64) -> f64 {
        b + ((n - 1.0) / r) * eps * 2.0 * g * (b / 4.0).tanh() / (g * (b / 2.0).cosh() + 1.0)
    }

    /// `lim (u(R) - v(R)) / eps`
    pub fn gap_value(n: f64, r: f64, g: f64, b: f64) -> f64 {
        let ch = (b / 2.0).cosh();
        (n / r) * 2.0 * g * (b / 2.0).sinh() * (ch - 1.0) / (g * ch + 1.0)
    }

    /// Half-height depth `(R - r)/eps^2` with the published curvature factor.
    pub fn half_height_depth_published(n: f64, r: f64, g: f64, b: f64) -> f64 {
        let ch = (b / 2.0).cosh();
        let se = 1.0 / (b / 4.0).cosh().powi(2);
        let q = (g / 4.0) * (1.0 + (n - 1.0) / (2.0 * r) * se) * (n * ch * ch - 1.0) * se / (g * ch + 1.0);
        q / r
    }

    pub fn decay_envelope(a0: f64, r_max: f64, eps: f64, r: f64) -> f64 {
        2.0 * a0 * (-(r_max - r) / (8.0 * eps) / a0.cosh().sqrt()).exp()
    }
}

/// Reference sweep: nonlocal and local solutions at every reference `eps`.
pub fn reference_entries() -> &'static [SweepEntry] {
    static ENTRIES: OnceLock<Vec<SweepEntry>> = OnceLock::new();
    ENTRIES.get_or_init(|| solve_sweep(&SweepPlan::reference()).expect("reference sweep solves"))
}
