//! Gauss-Legendre rules, adaptive integration and nodal mesh quadrature.

use crate::error::{Error, Result};
use crate::fd::{lagrange, window};

/// Nodes and weights of the `n`-point Gauss-Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// Fixed-order Gauss-Legendre rule mapped to arbitrary intervals.
#[derive(Debug, Clone)]
pub struct GaussRule {
    x: Vec<f64>,
    w: Vec<f64>,
}

impl GaussRule {
    pub fn new(n: usize) -> Self {
        let (x, w) = gauss_legendre(n);
        Self { x, w }
    }

    pub fn integrate(&self, f: &impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
        let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
        h * self.x.iter().zip(&self.w).map(|(&x, &w)| w * f(c + h * x)).sum::<f64>()
    }
}

/// Globally adaptive Gauss-Legendre integration with absolute tolerance `tol`.
///
/// The panel with the largest error estimate (15-point rule against its two
/// halves) is split until the summed estimate drops below `tol`.
pub fn adaptive_gauss(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<f64> {
    const MAX_PANELS: usize = 20_000;
    struct Panel {
        a: f64,
        b: f64,
        value: f64,
        err: f64,
    }
    if a == b {
        return Ok(0.0);
    }
    let rule = GaussRule::new(15);
    let eval = |a: f64, b: f64| -> Result<Panel> {
        let m = 0.5 * (a + b);
        let whole = rule.integrate(&f, a, b);
        let value = rule.integrate(&f, a, m) + rule.integrate(&f, m, b);
        if !value.is_finite() || !whole.is_finite() {
            return Err(Error::Quadrature(format!("non-finite integrand on [{a}, {b}]")));
        }
        Ok(Panel { a, b, value, err: (value - whole).abs() })
    };
    let mut panels = vec![eval(a, b)?];
    loop {
        let total_err: f64 = panels.iter().map(|p| p.err).sum();
        if total_err <= tol {
            return Ok(panels.iter().map(|p| p.value).sum());
        }
        if panels.len() >= MAX_PANELS {
            return Err(Error::Quadrature(format!(
                "error estimate {total_err:.3e} above tolerance after {MAX_PANELS} panels"
            )));
        }
        let worst = (0..panels.len()).max_by(|&i, &j| panels[i].err.total_cmp(&panels[j].err)).unwrap_or(0);
        let p = panels.swap_remove(worst);
        let m = 0.5 * (p.a + p.b);
        if m <= p.a || m >= p.b {
            return Err(Error::Quadrature(format!("panel collapsed near {m} without convergence")));
        }
        panels.push(eval(p.a, m)?);
        panels.push(eval(m, p.b)?);
    }
}

/// Fourth-order quadrature of nodal data on a non-uniform mesh.
///
/// On each interval the data are replaced by the cubic through the four
/// nearest nodes, integrated exactly.
#[derive(Debug, Clone)]
pub struct NodalQuadrature {
    nodes: Vec<f64>,
    /// per-interval weights for the stencil starting at `start[j]`
    start: Vec<usize>,
    local: Vec<[f64; 4]>,
    weights: Vec<f64>,
}

const GAUSS2: [f64; 2] = [-0.577_350_269_189_625_8, 0.577_350_269_189_625_8];

fn interval_weights(nodes: &[f64], j: usize, lo: f64, hi: f64) -> (usize, [f64; 4]) {
    let win = window(j, 4, nodes.len());
    let xs = &nodes[win.clone()];
    let (c, h) = (0.5 * (lo + hi), 0.5 * (hi - lo));
    let mut out = [0.0; 4];
    for g in GAUSS2 {
        let l = lagrange(c + h * g, xs);
        for (o, li) in out.iter_mut().zip(l) {
            *o += h * li;
        }
    }
    (win.start, out)
}

impl NodalQuadrature {
    pub fn new(nodes: &[f64]) -> Self {
        assert!(nodes.len() >= 4, "nodal quadrature needs at least four nodes");
        let m = nodes.len() - 1;
        let mut start = Vec::with_capacity(m);
        let mut local = Vec::with_capacity(m);
        let mut weights = vec![0.0; nodes.len()];
        for j in 0..m {
            let (s, w) = interval_weights(nodes, j, nodes[j], nodes[j + 1]);
            for (k, wk) in w.iter().enumerate() {
                weights[s + k] += wk;
            }
            start.push(s);
            local.push(w);
        }
        Self { nodes: nodes.to_vec(), start, local, weights }
    }

    /// Global weights: `integral over [r_0, r_M] = sum w_j f_j`.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn integrate(&self, f: &[f64]) -> f64 {
        self.weights.iter().zip(f).map(|(w, v)| w * v).sum()
    }

    fn interval(&self, j: usize, f: &[f64]) -> f64 {
        let s = self.start[j];
        self.local[j].iter().zip(&f[s..s + 4]).map(|(w, v)| w * v).sum()
    }

    /// Running integrals `I_j = integral over [r_0, r_j]`.
    pub fn cumulative(&self, f: &[f64]) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.nodes.len());
        let mut acc = 0.0;
        out.push(0.0);
        for j in 0..self.nodes.len() - 1 {
            acc += self.interval(j, f);
            out.push(acc);
        }
        out
    }

    /// Integral over `[x, r_M]` for any `x` inside the mesh.
    pub fn integrate_from(&self, x: f64, f: &[f64]) -> f64 {
        let m = self.nodes.len() - 1;
        let j = match self.nodes.partition_point(|&t| t <= x) {
            0 => 0,
            i => (i - 1).min(m - 1),
        };
        let (s, w) = interval_weights(&self.nodes, j, x.max(self.nodes[0]), self.nodes[j + 1]);
        let head: f64 = w.iter().zip(&f[s..s + 4]).map(|(w, v)| w * v).sum();
        head + (j + 1..m).map(|i| self.interval(i, f)).sum::<f64>()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_rules_integrate_polynomials() {
        for n in [1, 2, 5, 15, 20] {
            let (x, w) = gauss_legendre(n);
            assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-13);
            let deg = 2 * n - 1;
            let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32 - 1)).sum();
            let exact = if (deg - 1) % 2 == 0 { 2.0 / deg as f64 } else { 0.0 };
            assert!((s - exact).abs() < 1e-13, "n={n}");
        }
    }

    #[test]
    fn adaptive_handles_sqrt_endpoint() {
        let v = adaptive_gauss(|x: f64| x.sqrt(), 0.0, 1.0, 1e-12).unwrap();
        assert!((v - 2.0 / 3.0).abs() < 1e-11);
    }

    #[test]
    fn adaptive_reports_blowup() {
        assert!(adaptive_gauss(|x: f64| 1.0 / x, 0.0, 1.0, 1e-10).is_err());
    }

    #[test]
    fn nodal_rule_exact_for_cubics() {
        let nodes: Vec<f64> = (0..=20).map(|j| (j as f64 / 20.0).powf(1.7)).collect();
        let q = NodalQuadrature::new(&nodes);
        let f: Vec<f64> = nodes.iter().map(|&x| 1.0 + x - 2.0 * x * x + 4.0 * x.powi(3)).collect();
        let exact = |a: f64| a + a * a / 2.0 - 2.0 * a.powi(3) / 3.0 + a.powi(4);
        assert!((q.integrate(&f) - exact(1.0)).abs() < 1e-13);
        let cum = q.cumulative(&f);
        for (x, c) in nodes.iter().zip(&cum) {
            assert!((c - exact(*x)).abs() < 1e-13);
        }
        assert!((q.integrate_from(0.37, &f) - (exact(1.0) - exact(0.37))).abs() < 1e-13);
    }

    #[test]
    fn nodal_rule_fourth_order() {
        let err = |m: usize| {
            let nodes: Vec<f64> = (0..=m).map(|j| (j as f64 / m as f64).powi(2)).collect();
            let f: Vec<f64> = nodes.iter().map(|x| x.exp()).collect();
            (NodalQuadrature::new(&nodes).integrate(&f) - (1f64.exp() - 1.0)).abs()
        };
        let order = (err(80) / err(160)).log2();
        assert!(order > 3.7, "order {order}");
    }
}
