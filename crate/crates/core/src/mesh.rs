use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::ProblemParams;
use crate::roots::bisect;

/// Layer width, in units of `eps`, that the mesh must resolve.
pub const LAYER_WIDTHS: f64 = 10.0;
/// Required spacing inside the layer, in units of `eps`.
pub const LAYER_SPACING: f64 = 1.0 / 20.0;

/// How nodes are distributed over `[0, R]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Grading {
    Uniform,
    /// The given fraction of intervals spaced uniformly in `[R - 10 eps, R]`,
    /// the rest growing geometrically toward the centre.
    Geometric {
        layer_fraction: f64,
    },
}

impl Default for Grading {
    fn default() -> Self {
        Grading::Geometric { layer_fraction: 0.5 }
    }
}

/// Radial grid `0 = r_0 < ... < r_M = R`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mesh {
    pub nodes: Vec<f64>,
    pub grading: Grading,
    /// Width of the resolved boundary layer.
    pub layer_width: f64,
    /// Ratio of the largest to the smallest spacing.
    pub ratio: f64,
}

impl Mesh {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn radius(&self) -> f64 {
        *self.nodes.last().unwrap_or(&0.0)
    }

    /// Number of nodes in `[R - width, R]`.
    pub fn nodes_within(&self, width: f64) -> usize {
        let lo = self.radius() - width;
        self.nodes.iter().filter(|&&r| r >= lo).count()
    }

    /// Index `j` with `r_j <= r <= r_{j+1}`.
    pub fn locate(&self, r: f64) -> usize {
        let m = self.nodes.len() - 1;
        match self.nodes.partition_point(|&x| x <= r) {
            0 => 0,
            i => (i - 1).min(m - 1),
        }
    }
}

/// Uniform spacing inside `[R - width, R]`, spacing growing by a constant
/// ratio from there down to `r = 0`.
fn geometric_nodes(r: f64, width: f64, m: usize, fraction: f64) -> Result<Vec<f64>> {
    let inner = if width >= r { m } else { ((fraction * m as f64).round() as usize).clamp(1, m - 1) };
    let h = width / inner as f64;
    let mut depth: Vec<f64> = (0..=inner).map(|i| h * i as f64).collect();
    let outer = m - inner;
    if outer > 0 {
        // h (rho + rho^2 + ... + rho^outer) = r - width
        let rest = r - width;
        let span = |rho: f64| {
            let mut acc = 0.0;
            let mut t = 1.0;
            for _ in 0..outer {
                t *= rho;
                acc += t;
            }
            h * acc - rest
        };
        let mut hi = 2.0;
        while span(hi) < 0.0 {
            hi *= 2.0;
        }
        let rho = bisect(span, 0.0, hi, 200)?;
        let mut d = width;
        let mut step = h;
        for _ in 0..outer {
            step *= rho;
            d += step;
            depth.push(d);
        }
    }
    let mut nodes: Vec<f64> = depth.iter().rev().map(|d| r - d).collect();
    nodes[0] = 0.0;
    nodes[m] = r;
    Ok(nodes)
}

/// Nodes required inside the layer for a given `eps`.
pub fn required_layer_nodes(params: &ProblemParams) -> (f64, usize) {
    let width = (LAYER_WIDTHS * params.eps).min(params.radius);
    let need = (width / (params.eps * LAYER_SPACING) - 1e-9).ceil() as usize;
    (width, need)
}

pub fn build_mesh(params: &ProblemParams, n_interior: usize, grading: Grading) -> Result<Mesh> {
    params.validate()?;
    if n_interior < 50 {
        return Err(Error::InvalidParam {
            name: "n_interior",
            reason: format!("at least 50 intervals required, got {n_interior}"),
        });
    }
    let m = n_interior;
    let r = params.radius;
    let (width, need) = required_layer_nodes(params);
    let nodes: Vec<f64> = match grading {
        Grading::Uniform => (0..=m).map(|j| if j == m { r } else { r * j as f64 / m as f64 }).collect(),
        Grading::Geometric { layer_fraction } => {
            if !(layer_fraction > 0.0 && layer_fraction < 1.0) {
                return Err(Error::InvalidParam {
                    name: "layer_fraction",
                    reason: format!("must lie in (0, 1), got {layer_fraction}"),
                });
            }
            geometric_nodes(r, width, m, layer_fraction)?
        }
    };
    let mesh = {
        let h: Vec<f64> = nodes.windows(2).map(|w| w[1] - w[0]).collect();
        let hmax = h.iter().cloned().fold(0.0, f64::max);
        let hmin = h.iter().cloned().fold(f64::INFINITY, f64::min);
        Mesh { nodes, grading, layer_width: width, ratio: hmax / hmin }
    };
    if mesh.nodes.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Domain("mesh nodes are not strictly increasing".into()));
    }
    let have = mesh.nodes_within(width);
    if have < need {
        return Err(Error::UnderResolved { have, need });
    }
    Ok(mesh)
}
