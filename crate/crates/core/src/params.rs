use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Physical and geometric inputs of one problem instance.
///
/// `dim` may be any real number above 1; every formula is analytic in it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProblemParams {
    pub dim: f64,
    pub radius: f64,
    pub gamma: f64,
    pub a0: f64,
    pub eps: f64,
}

impl ProblemParams {
    pub fn new(dim: f64, radius: f64, gamma: f64, a0: f64, eps: f64) -> Result<Self> {
        let p = Self { dim, radius, gamma, a0, eps };
        p.validate()?;
        Ok(p)
    }

    /// The reference configuration used throughout the test-suite.
    pub fn reference(eps: f64) -> Self {
        Self { dim: 2.0, radius: 1.0, gamma: 1.0, a0: 2.0, eps }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = |name, v: f64| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(invalid(name, format!("must be finite, got {v}")))
            }
        };
        finite("dim", self.dim)?;
        finite("radius", self.radius)?;
        finite("gamma", self.gamma)?;
        finite("a0", self.a0)?;
        finite("eps", self.eps)?;
        if self.dim <= 1.0 {
            return Err(invalid("dim", format!("must exceed 1, got {}", self.dim)));
        }
        if self.radius <= 0.0 {
            return Err(invalid("radius", format!("must be positive, got {}", self.radius)));
        }
        if self.gamma <= 0.0 {
            return Err(invalid("gamma", format!("must be positive, got {}", self.gamma)));
        }
        if self.eps <= 0.0 {
            return Err(invalid("eps", format!("must be positive, got {}", self.eps)));
        }
        Ok(())
    }

    pub fn with_eps(&self, eps: f64) -> Self {
        Self { eps, ..*self }
    }

    pub fn with_a0(&self, a0: f64) -> Self {
        Self { a0, ..*self }
    }

    /// Zero boundary datum: the solution is identically zero.
    pub fn is_trivial(&self) -> bool {
        self.a0 == 0.0
    }

    /// Sign of the boundary datum (0 for the trivial case).
    pub(crate) fn sign(&self) -> f64 {
        if self.a0 > 0.0 {
            1.0
        } else if self.a0 < 0.0 {
            -1.0
        } else {
            0.0
        }
    }

    /// The same instance with `|a0|`.
    pub(crate) fn positive(&self) -> Self {
        self.with_a0(self.a0.abs())
    }
}

/// Layer coordinates `(p, q)`: the point at `R - p*eps - (q/R)*eps^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LayerPoint {
    pub p: f64,
    pub q: f64,
}

impl LayerPoint {
    pub const BOUNDARY: LayerPoint = LayerPoint { p: 0.0, q: 0.0 };

    pub fn new(p: f64, q: f64) -> Result<Self> {
        if !p.is_finite() || p < 0.0 {
            return Err(Error::Domain(format!("layer coordinate p must be >= 0, got {p}")));
        }
        if !q.is_finite() {
            return Err(Error::Domain(format!("layer coordinate q must be finite, got {q}")));
        }
        Ok(Self { p, q })
    }

    pub fn radius(&self, params: &ProblemParams) -> f64 {
        let (r, e) = (params.radius, params.eps);
        r - self.p * e - self.q * e * e / r
    }

    /// Radius encoded by this point, checked to lie in `[0, R]`.
    pub fn checked_radius(&self, params: &ProblemParams) -> Result<f64> {
        let r = self.radius(params);
        if !(0.0..=params.radius).contains(&r) {
            return Err(Error::Domain(format!(
                "layer point (p={}, q={}) maps to r={r} outside [0, {}] at eps={}",
                self.p, self.q, params.radius, params.eps
            )));
        }
        Ok(r)
    }
}
