//! Boundary layers of the radial nonlocal sinh-Gordon problem
//!
//! ```text
//! eps^2 (u'' + (N-1)/r u') = C(u) sinh u   on (0, R)
//! C(u) = (N/R^N int_0^R s^(N-1) cosh u ds)^-1
//! u'(0) = 0,   u(R) + gamma eps u'(R) = a0
//! ```
//!
//! * [`asymptotics`]: closed-form two-term expansions at and inside the layer.
//! * [`solver`]: Newton solver on a layer-graded mesh.
//! * [`concentration`]: limits of boundary-concentrating functionals.
//! * [`harness`]: eps-sweeps, rate fits and the layer dichotomy check.

pub mod asymptotics;
pub mod banded;
pub mod concentration;
pub mod error;
pub mod fd;
pub mod harness;
pub mod mesh;
pub mod params;
pub mod quadrature;
pub mod roots;
pub mod solver;
pub mod twoterm;

pub use asymptotics::LayerVariant;
pub use error::{Error, Result};
pub use mesh::{build_mesh, Grading, Mesh};
pub use params::{LayerPoint, ProblemParams};
pub use solver::{Model, RadialSolution, SolverOptions};
pub use twoterm::TwoTerm;
