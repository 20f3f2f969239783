//! Flat run configuration: JSON file merged with command-line overrides.

use std::fmt;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use sinhlayer::harness::{reference_eps, MeshPolicy, SweepPlan, Thresholds};
use sinhlayer::{build_mesh, Grading, LayerPoint, LayerVariant, Mesh, Model, ProblemParams, SolverOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum GradingKind {
    Uniform,
    Geometric,
}

/// Every option any subcommand reads. Unset fields take defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    #[serde(rename = "N", skip_serializing_if = "Option::is_none")]
    pub dim: Option<f64>,
    #[serde(rename = "R", skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mesh_n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grading: Option<GradingKind>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub layer_fraction: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<Model>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub variant: Option<LayerVariant>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps_list: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_grid: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q_grid: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub layer_p: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window_p: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_order: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dtn_order: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub layer_rel: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub limit_rel: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol_residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_iters: Option<usize>,
}

#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<sinhlayer::Error> for ConfigError {
    fn from(e: sinhlayer::Error) -> Self {
        ConfigError(e.to_string())
    }
}

macro_rules! merge_fields {
    ($base:ident, $over:ident; $($f:ident),*) => {
        RunConfig { $($f: $over.$f.or($base.$f)),* }
    };
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| ConfigError(format!("invalid config {}: {e}", path.display())))
    }

    /// Fields set in `over` replace those of `self`.
    pub fn merged(self, over: RunConfig) -> RunConfig {
        let base = self;
        merge_fields!(base, over; dim, radius, gamma, a0, eps, mesh_n, grading, layer_fraction, out, format,
            model, variant, eps_list, p_grid, q_grid, layer_p, window_p, min_order, dtn_order, layer_rel,
            limit_rel, tol_residual, max_iters)
    }

    /// Fill every field with its effective value and validate.
    pub fn resolve(self) -> Result<RunConfig, ConfigError> {
        let th = Thresholds::default();
        let solver = SolverOptions::default();
        let r = RunConfig {
            dim: Some(self.dim.unwrap_or(2.0)),
            radius: Some(self.radius.unwrap_or(1.0)),
            gamma: Some(self.gamma.unwrap_or(1.0)),
            a0: Some(self.a0.unwrap_or(2.0)),
            eps: Some(self.eps.unwrap_or(0.01)),
            mesh_n: Some(self.mesh_n.unwrap_or(MeshPolicy::default().n_interior)),
            grading: Some(self.grading.unwrap_or(GradingKind::Geometric)),
            layer_fraction: Some(self.layer_fraction.unwrap_or(0.5)),
            out: Some(self.out.unwrap_or_else(|| PathBuf::from("out"))),
            format: Some(self.format.unwrap_or(Format::Csv)),
            model: Some(self.model.unwrap_or(Model::Nonlocal)),
            variant: Some(self.variant.unwrap_or(LayerVariant::Consistent)),
            eps_list: Some(self.eps_list.unwrap_or_else(reference_eps)),
            p_grid: Some(self.p_grid.unwrap_or_else(|| vec![0.0, 0.5, 1.0, 2.0])),
            q_grid: Some(self.q_grid.unwrap_or_else(|| vec![0.0])),
            layer_p: Some(self.layer_p.unwrap_or_else(|| vec![0.0, 0.5, 1.0, 2.0])),
            window_p: Some(self.window_p.unwrap_or_else(|| vec![1.0])),
            min_order: Some(self.min_order.unwrap_or(th.boundary_order)),
            dtn_order: Some(self.dtn_order.unwrap_or(th.dtn_order)),
            layer_rel: Some(self.layer_rel.unwrap_or(th.layer_rel)),
            limit_rel: Some(self.limit_rel.unwrap_or(th.limit_rel)),
            tol_residual: Some(self.tol_residual.unwrap_or(solver.tol_residual)),
            max_iters: Some(self.max_iters.unwrap_or(solver.max_iters)),
        };
        r.validate()?;
        Ok(r)
    }

    fn validate(&self) -> Result<(), ConfigError> {
        self.params()?;
        let frac = self.layer_fraction.unwrap();
        if !(frac > 0.0 && frac < 1.0) {
            return Err(ConfigError(format!("layer_fraction must lie in (0, 1), got {frac}")));
        }
        for (name, v) in [
            ("min_order", self.min_order),
            ("dtn_order", self.dtn_order),
            ("layer_rel", self.layer_rel),
            ("limit_rel", self.limit_rel),
            ("tol_residual", self.tol_residual),
        ] {
            let v = v.unwrap();
            if !v.is_finite() || v <= 0.0 {
                return Err(ConfigError(format!("{name} must be positive, got {v}")));
            }
        }
        if self.max_iters.unwrap() == 0 {
            return Err(ConfigError("max_iters must be at least 1".into()));
        }
        for (name, list) in [("layer_p", &self.layer_p), ("window_p", &self.window_p), ("p_grid", &self.p_grid)] {
            if let Some(v) = list.as_ref().unwrap().iter().find(|p| !(**p >= 0.0) || !p.is_finite()) {
                return Err(ConfigError(format!("{name} entries must be finite and >= 0, got {v}")));
            }
        }
        if let Some(q) = self.q_grid.as_ref().unwrap().iter().find(|q| !q.is_finite()) {
            return Err(ConfigError(format!("q_grid entries must be finite, got {q}")));
        }
        self.sweep_plan()?.validate()?;
        Ok(())
    }

    pub fn params(&self) -> Result<ProblemParams, ConfigError> {
        Ok(ProblemParams::new(
            self.dim.unwrap(),
            self.radius.unwrap(),
            self.gamma.unwrap(),
            self.a0.unwrap(),
            self.eps.unwrap(),
        )?)
    }

    pub fn grading(&self) -> Grading {
        match self.grading.unwrap() {
            GradingKind::Uniform => Grading::Uniform,
            GradingKind::Geometric => Grading::Geometric { layer_fraction: self.layer_fraction.unwrap() },
        }
    }

    pub fn mesh(&self, params: &ProblemParams) -> Result<Mesh, ConfigError> {
        Ok(build_mesh(params, self.mesh_n.unwrap(), self.grading())?)
    }

    pub fn solver(&self) -> SolverOptions {
        SolverOptions {
            tol_residual: self.tol_residual.unwrap(),
            max_iters: self.max_iters.unwrap(),
            ..SolverOptions::default()
        }
    }

    pub fn sweep_plan(&self) -> Result<SweepPlan, ConfigError> {
        let mut plan = SweepPlan::new(self.params()?, self.eps_list.clone().unwrap());
        plan.mesh = MeshPolicy { n_interior: self.mesh_n.unwrap(), grading: self.grading() };
        plan.variant = self.variant.unwrap();
        plan.layer_p = self.layer_p.clone().unwrap();
        plan.thresholds = Thresholds {
            boundary_order: self.min_order.unwrap(),
            dtn_order: self.dtn_order.unwrap(),
            layer_rel: self.layer_rel.unwrap(),
            limit_rel: self.limit_rel.unwrap(),
            ..Thresholds::default()
        };
        plan.solver = self.solver();
        Ok(plan)
    }

    /// The `(p, q)` grid of `expand`, each point checked against the domain.
    pub fn grid(&self) -> Result<Vec<LayerPoint>, ConfigError> {
        let params = self.params()?;
        let mut pts = Vec::new();
        for &p in self.p_grid.as_ref().unwrap() {
            for &q in self.q_grid.as_ref().unwrap() {
                let pt = LayerPoint::new(p, q)?;
                pt.checked_radius(&params)?;
                pts.push(pt);
            }
        }
        if pts.is_empty() {
            return Err(ConfigError("empty (p, q) grid".into()));
        }
        Ok(pts)
    }

    pub fn out_dir(&self) -> &Path {
        self.out.as_deref().unwrap()
    }

    pub fn format(&self) -> Format {
        self.format.unwrap()
    }
}
