//! Browser bindings. Every entry point takes and returns JSON text; the
//! `*_json` functions are plain Rust and carry the logic.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use sinhlayer::asymptotics::{layer_expansion, solve_b};
use sinhlayer::concentration::{standard_f_suite, weight_full, Mode};
use sinhlayer::harness::interpolate_at;
use sinhlayer::solver::solve;
use sinhlayer::{build_mesh, Grading, LayerPoint, LayerVariant, Model, ProblemParams, RadialSolution, SolverOptions};

/// Largest profile length sent back to the page.
const MAX_POINTS: usize = 600;

fn field(v: &Value, key: &str, default: f64) -> Result<f64, String> {
    match v.get(key) {
        None | Some(Value::Null) => Ok(default),
        Some(x) => x.as_f64().ok_or_else(|| format!("`{key}` must be a number")),
    }
}

fn parse(input: &str) -> Result<(ProblemParams, usize), String> {
    let v: Value = serde_json::from_str(input).map_err(|e| e.to_string())?;
    let params = ProblemParams::new(
        field(&v, "N", 2.0)?,
        field(&v, "R", 1.0)?,
        field(&v, "gamma", 1.0)?,
        field(&v, "a0", 2.0)?,
        field(&v, "eps", 0.02)?,
    )
    .map_err(|e| e.to_string())?;
    let n = field(&v, "mesh_n", 2000.0)?;
    if !(10.0..=20000.0).contains(&n) {
        return Err(format!("mesh_n must lie in [10, 20000], got {n}"));
    }
    Ok((params, n as usize))
}

fn solve_both(params: &ProblemParams, n: usize) -> Result<(RadialSolution, RadialSolution), String> {
    let mesh = build_mesh(params, n, Grading::default()).map_err(|e| e.to_string())?;
    let opts = SolverOptions::default();
    let u = solve(params, &mesh, Model::Nonlocal, &opts).map_err(|e| e.to_string())?;
    let v = solve(params, &mesh, Model::Local, &opts).map_err(|e| e.to_string())?;
    Ok((u, v))
}

/// Indices spread over the mesh, always keeping the last node.
fn thin(len: usize) -> Vec<usize> {
    let step = len.div_ceil(MAX_POINTS).max(1);
    let mut idx: Vec<usize> = (0..len).step_by(step).collect();
    if idx.last() != Some(&(len - 1)) {
        idx.push(len - 1);
    }
    idx
}

/// Nonlocal and local profiles on a shared mesh.
pub fn profiles_json(input: &str) -> Result<String, String> {
    let (params, n) = parse(input)?;
    let (u, v) = solve_both(&params, n)?;
    let idx = thin(u.u.len());
    let pick = |xs: &[f64]| idx.iter().map(|&j| xs[j]).collect::<Vec<f64>>();
    Ok(json!({
        "r": pick(&u.mesh.nodes),
        "u": pick(&u.u),
        "v": pick(&v.u),
        "C": u.c,
        "b": solve_b(&params).map_err(|e| e.to_string())?,
        "iters": u.newton_iters,
    })
    .to_string())
}

/// Numerical `u(R - p eps)` next to both two-term layer predictions.
pub fn layer_json(input: &str) -> Result<String, String> {
    let (params, n) = parse(input)?;
    let (u, _) = solve_both(&params, n)?;
    let ps: Vec<f64> = (0..=40).map(|i| 0.1 * i as f64).collect();
    let mut num = Vec::new();
    let mut published = Vec::new();
    let mut consistent = Vec::new();
    for &p in &ps {
        let pt = LayerPoint::new(p, 0.0).map_err(|e| e.to_string())?;
        num.push(interpolate_at(&u, &pt).map_err(|e| e.to_string())?.u);
        for (variant, out) in [(LayerVariant::Published, &mut published), (LayerVariant::Consistent, &mut consistent)] {
            let lay = layer_expansion(&params, &pt, variant).map_err(|e| e.to_string())?;
            out.push(lay.u.value(params.eps));
        }
    }
    Ok(json!({ "p": ps, "numerical": num, "published": published, "consistent": consistent }).to_string())
}

/// Limit weights of the standard test functions against `b` in `(0, b_max]`.
pub fn weights_json(b_max: f64) -> Result<String, String> {
    if !(b_max > 0.0 && b_max <= 20.0) {
        return Err(format!("b_max must lie in (0, 20], got {b_max}"));
    }
    let bs: Vec<f64> = (1..=60).map(|i| b_max * i as f64 / 60.0).collect();
    let mut series = Vec::new();
    for f in standard_f_suite() {
        for mode in [Mode::Gradient, Mode::Value] {
            let w = bs.iter().map(|&b| weight_full(&f, b, mode)).collect::<Result<Vec<f64>, _>>();
            series.push(json!({ "F": f.name, "mode": mode.name(), "w": w.map_err(|e| e.to_string())? }));
        }
    }
    Ok(json!({ "b": bs, "series": series }).to_string())
}

#[wasm_bindgen]
pub fn profiles(input: &str) -> Result<String, JsValue> {
    profiles_json(input).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn layer(input: &str) -> Result<String, JsValue> {
    layer_json(input).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn weights(b_max: f64) -> Result<String, JsValue> {
    weights_json(b_max).map_err(|e| JsValue::from_str(&e))
}
