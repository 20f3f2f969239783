//! Closed-form two-term asymptotics of the boundary layer.
//!
//! Everything here is evaluated for `a0 >= 0`; negative data are handled by
//! odd symmetry (u-side quantities flip sign, coefficients such as `C` and
//! `H` do not).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{LayerPoint, ProblemParams};
use crate::roots::bracketed_newton;
use crate::twoterm::TwoTerm;

/// Which form of the interior layer formulas to evaluate.
///
/// `Published` carries the O(1) curvature factors `(N-1)/(2R) sech^2(.)`
/// exactly as originally stated. `Consistent` re-derives the same
/// quantities keeping those terms at O(eps), which is what the numerics
/// converge to. Boundary formulas (`p = 0`) agree in both.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum LayerVariant {
    #[default]
    Published,
    Consistent,
}

impl LayerVariant {
    pub fn name(&self) -> &'static str {
        match self {
            LayerVariant::Published => "published",
            LayerVariant::Consistent => "consistent",
        }
    }
}

impl std::str::FromStr for LayerVariant {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "published" => Ok(Self::Published),
            "consistent" => Ok(Self::Consistent),
            _ => Err(format!("unknown layer variant `{s}` (expected published|consistent)")),
        }
    }
}

/// Limit boundary value: the root of `b + 2 gamma sinh(b/2) = a0`.
///
/// Odd in `a0`; `a0 = 0` gives `b = 0`.
pub fn solve_b(params: &ProblemParams) -> Result<f64> {
    params.validate()?;
    let a0 = params.a0.abs();
    if a0 == 0.0 {
        return Ok(0.0);
    }
    let g = params.gamma;
    let f = |b: f64| (b + 2.0 * g * (0.5 * b).sinh() - a0, 1.0 + g * (0.5 * b).cosh());
    let b = bracketed_newton(f, 0.0, a0, 1e-14 * a0.max(1.0), 0.0)?;
    Ok(params.sign() * b)
}

/// Frequently used functions of `b`.
#[derive(Debug, Clone, Copy)]
struct Shape {
    n: f64,
    r: f64,
    g: f64,
    b: f64,
    ch: f64,  // cosh(b/2)
    sh: f64,  // sinh(b/2)
    t4: f64,  // tanh(b/4)
    se4: f64, // sech^2(b/4)
    s4: f64,  // sinh^2(b/4)
    den: f64, // gamma cosh(b/2) + 1
}

impl Shape {
    fn new(params: &ProblemParams, b: f64) -> Self {
        let c4 = (0.25 * b).cosh();
        Self {
            n: params.dim,
            r: params.radius,
            g: params.gamma,
            b,
            ch: (0.5 * b).cosh(),
            sh: (0.5 * b).sinh(),
            t4: (0.25 * b).tanh(),
            se4: 1.0 / (c4 * c4),
            s4: (0.25 * b).sinh().powi(2),
            den: params.gamma * (0.5 * b).cosh() + 1.0,
        }
    }

    /// `N cosh^2(b/2) - 1`
    fn ncc(&self) -> f64 {
        self.n * self.ch * self.ch - 1.0
    }

    /// `kappa(x) = (N-1)/(2R) sech^2(x/4)`
    fn kappa(&self, x: f64) -> f64 {
        (self.n - 1.0) / (2.0 * self.r) / (0.25 * x).cosh().powi(2)
    }

    /// `gamma (N cosh^2(b/2) - 1) sech^2(b/4) / (gamma cosh(b/2) + 1)`
    fn a_u(&self) -> f64 {
        self.g * self.ncc() * self.se4 / self.den
    }

    /// `gamma (N - 1) sech^2(b/4) / (gamma cosh(b/2) + 1)`
    fn a_v(&self) -> f64 {
        self.g * (self.n - 1.0) * self.se4 / self.den
    }
}

/// Two-term boundary expansions of `C(u)`, `u(R)` and `u'(R)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryExpansion {
    pub b: f64,
    pub c2: TwoTerm,
    pub u_r: TwoTerm,
    pub du_r: TwoTerm,
}

pub fn expand_boundary(params: &ProblemParams) -> Result<BoundaryExpansion> {
    let b = solve_b(params)?;
    let s = Shape::new(params, b.abs());
    let sign = params.sign();
    let c2 = TwoTerm::regular(1.0, -(2.0 * s.n / s.r) * (s.ch - 1.0));
    let u_r = TwoTerm::regular(s.b, 2.0 * s.g * s.ncc() * s.t4 / (s.r * s.den));
    let du_r = TwoTerm::singular(2.0 * s.sh, -(2.0 / s.r) * s.ncc() * s.t4 / s.den);
    Ok(BoundaryExpansion { b, c2, u_r: u_r.scale(sign), du_r: du_r.scale(sign) })
}

/// Asymptotic Dirichlet-to-Neumann map applied to a two-term boundary value.
///
/// Returns the O(1/eps) + O(1) expansion of `u'(R)`.
pub fn dtn_two_term(params: &ProblemParams, u_r: TwoTerm) -> Result<TwoTerm> {
    params.validate()?;
    if u_r.order != 0 {
        return Err(Error::Precondition(format!(
            "boundary value must be an O(1) two-term quantity, got order {}",
            u_r.order
        )));
    }
    let l = u_r.lead;
    if !(l > 0.0) {
        return Err(Error::Precondition(format!("leading boundary value must be positive, got {l}")));
    }
    let (n, r) = (params.dim, params.radius);
    let sinh_half = u_r.compose(|x| (0.5 * x).sinh(), |x| 0.5 * (0.5 * x).cosh());
    let curv = (2.0 / r) * (0.25 * l).tanh() * (n * (0.5 * l).cosh().powi(2) - 1.0);
    Ok(TwoTerm::singular(2.0 * sinh_half.lead, 2.0 * sinh_half.corr - curv))
}

/// Residual of the defining equation of `k(p)` for `0 < k <= b`.
///
/// Decreasing in `k`; zero at the profile height.
pub fn k_equation(params: &ProblemParams, b: f64, k: f64, p: f64, variant: LayerVariant) -> f64 {
    let w = match variant {
        LayerVariant::Published => 1.0,
        LayerVariant::Consistent => 0.0,
    };
    let k1 = w * (params.dim - 1.0) / (2.0 * params.radius);
    let tb = (0.25 * b).tanh();
    let tk = (0.25 * k).tanh();
    (1.0 + k1) * (tb.ln() - tk.ln()) + 0.5 * k1 * (tk * tk - tb * tb) - p
}

fn k_equation_dk(params: &ProblemParams, k: f64, variant: LayerVariant) -> f64 {
    let w = match variant {
        LayerVariant::Published => 1.0,
        LayerVariant::Consistent => 0.0,
    };
    let k1 = w * (params.dim - 1.0) / (2.0 * params.radius);
    let tk = (0.25 * k).tanh();
    let se = 1.0 / (0.25 * k).cosh().powi(2);
    0.25 * se * (-(1.0 + k1) / tk + k1 * tk)
}

/// Limiting profile height `k(p)` at scaled depth `p` (signed like `a0`).
pub fn solve_k_of_p(params: &ProblemParams, p: f64, variant: LayerVariant) -> Result<f64> {
    if !(p >= 0.0) || !p.is_finite() {
        return Err(Error::Domain(format!("layer depth p must be >= 0, got {p}")));
    }
    let b = solve_b(params)?.abs();
    if b == 0.0 || p == 0.0 {
        return Ok(params.sign() * b);
    }
    let guess = 4.0 * ((0.25 * b).tanh() * (-p).exp()).atanh();
    if variant == LayerVariant::Consistent {
        return Ok(params.sign() * guess);
    }
    let f = |k: f64| k_equation(params, b, k, p, variant);
    let mut lo = 0.5 * b.min(guess);
    let mut expansions = 0;
    while f(lo) <= 0.0 {
        lo *= 0.5;
        expansions += 1;
        if expansions > 2000 || lo == 0.0 {
            return Err(Error::Root(format!("could not bracket k(p) for p = {p}")));
        }
    }
    let k = bracketed_newton(|k| (f(k), k_equation_dk(params, k, variant)), lo, b, 1e-13, 0.0)?;
    Ok(params.sign() * k)
}

/// Two-term interior layer values at a layer point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LayerExpansion {
    pub k: f64,
    pub h: f64,
    pub u: TwoTerm,
    pub du: TwoTerm,
}

fn coefficient_h(s: &Shape, k: f64, pt: &LayerPoint, variant: LayerVariant) -> f64 {
    let (p, q) = (pt.p, pt.q);
    match variant {
        LayerVariant::Published => {
            let kb = 1.0 + s.kappa(s.b);
            let kk = 1.0 + s.kappa(k);
            s.a_u() * kb / kk - (2.0 * q - 4.0 * s.n * p * s.s4) / kk
        }
        LayerVariant::Consistent => {
            let tk = (0.25 * k).tanh();
            s.a_u() + (4.0 * s.n * s.s4 + (s.n - 1.0)) * p + 0.5 * (s.n - 1.0) * (tk * tk - s.t4 * s.t4) - 2.0 * q
        }
    }
}

fn coefficient_h_sharp(s: &Shape, k: f64, pt: &LayerPoint, variant: LayerVariant) -> f64 {
    let (p, q) = (pt.p, pt.q);
    match variant {
        LayerVariant::Published => {
            let kb = 1.0 + s.kappa(s.b);
            let kk = 1.0 + s.kappa(k);
            s.a_v() * kb / kk - 2.0 * q / kk
        }
        LayerVariant::Consistent => {
            let tk = (0.25 * k).tanh();
            s.a_v() + (s.n - 1.0) * p + 0.5 * (s.n - 1.0) * (tk * tk - s.t4 * s.t4) - 2.0 * q
        }
    }
}

pub fn layer_expansion(params: &ProblemParams, pt: &LayerPoint, variant: LayerVariant) -> Result<LayerExpansion> {
    let pt = LayerPoint::new(pt.p, pt.q)?;
    let b = solve_b(params)?.abs();
    if b == 0.0 {
        return Ok(LayerExpansion { k: 0.0, h: 0.0, u: TwoTerm::ZERO, du: TwoTerm::singular(0.0, 0.0) });
    }
    let s = Shape::new(params, b);
    let k = solve_k_of_p(&params.positive(), pt.p, variant)?;
    let h = coefficient_h(&s, k, &pt, variant);
    let shk = (0.5 * k).sinh();
    let u = TwoTerm::regular(k, h * shk / s.r);
    let bracket = 2.0 * s.n * s.s4 + 0.5 * (s.n - 1.0) / (0.25 * k).cosh().powi(2) - 0.5 * h * (0.5 * k).cosh();
    let du = TwoTerm::singular(2.0 * shk, -2.0 * shk * bracket / s.r);
    let sign = params.sign();
    Ok(LayerExpansion { k: sign * k, h, u: u.scale(sign), du: du.scale(sign) })
}

/// Two-term expansions of the local model (`C = 1`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalExpansion {
    pub v_r: TwoTerm,
    pub dv_r: TwoTerm,
    pub h_sharp: f64,
    pub v_layer: TwoTerm,
    pub dv_layer: TwoTerm,
}

pub fn local_model_expansions(
    params: &ProblemParams,
    pt: &LayerPoint,
    variant: LayerVariant,
) -> Result<LocalExpansion> {
    let pt = LayerPoint::new(pt.p, pt.q)?;
    let b = solve_b(params)?.abs();
    if b == 0.0 {
        let z = TwoTerm::ZERO;
        let zs = TwoTerm::singular(0.0, 0.0);
        return Ok(LocalExpansion { v_r: z, dv_r: zs, h_sharp: 0.0, v_layer: z, dv_layer: zs });
    }
    let s = Shape::new(params, b);
    let m = s.n - 1.0;
    let v_r = TwoTerm::regular(b, (m / s.r) * 2.0 * s.g * s.t4 / s.den);
    let dv_r = TwoTerm::singular(2.0 * s.sh, -(m / s.r) * 2.0 * s.t4 / s.den);
    let k = solve_k_of_p(&params.positive(), pt.p, variant)?;
    let h_sharp = coefficient_h_sharp(&s, k, &pt, variant);
    let shk = (0.5 * k).sinh();
    let v_layer = TwoTerm::regular(k, h_sharp * shk / s.r);
    let bracket = 0.5 * m / (0.25 * k).cosh().powi(2) - 0.5 * h_sharp * (0.5 * k).cosh();
    let dv_layer = TwoTerm::singular(2.0 * shk, -2.0 * shk * bracket / s.r);
    let sign = params.sign();
    Ok(LocalExpansion {
        v_r: v_r.scale(sign),
        dv_r: dv_r.scale(sign),
        h_sharp,
        v_layer: v_layer.scale(sign),
        dv_layer: dv_layer.scale(sign),
    })
}

/// Limits of the nonlocal-minus-local differences.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComparisonLimits {
    /// `lim (u(R) - v(R)) / eps`
    pub boundary_value: f64,
    /// `lim (u'(R) - v'(R))`
    pub boundary_slope: f64,
    /// `lim (u(r) - v(r)) / eps` at the layer point
    pub layer_value: f64,
    /// `lim (u'(r) - v'(r))` at the layer point
    pub layer_slope: f64,
}

pub fn comparison_limits(params: &ProblemParams, pt: &LayerPoint, variant: LayerVariant) -> Result<ComparisonLimits> {
    let pt = LayerPoint::new(pt.p, pt.q)?;
    let b = solve_b(params)?.abs();
    if b == 0.0 {
        return Ok(ComparisonLimits { boundary_value: 0.0, boundary_slope: 0.0, layer_value: 0.0, layer_slope: 0.0 });
    }
    let s = Shape::new(params, b);
    let k = solve_k_of_p(&params.positive(), pt.p, variant)?;
    let boundary_value = (s.n / s.r) * 2.0 * s.g * s.sh * (s.ch - 1.0) / s.den;
    let boundary_slope = -(2.0 * s.n / s.r) * (s.ch - 1.0) * s.sh / s.den;
    let shk = (0.5 * k).sinh();
    let (layer_value, gap) = match variant {
        LayerVariant::Published => {
            let kb = 1.0 + s.kappa(s.b);
            let kk = 1.0 + s.kappa(k);
            let w = s.g * kb / s.den + pt.p;
            let value = 4.0 * s.n * s.s4 * shk / (s.r + 0.5 * (s.n - 1.0) / (0.25 * k).cosh().powi(2)) * w;
            (value, 4.0 * s.n * s.s4 * w / kk)
        }
        LayerVariant::Consistent => {
            let w = s.g / s.den + pt.p;
            (4.0 * s.n * s.s4 * shk / s.r * w, 4.0 * s.n * s.s4 * w)
        }
    };
    let layer_slope = (2.0 / s.r) * shk * (-2.0 * s.n * s.s4 + 0.5 * gap * (0.5 * k).cosh());
    let sign = params.sign();
    Ok(ComparisonLimits {
        boundary_value: sign * boundary_value,
        boundary_slope: sign * boundary_slope,
        layer_value: sign * layer_value,
        layer_slope: sign * layer_slope,
    })
}

/// Asymptotics of the point where `u` has dropped half-way from `u(R)` to `b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HalfHeight {
    /// layer coordinate `q*` (with `p = 0`)
    pub q_star: f64,
    /// `lim (R - r) / eps^2 = q*/R`
    pub depth: f64,
    pub u: TwoTerm,
    pub du: TwoTerm,
}

pub fn half_height(params: &ProblemParams, variant: LayerVariant) -> Result<HalfHeight> {
    let b = solve_b(params)?.abs();
    let s = Shape::new(params, b);
    let q_star = match variant {
        LayerVariant::Published => 0.25 * s.a_u() * (1.0 + s.kappa(b)),
        LayerVariant::Consistent => 0.25 * s.a_u(),
    };
    let u = TwoTerm::regular(b, s.g * s.ncc() * s.t4 / (s.r * s.den));
    let du = TwoTerm::singular(
        2.0 * s.sh,
        -(1.0 / s.r) * (4.0 * s.n * s.sh * s.s4 + 2.0 * (s.n - 1.0) * s.t4 - s.g * s.ncc() * s.t4 * s.ch / s.den),
    );
    let sign = params.sign();
    Ok(HalfHeight { q_star, depth: q_star / s.r, u: u.scale(sign), du: du.scale(sign) })
}

/// Exponential interior bound `amplitude * exp(-rate (R - r)/eps)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayBound {
    pub amplitude: f64,
    pub rate: f64,
}

impl DecayBound {
    pub fn new(params: &ProblemParams) -> Self {
        let a0 = params.a0.abs();
        Self { amplitude: 2.0 * a0, rate: 0.125 / a0.cosh().sqrt() }
    }

    pub fn at(&self, params: &ProblemParams, r: f64) -> Result<f64> {
        if !(0.0..=params.radius).contains(&r) {
            return Err(Error::Domain(format!("radius {r} outside [0, {}]", params.radius)));
        }
        Ok(self.amplitude * (-self.rate * (params.radius - r) / params.eps).exp())
    }
}

/// Upper bound for `max(|u(r)|, gamma eps |u'(r)|)`.
pub fn decay_envelope(params: &ProblemParams, r: f64) -> Result<f64> {
    params.validate()?;
    DecayBound::new(params).at(params, r)
}

/// Every closed-form quantity for one parameter set and one layer point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpansionReport {
    pub params: ProblemParams,
    pub point: LayerPoint,
    pub variant: LayerVariant,
    pub b: f64,
    pub c2: TwoTerm,
    pub u_r2: TwoTerm,
    pub du_r2: TwoTerm,
    /// DtN map at the supplied boundary value; absent when `b = 0`.
    pub dtn2: Option<TwoTerm>,
    pub k_of_p: f64,
    pub h: f64,
    pub u_layer2: TwoTerm,
    pub du_layer2: TwoTerm,
    pub v_r2: TwoTerm,
    pub dv_r2: TwoTerm,
    pub h_sharp: f64,
    pub v_layer2: TwoTerm,
    pub dv_layer2: TwoTerm,
    pub diff_limits: ComparisonLimits,
    pub half_height: HalfHeight,
    pub decay: DecayBound,
}

/// Assemble an [`ExpansionReport`]. The DtN map is applied to `u_r`
/// when given, otherwise to the two-term boundary expansion.
pub fn expansion_report(
    params: &ProblemParams,
    point: &LayerPoint,
    variant: LayerVariant,
    u_r: Option<TwoTerm>,
) -> Result<ExpansionReport> {
    let bnd = expand_boundary(params)?;
    let lay = layer_expansion(params, point, variant)?;
    let loc = local_model_expansions(params, point, variant)?;
    let sign = params.sign();
    let dtn2 = if bnd.b == 0.0 {
        None
    } else {
        let arg = u_r.unwrap_or(bnd.u_r).scale(sign);
        Some(dtn_two_term(params, arg)?.scale(sign))
    };
    Ok(ExpansionReport {
        params: *params,
        point: *point,
        variant,
        b: bnd.b,
        c2: bnd.c2,
        u_r2: bnd.u_r,
        du_r2: bnd.du_r,
        dtn2,
        k_of_p: lay.k,
        h: lay.h,
        u_layer2: lay.u,
        du_layer2: lay.du,
        v_r2: loc.v_r,
        dv_r2: loc.dv_r,
        h_sharp: loc.h_sharp,
        v_layer2: loc.v_layer,
        dv_layer2: loc.dv_layer,
        diff_limits: comparison_limits(params, point, variant)?,
        half_height: half_height(params, variant)?,
        decay: DecayBound::new(params),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(n: f64, r: f64, g: f64, a0: f64, eps: f64) -> ProblemParams {
        ProblemParams::new(n, r, g, a0, eps).unwrap()
    }

    const BOTH: [LayerVariant; 2] = [LayerVariant::Published, LayerVariant::Consistent];

    #[test]
    fn b_from_forward_evaluation() {
        let a0 = 1.0 + 2.0 * 0.5f64.sinh();
        assert!((solve_b(&params(2.0, 1.0, 1.0, a0, 0.1)).unwrap() - 1.0).abs() < 1e-13);
        let a0 = 0.5 + 4.0 * 0.25f64.sinh();
        assert!((solve_b(&params(2.0, 1.0, 2.0, a0, 0.1)).unwrap() - 0.5).abs() < 1e-13);
        assert_eq!(solve_b(&params(2.0, 1.0, 1.0, 0.0, 0.1)).unwrap(), 0.0);
    }

    #[test]
    fn trivial_datum_gives_zero_expansions() {
        let p = params(2.0, 1.0, 1.0, 0.0, 0.05);
        let e = expand_boundary(&p).unwrap();
        assert_eq!((e.c2.value(0.05), e.u_r.value(0.05), e.du_r.value(0.05)), (1.0, 0.0, 0.0));
        for v in BOTH {
            let l = layer_expansion(&p, &LayerPoint::new(1.0, 0.3).unwrap(), v).unwrap();
            assert_eq!((l.k, l.u.value(0.05), l.du.value(0.05)), (0.0, 0.0, 0.0));
            let c = comparison_limits(&p, &LayerPoint::new(1.0, 0.0).unwrap(), v).unwrap();
            assert_eq!([c.boundary_value, c.boundary_slope, c.layer_value, c.layer_slope], [0.0; 4]);
        }
    }

    #[test]
    fn c2_direct_value() {
        let a0 = 1.0 + 2.0 * 0.5f64.sinh();
        let e = expand_boundary(&params(3.0, 1.0, 1.0, a0, 0.01)).unwrap();
        let expected = 1.0 - 0.06 * (0.5f64.cosh() - 1.0);
        assert!((e.c2.value(0.01) - expected).abs() < 1e-14);
    }

    #[test]
    fn large_radius_drops_curvature() {
        let p = params(2.0, 1e12, 1.0, 2.0, 0.01);
        let e = expand_boundary(&p).unwrap();
        assert!((e.u_r.value(0.01) - e.b).abs() < 1e-12);
        assert!((e.du_r.value(0.01) - 200.0 * (0.5 * e.b).sinh()).abs() < 1e-9);
        let d = dtn_two_term(&p, TwoTerm::regular(e.b, 0.0)).unwrap();
        assert!((d.value(0.01) - 200.0 * (0.5 * e.b).sinh()).abs() < 1e-9);
    }

    #[test]
    fn dtn_rejects_nonpositive_lead() {
        let p = params(2.0, 1.0, 1.0, 2.0, 0.01);
        assert!(dtn_two_term(&p, TwoTerm::regular(0.0, 1.0)).is_err());
        assert!(dtn_two_term(&p, TwoTerm::regular(-0.5, 1.0)).is_err());
    }

    #[test]
    fn k_of_p_edges() {
        let p = params(3.0, 1.0, 1.0, 2.0, 0.01);
        let b = solve_b(&p).unwrap();
        for v in BOTH {
            assert_eq!(solve_k_of_p(&p, 0.0, v).unwrap(), b);
            assert!(solve_k_of_p(&p, -1.0, v).is_err());
            let far = solve_k_of_p(&p, 80.0, v).unwrap();
            assert!(far > 0.0 && far < 1e-15);
        }
    }

    #[test]
    fn half_height_matches_layer_formula() {
        let p = params(2.0, 1.0, 1.0, 2.0, 0.01);
        let bnd = expand_boundary(&p).unwrap();
        for v in BOTH {
            let hh = half_height(&p, v).unwrap();
            let lay = layer_expansion(&p, &LayerPoint::new(0.0, hh.q_star).unwrap(), v).unwrap();
            assert!((lay.u.corr - 0.5 * bnd.u_r.corr).abs() < 1e-13);
            assert!((lay.u.corr - hh.u.corr).abs() < 1e-13);
            assert!((lay.du.corr - hh.du.corr).abs() < 1e-12);
            assert_eq!(lay.du.lead, hh.du.lead);
        }
        let pubq = half_height(&p, LayerVariant::Published).unwrap().q_star;
        let conq = half_height(&p, LayerVariant::Consistent).unwrap().q_star;
        let b = bnd.b;
        let kappa = 0.5 / (0.25 * b).cosh().powi(2);
        assert!((pubq / conq - (1.0 + kappa)).abs() < 1e-13);
    }

    #[test]
    fn comparison_first_limit_is_minus_gamma_slope() {
        for g in [0.3, 1.0, 4.0] {
            let p = params(2.7, 1.3, g, 3.0, 0.01);
            let c = comparison_limits(&p, &LayerPoint::BOUNDARY, LayerVariant::Published).unwrap();
            assert!((c.boundary_value + g * c.boundary_slope).abs() < 1e-13);
            assert!((c.layer_slope - c.boundary_slope).abs() < 1e-13);
        }
    }

    #[test]
    fn envelope_endpoints() {
        let p = params(2.0, 1.0, 1.0, 2.0, 0.01);
        assert_eq!(decay_envelope(&p, 1.0).unwrap(), 4.0);
        assert!(decay_envelope(&p.with_eps(1e-3), 0.0).unwrap() < 1e-25);
        assert!(decay_envelope(&p, 1.5).is_err());
        assert!(decay_envelope(&p, -0.1).is_err());
    }

    #[test]
    fn variant_parses() {
        assert_eq!("consistent".parse::<LayerVariant>().unwrap(), LayerVariant::Consistent);
        assert!("other".parse::<LayerVariant>().is_err());
    }
}
