mod common;

use proptest::prelude::*;

use common::{b_oracle, closed, k_oracle};
use sinhlayer::asymptotics::{
    comparison_limits, decay_envelope, dtn_two_term, expand_boundary, half_height, k_equation, layer_expansion,
    local_model_expansions, solve_b, solve_k_of_p,
};
use sinhlayer::{LayerPoint, LayerVariant, ProblemParams, TwoTerm};

const VARIANTS: [LayerVariant; 2] = [LayerVariant::Published, LayerVariant::Consistent];

fn params(n: f64, r: f64, g: f64, a0: f64, eps: f64) -> ProblemParams {
    ProblemParams::new(n, r, g, a0, eps).unwrap()
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1e-300)
}

#[test]
fn b_from_forward_evaluation() {
    let b = solve_b(&params(2.0, 1.0, 1.0, 1.0 + 2.0 * 0.5f64.sinh(), 0.1)).unwrap();
    assert!((b - 1.0).abs() < 1e-13);
    let b = solve_b(&params(2.0, 1.0, 2.0, 0.5 + 4.0 * 0.25f64.sinh(), 0.1)).unwrap();
    assert!((b - 0.5).abs() < 1e-13);
    assert_eq!(solve_b(&params(2.0, 1.0, 1.0, 0.0, 0.1)).unwrap(), 0.0);
}

#[test]
fn boundary_expansion_matches_written_out_formulas() {
    let p = params(3.0, 1.0, 1.0, 1.0 + 2.0 * 0.5f64.sinh(), 0.01);
    let e = expand_boundary(&p).unwrap();
    let b = b_oracle(1.0, p.a0);
    assert!((e.c2.value(0.01) - (1.0 - 0.06 * (0.5f64.cosh() - 1.0))).abs() < 1e-13);
    assert!(close(e.u_r.value(0.01), closed::u_r2(3.0, 1.0, 1.0, b, 0.01), 1e-12));
    assert!(close(e.du_r.value(0.01), closed::du_r2(3.0, 1.0, 1.0, b, 0.01), 1e-12));
    assert!(close(e.c2.value(0.01), closed::c2(3.0, 1.0, b, 0.01), 1e-12));
}

#[test]
fn k_matches_bisection_oracle() {
    // N=3, R=1, b=1
    let p = params(3.0, 1.0, 1.0, 1.0 + 2.0 * 0.5f64.sinh(), 0.01);
    let b = solve_b(&p).unwrap();
    for variant in VARIANTS {
        let k = solve_k_of_p(&p, 1.0, variant).unwrap();
        let oracle = k_oracle(3.0, 1.0, b, 1.0, variant == LayerVariant::Published);
        assert!((k - oracle).abs() < 1e-12, "{variant:?}: {k} vs {oracle}");
        assert!(k_equation(&p, b, k, 1.0, variant).abs() < 1e-12);
    }
}

#[test]
fn half_height_point_halves_the_boundary_correction() {
    for variant in VARIANTS {
        let p = params(2.0, 1.0, 1.0, 2.0, 0.01);
        let hh = half_height(&p, variant).unwrap();
        let lay = layer_expansion(&p, &LayerPoint::new(0.0, hh.q_star).unwrap(), variant).unwrap();
        let bnd = expand_boundary(&p).unwrap();
        assert!(close(lay.u.corr, 0.5 * bnd.u_r.corr, 1e-12));
        assert!(close(lay.du.corr, hh.du.corr, 1e-12));
        assert!(close(lay.du.lead, hh.du.lead, 1e-14));
    }
    let p = params(2.0, 1.0, 1.0, 2.0, 0.01);
    let b = b_oracle(1.0, 2.0);
    let depth = half_height(&p, LayerVariant::Published).unwrap().depth;
    assert!(close(depth, closed::half_height_depth_published(2.0, 1.0, 1.0, b), 1e-12));
}

#[test]
fn comparison_limits_scalar_cross_check() {
    // N=2, R=1, gamma=1, b=1
    let p = params(2.0, 1.0, 1.0, 1.0 + 2.0 * 0.5f64.sinh(), 0.01);
    let l = comparison_limits(&p, &LayerPoint::BOUNDARY, LayerVariant::Consistent).unwrap();
    let expect = 2.0 * 2.0 * 0.5f64.sinh() * (0.5f64.cosh() - 1.0) / (0.5f64.cosh() + 1.0);
    assert!(close(l.boundary_value, expect, 1e-12));
    assert!(close(l.boundary_value, -p.gamma * l.boundary_slope, 1e-12));
}

#[test]
fn local_corrections_vanish_without_curvature() {
    let p = params(1.0 + 1e-12, 1.0, 1.0, 2.0, 0.01);
    let b = solve_b(&p).unwrap();
    let loc = local_model_expansions(&p, &LayerPoint::BOUNDARY, LayerVariant::Consistent).unwrap();
    assert!((loc.v_r.value(0.01) - b).abs() < 1e-12);
    assert!(close(loc.v_r.value(0.01), closed::v_r2(1.0, 1.0, 1.0, b, 0.01), 1e-12));
    let p = params(2.0, 1.0, 1.0, 2.0, 0.01);
    let loc = local_model_expansions(&p, &LayerPoint::BOUNDARY, LayerVariant::Consistent).unwrap();
    assert!((loc.v_layer.corr - loc.h_sharp * (0.5 * b_oracle(1.0, 2.0)).sinh() / p.radius).abs() < 1e-12);
}

#[test]
fn dtn_on_a_large_domain_is_the_flat_map() {
    let p = params(2.0, 1e9, 1.0, 2.0, 0.01);
    let b = solve_b(&p).unwrap();
    let d = dtn_two_term(&p, TwoTerm::regular(b, 0.0)).unwrap();
    assert!(close(d.value(0.01), 200.0 * (0.5 * b).sinh(), 1e-8));
}

#[test]
fn envelope_halving_eps_doubles_exponent() {
    let p = params(2.0, 1.0, 1.0, 2.0, 0.02);
    for r in [0.0, 0.3, 0.9, 0.99] {
        let e1 = decay_envelope(&p, r).unwrap() / 4.0;
        let e2 = decay_envelope(&p.with_eps(0.01), r).unwrap() / 4.0;
        assert!(close(e2, e1 * e1, 1e-12));
        assert!(close(decay_envelope(&p, r).unwrap(), closed::decay_envelope(2.0, 1.0, 0.02, r), 1e-14));
    }
    assert_eq!(decay_envelope(&p, 1.0).unwrap(), 4.0);
    assert!(decay_envelope(&p, 1.5).is_err());
}

fn arb_params() -> impl Strategy<Value = ProblemParams> {
    (1.5f64..4.0, 0.5f64..3.0, 0.2f64..3.0, 0.05f64..5.0, 1e-3f64..0.1)
        .prop_map(|(n, r, g, a0, eps)| params(n, r, g, a0, eps))
}

proptest! {
    #[test]
    fn root_residual_is_tiny(p in arb_params()) {
        let b = solve_b(&p).unwrap();
        prop_assert!((b + 2.0 * p.gamma * (0.5 * b).sinh() - p.a0).abs() <= 1e-13 * p.a0.max(1.0));
        prop_assert!(b > 0.0 && b < p.a0);
    }

    #[test]
    fn b_increases_with_a0(p in arb_params(), da in 1e-6f64..1.0) {
        let b1 = solve_b(&p).unwrap();
        let b2 = solve_b(&p.with_a0(p.a0 + da)).unwrap();
        prop_assert!(b2 > b1);
    }

    #[test]
    fn k_decreases_with_p(p in arb_params(), p1 in 0.0f64..6.0, dp in 1e-3f64..2.0) {
        for variant in VARIANTS {
            let k1 = solve_k_of_p(&p, p1, variant).unwrap();
            let k2 = solve_k_of_p(&p, p1 + dp, variant).unwrap();
            prop_assert!(k2 < k1 && k2 > 0.0);
            let b = solve_b(&p).unwrap();
            prop_assert!(k_equation(&p, b, k2, p1 + dp, variant).abs() <= 1e-12);
        }
    }

    #[test]
    fn layer_at_boundary_reproduces_boundary_expansion(p in arb_params()) {
        let bnd = expand_boundary(&p).unwrap();
        for variant in VARIANTS {
            let lay = layer_expansion(&p, &LayerPoint::BOUNDARY, variant).unwrap();
            prop_assert!(close(lay.u.value(p.eps), bnd.u_r.value(p.eps), 1e-12));
            prop_assert!(close(lay.du.value(p.eps), bnd.du_r.value(p.eps), 1e-12));
        }
        let dtn = dtn_two_term(&p, bnd.u_r).unwrap();
        prop_assert!(close(dtn.value(p.eps), bnd.du_r.value(p.eps), 1e-12));
    }

    #[test]
    fn layer_gap_equals_comparison_limit(p in arb_params(), pp in 0.0f64..3.0, q in -1.0f64..1.0) {
        let pt = LayerPoint::new(pp, q).unwrap();
        for variant in VARIANTS {
            let lay = layer_expansion(&p, &pt, variant).unwrap();
            let loc = local_model_expansions(&p, &pt, variant).unwrap();
            let lim = comparison_limits(&p, &pt, variant).unwrap();
            // equal leads, so (u2 - v2)/eps is the difference of the corrections
            prop_assert_eq!(lay.u.lead, loc.v_layer.lead);
            let gap = lay.u.corr - loc.v_layer.corr;
            prop_assert!((gap - lim.layer_value).abs() <= 1e-12 * lim.layer_value.abs().max(1.0),
                "{:?}: {} vs {}", variant, gap, lim.layer_value);
            let slope = lay.du.corr - loc.dv_layer.corr;
            prop_assert!((slope - lim.layer_slope).abs() <= 1e-12 * lim.layer_slope.abs().max(1.0));
        }
    }

    #[test]
    fn expansions_are_odd_in_a0(p in arb_params(), pp in 0.0f64..3.0, q in -1.0f64..1.0) {
        let m = p.with_a0(-p.a0);
        let pt = LayerPoint::new(pp, q).unwrap();
        prop_assert_eq!(solve_b(&m).unwrap(), -solve_b(&p).unwrap());
        let (a, b) = (expand_boundary(&p).unwrap(), expand_boundary(&m).unwrap());
        prop_assert_eq!(a.u_r.scale(-1.0), b.u_r);
        prop_assert_eq!(a.du_r.scale(-1.0), b.du_r);
        prop_assert_eq!(a.c2, b.c2);
        for variant in VARIANTS {
            let (x, y) = (layer_expansion(&p, &pt, variant).unwrap(), layer_expansion(&m, &pt, variant).unwrap());
            prop_assert_eq!(x.u.scale(-1.0), y.u);
            prop_assert_eq!(x.du.scale(-1.0), y.du);
            let (x, y) = (local_model_expansions(&p, &pt, variant).unwrap(), local_model_expansions(&m, &pt, variant).unwrap());
            prop_assert_eq!(x.v_layer.scale(-1.0), y.v_layer);
            let (x, y) = (comparison_limits(&p, &pt, variant).unwrap(), comparison_limits(&m, &pt, variant).unwrap());
            prop_assert_eq!(-x.layer_slope, y.layer_slope);
        }
    }

    #[test]
    fn envelope_decreases_into_the_interior(p in arb_params(), r1 in 0.0f64..1.0, r2 in 0.0f64..1.0) {
        let (lo, hi) = if r1 < r2 { (r1, r2) } else { (r2, r1) };
        prop_assume!(hi - lo > 1e-9);
        let e_lo = decay_envelope(&p, lo * p.radius).unwrap();
        let e_hi = decay_envelope(&p, hi * p.radius).unwrap();
        prop_assert!(e_lo <= e_hi);
        prop_assert!(e_hi <= 2.0 * p.a0);
    }
}
