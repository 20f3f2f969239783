mod common;

use common::reference_entries;
use sinhlayer::harness::{
    analyze_sweep, dichotomy_check, half_height_point, interpolate_at, run_sweep, solve_sweep, SweepPlan,
};
use sinhlayer::solver::reconstruct_derivative;
use sinhlayer::{LayerPoint, LayerVariant, ProblemParams};

fn consistent_report() -> sinhlayer::harness::SweepReport {
    analyze_sweep(&SweepPlan::reference(), reference_entries()).unwrap()
}

#[test]
fn reference_sweep_passes_with_consistent_coefficients() {
    let rep = consistent_report();
    let failing: Vec<&str> = rep.channels.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect();
    assert!(rep.pass, "failing channels: {failing:?}");
    assert!(!rep.trivial);
}

#[test]
fn dropping_the_largest_eps_barely_moves_the_fits() {
    for fit in consistent_report().fits {
        let drop = fit.slope_without_largest.expect("six sweep points");
        let slope = fit.slope.unwrap();
        assert!((drop - slope).abs() < 0.15, "{}: {slope} vs {drop}", fit.channel);
    }
}

#[test]
fn layer_uniformity_channel_decreases() {
    let rep = consistent_report();
    let ch = rep.channel("max_p u_layer").unwrap();
    assert!(ch.errors.windows(2).all(|w| w[1] < w[0]), "{:?}", ch.errors);
}

#[test]
fn published_layer_channels_do_not_vanish() {
    let mut plan = SweepPlan::reference();
    plan.variant = LayerVariant::Published;
    let rep = analyze_sweep(&plan, reference_entries()).unwrap();
    assert!(rep.channel("u_layer(p=0,q=0)").unwrap().pass);
    assert!(!rep.channel("u_layer(p=1,q=0)").unwrap().pass);
    assert!(!rep.pass);
}

#[test]
fn trivial_plan_is_flagged() {
    let mut plan = SweepPlan::reference();
    plan.base = plan.base.with_a0(0.0);
    let rep = run_sweep(&plan).unwrap();
    assert!(rep.trivial && rep.pass);
    for c in &rep.channels {
        assert!(c.trivial, "{}", c.name);
        assert!(c.errors.iter().all(|e| *e < 1e-12));
    }
    assert!(rep.fits.iter().all(|f| f.trivial));
}

#[test]
fn sweep_is_bitwise_deterministic() {
    let plan = SweepPlan::new(ProblemParams::reference(0.08), vec![0.08, 0.04, 0.02, 0.01]);
    let a = solve_sweep(&plan).unwrap();
    let b = solve_sweep(&plan).unwrap();
    for (x, y) in a.iter().zip(&b) {
        assert!(x.u.u.iter().zip(&y.u.u).all(|(p, q)| p.to_bits() == q.to_bits()));
        assert_eq!(x.u.c.to_bits(), y.u.c.to_bits());
    }
    let ra = analyze_sweep(&plan, &a).unwrap();
    let rb = analyze_sweep(&plan, &b).unwrap();
    for (x, y) in ra.channels.iter().zip(&rb.channels) {
        assert!(x.errors.iter().zip(&y.errors).all(|(p, q)| p.to_bits() == q.to_bits()), "{}", x.name);
    }
}

#[test]
fn boundary_point_interpolates_to_node_values() {
    let s = &reference_entries()[2].u;
    let pv = interpolate_at(s, &LayerPoint::BOUNDARY).unwrap();
    let m = s.u.len() - 1;
    assert_eq!((pv.u, pv.du), (s.u[m], s.du[m]));
    let du = reconstruct_derivative(s);
    for j in (m - 300..m).step_by(17) {
        let r = s.mesh.nodes[j];
        let pv = sinhlayer::harness::interpolate_radius(s, r).unwrap();
        assert!((pv.du - du[j]).abs() <= pv.du_err.max(1e-12 * du[j].abs()));
    }
}

#[test]
fn far_points_are_rejected() {
    let s = &reference_entries()[0].u;
    let deep = LayerPoint::new(1e3, 0.0).unwrap();
    assert!(interpolate_at(s, &deep).is_err());
}

#[test]
fn half_height_needs_a_layer() {
    let s = &reference_entries()[3].u;
    let pv = half_height_point(s).unwrap();
    let b = common::b_oracle(1.0, 2.0);
    let m = s.u.len() - 1;
    assert!((pv.u - 0.5 * (s.u[m] + b)).abs() < 1e-10);
    assert!(pv.r < s.params.radius);
}

#[test]
fn dichotomy_holds_on_the_reference_sweep() {
    let sols: Vec<_> = reference_entries().iter().map(|e| e.u.clone()).collect();
    for variant in [LayerVariant::Consistent, LayerVariant::Published] {
        let rep = dichotomy_check(&sols, variant).unwrap();
        assert!(rep.pass, "{variant:?}: {rep:?}");
        assert!(!rep.trivial);
        let c1 = rep.inside.iter().find(|r| r.c == 1.0).unwrap();
        assert!(c1.floor_u > 0.0 && c1.floor_du > 0.0);
        assert!(rep.outside.u.iter().zip(&rep.outside.ceiling_u).all(|(u, c)| u <= c));
    }
    assert!(dichotomy_check(&sols[..3], LayerVariant::Consistent).is_err());
}
