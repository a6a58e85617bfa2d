use std::f64::consts::PI;

use z3pf::berry::{
    angle_distance, berry_phase_closed, berry_phase_numeric, stark_compensation, BerryLoop,
};
use z3pf::effective::loglog_slope;

/// Solid-angle oracle: a spin-½ dragged around a cone of half-angle `θ`
/// picks up `−Ω/2 = −π(1 − cos θ)` on the aligned branch.
fn cone_phase(coupling: f64, splitting: f64) -> f64 {
    let cos = (splitting / 2.0) / ((splitting / 2.0).powi(2) + coupling * coupling).sqrt();
    -PI * (1.0 - cos)
}

#[test]
fn upper_branch_matches_solid_angle() {
    for (d, w) in [(0.25, 1.0), (0.5, 0.7), (0.1, 2.0)] {
        let lp = BerryLoop::constant(d, w, 1, 1);
        let closed = berry_phase_closed(&lp).unwrap();
        assert!(angle_distance(closed, cone_phase(d, w)) < 1e-9);
    }
}

#[test]
fn error_shrinks_inversely_with_duration() {
    let lp = BerryLoop::constant(0.25, 1.0, 1, 1);
    let closed = berry_phase_closed(&lp).unwrap();
    let gap = lp.min_gap();
    let durations: Vec<f64> = (0..5).map(|k| 50.0 * 2f64.powi(k) / gap).collect();
    let errors: Vec<f64> = durations
        .iter()
        .map(|&t| angle_distance(berry_phase_numeric(&lp, t).unwrap().gamma, closed))
        .collect();
    assert!(errors.windows(2).all(|w| w[1] < w[0]));
    let exponent = -loglog_slope(&durations, &errors);
    assert!((0.7..=1.3).contains(&exponent), "exponent {exponent}");
}

#[test]
fn branches_carry_opposite_phases() {
    let upper = BerryLoop::constant(0.25, 1.0, 1, 1);
    let lower = BerryLoop::constant(0.25, 1.0, -1, 1);
    let t = 400.0 / upper.min_gap();
    let gu = berry_phase_numeric(&upper, t).unwrap().gamma;
    let gl = berry_phase_numeric(&lower, t).unwrap().gamma;
    assert!(angle_distance(gu + gl, 0.0) < 1e-3);
    // The lower-branch closed form as written lands on the negated value.
    let closed_lower = berry_phase_closed(&lower).unwrap();
    assert!(angle_distance(-gl, closed_lower) < 0.01);
}

#[test]
fn modulated_loop_converges() {
    let lp = BerryLoop::modulated(0.3, 0.4, 1.0, 1);
    let closed = berry_phase_closed(&lp).unwrap();
    let num = berry_phase_numeric(&lp, 400.0 / lp.min_gap()).unwrap();
    assert!(angle_distance(num.gamma, closed) < 0.02);
    assert!(angle_distance(berry_phase_closed(&lp.reversed()).unwrap(), -closed) < 1e-8);
}

#[test]
fn short_loops_raise_the_adiabatic_warning() {
    let lp = BerryLoop::constant(0.25, 1.0, 1, 1);
    let num = berry_phase_numeric(&lp, 5.0 / lp.min_gap()).unwrap();
    assert!(num.adiabatic_warning);
    let comp = stark_compensation(&lp, 200.0 / lp.min_gap()).unwrap();
    assert!(comp.residual_dynamical.abs() < 1e-9);
}
