use std::f64::consts::PI;

use proptest::prelude::*;
use z3pf::algebra::{displacement, PhasePoint};
use z3pf::gates::{diagonal_gate, theorem1_check};
use z3pf::hierarchy::{diagonal_from_phases, diagonal_level, hierarchy_level, Classifier, Phase};

#[test]
fn closed_form_agrees_with_classifier_over_27() {
    let mut classifier = Classifier::new();
    for n1 in 0..27 {
        for n2 in 0..27 {
            let phases = [Phase::new(0, 27), Phase::new(n1, 27), Phase::new(n2, 27)];
            let closed = diagonal_level(&phases).unwrap().level;
            let u = diagonal_from_phases(&phases);
            let numeric = classifier.classify(&u, 6).unwrap().level;
            assert_eq!(closed, numeric, "phases (0, {n1}, {n2})/27");
            assert!(closed.unwrap() <= 6);
        }
    }
}

#[test]
fn level_eight_reached_only_at_81() {
    let phases = [Phase::new(0, 1), Phase::new(0, 1), Phase::new(1, 81)];
    assert_eq!(diagonal_level(&phases).unwrap().level, Some(8));
    let u = diagonal_gate(2.0 * PI / 81.0);
    assert_eq!(hierarchy_level(&u, 8).unwrap().level, Some(8));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn global_phase_and_pauli_factors_do_not_change_level(
        n1 in 0i64..27, n2 in 0i64..27, shift in 0i64..27, x in 0i64..3, z in 0i64..3,
    ) {
        let phases = [Phase::new(shift, 27), Phase::new(n1 + shift, 27), Phase::new(n2 + shift, 27)];
        let closed = diagonal_level(&phases).unwrap().level;
        let u = &diagonal_from_phases(&phases) * &displacement(PhasePoint::new(x, z));
        prop_assert_eq!(hierarchy_level(&u, 6).unwrap().level, closed);
    }

    #[test]
    fn fourier_conjugation_preserves_diagonal_levels(n1 in 0i64..9, n2 in 0i64..9) {
        let phases = [Phase::new(0, 9), Phase::new(n1, 9), Phase::new(n2, 9)];
        prop_assert!(theorem1_check(&diagonal_from_phases(&phases)).unwrap());
    }
}
