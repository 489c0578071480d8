use std::f64::consts::PI;

use macroreal_core::checks::*;
use macroreal_core::dynamics::ToyModelParams;
use macroreal_core::husimi::{build_povm, AngularRect, PovmSet, Slot, SlotPartition, SphereGrid};
use macroreal_core::spin::{make_coherent_state, DickeState, SphericalAngle, SpinQuantumNumber};

fn j10() -> SpinQuantumNumber {
    SpinQuantumNumber::new(10.0).unwrap()
}

fn hemisphere_setup() -> (SphereGrid, PovmSet) {
    let partition = SlotPartition::hemispheres(j10());
    let grid = SphereGrid::for_partition(&partition).unwrap();
    let povm = build_povm(&partition, &grid).unwrap();
    (grid, povm)
}

#[test]
fn toy_channel_satisfies_condition() {
    let (grid, povm) = hemisphere_setup();
    let params = ToyModelParams::new(1.0, 0.1, 0).unwrap();
    let channel = ToyChannel { spin: j10(), params };
    let times = default_pair_times(params.exact_rate(), 6).unwrap();
    let pairs = ordered_pairs(&channel, &times);
    assert!(pairs.len() >= 10);
    let report = mr_condition_check(&channel, &DickeState::north(j10()).density(), &povm, &pairs, &grid, 0.02).unwrap();
    assert_eq!(report.verdict, Verdict::Satisfied);
    assert!(report.max_delta() < 1e-6, "{}", report.max_delta());
}

#[test]
fn closed_channel_violates_condition() {
    let (grid, povm) = hemisphere_setup();
    let channel = ClosedChannel { spin: j10(), omega: 1.0 };
    let report =
        mr_condition_check(&channel, &DickeState::north(j10()).density(), &povm, &[(PI / 4.0, PI / 2.0)], &grid, 0.02)
            .unwrap();
    assert_eq!(report.verdict, Verdict::Violated);
    assert!((report.pairs[0].delta - 0.5).abs() < 0.01, "{}", report.pairs[0].delta);
}

#[test]
fn equal_times_reproduce_the_state() {
    let (grid, povm) = hemisphere_setup();
    let closed = ClosedChannel { spin: j10(), omega: 1.0 };
    let toy = ToyChannel { spin: j10(), params: ToyModelParams::new(1.0, 0.1, 0).unwrap() };
    let rho0 = DickeState::north(j10()).density();
    for t in [0.3, 0.7] {
        // What remains is the north/south interference fringe removed by the measurement.
        let r = mr_condition_check(&closed, &rho0, &povm, &[(t, t)], &grid, 0.02).unwrap();
        assert!(r.pairs[0].delta < 1e-5, "closed {t}: {}", r.pairs[0].delta);
        let r = mr_condition_check(&toy, &rho0, &povm, &[(t, t)], &grid, 0.02).unwrap();
        assert!(r.pairs[0].delta < 1e-8, "toy {t}: {}", r.pairs[0].delta);
    }
}

#[test]
fn husimi_check_agrees_with_two_state_check() {
    let (grid, povm) = hemisphere_setup();
    let channel = ClosedChannel { spin: j10(), omega: 1.0 };
    let rho0 = DickeState::north(j10()).density();
    let pairs = [(0.1, 0.5), (0.3, 0.9), (PI / 4.0, PI / 2.0), (0.2, 1.3), (0.5, 2.0)];
    let report = mr_condition_check(&channel, &rho0, &povm, &pairs, &grid, 0.02).unwrap();
    for p in &report.pairs {
        let m = two_state_mr_check(|t: f64| (2.0 * t).cos(), p.t_i, p.t_j).unwrap();
        assert!((p.delta - m).abs() < 0.02, "({}, {}): delta {} vs m {m}", p.t_i, p.t_j, p.delta);
    }
}

#[test]
fn unreachable_outcomes_are_noted() {
    let partition = SlotPartition::new(
        j10(),
        vec![
            Slot::new("rest", vec![AngularRect::theta_band(0.0, 0.9 * PI).unwrap()]),
            Slot::new("cap", vec![AngularRect::theta_band(0.9 * PI, PI).unwrap()]),
        ],
    )
    .unwrap();
    let grid = SphereGrid::for_partition(&partition).unwrap();
    let povm = build_povm(&partition, &grid).unwrap();
    let channel = ClosedChannel { spin: j10(), omega: 1.0 };
    let rho0 = make_coherent_state(j10(), SphericalAngle::north()).density();
    let report = mr_condition_check(&channel, &rho0, &povm, &[(0.0, 0.4)], &grid, 0.02).unwrap();
    assert_eq!(report.pairs.len(), 1);
    assert_eq!(report.notes.len(), 1);
    assert!(report.notes[0].contains("slot 1"));
    assert!(report.pairs[0].delta < 1e-9);
}

#[test]
fn invalid_pairs_are_rejected() {
    let (grid, povm) = hemisphere_setup();
    let channel = ClosedChannel { spin: j10(), omega: 1.0 };
    let rho0 = DickeState::north(j10()).density();
    assert!(mr_condition_check(&channel, &rho0, &povm, &[(1.0, 0.5)], &grid, 0.02).is_err());
    let toy = ToyChannel { spin: j10(), params: ToyModelParams::new(1.0, 0.1, 0).unwrap() };
    assert!(mr_condition_check(&toy, &rho0, &povm, &[(0.1, 0.25)], &grid, 0.02).is_err());
}
