use std::path::PathBuf;

use proptest::prelude::*;

use safeswitch_core::certificates::{
    synthesize_certificate, BoundMethod, Certificate, SynthesisOptions,
};
use safeswitch_core::schema::{library_fingerprint, load_library};
use safeswitch_core::surrogate::{surrogate_walker, DesignOptions};
use safeswitch_core::switching::validate_dwell_time;
use safeswitch_core::walker::{
    load_scenario, rotate, run_scenario, LeaderModel, StrideSetDocument, WalkerMode, WalkerScenario,
};

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("data")
        .join(name)
}

fn scenario(name: &str, mode: WalkerMode) -> WalkerScenario {
    let mut s = load_scenario(&data(name)).unwrap();
    s.mode = mode;
    s
}

#[test]
fn shipped_library_matches_design() {
    let (lib, strides) = surrogate_walker(&DesignOptions::default()).unwrap();
    let shipped = load_library(&data("walker_library.json")).unwrap();
    assert_eq!(library_fingerprint(&lib), library_fingerprint(&shipped));
    let doc: StrideSetDocument =
        serde_json::from_str(&std::fs::read_to_string(data("walker_strides.json")).unwrap())
            .unwrap();
    assert_eq!(doc, StrideSetDocument::from_strides(&strides));
}

#[test]
fn shipped_certificate_licenses_switching_every_stride() {
    let lib = load_library(&data("walker_library.json")).unwrap();
    let cert = Certificate::load(&data("walker_certificate.json")).unwrap();
    cert.check_library(&lib).unwrap();
    assert_eq!(cert.n0_bar, 2);
    assert!(cert.na_bar < 1.0);
    assert!(cert.delta_hat.unwrap() > 0.0);
    let fresh = synthesize_certificate(
        &lib,
        &SynthesisOptions::defaults(&lib, BoundMethod::Analytic),
    )
    .unwrap()
    .certificate
    .unwrap();
    assert_eq!(fresh.kappa, cert.kappa);
    assert_eq!(fresh.na_bar, cert.na_bar);
}

#[test]
fn adaptive_straight_walk_tracks_leader() {
    let adaptive = run_scenario(&scenario("scenario_straight.json", WalkerMode::Adaptive)).unwrap();
    let ablation = run_scenario(&scenario("scenario_straight.json", WalkerMode::Fixed(0))).unwrap();
    assert!(adaptive.all_in_basins());
    assert!(adaptive.max_lateral_deviation() < 0.25 * ablation.final_lateral_deviation());
    // The clockwise-only walker is pulled off the line.
    assert!(ablation.final_leader_distance() > 1.0);
    assert!(ablation.final_lateral_deviation() > 1.0);
}

#[test]
fn curved_walk_stays_in_basins_and_within_budget() {
    let s = scenario("scenario_curved.json", WalkerMode::Adaptive);
    let trace = run_scenario(&s).unwrap();
    assert!(trace.all_in_basins());
    let usage = trace.usage_counts();
    assert!(usage[2] > 0 && usage[0] > 0);
    let report = validate_dwell_time(&trace.signal().unwrap(), &s.certificate().budget());
    assert!(report.valid);
    assert_eq!(trace.deferrals, 0);
}

#[test]
fn zero_force_walk_is_a_straight_line() {
    let mut s = scenario("scenario_straight.json", WalkerMode::Adaptive);
    let zero = [[0.0, 0.0], [0.0, 0.0]];
    s.leader = LeaderModel::arcs([0.0, 0.0], 0.0, 0.65, &[(20.0, 0.4)], zero, zero).unwrap();
    let trace = run_scenario(&s).unwrap();
    assert!(trace.sigma.iter().all(|&p| p == 1));
    for (k, pose) in trace.poses.iter().enumerate() {
        assert_eq!(pose.heading, 0.0);
        assert!((pose.position[0] - 0.31 * k as f64).abs() < 1e-12);
        assert_eq!(pose.position[1], 0.0);
    }
}

#[test]
fn mirrored_leader_swaps_turn_usage() {
    let s = scenario("scenario_curved.json", WalkerMode::Adaptive);
    let base = run_scenario(&s).unwrap();
    let mirrored = run_scenario(&s.reflected()).unwrap();
    let (a, b) = (base.usage_counts(), mirrored.usage_counts());
    assert_eq!((a[0], a[1], a[2]), (b[2], b[1], b[0]));
    for (p, q) in base.poses.iter().zip(&mirrored.poses) {
        assert!((p.position[0] - q.position[0]).abs() < 1e-9);
        assert!((p.position[1] + q.position[1]).abs() < 1e-9);
    }
}

#[test]
fn ablation_runs_are_deterministic() {
    let s = scenario("scenario_curved.json", WalkerMode::Fixed(2));
    assert_eq!(run_scenario(&s).unwrap(), run_scenario(&s).unwrap());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn scenarios_are_rotation_equivariant(theta in -3.1f64..3.1) {
        let s = scenario("scenario_curved.json", WalkerMode::Adaptive);
        let base = run_scenario(&s).unwrap();
        let turned = run_scenario(&s.rotated(theta)).unwrap();
        prop_assert_eq!(&base.sigma, &turned.sigma);
        for (p, q) in base.poses.iter().zip(&turned.poses) {
            let want = rotate(p.position, theta);
            prop_assert!((want[0] - q.position[0]).abs() < 1e-9 && (want[1] - q.position[1]).abs() < 1e-9);
            let dh = safeswitch_core::walker::wrap_angle(q.heading - p.heading - theta);
            prop_assert!(dh.abs() < 1e-9);
        }
        for (a, b) in base.reduced.iter().zip(&turned.reduced) {
            prop_assert!((a[0] - b[0]).abs() < 1e-9 && (a[1] - b[1]).abs() < 1e-9);
        }
    }
}

#[test]
fn adaptive_walker_stays_near_line_after_lateral_offset() {
    // The bang-bang heading policy settles into a zigzag about the leader
    // line rather than converging onto it.
    let mut s = scenario("scenario_straight.json", WalkerMode::Adaptive);
    s.initial_pose.position[1] += 0.3;
    let trace = run_scenario(&s).unwrap();
    assert!(trace.all_in_basins());
    assert!(trace.max_lateral_deviation() < 0.4);
    let usage = trace.usage_counts();
    assert!(usage[0] > 0 && usage[2] > 0);
    s.mode = WalkerMode::Fixed(0);
    let ablation = run_scenario(&s).unwrap();
    assert!(ablation.final_lateral_deviation() > 4.0 * trace.max_lateral_deviation());
}
