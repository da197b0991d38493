//! Scratch measurements; delete before finishing.

use extphase::{reference_solution, TrajectoryPreset};

#[test]
#[ignore]
fn probe_traj1_reference_disagreement() {
    let pn = TrajectoryPreset::Regular.problem();
    let s0 = TrajectoryPreset::Regular.initial_state();
    let r = reference_solution(&pn, &s0, 1.0, 10_000, 0.02, f64::INFINITY, 1e-13, 500).unwrap();
    println!("traj1 h_ref=0.02 T=1e4: max disagreement {:.4e}", r.max_disagreement);
}

#[test]
#[ignore]
fn probe_traj2_unreliable_time_at_h50() {
    let pn = TrajectoryPreset::Chaotic.problem();
    let s0 = TrajectoryPreset::Chaotic.initial_state();
    let r = reference_solution(&pn, &s0, 1.0, 10_000, 0.02, f64::INFINITY, 1e-13, 500).unwrap();
    println!("traj2 h_ref=0.02 T=1e4: max disagreement {:.4e}", r.max_disagreement);
}
