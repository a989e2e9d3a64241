use zitter::dynamics::trajectory_from;
use zitter::spectral::{classify_peaks, count_labelled, spectrum, Part, PeakLabel, Window};
use zitter::{
    DecompositionConfig, GaussianPacket, PacketDecomposition, SimParams, TimeGrid, Trajectory,
};

const THRESHOLD: f64 = 0.01;

fn fig2(kappa: f64) -> (Trajectory<f64>, SimParams<f64>, Vec<usize>) {
    let params = SimParams::from_b(2.0 * kappa.sqrt()).unwrap();
    let l = params.magnetic_length();
    let packet = GaussianPacket::new(0.9 * l, l, None, 2f64.sqrt() / l).unwrap();
    let d = PacketDecomposition::build(&packet, &params, &DecompositionConfig::default()).unwrap();
    let traj = trajectory_from(&d, &TimeGrid::span(400.0, 1 << 14).unwrap());
    (traj, params, d.occupied_levels(1e-6))
}

#[test]
fn significant_peaks_obey_selection_rules() {
    for kappa in [0.116, 1.05] {
        let (traj, params, occupied) = fig2(kappa);
        let report = classify_peaks(
            spectrum(&traj, Window::Hann, Part::Total).unwrap(),
            &params,
            &occupied,
        );
        let unassigned = count_labelled(&report, THRESHOLD, |l| *l == PeakLabel::Unassigned);
        assert_eq!(unassigned, 0, "kappa {kappa}");
    }
}

#[test]
fn band_filtered_trajectories_carry_only_their_lines() {
    let (traj, params, occupied) = fig2(1.05);
    let inter = classify_peaks(
        spectrum(&traj, Window::Hann, Part::Interband).unwrap(),
        &params,
        &occupied,
    );
    let intra = classify_peaks(
        spectrum(&traj, Window::Hann, Part::Intraband).unwrap(),
        &params,
        &occupied,
    );
    assert_eq!(
        count_labelled(&inter, THRESHOLD, |l| !matches!(l, PeakLabel::Interband(_))),
        0
    );
    assert_eq!(
        count_labelled(&intra, THRESHOLD, |l| !matches!(l, PeakLabel::Intraband(_))),
        0
    );
    assert!(count_labelled(&inter, THRESHOLD, |_| true) > 0);
}

#[test]
fn peak_counts_are_deterministic() {
    let (traj, params, occupied) = fig2(1.05);
    let a = classify_peaks(
        spectrum(&traj, Window::Hann, Part::Total).unwrap(),
        &params,
        &occupied,
    );
    let b = classify_peaks(
        spectrum(&traj, Window::Hann, Part::Total).unwrap(),
        &params,
        &occupied,
    );
    assert_eq!(a, b);
}
