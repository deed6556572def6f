use std::f64::consts::FRAC_PI_2;

use twoatom_demo::{
    coherent_vs_fock, coupling_curves, fock_trajectory, COMPARISON_COLUMNS, COUPLING_COLUMNS,
    TRAJECTORY_COLUMNS,
};

fn column(flat: &[f64], width: usize, j: usize) -> Vec<f64> {
    flat.chunks(width).map(|r| r[j]).collect()
}

#[test]
fn coupling_rows_match_core() {
    let flat = coupling_curves(FRAC_PI_2, 0.1, 10.0, 50).unwrap();
    assert_eq!(flat.len(), 50 * COUPLING_COLUMNS);
    let kr = column(&flat, COUPLING_COLUMNS, 0);
    assert_eq!((kr[0], kr[49]), (0.1, 10.0));
    let row = twoatom::couplings::rates_row(kr[17], FRAC_PI_2).unwrap();
    assert_eq!(flat[17 * 3 + 1], row.gamma12_over_gamma);
    assert_eq!(flat[17 * 3 + 2], row.lambda12_over_gamma);
}

#[test]
fn matched_photon_is_fully_absorbed() {
    for profile in ["s", "a", "eg"] {
        let flat = fock_trajectory(1.0, FRAC_PI_2, profile, 1.0, 400).unwrap();
        assert_eq!(flat.len() % TRAJECTORY_COLUMNS, 0);
        let j = match profile {
            "s" => 2,
            "a" => 3,
            _ => 5,
        };
        let peak = column(&flat, TRAJECTORY_COLUMNS, j)
            .into_iter()
            .fold(0.0, f64::max);
        assert!(peak > 0.999, "{profile}: {peak}");
    }
}

#[test]
fn mismatched_bandwidth_lowers_the_peak() {
    let flat = fock_trajectory(1.0, FRAC_PI_2, "s", 3.0, 400).unwrap();
    let peak = column(&flat, TRAJECTORY_COLUMNS, 2)
        .into_iter()
        .fold(0.0, f64::max);
    assert!(peak < 0.9, "{peak}");
}

#[test]
fn coherent_state_stays_below_the_photon() {
    let flat = coherent_vs_fock(0.5, FRAC_PI_2, "s", 1.0, 400).unwrap();
    let fock = column(&flat, COMPARISON_COLUMNS, 1)
        .into_iter()
        .fold(0.0, f64::max);
    let coh = column(&flat, COMPARISON_COLUMNS, 2)
        .into_iter()
        .fold(0.0, f64::max);
    assert!(fock > 0.999);
    assert!((coh - 0.5078658583684638).abs() < 1e-4, "{coh}");
}

#[test]
fn bad_inputs_are_rejected() {
    assert!(coupling_curves(FRAC_PI_2, 1.0, 0.5, 10).is_err());
    assert!(coupling_curves(FRAC_PI_2, 0.1, 1.0, 1).is_err());
    assert!(fock_trajectory(1e-5, FRAC_PI_2, "s", 1.0, 100).is_err());
    assert!(fock_trajectory(1.0, FRAC_PI_2, "x", 1.0, 100).is_err());
    assert!(coherent_vs_fock(1.0, FRAC_PI_2, "s", 1.0, 1_000_000).is_err());
}
