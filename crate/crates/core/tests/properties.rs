use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use proptest::prelude::*;

use twoatom::coherent::{evolve_coherent, peak_row, CoherentDrive, PeakSweep};
use twoatom::couplings::{
    collective_decay_rate, decay_rate_quadrature, rates_sweep, AtomPairConfig, CollectiveRates,
};
use twoatom::fock::{decay_only, evolve_amplitudes, evolve_hierarchy, InitialState, SolverOptions};
use twoatom::io::fmt_sig;
use twoatom::operators::{
    hermiticity_defect, min_eigenvalue, per_atom_population, projector, pure_state, Expectations,
    EE, S,
};
use twoatom::optimize::{
    bandwidth_scan, is_unimodal, optimize, Family, Interval, OptimizationProblem, Target,
};
use twoatom::pulse::{
    superposition_profile, symmetric_pulse, PhotonMode, SpatialProfile, TemporalEnvelope,
};
use twoatom::trajectory::{default_window, pulse_grid, uniform_grid, Population};
use twoatom::Error;

fn rates(kr: f64) -> CollectiveRates {
    CollectiveRates::for_pair(&AtomPairConfig::perpendicular(kr).unwrap()).unwrap()
}

fn matched_grid(mode: &PhotonMode, samples: usize) -> Vec<f64> {
    pulse_grid(mode, default_window(mode, 1.0).unwrap(), samples)
}

fn envelope() -> impl Strategy<Value = TemporalEnvelope> {
    let nu = -3.0..3.0f64;
    prop_oneof![
        (0.05..10.0f64, nu.clone())
            .prop_map(|(g, n)| TemporalEnvelope::rising_exponential(g, n).unwrap()),
        (0.05..10.0f64, nu.clone())
            .prop_map(|(g, n)| TemporalEnvelope::decaying_exponential(g, n).unwrap()),
        (0.1..20.0f64, nu.clone()).prop_map(|(t, n)| TemporalEnvelope::square(t, n).unwrap()),
        (0.1..5.0f64, nu).prop_map(|(w, n)| TemporalEnvelope::gaussian(w, n).unwrap()),
    ]
}

fn profile() -> impl Strategy<Value = SpatialProfile> {
    (0.0..2.0 * PI, 0.0..2.0 * PI).prop_map(|(phi, chi)| {
        superposition_profile(
            Complex64::new(phi.cos(), 0.0),
            Complex64::from_polar(phi.sin(), chi),
        )
        .unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn decay_overlap_is_bounded(kr in 1e-3..1e3f64, theta in 0.0..FRAC_PI_2) {
        let cfg = AtomPairConfig::new(kr, theta, 1.0).unwrap();
        prop_assert!(collective_decay_rate(&cfg).unwrap().abs() <= 1.0);
    }

    #[test]
    fn closed_form_rate_matches_quadrature(kr in 1e-3..30.0f64, theta in 0.0..FRAC_PI_2) {
        let cfg = AtomPairConfig::new(kr, theta, 1.0).unwrap();
        let d = collective_decay_rate(&cfg).unwrap() - decay_rate_quadrature(&cfg).unwrap();
        prop_assert!(d.abs() < 1e-8);
    }

    #[test]
    fn rates_scale_with_base_rate(kr in 0.01..50.0f64, gamma in 0.1..10.0f64) {
        let one = CollectiveRates::for_pair(&AtomPairConfig::new(kr, FRAC_PI_2, 1.0).unwrap()).unwrap();
        let r = CollectiveRates::for_pair(&AtomPairConfig::new(kr, FRAC_PI_2, gamma).unwrap()).unwrap();
        prop_assert!((r.gamma12 - gamma * one.gamma12).abs() < 1e-12 * gamma.max(1.0));
        prop_assert!((r.lambda12 - gamma * one.lambda12).abs() < 1e-9 * gamma.max(1.0) * one.lambda12.abs().max(1.0));
    }

    #[test]
    fn envelopes_are_normalised(env in envelope()) {
        prop_assert!((env.norm_sqr().unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn profile_renormalisation_is_idempotent(p in profile()) {
        prop_assert!((p.norm_sqr() - 1.0).abs() < 1e-12);
        let again = superposition_profile(p.c_s, p.c_a).unwrap();
        prop_assert!((again.c_s - p.c_s).norm() < 1e-15 && (again.c_a - p.c_a).norm() < 1e-15);
    }

    #[test]
    fn formatted_numbers_round_trip(x in prop::num::f64::NORMAL) {
        let back: f64 = fmt_sig(x).parse().unwrap();
        prop_assert!((back - x).abs() <= 1e-11 * x.abs());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn solvers_agree_and_conserve_probability(
        kr in 0.3..5.0f64,
        p in profile(),
        width in 0.2..3.0f64,
        matched in any::<bool>(),
    ) {
        let r = rates(kr);
        let mode = if matched {
            PhotonMode::matched(&r, p).unwrap()
        } else {
            PhotonMode::uniform(p, TemporalEnvelope::gaussian(width, 0.0).unwrap())
        };
        let grid = matched_grid(&mode, 301);
        let opts = SolverOptions::default();
        let a = evolve_amplitudes(&r, &mode, &grid, &opts).unwrap();
        let b = evolve_hierarchy(&r, &mode, &grid, &opts).unwrap();
        a.check(1e-7).unwrap();
        b.check(1e-7).unwrap();
        for which in [Population::Ground, Population::Symmetric, Population::Antisymmetric, Population::Atom1] {
            for (x, y) in a.series(which).iter().zip(b.series(which)) {
                prop_assert!((x - y).abs() < 1e-6);
            }
        }
        prop_assert!(b.p_ee.iter().all(|p| p.abs() < 1e-10));
    }

    #[test]
    fn matched_pulse_mirrors_decay(kr in 0.3..5.0f64, frac in 0.05..3.0f64) {
        let r = rates(kr);
        let mode = PhotonMode::matched(&r, SpatialProfile::SYMMETRIC).unwrap();
        let t = frac / r.symmetric_width();
        let tr = evolve_amplitudes(&r, &mode, &[-t, 0.0, t], &SolverOptions::default()).unwrap();
        // The rise before the peak is the mirror image of the decay after it.
        prop_assert!((tr.p_s[0] / tr.p_s[2] - 1.0).abs() < 1e-4);
        prop_assert!((tr.p_s[0] - (-frac).exp()).abs() < 1e-6);
        prop_assert!((tr.p_s[1] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn coherent_state_stays_physical(
        kr in 0.3..3.0f64,
        alpha in (0.0..2.0f64, 0.0..2.0 * PI),
        p in profile(),
    ) {
        let r = rates(kr);
        let drive = CoherentDrive::new(
            Complex64::from_polar(alpha.0, alpha.1),
            PhotonMode::matched(&r, p).unwrap(),
        ).unwrap();
        let grid = matched_grid(&drive.mode, 201);
        let tr = evolve_coherent(&r, &drive, &grid, &SolverOptions::default()).unwrap();
        tr.check(1e-7).unwrap();
    }

    #[test]
    fn single_photon_beats_coherent_pulse(kr in 0.5..2.0f64, antisymmetric in any::<bool>()) {
        let one = Complex64::new(1.0, 0.0);
        let (sweep, profile) = if antisymmetric {
            (PeakSweep::antisymmetric(one), SpatialProfile::ANTISYMMETRIC)
        } else {
            (PeakSweep::symmetric(one), SpatialProfile::SYMMETRIC)
        };
        let opts = SolverOptions::default();
        let coherent = peak_row(kr, &sweep, &opts).unwrap();
        let r = rates(kr);
        let mode = PhotonMode::matched(&r, profile).unwrap();
        let fock = evolve_amplitudes(&r, &mode, &matched_grid(&mode, 801), &opts).unwrap();
        prop_assert!(fock.max(sweep.target()) - coherent.peak > 0.02);
        prop_assert!(coherent.p_ee > 0.0);
    }
}

#[test]
fn weak_coherent_drive_is_linear() {
    let r = rates(0.5);
    let opts = SolverOptions::with_tolerance(1e-11, 1e-16);
    let t_early = -2.0 / r.symmetric_width();
    let early = |eps: f64| {
        let drive = PeakSweep::symmetric(Complex64::new(eps, 0.0))
            .drive(&r)
            .unwrap();
        evolve_coherent(&r, &drive, &[t_early], &opts).unwrap().p_s[0] / (eps * eps)
    };
    let reference = early(1e-3);
    for eps in [0.1, 0.03, 0.01] {
        assert!((early(eps) / reference - 1.0).abs() < 0.01, "eps={eps}");
    }
}

#[test]
fn hierarchy_density_stays_physical() {
    let r = rates(0.8);
    let mode = PhotonMode::matched(&r, SpatialProfile::first_atom()).unwrap();
    let grid = matched_grid(&mode, 401);
    let states =
        twoatom::fock::hierarchy_states(&r, &mode, &grid, &SolverOptions::default()).unwrap();
    for h in &states {
        assert!((h.rho11.trace().re - 1.0).abs() < 1e-7);
        assert!((h.rho00.trace().re - 1.0).abs() < 1e-7);
        assert!(min_eigenvalue(&h.rho11) > -1e-9);
        assert_eq!(hermiticity_defect(&h.rho11), 0.0);
        assert_eq!(h.rho01(), h.rho10.adjoint());
    }
}

#[test]
fn resonance_phase_is_needed() {
    let r = rates(0.5);
    let grid = uniform_grid(-25.0, 2.0, 2701);
    let opts = SolverOptions::default();
    let detuned = PhotonMode::uniform(
        SpatialProfile::SYMMETRIC,
        TemporalEnvelope::rising_exponential(r.symmetric_width(), 0.0).unwrap(),
    );
    let peak = evolve_amplitudes(&r, &detuned, &grid, &opts)
        .unwrap()
        .max(Population::Symmetric);
    assert!(peak < 1.0 - 1e-3, "peak {peak}");

    // The opposite level-shift convention detunes the matched pulse.
    let mode = PhotonMode::matched(&r, SpatialProfile::SYMMETRIC).unwrap();
    let flipped = SolverOptions {
        cls_sign: 1.0,
        ..opts
    };
    let peak = evolve_amplitudes(&r, &mode, &grid, &flipped)
        .unwrap()
        .max(Population::Symmetric);
    assert!(peak < 1.0 - 1e-3, "peak {peak}");
}

#[test]
fn tighter_tolerance_leaves_peak_unchanged() {
    let r = rates(1.0);
    let mode = PhotonMode::matched(&r, SpatialProfile::SYMMETRIC).unwrap();
    let grid = matched_grid(&mode, 1001);
    let base = SolverOptions::default();
    let tight = SolverOptions::with_tolerance(base.ode.rtol / 2.0, base.ode.atol / 2.0);
    let a = evolve_hierarchy(&r, &mode, &grid, &base)
        .unwrap()
        .max(Population::Symmetric);
    let b = evolve_hierarchy(&r, &mode, &grid, &tight)
        .unwrap()
        .max(Population::Symmetric);
    assert!((a - b).abs() < 1e-7);
}

#[test]
fn subradiant_state_freezes_at_contact() {
    let r = rates(1e-2);
    let grid = uniform_grid(0.0, 10.0, 11);
    let tr = decay_only(
        &r,
        InitialState::Antisymmetric,
        &grid,
        &SolverOptions::default(),
    )
    .unwrap();
    assert!(tr.p_a[10] > 0.999);
    let tr = decay_only(
        &r,
        InitialState::BothExcited,
        &grid,
        &SolverOptions::default(),
    )
    .unwrap();
    tr.check(1e-7).unwrap();
}

#[test]
fn operator_expectations_of_reference_states() {
    let e = Expectations::of(&projector(S));
    for (name, want) in [
        ("sx1sx2", 1.0),
        ("sy1sy2", 1.0),
        ("sz1", 0.0),
        ("sz1sz2", -1.0),
    ] {
        assert!((e.get(name).unwrap() - want).abs() < 1e-12, "{name}");
    }
    assert_eq!(per_atom_population(&projector(S)), (0.5, 0.5));
    assert_eq!(per_atom_population(&projector(EE)), (1.0, 1.0));
    let z = Complex64::new(0.0, 0.0);
    let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let (p1, p2) = per_atom_population(&pure_state([z, h, h, z]));
    assert!((p1 - 1.0).abs() < 1e-12 && p2.abs() < 1e-12);
}

#[test]
fn rising_exponential_scan_is_unimodal() {
    let r = rates(0.5);
    let gs = r.symmetric_width();
    let problem = OptimizationProblem::new(
        r,
        SpatialProfile::SYMMETRIC,
        Target::Symmetric,
        Family::RisingExponential {
            bandwidth: Interval::new(0.1, 20.0).unwrap(),
        },
    );
    let grid: Vec<f64> = (0..=12).map(|k| gs * (0.4 + 0.1 * k as f64)).collect();
    let scan = bandwidth_scan(&problem, &grid).unwrap();
    let peaks: Vec<f64> = scan.iter().map(|p| p.1).collect();
    assert!(is_unimodal(&peaks, 0.0));
    // Strict decrease at 20% offsets.
    assert!(peaks[4] < peaks[6] && peaks[8] < peaks[6]);
    assert_eq!(bandwidth_scan(&problem, &[gs]).unwrap().len(), 1);
    let err = bandwidth_scan(&problem, &[gs, -1.0]).unwrap_err();
    assert!(matches!(err, Error::Row { index: 1, .. }));
}

#[test]
fn optimizer_is_deterministic_and_consistent() {
    let r = rates(0.5);
    let problem = OptimizationProblem::new(
        r,
        SpatialProfile::ANTISYMMETRIC,
        Target::Antisymmetric,
        Family::RisingExponential {
            bandwidth: Interval::new(0.005, 1.0).unwrap(),
        },
    );
    let a = optimize(&problem, 30).unwrap();
    let b = optimize(&problem, 30).unwrap();
    assert_eq!(a, b);
    assert!((a.best_params[0] / r.antisymmetric_width() - 1.0).abs() < 0.02);
    assert!(a.best_peak >= 0.999 && a.best_peak <= 1.0 + 1e-9);
    let again = twoatom::optimize::evaluate(
        &problem,
        &a.best_params,
        twoatom::optimize::Solver::Amplitudes,
    )
    .unwrap();
    assert!((again.value - a.best_peak).abs() < 1e-9);
    assert!((a.hierarchy_peak - a.best_peak).abs() < 1e-6);
}

#[test]
fn optimizer_reports_exhausted_budget() {
    let problem = OptimizationProblem::new(
        rates(0.5),
        SpatialProfile::SYMMETRIC,
        Target::Symmetric,
        Family::Square {
            duration: Interval::new(0.1, 20.0).unwrap(),
        },
    );
    let r = optimize(&problem, 10).unwrap();
    assert!(r.budget_exhausted);
    assert_eq!(r.evaluations, 10);
}

#[test]
fn single_atom_target_with_two_bandwidths() {
    let r = rates(1.0);
    let problem = OptimizationProblem::new(
        r,
        SpatialProfile::first_atom(),
        Target::FirstAtom,
        Family::RisingExponentialPair {
            symmetric: Interval::new(0.2, 5.0).unwrap(),
            antisymmetric: Interval::new(0.05, 5.0).unwrap(),
        },
    );
    let res = optimize(&problem, 80).unwrap();
    assert!(res.best_peak > 0.99, "{res:?}");
    assert!((res.best_params[0] / r.symmetric_width() - 1.0).abs() < 0.05);
    assert!((res.best_params[1] / r.antisymmetric_width() - 1.0).abs() < 0.05);
}

#[test]
fn sweeps_report_failing_row() {
    assert!(rates_sweep(&[], FRAC_PI_2).unwrap().is_empty());
    let err = rates_sweep(&[1.0, 1e-4], FRAC_PI_2).unwrap_err();
    assert!(matches!(err, Error::Row { index: 1, .. }));
    assert!(err.to_string().contains("row 1"));
    assert!(err.is_validation());
    assert_eq!(rates_sweep(&[0.5, 1.0, 2.0], FRAC_PI_2).unwrap().len(), 3);
}

#[test]
fn symmetric_pulse_bandwidth() {
    let r = CollectiveRates::new(1.0, 0.9, 0.0).unwrap();
    assert_eq!(symmetric_pulse(&r).unwrap().bandwidth(), Some(1.9));
}
