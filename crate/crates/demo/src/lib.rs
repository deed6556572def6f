//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Every export returns a flat `Float64Array` of fixed-width rows so the page
//! can plot it without any parsing.

use num_complex::Complex64;
use wasm_bindgen::prelude::*;

use twoatom::coherent::{evolve_coherent, CoherentDrive};
use twoatom::fock::{evolve_amplitudes, SolverOptions};
use twoatom::pulse::{PhotonMode, SpatialProfile, TemporalEnvelope};
use twoatom::trajectory::{default_window, pulse_grid, Population, StateTrajectory};
use twoatom::{AtomPairConfig, CollectiveRates, Error, Result};

pub const COUPLING_COLUMNS: usize = 3;
pub const TRAJECTORY_COLUMNS: usize = 7;
pub const COMPARISON_COLUMNS: usize = 3;
const MAX_SAMPLES: usize = 20_000;

fn rates(kr: f64, theta: f64) -> Result<CollectiveRates> {
    CollectiveRates::for_pair(&AtomPairConfig::new(kr, theta, 1.0)?)
}

fn profile(name: &str) -> Result<SpatialProfile> {
    match name {
        "s" => Ok(SpatialProfile::SYMMETRIC),
        "a" => Ok(SpatialProfile::ANTISYMMETRIC),
        "eg" => Ok(SpatialProfile::first_atom()),
        other => Err(Error::InvalidInput(format!("unknown profile {other:?}"))),
    }
}

fn target(name: &str) -> Population {
    match name {
        "s" => Population::Symmetric,
        "a" => Population::Antisymmetric,
        _ => Population::Atom1,
    }
}

fn check_samples(n: usize) -> Result<()> {
    if (2..=MAX_SAMPLES).contains(&n) {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!(
            "samples must be in 2..={MAX_SAMPLES}, got {n}"
        )))
    }
}

/// Matched pulse for the profile, with every bandwidth multiplied by `scale`.
fn scaled_mode(rates: &CollectiveRates, profile: SpatialProfile, scale: f64) -> Result<PhotonMode> {
    let matched = PhotonMode::matched(rates, profile)?;
    let rescale = |e: &TemporalEnvelope| -> Result<TemporalEnvelope> {
        match e.bandwidth() {
            Some(b) => TemporalEnvelope::rising_exponential(b * scale, e.phase_rate()),
            None => Ok(e.clone()),
        }
    };
    Ok(PhotonMode {
        profile,
        symmetric: rescale(&matched.symmetric)?,
        antisymmetric: rescale(&matched.antisymmetric)?,
    })
}

fn grid(mode: &PhotonMode, n: usize) -> Result<Vec<f64>> {
    let window = default_window(mode, 1.0)
        .ok_or_else(|| Error::InvalidInput("the pulse misses every channel".into()))?;
    Ok(pulse_grid(
        mode,
        (window.0.max(-12.0), window.1.min(12.0)),
        n,
    ))
}

/// Rows `[kr, gamma12/gamma, lambda12/gamma]` on a log grid.
pub fn coupling_curves(theta: f64, kr_min: f64, kr_max: f64, n: usize) -> Result<Vec<f64>> {
    check_samples(n)?;
    if !(kr_min > 0.0 && kr_max > kr_min) {
        return Err(Error::InvalidInput(format!(
            "bad kr range {kr_min}..{kr_max}"
        )));
    }
    let step = (kr_max / kr_min).ln() / (n - 1) as f64;
    let mut out = Vec::with_capacity(n * COUPLING_COLUMNS);
    for i in 0..n {
        let kr = if i == n - 1 {
            kr_max
        } else {
            kr_min * (step * i as f64).exp()
        };
        let row = twoatom::couplings::rates_row(kr, theta)?;
        out.extend([row.kr, row.gamma12_over_gamma, row.lambda12_over_gamma]);
    }
    Ok(out)
}

fn flatten(traj: &StateTrajectory) -> Vec<f64> {
    let mut out = Vec::with_capacity(traj.len() * TRAJECTORY_COLUMNS);
    for i in 0..traj.len() {
        out.extend([
            traj.times[i],
            traj.p_gg[i],
            traj.p_s[i],
            traj.p_a[i],
            traj.p_ee[i],
            traj.p_atom1[i],
            traj.p_atom2[i],
        ]);
    }
    out
}

/// Single-photon absorption. Rows `[t, P_gg, P_s, P_a, P_ee, P_atom1, P_atom2]`.
pub fn fock_trajectory(
    kr: f64,
    theta: f64,
    profile_name: &str,
    bandwidth_scale: f64,
    n: usize,
) -> Result<Vec<f64>> {
    check_samples(n)?;
    let r = rates(kr, theta)?;
    let mode = scaled_mode(&r, profile(profile_name)?, bandwidth_scale)?;
    let traj = evolve_amplitudes(&r, &mode, &grid(&mode, n)?, &SolverOptions::default())?;
    Ok(flatten(&traj))
}

/// The same matched pulse as a one-photon Fock state and as a coherent state
/// of amplitude `alpha`. Rows `[t, P_target(Fock), P_target(coherent)]`.
pub fn coherent_vs_fock(
    kr: f64,
    theta: f64,
    profile_name: &str,
    alpha: f64,
    n: usize,
) -> Result<Vec<f64>> {
    check_samples(n)?;
    let r = rates(kr, theta)?;
    let mode = PhotonMode::matched(&r, profile(profile_name)?)?;
    let t = grid(&mode, n)?;
    let opts = SolverOptions::default();
    let fock = evolve_amplitudes(&r, &mode, &t, &opts)?;
    let drive = CoherentDrive::new(Complex64::new(alpha, 0.0), mode)?;
    let coherent = evolve_coherent(&r, &drive, &t, &opts)?;
    let which = target(profile_name);
    let mut out = Vec::with_capacity(t.len() * COMPARISON_COLUMNS);
    for (i, &ti) in t.iter().enumerate() {
        out.extend([ti, fock.series(which)[i], coherent.series(which)[i]]);
    }
    Ok(out)
}

fn js(e: Error) -> JsError {
    JsError::new(&e.to_string())
}

#[wasm_bindgen(js_name = couplingCurves)]
pub fn coupling_curves_js(
    theta: f64,
    kr_min: f64,
    kr_max: f64,
    n: usize,
) -> std::result::Result<Vec<f64>, JsError> {
    coupling_curves(theta, kr_min, kr_max, n).map_err(js)
}

#[wasm_bindgen(js_name = fockTrajectory)]
pub fn fock_trajectory_js(
    kr: f64,
    theta: f64,
    profile: &str,
    bandwidth_scale: f64,
    n: usize,
) -> std::result::Result<Vec<f64>, JsError> {
    fock_trajectory(kr, theta, profile, bandwidth_scale, n).map_err(js)
}

#[wasm_bindgen(js_name = coherentVsFock)]
pub fn coherent_vs_fock_js(
    kr: f64,
    theta: f64,
    profile: &str,
    alpha: f64,
    n: usize,
) -> std::result::Result<Vec<f64>, JsError> {
    coherent_vs_fock(kr, theta, profile, alpha, n).map_err(js)
}
