//! Atomic dynamics under a coherent-state pulse.
//!
//! Displacing the input field turns a coherent wavepacket into a classical
//! drive acting on the vacuum master equation,
//! `dρ/dt = L ρ + [α* M(t) - α M(t)†, ρ]`, with the same coupling operator
//! `M(t)` as the single-photon hierarchy.

use num_complex::Complex64;

use crate::couplings::{AtomPairConfig, CollectiveRates};
use crate::error::{Error, Result};
use crate::fock::{input_coupling, pack, prepare, unpack, SolverOptions};
use crate::ode::integrate;
use crate::operators::{commutator, Generator, Op4, GG};
use crate::pulse::{Channel, PhotonMode, SpatialProfile};
use crate::trajectory::{default_window, pulse_grid, Population, StateTrajectory};

#[derive(Debug, Clone, PartialEq)]
pub struct CoherentDrive {
    /// Coherent amplitude; `|alpha|²` is the mean photon number.
    pub alpha: Complex64,
    pub mode: PhotonMode,
}

impl CoherentDrive {
    pub fn new(alpha: Complex64, mode: PhotonMode) -> Result<Self> {
        if !(alpha.re.is_finite() && alpha.im.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "alpha = {alpha} is not finite"
            )));
        }
        Ok(Self { alpha, mode })
    }

    pub fn mean_photon_number(&self) -> f64 {
        self.alpha.norm_sqr()
    }
}

pub fn evolve_coherent(
    rates: &CollectiveRates,
    drive: &CoherentDrive,
    grid: &[f64],
    opts: &SolverOptions,
) -> Result<StateTrajectory> {
    let (t0, breaks) = prepare(rates, &drive.mode, grid)?;
    let gen = Generator::new(rates, opts.cls_sign);
    let alpha = drive.alpha;
    let mut rho0 = Op4::zeros();
    rho0[(GG, GG)] = Complex64::new(1.0, 0.0);
    let mut y0 = [0.0; 32];
    pack(&rho0, &mut y0);

    let states = integrate(
        &opts.ode,
        |t, side, y, dy| {
            let rho = unpack(y);
            let coupling = input_coupling(gen.jumps(), &drive.mode, t, side);
            let generator = coupling * alpha.conj() - coupling.adjoint() * alpha;
            pack(&(gen.apply(&rho) + commutator(&generator, &rho)), dy);
        },
        t0,
        &y0,
        grid,
        &breaks,
    )?;
    let rhos: Vec<Op4> = states.iter().map(|y| unpack(y)).collect();
    for (&t, rho) in grid.iter().zip(&rhos) {
        let tr = rho.trace();
        if (tr.re - 1.0).abs() > 1e-7 {
            return Err(Error::Invariant {
                t,
                what: format!("trace drifted to {tr}"),
            });
        }
    }
    Ok(StateTrajectory::from_density(grid, &rhos))
}

/// Settings shared by every row of a separation sweep. Each row drives the
/// chosen channel with its matched rising exponential.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeakSweep {
    pub theta: f64,
    pub gamma: f64,
    pub alpha: Complex64,
    pub channel: Channel,
    /// Samples across the observation window.
    pub samples: usize,
}

impl PeakSweep {
    pub fn symmetric(alpha: Complex64) -> Self {
        Self {
            theta: std::f64::consts::FRAC_PI_2,
            gamma: 1.0,
            alpha,
            channel: Channel::Symmetric,
            samples: 2001,
        }
    }

    pub fn antisymmetric(alpha: Complex64) -> Self {
        Self {
            channel: Channel::Antisymmetric,
            ..Self::symmetric(alpha)
        }
    }

    pub fn target(&self) -> Population {
        match self.channel {
            Channel::Symmetric => Population::Symmetric,
            Channel::Antisymmetric => Population::Antisymmetric,
        }
    }

    pub fn drive(&self, rates: &CollectiveRates) -> Result<CoherentDrive> {
        let profile = match self.channel {
            Channel::Symmetric => SpatialProfile::SYMMETRIC,
            Channel::Antisymmetric => SpatialProfile::ANTISYMMETRIC,
        };
        CoherentDrive::new(self.alpha, PhotonMode::matched(rates, profile)?)
    }
}

/// Populations sampled where the driven channel peaks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeakRow {
    pub kr: f64,
    pub t_peak: f64,
    pub peak: f64,
    pub p_gg: f64,
    pub p_s: f64,
    pub p_a: f64,
    pub p_ee: f64,
}

impl PeakRow {
    /// Samples a trajectory where `target` is largest.
    pub fn from_trajectory(kr: f64, traj: &StateTrajectory, target: Population) -> Result<Self> {
        let (i, peak) = traj
            .argmax(target)
            .ok_or_else(|| Error::InvalidInput("empty time grid".into()))?;
        Ok(Self {
            kr,
            t_peak: traj.times[i],
            peak,
            p_gg: traj.p_gg[i],
            p_s: traj.p_s[i],
            p_a: traj.p_a[i],
            p_ee: traj.p_ee[i],
        })
    }
}

/// Full coherent run for one separation of a sweep.
pub fn sweep_trajectory(
    kr: f64,
    sweep: &PeakSweep,
    opts: &SolverOptions,
) -> Result<StateTrajectory> {
    let rates = CollectiveRates::for_pair(&AtomPairConfig::new(kr, sweep.theta, sweep.gamma)?)?;
    let drive = sweep.drive(&rates)?;
    let window = default_window(&drive.mode, sweep.gamma)
        .ok_or_else(|| Error::InvalidInput("drive has no active channel".into()))?;
    let grid = pulse_grid(&drive.mode, window, sweep.samples);
    evolve_coherent(&rates, &drive, &grid, opts)
}

pub fn peak_row(kr: f64, sweep: &PeakSweep, opts: &SolverOptions) -> Result<PeakRow> {
    PeakRow::from_trajectory(kr, &sweep_trajectory(kr, sweep, opts)?, sweep.target())
}

pub fn peak_population_vs_separation(
    kr_values: &[f64],
    sweep: &PeakSweep,
    opts: &SolverOptions,
) -> Result<Vec<PeakRow>> {
    kr_values
        .iter()
        .enumerate()
        .map(|(i, &kr)| peak_row(kr, sweep, opts).map_err(|e| e.at_row(i)))
        .collect()
}
