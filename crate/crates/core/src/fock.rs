//! Atomic dynamics under a single-photon (Fock) wavepacket.
//!
//! Two independent solvers are provided. The amplitude model integrates the
//! two single-excitation amplitudes directly. The hierarchy integrates the
//! photon-number sector matrices `ρ_mn = ⟨m|ρ_total|n⟩` of the input mode,
//!
//! ```text
//! dρ00/dt = L ρ00
//! dρ10/dt = L ρ10 + [ρ00, M†]
//! dρ11/dt = L ρ11 + [ρ01, M†] + [M, ρ10]          ρ01 = ρ10†
//! ```
//!
//! where `L` is the two-atom vacuum generator and
//! `M(t) = Σ_c conj(c_c ξ_c(t)) √(γ ± γ12) (σ₁⁻ ± σ₂⁻)/√2`
//! couples the input to each collective channel. Atomic observables are read
//! from `ρ11`; the pair of solvers must agree in the single-excitation sector.

use num_complex::Complex64;

use crate::couplings::CollectiveRates;
use crate::error::{Error, Result};
use crate::ode::{integrate, OdeOptions};
use crate::operators::{commutator, pure_state, Expectations, Generator, Op4, A, EE, GG, S};
use crate::pulse::{Channel, PhotonMode, Side, DEGENERATE_WIDTH};
use crate::trajectory::StateTrajectory;

/// Sign of the collective Lamb shift in the level energies: `|s⟩` sits at
/// `CLS_SIGN · λ12/2` and `|a⟩` at the opposite energy. With `-1` the exchange
/// term reproduces the σᶻ equations of motion and the rising exponential
/// carrying `e^{+iλ12 t/2}` drives `|s⟩` on resonance.
pub const CLS_SIGN: f64 = -1.0;

/// Trace drift that is reported as a solver bug.
const TRACE_DRIFT: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub ode: OdeOptions,
    /// Override for [`CLS_SIGN`]; only convention studies should change it.
    pub cls_sign: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            ode: OdeOptions::default(),
            cls_sign: CLS_SIGN,
        }
    }
}

impl SolverOptions {
    pub fn with_tolerance(rtol: f64, atol: f64) -> Self {
        Self {
            ode: OdeOptions {
                rtol,
                atol,
                ..OdeOptions::default()
            },
            ..Self::default()
        }
    }
}

pub(crate) fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidInput("time grid is empty".into()));
    }
    if grid.iter().any(|t| !t.is_finite()) || grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidInput(
            "time grid must be finite and non-decreasing".into(),
        ));
    }
    Ok(())
}

/// Validates a driven run and returns its start time and breakpoints.
pub(crate) fn prepare(
    rates: &CollectiveRates,
    mode: &PhotonMode,
    grid: &[f64],
) -> Result<(f64, Vec<f64>)> {
    check_grid(grid)?;
    if (mode.profile.norm_sqr() - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidInput(format!(
            "spatial profile has norm {} (expected 1)",
            mode.profile.norm_sqr()
        )));
    }
    let threshold = DEGENERATE_WIDTH * rates.gamma;
    let width = rates.antisymmetric_width();
    if mode.active().any(|(c, _)| c == Channel::Antisymmetric) && width <= threshold {
        return Err(Error::DegenerateChannel { width, threshold });
    }
    let start = mode.support().map_or(grid[0], |(lo, _)| lo.min(grid[0]));
    Ok((start, mode.breakpoints()))
}

/// `M(t)`: the input coupling operator weighted by the conjugate drive.
pub(crate) fn input_coupling(jumps: &[Op4; 2], mode: &PhotonMode, t: f64, side: Side) -> Op4 {
    let es = mode.amplitude(Channel::Symmetric, t, side);
    let ea = mode.amplitude(Channel::Antisymmetric, t, side);
    jumps[0] * es.conj() + jumps[1] * ea.conj()
}

pub(crate) fn pack(m: &Op4, out: &mut [f64]) {
    for (k, z) in m.iter().enumerate() {
        out[2 * k] = z.re;
        out[2 * k + 1] = z.im;
    }
}

pub(crate) fn unpack(y: &[f64]) -> Op4 {
    Op4::from_iterator((0..16).map(|k| Complex64::new(y[2 * k], y[2 * k + 1])))
}

/// Single-excitation amplitude model.
///
/// `dβ_s/dt = -((γ+γ12)/2 + i s λ12/2) β_s - √(γ+γ12) c_s ξ_s(t)` and the
/// same for `β_a` with `γ - γ12` and `-s`, where `s` is the CLS sign.
pub fn evolve_amplitudes(
    rates: &CollectiveRates,
    mode: &PhotonMode,
    grid: &[f64],
    opts: &SolverOptions,
) -> Result<StateTrajectory> {
    let (t0, breaks) = prepare(rates, mode, grid)?;
    let gs = rates.symmetric_width();
    let ga = rates.antisymmetric_width().max(0.0);
    let shift = opts.cls_sign * rates.lambda12 / 2.0;
    let kappa_s = Complex64::new(gs / 2.0, shift);
    let kappa_a = Complex64::new(ga / 2.0, -shift);
    let (root_s, root_a) = (gs.sqrt(), ga.sqrt());

    let states = integrate(
        &opts.ode,
        |t, side, y, dy| {
            let bs = Complex64::new(y[0], y[1]);
            let ba = Complex64::new(y[2], y[3]);
            let ds = -kappa_s * bs - root_s * mode.amplitude(Channel::Symmetric, t, side);
            let da = -kappa_a * ba - root_a * mode.amplitude(Channel::Antisymmetric, t, side);
            dy[0] = ds.re;
            dy[1] = ds.im;
            dy[2] = da.re;
            dy[3] = da.im;
        },
        t0,
        &[0.0; 4],
        grid,
        &breaks,
    )?;

    let mut traj = StateTrajectory::with_capacity(grid.len());
    for (&t, y) in grid.iter().zip(&states) {
        let bs = Complex64::new(y[0], y[1]);
        let ba = Complex64::new(y[2], y[3]);
        if bs.norm_sqr() + ba.norm_sqr() > 1.0 + 1e-9 {
            return Err(Error::Invariant {
                t,
                what: format!("excitation norm {}", bs.norm_sqr() + ba.norm_sqr()),
            });
        }
        traj.push_amplitudes(t, bs, ba);
    }
    Ok(traj)
}

/// Photon-number sector matrices of the Fock-1 input at one instant.
#[derive(Debug, Clone, PartialEq)]
pub struct FockHierarchy {
    pub t: f64,
    pub rho00: Op4,
    pub rho10: Op4,
    pub rho11: Op4,
}

impl FockHierarchy {
    pub fn ground(t: f64) -> Self {
        let mut rho00 = Op4::zeros();
        rho00[(GG, GG)] = Complex64::new(1.0, 0.0);
        Self {
            t,
            rho00,
            rho10: Op4::zeros(),
            rho11: rho00,
        }
    }

    pub fn rho01(&self) -> Op4 {
        self.rho10.adjoint()
    }

    /// Atomic state conditioned on the photon having been sent.
    pub fn atomic_state(&self) -> &Op4 {
        &self.rho11
    }

    fn pack(&self, y: &mut [f64]) {
        pack(&self.rho00, &mut y[0..32]);
        pack(&self.rho10, &mut y[32..64]);
        pack(&self.rho11, &mut y[64..96]);
    }

    fn unpack(t: f64, y: &[f64]) -> Self {
        Self {
            t,
            rho00: unpack(&y[0..32]),
            rho10: unpack(&y[32..64]),
            rho11: unpack(&y[64..96]),
        }
    }

    /// Time derivative of all sectors.
    pub fn derivative(&self, gen: &Generator, coupling: &Op4) -> [Op4; 3] {
        let coupling_dag = coupling.adjoint();
        let d00 = gen.apply(&self.rho00);
        let d10 = gen.apply(&self.rho10) + commutator(&self.rho00, &coupling_dag);
        let d11 = gen.apply(&self.rho11)
            + commutator(&self.rho01(), &coupling_dag)
            + commutator(coupling, &self.rho10);
        [d00, d10, d11]
    }
}

fn hermitian_part(m: &Op4) -> Op4 {
    (m + m.adjoint()) * Complex64::new(0.5, 0.0)
}

/// Sector matrices on the grid. The diagonal sectors are returned exactly
/// Hermitian; the integrator only preserves that to rounding.
pub fn hierarchy_states(
    rates: &CollectiveRates,
    mode: &PhotonMode,
    grid: &[f64],
    opts: &SolverOptions,
) -> Result<Vec<FockHierarchy>> {
    let (t0, breaks) = prepare(rates, mode, grid)?;
    let gen = Generator::new(rates, opts.cls_sign);
    let mut y0 = [0.0; 96];
    FockHierarchy::ground(t0).pack(&mut y0);
    let states = integrate(
        &opts.ode,
        |t, side, y, dy| {
            let h = FockHierarchy::unpack(t, y);
            let coupling = input_coupling(gen.jumps(), mode, t, side);
            let [d00, d10, d11] = h.derivative(&gen, &coupling);
            pack(&d00, &mut dy[0..32]);
            pack(&d10, &mut dy[32..64]);
            pack(&d11, &mut dy[64..96]);
        },
        t0,
        &y0,
        grid,
        &breaks,
    )?;
    let out: Vec<FockHierarchy> = grid
        .iter()
        .zip(&states)
        .map(|(&t, y)| {
            let mut h = FockHierarchy::unpack(t, y);
            h.rho00 = hermitian_part(&h.rho00);
            h.rho11 = hermitian_part(&h.rho11);
            h
        })
        .collect();
    for h in &out {
        for (name, rho) in [("rho11", &h.rho11), ("rho00", &h.rho00)] {
            let tr = rho.trace();
            if (tr.re - 1.0).abs() > TRACE_DRIFT || tr.im.abs() > TRACE_DRIFT {
                return Err(Error::Invariant {
                    t: h.t,
                    what: format!("trace of {name} drifted to {tr}"),
                });
            }
        }
    }
    Ok(out)
}

/// Fock-1 populations from the sector hierarchy.
pub fn evolve_hierarchy(
    rates: &CollectiveRates,
    mode: &PhotonMode,
    grid: &[f64],
    opts: &SolverOptions,
) -> Result<StateTrajectory> {
    let states = hierarchy_states(rates, mode, grid, opts)?;
    let rhos: Vec<Op4> = states.iter().map(|h| h.rho11).collect();
    Ok(StateTrajectory::from_density(grid, &rhos))
}

/// The fifteen Pauli expectations of the atoms, read from `ρ11`.
pub fn operator_expectations(hierarchy: &FockHierarchy) -> Expectations {
    Expectations::of(&hierarchy.rho11)
}

/// Rate of change of `⟨O⟩` at a hierarchy snapshot, split into the vacuum
/// (dissipative and exchange) part and the photon-drive part.
pub fn observable_rate(
    rates: &CollectiveRates,
    mode: &PhotonMode,
    hierarchy: &FockHierarchy,
    observable: &Op4,
    opts: &SolverOptions,
) -> (f64, f64) {
    let gen = Generator::new(rates, opts.cls_sign);
    let coupling = input_coupling(gen.jumps(), mode, hierarchy.t, Side::Left);
    let vacuum = gen.apply(&hierarchy.rho11);
    let drive = commutator(&hierarchy.rho01(), &coupling.adjoint())
        + commutator(&coupling, &hierarchy.rho10);
    (
        (observable * vacuum).trace().re,
        (observable * drive).trace().re,
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitialState {
    Ground,
    Symmetric,
    Antisymmetric,
    BothExcited,
    /// `|eg⟩`: atom 1 excited.
    FirstAtom,
}

impl InitialState {
    pub fn density(self) -> Op4 {
        let z = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let mut amp = [z; 4];
        match self {
            InitialState::Ground => amp[GG] = one,
            InitialState::Symmetric => amp[S] = one,
            InitialState::Antisymmetric => amp[A] = one,
            InitialState::BothExcited => amp[EE] = one,
            InitialState::FirstAtom => {
                amp[S] = h;
                amp[A] = h;
            }
        }
        pure_state(amp)
    }
}

/// Free collective decay from an atomic state with the field in vacuum.
pub fn decay_only(
    rates: &CollectiveRates,
    initial: InitialState,
    grid: &[f64],
    opts: &SolverOptions,
) -> Result<StateTrajectory> {
    check_grid(grid)?;
    if grid[0] < 0.0 {
        return Err(Error::InvalidInput(
            "decay runs start at t = 0; grid must not contain negative times".into(),
        ));
    }
    let gen = Generator::new(rates, opts.cls_sign);
    let mut y0 = [0.0; 32];
    pack(&initial.density(), &mut y0);
    let states = integrate(
        &opts.ode,
        |_, _, y, dy| pack(&gen.apply(&unpack(y)), dy),
        0.0,
        &y0,
        grid,
        &[],
    )?;
    let rhos: Vec<Op4> = states.iter().map(|y| unpack(y)).collect();
    Ok(StateTrajectory::from_density(grid, &rhos))
}

/// Largest populations of `|ee⟩` seen anywhere in a hierarchy run, and the
/// largest deviation of `ρ11` from a valid density matrix.
pub fn hierarchy_defects(states: &[FockHierarchy]) -> (f64, f64, f64) {
    let mut max_ee = 0.0f64;
    let mut min_eig = f64::INFINITY;
    let mut herm = 0.0f64;
    for h in states {
        max_ee = max_ee.max(h.rho11[(EE, EE)].re);
        min_eig = min_eig.min(crate::operators::min_eigenvalue(&h.rho11));
        herm = herm.max(crate::operators::hermiticity_defect(&h.rho11));
    }
    (max_ee, min_eig, herm)
}
