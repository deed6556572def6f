//! Derivative-free search over pulse families for the largest peak population.
//!
//! A coarse log-spaced scan brackets the optimum; golden-section search (one
//! parameter) or Nelder-Mead (two parameters) refines it in log space. The
//! objective uses the amplitude solver and the returned optimum is re-checked
//! with the hierarchy solver.

use crate::couplings::CollectiveRates;
use crate::error::{Error, Result};
use crate::fock::{evolve_amplitudes, evolve_hierarchy, SolverOptions};
use crate::pulse::{matched_phase_rate, Channel, PhotonMode, SpatialProfile, TemporalEnvelope};
use crate::trajectory::{parabolic_vertex, pulse_grid, Population, StateTrajectory};

/// Smallest budget `optimize` accepts.
pub const MIN_BUDGET: usize = 10;

/// Fraction of the budget spent on the coarse scan.
const SCAN_SHARE: f64 = 0.4;

/// Relative bracket width (in log space) at which refinement stops.
const REFINE_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    Symmetric,
    Antisymmetric,
    /// Atom 1 excited, atom 2 in its ground state.
    FirstAtom,
}

impl Target {
    pub fn population(self) -> Population {
        match self {
            Target::Symmetric => Population::Symmetric,
            Target::Antisymmetric => Population::Antisymmetric,
            Target::FirstAtom => Population::Atom1,
        }
    }

    fn channel(self) -> Option<Channel> {
        match self {
            Target::Symmetric => Some(Channel::Symmetric),
            Target::Antisymmetric => Some(Channel::Antisymmetric),
            Target::FirstAtom => None,
        }
    }
}

/// Closed parameter interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo > 0.0 && lo.is_finite()) {
            return Err(Error::domain(
                "lower bound",
                lo,
                "must be positive and finite",
            ));
        }
        if !(hi >= lo && hi.is_finite()) {
            return Err(Error::domain(
                "upper bound",
                hi,
                "must be finite and not below the lower bound",
            ));
        }
        Ok(Self { lo, hi })
    }

    fn clamp(&self, x: f64) -> f64 {
        x.clamp(self.lo, self.hi)
    }
}

/// Envelope family and its parameter box. One-parameter families are tuned
/// to the target channel's resonance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Family {
    RisingExponential {
        bandwidth: Interval,
    },
    Square {
        duration: Interval,
    },
    Gaussian {
        width: Interval,
    },
    /// Independent matched rising exponentials in the two channels.
    RisingExponentialPair {
        symmetric: Interval,
        antisymmetric: Interval,
    },
}

impl Family {
    pub fn param_names(&self) -> &'static [&'static str] {
        match self {
            Family::RisingExponential { .. } => &["bandwidth"],
            Family::Square { .. } => &["duration"],
            Family::Gaussian { .. } => &["width"],
            Family::RisingExponentialPair { .. } => &["bandwidth_s", "bandwidth_a"],
        }
    }

    fn bounds(&self) -> Vec<Interval> {
        match *self {
            Family::RisingExponential { bandwidth } => vec![bandwidth],
            Family::Square { duration } => vec![duration],
            Family::Gaussian { width } => vec![width],
            Family::RisingExponentialPair {
                symmetric,
                antisymmetric,
            } => vec![symmetric, antisymmetric],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizationProblem {
    pub rates: CollectiveRates,
    pub profile: SpatialProfile,
    pub target: Target,
    pub family: Family,
    pub solver: SolverOptions,
    /// Uniform samples across the observation window of each evaluation.
    pub samples: usize,
}

impl OptimizationProblem {
    pub fn new(
        rates: CollectiveRates,
        profile: SpatialProfile,
        target: Target,
        family: Family,
    ) -> Self {
        Self {
            rates,
            profile,
            target,
            family,
            solver: SolverOptions::with_tolerance(1e-10, 1e-13),
            samples: 600,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for b in self.family.bounds() {
            Interval::new(b.lo, b.hi)?;
        }
        if self.samples < 400 {
            return Err(Error::InvalidInput(format!(
                "{} samples per evaluation is too coarse for peak picking (need at least 400)",
                self.samples
            )));
        }
        if self.target == Target::FirstAtom
            && !matches!(self.family, Family::RisingExponentialPair { .. })
        {
            return Err(Error::InvalidInput(
                "the single-atom target needs the two-channel family".into(),
            ));
        }
        Ok(())
    }

    /// Photon mode for a parameter vector.
    pub fn mode(&self, params: &[f64]) -> Result<PhotonMode> {
        let bounds = self.family.bounds();
        if params.len() != bounds.len() {
            return Err(Error::InvalidInput(format!(
                "expected {} parameters, got {}",
                bounds.len(),
                params.len()
            )));
        }
        if let Family::RisingExponentialPair { .. } = self.family {
            return Ok(PhotonMode {
                profile: self.profile,
                symmetric: TemporalEnvelope::rising_exponential(
                    params[0],
                    matched_phase_rate(&self.rates, Channel::Symmetric),
                )?,
                antisymmetric: TemporalEnvelope::rising_exponential(
                    params[1],
                    matched_phase_rate(&self.rates, Channel::Antisymmetric),
                )?,
            });
        }
        let channel = self.target.channel().ok_or_else(|| {
            Error::InvalidInput("the single-atom target needs the two-channel family".into())
        })?;
        let nu = matched_phase_rate(&self.rates, channel);
        let env = match self.family {
            Family::RisingExponential { .. } => {
                TemporalEnvelope::rising_exponential(params[0], nu)?
            }
            Family::Square { .. } => TemporalEnvelope::square(params[0], nu)?,
            Family::Gaussian { .. } => TemporalEnvelope::gaussian(params[0], nu)?,
            Family::RisingExponentialPair { .. } => unreachable!(),
        };
        Ok(PhotonMode::uniform(self.profile, env))
    }

    fn target_width(&self) -> f64 {
        match self.target {
            Target::Symmetric => self.rates.symmetric_width(),
            Target::Antisymmetric => self.rates.antisymmetric_width(),
            Target::FirstAtom => self.rates.gamma,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Solver {
    Amplitudes,
    Hierarchy,
}

/// Peak of the target population and the time it occurs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak {
    pub time: f64,
    pub value: f64,
}

fn run(
    problem: &OptimizationProblem,
    mode: &PhotonMode,
    grid: &[f64],
    solver: Solver,
) -> Result<StateTrajectory> {
    match solver {
        Solver::Amplitudes => evolve_amplitudes(&problem.rates, mode, grid, &problem.solver),
        Solver::Hierarchy => evolve_hierarchy(&problem.rates, mode, grid, &problem.solver),
    }
}

/// Largest target population for one parameter vector.
///
/// The discrete maximum over the sampled window is refined by a parabola
/// through its neighbours and the solver is re-run to the vertex.
pub fn evaluate(problem: &OptimizationProblem, params: &[f64], solver: Solver) -> Result<Peak> {
    let mode = problem.mode(params)?;
    let (lo, hi) = mode
        .support()
        .ok_or_else(|| Error::InvalidInput("pulse has no active channel".into()))?;
    let window = (lo, hi.max(0.0) + 4.0 / problem.target_width());
    let grid = pulse_grid(&mode, window, problem.samples);
    let traj = run(problem, &mode, &grid, solver)?;
    let which = problem.target.population();
    let (i, value) = traj
        .argmax(which)
        .ok_or_else(|| Error::InvalidInput("empty time grid".into()))?;
    let mut best = Peak {
        time: traj.times[i],
        value,
    };
    if i > 0 && i + 1 < traj.len() {
        let s = traj.series(which);
        let t = [traj.times[i - 1], traj.times[i], traj.times[i + 1]];
        if let Some(tv) = parabolic_vertex(t, [s[i - 1], s[i], s[i + 1]]) {
            let refined = run(problem, &mode, &[tv], solver)?;
            let v = refined.series(which)[0];
            if v > best.value {
                best = Peak { time: tv, value: v };
            }
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub params: Vec<f64>,
    pub peak: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizationResult {
    pub best_params: Vec<f64>,
    pub best_peak: f64,
    pub evaluations: usize,
    /// Every evaluation in the order it was made.
    pub trace: Vec<Evaluation>,
    /// Refinement stopped on the budget rather than on convergence.
    pub budget_exhausted: bool,
    /// Peak at `best_params` recomputed with the hierarchy solver.
    pub hierarchy_peak: f64,
}

struct Objective<'a> {
    problem: &'a OptimizationProblem,
    budget: usize,
    trace: Vec<Evaluation>,
}

impl Objective<'_> {
    fn remaining(&self) -> usize {
        self.budget - self.trace.len()
    }

    /// Peak at `exp(log_params)`, recorded in the trace.
    fn eval_log(&mut self, log_params: &[f64]) -> Result<f64> {
        let params: Vec<f64> = log_params.iter().map(|x| x.exp()).collect();
        self.eval(params)
    }

    fn eval(&mut self, params: Vec<f64>) -> Result<f64> {
        let peak = evaluate(self.problem, &params, Solver::Amplitudes)?.value;
        self.trace.push(Evaluation { params, peak });
        Ok(peak)
    }
}

/// `n` log-spaced points over an interval, endpoints included.
pub fn log_grid(interval: Interval, n: usize) -> Vec<f64> {
    let (a, b) = (interval.lo.ln(), interval.hi.ln());
    match n {
        0 => Vec::new(),
        1 => vec![(0.5 * (a + b)).exp()],
        _ => (0..n)
            .map(|i| match i {
                0 => interval.lo,
                _ if i == n - 1 => interval.hi,
                _ => (a + (b - a) * i as f64 / (n - 1) as f64).exp(),
            })
            .collect(),
    }
}

pub fn optimize(problem: &OptimizationProblem, budget: usize) -> Result<OptimizationResult> {
    problem.validate()?;
    if budget < MIN_BUDGET {
        return Err(Error::InvalidInput(format!(
            "budget {budget} is below the minimum of {MIN_BUDGET} evaluations"
        )));
    }
    let bounds = problem.family.bounds();
    let mut objective = Objective {
        problem,
        budget,
        trace: Vec::with_capacity(budget),
    };
    let exhausted = match bounds.as_slice() {
        [b] => golden_search(&mut objective, *b)?,
        [bs, ba] => nelder_mead(&mut objective, [*bs, *ba])?,
        _ => unreachable!("families have one or two parameters"),
    };
    let trace = objective.trace;
    let best = trace.iter().fold(
        &trace[0],
        |best, e| if e.peak > best.peak { e } else { best },
    );
    let hierarchy_peak = evaluate(problem, &best.params, Solver::Hierarchy)?.value;
    Ok(OptimizationResult {
        best_params: best.params.clone(),
        best_peak: best.peak,
        evaluations: trace.len(),
        budget_exhausted: exhausted,
        hierarchy_peak,
        trace,
    })
}

fn coarse_points(budget: usize, dims: usize) -> usize {
    let share = (budget as f64 * SCAN_SHARE).max(3f64.powi(dims as i32));
    (share.powf(1.0 / dims as f64).floor() as usize).max(3)
}

/// Returns whether the budget ran out before the bracket converged.
fn golden_search(obj: &mut Objective, bounds: Interval) -> Result<bool> {
    let xs = log_grid(bounds, coarse_points(obj.budget, 1));
    let mut best = (0, f64::NEG_INFINITY);
    for (i, &x) in xs.iter().enumerate() {
        let p = obj.eval(vec![x])?;
        if p > best.1 {
            best = (i, p);
        }
    }
    if bounds.hi == bounds.lo {
        return Ok(false);
    }
    let i = best.0;
    let mut a = xs[i.saturating_sub(1)].ln();
    let mut b = xs[(i + 1).min(xs.len() - 1)].ln();
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    if obj.remaining() < 2 {
        return Ok(true);
    }
    let mut fc = obj.eval_log(&[c])?;
    let mut fd = obj.eval_log(&[d])?;
    while (b - a) > REFINE_TOL * (1.0 + a.abs().max(b.abs())) {
        if obj.remaining() == 0 {
            return Ok(true);
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - ratio * (b - a);
            fc = obj.eval_log(&[c])?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + ratio * (b - a);
            fd = obj.eval_log(&[d])?;
        }
    }
    Ok(false)
}

fn nelder_mead(obj: &mut Objective, bounds: [Interval; 2]) -> Result<bool> {
    let n = coarse_points(obj.budget, 2);
    let grids = [log_grid(bounds[0], n), log_grid(bounds[1], n)];
    let mut best = ([0.0; 2], f64::NEG_INFINITY);
    for &x in &grids[0] {
        for &y in &grids[1] {
            let p = obj.eval(vec![x, y])?;
            if p > best.1 {
                best = ([x.ln(), y.ln()], p);
            }
        }
    }
    let log_bounds = bounds.map(|b| Interval {
        lo: b.lo.ln(),
        hi: b.hi.ln(),
    });
    let clamp = |p: [f64; 2]| [log_bounds[0].clamp(p[0]), log_bounds[1].clamp(p[1])];
    let step = |k: usize| {
        let w = log_bounds[k].hi - log_bounds[k].lo;
        if n > 1 {
            w / (n - 1) as f64
        } else {
            w
        }
    };

    // Simplex vertices with their peaks; we maximise.
    let origin = best.0;
    let mut simplex: Vec<([f64; 2], f64)> = vec![(origin, best.1)];
    for k in 0..2 {
        let mut v = origin;
        v[k] += if v[k] + step(k) <= log_bounds[k].hi {
            step(k)
        } else {
            -step(k)
        };
        let v = clamp(v);
        if obj.remaining() == 0 {
            return Ok(true);
        }
        let f = obj.eval_log(&v)?;
        simplex.push((v, f));
    }
    loop {
        simplex.sort_by(|x, y| y.1.total_cmp(&x.1));
        let size = simplex[1..]
            .iter()
            .map(|(v, _)| {
                (v[0] - simplex[0].0[0])
                    .abs()
                    .max((v[1] - simplex[0].0[1]).abs())
            })
            .fold(0.0, f64::max);
        if size < REFINE_TOL {
            return Ok(false);
        }
        if obj.remaining() == 0 {
            return Ok(true);
        }
        let centroid = [
            0.5 * (simplex[0].0[0] + simplex[1].0[0]),
            0.5 * (simplex[0].0[1] + simplex[1].0[1]),
        ];
        let worst = simplex[2];
        let along = |t: f64| {
            clamp([
                centroid[0] + t * (worst.0[0] - centroid[0]),
                centroid[1] + t * (worst.0[1] - centroid[1]),
            ])
        };
        let reflected = along(-1.0);
        let fr = obj.eval_log(&reflected)?;
        if fr > simplex[0].1 {
            if obj.remaining() == 0 {
                simplex[2] = (reflected, fr);
                return Ok(true);
            }
            let expanded = along(-2.0);
            let fe = obj.eval_log(&expanded)?;
            simplex[2] = if fe > fr {
                (expanded, fe)
            } else {
                (reflected, fr)
            };
            continue;
        }
        if fr > simplex[1].1 {
            simplex[2] = (reflected, fr);
            continue;
        }
        if obj.remaining() == 0 {
            return Ok(true);
        }
        let contracted = if fr > worst.1 {
            along(-0.5)
        } else {
            along(0.5)
        };
        let fc = obj.eval_log(&contracted)?;
        if fc > worst.1.max(fr) {
            simplex[2] = (contracted, fc);
            continue;
        }
        // Shrink towards the best vertex.
        for k in 1..3 {
            if obj.remaining() == 0 {
                return Ok(true);
            }
            let v = [
                0.5 * (simplex[0].0[0] + simplex[k].0[0]),
                0.5 * (simplex[0].0[1] + simplex[k].0[1]),
            ];
            simplex[k] = (v, obj.eval_log(&v)?);
        }
    }
}

/// Peak population at each value of a one-parameter family.
pub fn bandwidth_scan(problem: &OptimizationProblem, values: &[f64]) -> Result<Vec<(f64, f64)>> {
    problem.validate()?;
    if problem.family.bounds().len() != 1 {
        return Err(Error::InvalidInput(
            "scans need a one-parameter family".into(),
        ));
    }
    values
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            if !(x > 0.0 && x.is_finite()) {
                return Err(
                    Error::domain("scan value", x, "must be positive and finite").at_row(i),
                );
            }
            evaluate(problem, &[x], Solver::Amplitudes)
                .map(|p| (x, p.value))
                .map_err(|e| e.at_row(i))
        })
        .collect()
}

/// True when the values rise to a single maximum and then fall, allowing
/// plateaus and wiggles up to `tol`.
pub fn is_unimodal(values: &[f64], tol: f64) -> bool {
    let Some(top) = values
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
    else {
        return true;
    };
    values[..=top].windows(2).all(|w| w[1] >= w[0] - tol)
        && values[top..].windows(2).all(|w| w[1] <= w[0] + tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::couplings::AtomPairConfig;

    fn rates(kr: f64) -> CollectiveRates {
        CollectiveRates::for_pair(&AtomPairConfig::perpendicular(kr).unwrap()).unwrap()
    }

    fn rising(kr: f64, target: Target) -> OptimizationProblem {
        let profile = match target {
            Target::Antisymmetric => SpatialProfile::ANTISYMMETRIC,
            _ => SpatialProfile::SYMMETRIC,
        };
        OptimizationProblem::new(
            rates(kr),
            profile,
            target,
            Family::RisingExponential {
                bandwidth: Interval::new(0.05, 10.0).unwrap(),
            },
        )
    }

    #[test]
    fn overbroadened_rising_exponential() {
        let p = rising(0.5, Target::Symmetric);
        let gs = p.rates.symmetric_width();
        let scan = bandwidth_scan(&p, &[gs, 10.0 * gs]).unwrap();
        assert!((scan[0].1 - 1.0).abs() < 1e-7);
        assert!((scan[1].1 - 40.0 / 121.0).abs() < 1e-6, "{}", scan[1].1);
    }

    #[test]
    fn finds_superradiant_bandwidth() {
        let p = rising(0.5, Target::Symmetric);
        let r = optimize(&p, 40).unwrap();
        let gs = p.rates.symmetric_width();
        assert!((r.best_params[0] / gs - 1.0).abs() < 0.02);
        assert!(r.best_peak >= 0.999 && r.best_peak <= 1.0 + 1e-9);
        assert!((r.hierarchy_peak - r.best_peak).abs() < 1e-6);
        assert!(r.trace.iter().all(|e| e.peak <= r.best_peak));
        assert_eq!(r.evaluations, r.trace.len());
    }

    #[test]
    fn budget_and_box_validation() {
        let p = rising(0.5, Target::Symmetric);
        assert!(optimize(&p, 9).is_err());
        assert!(Interval::new(0.0, 1.0).is_err());
        assert!(Interval::new(2.0, 1.0).is_err());
        let mut q = p.clone();
        q.target = Target::FirstAtom;
        assert!(q.validate().is_err());
    }

    #[test]
    fn unimodality() {
        assert!(is_unimodal(&[0.1, 0.5, 0.9, 0.4], 0.0));
        assert!(!is_unimodal(&[0.1, 0.5, 0.2, 0.4], 0.0));
        assert!(is_unimodal(&[], 0.0));
    }

    #[test]
    fn log_grid_endpoints() {
        let g = log_grid(Interval::new(0.1, 10.0).unwrap(), 3);
        assert_eq!(g[0], 0.1);
        assert!((g[1] - 1.0).abs() < 1e-12);
        assert_eq!(g[2], 10.0);
    }
}
