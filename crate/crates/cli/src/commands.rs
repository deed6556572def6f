//! The five subcommands. Each validates its whole plan, computes every run
//! (in parallel, collected in sweep order) and returns the files to write.

use rayon::prelude::*;

use twoatom::coherent::{evolve_coherent, sweep_trajectory, CoherentDrive, PeakRow};
use twoatom::fock::{decay_only, evolve_amplitudes, evolve_hierarchy, SolverOptions};
use twoatom::io::{self, fmt_sig};
use twoatom::optimize::{
    evaluate, is_unimodal, optimize, Evaluation, OptimizationProblem, OptimizationResult, Solver,
};
use twoatom::pulse::{Channel, PhotonMode};
use twoatom::trajectory::{default_window, pulse_grid, uniform_grid, Population, StateTrajectory};
use twoatom::{CollectiveRates, RatesRow};

use crate::config::{FieldSpec, ProfileName, ProfileSpec, RunConfig};
use crate::error::{CliError, CliResult};
use crate::output::Artifact;
use crate::plot::{Plot, Series};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Rates,
    Simulate,
    Decay,
    Coherent,
    Optimize,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Rates => "rates",
            Command::Simulate => "simulate",
            Command::Decay => "decay",
            Command::Coherent => "coherent",
            Command::Optimize => "optimize",
        }
    }
}

#[derive(Debug, Default)]
pub struct Outcome {
    pub artifacts: Vec<Artifact>,
    pub summary: Vec<String>,
}

impl Outcome {
    fn csv(&mut self, file_name: String, write: impl FnOnce(&mut Vec<u8>) -> std::io::Result<()>) {
        let mut contents = Vec::new();
        write(&mut contents).expect("writing to memory cannot fail");
        self.artifacts.push(Artifact {
            file_name,
            contents,
        });
    }

    fn svg(&mut self, enabled: bool, file_name: String, plot: Plot) {
        if enabled {
            self.artifacts.push(Artifact {
                file_name,
                contents: plot.render().into_bytes(),
            });
        }
    }
}

pub fn run(command: Command, cfg: &RunConfig) -> CliResult<Outcome> {
    match command {
        Command::Rates => rates(cfg),
        Command::Simulate => simulate(cfg),
        Command::Decay => decay(cfg),
        Command::Coherent => coherent(cfg),
        Command::Optimize => optimize_cmd(cfg),
    }
}

fn run_label(kr: f64) -> String {
    format!("kr{}", fmt_sig(kr))
}

/// Runs `f` over the items in parallel and returns results in item order,
/// or the first failure in item order.
fn parallel<T: Sync, R: Send>(
    items: &[T],
    f: impl Fn(&T) -> CliResult<R> + Sync + Send,
) -> CliResult<Vec<R>> {
    let results: Vec<CliResult<R>> = items.par_iter().map(f).collect();
    results.into_iter().collect()
}

fn rates(cfg: &RunConfig) -> CliResult<Outcome> {
    let name = cfg.name_or("rates");
    let rows: Vec<RatesRow> = twoatom::couplings::rates_sweep(&cfg.kr_values()?, cfg.theta)?;
    let mut out = Outcome::default();
    out.csv(format!("{name}_rates.csv"), |w| io::write_rates(w, &rows));
    let kr: Vec<f64> = rows.iter().map(|r| r.kr).collect();
    let decay: Vec<f64> = rows.iter().map(|r| r.gamma12_over_gamma).collect();
    // The shift diverges at contact; clip it so the oscillations stay visible.
    let shift: Vec<f64> = rows
        .iter()
        .map(|r| r.lambda12_over_gamma.clamp(-3.0, 3.0))
        .collect();
    out.svg(
        cfg.plot,
        format!("{name}_rates.svg"),
        Plot {
            title: "collective couplings".into(),
            x_label: "kr",
            y_label: "rate / gamma",
            log_x: true,
            series: vec![
                Series {
                    label: "gamma12".into(),
                    x: &kr,
                    y: &decay,
                },
                Series {
                    label: "lambda12".into(),
                    x: &kr,
                    y: &shift,
                },
            ],
        },
    );
    out.summary.push(format!(
        "{} separations at theta = {}",
        rows.len(),
        fmt_sig(cfg.theta)
    ));
    Ok(out)
}

fn watched(profile: &ProfileSpec) -> Population {
    match profile {
        ProfileSpec::Named(ProfileName::Symmetric) => Population::Symmetric,
        ProfileSpec::Named(ProfileName::Antisymmetric) => Population::Antisymmetric,
        _ => Population::Atom1,
    }
}

fn population_name(p: Population) -> &'static str {
    match p {
        Population::Ground => "P_gg",
        Population::Symmetric => "P_s",
        Population::Antisymmetric => "P_a",
        Population::BothExcited => "P_ee",
        Population::Atom1 => "P_atom1",
        Population::Atom2 => "P_atom2",
    }
}

struct SimPlan {
    kr: f64,
    rates: CollectiveRates,
    mode: PhotonMode,
    grid: Vec<f64>,
}

struct SimRun {
    traj: StateTrajectory,
    /// Largest amplitude-vs-hierarchy population difference (Fock input only).
    deviation: Option<f64>,
}

fn simulate(cfg: &RunConfig) -> CliResult<Outcome> {
    let name = cfg.name_or("simulate");
    let profile = cfg.profile.build()?;
    let samples = cfg.checked_samples()?;
    let window = cfg.checked_window()?;
    let plans = cfg
        .rates()?
        .into_iter()
        .map(|(kr, rates)| {
            let mode = cfg
                .envelope
                .mode(&rates, profile)
                .map_err(|e| e.context(&run_label(kr)))?;
            let window = match window {
                Some(w) => w,
                None => default_window(&mode, cfg.gamma).ok_or_else(|| {
                    CliError::Validation(
                        "the photon has no amplitude in any populated channel".into(),
                    )
                })?,
            };
            let grid = pulse_grid(&mode, window, samples);
            Ok(SimPlan {
                kr,
                rates,
                mode,
                grid,
            })
        })
        .collect::<CliResult<Vec<_>>>()?;

    let opts = SolverOptions::default();
    let alpha = cfg.alpha();
    let runs = parallel(&plans, |p| {
        let result = match cfg.field {
            FieldSpec::Fock1 => {
                let traj = evolve_hierarchy(&p.rates, &p.mode, &p.grid, &opts)?;
                let check = evolve_amplitudes(&p.rates, &p.mode, &p.grid, &opts)?;
                let deviation = [
                    Population::Ground,
                    Population::Symmetric,
                    Population::Antisymmetric,
                ]
                .iter()
                .flat_map(|&w| {
                    traj.series(w)
                        .iter()
                        .zip(check.series(w))
                        .map(|(a, b)| (a - b).abs())
                })
                .fold(0.0, f64::max);
                SimRun {
                    traj,
                    deviation: Some(deviation),
                }
            }
            FieldSpec::Coherent { .. } => {
                let drive = CoherentDrive::new(alpha, p.mode.clone())?;
                SimRun {
                    traj: evolve_coherent(&p.rates, &drive, &p.grid, &opts)?,
                    deviation: None,
                }
            }
        };
        Ok(result)
    })
    .map_err(|e| e.context(name))?;

    let mut out = Outcome::default();
    let focus = watched(&cfg.profile);
    for (p, r) in plans.iter().zip(&runs) {
        let label = run_label(p.kr);
        out.csv(format!("{name}_{label}.csv"), |w| {
            io::write_trajectory(w, &r.traj)
        });
        for (channel, env) in p.mode.active() {
            let tag = match channel {
                Channel::Symmetric => "s",
                Channel::Antisymmetric => "a",
            };
            out.csv(format!("{name}_{label}_envelope_{tag}.csv"), |w| {
                io::write_envelope(w, env, &p.grid)
            });
        }
        let t = &r.traj.times;
        out.svg(
            cfg.plot,
            format!("{name}_{label}.svg"),
            Plot {
                title: format!("{name}, kr = {}", fmt_sig(p.kr)),
                x_label: "t (1/gamma)",
                y_label: "probability",
                log_x: false,
                series: [
                    Population::Symmetric,
                    Population::Antisymmetric,
                    Population::BothExcited,
                    Population::Atom1,
                    Population::Atom2,
                ]
                .iter()
                .map(|&w| Series {
                    label: population_name(w).into(),
                    x: t,
                    y: r.traj.series(w),
                })
                .collect(),
            },
        );
        let (i, peak) = r.traj.argmax(focus).unwrap_or((0, 0.0));
        let mut line = format!(
            "kr = {}: max {} = {} at t = {}",
            fmt_sig(p.kr),
            population_name(focus),
            fmt_sig(peak),
            fmt_sig(t[i])
        );
        if focus == Population::Atom1 {
            line += &format!(", P_atom2 there = {}", fmt_sig(r.traj.p_atom2[i]));
        }
        if let Some(d) = r.deviation {
            line += &format!(", amplitude/hierarchy deviation {d:.2e}");
        }
        out.summary.push(line);
    }
    let labels: Vec<String> = plans
        .iter()
        .map(|p| format!("kr = {}", fmt_sig(p.kr)))
        .collect();
    out.svg(
        cfg.plot,
        format!("{name}.svg"),
        Plot {
            title: format!("{name}: {}", population_name(focus)),
            x_label: "t (1/gamma)",
            y_label: population_name(focus),
            log_x: false,
            series: runs
                .iter()
                .zip(labels)
                .map(|(r, label)| Series {
                    label,
                    x: &r.traj.times,
                    y: r.traj.series(focus),
                })
                .collect(),
        },
    );
    Ok(out)
}

fn decay_series(state: crate::config::InitialSpec) -> Population {
    use crate::config::InitialSpec::*;
    match state {
        Ground => Population::Ground,
        Symmetric => Population::Symmetric,
        Antisymmetric => Population::Antisymmetric,
        BothExcited => Population::BothExcited,
        FirstAtom => Population::Atom1,
    }
}

/// Least-squares log-slope over the samples that are still resolvable.
fn fitted_rate(t: &[f64], p: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = t
        .iter()
        .zip(p)
        .filter(|(_, &v)| v > 1e-8)
        .map(|(&x, &v)| (x, v.ln()))
        .collect();
    if pts.len() < 3 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Some(-sxy / sxx)
}

fn decay(cfg: &RunConfig) -> CliResult<Outcome> {
    let name = cfg.name_or("decay");
    let (lo, hi) = cfg.checked_window()?.unwrap_or((0.0, 10.0 / cfg.gamma));
    if lo < 0.0 {
        return Err(CliError::Validation(format!(
            "decay runs start at t = 0 (window starts at {lo})"
        )));
    }
    if cfg.initial.is_empty() {
        return Err(CliError::Validation("no initial states given".into()));
    }
    let grid = uniform_grid(lo, hi, cfg.checked_samples()?);
    let plans: Vec<(f64, CollectiveRates, crate::config::InitialSpec)> = cfg
        .rates()?
        .into_iter()
        .flat_map(|(kr, r)| cfg.initial.iter().map(move |&s| (kr, r, s)))
        .collect();
    let opts = SolverOptions::default();
    let runs = parallel(&plans, |(kr, r, s)| {
        decay_only(r, s.state(), &grid, &opts)
            .map_err(|e| CliError::from(e).context(&run_label(*kr)))
    })?;

    let mut out = Outcome::default();
    let mut labels = Vec::new();
    for ((kr, r, s), traj) in plans.iter().zip(&runs) {
        let label = format!("{}_{}", run_label(*kr), s.label());
        out.csv(format!("{name}_{label}.csv"), |w| {
            io::write_trajectory(w, traj)
        });
        let which = decay_series(*s);
        let mut line = format!("kr = {}, from |{}>", fmt_sig(*kr), s.label());
        let expected = match which {
            Population::Symmetric => Some(("gamma + gamma12", r.symmetric_width())),
            Population::Antisymmetric => Some(("gamma - gamma12", r.antisymmetric_width())),
            Population::BothExcited => Some(("2 gamma", 2.0 * r.gamma)),
            _ => None,
        };
        if let (Some((what, rate)), Some(fit)) = (expected, fitted_rate(&grid, traj.series(which)))
        {
            line += &format!(
                ": fitted rate {} ({what} = {})",
                fmt_sig(fit),
                fmt_sig(rate)
            );
        }
        out.summary.push(line);
        labels.push((
            format!("kr = {}, {}", fmt_sig(*kr), population_name(which)),
            which,
        ));
    }
    out.svg(
        cfg.plot,
        format!("{name}.svg"),
        Plot {
            title: format!("{name}: free decay"),
            x_label: "t (1/gamma)",
            y_label: "probability",
            log_x: false,
            series: runs
                .iter()
                .zip(labels)
                .map(|(traj, (label, which))| Series {
                    label,
                    x: &traj.times,
                    y: traj.series(which),
                })
                .collect(),
        },
    );
    Ok(out)
}

fn coherent(cfg: &RunConfig) -> CliResult<Outcome> {
    let name = cfg.name_or("coherent");
    if !matches!(cfg.field, FieldSpec::Coherent { .. }) {
        return Err(CliError::Validation(
            "`coherent` needs field {\"kind\": \"coherent\"}".into(),
        ));
    }
    let sweep = cfg.peak_sweep()?;
    let kr: Vec<f64> = cfg
        .rates()?
        .into_iter()
        .map(|(kr, r)| {
            sweep
                .drive(&r)
                .map(|_| kr)
                .map_err(|e| CliError::from(e).context(&run_label(kr)))
        })
        .collect::<CliResult<_>>()?;
    let opts = SolverOptions::default();
    let runs = parallel(&kr, |&k| {
        let traj = sweep_trajectory(k, &sweep, &opts)?;
        let row = PeakRow::from_trajectory(k, &traj, sweep.target())?;
        Ok((traj, row))
    })
    .map_err(|e| e.context(name))?;

    let mut out = Outcome::default();
    let rows: Vec<PeakRow> = runs.iter().map(|r| r.1).collect();
    out.csv(format!("{name}_sweep.csv"), |w| io::write_sweep(w, &rows));
    let target = sweep.target();
    for (traj, row) in &runs {
        out.csv(format!("{name}_{}.csv", run_label(row.kr)), |w| {
            io::write_trajectory(w, traj)
        });
        out.summary.push(format!(
            "kr = {}: max {} = {} at t = {}; there P_gg = {}, P_s = {}, P_a = {}, P_ee = {}",
            fmt_sig(row.kr),
            population_name(target),
            fmt_sig(row.peak),
            fmt_sig(row.t_peak),
            fmt_sig(row.p_gg),
            fmt_sig(row.p_s),
            fmt_sig(row.p_a),
            fmt_sig(row.p_ee)
        ));
    }
    out.svg(
        cfg.plot,
        format!("{name}.svg"),
        Plot {
            title: format!("{name}: coherent drive, {}", population_name(target)),
            x_label: "t (1/gamma)",
            y_label: population_name(target),
            log_x: false,
            series: runs
                .iter()
                .map(|(traj, row)| Series {
                    label: format!("kr = {}", fmt_sig(row.kr)),
                    x: &traj.times,
                    y: traj.series(target),
                })
                .collect(),
        },
    );
    let columns: [Vec<f64>; 4] = [
        rows.iter().map(|r| r.p_gg).collect(),
        rows.iter().map(|r| r.p_s).collect(),
        rows.iter().map(|r| r.p_a).collect(),
        rows.iter().map(|r| r.p_ee).collect(),
    ];
    out.svg(
        cfg.plot,
        format!("{name}_sweep.svg"),
        Plot {
            title: format!("{name}: populations at the peak"),
            x_label: "kr",
            y_label: "probability",
            log_x: false,
            series: ["P_gg", "P_s", "P_a", "P_ee"]
                .iter()
                .zip(&columns)
                .map(|(label, y)| Series {
                    label: (*label).into(),
                    x: &kr,
                    y,
                })
                .collect(),
        },
    );
    Ok(out)
}

struct OptRun {
    kr: f64,
    result: OptimizationResult,
    scan: Vec<Evaluation>,
    target_width: f64,
}

fn optimize_cmd(cfg: &RunConfig) -> CliResult<Outcome> {
    let name = cfg.name_or("optimize");
    let target = cfg
        .target
        .ok_or_else(|| {
            CliError::Validation("`optimize` needs a target (\"s\", \"a\" or \"eg\")".into())
        })?
        .target();
    let family = cfg
        .family
        .as_ref()
        .ok_or_else(|| CliError::Validation("`optimize` needs a pulse family".into()))?
        .build()?;
    let profile = cfg.profile.build()?;
    let scan_points = match &cfg.scan {
        Some(v) => {
            if family.param_names().len() != 1 {
                return Err(CliError::Validation(
                    "scans need a one-parameter family".into(),
                ));
            }
            let points = v.expand()?;
            if let Some(bad) = points.iter().find(|&&x| !(x > 0.0 && x.is_finite())) {
                return Err(CliError::Validation(format!(
                    "scan value {bad} must be positive"
                )));
            }
            points
        }
        None => Vec::new(),
    };
    if cfg.budget < twoatom::optimize::MIN_BUDGET {
        return Err(CliError::Validation(format!(
            "budget {} is below the minimum of {}",
            cfg.budget,
            twoatom::optimize::MIN_BUDGET
        )));
    }
    let problems = cfg
        .rates()?
        .into_iter()
        .map(|(kr, rates)| {
            let problem = OptimizationProblem::new(rates, profile, target, family);
            problem.validate()?;
            Ok((kr, problem))
        })
        .collect::<Result<Vec<_>, twoatom::Error>>()?;

    let runs = parallel(&problems, |(kr, problem)| {
        let result = optimize(problem, cfg.budget)?;
        let scan = parallel(&scan_points, |&x| {
            Ok(Evaluation {
                params: vec![x],
                peak: evaluate(problem, &[x], Solver::Amplitudes)?.value,
            })
        })?;
        let target_width = match target {
            twoatom::optimize::Target::Symmetric => problem.rates.symmetric_width(),
            twoatom::optimize::Target::Antisymmetric => problem.rates.antisymmetric_width(),
            twoatom::optimize::Target::FirstAtom => f64::NAN,
        };
        Ok(OptRun {
            kr: *kr,
            result,
            scan,
            target_width,
        })
    })
    .map_err(|e| e.context(name))?;

    let mut out = Outcome::default();
    let names = family.param_names();
    for run in &runs {
        let label = run_label(run.kr);
        out.csv(format!("{name}_{label}_trace.csv"), |w| {
            io::write_scan(w, names, &run.result.trace)
        });
        let params: Vec<String> = names
            .iter()
            .zip(&run.result.best_params)
            .map(|(n, v)| format!("{n} = {}", fmt_sig(*v)))
            .collect();
        let mut line = format!(
            "kr = {}: best {}, peak {} ({} evaluations{}), hierarchy check {}",
            fmt_sig(run.kr),
            params.join(", "),
            fmt_sig(run.result.best_peak),
            run.result.evaluations,
            if run.result.budget_exhausted {
                ", budget exhausted"
            } else {
                ""
            },
            fmt_sig(run.result.hierarchy_peak)
        );
        if run.target_width.is_finite()
            && matches!(family, twoatom::optimize::Family::RisingExponential { .. })
        {
            line += &format!(", matched bandwidth {}", fmt_sig(run.target_width));
        }
        out.summary.push(line);
        if !run.scan.is_empty() {
            out.csv(format!("{name}_{label}_scan.csv"), |w| {
                io::write_scan(w, names, &run.scan)
            });
            let peaks: Vec<f64> = run.scan.iter().map(|e| e.peak).collect();
            out.summary.push(format!(
                "kr = {}: scan of {} points is {}",
                fmt_sig(run.kr),
                peaks.len(),
                if is_unimodal(&peaks, 1e-9) {
                    "unimodal"
                } else {
                    "not unimodal"
                }
            ));
        }
    }
    let xs: Vec<Vec<f64>> = runs
        .iter()
        .map(|r| r.scan.iter().map(|e| e.params[0]).collect())
        .collect();
    let ys: Vec<Vec<f64>> = runs
        .iter()
        .map(|r| r.scan.iter().map(|e| e.peak).collect())
        .collect();
    if !scan_points.is_empty() {
        out.svg(
            cfg.plot,
            format!("{name}_scan.svg"),
            Plot {
                title: format!("{name}: peak population"),
                x_label: names[0],
                y_label: "peak",
                log_x: true,
                series: runs
                    .iter()
                    .zip(xs.iter().zip(&ys))
                    .map(|(r, (x, y))| Series {
                        label: format!("kr = {}", fmt_sig(r.kr)),
                        x,
                        y,
                    })
                    .collect(),
            },
        );
    }
    Ok(out)
}
