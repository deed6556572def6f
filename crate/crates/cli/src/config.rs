//! Run configuration: JSON files, shipped presets and their validation.

use std::f64::consts::FRAC_PI_2;
use std::path::Path;

use num_complex::Complex64;
use serde::Deserialize;
use serde_json::Value;

use twoatom::coherent::PeakSweep;
use twoatom::optimize::{Family, Interval, Target};
use twoatom::pulse::{
    superposition_profile, Channel, PhotonMode, SpatialProfile, TemporalEnvelope,
};
use twoatom::{AtomPairConfig, CollectiveRates, InitialState};

use crate::error::{CliError, CliResult};

pub const PRESETS: [(&str, &str); 11] = [
    ("fig2", include_str!("../presets/fig2.json")),
    ("fig3", include_str!("../presets/fig3.json")),
    ("fig4", include_str!("../presets/fig4.json")),
    ("fig5", include_str!("../presets/fig5.json")),
    ("fig6", include_str!("../presets/fig6.json")),
    ("fig7", include_str!("../presets/fig7.json")),
    ("fig8", include_str!("../presets/fig8.json")),
    (
        "optimize_rising",
        include_str!("../presets/optimize_rising.json"),
    ),
    (
        "optimize_square",
        include_str!("../presets/optimize_square.json"),
    ),
    (
        "optimize_gaussian",
        include_str!("../presets/optimize_gaussian.json"),
    ),
    ("optimize_eg", include_str!("../presets/optimize_eg.json")),
];

/// A list of values, or an evenly spaced range.
#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum Values {
    List(Vec<f64>),
    Range {
        from: f64,
        to: f64,
        count: usize,
        #[serde(default)]
        log: bool,
    },
}

impl Values {
    pub fn expand(&self) -> CliResult<Vec<f64>> {
        match *self {
            Values::List(ref v) => Ok(v.clone()),
            Values::Range {
                from,
                to,
                count,
                log,
            } => {
                if count == 0 || !(from.is_finite() && to.is_finite()) {
                    return Err(CliError::Validation(format!(
                        "range {from}..{to} with {count} points is empty or not finite"
                    )));
                }
                if log && !(from > 0.0 && to > 0.0) {
                    return Err(CliError::Validation("log ranges need positive ends".into()));
                }
                let (a, b) = if log {
                    (from.ln(), to.ln())
                } else {
                    (from, to)
                };
                Ok((0..count)
                    .map(|i| {
                        let x = if count == 1 {
                            a
                        } else {
                            a + (b - a) * i as f64 / (count - 1) as f64
                        };
                        match (log, i) {
                            (_, 0) => from,
                            (_, i) if i == count - 1 => to,
                            (true, _) => x.exp(),
                            (false, _) => x,
                        }
                    })
                    .collect())
            }
        }
    }
}

#[derive(Debug, Clone, Copy, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum ProfileName {
    Symmetric,
    Antisymmetric,
    FirstAtom,
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum ProfileSpec {
    Named(ProfileName),
    Weights { c_s: [f64; 2], c_a: [f64; 2] },
}

impl ProfileSpec {
    pub fn build(&self) -> CliResult<SpatialProfile> {
        Ok(match self {
            ProfileSpec::Named(ProfileName::Symmetric) => SpatialProfile::SYMMETRIC,
            ProfileSpec::Named(ProfileName::Antisymmetric) => SpatialProfile::ANTISYMMETRIC,
            ProfileSpec::Named(ProfileName::FirstAtom) => SpatialProfile::first_atom(),
            ProfileSpec::Weights { c_s, c_a } => superposition_profile(
                Complex64::new(c_s[0], c_s[1]),
                Complex64::new(c_a[0], c_a[1]),
            )?,
        })
    }
}

#[derive(Debug, Clone, Default, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum EnvelopeSpec {
    /// Matched rising exponential in every populated channel.
    #[default]
    Matched,
    RisingExponential {
        bandwidth: f64,
        #[serde(default)]
        phase_rate: f64,
    },
    DecayingExponential {
        bandwidth: f64,
        #[serde(default)]
        phase_rate: f64,
    },
    Square {
        duration: f64,
        #[serde(default)]
        phase_rate: f64,
    },
    Gaussian {
        width: f64,
        #[serde(default)]
        phase_rate: f64,
    },
}

impl EnvelopeSpec {
    pub fn mode(&self, rates: &CollectiveRates, profile: SpatialProfile) -> CliResult<PhotonMode> {
        let env = match *self {
            EnvelopeSpec::Matched => return Ok(PhotonMode::matched(rates, profile)?),
            EnvelopeSpec::RisingExponential {
                bandwidth,
                phase_rate,
            } => TemporalEnvelope::rising_exponential(bandwidth, phase_rate)?,
            EnvelopeSpec::DecayingExponential {
                bandwidth,
                phase_rate,
            } => TemporalEnvelope::decaying_exponential(bandwidth, phase_rate)?,
            EnvelopeSpec::Square {
                duration,
                phase_rate,
            } => TemporalEnvelope::square(duration, phase_rate)?,
            EnvelopeSpec::Gaussian { width, phase_rate } => {
                TemporalEnvelope::gaussian(width, phase_rate)?
            }
        };
        Ok(PhotonMode::uniform(profile, env))
    }
}

#[derive(Debug, Clone, Default, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FieldSpec {
    #[default]
    Fock1,
    Coherent {
        #[serde(default = "unit_alpha")]
        alpha: [f64; 2],
    },
}

fn unit_alpha() -> [f64; 2] {
    [1.0, 0.0]
}

#[derive(Debug, Clone, Copy, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum InitialSpec {
    Ground,
    Symmetric,
    Antisymmetric,
    BothExcited,
    FirstAtom,
}

impl InitialSpec {
    pub fn state(self) -> InitialState {
        match self {
            InitialSpec::Ground => InitialState::Ground,
            InitialSpec::Symmetric => InitialState::Symmetric,
            InitialSpec::Antisymmetric => InitialState::Antisymmetric,
            InitialSpec::BothExcited => InitialState::BothExcited,
            InitialSpec::FirstAtom => InitialState::FirstAtom,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            InitialSpec::Ground => "gg",
            InitialSpec::Symmetric => "s",
            InitialSpec::Antisymmetric => "a",
            InitialSpec::BothExcited => "ee",
            InitialSpec::FirstAtom => "eg",
        }
    }
}

#[derive(Debug, Clone, Copy, Deserialize, PartialEq, Eq)]
pub enum TargetSpec {
    #[serde(rename = "s")]
    Symmetric,
    #[serde(rename = "a")]
    Antisymmetric,
    #[serde(rename = "eg")]
    FirstAtom,
}

impl TargetSpec {
    pub fn target(self) -> Target {
        match self {
            TargetSpec::Symmetric => Target::Symmetric,
            TargetSpec::Antisymmetric => Target::Antisymmetric,
            TargetSpec::FirstAtom => Target::FirstAtom,
        }
    }
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FamilySpec {
    RisingExponential {
        bandwidth: [f64; 2],
    },
    Square {
        duration: [f64; 2],
    },
    Gaussian {
        width: [f64; 2],
    },
    RisingExponentialPair {
        bandwidth_s: [f64; 2],
        bandwidth_a: [f64; 2],
    },
}

impl FamilySpec {
    pub fn build(&self) -> CliResult<Family> {
        let iv = |b: [f64; 2]| Interval::new(b[0], b[1]);
        Ok(match *self {
            FamilySpec::RisingExponential { bandwidth } => Family::RisingExponential {
                bandwidth: iv(bandwidth)?,
            },
            FamilySpec::Square { duration } => Family::Square {
                duration: iv(duration)?,
            },
            FamilySpec::Gaussian { width } => Family::Gaussian { width: iv(width)? },
            FamilySpec::RisingExponentialPair {
                bandwidth_s,
                bandwidth_a,
            } => Family::RisingExponentialPair {
                symmetric: iv(bandwidth_s)?,
                antisymmetric: iv(bandwidth_a)?,
            },
        })
    }
}

fn default_theta() -> f64 {
    FRAC_PI_2
}

fn default_gamma() -> f64 {
    1.0
}

fn default_kr() -> Values {
    Values::List(vec![0.5, 1.0, 2.0])
}

fn default_profile() -> ProfileSpec {
    ProfileSpec::Named(ProfileName::Symmetric)
}

fn default_samples() -> usize {
    2001
}

fn default_initial() -> Vec<InitialSpec> {
    vec![InitialSpec::Symmetric, InitialSpec::Antisymmetric]
}

fn default_budget() -> usize {
    60
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Subcommand the file was written for, if any.
    #[serde(default)]
    pub command: Option<String>,
    /// Prefix of every output file.
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default = "default_kr")]
    pub kr: Values,
    #[serde(default = "default_theta")]
    pub theta: f64,
    #[serde(default = "default_gamma")]
    pub gamma: f64,
    #[serde(default = "default_profile")]
    pub profile: ProfileSpec,
    #[serde(default = "EnvelopeSpec::default")]
    pub envelope: EnvelopeSpec,
    #[serde(default = "FieldSpec::default")]
    pub field: FieldSpec,
    /// Observation window in units of 1/gamma.
    #[serde(default)]
    pub window: Option<[f64; 2]>,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_initial")]
    pub initial: Vec<InitialSpec>,
    #[serde(default)]
    pub target: Option<TargetSpec>,
    #[serde(default)]
    pub family: Option<FamilySpec>,
    #[serde(default = "default_budget")]
    pub budget: usize,
    /// Extra one-parameter scan for `optimize`.
    #[serde(default)]
    pub scan: Option<Values>,
    #[serde(default = "default_true")]
    pub plot: bool,
}

/// Merges `over` into `base`, replacing top-level keys.
fn merge(base: &mut Value, over: Value) {
    match (base, over) {
        (Value::Object(b), Value::Object(o)) => b.extend(o),
        (b, o) => *b = o,
    }
}

fn parse_json(text: &str, origin: &str) -> CliResult<Value> {
    serde_json::from_str(text).map_err(|e| CliError::Validation(format!("{origin}: {e}")))
}

pub fn preset(name: &str) -> CliResult<&'static str> {
    PRESETS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, text)| *text)
        .ok_or_else(|| {
            let known: Vec<&str> = PRESETS.iter().map(|(n, _)| *n).collect();
            CliError::Validation(format!(
                "unknown preset {name:?} (known: {})",
                known.join(", ")
            ))
        })
}

/// Loads the preset, then the config file on top of it.
pub fn load(preset_name: Option<&str>, path: Option<&Path>, command: &str) -> CliResult<RunConfig> {
    let mut value = Value::Object(Default::default());
    if let Some(name) = preset_name {
        merge(
            &mut value,
            parse_json(preset(name)?, &format!("preset {name}"))?,
        );
    }
    if let Some(path) = path {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        merge(&mut value, parse_json(&text, &path.display().to_string())?);
    }
    let config: RunConfig =
        serde_json::from_value(value).map_err(|e| CliError::Validation(e.to_string()))?;
    if let Some(c) = &config.command {
        if c != command {
            return Err(CliError::Validation(format!(
                "configuration is for `{c}`, not `{command}`"
            )));
        }
    }
    Ok(config)
}

impl RunConfig {
    pub fn name_or<'a>(&'a self, fallback: &'a str) -> &'a str {
        self.name.as_deref().unwrap_or(fallback)
    }

    pub fn kr_values(&self) -> CliResult<Vec<f64>> {
        let v = self.kr.expand()?;
        if v.is_empty() {
            return Err(CliError::Validation("kr list is empty".into()));
        }
        let mut labels: Vec<String> = v.iter().map(|&x| twoatom::io::fmt_sig(x)).collect();
        labels.sort();
        if let Some(w) = labels.windows(2).find(|w| w[0] == w[1]) {
            return Err(CliError::Validation(format!(
                "kr = {} is listed twice",
                w[0]
            )));
        }
        Ok(v)
    }

    /// Rates for every separation, validating each one.
    pub fn rates(&self) -> CliResult<Vec<(f64, CollectiveRates)>> {
        self.kr_values()?
            .into_iter()
            .enumerate()
            .map(|(i, kr)| {
                AtomPairConfig::new(kr, self.theta, self.gamma)
                    .and_then(|c| CollectiveRates::for_pair(&c))
                    .map(|r| (kr, r))
                    .map_err(|e| CliError::from(e.at_row(i)))
            })
            .collect()
    }

    pub fn checked_samples(&self) -> CliResult<usize> {
        if self.samples < 2 {
            return Err(CliError::Validation(format!(
                "samples = {} (need at least 2)",
                self.samples
            )));
        }
        Ok(self.samples)
    }

    pub fn checked_window(&self) -> CliResult<Option<(f64, f64)>> {
        match self.window {
            None => Ok(None),
            Some([lo, hi]) if lo.is_finite() && hi.is_finite() && hi > lo => Ok(Some((lo, hi))),
            Some([lo, hi]) => Err(CliError::Validation(format!(
                "window [{lo}, {hi}] is empty or not finite"
            ))),
        }
    }

    pub fn alpha(&self) -> Complex64 {
        match self.field {
            FieldSpec::Coherent { alpha } => Complex64::new(alpha[0], alpha[1]),
            FieldSpec::Fock1 => Complex64::new(1.0, 0.0),
        }
    }

    /// Separation-sweep settings for `coherent`; the profile picks the channel.
    pub fn peak_sweep(&self) -> CliResult<PeakSweep> {
        let channel = match self.profile {
            ProfileSpec::Named(ProfileName::Symmetric) => Channel::Symmetric,
            ProfileSpec::Named(ProfileName::Antisymmetric) => Channel::Antisymmetric,
            _ => return Err(CliError::Validation(
                "coherent sweeps drive one channel: use profile \"symmetric\" or \"antisymmetric\""
                    .into(),
            )),
        };
        if self.envelope != EnvelopeSpec::Matched {
            return Err(CliError::Validation(
                "coherent sweeps use the matched envelope".into(),
            ));
        }
        Ok(PeakSweep {
            theta: self.theta,
            gamma: self.gamma,
            alpha: self.alpha(),
            channel,
            samples: self.checked_samples()?,
        })
    }
}
