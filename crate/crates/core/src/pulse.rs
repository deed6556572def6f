//! Photon mode construction: how the single photon (or coherent pulse) is
//! split between the symmetric and antisymmetric collective modes, and the
//! temporal envelope carried by each.

use num_complex::Complex64;

use crate::couplings::CollectiveRates;
use crate::error::{Error, Result};
use crate::fock::CLS_SIGN;
use crate::quadrature::Quadrature;

/// Exponential envelopes are truncated this many e-folds of intensity from
/// their edge, leaving a norm deficit of `e^-40`.
pub const EXP_SUPPORT_EFOLDS: f64 = 40.0;

/// Gaussian envelopes are truncated at this many intensity standard deviations.
pub const GAUSSIAN_SUPPORT_SIGMAS: f64 = 9.0;

/// Relative width below which the antisymmetric channel is treated as closed.
pub const DEGENERATE_WIDTH: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Channel {
    Symmetric,
    Antisymmetric,
}

/// Weights of the photon on the two orthogonal collective spatial modes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpatialProfile {
    pub c_s: Complex64,
    pub c_a: Complex64,
}

impl SpatialProfile {
    pub const SYMMETRIC: Self = Self {
        c_s: Complex64::new(1.0, 0.0),
        c_a: Complex64::new(0.0, 0.0),
    };

    pub const ANTISYMMETRIC: Self = Self {
        c_s: Complex64::new(0.0, 0.0),
        c_a: Complex64::new(1.0, 0.0),
    };

    /// Equal superposition that localises the excitation on atom 1.
    pub fn first_atom() -> Self {
        let w = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self { c_s: w, c_a: w }
    }

    pub fn weight(&self, channel: Channel) -> Complex64 {
        match channel {
            Channel::Symmetric => self.c_s,
            Channel::Antisymmetric => self.c_a,
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.c_s.norm_sqr() + self.c_a.norm_sqr()
    }
}

/// Renormalised profile from arbitrary (nonzero) channel weights.
pub fn superposition_profile(weight_s: Complex64, weight_a: Complex64) -> Result<SpatialProfile> {
    let n2 = weight_s.norm_sqr() + weight_a.norm_sqr();
    if !(n2 > 0.0) || !n2.is_finite() {
        return Err(Error::InvalidInput(
            "spatial profile weights must not both vanish".into(),
        ));
    }
    let n = n2.sqrt();
    Ok(SpatialProfile {
        c_s: weight_s / n,
        c_a: weight_a / n,
    })
}

/// Overlap norm of the delocalised two-dipole mode: `1 ± gamma12 / gamma`.
pub fn mode_normalization(rates: &CollectiveRates, which: Channel) -> f64 {
    let r = rates.gamma12 / rates.gamma;
    match which {
        Channel::Symmetric => 1.0 + r,
        Channel::Antisymmetric => 1.0 - r,
    }
}

/// Which side of a discontinuity to evaluate at.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Side {
    #[default]
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnvelopeKind {
    Zero,
    RisingExponential,
    DecayingExponential,
    Square,
    Gaussian,
    Sampled,
}

/// Uniformly sampled envelope, linearly interpolated between samples.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledEnvelope {
    t0: f64,
    dt: f64,
    values: Vec<Complex64>,
}

impl SampledEnvelope {
    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    fn end(&self) -> f64 {
        self.t0 + self.dt * (self.values.len() - 1) as f64
    }

    fn interpolate(&self, t: f64) -> Complex64 {
        let pos = (t - self.t0) / self.dt;
        let last = self.values.len() - 1;
        let i = (pos.floor().max(0.0) as usize).min(last.saturating_sub(1));
        let frac = (pos - i as f64).clamp(0.0, 1.0);
        self.values[i] * (1.0 - frac) + self.values[(i + 1).min(last)] * frac
    }

    // exact integral of |linear interpolant|²
    fn norm_sqr(values: &[Complex64], dt: f64) -> f64 {
        values
            .windows(2)
            .map(|w| {
                let (a, b) = (w[0], w[1]);
                dt / 3.0 * (a.norm_sqr() + (a * b.conj()).re + b.norm_sqr())
            })
            .sum()
    }
}

/// Temporal envelope `ξ(t)` of one channel, normalised to `∫|ξ|² dt = 1`.
///
/// The phase rate `ν` multiplies every kind by `e^{iνt}`; a positive `ν`
/// centres the spectrum at detuning `-ν` under `f(ω) = ∫ ξ(t) e^{iωt} dt`.
#[derive(Debug, Clone, PartialEq)]
pub enum TemporalEnvelope {
    /// No photon in this channel.
    Zero,
    /// `√Γ e^{(Γ/2 + iν)t}` for `t ≤ 0`; the time-reverse of spontaneous decay.
    RisingExponential {
        bandwidth: f64,
        phase_rate: f64,
    },
    /// `√Γ e^{(-Γ/2 + iν)t}` for `t ≥ 0`.
    DecayingExponential {
        bandwidth: f64,
        phase_rate: f64,
    },
    /// Flat top of length `duration` ending at `t = 0`.
    Square {
        duration: f64,
        phase_rate: f64,
    },
    /// Centred at `t = 0`; `width` is the standard deviation of `|ξ|²`.
    Gaussian {
        width: f64,
        phase_rate: f64,
    },
    Sampled(SampledEnvelope),
}

fn positive(param: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(param, v, "must be positive and finite"))
    }
}

fn finite(param: &'static str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(param, v, "must be finite"))
    }
}

impl TemporalEnvelope {
    pub fn rising_exponential(bandwidth: f64, phase_rate: f64) -> Result<Self> {
        positive("bandwidth", bandwidth)?;
        finite("phase_rate", phase_rate)?;
        Ok(Self::RisingExponential {
            bandwidth,
            phase_rate,
        })
    }

    pub fn decaying_exponential(bandwidth: f64, phase_rate: f64) -> Result<Self> {
        positive("bandwidth", bandwidth)?;
        finite("phase_rate", phase_rate)?;
        Ok(Self::DecayingExponential {
            bandwidth,
            phase_rate,
        })
    }

    pub fn square(duration: f64, phase_rate: f64) -> Result<Self> {
        positive("duration", duration)?;
        finite("phase_rate", phase_rate)?;
        Ok(Self::Square {
            duration,
            phase_rate,
        })
    }

    pub fn gaussian(width: f64, phase_rate: f64) -> Result<Self> {
        positive("width", width)?;
        finite("phase_rate", phase_rate)?;
        Ok(Self::Gaussian { width, phase_rate })
    }

    /// Builds a sampled envelope and rescales it to unit norm.
    pub fn sampled(t0: f64, dt: f64, values: Vec<Complex64>) -> Result<Self> {
        finite("t0", t0)?;
        positive("dt", dt)?;
        if values.len() < 2 {
            return Err(Error::InvalidInput(
                "sampled envelope needs at least two samples".into(),
            ));
        }
        let n2 = SampledEnvelope::norm_sqr(&values, dt);
        if !(n2 > 0.0) || !n2.is_finite() {
            return Err(Error::InvalidInput(
                "sampled envelope has zero or non-finite norm".into(),
            ));
        }
        let scale = n2.sqrt().recip();
        let values = values.into_iter().map(|v| v * scale).collect();
        Ok(Self::Sampled(SampledEnvelope { t0, dt, values }))
    }

    /// Samples this envelope on `n` uniform points over its support.
    pub fn resample(&self, n: usize) -> Result<Self> {
        let (lo, hi) = self
            .support()
            .ok_or_else(|| Error::InvalidInput("cannot resample an empty envelope".into()))?;
        if n < 2 {
            return Err(Error::InvalidInput("need at least two samples".into()));
        }
        let dt = (hi - lo) / (n - 1) as f64;
        let values = (0..n)
            .map(|i| {
                let t = lo + dt * i as f64;
                let side = if i == 0 { Side::Right } else { Side::Left };
                self.eval(t, side)
            })
            .collect();
        Self::sampled(lo, dt, values)
    }

    pub fn kind(&self) -> EnvelopeKind {
        match self {
            Self::Zero => EnvelopeKind::Zero,
            Self::RisingExponential { .. } => EnvelopeKind::RisingExponential,
            Self::DecayingExponential { .. } => EnvelopeKind::DecayingExponential,
            Self::Square { .. } => EnvelopeKind::Square,
            Self::Gaussian { .. } => EnvelopeKind::Gaussian,
            Self::Sampled(_) => EnvelopeKind::Sampled,
        }
    }

    /// Characteristic rate: the exponential width, or the inverse duration.
    pub fn bandwidth(&self) -> Option<f64> {
        match *self {
            Self::Zero => None,
            Self::RisingExponential { bandwidth, .. }
            | Self::DecayingExponential { bandwidth, .. } => Some(bandwidth),
            Self::Square { duration, .. } => Some(1.0 / duration),
            Self::Gaussian { width, .. } => Some(1.0 / width),
            Self::Sampled(ref s) => Some(1.0 / (s.end() - s.t0)),
        }
    }

    pub fn phase_rate(&self) -> f64 {
        match *self {
            Self::RisingExponential { phase_rate, .. }
            | Self::DecayingExponential { phase_rate, .. }
            | Self::Square { phase_rate, .. }
            | Self::Gaussian { phase_rate, .. } => phase_rate,
            Self::Zero | Self::Sampled(_) => 0.0,
        }
    }

    /// Same shape with a different phase rate (no-op for zero and sampled).
    pub fn with_phase_rate(&self, nu: f64) -> Self {
        match self.clone() {
            Self::RisingExponential { bandwidth, .. } => Self::RisingExponential {
                bandwidth,
                phase_rate: nu,
            },
            Self::DecayingExponential { bandwidth, .. } => Self::DecayingExponential {
                bandwidth,
                phase_rate: nu,
            },
            Self::Square { duration, .. } => Self::Square {
                duration,
                phase_rate: nu,
            },
            Self::Gaussian { width, .. } => Self::Gaussian {
                width,
                phase_rate: nu,
            },
            other => other,
        }
    }

    /// Closed interval outside which the envelope vanishes.
    pub fn support(&self) -> Option<(f64, f64)> {
        match *self {
            Self::Zero => None,
            Self::RisingExponential { bandwidth, .. } => {
                Some((-EXP_SUPPORT_EFOLDS / bandwidth, 0.0))
            }
            Self::DecayingExponential { bandwidth, .. } => {
                Some((0.0, EXP_SUPPORT_EFOLDS / bandwidth))
            }
            Self::Square { duration, .. } => Some((-duration, 0.0)),
            Self::Gaussian { width, .. } => {
                let h = GAUSSIAN_SUPPORT_SIGMAS * width;
                Some((-h, h))
            }
            Self::Sampled(ref s) => Some((s.t0, s.end())),
        }
    }

    pub fn value(&self, t: f64) -> Complex64 {
        self.eval(t, Side::Left)
    }

    /// One-sided value; differs from [`value`](Self::value) only at the
    /// support edges, where the envelope may jump.
    pub fn eval(&self, t: f64, side: Side) -> Complex64 {
        let Some((lo, hi)) = self.support() else {
            return Complex64::new(0.0, 0.0);
        };
        let inside = match side {
            Side::Left => t > lo && t <= hi,
            Side::Right => t >= lo && t < hi,
        };
        if !inside {
            return Complex64::new(0.0, 0.0);
        }
        let phase = |nu: f64| Complex64::from_polar(1.0, nu * t);
        match *self {
            Self::Zero => Complex64::new(0.0, 0.0),
            Self::RisingExponential {
                bandwidth,
                phase_rate,
            } => phase(phase_rate) * (bandwidth.sqrt() * (0.5 * bandwidth * t).exp()),
            Self::DecayingExponential {
                bandwidth,
                phase_rate,
            } => phase(phase_rate) * (bandwidth.sqrt() * (-0.5 * bandwidth * t).exp()),
            Self::Square {
                duration,
                phase_rate,
            } => phase(phase_rate) / duration.sqrt(),
            Self::Gaussian { width, phase_rate } => {
                let amp = (2.0 * std::f64::consts::PI * width * width).powf(-0.25);
                phase(phase_rate) * (amp * (-t * t / (4.0 * width * width)).exp())
            }
            Self::Sampled(ref s) => s.interpolate(t),
        }
    }

    /// Points where the envelope (or its derivative) is discontinuous.
    pub fn breakpoints(&self) -> Vec<f64> {
        self.support().map(|(a, b)| vec![a, b]).unwrap_or_default()
    }

    /// `∫|ξ|² dt` by adaptive quadrature over the support.
    pub fn norm_sqr(&self) -> Result<f64> {
        match self {
            Self::Zero => Ok(0.0),
            Self::Sampled(s) => Ok(SampledEnvelope::norm_sqr(&s.values, s.dt)),
            _ => {
                let (lo, hi) = self.support().expect("analytic kinds have support");
                let q = Quadrature {
                    abs_tol: 1e-13,
                    rel_tol: 1e-13,
                    max_intervals: 4000,
                };
                Ok(
                    q.integrate(|t| self.eval(t, Side::Right).norm_sqr(), lo, hi)?
                        .value,
                )
            }
        }
    }

    /// `f(ω) = ∫ ξ(t) e^{iωt} dt` at each detuning, so that
    /// `∫ |f|² dω / 2π = ∫ |ξ|² dt`.
    pub fn frequency_profile(&self, omega_grid: &[f64]) -> Vec<Complex64> {
        omega_grid.iter().map(|&w| self.spectrum_at(w)).collect()
    }

    fn spectrum_at(&self, omega: f64) -> Complex64 {
        let i = Complex64::i();
        match *self {
            Self::Zero => Complex64::new(0.0, 0.0),
            Self::RisingExponential {
                bandwidth,
                phase_rate,
            } => {
                let z = Complex64::new(0.5 * bandwidth, omega + phase_rate);
                let t0 = -EXP_SUPPORT_EFOLDS / bandwidth;
                bandwidth.sqrt() * (1.0 - (z * t0).exp()) / z
            }
            Self::DecayingExponential {
                bandwidth,
                phase_rate,
            } => {
                let z = Complex64::new(-0.5 * bandwidth, omega + phase_rate);
                let t1 = EXP_SUPPORT_EFOLDS / bandwidth;
                bandwidth.sqrt() * ((z * t1).exp() - 1.0) / z
            }
            Self::Square {
                duration,
                phase_rate,
            } => {
                let w = omega + phase_rate;
                let x = w * duration;
                let integral = if x.abs() < 1e-8 {
                    Complex64::new(duration, -0.5 * w * duration * duration)
                } else {
                    (1.0 - (-i * x).exp()) / (i * w)
                };
                integral / duration.sqrt()
            }
            Self::Gaussian { width, phase_rate } => {
                let w = omega + phase_rate;
                let amp = (2.0 * std::f64::consts::PI * width * width).powf(-0.25);
                let v = amp
                    * (4.0 * std::f64::consts::PI).sqrt()
                    * width
                    * (-w * w * width * width).exp();
                Complex64::new(v, 0.0)
            }
            Self::Sampled(ref s) => sampled_transform(s, omega),
        }
    }
}

// Exact transform of the piecewise-linear interpolant.
fn sampled_transform(s: &SampledEnvelope, omega: f64) -> Complex64 {
    let h = s.dt;
    let z = Complex64::new(0.0, omega);
    let zh = z * h;
    let (e0, e1) = if zh.norm() < 1e-2 {
        // h Σ (zh)^n/(n+1)!  and  h Σ (zh)^n/(n!(n+2))
        let mut e0 = Complex64::new(0.0, 0.0);
        let mut e1 = Complex64::new(0.0, 0.0);
        let mut pow = Complex64::new(1.0, 0.0);
        let mut fact = 1.0;
        for n in 0..10 {
            let nf = n as f64;
            e0 += pow / (fact * (nf + 1.0));
            e1 += pow / (fact * (nf + 2.0));
            pow *= zh;
            fact *= nf + 1.0;
        }
        (e0 * h, e1 * h)
    } else {
        let ezh = zh.exp();
        let e0 = (ezh - 1.0) / z;
        let e1 = (ezh * h / z - (ezh - 1.0) / (z * z)) / h;
        (e0, e1)
    };
    s.values
        .windows(2)
        .enumerate()
        .map(|(k, w)| {
            let a = s.t0 + h * k as f64;
            (z * a).exp() * (w[0] * e0 + (w[1] - w[0]) * e1)
        })
        .sum()
}

/// Phase rate that puts a pulse on resonance with the given collective level.
pub fn matched_phase_rate(rates: &CollectiveRates, channel: Channel) -> f64 {
    match channel {
        Channel::Symmetric => -CLS_SIGN * rates.lambda12 / 2.0,
        Channel::Antisymmetric => CLS_SIGN * rates.lambda12 / 2.0,
    }
}

/// Rising exponential with bandwidth `gamma + gamma12`, on resonance with `|s⟩`.
pub fn symmetric_pulse(rates: &CollectiveRates) -> Result<TemporalEnvelope> {
    let width = rates.symmetric_width();
    assert!(width > 0.0, "superradiant width must be positive");
    TemporalEnvelope::rising_exponential(width, matched_phase_rate(rates, Channel::Symmetric))
}

/// Rising exponential with bandwidth `gamma - gamma12`, on resonance with `|a⟩`.
pub fn antisymmetric_pulse(rates: &CollectiveRates) -> Result<TemporalEnvelope> {
    let width = rates.antisymmetric_width();
    let threshold = DEGENERATE_WIDTH * rates.gamma;
    if !(width > threshold) {
        return Err(Error::DegenerateChannel { width, threshold });
    }
    TemporalEnvelope::rising_exponential(width, matched_phase_rate(rates, Channel::Antisymmetric))
}

/// The photon's full spatio-temporal mode: a weight and an envelope for each
/// collective channel.
#[derive(Debug, Clone, PartialEq)]
pub struct PhotonMode {
    pub profile: SpatialProfile,
    pub symmetric: TemporalEnvelope,
    pub antisymmetric: TemporalEnvelope,
}

impl PhotonMode {
    /// One envelope shared by both channels.
    pub fn uniform(profile: SpatialProfile, envelope: TemporalEnvelope) -> Self {
        Self {
            profile,
            symmetric: envelope.clone(),
            antisymmetric: envelope,
        }
    }

    /// Matched rising exponentials in every channel the profile populates.
    pub fn matched(rates: &CollectiveRates, profile: SpatialProfile) -> Result<Self> {
        let symmetric = if profile.c_s.norm_sqr() > 0.0 {
            symmetric_pulse(rates)?
        } else {
            TemporalEnvelope::Zero
        };
        let antisymmetric = if profile.c_a.norm_sqr() > 0.0 {
            antisymmetric_pulse(rates)?
        } else {
            TemporalEnvelope::Zero
        };
        Ok(Self {
            profile,
            symmetric,
            antisymmetric,
        })
    }

    pub fn envelope(&self, channel: Channel) -> &TemporalEnvelope {
        match channel {
            Channel::Symmetric => &self.symmetric,
            Channel::Antisymmetric => &self.antisymmetric,
        }
    }

    /// `c · ξ(t)` for one channel.
    pub fn amplitude(&self, channel: Channel, t: f64, side: Side) -> Complex64 {
        let w = self.profile.weight(channel);
        if w.norm_sqr() == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        w * self.envelope(channel).eval(t, side)
    }

    /// Envelopes that actually carry amplitude.
    pub fn active(&self) -> impl Iterator<Item = (Channel, &TemporalEnvelope)> {
        [Channel::Symmetric, Channel::Antisymmetric]
            .into_iter()
            .filter(|&c| self.profile.weight(c).norm_sqr() > 0.0)
            .map(|c| (c, self.envelope(c)))
            .filter(|(_, e)| e.kind() != EnvelopeKind::Zero)
    }

    /// Union of the active supports.
    pub fn support(&self) -> Option<(f64, f64)> {
        self.active()
            .filter_map(|(_, e)| e.support())
            .reduce(|a, b| (a.0.min(b.0), a.1.max(b.1)))
    }

    pub fn breakpoints(&self) -> Vec<f64> {
        let mut b: Vec<f64> = self.active().flat_map(|(_, e)| e.breakpoints()).collect();
        b.sort_by(f64::total_cmp);
        b.dedup();
        b
    }

    /// Narrowest active bandwidth, which sets the longest time scale.
    pub fn slowest_bandwidth(&self) -> Option<f64> {
        self.active()
            .filter_map(|(_, e)| e.bandwidth())
            .reduce(f64::min)
    }

    pub fn fastest_bandwidth(&self) -> Option<f64> {
        self.active()
            .filter_map(|(_, e)| e.bandwidth())
            .reduce(f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn rates(g12: f64, l12: f64) -> CollectiveRates {
        CollectiveRates::new(1.0, g12, l12).unwrap()
    }

    #[test]
    fn decoupled_symmetric_pulse_is_single_atom_shape() {
        let env = symmetric_pulse(&rates(0.0, 0.0)).unwrap();
        for t in [-3.0, -1.0, -0.1, 0.0] {
            assert!((env.value(t) - Complex64::new((0.5f64 * t).exp(), 0.0)).norm() < 1e-15);
        }
        assert_eq!(env.value(0.5), Complex64::new(0.0, 0.0));
        assert!((env.norm_sqr().unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn bandwidths_follow_collective_widths() {
        let env = symmetric_pulse(&rates(0.9, 0.0)).unwrap();
        assert_eq!(env.bandwidth(), Some(1.9));
        let env = antisymmetric_pulse(&rates(0.99, 0.0)).unwrap();
        assert!((env.bandwidth().unwrap() - 0.01).abs() < 1e-12);
    }

    #[test]
    fn channel_phases_are_opposite() {
        let r = rates(0.3, -0.8);
        let s = symmetric_pulse(&r).unwrap();
        let a = antisymmetric_pulse(&r).unwrap();
        assert_eq!(s.phase_rate(), -a.phase_rate());
        assert_eq!(s.phase_rate(), r.lambda12 / 2.0);
        let r0 = rates(0.0, 0.0);
        assert_eq!(
            symmetric_pulse(&r0).unwrap(),
            antisymmetric_pulse(&r0).unwrap()
        );
    }

    #[test]
    fn closed_antisymmetric_channel_is_refused() {
        let err = antisymmetric_pulse(&rates(1.0 - 1e-9, 0.0)).unwrap_err();
        assert!(matches!(err, Error::DegenerateChannel { .. }));
    }

    #[test]
    fn envelopes_have_unit_norm() {
        let envs = [
            TemporalEnvelope::rising_exponential(1.7, 0.4).unwrap(),
            TemporalEnvelope::rising_exponential(0.02, -3.0).unwrap(),
            TemporalEnvelope::decaying_exponential(2.5, 0.0).unwrap(),
            TemporalEnvelope::square(1.3, 1.0).unwrap(),
            TemporalEnvelope::gaussian(0.35, -0.2).unwrap(),
        ];
        for env in &envs {
            assert!((env.norm_sqr().unwrap() - 1.0).abs() < 1e-9, "{env:?}");
            let s = env.resample(2001).unwrap();
            assert!((s.norm_sqr().unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn one_sided_support() {
        let rise = TemporalEnvelope::rising_exponential(1.0, 0.0).unwrap();
        let fall = TemporalEnvelope::decaying_exponential(1.0, 0.0).unwrap();
        assert_eq!(rise.eval(0.0, Side::Right).norm(), 0.0);
        assert_eq!(rise.eval(1e-9, Side::Left).norm(), 0.0);
        assert_eq!(fall.eval(-1e-9, Side::Left).norm(), 0.0);
        assert_eq!(fall.eval(0.0, Side::Left).norm(), 0.0);
        assert_eq!(fall.eval(0.0, Side::Right).norm(), 1.0);
    }

    #[test]
    fn profile_construction() {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        assert_eq!(
            superposition_profile(one, zero).unwrap(),
            SpatialProfile::SYMMETRIC
        );
        assert_eq!(
            superposition_profile(one * 2.0, zero).unwrap(),
            SpatialProfile::SYMMETRIC
        );
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let p = superposition_profile(h, h).unwrap();
        assert!((p.c_s - h).norm() < 1e-15 && (p.c_a - h).norm() < 1e-15);
        assert!(superposition_profile(zero, zero).is_err());
    }

    #[test]
    fn normalization_constants() {
        let r = rates(0.5, 0.0);
        assert_eq!(mode_normalization(&r, Channel::Symmetric), 1.5);
        assert_eq!(mode_normalization(&r, Channel::Antisymmetric), 0.5);
        let r = rates(0.0, 0.0);
        assert_eq!(mode_normalization(&r, Channel::Symmetric), 1.0);
        assert_eq!(mode_normalization(&r, Channel::Antisymmetric), 1.0);
    }

    #[test]
    fn lorentzian_half_width() {
        let env = TemporalEnvelope::rising_exponential(1.0, 0.0).unwrap();
        let f = env.frequency_profile(&[0.0, 0.5]);
        assert!((f[0].norm_sqr() - 4.0).abs() < 1e-7);
        assert!((f[1].norm_sqr() / f[0].norm_sqr() - 0.5).abs() < 1e-8);
        assert!(env.frequency_profile(&[]).is_empty());
    }

    #[test]
    fn square_first_zero() {
        let t = 2.5;
        let env = TemporalEnvelope::square(t, 0.0).unwrap();
        let f = env.frequency_profile(&[0.0, 2.0 * PI / t, PI / t]);
        assert!((f[0].norm_sqr() - t).abs() < 1e-12);
        assert!(f[1].norm() < 1e-12);
        assert!(f[2].norm() > 0.1);
    }

    #[test]
    fn parseval_on_wide_grid() {
        let env = TemporalEnvelope::rising_exponential(1.0, 0.3).unwrap();
        let q = Quadrature {
            abs_tol: 1e-12,
            rel_tol: 1e-12,
            max_intervals: 10000,
        };
        // Lorentzian tails beyond |ω| = 2e4 carry 1/(π·2e4) ~ 1.6e-5 of the norm;
        // integrate the tail analytically.
        let w = 2e4;
        let body = q
            .integrate(|x| env.frequency_profile(&[x])[0].norm_sqr(), -w, w)
            .unwrap()
            .value;
        let tail = 2.0 * (0.5 * PI - (w / 0.5).atan()) / 0.5;
        let total = (body + tail) / (2.0 * PI);
        assert!((total - 1.0).abs() < 1e-6, "{total}");
    }

    #[test]
    fn sampled_transform_matches_closed_forms() {
        let envs = [
            TemporalEnvelope::rising_exponential(1.0, 0.25).unwrap(),
            TemporalEnvelope::decaying_exponential(2.0, -0.5).unwrap(),
            TemporalEnvelope::gaussian(0.8, 0.0).unwrap(),
        ];
        let grid: Vec<f64> = (-40..=40).map(|k| 0.1 * k as f64).collect();
        for env in &envs {
            let sampled = env.resample(40_001).unwrap();
            let exact = env.frequency_profile(&grid);
            let numeric = sampled.frequency_profile(&grid);
            for (a, b) in exact.iter().zip(&numeric) {
                assert!((a - b).norm() < 1e-6, "{env:?}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn matched_mode_skips_empty_channels() {
        let r = rates(1.0 - 1e-9, 1e6);
        let m = PhotonMode::matched(&r, SpatialProfile::SYMMETRIC).unwrap();
        assert_eq!(m.antisymmetric, TemporalEnvelope::Zero);
        assert!(PhotonMode::matched(&r, SpatialProfile::first_atom()).is_err());
    }
}
