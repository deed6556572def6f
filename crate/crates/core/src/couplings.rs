//! Single-atom and collective decay rates and the collective Lamb shift for a
//! pair of identical two-level atoms with parallel dipoles.
//!
//! Both collective quantities are the imaginary and real parts of one
//! retarded dipole-dipole kernel
//!
//! ```text
//! K(x) = 3/2 e^{ix} [ sin²θ / x + (1 - 3cos²θ)(i/x² - 1/x³) ],   x = kr
//! ```
//!
//! with `gamma12 / gamma = Im K` and `lambda12 / gamma = Re K`. The real part is
//! the Hilbert transform partner of the imaginary part (the principal-value
//! frequency integral over the same mode sum), which is why it diverges as
//! `x^-3` at short range while the decay overlap stays bounded by one.
//!
//! `lambda12` is reported in the sign convention where the coherent exchange
//! Hamiltonian reads `-(lambda12 / 2)(σ₁⁺σ₂⁻ + σ₁⁻σ₂⁺)`, so for dipoles
//! perpendicular to the axis it is negative in the near field.

use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};
use crate::quadrature::Quadrature;

/// Smallest accepted `kr`. Below it `|lambda12|` exceeds 1e8 gamma.
pub const KR_MIN: f64 = 1e-3;

const THETA_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AtomPairConfig {
    /// Resonant wavenumber times interatomic distance.
    pub kr: f64,
    /// Angle between the common dipole direction and the interatomic axis.
    pub theta: f64,
    /// Single-atom decay rate; sets the time unit.
    pub gamma: f64,
}

impl AtomPairConfig {
    pub fn new(kr: f64, theta: f64, gamma: f64) -> Result<Self> {
        let cfg = Self { kr, theta, gamma };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Dipoles parallel to each other and perpendicular to the separation.
    pub fn perpendicular(kr: f64) -> Result<Self> {
        Self::new(kr, FRAC_PI_2, 1.0)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.kr >= KR_MIN) || !self.kr.is_finite() {
            return Err(Error::domain(
                "kr",
                self.kr,
                format!("must be finite and >= {KR_MIN:e}; the collective Lamb shift diverges as kr -> 0"),
            ));
        }
        if !(self.gamma > 0.0) || !self.gamma.is_finite() {
            return Err(Error::domain("gamma", self.gamma, "must be positive"));
        }
        if !(self.theta >= -THETA_SLACK && self.theta <= FRAC_PI_2 + THETA_SLACK) {
            return Err(Error::domain("theta", self.theta, "must lie in [0, pi/2]"));
        }
        Ok(())
    }

    fn angular_weights(&self) -> (f64, f64) {
        let c2 = self.theta.cos().powi(2);
        (1.0 - c2, 1.0 - 3.0 * c2)
    }
}

/// Rates for one configuration, in absolute units (multiply ratios by gamma).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollectiveRates {
    pub gamma: f64,
    pub gamma12: f64,
    pub lambda12: f64,
}

impl CollectiveRates {
    pub fn new(gamma: f64, gamma12: f64, lambda12: f64) -> Result<Self> {
        if !(gamma > 0.0) || !gamma.is_finite() {
            return Err(Error::domain("gamma", gamma, "must be positive"));
        }
        if !(gamma12.abs() <= gamma * (1.0 + 1e-12)) {
            return Err(Error::domain(
                "gamma12",
                gamma12,
                "must satisfy |gamma12| <= gamma",
            ));
        }
        if !lambda12.is_finite() {
            return Err(Error::domain("lambda12", lambda12, "must be finite"));
        }
        Ok(Self {
            gamma,
            gamma12,
            lambda12,
        })
    }

    /// Closed-form rates for a configuration.
    pub fn for_pair(config: &AtomPairConfig) -> Result<Self> {
        let k = dipole_kernel(config)?;
        Self::new(config.gamma, config.gamma * k.im, config.gamma * k.re)
    }

    /// Uncoupled atoms: no shared vacuum modes.
    pub fn independent(gamma: f64) -> Self {
        Self {
            gamma,
            gamma12: 0.0,
            lambda12: 0.0,
        }
    }

    /// Superradiant width `gamma + gamma12`.
    pub fn symmetric_width(&self) -> f64 {
        self.gamma + self.gamma12
    }

    /// Subradiant width `gamma - gamma12`.
    pub fn antisymmetric_width(&self) -> f64 {
        self.gamma - self.gamma12
    }
}

// cos x / x² - sin x / x³, evaluated without cancellation near the origin.
fn near_field_sine(x: f64) -> f64 {
    if x < 0.5 {
        let x2 = x * x;
        let mut sum = 0.0;
        let mut power = 1.0;
        let mut fact = 6.0; // (2n+1)! at n = 1
        for n in 1..30 {
            let n = n as f64;
            let term = power * 2.0 * n / fact;
            if n as usize % 2 == 1 {
                sum -= term;
            } else {
                sum += term;
            }
            if term.abs() < 1e-18 {
                break;
            }
            power *= x2;
            fact *= (2.0 * n + 2.0) * (2.0 * n + 3.0);
        }
        sum
    } else {
        x.cos() / (x * x) - x.sin() / (x * x * x)
    }
}

/// The complex kernel `K(kr)` whose imaginary part is `gamma12 / gamma` and
/// whose real part is `lambda12 / gamma`.
pub fn dipole_kernel(config: &AtomPairConfig) -> Result<Complex64> {
    config.validate()?;
    let x = config.kr;
    let (s, q) = config.angular_weights();
    let (sin, cos) = x.sin_cos();
    let decay = 1.5 * (s * sin / x + q * near_field_sine(x));
    let shift = 1.5 * (s * cos / x - q * (sin / (x * x) + cos / (x * x * x)));
    Ok(Complex64::new(shift, decay))
}

/// `gamma12 / gamma` for parallel dipoles at angle `theta` to the axis.
pub fn collective_decay_rate(config: &AtomPairConfig) -> Result<f64> {
    Ok(dipole_kernel(config)?.im)
}

/// `lambda12 / gamma`; magnitude grows as `kr^-3` at short range.
pub fn collective_lamb_shift(config: &AtomPairConfig) -> Result<f64> {
    Ok(dipole_kernel(config)?.re)
}

/// `gamma12 / gamma` from the on-shell mode sum: the solid-angle average of the
/// transverse projector `1 - (d·k)²` weighted by the propagation phase
/// `cos(kr k·r)`, normalised so coincident atoms give one.
pub fn decay_rate_quadrature(config: &AtomPairConfig) -> Result<f64> {
    config.validate()?;
    let (dx, dz) = (config.theta.sin(), config.theta.cos());
    let x = config.kr;
    let inner = Quadrature {
        abs_tol: 1e-14,
        rel_tol: 1e-14,
        max_intervals: 200,
    };
    let outer = Quadrature {
        abs_tol: 1e-12,
        rel_tol: 1e-14,
        max_intervals: 4000,
    };
    let mut failure = None;
    // u = cos of the polar angle measured from the interatomic axis
    let est = outer.integrate(
        |u| {
            let sin_polar = (1.0 - u * u).max(0.0).sqrt();
            let phi_integral = inner.integrate(
                |phi| {
                    let dk = dx * sin_polar * phi.cos() + dz * u;
                    1.0 - dk * dk
                },
                0.0,
                2.0 * PI,
            );
            match phi_integral {
                Ok(e) => e.value * (x * u).cos(),
                Err(e) => {
                    failure.get_or_insert(e);
                    0.0
                }
            }
        },
        -1.0,
        1.0,
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    let norm = 3.0 / (8.0 * PI);
    let error = est.error * norm;
    if error > 1e-9 {
        return Err(Error::Quadrature {
            estimate: error,
            tolerance: 1e-9,
        });
    }
    Ok(est.value * norm)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatesRow {
    pub kr: f64,
    pub gamma12_over_gamma: f64,
    pub lambda12_over_gamma: f64,
}

/// Closed-form rates at each separation; errors carry the offending row index.
pub fn rates_sweep(kr_values: &[f64], theta: f64) -> Result<Vec<RatesRow>> {
    kr_values
        .iter()
        .enumerate()
        .map(|(i, &kr)| rates_row(kr, theta).map_err(|e| e.at_row(i)))
        .collect()
}

pub fn rates_row(kr: f64, theta: f64) -> Result<RatesRow> {
    let k = dipole_kernel(&AtomPairConfig::new(kr, theta, 1.0)?)?;
    Ok(RatesRow {
        kr,
        gamma12_over_gamma: k.im,
        lambda12_over_gamma: k.re,
    })
}
