use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A parameter lies outside the domain where the model is defined.
    #[error("invalid {param} = {value}: {reason}")]
    Domain {
        param: &'static str,
        value: f64,
        reason: String,
    },

    /// The antisymmetric channel closes as the atoms coalesce; a matched pulse
    /// would need an unbounded duration.
    #[error(
        "degenerate antisymmetric channel: gamma - gamma12 = {width:e} is below {threshold:e}"
    )]
    DegenerateChannel { width: f64, threshold: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("quadrature did not converge: error estimate {estimate:e} exceeds {tolerance:e}")]
    Quadrature { estimate: f64, tolerance: f64 },

    #[error("integrator step size underflow at t = {t}")]
    StepUnderflow { t: f64 },

    #[error("integrator exceeded {steps} steps at t = {t}")]
    TooManySteps { t: f64, steps: usize },

    /// Signals a solver bug, not a user error.
    #[error("invariant violated at t = {t}: {what}")]
    Invariant { t: f64, what: String },

    #[error("row {index}: {source}")]
    Row {
        index: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn domain(param: &'static str, value: f64, reason: impl Into<String>) -> Self {
        Error::Domain {
            param,
            value,
            reason: reason.into(),
        }
    }

    pub fn at_row(self, index: usize) -> Self {
        Error::Row {
            index,
            source: Box::new(self),
        }
    }

    /// True for failures caused by bad user input rather than numerics.
    pub fn is_validation(&self) -> bool {
        match self {
            Error::Domain { .. } | Error::DegenerateChannel { .. } | Error::InvalidInput(_) => true,
            Error::Row { source, .. } => source.is_validation(),
            _ => false,
        }
    }
}
