//! Error type shared by all simulator modules.

use std::fmt;

/// Everything that can go wrong while validating or running a scenario.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A physical constant that must be strictly positive was not.
    NonPositiveInput { name: &'static str, value: f64 },
    /// A slit was declared with `sigma0 <= 0`.
    NonPositiveSigma { slit: usize, value: f64 },
    /// A slit was declared with a negative amplitude weight.
    NegativeWeight { slit: usize, value: f64 },
    /// No slit carries a positive weight (or the slit list is empty).
    EmptySlits,
    /// The spatial grid cannot represent the fields (nx < 3, nt < 1, ...).
    BadGrid { reason: String },
    /// The domain does not cover 6 sigma around a slit centroid's final
    /// position, so boundary truncation would exceed 1e-8 of peak.
    DomainTooSmall {
        slit: usize,
        needed_min: f64,
        needed_max: f64,
    },
    /// A field was evaluated at t < 0.
    NegativeTime { t: f64 },
    /// Two channels built from different physical constants were combined.
    MismatchedParams,
    /// A superposition was requested over an empty channel list.
    EmptyChannels,
    /// The local density is below the floor where a velocity is defined.
    VanishingDensity { x: f64, t: f64 },
    /// The explicit diffusion step would run with r = D*dt/dx^2 > 1/2.
    StabilityViolation { step: usize, r: f64, max_dt: f64 },
    /// A grating-only diagnostic was called on a non-grating scenario.
    NotAGrating { reason: String },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NonPositiveInput { name, value } => {
                write!(f, "{name} must be strictly positive, got {value}")
            }
            Error::NonPositiveSigma { slit, value } => {
                write!(f, "slit {slit}: sigma0 must be strictly positive, got {value}")
            }
            Error::NegativeWeight { slit, value } => {
                write!(f, "slit {slit}: weight must be non-negative, got {value}")
            }
            Error::EmptySlits => write!(f, "scenario needs at least one slit with weight > 0"),
            Error::BadGrid { reason } => write!(f, "bad grid: {reason}"),
            Error::DomainTooSmall {
                slit,
                needed_min,
                needed_max,
            } => write!(
                f,
                "domain too small for slit {slit}: needs [{needed_min}, {needed_max}] \
                 (6 sigma around the final centroid)"
            ),
            Error::NegativeTime { t } => write!(f, "time must be non-negative, got {t}"),
            Error::MismatchedParams => write!(f, "channels do not share physical constants"),
            Error::EmptyChannels => write!(f, "superposition needs at least one channel"),
            Error::VanishingDensity { x, t } => {
                write!(f, "density vanishes at (x = {x}, t = {t}); velocity undefined")
            }
            Error::StabilityViolation { step, r, max_dt } => write!(
                f,
                "diffusion step {step} unstable: r = {r} > 0.5; largest admissible dt = {max_dt}"
            ),
            Error::NotAGrating { reason } => write!(f, "not a grating: {reason}"),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
