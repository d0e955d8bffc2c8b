use thiserror::Error;

/// Errors raised by the array model, pattern engine, closed-form predictors
/// and synthesis planner.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("directivity undefined: total radiated power is zero")]
    UndefinedDirectivity,

    #[error(
        "beam at theta = {theta_deg:.3} deg exceeds the maximum scan angle {limit_deg:.3} deg \
         for an aperture of {length_wavelengths:.4} wavelengths"
    )]
    ScanLimit {
        theta_deg: f64,
        limit_deg: f64,
        length_wavelengths: f64,
    },

    #[error(
        "aperture of {length_wavelengths:.4} wavelengths is shorter than 9/8 wavelength: \
         no valid scan range"
    )]
    NoScanRange { length_wavelengths: f64 },

    #[error(
        "infeasible design: sum of D_k / cos(theta_k) (with end-fire terms) = {budget:.6} \
         exceeds Dmax = {dmax:.6}"
    )]
    Infeasible { budget: f64, dmax: f64 },

    #[error("beams {first} and {second} share the azimuth {phi_deg:.3} deg")]
    SameAzimuth {
        first: usize,
        second: usize,
        phi_deg: f64,
    },

    #[error(
        "beams {first} and {second} are {separation_deg:.3} deg apart, closer than the \
         required {required_deg:.3} deg"
    )]
    BeamsTooClose {
        first: usize,
        second: usize,
        separation_deg: f64,
        required_deg: f64,
    },

    #[error("under-constrained design: {0}")]
    UnderConstrained(String),

    #[error("over-constrained design: {0}")]
    OverConstrained(String),
}

impl Error {
    /// True for rejections of a well-formed design (budget or geometry
    /// limits), as opposed to malformed input.
    pub fn is_design_rejection(&self) -> bool {
        matches!(
            self,
            Error::ScanLimit { .. }
                | Error::NoScanRange { .. }
                | Error::Infeasible { .. }
                | Error::SameAzimuth { .. }
                | Error::BeamsTooClose { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
