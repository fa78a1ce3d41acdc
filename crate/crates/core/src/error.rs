use core::fmt;

/// Which end of a spectral contour failed its decay check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ContourEnd {
    Origin,
    Infinity,
}

impl fmt::Display for ContourEnd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ContourEnd::Origin => f.write_str("origin"),
            ContourEnd::Infinity => f.write_str("infinity"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    InvalidParameter(&'static str),
    PointNotInterior { re: f64, im: f64, distance: f64 },
    DegenerateArc { side: usize, gap: f64 },
    NotInTrapezoid { re: f64, im: f64, margin: f64 },
    NoConvergence { panels: usize, error: f64, tolerance: f64 },
    NonDecayingIntegrand { t: f64, sampled: f64, envelope: f64 },
    EndpointNotDecaying { end: ContourEnd, samples: [f64; 3] },
    DecayCheckFailed { end: ContourEnd, value: f64 },
    RankDeficient { sigma_min: f64, sigma_max: f64 },
    SingularPoint,
    OracleDomain,
    ArgumentOutOfSector { arg: f64, chi: f64 },
    ZeroSpectralParameter,
    InvalidIndex(usize),
}

pub type Result<T> = core::result::Result<T, Error>;

impl Error {
    /// True for input-validation failures, false for numerical ones.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter(_)
                | Error::PointNotInterior { .. }
                | Error::NotInTrapezoid { .. }
                | Error::SingularPoint
                | Error::OracleDomain
                | Error::ArgumentOutOfSector { .. }
                | Error::ZeroSpectralParameter
                | Error::InvalidIndex(_)
        )
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidParameter(what) => write!(f, "invalid parameter: {what}"),
            Error::PointNotInterior { re, im, distance } => write!(
                f,
                "point {re}{im:+}i is not interior (distance to boundary {distance:e})"
            ),
            Error::DegenerateArc { side, gap } => {
                write!(f, "degenerate arc on side {side}: vertex gap {gap:e}")
            }
            Error::NotInTrapezoid { re, im, margin } => write!(
                f,
                "point {re}{im:+}i is not inside the trapezoid (margin {margin:e})"
            ),
            Error::NoConvergence { panels, error, tolerance } => write!(
                f,
                "quadrature did not converge after {panels} panels (error {error:e}, tolerance {tolerance:e})"
            ),
            Error::NonDecayingIntegrand { t, sampled, envelope } => write!(
                f,
                "integrand does not decay: |h({t})| = {sampled:e} exceeds envelope {envelope:e}"
            ),
            Error::EndpointNotDecaying { end, samples } => write!(
                f,
                "integrand not decaying at {end}: samples {:e}, {:e}, {:e}",
                samples[0], samples[1], samples[2]
            ),
            Error::DecayCheckFailed { end, value } => {
                write!(f, "contour decay check failed at {end}: |kernel| = {value:e}")
            }
            Error::RankDeficient { sigma_min, sigma_max } => write!(
                f,
                "least-squares matrix is rank deficient (sigma_min {sigma_min:e}, sigma_max {sigma_max:e})"
            ),
            Error::SingularPoint => f.write_str("evaluation at a singular point"),
            Error::OracleDomain => f.write_str("conformal oracle requires a > b"),
            Error::ArgumentOutOfSector { arg, chi } => write!(
                f,
                "arg(z - zeta) = {arg} lies outside the sector ({chi}, {chi} + pi)"
            ),
            Error::ZeroSpectralParameter => f.write_str("spectral parameter t must be nonzero"),
            Error::InvalidIndex(i) => write!(f, "side index {i} out of range 1..=4"),
        }
    }
}

impl core::error::Error for Error {}
