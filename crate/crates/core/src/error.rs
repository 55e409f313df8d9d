use thiserror::Error;

/// Errors raised by the guidance library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Position or angular momentum too close to zero to define an RTN frame.
    #[error("degenerate state: |r| = {r:e} m, |r x v| = {h:e} m^2/s")]
    DegenerateState { r: f64, h: f64 },

    #[error("invalid target: {0}")]
    InvalidTarget(String),

    /// The desired plane normal has no positive component along the current normal.
    #[error("plane singularity: h_dN = {h_dn:e} (beta >= 90 deg)")]
    PlaneSingularity { h_dn: f64 },

    #[error("current and desired orbit normals are anti-parallel")]
    AntiParallel,

    #[error("numerical blowup at t = {t} s")]
    NumericalBlowup { t: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// A model error tagged with the simulation time at which it happened.
    #[error("at t = {t} s: {source}")]
    AtTime {
        t: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("log format: {0}")]
    LogFormat(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn at(self, t: f64) -> Self {
        match self {
            Error::AtTime { .. } => self,
            other => Error::AtTime {
                t,
                source: Box::new(other),
            },
        }
    }

    /// Innermost error with any time stamp stripped.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtTime { source, .. } => source.root(),
            other => other,
        }
    }
}
