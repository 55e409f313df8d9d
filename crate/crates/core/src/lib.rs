//! Robust path following onto arbitrary conic sections.
//!
//! A particle under arbitrary forces is steered onto a conic by regulating
//! its specific angular momentum and eccentricity vector with a sliding-mode
//! law written in the radial-transverse-normal frame. Nothing requires the
//! natural dynamics to be Keplerian: the gravitational parameter of the
//! target is a design choice.
//!
//! | Module | Contents |
//! |--------|----------|
//! | [`frame`] | RTN frame, projections, versor rates |
//! | [`orbit`] | angular momentum, eccentricity vector, energy, conic targets |
//! | [`control`] | sliding surfaces, gains, equivalent control, control laws |
//! | [`sim`] | RK4 plant, force models, moving point, closed-loop runs |
//! | [`scenario`] | built-in experiments and run metrics |
//! | [`validate`] | invariant suites used as a release gate |

pub mod control;
pub mod error;
pub mod frame;
pub mod orbit;
pub mod scenario;
pub mod sim;
pub mod validate;

/// Inertial Cartesian vector.
pub type Vector3 = nalgebra::Vector3<f64>;

pub use control::{ControlCommand, ControllerConfig, SlidingState};
pub use error::{Error, Result};
pub use frame::{build_frame, RtnFrame, StateVector, Vector3Rtn};
pub use orbit::{ConicElements, OrbitTarget};
pub use scenario::{compute_metrics, MetricsReport, Scenario};
pub use sim::{SimConfig, TrajectoryLog};
