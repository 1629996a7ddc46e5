//! Geometric tracking of a body-fixed pointing direction together with the
//! spin about it, for a rigid body with friction and an external moment.
//!
//! The crate is organised bottom-up:
//!
//! * [`so3`]: unit vectors, rotation matrices, `hat`/`vee`, exponential map;
//! * [`rigid_body`]: equations of motion and a Lie-group RK4 step;
//! * [`attitude_error`]: error functions on the two-sphere and their rates;
//! * [`trajectory`]: the spin/tilt reference and the stabilization setpoints;
//! * [`control`]: the tracking law, the mismatch term and two stabilizers;
//! * [`harness`]: closed-loop runs, CSV series, run metrics;
//! * [`config`] and [`cli`]: configuration files and the command line;
//! * [`checks`]: randomized property checks run by `pdav check`.

pub mod attitude_error;
pub mod checks;
pub mod cli;
pub mod config;
pub mod control;
pub mod error;
pub mod harness;
pub mod rigid_body;
pub mod so3;
pub mod trajectory;

pub use error::{Error, Result};
pub use so3::{Matrix3, RotationMatrix, UnitVector3, Vector3};
