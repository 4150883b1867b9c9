//! Numerical laboratory for the growth of iterated entire functions.
//!
//! The crate is organised bottom-up: [`tower`] holds magnitudes far beyond
//! f64 range, [`function`] evaluates closed-form entire functions,
//! [`dynamics`] follows orbits, [`measures`] integrates spherical
//! derivatives, [`logplane`] builds slowly escaping orbits of `λe^z`, and
//! [`harness`] runs the experiments behind the `entire-dyn` binary.

pub mod bigfix;
pub mod dynamics;
pub mod error;
pub mod function;
pub mod harness;
pub mod logplane;
pub mod measures;
pub mod special;
pub mod tower;

pub use error::{Error, LogPolar, Result};
pub use function::{FunctionDescriptor, MaxModulusTable};
pub use tower::{tower_compare, tower_from_log, tower_log, TowerReal};
