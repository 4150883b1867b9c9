//! The exponential family `λe^z` in logarithmic coordinates.

pub mod schedule;
pub mod slow_orbit;
pub mod tract;

pub use schedule::{schedule_build, SlowEscapeSchedule};
pub use slow_orbit::{log_sph_deriv_from_logplane, schedule_sph_bound, slow_orbit_construct, SlowOrbitStep, SlowOrbitTrace};
pub use tract::{el_inequality_check, ElReport, LogTract};
