//! Orbits, Lyapunov exponents, periodic points and fast escape.

pub mod batch;
pub mod fast_escape;
pub mod lyapunov;
pub mod orbit;
pub mod periodic;

pub use fast_escape::{fast_escaping_test, fast_escaping_with_table, FastEscapeResult};
pub use lyapunov::{lyapunov_estimate, LyapunovEstimate};
pub use orbit::{iterate_orbit, OrbitRecord, OrbitStatus, Point};
pub use periodic::{find_periodic_point, PeriodicPoint};
