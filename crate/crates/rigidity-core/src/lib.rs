//! Numerical core for studying how rigidly a discrete set of points pins down
//! the geometry of a surface.
//!
//! The crate works on complete conformal metrics `g = e^{2φ}(dx² + dy²)` on
//! the plane, given by closed-form conformal factors. On top of that it
//! provides:
//!
//! - geodesic integration and scalar Jacobi fields ([`geodesic`]),
//! - two-point distances by shooting with a path-relaxation fallback
//!   ([`distance`]),
//! - discrete point sets (lattice, Poisson, jittered), quasi-net checks and
//!   narrow-drift sequences ([`nets`]),
//! - truncated Busemann functions, transport lines, asymptotic directions and
//!   area growth ([`asymptotics`]),
//! - the Gram rank test for planar embeddability of four-point metrics and
//!   rigidity witnesses ([`embedtest`]),
//! - Monte-Carlo Crofton and Santaló formulas for the Euclidean line measure
//!   ([`integralgeom`]).
//!
//! Everything is deterministic: random sampling is keyed by explicit 64-bit
//! seeds through counter-based streams, and all evaluations are pure, so
//! results do not depend on evaluation order or worker count.
//!
//! The crate is `no_std` (with `alloc`); IO, file formats and the command
//! line front end live in the companion crate `rigidity-lab`.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod asymptotics;
pub mod distance;
pub mod embedtest;
pub mod geodesic;
pub mod geom;
pub mod integralgeom;
pub mod metric;
pub mod nets;

mod kdtree;
mod math;
mod rng;

pub use geom::{Box2, Point2, Vec2};
pub use metric::{ConformalMetric, MetricSample};
