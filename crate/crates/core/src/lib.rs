//! Mobile-cell resource sharing in two-tier cellular networks: a Monte
//! Carlo link-level simulator over Poisson base-station fields, the
//! matching closed-form/integral evaluators for success probabilities and
//! ergodic rates, the dynamic sub-channel sharing algorithm, and the
//! access-link power-control law.
//!
//! All numerics are generic over the scalar type through [`Real`]
//! (`f32`/`f64`); the `*64` aliases below are the instantiation the CLI
//! and the test suites use.

pub mod analytic;
pub mod channel;
pub mod drsa;
pub mod error;
pub mod geometry;
pub mod links;
pub mod montecarlo;
pub mod params;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::{real, Real};

// Concrete double-precision aliases.
pub type Point64 = geometry::Point2D<f64>;
pub type Window64 = geometry::Window<f64>;
pub type Snapshot64 = geometry::NetworkSnapshot<f64>;
pub type SystemParams64 = params::SystemParams<f64>;
pub type PowerLevel64 = channel::PowerLevel<f64>;
pub type LinkSample64 = links::LinkSample<f64>;
pub type AnalyticResult64 = analytic::AnalyticResult<f64>;
pub type QuadratureSpec64 = analytic::QuadratureSpec<f64>;
pub type ExperimentConfig64 = montecarlo::ExperimentConfig<f64>;
pub type Estimate64 = montecarlo::Estimate<f64>;
pub type SweepTable64 = montecarlo::SweepTable<f64>;
