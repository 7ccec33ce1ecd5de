//! Numerical toolkit for the information-gain versus disturbance tradeoff
//! when an eavesdropper probes one of two quantum states.
//!
//! * [`linalg`]: small dense complex linear algebra (Kronecker products,
//!   partial traces, Hermitian eigenproblems, Schmidt decomposition).
//! * [`states`]: the two-state source and validated density operators.
//! * [`eavesdrop`]: interactions with an ancilla, as isometries.
//! * [`metrics`]: disturbance, Helstrom error, the closed-form family surface
//!   and the optimal frontier.
//! * [`tradeoff`]: multi-start searches that reproduce and probe the frontier.
//! * [`broadcast`]: broadcasting, common invariant blocks, and nondisturbing
//!   measurements for mixed states.
//!
//! Numerical code is generic over [`Real`] (`f32`, `f64`); the aliases below
//! fix the scalar to `f64`, which is what the search routines and the CLI use.

pub mod broadcast;
pub mod eavesdrop;
pub mod error;
pub mod linalg;
pub mod metrics;
pub mod optimize;
pub mod random;
pub mod scalar;
pub mod states;
pub mod tradeoff;

pub use error::{Error, Result};
pub use scalar::Real;

pub type ComplexMatrix = linalg::ComplexMatrix<f64>;
pub type DensityOperator = states::DensityOperator<f64>;
pub type StatePair = states::StatePair<f64>;
pub type Isometry = eavesdrop::Isometry<f64>;
pub type PostInteraction = eavesdrop::PostInteraction<f64>;
pub type TradeoffPoint = metrics::TradeoffPoint<f64>;
pub type FamilyParams = metrics::FamilyParams<f64>;
pub type FrontierCurve = tradeoff::FrontierCurve<f64>;
pub type FrontierPoint = tradeoff::FrontierPoint<f64>;
pub type BlockStructure = broadcast::BlockStructure<f64>;
pub type BroadcastReport = broadcast::BroadcastReport<f64>;
