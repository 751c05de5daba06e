//! Block-sparse compressed sensing with prior support information.
//!
//! * [`block`]: block structures, block signals, mixed ℓ2/ℓp norms.
//! * [`ensembles`]: random measurement matrices and an exact block-RIP oracle.
//! * [`theory`]: recovery constants and sufficient conditions for weighted ℓ2/ℓ1.
//! * [`solver`]: IRLS for smoothed, regularized weighted ℓ2/ℓ1 and its dense kernels.
//! * [`harness`]: seeded Monte-Carlo trials, parameter sweeps and CSV output.

// `!(x > 0.0)` is used on purpose so NaN inputs are rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod block;
pub mod ensembles;
pub mod error;
pub mod exec;
pub mod harness;
pub mod solver;
pub mod support;
pub mod theory;

pub use block::{BlockIndexSet, BlockSignal, BlockStructure, MixedNorm};
pub use ensembles::{Ensemble, MeasurementMatrix};
pub use error::{Error, Result};
pub use exec::Execution;
pub use support::SupportEstimate;
pub use theory::PriorProfile;
