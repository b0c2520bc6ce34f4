//! Step graphons on σ-finite spaces: cut norm, cut distances, operations,
//! sampling of graph processes and a gallery of worked examples.
#![cfg_attr(not(feature = "std"), no_std)]
extern crate alloc;

pub mod coupling;
pub mod cutnorm;
pub mod error;
pub mod exact;
pub mod gallery;
pub mod graphon;
pub mod math;
pub mod metrics;
pub mod ops;
mod par;
pub mod sampler;
pub mod spectral;
pub mod stats;
pub mod transport;

pub use coupling::Coupling;
pub use cutnorm::{BoundKind, CutNormResult};
pub use error::{Error, Result};
pub use graphon::{Mass, StepGraphon};
