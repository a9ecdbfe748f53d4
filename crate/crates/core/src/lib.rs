//! Coherent-state benchmarks for microwave quantum illumination.
//!
//! The crate is layered bottom-up:
//!
//! * [`gaussian`]: Gaussian states, channels and the Williamson decomposition.
//! * [`qht_symmetric`]: the s-overlap, quantum Chernoff and Bhattacharyya bounds.
//! * [`qht_asymmetric`]: relative entropy, its variance and second-order ROCs.
//! * [`closed_forms`]: closed-form bounds for the three source protocols.
//! * [`protocols`]: scenarios, Planck occupations and hypothesis pairs.
//! * [`homodyne`]: homodyne ROCs, special functions and a Monte-Carlo oracle.
//! * [`validate`]: oracle-equivalence and limit-recovery suites.
//!
//! Numerically delicate paths are generic over [`Real`] and run in
//! double-double ([`Dd`]) where the quantities of interest are tiny
//! differences of O(1) terms.

// `!(x >= 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod closed_forms;
pub mod dd;
pub mod error;
pub mod gaussian;
pub mod homodyne;
pub mod linalg;
pub mod minimize;
pub mod protocols;
pub mod qht_asymmetric;
pub mod qht_symmetric;
pub mod scalar;
pub mod special;
pub mod validate;

pub use dd::Dd;
pub use error::{Error, Result};
pub use gaussian::{GaussianState, Tolerances, Williamson};
pub use linalg::Mat;
pub use scalar::Real;
