//! netgap-core: exact algebra over finite fields, rank-metric and subspace
//! codes, multicast network generators, and the scalar/vector network-coding
//! solvers and verifiers built on top of them.
//!
//! Everything here is exact (no floating point on any algebraic path) and
//! deterministic: constructions fix all tie-breaks, and sampled checks take
//! explicit seeds.

pub mod algebra;
pub mod coding;
pub mod network;
pub mod rankmetric;
pub mod subspace;

pub use algebra::{FieldCtx, FieldElement, Matrix};
pub use coding::{Message, NetworkCode, Scheme, VerificationReport};
pub use network::Network;
pub use subspace::{Subspace, SubspaceCode};
