//! Agency quantities on finite tabular MDPs.
//!
//! The crate computes, exactly and at desk scale, the building blocks of an
//! information-theoretic account of agency:
//!
//! - [`mdp`]: tabular MDPs, exact policy evaluation, value iteration,
//!   return ranges, and seeded environment generators.
//! - [`losses`]: curiosity as smoothed KL divergence, empowerment as
//!   discrete channel capacity (Blahut–Arimoto), and the composite agency
//!   objective together with its induced reward table.
//! - [`starc`]: canonicalize / normalize / distance machinery for comparing
//!   reward functions up to potential shaping and positive rescaling.
//! - [`measure`]: log-space measure of epsilon-tubes in bounded function
//!   cubes, a Monte Carlo cross-check, and least-squares projection onto a
//!   three-vector subspace.
//! - [`convergence`]: closed-form approximation-rate calculators carried in
//!   log10 space.
//!
//! Every type is immutable after construction and every operation is a pure
//! function of its inputs, so values can be shared freely across threads.

pub mod convergence;
pub mod error;
pub mod losses;
pub mod mdp;
pub mod measure;
pub mod starc;

pub use error::{Error, Result};
