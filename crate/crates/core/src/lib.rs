//! Joint source-channel coding toolkit for discrete memoryless
//! multiple-access relay channels.
//!
//! - [`infotheory`]: dense joint pmfs, kernels and exact information measures.
//! - [`network`]: sources, channels, input-distribution chains and joint assembly.
//! - [`feasibility`]: sufficient-condition and outer-bound evaluation.
//! - [`distopt`]: search over input chains (multi-start projected ascent, grid oracle).
//! - [`sim`]: Monte Carlo simulation of the block-Markov decode-and-forward
//!   scheme and of uncoded transmission.
//!
//! The probability algebra, models and feasibility checks are generic over
//! the scalar type ([`Real`], implemented for `f32` and `f64`). The aliases
//! below fix the scalar to `f64`, which is what the optimizer and simulator use.

pub mod distopt;
mod error;
pub mod feasibility;
pub mod infotheory;
pub mod network;
mod scalar;
pub mod sim;
pub mod simplex;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Pmf = infotheory::JointPmf<f64>;
pub type CondPmf = infotheory::Kernel<f64>;
pub type Source = network::SourceModel<f64>;
pub type Channel = network::ChannelModel<f64>;
pub type Chain = network::InputChain<f64>;
pub type Conditions = feasibility::ConditionReport<f64>;

pub use infotheory::Variable;
