//! Eavesdropping-rate maximization for a full-duplex monitor that
//! splits its received signal between an information decoder and an
//! amplify-and-forward spoofing relay.
//!
//! The crate solves the joint optimization of per-antenna receive
//! power-splitting ratios and the relay precoding matrix in closed
//! form, verifies every closed form against independent brute-force
//! oracles, and reproduces the reference sweep experiments at desk
//! scale through a small CLI.
//!
//! Module map:
//! - [`numerics`]: complex vectors/matrices, SVD, bisection, quartics.
//! - [`channel`]: scenario synthesis and the zero-forcing reduction.
//! - [`solver`]: the closed-form optimization chain.
//! - [`baselines`]: passive and jamming-only benchmark schemes.
//! - [`oracle`]: grid-search and random-sampling verifiers.
//! - [`harness`]: sweep presets, CSV output, config files, CLI.

pub mod baselines;
pub mod channel;
pub mod harness;
pub mod numerics;
pub mod oracle;
pub mod solver;

pub use channel::{ChannelSet, ProjectedChannels, Scenario};
pub use solver::{solve, SpoofMode, SpoofSolution, SplitVector};
