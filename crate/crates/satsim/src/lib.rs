//! satsim — attention-market saturation simulator.
//!
//! A fixed pool of consumer attention `A = M * a` is contested by `B`
//! builders and an outside option. The crate covers the full pipeline:
//!
//! - [`model`]: static logit allocation, symmetric averages, profits,
//!   attention ratios, entry elasticity;
//! - [`equilibrium`]: free-entry entry counts, comparative statics,
//!   welfare and excess entry, growth trajectories;
//! - [`dynamics`]: reinforcement reallocation (deterministic mean-field
//!   and seeded stochastic), interior fixed points;
//! - [`metrics`]: Gini, top shares, median/mean, Lorenz and rank curves,
//!   tail-exponent fits, closed-form log-normal comparators;
//! - [`harness`]: TOML scenario configs, built-in scenarios, sweeps, and
//!   CSV/JSON export.
//!
//! The `examples/` directory holds one runnable program per capability;
//! the `satsim` binary exposes the same functionality as subcommands
//! (`run`, `sweep`, `equilibrium`, `dilution`, `fixed-point`).

pub mod cli;
pub mod dynamics;
pub mod equilibrium;
pub mod error;
pub mod harness;
pub mod metrics;
pub mod model;
mod numeric;

pub use error::{Error, Result};
