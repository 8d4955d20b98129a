//! Behavior-based turn-ordering auctions for unsignaled intersections,
//! roundabouts, and merges.
//!
//! The library is organized in four layers:
//!
//! - [`behavior`]: converts observed trajectories into scalar aggressiveness
//!   scores (behavior profiles) via proximity traffic graphs and degree
//!   centrality with temporal memory.
//! - [`auction`]: a sponsored-search-auction mechanism over those profiles.
//!   The highest bidder moves first; utilities carry a second-price-style
//!   payment term. Includes executable verifiers for incentive compatibility,
//!   welfare maximization, and sorting-bounded runtime, plus the baseline
//!   bidding strategies (economic, FIFO, random) used for comparison.
//! - [`sim`]: a deterministic seeded discrete-time traffic simulator that
//!   runs the two-phase pipeline (observe behavior, then enforce a turn
//!   ordering) and detects collisions and deadlocks.
//! - [`harness`]: experiment sweeps over the scenario grid, aggregation of
//!   collision/deadlock/success rates, and machine-readable reports.

pub mod auction;
pub mod behavior;
pub mod error;
pub mod geom;
pub mod harness;
pub mod io;
pub mod sim;

pub use error::{Error, Result};

/// Integer identity of a traffic agent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
pub struct AgentId(pub u32);

impl std::fmt::Display for AgentId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}
