//! # paircache
//!
//! Exact analysis and bit-level simulation of two-user coded caching with
//! heterogeneous cache sizes and link qualities.
//!
//! A server holds `n` unit-size files. Two users carry caches of `m1` and
//! `m2` file units, filled before demands are known. Delivery then uses an
//! error-free shared link plus one private link per user. The crate
//! answers, with exact rational arithmetic:
//!
//! - what the optimal shared-link rate and worst-case delivery latency are
//!   ([`rates`]),
//! - which concrete placement/delivery/decoding strategy attains them
//!   ([`schemes`] for the corner strategies, [`compose`] for
//!   memory-sharing between them, [`plan`] for picking the operating
//!   point), and
//! - whether the composed code really delivers every demand bit-exactly at
//!   the predicted rates ([`sim`]).
//!
//! Corner strategies live behind the [`schemes::Scheme`] trait and are
//! looked up by name in a registry, so composed codes serialize to plain
//! JSON and replay anywhere.

#![forbid(unsafe_code)]

pub mod compose;
pub mod instance;
pub mod plan;
pub mod rates;
pub mod rational;
pub mod schemes;
pub mod sim;

pub use compose::{compose, min_file_size, nine_points, region_of, share_plan, ComposedCode, DerivedId, DerivedPoint, Region, SharePlan};
pub use instance::{Instance, Latency, RateTriple};
pub use plan::{plan, Plan, PlanCase};
pub use rates::{
    coded_placement_bound_holds, distortion_levels, distortion_rate, lhc_rate, min_shared_rate,
    optimal_latency, optimal_shared_rate, prior_bound, private_link_bound_holds, quantize,
    single_user_cut_holds, LogBase,
};
pub use rational::Rat;
pub use schemes::{Demand, Library, Placement, Scheme, SchemeId, Signature, Transcript};
pub use sim::{make_library, run_all, run_demand, verify_against_formula, DemandRow, SimulationReport};

use thiserror::Error as ThisError;

/// Errors produced by construction, composition and decoding.
#[derive(Debug, ThisError)]
pub enum Error {
    /// An argument lies outside the documented domain.
    #[error("domain error: {0}")]
    Domain(String),
    /// The instance or target cannot be served at all.
    #[error("infeasible: {0}")]
    Infeasible(String),
    /// A file size violates a divisibility requirement.
    #[error("file sizing error: {0}")]
    Sizing(String),
    /// Decoder inputs are structurally inconsistent.
    #[error("decode failure: {0}")]
    Decode(String),
    /// An internal invariant failed; always a bug.
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
