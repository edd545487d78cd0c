//! Roommate-and-room assignment with additive utilities.
//!
//! `2n` agents share `n` double rooms. Each agent values its roommate and its
//! room, and its utility is the sum of the two. The crate provides:
//!
//! * the data model and JSON formats ([`model`], [`io`]),
//! * stability and dominance checks ([`checks`]),
//! * an exhaustive oracle for small instances ([`oracle`]),
//! * mechanisms: serial dictatorship ([`sd`]), the trading-cycle family
//!   ([`ttc`]), pairwise swapping ([`swapping`]) and double matching with
//!   local search ([`dmls`]), all reachable through [`Mechanism`],
//! * misreport search ([`probe`]), generators ([`gen`]), embedded example
//!   instances ([`fixtures`]) and batch reporting ([`report`]).

pub mod checks;
pub mod dmls;
pub mod error;
pub mod fixtures;
pub mod gen;
pub mod io;
pub mod mechanism;
pub mod model;
pub mod oracle;
pub mod probe;
pub mod report;
pub mod sd;
pub mod swapping;
pub mod ttc;

pub use checks::{blocking_pairs, is_2ps_blocking, is_4ps_blocking, pareto_dominates, BlockingReport, StabilityKind};
pub use error::{AssignmentError, Error, InstanceError, Result};
pub use mechanism::{Mechanism, Outcome};
pub use model::{Assignment, Instance, MechanismTrace, StepKind, TraceStep, Triple, Value, BIG};
