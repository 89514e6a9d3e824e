//! Exact seat apportionment by the base+prop divisor method.
//!
//! Every state receives a fixed base plus a share proportional to its
//! population, `min(base + population / divisor, max_cap)`, rounded up, down
//! or to the nearest integer. The divisor is adjusted until the rounded
//! shares add up to the house size. All arithmetic is exact.
//!
//! The crate is organised by concern:
//!
//! - [`model`]: states, parameters, seat shares, rounding and allocations.
//! - [`divisor`]: the divisor solver and exact divisor intervals.
//! - [`oracle`]: brute-force verification by scanning every critical divisor.
//! - [`sequential`]: the highest-quotient formulation with base and cap.
//! - [`degressive`]: degressive-proportionality validators.
//! - [`schemes`]: rules for evolving base and minimum as the union grows.
//! - [`presets`]: bundled population snapshots (EU-27, EU-28, EU-29).

#![forbid(unsafe_code)]

pub mod degressive;
pub mod divisor;
mod error;
pub mod model;
pub mod oracle;
pub mod presets;
pub mod rational;
pub mod schemes;
pub mod sequential;
mod tie;

pub use degressive::{dp_report, DpReport, Inversion};
pub use divisor::{
    allocate, divisor_interval, evaluate_at_divisor, solve, solve_with, total_at_divisor,
    DivisorInterval, StepTotal, Target,
};
pub use error::{ApportionError, ErrorCode};
pub use model::{
    equivalent_specs, feasible_house_range, floor_seats, ratios, round_share, seat_share,
    validate_states, Allocation, AllocationEntry, ApportionmentParams, EquivalenceClass,
    HouseRange, MemberState, Rounded, RoundingRule, SeatShare,
};
pub use rational::Rational;
pub use sequential::{detect_tie, sequential_allocate, sequential_allocate_with, signpost, QuotientTrace};
pub use tie::{TiePolicy, TieReport};
