//! Tie reports and explicit tie-resolution policies.

use crate::error::ApportionError;
use crate::rational::Rational;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::fmt;

/// States competing for fewer seats than there are contenders, at the divisor
/// where the total jumps past the house size.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TieReport {
    /// Sorted by name.
    pub tied_states: Vec<String>,
    pub boundary_divisor: Rational,
    pub seats_contested: u64,
}

impl fmt::Display for TieReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} seat(s) contested by {} at divisor {}",
            self.seats_contested,
            self.tied_states.join(", "),
            self.boundary_divisor
        )
    }
}

/// What to do when no divisor realizes the house size.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TiePolicy {
    /// Report the tie as an error.
    #[default]
    Fail,
    /// Contested seats go to the tied states in ascending name order.
    Lexicographic,
    /// Casting lots with a caller-supplied seed.
    Seeded(u64),
}

/// Picks which tied states receive the contested seats, or fails under
/// [`TiePolicy::Fail`].
pub(crate) fn choose_winners(
    report: &TieReport,
    policy: TiePolicy,
) -> Result<Vec<String>, ApportionError> {
    let mut names = report.tied_states.clone();
    names.sort();
    let take = report.seats_contested as usize;
    match policy {
        TiePolicy::Fail => Err(ApportionError::Tie(report.clone())),
        TiePolicy::Lexicographic => Ok(names.into_iter().take(take).collect()),
        TiePolicy::Seeded(seed) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            names.shuffle(&mut rng);
            names.truncate(take);
            Ok(names)
        }
    }
}
