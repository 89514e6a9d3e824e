//! How the minimum and the base evolve as the union grows, and accession
//! what-if scenarios.
//!
//! Scheme A caps the fraction of the house handed out through the minimum and
//! takes the largest minimum under that cap. The base is then either one less
//! than the minimum, or the smallest base (on a fixed grid) for which the least
//! populous state receives exactly the minimum. Scheme B sets `base = 135 / n`.

use crate::divisor::{allocate, solve, Target};
use crate::error::ApportionError;
use crate::model::{validate_states, Allocation, ApportionmentParams, MemberState, RoundingRule};
use crate::rational::{frac, int, Rational};
use crate::tie::TiePolicy;
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchemeAConfig {
    /// Fraction of the house allocated through the minimum, in `(0, 1]`.
    pub cap_fraction: Rational,
    pub house_size: u64,
}

impl SchemeAConfig {
    pub fn new(cap_fraction: Rational, house_size: u64) -> Result<Self, ApportionError> {
        if !cap_fraction.is_positive() || cap_fraction > Rational::one() {
            return Err(ApportionError::invalid("cap fraction must lie in (0, 1]"));
        }
        if &cap_fraction * int(house_size) < Rational::one() {
            return Err(ApportionError::invalid("cap must cover at least one seat"));
        }
        Ok(SchemeAConfig {
            cap_fraction,
            house_size,
        })
    }
}

/// Largest `m` with `n * m <= cap_fraction * house_size`.
pub fn scheme_a_minimum(n: u64, config: &SchemeAConfig) -> Result<u64, ApportionError> {
    if n == 0 {
        return Err(ApportionError::invalid("at least one state is required"));
    }
    let budget = &config.cap_fraction * int(config.house_size) / int(n);
    let m = u64::try_from(budget.floor().to_integer())
        .map_err(|_| ApportionError::invalid("minimum out of range"))?;
    if m < 1 {
        return Err(ApportionError::invalid(format!(
            "{n} states leave no room for a minimum of one seat"
        )));
    }
    Ok(m)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SchemeABase {
    /// `base = minimum - 1`, rounding up.
    MinimumMinusOne,
    /// Smallest multiple of `granularity` such that a full solve with rounding
    /// up gives the least populous state exactly the minimum.
    SmallestFraction { granularity: Rational },
}

impl SchemeABase {
    pub fn smallest_fraction() -> Self {
        SchemeABase::SmallestFraction {
            granularity: frac(1, 1000),
        }
    }
}

pub fn scheme_a_base(
    states: &[MemberState],
    minimum: u64,
    variant: &SchemeABase,
    params: &ApportionmentParams,
) -> Result<Rational, ApportionError> {
    if minimum < 1 {
        return Err(ApportionError::invalid("minimum must be at least one seat"));
    }
    match variant {
        SchemeABase::MinimumMinusOne => Ok(int(minimum - 1)),
        SchemeABase::SmallestFraction { granularity } => {
            smallest_fraction_base(states, minimum, granularity, params)
        }
    }
}

fn smallest_fraction_base(
    states: &[MemberState],
    minimum: u64,
    granularity: &Rational,
    params: &ApportionmentParams,
) -> Result<Rational, ApportionError> {
    validate_states(states)?;
    if !granularity.is_positive() {
        return Err(ApportionError::invalid("granularity must be positive"));
    }
    let smallest = states
        .iter()
        .min_by_key(|s| s.population)
        .expect("validated non-empty");
    let seats_of_smallest = |step: &BigInt| -> Result<u64, ApportionError> {
        let base = granularity * Rational::from_integer(step.clone());
        let p = params.with_base(base, RoundingRule::Up);
        Ok(solve(states, &p)?
            .seats_of(&smallest.name)
            .expect("smallest state is allocated"))
    };

    // Under rounding up the smallest state holds at least floor(base) + 1
    // seats, so only bases below the minimum can give it exactly the minimum.
    let limit = int(minimum) / granularity;
    let mut hi = limit.ceil().to_integer() - BigInt::one();
    if hi.is_negative() || seats_of_smallest(&hi)? < minimum {
        return Err(ApportionError::invalid(format!(
            "no base on the grid gives {} exactly {minimum} seats",
            smallest.name
        )));
    }
    let mut lo = BigInt::zero();
    if seats_of_smallest(&lo)? < minimum {
        // invariant: seats(lo) < minimum <= seats(hi)
        while &hi - &lo > BigInt::one() {
            let mid: BigInt = (&lo + &hi) / 2;
            if seats_of_smallest(&mid)? >= minimum {
                hi = mid;
            } else {
                lo = mid;
            }
        }
    } else {
        hi = lo;
    }
    if seats_of_smallest(&hi)? != minimum {
        return Err(ApportionError::invalid(format!(
            "{} jumps past {minimum} seats between grid points",
            smallest.name
        )));
    }
    Ok(granularity * Rational::from_integer(hi))
}

/// `135 / n`.
pub fn scheme_b_base(n: u64) -> Result<Rational, ApportionError> {
    if n == 0 {
        return Err(ApportionError::invalid("at least one state is required"));
    }
    Ok(frac(135, n as i64))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeatChange {
    pub name: String,
    pub before: u64,
    pub after: u64,
}

impl SeatChange {
    pub fn delta(&self) -> i64 {
        self.after as i64 - self.before as i64
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScenarioDelta {
    pub baseline: Allocation,
    pub variant: Allocation,
    /// Common states whose seats changed, in variant order.
    pub changes: Vec<SeatChange>,
    /// Common states with unchanged seats.
    pub unchanged: Vec<String>,
    pub joined: Vec<String>,
    pub removed: Vec<String>,
}

pub fn scenario_delta(baseline: Allocation, variant: Allocation) -> ScenarioDelta {
    let mut changes = Vec::new();
    let mut unchanged = Vec::new();
    let mut joined = Vec::new();
    for entry in &variant.entries {
        match baseline.seats_of(&entry.name) {
            Some(before) if before == entry.seats => unchanged.push(entry.name.clone()),
            Some(before) => changes.push(SeatChange {
                name: entry.name.clone(),
                before,
                after: entry.seats,
            }),
            None => joined.push(entry.name.clone()),
        }
    }
    let removed = baseline
        .entries
        .iter()
        .filter(|e| variant.entry(&e.name).is_none())
        .map(|e| e.name.clone())
        .collect();
    ScenarioDelta {
        baseline,
        variant,
        changes,
        unchanged,
        joined,
        removed,
    }
}

/// Baseline and variant targets; the default solves both at the parameters'
/// house size.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScenarioTargets {
    pub baseline: Target,
    pub variant: Target,
}

impl ScenarioTargets {
    pub fn fixed_house(params: &ApportionmentParams) -> Self {
        ScenarioTargets {
            baseline: Target::House(params.house_size),
            variant: Target::House(params.house_size),
        }
    }
}

/// Acceding states are inserted in population order.
pub fn accession_scenario(
    baseline_states: &[MemberState],
    acceding_states: &[MemberState],
    params: &ApportionmentParams,
    targets: &ScenarioTargets,
    policy: TiePolicy,
) -> Result<ScenarioDelta, ApportionError> {
    let mut combined = baseline_states.to_vec();
    for state in acceding_states {
        let at = combined
            .iter()
            .position(|s| s.population < state.population)
            .unwrap_or(combined.len());
        combined.insert(at, state.clone());
    }
    validate_states(&combined)?;
    let baseline = allocate(baseline_states, params, &targets.baseline, policy)?;
    let variant = allocate(&combined, params, &targets.variant, policy)?;
    Ok(scenario_delta(baseline, variant))
}
