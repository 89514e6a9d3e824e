//! Domain types shared by every solver: states, parameters, seat shares,
//! rounding rules and finished allocations.

use crate::divisor::DivisorInterval;
use crate::error::ApportionError;
use crate::rational::{half, int, Rational};
use crate::tie::TieReport;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use std::collections::HashSet;
use std::fmt;

/// A named polity with its population.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MemberState {
    pub name: String,
    pub population: u64,
}

impl MemberState {
    pub fn new(name: impl Into<String>, population: u64) -> Result<Self, ApportionError> {
        let name = name.into();
        if name.trim().is_empty() {
            return Err(ApportionError::invalid("state name must not be empty"));
        }
        if population == 0 {
            return Err(ApportionError::invalid(format!(
                "population of {name} must be positive"
            )));
        }
        Ok(MemberState { name, population })
    }
}

/// Checks that the set is non-empty, names are unique and populations positive.
pub fn validate_states(states: &[MemberState]) -> Result<(), ApportionError> {
    if states.is_empty() {
        return Err(ApportionError::invalid("at least one state is required"));
    }
    let mut seen = HashSet::with_capacity(states.len());
    for state in states {
        if state.name.trim().is_empty() {
            return Err(ApportionError::invalid("state name must not be empty"));
        }
        if state.population == 0 {
            return Err(ApportionError::invalid(format!(
                "population of {} must be positive",
                state.name
            )));
        }
        if !seen.insert(state.name.as_str()) {
            return Err(ApportionError::invalid(format!(
                "duplicate state name {}",
                state.name
            )));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RoundingRule {
    Up,
    Standard,
    Down,
}

impl RoundingRule {
    /// Position of the rounding threshold inside each unit interval: a share
    /// `x` earns seat `a + 1` once it passes `a + offset`.
    pub fn offset(self) -> Rational {
        match self {
            RoundingRule::Up => Rational::zero(),
            RoundingRule::Standard => half(),
            RoundingRule::Down => int(1),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            RoundingRule::Up => "up",
            RoundingRule::Standard => "standard",
            RoundingRule::Down => "down",
        }
    }

    /// Letter used in `b+R` notation: `5+U`, `6+S`.
    pub fn letter(self) -> char {
        match self {
            RoundingRule::Up => 'U',
            RoundingRule::Standard => 'S',
            RoundingRule::Down => 'D',
        }
    }

    /// Seat count just below `x` and just above `x`. They differ exactly at a
    /// rounding boundary.
    pub(crate) fn limits(self, x: &Rational) -> (u64, u64) {
        let y = x - self.offset();
        let below = if y.is_positive() { y.ceil() } else { Rational::zero() };
        let above = if y.is_negative() {
            Rational::zero()
        } else {
            y.floor() + int(1)
        };
        (as_count(&below), as_count(&above))
    }
}

impl std::str::FromStr for RoundingRule {
    type Err = ApportionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "up" | "u" | "upwards" => Ok(RoundingRule::Up),
            "standard" | "s" | "nearest" => Ok(RoundingRule::Standard),
            "down" | "d" | "downwards" => Ok(RoundingRule::Down),
            other => Err(ApportionError::invalid(format!("unknown rounding rule {other}"))),
        }
    }
}

impl fmt::Display for RoundingRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

fn as_count(value: &Rational) -> u64 {
    u64::try_from(value.to_integer()).expect("seat count fits in u64")
}

/// Complete configuration of the method. The divisor is not part of it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApportionmentParams {
    pub base: Rational,
    /// `None` means uncapped.
    pub max_cap: Option<u64>,
    pub house_size: u64,
    pub rounding: RoundingRule,
}

impl ApportionmentParams {
    pub fn new(
        base: Rational,
        max_cap: Option<u64>,
        house_size: u64,
        rounding: RoundingRule,
    ) -> Result<Self, ApportionError> {
        let params = ApportionmentParams {
            base,
            max_cap,
            house_size,
            rounding,
        };
        params.validate()?;
        Ok(params)
    }

    /// Base 5, cap 96, house 751, rounding up.
    pub fn lisbon() -> Self {
        ApportionmentParams {
            base: int(5),
            max_cap: Some(96),
            house_size: 751,
            rounding: RoundingRule::Up,
        }
    }

    pub fn validate(&self) -> Result<(), ApportionError> {
        if self.base.is_negative() {
            return Err(ApportionError::invalid("base must be non-negative"));
        }
        if let Some(cap) = self.max_cap {
            if cap == 0 {
                return Err(ApportionError::invalid("maximum must be positive"));
            }
            if self.base >= int(cap) {
                return Err(ApportionError::invalid("base must be below the maximum"));
            }
        }
        if self.house_size == 0 {
            return Err(ApportionError::invalid("house size must be at least 1"));
        }
        Ok(())
    }

    pub fn with_base(&self, base: Rational, rounding: RoundingRule) -> Self {
        ApportionmentParams {
            base,
            rounding,
            ..self.clone()
        }
    }

    pub fn with_house(&self, house_size: u64) -> Self {
        ApportionmentParams {
            house_size,
            ..self.clone()
        }
    }

    /// Seats every state holds whatever its population.
    pub fn floor(&self) -> u64 {
        let f = floor_seats(&self.base, self.rounding);
        self.max_cap.map_or(f, |cap| f.min(cap))
    }
}

/// Pre-rounding seat share, `min(base + population / divisor, max_cap)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct SeatShare(pub Rational);

impl SeatShare {
    pub fn value(&self) -> &Rational {
        &self.0
    }
}

pub fn seat_share(
    population: u64,
    base: &Rational,
    divisor: &Rational,
    max_cap: Option<u64>,
) -> Result<SeatShare, ApportionError> {
    if !divisor.is_positive() {
        return Err(ApportionError::invalid("divisor must be positive"));
    }
    let share = base + int(population) / divisor;
    Ok(SeatShare(match max_cap {
        Some(cap) if share > int(cap) => int(cap),
        _ => share,
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rounded {
    pub seats: u64,
    /// False when `x` lies exactly on the rule's boundary.
    pub well_defined: bool,
}

/// Standard rounding resolves exact halves upwards but still reports them as
/// not well defined.
pub fn round_share(x: &Rational, rule: RoundingRule) -> Rounded {
    let (below, above) = rule.limits(x);
    let seats = match rule {
        RoundingRule::Up => below,
        RoundingRule::Standard | RoundingRule::Down => above,
    };
    Rounded {
        seats,
        well_defined: !(x - rule.offset()).is_integer(),
    }
}

/// Seats an arbitrarily small population receives under `(base, rule)`,
/// before capping.
pub fn floor_seats(base: &Rational, rule: RoundingRule) -> u64 {
    let y = base - rule.offset();
    if y.is_negative() {
        0
    } else {
        as_count(&y.floor()) + 1
    }
}

/// The systems `b+U`, `(b+1/2)+S` and `(b+1)+D` produce the same seats
/// whenever every rounding is well defined.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquivalenceClass {
    /// Ordered up, standard, down.
    pub members: Vec<(Rational, RoundingRule)>,
    /// Members omitted because their base would be negative.
    pub notes: Vec<String>,
}

pub fn equivalent_specs(base: &Rational, rule: RoundingRule) -> EquivalenceClass {
    let up_base = base - rule.offset();
    let mut members = Vec::with_capacity(3);
    let mut notes = Vec::new();
    for member_rule in [RoundingRule::Up, RoundingRule::Standard, RoundingRule::Down] {
        let member_base = &up_base + member_rule.offset();
        if member_base.is_negative() {
            notes.push(format!(
                "{member_base}+{} omitted: negative base",
                member_rule.letter()
            ));
        } else {
            members.push((member_base, member_rule));
        }
    }
    EquivalenceClass { members, notes }
}

/// Achievable house sizes for `n` states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HouseRange {
    pub lo: u64,
    /// `None` when uncapped.
    pub hi: Option<u64>,
}

impl HouseRange {
    pub fn contains(&self, house_size: u64) -> bool {
        house_size >= self.lo && self.hi.is_none_or(|hi| house_size <= hi)
    }
}

impl fmt::Display for HouseRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.hi {
            Some(hi) => write!(f, "[{}, {}]", self.lo, hi),
            None => write!(f, "[{}, unbounded)", self.lo),
        }
    }
}

pub fn feasible_house_range(n: usize, params: &ApportionmentParams) -> HouseRange {
    let n = n as u64;
    HouseRange {
        lo: n * params.floor(),
        hi: params.max_cap.map(|cap| n * cap),
    }
}

/// One state's row of an allocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AllocationEntry {
    pub name: String,
    pub population: u64,
    pub seats: u64,
    pub share: SeatShare,
    /// Population per seat before rounding.
    pub ratio_before: Rational,
    /// Population per seat after rounding; `None` for a state with no seats.
    pub ratio_after: Option<Rational>,
}

impl AllocationEntry {
    pub fn new(state: &MemberState, seats: u64, share: SeatShare) -> Self {
        let population = int(state.population);
        let ratio_before = &population / share.value();
        let ratio_after = (seats > 0).then(|| &population / int(seats));
        AllocationEntry {
            name: state.name.clone(),
            population: state.population,
            seats,
            share,
            ratio_before,
            ratio_after,
        }
    }

    pub fn is_capped(&self, max_cap: Option<u64>) -> bool {
        max_cap == Some(self.seats)
    }
}

/// A finished apportionment, entries in input order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Allocation {
    pub entries: Vec<AllocationEntry>,
    /// Divisor at which the shares were evaluated.
    pub divisor: Rational,
    pub divisor_interval: DivisorInterval,
    pub total_seats: u64,
    /// Set when a tie was broken by an explicit policy.
    pub resolved_tie: Option<TieReport>,
}

impl Allocation {
    pub fn seats(&self) -> Vec<u64> {
        self.entries.iter().map(|e| e.seats).collect()
    }

    pub fn seats_of(&self, name: &str) -> Option<u64> {
        self.entries.iter().find(|e| e.name == name).map(|e| e.seats)
    }

    pub fn entry(&self, name: &str) -> Option<&AllocationEntry> {
        self.entries.iter().find(|e| e.name == name)
    }
}

/// `(ratio_before, ratio_after)` for every entry.
pub fn ratios(allocation: &Allocation) -> Result<Vec<(Rational, Rational)>, ApportionError> {
    allocation
        .entries
        .iter()
        .map(|e| {
            if e.share.value().is_zero() {
                return Err(ApportionError::invalid(format!("{} has a zero share", e.name)));
            }
            let after = e.ratio_after.clone().ok_or_else(|| {
                ApportionError::invalid(format!("{} has no seats", e.name))
            })?;
            Ok((e.ratio_before.clone(), after))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, parse_rational};

    fn r(s: &str) -> Rational {
        parse_rational(s).unwrap()
    }

    #[test]
    fn share_is_capped_at_maximum() {
        let share = seat_share(81_802_257, &int(5), &int(819_000), Some(96)).unwrap();
        assert_eq!(share.0, int(96));
    }

    #[test]
    fn share_without_base_is_pure_quotient() {
        let share = seat_share(1234, &int(0), &int(100), Some(96)).unwrap();
        assert_eq!(share.0, frac(1234, 100));
    }

    #[test]
    fn malta_share_rounds_up_to_six() {
        let share = seat_share(412_970, &int(5), &int(819_000), Some(96)).unwrap();
        assert_eq!(share.0, int(5) + frac(412_970, 819_000));
        assert_eq!(
            round_share(share.value(), RoundingRule::Up),
            Rounded { seats: 6, well_defined: true }
        );
    }

    #[test]
    fn non_positive_divisor_is_rejected() {
        assert!(seat_share(10, &int(5), &int(0), None).is_err());
        assert!(seat_share(10, &int(5), &frac(-1, 2), None).is_err());
    }

    #[test]
    fn rounding_rules_and_boundaries() {
        assert_eq!(
            round_share(&r("5.5042"), RoundingRule::Up),
            Rounded { seats: 6, well_defined: true }
        );
        assert_eq!(
            round_share(&int(7), RoundingRule::Up),
            Rounded { seats: 7, well_defined: false }
        );
        assert_eq!(
            round_share(&r("4.5"), RoundingRule::Standard),
            Rounded { seats: 5, well_defined: false }
        );
        assert_eq!(
            round_share(&r("4.2"), RoundingRule::Standard),
            Rounded { seats: 4, well_defined: true }
        );
        assert_eq!(
            round_share(&r("4.7"), RoundingRule::Standard),
            Rounded { seats: 5, well_defined: true }
        );
        assert_eq!(
            round_share(&r("7.9"), RoundingRule::Down),
            Rounded { seats: 7, well_defined: true }
        );
        assert_eq!(
            round_share(&int(7), RoundingRule::Down),
            Rounded { seats: 7, well_defined: false }
        );
        assert_eq!(round_share(&r("0.3"), RoundingRule::Down).seats, 0);
        assert_eq!(round_share(&r("0.3"), RoundingRule::Up).seats, 1);
        assert_eq!(round_share(&r("0.3"), RoundingRule::Standard).seats, 0);
    }

    #[test]
    fn equivalence_class_from_any_member() {
        let expected = vec![
            (int(5), RoundingRule::Up),
            (r("5.5"), RoundingRule::Standard),
            (int(6), RoundingRule::Down),
        ];
        assert_eq!(equivalent_specs(&int(5), RoundingRule::Up).members, expected);
        assert_eq!(equivalent_specs(&int(6), RoundingRule::Down).members, expected);
        assert_eq!(equivalent_specs(&r("5.5"), RoundingRule::Standard).members, expected);
        let zero = equivalent_specs(&int(0), RoundingRule::Up);
        assert_eq!(
            zero.members,
            vec![
                (int(0), RoundingRule::Up),
                (half(), RoundingRule::Standard),
                (int(1), RoundingRule::Down)
            ]
        );
        assert!(zero.notes.is_empty());
    }

    #[test]
    fn equivalence_class_omits_negative_bases() {
        let class = equivalent_specs(&int(0), RoundingRule::Down);
        assert_eq!(class.members, vec![(int(0), RoundingRule::Down)]);
        assert_eq!(class.notes.len(), 2);
        assert!(class.notes[0].contains("-1+U"));

        let class = equivalent_specs(&half(), RoundingRule::Standard);
        assert_eq!(
            class.members,
            vec![
                (int(0), RoundingRule::Up),
                (half(), RoundingRule::Standard),
                (int(1), RoundingRule::Down)
            ]
        );
    }

    #[test]
    fn floor_seats_per_rule() {
        assert_eq!(floor_seats(&int(5), RoundingRule::Up), 6);
        assert_eq!(floor_seats(&r("5.5"), RoundingRule::Standard), 6);
        assert_eq!(floor_seats(&int(6), RoundingRule::Down), 6);
        assert_eq!(floor_seats(&int(0), RoundingRule::Down), 0);
        assert_eq!(floor_seats(&int(0), RoundingRule::Up), 1);
        assert_eq!(floor_seats(&int(0), RoundingRule::Standard), 0);
        assert_eq!(floor_seats(&r("5.4"), RoundingRule::Standard), 5);
    }

    #[test]
    fn floor_seats_matches_rounding_of_base_plus_epsilon() {
        let eps = frac(1, 1_000_000);
        for base in ["0", "0.5", "1", "2.25", "5", "5.5", "6", "135/29"] {
            let b = r(base);
            for rule in [RoundingRule::Up, RoundingRule::Standard, RoundingRule::Down] {
                assert_eq!(floor_seats(&b, rule), round_share(&(&b + &eps), rule).seats);
            }
        }
    }

    #[test]
    fn house_ranges() {
        let lisbon = ApportionmentParams::lisbon();
        assert_eq!(feasible_house_range(27, &lisbon), HouseRange { lo: 162, hi: Some(2592) });
        assert_eq!(feasible_house_range(28, &lisbon), HouseRange { lo: 168, hi: Some(2688) });
        let down = ApportionmentParams::new(int(0), Some(10), 5, RoundingRule::Down).unwrap();
        assert_eq!(feasible_house_range(1, &down), HouseRange { lo: 0, hi: Some(10) });
        let uncapped = ApportionmentParams::new(int(0), None, 5, RoundingRule::Up).unwrap();
        let range = feasible_house_range(3, &uncapped);
        assert!(range.contains(1_000_000) && !range.contains(2));
    }

    #[test]
    fn params_validation() {
        assert!(ApportionmentParams::new(int(96), Some(96), 751, RoundingRule::Up).is_err());
        assert!(ApportionmentParams::new(frac(-1, 2), Some(96), 751, RoundingRule::Up).is_err());
        assert!(ApportionmentParams::new(int(5), Some(96), 0, RoundingRule::Up).is_err());
        assert!(ApportionmentParams::new(frac(135, 29), Some(96), 751, RoundingRule::Up).is_ok());
    }

    #[test]
    fn state_validation() {
        assert!(MemberState::new("", 5).is_err());
        assert!(MemberState::new("A", 0).is_err());
        let a = MemberState::new("A", 1).unwrap();
        assert!(validate_states(&[a.clone(), a.clone()]).is_err());
        assert!(validate_states(&[]).is_err());
        assert!(validate_states(&[a]).is_ok());
    }

    #[test]
    fn rounding_rule_parses() {
        assert_eq!("UP".parse::<RoundingRule>().unwrap(), RoundingRule::Up);
        assert_eq!("standard".parse::<RoundingRule>().unwrap(), RoundingRule::Standard);
        assert!("sideways".parse::<RoundingRule>().is_err());
    }
}
