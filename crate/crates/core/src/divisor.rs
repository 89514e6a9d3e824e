//! Divisor solver.
//!
//! A state with population `p` wins seat `a + 1` (beyond its unconditional
//! floor) while the divisor is below the critical value `p / signpost(a)`,
//! where `signpost(a) = a + offset - base`. The total `T(d)` is therefore a
//! non-increasing step function that only moves at critical values, and the
//! divisors realizing a house size `H` form the gap between the `R`-th and
//! `(R+1)`-th largest critical values, `R = H - n * floor`. An empty gap is a
//! tie.

use crate::error::ApportionError;
use crate::model::{
    feasible_house_range, seat_share, validate_states, Allocation, AllocationEntry,
    ApportionmentParams, MemberState, RoundingRule,
};
use crate::rational::{half, int, Rational};
use crate::sequential::signpost;
use crate::tie::{choose_winners, TiePolicy, TieReport};
use num_traits::{Signed, Zero};
use std::fmt;

/// Set of divisors realizing a house size, or `Tie` when there is none.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DivisorInterval {
    Range {
        lo: Rational,
        lo_open: bool,
        /// `None` is `+inf`.
        hi: Option<Rational>,
        hi_open: bool,
    },
    Tie,
}

impl DivisorInterval {
    pub fn point(d: Rational) -> Self {
        DivisorInterval::Range {
            lo: d.clone(),
            lo_open: false,
            hi: Some(d),
            hi_open: false,
        }
    }

    /// Builds the interval from the smallest accepted critical value (upper
    /// end) and the largest rejected one (lower end).
    pub(crate) fn from_boundaries(
        smallest_accepted: Option<Rational>,
        largest_rejected: Option<Rational>,
        rule: RoundingRule,
    ) -> Self {
        if let (Some(hi), Some(lo)) = (&smallest_accepted, &largest_rejected) {
            if hi <= lo {
                return DivisorInterval::Tie;
            }
        }
        // Rounding up takes the value from larger divisors at a boundary; the
        // other two rules take it from smaller divisors.
        let (lo_closed, hi_closed) = match rule {
            RoundingRule::Up => (true, false),
            RoundingRule::Standard | RoundingRule::Down => (false, true),
        };
        let lo_open = !(lo_closed && largest_rejected.is_some());
        let hi_open = !(hi_closed && smallest_accepted.is_some());
        DivisorInterval::Range {
            lo: largest_rejected.unwrap_or_else(Rational::zero),
            lo_open,
            hi: smallest_accepted,
            hi_open,
        }
    }

    pub fn is_tie(&self) -> bool {
        matches!(self, DivisorInterval::Tie)
    }

    pub fn contains(&self, d: &Rational) -> bool {
        match self {
            DivisorInterval::Tie => false,
            DivisorInterval::Range {
                lo,
                lo_open,
                hi,
                hi_open,
            } => {
                let above_lo = if *lo_open { d > lo } else { d >= lo };
                let below_hi = match hi {
                    None => true,
                    Some(hi) if *hi_open => d < hi,
                    Some(hi) => d <= hi,
                };
                above_lo && below_hi
            }
        }
    }

    /// Display divisor: the midpoint when bounded, else twice the lower end.
    pub fn reference(&self) -> Option<Rational> {
        match self {
            DivisorInterval::Tie => None,
            DivisorInterval::Range { lo, hi: Some(hi), .. } => Some((lo + hi) * half()),
            DivisorInterval::Range { lo, hi: None, .. } if lo.is_positive() => Some(lo * int(2)),
            DivisorInterval::Range { hi: None, .. } => Some(int(1)),
        }
    }
}

impl fmt::Display for DivisorInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DivisorInterval::Tie => f.write_str("tie"),
            DivisorInterval::Range {
                lo,
                lo_open,
                hi,
                hi_open,
            } => {
                let open = if *lo_open { '(' } else { '[' };
                let close = if *hi_open { ')' } else { ']' };
                match hi {
                    Some(hi) => write!(f, "{open}{lo}, {hi}{close}"),
                    None => write!(f, "{open}{lo}, inf)"),
                }
            }
        }
    }
}

/// `T(d)` together with the states whose rounding is on a boundary at `d`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepTotal {
    pub total: u64,
    pub boundary_states: Vec<String>,
}

impl StepTotal {
    pub fn is_boundary(&self) -> bool {
        !self.boundary_states.is_empty()
    }
}

/// Either a target house size or a fixed divisor with the house size emergent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Target {
    House(u64),
    Divisor(Rational),
}

/// Seats at divisor `d` and whether `d` sits on that state's rounding boundary.
fn seats_at(
    state: &MemberState,
    params: &ApportionmentParams,
    d: &Rational,
) -> Result<(u64, bool), ApportionError> {
    let raw = seat_share(state.population, &params.base, d, None)?;
    let (below, above) = params.rounding.limits(raw.value());
    let cap = |s: u64| params.max_cap.map_or(s, |m| s.min(m));
    let (below, above) = (cap(below), cap(above));
    let seats = match params.rounding {
        RoundingRule::Up => below,
        RoundingRule::Standard | RoundingRule::Down => above,
    };
    Ok((seats, below != above))
}

pub fn total_at_divisor(
    states: &[MemberState],
    params: &ApportionmentParams,
    d: &Rational,
) -> Result<StepTotal, ApportionError> {
    if !d.is_positive() {
        return Err(ApportionError::invalid("divisor must be positive"));
    }
    let mut total = 0;
    let mut boundary_states = Vec::new();
    for state in states {
        let (seats, boundary) = seats_at(state, params, d)?;
        total += seats;
        if boundary {
            boundary_states.push(state.name.clone());
        }
    }
    Ok(StepTotal {
        total,
        boundary_states,
    })
}

pub fn evaluate_at_divisor(
    states: &[MemberState],
    params: &ApportionmentParams,
    d: &Rational,
) -> Result<Allocation, ApportionError> {
    validate_states(states)?;
    params.validate()?;
    if !d.is_positive() {
        return Err(ApportionError::invalid("divisor must be positive"));
    }
    let mut seats = Vec::with_capacity(states.len());
    let mut boundary = Vec::new();
    for state in states {
        let (s, on_boundary) = seats_at(state, params, d)?;
        if on_boundary {
            boundary.push(state.name.clone());
        }
        seats.push(s);
    }
    if !boundary.is_empty() {
        return Err(ApportionError::BoundaryDivisor {
            divisor: d.clone(),
            states: boundary,
        });
    }
    build_allocation(states, params, &seats, d.clone(), DivisorInterval::point(d.clone()), None)
}

pub fn solve(
    states: &[MemberState],
    params: &ApportionmentParams,
) -> Result<Allocation, ApportionError> {
    solve_with(states, params, TiePolicy::Fail)
}

pub fn solve_with(
    states: &[MemberState],
    params: &ApportionmentParams,
    policy: TiePolicy,
) -> Result<Allocation, ApportionError> {
    let search = Search::run(states, params)?;
    let floor = params.floor();
    match search.tie_report() {
        None => {
            let interval = search.interval();
            let divisor = interval.reference().expect("non-tie interval");
            let seats: Vec<u64> = search.counts.iter().map(|k| floor + k).collect();
            build_allocation(states, params, &seats, divisor, interval, None)
        }
        Some(report) => {
            let winners = choose_winners(&report, policy)?;
            let boundary = report.boundary_divisor.clone();
            let seats: Vec<u64> = search
                .rungs
                .iter()
                .zip(&search.counts)
                .map(|(rung, &k)| {
                    let mut k = k;
                    if rung.is_tied(k, &boundary) {
                        k -= u64::from(k > 0 && rung.last(k).as_ref() == Some(&boundary));
                        k += u64::from(winners.contains(&rung.state.name));
                    }
                    floor + k
                })
                .collect();
            build_allocation(
                states,
                params,
                &seats,
                boundary,
                DivisorInterval::Tie,
                Some(report),
            )
        }
    }
}

pub fn divisor_interval(
    states: &[MemberState],
    params: &ApportionmentParams,
) -> Result<DivisorInterval, ApportionError> {
    Ok(Search::run(states, params)?.interval())
}

/// Fixed-house solve or fixed-divisor evaluation.
pub fn allocate(
    states: &[MemberState],
    params: &ApportionmentParams,
    target: &Target,
    policy: TiePolicy,
) -> Result<Allocation, ApportionError> {
    match target {
        Target::House(h) => solve_with(states, &params.with_house(*h), policy),
        Target::Divisor(d) => evaluate_at_divisor(states, params, d),
    }
}

pub(crate) fn check_feasible(
    states: &[MemberState],
    params: &ApportionmentParams,
) -> Result<(), ApportionError> {
    validate_states(states)?;
    params.validate()?;
    let range = feasible_house_range(states.len(), params);
    if !range.contains(params.house_size) {
        return Err(ApportionError::Infeasible {
            house_size: params.house_size,
            range,
        });
    }
    Ok(())
}

/// Shares are evaluated at `divisor`; seats are taken as given.
pub(crate) fn build_allocation(
    states: &[MemberState],
    params: &ApportionmentParams,
    seats: &[u64],
    divisor: Rational,
    divisor_interval: DivisorInterval,
    resolved_tie: Option<TieReport>,
) -> Result<Allocation, ApportionError> {
    let entries = states
        .iter()
        .zip(seats)
        .map(|(state, &s)| {
            let share = seat_share(state.population, &params.base, &divisor, params.max_cap)?;
            Ok(AllocationEntry::new(state, s, share))
        })
        .collect::<Result<Vec<_>, ApportionError>>()?;
    Ok(Allocation {
        total_seats: seats.iter().sum(),
        entries,
        divisor,
        divisor_interval,
        resolved_tie,
    })
}

/// The critical values of one state above its floor.
struct Rung<'a> {
    state: &'a MemberState,
    floor: u64,
    /// Most seats obtainable above the floor; `None` when uncapped.
    extra_max: Option<u64>,
    base: &'a Rational,
    rule: RoundingRule,
}

impl Rung<'_> {
    /// Critical divisor of the `(j+1)`-th seat above the floor.
    fn critical(&self, j: u64) -> Rational {
        int(self.state.population) / signpost(self.floor + j, self.base, self.rule)
    }

    fn can_grow(&self, k: u64) -> bool {
        self.extra_max.is_none_or(|m| k < m)
    }

    /// Smallest accepted critical value when `k` extra seats are held.
    fn last(&self, k: u64) -> Option<Rational> {
        (k > 0).then(|| self.critical(k - 1))
    }

    /// Largest rejected critical value when `k` extra seats are held.
    fn next(&self, k: u64) -> Option<Rational> {
        self.can_grow(k).then(|| self.critical(k))
    }

    fn is_tied(&self, k: u64, boundary: &Rational) -> bool {
        self.last(k).as_ref() == Some(boundary) || self.next(k).as_ref() == Some(boundary)
    }

    /// Number of critical values strictly above `d`.
    fn count_above(&self, d: &Rational) -> u64 {
        // critical(j) > d  <=>  floor + j < p/d + base - offset
        let y = int(self.state.population) / d + self.base - self.rule.offset();
        let below = y.ceil() - int(self.floor);
        let k = if below.is_positive() {
            u64::try_from(below.to_integer()).unwrap_or(u64::MAX)
        } else {
            0
        };
        self.extra_max.map_or(k, |m| k.min(m))
    }
}

struct Search<'a> {
    rungs: Vec<Rung<'a>>,
    counts: Vec<u64>,
    rule: RoundingRule,
}

impl<'a> Search<'a> {
    fn run(
        states: &'a [MemberState],
        params: &'a ApportionmentParams,
    ) -> Result<Self, ApportionError> {
        check_feasible(states, params)?;
        let floor = params.floor();
        let rungs: Vec<Rung<'a>> = states
            .iter()
            .map(|state| Rung {
                state,
                floor,
                extra_max: params.max_cap.map(|m| m - floor),
                base: &params.base,
                rule: params.rounding,
            })
            .collect();
        let n = states.len() as u64;
        let remaining = params.house_size - n * floor;

        // Seed from the divisor that would be exact without rounding or caps.
        let population: u64 = states.iter().map(|s| s.population).sum();
        let spare = int(params.house_size) - &params.base * int(n);
        let mut counts: Vec<u64> = if remaining > 0 && spare.is_positive() {
            let estimate = int(population) / spare;
            rungs.iter().map(|r| r.count_above(&estimate)).collect()
        } else {
            vec![0; rungs.len()]
        };

        let mut accepted: u64 = counts.iter().sum();
        while accepted < remaining {
            let (i, _) = rungs
                .iter()
                .zip(&counts)
                .enumerate()
                .filter_map(|(i, (r, &k))| r.next(k).map(|c| (i, c)))
                .max_by(|a, b| a.1.cmp(&b.1))
                .expect("feasible house leaves a state below its cap");
            counts[i] += 1;
            accepted += 1;
        }
        while accepted > remaining {
            let (i, _) = rungs
                .iter()
                .zip(&counts)
                .enumerate()
                .filter_map(|(i, (r, &k))| r.last(k).map(|c| (i, c)))
                .min_by(|a, b| a.1.cmp(&b.1))
                .expect("some state holds an extra seat");
            counts[i] -= 1;
            accepted -= 1;
        }
        Ok(Search {
            rungs,
            counts,
            rule: params.rounding,
        })
    }

    fn smallest_accepted(&self) -> Option<Rational> {
        self.rungs
            .iter()
            .zip(&self.counts)
            .filter_map(|(r, &k)| r.last(k))
            .min()
    }

    fn largest_rejected(&self) -> Option<Rational> {
        self.rungs
            .iter()
            .zip(&self.counts)
            .filter_map(|(r, &k)| r.next(k))
            .max()
    }

    fn interval(&self) -> DivisorInterval {
        DivisorInterval::from_boundaries(self.smallest_accepted(), self.largest_rejected(), self.rule)
    }

    fn tie_report(&self) -> Option<TieReport> {
        let hi = self.smallest_accepted()?;
        let lo = self.largest_rejected()?;
        if hi != lo {
            return None;
        }
        let mut tied_states = Vec::new();
        let mut seats_contested = 0;
        for (rung, &k) in self.rungs.iter().zip(&self.counts) {
            if rung.last(k).as_ref() == Some(&hi) {
                seats_contested += 1;
                tied_states.push(rung.state.name.clone());
            } else if rung.next(k).as_ref() == Some(&hi) {
                tied_states.push(rung.state.name.clone());
            }
        }
        tied_states.sort();
        Some(TieReport {
            tied_states,
            boundary_divisor: hi,
            seats_contested,
        })
    }
}
