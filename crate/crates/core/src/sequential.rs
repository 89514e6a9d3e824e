//! Highest-quotient formulation of base+prop.
//!
//! Every state first receives its unconditional floor (all seats whose
//! signpost is non-positive). The remaining seats go one at a time to the
//! state with the largest quotient `population / signpost(seats held)`. A state
//! that reaches the cap leaves the process. With base 0 this is D'Hondt
//! (rounding down), Sainte-Laguë (standard) or Adams (up).

use crate::divisor::{build_allocation, check_feasible, DivisorInterval};
use crate::error::ApportionError;
use crate::model::{Allocation, ApportionmentParams, MemberState, RoundingRule};
use crate::rational::{int, Rational};
use crate::tie::{choose_winners, TiePolicy, TieReport};
use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

/// Divisor threshold for the `(seats + 1)`-th seat: `seats + offset - base`.
pub fn signpost(seats: u64, base: &Rational, rule: RoundingRule) -> Rational {
    int(seats) + rule.offset() - base
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceStep {
    /// 1-based position among the sequentially awarded seats.
    pub step: usize,
    pub state: String,
    pub quotient: Rational,
    pub seats_after: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct QuotientTrace {
    /// Seats granted to every state before the sequential stage.
    pub floor: u64,
    pub floor_total: u64,
    pub steps: Vec<TraceStep>,
    /// States that reached the cap, with the step at which they did.
    pub removals: Vec<(String, usize)>,
    /// Next quotient of every state still in the process when it stopped,
    /// largest first.
    pub pending: Vec<(String, Rational)>,
}

#[derive(PartialEq, Eq)]
struct Candidate {
    quotient: Rational,
    name: Reverse<String>,
    index: usize,
}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        self.quotient
            .cmp(&other.quotient)
            .then_with(|| self.name.cmp(&other.name))
    }
}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

pub fn sequential_allocate(
    states: &[MemberState],
    params: &ApportionmentParams,
) -> Result<(Allocation, QuotientTrace), ApportionError> {
    sequential_allocate_with(states, params, TiePolicy::Fail)
}

pub fn sequential_allocate_with(
    states: &[MemberState],
    params: &ApportionmentParams,
    policy: TiePolicy,
) -> Result<(Allocation, QuotientTrace), ApportionError> {
    check_feasible(states, params)?;
    let floor = params.floor();
    let mut seats = vec![floor; states.len()];
    let mut trace = QuotientTrace {
        floor,
        floor_total: floor * states.len() as u64,
        ..QuotientTrace::default()
    };

    let quotient = |i: usize, held: u64| -> Rational {
        int(states[i].population) / signpost(held, &params.base, params.rounding)
    };
    let capped = |held: u64| params.max_cap == Some(held);

    let mut heap: BinaryHeap<Candidate> = states
        .iter()
        .enumerate()
        .filter(|&(i, _)| !capped(seats[i]))
        .map(|(i, s)| Candidate {
            quotient: quotient(i, seats[i]),
            name: Reverse(s.name.clone()),
            index: i,
        })
        .collect();

    let remaining = params.house_size - trace.floor_total;
    for step in 1..=remaining as usize {
        let best = heap.pop().expect("feasible house leaves a state below its cap");
        let i = best.index;
        seats[i] += 1;
        trace.steps.push(TraceStep {
            step,
            state: states[i].name.clone(),
            quotient: best.quotient,
            seats_after: seats[i],
        });
        if capped(seats[i]) {
            trace.removals.push((states[i].name.clone(), step));
        } else {
            heap.push(Candidate {
                quotient: quotient(i, seats[i]),
                name: best.name,
                index: i,
            });
        }
    }
    trace.pending = heap
        .into_sorted_vec()
        .into_iter()
        .rev()
        .map(|c| (c.name.0, c.quotient))
        .collect();

    let smallest_awarded = trace.steps.last().map(|s| s.quotient.clone());
    let largest_pending = trace.pending.first().map(|(_, q)| q.clone());
    match detect_tie(&trace, params.house_size) {
        None => {
            let interval =
                DivisorInterval::from_boundaries(smallest_awarded, largest_pending, params.rounding);
            let divisor = interval.reference().expect("non-tie interval");
            let allocation = build_allocation(states, params, &seats, divisor, interval, None)?;
            Ok((allocation, trace))
        }
        Some(report) => {
            let winners = choose_winners(&report, policy)?;
            let boundary = report.boundary_divisor.clone();
            for step in trace.steps.iter().filter(|s| s.quotient == boundary) {
                let i = index_of(states, &step.state);
                seats[i] -= 1;
            }
            for name in &winners {
                seats[index_of(states, name)] += 1;
            }
            let allocation = build_allocation(
                states,
                params,
                &seats,
                boundary,
                DivisorInterval::Tie,
                Some(report),
            )?;
            Ok((allocation, trace))
        }
    }
}

fn index_of(states: &[MemberState], name: &str) -> usize {
    states
        .iter()
        .position(|s| s.name == name)
        .expect("traced state exists")
}

/// A tie exists when the quotient that won the final seat equals the best
/// losing quotient.
pub fn detect_tie(trace: &QuotientTrace, house_size: u64) -> Option<TieReport> {
    let awarded = house_size.checked_sub(trace.floor_total)? as usize;
    if awarded == 0 || trace.steps.len() != awarded {
        return None;
    }
    let last = &trace.steps[awarded - 1].quotient;
    let losers: Vec<&String> = trace
        .pending
        .iter()
        .filter(|(_, q)| q == last)
        .map(|(name, _)| name)
        .collect();
    if losers.is_empty() {
        return None;
    }
    let winners: Vec<&String> = trace
        .steps
        .iter()
        .filter(|s| &s.quotient == last)
        .map(|s| &s.state)
        .collect();
    let mut tied_states: Vec<String> = winners.iter().chain(&losers).map(|s| s.to_string()).collect();
    tied_states.sort();
    Some(TieReport {
        tied_states,
        boundary_divisor: last.clone(),
        seats_contested: winners.len() as u64,
    })
}
