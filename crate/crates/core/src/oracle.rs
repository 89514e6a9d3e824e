//! Brute-force reference solver.
//!
//! Enumerates every critical divisor, sorts them, and evaluates `T(d)` by
//! direct rounding of the seat shares inside each gap between consecutive
//! critical values. Quadratic in the house size; meant for small instances
//! and for cross-checking [`crate::divisor::solve`].

use crate::divisor::{build_allocation, check_feasible, total_at_divisor, DivisorInterval};
use crate::error::ApportionError;
use crate::model::{Allocation, ApportionmentParams, MemberState};
use crate::rational::{half, int, Rational};
use crate::tie::TieReport;
use num_traits::Signed;

pub fn brute_force_oracle(
    states: &[MemberState],
    params: &ApportionmentParams,
) -> Result<Allocation, ApportionError> {
    check_feasible(states, params)?;
    let house = params.house_size;
    let seat_limit = params.max_cap.unwrap_or(house + 1).min(house + 1);

    let mut critical: Vec<Rational> = Vec::new();
    for state in states {
        for a in 0..seat_limit {
            let threshold = int(a) + params.rounding.offset() - &params.base;
            if threshold.is_positive() {
                critical.push(int(state.population) / threshold);
            }
        }
    }
    critical.sort_by(|a, b| b.cmp(a));
    critical.dedup();

    let total = |d: &Rational| -> Result<u64, ApportionError> {
        Ok(total_at_divisor(states, params, d)?.total)
    };

    // Gap j lies between critical[j] (above) and critical[j + 1] (below).
    let sample = |j: Option<usize>| -> Rational {
        match j {
            None => critical.first().map_or(int(1), |c| c * int(2)),
            Some(j) if j + 1 < critical.len() => (&critical[j] + &critical[j + 1]) * half(),
            Some(j) => &critical[j] * half(),
        }
    };

    let gaps = std::iter::once(None).chain((0..critical.len()).map(Some));
    let mut previous_total = None;
    for gap in gaps {
        let t = total(&sample(gap))?;
        if t == house {
            let hi = gap.map(|j| critical[j].clone());
            let lo = gap.map_or(critical.first().cloned(), |j| critical.get(j + 1).cloned());
            let hi_open = match &hi {
                None => true,
                Some(v) => total(v)? != house,
            };
            let lo_open = match &lo {
                None => true,
                Some(v) => total(v)? != house,
            };
            let interval = DivisorInterval::Range {
                lo: lo.unwrap_or_else(|| int(0)),
                lo_open,
                hi,
                hi_open,
            };
            let d = interval.reference().expect("bounded below");
            let seats: Vec<u64> = states
                .iter()
                .map(|s| {
                    total_at_divisor(std::slice::from_ref(s), params, &d).map(|t| t.total)
                })
                .collect::<Result<_, _>>()?;
            return build_allocation(states, params, &seats, d, interval, None);
        }
        if t > house {
            // T jumped past the house size at the critical value above this gap.
            let j = gap.expect("largest divisors give the floor total");
            let boundary = critical[j].clone();
            let below_house = previous_total.expect("gap above exists");
            let mut tied_states = total_at_divisor(states, params, &boundary)?.boundary_states;
            tied_states.sort();
            return Err(ApportionError::Tie(TieReport {
                tied_states,
                boundary_divisor: boundary,
                seats_contested: house - below_house,
            }));
        }
        previous_total = Some(t);
    }
    unreachable!("feasible house size is reached by the smallest divisors")
}
