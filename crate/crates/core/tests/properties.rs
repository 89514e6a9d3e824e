use apportion::degressive::{check_post_rounding, check_pre_rounding};
use apportion::oracle::brute_force_oracle;
use apportion::rational::{frac, int, Rational};
use apportion::schemes::{scheme_a_minimum, scheme_b_base, SchemeAConfig};
use apportion::*;
use proptest::prelude::*;

fn rule() -> impl Strategy<Value = RoundingRule> {
    prop_oneof![
        Just(RoundingRule::Up),
        Just(RoundingRule::Standard),
        Just(RoundingRule::Down)
    ]
}

fn states_from(pops: &[u64]) -> Vec<MemberState> {
    pops.iter()
        .enumerate()
        .map(|(i, &p)| MemberState::new(format!("S{i:02}"), p).unwrap())
        .collect()
}

/// Half-integer base in [0, 6], cap in (base, 40] or none, feasible house.
fn instance() -> impl Strategy<Value = (Vec<MemberState>, ApportionmentParams)> {
    (
        prop::collection::vec(1_000u64..5_000_000, 1..8),
        0u64..=12,
        rule(),
        prop::option::of(8u64..40),
        any::<prop::sample::Index>(),
    )
        .prop_map(|(pops, half_base, rule, cap, pick)| {
            let states = states_from(&pops);
            let base = frac(half_base as i64, 2);
            let probe = ApportionmentParams::new(base.clone(), cap, 1, rule).unwrap();
            let range = feasible_house_range(states.len(), &probe);
            let hi = range.hi.unwrap_or(range.lo + 60).min(range.lo + 60);
            let house = (range.lo + pick.index((hi - range.lo + 1) as usize) as u64).max(1);
            let params = ApportionmentParams::new(base, cap, house, rule).unwrap();
            (states, params)
        })
}

/// All-pairs post-rounding scan.
fn naive_post_rounding(rows: &[(&str, u64, u64)]) -> Vec<String> {
    let mut flagged: Vec<(u64, &str)> = rows
        .iter()
        .filter(|larger| {
            larger.2 > 0
                && rows.iter().any(|smaller| {
                    smaller.2 > 0
                        && smaller.1 < larger.1
                        && int(smaller.1) / int(smaller.2) > int(larger.1) / int(larger.2)
                })
        })
        .map(|r| (r.1, r.0))
        .collect();
    flagged.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(b.1)));
    flagged.into_iter().map(|(_, n)| n.to_string()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn seat_share_is_monotone_in_population(
        p1 in 1u64..10_000_000, dp in 0u64..10_000_000,
        half_base in 0u64..20, d in 1u64..5_000_000, cap in prop::option::of(1u64..200),
    ) {
        let base = frac(half_base as i64, 2);
        let d = int(d);
        let a = seat_share(p1, &base, &d, cap).unwrap();
        let b = seat_share(p1 + dp, &base, &d, cap).unwrap();
        prop_assert!(a <= b);
    }

    #[test]
    fn seat_share_is_scale_invariant(
        p in 1u64..10_000_000, half_base in 0u64..20, dn in 1i64..5_000_000, dd in 1i64..100,
        c in 1u64..1000, cap in prop::option::of(1u64..200),
    ) {
        let base = frac(half_base as i64, 2);
        let d = frac(dn, dd);
        let direct = seat_share(p, &base, &d, cap).unwrap();
        let scaled = seat_share(c * p, &base, &(&d * int(c)), cap).unwrap();
        prop_assert_eq!(direct, scaled);
    }

    #[test]
    fn equivalent_systems_agree_where_well_defined(
        x_num in 0i64..10_000, x_den in 1i64..97, half_base in 0i64..16,
    ) {
        let x = frac(x_num, x_den);
        let base = frac(half_base, 2);
        let class = equivalent_specs(&base, RoundingRule::Up);
        let results: Vec<Rounded> = class
            .members
            .iter()
            .map(|(b, r)| round_share(&(b + &x), *r))
            .collect();
        if results.iter().all(|r| r.well_defined) {
            prop_assert!(results.windows(2).all(|w| w[0].seats == w[1].seats));
        }
    }

    #[test]
    fn total_is_non_increasing_in_divisor((states, params) in instance(), a in 1u64..2_000_000, b in 1u64..2_000_000) {
        let (lo, hi) = (a.min(b), a.max(b));
        let t_lo = total_at_divisor(&states, &params, &int(lo)).unwrap().total;
        let t_hi = total_at_divisor(&states, &params, &int(hi)).unwrap().total;
        prop_assert!(t_lo >= t_hi);
    }

    #[test]
    fn solve_matches_oracle_and_sequential((states, params) in instance()) {
        let fast = solve(&states, &params);
        let slow = brute_force_oracle(&states, &params);
        let seq = sequential_allocate(&states, &params);
        match (&fast, &slow, &seq) {
            (Ok(f), Ok(s), Ok((q, _))) => {
                prop_assert_eq!(f.seats(), s.seats());
                prop_assert_eq!(&f.divisor_interval, &s.divisor_interval);
                prop_assert_eq!(f.seats(), q.seats());
                prop_assert_eq!(&f.divisor_interval, &q.divisor_interval);
                prop_assert_eq!(f.total_seats, params.house_size);
            }
            (Err(ApportionError::Tie(a)), Err(ApportionError::Tie(b)), Err(ApportionError::Tie(c))) => {
                prop_assert_eq!(a, b);
                prop_assert_eq!(a, c);
            }
            other => prop_assert!(false, "disagreement: {:?}", other),
        }
    }

    #[test]
    fn tiny_populations_tie_identically(
        pops in prop::collection::vec(1u64..12, 2..6), half_base in 0u64..4, rule in rule(), extra in 0u64..15,
    ) {
        let states = states_from(&pops);
        let base = frac(half_base as i64, 2);
        let probe = ApportionmentParams::new(base.clone(), None, 1, rule).unwrap();
        let house = (feasible_house_range(states.len(), &probe).lo + extra).max(1);
        let params = ApportionmentParams::new(base, None, house, rule).unwrap();
        let fast = solve(&states, &params);
        let slow = brute_force_oracle(&states, &params);
        let seq = sequential_allocate(&states, &params).map(|(a, _)| a);
        prop_assert_eq!(&fast, &slow);
        prop_assert_eq!(&fast, &seq);
        for seed in [TiePolicy::Lexicographic, TiePolicy::Seeded(11)] {
            let a = solve_with(&states, &params, seed).unwrap();
            let (b, _) = sequential_allocate_with(&states, &params, seed).unwrap();
            prop_assert_eq!(a.seats(), b.seats());
            prop_assert_eq!(a.total_seats, house);
        }
    }

    #[test]
    fn interval_is_exact((states, params) in instance()) {
        let Ok(allocation) = solve(&states, &params) else { return Ok(()) };
        let DivisorInterval::Range { lo, hi, .. } = &allocation.divisor_interval else {
            unreachable!("solve only returns ties as errors")
        };
        let inside = allocation.divisor_interval.reference().unwrap();
        let at = evaluate_at_divisor(&states, &params, &inside).unwrap();
        prop_assert_eq!(at.seats(), allocation.seats());
        let eps = frac(1, 1_000_000);
        if let Some(hi) = hi {
            let t = total_at_divisor(&states, &params, &(hi + &eps)).unwrap().total;
            prop_assert!(t < params.house_size);
        }
        if lo > &eps {
            let t = total_at_divisor(&states, &params, &(lo - &eps)).unwrap().total;
            prop_assert!(t > params.house_size);
        }
    }

    #[test]
    fn capped_states_never_exceed_the_cap((states, params) in instance()) {
        if let Ok(a) = solve(&states, &params) {
            if let Some(cap) = params.max_cap {
                prop_assert!(a.seats().iter().all(|&s| s <= cap));
            }
        }
    }

    #[test]
    fn scaling_populations_scales_the_interval((states, params) in instance(), c in 2u64..50) {
        let scaled: Vec<MemberState> = states
            .iter()
            .map(|s| MemberState::new(s.name.clone(), s.population * c).unwrap())
            .collect();
        match (divisor_interval(&states, &params), divisor_interval(&scaled, &params)) {
            (Ok(DivisorInterval::Tie), Ok(DivisorInterval::Tie)) => {}
            (Ok(DivisorInterval::Range { lo, lo_open, hi, hi_open }), Ok(DivisorInterval::Range { lo: slo, lo_open: slo_open, hi: shi, hi_open: shi_open })) => {
                prop_assert_eq!(lo * int(c), slo);
                prop_assert_eq!(hi.map(|h| h * int(c)), shi);
                prop_assert_eq!((lo_open, hi_open), (slo_open, shi_open));
                prop_assert_eq!(solve(&states, &params).unwrap().seats(), solve(&scaled, &params).unwrap().seats());
            }
            other => prop_assert!(false, "mismatch {:?}", other),
        }
    }

    #[test]
    fn sequential_trace_is_monotone_and_bounded((states, params) in instance()) {
        if let Ok((allocation, trace)) = sequential_allocate(&states, &params) {
            prop_assert!(trace.steps.windows(2).all(|w| w[0].quotient >= w[1].quotient));
            if let Some(cap) = params.max_cap {
                prop_assert!(trace.steps.iter().all(|s| s.seats_after <= cap));
            }
            for (name, step) in &trace.removals {
                prop_assert!(trace.steps[*step..].iter().all(|s| &s.state != name));
            }
            // winning and losing boundary quotients are the interval ends
            if let DivisorInterval::Range { lo, hi, .. } = &allocation.divisor_interval {
                if let Some(last) = trace.steps.last() {
                    prop_assert_eq!(Some(&last.quotient), hi.as_ref());
                }
                if let Some((_, best_loser)) = trace.pending.first() {
                    prop_assert_eq!(best_loser, lo);
                }
            }
        }
    }

    #[test]
    fn base_shift_consistency_sequential(
        pops in prop::collection::vec(10_000u64..5_000_000, 2..8), b in 0u64..6, extra in 0u64..40,
    ) {
        let states = states_from(&pops);
        let n = states.len() as u64;
        let up = ApportionmentParams::new(int(b), Some(60), n * (b + 1) + extra, RoundingRule::Up).unwrap();
        let down = up.with_base(int(b + 1), RoundingRule::Down);
        match (sequential_allocate(&states, &up), sequential_allocate(&states, &down)) {
            (Ok((a, _)), Ok((d, _))) => prop_assert_eq!(a.seats(), d.seats()),
            (Err(ApportionError::Tie(_)), Err(ApportionError::Tie(_))) => {}
            other => prop_assert!(false, "mismatch {:?}", other),
        }
    }

    #[test]
    fn base_plus_prop_is_revised_degressive((states, params) in instance()) {
        let distinct = {
            let mut p: Vec<u64> = states.iter().map(|s| s.population).collect();
            p.sort();
            p.windows(2).all(|w| w[0] < w[1])
        };
        prop_assume!(distinct && params.base > int(0));
        if let Ok(a) = solve(&states, &params) {
            let report = dp_report(&a);
            prop_assert!(report.condition1_violations.is_empty());
            let shares: Vec<(&str, u64, Rational)> = a.entries.iter().map(|e| (e.name.as_str(), e.population, e.share.value().clone())).collect();
            prop_assert!(check_pre_rounding(&shares).is_empty());
            prop_assert!(report.satisfies_revised_dp);
        }
    }

    #[test]
    fn post_rounding_matches_all_pairs_scan(
        rows in prop::collection::vec((1u64..200, 0u64..12), 1..14),
    ) {
        let names: Vec<String> = (0..rows.len()).map(|i| format!("S{i:02}")).collect();
        let rows: Vec<(&str, u64, u64)> = rows.iter().zip(&names).map(|(&(p, s), n)| (n.as_str(), p, s)).collect();
        prop_assert_eq!(check_post_rounding(&rows), naive_post_rounding(&rows));
    }

    #[test]
    fn scheme_a_minimum_is_the_largest_under_the_cap(n in 1u64..180, pct in 1i64..=100, house in 100u64..2000) {
        let config = SchemeAConfig::new(frac(pct, 100), house).unwrap();
        if let Ok(m) = scheme_a_minimum(n, &config) {
            let budget = frac(pct, 100) * int(house);
            prop_assert!(int(n * m) <= budget && budget < int(n * (m + 1)));
            if let Ok(next) = scheme_a_minimum(n + 1, &config) {
                prop_assert!(next <= m);
            }
        }
    }

    #[test]
    fn scheme_b_strictly_decreases(n in 1u64..10_000) {
        prop_assert!(scheme_b_base(n + 1).unwrap() < scheme_b_base(n).unwrap());
    }
}

#[test]
fn smallest_state_seats_are_monotone_in_base() {
    let eu27 = presets::eu27().states;
    let params = ApportionmentParams::lisbon();
    let mut previous = 0;
    for tenths in 0..=50 {
        let p = params.with_base(frac(tenths, 10), RoundingRule::Up);
        let seats = solve(&eu27, &p).unwrap().seats_of("Malta").unwrap();
        assert!(seats >= previous, "Malta lost seats at base {tenths}/10");
        previous = seats;
    }
}
