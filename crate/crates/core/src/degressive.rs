//! Degressive-proportionality validators.
//!
//! Condition 1: no less populous state receives more seats than a more
//! populous one. Condition 2: population per seat increases with population.
//! The revised reading tests Condition 2 on the shares before rounding; the
//! post-rounding check is diagnostic only.

use crate::model::Allocation;
use crate::rational::{int, Rational};
use std::cmp::Reverse;

/// An ordered pair breaking one of the conditions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Inversion {
    pub smaller: String,
    pub larger: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DpReport {
    pub condition1_violations: Vec<Inversion>,
    pub pre_rounding_violations: Vec<Inversion>,
    /// Larger-population member of each inverted pair after rounding.
    pub post_rounding_violations: Vec<String>,
    pub satisfies_revised_dp: bool,
}

/// Pairs with `p_i < p_j` and `seats_i > seats_j`.
pub fn check_condition1(entries: &[(&str, u64, u64)]) -> Vec<Inversion> {
    pairwise(entries, |small, large| small.2 > large.2)
}

/// Pairs with `p_i < p_j` and `p_i / share_i >= p_j / share_j`.
pub fn check_pre_rounding(entries: &[(&str, u64, Rational)]) -> Vec<Inversion> {
    pairwise(entries, |small, large| {
        int(small.1) / &small.2 >= int(large.1) / &large.2
    })
}

/// States whose population per seat is exceeded by some less populous state.
/// States without seats are skipped.
pub fn check_post_rounding(entries: &[(&str, u64, u64)]) -> Vec<String> {
    let mut rows: Vec<(&str, u64, Rational)> = entries
        .iter()
        .filter(|e| e.2 > 0)
        .map(|&(name, p, s)| (name, p, int(p) / int(s)))
        .collect();
    rows.sort_by_key(|r| (r.1, r.0));

    // Sweep upwards in population, keeping the largest ratio seen among
    // strictly smaller populations.
    let mut flagged = Vec::new();
    let mut best_below: Option<Rational> = None;
    let mut i = 0;
    while i < rows.len() {
        let mut j = i;
        while j < rows.len() && rows[j].1 == rows[i].1 {
            j += 1;
        }
        for row in &rows[i..j] {
            if best_below.as_ref().is_some_and(|b| b > &row.2) {
                flagged.push((row.1, row.0));
            }
        }
        for row in &rows[i..j] {
            if best_below.as_ref().is_none_or(|b| &row.2 > b) {
                best_below = Some(row.2.clone());
            }
        }
        i = j;
    }
    flagged.sort_by_key(|&(p, name)| (Reverse(p), name));
    flagged.into_iter().map(|(_, name)| name.to_string()).collect()
}

fn pairwise<T>(
    entries: &[(&str, u64, T)],
    violates: impl Fn(&(&str, u64, T), &(&str, u64, T)) -> bool,
) -> Vec<Inversion> {
    let mut found = Vec::new();
    for small in entries {
        for large in entries {
            if small.1 < large.1 && violates(small, large) {
                found.push((large.1, small.1, large.0, small.0));
            }
        }
    }
    found.sort_by_key(|&(pl, ps, nl, ns)| (Reverse(pl), Reverse(ps), nl, ns));
    found
        .into_iter()
        .map(|(_, _, larger, smaller)| Inversion {
            smaller: smaller.to_string(),
            larger: larger.to_string(),
        })
        .collect()
}

pub fn dp_report(allocation: &Allocation) -> DpReport {
    let seats: Vec<(&str, u64, u64)> = allocation
        .entries
        .iter()
        .map(|e| (e.name.as_str(), e.population, e.seats))
        .collect();
    let shares: Vec<(&str, u64, Rational)> = allocation
        .entries
        .iter()
        .map(|e| (e.name.as_str(), e.population, e.share.value().clone()))
        .collect();
    let condition1_violations = check_condition1(&seats);
    let pre_rounding_violations = check_pre_rounding(&shares);
    DpReport {
        satisfies_revised_dp: condition1_violations.is_empty() && pre_rounding_violations.is_empty(),
        condition1_violations,
        pre_rounding_violations,
        post_rounding_violations: check_post_rounding(&seats),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::divisor::{evaluate_at_divisor, solve};
    use crate::model::ApportionmentParams;
    use crate::presets;
    use crate::rational::frac;

    #[test]
    fn table1_allocation() {
        let a = solve(&presets::eu27().states, &ApportionmentParams::lisbon()).unwrap();
        let report = dp_report(&a);
        assert!(report.satisfies_revised_dp);
        assert!(report.condition1_violations.is_empty());
        assert_eq!(report.post_rounding_violations, vec!["France", "Belgium"]);
    }

    #[test]
    fn table1_shares_at_819000_are_strictly_degressive() {
        let a = evaluate_at_divisor(&presets::eu27().states, &ApportionmentParams::lisbon(), &int(819_000)).unwrap();
        assert!(dp_report(&a).pre_rounding_violations.is_empty());
    }

    #[test]
    fn status_quo_satisfies_condition1() {
        let preset = presets::eu27();
        let rows: Vec<(&str, u64, u64)> = preset
            .states
            .iter()
            .map(|s| (s.name.as_str(), s.population, preset.status_quo_of(&s.name).unwrap()))
            .collect();
        assert!(check_condition1(&rows).is_empty());
    }

    #[test]
    fn eu28_at_835000_satisfies_revised_dp() {
        let a = evaluate_at_divisor(&presets::eu28().states, &ApportionmentParams::lisbon(), &int(835_000)).unwrap();
        assert!(dp_report(&a).satisfies_revised_dp);
    }

    #[test]
    fn constructed_inversion() {
        let rows = [("small", 100, 3), ("large", 200, 2)];
        assert_eq!(
            check_condition1(&rows),
            vec![Inversion { smaller: "small".into(), larger: "large".into() }]
        );
    }

    #[test]
    fn equal_populations_do_not_violate() {
        let shares = [("a", 100, frac(7, 2)), ("b", 100, frac(7, 2))];
        assert!(check_pre_rounding(&shares).is_empty());
        let seats = [("a", 100, 3), ("b", 100, 3)];
        assert!(check_post_rounding(&seats).is_empty());
        assert!(check_condition1(&seats).is_empty());
    }

    #[test]
    fn proportional_allocation_has_no_post_rounding_violation() {
        let rows = [("a", 5000, 5), ("b", 3000, 3), ("c", 2000, 2)];
        assert!(check_post_rounding(&rows).is_empty());
    }

    #[test]
    fn pre_rounding_equality_is_a_violation() {
        // 100/2 == 200/4
        let shares = [("a", 100, int(2)), ("b", 200, int(4))];
        assert_eq!(check_pre_rounding(&shares).len(), 1);
    }

    #[test]
    fn inverted_allocation_fails_revised_dp() {
        let mut a = solve(&presets::eu27().states, &ApportionmentParams::lisbon()).unwrap();
        let last = a.entries.len() - 1;
        a.entries[last].seats = 40;
        let report = dp_report(&a);
        assert!(!report.satisfies_revised_dp);
        assert!(report.condition1_violations.iter().all(|v| v.smaller == "Malta"));
    }
}
