//! Table, CSV and JSON renderings of a [`Report`].
//!
//! CSV and JSON are deterministic: identical reports give identical bytes.
//! JSON carries every rational as `{num, den, decimal}` with the numerator and
//! denominator as strings, so no precision is lost in transit.

use crate::config::{tie_policy_name, Method, OutputFormat, SchemeChoice};
use crate::report::Report;
use apportion::rational::{format_decimal, format_grouped, group_thousands, int, Rational};
use apportion::schemes::{SchemeABase, ScenarioDelta};
use apportion::{Allocation, AllocationEntry, DivisorInterval, HouseRange, Inversion, Target};
use serde_json::{json, Value};
use std::fmt::Write as _;

const JSON_PLACES: u32 = 6;

pub fn render(report: &Report, format: OutputFormat) -> Vec<u8> {
    match format {
        OutputFormat::Table => render_table(report).into_bytes(),
        OutputFormat::Csv => render_csv(report).into_bytes(),
        OutputFormat::Json => {
            let mut out = serde_json::to_string_pretty(&report_json(report)).expect("serializable");
            out.push('\n');
            out.into_bytes()
        }
    }
}

pub fn rational_json(value: &Rational) -> Value {
    json!({
        "num": value.numer().to_string(),
        "den": value.denom().to_string(),
        "decimal": format_decimal(value, JSON_PLACES),
    })
}

pub fn range_json(range: &HouseRange) -> Value {
    json!({ "lo": range.lo, "hi": range.hi })
}

fn interval_json(interval: &DivisorInterval) -> Value {
    match interval {
        DivisorInterval::Tie => json!({ "tie": true, "text": "tie" }),
        DivisorInterval::Range {
            lo,
            lo_open,
            hi,
            hi_open,
        } => json!({
            "tie": false,
            "lo": rational_json(lo),
            "lo_open": lo_open,
            "hi": hi.as_ref().map(rational_json),
            "hi_open": hi_open,
            "text": interval.to_string(),
        }),
    }
}

fn method_name(method: Method) -> &'static str {
    match method {
        Method::Divisor => "divisor",
        Method::Sequential => "sequential",
        Method::Both => "both",
    }
}

/// 1-based positions by population, largest first; equal populations by name.
fn ranks(allocation: &Allocation) -> Vec<usize> {
    let mut order: Vec<usize> = (0..allocation.entries.len()).collect();
    order.sort_by(|&a, &b| {
        let (a, b) = (&allocation.entries[a], &allocation.entries[b]);
        b.population.cmp(&a.population).then_with(|| a.name.cmp(&b.name))
    });
    let mut rank = vec![0; order.len()];
    for (position, &i) in order.iter().enumerate() {
        rank[i] = position + 1;
    }
    rank
}

/// Entries with their ranks, in rank order.
fn ranked(allocation: &Allocation) -> Vec<(usize, &AllocationEntry)> {
    let mut rows: Vec<_> = ranks(allocation).into_iter().zip(&allocation.entries).collect();
    rows.sort_by_key(|r| r.0);
    rows
}

fn scheme_json(report: &Report) -> Value {
    let Some(outcome) = &report.scheme else {
        return Value::Null;
    };
    let (name, extra) = match &outcome.scheme {
        SchemeChoice::B => ("B", json!(null)),
        SchemeChoice::A { cap_fraction, base } => (
            "A",
            json!({
                "cap_fraction": rational_json(cap_fraction),
                "base_rule": match base {
                    SchemeABase::MinimumMinusOne => json!("minimum-minus-one"),
                    SchemeABase::SmallestFraction { granularity } => json!({
                        "smallest-fraction": rational_json(granularity),
                    }),
                },
            }),
        ),
    };
    json!({
        "scheme": name,
        "states": outcome.states,
        "minimum": outcome.minimum,
        "base": rational_json(&outcome.base),
        "options": extra,
    })
}

fn delta_json(delta: &ScenarioDelta) -> Value {
    json!({
        "changes": delta.changes.iter().map(|c| json!({
            "name": c.name,
            "before": c.before,
            "after": c.after,
            "delta": c.delta(),
        })).collect::<Vec<_>>(),
        "unchanged": delta.unchanged,
        "joined": delta.joined,
        "removed": delta.removed,
        "baseline": {
            "total_seats": delta.baseline.total_seats,
            "divisor_interval": interval_json(&delta.baseline.divisor_interval),
            "seats": delta.baseline.entries.iter()
                .map(|e| json!({ "name": e.name, "seats": e.seats }))
                .collect::<Vec<_>>(),
        },
    })
}

fn status_quo_json(report: &Report) -> Value {
    if !report.has_status_quo() {
        return Value::Null;
    }
    let mut changes = Vec::new();
    let mut unchanged = Vec::new();
    let mut without = Vec::new();
    for entry in &report.allocation.entries {
        match report.status_quo.get(&entry.name) {
            None => without.push(entry.name.clone()),
            Some(&now) if now == entry.seats => unchanged.push(entry.name.clone()),
            Some(&now) => changes.push(json!({
                "name": entry.name,
                "before": now,
                "after": entry.seats,
                "delta": entry.seats as i64 - now as i64,
            })),
        }
    }
    json!({
        "changes": changes,
        "unchanged": unchanged,
        "without_seats_today": without,
        "total_now": report.status_quo.values().sum::<u64>(),
    })
}

fn inversions_json(list: &[Inversion]) -> Value {
    list.iter()
        .map(|i| json!({ "smaller": i.smaller, "larger": i.larger }))
        .collect()
}

pub fn report_json(report: &Report) -> Value {
    let allocation = &report.allocation;
    let violators = &report.dp.post_rounding_violations;
    let entries: Vec<Value> = ranks(allocation)
        .into_iter()
        .zip(&allocation.entries)
        .map(|(rank, e)| {
            json!({
                "rank": rank,
                "name": e.name,
                "population": e.population,
                "seats": e.seats,
                "share": rational_json(e.share.value()),
                "ratio_before": rational_json(&e.ratio_before),
                "ratio_after": e.ratio_after.as_ref().map(rational_json),
                "capped": e.is_capped(report.params.max_cap),
                "post_rounding_violation": violators.contains(&e.name),
                "now_seats": report.status_quo.get(&e.name),
            })
        })
        .collect();
    let target = match &report.target {
        Target::House(h) => json!({ "house_size": h }),
        Target::Divisor(d) => json!({ "divisor": rational_json(d) }),
    };
    json!({
        "source": {
            "label": report.source_label,
            "snapshot_date": report.snapshot_date,
        },
        "params": {
            "base": rational_json(&report.params.base),
            "max_cap": report.params.max_cap,
            "house_size": report.params.house_size,
            "rounding": report.params.rounding.as_str(),
            "target": target,
            "method": method_name(report.method),
            "tie_policy": tie_policy_name(report.tie_policy),
        },
        "allocation": {
            "entries": entries,
            "total_seats": allocation.total_seats,
            "total_population": allocation.entries.iter().map(|e| e.population).sum::<u64>(),
            "divisor": rational_json(&allocation.divisor),
            "divisor_interval": interval_json(&allocation.divisor_interval),
            "resolved_tie": allocation.resolved_tie.as_ref().map(|t| json!({
                "tied_states": t.tied_states,
                "boundary_divisor": rational_json(&t.boundary_divisor),
                "seats_contested": t.seats_contested,
            })),
        },
        "dp": {
            "condition1_violations": inversions_json(&report.dp.condition1_violations),
            "pre_rounding_violations": inversions_json(&report.dp.pre_rounding_violations),
            "post_rounding_violations": violators,
            "satisfies_revised_dp": report.dp.satisfies_revised_dp,
        },
        "feasible_range": range_json(&report.feasible_range),
        "status_quo": status_quo_json(report),
        "accession": report.accession.as_ref().map(delta_json),
        "scheme": scheme_json(report),
    })
}

fn render_csv(report: &Report) -> String {
    let with_now = report.has_status_quo();
    let mut writer = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["rank", "name", "population", "seats", "share", "ratio_before", "ratio_after"];
    if with_now {
        header.push("now_seats");
    }
    writer.write_record(&header).expect("writing to memory");
    for (rank, e) in ranked(&report.allocation) {
        let mut row = vec![
            rank.to_string(),
            e.name.clone(),
            e.population.to_string(),
            e.seats.to_string(),
            format_decimal(e.share.value(), JSON_PLACES),
            format_decimal(&e.ratio_before, 1),
            e.ratio_after.as_ref().map_or(String::new(), |r| format_decimal(r, 1)),
        ];
        if with_now {
            row.push(report.status_quo.get(&e.name).map_or(String::new(), u64::to_string));
        }
        writer.write_record(&row).expect("writing to memory");
    }
    let entries = &report.allocation.entries;
    let mut total = vec![
        String::new(),
        "Total".into(),
        entries.iter().map(|e| e.population).sum::<u64>().to_string(),
        report.allocation.total_seats.to_string(),
        String::new(),
        String::new(),
        String::new(),
    ];
    if with_now {
        total.push(report.status_quo.values().sum::<u64>().to_string());
    }
    writer.write_record(&total).expect("writing to memory");
    String::from_utf8(writer.into_inner().expect("flush to memory")).expect("utf-8")
}

fn grouped(n: u64) -> String {
    group_thousands(&n.to_string())
}

fn describe_base(report: &Report) -> String {
    let base = &report.params.base;
    if base.is_integer() {
        base.to_string()
    } else if (base * int(2)).is_integer() {
        format_decimal(base, 1)
    } else {
        format!("{base} (~{})", format_decimal(base, 4))
    }
}

fn interval_text(interval: &DivisorInterval) -> String {
    match interval {
        DivisorInterval::Tie => "tie (no divisor realizes the house size)".into(),
        DivisorInterval::Range {
            lo,
            lo_open,
            hi,
            hi_open,
        } => {
            let open = if *lo_open { '(' } else { '[' };
            let upper = hi.as_ref().map_or("inf)".into(), |hi| {
                format!("{}{}", format_grouped(hi, 1), if *hi_open { ')' } else { ']' })
            });
            format!("{open}{}, {upper}  exact {interval}", format_grouped(lo, 1))
        }
    }
}

fn render_table(report: &Report) -> String {
    let allocation = &report.allocation;
    let with_now = report.has_status_quo();
    let violators = &report.dp.post_rounding_violations;

    let mut rows: Vec<Vec<String>> = Vec::new();
    for (rank, e) in ranked(allocation) {
        let mut notes = Vec::new();
        if e.is_capped(report.params.max_cap) {
            notes.push("cap");
        }
        if violators.contains(&e.name) {
            notes.push("dp*");
        }
        let mut row = vec![
            rank.to_string(),
            e.name.clone(),
            grouped(e.population),
            e.seats.to_string(),
            format_grouped(&e.ratio_before, 1),
            e.ratio_after.as_ref().map_or("-".into(), |r| format_grouped(r, 1)),
        ];
        if with_now {
            match report.status_quo.get(&e.name) {
                Some(&now) => {
                    row.push(now.to_string());
                    row.push(format!("{:+}", e.seats as i64 - now as i64));
                }
                None => {
                    row.push("-".into());
                    row.push("new".into());
                }
            }
        }
        row.push(notes.join(" "));
        rows.push(row);
    }
    let mut total = vec![
        String::new(),
        "Total".into(),
        grouped(allocation.entries.iter().map(|e| e.population).sum()),
        allocation.total_seats.to_string(),
        String::new(),
        String::new(),
    ];
    if with_now {
        let now: u64 = report.status_quo.values().sum();
        total.push(now.to_string());
        total.push(format!("{:+}", allocation.total_seats as i64 - now as i64));
    }
    total.push(String::new());

    let mut header = vec!["Rank", "State", "Population", "Seats", "Pop/seat before", "Pop/seat after"];
    if with_now {
        header.extend(["Now", "Change"]);
    }
    header.push("");
    let widths: Vec<usize> = (0..header.len())
        .map(|c| {
            rows.iter()
                .chain(std::iter::once(&total))
                .map(|r| r[c].chars().count())
                .chain(std::iter::once(header[c].chars().count()))
                .max()
                .unwrap_or(0)
        })
        .collect();
    // State and notes are left-aligned, numbers right-aligned.
    let line = |cells: &[String]| -> String {
        let mut out = String::new();
        for (c, cell) in cells.iter().enumerate() {
            if c > 0 {
                out.push_str("  ");
            }
            let pad = widths[c] - cell.chars().count();
            if c == 1 || c == cells.len() - 1 {
                out.push_str(cell);
                out.push_str(&" ".repeat(pad));
            } else {
                out.push_str(&" ".repeat(pad));
                out.push_str(cell);
            }
        }
        out.trim_end().to_string()
    };

    let mut out = String::new();
    let p = &report.params;
    let _ = writeln!(out, "{}", report.source_label);
    if !report.snapshot_date.is_empty() {
        let _ = writeln!(out, "Population snapshot: {}", report.snapshot_date);
    }
    let _ = writeln!(
        out,
        "Base {}, maximum {}, house size {}, rounding {}",
        describe_base(report),
        p.max_cap.map_or("none".into(), |m| m.to_string()),
        p.house_size,
        p.rounding.as_str(),
    );
    if let Target::Divisor(d) = &report.target {
        let _ = writeln!(out, "Fixed divisor {} (house size emergent)", format_grouped(d, 0));
    }
    if let Some(outcome) = &report.scheme {
        let name = match outcome.scheme {
            SchemeChoice::A { .. } => "A",
            SchemeChoice::B => "B",
        };
        let minimum = outcome.minimum.map_or(String::new(), |m| format!(", minimum {m}"));
        let _ = writeln!(out, "Scheme {name} for {} states{minimum}: base {}", outcome.states, outcome.base);
    }
    out.push('\n');
    let header: Vec<String> = header.iter().map(|h| h.to_string()).collect();
    let _ = writeln!(out, "{}", line(&header));
    let rule: usize = widths.iter().sum::<usize>() + 2 * (widths.len() - 1);
    let _ = writeln!(out, "{}", "-".repeat(rule));
    for row in &rows {
        let _ = writeln!(out, "{}", line(row));
    }
    let _ = writeln!(out, "{}", "-".repeat(rule));
    let _ = writeln!(out, "{}", line(&total));
    out.push('\n');
    let _ = writeln!(out, "Ratios are population per seat at divisor {}.", format_grouped(&allocation.divisor, 1));
    let _ = writeln!(out, "Divisor interval: {}", interval_text(&allocation.divisor_interval));
    let _ = writeln!(out, "Feasible house sizes: {}", report.feasible_range);
    let _ = writeln!(
        out,
        "Method: {}, ties: {}",
        method_name(report.method),
        tie_policy_name(report.tie_policy)
    );
    if let Some(tie) = &allocation.resolved_tie {
        let _ = writeln!(out, "Tie resolved: {tie}");
    }
    if !violators.is_empty() {
        let _ = writeln!(
            out,
            "dp* = more people per seat than a less populous state after rounding: {}",
            violators.join(", ")
        );
    }

    if report.check_dp {
        out.push('\n');
        let _ = writeln!(out, "Degressive proportionality");
        let status = |list: &[Inversion]| {
            if list.is_empty() {
                "satisfied".to_string()
            } else {
                list.iter()
                    .map(|i| format!("{} < {}", i.larger, i.smaller))
                    .collect::<Vec<_>>()
                    .join(", ")
            }
        };
        let _ = writeln!(out, "  More populous states never get fewer seats: {}", status(&report.dp.condition1_violations));
        let _ = writeln!(out, "  Population per seat rises with population before rounding: {}", status(&report.dp.pre_rounding_violations));
        let _ = writeln!(
            out,
            "  Revised criterion: {}",
            if report.dp.satisfies_revised_dp { "satisfied" } else { "violated" }
        );
        let _ = writeln!(
            out,
            "  Inversions after rounding: {}",
            if violators.is_empty() { "none".into() } else { violators.join(", ") }
        );
    }

    if let Some(delta) = &report.accession {
        out.push('\n');
        let _ = writeln!(
            out,
            "Accession of {} (interval before: {})",
            delta.joined.join(", "),
            delta.baseline.divisor_interval
        );
        if delta.changes.is_empty() {
            let _ = writeln!(out, "  No seat changes among existing states");
        }
        for c in &delta.changes {
            let _ = writeln!(out, "  {}: {} -> {} ({:+})", c.name, c.before, c.after, c.delta());
        }
        for name in &delta.joined {
            if let Some(seats) = allocation.seats_of(name) {
                let _ = writeln!(out, "  {name}: new, {seats} seats");
            }
        }
    }
    out
}
