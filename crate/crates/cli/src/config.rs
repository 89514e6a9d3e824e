//! Scenario configuration shared by the command line and the service.

use apportion::rational::{frac, int, parse_rational, Rational};
use apportion::schemes::SchemeABase;
use apportion::{MemberState, RoundingRule, Target, TiePolicy};
use std::str::FromStr;

/// Which solver(s) to run. `Both` cross-checks the divisor and sequential
/// formulations and fails if they disagree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Method {
    Divisor,
    Sequential,
    #[default]
    Both,
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "divisor" => Ok(Method::Divisor),
            "sequential" => Ok(Method::Sequential),
            "both" => Ok(Method::Both),
            other => Err(format!("unknown method {other:?} (divisor, sequential, both)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Table,
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "table" => Ok(OutputFormat::Table),
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(format!("unknown format {other:?} (table, csv, json)")),
        }
    }
}

/// Derives the base from the size of the union instead of taking it as given.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SchemeChoice {
    /// Cap the fraction of the house handed out as the minimum.
    A {
        cap_fraction: Rational,
        base: SchemeABase,
    },
    /// `base = 135 / n`.
    B,
}

/// `fail`, `lexicographic` or `seed=<n>`.
pub fn parse_tie_policy(s: &str) -> Result<TiePolicy, String> {
    match s.to_ascii_lowercase().as_str() {
        "fail" => Ok(TiePolicy::Fail),
        "lexicographic" => Ok(TiePolicy::Lexicographic),
        other => other
            .strip_prefix("seed=")
            .and_then(|n| n.parse().ok())
            .map(TiePolicy::Seeded)
            .ok_or_else(|| format!("unknown tie policy {s:?} (fail, lexicographic, seed=<n>)")),
    }
}

pub fn tie_policy_name(policy: TiePolicy) -> String {
    match policy {
        TiePolicy::Fail => "fail".into(),
        TiePolicy::Lexicographic => "lexicographic".into(),
        TiePolicy::Seeded(seed) => format!("seed={seed}"),
    }
}

/// `none`, `inf` or a positive integer.
pub fn parse_max_cap(s: &str) -> Result<Option<u64>, String> {
    match s.to_ascii_lowercase().as_str() {
        "none" | "inf" | "infinity" | "uncapped" => Ok(None),
        n => n
            .parse::<u64>()
            .ok()
            .filter(|&m| m > 0)
            .map(Some)
            .ok_or_else(|| format!("invalid maximum {s:?}")),
    }
}

pub fn parse_base(s: &str) -> Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

/// `NAME=POPULATION`.
pub fn parse_accession(s: &str) -> Result<MemberState, String> {
    let (name, population) = s
        .rsplit_once('=')
        .ok_or_else(|| format!("expected NAME=POPULATION, found {s:?}"))?;
    let population: u64 = population
        .chars()
        .filter(|c| !matches!(c, ',' | '_'))
        .collect::<String>()
        .parse()
        .map_err(|_| format!("invalid population in {s:?}"))?;
    MemberState::new(name.trim(), population).map_err(|e| e.to_string())
}

/// `minimum-minus-one` or `smallest-fraction`.
pub fn parse_scheme_a_base(s: &str) -> Result<SchemeABase, String> {
    match s.to_ascii_lowercase().as_str() {
        "minimum-minus-one" | "m-1" => Ok(SchemeABase::MinimumMinusOne),
        "smallest-fraction" => Ok(SchemeABase::SmallestFraction {
            granularity: frac(1, 1000),
        }),
        other => Err(format!(
            "unknown scheme A base rule {other:?} (minimum-minus-one, smallest-fraction)"
        )),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScenarioConfig {
    pub base: Rational,
    pub max_cap: Option<u64>,
    /// Fixed house size, or a fixed divisor with the house size emergent.
    pub target: Target,
    pub rounding: RoundingRule,
    pub tie_policy: TiePolicy,
    pub method: Method,
    pub scheme: Option<SchemeChoice>,
    /// States joining the dataset; the report then carries a delta against
    /// the dataset alone.
    pub acceding: Vec<MemberState>,
    /// Accept bases that are not multiples of one half.
    pub allow_fractional_base: bool,
    /// Include the degressive-proportionality section in table output.
    pub check_dp: bool,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            base: int(5),
            max_cap: Some(96),
            target: Target::House(751),
            rounding: RoundingRule::Up,
            tie_policy: TiePolicy::Fail,
            method: Method::Both,
            scheme: None,
            acceding: Vec::new(),
            allow_fractional_base: false,
            check_dp: false,
        }
    }
}
