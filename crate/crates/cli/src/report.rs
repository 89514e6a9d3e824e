//! Runs a scenario against a dataset and collects everything the renderers
//! need.

use crate::config::{Method, ScenarioConfig, SchemeChoice};
use crate::dataset::{ParseError, PopulationDataset};
use crate::render::{range_json, rational_json};
use apportion::rational::{int, Rational};
use apportion::schemes::{scenario_delta, scheme_a_base, scheme_a_minimum, scheme_b_base, SchemeAConfig, ScenarioDelta};
use apportion::{
    allocate, dp_report, feasible_house_range, sequential_allocate_with, validate_states, Allocation,
    ApportionError, ApportionmentParams, DpReport, HouseRange, MemberState, Target,
    TiePolicy,
};
use serde_json::{json, Value};
use std::collections::BTreeMap;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Infeasible,
    Tie,
    Parse,
    Invalid,
    Internal,
}

impl ErrorKind {
    pub fn code(self) -> &'static str {
        match self {
            ErrorKind::Infeasible => "INFEASIBLE",
            ErrorKind::Tie => "TIE",
            ErrorKind::Parse => "PARSE",
            ErrorKind::Invalid => "INVALID",
            ErrorKind::Internal => "INTERNAL",
        }
    }

    /// Process exit status for the command line.
    pub fn exit_code(self) -> u8 {
        match self {
            ErrorKind::Infeasible => 2,
            ErrorKind::Tie => 3,
            ErrorKind::Parse => 4,
            ErrorKind::Invalid | ErrorKind::Internal => 1,
        }
    }
}

/// A failed run: a coarse kind, a human-readable message and structured
/// details (tied states, feasible range, offending line).
#[derive(Debug, Clone, PartialEq)]
pub struct RunError {
    pub kind: ErrorKind,
    pub message: String,
    pub details: Value,
}

impl RunError {
    pub fn new(kind: ErrorKind, message: impl Into<String>) -> Self {
        RunError {
            kind,
            message: message.into(),
            details: Value::Null,
        }
    }

    pub fn invalid(message: impl Into<String>) -> Self {
        RunError::new(ErrorKind::Invalid, message)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "error": {
                "code": self.kind.code(),
                "message": self.message,
                "details": self.details,
            }
        })
    }
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.kind.code(), self.message)
    }
}

impl std::error::Error for RunError {}

impl From<ApportionError> for RunError {
    fn from(e: ApportionError) -> Self {
        let message = e.to_string();
        let (kind, details) = match &e {
            ApportionError::InvalidArgument(_) => (ErrorKind::Invalid, Value::Null),
            ApportionError::Infeasible { house_size, range } => (
                ErrorKind::Infeasible,
                json!({ "house_size": house_size, "feasible_range": range_json(range) }),
            ),
            ApportionError::Tie(report) => (
                ErrorKind::Tie,
                json!({
                    "tied_states": report.tied_states,
                    "boundary_divisor": rational_json(&report.boundary_divisor),
                    "seats_contested": report.seats_contested,
                }),
            ),
            ApportionError::BoundaryDivisor { divisor, states } => (
                ErrorKind::Tie,
                json!({
                    "tied_states": states,
                    "boundary_divisor": rational_json(divisor),
                }),
            ),
        };
        RunError {
            kind,
            message,
            details,
        }
    }
}

impl From<ParseError> for RunError {
    fn from(e: ParseError) -> Self {
        RunError {
            kind: ErrorKind::Parse,
            message: e.to_string(),
            details: json!({ "line": e.line }),
        }
    }
}

/// Base actually used when a scheme derives it from the union size.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchemeOutcome {
    pub scheme: SchemeChoice,
    pub states: u64,
    /// Guaranteed minimum, scheme A only.
    pub minimum: Option<u64>,
    pub base: Rational,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub source_label: String,
    pub snapshot_date: String,
    /// Parameters of the reported allocation. Under a fixed divisor the
    /// house size is the emergent total.
    pub params: ApportionmentParams,
    pub target: Target,
    pub method: Method,
    pub tie_policy: TiePolicy,
    pub allocation: Allocation,
    pub feasible_range: HouseRange,
    pub dp: DpReport,
    pub check_dp: bool,
    /// Seats held today, for states that have them.
    pub status_quo: BTreeMap<String, u64>,
    /// Present when states accede: the dataset alone versus the enlarged union.
    pub accession: Option<ScenarioDelta>,
    pub scheme: Option<SchemeOutcome>,
}

impl Report {
    pub fn has_status_quo(&self) -> bool {
        self.allocation
            .entries
            .iter()
            .any(|e| self.status_quo.contains_key(&e.name))
    }
}

fn check_base(config: &ScenarioConfig) -> Result<(), RunError> {
    if config.scheme.is_none()
        && !config.allow_fractional_base
        && !(&config.base * int(2)).is_integer()
    {
        return Err(RunError::invalid(format!(
            "base {} is not a multiple of 1/2 (pass --allow-fractional-base to accept it)",
            config.base
        )));
    }
    Ok(())
}

/// Parameters for one state set, with the base derived by the scheme if any.
fn resolve_params(
    states: &[MemberState],
    config: &ScenarioConfig,
) -> Result<(ApportionmentParams, Option<SchemeOutcome>), RunError> {
    let house_size = match config.target {
        Target::House(h) => h,
        // replaced by the emergent total once evaluated
        Target::Divisor(_) => 1,
    };
    let mut params = ApportionmentParams {
        base: config.base.clone(),
        max_cap: config.max_cap,
        house_size,
        rounding: config.rounding,
    };
    let n = states.len() as u64;
    let outcome = match &config.scheme {
        None => None,
        Some(SchemeChoice::B) => {
            params.base = scheme_b_base(n)?;
            Some(SchemeOutcome {
                scheme: SchemeChoice::B,
                states: n,
                minimum: None,
                base: params.base.clone(),
            })
        }
        Some(scheme @ SchemeChoice::A { cap_fraction, base }) => {
            let Target::House(h) = config.target else {
                return Err(RunError::invalid("scheme A needs a fixed house size"));
            };
            let minimum = scheme_a_minimum(n, &SchemeAConfig::new(cap_fraction.clone(), h)?)?;
            params.base = scheme_a_base(states, minimum, base, &params)?;
            params.rounding = apportion::RoundingRule::Up;
            Some(SchemeOutcome {
                scheme: scheme.clone(),
                states: n,
                minimum: Some(minimum),
                base: params.base.clone(),
            })
        }
    };
    params.validate()?;
    Ok((params, outcome))
}

/// Allocates one state set with the configured method(s). Returns the
/// parameters with the house size filled in.
fn run_method(
    states: &[MemberState],
    params: &ApportionmentParams,
    config: &ScenarioConfig,
) -> Result<(Allocation, ApportionmentParams), RunError> {
    let policy = config.tie_policy;
    match (&config.target, config.method) {
        (Target::Divisor(_), Method::Sequential) => Err(RunError::invalid(
            "the sequential method needs a house size, not a divisor",
        )),
        (Target::Divisor(d), method) => {
            let allocation = allocate(states, params, &Target::Divisor(d.clone()), policy)?;
            let params = params.with_house(allocation.total_seats.max(1));
            if method == Method::Both {
                let (sequential, _) = sequential_allocate_with(states, &params, policy)?;
                agree(&allocation, &sequential, false)?;
            }
            Ok((allocation, params))
        }
        (Target::House(_), Method::Divisor) => {
            Ok((allocate(states, params, &config.target, policy)?, params.clone()))
        }
        (Target::House(_), Method::Sequential) => {
            Ok((sequential_allocate_with(states, params, policy)?.0, params.clone()))
        }
        (Target::House(_), Method::Both) => {
            let divisor = allocate(states, params, &config.target, policy)?;
            let (sequential, _) = sequential_allocate_with(states, params, policy)?;
            agree(&divisor, &sequential, true)?;
            Ok((divisor, params.clone()))
        }
    }
}

fn agree(divisor: &Allocation, sequential: &Allocation, same_interval: bool) -> Result<(), RunError> {
    if divisor.seats() != sequential.seats()
        || (same_interval && divisor.divisor_interval != sequential.divisor_interval)
    {
        return Err(RunError {
            kind: ErrorKind::Internal,
            message: "divisor and sequential methods disagree".into(),
            details: json!({
                "divisor": divisor.seats(),
                "sequential": sequential.seats(),
            }),
        });
    }
    Ok(())
}

/// Acceding states are inserted in population order.
fn enlarge(states: &[MemberState], acceding: &[MemberState]) -> Vec<MemberState> {
    let mut combined = states.to_vec();
    for state in acceding {
        let at = combined
            .iter()
            .position(|s| s.population < state.population)
            .unwrap_or(combined.len());
        combined.insert(at, state.clone());
    }
    combined
}

pub fn run_scenario(config: &ScenarioConfig, dataset: &PopulationDataset) -> Result<Report, RunError> {
    check_base(config)?;
    validate_states(&dataset.states)?;
    if let Some(name) = dataset
        .status_quo_seats
        .keys()
        .find(|name| !dataset.states.iter().any(|s| &s.name == *name))
    {
        return Err(RunError::invalid(format!("status-quo seats for unknown state {name}")));
    }

    let states = enlarge(&dataset.states, &config.acceding);
    validate_states(&states)?;
    let (params, scheme) = resolve_params(&states, config)?;
    let (allocation, params) = run_method(&states, &params, config)?;

    let accession = if config.acceding.is_empty() {
        None
    } else {
        let (baseline_params, _) = resolve_params(&dataset.states, config)?;
        let (baseline, _) = run_method(&dataset.states, &baseline_params, config)?;
        Some(scenario_delta(baseline, allocation.clone()))
    };

    Ok(Report {
        source_label: dataset.source_label.clone(),
        snapshot_date: dataset.snapshot_date.clone(),
        feasible_range: feasible_house_range(states.len(), &params),
        dp: dp_report(&allocation),
        params,
        target: config.target.clone(),
        method: config.method,
        tie_policy: config.tie_policy,
        allocation,
        check_dp: config.check_dp,
        status_quo: dataset.status_quo_seats.clone(),
        accession,
        scheme,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use apportion::presets;
    use apportion::rational::frac;
    use apportion::schemes::SchemeABase;

    fn eu27() -> PopulationDataset {
        PopulationDataset::from_preset(&presets::eu27())
    }

    #[test]
    fn default_config_reproduces_the_status_quo() {
        let report = run_scenario(&ScenarioConfig::default(), &eu27()).unwrap();
        assert_eq!(report.allocation.total_seats, 751);
        assert_eq!(report.allocation.seats_of("Germany"), Some(96));
        assert_eq!(report.allocation.seats_of("Malta"), Some(6));
        assert!(report.has_status_quo());
        assert_eq!(report.dp.post_rounding_violations, vec!["France", "Belgium"]);
    }

    #[test]
    fn small_house_is_infeasible() {
        let config = ScenarioConfig {
            target: Target::House(100),
            ..ScenarioConfig::default()
        };
        let err = run_scenario(&config, &eu27()).unwrap_err();
        assert_eq!(err.kind, ErrorKind::Infeasible);
        assert_eq!(err.details["feasible_range"]["lo"], 162);
        assert_eq!(err.kind.exit_code(), 2);
    }

    #[test]
    fn equal_states_tie() {
        let dataset = PopulationDataset {
            states: vec![
                MemberState::new("A", 100).unwrap(),
                MemberState::new("B", 100).unwrap(),
            ],
            status_quo_seats: BTreeMap::new(),
            source_label: "test".into(),
            snapshot_date: String::new(),
        };
        let config = ScenarioConfig {
            base: int(0),
            max_cap: None,
            target: Target::House(3),
            ..ScenarioConfig::default()
        };
        let err = run_scenario(&config, &dataset).unwrap_err();
        assert_eq!(err.kind, ErrorKind::Tie);
        assert_eq!(err.details["tied_states"], json!(["A", "B"]));

        let resolved = ScenarioConfig {
            tie_policy: TiePolicy::Lexicographic,
            ..config
        };
        let report = run_scenario(&resolved, &dataset).unwrap();
        assert_eq!(report.allocation.seats(), vec![2, 1]);
    }

    #[test]
    fn fixed_divisor_gives_emergent_total() {
        let dataset = PopulationDataset::from_preset(&presets::eu29());
        let config = ScenarioConfig {
            target: Target::Divisor(int(844_000)),
            ..ScenarioConfig::default()
        };
        let report = run_scenario(&config, &dataset).unwrap();
        assert_eq!(report.allocation.total_seats, 751);
        assert_eq!(report.params.house_size, 751);
    }

    #[test]
    fn accession_delta() {
        let config = ScenarioConfig {
            acceding: vec![MemberState::new("Croatia", 4_425_747).unwrap()],
            ..ScenarioConfig::default()
        };
        let report = run_scenario(&config, &eu27()).unwrap();
        let delta = report.accession.unwrap();
        assert_eq!(delta.joined, vec!["Croatia"]);
        let france = delta.changes.iter().find(|c| c.name == "France").unwrap();
        assert_eq!((france.before, france.after), (85, 83));
    }

    #[test]
    fn fractional_base_needs_opt_in() {
        let config = ScenarioConfig {
            base: frac(1, 3),
            ..ScenarioConfig::default()
        };
        assert_eq!(run_scenario(&config, &eu27()).unwrap_err().kind, ErrorKind::Invalid);
        let config = ScenarioConfig {
            allow_fractional_base: true,
            ..config
        };
        assert!(run_scenario(&config, &eu27()).is_ok());
    }

    #[test]
    fn schemes_derive_the_base() {
        let config = ScenarioConfig {
            scheme: Some(SchemeChoice::B),
            ..ScenarioConfig::default()
        };
        let report = run_scenario(&config, &eu27()).unwrap();
        assert_eq!(report.params.base, int(5));

        let config = ScenarioConfig {
            scheme: Some(SchemeChoice::A {
                cap_fraction: frac(1, 4),
                base: SchemeABase::MinimumMinusOne,
            }),
            ..ScenarioConfig::default()
        };
        let report = run_scenario(&config, &eu27()).unwrap();
        let outcome = report.scheme.unwrap();
        assert_eq!(outcome.minimum, Some(6));
        assert_eq!(outcome.base, int(5));
    }

    #[test]
    fn sequential_cannot_take_a_divisor() {
        let config = ScenarioConfig {
            target: Target::Divisor(int(819_000)),
            method: Method::Sequential,
            ..ScenarioConfig::default()
        };
        assert_eq!(run_scenario(&config, &eu27()).unwrap_err().kind, ErrorKind::Invalid);
    }
}
