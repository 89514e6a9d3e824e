use apportion::presets;
use apportion::{RoundingRule, Target};
use apportion_cli::config::{
    parse_accession, parse_base, parse_max_cap, parse_scheme_a_base, parse_tie_policy,
};
use apportion_cli::{
    parse_population_file, render, run_scenario, ErrorKind, Method, OutputFormat, PopulationDataset,
    RunError, ScenarioConfig, SchemeChoice,
};
use clap::{Args, Parser, Subcommand};
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

/// Exact base+prop divisor apportionment.
///
/// Exit codes: 0 success, 1 invalid arguments, 2 infeasible house size,
/// 3 tie, 4 unreadable population file.
#[derive(Debug, Parser)]
#[command(name = "apportion", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Allocate seats for a dataset.
    Allocate(Box<AllocateArgs>),
    /// List the bundled datasets, or print one as CSV.
    Presets {
        /// Print this preset as a population file.
        id: Option<String>,
    },
    /// Serve the JSON API.
    Serve {
        #[arg(long, default_value = "127.0.0.1:8080")]
        bind: String,
    },
}

#[derive(Debug, Args)]
struct AllocateArgs {
    /// Bundled dataset: eu27, eu28 or eu29.
    #[arg(long, conflicts_with = "input", default_value = "eu27")]
    preset: String,
    /// Population CSV with header name,population[,now_seats]; `-` reads stdin.
    #[arg(long, short)]
    input: Option<PathBuf>,
    /// Seats every state receives before the proportional share, e.g. 5 or 5.5.
    #[arg(long, default_value = "5", value_parser = parse_base)]
    base: apportion::Rational,
    /// Seat cap per state, or `none`.
    #[arg(long = "max", default_value = "96", value_parser = parse_cap)]
    max_cap: Cap,
    #[arg(long, conflicts_with = "divisor")]
    house: Option<u64>,
    /// Evaluate at a fixed divisor; the house size follows from it.
    #[arg(long, value_parser = parse_base)]
    divisor: Option<apportion::Rational>,
    /// up, standard or down.
    #[arg(long, default_value = "up")]
    rounding: RoundingRule,
    /// divisor, sequential, or both (cross-checked).
    #[arg(long, default_value = "both")]
    method: Method,
    /// Add the degressive-proportionality section to the table.
    #[arg(long)]
    check_dp: bool,
    /// table, csv or json.
    #[arg(long, default_value = "table")]
    format: OutputFormat,
    /// fail, lexicographic or seed=<n>.
    #[arg(long, default_value = "fail", value_parser = parse_tie_policy)]
    tie_policy: apportion::TiePolicy,
    /// Accept bases that are not multiples of 1/2.
    #[arg(long)]
    allow_fractional_base: bool,
    /// Derive the base from a cap on the fraction of the house given as minimum, e.g. 1/4.
    #[arg(long, value_parser = parse_base, conflicts_with = "scheme_b")]
    scheme_a: Option<apportion::Rational>,
    /// Scheme A base rule: minimum-minus-one or smallest-fraction.
    #[arg(long, default_value = "minimum-minus-one", requires = "scheme_a")]
    scheme_a_base: String,
    /// Derive the base as 135 / number of states.
    #[arg(long)]
    scheme_b: bool,
    /// Add an acceding state, NAME=POPULATION; repeatable.
    #[arg(long = "accede", value_parser = parse_accession)]
    acceding: Vec<apportion::MemberState>,
}

/// `Option<u64>` would make clap treat the flag as optional.
#[derive(Debug, Clone, Copy)]
struct Cap(Option<u64>);

fn parse_cap(s: &str) -> Result<Cap, String> {
    parse_max_cap(s).map(Cap)
}

fn load_dataset(args: &AllocateArgs) -> Result<PopulationDataset, RunError> {
    match &args.input {
        None => presets::by_id(&args.preset)
            .map(|p| PopulationDataset::from_preset(&p))
            .ok_or_else(|| RunError::invalid(format!("unknown preset {:?}", args.preset))),
        Some(path) => {
            let bytes = if path.as_os_str() == "-" {
                let mut buf = Vec::new();
                std::io::Read::read_to_end(&mut std::io::stdin(), &mut buf)
                    .map_err(|e| RunError::new(ErrorKind::Parse, format!("stdin: {e}")))?;
                buf
            } else {
                std::fs::read(path)
                    .map_err(|e| RunError::new(ErrorKind::Parse, format!("{}: {e}", path.display())))?
            };
            let dataset = parse_population_file(&bytes).map_err(|e| RunError {
                message: format!("{}: {e}", path.display()),
                ..RunError::from(e)
            })?;
            Ok(dataset.with_label(path.display().to_string()))
        }
    }
}

fn config_of(args: &AllocateArgs) -> Result<ScenarioConfig, RunError> {
    let scheme = match (&args.scheme_a, args.scheme_b) {
        (Some(cap_fraction), _) => Some(SchemeChoice::A {
            cap_fraction: cap_fraction.clone(),
            base: parse_scheme_a_base(&args.scheme_a_base).map_err(RunError::invalid)?,
        }),
        (None, true) => Some(SchemeChoice::B),
        (None, false) => None,
    };
    Ok(ScenarioConfig {
        base: args.base.clone(),
        max_cap: args.max_cap.0,
        target: match &args.divisor {
            Some(d) => Target::Divisor(d.clone()),
            None => Target::House(args.house.unwrap_or(751)),
        },
        rounding: args.rounding,
        tie_policy: args.tie_policy,
        method: args.method,
        scheme,
        acceding: args.acceding.clone(),
        allow_fractional_base: args.allow_fractional_base,
        check_dp: args.check_dp,
    })
}

fn allocate(args: &AllocateArgs) -> Result<Vec<u8>, RunError> {
    let dataset = load_dataset(args)?;
    let config = config_of(args)?;
    let report = run_scenario(&config, &dataset)?;
    Ok(render(&report, args.format))
}

fn list_presets(id: Option<&str>) -> Result<Vec<u8>, RunError> {
    match id {
        Some(id) => presets::by_id(id)
            .map(|p| PopulationDataset::from_preset(&p).to_csv().into_bytes())
            .ok_or_else(|| RunError::invalid(format!("unknown preset {id:?}"))),
        None => Ok(presets::all()
            .iter()
            .map(|p| format!("{:<6} {} ({} states)\n", p.id, p.label, p.states.len()))
            .collect::<String>()
            .into_bytes()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // Keep 2..4 for solver outcomes.
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let output = match &cli.command {
        Command::Allocate(args) => allocate(args),
        Command::Presets { id } => list_presets(id.as_deref()),
        Command::Serve { bind } => {
            let runtime = tokio::runtime::Runtime::new().expect("tokio runtime");
            return match runtime.block_on(apportion_cli::server::serve(bind)) {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => {
                    eprintln!("apportion: {e}");
                    ExitCode::from(1)
                }
            };
        }
    };
    match output {
        Ok(bytes) => {
            let mut stdout = std::io::stdout().lock();
            if stdout.write_all(&bytes).and_then(|()| stdout.flush()).is_err() {
                return ExitCode::from(1);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("apportion: {e}");
            if !e.details.is_null() {
                eprintln!("{}", e.details);
            }
            ExitCode::from(e.kind.exit_code())
        }
    }
}
