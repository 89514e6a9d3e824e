//! Command-line and HTTP front end for the `apportion` engine: population
//! CSV ingestion, scenario configuration, report rendering and a stateless
//! JSON service.

pub mod config;
pub mod dataset;
pub mod render;
pub mod report;
pub mod server;

pub use config::{Method, OutputFormat, ScenarioConfig, SchemeChoice};
pub use dataset::{parse_population_file, ParseError, PopulationDataset};
pub use render::render;
pub use report::{run_scenario, ErrorKind, Report, RunError};
