//! Batch experiments: configuration, scenario setup, sweeps and result files.

pub mod config;
pub mod output;
pub mod setup;
pub mod sweep;

pub use config::{ResolvedConfig, ScenarioConfig};
pub use output::emit_outputs;
pub use setup::build_scenario;
pub use sweep::{run_sweep, AggregateRow, CellResult, ExperimentResult};
