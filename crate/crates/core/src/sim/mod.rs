//! Sweep harness: configuration, seeded trials, CSV output, the power
//! oracle, timing and preset figures.

pub mod bench;
pub mod config;
pub mod figures;
pub mod oracle;
pub mod sweep;

pub use bench::{run_bench, write_bench, BenchRow};
pub use config::ScenarioConfig;
pub use figures::run_figures;
pub use oracle::{run_oracle, OracleConfig, OracleReport};
pub use sweep::{run_sweep, ResultRow, SummaryRow, SweepResult};
