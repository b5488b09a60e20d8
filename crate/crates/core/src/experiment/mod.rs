//! Sweep harness: configs, Monte Carlo δ sweeps, regression, CSV export and
//! diagnostics.

pub mod config;
pub mod diagnostics;
pub mod export;
pub mod instances;
pub mod regression;
pub mod sweep;

pub use config::{parse_config, ProblemSpec, SweepConfig};
pub use diagnostics::{diagnostics, DiagnosticsReport};
pub use export::{export_csv, read_episodes_csv, read_summary_csv};
pub use regression::regress_slope;
pub use sweep::{run_sweep, SweepOutput, SweepRow};
