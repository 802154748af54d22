//! Scenario ingestion, execution, sweeps, and export.

pub mod config;
pub mod export;
pub mod rng;
pub mod scenario;
pub mod sweep;

pub use config::{builtin_config, load_config, load_config_path, MetricsSpec, ScenarioConfig};
pub use export::{export_report, export_sweep, ExportFormat};
pub use rng::{derive_seed, sample_qualities, seeded_rng};
pub use scenario::{dilution_table, run_scenario, DilutionRow, ScenarioReport, TargetCheck};
pub use sweep::{run_sweep, set_axis_value, SweepPoint, SweepSpec};
