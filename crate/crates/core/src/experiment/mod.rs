//! Config-driven experiment runs and parameter sweeps.

mod config;
mod run;
mod sweep;

pub use config::{ExperimentConfig, LearnerSpec, PropertiesConfig, ScheduleConfig, WStarKind, WStarSpec};
pub use run::{
    generate_dataset, run_experiment, training_data, Diagnostics, ExperimentReport, KearnsLiCounts,
    PolyCounts, PolyDiagnostics, ResolvedConstants, ResolvedSchedule, RunError,
};
pub use sweep::{run_sweep, write_sweep_csv, SweepCell, SweepOutcome, SweepPlan, SweepRow};
