//! Scenario files, built-in scenarios, trajectory and summary artifacts, plot scripts.

mod builtins;
mod plot;
mod run;
mod scenario;
mod table;

pub use builtins::{builtin, builtin_scenarios, Builtin};
pub use plot::{emit_plot_script, plot_script};
pub use run::{
    exit_code, load_scenario, outcome_sequence, run, run_scenario, seeded_history, Artifacts, RunReport, METADATA_FILE,
    SUMMARY_FILE, TRAJECTORY_FILE,
};
pub use scenario::{Construction, DensitySpec, Mode, OutcomeSource, ProfileSpec, Scenario, Thresholds, DEFAULT_DEPTH};
pub use table::{num, Table};
