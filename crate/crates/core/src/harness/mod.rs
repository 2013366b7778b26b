//! Experiment orchestration: configuration, ε-sweeps, fits and reports.

pub mod config;
pub mod fit;
pub mod report;
pub mod sweep;

pub use config::{parse_key_values, parse_weight, SweepConfig};
pub use fit::{fit_power_law, PowerFit, MAX_RESIDUAL, MIN_FIT_POINTS};
pub use report::{emit_report, fit_svg, report_tables, write_resolved_config, ReportFormat, Table};
pub use sweep::{
    acoustic_rate, convergence_report, lifespan_curve, lifespan_probe, predicted_lifespan, reference_options,
    run_sweep, run_sweep_with, simulation_options, sweep_data, triple_log, ConvergenceRow, ConvergenceTable,
    EpsilonSummary, LifespanEntry, NamedFit, SweepReport,
};
