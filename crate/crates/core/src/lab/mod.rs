//! Experiment configuration, runners and reports.

mod config;
mod experiments;
mod report;

pub use config::{default_n_list, Experiment, ExperimentConfig, KEYS};
pub use experiments::{
    fit_constant, run, run_bound_table, run_clt, run_harper, run_voronovskaja, BoundTable, BoundTableRow, Outcome,
    BOUND_TABLE_HEADER, C_STAR_WINDOW, MAX_SQRT_N_RATIO, SLOPE_WINDOW,
};
pub use report::{fit_slope, sqrt_n_ratio, Gate, RateReport, ReportRow, SlopeFit, CSV_HEADER, MAX_RELATIVE_WIDTH};
