//! Configs, input files, JSON reports and the subcommands of the `ncconvex` binary.
//!
//! Every command returns a [`Report`]; its [`Status`] maps to the exit code
//! (0 success, 1 mathematical negative, 3 inconclusive) and errors map through
//! [`error_exit_code`] (2 for bad input).

mod commands;
mod config;
mod report;
mod reproduce;

pub use commands::{
    cmd_eval, cmd_partial, cmd_xy, dom_plus_scan, eval_input, format_matrix, load_tuple, ButterflyData,
    ButterflyOutcome, DomPlusScan, EvalResult, Input, MxyScans, TermJson, WitnessOutcome, WorstPoint,
};
pub use config::{parse_sizes, AnalysisConfig};
pub use report::{error_exit_code, Report, Status};
pub use reproduce::{
    cmd_reproduce, intro_tuple, square_mxy_scans, square_partial, Check, EXAMPLE_IDS, INTRO_POLY, SQUARE_POLY,
    SQUARE_REGION,
};
