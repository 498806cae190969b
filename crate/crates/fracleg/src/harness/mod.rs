//! Error measurement, convergence and decay tables, bound tightness and the
//! invariant suite.

mod measure;
mod tables;
mod verify;

pub use measure::{
    evaluation_grid, measure_errors, measure_errors_with, parseval_tail, reference_degree, reference_series,
    ErrorReport, ParsevalTail, CLUSTER_POINTS, GRID_POINTS, MAX_REFERENCE_DEGREE, TAIL_FRACTION,
};
pub use tables::{
    convergence_table, decay_table, error_reports, figure1_data, tightness_profile, write_figure1, write_file,
    write_profile, write_table1, write_table2, write_table3, write_tightness, ConvergenceRow, ConvergenceTable, Norm,
    TightnessRow, TwoNormBlock, PROFILE_POINTS,
};
pub use verify::{
    closed_vs_quadrature_gap, direct_l2_error, dominance_violations, model_variants, run_selected, run_verify,
    CheckResult, CoefficientGap, VerifyReport, ABSX_DEGREES, CHECKS, DOMINANCE_ROUNDING, RANDOM_SEED, TABLE_DEGREES,
};
