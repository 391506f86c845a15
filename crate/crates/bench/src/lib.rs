//! Experiment harness for the routing game: the reference optimum, the
//! delay-case suites, metric CSVs, envelope slope fits and log-log plots.

pub mod cases;
pub mod error;
pub mod metrics;
pub mod oracle;
pub mod plot;
pub mod slope;

pub use cases::{desk_fixture, fig1_suite, fig2_suite, schedule_for, CaseSpec};
pub use error::{BenchError, Result};
pub use metrics::{read_csv, run_case, write_csv, MetricsRecord};
pub use oracle::{estimate_reference_optimum, ReferenceOptimum};
pub use plot::{emit_plot, Trace};
pub use slope::{fit_loglog_slope, running_minimum, MIN_FIT_POINTS};
