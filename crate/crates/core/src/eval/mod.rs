//! Offline baselines, algorithm runs and benchmark tables.

mod experiment;
mod offline;
mod run;

pub use experiment::{
    expand_sweep, read_rows, rows_to_csv, run_experiment, shuffle_order, sweep, write_rows, BaselineKind, BenchRow,
    BuiltInstance, ExperimentSpec, InstanceSpec, SweepSpec, BENCH_COLUMNS, CSV_VERSION_LINE, DEFAULT_PREFIX_CAP,
    STATUS_OK, STATUS_VIOLATION,
};
pub use offline::offline_greedy;
pub use run::{run_online, AlgorithmSpec, Cadence, RunOutcome};
