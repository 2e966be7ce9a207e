//! Lower-bound instance generators and their checks.

mod girth;
mod hypercube;
mod lattice;

pub use girth::{star_append, truncated_girth_metric, TruncatedMetric, UnweightedGraph};
pub use hypercube::{hypercube_pm1_sequence, HYPERCUBE_ATTEMPT_BUDGET};
pub use lattice::{
    ceil_inverse, l1_lattice_sequence, manhattan_network, ordered_pair_weight, ordered_pairs,
    verify_no_via_path, OrderedPair, ScheduledSequence, ViaPathReport,
};
