//! Online spanners for finite metrics.
//!
//! Points arrive one at a time and edges are never removed. The crate has
//! three constructions (a grid-and-cone spanner for Euclidean points, the
//! ordered greedy rule for any metric, nearest-first trees for ultrametrics),
//! generators for adversarial inputs, and exact stretch verification.

pub mod adversary;
pub mod error;
pub mod eval;
pub mod graph;
pub mod greedy;
pub mod hst;
pub mod io;
pub mod metric;
pub mod verify;
pub mod yao;

pub use error::{Result, SpannerError};
pub use eval::{offline_greedy, run_online, AlgorithmSpec, BenchRow, Cadence, ExperimentSpec, InstanceSpec};
pub use graph::{Edge, SpannerGraph};
pub use greedy::{ordered_greedy, GreedyState};
pub use hst::{HstTree, MultiScaleState, NearestFirstTree};
pub use io::Instance;
pub use metric::{distance, mst_weight, validate_metric, DistanceMatrix, Metric, Norm, PointSequence};
pub use verify::{max_stretch, metrics_report, MetricsReport, PrefixVerifier, StretchReport};
pub use yao::{alg1, Alg1State};
