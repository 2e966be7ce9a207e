//! Ordered greedy online spanner for arbitrary finite metrics.
//!
//! When point `i` arrives with its distances to `0..i`, the candidate edges
//! are examined by increasing weight (ties by earlier endpoint) and `{j, i}`
//! is added iff the current spanner distance exceeds `t * d(i, j)`. Edges
//! added earlier in the same arrival count.

use crate::error::{Result, SpannerError};
use crate::graph::{Edge, SpannerGraph};
use crate::metric::{check_row_extension, Metric};

/// Lower-triangular metric revealed one row per arrival.
#[derive(Clone, Debug, Default)]
pub struct RevealedMetric {
    rows: Vec<Vec<f64>>,
}

impl RevealedMetric {
    pub fn push_row(&mut self, row: Vec<f64>) {
        assert_eq!(row.len(), self.rows.len());
        self.rows.push(row);
    }
}

impl Metric for RevealedMetric {
    fn len(&self) -> usize {
        self.rows.len()
    }

    #[inline]
    fn dist(&self, i: usize, j: usize) -> f64 {
        match i.cmp(&j) {
            std::cmp::Ordering::Greater => self.rows[i][j],
            std::cmp::Ordering::Less => self.rows[j][i],
            std::cmp::Ordering::Equal => 0.0,
        }
    }
}

/// One examined candidate edge.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AuditEntry {
    pub u: usize,
    pub v: usize,
    pub w: f64,
    /// Spanner distance at examination time, `None` if it exceeded `t * w`.
    pub spanner_distance: Option<f64>,
    pub added: bool,
}

#[derive(Clone, Debug)]
pub struct GreedyState {
    t: f64,
    metric: RevealedMetric,
    graph: SpannerGraph,
    audit: Vec<AuditEntry>,
    check_metric: bool,
}

impl GreedyState {
    pub fn new(t: f64) -> Result<Self> {
        if !(t > 1.0 && t.is_finite()) {
            return Err(SpannerError::InvalidParameter(format!("stretch t = {t} must exceed 1")));
        }
        Ok(Self {
            t,
            metric: RevealedMetric::default(),
            graph: SpannerGraph::new(0),
            audit: Vec::new(),
            check_metric: true,
        })
    }

    /// Disables the O(n^2)-per-arrival triangle check on revealed rows.
    pub fn without_metric_check(mut self) -> Self {
        self.check_metric = false;
        self
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn len(&self) -> usize {
        self.metric.len()
    }

    pub fn is_empty(&self) -> bool {
        self.metric.is_empty()
    }

    pub fn spanner(&self) -> &SpannerGraph {
        &self.graph
    }

    pub fn metric(&self) -> &RevealedMetric {
        &self.metric
    }

    pub fn audit(&self) -> &[AuditEntry] {
        &self.audit
    }

    /// Reveals the next point by its distances to all earlier points.
    pub fn insert(&mut self, distances_to_previous: &[f64]) -> Result<Vec<Edge>> {
        let i = self.metric.len();
        if distances_to_previous.len() != i {
            return Err(SpannerError::DimensionMismatch {
                expected: i,
                got: distances_to_previous.len(),
            });
        }
        if self.check_metric {
            check_row_extension(&self.metric, distances_to_previous)?;
        } else if let Some(d) = distances_to_previous.iter().find(|d| !(d.is_finite() && **d >= 0.0)) {
            return Err(SpannerError::MetricViolation(format!("bad distance {d}")));
        }
        self.metric.push_row(distances_to_previous.to_vec());
        self.graph.ensure_vertices(i + 1);

        let mut order: Vec<usize> = (0..i).collect();
        order.sort_by(|&a, &b| {
            distances_to_previous[a]
                .total_cmp(&distances_to_previous[b])
                .then(a.cmp(&b))
        });
        let mut added = Vec::new();
        for j in order {
            let w = distances_to_previous[j];
            let found = self.graph.distance_within(i, j, self.t * w);
            let add = found.is_none();
            if add {
                self.graph.add_edge(j, i, w);
                added.push(Edge { u: j, v: i, w });
            }
            self.audit.push(AuditEntry {
                u: j,
                v: i,
                w,
                spanner_distance: found,
                added: add,
            });
        }
        Ok(added)
    }

    /// Exact spanner distance between arrived points if it is at most `cutoff`.
    pub fn spanner_distance_query(&self, u: usize, v: usize, cutoff: f64) -> Option<f64> {
        self.graph.distance_within(u, v, cutoff)
    }
}

/// Runs the ordered greedy over `m`, revealing points in index order.
pub fn ordered_greedy<M: Metric + ?Sized>(m: &M, t: f64) -> Result<GreedyState> {
    let mut st = GreedyState::new(t)?;
    for i in 0..m.len() {
        st.insert(&m.row_to_previous(i))?;
    }
    Ok(st)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{uniform_metric, Norm, PointSequence};
    use crate::verify::max_stretch;

    #[test]
    fn uniform_small_t_is_complete() {
        let st = ordered_greedy(&uniform_metric(5, 1.0), 1.5).unwrap();
        assert_eq!(st.spanner().edge_count(), 10);
    }

    #[test]
    fn uniform_large_t_is_star() {
        let st = ordered_greedy(&uniform_metric(5, 1.0), 3.0).unwrap();
        assert_eq!(st.spanner().edge_count(), 4);
        assert!(st.spanner().edges().iter().all(|e| e.u == 0));
    }

    #[test]
    fn line_hand_trace() {
        let pts = PointSequence::from_points(1, Norm::L1, &[[0.0], [2.0], [1.0]]).unwrap();
        let st = ordered_greedy(&pts, 1.1).unwrap();
        let e: Vec<_> = st.spanner().edges().iter().map(|e| (e.u, e.v, e.w)).collect();
        assert_eq!(e, vec![(0, 1, 2.0), (0, 2, 1.0), (1, 2, 1.0)]);
        assert_eq!(st.spanner().total_weight(), 4.0);
    }

    #[test]
    fn rejects_bad_t_and_bad_rows() {
        assert!(GreedyState::new(1.0).is_err());
        assert!(GreedyState::new(0.5).is_err());
        let mut st = GreedyState::new(2.0).unwrap();
        st.insert(&[]).unwrap();
        st.insert(&[1.0]).unwrap();
        assert!(matches!(st.insert(&[1.0, 5.0]), Err(SpannerError::MetricViolation(_))));
        assert!(st.insert(&[1.0]).is_err());
        // State untouched by rejected rows.
        assert_eq!(st.len(), 2);
        st.insert(&[1.0, 1.5]).unwrap();
    }

    #[test]
    fn distance_queries() {
        let st = ordered_greedy(&uniform_metric(4, 1.0), 3.0).unwrap();
        assert_eq!(st.spanner_distance_query(0, 1, 10.0), Some(1.0));
        assert_eq!(st.spanner_distance_query(1, 2, 10.0), Some(2.0));
        assert_eq!(st.spanner_distance_query(1, 2, 1.5), None);
        let mut g = GreedyState::new(2.0).unwrap();
        g.insert(&[]).unwrap();
        assert!(g.spanner().vertex_count() == 1);
    }

    #[test]
    fn audit_is_consistent() {
        let pts = PointSequence::from_points(
            2,
            Norm::L2,
            &[[0.0, 0.0], [1.0, 0.2], [0.5, 0.9], [2.0, 2.0], [0.4, 0.1]],
        )
        .unwrap();
        let st = ordered_greedy(&pts, 1.3).unwrap();
        for a in st.audit() {
            assert_eq!(a.added, a.spanner_distance.is_none());
            if let Some(d) = a.spanner_distance {
                assert!(d <= 1.3 * a.w);
            }
        }
        assert!(max_stretch(st.spanner(), &pts).within(1.3));
    }
}
