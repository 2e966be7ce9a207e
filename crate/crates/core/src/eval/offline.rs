use crate::error::{Result, SpannerError};
use crate::graph::SpannerGraph;
use crate::metric::Metric;

/// Classic greedy spanner: all pairs by increasing distance (ties by index
/// pair), each added iff the current spanner distance exceeds `t` times it.
pub fn offline_greedy<M: Metric + ?Sized>(m: &M, t: f64) -> Result<SpannerGraph> {
    if !(t > 1.0 && t.is_finite()) {
        return Err(SpannerError::InvalidParameter(format!("stretch t = {t} must exceed 1")));
    }
    let n = m.len();
    let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for j in 1..n {
        for i in 0..j {
            pairs.push((m.dist(i, j), i, j));
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut g = SpannerGraph::new(n);
    for (d, i, j) in pairs {
        if g.distance_within(i, j, t * d).is_none() {
            g.add_edge(i, j, d);
        }
    }
    Ok(g)
}
