//! Shortest-path metrics of unweighted graphs, truncated at `2k - 1`.

use std::collections::VecDeque;

use crate::error::{Result, SpannerError};
use crate::metric::{check_row_extension, DistanceMatrix, Metric};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnweightedGraph {
    adj: Vec<Vec<usize>>,
}

impl UnweightedGraph {
    /// Simple graph from an edge list; loops are rejected, repeated edges collapse.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u >= n || v >= n || u == v {
                return Err(SpannerError::Format(format!("bad edge ({u}, {v}) for {n} vertices")));
            }
            if !adj[u].contains(&v) {
                adj[u].push(v);
                adj[v].push(u);
            }
        }
        adj.iter_mut().for_each(|a| a.sort_unstable());
        Ok(Self { adj })
    }

    /// Hamiltonian cycle `0..n` plus chords `i -> i + pattern[i mod len]`.
    pub fn from_lcf(n: usize, pattern: &[i64]) -> Self {
        let mut edges: Vec<(usize, usize)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        for i in 0..n {
            let j = (i as i64 + pattern[i % pattern.len()]).rem_euclid(n as i64) as usize;
            edges.push((i, j));
        }
        Self::from_edges(n, &edges).expect("LCF edges are in range")
    }

    pub fn complete(n: usize) -> Self {
        let edges: Vec<_> = (0..n).flat_map(|i| ((i + 1)..n).map(move |j| (i, j))).collect();
        Self::from_edges(n, &edges).unwrap()
    }

    pub fn cycle(n: usize) -> Self {
        Self::from_lcf(n, &[1])
    }

    /// Girth 5, 10 vertices.
    pub fn petersen() -> Self {
        let mut edges = Vec::new();
        for i in 0..5 {
            edges.push((i, (i + 1) % 5));
            edges.push((i, i + 5));
            edges.push((5 + i, 5 + (i + 2) % 5));
        }
        Self::from_edges(10, &edges).unwrap()
    }

    /// Girth 6, 14 vertices.
    pub fn heawood() -> Self {
        Self::from_lcf(14, &[5, -5])
    }

    /// Girth 7, 24 vertices.
    pub fn mcgee() -> Self {
        Self::from_lcf(24, &[12, 7, -7])
    }

    pub fn named(name: &str) -> Option<Self> {
        match name.to_ascii_lowercase().as_str() {
            "petersen" => Some(Self::petersen()),
            "heawood" => Some(Self::heawood()),
            "mcgee" => Some(Self::mcgee()),
            _ => None,
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn neighbors(&self, u: usize) -> &[usize] {
        &self.adj[u]
    }

    /// Hop distances from `s`; `usize::MAX` when unreachable.
    pub fn bfs(&self, s: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.adj.len()];
        dist[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for &v in &self.adj[u] {
                if dist[v] == usize::MAX {
                    dist[v] = dist[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    /// Length of the shortest cycle, `None` for forests.
    pub fn girth(&self) -> Option<usize> {
        let n = self.adj.len();
        let mut best = usize::MAX;
        for s in 0..n {
            let mut dist = vec![usize::MAX; n];
            let mut parent = vec![usize::MAX; n];
            dist[s] = 0;
            let mut queue = VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                for &v in &self.adj[u] {
                    if dist[v] == usize::MAX {
                        dist[v] = dist[u] + 1;
                        parent[v] = u;
                        queue.push_back(v);
                    } else if parent[u] != v {
                        best = best.min(dist[u] + dist[v] + 1);
                    }
                }
            }
        }
        (best != usize::MAX).then_some(best)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedMetric {
    pub metric: DistanceMatrix,
    pub k: usize,
    pub girth: Option<usize>,
}

impl TruncatedMetric {
    /// Whether the girth reaches the recommended `2k + 2`.
    pub fn girth_sufficient(&self) -> bool {
        self.girth.is_none_or(|g| g >= 2 * self.k + 2)
    }
}

/// `d(u, v) = min(hops(u, v), 2k - 1)`.
pub fn truncated_girth_metric(g: &UnweightedGraph, k: usize) -> Result<TruncatedMetric> {
    if k == 0 {
        return Err(SpannerError::InvalidParameter("k must be at least 1".into()));
    }
    let n = g.vertex_count();
    let cap = (2 * k - 1) as f64;
    let hops: Vec<Vec<usize>> = (0..n).map(|s| g.bfs(s)).collect();
    if hops.iter().any(|row| row.contains(&usize::MAX)) {
        return Err(SpannerError::DisconnectedGraph);
    }
    let metric = DistanceMatrix::from_fn(n, |i, j| (hops[i][j] as f64).min(cap));
    let girth = g.girth();
    let out = TruncatedMetric { metric, k, girth };
    if !out.girth_sufficient() {
        log::warn!(
            "girth {:?} is below the recommended {} for k = {k}",
            out.girth,
            2 * k + 2
        );
    }
    Ok(out)
}

/// Appends a hub at distance `(2k - 1) / 2` from every point; it arrives last.
pub fn star_append<M: Metric + ?Sized>(m: &M, k: usize) -> Result<DistanceMatrix> {
    if k == 0 {
        return Err(SpannerError::InvalidParameter("k must be at least 1".into()));
    }
    let r = (2 * k - 1) as f64 / 2.0;
    let row = vec![r; m.len()];
    check_row_extension(m, &row)?;
    let mut out = DistanceMatrix::from_metric(m);
    out.push_row(&row);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{uniform_metric, validate_metric};

    #[test]
    fn named_girths() {
        let p = UnweightedGraph::petersen();
        assert_eq!((p.vertex_count(), p.edge_count(), p.girth()), (10, 15, Some(5)));
        let h = UnweightedGraph::heawood();
        assert_eq!((h.vertex_count(), h.edge_count(), h.girth()), (14, 21, Some(6)));
        let m = UnweightedGraph::mcgee();
        assert_eq!((m.vertex_count(), m.edge_count(), m.girth()), (24, 36, Some(7)));
        assert!((0..24).all(|u| m.neighbors(u).len() == 3));
        assert_eq!(UnweightedGraph::complete(4).girth(), Some(3));
    }

    #[test]
    fn heawood_k2_is_graph_metric() {
        let g = UnweightedGraph::heawood();
        let t = truncated_girth_metric(&g, 2).unwrap();
        assert!(t.girth_sufficient());
        for i in 0..14 {
            let hops = g.bfs(i);
            for j in 0..14 {
                assert_eq!(t.metric.dist(i, j), hops[j] as f64);
            }
        }
        assert!(validate_metric(&t.metric).is_empty());
    }

    #[test]
    fn complete_and_cycle() {
        let t = truncated_girth_metric(&UnweightedGraph::complete(4), 3).unwrap();
        assert_eq!(t.metric, uniform_metric(4, 1.0));
        let c = truncated_girth_metric(&UnweightedGraph::cycle(8), 2).unwrap();
        assert_eq!(c.metric.dist(0, 4), 3.0);
        assert_eq!(c.metric.dist(0, 2), 2.0);
        assert!(validate_metric(&c.metric).is_empty());
    }

    #[test]
    fn disconnected_rejected() {
        let g = UnweightedGraph::from_edges(4, &[(0, 1), (2, 3)]).unwrap();
        assert!(matches!(truncated_girth_metric(&g, 2), Err(SpannerError::DisconnectedGraph)));
        assert!(UnweightedGraph::from_edges(2, &[(0, 0)]).is_err());
    }

    #[test]
    fn star_extension() {
        let t = truncated_girth_metric(&UnweightedGraph::heawood(), 2).unwrap();
        let s = star_append(&t.metric, 2).unwrap();
        assert_eq!(s.len(), 15);
        assert!((0..14).all(|i| s.dist(14, i) == 1.5));
        assert!(validate_metric(&s).is_empty());
        let star_weight: f64 = (0..14).map(|i| s.dist(14, i)).sum();
        assert_eq!(star_weight, 1.5 * 14.0);
        // The shorter hub distance breaks the triangle inequality.
        assert!(check_row_extension(&t.metric, &[0.5; 14]).is_err());
    }
}
