//! Append-only weighted spanner graph and shortest paths.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashSet};

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub w: f64,
}

/// Undirected weighted graph whose edges are only ever appended.
///
/// Edges keep their insertion order; an unordered pair is stored at most once.
#[derive(Clone, Debug, Default)]
pub struct SpannerGraph {
    adj: Vec<Vec<(usize, f64)>>,
    edges: Vec<Edge>,
    pairs: HashSet<(usize, usize)>,
    weight: f64,
}

fn key(u: usize, v: usize) -> (usize, usize) {
    if u < v {
        (u, v)
    } else {
        (v, u)
    }
}

impl SpannerGraph {
    pub fn new(vertices: usize) -> Self {
        Self {
            adj: vec![Vec::new(); vertices],
            ..Self::default()
        }
    }

    pub fn from_edges(vertices: usize, edges: impl IntoIterator<Item = Edge>) -> Self {
        let mut g = Self::new(vertices);
        for e in edges {
            g.add_edge(e.u, e.v, e.w);
        }
        g
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn total_weight(&self) -> f64 {
        self.weight
    }

    pub fn neighbors(&self, u: usize) -> &[(usize, f64)] {
        &self.adj[u]
    }

    pub fn add_vertex(&mut self) -> usize {
        self.adj.push(Vec::new());
        self.adj.len() - 1
    }

    /// Grows the vertex set to at least `n`.
    pub fn ensure_vertices(&mut self, n: usize) {
        if self.adj.len() < n {
            self.adj.resize(n, Vec::new());
        }
    }

    pub fn contains(&self, u: usize, v: usize) -> bool {
        self.pairs.contains(&key(u, v))
    }

    /// Adds `{u, v}` with weight `w`; returns false if the pair is already present.
    ///
    /// Panics on self-loops, out-of-range endpoints or negative/non-finite weights.
    pub fn add_edge(&mut self, u: usize, v: usize, w: f64) -> bool {
        assert!(u != v, "self-loop at {u}");
        assert!(
            u < self.adj.len() && v < self.adj.len(),
            "edge ({u}, {v}) outside {} vertices",
            self.adj.len()
        );
        assert!(w.is_finite() && w >= 0.0, "bad edge weight {w}");
        if !self.pairs.insert(key(u, v)) {
            return false;
        }
        self.adj[u].push((v, w));
        self.adj[v].push((u, w));
        self.edges.push(Edge { u, v, w });
        self.weight += w;
        true
    }

    /// Exact single-source distances; unreachable vertices are `+inf`.
    pub fn shortest_path_distances(&self, source: usize) -> Vec<f64> {
        let mut dist = vec![f64::INFINITY; self.adj.len()];
        self.dijkstra(source, f64::INFINITY, &mut dist, None);
        dist
    }

    /// Shortest-path distance from `u` to `v` if it is at most `cutoff`.
    ///
    /// Vertices farther than `cutoff` are never settled.
    pub fn distance_within(&self, u: usize, v: usize, cutoff: f64) -> Option<f64> {
        if u == v {
            return Some(0.0);
        }
        let mut dist = vec![f64::INFINITY; self.adj.len()];
        self.dijkstra(u, cutoff, &mut dist, Some(v))
    }

    fn dijkstra(
        &self,
        source: usize,
        cutoff: f64,
        dist: &mut [f64],
        target: Option<usize>,
    ) -> Option<f64> {
        let mut heap = BinaryHeap::new();
        dist[source] = 0.0;
        heap.push(State {
            cost: 0.0,
            node: source,
        });
        while let Some(State { cost, node }) = heap.pop() {
            if cost > dist[node] {
                continue;
            }
            if Some(node) == target {
                return Some(cost);
            }
            for &(next, w) in &self.adj[node] {
                let c = cost + w;
                if c <= cutoff && c < dist[next] {
                    dist[next] = c;
                    heap.push(State { cost: c, node: next });
                }
            }
        }
        None
    }

    /// Whether every vertex is reachable from vertex 0.
    pub fn is_connected(&self) -> bool {
        if self.adj.len() <= 1 {
            return true;
        }
        let mut seen = vec![false; self.adj.len()];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = stack.pop() {
            for &(v, _) in &self.adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    count += 1;
                    stack.push(v);
                }
            }
        }
        count == self.adj.len()
    }
}

#[derive(Copy, Clone, PartialEq)]
struct State {
    cost: f64,
    node: usize,
}

impl Eq for State {}

impl Ord for State {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .cost
            .total_cmp(&self.cost)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for State {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
