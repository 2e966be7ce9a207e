//! Exact stretch, lightness and sparsity verification.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SpannerError};
use crate::graph::SpannerGraph;
use crate::metric::{mst_weight, Metric, REL_TOL};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StretchReport {
    pub max_stretch: f64,
    /// Pair attaining the maximum, `None` when no pair has positive distance.
    pub witness: Option<(usize, usize)>,
    pub connected: bool,
}

impl StretchReport {
    fn trivial() -> Self {
        Self {
            max_stretch: 1.0,
            witness: None,
            connected: true,
        }
    }

    /// True when the measured stretch is at most `bound` up to [`REL_TOL`].
    pub fn within(&self, bound: f64) -> bool {
        self.max_stretch <= bound * (1.0 + REL_TOL)
    }

    fn merge(self, other: Self) -> Self {
        let connected = self.connected && other.connected;
        let take_other = if other.max_stretch != self.max_stretch {
            other.max_stretch > self.max_stretch
        } else {
            match (self.witness, other.witness) {
                (None, Some(_)) => true,
                (Some(a), Some(b)) => b < a,
                _ => false,
            }
        };
        let mut best = if take_other { other } else { self };
        best.connected = connected;
        best
    }
}

/// Stretch over pairs `(source, j)` for `j` in `targets`, using distances `dg` from `source`.
fn stretch_row<M: Metric + ?Sized>(
    m: &M,
    source: usize,
    dg: &[f64],
    targets: impl Iterator<Item = usize>,
) -> StretchReport {
    let mut rep = StretchReport::trivial();
    for j in targets {
        if j == source {
            continue;
        }
        let d = m.dist(source, j);
        let pair = (source.min(j), source.max(j));
        if dg[j].is_infinite() {
            if rep.connected {
                rep.witness = Some(pair);
            }
            rep.connected = false;
            rep.max_stretch = f64::INFINITY;
            continue;
        }
        if d <= 0.0 || !rep.connected {
            continue;
        }
        let s = dg[j] / d;
        if s > rep.max_stretch || (rep.witness.is_none() && s >= rep.max_stretch) {
            rep.max_stretch = s;
            rep.witness = Some(pair);
        }
    }
    rep
}

/// Maximum of `d_G(i, j) / d(i, j)` over all pairs with positive distance.
///
/// All-source Dijkstra, parallel over sources. A disconnected graph reports
/// `connected = false` and infinite stretch.
pub fn max_stretch<M: Metric + Sync + ?Sized>(g: &SpannerGraph, m: &M) -> StretchReport {
    let n = m.len();
    assert_eq!(g.vertex_count(), n, "graph and metric sizes differ");
    (0..n)
        .into_par_iter()
        .map(|i| {
            let dg = g.shortest_path_distances(i);
            stretch_row(m, i, &dg, i + 1..n)
        })
        .reduce(StretchReport::trivial, StretchReport::merge)
}

/// Stretch of the pairs `(k, j)`, `j < k`, i.e. those created when point `k` arrived.
pub fn stretch_of_new_point<M: Metric + ?Sized>(g: &SpannerGraph, m: &M, k: usize) -> StretchReport {
    let dg = g.shortest_path_distances(k);
    stretch_row(m, k, &dg, 0..k)
}

/// Tracks the stretch of every prefix of an online run.
///
/// Edges are never removed and old distances never change, so a pair checked
/// when its later endpoint arrives can only get better afterwards. Checking
/// each new point against its predecessors therefore bounds every prefix.
#[derive(Clone, Debug)]
pub struct PrefixVerifier {
    bound: f64,
    worst: StretchReport,
    checked: usize,
    first_violation: Option<(usize, StretchReport)>,
}

impl PrefixVerifier {
    pub fn new(bound: f64) -> Self {
        Self {
            bound,
            worst: StretchReport::trivial(),
            checked: 0,
            first_violation: None,
        }
    }

    /// Checks the point that just arrived (index `checked`).
    pub fn observe<M: Metric + ?Sized>(&mut self, g: &SpannerGraph, m: &M) -> StretchReport {
        let k = self.checked;
        let rep = stretch_of_new_point(g, m, k);
        self.checked += 1;
        if self.first_violation.is_none() && !rep.within(self.bound) {
            self.first_violation = Some((k, rep));
        }
        self.worst = self.worst.merge(rep);
        rep
    }

    pub fn worst(&self) -> StretchReport {
        self.worst
    }

    pub fn prefixes_checked(&self) -> usize {
        self.checked
    }

    /// Prefix length and report of the first violation, if any.
    pub fn first_violation(&self) -> Option<(usize, StretchReport)> {
        self.first_violation
    }

    pub fn bound(&self) -> f64 {
        self.bound
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Baseline {
    pub name: String,
    pub weight: f64,
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub n: usize,
    pub total_weight: f64,
    pub mst_weight: f64,
    pub lightness: f64,
    pub edge_count: usize,
    pub sparsity: f64,
    pub baselines: Vec<Baseline>,
}

/// `a / b`, with `0 / 0 = 1`.
pub fn ratio(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        if a == 0.0 {
            1.0
        } else {
            f64::INFINITY
        }
    } else {
        a / b
    }
}

/// Weight, lightness, sparsity and the ratio against each named baseline weight.
pub fn metrics_report<M: Metric + ?Sized>(
    g: &SpannerGraph,
    m: &M,
    baselines: &[(&str, f64)],
) -> Result<MetricsReport> {
    let n = m.len();
    assert_eq!(g.vertex_count(), n, "graph and metric sizes differ");
    if !g.is_connected() {
        return Err(SpannerError::Disconnected);
    }
    let total_weight = g.total_weight();
    let mst = mst_weight(m);
    let edge_count = g.edge_count();
    let sparsity = if n < 2 { 1.0 } else { edge_count as f64 / (n - 1) as f64 };
    Ok(MetricsReport {
        n,
        total_weight,
        mst_weight: mst,
        lightness: ratio(total_weight, mst),
        edge_count,
        sparsity,
        baselines: baselines
            .iter()
            .map(|&(name, weight)| Baseline {
                name: name.to_string(),
                weight,
                ratio: ratio(total_weight, weight),
            })
            .collect(),
    })
}
