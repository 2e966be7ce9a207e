//! Online Euclidean spanner over a hierarchical grid with weight-capped ordered Yao graphs.
//!
//! Level `l` cells have side `2^-l`. Every nonempty cell has a representative,
//! the first point that landed in it. When a point becomes the representative
//! of a cell at level `l`, it is connected to the closest earlier level-`l`
//! representative in each cone, provided that edge is shorter than
//! `cap_factor * 2^-l * sqrt(d) / eps`.
//!
//! A point that arrives is first in its cell at every level from some `r(p)`
//! downward (finer), and at no coarser level; `r(p)` is fixed at arrival.
//! So the representative sequence of level `l` is exactly the points with
//! `r(p) <= l`, in arrival order, and the state only needs `r(p)` per point.
//! Levels coarser than the point set's stable orthant partition, or finer than
//! the weight cap allows for the new point, produce no new edges and are skipped.

use std::collections::HashMap;

use crate::error::{Result, SpannerError};
use crate::graph::SpannerGraph;
use crate::metric::{distance_unchecked, Metric, Norm, PointSequence};

use super::cones::{aperture_for_epsilon, build_cone_cover, ConeCover};
use super::grid::{shared_level, side, GridCellKey, SharedLevel, MAX_LEVEL};

/// Weight cap multiplier; configurable for experiments only.
pub const DEFAULT_CAP_FACTOR: f64 = 24.0;

/// Coarsest level at which a point is the representative of its cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum RepFrom {
    /// Representative at every level.
    Top,
    Level(i32),
    /// Coincides with an earlier point; never a representative.
    Never,
}

impl RepFrom {
    fn rank(self) -> i64 {
        match self {
            RepFrom::Top => i64::MIN,
            RepFrom::Level(l) => l as i64,
            RepFrom::Never => i64::MAX,
        }
    }
}

/// An edge as recorded at one level. `level` is `None` for the zero-length
/// edge that attaches a duplicate point to its earlier copy.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct LevelEdge {
    pub step: usize,
    pub level: Option<i32>,
    pub u: usize,
    pub v: usize,
    pub w: f64,
}

/// Representatives of one level.
#[derive(Clone, Debug, PartialEq)]
pub struct LevelState {
    pub level: i32,
    pub representatives: HashMap<GridCellKey, usize>,
    /// Representatives in order of assignment.
    pub order: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct Alg1State {
    eps: f64,
    cap_factor: f64,
    cap_scale: f64,
    cones: ConeCover,
    points: PointSequence,
    rep_from: Vec<RepFrom>,
    graph: SpannerGraph,
    /// Level at which each spanner edge was first added, aligned with `graph.edges()`.
    edge_levels: Vec<Option<i32>>,
    level_edges: usize,
    range: Option<(i32, i32)>,
}

impl Alg1State {
    pub fn new(dim: usize, eps: f64) -> Result<Self> {
        Self::with_cap_factor(dim, eps, DEFAULT_CAP_FACTOR)
    }

    pub fn with_cap_factor(dim: usize, eps: f64, cap_factor: f64) -> Result<Self> {
        if !(eps > 0.0 && eps < 1.0) {
            return Err(SpannerError::InvalidParameter(format!("eps {eps} outside (0, 1)")));
        }
        if !(cap_factor > 0.0 && cap_factor.is_finite()) {
            return Err(SpannerError::InvalidParameter(format!("cap factor {cap_factor}")));
        }
        let cones = build_cone_cover(dim, aperture_for_epsilon(dim, eps)?)?;
        Ok(Self {
            eps,
            cap_factor,
            cap_scale: cap_factor * (dim as f64).sqrt() / eps,
            cones,
            points: PointSequence::new(dim, Norm::L2)?,
            rep_from: Vec::new(),
            graph: SpannerGraph::new(0),
            edge_levels: Vec::new(),
            level_edges: 0,
            range: None,
        })
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn dim(&self) -> usize {
        self.points.dim()
    }

    pub fn cap_factor(&self) -> f64 {
        self.cap_factor
    }

    pub fn cones(&self) -> &ConeCover {
        &self.cones
    }

    pub fn points(&self) -> &PointSequence {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Edges at level `level` must be strictly shorter than this.
    pub fn cap(&self, level: i32) -> f64 {
        self.cap_scale * side(level)
    }

    /// Stretch the construction guarantees: `(1 + eps)^2`.
    pub fn stretch_bound(&self) -> f64 {
        (1.0 + self.eps) * (1.0 + self.eps)
    }

    /// Coarsest and finest level that have been examined so far.
    pub fn level_range(&self) -> Option<(i32, i32)> {
        self.range
    }

    /// The deduplicated union of all level graphs.
    pub fn spanner(&self) -> &SpannerGraph {
        &self.graph
    }

    /// Level at which the `i`-th spanner edge was first added.
    pub fn edge_level(&self, i: usize) -> Option<i32> {
        self.edge_levels[i]
    }

    /// Number of level edges recorded, counting a pair once per level.
    pub fn level_edge_count(&self) -> usize {
        self.level_edges
    }

    /// Finest level whose cap exceeds `x`.
    fn finest_level_above(&self, x: f64) -> i32 {
        let mut l = ((self.cap_scale / x).log2().ceil() as i32 - 1).clamp(-MAX_LEVEL, MAX_LEVEL);
        while l < MAX_LEVEL && self.cap(l + 1) > x {
            l += 1;
        }
        while l > -MAX_LEVEL && self.cap(l) <= x {
            l -= 1;
        }
        l
    }

    /// Inserts the next point and returns the level edges it created.
    pub fn insert(&mut self, p: &[f64]) -> Result<Vec<LevelEdge>> {
        let step = self.points.push(p)?;
        self.graph.ensure_vertices(step + 1);
        if step == 0 {
            self.rep_from.push(RepFrom::Top);
            return Ok(Vec::new());
        }
        let p = self.points.point(step).to_vec();

        let mut dists = Vec::with_capacity(step);
        let mut coarsest_new = RepFrom::Top;
        let mut twin = None;
        for q in 0..step {
            let pq = self.points.point(q);
            dists.push(distance_unchecked(&p, pq, Norm::L2));
            match shared_level(&p, pq) {
                SharedLevel::Always => {
                    twin.get_or_insert(q);
                }
                SharedLevel::Finest(l) => {
                    let r = RepFrom::Level((l + 1).min(MAX_LEVEL));
                    if r.rank() > coarsest_new.rank() {
                        coarsest_new = r;
                    }
                }
                SharedLevel::Never => {}
            }
        }

        if let Some(q) = twin {
            self.rep_from.push(RepFrom::Never);
            let e = LevelEdge {
                step,
                level: None,
                u: step,
                v: q,
                w: 0.0,
            };
            self.record(e);
            return Ok(vec![e]);
        }

        let (mut nearest, mut farthest) = (f64::INFINITY, 0.0f64);
        for &d in &dists {
            nearest = nearest.min(d);
            farthest = farthest.max(d);
        }
        let finest = self.finest_level_above(nearest);
        // Below `stable`, neither the representative sets nor the cap change anything.
        let cap_covers_all = self.finest_level_above(farthest);
        let min_finite = self
            .rep_from
            .iter()
            .chain(std::iter::once(&coarsest_new))
            .filter_map(|r| match r {
                RepFrom::Level(l) => Some(*l),
                _ => None,
            })
            .min();
        let stable = match min_finite {
            Some(m) => (m - 1).min(cap_covers_all),
            None => cap_covers_all,
        };
        let start = match coarsest_new {
            RepFrom::Level(l) => l,
            _ => stable,
        };
        self.rep_from.push(coarsest_new);
        if start > finest {
            return Ok(Vec::new());
        }
        self.range = Some(match self.range {
            Some((lo, hi)) => (lo.min(start), hi.max(finest)),
            None => (start, finest),
        });

        // Per cone, candidates with strictly decreasing rep level by increasing
        // distance: the closest level-l representative is the first with rank <= l.
        let mut by_cone: Vec<Vec<(f64, usize)>> = vec![Vec::new(); self.cones.len()];
        let mut dir = vec![0.0; p.len()];
        for q in 0..step {
            if self.rep_from[q] == RepFrom::Never {
                continue;
            }
            for (k, slot) in dir.iter_mut().enumerate() {
                *slot = self.points.point(q)[k] - p[k];
            }
            by_cone[self.cones.cone_of(&dir)].push((dists[q], q));
        }
        let staircases: Vec<Vec<(f64, usize, i64)>> = by_cone
            .into_iter()
            .map(|mut c| {
                c.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
                let mut stair = Vec::new();
                let mut lowest = i64::MAX;
                for (d, q) in c {
                    let r = self.rep_from[q].rank();
                    if r < lowest {
                        lowest = r;
                        stair.push((d, q, r));
                    }
                }
                stair
            })
            .collect();

        let mut out = Vec::new();
        for level in start..=finest {
            let cap = self.cap(level);
            for stair in &staircases {
                if let Some(&(d, q, _)) = stair.iter().find(|s| s.2 <= level as i64) {
                    if d < cap {
                        let e = LevelEdge {
                            step,
                            level: Some(level),
                            u: step,
                            v: q,
                            w: d,
                        };
                        self.record(e);
                        out.push(e);
                    }
                }
            }
        }
        Ok(out)
    }

    fn record(&mut self, e: LevelEdge) {
        self.level_edges += 1;
        if self.graph.add_edge(e.u, e.v, e.w) {
            self.edge_levels.push(e.level);
        }
    }

    /// Runs every point of `seq` through [`insert`](Self::insert).
    pub fn extend_from(&mut self, seq: &PointSequence) -> Result<Vec<LevelEdge>> {
        let mut all = Vec::new();
        for p in seq.iter() {
            all.extend(self.insert(p)?);
        }
        Ok(all)
    }

    /// Representatives of `level` and the cells they represent.
    pub fn level_state(&self, level: i32) -> LevelState {
        let mut representatives = HashMap::new();
        let mut order = Vec::new();
        for (q, r) in self.rep_from.iter().enumerate() {
            if r.rank() <= level as i64 {
                representatives.insert(GridCellKey::of(self.points.point(q), level), q);
                order.push(q);
            }
        }
        LevelState {
            level,
            representatives,
            order,
        }
    }

    /// Representative of a cell, i.e. the first point that landed in it.
    pub fn representative(&self, key: &GridCellKey) -> Option<usize> {
        (0..self.points.len()).find(|&q| key.contains(self.points.point(q)))
    }
}

impl Metric for Alg1State {
    fn len(&self) -> usize {
        self.points.len()
    }

    fn dist(&self, i: usize, j: usize) -> f64 {
        self.points.dist(i, j)
    }
}

/// Runs the construction over a whole sequence.
pub fn alg1(seq: &PointSequence, eps: f64) -> Result<Alg1State> {
    if seq.norm() != Norm::L2 {
        return Err(SpannerError::InvalidParameter(
            "the grid+Yao construction needs Euclidean (l2) points".into(),
        ));
    }
    let mut st = Alg1State::new(seq.dim(), eps)?;
    st.extend_from(seq)?;
    Ok(st)
}
