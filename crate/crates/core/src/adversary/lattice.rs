//! Integer lattice in `[0, 1/(eps d))^d`, presented in batches by L1 norm.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Result, SpannerError};
use crate::graph::SpannerGraph;
use crate::metric::{Metric, Norm, PointSequence};

/// Points in arrival order, each tagged with its presentation batch.
#[derive(Clone, Debug, PartialEq)]
pub struct ScheduledSequence {
    pub points: PointSequence,
    /// Batch index per point, non-decreasing.
    pub steps: Vec<usize>,
    /// Batches `0..core_steps` follow the alternating schedule; later ones
    /// hold norms it skipped.
    pub core_steps: usize,
    /// `ceil(1 / eps)`.
    pub norm_sum: usize,
    /// L1 norm presented at each batch.
    pub batch_norms: Vec<usize>,
}

impl ScheduledSequence {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Indices of the points in batch `step`.
    pub fn batch(&self, step: usize) -> std::ops::Range<usize> {
        let lo = self.steps.partition_point(|&s| s < step);
        let hi = self.steps.partition_point(|&s| s <= step);
        lo..hi
    }

    pub fn batch_count(&self) -> usize {
        self.batch_norms.len()
    }
}

/// `ceil(1/x)`, treating values within `1e-9` of an integer as that integer.
pub fn ceil_inverse(x: f64) -> usize {
    let inv = 1.0 / x;
    let r = inv.round();
    if (inv - r).abs() <= 1e-9 * inv.max(1.0) {
        r as usize
    } else {
        inv.ceil() as usize
    }
}

fn l1(p: &[f64]) -> usize {
    p.iter().map(|x| *x as usize).sum()
}

pub fn l1_lattice_sequence(d: usize, eps: f64) -> Result<ScheduledSequence> {
    if d == 0 || !(eps > 0.0) || eps * d as f64 >= 1.0 {
        return Err(SpannerError::InvalidParameter(format!(
            "need d >= 1 and 0 < eps < 1/d (d = {d}, eps = {eps})"
        )));
    }
    let side = 1.0 / (eps * d as f64);
    if side < 2.0 - 1e-12 {
        return Err(SpannerError::InvalidParameter(format!(
            "lattice side 1/(eps d) = {side} is below 2"
        )));
    }
    // Coordinates c with c < 1/(eps d), i.e. c * eps * d < 1.
    let m = (0..).take_while(|&c| (c as f64) * eps * (d as f64) < 1.0 - 1e-12).count();
    let total = m
        .checked_pow(d as u32)
        .filter(|&t| t <= 50_000_000)
        .ok_or_else(|| SpannerError::InvalidParameter(format!("lattice {m}^{d} too large")))?;
    let norm_sum = ceil_inverse(eps);
    let half = (0..).take_while(|&i| (i as f64) * 2.0 * eps < 1.0 - 1e-12).count();

    let mut by_norm: HashMap<usize, Vec<Vec<f64>>> = HashMap::new();
    let mut idx = vec![0usize; d];
    for _ in 0..total {
        let p: Vec<f64> = idx.iter().map(|&c| c as f64).collect();
        by_norm.entry(l1(&p)).or_default().push(p);
        for slot in idx.iter_mut().rev() {
            *slot += 1;
            if *slot < m {
                break;
            }
            *slot = 0;
        }
    }
    // Generation order is lexicographic already.

    let mut batch_norms = Vec::new();
    for i in 0..half {
        batch_norms.push(i);
        batch_norms.push(norm_sum.saturating_sub(i));
    }
    let core_steps = batch_norms.len();
    let max_norm = d * (m - 1);
    for norm in 0..=max_norm {
        if by_norm.contains_key(&norm) && !batch_norms[..core_steps].contains(&norm) {
            batch_norms.push(norm);
        }
    }

    let mut points = PointSequence::new(d, Norm::L1)?;
    let mut steps = Vec::with_capacity(total);
    for (step, norm) in batch_norms.iter().enumerate() {
        if let Some(batch) = by_norm.get(norm) {
            for p in batch {
                points.push(p)?;
                steps.push(step);
            }
        }
    }
    debug_assert_eq!(steps.len(), total);
    Ok(ScheduledSequence {
        points,
        steps,
        core_steps,
        norm_sum,
        batch_norms,
    })
}

/// `x` from batch `2i`, `y` from batch `2i + 1`, `x <= y` componentwise.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderedPair {
    pub x: usize,
    pub y: usize,
    pub batch: usize,
}

pub fn ordered_pairs(seq: &ScheduledSequence) -> Vec<OrderedPair> {
    let mut out = Vec::new();
    for i in 0..seq.core_steps / 2 {
        let ys = seq.batch(2 * i + 1);
        for x in seq.batch(2 * i) {
            let px = seq.points.point(x);
            for y in ys.clone() {
                let py = seq.points.point(y);
                if px.iter().zip(py).all(|(a, b)| a <= b) {
                    out.push(OrderedPair { x, y, batch: i });
                }
            }
        }
    }
    out
}

/// L1 length of the pair.
pub fn ordered_pair_weight(seq: &ScheduledSequence, pair: &OrderedPair) -> f64 {
    l1_dist(seq.points.point(pair.x), seq.points.point(pair.y))
}

fn l1_dist(p: &[f64], q: &[f64]) -> f64 {
    p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ViaPathReport {
    pub holds: bool,
    /// Shortest `|x - z| + |z - y|` over admissible `z` (`inf` if none).
    pub min_detour: f64,
    pub direct: f64,
    pub violators: Vec<usize>,
}

/// Checks that no point presented by the pair's second batch lies on a
/// `(1 + eps)`-path from `x` to `y`.
pub fn verify_no_via_path(pair: &OrderedPair, seq: &ScheduledSequence, eps: f64) -> ViaPathReport {
    let px = seq.points.point(pair.x);
    let py = seq.points.point(pair.y);
    let direct = l1_dist(px, py);
    let last_step = 2 * pair.batch + 1;
    let mut min_detour = f64::INFINITY;
    let mut violators = Vec::new();
    for z in 0..seq.len() {
        if z == pair.x || z == pair.y || seq.steps[z] > last_step {
            continue;
        }
        let pz = seq.points.point(z);
        let detour = l1_dist(px, pz) + l1_dist(pz, py);
        min_detour = min_detour.min(detour);
        if detour <= (1.0 + eps) * direct {
            violators.push(z);
        }
    }
    ViaPathReport {
        holds: violators.is_empty(),
        min_detour,
        direct,
        violators,
    }
}

/// Unit-distance graph on the lattice points, indexed as in `seq`.
pub fn manhattan_network(seq: &ScheduledSequence) -> SpannerGraph {
    let pts = &seq.points;
    let index: HashMap<Vec<i64>, usize> = (0..pts.len())
        .map(|i| (pts.point(i).iter().map(|&x| x as i64).collect(), i))
        .collect();
    let mut g = SpannerGraph::new(pts.len());
    for u in 0..pts.len() {
        let mut key: Vec<i64> = pts.point(u).iter().map(|&x| x as i64).collect();
        for c in 0..pts.dim() {
            key[c] += 1;
            if let Some(&v) = index.get(&key) {
                g.add_edge(u.min(v), u.max(v), 1.0);
            }
            key[c] -= 1;
        }
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verify::max_stretch;

    #[test]
    fn planar_eighth_schedule() {
        let s = l1_lattice_sequence(2, 0.125).unwrap();
        assert_eq!(s.len(), 16);
        assert_eq!(s.norm_sum, 8);
        assert_eq!(s.core_steps, 8);
        assert_eq!(s.batch_norms, vec![0, 8, 1, 7, 2, 6, 3, 5, 4]);
        assert_eq!(s.batch(0).len(), 1);
        assert!(s.batch(1).is_empty());
        assert_eq!(s.batch(2).len(), 2);
        let b5 = s.batch(5);
        assert_eq!(b5.len(), 1);
        assert_eq!(s.points.point(b5.start), &[3.0, 3.0]);
        assert_eq!(s.batch(8).len(), 3);
    }

    #[test]
    fn line_quarter() {
        let s = l1_lattice_sequence(1, 0.25).unwrap();
        let mut pts: Vec<f64> = s.points.iter().map(|p| p[0]).collect();
        pts.sort_by(f64::total_cmp);
        assert_eq!(pts, vec![0.0, 1.0, 2.0, 3.0]);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(l1_lattice_sequence(2, 0.5).is_err());
        assert!(l1_lattice_sequence(2, 0.3).is_err());
        assert!(l1_lattice_sequence(0, 0.1).is_err());
    }

    #[test]
    fn pairs_and_detours() {
        let s = l1_lattice_sequence(2, 0.125).unwrap();
        let pairs = ordered_pairs(&s);
        let find = |p: &[f64]| (0..s.len()).find(|&i| s.points.point(i) == p).unwrap();
        let (x, y) = (find(&[1.0, 1.0]), find(&[3.0, 3.0]));
        let pair = *pairs.iter().find(|q| q.x == x && q.y == y).unwrap();
        assert_eq!(pair.batch, 2);
        assert!(pairs.iter().all(|q| q.x != find(&[0.0, 0.0])));
        assert!(pairs.iter().all(|q| !(q.x == y && q.y == x)));
        let r = verify_no_via_path(&pair, &s, 0.125);
        assert!(r.holds);
        assert_eq!(r.direct, 4.0);
        // (2,2) has norm 4 and arrives after the pair, so it is not admissible.
        assert!(r.min_detour > 4.0);
    }

    #[test]
    fn manhattan_grid() {
        let s = l1_lattice_sequence(2, 0.125).unwrap();
        let g = manhattan_network(&s);
        assert_eq!(g.edge_count(), 24);
        assert_eq!(g.total_weight(), 24.0);
        assert_eq!(max_stretch(&g, &s.points).max_stretch, 1.0);
        let line = l1_lattice_sequence(1, 0.25).unwrap();
        assert_eq!(manhattan_network(&line).edge_count(), 3);
    }
}
