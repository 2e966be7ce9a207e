//! Ultrametrics and hierarchically separated trees, and the online spanners on them.
//!
//! The basic construction connects each arriving point to the earliest-arrived
//! among its nearest predecessors; on an ultrametric that tree is an MST. Two
//! refinements run the same rule on rounded copies of the input: one copy
//! rounded up to powers of `alpha`, or `kappa + 1` copies on shifted geometric
//! grids whose union has stretch close to 2.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SpannerError};
use crate::graph::{Edge, SpannerGraph};
use crate::greedy::RevealedMetric;
use crate::metric::{tolerance_for, Metric};

/// Distances within this relative gap count as tied.
pub const TIE_REL_TOL: f64 = 1e-12;

/// Serialized tree node: an internal node with a label, or a leaf naming a point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum HstNodeSpec {
    Internal { label: f64, children: Vec<HstNodeSpec> },
    Leaf { leaf: usize },
}

#[derive(Clone, Debug, PartialEq)]
struct Node {
    label: f64,
    parent: Option<usize>,
    depth: usize,
    children: Vec<usize>,
}

/// Rooted tree with labeled internal nodes whose leaves are the points `0..n`.
#[derive(Clone, Debug, PartialEq)]
pub struct HstTree {
    nodes: Vec<Node>,
    leaf_node: Vec<usize>,
}

impl HstTree {
    /// Builds and validates a tree: labels strictly decrease from parent to
    /// internal child, internal labels are positive, leaves are exactly `0..n`.
    pub fn from_spec(spec: &HstNodeSpec) -> Result<Self> {
        let mut nodes = Vec::new();
        let mut leaves: Vec<(usize, usize)> = Vec::new();
        Self::add_spec(spec, None, 0, &mut nodes, &mut leaves)?;
        let n = leaves.len();
        let mut leaf_node = vec![usize::MAX; n];
        for (point, node) in leaves {
            if point >= n || leaf_node[point] != usize::MAX {
                return Err(SpannerError::Format(format!(
                    "leaf indices must be a permutation of 0..{n}; bad index {point}"
                )));
            }
            leaf_node[point] = node;
        }
        Ok(Self { nodes, leaf_node })
    }

    fn add_spec(
        spec: &HstNodeSpec,
        parent: Option<usize>,
        depth: usize,
        nodes: &mut Vec<Node>,
        leaves: &mut Vec<(usize, usize)>,
    ) -> Result<usize> {
        let id = nodes.len();
        match spec {
            HstNodeSpec::Leaf { leaf } => {
                nodes.push(Node {
                    label: 0.0,
                    parent,
                    depth,
                    children: Vec::new(),
                });
                leaves.push((*leaf, id));
            }
            HstNodeSpec::Internal { label, children } => {
                if !(label.is_finite() && *label > 0.0) {
                    return Err(SpannerError::Format(format!("internal label {label} must be positive")));
                }
                if let Some(p) = parent {
                    if nodes[p].label <= *label {
                        return Err(SpannerError::Format(format!(
                            "label {label} does not decrease below parent label {}",
                            nodes[p].label
                        )));
                    }
                }
                if children.is_empty() {
                    return Err(SpannerError::Format("internal node without children".into()));
                }
                nodes.push(Node {
                    label: *label,
                    parent,
                    depth,
                    children: Vec::new(),
                });
                for c in children {
                    let cid = Self::add_spec(c, Some(id), depth + 1, nodes, leaves)?;
                    nodes[id].children.push(cid);
                }
            }
        }
        Ok(id)
    }

    pub fn to_spec(&self) -> HstNodeSpec {
        let mut point_of = vec![usize::MAX; self.nodes.len()];
        for (p, &node) in self.leaf_node.iter().enumerate() {
            point_of[node] = p;
        }
        self.spec_of(0, &point_of)
    }

    fn spec_of(&self, id: usize, point_of: &[usize]) -> HstNodeSpec {
        let node = &self.nodes[id];
        if node.children.is_empty() {
            HstNodeSpec::Leaf { leaf: point_of[id] }
        } else {
            HstNodeSpec::Internal {
                label: node.label,
                children: node.children.iter().map(|&c| self.spec_of(c, point_of)).collect(),
            }
        }
    }

    /// Same tree with point `k` renamed from `order[k]`.
    pub fn permuted(&self, order: &[usize]) -> Self {
        assert_eq!(order.len(), self.leaf_node.len());
        Self {
            nodes: self.nodes.clone(),
            leaf_node: order.iter().map(|&o| self.leaf_node[o]).collect(),
        }
    }

    pub fn leaf_count(&self) -> usize {
        self.leaf_node.len()
    }

    /// Smallest ratio `label(v) / label(u)` over internal parent-child pairs
    /// (`+inf` if there are none).
    pub fn min_label_ratio(&self) -> f64 {
        self.nodes
            .iter()
            .filter(|n| !n.children.is_empty())
            .filter_map(|n| n.parent.map(|p| self.nodes[p].label / n.label))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn is_alpha_hst(&self, alpha: f64) -> bool {
        self.min_label_ratio() >= alpha
    }

    fn lca(&self, mut a: usize, mut b: usize) -> usize {
        while self.nodes[a].depth > self.nodes[b].depth {
            a = self.nodes[a].parent.unwrap();
        }
        while self.nodes[b].depth > self.nodes[a].depth {
            b = self.nodes[b].parent.unwrap();
        }
        while a != b {
            a = self.nodes[a].parent.unwrap();
            b = self.nodes[b].parent.unwrap();
        }
        a
    }
}

impl Metric for HstTree {
    fn len(&self) -> usize {
        self.leaf_node.len()
    }

    fn dist(&self, i: usize, j: usize) -> f64 {
        if i == j {
            return 0.0;
        }
        self.nodes[self.lca(self.leaf_node[i], self.leaf_node[j])].label
    }
}

/// Random tree with `n` leaves, at most `depth` internal levels below the
/// root and labels shrinking by a random factor in `[1.25, 4)` per level.
/// The root label is 1 and leaf indices are shuffled.
pub fn random_hst(n: usize, depth: usize, seed: u64) -> HstTree {
    random_hst_with_ratio(n, depth, 1.25, 4.0, seed)
}

/// As [`random_hst`], with per-level label ratios drawn from `[min_ratio, max_ratio)`.
/// With `min_ratio >= alpha` the result is an `alpha`-HST.
pub fn random_hst_with_ratio(n: usize, depth: usize, min_ratio: f64, max_ratio: f64, seed: u64) -> HstTree {
    assert!(n >= 1, "need at least one leaf");
    assert!(min_ratio > 1.0 && max_ratio >= min_ratio);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ids: Vec<usize> = (0..n).collect();
    ids.shuffle(&mut rng);
    let spec = if n == 1 {
        HstNodeSpec::Leaf { leaf: ids[0] }
    } else {
        random_subtree(&ids, depth, 1.0, min_ratio, max_ratio, &mut rng)
    };
    HstTree::from_spec(&spec).expect("generated tree is valid")
}

fn random_subtree(
    ids: &[usize],
    depth: usize,
    label: f64,
    min_ratio: f64,
    max_ratio: f64,
    rng: &mut ChaCha8Rng,
) -> HstNodeSpec {
    debug_assert!(ids.len() >= 2);
    if depth == 0 {
        return HstNodeSpec::Internal {
            label,
            children: ids.iter().map(|&leaf| HstNodeSpec::Leaf { leaf }).collect(),
        };
    }
    let parts = rng.gen_range(2..=ids.len().min(4));
    // Random composition of ids.len() into `parts` positive sizes.
    let mut cuts: Vec<usize> = (1..ids.len()).collect();
    cuts.shuffle(rng);
    let mut cuts: Vec<usize> = cuts[..parts - 1].to_vec();
    cuts.sort_unstable();
    let mut children = Vec::with_capacity(parts);
    let mut prev = 0;
    for end in cuts.into_iter().chain(std::iter::once(ids.len())) {
        let group = &ids[prev..end];
        prev = end;
        if group.len() == 1 {
            children.push(HstNodeSpec::Leaf { leaf: group[0] });
        } else {
            let ratio = if max_ratio > min_ratio {
                rng.gen_range(min_ratio..max_ratio)
            } else {
                min_ratio
            };
            children.push(random_subtree(group, depth - 1, label / ratio, min_ratio, max_ratio, rng));
        }
    }
    HstNodeSpec::Internal { label, children }
}

/// First triple `(i, j, k)` with `d(i, k) > max(d(i, j), d(j, k))`, if any.
pub fn find_ultrametric_violation<M: Metric + ?Sized>(m: &M) -> Option<(usize, usize, usize)> {
    let n = m.len();
    let mut scale = 0.0f64;
    for i in 0..n {
        for j in 0..i {
            scale = scale.max(m.dist(i, j));
        }
    }
    let tol = tolerance_for(scale);
    for i in 0..n {
        for k in (i + 1)..n {
            let dik = m.dist(i, k);
            for j in 0..n {
                if j != i && j != k && dik > m.dist(i, j).max(m.dist(j, k)) + tol {
                    return Some((i, j, k));
                }
            }
        }
    }
    None
}

/// Checks that appending a point with distances `row` keeps `m` an ultrametric.
pub fn check_ultrametric_extension<M: Metric + ?Sized>(m: &M, row: &[f64]) -> Result<()> {
    let n = m.len();
    if row.len() != n {
        return Err(SpannerError::DimensionMismatch {
            expected: n,
            got: row.len(),
        });
    }
    let mut scale = 0.0f64;
    for (j, &d) in row.iter().enumerate() {
        if !(d.is_finite() && d >= 0.0) {
            return Err(SpannerError::UltrametricViolation(j, j, n, format!("bad distance {d}")));
        }
        scale = scale.max(d);
    }
    for i in 0..n {
        for j in 0..i {
            scale = scale.max(m.dist(i, j));
        }
    }
    let tol = tolerance_for(scale);
    for i in 0..n {
        for j in 0..i {
            let dij = m.dist(i, j);
            let (a, b) = (row[i], row[j]);
            if dij > a.max(b) + tol {
                return Err(SpannerError::UltrametricViolation(
                    i,
                    n,
                    j,
                    format!("d({i},{j}) = {dij} > max(d({i},new), d(new,{j})) = {}", a.max(b)),
                ));
            }
            if a > b.max(dij) + tol || b > a.max(dij) + tol {
                return Err(SpannerError::UltrametricViolation(
                    i,
                    j,
                    n,
                    format!("d(new,{i}) = {a}, d(new,{j}) = {b}, d({i},{j}) = {dij}"),
                ));
            }
        }
    }
    Ok(())
}

/// Online tree: each arrival links to the earliest among its nearest predecessors.
///
/// Decisions use one metric; edges carry weights from a possibly different
/// (original) metric, which is how the rounded constructions report.
#[derive(Clone, Debug)]
pub struct NearestFirstTree {
    decision: RevealedMetric,
    graph: SpannerGraph,
    check: bool,
}

impl Default for NearestFirstTree {
    fn default() -> Self {
        Self::new()
    }
}

impl NearestFirstTree {
    pub fn new() -> Self {
        Self {
            decision: RevealedMetric::default(),
            graph: SpannerGraph::new(0),
            check: true,
        }
    }

    fn unchecked() -> Self {
        Self {
            check: false,
            ..Self::new()
        }
    }

    pub fn spanner(&self) -> &SpannerGraph {
        &self.graph
    }

    pub fn len(&self) -> usize {
        self.decision.len()
    }

    pub fn is_empty(&self) -> bool {
        self.decision.is_empty()
    }

    /// Inserts a point whose distances to its predecessors are `row`.
    pub fn insert(&mut self, row: &[f64]) -> Result<Option<Edge>> {
        self.insert_weighted(row, row)
    }

    /// Chooses the neighbor by `decision_row`, weights the edge by `weight_row`.
    pub fn insert_weighted(&mut self, decision_row: &[f64], weight_row: &[f64]) -> Result<Option<Edge>> {
        let v = self.decision.len();
        if self.check {
            check_ultrametric_extension(&self.decision, decision_row)?;
        } else if decision_row.len() != v {
            return Err(SpannerError::DimensionMismatch {
                expected: v,
                got: decision_row.len(),
            });
        }
        assert_eq!(weight_row.len(), v);
        self.decision.push_row(decision_row.to_vec());
        self.graph.ensure_vertices(v + 1);
        let Some(u) = earliest_nearest(decision_row) else {
            return Ok(None);
        };
        self.graph.add_edge(u, v, weight_row[u]);
        Ok(Some(Edge { u, v, w: weight_row[u] }))
    }
}

/// Earliest index among the entries within [`TIE_REL_TOL`] of the minimum.
pub fn earliest_nearest(row: &[f64]) -> Option<usize> {
    let min = row.iter().copied().fold(f64::INFINITY, f64::min);
    if !min.is_finite() {
        return None;
    }
    let limit = min + TIE_REL_TOL * min.abs();
    row.iter().position(|&d| d <= limit)
}

/// Runs the nearest-first-arrival tree over `m` in index order.
pub fn hst_spanner<M: Metric + ?Sized>(m: &M) -> Result<NearestFirstTree> {
    let mut st = NearestFirstTree::new();
    for i in 0..m.len() {
        st.insert(&m.row_to_previous(i))?;
    }
    Ok(st)
}

/// Smallest integer power of `alpha` that is at least `d` (`0` stays `0`).
pub fn round_up_to_power(d: f64, alpha: f64) -> f64 {
    if d <= 0.0 {
        return 0.0;
    }
    let mut k = (d.ln() / alpha.ln()).ceil() as i32;
    while alpha.powi(k - 1) >= d {
        k -= 1;
    }
    while alpha.powi(k) < d {
        k += 1;
    }
    alpha.powi(k)
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 1.0 && alpha.is_finite() {
        Ok(())
    } else {
        Err(SpannerError::InvalidParameter(format!("alpha = {alpha} must exceed 1")))
    }
}

/// Rounds every distance of an ultrametric up to the next power of `alpha`.
pub fn alpha_round<M: Metric + ?Sized>(m: &M, alpha: f64) -> Result<crate::metric::DistanceMatrix> {
    check_alpha(alpha)?;
    if let Some((i, j, k)) = find_ultrametric_violation(m) {
        return Err(SpannerError::UltrametricViolation(i, j, k, "input is not an ultrametric".into()));
    }
    Ok(crate::metric::DistanceMatrix::from_fn(m.len(), |i, j| {
        round_up_to_power(m.dist(i, j), alpha)
    }))
}

/// Stretch of the nearest-first tree on an `alpha`-HST: `2 alpha / (alpha - 1)`.
pub fn alpha_tree_stretch_bound(alpha: f64) -> f64 {
    2.0 * alpha / (alpha - 1.0)
}

/// Stretch of the power-of-`alpha` rounded construction: `2 alpha^2 / (alpha - 1)`.
pub fn alpha_pipeline_stretch_bound(alpha: f64) -> f64 {
    2.0 * alpha * alpha / (alpha - 1.0)
}

/// Nearest-first tree on the power-of-`alpha` rounding, reported with original weights.
#[derive(Clone, Debug)]
pub struct AlphaRoundedState {
    alpha: f64,
    original: RevealedMetric,
    tree: NearestFirstTree,
}

impl AlphaRoundedState {
    pub fn new(alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        Ok(Self {
            alpha,
            original: RevealedMetric::default(),
            tree: NearestFirstTree::unchecked(),
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn insert(&mut self, row: &[f64]) -> Result<Option<Edge>> {
        check_ultrametric_extension(&self.original, row)?;
        self.original.push_row(row.to_vec());
        let rounded: Vec<f64> = row.iter().map(|&d| round_up_to_power(d, self.alpha)).collect();
        self.tree.insert_weighted(&rounded, row)
    }

    pub fn spanner(&self) -> &SpannerGraph {
        self.tree.spanner()
    }
}

pub fn alpha_spanner_online<M: Metric + ?Sized>(m: &M, alpha: f64) -> Result<SpannerGraph> {
    let mut st = AlphaRoundedState::new(alpha)?;
    for i in 0..m.len() {
        st.insert(&m.row_to_previous(i))?;
    }
    Ok(st.tree.graph)
}

/// `floor(log_{1+eps}(1/eps))`, the index of the last rounded copy.
pub fn kappa(eps: f64) -> usize {
    let target = 1.0 / eps;
    let mut k = (target.ln() / (1.0 + eps).ln()).floor().max(0.0) as i32;
    while (1.0 + eps).powi(k + 1) <= target {
        k += 1;
    }
    while k > 0 && (1.0 + eps).powi(k) > target {
        k -= 1;
    }
    k as usize
}

/// Smallest `(1+eps)^copy * eps^-j` over integers `j` that is at least `d`.
///
/// Computed in log space with a correction step against direct comparison, so
/// every `(copy, j)` maps to one exact double.
pub fn grid_round(d: f64, copy: usize, eps: f64) -> f64 {
    if d <= 0.0 {
        return 0.0;
    }
    let a = copy as f64 * (1.0 + eps).ln();
    let b = (1.0 / eps).ln();
    let value = |j: i64| (a + j as f64 * b).exp();
    let mut j = ((d.ln() - a) / b).ceil() as i64;
    while value(j - 1) >= d {
        j -= 1;
    }
    while value(j) < d {
        j += 1;
    }
    value(j)
}

/// Stretch asserted for the multi-scale construction: `2 (1 + 3 eps)`.
pub fn multiscale_stretch_bound(eps: f64) -> f64 {
    2.0 * (1.0 + 3.0 * eps)
}

/// Lightness bound of the multi-scale construction: `((1+eps)^(kappa+1) - 1) / eps`.
pub fn multiscale_weight_factor(eps: f64) -> f64 {
    ((1.0 + eps).powi(kappa(eps) as i32 + 1) - 1.0) / eps
}

/// Union of nearest-first trees over `kappa + 1` grid-rounded copies.
#[derive(Clone, Debug)]
pub struct MultiScaleState {
    eps: f64,
    original: RevealedMetric,
    copies: Vec<NearestFirstTree>,
    graph: SpannerGraph,
}

impl MultiScaleState {
    pub fn new(eps: f64) -> Result<Self> {
        if !(eps > 0.0 && eps < 0.5) {
            return Err(SpannerError::InvalidParameter(format!("eps = {eps} outside (0, 1/2)")));
        }
        Ok(Self {
            eps,
            original: RevealedMetric::default(),
            copies: (0..=kappa(eps)).map(|_| NearestFirstTree::unchecked()).collect(),
            graph: SpannerGraph::new(0),
        })
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn copies(&self) -> usize {
        self.copies.len()
    }

    /// The tree built on copy `i`, with original weights.
    pub fn copy_spanner(&self, i: usize) -> &SpannerGraph {
        self.copies[i].spanner()
    }

    pub fn spanner(&self) -> &SpannerGraph {
        &self.graph
    }

    /// Returns the edges new to the union.
    pub fn insert(&mut self, row: &[f64]) -> Result<Vec<Edge>> {
        check_ultrametric_extension(&self.original, row)?;
        self.original.push_row(row.to_vec());
        let v = self.graph.vertex_count();
        self.graph.ensure_vertices(v + 1);
        let mut added = Vec::new();
        for (i, copy) in self.copies.iter_mut().enumerate() {
            let rounded: Vec<f64> = row.iter().map(|&d| grid_round(d, i, self.eps)).collect();
            if let Some(e) = copy.insert_weighted(&rounded, row)? {
                if self.graph.add_edge(e.u, e.v, e.w) {
                    added.push(e);
                }
            }
        }
        Ok(added)
    }
}

pub fn two_plus_eps_spanner<M: Metric + ?Sized>(m: &M, eps: f64) -> Result<MultiScaleState> {
    let mut st = MultiScaleState::new(eps)?;
    for i in 0..m.len() {
        st.insert(&m.row_to_previous(i))?;
    }
    Ok(st)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{mst_weight, uniform_metric, validate_metric, DistanceMatrix};
    use crate::verify::max_stretch;

    fn leaf(i: usize) -> HstNodeSpec {
        HstNodeSpec::Leaf { leaf: i }
    }

    #[test]
    fn uniform_metric_star() {
        let st = hst_spanner(&uniform_metric(3, 1.0)).unwrap();
        let e: Vec<_> = st.spanner().edges().iter().map(|e| (e.u, e.v)).collect();
        assert_eq!(e, vec![(0, 1), (0, 2)]);
        assert_eq!(st.spanner().total_weight(), 2.0);
    }

    #[test]
    fn two_level_hand_trace() {
        let tree = HstTree::from_spec(&HstNodeSpec::Internal {
            label: 2.0,
            children: vec![
                HstNodeSpec::Internal {
                    label: 1.0,
                    children: vec![leaf(0), leaf(1)],
                },
                leaf(2),
            ],
        })
        .unwrap();
        assert!(tree.is_alpha_hst(2.0));
        let st = hst_spanner(&tree).unwrap();
        let e: Vec<_> = st.spanner().edges().iter().map(|e| (e.u, e.v, e.w)).collect();
        assert_eq!(e, vec![(0, 1, 1.0), (0, 2, 2.0)]);
        assert_eq!(mst_weight(&tree), 3.0);
    }

    #[test]
    fn tree_validation() {
        let bad = HstNodeSpec::Internal {
            label: 1.0,
            children: vec![HstNodeSpec::Internal {
                label: 1.0,
                children: vec![leaf(0), leaf(1)],
            }],
        };
        assert!(HstTree::from_spec(&bad).is_err());
        let dup = HstNodeSpec::Internal {
            label: 1.0,
            children: vec![leaf(0), leaf(0)],
        };
        assert!(HstTree::from_spec(&dup).is_err());
        let round = random_hst(20, 4, 1);
        assert_eq!(HstTree::from_spec(&round.to_spec()).unwrap(), round);
    }

    #[test]
    fn random_fixtures() {
        let one = random_hst(1, 3, 0);
        assert_eq!(one.len(), 1);
        let star = random_hst(3, 0, 5);
        assert_eq!(DistanceMatrix::from_metric(&star), uniform_metric(3, 1.0));
        let big = random_hst(64, 6, 42);
        assert_eq!(find_ultrametric_violation(&big), None);
        assert!(validate_metric(&big).is_empty());
        assert!(random_hst_with_ratio(40, 5, 3.0, 5.0, 1).is_alpha_hst(3.0));
        assert_eq!(random_hst(30, 5, 9), random_hst(30, 5, 9));
    }

    #[test]
    fn rejects_non_ultrametric_rows() {
        let mut st = NearestFirstTree::new();
        st.insert(&[]).unwrap();
        st.insert(&[1.0]).unwrap();
        // d(0,2) = 3 > max(d(0,1), d(1,2)) = 2.
        let err = st.insert(&[3.0, 2.0]).unwrap_err();
        assert!(matches!(err, SpannerError::UltrametricViolation(..)));
        let line = DistanceMatrix::from_rows(&[
            vec![0.0, 1.0, 2.0],
            vec![1.0, 0.0, 1.0],
            vec![2.0, 1.0, 0.0],
        ])
        .unwrap();
        assert!(alpha_round(&line, 2.0).is_err());
        assert!(hst_spanner(&line).is_err());
    }

    #[test]
    fn rounding() {
        assert_eq!(round_up_to_power(3.0, 2.0), 4.0);
        assert_eq!(round_up_to_power(4.0, 2.0), 4.0);
        assert_eq!(round_up_to_power(1.0, 2.0), 1.0);
        assert_eq!(round_up_to_power(0.3, 2.0), 0.5);
        let r = alpha_round(&uniform_metric(4, 1.0), 2.0).unwrap();
        assert_eq!(r, uniform_metric(4, 1.0));
        assert!(alpha_round(&uniform_metric(2, 1.0), 1.0).is_err());
    }

    #[test]
    fn rounding_brackets() {
        for &alpha in &[1.5, 2.0, 3.7] {
            for k in 0..200 {
                let d = 1e-3 * 1.07f64.powi(k);
                let r = round_up_to_power(d, alpha);
                assert!(d <= r && r < alpha * d, "{d} {alpha} {r}");
            }
        }
    }

    #[test]
    fn kappa_values() {
        assert_eq!(kappa(0.5), 1);
        assert_eq!(kappa(0.25), 6);
        assert_eq!(kappa(0.125), 17);
        assert_eq!(MultiScaleState::new(0.25).unwrap().copies(), 7);
        assert!(MultiScaleState::new(0.5).is_err());
    }

    #[test]
    fn grid_rounding() {
        let eps = 0.25;
        for copy in 0..=kappa(eps) {
            for k in 0..300 {
                let d = 1e-4 * 1.05f64.powi(k);
                let r = grid_round(d, copy, eps);
                assert!(r >= d && r < d / eps * (1.0 + 1e-12));
                // Next grid value down lies below d.
                assert!(r * eps < d * (1.0 + 1e-12));
            }
        }
        // Some copy is within a factor (1 + eps).
        for k in 0..300 {
            let d = 1e-4 * 1.05f64.powi(k);
            let best = (0..=kappa(eps)).map(|c| grid_round(d, c, eps)).fold(f64::INFINITY, f64::min);
            assert!(best <= (1.0 + eps) * d * (1.0 + 1e-12));
        }
    }

    #[test]
    fn multiscale_small() {
        let m = random_hst(40, 6, 3);
        let st = two_plus_eps_spanner(&m, 0.25).unwrap();
        assert!(st.spanner().edge_count() <= st.copies() * 39);
        assert!(max_stretch(st.spanner(), &m).within(multiscale_stretch_bound(0.25)));
        let single = two_plus_eps_spanner(&uniform_metric(1, 1.0), 0.25).unwrap();
        assert_eq!(single.spanner().edge_count(), 0);
    }

    #[test]
    fn alpha_pipeline_small() {
        let m = random_hst(50, 6, 8);
        let g = alpha_spanner_online(&m, 2.0).unwrap();
        assert_eq!(g.edge_count(), 49);
        assert!(max_stretch(&g, &m).within(8.0));
        assert!(g.total_weight() <= 2.0 * mst_weight(&m) * (1.0 + 1e-12));
        assert_eq!(alpha_spanner_online(&uniform_metric(1, 1.0), 2.0).unwrap().edge_count(), 0);
    }
}
