//! Point sets, finite metrics, metric validation and the dense MST.

use serde::{Deserialize, Serialize};

use crate::error::{Result, SpannerError};

/// Relative tolerance used for every stretch and triangle comparison.
pub const REL_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Norm {
    L1,
    L2,
}

impl std::fmt::Display for Norm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Norm::L1 => f.write_str("l1"),
            Norm::L2 => f.write_str("l2"),
        }
    }
}

/// Distance between two points under `norm`.
pub fn distance(p: &[f64], q: &[f64], norm: Norm) -> Result<f64> {
    if p.len() != q.len() {
        return Err(SpannerError::DimensionMismatch {
            expected: p.len(),
            got: q.len(),
        });
    }
    if let Some(x) = p.iter().chain(q).find(|x| !x.is_finite()) {
        return Err(SpannerError::NonFinite(format!("coordinate {x}")));
    }
    Ok(distance_unchecked(p, q, norm))
}

#[inline]
pub(crate) fn distance_unchecked(p: &[f64], q: &[f64], norm: Norm) -> f64 {
    match norm {
        Norm::L1 => p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum(),
        Norm::L2 => p
            .iter()
            .zip(q)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt(),
    }
}

/// A symmetric distance oracle over `len()` indexed points.
pub trait Metric {
    fn len(&self) -> usize;

    fn dist(&self, i: usize, j: usize) -> f64;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Distances from point `i` to points `0..i`, the row revealed when `i` arrives.
    fn row_to_previous(&self, i: usize) -> Vec<f64> {
        (0..i).map(|j| self.dist(i, j)).collect()
    }
}

impl<M: Metric + ?Sized> Metric for &M {
    fn len(&self) -> usize {
        (**self).len()
    }
    fn dist(&self, i: usize, j: usize) -> f64 {
        (**self).dist(i, j)
    }
}

/// Ordered points in arrival order, all of dimension `dim`.
#[derive(Clone, Debug, PartialEq)]
pub struct PointSequence {
    dim: usize,
    norm: Norm,
    coords: Vec<f64>,
}

impl PointSequence {
    pub fn new(dim: usize, norm: Norm) -> Result<Self> {
        if dim == 0 {
            return Err(SpannerError::InvalidParameter("dimension must be positive".into()));
        }
        Ok(Self {
            dim,
            norm,
            coords: Vec::new(),
        })
    }

    pub fn from_points<P: AsRef<[f64]>>(dim: usize, norm: Norm, points: &[P]) -> Result<Self> {
        let mut seq = Self::new(dim, norm)?;
        for p in points {
            seq.push(p.as_ref())?;
        }
        Ok(seq)
    }

    pub fn push(&mut self, p: &[f64]) -> Result<usize> {
        if p.len() != self.dim {
            return Err(SpannerError::DimensionMismatch {
                expected: self.dim,
                got: p.len(),
            });
        }
        if let Some(x) = p.iter().find(|x| !x.is_finite()) {
            return Err(SpannerError::NonFinite(format!("coordinate {x}")));
        }
        self.coords.extend_from_slice(p);
        Ok(self.len() - 1)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn norm(&self) -> Norm {
        self.norm
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.dim)
    }

    /// The first `n` points as a new sequence.
    pub fn prefix(&self, n: usize) -> PointSequence {
        PointSequence {
            dim: self.dim,
            norm: self.norm,
            coords: self.coords[..n * self.dim].to_vec(),
        }
    }

    /// Reorders points; `order[k]` is the old index of the new `k`-th point.
    pub fn permuted(&self, order: &[usize]) -> PointSequence {
        let mut coords = Vec::with_capacity(self.coords.len());
        for &i in order {
            coords.extend_from_slice(self.point(i));
        }
        PointSequence {
            dim: self.dim,
            norm: self.norm,
            coords,
        }
    }

    pub fn with_norm(&self, norm: Norm) -> PointSequence {
        PointSequence {
            norm,
            ..self.clone()
        }
    }
}

impl Metric for PointSequence {
    fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    fn dist(&self, i: usize, j: usize) -> f64 {
        distance_unchecked(self.point(i), self.point(j), self.norm)
    }
}

/// Row-major symmetric distance matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DistanceMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    /// Builds from rows without checking metric axioms; see [`validate_metric`].
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(SpannerError::Format(format!(
                    "row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            if let Some(x) = row.iter().find(|x| !x.is_finite()) {
                return Err(SpannerError::NonFinite(format!("distance {x} in row {i}")));
            }
            data.extend_from_slice(row);
        }
        Ok(Self { n, data })
    }

    pub fn from_metric<M: Metric + ?Sized>(m: &M) -> Self {
        let n = m.len();
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..i {
                out.set(i, j, m.dist(i, j));
            }
        }
        out
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..i {
                out.set(i, j, f(i, j));
            }
        }
        out
    }

    /// Sets both `(i, j)` and `(j, i)`.
    pub fn set(&mut self, i: usize, j: usize, d: f64) {
        self.data[i * self.n + j] = d;
        self.data[j * self.n + i] = d;
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.n.max(1)).take(self.n).map(|r| r.to_vec()).collect()
    }

    /// Appends a point with the given distances to all existing points.
    pub fn push_row(&mut self, row: &[f64]) {
        assert_eq!(row.len(), self.n, "row length must equal current size");
        let n = self.n + 1;
        let mut data = vec![0.0; n * n];
        for i in 0..self.n {
            data[i * n..i * n + self.n].copy_from_slice(&self.data[i * self.n..(i + 1) * self.n]);
        }
        for (j, &d) in row.iter().enumerate() {
            data[self.n * n + j] = d;
            data[j * n + self.n] = d;
        }
        self.n = n;
        self.data = data;
    }

    /// Applies `f` to every off-diagonal entry.
    pub fn map(&self, mut f: impl FnMut(f64) -> f64) -> Self {
        Self::from_fn(self.n, |i, j| f(self.dist(i, j)))
    }

    /// Sub-metric on the first `n` points.
    pub fn prefix(&self, n: usize) -> Self {
        Self::from_fn(n, |i, j| self.dist(i, j))
    }

    /// Reorders points; `order[k]` is the old index of the new `k`-th point.
    pub fn permuted(&self, order: &[usize]) -> Self {
        Self::from_fn(order.len(), |i, j| self.dist(order[i], order[j]))
    }
}

impl Metric for DistanceMatrix {
    fn len(&self) -> usize {
        self.n
    }

    #[inline]
    fn dist(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MetricViolation {
    NonzeroDiagonal { i: usize, value: f64 },
    Negative { i: usize, j: usize, value: f64 },
    Asymmetric { i: usize, j: usize, forward: f64, backward: f64 },
    Triangle { i: usize, j: usize, k: usize, direct: f64, via: f64 },
}

/// Absolute slack for comparisons against distances of magnitude `scale`.
pub fn tolerance_for(scale: f64) -> f64 {
    REL_TOL * scale.max(f64::MIN_POSITIVE)
}

fn max_distance<M: Metric + ?Sized>(m: &M) -> f64 {
    let n = m.len();
    let mut scale = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            scale = scale.max(m.dist(i, j).abs());
        }
    }
    scale
}

/// Every axiom violation of `m`; an empty list means `m` is a metric.
pub fn validate_metric<M: Metric + ?Sized>(m: &M) -> Vec<MetricViolation> {
    let n = m.len();
    let tol = tolerance_for(max_distance(m));
    let mut out = Vec::new();
    for i in 0..n {
        let d = m.dist(i, i);
        if d != 0.0 {
            out.push(MetricViolation::NonzeroDiagonal { i, value: d });
        }
        for j in (i + 1)..n {
            let (a, b) = (m.dist(i, j), m.dist(j, i));
            if a < 0.0 {
                out.push(MetricViolation::Negative { i, j, value: a });
            }
            if (a - b).abs() > tol {
                out.push(MetricViolation::Asymmetric {
                    i,
                    j,
                    forward: a,
                    backward: b,
                });
            }
        }
    }
    // Triangle check over unordered {i, k} with every middle j.
    for i in 0..n {
        for k in (i + 1)..n {
            let direct = m.dist(i, k);
            for j in 0..n {
                if j == i || j == k {
                    continue;
                }
                let via = m.dist(i, j) + m.dist(j, k);
                if direct > via + tol {
                    out.push(MetricViolation::Triangle { i, j, k, direct, via });
                }
            }
        }
    }
    out
}

/// Checks that appending a point with `row` (distances to `0..n`) keeps `m` a metric.
pub fn check_row_extension<M: Metric + ?Sized>(m: &M, row: &[f64]) -> Result<()> {
    let n = m.len();
    if row.len() != n {
        return Err(SpannerError::DimensionMismatch {
            expected: n,
            got: row.len(),
        });
    }
    let mut scale = row.iter().fold(0.0f64, |a, &b| a.max(b));
    for (j, &d) in row.iter().enumerate() {
        if !d.is_finite() {
            return Err(SpannerError::NonFinite(format!("distance to {j}")));
        }
        if d < 0.0 {
            return Err(SpannerError::MetricViolation(format!(
                "negative distance {d} to point {j}"
            )));
        }
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
            if dij > a + b + tol {
                return Err(SpannerError::MetricViolation(format!(
                    "d({i},{j}) = {dij} exceeds d(new,{i}) + d(new,{j}) = {}",
                    a + b
                )));
            }
            if (a - b).abs() > dij + tol {
                let (far, near) = if a > b { (i, j) } else { (j, i) };
                return Err(SpannerError::MetricViolation(format!(
                    "d(new,{far}) = {} exceeds d(new,{near}) + d({far},{near}) = {}",
                    a.max(b),
                    a.min(b) + dij
                )));
            }
        }
    }
    Ok(())
}

/// Minimum spanning tree of the complete graph on `m` (dense Prim, O(n^2)).
///
/// Returns the total weight and the `n - 1` tree edges as `(parent, child, w)`.
pub fn mst<M: Metric + ?Sized>(m: &M) -> (f64, Vec<(usize, usize, f64)>) {
    let n = m.len();
    if n <= 1 {
        return (0.0, Vec::new());
    }
    let mut in_tree = vec![false; n];
    let mut best = vec![f64::INFINITY; n];
    let mut parent = vec![0usize; n];
    let mut edges = Vec::with_capacity(n - 1);
    let mut total = 0.0;
    in_tree[0] = true;
    for j in 1..n {
        best[j] = m.dist(0, j);
    }
    for _ in 1..n {
        let mut next = usize::MAX;
        let mut next_w = f64::INFINITY;
        for j in 0..n {
            if !in_tree[j] && (next == usize::MAX || best[j] < next_w) {
                next = j;
                next_w = best[j];
            }
        }
        in_tree[next] = true;
        total += next_w;
        edges.push((parent[next], next, next_w));
        for j in 0..n {
            if !in_tree[j] {
                let d = m.dist(next, j);
                if d < best[j] {
                    best[j] = d;
                    parent[j] = next;
                }
            }
        }
    }
    (total, edges)
}

pub fn mst_weight<M: Metric + ?Sized>(m: &M) -> f64 {
    mst(m).0
}

/// The uniform metric: every pair at distance `d`.
pub fn uniform_metric(n: usize, d: f64) -> DistanceMatrix {
    DistanceMatrix::from_fn(n, |_, _| d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distance_examples() {
        assert_eq!(distance(&[0.0, 0.0], &[3.0, 4.0], Norm::L2).unwrap(), 5.0);
        assert_eq!(distance(&[0.0, 0.0], &[3.0, 4.0], Norm::L1).unwrap(), 7.0);
        assert_eq!(distance(&[1.0, 1.0], &[1.0, 1.0], Norm::L1).unwrap(), 0.0);
    }

    #[test]
    fn distance_errors() {
        assert!(matches!(
            distance(&[0.0], &[1.0, 2.0], Norm::L2),
            Err(SpannerError::DimensionMismatch { .. })
        ));
        assert!(matches!(
            distance(&[f64::NAN], &[1.0], Norm::L2),
            Err(SpannerError::NonFinite(_))
        ));
    }

    #[test]
    fn sequence_rejects_bad_points() {
        let mut s = PointSequence::new(2, Norm::L2).unwrap();
        assert!(s.push(&[1.0]).is_err());
        assert!(s.push(&[1.0, f64::INFINITY]).is_err());
        assert_eq!(s.push(&[1.0, 2.0]).unwrap(), 0);
        assert!(PointSequence::new(0, Norm::L1).is_err());
    }

    #[test]
    fn uniform_metric_is_valid() {
        assert!(validate_metric(&uniform_metric(3, 1.0)).is_empty());
    }

    #[test]
    fn single_triangle_violation() {
        let m = DistanceMatrix::from_rows(&[
            vec![0.0, 1.0, 3.0],
            vec![1.0, 0.0, 1.0],
            vec![3.0, 1.0, 0.0],
        ])
        .unwrap();
        let v = validate_metric(&m);
        assert_eq!(v.len(), 1);
        assert!(matches!(v[0], MetricViolation::Triangle { i: 0, j: 1, k: 2, .. }));
    }

    #[test]
    fn diagonal_and_asymmetry_reported() {
        let m = DistanceMatrix::from_rows(&[vec![0.5, 1.0], vec![2.0, 0.0]]).unwrap();
        let v = validate_metric(&m);
        assert!(v.iter().any(|x| matches!(x, MetricViolation::NonzeroDiagonal { i: 0, .. })));
        assert!(v.iter().any(|x| matches!(x, MetricViolation::Asymmetric { .. })));
    }

    #[test]
    fn mst_examples() {
        let square =
            PointSequence::from_points(2, Norm::L2, &[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])
                .unwrap();
        assert_eq!(mst_weight(&square), 3.0);
        assert_eq!(mst_weight(&uniform_metric(5, 1.0)), 4.0);
        let lattice: Vec<[f64; 2]> = (0..4)
            .flat_map(|x| (0..4).map(move |y| [x as f64, y as f64]))
            .collect();
        let lattice = PointSequence::from_points(2, Norm::L1, &lattice).unwrap();
        let (w, edges) = mst(&lattice);
        assert_eq!(w, 15.0);
        assert_eq!(edges.len(), 15);
        assert!(edges.iter().all(|e| e.2 == 1.0));
    }

    #[test]
    fn mst_trivial_sizes() {
        assert_eq!(mst(&uniform_metric(0, 1.0)).1.len(), 0);
        assert_eq!(mst(&uniform_metric(1, 1.0)).0, 0.0);
    }

    #[test]
    fn row_extension_check() {
        let m = uniform_metric(2, 1.0);
        assert!(check_row_extension(&m, &[1.0, 1.0]).is_ok());
        assert!(check_row_extension(&m, &[0.2, 2.0]).is_err());
        assert!(check_row_extension(&m, &[0.2]).is_err());
        assert!(check_row_extension(&m, &[-1.0, 1.0]).is_err());
    }

    #[test]
    fn matrix_push_row_and_permute() {
        let mut m = uniform_metric(2, 1.0);
        m.push_row(&[2.0, 3.0]);
        assert_eq!(m.len(), 3);
        assert_eq!(m.dist(2, 0), 2.0);
        assert_eq!(m.dist(1, 2), 3.0);
        let p = m.permuted(&[2, 0, 1]);
        assert_eq!(p.dist(0, 1), 2.0);
        assert_eq!(p.dist(0, 2), 3.0);
    }
}
