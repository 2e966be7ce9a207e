//! Independent recomputations checked against the library.

use std::collections::BTreeSet;
use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spanner_core::adversary::{l1_lattice_sequence, ordered_pair_weight, ordered_pairs};
use spanner_core::eval::{sweep, SweepSpec};
use spanner_core::hst::kappa;
use spanner_core::yao::{aperture_for_epsilon, planar_yao_cone_count};
use spanner_core::{
    max_stretch, metrics_report, mst_weight, offline_greedy, ordered_greedy, DistanceMatrix, GreedyState, Metric,
    Norm, PointSequence, SpannerGraph,
};

fn edge_set(g: &SpannerGraph) -> BTreeSet<(usize, usize)> {
    g.edges().iter().map(|e| (e.u.min(e.v), e.u.max(e.v))).collect()
}

/// All-pairs shortest paths by Floyd-Warshall.
fn floyd(g: &SpannerGraph) -> Vec<Vec<f64>> {
    let n = g.vertex_count();
    let mut d = vec![vec![f64::INFINITY; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0.0;
    }
    for e in g.edges() {
        d[e.u][e.v] = d[e.u][e.v].min(e.w);
        d[e.v][e.u] = d[e.v][e.u].min(e.w);
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[i][k] + d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    d
}

fn random_points(rng: &mut ChaCha8Rng, n: usize, dim: usize) -> PointSequence {
    let pts: Vec<Vec<f64>> = (0..n).map(|_| (0..dim).map(|_| rng.gen_range(0.0..1.0)).collect()).collect();
    PointSequence::from_points(dim, Norm::L2, &pts).unwrap()
}

#[test]
fn planar_cone_count_matches_closed_form() {
    for eps in [1.0f64, 0.5, 0.25, 0.1, 0.05, 0.01] {
        // 1 / (1 - 2 sin(pi/k)) <= 1 + eps  <=>  sin(pi/k) <= eps / (2 (1 + eps)).
        let k = (PI / (eps / (2.0 * (1.0 + eps))).asin()).ceil().max(9.0) as usize;
        assert_eq!(planar_yao_cone_count(eps), k, "eps {eps}");
        assert!((aperture_for_epsilon(2, eps).unwrap() - 2.0 * PI / k as f64).abs() < 1e-15);
    }
    assert_eq!(planar_yao_cone_count(1.0), 13);
    assert_eq!(planar_yao_cone_count(0.5), 19);
}

#[test]
fn kappa_table() {
    for (eps, k) in [(0.5f64, 1), (0.25, 6), (0.125, 17), (0.0625, 45)] {
        assert_eq!(kappa(eps), k, "eps {eps}");
        let exact = ((1.0 / eps).ln() / (1.0 + eps).ln()).floor() as usize;
        assert_eq!(kappa(eps), exact);
    }
}

#[test]
fn lattice_matches_enumeration() {
    for (d, eps) in [(1usize, 0.25), (1, 0.125), (2, 0.125), (2, 0.0625), (3, 0.0625)] {
        let seq = l1_lattice_sequence(d, eps).unwrap();
        // Integers c with c < 1/(eps d).
        let m = (1.0 / (eps * d as f64) - 1e-12).ceil() as usize;
        let n_norm = (1.0 / eps).round() as usize;
        assert_eq!(seq.len(), m.pow(d as u32));
        // Count lattice points of each L1 norm by brute force.
        let mut count = vec![0usize; d * (m - 1) + 1];
        for code in 0..m.pow(d as u32) {
            let mut c = code;
            let mut norm = 0;
            for _ in 0..d {
                norm += c % m;
                c /= m;
            }
            count[norm] += 1;
        }
        for (step, &norm) in seq.batch_norms.iter().enumerate() {
            assert_eq!(seq.batch(step).len(), count.get(norm).copied().unwrap_or(0), "d={d} eps={eps} step {step}");
            for p in seq.batch(step) {
                let s: f64 = seq.points.point(p).iter().sum();
                assert_eq!(s as usize, norm);
            }
        }
        let half = (1.0 / (2.0 * eps)).ceil() as usize;
        let core: Vec<usize> = (0..half).flat_map(|i| [i, n_norm - i]).collect();
        assert_eq!(&seq.batch_norms[..seq.core_steps], &core[..]);
        assert!(seq.steps.windows(2).all(|w| w[0] <= w[1]));

        let pairs = ordered_pairs(&seq);
        let mut expected = 0;
        for i in 0..half {
            for x in seq.batch(2 * i) {
                for y in seq.batch(2 * i + 1) {
                    let (px, py) = (seq.points.point(x), seq.points.point(y));
                    expected += usize::from(px.iter().zip(py).all(|(a, b)| a <= b));
                }
            }
        }
        assert_eq!(pairs.len(), expected);
        for p in &pairs {
            assert_eq!(ordered_pair_weight(&seq, p), (n_norm - 2 * p.batch) as f64);
        }
    }
}

#[test]
fn greedy_is_forced_to_connect_every_ordered_pair() {
    for (d, eps) in [(1usize, 0.125), (2, 0.125), (2, 0.0625)] {
        let seq = l1_lattice_sequence(d, eps).unwrap();
        let pairs = ordered_pairs(&seq);
        let mut state = GreedyState::new(1.0 + eps).unwrap();
        let mut next = 0;
        for i in 0..seq.core_steps / 2 {
            let end = seq.batch(2 * i + 1).end;
            while next < end {
                state.insert(&seq.points.row_to_previous(next)).unwrap();
                next += 1;
            }
            let edges = edge_set(state.spanner());
            for p in pairs.iter().filter(|p| p.batch == i) {
                assert!(edges.contains(&(p.x.min(p.y), p.x.max(p.y))), "d={d} eps={eps} pair {p:?}");
            }
        }
    }
}

#[test]
fn greedy_hand_trace_on_a_line() {
    // Arrivals 0, 2, 1, 5 with t = 1.5.
    let s = PointSequence::from_points(1, Norm::L2, &[[0.0], [2.0], [1.0], [5.0]]).unwrap();
    let g = ordered_greedy(&s, 1.5).unwrap();
    let expected: BTreeSet<_> = [(0, 1), (0, 2), (1, 2), (1, 3)].into_iter().collect();
    assert_eq!(edge_set(g.spanner()), expected);
    assert_eq!(g.spanner().total_weight(), 7.0);
}

/// Textbook offline greedy: sort all pairs, recompute shortest paths from scratch.
fn naive_offline_greedy(m: &impl Metric, t: f64) -> BTreeSet<(usize, usize)> {
    let n = m.len();
    let mut pairs: Vec<(f64, usize, usize)> =
        (0..n).flat_map(|j| (0..j).map(move |i| (i, j))).map(|(i, j)| (m.dist(i, j), i, j)).collect();
    pairs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut g = SpannerGraph::new(n);
    for (w, i, j) in pairs {
        if floyd(&g)[i][j] > t * w {
            g.add_edge(i, j, w);
        }
    }
    edge_set(&g)
}

#[test]
fn offline_greedy_matches_naive() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for case in 0..15 {
        let s = random_points(&mut rng, 6 + case, 2);
        for t in [1.2, 2.0] {
            assert_eq!(edge_set(&offline_greedy(&s, t).unwrap()), naive_offline_greedy(&s, t));
        }
    }
}

#[test]
fn stretch_and_report_match_floyd() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for case in 0..10 {
        let s = random_points(&mut rng, 8 + 2 * case, 2);
        let g = ordered_greedy(&s, 1.7).unwrap();
        let d = floyd(g.spanner());
        let mut worst = 1.0f64;
        for i in 0..s.len() {
            for j in 0..i {
                worst = worst.max(d[i][j] / s.dist(i, j));
            }
        }
        let rep = max_stretch(g.spanner(), &s);
        assert!((rep.max_stretch - worst).abs() <= 1e-12 * worst);

        let report = metrics_report(g.spanner(), &s, &[("half", g.spanner().total_weight() / 2.0)]).unwrap();
        let weight: f64 = g.spanner().edges().iter().map(|e| e.w).sum();
        assert_eq!(report.total_weight, weight);
        assert_eq!(report.lightness, weight / mst_weight(&s));
        assert_eq!(report.edge_count, g.spanner().edge_count());
        assert_eq!(report.sparsity, report.edge_count as f64 / (s.len() - 1) as f64);
        assert_eq!(report.baselines[0].ratio, 2.0);
    }
}

#[test]
fn mst_matches_prim_on_a_matrix() {
    // A path metric: the MST is the path itself.
    let m = DistanceMatrix::from_fn(6, |i, j| (i as f64 - j as f64).abs() * 1.5);
    assert_eq!(mst_weight(&m), 7.5);
}

#[test]
fn sweeps_are_deterministic_except_wall_time() {
    let spec: SweepSpec = serde_json::from_str(
        r#"{
  "base": {
    "instance": {"source": "uniform-points", "n": 40, "dim": 2, "seed": 1},
    "algorithm": {"id": "greedy", "t": 1.5},
    "shuffle": 5
  },
  "grid": {"algorithm.t": [1.5, 2.0], "instance.seed": [1, 2]}
}"#,
    )
    .unwrap();
    let strip = |rows: Vec<spanner_core::BenchRow>| -> Vec<serde_json::Value> {
        rows.into_iter()
            .map(|r| {
                let mut v = serde_json::to_value(r).unwrap();
                v.as_object_mut().unwrap().remove("wall_ms");
                v
            })
            .collect()
    };
    let a = strip(sweep(&spec).unwrap());
    let b = strip(sweep(&spec).unwrap());
    assert_eq!(a.len(), 4);
    assert_eq!(a, b);
}
