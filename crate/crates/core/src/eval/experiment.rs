use std::collections::{BTreeMap, HashSet};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::adversary::{
    hypercube_pm1_sequence, l1_lattice_sequence, manhattan_network, star_append, truncated_girth_metric,
    UnweightedGraph,
};
use crate::error::{Result, SpannerError};
use crate::hst::random_hst_with_ratio;
use crate::io::{parse_edge_list, read_schedule, schedule_path, order_from_steps, write_atomic, Instance};
use crate::metric::{mst_weight, uniform_metric, Metric, Norm, PointSequence};
use crate::verify::ratio;

use super::offline_greedy;
use super::run::{run_online, AlgorithmSpec, Cadence};

/// Default largest instance verified prefix by prefix.
pub const DEFAULT_PREFIX_CAP: usize = 512;

/// Header comment naming the column layout version.
pub const CSV_VERSION_LINE: &str = "# spanner bench csv v1";

/// Where an experiment's instance comes from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InstanceSpec {
    /// An instance file; a `*.schedule.json` sidecar, if present, sets the arrival order.
    File { path: PathBuf },
    /// Uniform random points in the unit cube.
    UniformPoints {
        n: usize,
        dim: usize,
        #[serde(default = "l2")]
        norm: Norm,
        #[serde(default)]
        seed: u64,
    },
    UniformMetric { n: usize },
    L1Lattice { d: usize, eps: f64 },
    Girth {
        graph: String,
        k: usize,
        #[serde(default)]
        star: bool,
    },
    Hypercube {
        d: usize,
        eps: f64,
        size: usize,
        #[serde(default)]
        seed: u64,
    },
    RandomHst {
        n: usize,
        depth: usize,
        #[serde(default = "default_min_ratio")]
        min_ratio: f64,
        #[serde(default = "default_max_ratio")]
        max_ratio: f64,
        #[serde(default)]
        seed: u64,
    },
}

fn l2() -> Norm {
    Norm::L2
}

fn default_min_ratio() -> f64 {
    1.25
}

fn default_max_ratio() -> f64 {
    4.0
}

/// A materialized instance in arrival order, with its instance-specific baseline.
#[derive(Clone, Debug)]
pub struct BuiltInstance {
    pub id: String,
    pub instance: Instance,
    /// Presentation batch per point, for scheduled generators.
    pub steps: Option<Vec<usize>>,
    /// Named offline network weight (Manhattan network, star), if any.
    pub named_baseline: Option<(String, f64)>,
}

fn star_weight<M: Metric + ?Sized>(m: &M) -> f64 {
    let n = m.len();
    (0..n.saturating_sub(1)).map(|i| m.dist(n - 1, i)).sum()
}

impl InstanceSpec {
    pub fn label(&self) -> String {
        match self {
            InstanceSpec::File { path } => path.display().to_string(),
            InstanceSpec::UniformPoints { n, dim, norm, seed } => format!("uniform-{norm}-d{dim}-n{n}-s{seed}"),
            InstanceSpec::UniformMetric { n } => format!("uniform-metric-n{n}"),
            InstanceSpec::L1Lattice { d, eps } => format!("l1-lattice-d{d}-eps{eps}"),
            InstanceSpec::Girth { graph, k, star } => {
                format!("girth-{graph}-k{k}{}", if *star { "-star" } else { "" })
            }
            InstanceSpec::Hypercube { d, eps, size, seed } => format!("hypercube-d{d}-eps{eps}-m{size}-s{seed}"),
            InstanceSpec::RandomHst { n, depth, seed, .. } => format!("random-hst-n{n}-h{depth}-s{seed}"),
        }
    }

    pub fn build(&self) -> Result<BuiltInstance> {
        let id = self.label();
        let built = match self {
            InstanceSpec::File { path } => {
                let inst = Instance::read(path)?;
                let side = schedule_path(path);
                if side.exists() {
                    let steps = read_schedule(&side)?;
                    if steps.len() != inst.len() {
                        return Err(SpannerError::Format(format!(
                            "schedule has {} steps for {} points",
                            steps.len(),
                            inst.len()
                        )));
                    }
                    let order = order_from_steps(&steps);
                    let sorted: Vec<usize> = order.iter().map(|&i| steps[i]).collect();
                    BuiltInstance {
                        id,
                        instance: inst.permuted(&order),
                        steps: Some(sorted),
                        named_baseline: None,
                    }
                } else {
                    BuiltInstance {
                        id,
                        instance: inst,
                        steps: None,
                        named_baseline: None,
                    }
                }
            }
            InstanceSpec::UniformPoints { n, dim, norm, seed } => {
                if *dim == 0 {
                    return Err(SpannerError::InvalidParameter("dim must be positive".into()));
                }
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                let mut pts = PointSequence::new(*dim, *norm)?;
                for _ in 0..*n {
                    let p: Vec<f64> = (0..*dim).map(|_| rng.gen::<f64>()).collect();
                    pts.push(&p)?;
                }
                BuiltInstance {
                    id,
                    instance: Instance::Points(pts),
                    steps: None,
                    named_baseline: None,
                }
            }
            InstanceSpec::UniformMetric { n } => BuiltInstance {
                id,
                instance: Instance::Matrix(uniform_metric(*n, 1.0)),
                steps: None,
                named_baseline: None,
            },
            InstanceSpec::L1Lattice { d, eps } => {
                let seq = l1_lattice_sequence(*d, *eps)?;
                let manhattan = manhattan_network(&seq).total_weight();
                BuiltInstance {
                    id,
                    instance: Instance::Points(seq.points),
                    steps: Some(seq.steps),
                    named_baseline: Some(("manhattan".into(), manhattan)),
                }
            }
            InstanceSpec::Girth { graph, k, star } => {
                let g = match UnweightedGraph::named(graph) {
                    Some(g) => g,
                    None => {
                        let (n, edges) = parse_edge_list(&std::fs::read_to_string(graph)?)?;
                        UnweightedGraph::from_edges(n, &edges)?
                    }
                };
                let t = truncated_girth_metric(&g, *k)?;
                if *star {
                    let m = star_append(&t.metric, *k)?;
                    let w = star_weight(&m);
                    BuiltInstance {
                        id,
                        instance: Instance::Matrix(m),
                        steps: None,
                        named_baseline: Some(("star".into(), w)),
                    }
                } else {
                    BuiltInstance {
                        id,
                        instance: Instance::Matrix(t.metric),
                        steps: None,
                        named_baseline: None,
                    }
                }
            }
            InstanceSpec::Hypercube { d, eps, size, seed } => {
                let seq = hypercube_pm1_sequence(*d, *eps, *size, *seed)?;
                let w = star_weight(&seq);
                BuiltInstance {
                    id,
                    instance: Instance::Points(seq),
                    steps: None,
                    named_baseline: Some(("star".into(), w)),
                }
            }
            InstanceSpec::RandomHst {
                n,
                depth,
                min_ratio,
                max_ratio,
                seed,
            } => {
                if *n == 0 {
                    return Err(SpannerError::InvalidParameter("random hst needs n >= 1".into()));
                }
                if !(*min_ratio > 1.0 && max_ratio >= min_ratio) {
                    return Err(SpannerError::InvalidParameter("need 1 < min_ratio <= max_ratio".into()));
                }
                BuiltInstance {
                    id,
                    instance: Instance::Hst(random_hst_with_ratio(*n, *depth, *min_ratio, *max_ratio, *seed)),
                    steps: None,
                    named_baseline: None,
                }
            }
        };
        Ok(built)
    }
}

/// Offline references to report against.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BaselineKind {
    Mst,
    OfflineGreedy,
    Named,
}

fn all_baselines() -> Vec<BaselineKind> {
    vec![BaselineKind::Mst, BaselineKind::OfflineGreedy, BaselineKind::Named]
}

fn default_prefix_cap() -> usize {
    DEFAULT_PREFIX_CAP
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub instance: InstanceSpec,
    /// Overrides the generated instance label.
    #[serde(default)]
    pub instance_id: Option<String>,
    pub algorithm: AlgorithmSpec,
    #[serde(default)]
    pub cadence: Cadence,
    /// Largest `n` allowed with prefix cadence.
    #[serde(default = "default_prefix_cap")]
    pub prefix_cap: usize,
    #[serde(default = "all_baselines")]
    pub baselines: Vec<BaselineKind>,
    /// Stretch for the offline greedy baseline; defaults to the algorithm's bound.
    #[serde(default)]
    pub offline_t: Option<f64>,
    /// Reorders the arrival sequence reproducibly.
    #[serde(default)]
    pub shuffle: Option<u64>,
    #[serde(default)]
    pub out: Option<PathBuf>,
}

impl ExperimentSpec {
    pub fn new(instance: InstanceSpec, algorithm: AlgorithmSpec) -> Self {
        Self {
            instance,
            instance_id: None,
            algorithm,
            cadence: Cadence::Final,
            prefix_cap: DEFAULT_PREFIX_CAP,
            baselines: all_baselines(),
            offline_t: None,
            shuffle: None,
            out: None,
        }
    }
}

/// One CSV row per experiment. Columns are fixed; see [`BENCH_COLUMNS`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub instance: String,
    pub algorithm: String,
    pub n: usize,
    pub param_eps: Option<f64>,
    pub param_t: Option<f64>,
    pub param_alpha: Option<f64>,
    pub edges: usize,
    pub weight: f64,
    pub mst_weight: f64,
    pub lightness: f64,
    pub sparsity: f64,
    pub max_stretch: Option<f64>,
    pub baseline_mst: Option<f64>,
    pub baseline_offline_greedy: Option<f64>,
    pub baseline_named: Option<f64>,
    pub ratio_vs_mst: Option<f64>,
    pub ratio_vs_greedy: Option<f64>,
    pub ratio_vs_named: Option<f64>,
    pub status: String,
    pub wall_ms: f64,
}

pub const BENCH_COLUMNS: [&str; 20] = [
    "instance",
    "algorithm",
    "n",
    "param_eps",
    "param_t",
    "param_alpha",
    "edges",
    "weight",
    "mst_weight",
    "lightness",
    "sparsity",
    "max_stretch",
    "baseline_mst",
    "baseline_offline_greedy",
    "baseline_named",
    "ratio_vs_mst",
    "ratio_vs_greedy",
    "ratio_vs_named",
    "status",
    "wall_ms",
];

pub const STATUS_OK: &str = "ok";
pub const STATUS_VIOLATION: &str = "stretch-violation";

impl BenchRow {
    fn failed(instance: String, alg: &AlgorithmSpec, err: &SpannerError) -> Self {
        Self {
            instance,
            algorithm: alg.id().into(),
            n: 0,
            param_eps: alg.eps(),
            param_t: alg.t(),
            param_alpha: alg.alpha(),
            edges: 0,
            weight: f64::NAN,
            mst_weight: f64::NAN,
            lightness: f64::NAN,
            sparsity: f64::NAN,
            max_stretch: None,
            baseline_mst: None,
            baseline_offline_greedy: None,
            baseline_named: None,
            ratio_vs_mst: None,
            ratio_vs_greedy: None,
            ratio_vs_named: None,
            status: format!("error: {err}"),
            wall_ms: 0.0,
        }
    }

    pub fn is_ok(&self) -> bool {
        self.status == STATUS_OK
    }

    /// Largest relative discrepancy between derived and recomputed fields.
    pub fn derived_field_error(&self) -> f64 {
        let rel = |a: f64, b: f64| if a == b { 0.0 } else { ((a - b) / b).abs() };
        let mut worst = rel(self.lightness, ratio(self.weight, self.mst_weight));
        if self.n >= 2 {
            worst = worst.max(rel(self.sparsity, self.edges as f64 / (self.n - 1) as f64));
        }
        for (r, b) in [
            (self.ratio_vs_mst, self.baseline_mst),
            (self.ratio_vs_greedy, self.baseline_offline_greedy),
            (self.ratio_vs_named, self.baseline_named),
        ] {
            match (r, b) {
                (Some(r), Some(b)) => worst = worst.max(rel(r, ratio(self.weight, b))),
                (None, None) => {}
                _ => return f64::INFINITY,
            }
        }
        worst
    }
}

/// Arrival permutation for a `shuffle` seed.
pub fn shuffle_order(n: usize, seed: u64) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    order
}

/// Runs one experiment. Returns no rows for an empty instance.
///
/// A stretch violation yields a row with status `stretch-violation`; other
/// failures are errors.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<Vec<BenchRow>> {
    let built = spec.instance.build()?;
    let mut inst = built.instance;
    if let Some(seed) = spec.shuffle {
        inst = inst.permuted(&shuffle_order(inst.len(), seed));
    }
    let n = inst.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    if spec.cadence == Cadence::Prefix && n > spec.prefix_cap {
        return Err(SpannerError::InvalidParameter(format!(
            "prefix verification of {n} points exceeds the cap of {}",
            spec.prefix_cap
        )));
    }
    let alg = &spec.algorithm;
    let start = Instant::now();
    let outcome = run_online(alg, &inst, spec.cadence)?;
    let wall_ms = start.elapsed().as_secs_f64() * 1e3;
    let g = &outcome.graph;

    let weight = g.total_weight();
    let mst = mst_weight(&inst);
    let wants = |k: BaselineKind| spec.baselines.contains(&k);
    let baseline_mst = wants(BaselineKind::Mst).then_some(mst);
    let baseline_offline_greedy = if wants(BaselineKind::OfflineGreedy) {
        let t = spec.offline_t.unwrap_or(outcome.bound);
        Some(offline_greedy(&inst, t)?.total_weight())
    } else {
        None
    };
    let baseline_named = if wants(BaselineKind::Named) {
        built.named_baseline.map(|(_, w)| w)
    } else {
        None
    };
    let status = if outcome.violated() {
        let (prefix, rep) = outcome.violation.unwrap();
        log::error!(
            "{}: stretch {} exceeds {} at prefix {prefix} (pair {:?})",
            built.id,
            rep.max_stretch,
            outcome.bound,
            rep.witness
        );
        STATUS_VIOLATION.to_string()
    } else {
        STATUS_OK.to_string()
    };
    Ok(vec![BenchRow {
        instance: spec.instance_id.clone().unwrap_or(built.id),
        algorithm: alg.id().into(),
        n,
        param_eps: alg.eps(),
        param_t: alg.t(),
        param_alpha: alg.alpha(),
        edges: g.edge_count(),
        weight,
        mst_weight: mst,
        lightness: ratio(weight, mst),
        sparsity: if n < 2 { 1.0 } else { g.edge_count() as f64 / (n - 1) as f64 },
        max_stretch: outcome.stretch.map(|s| s.max_stretch),
        baseline_mst,
        baseline_offline_greedy,
        baseline_named,
        ratio_vs_mst: baseline_mst.map(|b| ratio(weight, b)),
        ratio_vs_greedy: baseline_offline_greedy.map(|b| ratio(weight, b)),
        ratio_vs_named: baseline_named.map(|b| ratio(weight, b)),
        status,
        wall_ms,
    }])
}

/// CSV text for `rows`: version comment, header, one line per row.
pub fn rows_to_csv(rows: &[BenchRow]) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    writeln!(buf, "{CSV_VERSION_LINE}")?;
    {
        let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(&mut buf);
        w.write_record(BENCH_COLUMNS)?;
        for r in rows {
            w.serialize(r)?;
        }
        w.flush()?;
    }
    Ok(buf)
}

/// Writes the CSV through a temporary file, so the target only ever holds complete rows.
pub fn write_rows(path: &Path, rows: &[BenchRow]) -> Result<()> {
    write_atomic(path, &rows_to_csv(rows)?)
}

pub fn read_rows(text: &str) -> Result<Vec<BenchRow>> {
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if header != BENCH_COLUMNS {
        return Err(SpannerError::Format(format!("unexpected bench header {header:?}")));
    }
    r.deserialize().map(|row| row.map_err(SpannerError::from)).collect()
}

/// A spec template and values to substitute at dotted paths
/// (for example `"algorithm.eps"` or `"instance.n"`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub base: ExperimentSpec,
    #[serde(default)]
    pub grid: BTreeMap<String, Vec<Value>>,
}

fn set_path(doc: &mut Value, path: &str, value: Value) -> Result<()> {
    let mut cur = doc;
    let parts: Vec<&str> = path.split('.').collect();
    for (i, part) in parts.iter().enumerate() {
        let obj = cur
            .as_object_mut()
            .ok_or_else(|| SpannerError::Format(format!("grid path {path:?} does not name an object field")))?;
        if i + 1 == parts.len() {
            obj.insert(part.to_string(), value);
            return Ok(());
        }
        cur = obj
            .get_mut(*part)
            .ok_or_else(|| SpannerError::Format(format!("grid path {path:?}: no field {part:?}")))?;
    }
    unreachable!()
}

/// The cross product of the grid in deterministic order (keys sorted, later
/// keys varying fastest), with duplicate cells removed.
pub fn expand_sweep(sweep: &SweepSpec) -> Result<Vec<ExperimentSpec>> {
    let base = serde_json::to_value(&sweep.base)?;
    let mut docs = vec![base];
    for (path, values) in &sweep.grid {
        let mut next = Vec::with_capacity(docs.len() * values.len());
        for doc in &docs {
            for v in values {
                let mut d = doc.clone();
                set_path(&mut d, path, v.clone())?;
                next.push(d);
            }
        }
        docs = next;
    }
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for d in docs {
        let key = d.to_string();
        if !seen.insert(key.clone()) {
            log::warn!("duplicate sweep cell skipped: {key}");
            continue;
        }
        out.push(serde_json::from_value(d)?);
    }
    Ok(out)
}

/// Runs every cell (in parallel) and returns rows in grid order. A failing
/// cell becomes an `error:` row and the sweep continues.
pub fn sweep(sweep: &SweepSpec) -> Result<Vec<BenchRow>> {
    let cells = expand_sweep(sweep)?;
    let rows: Vec<Vec<BenchRow>> = cells
        .par_iter()
        .map(|spec| {
            run_experiment(spec).unwrap_or_else(|e| {
                log::error!("sweep cell {} failed: {e}", spec.instance.label());
                vec![BenchRow::failed(
                    spec.instance_id.clone().unwrap_or_else(|| spec.instance.label()),
                    &spec.algorithm,
                    &e,
                )]
            })
        })
        .collect();
    Ok(rows.into_iter().flatten().collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lattice_sweep() -> SweepSpec {
        let mut grid = BTreeMap::new();
        grid.insert(
            "instance.eps".to_string(),
            vec![Value::from(0.25), Value::from(0.125), Value::from(0.0625)],
        );
        SweepSpec {
            base: ExperimentSpec::new(
                InstanceSpec::L1Lattice { d: 2, eps: 0.25 },
                AlgorithmSpec::Greedy { t: 1.25 },
            ),
            grid,
        }
    }

    #[test]
    fn lattice_sweep_rows() {
        let rows = sweep(&lattice_sweep()).unwrap();
        assert_eq!(rows.len(), 3);
        assert_eq!(rows[0].n, 4);
        assert_eq!(rows[2].n, 64);
        for r in &rows {
            assert!(r.is_ok(), "{}", r.status);
            assert!(r.lightness >= 1.0);
            assert!(r.baseline_named.is_some());
            assert!(r.derived_field_error() <= 1e-9);
        }
    }

    #[test]
    fn duplicate_cells_removed() {
        let mut s = lattice_sweep();
        s.grid.get_mut("instance.eps").unwrap().push(Value::from(0.25));
        assert_eq!(expand_sweep(&s).unwrap().len(), 3);
        s.grid.insert("nope.x".into(), vec![Value::from(1)]);
        assert!(expand_sweep(&s).is_err());
    }

    #[test]
    fn csv_round_trip_and_empty() {
        let rows = sweep(&lattice_sweep()).unwrap();
        let text = String::from_utf8(rows_to_csv(&rows).unwrap()).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some(CSV_VERSION_LINE));
        assert_eq!(lines.next().unwrap(), BENCH_COLUMNS.join(","));
        assert_eq!(read_rows(&text).unwrap(), rows);

        let spec = ExperimentSpec::new(InstanceSpec::UniformMetric { n: 0 }, AlgorithmSpec::Greedy { t: 2.0 });
        let empty = run_experiment(&spec).unwrap();
        assert!(empty.is_empty());
        let text = String::from_utf8(rows_to_csv(&empty).unwrap()).unwrap();
        assert_eq!(text.lines().count(), 2);
    }

    #[test]
    fn failing_cell_is_recorded() {
        let mut s = lattice_sweep();
        s.grid.insert("instance.eps".into(), vec![Value::from(0.25), Value::from(0.9)]);
        let rows = sweep(&s).unwrap();
        assert_eq!(rows.len(), 2);
        assert!(rows[0].is_ok());
        assert!(rows[1].status.starts_with("error"));
    }

    #[test]
    fn prefix_cap_enforced() {
        let mut spec = ExperimentSpec::new(
            InstanceSpec::UniformPoints { n: 20, dim: 2, norm: Norm::L2, seed: 1 },
            AlgorithmSpec::Alg1 { eps: 0.5 },
        );
        spec.cadence = Cadence::Prefix;
        spec.prefix_cap = 10;
        assert!(run_experiment(&spec).is_err());
        spec.prefix_cap = 20;
        assert!(run_experiment(&spec).unwrap()[0].is_ok());
    }
}
