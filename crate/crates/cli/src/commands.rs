use std::io::Write;
use std::path::Path;

use anyhow::{anyhow, Context};
use serde::Serialize;

use spanner_core::eval::{
    rows_to_csv, run_online, shuffle_order, sweep, AlgorithmSpec, Cadence, ExperimentSpec, InstanceSpec, SweepSpec,
    STATUS_VIOLATION,
};
use spanner_core::io::{
    order_from_steps, read_edges_csv, read_schedule, schedule_path, write_atomic, write_edges_csv, write_schedule,
    write_trace_csv, Instance,
};
use spanner_core::metric::{Metric, Norm, REL_TOL};
use spanner_core::verify::{max_stretch, metrics_report, StretchReport};
use spanner_core::{Edge, SpannerError, SpannerGraph};

use crate::{Cli, Command, Format, Generator, NormArg, RunArgs, VerifyMode};

pub const EXIT_USAGE: u8 = 1;
pub const EXIT_STRETCH: u8 = 2;
pub const EXIT_GENERATOR: u8 = 3;

pub struct Failure {
    pub code: u8,
    pub error: anyhow::Error,
}

trait Code<T> {
    fn code(self, code: u8) -> Result<T, Failure>;
}

impl<T, E: Into<anyhow::Error>> Code<T> for Result<T, E> {
    fn code(self, code: u8) -> Result<T, Failure> {
        self.map_err(|e| Failure { code, error: e.into() })
    }
}

pub fn dispatch(cli: &Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::Alg1 { eps, trace, run } => run_algorithm(cli, AlgorithmSpec::Alg1 { eps: *eps }, run, trace.as_deref()),
        Command::Greedy { t, run } => run_algorithm(cli, AlgorithmSpec::Greedy { t: *t }, run, None),
        Command::OfflineGreedy { t, run } => run_algorithm(cli, AlgorithmSpec::OfflineGreedy { t: *t }, run, None),
        Command::Hst { alpha, run } => run_algorithm(cli, AlgorithmSpec::Hst { alpha: *alpha }, run, None),
        Command::HstTree { alpha, run } => run_algorithm(cli, AlgorithmSpec::HstTree { alpha: *alpha }, run, None),
        Command::Hst2e { eps, run } => run_algorithm(cli, AlgorithmSpec::Hst2e { eps: *eps }, run, None),
        Command::Gen { generator } => generate(cli, generator),
        Command::Bench { spec } => bench(cli, spec),
        Command::Verify { input, spanner, bound } => verify(cli, input, spanner, *bound),
    }
}

/// Writes to `--out` (atomically) or standard output.
fn emit(cli: &Cli, bytes: &[u8]) -> Result<(), Failure> {
    match &cli.out {
        Some(path) => write_atomic(path, bytes).with_context(|| format!("writing {}", path.display())).code(EXIT_USAGE),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes).and_then(|_| out.flush()).code(EXIT_USAGE)
        }
    }
}

fn table<T: Serialize>(format: Format, rows: &[T], csv_body: impl FnOnce() -> Result<Vec<u8>, SpannerError>) -> Result<Vec<u8>, Failure> {
    match format {
        Format::Csv => csv_body().code(EXIT_USAGE),
        Format::Json => serde_json::to_vec(rows).code(EXIT_USAGE),
    }
}

fn check_parameters(alg: &AlgorithmSpec) -> Result<(), Failure> {
    let bad = |what: String| Err(Failure { code: EXIT_USAGE, error: anyhow!(what) });
    match *alg {
        AlgorithmSpec::Alg1 { eps } if !(eps > 0.0 && eps < 1.0) => bad(format!("--eps {eps} must lie in (0, 1)")),
        AlgorithmSpec::Greedy { t } | AlgorithmSpec::OfflineGreedy { t } if !(t > 1.0) => {
            bad(format!("--t {t} must exceed 1"))
        }
        AlgorithmSpec::Hst { alpha } | AlgorithmSpec::HstTree { alpha } if !(alpha > 1.0) => {
            bad(format!("--alpha {alpha} must exceed 1"))
        }
        AlgorithmSpec::Hst2e { eps } if !(eps > 0.0 && eps < 0.5) => bad(format!("--eps {eps} must lie in (0, 1/2)")),
        _ => Ok(()),
    }
}

fn run_algorithm(cli: &Cli, alg: AlgorithmSpec, args: &RunArgs, trace_path: Option<&Path>) -> Result<(), Failure> {
    check_parameters(&alg)?;
    let inst = Instance::read(&args.input)
        .with_context(|| format!("reading {}", args.input.display()))
        .code(EXIT_USAGE)?;
    let n = inst.len();

    // order[k] is the file index of the k-th arrival.
    let mut order: Vec<usize> = (0..n).collect();
    let side = schedule_path(&args.input);
    if args.input.as_os_str() != "-" && side.exists() {
        let steps = read_schedule(&side).code(EXIT_USAGE)?;
        if steps.len() != n {
            return Err(Failure {
                code: EXIT_USAGE,
                error: anyhow!("{} has {} steps for {n} points", side.display(), steps.len()),
            });
        }
        order = order_from_steps(&steps);
        log::info!("arrival order from {}", side.display());
    }
    if let Some(seed) = cli.shuffle {
        order = shuffle_order(n, seed).into_iter().map(|k| order[k]).collect();
    }
    let arrival = inst.permuted(&order);

    let cadence = match cli.verify {
        VerifyMode::None => Cadence::None,
        VerifyMode::Final => Cadence::Final,
        VerifyMode::Prefix => Cadence::Prefix,
    };
    if cadence == Cadence::Prefix && n > cli.prefix_cap {
        return Err(Failure {
            code: EXIT_USAGE,
            error: anyhow!("--verify prefix on {n} points exceeds --prefix-cap {}", cli.prefix_cap),
        });
    }
    let outcome = run_online(&alg, &arrival, cadence).code(EXIT_USAGE)?;

    let edges: Vec<Edge> = outcome
        .graph
        .edges()
        .iter()
        .map(|e| Edge { u: order[e.u], v: order[e.v], w: e.w })
        .collect();
    let body = table(cli.format, &edges, || {
        let mut buf = Vec::new();
        write_edges_csv(&mut buf, &edges)?;
        Ok(buf)
    })?;
    emit(cli, &body)?;

    if let Some(path) = trace_path {
        let mut trace = outcome.trace.clone();
        for e in &mut trace {
            e.u = order[e.u];
            e.v = order[e.v];
        }
        let mut buf = Vec::new();
        write_trace_csv(&mut buf, &trace).code(EXIT_USAGE)?;
        write_atomic(path, &buf).code(EXIT_USAGE)?;
    }
    if let Some(path) = &args.report {
        let rep = metrics_report(&outcome.graph, &arrival, &[]).code(EXIT_USAGE)?;
        write_atomic(path, &serde_json::to_vec_pretty(&rep).code(EXIT_USAGE)?).code(EXIT_USAGE)?;
    }

    eprintln!(
        "{}: n = {n}, edges = {}, weight = {}",
        alg.id(),
        outcome.graph.edge_count(),
        outcome.graph.total_weight()
    );
    if let Some(s) = outcome.stretch {
        eprintln!(
            "stretch {} (bound {}, {} prefixes checked)",
            s.max_stretch, outcome.bound, outcome.prefixes_checked
        );
    }
    if let Some((prefix, rep)) = outcome.violation {
        let (u, v) = rep.witness.map(|(u, v)| (order[u], order[v])).unwrap_or((0, 0));
        let error = anyhow::Error::from(SpannerError::StretchViolation {
            measured: rep.max_stretch,
            bound: outcome.bound,
            u,
            v,
        })
        .context(format!("after {prefix} points"));
        return Err(Failure { code: EXIT_STRETCH, error });
    }
    Ok(())
}

fn generate(cli: &Cli, generator: &Generator) -> Result<(), Failure> {
    let spec = match *generator {
        Generator::L1Lattice { d, eps } => InstanceSpec::L1Lattice { d, eps },
        Generator::Girth { ref graph, k, star } => InstanceSpec::Girth {
            graph: graph.clone(),
            k,
            star,
        },
        Generator::Hypercube { d, eps, size } => InstanceSpec::Hypercube {
            d,
            eps,
            size,
            seed: cli.seed,
        },
        Generator::Uniform { n, dim, norm } => InstanceSpec::UniformPoints {
            n,
            dim,
            norm: match norm {
                NormArg::L1 => Norm::L1,
                NormArg::L2 => Norm::L2,
            },
            seed: cli.seed,
        },
        Generator::Hst {
            n,
            depth,
            min_ratio,
            max_ratio,
        } => InstanceSpec::RandomHst {
            n,
            depth,
            min_ratio,
            max_ratio,
            seed: cli.seed,
        },
    };
    let built = spec.build().code(EXIT_GENERATOR)?;
    if let Some((name, w)) = &built.named_baseline {
        eprintln!("baseline {name}: weight {w}");
    }
    emit(cli, built.instance.to_json().code(EXIT_USAGE)?.as_bytes())?;
    if let Some(steps) = &built.steps {
        match &cli.out {
            Some(out) => write_schedule(&schedule_path(out), steps).code(EXIT_USAGE)?,
            None => log::warn!("schedule sidecar needs --out; points are already in arrival order"),
        }
    }
    Ok(())
}

fn bench(cli: &Cli, spec_path: &Path) -> Result<(), Failure> {
    let text = std::fs::read_to_string(spec_path)
        .with_context(|| format!("reading {}", spec_path.display()))
        .code(EXIT_USAGE)?;
    let sweep_spec = match serde_json::from_str::<SweepSpec>(&text) {
        Ok(s) => s,
        Err(sweep_err) => match serde_json::from_str::<ExperimentSpec>(&text) {
            Ok(base) => SweepSpec {
                base,
                grid: Default::default(),
            },
            Err(single_err) => {
                return Err(Failure {
                    code: EXIT_USAGE,
                    error: anyhow!("not a sweep spec ({sweep_err}) nor an experiment spec ({single_err})"),
                })
            }
        },
    };
    let rows = sweep(&sweep_spec).code(EXIT_USAGE)?;
    let body = table(cli.format, &rows, || rows_to_csv(&rows))?;
    match (&cli.out, &sweep_spec.base.out) {
        (None, Some(path)) => write_atomic(path, &body).code(EXIT_USAGE)?,
        _ => emit(cli, &body)?,
    }
    let failed = rows.iter().filter(|r| !r.is_ok()).count();
    eprintln!("{} rows, {failed} not ok", rows.len());
    if rows.iter().any(|r| r.status == STATUS_VIOLATION) {
        return Err(Failure {
            code: EXIT_STRETCH,
            error: anyhow!("a stretch bound was violated"),
        });
    }
    Ok(())
}

#[derive(Serialize)]
struct VerifyOutput {
    n: usize,
    edges: usize,
    stretch: StretchReport,
    bound: Option<f64>,
    within_bound: Option<bool>,
    report: Option<spanner_core::MetricsReport>,
}

fn verify(cli: &Cli, input: &Path, spanner: &Path, bound: Option<f64>) -> Result<(), Failure> {
    let inst = Instance::read(input)
        .with_context(|| format!("reading {}", input.display()))
        .code(EXIT_USAGE)?;
    let file = std::fs::File::open(spanner)
        .with_context(|| format!("reading {}", spanner.display()))
        .code(EXIT_USAGE)?;
    let edges = read_edges_csv(file).code(EXIT_USAGE)?;
    let n = inst.len();
    let mut g = SpannerGraph::new(n);
    for e in &edges {
        if e.u >= n || e.v >= n || e.u == e.v {
            return Err(Failure {
                code: EXIT_USAGE,
                error: anyhow!("edge ({}, {}) is not a pair of the {n} points", e.u, e.v),
            });
        }
        let d = inst.dist(e.u, e.v);
        if (e.w - d).abs() > REL_TOL * d.max(e.w) {
            return Err(Failure {
                code: EXIT_USAGE,
                error: anyhow!("edge ({}, {}) has weight {} but the points are {d} apart", e.u, e.v, e.w),
            });
        }
        g.add_edge(e.u, e.v, d);
    }
    let stretch = max_stretch(&g, &inst);
    let within = bound.map(|b| stretch.within(b));
    let out = VerifyOutput {
        n,
        edges: g.edge_count(),
        stretch,
        bound,
        within_bound: within,
        report: metrics_report(&g, &inst, &[]).ok(),
    };
    emit(cli, &serde_json::to_vec_pretty(&out).code(EXIT_USAGE)?)?;
    if within == Some(false) {
        return Err(Failure {
            code: EXIT_STRETCH,
            error: anyhow!(
                "stretch {} exceeds bound {} at pair {:?}",
                stretch.max_stretch,
                bound.unwrap(),
                stretch.witness
            ),
        });
    }
    Ok(())
}
