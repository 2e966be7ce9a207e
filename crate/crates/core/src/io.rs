//! Instance files, edge and trace CSVs, schedule sidecars.

use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Result, SpannerError};
use crate::graph::Edge;
use crate::hst::{HstNodeSpec, HstTree};
use crate::metric::{DistanceMatrix, Metric, Norm, PointSequence};
use crate::yao::LevelEdge;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum InstanceFile {
    Points {
        dim: usize,
        norm: Norm,
        points: Vec<Vec<f64>>,
    },
    Matrix {
        dist: Vec<Vec<f64>>,
    },
    Hst {
        tree: HstNodeSpec,
    },
}

/// A finite metric as read from or written to an instance file.
#[derive(Clone, Debug, PartialEq)]
pub enum Instance {
    Points(PointSequence),
    Matrix(DistanceMatrix),
    Hst(HstTree),
}

impl Instance {
    pub fn kind(&self) -> &'static str {
        match self {
            Instance::Points(_) => "points",
            Instance::Matrix(_) => "matrix",
            Instance::Hst(_) => "hst",
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: InstanceFile = serde_json::from_str(text)?;
        Ok(match file {
            InstanceFile::Points { dim, norm, points } => {
                if dim == 0 {
                    return Err(SpannerError::Format("dim must be positive".into()));
                }
                Instance::Points(PointSequence::from_points(dim, norm, &points)?)
            }
            InstanceFile::Matrix { dist } => {
                let m = DistanceMatrix::from_rows(&dist)?;
                for (i, row) in dist.iter().enumerate() {
                    if row[i] != 0.0 {
                        return Err(SpannerError::MetricViolation(format!("d({i},{i}) = {}", row[i])));
                    }
                    for (j, &d) in row.iter().enumerate() {
                        if d < 0.0 || d != dist[j][i] {
                            return Err(SpannerError::MetricViolation(format!(
                                "d({i},{j}) = {d}, d({j},{i}) = {}",
                                dist[j][i]
                            )));
                        }
                    }
                }
                Instance::Matrix(m)
            }
            InstanceFile::Hst { tree } => Instance::Hst(HstTree::from_spec(&tree)?),
        })
    }

    pub fn to_json(&self) -> Result<String> {
        let file = match self {
            Instance::Points(p) => InstanceFile::Points {
                dim: p.dim(),
                norm: p.norm(),
                points: p.iter().map(<[f64]>::to_vec).collect(),
            },
            Instance::Matrix(m) => InstanceFile::Matrix { dist: m.rows() },
            Instance::Hst(t) => InstanceFile::Hst { tree: t.to_spec() },
        };
        Ok(serde_json::to_string(&file)?)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let mut text = String::new();
        open_input(path)?.read_to_string(&mut text)?;
        Self::from_json(&text)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        write_atomic(path, self.to_json()?.as_bytes())
    }

    /// Reorders the points; `order[k]` is the old index of the new `k`-th point.
    pub fn permuted(&self, order: &[usize]) -> Self {
        match self {
            Instance::Points(p) => Instance::Points(p.permuted(order)),
            Instance::Matrix(m) => Instance::Matrix(m.permuted(order)),
            Instance::Hst(t) => Instance::Hst(t.permuted(order)),
        }
    }
}

impl Metric for Instance {
    fn len(&self) -> usize {
        match self {
            Instance::Points(p) => p.len(),
            Instance::Matrix(m) => m.len(),
            Instance::Hst(t) => t.len(),
        }
    }

    fn dist(&self, i: usize, j: usize) -> f64 {
        match self {
            Instance::Points(p) => p.dist(i, j),
            Instance::Matrix(m) => m.dist(i, j),
            Instance::Hst(t) => t.dist(i, j),
        }
    }
}

fn open_input(path: &Path) -> Result<Box<dyn Read>> {
    if path.as_os_str() == "-" {
        Ok(Box::new(std::io::stdin()))
    } else {
        Ok(Box::new(fs::File::open(path)?))
    }
}

/// Writes through a temporary file in the same directory and renames it into
/// place, so readers never see a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let tmp = dir.join(format!(".{name}.tmp{}", std::process::id()));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

/// `foo.json` -> `foo.schedule.json`.
pub fn schedule_path(instance: &Path) -> PathBuf {
    let stem = instance.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    instance.with_file_name(format!("{stem}.schedule.json"))
}

#[derive(Serialize, Deserialize)]
struct ScheduleFile {
    steps: Vec<usize>,
}

pub fn write_schedule(path: &Path, steps: &[usize]) -> Result<()> {
    let body = serde_json::to_string(&ScheduleFile { steps: steps.to_vec() })?;
    write_atomic(path, body.as_bytes())
}

pub fn read_schedule(path: &Path) -> Result<Vec<usize>> {
    let f: ScheduleFile = serde_json::from_str(&fs::read_to_string(path)?)?;
    Ok(f.steps)
}

/// Arrival order implied by per-point steps: by step, then file position.
pub fn order_from_steps(steps: &[usize]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..steps.len()).collect();
    order.sort_by_key(|&i| (steps[i], i));
    order
}

pub fn write_edges_csv<W: Write>(out: W, edges: &[Edge]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["u", "v", "w"])?;
    for e in edges {
        w.serialize((e.u, e.v, e.w))?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_edges_csv<R: Read>(input: R) -> Result<Vec<Edge>> {
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers()?.clone();
    if header.iter().collect::<Vec<_>>() != ["u", "v", "w"] {
        return Err(SpannerError::Format(format!("expected header u,v,w, got {:?}", header)));
    }
    let mut out = Vec::new();
    for rec in r.deserialize() {
        let (u, v, w): (usize, usize, f64) = rec?;
        out.push(Edge { u, v, w });
    }
    Ok(out)
}

pub fn write_trace_csv<W: Write>(out: W, trace: &[LevelEdge]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["step", "level", "u", "v", "w"])?;
    for e in trace {
        w.serialize((e.step, e.level, e.u, e.v, e.w))?;
    }
    w.flush()?;
    Ok(())
}

/// Parses `u v` or `u,v` per line; `#` starts a comment. Returns the vertex
/// count (one more than the largest index) and the edges.
pub fn parse_edge_list(text: &str) -> Result<(usize, Vec<(usize, usize)>)> {
    let mut edges = Vec::new();
    let mut n = 0;
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split(|c: char| c == ',' || c.is_whitespace()).filter(|s| !s.is_empty()).collect();
        let parse = |s: &str| {
            s.parse::<usize>()
                .map_err(|_| SpannerError::Format(format!("line {}: bad vertex {s:?}", lineno + 1)))
        };
        if parts.len() != 2 {
            return Err(SpannerError::Format(format!("line {}: expected two vertices", lineno + 1)));
        }
        let (u, v) = (parse(parts[0])?, parse(parts[1])?);
        n = n.max(u + 1).max(v + 1);
        edges.push((u, v));
    }
    Ok((n, edges))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hst::random_hst;

    #[test]
    fn instance_round_trips() {
        let pts = PointSequence::from_points(2, Norm::L1, &[[0.0, 1.5], [2.0, -1.0]]).unwrap();
        for inst in [
            Instance::Points(pts),
            Instance::Matrix(crate::metric::uniform_metric(3, 2.0)),
            Instance::Hst(random_hst(10, 3, 4)),
        ] {
            let back = Instance::from_json(&inst.to_json().unwrap()).unwrap();
            assert_eq!(back, inst);
        }
    }

    #[test]
    fn instance_format_examples() {
        let p = Instance::from_json(r#"{"kind":"points","dim":2,"norm":"l2","points":[[0,0],[3,4]]}"#).unwrap();
        assert_eq!(p.dist(0, 1), 5.0);
        let m = Instance::from_json(r#"{"kind":"matrix","dist":[[0,1],[1,0]]}"#).unwrap();
        assert_eq!(m.kind(), "matrix");
        let h = Instance::from_json(r#"{"kind":"hst","tree":{"label":2,"children":[{"leaf":1},{"leaf":0}]}}"#)
            .unwrap();
        assert_eq!(h.dist(0, 1), 2.0);
        assert!(Instance::from_json(r#"{"kind":"points","dim":2,"norm":"l3","points":[]}"#).is_err());
        assert!(Instance::from_json(r#"{"kind":"matrix","dist":[[0,1],[2,0]]}"#).is_err());
        assert!(Instance::from_json(r#"{"kind":"matrix","dist":[[0]],"extra":1}"#).is_err());
    }

    #[test]
    fn edges_csv_round_trip() {
        let edges = vec![Edge { u: 0, v: 2, w: 1.5 }, Edge { u: 1, v: 2, w: 0.25 }];
        let mut buf = Vec::new();
        write_edges_csv(&mut buf, &edges).unwrap();
        assert!(String::from_utf8(buf.clone()).unwrap().starts_with("u,v,w\n0,2,1.5\n"));
        assert_eq!(read_edges_csv(&buf[..]).unwrap(), edges);
    }

    #[test]
    fn trace_csv_leaves_duplicate_level_blank() {
        let trace = [
            LevelEdge { step: 1, level: Some(-2), u: 0, v: 1, w: 1.0 },
            LevelEdge { step: 2, level: None, u: 0, v: 2, w: 0.0 },
        ];
        let mut buf = Vec::new();
        write_trace_csv(&mut buf, &trace).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "step,level,u,v,w\n1,-2,0,1,1.0\n2,,0,2,0.0\n");
    }

    #[test]
    fn schedule_sidecar() {
        let dir = tempfile::tempdir().unwrap();
        let inst = dir.path().join("lattice.json");
        let side = schedule_path(&inst);
        assert_eq!(side.file_name().unwrap(), "lattice.schedule.json");
        write_schedule(&side, &[1, 0, 1, 0]).unwrap();
        let steps = read_schedule(&side).unwrap();
        assert_eq!(order_from_steps(&steps), vec![1, 3, 0, 2]);
    }

    #[test]
    fn edge_lists() {
        let (n, e) = parse_edge_list("# ring\n0 1\n1,2\n2 0 # close\n").unwrap();
        assert_eq!(n, 3);
        assert_eq!(e, vec![(0, 1), (1, 2), (2, 0)]);
        assert!(parse_edge_list("0 1 2\n").is_err());
    }
}
