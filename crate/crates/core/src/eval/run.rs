use serde::{Deserialize, Serialize};

use crate::error::{Result, SpannerError};
use crate::graph::SpannerGraph;
use crate::greedy::GreedyState;
use crate::hst::{
    alpha_pipeline_stretch_bound, alpha_tree_stretch_bound, multiscale_stretch_bound, AlphaRoundedState,
    MultiScaleState, NearestFirstTree,
};
use crate::io::Instance;
use crate::metric::{Metric, Norm};
use crate::verify::{max_stretch, PrefixVerifier, StretchReport};
use crate::yao::{Alg1State, LevelEdge};

use super::offline_greedy;

/// An algorithm and its parameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "id", rename_all = "kebab-case", deny_unknown_fields)]
pub enum AlgorithmSpec {
    /// Grid + near-sighted Yao graphs on Euclidean points.
    Alg1 { eps: f64 },
    /// Ordered greedy on any metric.
    Greedy { t: f64 },
    /// Classic offline greedy (not online; used as a reference).
    OfflineGreedy { t: f64 },
    /// Nearest-first tree after rounding distances up to powers of `alpha`.
    Hst { alpha: f64 },
    /// Nearest-first tree directly on an `alpha`-HST.
    HstTree { alpha: f64 },
    /// Union of nearest-first trees over shifted geometric roundings.
    #[serde(rename = "hst2e")]
    Hst2e { eps: f64 },
}

impl AlgorithmSpec {
    pub fn id(&self) -> &'static str {
        match self {
            AlgorithmSpec::Alg1 { .. } => "alg1",
            AlgorithmSpec::Greedy { .. } => "greedy",
            AlgorithmSpec::OfflineGreedy { .. } => "offline-greedy",
            AlgorithmSpec::Hst { .. } => "hst",
            AlgorithmSpec::HstTree { .. } => "hst-tree",
            AlgorithmSpec::Hst2e { .. } => "hst2e",
        }
    }

    /// Stretch the algorithm guarantees on compatible inputs.
    pub fn stretch_bound(&self) -> f64 {
        match *self {
            AlgorithmSpec::Alg1 { eps } => (1.0 + eps) * (1.0 + eps),
            AlgorithmSpec::Greedy { t } | AlgorithmSpec::OfflineGreedy { t } => t,
            AlgorithmSpec::Hst { alpha } => alpha_pipeline_stretch_bound(alpha),
            AlgorithmSpec::HstTree { alpha } => alpha_tree_stretch_bound(alpha),
            AlgorithmSpec::Hst2e { eps } => multiscale_stretch_bound(eps),
        }
    }

    pub fn eps(&self) -> Option<f64> {
        match *self {
            AlgorithmSpec::Alg1 { eps } | AlgorithmSpec::Hst2e { eps } => Some(eps),
            _ => None,
        }
    }

    pub fn t(&self) -> Option<f64> {
        match *self {
            AlgorithmSpec::Greedy { t } | AlgorithmSpec::OfflineGreedy { t } => Some(t),
            _ => None,
        }
    }

    pub fn alpha(&self) -> Option<f64> {
        match *self {
            AlgorithmSpec::Hst { alpha } | AlgorithmSpec::HstTree { alpha } => Some(alpha),
            _ => None,
        }
    }

    /// Rejects instance kinds the algorithm cannot run on.
    pub fn check_compatible(&self, inst: &Instance) -> Result<()> {
        match (self, inst) {
            (AlgorithmSpec::Alg1 { .. }, Instance::Points(p)) if p.norm() == Norm::L2 => Ok(()),
            (AlgorithmSpec::Alg1 { .. }, _) => Err(SpannerError::InvalidParameter(
                "alg1 needs a points instance with norm l2".into(),
            )),
            (AlgorithmSpec::HstTree { alpha }, Instance::Hst(t)) => {
                if t.is_alpha_hst(*alpha) {
                    Ok(())
                } else {
                    Err(SpannerError::InvalidParameter(format!(
                        "tree is not a {alpha}-HST (smallest label ratio {})",
                        t.min_label_ratio()
                    )))
                }
            }
            (AlgorithmSpec::HstTree { .. }, _) => Err(SpannerError::InvalidParameter(
                "hst-tree needs an hst instance".into(),
            )),
            _ => Ok(()),
        }
    }
}

/// How often stretch is verified during a run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Cadence {
    None,
    #[default]
    #[serde(alias = "final-only")]
    Final,
    #[serde(alias = "every-prefix")]
    Prefix,
}

#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub graph: SpannerGraph,
    pub bound: f64,
    /// Worst stretch observed, `None` when not verified.
    pub stretch: Option<StretchReport>,
    pub prefixes_checked: usize,
    /// Prefix length and report at the first bound violation.
    pub violation: Option<(usize, StretchReport)>,
    /// Per-level edges, for `alg1` only.
    pub trace: Vec<LevelEdge>,
}

impl RunOutcome {
    pub fn violated(&self) -> bool {
        self.violation.is_some()
    }
}

enum Online {
    Alg1(Box<Alg1State>),
    Greedy(GreedyState),
    Hst(AlphaRoundedState),
    HstTree(NearestFirstTree),
    Hst2e(MultiScaleState),
}

impl Online {
    fn graph(&self) -> &SpannerGraph {
        match self {
            Online::Alg1(s) => s.spanner(),
            Online::Greedy(s) => s.spanner(),
            Online::Hst(s) => s.spanner(),
            Online::HstTree(s) => s.spanner(),
            Online::Hst2e(s) => s.spanner(),
        }
    }
}

/// Replays `inst` in index order through `alg`, verifying at `cadence`.
///
/// Prefix verification stops the run at the first violating prefix.
pub fn run_online(alg: &AlgorithmSpec, inst: &Instance, cadence: Cadence) -> Result<RunOutcome> {
    alg.check_compatible(inst)?;
    let bound = alg.stretch_bound();
    if let AlgorithmSpec::OfflineGreedy { t } = *alg {
        let graph = offline_greedy(inst, t)?;
        let stretch = (cadence != Cadence::None).then(|| max_stretch(&graph, inst));
        let violation = stretch.filter(|s| !s.within(bound)).map(|s| (inst.len(), s));
        return Ok(RunOutcome {
            graph,
            bound,
            stretch,
            prefixes_checked: 0,
            violation,
            trace: Vec::new(),
        });
    }
    let mut state = match *alg {
        AlgorithmSpec::Alg1 { eps } => {
            let Instance::Points(p) = inst else { unreachable!() };
            Online::Alg1(Box::new(Alg1State::new(p.dim(), eps)?))
        }
        AlgorithmSpec::Greedy { t } => Online::Greedy(GreedyState::new(t)?),
        AlgorithmSpec::Hst { alpha } => Online::Hst(AlphaRoundedState::new(alpha)?),
        AlgorithmSpec::HstTree { .. } => Online::HstTree(NearestFirstTree::new()),
        AlgorithmSpec::Hst2e { eps } => Online::Hst2e(MultiScaleState::new(eps)?),
        AlgorithmSpec::OfflineGreedy { .. } => unreachable!(),
    };
    let mut verifier = PrefixVerifier::new(bound);
    let mut trace = Vec::new();
    for i in 0..inst.len() {
        match &mut state {
            Online::Alg1(s) => {
                let Instance::Points(p) = inst else { unreachable!() };
                trace.extend(s.insert(p.point(i))?);
            }
            Online::Greedy(s) => {
                s.insert(&inst.row_to_previous(i))?;
            }
            Online::Hst(s) => {
                s.insert(&inst.row_to_previous(i))?;
            }
            Online::HstTree(s) => {
                s.insert(&inst.row_to_previous(i))?;
            }
            Online::Hst2e(s) => {
                s.insert(&inst.row_to_previous(i))?;
            }
        }
        if cadence == Cadence::Prefix {
            verifier.observe(state.graph(), inst);
            if verifier.first_violation().is_some() {
                break;
            }
        }
    }
    let graph = state.graph().clone();
    let (stretch, violation) = match cadence {
        Cadence::None => (None, None),
        Cadence::Final => {
            let s = max_stretch(&graph, inst);
            (Some(s), (!s.within(bound)).then_some((inst.len(), s)))
        }
        Cadence::Prefix => (Some(verifier.worst()), verifier.first_violation()),
    };
    Ok(RunOutcome {
        graph,
        bound,
        stretch,
        prefixes_checked: verifier.prefixes_checked(),
        violation,
        trace,
    })
}
