//! Fixtures shared by the criterion benches.

use spanner_core::hst::random_hst;
use spanner_core::{HstTree, InstanceSpec, Instance, Norm, PointSequence};

pub fn uniform_points(n: usize, dim: usize, seed: u64) -> PointSequence {
    let spec = InstanceSpec::UniformPoints { n, dim, norm: Norm::L2, seed };
    match spec.build().expect("uniform points").instance {
        Instance::Points(p) => p,
        _ => unreachable!(),
    }
}

pub fn ultrametric(n: usize, seed: u64) -> HstTree {
    random_hst(n, 8, seed)
}
