//! Cone covers of R^d used by the ordered Yao construction.

use std::collections::HashMap;
use std::f64::consts::PI;

use crate::error::{Result, SpannerError};

/// Candidate directions examined by the greedy packing in dimension >= 3.
const MAX_CANDIDATES: usize = 20_000_000;

/// Unit axes such that every direction is within `aperture / 2` of some axis.
///
/// A direction belongs to the cone of its nearest axis (largest dot product);
/// exact ties go to the lowest axis index, so the cones partition R^d \ {0}.
#[derive(Clone, Debug, PartialEq)]
pub struct ConeCover {
    dim: usize,
    aperture: f64,
    axes: Vec<Vec<f64>>,
}

impl ConeCover {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn aperture(&self) -> f64 {
        self.aperture
    }

    pub fn axes(&self) -> &[Vec<f64>] {
        &self.axes
    }

    pub fn len(&self) -> usize {
        self.axes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.axes.is_empty()
    }

    /// Index of the cone containing direction `v` (need not be normalized, must be nonzero).
    pub fn cone_of(&self, v: &[f64]) -> usize {
        debug_assert_eq!(v.len(), self.dim);
        let mut best = 0;
        let mut best_dot = f64::NEG_INFINITY;
        for (i, a) in self.axes.iter().enumerate() {
            let dot: f64 = a.iter().zip(v).map(|(x, y)| x * y).sum();
            if dot > best_dot {
                best_dot = dot;
                best = i;
            }
        }
        best
    }
}

/// Angle between two vectors, in `[0, pi]`.
pub fn angle_between(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    (dot / (na * nb)).clamp(-1.0, 1.0).acos()
}

/// Builds a deterministic cone cover of aperture `theta`.
///
/// * dim 1: the two rays.
/// * dim 2: `ceil(2 pi / theta)` equally spaced axes.
/// * dim >= 3: greedy maximal packing of directions drawn from a fine grid on
///   the cube surface. Axes are pairwise more than `3 theta / 8` apart and the
///   grid is fine enough that every direction lies within `theta / 2` of an axis.
pub fn build_cone_cover(dim: usize, theta: f64) -> Result<ConeCover> {
    if dim == 0 {
        return Err(SpannerError::InvalidParameter("dimension must be positive".into()));
    }
    if !(theta > 0.0 && theta < PI) {
        return Err(SpannerError::InvalidParameter(format!(
            "cone aperture {theta} outside (0, pi)"
        )));
    }
    let axes = match dim {
        1 => vec![vec![1.0], vec![-1.0]],
        2 => {
            let k = planar_cone_count(theta);
            (0..k)
                .map(|i| {
                    let a = 2.0 * PI * i as f64 / k as f64;
                    vec![a.cos(), a.sin()]
                })
                .collect()
        }
        _ => greedy_sphere_packing(dim, theta)?,
    };
    Ok(ConeCover {
        dim,
        aperture: theta,
        axes,
    })
}

fn planar_cone_count(theta: f64) -> usize {
    ((2.0 * PI / theta) - 1e-9).ceil().max(2.0) as usize
}

fn greedy_sphere_packing(dim: usize, theta: f64) -> Result<Vec<Vec<f64>>> {
    let mesh_angle = theta / 8.0;
    let separation = theta / 2.0 - mesh_angle;
    // Any cube-surface point is within h*sqrt(d-1)/2 of a grid point, and
    // both have norm >= 1, so the angular gap is at most asin of that.
    let h = 2.0 * mesh_angle.sin() / ((dim - 1) as f64).sqrt();
    let per_axis = (2.0 / h).ceil() as usize;
    let total = per_axis
        .checked_pow((dim - 1) as u32)
        .and_then(|c| c.checked_mul(2 * dim))
        .unwrap_or(usize::MAX);
    if total > MAX_CANDIDATES {
        return Err(SpannerError::InvalidParameter(format!(
            "cone cover for dim {dim}, aperture {theta} needs {total} candidate directions"
        )));
    }
    let step = 2.0 / per_axis as f64;
    let min_dot = separation.cos();
    let cell = 2.0 * (separation / 2.0).sin();

    let mut axes: Vec<Vec<f64>> = Vec::new();
    let mut buckets: HashMap<Vec<i64>, Vec<usize>> = HashMap::new();
    let mut idx = vec![0usize; dim - 1];
    let mut candidate = vec![0.0; dim];
    let mut offsets = vec![0i64; dim];

    for face_axis in 0..dim {
        for &sign in &[1.0, -1.0] {
            idx.iter_mut().for_each(|x| *x = 0);
            loop {
                let mut k = 0;
                for (c, slot) in candidate.iter_mut().enumerate() {
                    if c == face_axis {
                        *slot = sign;
                    } else {
                        *slot = -1.0 + step * (idx[k] as f64 + 0.5);
                        k += 1;
                    }
                }
                let norm = candidate.iter().map(|x| x * x).sum::<f64>().sqrt();
                let unit: Vec<f64> = candidate.iter().map(|x| x / norm).collect();
                let key: Vec<i64> = unit.iter().map(|x| (x / cell).floor() as i64).collect();

                if !has_close_axis(&axes, &buckets, &key, &unit, min_dot, &mut offsets) {
                    buckets.entry(key).or_default().push(axes.len());
                    axes.push(unit);
                }

                // Advance the odometer over the face grid.
                let mut pos = 0;
                loop {
                    if pos == dim - 1 {
                        break;
                    }
                    idx[pos] += 1;
                    if idx[pos] < per_axis {
                        break;
                    }
                    idx[pos] = 0;
                    pos += 1;
                }
                if pos == dim - 1 {
                    break;
                }
            }
        }
    }
    Ok(axes)
}

fn has_close_axis(
    axes: &[Vec<f64>],
    buckets: &HashMap<Vec<i64>, Vec<usize>>,
    key: &[i64],
    unit: &[f64],
    min_dot: f64,
    offsets: &mut [i64],
) -> bool {
    let dim = key.len();
    offsets.iter_mut().for_each(|o| *o = -1);
    let mut probe = key.to_vec();
    loop {
        for c in 0..dim {
            probe[c] = key[c] + offsets[c];
        }
        if let Some(list) = buckets.get(&probe) {
            for &a in list {
                let dot: f64 = axes[a].iter().zip(unit).map(|(x, y)| x * y).sum();
                if dot >= min_dot {
                    return true;
                }
            }
        }
        let mut c = 0;
        while c < dim {
            offsets[c] += 1;
            if offsets[c] <= 1 {
                break;
            }
            offsets[c] = -1;
            c += 1;
        }
        if c == dim {
            return false;
        }
    }
}

/// Cone aperture for which the ordered Yao graph is a `(1 + eps)`-spanner.
///
/// In the plane this uses `k` cones, the smallest `k > 8` with
/// `1 / (1 - 2 sin(pi / k)) <= 1 + eps`, and returns `2 pi / k`. For
/// `dim >= 3` it returns the conservative `eps / (2 sqrt(dim))`.
pub fn aperture_for_epsilon(dim: usize, eps: f64) -> Result<f64> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(SpannerError::InvalidParameter(format!("eps {eps} outside (0, 1]")));
    }
    if dim >= 3 {
        return Ok(eps / (2.0 * (dim as f64).sqrt()));
    }
    Ok(2.0 * PI / planar_yao_cone_count(eps) as f64)
}

/// Smallest `k > 8` whose ordered Yao bound `1 / (1 - 2 sin(pi / k))` is at most `1 + eps`.
pub fn planar_yao_cone_count(eps: f64) -> usize {
    let mut k = 9usize;
    loop {
        let s = 1.0 - 2.0 * (PI / k as f64).sin();
        if s > 0.0 && 1.0 / s <= 1.0 + eps {
            return k;
        }
        k += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_unit(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
        loop {
            let v: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let n2: f64 = v.iter().map(|x| x * x).sum();
            if n2 > 1e-6 && n2 <= 1.0 {
                return v.iter().map(|x| x / n2.sqrt()).collect();
            }
        }
    }

    #[test]
    fn line_has_two_rays() {
        let c = build_cone_cover(1, 0.3).unwrap();
        assert_eq!(c.axes(), &[vec![1.0], vec![-1.0]]);
        assert_eq!(c.cone_of(&[-2.0]), 1);
    }

    #[test]
    fn quadrant_cover() {
        let c = build_cone_cover(2, PI / 2.0).unwrap();
        assert_eq!(c.len(), 4);
        for i in 0..4 {
            let j = (i + 1) % 4;
            assert!((angle_between(&c.axes()[i], &c.axes()[j]) - PI / 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn bad_aperture() {
        assert!(build_cone_cover(2, 0.0).is_err());
        assert!(build_cone_cover(2, PI).is_err());
        assert!(build_cone_cover(0, 1.0).is_err());
    }

    #[test]
    fn three_dim_cover_by_sampling() {
        let theta = PI / 6.0;
        let c = build_cone_cover(3, theta).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100_000 {
            let u = random_unit(&mut rng, 3);
            let a = &c.axes()[c.cone_of(&u)];
            assert!(angle_between(&u, a) <= theta / 2.0 + 1e-12);
        }
    }

    #[test]
    fn three_dim_packing() {
        let theta = PI / 6.0;
        let c = build_cone_cover(3, theta).unwrap();
        for i in 0..c.len() {
            for j in 0..i {
                assert!(angle_between(&c.axes()[i], &c.axes()[j]) > theta / 4.0);
            }
        }
        // Deterministic.
        assert_eq!(c, build_cone_cover(3, theta).unwrap());
    }

    #[test]
    fn planar_aperture_from_formula() {
        // Brute evaluation of the bound for increasing k.
        let bound = |k: usize| 1.0 / (1.0 - 2.0 * (PI / k as f64).sin());
        assert!(bound(10) > 2.0 && bound(12) > 2.0 && bound(13) <= 2.0);
        assert_eq!(planar_yao_cone_count(1.0), 13);
        assert!((aperture_for_epsilon(2, 1.0).unwrap() - 2.0 * PI / 13.0).abs() < 1e-15);
        assert_eq!(planar_yao_cone_count(0.25), 32);
        let c = build_cone_cover(2, aperture_for_epsilon(2, 0.25).unwrap()).unwrap();
        assert_eq!(c.len(), 32);
    }

    #[test]
    fn planar_count_grows_like_inverse_eps() {
        let k1 = planar_yao_cone_count(0.1) as f64;
        let k2 = planar_yao_cone_count(0.01) as f64;
        assert!(k2 / k1 > 8.0 && k2 / k1 < 12.0);
    }

    #[test]
    fn high_dim_aperture() {
        let t = aperture_for_epsilon(3, 0.5).unwrap();
        assert_eq!(t, 0.5 / (2.0 * 3f64.sqrt()));
        assert!(aperture_for_epsilon(3, 1.5).is_err());
        assert!(aperture_for_epsilon(2, 0.0).is_err());
    }
}
