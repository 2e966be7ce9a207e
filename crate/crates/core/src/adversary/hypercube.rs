//! Well-spread subsets of `{-1, +1}^d` followed by the origin.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Result, SpannerError};
use crate::metric::{Norm, PointSequence};

pub const HYPERCUBE_ATTEMPT_BUDGET: u64 = 1_000_000;

/// Rejection-samples `target` sign vectors whose pairwise Hamming distances
/// all lie in `[(1 - eps) d / 2, (1 + eps) d / 2]`, then appends the origin.
pub fn hypercube_pm1_sequence(d: usize, eps: f64, target: usize, seed: u64) -> Result<PointSequence> {
    if d == 0 || !(eps > 0.0 && eps < 1.0) {
        return Err(SpannerError::InvalidParameter(format!(
            "need d >= 1 and 0 < eps < 1 (d = {d}, eps = {eps})"
        )));
    }
    if (d as f64) < 8.0 / (eps * eps) {
        log::warn!("d = {d} is below the recommended 8/eps^2 = {:.0}", 8.0 / (eps * eps));
    }
    let lo = (1.0 - eps) * d as f64 / 2.0 - 1e-9;
    let hi = (1.0 + eps) * d as f64 / 2.0 + 1e-9;
    let words = d.div_ceil(64);
    let tail_mask = if d.is_multiple_of(64) { u64::MAX } else { (1u64 << (d % 64)) - 1 };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut accepted: Vec<Vec<u64>> = Vec::with_capacity(target);
    let mut attempts = 0u64;
    while accepted.len() < target {
        if attempts == HYPERCUBE_ATTEMPT_BUDGET {
            return Err(SpannerError::BudgetExhausted {
                attempts,
                accepted: accepted.len(),
                target,
                hint: format!(
                    "try d >= {:.0} or a target below 2^(eps^2 d / 8) = {:.1}",
                    8.0 * (target as f64).ln() / (eps * eps * std::f64::consts::LN_2),
                    2f64.powf(eps * eps * d as f64 / 8.0)
                ),
            });
        }
        attempts += 1;
        let mut bits: Vec<u64> = (0..words).map(|_| rng.gen()).collect();
        bits[words - 1] &= tail_mask;
        let ok = accepted.iter().all(|a| {
            let h = a.iter().zip(&bits).map(|(x, y)| (x ^ y).count_ones()).sum::<u32>() as f64;
            h >= lo && h <= hi
        });
        if ok {
            accepted.push(bits);
        }
    }

    let mut seq = PointSequence::new(d, Norm::L2)?;
    let mut p = vec![0.0; d];
    for bits in &accepted {
        for (c, x) in p.iter_mut().enumerate() {
            *x = if bits[c / 64] >> (c % 64) & 1 == 1 { 1.0 } else { -1.0 };
        }
        seq.push(&p)?;
    }
    seq.push(&vec![0.0; d])?;
    Ok(seq)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::Metric;

    fn hamming(a: &[f64], b: &[f64]) -> usize {
        a.iter().zip(b).filter(|(x, y)| x != y).count()
    }

    #[test]
    fn spread_and_origin() {
        let (d, eps) = (256, 0.25);
        let s = hypercube_pm1_sequence(d, eps, 32, 11).unwrap();
        assert_eq!(s.len(), 33);
        for i in 0..32 {
            assert_eq!(s.dist(i, 32), (d as f64).sqrt());
            for j in 0..i {
                let h = hamming(s.point(i), s.point(j)) as f64;
                assert!((96.0..=160.0).contains(&h));
                let dist = s.dist(i, j);
                assert!(dist >= ((1.0 - eps) * 2.0 * d as f64).sqrt() * (1.0 - 1e-12));
                assert!(dist <= ((1.0 + eps) * 2.0 * d as f64).sqrt() * (1.0 + 1e-12));
            }
        }
        assert_eq!(s, hypercube_pm1_sequence(d, eps, 32, 11).unwrap());
        assert_ne!(s, hypercube_pm1_sequence(d, eps, 32, 12).unwrap());
    }

    #[test]
    fn small_dimension_exhausts_budget() {
        let err = hypercube_pm1_sequence(16, 0.25, 500, 1).unwrap_err();
        assert!(matches!(err, SpannerError::BudgetExhausted { attempts: HYPERCUBE_ATTEMPT_BUDGET, .. }));
    }

    #[test]
    fn odd_dimension_masks_tail() {
        let s = hypercube_pm1_sequence(70, 0.5, 5, 3).unwrap();
        assert!(s.iter().take(5).all(|p| p.iter().all(|x| x.abs() == 1.0)));
    }
}
