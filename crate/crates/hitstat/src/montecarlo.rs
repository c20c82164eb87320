//! Monte Carlo estimation of hitting-time moments: an independent check of
//! the exact solvers that shares nothing with them except the chain.
//!
//! All randomness flows through seeded ChaCha8 streams. Sample blocks use
//! `set_stream(block_index)` on the same seed, so estimates are byte-stable
//! for a given `(seed, samples)` regardless of thread scheduling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::chain::ReversibleChain;

/// A single walk aborts after this many steps.
pub const STEP_CAP: u64 = 1_000_000_000;

/// Samples per RNG stream.
const BLOCK: usize = 4096;

/// Fewest samples for which the standard-error formulas are reported.
pub const MIN_SAMPLES: usize = 100;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SimError {
    #[error("walk exceeded {cap} steps without hitting the target")]
    StepCapExceeded { cap: u64 },
    #[error("need at least {min} samples, got {got}")]
    TooFewSamples { min: usize, got: usize },
}

/// One exact draw of `tau_y` from `x`: inverse-CDF steps along the sorted
/// sparse transition rows.
pub fn sample_tau(
    chain: &ReversibleChain,
    x: usize,
    y: usize,
    rng: &mut ChaCha8Rng,
) -> Result<u64, SimError> {
    let mut state = x;
    let mut steps = 0u64;
    while state != y {
        if steps == STEP_CAP {
            return Err(SimError::StepCapExceeded { cap: STEP_CAP });
        }
        let r: f64 = rng.gen();
        let row = chain.transitions(state);
        let mut acc = 0.0;
        state = row[row.len() - 1].0;
        for &(v, p) in row {
            acc += p;
            if r < acc {
                state = v;
                break;
            }
        }
        steps += 1;
    }
    Ok(steps)
}

/// Moment estimates with their standard errors.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct SimEstimate {
    pub rng: &'static str,
    pub seed: u64,
    pub samples: usize,
    pub source: usize,
    pub target: usize,
    pub mean: f64,
    /// Unbiased sample variance.
    pub variance: f64,
    pub se_mean: f64,
    /// Standard error of the sample variance via the fourth central moment.
    pub se_variance: f64,
}

/// Estimates mean and variance of `tau_y` from `samples` independent walks.
/// Blocks of [`BLOCK`] walks run in parallel on separate ChaCha8 streams of
/// the same seed and are merged in block order.
pub fn estimate(
    chain: &ReversibleChain,
    x: usize,
    y: usize,
    samples: usize,
    seed: u64,
) -> Result<SimEstimate, SimError> {
    if samples < MIN_SAMPLES {
        return Err(SimError::TooFewSamples { min: MIN_SAMPLES, got: samples });
    }
    let blocks = samples.div_ceil(BLOCK);
    let taus: Vec<u64> = (0..blocks)
        .into_par_iter()
        .map(|block| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(block as u64);
            let count = BLOCK.min(samples - block * BLOCK);
            (0..count).map(|_| sample_tau(chain, x, y, &mut rng)).collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?
        .concat();

    let n = samples as f64;
    let mean = taus.iter().map(|&t| t as f64).sum::<f64>() / n;
    let mut m2 = 0.0f64;
    let mut m4 = 0.0f64;
    for &t in &taus {
        let d = t as f64 - mean;
        let d2 = d * d;
        m2 += d2;
        m4 += d2 * d2;
    }
    let variance = m2 / (n - 1.0);
    m4 /= n;
    let se_mean = (variance / n).sqrt();
    let se_variance = ((m4 - variance * variance * (n - 3.0) / (n - 1.0)).max(0.0) / n).sqrt();
    Ok(SimEstimate {
        rng: "chacha8",
        seed,
        samples,
        source: x,
        target: y,
        mean,
        variance,
        se_mean,
        se_variance,
    })
}

/// JSON report for one estimate.
pub fn estimate_report(est: &SimEstimate) -> serde_json::Value {
    let mut value = serde_json::to_value(est).expect("estimate serializes");
    let map = value.as_object_mut().unwrap();
    map.insert("schema".into(), "hitstat/estimate-v1".into());
    map.insert("method".into(), "montecarlo".into());
    value
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::srw_chain;
    use crate::graph;

    #[test]
    fn forced_single_step_always_takes_one() {
        let c = srw_chain(&graph::path(1).unwrap());
        let est = estimate(&c, 0, 1, 500, 7).unwrap();
        assert_eq!(est.mean, 1.0);
        assert_eq!(est.variance, 0.0);
        assert_eq!(est.se_mean, 0.0);
        assert_eq!(est.se_variance, 0.0);
    }

    #[test]
    fn path_samples_have_even_parity() {
        let c = srw_chain(&graph::path(2).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let tau = sample_tau(&c, 0, 2, &mut rng).unwrap();
            assert!(tau >= 2 && tau % 2 == 0, "tau = {tau}");
        }
    }

    #[test]
    fn funnel_walks_respect_the_distance_floor() {
        let c = srw_chain(&graph::funnel(3, 2).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            assert!(sample_tau(&c, 0, 15, &mut rng).unwrap() >= 4);
        }
    }

    #[test]
    fn estimates_cover_exact_moments_within_four_ses() {
        let c = srw_chain(&graph::path(2).unwrap());
        let est = estimate(&c, 0, 2, 100_000, 0xC0FFEE).unwrap();
        let se_mean_exact = (8.0f64 / 100_000.0).sqrt();
        assert!((est.mean - 4.0).abs() <= 4.0 * se_mean_exact, "{est:?}");
        assert!((est.variance - 8.0).abs() <= 4.0 * 0.0738, "{est:?}");
        assert!(est.se_mean > 0.0 && est.se_variance > 0.0);
        assert!((est.se_mean - se_mean_exact).abs() < 0.2 * se_mean_exact);
    }

    #[test]
    fn estimates_are_byte_stable() {
        let c = srw_chain(&graph::complete(4).unwrap());
        let a = estimate(&c, 0, 3, 5000, 42).unwrap();
        let b = estimate(&c, 0, 3, 5000, 42).unwrap();
        assert_eq!(a, b);
        assert_eq!(
            serde_json::to_string(&estimate_report(&a)).unwrap(),
            serde_json::to_string(&estimate_report(&b)).unwrap()
        );
        let c2 = estimate(&c, 0, 3, 5000, 43).unwrap();
        assert_ne!(a.mean.to_bits(), c2.mean.to_bits());
    }

    #[test]
    fn sample_floor_is_enforced() {
        let c = srw_chain(&graph::path(1).unwrap());
        assert_eq!(
            estimate(&c, 0, 1, 99, 7).unwrap_err(),
            SimError::TooFewSamples { min: 100, got: 99 }
        );
    }
}
