//! Random instance generators shared by the integration suites.
#![allow(dead_code)]

use macrobell::behavior::{behavior_from_correlators, Behavior, CorrelatorView};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::FRAC_PI_2;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A 2 x n matrix of entries in [-1, 1] with uniformly distributed arcsines, shrunk by a
/// random factor, so that both feasible and infeasible instances are common.
pub fn random_two_row_matrix(rng: &mut ChaCha8Rng, n: usize) -> Vec<Vec<f64>> {
    let scale: f64 = rng.random_range(0.8..=1.0);
    (0..2)
        .map(|_| (0..n).map(|_| scale * rng.random_range(-FRAC_PI_2..=FRAC_PI_2).sin()).collect())
        .collect()
}

/// Random binary no-signaling behavior. Marginals are zero half the time; each correlator
/// is a random end of the range that keeps every probability nonnegative, pulled toward the
/// product of marginals by a random weight of at most one half.
pub fn random_binary_behavior(rng: &mut ChaCha8Rng, m_a: usize, m_b: usize) -> Behavior {
    let marginal = |rng: &mut ChaCha8Rng| {
        if rng.random_bool(0.5) {
            0.0
        } else {
            rng.random_range(-0.7..0.7)
        }
    };
    let mar_a: Vec<f64> = (0..m_a).map(|_| marginal(rng)).collect();
    let mar_b: Vec<f64> = (0..m_b).map(|_| marginal(rng)).collect();
    let corr = mar_a
        .iter()
        .map(|&ma| {
            mar_b
                .iter()
                .map(|&mb: &f64| {
                    let lo = -1.0 + (ma + mb).abs();
                    let hi = 1.0 - (ma - mb).abs();
                    let end = if rng.random_bool(0.5) { lo } else { hi };
                    let w: f64 = rng.random_range(0.5..=1.0);
                    w * end + (1.0 - w) * ma * mb
                })
                .collect()
        })
        .collect();
    behavior_from_correlators(&CorrelatorView { mar_a, mar_b, corr }).expect("correlators in range")
}
