//! Finite-N simulation of the macroscopic experiment.
//!
//! In every run `N` pairs are measured with fixed settings `(x, y)`. The outcome counts
//! are drawn from the multinomial distribution of `P(.,.|x,y)` (as a chain of binomials)
//! and turned into one macroscopic outcome per party:
//!
//! * sign: `+1` iff `n_+ - n_- >= N <a_x>` (ties go to `+1`), using the exact model marginal;
//! * three-bin: the middle outcome with probability `exp(-a'^2 / (2 sigma))` where
//!   `a' = (n_+ - n_- - N <a_x>) / sqrt N`, otherwise the sign of `a'`;
//! * triangle: the index maximizing `(n_i - p_i N) / sqrt N`, ties broken at random.

use crate::behavior::{correlators_from_behavior, Behavior, Scenario};
use crate::binning::{argmax_random_ties, three_binned_behavior, MonteCarloTable, ThreeBinSpec, OUTCOME_MIDDLE, OUTCOME_MINUS, OUTCOME_PLUS};
use crate::error::{Error, Result};
use crate::ml::sign_binned_behavior;
use crate::numerics::rng::{derive_seed, stream_rng, uniform, StreamRng};
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;

/// Upper limit on `N * runs` per setting pair.
pub const MAX_TOTAL_PAIRS: u128 = 10_000_000_000;
/// Runs per parallel work unit.
const RUN_CHUNK: usize = 256;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Binning {
    Sign,
    Three(ThreeBinSpec),
    Triangle,
}

impl Binning {
    fn outcomes(&self) -> usize {
        match self {
            Binning::Sign => 2,
            Binning::Three(_) | Binning::Triangle => 3,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SimConfig {
    pub pairs_per_run: u64,
    pub runs: usize,
    pub seed: u64,
    pub binning: Binning,
}

impl SimConfig {
    fn check(&self, s: Scenario) -> Result<()> {
        if self.pairs_per_run == 0 || self.runs == 0 {
            return Err(Error::InvalidArgument("pairs per run and runs must be at least 1".into()));
        }
        let total = u128::from(self.pairs_per_run) * self.runs as u128;
        if total > MAX_TOTAL_PAIRS {
            return Err(Error::TooLarge(total));
        }
        match self.binning {
            Binning::Triangle if s.d_a != 3 || s.d_b != 3 => {
                Err(Error::ScenarioUnsupported(format!("triangle binning needs 3 outcomes, got {s}")))
            }
            Binning::Sign | Binning::Three(_) if !s.is_binary() => {
                Err(Error::WrongOutcomeCount { d_a: s.d_a, d_b: s.d_b })
            }
            _ => Ok(()),
        }
    }
}

/// Draws multinomial counts for `probs` with `n` trials.
fn multinomial(rng: &mut StreamRng, n: u64, probs: &[f64], out: &mut [u64]) {
    let mut left = n;
    let mut mass = 1.0;
    let last = probs.len() - 1;
    for k in 0..last {
        let q = if mass > 0.0 { (probs[k] / mass).clamp(0.0, 1.0) } else { 0.0 };
        let c = if left == 0 || q <= 0.0 {
            0
        } else if q >= 1.0 {
            left
        } else {
            Binomial::new(left, q).expect("valid binomial").sample(rng)
        };
        out[k] = c;
        left -= c;
        mass -= probs[k];
    }
    out[last] = left;
}

struct BlockModel<'a> {
    probs: &'a [f64],
    d_a: usize,
    d_b: usize,
    /// Exact model marginals `P_A(a|x)`, `P_B(b|y)`.
    pa: Vec<f64>,
    pb: Vec<f64>,
}

fn bin_party(
    binning: &Binning,
    counts: &[u64],
    p: &[f64],
    n: u64,
    rng: &mut StreamRng,
    scratch: &mut [f64],
) -> usize {
    let nf = n as f64;
    match binning {
        Binning::Sign => {
            let delta = counts[0] as f64 - counts[1] as f64;
            let threshold = nf * (p[0] - p[1]);
            if delta >= threshold - 1e-9 * nf.max(1.0) {
                OUTCOME_PLUS
            } else {
                OUTCOME_MINUS
            }
        }
        Binning::Three(spec) => {
            let delta = counts[0] as f64 - counts[1] as f64;
            let a = (delta - nf * (p[0] - p[1])) / nf.sqrt();
            let kernel = (-a * a / (2.0 * spec.sigma())).exp();
            if uniform(rng) < kernel {
                OUTCOME_MIDDLE
            } else if a >= 0.0 {
                OUTCOME_PLUS
            } else {
                OUTCOME_MINUS
            }
        }
        Binning::Triangle => {
            for (i, s) in scratch.iter_mut().enumerate() {
                *s = (counts[i] as f64 - p[i] * nf) / nf.sqrt();
            }
            argmax_random_ties(scratch, rng)
        }
    }
}

fn simulate_block(model: &BlockModel, cfg: &SimConfig, seed: u64) -> Vec<u64> {
    let k = cfg.binning.outcomes();
    let chunks = cfg.runs.div_ceil(RUN_CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = stream_rng(seed, c as u64);
            let runs = RUN_CHUNK.min(cfg.runs - c * RUN_CHUNK);
            let mut joint = vec![0u64; model.probs.len()];
            let mut na = vec![0u64; model.d_a];
            let mut nb = vec![0u64; model.d_b];
            let mut scratch_a = vec![0.0; model.d_a];
            let mut scratch_b = vec![0.0; model.d_b];
            let mut out = vec![0u64; k * k];
            for _ in 0..runs {
                multinomial(&mut rng, cfg.pairs_per_run, model.probs, &mut joint);
                na.iter_mut().for_each(|v| *v = 0);
                nb.iter_mut().for_each(|v| *v = 0);
                for a in 0..model.d_a {
                    for b in 0..model.d_b {
                        let c = joint[a * model.d_b + b];
                        na[a] += c;
                        nb[b] += c;
                    }
                }
                let alpha = bin_party(&cfg.binning, &na, &model.pa, cfg.pairs_per_run, &mut rng, &mut scratch_a);
                let beta = bin_party(&cfg.binning, &nb, &model.pb, cfg.pairs_per_run, &mut rng, &mut scratch_b);
                out[alpha * k + beta] += 1;
            }
            out
        })
        .reduce(
            || vec![0u64; k * k],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        )
}

/// Empirical macroscopic behavior over `cfg.runs` runs per setting pair, with per-cell
/// standard errors. Setting pair `(x, y)` uses seed `derive_seed(cfg.seed, x * mB + y)`.
pub fn run_macroscopic(b: &Behavior, cfg: &SimConfig) -> Result<MonteCarloTable> {
    let s = b.scenario();
    cfg.check(s)?;
    let k = cfg.binning.outcomes();
    let out = Scenario::new(s.m_a, s.m_b, k, k)?;
    let mut counts = vec![0u64; out.table_len()];
    for x in 0..s.m_a {
        for y in 0..s.m_b {
            let model = BlockModel {
                probs: b.block(x, y),
                d_a: s.d_a,
                d_b: s.d_b,
                pa: (0..s.d_a).map(|a| b.alice_marginal(x, a)).collect(),
                pb: (0..s.d_b).map(|bb| b.bob_marginal(y, bb)).collect(),
            };
            let block = simulate_block(&model, cfg, derive_seed(cfg.seed, (x * s.m_b + y) as u64));
            let start = out.index(x, y, 0, 0);
            counts[start..start + k * k].copy_from_slice(&block);
        }
    }
    Ok(MonteCarloTable::from_counts(out, &counts, cfg.runs))
}

/// Correlators `<alpha_x beta_y>` of an empirical two-outcome table with standard errors.
pub fn empirical_correlators(t: &MonteCarloTable) -> Result<Vec<Vec<(f64, f64)>>> {
    let s = t.scenario;
    if !s.is_binary() {
        return Err(Error::WrongOutcomeCount { d_a: s.d_a, d_b: s.d_b });
    }
    let n = t.samples as f64;
    Ok((0..s.m_a)
        .map(|x| {
            (0..s.m_b)
                .map(|y| {
                    let same = t.table[s.index(x, y, 0, 0)] + t.table[s.index(x, y, 1, 1)];
                    let e = 2.0 * same - 1.0;
                    (e, ((1.0 - e * e).max(0.0) / n).sqrt())
                })
                .collect()
        })
        .collect())
}

/// Estimates paired with their standard errors.
pub type Estimates = Vec<(f64, f64)>;

/// Empirical marginals `<alpha_x>` (Alice) and `<beta_y>` (Bob) with standard errors.
pub fn empirical_marginals(t: &MonteCarloTable) -> Result<(Estimates, Estimates)> {
    let s = t.scenario;
    if !s.is_binary() {
        return Err(Error::WrongOutcomeCount { d_a: s.d_a, d_b: s.d_b });
    }
    let n = t.samples as f64;
    let stat = |plus: f64| {
        let e = 2.0 * plus - 1.0;
        (e, ((1.0 - e * e).max(0.0) / n).sqrt())
    };
    let alice = (0..s.m_a)
        .map(|x| stat(t.table[s.index(x, 0, 0, 0)] + t.table[s.index(x, 0, 0, 1)]))
        .collect();
    let bob = (0..s.m_b)
        .map(|y| stat(t.table[s.index(0, y, 0, 0)] + t.table[s.index(0, y, 1, 0)]))
        .collect();
    Ok((alice, bob))
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceRow {
    pub pairs_per_run: u64,
    /// Max-norm distance between empirical and large-N tables.
    pub distance: f64,
    /// Largest per-cell standard error of the empirical table.
    pub std_error: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceReport {
    pub rows: Vec<ConvergenceRow>,
    /// Least-squares slope of `ln distance` against `ln N`.
    pub slope: f64,
}

/// Distance between simulated and analytic macroscopic behaviors as `N` grows.
pub fn convergence_report(b: &Behavior, binning: Binning, n_list: &[u64], runs: usize, seed: u64) -> Result<ConvergenceReport> {
    let analytic = match binning {
        Binning::Sign => sign_binned_behavior(b)?,
        Binning::Three(spec) => three_binned_behavior(b, &spec)?,
        Binning::Triangle => {
            return Err(Error::ScenarioUnsupported("triangle binning has no closed form".into()));
        }
    };
    // make sure the behavior is binary before spending time on simulation
    correlators_from_behavior(b)?;
    let mut rows = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let cfg = SimConfig {
            pairs_per_run: n,
            runs,
            seed: derive_seed(seed, n),
            binning,
        };
        let t = run_macroscopic(b, &cfg)?;
        let distance = t.table.iter().zip(analytic.table()).fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()));
        rows.push(ConvergenceRow {
            pairs_per_run: n,
            distance,
            std_error: t.max_std_error(),
        });
    }
    let slope = log_log_slope(&rows);
    Ok(ConvergenceReport { rows, slope })
}

fn log_log_slope(rows: &[ConvergenceRow]) -> f64 {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.distance > 0.0)
        .map(|r| ((r.pairs_per_run as f64).ln(), r.distance.ln()))
        .collect();
    if pts.len() < 2 {
        return f64::NAN;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}
