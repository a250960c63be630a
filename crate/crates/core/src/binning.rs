//! Binnings beyond the sign: Gaussian-kernel three-binning (closed form) and triangle
//! binning of three-outcome intensities (Monte Carlo).

use crate::bell::cglmp3;
use crate::behavior::{correlators_from_behavior, validate_behavior_with, Behavior, Scenario, Tolerances};
use crate::error::{Error, Result};
use crate::membership::{MembershipReport, Witness};
use crate::numerics::rng::{derive_seed, fill_normals, index, stream_rng};
use crate::numerics::{condition_on_kernel, orthant_prob, GaussianSampler, SymMatrix};
use rayon::prelude::*;

/// Kernel width of the three-binning: the middle outcome fires with probability
/// `exp(-a'^2 / (2 sigma))`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThreeBinSpec {
    sigma: f64,
}

impl ThreeBinSpec {
    pub fn new(sigma: f64) -> Result<Self> {
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(Error::InvalidArgument(format!("kernel width {sigma} must be positive and finite")));
        }
        Ok(Self { sigma })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }
}

/// Macroscopic outcome labels of the three-binning.
pub const OUTCOME_PLUS: usize = 0;
pub const OUTCOME_MINUS: usize = 1;
pub const OUTCOME_MIDDLE: usize = 2;

/// One factor of a weight: `coef * kernel^k * 1{sign * a' > 0}` (`sign == 0` means no
/// indicator).
#[derive(Clone, Copy)]
struct WeightTerm {
    coef: f64,
    kernel: bool,
    sign: i8,
}

/// `w_+ = (1 - k) 1{a' > 0}`, `w_- = (1 - k) 1{a' < 0}`, `w_0 = k`.
fn weight_terms(outcome: usize) -> &'static [WeightTerm] {
    const PLUS: [WeightTerm; 2] = [
        WeightTerm { coef: 1.0, kernel: false, sign: 1 },
        WeightTerm { coef: -1.0, kernel: true, sign: 1 },
    ];
    const MINUS: [WeightTerm; 2] = [
        WeightTerm { coef: 1.0, kernel: false, sign: -1 },
        WeightTerm { coef: -1.0, kernel: true, sign: -1 },
    ];
    const MIDDLE: [WeightTerm; 1] = [WeightTerm { coef: 1.0, kernel: true, sign: 0 }];
    match outcome {
        OUTCOME_PLUS => &PLUS,
        OUTCOME_MINUS => &MINUS,
        _ => &MIDDLE,
    }
}

/// `P[s_a a > 0, s_b b > 0]` under `N(0, cov)`; a zero sign drops that indicator and a
/// zero-variance coordinate never has a strict sign.
fn sign_probability(cov: &SymMatrix, s_a: i8, s_b: i8) -> Result<f64> {
    let (va, vb) = (cov.get(0, 0), cov.get(1, 1));
    if (s_a != 0 && va <= 0.0) || (s_b != 0 && vb <= 0.0) {
        return Ok(0.0);
    }
    Ok(match (s_a, s_b) {
        (0, 0) => 1.0,
        (0, _) | (_, 0) => 0.5,
        _ => {
            let rho = (cov.get(0, 1) / (va * vb).sqrt()).clamp(-1.0, 1.0);
            orthant_prob(f64::from(s_a * s_b) * rho)?
        }
    })
}

/// `E[kernel_a^ka kernel_b^kb 1{..} 1{..}]`: each kernel contributes a scale and
/// conditions the Gaussian; the indicators are then an orthant probability.
fn term_expectation(cov: &SymMatrix, ta: WeightTerm, tb: WeightTerm, sigma: f64) -> Result<f64> {
    let mut scale = 1.0;
    let mut c = cov.clone();
    if ta.kernel {
        let (s, next) = condition_on_kernel(&c, 0, sigma)?;
        scale *= s;
        c = next;
    }
    if tb.kernel {
        let (s, next) = condition_on_kernel(&c, 1, sigma)?;
        scale *= s;
        c = next;
    }
    Ok(scale * sign_probability(&c, ta.sign, tb.sign)?)
}

/// Large-N macroscopic behavior under three-binning, in closed form.
///
/// For each setting pair the rescaled intensity differences `(a', b')` are Gaussian with
/// the sign-binning covariance. Each cell `E[w_alpha(a') w_beta(b')]` expands into at most
/// four products of kernels and half-line indicators; kernels are absorbed into a scale
/// factor and a conditioned covariance, indicators into an orthant probability. Outcomes
/// are labelled [`OUTCOME_PLUS`], [`OUTCOME_MINUS`], [`OUTCOME_MIDDLE`].
pub fn three_binned_behavior(b: &Behavior, spec: &ThreeBinSpec) -> Result<Behavior> {
    let c = correlators_from_behavior(b)?;
    let s = Scenario::new(c.m_a(), c.m_b(), 3, 3)?;
    let mut table = vec![0.0; s.table_len()];
    for x in 0..s.m_a {
        for y in 0..s.m_b {
            let (ma, mb) = (c.mar_a[x], c.mar_b[y]);
            let cross = c.corr[x][y] - ma * mb;
            let cov = SymMatrix::from_rows(&[vec![(1.0 - ma * ma).max(0.0), cross], vec![cross, (1.0 - mb * mb).max(0.0)]]);
            for alpha in 0..3 {
                for beta in 0..3 {
                    let mut p = 0.0;
                    for &ta in weight_terms(alpha) {
                        for &tb in weight_terms(beta) {
                            p += ta.coef * tb.coef * term_expectation(&cov, ta, tb, spec.sigma)?;
                        }
                    }
                    table[s.index(x, y, alpha, beta)] = p.max(0.0);
                }
            }
        }
    }
    let tol = Tolerances {
        range: 1e-10,
        normalization: 1e-10,
        signaling: 1e-10,
    };
    validate_behavior_with(table, s, &tol)
}

/// Covariances of the standardized intensity fluctuations `(I^A_0..2, I^B_0..2)` for each
/// setting pair of a three-outcome behavior.
#[derive(Clone, Debug, PartialEq)]
pub struct TriangleCov {
    pub m_a: usize,
    pub m_b: usize,
    blocks: Vec<SymMatrix>,
}

impl TriangleCov {
    pub fn new(b: &Behavior) -> Result<Self> {
        let s = b.scenario();
        let blocks = (0..s.m_a)
            .flat_map(|x| (0..s.m_b).map(move |y| (x, y)))
            .map(|(x, y)| triangle_cov(b, x, y))
            .collect::<Result<_>>()?;
        Ok(Self { m_a: s.m_a, m_b: s.m_b, blocks })
    }

    pub fn block(&self, x: usize, y: usize) -> &SymMatrix {
        &self.blocks[x * self.m_b + y]
    }
}

/// `Cov(I^A_i, I^A_j) = delta_ij p_i - p_i p_j`, `Cov(I^A_i, I^B_j) = P(i,j|x,y) - p^A_i p^B_j`.
pub fn triangle_cov(b: &Behavior, x: usize, y: usize) -> Result<SymMatrix> {
    let s = b.scenario();
    if s.d_a != 3 || s.d_b != 3 {
        return Err(Error::ScenarioMismatch(format!("triangle binning needs 3 outcomes per party, got {s}")));
    }
    if x >= s.m_a || y >= s.m_b {
        return Err(Error::InvalidArgument(format!("setting pair ({x}, {y}) out of range")));
    }
    let pa: Vec<f64> = (0..3).map(|a| b.alice_marginal(x, a)).collect();
    let pb: Vec<f64> = (0..3).map(|bb| b.bob_marginal(y, bb)).collect();
    Ok(SymMatrix::from_fn(6, |i, j| match (i < 3, j < 3) {
        (true, true) => f64::from(u8::from(i == j)) * pa[i] - pa[i] * pa[j],
        (false, false) => f64::from(u8::from(i == j)) * pb[i - 3] - pb[i - 3] * pb[j - 3],
        (true, false) => b.p(x, y, i, j - 3) - pa[i] * pb[j - 3],
        (false, true) => b.p(x, y, j, i - 3) - pa[j] * pb[i - 3],
    }))
}

/// Samples per parallel work unit in the Monte Carlo binnings.
pub const MC_CHUNK: usize = 1 << 14;

/// An empirical table together with per-cell standard errors.
#[derive(Clone, Debug, PartialEq)]
pub struct MonteCarloTable {
    pub scenario: Scenario,
    pub table: Vec<f64>,
    pub std_error: Vec<f64>,
    /// Samples (or runs) per setting pair.
    pub samples: usize,
}

impl MonteCarloTable {
    pub(crate) fn from_counts(scenario: Scenario, counts: &[u64], samples: usize) -> Self {
        let n = samples as f64;
        let table: Vec<f64> = counts.iter().map(|&c| c as f64 / n).collect();
        let std_error = table.iter().map(|&p| (p * (1.0 - p) / n).sqrt()).collect();
        Self {
            scenario,
            table,
            std_error,
            samples,
        }
    }

    /// Tolerance for marginal differences between settings: five standard errors of the
    /// difference of two independent frequency estimates.
    pub fn signaling_tolerance(&self) -> f64 {
        5.0 * (0.5 / self.samples as f64).sqrt() + 1e-12
    }

    pub fn max_std_error(&self) -> f64 {
        self.std_error.iter().copied().fold(0.0, f64::max)
    }

    /// Validates the table with the no-signaling check loosened to the sampling noise.
    pub fn behavior(&self) -> Result<Behavior> {
        let tol = Tolerances {
            signaling: self.signaling_tolerance(),
            ..Tolerances::default()
        };
        let table = self.table.clone();
        validate_behavior_with(table, self.scenario, &tol)
    }
}

/// Index of the largest entry; exact ties are broken uniformly at random.
#[inline]
pub(crate) fn argmax_random_ties<R: rand::Rng>(values: &[f64], rng: &mut R) -> usize {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let tied = values.iter().filter(|&&v| v == max).count();
    let pick = if tied == 1 { 0 } else { index(rng, tied) };
    values
        .iter()
        .enumerate()
        .filter(|(_, &v)| v == max)
        .nth(pick)
        .map(|(i, _)| i)
        .expect("non-empty")
}

fn triangle_block_counts(cov: &SymMatrix, samples: usize, seed: u64) -> Result<[u64; 9]> {
    let sampler = GaussianSampler::new(cov)?;
    let chunks = samples.div_ceil(MC_CHUNK);
    let counts = (0..chunks)
        .into_par_iter()
        .map(|k| {
            let mut rng = stream_rng(seed, k as u64);
            let n = MC_CHUNK.min(samples - k * MC_CHUNK);
            let mut z = vec![0.0; sampler.rank()];
            let mut v = [0.0; 6];
            let mut counts = [0u64; 9];
            for _ in 0..n {
                fill_normals(&mut rng, &mut z);
                sampler.transform(&z, &mut v);
                let alpha = argmax_random_ties(&v[..3], &mut rng);
                let beta = argmax_random_ties(&v[3..], &mut rng);
                counts[alpha * 3 + beta] += 1;
            }
            counts
        })
        .reduce(
            || [0u64; 9],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    Ok(counts)
}

/// Triangle-binned macroscopic table with standard errors.
///
/// For each setting pair, `samples` Gaussian vectors with the [`triangle_cov`] covariance
/// are drawn; the macroscopic outcome of each party is the index of its largest
/// coordinate. Setting pair `(x, y)` uses the seed `derive_seed(seed, x * mB + y)`.
pub fn triangle_binned_table(b: &Behavior, samples: usize, seed: u64) -> Result<MonteCarloTable> {
    if samples == 0 {
        return Err(Error::InvalidArgument("need at least one sample".into()));
    }
    let s = b.scenario();
    let out = Scenario::new(s.m_a, s.m_b, 3, 3)?;
    let mut counts = vec![0u64; out.table_len()];
    for x in 0..s.m_a {
        for y in 0..s.m_b {
            let cov = triangle_cov(b, x, y)?;
            let block = triangle_block_counts(&cov, samples, derive_seed(seed, (x * s.m_b + y) as u64))?;
            let start = out.index(x, y, 0, 0);
            counts[start..start + 9].copy_from_slice(&block);
        }
    }
    Ok(MonteCarloTable::from_counts(out, &counts, samples))
}

/// [`triangle_binned_table`] as a validated behavior.
pub fn triangle_binned_behavior(b: &Behavior, samples: usize, seed: u64) -> Result<Behavior> {
    triangle_binned_table(b, samples, seed)?.behavior()
}

/// CGLMP3 evaluated on the triangle-binned behavior.
#[derive(Clone, Debug, PartialEq)]
pub struct QtbReport {
    pub value: f64,
    pub std_error: f64,
    pub bound: f64,
    /// Point estimate within the classical bound.
    pub satisfied: bool,
}

impl QtbReport {
    /// Inside/outside when the estimate is more than three standard errors from the
    /// bound, undetermined otherwise.
    pub fn verdict_with_margin(&self) -> MembershipReport {
        let excess = self.value - self.bound;
        if excess > 3.0 * self.std_error {
            MembershipReport::outside(excess, self.witness())
        } else if excess < -3.0 * self.std_error {
            MembershipReport::inside(0.0)
        } else {
            MembershipReport::undetermined(excess)
        }
    }

    /// Verdict of the point estimate.
    pub fn verdict(&self) -> MembershipReport {
        if self.satisfied {
            MembershipReport::inside(0.0)
        } else {
            MembershipReport::outside(self.value - self.bound, self.witness())
        }
    }

    fn witness(&self) -> Witness {
        Witness::Functional {
            name: "CGLMP3 (triangle-binned)".into(),
            value: self.value,
            bound: self.bound,
        }
    }
}

/// Tests the triangle-binned behavior against the CGLMP3 classical bound.
pub fn qtb_check(b: &Behavior, samples: usize, seed: u64) -> Result<QtbReport> {
    let f = cglmp3();
    let t = triangle_binned_table(b, samples, seed)?;
    if t.scenario != f.scenario() {
        return Err(Error::ScenarioUnsupported(b.scenario().to_string()));
    }
    let s = t.scenario;
    let mut value = 0.0;
    let mut variance = 0.0;
    for x in 0..s.m_a {
        for y in 0..s.m_b {
            let (mut mean, mut second) = (0.0, 0.0);
            for a in 0..3 {
                for bb in 0..3 {
                    let c = f.coeff(x, y, a, bb);
                    let p = t.table[s.index(x, y, a, bb)];
                    mean += c * p;
                    second += c * c * p;
                }
            }
            value += mean;
            variance += (second - mean * mean).max(0.0) / samples as f64;
        }
    }
    Ok(QtbReport {
        value,
        std_error: variance.sqrt(),
        bound: f.classical_bound(),
        satisfied: value <= f.classical_bound(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::behavior::white_noise;
    use crate::ml::sign_binned_behavior;
    use crate::behavior::isotropic_chsh;

    #[test]
    fn three_binning_white_noise() {
        let sigma = 0.028;
        let t = three_binned_behavior(&white_noise(Scenario::i3322()).unwrap(), &ThreeBinSpec::new(sigma).unwrap()).unwrap();
        let p0 = (sigma / (sigma + 1.0)).sqrt();
        let pa = |a| t.alice_marginal(0, a);
        assert!((pa(OUTCOME_MIDDLE) - p0).abs() < 1e-12);
        assert!((pa(OUTCOME_PLUS) - pa(OUTCOME_MINUS)).abs() < 1e-12);
        for a in 0..3 {
            for b in 0..3 {
                assert!((t.p(1, 2, a, b) - t.alice_marginal(1, a) * t.bob_marginal(2, b)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn three_binning_limits() {
        let b = isotropic_chsh(0.8).unwrap();
        let narrow = three_binned_behavior(&b, &ThreeBinSpec::new(1e-12).unwrap()).unwrap();
        let sign = sign_binned_behavior(&b).unwrap();
        for x in 0..2 {
            for y in 0..2 {
                for a in 0..2 {
                    for bb in 0..2 {
                        assert!((narrow.p(x, y, a, bb) - sign.p(x, y, a, bb)).abs() < 1e-5);
                    }
                }
                assert!(narrow.alice_marginal(x, OUTCOME_MIDDLE) < 1e-5);
            }
        }
        let wide = three_binned_behavior(&b, &ThreeBinSpec::new(1e12).unwrap()).unwrap();
        assert!((wide.p(0, 0, OUTCOME_MIDDLE, OUTCOME_MIDDLE) - 1.0).abs() < 1e-5);
        assert!(ThreeBinSpec::new(0.0).is_err());
    }

    #[test]
    fn triangle_covariance_cases() {
        let noise = white_noise(Scenario::cglmp3()).unwrap();
        let c = triangle_cov(&noise, 0, 1).unwrap();
        for i in 0..6 {
            for j in 0..6 {
                let expected = if (i < 3) != (j < 3) {
                    0.0
                } else if i == j {
                    1.0 / 3.0 - 1.0 / 9.0
                } else {
                    -1.0 / 9.0
                };
                assert!((c.get(i, j) - expected).abs() < 1e-15);
            }
        }
        let corr = Behavior::from_fn(Scenario::cglmp3(), |_, _, a, b| if a == b { 1.0 / 3.0 } else { 0.0 }).unwrap();
        let c = triangle_cov(&corr, 1, 1).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert!((c.get(i, 3 + j) - c.get(i, j)).abs() < 1e-15);
            }
        }
        assert!(triangle_cov(&white_noise(Scenario::chsh()).unwrap(), 0, 0).is_err());
    }

    #[test]
    fn triangle_white_noise_uniform() {
        let n = 40_000;
        let t = triangle_binned_table(&white_noise(Scenario::cglmp3()).unwrap(), n, 5).unwrap();
        for (p, se) in t.table.iter().zip(&t.std_error) {
            assert!((p - 1.0 / 9.0).abs() < 4.0 * se, "{p}");
        }
        assert!(t.behavior().is_ok());
        assert_eq!(t, triangle_binned_table(&white_noise(Scenario::cglmp3()).unwrap(), n, 5).unwrap());
    }

    #[test]
    fn argmax_ties_are_spread() {
        let mut rng = stream_rng(1, 0);
        let mut hits = [0; 3];
        for _ in 0..3000 {
            hits[argmax_random_ties(&[0.0, 0.0, 0.0], &mut rng)] += 1;
        }
        assert!(hits.iter().all(|&h| h > 900));
        assert_eq!(argmax_random_ties(&[0.1, 0.3, 0.2], &mut rng), 1);
    }
}
