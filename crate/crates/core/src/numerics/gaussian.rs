//! Gaussian utilities: normal CDF, bivariate orthant probability, kernel reweighting of a
//! zero-mean Gaussian, and seeded sampling from (possibly rank-deficient) covariances.

use super::eigen::jacobi_eigen;
use super::matrix::SymMatrix;
use super::rng::{fill_normals, stream_rng};
use crate::error::{Error, Result};
use rayon::prelude::*;
use std::f64::consts::{FRAC_1_SQRT_2, PI};

/// Eigenvalues below this are treated as zero when factoring a covariance.
pub const EIGEN_CLIP: f64 = 1e-14;

/// Rows generated per random stream by [`sample_gaussian`].
pub const SAMPLE_CHUNK: usize = 4096;

/// Standard normal CDF, `0.5 * erfc(-x / sqrt 2)`.
pub fn std_normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x * FRAC_1_SQRT_2)
}

/// `Pr[X > 0, Y > 0]` for a standardized bivariate normal with correlation `rho`:
/// `1/4 + asin(rho) / (2 pi)`.
pub fn orthant_prob(rho: f64) -> Result<f64> {
    if !rho.is_finite() || rho.abs() > 1.0 + 1e-12 {
        return Err(Error::DomainError(rho));
    }
    Ok(0.25 + rho.clamp(-1.0, 1.0).asin() / (2.0 * PI))
}

fn check_kernel_args(cov: &SymMatrix, index: usize, sigma: f64) -> Result<()> {
    if index >= cov.dim() {
        return Err(Error::InvalidArgument(format!("index {index} out of range for dimension {}", cov.dim())));
    }
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::DomainError(sigma));
    }
    Ok(())
}

fn inverse_and_log_det(m: &SymMatrix) -> Result<(SymMatrix, f64)> {
    let e = jacobi_eigen(m)?;
    let max = e.max_value();
    let min = e.min_value();
    if !(min > 1e-13 * max.max(1e-300)) {
        return Err(Error::SingularCovariance);
    }
    let log_det = e.values.iter().map(|l| l.ln()).sum();
    Ok((e.reconstruct_with(|l| 1.0 / l), log_det))
}

/// Multiplies the density of `N(0, cov)` by `exp(-x_index^2 / (2 sigma))`.
///
/// The product equals `scale * N(0, cov')`, where the precision of `cov'` is the old
/// precision plus `1/sigma` at `(index, index)` and `scale = sqrt(det L / det L')`
/// for old/new precision matrices `L`, `L'`. Requires a nonsingular covariance.
pub fn gaussian_kernel_reweight(cov: &SymMatrix, index: usize, sigma: f64) -> Result<(f64, SymMatrix)> {
    check_kernel_args(cov, index, sigma)?;
    let (mut precision, log_det_cov) = inverse_and_log_det(cov)?;
    precision.set(index, index, precision.get(index, index) + 1.0 / sigma);
    let (new_cov, log_det_new_precision) = inverse_and_log_det(&precision)?;
    // det L = 1/det cov
    let scale = (0.5 * (-log_det_cov - log_det_new_precision)).exp();
    Ok((scale, new_cov))
}

/// Covariance-form version of [`gaussian_kernel_reweight`], valid for singular covariances.
///
/// `scale = sqrt(sigma / (sigma + v))` with `v = cov[index, index]`, and
/// `cov' = cov - cov[:, index] cov[index, :] / (sigma + v)`.
pub fn condition_on_kernel(cov: &SymMatrix, index: usize, sigma: f64) -> Result<(f64, SymMatrix)> {
    check_kernel_args(cov, index, sigma)?;
    let v = cov.get(index, index).max(0.0);
    let denom = sigma + v;
    let scale = (sigma / denom).sqrt();
    let n = cov.dim();
    let new_cov = SymMatrix::from_fn(n, |i, j| cov.get(i, j) - cov.get(i, index) * cov.get(index, j) / denom);
    Ok((scale, new_cov))
}

/// Draws zero-mean Gaussian vectors through the eigen factor `V sqrt(max(lambda, 0))`.
#[derive(Clone, Debug)]
pub struct GaussianSampler {
    dim: usize,
    rank: usize,
    /// `dim x rank`, row-major.
    factor: Vec<f64>,
}

impl GaussianSampler {
    pub fn new(cov: &SymMatrix) -> Result<Self> {
        let e = jacobi_eigen(cov)?;
        let dim = cov.dim();
        let kept: Vec<usize> = (0..dim).filter(|&k| e.values[k] > EIGEN_CLIP).collect();
        let rank = kept.len();
        let mut factor = vec![0.0; dim * rank];
        for (c, &k) in kept.iter().enumerate() {
            let s = e.values[k].sqrt();
            for i in 0..dim {
                factor[i * rank + c] = e.vectors[i * dim + k] * s;
            }
        }
        Ok(Self { dim, rank, factor })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of standard normals consumed per draw.
    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Maps `rank` standard normals to one sample.
    #[inline]
    pub fn transform(&self, normals: &[f64], out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate() {
            let row = &self.factor[i * self.rank..(i + 1) * self.rank];
            *o = row.iter().zip(normals).map(|(a, z)| a * z).sum();
        }
    }

    /// Fills `out` (a multiple of `dim` long) with samples drawn from `rng`.
    pub fn fill<R: rand::RngCore>(&self, rng: &mut R, out: &mut [f64]) {
        let mut z = vec![0.0; self.rank];
        for row in out.chunks_exact_mut(self.dim) {
            fill_normals(rng, &mut z);
            self.transform(&z, row);
        }
    }
}

/// `count x dim` sample matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleMatrix {
    pub dim: usize,
    pub count: usize,
    pub data: Vec<f64>,
}

impl SampleMatrix {
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    /// Sample covariance about the known zero mean.
    pub fn covariance(&self) -> SymMatrix {
        let d = self.dim;
        let mut acc = vec![0.0; d * d];
        for row in self.data.chunks_exact(d) {
            for i in 0..d {
                for j in i..d {
                    acc[i * d + j] += row[i] * row[j];
                }
            }
        }
        let n = self.count.max(1) as f64;
        SymMatrix::from_fn(d, |i, j| acc[i * d + j] / n)
    }
}

/// `count` zero-mean samples from `N(0, cov)`, deterministic in `seed`.
///
/// Rows are generated in chunks of [`SAMPLE_CHUNK`]; chunk `k` uses stream `k` of the seed,
/// so the output does not depend on thread scheduling.
pub fn sample_gaussian(cov: &SymMatrix, count: usize, seed: u64) -> Result<SampleMatrix> {
    let sampler = GaussianSampler::new(cov)?;
    let dim = cov.dim();
    let mut data = vec![0.0; count * dim];
    if dim > 0 {
        data.par_chunks_mut(SAMPLE_CHUNK * dim).enumerate().for_each(|(k, chunk)| {
            let mut rng = stream_rng(seed, k as u64);
            sampler.fill(&mut rng, chunk);
        });
    }
    Ok(SampleMatrix { dim, count, data })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Simpson integral of the normal density from 0 to x.
    fn cdf_by_quadrature(x: f64) -> f64 {
        let n = 2_000;
        let h = x / n as f64;
        let pdf = |t: f64| (-0.5 * t * t).exp() / (2.0 * PI).sqrt();
        let mut s = pdf(0.0) + pdf(x);
        for i in 1..n {
            s += if i % 2 == 1 { 4.0 } else { 2.0 } * pdf(i as f64 * h);
        }
        0.5 + s * h / 3.0
    }

    #[test]
    fn normal_cdf_values() {
        assert_eq!(std_normal_cdf(0.0), 0.5);
        assert!((std_normal_cdf(40.0) - 1.0).abs() < 1e-15);
        let (phi, quad) = (std_normal_cdf(1.0), cdf_by_quadrature(1.0));
        assert!((phi - quad).abs() < 1e-11, "{phi} vs {quad}");
        assert!((std_normal_cdf(1.0) - 0.841344746068543).abs() < 1e-12);
    }

    #[test]
    fn orthant_values() {
        assert_eq!(orthant_prob(0.0).unwrap(), 0.25);
        assert!((orthant_prob(1.0).unwrap() - 0.5).abs() < 1e-15);
        assert!((orthant_prob(0.5).unwrap() - 1.0 / 3.0).abs() < 1e-12);
        assert!(orthant_prob(1.0 + 1e-13).is_ok());
        assert!(matches!(orthant_prob(1.1), Err(Error::DomainError(_))));
    }

    #[test]
    fn kernel_one_dimensional() {
        let v = 0.7;
        let sigma = 0.3;
        let (s, c) = gaussian_kernel_reweight(&SymMatrix::diagonal(&[v]), 0, sigma).unwrap();
        assert!((s - (sigma / (sigma + v)).sqrt()).abs() < 1e-14);
        assert!((c.get(0, 0) - v * sigma / (v + sigma)).abs() < 1e-14);
    }

    #[test]
    fn kernel_wide_limit() {
        let cov = SymMatrix::from_rows(&[vec![1.0, 0.3], vec![0.3, 0.8]]);
        let (s, c) = gaussian_kernel_reweight(&cov, 1, 1e12).unwrap();
        assert!((s - 1.0).abs() < 1e-9);
        assert!(c.max_abs_diff(&cov) < 1e-9);
    }

    #[test]
    fn kernel_block_independence() {
        let (v, w, sigma) = (0.6, 1.7, 0.05);
        let (s, c) = gaussian_kernel_reweight(&SymMatrix::diagonal(&[v, w]), 0, sigma).unwrap();
        assert!((s - (sigma / (sigma + v)).sqrt()).abs() < 1e-14);
        assert!(c.max_abs_diff(&SymMatrix::diagonal(&[v * sigma / (v + sigma), w])) < 1e-14);
    }

    #[test]
    fn kernel_forms_agree_and_singular_rejected() {
        let cov = SymMatrix::from_rows(&[vec![0.9, 0.4, 0.1], vec![0.4, 0.75, -0.2], vec![0.1, -0.2, 1.1]]);
        for index in 0..3 {
            let (s1, c1) = gaussian_kernel_reweight(&cov, index, 0.028).unwrap();
            let (s2, c2) = condition_on_kernel(&cov, index, 0.028).unwrap();
            assert!((s1 - s2).abs() < 1e-12);
            assert!(c1.max_abs_diff(&c2) < 1e-12);
        }
        let singular = SymMatrix::from_rows(&[vec![1.0, 1.0], vec![1.0, 1.0]]);
        assert_eq!(gaussian_kernel_reweight(&singular, 0, 0.1).unwrap_err(), Error::SingularCovariance);
        let (s, c) = condition_on_kernel(&singular, 0, 0.1).unwrap();
        assert!((s - (0.1f64 / 1.1).sqrt()).abs() < 1e-15);
        assert!((c.get(1, 1) - 0.1 / 1.1).abs() < 1e-15);
    }

    #[test]
    fn zero_covariance_samples_are_zero() {
        let s = sample_gaussian(&SymMatrix::zeros(3), 100, 1).unwrap();
        assert!(s.data.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn rank_one_samples_coincide() {
        let cov = SymMatrix::from_rows(&[vec![1.0, 1.0], vec![1.0, 1.0]]);
        let s = sample_gaussian(&cov, 10_000, 3).unwrap();
        for i in 0..s.count {
            let r = s.row(i);
            assert!((r[0] - r[1]).abs() < 1e-12);
        }
    }

    #[test]
    fn identity_sample_covariance() {
        let s = sample_gaussian(&SymMatrix::identity(2), 1_000_000, 11).unwrap();
        assert!(s.covariance().max_abs_diff(&SymMatrix::identity(2)) < 0.01);
    }

    #[test]
    fn sampling_is_bit_reproducible() {
        let cov = SymMatrix::from_rows(&[vec![2.0, 0.5], vec![0.5, 1.0]]);
        let a = sample_gaussian(&cov, 3 * SAMPLE_CHUNK + 17, 5).unwrap();
        let b = sample_gaussian(&cov, 3 * SAMPLE_CHUNK + 17, 5).unwrap();
        assert_eq!(a, b);
    }
}
