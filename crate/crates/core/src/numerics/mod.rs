//! Self-contained numerical kernels used by the rest of the crate.

pub mod eigen;
pub mod gaussian;
pub mod matrix;
pub mod psd;
pub mod rng;
pub mod simplex;

pub use eigen::{jacobi_eigen, SymEigen};
pub use gaussian::{
    condition_on_kernel, gaussian_kernel_reweight, orthant_prob, sample_gaussian, std_normal_cdf, GaussianSampler,
    SampleMatrix,
};
pub use matrix::{SymMask, SymMatrix};
pub use psd::{complete_to_psd, project_psd, psd_completion, FeasibilityProblem, COMPLETION_MAX_ITER, COMPLETION_TOL};
pub use simplex::{simplex_solve, LinearProgram, LpSolution, LpStatus};
