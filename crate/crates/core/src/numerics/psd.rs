//! PSD cone projection and PSD matrix completion by Dykstra's alternating projections.

use super::eigen::jacobi_eigen;
use super::matrix::{SymMask, SymMatrix};
use crate::error::{Error, Result};
use crate::membership::{MembershipReport, Witness};

pub const COMPLETION_TOL: f64 = 1e-8;
pub const COMPLETION_MAX_ITER: usize = 5000;

/// How often (in iterations) the affine iterate is tested for positive semidefiniteness.
const CHECK_EVERY: usize = 5;

/// Nearest PSD matrix in Frobenius norm: negative eigenvalues clipped to zero.
pub fn project_psd(m: &SymMatrix) -> Result<SymMatrix> {
    Ok(jacobi_eigen(m)?.reconstruct_with(|l| l.max(0.0)))
}

/// A partially specified symmetric matrix: entries marked in `mask` are fixed to the
/// corresponding `template` values, all others are free.
#[derive(Clone, Debug)]
pub struct FeasibilityProblem {
    pub template: SymMatrix,
    pub mask: SymMask,
}

impl FeasibilityProblem {
    pub fn new(template: SymMatrix, mask: SymMask) -> Result<Self> {
        if template.dim() != mask.dim() {
            return Err(Error::ShapeMismatch(format!(
                "template is {}x{}, mask is {}x{}",
                template.dim(),
                template.dim(),
                mask.dim(),
                mask.dim()
            )));
        }
        Ok(Self { template, mask })
    }

    pub fn dim(&self) -> usize {
        self.template.dim()
    }

    /// Projection onto the affine set: known entries reset, free entries kept.
    pub fn project_affine(&self, m: &SymMatrix) -> SymMatrix {
        let n = self.dim();
        SymMatrix::from_fn(n, |i, j| {
            if self.mask.is_known(i, j) {
                self.template.get(i, j)
            } else {
                m.get(i, j)
            }
        })
    }

    /// Starting point: known entries from the template, zeros elsewhere.
    pub fn initial_point(&self) -> SymMatrix {
        self.project_affine(&SymMatrix::zeros(self.dim()))
    }
}

/// Frobenius distance from `m` to the PSD cone, i.e. the norm of its negative spectrum.
fn psd_gap(m: &SymMatrix) -> Result<(f64, f64)> {
    let e = jacobi_eigen(m)?;
    let gap = e.values.iter().filter(|&&l| l < 0.0).map(|l| l * l).sum::<f64>().sqrt();
    Ok((gap, e.min_value()))
}

/// Positive lower bounds on the spectrum targeted before the plain PSD cone.
const SHIFT_SCHEDULE: [f64; 7] = [1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7];
/// Share of the iteration budget given to each shifted phase.
const SHIFT_PHASE_FRACTION: usize = 10;

/// Nearest matrix with every eigenvalue `>= floor`.
fn project_spectrum_floor(m: &SymMatrix, floor: f64) -> Result<SymMatrix> {
    Ok(jacobi_eigen(m)?.reconstruct_with(|l| l.max(floor)))
}

/// Decides whether the free entries can be chosen so the matrix is PSD.
///
/// Dykstra-corrected alternating projections between the affine set of completions and the
/// PSD cone. Plain Dykstra converges to the completion nearest the starting point, which
/// sits on the boundary of the cone, and the eigenvalues of the affine iterate approach
/// zero from below very slowly when the feasible set is thin. The iteration therefore
/// first targets the shrunken cones `{M : M >= s I}` for decreasing `s` from `1e-1` to
/// `1e-7`, each for a tenth of the budget, every phase warm-started from the last affine
/// iterate; the remaining three tenths run against the PSD cone itself. Every shrunken cone lies inside the PSD
/// cone, so the schedule only changes how fast an inside certificate is found.
///
/// The verdict is `inside` as soon as an affine iterate (which matches every known entry
/// exactly) has smallest eigenvalue `>= -tol`; `outside` when after `max_iter` iterations
/// in total the distance from the affine iterate to the cone still exceeds `10 * tol`;
/// `undetermined` otherwise. The residual is that final distance.
pub fn complete_to_psd(problem: &FeasibilityProblem, tol: f64, max_iter: usize) -> Result<MembershipReport> {
    Ok(psd_completion(problem, tol, max_iter)?.0)
}

/// Like [`complete_to_psd`] but also returns the last affine iterate (the completion when inside).
pub fn psd_completion(
    problem: &FeasibilityProblem,
    tol: f64,
    max_iter: usize,
) -> Result<(MembershipReport, SymMatrix)> {
    let n = problem.dim();
    let mut x = problem.initial_point();
    let (gap, min_eig) = psd_gap(&x)?;
    if min_eig >= -tol {
        return Ok((MembershipReport::inside(gap), x));
    }

    let shifted = max_iter / SHIFT_PHASE_FRACTION;
    let mut phases: Vec<(f64, usize)> = SHIFT_SCHEDULE.iter().map(|&s| (s, shifted)).collect();
    phases.push((0.0, max_iter - shifted * SHIFT_SCHEDULE.len()));

    let mut done = 0;
    for (floor, iters) in phases {
        let mut p = SymMatrix::zeros(n);
        let mut q = SymMatrix::zeros(n);
        for _ in 0..iters {
            let xp = x.add(&p);
            let y = project_spectrum_floor(&xp, floor)?;
            p = xp.sub(&y);
            let yq = y.add(&q);
            let next = problem.project_affine(&yq);
            q = yq.sub(&next);
            x = next;
            done += 1;

            if done % CHECK_EVERY == 0 {
                let (gap, min_eig) = psd_gap(&x)?;
                if min_eig >= -tol {
                    return Ok((MembershipReport::inside(gap), x));
                }
            }
        }
    }

    let (gap, min_eig) = psd_gap(&x)?;
    let report = if min_eig >= -tol {
        MembershipReport::inside(gap)
    } else if gap > 10.0 * tol {
        MembershipReport::outside(gap, Witness::InfeasibilityGap { gap })
    } else {
        MembershipReport::undetermined(gap)
    };
    Ok((report, x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::membership::Verdict;

    #[test]
    fn psd_input_unchanged() {
        let m = SymMatrix::from_rows(&[vec![2.0, 0.5], vec![0.5, 1.0]]);
        assert!(project_psd(&m).unwrap().max_abs_diff(&m) <= 1e-12);
    }

    #[test]
    fn clips_negative_diagonal() {
        let p = project_psd(&SymMatrix::diagonal(&[1.0, -2.0])).unwrap();
        assert!(p.max_abs_diff(&SymMatrix::diagonal(&[1.0, 0.0])) <= 1e-15);
    }

    #[test]
    fn swap_matrix_rank_one_clip() {
        let m = SymMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]);
        let p = project_psd(&m).unwrap();
        let expected = SymMatrix::from_rows(&[vec![0.5, 0.5], vec![0.5, 0.5]]);
        assert!(p.max_abs_diff(&expected) <= 1e-15);
    }

    #[test]
    fn fully_known_psd_is_inside() {
        let t = SymMatrix::from_rows(&[vec![1.0, 0.3], vec![0.3, 1.0]]);
        let prob = FeasibilityProblem::new(t, SymMask::all(2)).unwrap();
        let r = complete_to_psd(&prob, COMPLETION_TOL, COMPLETION_MAX_ITER).unwrap();
        assert_eq!(r.verdict, Verdict::Inside);
    }

    #[test]
    fn fully_known_indefinite_is_outside() {
        let t = SymMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 1.0]]);
        let prob = FeasibilityProblem::new(t, SymMask::all(2)).unwrap();
        let r = complete_to_psd(&prob, COMPLETION_TOL, 10).unwrap();
        assert_eq!(r.verdict, Verdict::Outside);
        assert!(r.witness.is_some());
    }

    #[test]
    fn free_off_diagonal_completes() {
        // [[1, ?], [?, 1]] is trivially completable
        let mut mask = SymMask::none(2);
        mask.mark(0, 0);
        mask.mark(1, 1);
        let prob = FeasibilityProblem::new(SymMatrix::identity(2), mask).unwrap();
        let (r, m) = psd_completion(&prob, COMPLETION_TOL, COMPLETION_MAX_ITER).unwrap();
        assert!(r.is_inside());
        assert_eq!(m.get(0, 0), 1.0);
    }

    #[test]
    fn mismatched_mask_rejected() {
        assert!(FeasibilityProblem::new(SymMatrix::identity(2), SymMask::all(3)).is_err());
    }
}
