//! Level-1 moment matrix of the semidefinite hierarchy, decided by PSD completion.
//!
//! The basis is the identity followed by the projectors of the first `d - 1` outcomes
//! of every setting of each party (the last outcome is implied by normalization). Known
//! entries are fixed by the behavior; products of two projectors for different settings
//! of the same party are free.
//!
//! The completion runs on a preconditioned copy: every projector is centered on its
//! marginal and scaled to unit variance. Centering subtracts multiples of the identity row
//! and scaling is diagonal, so the change of basis is an invertible congruence that maps
//! known entries to known entries and free to free; PSD completability is unchanged, and
//! the iteration sees a correlation matrix instead of a badly scaled projector matrix.
//!
//! Only real symmetric completions are searched. This loses nothing: if a Hermitian
//! completion `M` is PSD, so is its complex conjugate, hence so is `(M + conj M) / 2`,
//! which is real and keeps every (real) known entry.

use crate::behavior::Behavior;
use crate::error::{Error, Result};
use crate::membership::MembershipReport;
use crate::numerics::{complete_to_psd, FeasibilityProblem, SymMask, SymMatrix, COMPLETION_MAX_ITER, COMPLETION_TOL};

/// Largest basis the completion solver accepts.
pub const MAX_BASIS: usize = 32;

#[derive(Clone, Debug)]
pub struct Npa1Template {
    m_a: usize,
    d_a: usize,
    d_b: usize,
    problem: FeasibilityProblem,
    preconditioned: FeasibilityProblem,
}

/// Variances below this are left unscaled.
const MIN_VARIANCE: f64 = 1e-12;

/// Centered, unit-variance copy of a moment-matrix problem whose row 0 is the identity.
fn precondition(p: &FeasibilityProblem) -> Result<FeasibilityProblem> {
    let n = p.dim();
    let mean: Vec<f64> = (0..n).map(|i| if i == 0 { 0.0 } else { p.template.get(0, i) }).collect();
    let scale: Vec<f64> = (0..n)
        .map(|i| {
            let var = p.template.get(i, i) - mean[i] * mean[i];
            if i == 0 || var <= MIN_VARIANCE {
                1.0
            } else {
                1.0 / var.sqrt()
            }
        })
        .collect();
    let template = SymMatrix::from_fn(n, |i, j| match (i, j) {
        (0, 0) => 1.0,
        (0, _) | (_, 0) => 0.0,
        _ if p.mask.is_known(i, j) => (p.template.get(i, j) - mean[i] * mean[j]) * scale[i] * scale[j],
        _ => 0.0,
    });
    FeasibilityProblem::new(template, p.mask.clone())
}

impl Npa1Template {
    pub fn new(b: &Behavior) -> Result<Self> {
        let s = b.scenario();
        let dim = 1 + s.m_a * (s.d_a - 1) + s.m_b * (s.d_b - 1);
        if dim > MAX_BASIS {
            return Err(Error::ScenarioUnsupported(format!("{s}: moment matrix of size {dim} exceeds {MAX_BASIS}")));
        }
        let mut this = Self {
            m_a: s.m_a,
            d_a: s.d_a,
            d_b: s.d_b,
            problem: FeasibilityProblem::new(SymMatrix::zeros(dim), SymMask::none(dim))?,
            preconditioned: FeasibilityProblem::new(SymMatrix::zeros(dim), SymMask::none(dim))?,
        };
        let mut t = SymMatrix::zeros(dim);
        let mut mask = SymMask::none(dim);
        let mut fix = |i: usize, j: usize, v: f64| {
            t.set(i, j, v);
            mask.mark(i, j);
        };
        fix(0, 0, 1.0);
        for x in 0..s.m_a {
            for a in 0..s.d_a - 1 {
                let p = b.alice_marginal(x, a);
                let i = this.alice_index(x, a);
                fix(0, i, p);
                for a2 in 0..s.d_a - 1 {
                    fix(i, this.alice_index(x, a2), if a == a2 { p } else { 0.0 });
                }
            }
        }
        for y in 0..s.m_b {
            for bb in 0..s.d_b - 1 {
                let p = b.bob_marginal(y, bb);
                let j = this.bob_index(y, bb);
                fix(0, j, p);
                for b2 in 0..s.d_b - 1 {
                    fix(j, this.bob_index(y, b2), if bb == b2 { p } else { 0.0 });
                }
            }
        }
        for x in 0..s.m_a {
            for y in 0..s.m_b {
                for a in 0..s.d_a - 1 {
                    for bb in 0..s.d_b - 1 {
                        fix(this.alice_index(x, a), this.bob_index(y, bb), b.p(x, y, a, bb));
                    }
                }
            }
        }
        this.problem = FeasibilityProblem::new(t, mask)?;
        this.preconditioned = precondition(&this.problem)?;
        Ok(this)
    }

    pub fn dim(&self) -> usize {
        self.problem.dim()
    }

    pub fn alice_index(&self, x: usize, a: usize) -> usize {
        1 + x * (self.d_a - 1) + a
    }

    pub fn bob_index(&self, y: usize, b: usize) -> usize {
        1 + self.m_a * (self.d_a - 1) + y * (self.d_b - 1) + b
    }

    /// The moment matrix in the projector basis.
    pub fn problem(&self) -> &FeasibilityProblem {
        &self.problem
    }

    /// The same problem after centering and unit-variance scaling; this is what
    /// [`q1_numeric`] completes.
    pub fn preconditioned(&self) -> &FeasibilityProblem {
        &self.preconditioned
    }
}

/// Numerical Q¹ membership with the default completion tolerance and iteration cap.
pub fn q1_numeric(b: &Behavior) -> Result<MembershipReport> {
    q1_numeric_with(b, COMPLETION_TOL, COMPLETION_MAX_ITER)
}

pub fn q1_numeric_with(b: &Behavior, tol: f64, max_iter: usize) -> Result<MembershipReport> {
    complete_to_psd(Npa1Template::new(b)?.preconditioned(), tol, max_iter)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::behavior::{isotropic_chsh, pr_box, white_noise, Scenario};

    #[test]
    fn template_layout() {
        let t = Npa1Template::new(&white_noise(Scenario::i3322()).unwrap()).unwrap();
        assert_eq!(t.dim(), 7);
        let p = t.problem();
        assert_eq!(p.template.get(0, 0), 1.0);
        assert_eq!(p.template.get(0, t.alice_index(2, 0)), 0.5);
        assert_eq!(p.template.get(t.alice_index(1, 0), t.bob_index(2, 0)), 0.25);
        assert!(!p.mask.is_known(t.alice_index(0, 0), t.alice_index(1, 0)));
        assert!(p.mask.is_known(t.alice_index(1, 0), t.alice_index(1, 0)));
    }

    #[test]
    fn preconditioned_is_correlation_form() {
        let b = isotropic_chsh(0.8).unwrap();
        let t = Npa1Template::new(&b).unwrap();
        let p = t.preconditioned();
        for i in 0..t.dim() {
            assert!((p.template.get(i, i) - 1.0).abs() < 1e-15);
        }
        assert_eq!(p.template.get(0, 1), 0.0);
        // correlator <A0 B0> = 0.8 / sqrt 2
        let c = p.template.get(t.alice_index(0, 0), t.bob_index(0, 0));
        assert!((c - 0.8 * std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        assert_eq!(p.mask, t.problem().mask);
    }

    #[test]
    fn noise_inside_everywhere() {
        for s in [Scenario::chsh(), Scenario::i3322(), Scenario::cglmp3()] {
            assert!(q1_numeric(&white_noise(s).unwrap()).unwrap().is_inside());
        }
    }

    #[test]
    fn chsh_line_sides() {
        assert!(!q1_numeric(&pr_box()).unwrap().is_inside());
        assert!(q1_numeric(&isotropic_chsh(0.99).unwrap()).unwrap().is_inside());
        assert!(!q1_numeric(&isotropic_chsh(1.01).unwrap()).unwrap().is_inside());
    }
}
