//! Closed-form Q¹ test for scenarios where one party has two binary settings.
//!
//! After the Schur complement with respect to the identity row and a diagonal rescaling,
//! the level-1 moment matrix becomes `[[A, C], [C^T, B]]` with unit diagonal, `C` the
//! 2 x n matrix of normalized correlators and every other entry free. It is completable
//! iff some `x` in `[-1, 1]` satisfies `1 - x^2 - C_1i^2 - C_2i^2 + 2 x C_1i C_2i >= 0` for
//! all columns, which is equivalent to a family of arcsine inequalities.

use super::sign::{arcsin_sum, correlation_matrix, ARCSIN_TOL};
use crate::behavior::Behavior;
use crate::error::{Error, Result};
use crate::membership::{MembershipReport, Witness};
use crate::numerics::{FeasibilityProblem, SymMask, SymMatrix};
use std::f64::consts::PI;

fn check_two_rows(c: &[Vec<f64>]) -> Result<usize> {
    let n = c.first().map_or(0, Vec::len);
    if c.len() != 2 || n == 0 || c[1].len() != n {
        return Err(Error::ShapeMismatch("expected a 2 x n matrix with n >= 1".into()));
    }
    if let Some(&v) = c.iter().flatten().find(|v| !(-1.0..=1.0).contains(*v)) {
        return Err(Error::DomainError(v));
    }
    Ok(n)
}

/// Range of admissible `x` before intersecting columns: `lower <= upper`.
fn column_limits(c1: f64, c2: f64) -> (f64, f64) {
    let s = ((1.0 - c1 * c1) * (1.0 - c2 * c2)).max(0.0).sqrt();
    (c1 * c2 - s, c1 * c2 + s)
}

/// Signed width `min(upper) - max(lower)` of the admissible interval for `x`.
pub fn lemma1_margin(c: &[Vec<f64>]) -> Result<f64> {
    let n = check_two_rows(c)?;
    let (mut lo, mut hi) = (-1.0_f64, 1.0_f64);
    for i in 0..n {
        let (l, u) = column_limits(c[0][i], c[1][i]);
        lo = lo.max(l);
        hi = hi.min(u);
    }
    Ok(hi - lo)
}

/// Whether some `x` completes the bordered matrix, and the admissible interval of `x`.
pub fn lemma1_feasible(c: &[Vec<f64>]) -> Result<(bool, Option<(f64, f64)>)> {
    let n = check_two_rows(c)?;
    let (mut lo, mut hi) = (-1.0_f64, 1.0_f64);
    for i in 0..n {
        let (l, u) = column_limits(c[0][i], c[1][i]);
        lo = lo.max(l);
        hi = hi.min(u);
    }
    if lo <= hi + ARCSIN_TOL {
        Ok((true, Some((lo.min(hi), hi.max(lo)))))
    } else {
        Ok((false, None))
    }
}

/// The most violated arcsine inequality: `(i, j, minus, lhs)` maximizing the left side.
fn worst_arcsin(c: &[Vec<f64>]) -> Result<Option<(usize, usize, usize, f64)>> {
    let n = check_two_rows(c)?;
    let mut worst: Option<(usize, usize, usize, f64)> = None;
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            for minus in 0..4 {
                let lhs = arcsin_sum(c, i, j, minus)?;
                if worst.is_none_or(|w| lhs > w.3) {
                    worst = Some((i, j, minus, lhs));
                }
            }
        }
    }
    Ok(worst)
}

/// `pi` minus the largest arcsine sum over all ordered column pairs and minus positions
/// (infinite for a single column).
pub fn theorem2_margin(c: &[Vec<f64>]) -> Result<f64> {
    Ok(worst_arcsin(c)?.map_or(f64::INFINITY, |w| PI - w.3))
}

/// All arcsine inequalities `|+-asin C_1i +- asin C_2i +- asin C_1j -+ asin C_2j| <= pi`
/// with a single minus sign hold.
pub fn theorem2_check(c: &[Vec<f64>]) -> Result<bool> {
    Ok(theorem2_margin(c)? >= -ARCSIN_TOL)
}

/// The partially specified `(n + 2)`-square matrix `[[A, C], [C^T, B]]`: unit diagonal,
/// known `C`, free off-diagonal entries of `A` and `B`.
pub fn bordered_problem(c: &[Vec<f64>]) -> Result<FeasibilityProblem> {
    let n = check_two_rows(c)?;
    let dim = n + 2;
    let mut template = SymMatrix::identity(dim);
    let mut mask = SymMask::none(dim);
    for k in 0..dim {
        mask.mark(k, k);
    }
    for (r, row) in c.iter().enumerate() {
        for (i, &v) in row.iter().enumerate() {
            template.set(r, 2 + i, v);
            mask.mark(r, 2 + i);
        }
    }
    FeasibilityProblem::new(template, mask)
}

/// Two-setting party's correlators as a 2 x n matrix (rows are that party's settings).
fn two_setting_matrix(b: &Behavior) -> Result<Vec<Vec<f64>>> {
    let s = b.scenario();
    if !s.is_binary() || (s.m_a != 2 && s.m_b != 2) {
        return Err(Error::ScenarioUnsupported(format!("{s} (needs a party with 2 binary settings)")));
    }
    let d = correlation_matrix(b)?;
    if s.m_a == 2 {
        Ok(d)
    } else {
        Ok((0..2).map(|y| d.iter().map(|row| row[y]).collect()).collect())
    }
}

/// Margin of the analytic Q¹ test: positive inside, negative outside.
pub fn q1_analytic_margin(b: &Behavior) -> Result<f64> {
    theorem2_margin(&two_setting_matrix(b)?)
}

/// Analytic Q¹ membership for 2n22 (or n222) behaviors via the arcsine inequalities.
pub fn q1_analytic_2n22(b: &Behavior) -> Result<MembershipReport> {
    let c = two_setting_matrix(b)?;
    match worst_arcsin(&c)? {
        Some((i, j, minus, lhs)) if lhs > PI + ARCSIN_TOL => Ok(MembershipReport::outside(
            lhs - PI,
            Witness::Inequality {
                description: format!("arcsine inequality (i={i}, j={j}, negated term {minus})"),
                lhs,
                bound: PI,
            },
        )),
        Some((.., lhs)) => Ok(MembershipReport::inside((lhs - PI).max(0.0))),
        None => Ok(MembershipReport::inside(0.0)),
    }
}
