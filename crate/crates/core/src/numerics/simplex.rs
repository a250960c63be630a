//! Dense two-phase tableau simplex for `maximize c.x  s.t.  A x = b, x >= 0`.
//!
//! Pricing is Dantzig's most-negative reduced cost; after a run of degenerate pivots the
//! solver switches to Bland's smallest-index rule, which cannot cycle, and returns to
//! Dantzig on the next pivot that makes progress.

use crate::error::{Error, Result};

const COST_EPS: f64 = 1e-11;
const PIVOT_EPS: f64 = 1e-9;
const FEASIBILITY_TOL: f64 = 1e-9;
const DEGENERATE_STREAK_FOR_BLAND: usize = 16;
const MAX_PIVOTS: usize = 200_000;

#[derive(Clone, Debug)]
pub struct LinearProgram {
    objective: Vec<f64>,
    a: Vec<f64>,
    b: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Clone, Debug)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Objective value at `x` (meaningful only when optimal).
    pub value: f64,
    pub x: Vec<f64>,
    /// Phase-one optimum: total artificial mass left, zero for feasible programs.
    pub infeasibility: f64,
    /// `max |A x - b|` at the returned point.
    pub residual: f64,
}

impl LinearProgram {
    /// A program over `objective.len()` nonnegative variables with no constraints yet.
    pub fn new(objective: Vec<f64>) -> Self {
        Self {
            objective,
            a: Vec::new(),
            b: Vec::new(),
        }
    }

    pub fn feasibility(num_vars: usize) -> Self {
        Self::new(vec![0.0; num_vars])
    }

    pub fn with_equalities(objective: Vec<f64>, rows: Vec<Vec<f64>>, rhs: Vec<f64>) -> Result<Self> {
        if rows.len() != rhs.len() {
            return Err(Error::ShapeMismatch(format!("{} rows but {} right-hand sides", rows.len(), rhs.len())));
        }
        let mut lp = Self::new(objective);
        for (row, r) in rows.into_iter().zip(rhs) {
            lp.add_equality(&row, r)?;
        }
        Ok(lp)
    }

    pub fn add_equality(&mut self, coeffs: &[f64], rhs: f64) -> Result<()> {
        if coeffs.len() != self.num_vars() {
            return Err(Error::ShapeMismatch(format!(
                "constraint has {} coefficients, program has {} variables",
                coeffs.len(),
                self.num_vars()
            )));
        }
        self.a.extend_from_slice(coeffs);
        self.b.push(rhs);
        Ok(())
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.b.len()
    }

    pub fn objective(&self) -> &[f64] {
        &self.objective
    }

    fn residual(&self, x: &[f64]) -> f64 {
        let n = self.num_vars();
        (0..self.num_constraints())
            .map(|i| {
                let row = &self.a[i * n..(i + 1) * n];
                (row.iter().zip(x).map(|(a, x)| a * x).sum::<f64>() - self.b[i]).abs()
            })
            .fold(0.0, f64::max)
    }
}

struct Tableau {
    rows: usize,
    width: usize,
    /// `rows + 1` rows; the last row holds reduced costs and `-objective` in the rhs slot.
    data: Vec<f64>,
    basis: Vec<usize>,
    /// Columns `>= enterable` never enter the basis.
    enterable: usize,
}

impl Tableau {
    #[inline]
    fn at(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.width + c]
    }

    #[inline]
    fn rhs(&self, r: usize) -> f64 {
        self.data[r * self.width + self.width - 1]
    }

    fn pivot(&mut self, pr: usize, pc: usize) {
        let w = self.width;
        let inv = 1.0 / self.at(pr, pc);
        {
            let row = &mut self.data[pr * w..(pr + 1) * w];
            for v in row.iter_mut() {
                *v *= inv;
            }
            row[pc] = 1.0;
        }
        let (before, rest) = self.data.split_at_mut(pr * w);
        let (pivot_row, after) = rest.split_at_mut(w);
        let eliminate = |row: &mut [f64]| {
            let factor = row[pc];
            if factor != 0.0 {
                for (v, p) in row.iter_mut().zip(pivot_row.iter()) {
                    *v -= factor * p;
                }
                row[pc] = 0.0;
            }
        };
        before.chunks_mut(w).for_each(eliminate);
        after.chunks_mut(w).for_each(eliminate);
        // clamp round-off so the basic solution stays nonnegative
        for r in 0..self.rows {
            let k = r * w + w - 1;
            if self.data[k] < 0.0 && self.data[k] > -1e-13 {
                self.data[k] = 0.0;
            }
        }
        self.basis[pr] = pc;
    }

    /// Minimizes the objective encoded in the last row. Returns `false` when unbounded.
    fn optimize(&mut self) -> Result<bool> {
        let obj = self.rows;
        let mut degenerate_streak = 0usize;
        for _ in 0..MAX_PIVOTS {
            let bland = degenerate_streak >= DEGENERATE_STREAK_FOR_BLAND;
            let mut entering = None;
            let mut best = -COST_EPS;
            for c in 0..self.enterable {
                let d = self.at(obj, c);
                if d < best {
                    entering = Some(c);
                    if bland {
                        break;
                    }
                    best = d;
                }
            }
            let Some(pc) = entering else {
                return Ok(true);
            };

            let mut leaving: Option<(usize, f64, f64)> = None;
            for r in 0..self.rows {
                let a = self.at(r, pc);
                if a <= PIVOT_EPS {
                    continue;
                }
                let ratio = self.rhs(r) / a;
                leaving = match leaving {
                    None => Some((r, ratio, a)),
                    Some((lr, lratio, la)) => {
                        let tie = (ratio - lratio).abs() <= 1e-12 * lratio.abs().max(1.0);
                        let better = if tie {
                            if bland {
                                self.basis[r] < self.basis[lr]
                            } else {
                                a > la
                            }
                        } else {
                            ratio < lratio
                        };
                        if better {
                            Some((r, ratio, a))
                        } else {
                            Some((lr, lratio, la))
                        }
                    }
                };
            }
            let Some((pr, ratio, _)) = leaving else {
                return Ok(false);
            };
            if ratio <= 1e-12 {
                degenerate_streak += 1;
            } else {
                degenerate_streak = 0;
            }
            self.pivot(pr, pc);
        }
        Err(Error::NumericalBreakdown(format!("no convergence after {MAX_PIVOTS} pivots")))
    }
}

/// Solves the program with the two-phase method.
pub fn simplex_solve(lp: &LinearProgram) -> Result<LpSolution> {
    let n = lp.num_vars();
    let m = lp.num_constraints();

    // Phase one over [x | artificials | rhs].
    let width = n + m + 1;
    let mut data = vec![0.0; (m + 1) * width];
    for i in 0..m {
        let sign = if lp.b[i] < 0.0 { -1.0 } else { 1.0 };
        for j in 0..n {
            data[i * width + j] = sign * lp.a[i * n + j];
        }
        data[i * width + n + i] = 1.0;
        data[i * width + width - 1] = sign * lp.b[i];
    }
    for i in 0..m {
        for j in 0..n {
            data[m * width + j] -= data[i * width + j];
        }
        data[m * width + width - 1] -= data[i * width + width - 1];
    }
    let mut tab = Tableau {
        rows: m,
        width,
        data,
        basis: (n..n + m).collect(),
        enterable: n,
    };
    tab.optimize()?;
    let infeasibility = -tab.rhs(m);

    let extract = |tab: &Tableau| {
        let mut x = vec![0.0; n];
        for r in 0..tab.rows {
            if tab.basis[r] < n {
                x[tab.basis[r]] = tab.rhs(r).max(0.0);
            }
        }
        x
    };

    if infeasibility > FEASIBILITY_TOL {
        let x = extract(&tab);
        return Ok(LpSolution {
            status: LpStatus::Infeasible,
            value: f64::NAN,
            residual: lp.residual(&x),
            x,
            infeasibility,
        });
    }

    // Drive remaining artificials out of the basis; rows where that is impossible are redundant.
    let mut keep = vec![true; m];
    for r in 0..m {
        if tab.basis[r] < n {
            continue;
        }
        let mut best: Option<(usize, f64)> = None;
        for c in 0..n {
            let a = tab.at(r, c).abs();
            if a > PIVOT_EPS && best.is_none_or(|(_, b)| a > b) && !tab.basis.contains(&c) {
                best = Some((c, a));
            }
        }
        match best {
            Some((c, _)) => tab.pivot(r, c),
            None => keep[r] = false,
        }
    }

    // Phase two tableau: kept rows, original columns only.
    let rows2: Vec<usize> = (0..m).filter(|&r| keep[r]).collect();
    let m2 = rows2.len();
    let width2 = n + 1;
    let mut data2 = vec![0.0; (m2 + 1) * width2];
    let mut basis2 = Vec::with_capacity(m2);
    for (i, &r) in rows2.iter().enumerate() {
        for j in 0..n {
            data2[i * width2 + j] = tab.at(r, j);
        }
        data2[i * width2 + n] = tab.rhs(r);
        basis2.push(tab.basis[r]);
    }
    // minimize -c.x
    for j in 0..n {
        data2[m2 * width2 + j] = -lp.objective[j];
    }
    for (i, &bv) in basis2.iter().enumerate() {
        let cb = -lp.objective[bv];
        if cb != 0.0 {
            for j in 0..width2 {
                data2[m2 * width2 + j] -= cb * data2[i * width2 + j];
            }
        }
    }
    let mut tab2 = Tableau {
        rows: m2,
        width: width2,
        data: data2,
        basis: basis2,
        enterable: n,
    };
    let bounded = tab2.optimize()?;
    let x = extract(&tab2);
    let value = lp.objective.iter().zip(&x).map(|(c, x)| c * x).sum();
    Ok(LpSolution {
        status: if bounded { LpStatus::Optimal } else { LpStatus::Unbounded },
        value,
        residual: lp.residual(&x),
        x,
        infeasibility,
    })
}
