//! Classical bounds by enumeration and local-polytope membership by linear programming.

use super::functional::{witness_candidates, BellFunctional};
use crate::behavior::{Behavior, Scenario};
use crate::error::{Error, Result};
use crate::membership::{MembershipReport, Witness};
use crate::numerics::{simplex_solve, LinearProgram, LpStatus};
use rayon::prelude::*;

/// Largest number of Alice strategies (for bounds) or product strategies (for LPs).
pub const MAX_STRATEGIES: u128 = 1_000_000;

/// Residual below which the locality LP is considered feasible.
pub const LOCAL_TOL: f64 = 1e-9;

/// Decodes strategy `k` into one outcome per setting (base-`d` digits).
fn decode(mut k: usize, settings: usize, d: usize) -> Vec<usize> {
    (0..settings)
        .map(|_| {
            let o = k % d;
            k /= d;
            o
        })
        .collect()
}

/// Maximum of the functional over deterministic local strategies.
///
/// Alice's strategies are enumerated; for each one Bob's best response is chosen
/// setting by setting, which is exact since the functional is linear in his response.
pub fn local_bound(f: &BellFunctional) -> Result<f64> {
    let s = f.scenario();
    let count = s.alice_strategies();
    if count > MAX_STRATEGIES {
        return Err(Error::TooLarge(count));
    }
    let best = (0..count as usize)
        .into_par_iter()
        .map(|k| {
            let alice = decode(k, s.m_a, s.d_a);
            (0..s.m_b)
                .map(|y| {
                    (0..s.d_b)
                        .map(|b| (0..s.m_a).map(|x| f.coeff(x, y, alice[x], b)).sum::<f64>())
                        .fold(f64::NEG_INFINITY, f64::max)
                })
                .sum::<f64>()
        })
        .reduce(|| f64::NEG_INFINITY, f64::max);
    Ok(best)
}

fn product_strategy_count(s: Scenario) -> Result<usize> {
    let count = s.alice_strategies().saturating_mul(s.bob_strategies());
    if count > MAX_STRATEGIES {
        return Err(Error::TooLarge(count));
    }
    Ok(count as usize)
}

/// Columns of the deterministic product behaviors: `column[j]` lists the table indices
/// that strategy `j` sets to one.
fn deterministic_supports(s: Scenario) -> Result<Vec<Vec<usize>>> {
    let count = product_strategy_count(s)?;
    let n_alice = s.alice_strategies() as usize;
    Ok((0..count)
        .map(|j| {
            let alice = decode(j % n_alice, s.m_a, s.d_a);
            let bob = decode(j / n_alice, s.m_b, s.d_b);
            let mut support = Vec::with_capacity(s.m_a * s.m_b);
            for x in 0..s.m_a {
                for y in 0..s.m_b {
                    support.push(s.index(x, y, alice[x], bob[y]));
                }
            }
            support
        })
        .collect())
}

fn outside_witness(b: &Behavior, gap: f64) -> Result<Witness> {
    let mut best: Option<(f64, BellFunctional)> = None;
    for f in witness_candidates(b.scenario())? {
        let value = f.evaluate(b)?;
        let excess = value - f.classical_bound();
        if excess > LOCAL_TOL && best.as_ref().is_none_or(|(e, _)| excess > *e) {
            best = Some((excess, f));
        }
    }
    Ok(match best {
        Some((excess, f)) => Witness::Functional {
            name: f.name().to_string(),
            value: f.classical_bound() + excess,
            bound: f.classical_bound(),
        },
        None => Witness::InfeasibilityGap { gap },
    })
}

/// Is the behavior a mixture of deterministic product strategies?
///
/// Phase one of the simplex method on `sum_j w_j D_j = P, w >= 0`; inside iff the
/// remaining artificial mass and the constraint residual are at most [`LOCAL_TOL`].
/// Outside verdicts carry the most violated built-in functional when one applies.
pub fn is_local(b: &Behavior) -> Result<MembershipReport> {
    let s = b.scenario();
    let supports = deterministic_supports(s)?;
    let rows = s.table_len();
    let mut a = vec![vec![0.0; supports.len()]; rows];
    for (j, support) in supports.iter().enumerate() {
        for &i in support {
            a[i][j] = 1.0;
        }
    }
    let lp = LinearProgram::with_equalities(vec![0.0; supports.len()], a, b.table().to_vec())?;
    let sol = simplex_solve(&lp)?;
    let gap = sol.infeasibility.max(0.0);
    if sol.status == LpStatus::Optimal && sol.residual <= LOCAL_TOL {
        Ok(MembershipReport::inside(sol.residual))
    } else {
        Ok(MembershipReport::outside(gap, outside_witness(b, gap)?))
    }
}

/// Smallest `eps` such that some local behavior is within `eps` of `b` in every entry.
///
/// Meant for empirical tables, which need not satisfy no-signaling exactly.
pub fn local_distance_max(b: &Behavior) -> Result<f64> {
    local_distance_max_table(b.scenario(), b.table())
}

/// [`local_distance_max`] for a raw (unvalidated) table.
pub fn local_distance_max_table(s: Scenario, table: &[f64]) -> Result<f64> {
    if table.len() != s.table_len() {
        return Err(Error::ShapeMismatch("table length does not match scenario".into()));
    }
    let supports = deterministic_supports(s)?;
    let nw = supports.len();
    let rows = s.table_len();
    // variables: w (nw), u (rows), v (rows), slack (rows), eps
    let nvars = nw + 3 * rows + 1;
    let eps = nvars - 1;
    let mut objective = vec![0.0; nvars];
    objective[eps] = -1.0;
    let mut lp = LinearProgram::new(objective);
    let mut fit = vec![vec![0.0; nvars]; rows];
    for (j, support) in supports.iter().enumerate() {
        for &i in support {
            fit[i][j] = 1.0;
        }
    }
    for (i, row) in fit.iter_mut().enumerate() {
        row[nw + i] = 1.0;
        row[nw + rows + i] = -1.0;
        lp.add_equality(row, table[i])?;
    }
    for i in 0..rows {
        let mut row = vec![0.0; nvars];
        row[nw + i] = 1.0;
        row[nw + rows + i] = 1.0;
        row[nw + 2 * rows + i] = 1.0;
        row[eps] = -1.0;
        lp.add_equality(&row, 0.0)?;
    }
    let mut total = vec![0.0; nvars];
    total[..nw].iter_mut().for_each(|c| *c = 1.0);
    lp.add_equality(&total, 1.0)?;
    let sol = simplex_solve(&lp)?;
    match sol.status {
        LpStatus::Optimal => Ok(sol.x[eps].max(0.0)),
        other => Err(Error::NumericalBreakdown(format!("distance LP ended {other:?}"))),
    }
}
