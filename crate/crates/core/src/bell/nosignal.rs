//! Linear programs over the no-signaling polytope.

use super::functional::{cglmp3, i3322, BellFunctional};
use crate::behavior::{validate_behavior_with, Behavior, Scenario, Tolerances};
use crate::error::{Error, Result};
use crate::numerics::rng::{normal_pair, stream_rng};
use crate::numerics::{simplex_solve, LinearProgram, LpStatus};
use std::cmp::Ordering;

/// Seed of the random objectives used to walk the optimal face in [`vertex_pair_for_i3322`].
pub const VERTEX_SEARCH_SEED: u64 = 3322;
const VERTEX_SEARCH_TRIES: u64 = 64;

/// Normalization and no-signaling equalities over the flat table.
fn polytope_program(s: Scenario, objective: Vec<f64>) -> Result<LinearProgram> {
    let n = s.table_len();
    let mut lp = LinearProgram::new(objective);
    for x in 0..s.m_a {
        for y in 0..s.m_b {
            let mut row = vec![0.0; n];
            for a in 0..s.d_a {
                for b in 0..s.d_b {
                    row[s.index(x, y, a, b)] = 1.0;
                }
            }
            lp.add_equality(&row, 1.0)?;
        }
    }
    for x in 0..s.m_a {
        for a in 0..s.d_a {
            for y in 1..s.m_b {
                let mut row = vec![0.0; n];
                for b in 0..s.d_b {
                    row[s.index(x, y, a, b)] += 1.0;
                    row[s.index(x, 0, a, b)] -= 1.0;
                }
                lp.add_equality(&row, 0.0)?;
            }
        }
    }
    for y in 0..s.m_b {
        for b in 0..s.d_b {
            for x in 1..s.m_a {
                let mut row = vec![0.0; n];
                for a in 0..s.d_a {
                    row[s.index(x, y, a, b)] += 1.0;
                    row[s.index(0, y, a, b)] -= 1.0;
                }
                lp.add_equality(&row, 0.0)?;
            }
        }
    }
    Ok(lp)
}

fn solve_vertex(s: Scenario, lp: &LinearProgram) -> Result<Behavior> {
    let sol = simplex_solve(lp)?;
    if sol.status != LpStatus::Optimal {
        return Err(Error::NumericalBreakdown(format!("no-signaling LP ended {:?}", sol.status)));
    }
    let table = sol.x.iter().map(|&p| if p.abs() < 1e-13 { 0.0 } else { p }).collect();
    let tol = Tolerances {
        range: 1e-9,
        normalization: 1e-9,
        signaling: 1e-9,
    };
    validate_behavior_with(table, s, &tol)
}

/// Maximum of the functional over no-signaling behaviors, with an optimal vertex.
pub fn ns_maximize(f: &BellFunctional) -> Result<(f64, Behavior)> {
    let s = f.scenario();
    let lp = polytope_program(s, f.coefficients().to_vec())?;
    let vertex = solve_vertex(s, &lp)?;
    Ok((f.evaluate(&vertex)?, vertex))
}

/// The no-signaling vertex maximizing CGLMP3 (value 4).
pub fn generalized_pr_d3() -> Result<Behavior> {
    Ok(ns_maximize(&cglmp3())?.1)
}

fn lexicographic(p: &Behavior, q: &Behavior) -> Ordering {
    p.table()
        .iter()
        .zip(q.table())
        .map(|(a, b)| b.total_cmp(a))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
}

/// Two distinct no-signaling vertices on the face where I3322 attains its maximum 1.
///
/// The face is explored by maximizing seeded random objectives subject to `I3322 = max`;
/// the first two distinct vertices found are returned in decreasing lexicographic order
/// of their tables.
pub fn vertex_pair_for_i3322() -> Result<(Behavior, Behavior)> {
    let f = i3322();
    let s = f.scenario();
    let (max, first) = ns_maximize(&f)?;
    let mut rng = stream_rng(VERTEX_SEARCH_SEED, 0);
    let mut found = vec![first];
    for _ in 0..VERTEX_SEARCH_TRIES {
        let objective: Vec<f64> = (0..s.table_len()).map(|_| normal_pair(&mut rng).0).collect();
        let mut lp = polytope_program(s, objective)?;
        lp.add_equality(f.coefficients(), max)?;
        let v = solve_vertex(s, &lp)?;
        if found.iter().all(|u| u.max_abs_diff(&v).is_ok_and(|d| d > 1e-6)) {
            found.push(v);
            if found.len() == 2 {
                break;
            }
        }
    }
    if found.len() < 2 {
        return Err(Error::OnlyOneVertexFound);
    }
    found.sort_by(lexicographic);
    let second = found.pop().expect("two vertices");
    let first = found.pop().expect("two vertices");
    Ok((first, second))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bell::functional::chsh;
    use crate::behavior::{correlators_from_behavior, pr_box};

    #[test]
    fn chsh_maximum_is_pr_box() {
        let (v, b) = ns_maximize(&chsh()).unwrap();
        assert!((v - 4.0).abs() < 1e-12);
        assert!(b.max_abs_diff(&pr_box()).unwrap() < 1e-12);
    }

    #[test]
    fn i3322_maximum_is_one() {
        let (v, _) = ns_maximize(&i3322()).unwrap();
        assert!((v - 1.0).abs() < 1e-9);
    }

    #[test]
    fn cglmp_maximum_is_four() {
        let g = generalized_pr_d3().unwrap();
        assert!((cglmp3().evaluate(&g).unwrap() - 4.0).abs() < 1e-9);
        assert!(g.table().iter().all(|&p| p.abs() < 1e-9 || (p - 1.0 / 3.0).abs() < 1e-9));
    }

    #[test]
    fn i3322_face_vertices() {
        let (p1, p2) = vertex_pair_for_i3322().unwrap();
        let f = i3322();
        assert!((f.evaluate(&p1).unwrap() - 1.0).abs() < 1e-9);
        assert!((f.evaluate(&p2).unwrap() - 1.0).abs() < 1e-9);
        assert!(p1.max_abs_diff(&p2).unwrap() > 1e-6);
        let c1 = correlators_from_behavior(&p1).unwrap();
        let c2 = correlators_from_behavior(&p2).unwrap();
        assert!(c1.mar_a.iter().chain(&c1.mar_b).chain(&c2.mar_a).all(|m| m.abs() < 1e-9));
    }
}
