//! Relabelings of settings, outcomes and parties.
//!
//! A relabeling acts on any tensor indexed `[x][y][a][b]`, so the same value moves a
//! behavior and a Bell functional; `evaluate(f', P') = evaluate(f, P)`.

use crate::behavior::{Behavior, Scenario};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Relabeling {
    /// Exchange the parties before permuting.
    pub swap: bool,
    /// `x_perm[x]` is the new label of setting `x` (indices after the optional swap).
    pub x_perm: Vec<usize>,
    pub y_perm: Vec<usize>,
    /// `a_perm[x][a]` is the new label of outcome `a` under (old) setting `x`.
    pub a_perm: Vec<Vec<usize>>,
    pub b_perm: Vec<Vec<usize>>,
}

impl Relabeling {
    pub fn identity(s: Scenario) -> Self {
        Self {
            swap: false,
            x_perm: (0..s.m_a).collect(),
            y_perm: (0..s.m_b).collect(),
            a_perm: vec![(0..s.d_a).collect(); s.m_a],
            b_perm: vec![(0..s.d_b).collect(); s.m_b],
        }
    }

    /// Scenario after the optional party swap.
    pub fn target(&self, s: Scenario) -> Scenario {
        if self.swap {
            s.swapped()
        } else {
            s
        }
    }

    fn check(&self, s: Scenario) -> Result<()> {
        let t = self.target(s);
        let ok = is_perm(&self.x_perm, t.m_a)
            && is_perm(&self.y_perm, t.m_b)
            && self.a_perm.len() == t.m_a
            && self.a_perm.iter().all(|p| is_perm(p, t.d_a))
            && self.b_perm.len() == t.m_b
            && self.b_perm.iter().all(|p| is_perm(p, t.d_b));
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("relabeling does not fit scenario {s}")))
        }
    }

    /// Applies the relabeling to a flat `[x][y][a][b]` tensor of scenario `s`.
    pub fn apply_table(&self, s: Scenario, table: &[f64]) -> Result<(Scenario, Vec<f64>)> {
        self.check(s)?;
        if table.len() != s.table_len() {
            return Err(Error::ShapeMismatch(format!("tensor length {} for scenario {s}", table.len())));
        }
        let t = self.target(s);
        let mut out = vec![0.0; t.table_len()];
        for x in 0..s.m_a {
            for y in 0..s.m_b {
                for a in 0..s.d_a {
                    for b in 0..s.d_b {
                        let v = table[s.index(x, y, a, b)];
                        let (x1, y1, a1, b1) = if self.swap { (y, x, b, a) } else { (x, y, a, b) };
                        let idx = t.index(
                            self.x_perm[x1],
                            self.y_perm[y1],
                            self.a_perm[x1][a1],
                            self.b_perm[y1][b1],
                        );
                        out[idx] = v;
                    }
                }
            }
        }
        Ok((t, out))
    }

    pub fn apply_behavior(&self, b: &Behavior) -> Result<Behavior> {
        let (s, table) = self.apply_table(b.scenario(), b.table())?;
        Ok(Behavior::from_parts_unchecked(s, table))
    }
}

fn is_perm(p: &[usize], n: usize) -> bool {
    let mut seen = vec![false; n];
    p.len() == n && p.iter().all(|&i| i < n && !std::mem::replace(&mut seen[i], true))
}

/// All permutations of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..n).collect();
    loop {
        out.push(cur.clone());
        // next lexicographic permutation
        let Some(i) = (1..n).rev().find(|&i| cur[i - 1] < cur[i]) else {
            return out;
        };
        let j = (i..n).rev().find(|&j| cur[j] > cur[i - 1]).expect("successor exists");
        cur.swap(i - 1, j);
        cur[i..].reverse();
    }
}

fn product_of(choices: &[Vec<usize>], count: usize) -> Vec<Vec<Vec<usize>>> {
    let mut out: Vec<Vec<Vec<usize>>> = vec![Vec::new()];
    for _ in 0..count {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                choices.iter().map(move |c| {
                    let mut next = prefix.clone();
                    next.push(c.clone());
                    next
                })
            })
            .collect();
    }
    out
}

/// Number of relabelings [`all_relabelings`] would return.
pub fn relabeling_count(s: Scenario, with_swap: bool) -> u128 {
    let fact = |n: usize| (1..=n as u128).product::<u128>();
    let one = fact(s.m_a)
        * fact(s.m_b)
        * fact(s.d_a).saturating_pow(s.m_a as u32)
        * fact(s.d_b).saturating_pow(s.m_b as u32);
    if with_swap && s == s.swapped() {
        2 * one
    } else {
        one
    }
}

/// Every combination of setting permutations and per-setting outcome permutations, and
/// the party swap when `with_swap` is set and the scenario is symmetric.
pub fn all_relabelings(s: Scenario, with_swap: bool) -> Result<Vec<Relabeling>> {
    const LIMIT: u128 = 200_000;
    let count = relabeling_count(s, with_swap);
    if count > LIMIT {
        return Err(Error::TooLarge(count));
    }
    let swaps: &[bool] = if with_swap && s == s.swapped() { &[false, true] } else { &[false] };
    let xp = permutations(s.m_a);
    let yp = permutations(s.m_b);
    let ap = product_of(&permutations(s.d_a), s.m_a);
    let bp = product_of(&permutations(s.d_b), s.m_b);
    let mut out = Vec::with_capacity(count as usize);
    for &swap in swaps {
        for x in &xp {
            for y in &yp {
                for a in &ap {
                    for b in &bp {
                        out.push(Relabeling {
                            swap,
                            x_perm: x.clone(),
                            y_perm: y.clone(),
                            a_perm: a.clone(),
                            b_perm: b.clone(),
                        });
                    }
                }
            }
        }
    }
    Ok(out)
}
