use super::local::local_bound;
use crate::behavior::{Behavior, Scenario};
use crate::error::{Error, Result};
use crate::relabel::{all_relabelings, Relabeling};
use std::collections::HashSet;

/// A linear functional `sum coeff(x,y,a,b) P(a,b|x,y)` with its classical (local) bound.
#[derive(Clone, Debug, PartialEq)]
pub struct BellFunctional {
    name: String,
    scenario: Scenario,
    coeff: Vec<f64>,
    classical_bound: f64,
}

impl BellFunctional {
    /// Builds a functional and computes its classical bound by enumeration.
    pub fn new(name: impl Into<String>, scenario: Scenario, coeff: Vec<f64>) -> Result<Self> {
        let mut f = Self::with_bound(name, scenario, coeff, f64::NAN)?;
        f.classical_bound = local_bound(&f)?;
        Ok(f)
    }

    /// Builds a functional with a caller-supplied bound (not checked).
    pub fn with_bound(name: impl Into<String>, scenario: Scenario, coeff: Vec<f64>, classical_bound: f64) -> Result<Self> {
        scenario.check()?;
        if coeff.len() != scenario.table_len() {
            return Err(Error::ShapeMismatch(format!(
                "functional needs {} coefficients for scenario {scenario}, got {}",
                scenario.table_len(),
                coeff.len()
            )));
        }
        Ok(Self {
            name: name.into(),
            scenario,
            coeff,
            classical_bound,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn scenario(&self) -> Scenario {
        self.scenario
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coeff
    }

    #[inline]
    pub fn coeff(&self, x: usize, y: usize, a: usize, b: usize) -> f64 {
        self.coeff[self.scenario.index(x, y, a, b)]
    }

    pub fn classical_bound(&self) -> f64 {
        self.classical_bound
    }

    /// `sum coeff * P`.
    pub fn evaluate(&self, b: &Behavior) -> Result<f64> {
        if b.scenario() != self.scenario {
            return Err(Error::ScenarioMismatch(format!(
                "functional `{}` is for {}, behavior is {}",
                self.name,
                self.scenario,
                b.scenario()
            )));
        }
        Ok(self.coeff.iter().zip(b.table()).map(|(c, p)| c * p).sum())
    }

    pub fn relabeled(&self, r: &Relabeling) -> Result<Self> {
        let (scenario, coeff) = r.apply_table(self.scenario, &self.coeff)?;
        Ok(Self {
            name: self.name.clone(),
            scenario,
            coeff,
            classical_bound: self.classical_bound,
        })
    }

    /// Distinct images of the functional under all relabelings (including the party swap
    /// when the scenario is symmetric).
    pub fn orbit(&self) -> Result<Vec<BellFunctional>> {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for r in all_relabelings(self.scenario, true)? {
            let g = self.relabeled(&r)?;
            if g.scenario != self.scenario {
                continue;
            }
            let key: Vec<i64> = g.coeff.iter().map(|c| (c * 1e9).round() as i64).collect();
            if seen.insert(key) {
                out.push(g);
            }
        }
        Ok(out)
    }

    /// Embeds a functional of a sub-scenario by choosing which settings it acts on.
    pub fn lifted(&self, target: Scenario, x_map: &[usize], y_map: &[usize]) -> Result<Self> {
        let s = self.scenario;
        if target.d_a != s.d_a
            || target.d_b != s.d_b
            || x_map.len() != s.m_a
            || y_map.len() != s.m_b
            || x_map.iter().any(|&x| x >= target.m_a)
            || y_map.iter().any(|&y| y >= target.m_b)
        {
            return Err(Error::ScenarioMismatch(format!("cannot lift {s} into {target}")));
        }
        let mut coeff = vec![0.0; target.table_len()];
        for x in 0..s.m_a {
            for y in 0..s.m_b {
                for a in 0..s.d_a {
                    for b in 0..s.d_b {
                        coeff[target.index(x_map[x], y_map[y], a, b)] += self.coeff(x, y, a, b);
                    }
                }
            }
        }
        Ok(Self {
            name: format!("{}[x={:?},y={:?}]", self.name, x_map, y_map),
            scenario: target,
            coeff,
            classical_bound: self.classical_bound,
        })
    }
}

fn sign(o: usize) -> f64 {
    if o == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `sum_{x,y} (-1)^{xy} <a_x b_y>`, classical bound 2.
pub fn chsh() -> BellFunctional {
    let s = Scenario::chsh();
    let mut coeff = vec![0.0; s.table_len()];
    for x in 0..2 {
        for y in 0..2 {
            let parity = if x * y == 1 { -1.0 } else { 1.0 };
            for a in 0..2 {
                for b in 0..2 {
                    coeff[s.index(x, y, a, b)] = parity * sign(a) * sign(b);
                }
            }
        }
    }
    BellFunctional::with_bound("CHSH", s, coeff, 2.0).expect("valid shape")
}

/// Pattern of the joint terms of the 3322 functional; the same pattern weights the
/// arcsine terms of the sign-binned inequality.
pub const I3322_JOINT: [[f64; 3]; 3] = [[1.0, 1.0, 1.0], [1.0, 1.0, -1.0], [1.0, -1.0, 0.0]];

/// The 3322 functional in probability form:
///
/// ```text
/// -P_A(0|0) - 2 P_B(0|0) - P_B(0|1) + sum_{x,y} J[x][y] P(0,0|x,y)
/// ```
///
/// with `J = I3322_JOINT`. Classical bound 0, no-signaling maximum 1, white noise -1.
/// Marginal terms are stored inside joint blocks: `P_A(0|0)` in block `(0,0)` summed over
/// `b`, `P_B(0|y)` in block `(0,y)` summed over `a`.
pub fn i3322() -> BellFunctional {
    let s = Scenario::i3322();
    let mut coeff = vec![0.0; s.table_len()];
    for x in 0..3 {
        for y in 0..3 {
            coeff[s.index(x, y, 0, 0)] += I3322_JOINT[x][y];
        }
    }
    for b in 0..2 {
        coeff[s.index(0, 0, 0, b)] -= 1.0;
    }
    for a in 0..2 {
        coeff[s.index(0, 0, a, 0)] -= 2.0;
        coeff[s.index(0, 1, a, 0)] -= 1.0;
    }
    BellFunctional::with_bound("I3322", s, coeff, 0.0).expect("valid shape")
}

/// Three-outcome CGLMP functional in probability form:
///
/// ```text
/// P(A0=B0) + P(B0=A1+1) + P(A1=B1) + P(B1=A0)
///   - P(A0=B0-1) - P(B0=A1) - P(A1=B1-1) - P(B1=A0-1)
/// ```
///
/// (arithmetic mod 3). Classical bound 2, no-signaling maximum 4, white noise 0.
pub fn cglmp3() -> BellFunctional {
    let s = Scenario::cglmp3();
    let mut coeff = vec![0.0; s.table_len()];
    for a in 0..3 {
        for b in 0..3 {
            let up = b == (a + 1) % 3;
            let down = b == (a + 2) % 3;
            let eq = a == b;
            let mut add = |x, y, v: f64| coeff[s.index(x, y, a, b)] += v;
            add(0, 0, f64::from(eq as u8) - f64::from(up as u8));
            add(1, 0, f64::from(up as u8) - f64::from(eq as u8));
            add(1, 1, f64::from(eq as u8) - f64::from(up as u8));
            add(0, 1, f64::from(eq as u8) - f64::from(down as u8));
        }
    }
    BellFunctional::with_bound("CGLMP3", s, coeff, 2.0).expect("valid shape")
}

/// Built-in functional by name: `chsh`, `i3322` or `cglmp3` (case-insensitive).
pub fn named_functional(name: &str) -> Result<BellFunctional> {
    match name.to_ascii_lowercase().as_str() {
        "chsh" => Ok(chsh()),
        "i3322" => Ok(i3322()),
        "cglmp" | "cglmp3" => Ok(cglmp3()),
        _ => Err(Error::UnknownName(name.to_string())),
    }
}

/// Functionals whose violation is reported as a witness for an `outside` verdict.
///
/// CHSH is lifted onto every pair of settings of a binary scenario; I3322 and CGLMP3
/// contribute their full orbits in their own scenarios.
pub fn witness_candidates(s: Scenario) -> Result<Vec<BellFunctional>> {
    let mut out = Vec::new();
    if s.is_binary() && s.m_a >= 2 && s.m_b >= 2 {
        let base = chsh().orbit()?;
        for x0 in 0..s.m_a {
            for x1 in x0 + 1..s.m_a {
                for y0 in 0..s.m_b {
                    for y1 in y0 + 1..s.m_b {
                        for f in &base {
                            let mut g = f.lifted(s, &[x0, x1], &[y0, y1])?;
                            if s == Scenario::chsh() {
                                g.name = "CHSH".into();
                            } else {
                                g.name = format!("CHSH[x={x0},{x1};y={y0},{y1}]");
                            }
                            out.push(g);
                        }
                    }
                }
            }
        }
    }
    if s == Scenario::i3322() {
        out.extend(i3322().orbit()?);
    }
    if s == Scenario::cglmp3() {
        out.extend(cglmp3().orbit()?);
    }
    Ok(out)
}
