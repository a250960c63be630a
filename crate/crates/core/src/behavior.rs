//! Bipartite scenarios, behaviors `P(a,b|x,y)`, and their correlator view.
//!
//! Probability tables use 0-based outcome indices. For two-outcome parties the
//! correlator view maps outcome `0` to `+1` and outcome `1` to `-1`.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

/// Settings and outcomes per party, written `mA mB dA dB` (e.g. `2222`, `3322`, `2233`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Scenario {
    #[serde(rename = "mA")]
    pub m_a: usize,
    #[serde(rename = "mB")]
    pub m_b: usize,
    #[serde(rename = "dA")]
    pub d_a: usize,
    #[serde(rename = "dB")]
    pub d_b: usize,
}

impl Scenario {
    pub fn new(m_a: usize, m_b: usize, d_a: usize, d_b: usize) -> Result<Self> {
        let s = Self { m_a, m_b, d_a, d_b };
        s.check()?;
        Ok(s)
    }

    pub(crate) fn check(&self) -> Result<()> {
        if self.m_a == 0 || self.m_b == 0 || self.d_a < 2 || self.d_b < 2 {
            return Err(Error::InvalidScenario(format!(
                "need mA, mB >= 1 and dA, dB >= 2, got {self}"
            )));
        }
        Ok(())
    }

    pub const fn chsh() -> Self {
        Self { m_a: 2, m_b: 2, d_a: 2, d_b: 2 }
    }

    pub const fn i3322() -> Self {
        Self { m_a: 3, m_b: 3, d_a: 2, d_b: 2 }
    }

    pub const fn cglmp3() -> Self {
        Self { m_a: 2, m_b: 2, d_a: 3, d_b: 3 }
    }

    /// Parses the compact `mAmBdAdB` label, one digit per field (e.g. `"2322"`).
    pub fn parse_label(label: &str) -> Result<Self> {
        let digits: Vec<usize> = label
            .chars()
            .map(|c| c.to_digit(10).map(|d| d as usize))
            .collect::<Option<_>>()
            .ok_or_else(|| Error::Parse(format!("bad scenario label `{label}`")))?;
        match digits.as_slice() {
            [a, b, c, d] => Self::new(*a, *b, *c, *d),
            _ => Err(Error::Parse(format!("scenario label `{label}` must have four digits"))),
        }
    }

    pub fn table_len(&self) -> usize {
        self.m_a * self.m_b * self.d_a * self.d_b
    }

    #[inline]
    pub fn index(&self, x: usize, y: usize, a: usize, b: usize) -> usize {
        ((x * self.m_b + y) * self.d_a + a) * self.d_b + b
    }

    pub fn is_binary(&self) -> bool {
        self.d_a == 2 && self.d_b == 2
    }

    /// Scenario seen with the parties exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            m_a: self.m_b,
            m_b: self.m_a,
            d_a: self.d_b,
            d_b: self.d_a,
        }
    }

    /// Number of deterministic strategies for Alice, `dA^mA` (saturating).
    pub fn alice_strategies(&self) -> u128 {
        (self.d_a as u128).saturating_pow(self.m_a as u32)
    }

    pub fn bob_strategies(&self) -> u128 {
        (self.d_b as u128).saturating_pow(self.m_b as u32)
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.m_a < 10 && self.m_b < 10 && self.d_a < 10 && self.d_b < 10 {
            write!(f, "{}{}{}{}", self.m_a, self.m_b, self.d_a, self.d_b)
        } else {
            write!(f, "({},{},{},{})", self.m_a, self.m_b, self.d_a, self.d_b)
        }
    }
}

/// Acceptance tolerances for [`validate_behavior_with`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    /// Allowed excursion of each entry outside `[0, 1]`.
    pub range: f64,
    pub normalization: f64,
    pub signaling: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            range: 1e-12,
            normalization: 1e-12,
            signaling: 1e-10,
        }
    }
}

/// A validated probability table `P(a,b|x,y)`, stored flat in `[x][y][a][b]` order.
#[derive(Clone, Debug, PartialEq)]
pub struct Behavior {
    scenario: Scenario,
    table: Vec<f64>,
}

/// Validates a flat `[x][y][a][b]` table against the default tolerances.
pub fn validate_behavior(table: Vec<f64>, scenario: Scenario) -> Result<Behavior> {
    validate_behavior_with(table, scenario, &Tolerances::default())
}

pub fn validate_behavior_with(table: Vec<f64>, scenario: Scenario, tol: &Tolerances) -> Result<Behavior> {
    scenario.check()?;
    if table.len() != scenario.table_len() {
        return Err(Error::ShapeMismatch(format!(
            "scenario {scenario} needs {} entries, got {}",
            scenario.table_len(),
            table.len()
        )));
    }
    let s = scenario;
    for x in 0..s.m_a {
        for y in 0..s.m_b {
            let mut sum = 0.0;
            for a in 0..s.d_a {
                for b in 0..s.d_b {
                    let p = table[s.index(x, y, a, b)];
                    if !p.is_finite() || p < -tol.range || p > 1.0 + tol.range {
                        return Err(Error::NegativeEntry { x, y, value: p });
                    }
                    sum += p;
                }
            }
            if (sum - 1.0).abs() > tol.normalization {
                return Err(Error::NotNormalized { x, y, sum });
            }
        }
    }
    let behavior = Behavior { scenario, table };
    for x in 0..s.m_a {
        for y in 1..s.m_b {
            for a in 0..s.d_a {
                let deviation = (behavior.alice_marginal_in(x, y, a) - behavior.alice_marginal_in(x, 0, a)).abs();
                if deviation > tol.signaling {
                    return Err(Error::Signaling { x, y, deviation });
                }
            }
        }
    }
    for y in 0..s.m_b {
        for x in 1..s.m_a {
            for b in 0..s.d_b {
                let deviation = (behavior.bob_marginal_in(x, y, b) - behavior.bob_marginal_in(0, y, b)).abs();
                if deviation > tol.signaling {
                    return Err(Error::Signaling { x, y, deviation });
                }
            }
        }
    }
    Ok(behavior)
}

impl Behavior {
    /// Validates a flat table; see [`validate_behavior`].
    pub fn new(scenario: Scenario, table: Vec<f64>) -> Result<Self> {
        validate_behavior(table, scenario)
    }

    /// Builds from a closure `p(x, y, a, b)` and validates.
    pub fn from_fn(scenario: Scenario, mut p: impl FnMut(usize, usize, usize, usize) -> f64) -> Result<Self> {
        let mut table = vec![0.0; scenario.table_len()];
        for x in 0..scenario.m_a {
            for y in 0..scenario.m_b {
                for a in 0..scenario.d_a {
                    for b in 0..scenario.d_b {
                        table[scenario.index(x, y, a, b)] = p(x, y, a, b);
                    }
                }
            }
        }
        validate_behavior(table, scenario)
    }

    /// Validates a table given as nested `[x][y][a][b]` arrays.
    pub fn from_nested(scenario: Scenario, nested: &[Vec<Vec<Vec<f64>>>]) -> Result<Self> {
        let shape_err = || Error::ShapeMismatch(format!("nested table does not have shape {scenario}"));
        if nested.len() != scenario.m_a {
            return Err(shape_err());
        }
        let mut table = Vec::with_capacity(scenario.table_len());
        for xs in nested {
            if xs.len() != scenario.m_b {
                return Err(shape_err());
            }
            for ys in xs {
                if ys.len() != scenario.d_a {
                    return Err(shape_err());
                }
                for row in ys {
                    if row.len() != scenario.d_b {
                        return Err(shape_err());
                    }
                    table.extend_from_slice(row);
                }
            }
        }
        validate_behavior(table, scenario)
    }

    pub(crate) fn from_parts_unchecked(scenario: Scenario, table: Vec<f64>) -> Self {
        debug_assert_eq!(table.len(), scenario.table_len());
        Self { scenario, table }
    }

    pub fn scenario(&self) -> Scenario {
        self.scenario
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }

    pub fn into_table(self) -> Vec<f64> {
        self.table
    }

    #[inline]
    pub fn p(&self, x: usize, y: usize, a: usize, b: usize) -> f64 {
        self.table[self.scenario.index(x, y, a, b)]
    }

    /// The `dA x dB` block for settings `(x, y)`, row-major in `(a, b)`.
    pub fn block(&self, x: usize, y: usize) -> &[f64] {
        let start = self.scenario.index(x, y, 0, 0);
        &self.table[start..start + self.scenario.d_a * self.scenario.d_b]
    }

    fn alice_marginal_in(&self, x: usize, y: usize, a: usize) -> f64 {
        (0..self.scenario.d_b).map(|b| self.p(x, y, a, b)).sum()
    }

    fn bob_marginal_in(&self, x: usize, y: usize, b: usize) -> f64 {
        (0..self.scenario.d_a).map(|a| self.p(x, y, a, b)).sum()
    }

    /// `P_A(a|x)`, read from the `y = 0` block.
    pub fn alice_marginal(&self, x: usize, a: usize) -> f64 {
        self.alice_marginal_in(x, 0, a)
    }

    /// `P_B(b|y)`, read from the `x = 0` block.
    pub fn bob_marginal(&self, y: usize, b: usize) -> f64 {
        self.bob_marginal_in(0, y, b)
    }

    pub fn to_nested(&self) -> Vec<Vec<Vec<Vec<f64>>>> {
        let s = self.scenario;
        (0..s.m_a)
            .map(|x| {
                (0..s.m_b)
                    .map(|y| (0..s.d_a).map(|a| (0..s.d_b).map(|b| self.p(x, y, a, b)).collect()).collect())
                    .collect()
            })
            .collect()
    }

    /// Largest entrywise difference to another behavior of the same scenario.
    pub fn max_abs_diff(&self, other: &Behavior) -> Result<f64> {
        same_scenario(self, other)?;
        Ok(self.table.iter().zip(&other.table).fold(0.0, |m, (a, b)| m.max((a - b).abs())))
    }
}

fn same_scenario(p: &Behavior, q: &Behavior) -> Result<()> {
    if p.scenario != q.scenario {
        return Err(Error::ScenarioMismatch(format!("{} vs {}", p.scenario, q.scenario)));
    }
    Ok(())
}

/// `t p + (1 - t) q`.
pub fn mix(p: &Behavior, q: &Behavior, t: f64) -> Result<Behavior> {
    same_scenario(p, q)?;
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::InvalidArgument(format!("mixing weight {t} outside [0, 1]")));
    }
    let table = p.table.iter().zip(&q.table).map(|(a, b)| t * a + (1.0 - t) * b).collect();
    Ok(Behavior::from_parts_unchecked(p.scenario, table))
}

/// Marginals `<a_x>`, `<b_y>` and correlators `<a_x b_y>` of a two-outcome behavior.
#[derive(Clone, Debug, PartialEq)]
pub struct CorrelatorView {
    pub mar_a: Vec<f64>,
    pub mar_b: Vec<f64>,
    /// `corr[x][y] = <a_x b_y>`.
    pub corr: Vec<Vec<f64>>,
}

impl CorrelatorView {
    /// Zero marginals with the given correlator matrix.
    pub fn unbiased(corr: Vec<Vec<f64>>) -> Self {
        let m_a = corr.len();
        let m_b = corr.first().map_or(0, Vec::len);
        Self {
            mar_a: vec![0.0; m_a],
            mar_b: vec![0.0; m_b],
            corr,
        }
    }

    pub fn m_a(&self) -> usize {
        self.mar_a.len()
    }

    pub fn m_b(&self) -> usize {
        self.mar_b.len()
    }
}

const SIGNS: [f64; 2] = [1.0, -1.0];

pub fn correlators_from_behavior(b: &Behavior) -> Result<CorrelatorView> {
    let s = b.scenario();
    if !s.is_binary() {
        return Err(Error::WrongOutcomeCount { d_a: s.d_a, d_b: s.d_b });
    }
    let mar_a = (0..s.m_a).map(|x| b.alice_marginal(x, 0) - b.alice_marginal(x, 1)).collect();
    let mar_b = (0..s.m_b).map(|y| b.bob_marginal(y, 0) - b.bob_marginal(y, 1)).collect();
    let corr = (0..s.m_a)
        .map(|x| {
            (0..s.m_b)
                .map(|y| {
                    let mut c = 0.0;
                    for (a, sa) in SIGNS.iter().enumerate() {
                        for (bb, sb) in SIGNS.iter().enumerate() {
                            c += sa * sb * b.p(x, y, a, bb);
                        }
                    }
                    c
                })
                .collect()
        })
        .collect();
    Ok(CorrelatorView { mar_a, mar_b, corr })
}

/// `P(a,b|x,y) = (1 + a<a_x> + b<b_y> + ab<a_x b_y>) / 4` with `a, b = +-1`.
pub fn behavior_from_correlators(c: &CorrelatorView) -> Result<Behavior> {
    let (m_a, m_b) = (c.m_a(), c.m_b());
    if m_a == 0 || m_b == 0 || c.corr.len() != m_a || c.corr.iter().any(|r| r.len() != m_b) {
        return Err(Error::ShapeMismatch("correlator matrix does not match marginal counts".into()));
    }
    let scenario = Scenario::new(m_a, m_b, 2, 2)?;
    let mut table = vec![0.0; scenario.table_len()];
    for x in 0..m_a {
        for y in 0..m_b {
            for (a, sa) in SIGNS.iter().enumerate() {
                for (b, sb) in SIGNS.iter().enumerate() {
                    let p = (1.0 + sa * c.mar_a[x] + sb * c.mar_b[y] + sa * sb * c.corr[x][y]) / 4.0;
                    if p < -1e-12 || !p.is_finite() {
                        return Err(Error::InvalidCorrelators { x, y, value: p });
                    }
                    table[scenario.index(x, y, a, b)] = p;
                }
            }
        }
    }
    validate_behavior(table, scenario)
}

/// Uniform table `1 / (dA dB)`.
pub fn white_noise(scenario: Scenario) -> Result<Behavior> {
    scenario.check()?;
    let p = 1.0 / (scenario.d_a * scenario.d_b) as f64;
    Ok(Behavior::from_parts_unchecked(scenario, vec![p; scenario.table_len()]))
}

/// The PR box: zero marginals and `<a_x b_y> = (-1)^{xy}`.
pub fn pr_box() -> Behavior {
    behavior_from_correlators(&CorrelatorView::unbiased(vec![vec![1.0, 1.0], vec![1.0, -1.0]]))
        .expect("PR box is a valid behavior")
}

/// Zero marginals with correlators `v / sqrt 2 * (-1)^{xy}`; valid for `0 <= v <= sqrt 2`.
///
/// `v = 1` is the Tsirelson point; in PR-box weight along the PR/noise line this is `t = v / sqrt 2`.
pub fn isotropic_chsh(v: f64) -> Result<Behavior> {
    if !(0.0..=std::f64::consts::SQRT_2 + 1e-15).contains(&v) {
        return Err(Error::InvalidArgument(format!("isotropic CHSH parameter {v} outside [0, sqrt 2]")));
    }
    let e = (v * FRAC_1_SQRT_2).min(1.0);
    behavior_from_correlators(&CorrelatorView::unbiased(vec![vec![e, e], vec![e, -e]]))
}

/// Named reference behaviors.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NamedBehavior {
    Pr,
    GeneralizedPrD3,
    WhiteNoise(Scenario),
    IsotropicChsh(f64),
}

impl NamedBehavior {
    /// Parses `pr`, `generalized_pr_d3`, `white_noise:<mAmBdAdB>` (defaults to 2222) or
    /// `isotropic_chsh:<v>`.
    pub fn parse(spec: &str) -> Result<Self> {
        let (name, arg) = match spec.split_once(':') {
            Some((n, a)) => (n, Some(a)),
            None => (spec, None),
        };
        match (name, arg) {
            ("pr", None) => Ok(Self::Pr),
            ("generalized_pr_d3", None) => Ok(Self::GeneralizedPrD3),
            ("white_noise", None) => Ok(Self::WhiteNoise(Scenario::chsh())),
            ("white_noise", Some(label)) => Ok(Self::WhiteNoise(Scenario::parse_label(label)?)),
            ("isotropic_chsh", Some(v)) => v
                .parse::<f64>()
                .map(Self::IsotropicChsh)
                .map_err(|_| Error::Parse(format!("bad isotropic parameter `{v}`"))),
            _ => Err(Error::UnknownName(spec.to_string())),
        }
    }

    pub fn build(&self) -> Result<Behavior> {
        match *self {
            Self::Pr => Ok(pr_box()),
            Self::GeneralizedPrD3 => crate::bell::generalized_pr_d3(),
            Self::WhiteNoise(s) => white_noise(s),
            Self::IsotropicChsh(v) => isotropic_chsh(v),
        }
    }
}

/// Builds a named behavior from its textual spec (see [`NamedBehavior::parse`]).
pub fn named_behavior(spec: &str) -> Result<Behavior> {
    NamedBehavior::parse(spec)?.build()
}
