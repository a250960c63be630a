//! Verdicts returned by every membership test in the crate.

use serde::Serialize;
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Inside,
    Outside,
    Undetermined,
}

impl Verdict {
    /// Bisection callers treat undetermined as outside.
    pub fn is_inside(self) -> bool {
        matches!(self, Verdict::Inside)
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Inside => "inside",
            Verdict::Outside => "outside",
            Verdict::Undetermined => "undetermined",
        })
    }
}

/// Evidence attached to an `outside` verdict.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// A Bell functional whose value exceeds its classical bound.
    Functional { name: String, value: f64, bound: f64 },
    /// An analytic inequality (arcsine form) that fails.
    Inequality { description: String, lhs: f64, bound: f64 },
    /// Residual distance between the constraint sets when no named inequality applies.
    InfeasibilityGap { gap: f64 },
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Witness::Functional { name, value, bound } => {
                write!(f, "{name} = {value:.12} > {bound}")
            }
            Witness::Inequality { description, lhs, bound } => {
                write!(f, "{description}: {lhs:.12} > {bound:.12}")
            }
            Witness::InfeasibilityGap { gap } => write!(f, "infeasibility gap {gap:.3e}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MembershipReport {
    pub verdict: Verdict,
    pub residual: f64,
    pub witness: Option<Witness>,
}

impl MembershipReport {
    pub fn inside(residual: f64) -> Self {
        Self {
            verdict: Verdict::Inside,
            residual,
            witness: None,
        }
    }

    pub fn outside(residual: f64, witness: Witness) -> Self {
        Self {
            verdict: Verdict::Outside,
            residual,
            witness: Some(witness),
        }
    }

    pub fn undetermined(residual: f64) -> Self {
        Self {
            verdict: Verdict::Undetermined,
            residual,
            witness: None,
        }
    }

    pub fn is_inside(&self) -> bool {
        self.verdict.is_inside()
    }
}

impl fmt::Display for MembershipReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (residual {:.3e})", self.verdict, self.residual)?;
        if let Some(w) = &self.witness {
            write!(f, "; witness: {w}")?;
        }
        Ok(())
    }
}
