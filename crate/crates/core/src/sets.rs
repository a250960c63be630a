//! Uniform access to every membership test in the crate.

use crate::bell::is_local;
use crate::behavior::Behavior;
use crate::binning::{qtb_check, three_binned_behavior, ThreeBinSpec};
use crate::error::{Error, Result};
use crate::membership::MembershipReport;
use crate::ml::{q1_analytic_2n22, q1_numeric, qsb_membership};
use std::fmt;

/// Monte Carlo samples per setting pair used by default for triangle binning.
pub const DEFAULT_TRIANGLE_SAMPLES: usize = 1_000_000;
/// Kernel width used by default for three-binning.
pub const DEFAULT_SIGMA: f64 = 0.028;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SetKind {
    /// Local polytope.
    Local,
    /// Sign-binned behavior is local.
    Qsb,
    /// First level of the semidefinite hierarchy, by PSD completion.
    Q1,
    /// First level of the hierarchy, closed form (2n22 only).
    Q1Analytic,
    /// Three-binned behavior is local.
    Qsb3(ThreeBinSpec),
    /// Triangle-binned behavior satisfies CGLMP3 (point estimate).
    Qtb { samples: usize, seed: u64 },
}

impl SetKind {
    /// Parses `local`, `qsb`, `q1`, `q1-analytic`, `qsb3` or `qtb`; the extra parameters
    /// are used by the binned sets.
    pub fn parse(name: &str, sigma: f64, samples: usize, seed: u64) -> Result<Self> {
        Ok(match name.to_ascii_lowercase().replace('_', "-").as_str() {
            "local" => SetKind::Local,
            "qsb" => SetKind::Qsb,
            "q1" => SetKind::Q1,
            "q1-analytic" => SetKind::Q1Analytic,
            "qsb3" | "qsb-prime" => SetKind::Qsb3(ThreeBinSpec::new(sigma)?),
            "qtb" => SetKind::Qtb { samples, seed },
            _ => return Err(Error::UnknownName(name.to_string())),
        })
    }

    pub fn label(&self) -> &'static str {
        match self {
            SetKind::Local => "local",
            SetKind::Qsb => "qsb",
            SetKind::Q1 => "q1",
            SetKind::Q1Analytic => "q1-analytic",
            SetKind::Qsb3(_) => "qsb3",
            SetKind::Qtb { .. } => "qtb",
        }
    }

    pub fn test(&self, b: &Behavior) -> Result<MembershipReport> {
        match self {
            SetKind::Local => is_local(b),
            SetKind::Qsb => qsb_membership(b),
            SetKind::Q1 => q1_numeric(b),
            SetKind::Q1Analytic => q1_analytic_2n22(b),
            SetKind::Qsb3(spec) => is_local(&three_binned_behavior(b, spec)?),
            SetKind::Qtb { samples, seed } => Ok(qtb_check(b, *samples, *seed)?.verdict()),
        }
    }
}

impl fmt::Display for SetKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SetKind::Qsb3(spec) => write!(f, "qsb3(sigma={})", spec.sigma()),
            other => f.write_str(other.label()),
        }
    }
}

/// Membership of `b` in `set`.
pub fn membership(b: &Behavior, set: &SetKind) -> Result<MembershipReport> {
    set.test(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::behavior::{pr_box, white_noise, Scenario};

    #[test]
    fn parse_names() {
        assert_eq!(SetKind::parse("Q1-analytic", 1.0, 10, 0).unwrap(), SetKind::Q1Analytic);
        assert_eq!(SetKind::parse("q1_analytic", 1.0, 10, 0).unwrap(), SetKind::Q1Analytic);
        assert!(matches!(SetKind::parse("qsb3", 0.5, 10, 0).unwrap(), SetKind::Qsb3(_)));
        assert!(SetKind::parse("qsb3", -1.0, 10, 0).is_err());
        assert!(SetKind::parse("nope", 1.0, 10, 0).is_err());
    }

    #[test]
    fn dispatch() {
        let n = white_noise(Scenario::chsh()).unwrap();
        for set in [SetKind::Local, SetKind::Qsb, SetKind::Q1, SetKind::Q1Analytic] {
            assert!(membership(&n, &set).unwrap().is_inside());
            assert!(!membership(&pr_box(), &set).unwrap().is_inside());
        }
    }
}
