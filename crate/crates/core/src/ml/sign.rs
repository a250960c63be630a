use crate::bell::{is_local, I3322_JOINT};
use crate::behavior::{behavior_from_correlators, correlators_from_behavior, Behavior, CorrelatorView, Scenario};
use crate::error::{Error, Result};
use crate::membership::MembershipReport;
use crate::numerics::SymMatrix;
use crate::relabel::{all_relabelings, Relabeling};
use std::f64::consts::{FRAC_2_PI, PI};

/// Marginals this close to `+-1` are treated as deterministic.
pub const DETERMINISTIC_EPS: f64 = 1e-12;
/// Allowed mismatch between a deterministic marginal and the implied correlator.
pub const CONSISTENCY_TOL: f64 = 1e-9;
/// Slack allowed when comparing an arcsine sum with its bound.
pub const ARCSIN_TOL: f64 = 1e-12;

/// `(<a_x b_y> - <a_x><b_y>) / sqrt((1 - <a_x>^2)(1 - <b_y>^2))`, clamped to `[-1, 1]`.
///
/// If either marginal is deterministic the correlator must factorize
/// (`<a_x b_y> = <a_x><b_y>`); the value is then 0, since a deterministic outcome can be
/// reproduced by a local model.
pub fn normalized_correlator(c: &CorrelatorView, x: usize, y: usize) -> Result<f64> {
    if x >= c.m_a() || y >= c.m_b() {
        return Err(Error::InvalidArgument(format!("setting pair ({x}, {y}) out of range")));
    }
    let (a, b, ab) = (c.mar_a[x], c.mar_b[y], c.corr[x][y]);
    let cov = ab - a * b;
    if a.abs() >= 1.0 - DETERMINISTIC_EPS || b.abs() >= 1.0 - DETERMINISTIC_EPS {
        if cov.abs() > CONSISTENCY_TOL {
            return Err(Error::InconsistentDeterministicMarginal { x, y });
        }
        return Ok(0.0);
    }
    let d = cov / ((1.0 - a * a) * (1.0 - b * b)).sqrt();
    Ok(d.clamp(-1.0, 1.0))
}

/// Matrix of normalized correlators `D[x][y]` for a two-outcome behavior.
pub fn correlation_matrix(b: &Behavior) -> Result<Vec<Vec<f64>>> {
    let c = correlators_from_behavior(b)?;
    (0..c.m_a())
        .map(|x| (0..c.m_b()).map(|y| normalized_correlator(&c, x, y)).collect())
        .collect()
}

/// Limit statistics of one setting pair under sign binning.
#[derive(Clone, Debug, PartialEq)]
pub struct SignBinnedBlock {
    /// Covariance of the rescaled intensity differences `(a', b')`.
    pub covariance: SymMatrix,
    pub d: f64,
    /// `(2/pi) asin(d)`.
    pub macro_corr: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SignBinnedStats {
    pub m_a: usize,
    pub m_b: usize,
    blocks: Vec<SignBinnedBlock>,
}

impl SignBinnedStats {
    pub fn block(&self, x: usize, y: usize) -> &SignBinnedBlock {
        &self.blocks[x * self.m_b + y]
    }
}

pub fn sign_binned_stats(b: &Behavior) -> Result<SignBinnedStats> {
    let c = correlators_from_behavior(b)?;
    let mut blocks = Vec::with_capacity(c.m_a() * c.m_b());
    for x in 0..c.m_a() {
        for y in 0..c.m_b() {
            let (ma, mb) = (c.mar_a[x], c.mar_b[y]);
            let cov = c.corr[x][y] - ma * mb;
            let covariance = SymMatrix::from_rows(&[vec![1.0 - ma * ma, cov], vec![cov, 1.0 - mb * mb]]);
            let d = normalized_correlator(&c, x, y)?;
            blocks.push(SignBinnedBlock {
                covariance,
                d,
                macro_corr: FRAC_2_PI * d.asin(),
            });
        }
    }
    Ok(SignBinnedStats {
        m_a: c.m_a(),
        m_b: c.m_b(),
        blocks,
    })
}

/// Macroscopic behavior in the large-N limit of sign binning: zero marginals and
/// correlators `(2/pi) asin(D_xy)`.
pub fn sign_binned_behavior(b: &Behavior) -> Result<Behavior> {
    let stats = sign_binned_stats(b)?;
    let corr = (0..stats.m_a)
        .map(|x| (0..stats.m_b).map(|y| stats.block(x, y).macro_corr).collect())
        .collect();
    behavior_from_correlators(&CorrelatorView::unbiased(corr))
}

/// Membership in Q^SB: locality of the sign-binned behavior.
pub fn qsb_membership(b: &Behavior) -> Result<MembershipReport> {
    is_local(&sign_binned_behavior(b)?)
}

/// Index of the negated term in [`qsb_inequality_2n22`] as printed for the 2n22 family:
/// the last of `(D_0i, D_1i, D_0j, D_1j)`.
pub const STANDARD_MINUS: usize = 3;

/// `|asin D_0i + asin D_1i + asin D_0j + asin D_1j|` with the term at position `minus`
/// (in that order) negated; satisfied iff at most `pi`.
pub fn qsb_inequality_2n22(b: &Behavior, i: usize, j: usize, minus: usize) -> Result<(f64, bool)> {
    let s = b.scenario();
    if s.m_a != 2 || !s.is_binary() {
        return Err(Error::ScenarioUnsupported(format!("{s} (needs 2 Alice settings, 2 outcomes)")));
    }
    let d = correlation_matrix(b)?;
    let lhs = arcsin_sum(&d, i, j, minus)?;
    Ok((lhs, lhs <= PI + ARCSIN_TOL))
}

/// The arcsine sum of [`qsb_inequality_2n22`] for a 2 x n matrix of correlators.
pub fn arcsin_sum(c: &[Vec<f64>], i: usize, j: usize, minus: usize) -> Result<f64> {
    let n = c.first().map_or(0, Vec::len);
    if c.len() != 2 || i == j || i >= n || j >= n || minus > 3 {
        return Err(Error::InvalidArgument(format!("bad arcsine term selection (i={i}, j={j}, minus={minus})")));
    }
    let terms = [c[0][i], c[1][i], c[0][j], c[1][j]];
    let mut sum = 0.0;
    for (k, &t) in terms.iter().enumerate() {
        if !(-1.0..=1.0).contains(&t) {
            return Err(Error::DomainError(t));
        }
        sum += if k == minus { -t.asin() } else { t.asin() };
    }
    Ok(sum.abs())
}

/// `|sum_{x,y} J[x][y] asin D_xy| <= 2 pi` for the relabeled 3322 behavior, with `J` the
/// joint-term pattern of I3322.
pub fn qsb_inequality_3322(b: &Behavior, relabeling: &Relabeling) -> Result<(f64, bool)> {
    if b.scenario() != Scenario::i3322() {
        return Err(Error::ScenarioUnsupported(b.scenario().to_string()));
    }
    let moved = relabeling.apply_behavior(b)?;
    if moved.scenario() != Scenario::i3322() {
        return Err(Error::InvalidArgument("relabeling leaves the 3322 scenario".into()));
    }
    let d = correlation_matrix(&moved)?;
    let mut sum = 0.0;
    for (x, row) in I3322_JOINT.iter().enumerate() {
        for (y, &w) in row.iter().enumerate() {
            sum += w * d[x][y].asin();
        }
    }
    let lhs = sum.abs();
    Ok((lhs, lhs <= 2.0 * PI + ARCSIN_TOL))
}

/// Largest left-hand side of [`qsb_inequality_3322`] over all relabelings.
pub fn qsb_inequality_3322_orbit_max(b: &Behavior) -> Result<(f64, Relabeling)> {
    let mut best: Option<(f64, Relabeling)> = None;
    for r in all_relabelings(Scenario::i3322(), true)? {
        let (lhs, _) = qsb_inequality_3322(b, &r)?;
        if best.as_ref().is_none_or(|(v, _)| lhs > *v) {
            best = Some((lhs, r));
        }
    }
    Ok(best.expect("orbit is non-empty"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bell::chsh;
    use crate::behavior::{isotropic_chsh, mix, pr_box, white_noise};
    use std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn normalized_correlator_cases() {
        let c = CorrelatorView::unbiased(vec![vec![FRAC_1_SQRT_2]]);
        assert!((normalized_correlator(&c, 0, 0).unwrap() - FRAC_1_SQRT_2).abs() < 1e-15);
        let c = CorrelatorView {
            mar_a: vec![0.5],
            mar_b: vec![0.5],
            corr: vec![vec![0.25]],
        };
        assert_eq!(normalized_correlator(&c, 0, 0).unwrap(), 0.0);
        let c = CorrelatorView {
            mar_a: vec![1.0],
            mar_b: vec![0.3],
            corr: vec![vec![0.3]],
        };
        assert_eq!(normalized_correlator(&c, 0, 0).unwrap(), 0.0);
        let c = CorrelatorView {
            mar_a: vec![1.0],
            mar_b: vec![0.3],
            corr: vec![vec![0.2]],
        };
        assert!(matches!(
            normalized_correlator(&c, 0, 0),
            Err(Error::InconsistentDeterministicMarginal { x: 0, y: 0 })
        ));
    }

    #[test]
    fn isotropic_at_tsirelson_point_gives_half() {
        let m = sign_binned_behavior(&isotropic_chsh(1.0).unwrap()).unwrap();
        let c = correlators_from_behavior(&m).unwrap();
        assert!((c.corr[0][0] - 0.5).abs() < 1e-15);
        assert!((c.corr[1][1] + 0.5).abs() < 1e-15);
        assert!(c.mar_a.iter().chain(&c.mar_b).all(|&m| m == 0.0));
    }

    #[test]
    fn pr_box_sign_binned_is_pr_box() {
        let m = sign_binned_behavior(&pr_box()).unwrap();
        assert_eq!(chsh().evaluate(&m).unwrap(), 4.0);
        assert!(!qsb_membership(&pr_box()).unwrap().is_inside());
    }

    #[test]
    fn noise_is_fixed_point() {
        let n = white_noise(Scenario::chsh()).unwrap();
        assert_eq!(sign_binned_behavior(&n).unwrap(), n);
        assert!(qsb_membership(&n).unwrap().is_inside());
    }

    #[test]
    fn covariance_diagonal() {
        let b = Behavior::from_fn(Scenario::chsh(), |_, _, a, b| [[0.4, 0.2], [0.1, 0.3]][a][b]).unwrap();
        let s = sign_binned_stats(&b).unwrap();
        let blk = s.block(1, 0);
        assert!((blk.covariance.get(0, 0) - (1.0 - 0.2f64.powi(2))).abs() < 1e-15);
        assert!((blk.covariance.get(1, 1) - (1.0 - 0.0f64.powi(2))).abs() < 1e-15);
        assert!((blk.macro_corr - FRAC_2_PI * blk.d.asin()).abs() < 1e-12);
    }

    #[test]
    fn arcsine_inequality_examples() {
        let n = white_noise(Scenario::chsh()).unwrap();
        let tsirelson = mix(&pr_box(), &n, FRAC_1_SQRT_2).unwrap();
        let (lhs, ok) = qsb_inequality_2n22(&tsirelson, 0, 1, STANDARD_MINUS).unwrap();
        assert!((lhs - PI).abs() < 1e-12 && ok);
        let (lhs, ok) = qsb_inequality_2n22(&pr_box(), 0, 1, STANDARD_MINUS).unwrap();
        assert!((lhs - 2.0 * PI).abs() < 1e-12 && !ok);
        assert_eq!(qsb_inequality_2n22(&n, 0, 1, 0).unwrap().0, 0.0);
        assert!(qsb_inequality_2n22(&n, 1, 1, 0).is_err());
    }

    #[test]
    fn i3322_arcsine_noise() {
        let n = white_noise(Scenario::i3322()).unwrap();
        let (lhs, ok) = qsb_inequality_3322(&n, &Relabeling::identity(n.scenario())).unwrap();
        assert_eq!(lhs, 0.0);
        assert!(ok);
    }
}
