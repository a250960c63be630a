//! Bell functionals, classical bounds, local-set membership and no-signaling optimization.

mod functional;
mod local;
mod nosignal;

pub use functional::{
    cglmp3, chsh, i3322, named_functional, witness_candidates, BellFunctional, I3322_JOINT,
};
pub use local::{is_local, local_bound, local_distance_max, local_distance_max_table, LOCAL_TOL, MAX_STRATEGIES};
pub use nosignal::{generalized_pr_d3, ns_maximize, vertex_pair_for_i3322, VERTEX_SEARCH_SEED};

use crate::behavior::{mix, Behavior};
use crate::error::{Error, Result};
use crate::membership::MembershipReport;

/// Crossing point of a membership test along the segment `t p_far + (1 - t) p_base`.
///
/// Bisection on `t in [0, 1]` until the bracket is narrower than `tol`; returns the last
/// `t` found inside. Undetermined verdicts count as outside.
pub fn max_along_line<F>(predicate: F, p_far: &Behavior, p_base: &Behavior, tol: f64) -> Result<f64>
where
    F: Fn(&Behavior) -> Result<MembershipReport>,
{
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("bisection tolerance {tol} must be positive")));
    }
    if !predicate(p_base)?.is_inside() {
        return Err(Error::BaseNotInside);
    }
    if predicate(p_far)?.is_inside() {
        return Ok(1.0);
    }
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if predicate(&mix(p_far, p_base, mid)?)?.is_inside() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}
