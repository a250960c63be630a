//! Macroscopic locality: sign binning, the sets Q^SB and Q¹, and their analytic forms.

mod analytic;
mod npa;
mod sign;

pub use analytic::{
    bordered_problem, lemma1_feasible, lemma1_margin, q1_analytic_2n22, q1_analytic_margin, theorem2_check,
    theorem2_margin,
};
pub use npa::{q1_numeric, q1_numeric_with, Npa1Template, MAX_BASIS};
pub use sign::{
    arcsin_sum, correlation_matrix, normalized_correlator, qsb_inequality_2n22, qsb_inequality_3322,
    qsb_inequality_3322_orbit_max, qsb_membership, sign_binned_behavior, sign_binned_stats, SignBinnedBlock,
    SignBinnedStats, ARCSIN_TOL, CONSISTENCY_TOL, DETERMINISTIC_EPS, STANDARD_MINUS,
};
