//! Bell nonlocality under macroscopic locality.
//!
//! A behavior is a table `P(a, b | x, y)` for a bipartite scenario with `m_a`, `m_b`
//! settings and `d_a`, `d_b` outcomes. The crate decides whether such tables lie in
//! several sets:
//!
//! | set | meaning | module |
//! |-----|---------|--------|
//! | local | convex hull of deterministic strategies (exact LP) | [`bell`] |
//! | `qsb` | the sign-binned macroscopic behavior is local | [`ml`] |
//! | `q1` | first level of the moment-matrix hierarchy (PSD completion) | [`ml`], [`numerics`] |
//! | `qsb3` | the three-binned macroscopic behavior is local | [`binning`] |
//! | `qtb` | the triangle-binned behavior satisfies CGLMP3 (Monte Carlo) | [`binning`] |
//!
//! [`sim`] runs finite-N macroscopic experiments, [`repro`] regenerates the slice and
//! line scans as CSV, and [`cli`] backs the `macrobell` binary. [`sets::SetKind`] gives
//! uniform access to every membership test.
//!
//! ```
//! use macrobell::behavior::isotropic_chsh;
//! use macrobell::sets::{membership, SetKind};
//!
//! let b = isotropic_chsh(0.9).unwrap();
//! assert!(!membership(&b, &SetKind::Local).unwrap().is_inside());
//! assert!(membership(&b, &SetKind::Q1).unwrap().is_inside());
//! ```

pub mod behavior;
pub mod bell;
pub mod binning;
pub mod cli;
pub mod error;
pub mod io;
pub mod membership;
pub mod ml;
pub mod numerics;
pub mod relabel;
pub mod repro;
pub mod sets;
pub mod sim;

pub use error::{Error, Result};
