//! Simulates sign-binned macroscopic runs of an isotropic CHSH behavior and compares
//! the empirical correlators with the large-N arcsine law.

use macrobell::behavior::{correlators_from_behavior, isotropic_chsh};
use macrobell::ml::normalized_correlator;
use macrobell::sim::{convergence_report, empirical_correlators, run_macroscopic, Binning, SimConfig};
use std::f64::consts::FRAC_2_PI;

fn main() -> macrobell::Result<()> {
    let b = isotropic_chsh(0.9)?;
    let view = correlators_from_behavior(&b)?;
    for n in [100, 1_000, 10_000] {
        let cfg = SimConfig { pairs_per_run: n, runs: 10_000, seed: 7, binning: Binning::Sign };
        let table = run_macroscopic(&b, &cfg)?;
        println!("N = {n}");
        for (x, row) in empirical_correlators(&table)?.iter().enumerate() {
            for (y, (c, se)) in row.iter().enumerate() {
                let expected = FRAC_2_PI * normalized_correlator(&view, x, y)?.asin();
                println!("  <A{x}B{y}> = {c:+.4} +- {se:.4}   arcsine law {expected:+.4}   ({:+.2} SE)", (c - expected) / se);
            }
        }
    }
    let report = convergence_report(&b, Binning::Sign, &[100, 1_000, 10_000], 10_000, 7)?;
    for r in &report.rows {
        println!("N = {:>6}: max deviation {:.5} (max SE {:.5})", r.pairs_per_run, r.distance, r.std_error);
    }
    println!("log-log slope {:.3}", report.slope);
    Ok(())
}
