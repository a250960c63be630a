//! Triangle binning along the line from white noise to the d = 3 PR box.

use macrobell::repro::{fig2_line, Fig2Config};

fn main() -> macrobell::Result<()> {
    let cfg = Fig2Config { points: 11, samples: 100_000, ..Fig2Config::default() };
    let r = fig2_line(&cfg)?;
    println!("{:>5}  {:>8}  {:>6}  {:>6}  {:>14}", "t", "CGLMP3", "local", "q1", "triangle value");
    for row in &r.rows {
        println!(
            "{:>5.2}  {:>8.4}  {:>6}  {:>6}  {:>8.4} +- {:.4}",
            row.t, row.cglmp3, row.local, row.q1, row.qtb_value, row.qtb_std_error
        );
    }
    for (set, t, value) in &r.crossings {
        println!("{set:>6} boundary at t = {t:.5} (CGLMP3 = {value:.4})");
    }
    Ok(())
}
