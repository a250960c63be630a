//! Coarse version of the I3322 slice: boundary of each set on rays from white noise.

use macrobell::repro::{fig1_slice, Fig1Config};

fn main() -> macrobell::Result<()> {
    let cfg = Fig1Config { rays: 9, ..Fig1Config::default() };
    let r = fig1_slice(&cfg)?;
    print!("{}", r.report());
    for s in &r.summary {
        println!("{:<6} bound on the vertex edges {:.4}, slice maximum {:.4}", s.set, s.edge_bound, s.slice_max);
    }
    Ok(())
}
