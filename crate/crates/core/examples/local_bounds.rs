//! Classical and no-signaling values of the built-in functionals, and locality along the CHSH line.

use macrobell::bell::{chsh, cglmp3, i3322, is_local, local_bound, ns_maximize};
use macrobell::behavior::isotropic_chsh;

fn main() -> macrobell::Result<()> {
    for f in [chsh(), i3322(), cglmp3()] {
        let (ns, _) = ns_maximize(&f)?;
        println!("{:<6} local bound {:>6.3}   no-signaling max {:>6.3}", f.name(), local_bound(&f)?, ns);
    }

    println!();
    for v in [0.5, 0.7, std::f64::consts::FRAC_1_SQRT_2, 0.75, 1.0] {
        let b = isotropic_chsh(v)?;
        let r = is_local(&b)?;
        let witness = r.witness.map(|w| w.to_string()).unwrap_or_default();
        println!("isotropic v = {v:.4}: {:<8} {witness}", r.verdict.to_string());
    }
    Ok(())
}
