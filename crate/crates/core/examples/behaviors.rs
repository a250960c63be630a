//! Builds the named behaviors, mixes them and converts between probability and correlator form.

use macrobell::behavior::{correlators_from_behavior, isotropic_chsh, mix, named_behavior, pr_box, white_noise, Scenario};
use macrobell::io::behavior_to_json;

fn main() -> macrobell::Result<()> {
    for name in ["pr", "isotropic_chsh:1.4142135623730951", "white_noise:3322", "generalized_pr_d3"] {
        let b = named_behavior(name)?;
        println!("{name}: scenario {}, {} entries", b.scenario(), b.table().len());
    }

    let pr = pr_box();
    let noise = white_noise(Scenario::chsh())?;
    let half = mix(&pr, &noise, 0.5)?;
    let view = correlators_from_behavior(&half)?;
    println!("half PR box + half noise: correlators {:?}, marginals {:?} {:?}", view.corr, view.mar_a, view.mar_b);

    // isotropic_chsh(v) is the PR/noise mixture with PR weight v / sqrt 2
    let iso = isotropic_chsh(0.5 * std::f64::consts::SQRT_2)?;
    println!("isotropic(sqrt 2 / 2) vs mix(0.5): max difference {:.1e}", iso.max_abs_diff(&half)?);

    println!("\nJSON file form of the PR box:\n{}", behavior_to_json(&pr));
    Ok(())
}
