//! Sign-binned macroscopic behaviors: the arcsine law and the crossing at the Tsirelson point.

use macrobell::bell::chsh;
use macrobell::behavior::{correlators_from_behavior, named_behavior, white_noise, Scenario};
use macrobell::ml::{qsb_inequality_2n22, qsb_membership, sign_binned_behavior, STANDARD_MINUS};
use macrobell::repro::line_crossing;
use macrobell::sets::SetKind;

fn main() -> macrobell::Result<()> {
    let tsirelson = named_behavior("isotropic_chsh:1")?;
    let binned = sign_binned_behavior(&tsirelson)?;
    println!("sign-binned Tsirelson box correlators: {:?}", correlators_from_behavior(&binned)?.corr);
    println!("CHSH of the binned box: {:.12}", chsh().evaluate(&binned)?);

    for v in [0.9, 1.0, 1.2] {
        let b = named_behavior(&format!("isotropic_chsh:{v}"))?;
        let (lhs, ok) = qsb_inequality_2n22(&b, 0, 1, STANDARD_MINUS)?;
        println!("v = {v}: arcsine sum {lhs:.6} ({}) -> {}", if ok { "holds" } else { "violated" }, qsb_membership(&b)?.verdict);
    }

    let pr = named_behavior("pr")?;
    let noise = white_noise(Scenario::chsh())?;
    let (t, value) = line_crossing(&SetKind::Qsb, &chsh(), &pr, &noise, 1e-10)?;
    println!("PR weight at the boundary: {t:.10} (1/sqrt 2 = {:.10}), CHSH there {value:.10}", std::f64::consts::FRAC_1_SQRT_2);
    Ok(())
}
