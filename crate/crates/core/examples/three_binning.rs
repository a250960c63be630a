//! Three-outcome binning of an I3322 vertex as the kernel width varies, with the
//! boundary of the three-binned set on the line from white noise to that vertex.

use macrobell::bell::{i3322, is_local, vertex_pair_for_i3322};
use macrobell::behavior::{white_noise, Scenario};
use macrobell::binning::{three_binned_behavior, ThreeBinSpec};
use macrobell::repro::line_crossing;
use macrobell::sets::SetKind;

fn main() -> macrobell::Result<()> {
    let (p1, _) = vertex_pair_for_i3322()?;
    let noise = white_noise(Scenario::i3322())?;
    println!("{:>8}  {:>14}  {:>10}  {:>8}", "sigma", "binned vertex", "crossing", "I3322");
    for sigma in [0.005, 0.028, 0.1, 1.0] {
        let spec = ThreeBinSpec::new(sigma)?;
        let binned = three_binned_behavior(&p1, &spec)?;
        let local = is_local(&binned)?.verdict;
        let (t, value) = line_crossing(&SetKind::Qsb3(spec), &i3322(), &p1, &noise, 1e-6)?;
        println!("{sigma:>8}  {:>14}  {t:>10.6}  {value:>8.4}", local.to_string());
    }
    Ok(())
}
