//! First level of the hierarchy: closed form against numeric PSD completion, and the
//! two-row completion criterion.

use macrobell::behavior::named_behavior;
use macrobell::ml::{bordered_problem, lemma1_feasible, lemma1_margin, q1_analytic_2n22, q1_numeric, theorem2_check};
use macrobell::numerics::{complete_to_psd, COMPLETION_MAX_ITER, COMPLETION_TOL};

fn main() -> macrobell::Result<()> {
    for v in [0.9, 0.999, 1.001, 1.2] {
        let b = named_behavior(&format!("isotropic_chsh:{v}"))?;
        println!(
            "v = {v:<6}  closed form {:<8} numeric {}",
            q1_analytic_2n22(&b)?.verdict.to_string(),
            q1_numeric(&b)?.verdict
        );
    }

    println!();
    let rows = [
        vec![vec![0.9, 0.3, -0.2], vec![0.1, 0.8, 0.5]],
        vec![vec![1.0, 1.0, 1.0], vec![1.0, -1.0, 0.0]],
    ];
    for c in rows {
        let (feasible, _) = lemma1_feasible(&c)?;
        let completion = complete_to_psd(&bordered_problem(&c)?, COMPLETION_TOL, COMPLETION_MAX_ITER)?;
        println!(
            "{c:?}\n  criterion {feasible} (margin {:+.4}), product form {}, completion {} (residual {:.1e})",
            lemma1_margin(&c)?,
            theorem2_check(&c)?,
            completion.verdict,
            completion.residual
        );
    }
    Ok(())
}
