//! Command implementations behind the `macrobell` binary.
//!
//! Each command returns its rendered output and exit code; the binary only parses
//! arguments, prints and exits.

use crate::bell::{named_functional, BellFunctional};
use crate::behavior::{named_behavior, Behavior};
use crate::error::{Error, Result};
use crate::io::{format_f64, read_behavior, read_functional};
use crate::membership::{MembershipReport, Verdict};
use crate::repro::{line_crossing, Artifact, ReproTarget};
use crate::sets::SetKind;
use crate::sim::{empirical_correlators, empirical_marginals, run_macroscopic, SimConfig};
use serde_json::json;
use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

pub const EXIT_INSIDE: i32 = 0;
pub const EXIT_OUTSIDE: i32 = 1;
pub const EXIT_UNDETERMINED: i32 = 2;
pub const EXIT_ERROR: i32 = 3;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum OutputFormat {
    #[default]
    Text,
    Json,
    Csv,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "text" => Ok(OutputFormat::Text),
            "json" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            _ => Err(Error::InvalidArgument(format!("unknown output format `{s}`"))),
        }
    }
}

/// What a command prints, the files it produced and the process exit code.
#[derive(Clone, Debug, PartialEq)]
pub struct CommandOutput {
    pub text: String,
    pub artifacts: Vec<Artifact>,
    pub exit_code: i32,
}

impl CommandOutput {
    fn printed(text: String, exit_code: i32) -> Self {
        Self { text, artifacts: Vec::new(), exit_code }
    }
}

/// Reads a behavior file, or builds a named behavior when no such file exists.
pub fn load_behavior(arg: &str) -> Result<Behavior> {
    if Path::new(arg).is_file() {
        read_behavior(arg)
    } else {
        named_behavior(arg)
    }
}

/// Reads a functional file, or looks up a built-in functional when no such file exists.
pub fn load_functional(arg: &str) -> Result<BellFunctional> {
    if Path::new(arg).is_file() {
        read_functional(arg)
    } else {
        named_functional(arg)
    }
}

pub fn exit_code_for(verdict: Verdict) -> i32 {
    match verdict {
        Verdict::Inside => EXIT_INSIDE,
        Verdict::Outside => EXIT_OUTSIDE,
        Verdict::Undetermined => EXIT_UNDETERMINED,
    }
}

fn render_membership(b: &Behavior, set: &SetKind, r: &MembershipReport, format: OutputFormat) -> String {
    match format {
        OutputFormat::Text => {
            let mut out = format!("scenario: {}\nset: {set}\nverdict: {}\nresidual: {:.3e}\n", b.scenario(), r.verdict, r.residual);
            if let Some(w) = &r.witness {
                let _ = writeln!(out, "witness: {w}");
            }
            out
        }
        OutputFormat::Json => {
            let v = json!({
                "scenario": b.scenario().to_string(),
                "set": set.to_string(),
                "verdict": r.verdict,
                "residual": r.residual,
                "witness": r.witness,
            });
            format!("{v}\n")
        }
        OutputFormat::Csv => {
            let witness = r.witness.as_ref().map(|w| w.to_string().replace(',', ";")).unwrap_or_default();
            format!("set,verdict,residual,witness\n{set},{},{},{witness}\n", r.verdict, format_f64(r.residual))
        }
    }
}

/// Tests `b` against `set`; exit code 0 inside, 1 outside, 2 undetermined.
pub fn cmd_membership(b: &Behavior, set: &SetKind, format: OutputFormat) -> Result<CommandOutput> {
    let r = set.test(b)?;
    Ok(CommandOutput::printed(render_membership(b, set, &r, format), exit_code_for(r.verdict)))
}

/// Crossing `t*` of `set` on `t far + (1 - t) base`, and the functional value there.
pub fn cmd_bound(
    f: &BellFunctional,
    far: &Behavior,
    base: &Behavior,
    set: &SetKind,
    tol: f64,
    format: OutputFormat,
) -> Result<CommandOutput> {
    if f.scenario() != far.scenario() {
        return Err(Error::ScenarioMismatch(format!("functional {} vs behavior {}", f.scenario(), far.scenario())));
    }
    let (t, value) = line_crossing(set, f, far, base, tol)?;
    let text = match format {
        OutputFormat::Text => format!(
            "set: {set}\nfunctional: {}\nt*: {t:.12}\nvalue at t*: {value:.12}\nclassical bound: {}\n",
            f.name(),
            f.classical_bound()
        ),
        OutputFormat::Json => format!(
            "{}\n",
            json!({"set": set.to_string(), "functional": f.name(), "t_star": t, "value": value, "tol": tol})
        ),
        OutputFormat::Csv => format!(
            "set,functional,t_star,value\n{},{},{},{}\n",
            set.label(),
            f.name(),
            format_f64(t),
            format_f64(value)
        ),
    };
    Ok(CommandOutput::printed(text, EXIT_INSIDE))
}

/// Simulates macroscopic runs and reports empirical macroscopic marginals and correlators.
pub fn cmd_simulate(b: &Behavior, cfg: &SimConfig, format: OutputFormat) -> Result<CommandOutput> {
    let table = run_macroscopic(b, cfg)?;
    let s = table.scenario;
    let (corr, marg) = if s.is_binary() {
        (Some(empirical_correlators(&table)?), Some(empirical_marginals(&table)?))
    } else {
        (None, None)
    };
    let text = match format {
        OutputFormat::Json => {
            let v = json!({
                "scenario": s.to_string(),
                "pairs_per_run": cfg.pairs_per_run,
                "runs": cfg.runs,
                "seed": cfg.seed,
                "table": table.table,
                "std_error": table.std_error,
                "correlators": corr,
                "marginals": marg,
            });
            format!("{v}\n")
        }
        OutputFormat::Csv => {
            let mut out = String::from("x,y,a,b,p,std_error\n");
            for x in 0..s.m_a {
                for y in 0..s.m_b {
                    for a in 0..s.d_a {
                        for bb in 0..s.d_b {
                            let i = s.index(x, y, a, bb);
                            let _ = writeln!(out, "{x},{y},{a},{bb},{},{}", format_f64(table.table[i]), format_f64(table.std_error[i]));
                        }
                    }
                }
            }
            out
        }
        OutputFormat::Text => {
            let mut out = format!(
                "scenario: {s}\npairs per run: {}\nruns: {}\nseed: {}\n",
                cfg.pairs_per_run, cfg.runs, cfg.seed
            );
            if let (Some(corr), Some((ma, mb))) = (&corr, &marg) {
                for (x, row) in corr.iter().enumerate() {
                    for (y, (c, se)) in row.iter().enumerate() {
                        let _ = writeln!(out, "<A{x} B{y}> = {c:+.6} +- {se:.6}");
                    }
                }
                for (x, (m, se)) in ma.iter().enumerate() {
                    let _ = writeln!(out, "<A{x}> = {m:+.6} +- {se:.6}");
                }
                for (y, (m, se)) in mb.iter().enumerate() {
                    let _ = writeln!(out, "<B{y}> = {m:+.6} +- {se:.6}");
                }
            } else {
                for x in 0..s.m_a {
                    for y in 0..s.m_b {
                        let start = s.index(x, y, 0, 0);
                        let cells: Vec<String> =
                            table.table[start..start + s.d_a * s.d_b].iter().map(|p| format!("{p:.6}")).collect();
                        let _ = writeln!(out, "x={x} y={y}: [{}]", cells.join(", "));
                    }
                }
            }
            let _ = writeln!(out, "max std error: {:.3e}", table.max_std_error());
            out
        }
    };
    Ok(CommandOutput::printed(text, EXIT_INSIDE))
}

/// Runs a reproduction scan; the artifacts are left for the caller to write.
pub fn cmd_reproduce(target: &ReproTarget, format: OutputFormat) -> Result<CommandOutput> {
    let (artifacts, report) = target.run()?;
    let text = match format {
        OutputFormat::Text => report,
        OutputFormat::Json => {
            let files: Vec<&str> = artifacts.iter().map(|a| a.name.as_str()).collect();
            format!("{}\n", json!({"target": target.name(), "files": files}))
        }
        // the summary table of the target, which is always the last CSV written
        OutputFormat::Csv => artifacts
            .iter()
            .rev()
            .find(|a| a.name.ends_with(".csv"))
            .map(|a| a.contents.clone())
            .unwrap_or_default(),
    };
    Ok(CommandOutput { text, artifacts, exit_code: EXIT_INSIDE })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::behavior::{pr_box, white_noise, Scenario};

    #[test]
    fn membership_exit_codes() {
        let out = cmd_membership(&pr_box(), &SetKind::Qsb, OutputFormat::Text).unwrap();
        assert_eq!(out.exit_code, EXIT_OUTSIDE);
        assert!(out.text.contains("CHSH"), "{}", out.text);
        let noise = white_noise(Scenario::chsh()).unwrap();
        assert_eq!(cmd_membership(&noise, &SetKind::Q1, OutputFormat::Json).unwrap().exit_code, EXIT_INSIDE);
    }

    #[test]
    fn analytic_rejects_three_outcomes() {
        let b = white_noise(Scenario::cglmp3()).unwrap();
        assert!(matches!(
            cmd_membership(&b, &SetKind::Q1Analytic, OutputFormat::Text),
            Err(Error::ScenarioUnsupported(_) | Error::WrongOutcomeCount { .. })
        ));
    }

    #[test]
    fn bound_csv_row() {
        let f = named_functional("chsh").unwrap();
        let noise = white_noise(Scenario::chsh()).unwrap();
        let out = cmd_bound(&f, &pr_box(), &noise, &SetKind::Local, 1e-9, OutputFormat::Csv).unwrap();
        let row: Vec<&str> = out.text.lines().nth(1).unwrap().split(',').collect();
        let t: f64 = row[2].parse().unwrap();
        let v: f64 = row[3].parse().unwrap();
        assert!((t - 0.5).abs() < 1e-8 && (v - 2.0).abs() < 1e-7);
    }

    #[test]
    fn formats_parse() {
        assert_eq!("csv".parse::<OutputFormat>().unwrap(), OutputFormat::Csv);
        assert!("xml".parse::<OutputFormat>().is_err());
    }
}
