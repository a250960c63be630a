//! Scans behind the figures: the I3322 slice, the CGLMP3 noise line and the
//! three-binning kernel-width sweep.
//!
//! Every scan is deterministic for fixed parameters and seeds. CSV output uses a header
//! row and 17 significant digits per number.
//!
//! # CSV schemas
//!
//! | file | columns |
//! |------|---------|
//! | `fig1_rays.csv` | `ray,s,set,t_star,i3322` |
//! | `fig1_grid.csv` | `u,v,i3322,local,qsb,q1,qsb3` (1 inside, 0 outside) |
//! | `fig1_summary.csv` | `set,edge_bound,slice_max,argmax_u,argmax_v` |
//! | `fig2_scan.csv` | `t,cglmp3,local,q1,qtb,qtb_value,qtb_std_error` |
//! | `fig2_crossings.csv` | `set,t_star,cglmp3` |
//! | `sigma_scan.csv` | `sigma,edge_bound,slice_max` |
//!
//! On the slice, `s` picks the far point `s P1 + (1 - s) P2` of a ray from white noise
//! and `t` is the weight of that far point, so `u = t s` and `v = t (1 - s)` are the
//! weights of `P1` and `P2`. The edge bound is the I3322 value where the set leaves the
//! rays through `P1` and `P2` themselves; the slice max is the largest value over all rays.

use crate::bell::{cglmp3, generalized_pr_d3, i3322, max_along_line, vertex_pair_for_i3322, BellFunctional};
use crate::behavior::{mix, white_noise, Behavior, Scenario};
use crate::binning::{qtb_check, ThreeBinSpec};
use crate::error::{Error, Result};
use crate::io::{behavior_to_json, format_f64};
use crate::sets::{SetKind, DEFAULT_SIGMA, DEFAULT_TRIANGLE_SAMPLES};
use rayon::prelude::*;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

/// Bisection tolerance used by default for deterministic sets.
pub const DEFAULT_TOL: f64 = 1e-6;
/// Bisection tolerance used by default for the Monte Carlo set.
pub const DEFAULT_MC_TOL: f64 = 1e-3;

/// Crossing of `set` on the segment from `base` toward `far`, with the value of `f` there.
pub fn line_crossing(set: &SetKind, f: &BellFunctional, far: &Behavior, base: &Behavior, tol: f64) -> Result<(f64, f64)> {
    let t = max_along_line(|b| set.test(b), far, base, tol)?;
    let value = f.evaluate(&mix(far, base, t)?)?;
    Ok((t, value))
}

fn csv_num(v: f64) -> String {
    format_f64(v)
}

/// A generated file: name relative to the output directory, and contents.
#[derive(Clone, Debug, PartialEq)]
pub struct Artifact {
    pub name: String,
    pub contents: String,
}

impl Artifact {
    fn new(name: &str, contents: String) -> Self {
        Self { name: name.to_string(), contents }
    }
}

/// Writes artifacts into `dir`, creating it if needed; returns the written paths.
pub fn write_artifacts(dir: impl AsRef<Path>, artifacts: &[Artifact]) -> Result<Vec<PathBuf>> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
    artifacts
        .iter()
        .map(|a| {
            let path = dir.join(&a.name);
            std::fs::write(&path, &a.contents).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
            Ok(path)
        })
        .collect()
}

// ---------------------------------------------------------------------------
// I3322 slice

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Fig1Config {
    /// Number of rays, evenly spaced in `s` from 0 to 1 inclusive.
    pub rays: usize,
    /// Radial grid points per ray in the grid CSV (excluding the origin).
    pub radial: usize,
    pub sigma: f64,
    pub tol: f64,
}

impl Default for Fig1Config {
    fn default() -> Self {
        Self { rays: 200, radial: 50, sigma: DEFAULT_SIGMA, tol: DEFAULT_TOL }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SliceSummary {
    pub set: String,
    pub edge_bound: f64,
    pub slice_max: f64,
    pub argmax_u: f64,
    pub argmax_v: f64,
}

#[derive(Clone, Debug)]
pub struct Fig1Result {
    pub p1: Behavior,
    pub p2: Behavior,
    pub noise: Behavior,
    pub set_names: Vec<String>,
    /// Ray parameter `s` for each ray.
    pub s: Vec<f64>,
    /// `crossings[k][j] = (t*, I3322)` for ray `k` and set `j`.
    pub crossings: Vec<Vec<(f64, f64)>>,
    pub summary: Vec<SliceSummary>,
    pub radial: usize,
}

fn ray_grid(n: usize) -> Result<Vec<f64>> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("need at least 2 rays, got {n}")));
    }
    Ok((0..n).map(|k| k as f64 / (n - 1) as f64).collect())
}

fn slice_crossings(sets: &[SetKind], s: &[f64], p1: &Behavior, p2: &Behavior, noise: &Behavior, tol: f64) -> Result<Vec<Vec<(f64, f64)>>> {
    let f = i3322();
    s.par_iter()
        .map(|&sk| {
            let far = mix(p1, p2, sk)?;
            sets.iter().map(|set| line_crossing(set, &f, &far, noise, tol)).collect()
        })
        .collect()
}

fn summarize(name: &str, s: &[f64], per_ray: &[(f64, f64)]) -> SliceSummary {
    let last = per_ray.len() - 1;
    let edge_bound = per_ray[0].1.max(per_ray[last].1);
    let (k, &(t, value)) = per_ray
        .iter()
        .enumerate()
        .fold((0, &per_ray[0]), |best, cur| if cur.1 .1 > best.1 .1 { cur } else { best });
    SliceSummary {
        set: name.to_string(),
        edge_bound,
        slice_max: value,
        argmax_u: t * s[k],
        argmax_v: t * (1.0 - s[k]),
    }
}

/// Crossings of local, sign-binned, Q¹ and three-binned sets on every ray of the slice.
pub fn fig1_slice(cfg: &Fig1Config) -> Result<Fig1Result> {
    if cfg.radial == 0 {
        return Err(Error::InvalidArgument("radial resolution must be at least 1".into()));
    }
    let sets = [SetKind::Local, SetKind::Qsb, SetKind::Q1, SetKind::Qsb3(ThreeBinSpec::new(cfg.sigma)?)];
    let (p1, p2) = vertex_pair_for_i3322()?;
    let noise = white_noise(Scenario::i3322())?;
    let s = ray_grid(cfg.rays)?;
    let crossings = slice_crossings(&sets, &s, &p1, &p2, &noise, cfg.tol)?;
    let set_names: Vec<String> = sets.iter().map(|k| k.label().to_string()).collect();
    let summary = set_names
        .iter()
        .enumerate()
        .map(|(j, name)| {
            let per_ray: Vec<(f64, f64)> = crossings.iter().map(|row| row[j]).collect();
            summarize(name, &s, &per_ray)
        })
        .collect();
    Ok(Fig1Result { p1, p2, noise, set_names, s, crossings, summary, radial: cfg.radial })
}

impl Fig1Result {
    pub fn summary_for(&self, set: &str) -> Option<&SliceSummary> {
        self.summary.iter().find(|r| r.set == set)
    }

    pub fn artifacts(&self) -> Result<Vec<Artifact>> {
        let mut rays = String::from("ray,s,set,t_star,i3322\n");
        for (k, row) in self.crossings.iter().enumerate() {
            for (name, &(t, v)) in self.set_names.iter().zip(row) {
                let _ = writeln!(rays, "{k},{},{name},{},{}", csv_num(self.s[k]), csv_num(t), csv_num(v));
            }
        }

        // Each set is convex and contains the noise point, so a grid point on ray k at
        // weight t is inside exactly when t does not exceed that ray's crossing.
        let f = i3322();
        let mut grid = format!("u,v,i3322,{}\n", self.set_names.join(","));
        for (k, row) in self.crossings.iter().enumerate() {
            let far = mix(&self.p1, &self.p2, self.s[k])?;
            for j in 0..=self.radial {
                let t = j as f64 / self.radial as f64;
                let value = f.evaluate(&mix(&far, &self.noise, t)?)?;
                let _ = write!(grid, "{},{},{}", csv_num(t * self.s[k]), csv_num(t * (1.0 - self.s[k])), csv_num(value));
                for &(t_star, _) in row {
                    grid.push_str(if t <= t_star { ",1" } else { ",0" });
                }
                grid.push('\n');
            }
        }

        let mut summary = String::from("set,edge_bound,slice_max,argmax_u,argmax_v\n");
        for r in &self.summary {
            let _ = writeln!(
                summary,
                "{},{},{},{},{}",
                r.set,
                csv_num(r.edge_bound),
                csv_num(r.slice_max),
                csv_num(r.argmax_u),
                csv_num(r.argmax_v)
            );
        }

        let vertices = format!(
            "{{\n\"p1\": {},\n\"p2\": {},\n\"noise\": {}\n}}\n",
            behavior_to_json(&self.p1).trim_end(),
            behavior_to_json(&self.p2).trim_end(),
            behavior_to_json(&self.noise).trim_end()
        );

        Ok(vec![
            Artifact::new("fig1_rays.csv", rays),
            Artifact::new("fig1_grid.csv", grid),
            Artifact::new("fig1_summary.csv", summary),
            Artifact::new("fig1_vertices.json", vertices),
        ])
    }

    pub fn report(&self) -> String {
        let mut out = String::from("I3322 slice through the two vertices maximizing I3322 and white noise\n");
        for (name, v) in [("P1", &self.p1), ("P2", &self.p2)] {
            let _ = writeln!(out, "{name} (rows x,y; entries P(a,b|x,y) for ab = 00,01,10,11):");
            for x in 0..3 {
                for y in 0..3 {
                    let blk: Vec<String> = v.block(x, y).iter().map(|p| format!("{p:.3}")).collect();
                    let _ = writeln!(out, "  x={x} y={y}: [{}]", blk.join(", "));
                }
            }
        }
        let _ = writeln!(out, "{:<8} {:>12} {:>12}", "set", "edge bound", "slice max");
        for r in &self.summary {
            let _ = writeln!(out, "{:<8} {:>12.6} {:>12.6}", r.set, r.edge_bound, r.slice_max);
        }
        out
    }
}

// ---------------------------------------------------------------------------
// CGLMP3 noise line

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Fig2Config {
    /// Scan points, evenly spaced in `t` from 0 to 1 inclusive.
    pub points: usize,
    pub samples: usize,
    pub seed: u64,
    pub tol: f64,
    pub mc_tol: f64,
}

impl Default for Fig2Config {
    fn default() -> Self {
        Self { points: 41, samples: DEFAULT_TRIANGLE_SAMPLES, seed: 0, tol: DEFAULT_TOL, mc_tol: DEFAULT_MC_TOL }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Fig2Row {
    pub t: f64,
    pub cglmp3: f64,
    pub local: bool,
    pub q1: bool,
    pub qtb: bool,
    pub qtb_value: f64,
    pub qtb_std_error: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Fig2Result {
    pub rows: Vec<Fig2Row>,
    /// `(set, t*, CGLMP3 at t*)` for local, q1 and qtb.
    pub crossings: Vec<(String, f64, f64)>,
}

impl Fig2Result {
    pub fn crossing(&self, set: &str) -> Option<f64> {
        self.crossings.iter().find(|c| c.0 == set).map(|c| c.1)
    }

    pub fn artifacts(&self) -> Vec<Artifact> {
        let mut scan = String::from("t,cglmp3,local,q1,qtb,qtb_value,qtb_std_error\n");
        for r in &self.rows {
            let _ = writeln!(
                scan,
                "{},{},{},{},{},{},{}",
                csv_num(r.t),
                csv_num(r.cglmp3),
                u8::from(r.local),
                u8::from(r.q1),
                u8::from(r.qtb),
                csv_num(r.qtb_value),
                csv_num(r.qtb_std_error)
            );
        }
        let mut cross = String::from("set,t_star,cglmp3\n");
        for (name, t, v) in &self.crossings {
            let _ = writeln!(cross, "{name},{},{}", csv_num(*t), csv_num(*v));
        }
        vec![Artifact::new("fig2_scan.csv", scan), Artifact::new("fig2_crossings.csv", cross)]
    }

    pub fn report(&self) -> String {
        let mut out = String::from("CGLMP3 line from the generalized PR box to white noise\n");
        for (name, t, v) in &self.crossings {
            let _ = writeln!(out, "{name:<6} crossing t* = {t:.6}  CGLMP3 = {v:.6}");
        }
        out
    }
}

/// Verdicts along `t P_PR3 + (1 - t) P_noise` and the crossing of each set.
pub fn fig2_line(cfg: &Fig2Config) -> Result<Fig2Result> {
    if cfg.points < 2 {
        return Err(Error::InvalidArgument(format!("need at least 2 scan points, got {}", cfg.points)));
    }
    let f = cglmp3();
    let far = generalized_pr_d3()?;
    let noise = white_noise(Scenario::cglmp3())?;
    let qtb = SetKind::Qtb { samples: cfg.samples, seed: cfg.seed };
    let rows = (0..cfg.points)
        .map(|k| {
            let t = k as f64 / (cfg.points - 1) as f64;
            let b = mix(&far, &noise, t)?;
            let report = qtb_check(&b, cfg.samples, cfg.seed)?;
            Ok(Fig2Row {
                t,
                cglmp3: f.evaluate(&b)?,
                local: SetKind::Local.test(&b)?.is_inside(),
                q1: SetKind::Q1.test(&b)?.is_inside(),
                qtb: report.satisfied,
                qtb_value: report.value,
                qtb_std_error: report.std_error,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut crossings = Vec::new();
    for (set, tol) in [(SetKind::Local, cfg.tol), (SetKind::Q1, cfg.tol), (qtb, cfg.mc_tol)] {
        let (t, v) = line_crossing(&set, &f, &far, &noise, tol)?;
        crossings.push((set.label().to_string(), t, v));
    }
    Ok(Fig2Result { rows, crossings })
}

// ---------------------------------------------------------------------------
// three-binning kernel width sweep

#[derive(Clone, Debug, PartialEq)]
pub struct SigmaScanConfig {
    pub sigmas: Vec<f64>,
    /// Rays used for the slice max (at least 2, which covers only the edges).
    pub rays: usize,
    pub tol: f64,
}

/// Seventeen widths from 1e-3 to 10, four per decade, plus 0.028.
pub fn default_sigma_grid() -> Vec<f64> {
    let mut grid: Vec<f64> = (-12..=4).map(|k| 10f64.powf(k as f64 / 4.0)).collect();
    grid.push(DEFAULT_SIGMA);
    grid.sort_by(f64::total_cmp);
    grid
}

impl Default for SigmaScanConfig {
    fn default() -> Self {
        Self { sigmas: default_sigma_grid(), rays: 11, tol: DEFAULT_TOL }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SigmaRow {
    pub sigma: f64,
    pub edge_bound: f64,
    pub slice_max: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SigmaScanResult {
    pub rows: Vec<SigmaRow>,
}

impl SigmaScanResult {
    pub fn row(&self, sigma: f64) -> Option<&SigmaRow> {
        self.rows.iter().find(|r| (r.sigma - sigma).abs() <= 1e-12 * sigma.abs())
    }

    pub fn artifacts(&self) -> Vec<Artifact> {
        let mut csv = String::from("sigma,edge_bound,slice_max\n");
        for r in &self.rows {
            let _ = writeln!(csv, "{},{},{}", csv_num(r.sigma), csv_num(r.edge_bound), csv_num(r.slice_max));
        }
        vec![Artifact::new("sigma_scan.csv", csv)]
    }

    pub fn report(&self) -> String {
        let mut out = format!("{:>12} {:>12} {:>12}\n", "sigma", "edge bound", "slice max");
        for r in &self.rows {
            let _ = writeln!(out, "{:>12.6} {:>12.6} {:>12.6}", r.sigma, r.edge_bound, r.slice_max);
        }
        out
    }
}

/// Three-binned slice bounds for each kernel width.
pub fn sigma_scan(cfg: &SigmaScanConfig) -> Result<SigmaScanResult> {
    if cfg.sigmas.is_empty() {
        return Err(Error::InvalidArgument("empty sigma grid".into()));
    }
    let (p1, p2) = vertex_pair_for_i3322()?;
    let noise = white_noise(Scenario::i3322())?;
    let s = ray_grid(cfg.rays)?;
    let rows = cfg
        .sigmas
        .iter()
        .map(|&sigma| {
            let set = SetKind::Qsb3(ThreeBinSpec::new(sigma)?);
            let crossings = slice_crossings(&[set], &s, &p1, &p2, &noise, cfg.tol)?;
            let per_ray: Vec<(f64, f64)> = crossings.iter().map(|row| row[0]).collect();
            let sum = summarize(set.label(), &s, &per_ray);
            Ok(SigmaRow { sigma, edge_bound: sum.edge_bound, slice_max: sum.slice_max })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SigmaScanResult { rows })
}

// ---------------------------------------------------------------------------

/// A reproduction target with its resolution parameters.
#[derive(Clone, Debug, PartialEq)]
pub enum ReproTarget {
    Fig1Slice(Fig1Config),
    Fig2Line(Fig2Config),
    SigmaScan(SigmaScanConfig),
}

impl ReproTarget {
    /// Target by name with default parameters.
    pub fn parse(name: &str) -> Result<Self> {
        Ok(match name {
            "fig1_slice" => ReproTarget::Fig1Slice(Fig1Config::default()),
            "fig2_line" => ReproTarget::Fig2Line(Fig2Config::default()),
            "sigma_scan" => ReproTarget::SigmaScan(SigmaScanConfig::default()),
            _ => return Err(Error::UnknownName(name.to_string())),
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            ReproTarget::Fig1Slice(_) => "fig1_slice",
            ReproTarget::Fig2Line(_) => "fig2_line",
            ReproTarget::SigmaScan(_) => "sigma_scan",
        }
    }

    /// Runs the scan; returns the files to write and a human-readable report.
    pub fn run(&self) -> Result<(Vec<Artifact>, String)> {
        match self {
            ReproTarget::Fig1Slice(cfg) => {
                let r = fig1_slice(cfg)?;
                Ok((r.artifacts()?, r.report()))
            }
            ReproTarget::Fig2Line(cfg) => {
                let r = fig2_line(cfg)?;
                Ok((r.artifacts(), r.report()))
            }
            ReproTarget::SigmaScan(cfg) => {
                let r = sigma_scan(cfg)?;
                Ok((r.artifacts(), r.report()))
            }
        }
    }
}
