//! Tab-separated result files. Floats use the shortest representation that
//! parses back to the same value, so reruns are byte-identical and stored
//! values can be re-classified exactly.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use ssgd_core::TrajectoryRecord;

use crate::config::ExperimentConfig;
use crate::error::{CliError, CliResult};
use crate::experiment::{Classifier, Comparison, QuenchOutcome, SweepResult};

pub const MANIFEST: &str = "manifest.toml";
pub const SUMMARY: &str = "summary.tsv";
pub const REFERENCES: &str = "references.tsv";
pub const TRAJECTORY_DIR: &str = "trajectories";

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "NA".to_string(), |x| x.to_string())
}

fn write(path: &Path, contents: &str) -> CliResult<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| CliError::io(parent, e))?;
    }
    fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

pub fn trajectory_table(records: &[TrajectoryRecord]) -> String {
    let mut out = String::from("iter\tenergy\tgrad_norm\tmin_hessian_eig\tneel\tfidelity_ground\n");
    for r in records {
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}",
            r.iter,
            r.energy,
            r.grad_norm_system,
            opt(r.min_hessian_eig),
            opt(r.neel),
            opt(r.state_fidelity_ground)
        );
    }
    out
}

pub fn summary_table(result: &SweepResult) -> String {
    let mut out = String::from("initial\tmode\tfinal_energy\tfinal_neel\tlabel\tconverged\titerations\n");
    for e in &result.entries {
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}",
            e.initial,
            e.mode.name(),
            e.final_energy,
            e.final_neel,
            e.label.name(),
            e.converged,
            e.records.last().map_or(0, |r| r.iter)
        );
    }
    out
}

pub fn references_table(result: &SweepResult) -> String {
    let r = &result.references;
    let mut out = String::from("key\tvalue\n");
    let _ = writeln!(out, "ground_energy\t{}", r.ground);
    let _ = writeln!(out, "metastable_energy\t{}", opt(r.metastable));
    match r.classifier {
        Classifier::Energy { half_width, .. } => {
            let _ = writeln!(out, "rule\tenergy");
            let _ = writeln!(out, "half_width\t{half_width}");
        }
        Classifier::Neel { threshold } => {
            let _ = writeln!(out, "rule\tneel");
            let _ = writeln!(out, "neel_threshold\t{threshold}");
        }
    }
    out
}

/// Rebuilds the classifier from a `references.tsv` body.
pub fn parse_references(text: &str) -> Option<Classifier> {
    let mut get = std::collections::BTreeMap::new();
    for line in text.lines().skip(1) {
        let (k, v) = line.split_once('\t')?;
        get.insert(k, v);
    }
    match *get.get("rule")? {
        "energy" => Some(Classifier::Energy {
            ground: get.get("ground_energy")?.parse().ok()?,
            metastable: get.get("metastable_energy")?.parse().ok()?,
            half_width: get.get("half_width")?.parse().ok()?,
        }),
        "neel" => Some(Classifier::Neel {
            threshold: get.get("neel_threshold")?.parse().ok()?,
        }),
        _ => None,
    }
}

pub fn manifest(cfg: &ExperimentConfig, dir: &Path) -> CliResult<String> {
    let mut resolved = cfg.clone();
    resolved.output.dir = dir.to_path_buf();
    Ok(format!("# resolved configuration\n{}", resolved.to_toml()?))
}

pub fn trajectory_path(dir: &Path, initial: &str, mode: &str) -> PathBuf {
    dir.join(TRAJECTORY_DIR).join(format!("{initial}_{mode}.tsv"))
}

/// Manifest, one trajectory file per run, summary and references.
pub fn emit_results(cfg: &ExperimentConfig, result: &SweepResult, dir: &Path) -> CliResult<()> {
    write(&dir.join(MANIFEST), &manifest(cfg, dir)?)?;
    for e in &result.entries {
        write(
            &trajectory_path(dir, &e.initial, e.mode.name()),
            &trajectory_table(&e.records),
        )?;
    }
    write(&dir.join(SUMMARY), &summary_table(result))?;
    write(&dir.join(REFERENCES), &references_table(result))
}

pub fn comparison_table(c: &Comparison) -> String {
    let mut out = String::from("iter\tenergy_with_ancilla\tenergy_unitary_only\n");
    for (i, a, b) in c.aligned() {
        let _ = writeln!(out, "{i}\t{}\t{}", opt(a), opt(b));
    }
    out
}

pub fn emit_comparison(cfg: &ExperimentConfig, c: &Comparison, dir: &Path) -> CliResult<PathBuf> {
    write(&dir.join(MANIFEST), &manifest(cfg, dir)?)?;
    let path = dir.join(format!("comparison_{}.tsv", c.initial));
    write(&path, &comparison_table(c))?;
    Ok(path)
}

pub fn quench_table(q: &QuenchOutcome) -> String {
    let mut out = String::from("key\tvalue\n");
    let _ = writeln!(out, "energy_plus_hz\t{}", q.energy);
    let _ = writeln!(out, "metastable_energy\t{}", q.metastable_energy);
    let _ = writeln!(out, "iterations\t{}", q.iterations);
    let _ = writeln!(out, "converged\t{}", q.converged);
    let _ = writeln!(out, "residual\t{}", q.residual);
    let _ = writeln!(out, "purity\t{}", q.state.purity());
    out.push_str("\nbasis\tpopulation\n");
    let n = q.state.layout().n_system();
    for (i, p) in q.state.populations().iter().enumerate() {
        let _ = writeln!(out, "{}\t{}", ssgd_core::state::index_bitstring(i, n), p);
    }
    out
}

pub fn emit_quench(cfg: &ExperimentConfig, q: &QuenchOutcome, dir: &Path) -> CliResult<PathBuf> {
    write(&dir.join(MANIFEST), &manifest(cfg, dir)?)?;
    let path = dir.join("quench.tsv");
    write(&path, &quench_table(q))?;
    Ok(path)
}

/// Writes a check report next to the other outputs.
pub fn emit_report(dir: &Path, name: &str, body: &str) -> CliResult<PathBuf> {
    let path = dir.join(format!("{name}.tsv"));
    write(&path, body)?;
    Ok(path)
}
