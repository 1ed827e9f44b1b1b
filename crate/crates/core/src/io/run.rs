//! Command orchestration.

use std::fs;
use std::path::PathBuf;

use serde_json::{json, Map, Value};

use crate::io::config::{parse_config_with, Overrides, ResolvedConfig};
use crate::io::output::{
    convergence_summary, convergence_table, field_table, modes_table, pretty, write_file, Format,
};
use crate::io::validate::run_suites;
use crate::thermo::{build_systems, convergence_study, simulate};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Simulate,
    Modes,
    Converge,
    Validate,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Simulate => "simulate",
            Command::Modes => "modes",
            Command::Converge => "converge",
            Command::Validate => "validate",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub config_path: Option<PathBuf>,
    pub output_dir: PathBuf,
    pub overrides: Overrides,
    pub format: Format,
    pub parallel: bool,
    pub seed: u64,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        Self {
            command,
            config_path: None,
            output_dir: PathBuf::from("."),
            overrides: Overrides::default(),
            format: Format::Csv,
            parallel: false,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    /// 0 on success, 4 when a validation check failed.
    pub exit_code: i32,
    /// Written files, relative to the output directory, with their SHA-256.
    pub files: Vec<(String, String)>,
    /// Short human-readable summary.
    pub summary: String,
}

/// Validation failures map to this exit status.
pub const VALIDATION_FAILURE: i32 = 4;

pub fn run(cfg: &RunConfig) -> Result<RunOutcome> {
    fs::create_dir_all(&cfg.output_dir)?;
    if cfg.command == Command::Validate {
        return run_validate(cfg);
    }
    let text = match &cfg.config_path {
        Some(p) => fs::read_to_string(p)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", p.display())))?,
        None => "{}".to_string(),
    };
    let (spec, resolved) = parse_config_with(&text, &cfg.overrides)?;
    let ext = cfg.format.extension();
    let dir = &cfg.output_dir;
    let mut files = Vec::new();
    let summary = match cfg.command {
        Command::Simulate => {
            let field = simulate(&spec, cfg.parallel)?;
            let name = format!("field.{ext}");
            files.push((name.clone(), write_file(dir, &name, &field_table(&field).render(cfg.format))?));
            format!("{} x {} samples", field.nt(), field.nx())
        }
        Command::Modes => {
            let systems = build_systems(&spec)?;
            let name = format!("modes.{ext}");
            files.push((name.clone(), write_file(dir, &name, &modes_table(&systems).render(cfg.format))?));
            format!("{} modes", systems.len())
        }
        Command::Converge => {
            let report = convergence_study(&spec, &resolved.tau_list, cfg.parallel)?;
            let name = format!("convergence.{ext}");
            let table = convergence_table(&report).render(cfg.format);
            files.push((name.clone(), write_file(dir, &name, &table)?));
            let summary_name = "convergence_summary.json".to_string();
            let body = pretty(&convergence_summary(&report));
            files.push((summary_name.clone(), write_file(dir, &summary_name, &body)?));
            match report.slope {
                Some(s) => format!("fitted slope {s:.4}"),
                None => "fitted slope undefined".to_string(),
            }
        }
        Command::Validate => unreachable!("handled above"),
    };
    write_manifest(cfg, &resolved, &files)?;
    Ok(RunOutcome {
        exit_code: 0,
        files,
        summary,
    })
}

/// Resolved configuration plus a `manifest` record; valid as an input file.
pub fn manifest(cfg: &RunConfig, resolved: &ResolvedConfig, files: &[(String, String)]) -> Value {
    let mut doc = resolved.to_json();
    let checksums: Map<String, Value> = files.iter().map(|(n, h)| (n.clone(), json!(h))).collect();
    doc["manifest"] = json!({
        "program": env!("CARGO_PKG_NAME"),
        "version": env!("CARGO_PKG_VERSION"),
        "command": cfg.command.name(),
        "format": cfg.format.extension(),
        "sha256": checksums,
    });
    doc
}

fn write_manifest(cfg: &RunConfig, resolved: &ResolvedConfig, files: &[(String, String)]) -> Result<()> {
    write_file(&cfg.output_dir, "manifest.json", &pretty(&manifest(cfg, resolved, files)))?;
    Ok(())
}

fn run_validate(cfg: &RunConfig) -> Result<RunOutcome> {
    let report = run_suites(cfg.seed);
    let mut files = Vec::new();
    let text = report.to_text();
    files.push((
        "validation_report.txt".to_string(),
        write_file(&cfg.output_dir, "validation_report.txt", &text)?,
    ));
    files.push((
        "validation_report.json".to_string(),
        write_file(&cfg.output_dir, "validation_report.json", &pretty(&report.to_json()))?,
    ));
    let failed = report.checks.iter().filter(|c| !c.passed).count();
    Ok(RunOutcome {
        exit_code: if failed == 0 { 0 } else { VALIDATION_FAILURE },
        files,
        summary: format!("{}{} of {} checks passed", text, report.checks.len() - failed, report.checks.len()),
    })
}
