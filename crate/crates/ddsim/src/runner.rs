//! Batch run driver behind the `ddsim` binary: dispatches a resolved
//! [`RunConfig`] to the experiment drivers, writes the output files, and
//! drops a sidecar next to each output with the full resolved configuration
//! so any file can be regenerated exactly.
//!
//! All computation happens before the first byte is written; if any write
//! fails, files already written by the run are removed.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analysis::{fit_stretched_exp, normalize_counts, AnalysisError, FitResult};
use crate::bath::{sample_bath, write_sampled_bath_string, BathError};
use crate::config::{Command, ConfigError, RunConfig};
use crate::engines::EngineError;
use crate::experiments::{
    bloch_scan, decay_curve, error_sweep, pulse_count_sweep, ramsey, ramsey_spectrum,
    DecayCurve, ErrorSweepCurve, ExperimentError, SurvivalMap, SweepKind,
};
use crate::sequence::SequenceError;

/// Failure classes map one-to-one onto process exit codes.
#[derive(Debug, Error)]
pub enum RunError {
    #[error("config error: {0}")]
    Config(#[from] ConfigError),
    #[error("engine error: {0}")]
    Engine(String),
    #[error("fit error: {0}")]
    Fit(#[from] AnalysisError),
    #[error("i/o error on {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_ENGINE: i32 = 3;
pub const EXIT_FIT: i32 = 4;
pub const EXIT_IO: i32 = 5;

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => EXIT_CONFIG,
            RunError::Engine(_) => EXIT_ENGINE,
            RunError::Fit(_) => EXIT_FIT,
            RunError::Io { .. } => EXIT_IO,
        }
    }
}

impl From<ExperimentError> for RunError {
    fn from(e: ExperimentError) -> Self {
        RunError::Engine(e.to_string())
    }
}

impl From<EngineError> for RunError {
    fn from(e: EngineError) -> Self {
        RunError::Engine(e.to_string())
    }
}

impl From<SequenceError> for RunError {
    fn from(e: SequenceError) -> Self {
        RunError::Engine(e.to_string())
    }
}

impl From<BathError> for RunError {
    fn from(e: BathError) -> Self {
        RunError::Engine(e.to_string())
    }
}

/// Files written plus warnings to surface on stderr.
#[derive(Debug)]
pub struct RunOutput {
    pub files: Vec<PathBuf>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Serialize, Deserialize)]
struct Sidecar {
    provenance: Provenance,
    config: RunConfig,
}

#[derive(Debug, Serialize, Deserialize)]
struct Provenance {
    artifact: String,
    wall_time_s: f64,
    outputs: Vec<String>,
    warnings: Vec<String>,
}

fn sidecar_path(output: &Path) -> PathBuf {
    let mut name = output.file_name().unwrap_or_default().to_os_string();
    name.push(".meta.toml");
    output.with_file_name(name)
}

/// Read the `[config]` table of a sidecar back into a runnable config.
pub fn config_from_sidecar(path: &Path) -> Result<RunConfig, RunError> {
    let text = std::fs::read_to_string(path).map_err(|source| RunError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let sidecar: Sidecar =
        toml::from_str(&text).map_err(|e| RunError::Config(ConfigError::Parse(e.to_string())))?;
    Ok(sidecar.config)
}

// ---------------------------------------------------------------------------
// Output rendering
// ---------------------------------------------------------------------------

fn render_decay_csv(curve: &DecayCurve) -> String {
    let mut out = String::from("total_time_us,survival,sequence,n_pulses\n");
    for p in &curve.points {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            p.time_s * 1e6,
            p.survival,
            curve.meta.sequence,
            p.n_pulses
        );
    }
    out
}

fn render_map_csv(map: &SurvivalMap) -> String {
    let mut out = String::from("theta_rad,phi_rad,survival\n");
    for (i, &theta) in map.theta_grid.iter().enumerate() {
        for (j, &phi) in map.phi_grid.iter().enumerate() {
            let _ = writeln!(out, "{},{},{}", theta, phi, map.at(i, j));
        }
    }
    out
}

fn render_sweep_csv(sweep: &ErrorSweepCurve, offset_in_mhz: bool) -> String {
    let mut out = String::from("error_value,survival,sequence,n_pulses\n");
    for &(x, s) in &sweep.points {
        let x_out = if offset_in_mhz { x / 1e6 } else { x };
        let _ = writeln!(out, "{},{},{},{}", x_out, s, sweep.meta.sequence, sweep.n_pulses);
    }
    out
}

fn render_fit_record(fit: &FitResult) -> String {
    #[derive(Serialize)]
    struct Record {
        t2_us: f64,
        exponent_n: f64,
        amplitude: f64,
        baseline: f64,
        rss: f64,
        converged: bool,
    }
    let record = Record {
        t2_us: fit.t2_s * 1e6,
        exponent_n: fit.exponent_n,
        amplitude: fit.amplitude,
        baseline: fit.baseline,
        rss: fit.rss,
        converged: fit.converged,
    };
    let mut text = serde_json::to_string(&record).expect("flat record serializes");
    text.push('\n');
    text
}

fn render_spectrum_csv(spectrum: &[(f64, f64)]) -> String {
    let mut out = String::from("freq_mhz,magnitude\n");
    for &(f, m) in spectrum {
        let _ = writeln!(out, "{},{}", f / 1e6, m);
    }
    out
}

// ---------------------------------------------------------------------------
// Fit-command input
// ---------------------------------------------------------------------------

enum IngestedCurve {
    /// (time_s, survival)
    Survival(Vec<(f64, f64)>),
    /// (time_s, counts)
    Counts(Vec<(f64, f64)>),
}

fn read_input_csv(path: &Path) -> Result<IngestedCurve, RunError> {
    let text = std::fs::read_to_string(path).map_err(|source| RunError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let mut lines = text.lines();
    let header = lines.next().unwrap_or_default().trim();
    let cols: Vec<&str> = header.split(',').map(str::trim).collect();
    let kind = match cols.as_slice() {
        [first, second, ..] if *first == "total_time_us" && *second == "survival" => "survival",
        [first, second, ..] if *first == "time_us" && *second == "counts" => "counts",
        _ => {
            return Err(RunError::Config(ConfigError::InvalidValue {
                key: "input",
                reason: format!(
                    "unrecognized header `{header}`; expected `total_time_us,survival,…` \
                     or `time_us,counts`"
                ),
            }))
        }
    };
    let mut points = Vec::new();
    for (lineno, line) in lines.enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        let parse = |s: &str| -> Result<f64, RunError> {
            s.trim().parse().map_err(|_| {
                RunError::Config(ConfigError::InvalidValue {
                    key: "input",
                    reason: format!("line {}: bad number `{}`", lineno + 2, s),
                })
            })
        };
        if fields.len() < 2 {
            return Err(RunError::Config(ConfigError::InvalidValue {
                key: "input",
                reason: format!("line {}: expected at least 2 columns", lineno + 2),
            }));
        }
        points.push((parse(fields[0])? * 1e-6, parse(fields[1])?));
    }
    Ok(match kind {
        "survival" => IngestedCurve::Survival(points),
        _ => IngestedCurve::Counts(points),
    })
}

// ---------------------------------------------------------------------------
// Dispatch
// ---------------------------------------------------------------------------

/// Execute a resolved config: compute everything, then write the data files
/// and the sidecar. Returns the paths written.
pub fn run(cfg: &RunConfig) -> Result<RunOutput, RunError> {
    let started = Instant::now();
    let mut warnings: Vec<String> = Vec::new();
    let output = PathBuf::from(&cfg.output);

    // (path, content) pairs, written only after all computation succeeds
    let mut files: Vec<(PathBuf, String)> = Vec::new();

    match cfg.command {
        Command::Decay => {
            let (bath, w) = cfg.bath()?;
            warnings.extend(w);
            let curve = decay_curve(
                cfg.family()?,
                cfg.n_pulses.expect("validated"),
                &cfg.tau_list_s().expect("validated"),
                &bath,
                &cfg.error_model(),
                &cfg.initial()?,
                &cfg.envelope(),
                &cfg.engine_config(),
            )?;
            for (x, e) in &curve.meta.skipped {
                warnings.push(format!("point tau = {:.4} us skipped: {e}", x * 1e6));
            }
            files.push((output.clone(), render_decay_csv(&curve)));
        }
        Command::SweepPulses => {
            let (bath, w) = cfg.bath()?;
            warnings.extend(w);
            let curve = pulse_count_sweep(
                cfg.family()?,
                cfg.n_list.as_deref().expect("validated"),
                cfg.tau_us * 1e-6,
                &bath,
                &cfg.error_model(),
                &cfg.initial()?,
                &cfg.envelope(),
                &cfg.engine_config(),
            )?;
            for (x, e) in &curve.meta.skipped {
                warnings.push(format!("point n = {x} skipped: {e}"));
            }
            files.push((output.clone(), render_decay_csv(&curve)));
        }
        Command::BlochScan => {
            let (bath, w) = cfg.bath()?;
            warnings.extend(w);
            let map = bloch_scan(
                cfg.family()?,
                cfg.n_pulses.expect("defaulted"),
                cfg.tau_us * 1e-6,
                &bath,
                &cfg.error_model(),
                cfg.theta_steps,
                cfg.phi_steps,
                &cfg.envelope(),
                &cfg.engine_config(),
            )?;
            files.push((output.clone(), render_map_csv(&map)));
        }
        Command::ErrorSweep => {
            let (bath, w) = cfg.bath()?;
            warnings.extend(w);
            let sweep_name = cfg.sweep.as_deref().expect("validated");
            let kind = match sweep_name {
                "flip" => SweepKind::FlipAngle { max_epsilon: cfg.flip_max },
                _ => SweepKind::Offset { max_offset_hz: cfg.offset_max_mhz * 1e6 },
            };
            let sweep = error_sweep(
                cfg.family()?,
                cfg.n_pulses.expect("validated"),
                cfg.tau_us * 1e-6,
                kind,
                cfg.sweep_steps,
                &cfg.error_model(),
                &cfg.initial()?,
                &bath,
                &cfg.envelope(),
                &cfg.engine_config(),
            )?;
            files.push((output.clone(), render_sweep_csv(&sweep, sweep_name == "offset")));
        }
        Command::Fit => {
            let input = PathBuf::from(cfg.input.as_deref().expect("validated"));
            let series = match read_input_csv(&input)? {
                IngestedCurve::Survival(points) => points,
                IngestedCurve::Counts(points) => {
                    let (rabi_max, rabi_min) = match (cfg.rabi_max, cfg.rabi_min) {
                        (Some(max), Some(min)) => (max, min),
                        _ => {
                            return Err(RunError::Config(ConfigError::MissingFields {
                                command: "fit",
                                fields: vec!["rabi_max", "rabi_min"],
                            }))
                        }
                    };
                    let normalized = normalize_counts(&points, rabi_max, rabi_min)?;
                    if normalized.out_of_range > 0 {
                        warnings.push(format!(
                            "{} normalized points fall outside [0, 1] (kept)",
                            normalized.out_of_range
                        ));
                    }
                    normalized.points
                }
            };
            let fit = fit_stretched_exp(&series, cfg.fix_baseline)?;
            if !fit.converged {
                warnings.push(format!(
                    "fit did not converge after {} iterations; best-so-far parameters written",
                    fit.n_iterations
                ));
            }
            files.push((output.clone(), render_fit_record(&fit)));
        }
        Command::Ramsey => {
            let dt = cfg.t_max_us * 1e-6 / cfg.t_steps as f64;
            let t_list: Vec<f64> = (0..cfg.t_steps).map(|i| i as f64 * dt).collect();
            let curve = ramsey(
                cfg.detuning_mhz * 1e6,
                cfg.hyperfine_14n_mhz * 1e6,
                cfg.t2star_us * 1e-6,
                &t_list,
            )?;
            files.push((output.clone(), render_decay_csv(&curve)));
            if let Some(spec_path) = &cfg.spectrum_output {
                let spectrum = ramsey_spectrum(&curve)?;
                files.push((PathBuf::from(spec_path), render_spectrum_csv(&spectrum)));
            }
        }
        Command::BathSample => {
            let sampled = sample_bath(&cfg.sampler_config(), cfg.b_field_mt * 1e-3)?;
            if sampled.empty {
                warnings.push("empty bath: no nuclei survived placement and filtering".into());
            }
            if sampled.truncated > 0 {
                warnings.push(format!(
                    "{} weakest in-band nuclei dropped at the cap",
                    sampled.truncated
                ));
            }
            files.push((output.clone(), write_sampled_bath_string(&sampled)));
        }
        Command::DumpSequence => {
            let seq = cfg.family()?.generate(cfg.n_pulses.expect("validated"), cfg.tau_us * 1e-6)?;
            files.push((output.clone(), seq.dump()));
        }
    }

    let sidecar = Sidecar {
        provenance: Provenance {
            artifact: format!("ddsim {}", env!("CARGO_PKG_VERSION")),
            wall_time_s: started.elapsed().as_secs_f64(),
            outputs: files.iter().map(|(p, _)| p.display().to_string()).collect(),
            warnings: warnings.clone(),
        },
        config: cfg.clone(),
    };
    let sidecar_text = format!(
        "# ddsim sidecar: replay by re-running the [config] table\n{}",
        toml::to_string(&sidecar).expect("sidecar serializes")
    );
    files.push((sidecar_path(&output), sidecar_text));

    // all computation done — write, removing partial output on failure
    let mut written: Vec<PathBuf> = Vec::new();
    for (path, content) in &files {
        if let Err(source) = std::fs::write(path, content) {
            for w in &written {
                let _ = std::fs::remove_file(w);
            }
            let _ = std::fs::remove_file(path);
            return Err(RunError::Io { path: path.display().to_string(), source });
        }
        written.push(path.clone());
    }
    Ok(RunOutput { files: written, warnings })
}
