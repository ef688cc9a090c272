//! Run configuration: a strict, unit-suffixed key–value schema shared by the
//! config file (TOML), the command-line flags that override it, and the
//! sidecar metadata that makes every output reproducible.
//!
//! Unknown keys are rejected. All physical quantities carry their unit in
//! the key name (`tau_us`, `offset_mhz`, `b_field_mt`); conversion to SI
//! happens in one place, when the resolved config is turned into engine
//! objects.

use std::f64::consts::{FRAC_PI_2, PI};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bath::{read_bath_file, sample_bath, BathError, BathSpec, LatticeSamplerConfig};
use crate::engines::{EngineConfig, EnvelopeParams};
use crate::quantum::{QubitState, QuantumError};
use crate::sequence::{ErrorModel, SequenceError, SequenceFamily};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config file {path}: {source}")]
    File { path: String, source: std::io::Error },
    #[error("config parse error: {0}")]
    Parse(String),
    #[error("{command}: missing required field(s): {}", fields.join(", "))]
    MissingFields { command: &'static str, fields: Vec<&'static str> },
    #[error("invalid value for `{key}`: {reason}")]
    InvalidValue { key: &'static str, reason: String },
    #[error(transparent)]
    Bath(#[from] BathError),
    #[error(transparent)]
    Sequence(#[from] SequenceError),
    #[error(transparent)]
    Quantum(#[from] QuantumError),
}

/// The CLI verbs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Decay,
    SweepPulses,
    BlochScan,
    ErrorSweep,
    Fit,
    Ramsey,
    BathSample,
    DumpSequence,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Decay => "decay",
            Command::SweepPulses => "sweep-pulses",
            Command::BlochScan => "bloch-scan",
            Command::ErrorSweep => "error-sweep",
            Command::Fit => "fit",
            Command::Ramsey => "ramsey",
            Command::BathSample => "bath-sample",
            Command::DumpSequence => "dump-sequence",
        }
    }
}

macro_rules! partial_fields {
    ($($(#[$doc:meta])* $name:ident : $ty:ty),* $(,)?) => {
        /// Unresolved configuration: every field optional, populated from a
        /// config file and/or command-line flags.
        #[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
        #[serde(deny_unknown_fields)]
        pub struct PartialConfig {
            $(
                $(#[$doc])*
                #[serde(skip_serializing_if = "Option::is_none")]
                pub $name: Option<$ty>,
            )*
        }

        impl PartialConfig {
            /// Overlay `self` on top of `base`: set fields win.
            pub fn over(self, base: PartialConfig) -> PartialConfig {
                PartialConfig {
                    $( $name: self.$name.or(base.$name), )*
                }
            }
        }
    };
}

partial_fields! {
    sequence: String,
    n_pulses: u32,
    n_list: Vec<u32>,
    tau_us: f64,
    tau_min_us: f64,
    tau_max_us: f64,
    tau_steps: usize,
    b_field_mt: f64,
    larmor_period_us: f64,
    bath_file: String,
    sample_bath: bool,
    abundance: f64,
    radius_nm: f64,
    min_coupling_khz: f64,
    max_coupling_khz: f64,
    epsilon: f64,
    offset_mhz: f64,
    rabi_mhz: f64,
    finite_duration: bool,
    theta_rad: f64,
    phi_rad: f64,
    t1_ms: f64,
    t_markov_ms: f64,
    seed: u64,
    bath_samples: usize,
    theta_steps: usize,
    phi_steps: usize,
    sweep: String,
    flip_max: f64,
    offset_max_mhz: f64,
    sweep_steps: usize,
    input: String,
    fix_baseline: f64,
    rabi_max: f64,
    rabi_min: f64,
    detuning_mhz: f64,
    hyperfine_14n_mhz: f64,
    t2star_us: f64,
    t_max_us: f64,
    t_steps: usize,
    spectrum_output: String,
    output: String,
}

/// Parse a config file; unknown keys are rejected with the key named.
pub fn load_config_file(path: &Path) -> Result<PartialConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::File {
        path: path.display().to_string(),
        source,
    })?;
    toml::from_str(&text).map_err(|e| ConfigError::Parse(e.to_string()))
}

/// Fully resolved run configuration. Serialized verbatim into the output
/// sidecar, from which the run can be replayed exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sequence: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_pulses: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_list: Option<Vec<u32>>,
    pub tau_us: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau_min_us: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau_max_us: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau_steps: Option<usize>,
    pub b_field_mt: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub larmor_period_us: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bath_file: Option<String>,
    pub sample_bath: bool,
    pub abundance: f64,
    pub radius_nm: f64,
    pub min_coupling_khz: f64,
    pub max_coupling_khz: f64,
    pub epsilon: f64,
    pub offset_mhz: f64,
    pub rabi_mhz: f64,
    pub finite_duration: bool,
    pub theta_rad: f64,
    pub phi_rad: f64,
    pub t1_ms: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_markov_ms: Option<f64>,
    pub seed: u64,
    pub bath_samples: usize,
    pub theta_steps: usize,
    pub phi_steps: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<String>,
    pub flip_max: f64,
    pub offset_max_mhz: f64,
    pub sweep_steps: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fix_baseline: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rabi_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rabi_min: Option<f64>,
    pub detuning_mhz: f64,
    pub hyperfine_14n_mhz: f64,
    pub t2star_us: f64,
    pub t_max_us: f64,
    pub t_steps: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spectrum_output: Option<String>,
    pub output: String,
}

/// Apply defaults (the reference experimental conditions) and per-command
/// required-field checks.
pub fn resolve(command: Command, p: PartialConfig) -> Result<RunConfig, ConfigError> {
    let mut missing: Vec<&'static str> = Vec::new();
    let required = |missing: &mut Vec<&'static str>, present: bool, name: &'static str| {
        if !present {
            missing.push(name);
        }
    };

    match command {
        Command::Decay => {
            required(&mut missing, p.sequence.is_some(), "sequence");
            required(&mut missing, p.n_pulses.is_some(), "n_pulses");
            required(&mut missing, p.tau_min_us.is_some(), "tau_min_us");
            required(&mut missing, p.tau_max_us.is_some(), "tau_max_us");
            required(&mut missing, p.tau_steps.is_some(), "tau_steps");
        }
        Command::SweepPulses => {
            required(&mut missing, p.sequence.is_some(), "sequence");
            required(&mut missing, p.n_list.is_some(), "n_list");
        }
        Command::BlochScan => {
            required(&mut missing, p.sequence.is_some(), "sequence");
        }
        Command::ErrorSweep => {
            required(&mut missing, p.sequence.is_some(), "sequence");
            required(&mut missing, p.n_pulses.is_some(), "n_pulses");
            required(&mut missing, p.sweep.is_some(), "sweep");
        }
        Command::Fit => {
            required(&mut missing, p.input.is_some(), "input");
        }
        Command::Ramsey | Command::BathSample => {}
        Command::DumpSequence => {
            required(&mut missing, p.sequence.is_some(), "sequence");
            required(&mut missing, p.n_pulses.is_some(), "n_pulses");
        }
    }
    required(&mut missing, p.output.is_some(), "output");
    if !missing.is_empty() {
        return Err(ConfigError::MissingFields { command: command.name(), fields: missing });
    }

    let cfg = RunConfig {
        command,
        sequence: p.sequence,
        n_pulses: p.n_pulses.or(match command {
            Command::BlochScan => Some(20),
            _ => None,
        }),
        n_list: p.n_list,
        tau_us: p.tau_us.unwrap_or(0.8),
        tau_min_us: p.tau_min_us,
        tau_max_us: p.tau_max_us,
        tau_steps: p.tau_steps,
        b_field_mt: p.b_field_mt.unwrap_or(6.8),
        larmor_period_us: p.larmor_period_us,
        bath_file: p.bath_file,
        sample_bath: p.sample_bath.unwrap_or(false),
        abundance: p.abundance.unwrap_or(0.011),
        radius_nm: p.radius_nm.unwrap_or(3.0),
        min_coupling_khz: p.min_coupling_khz.unwrap_or(0.0),
        max_coupling_khz: p.max_coupling_khz.unwrap_or(1000.0),
        epsilon: p.epsilon.unwrap_or(0.0),
        offset_mhz: p.offset_mhz.unwrap_or(0.0),
        rabi_mhz: p.rabi_mhz.unwrap_or(12.5),
        finite_duration: p.finite_duration.unwrap_or(false),
        theta_rad: p.theta_rad.unwrap_or(FRAC_PI_2),
        phi_rad: p.phi_rad.unwrap_or(FRAC_PI_2),
        t1_ms: p.t1_ms.unwrap_or(4.0),
        t_markov_ms: p.t_markov_ms,
        seed: p.seed.unwrap_or(0),
        bath_samples: p.bath_samples.unwrap_or(4096),
        theta_steps: p.theta_steps.unwrap_or(19),
        phi_steps: p.phi_steps.unwrap_or(37),
        sweep: p.sweep,
        flip_max: p.flip_max.unwrap_or(0.2),
        offset_max_mhz: p.offset_max_mhz.unwrap_or(5.0),
        sweep_steps: p.sweep_steps.unwrap_or(41),
        input: p.input,
        fix_baseline: p.fix_baseline,
        rabi_max: p.rabi_max,
        rabi_min: p.rabi_min,
        detuning_mhz: p.detuning_mhz.unwrap_or(5.0),
        hyperfine_14n_mhz: p.hyperfine_14n_mhz.unwrap_or(2.16),
        t2star_us: p.t2star_us.unwrap_or(1.0),
        t_max_us: p.t_max_us.unwrap_or(81.92),
        t_steps: p.t_steps.unwrap_or(4096),
        spectrum_output: p.spectrum_output,
        output: p.output.expect("checked above"),
    };
    cfg.validate()?;
    Ok(cfg)
}

impl RunConfig {
    fn validate(&self) -> Result<(), ConfigError> {
        let bad = |key: &'static str, reason: String| ConfigError::InvalidValue { key, reason };
        if let Some(seq) = &self.sequence {
            SequenceFamily::parse(seq)?;
        }
        if !(0.0..=PI).contains(&self.theta_rad) {
            return Err(bad("theta_rad", format!("{} outside [0, π]", self.theta_rad)));
        }
        if self.b_field_mt <= 0.0 {
            return Err(bad("b_field_mt", format!("{} must be positive", self.b_field_mt)));
        }
        if self.tau_us <= 0.0 {
            return Err(bad("tau_us", format!("{} must be positive", self.tau_us)));
        }
        if let (Some(lo), Some(hi)) = (self.tau_min_us, self.tau_max_us) {
            if lo <= 0.0 || hi <= lo {
                return Err(bad(
                    "tau_min_us",
                    format!("need 0 < tau_min_us < tau_max_us, got [{lo}, {hi}]"),
                ));
            }
        }
        if self.tau_steps.is_some_and(|s| s < 2) {
            return Err(bad("tau_steps", "need at least 2 steps".into()));
        }
        if self.bath_file.is_some() && self.sample_bath {
            return Err(bad("sample_bath", "mutually exclusive with bath_file".into()));
        }
        if !(0.0..=1.0).contains(&self.abundance) {
            return Err(bad("abundance", format!("{} outside [0, 1]", self.abundance)));
        }
        if self.min_coupling_khz > self.max_coupling_khz {
            return Err(bad(
                "min_coupling_khz",
                format!("{} exceeds max_coupling_khz {}", self.min_coupling_khz, self.max_coupling_khz),
            ));
        }
        if let Some(sweep) = &self.sweep {
            if sweep != "flip" && sweep != "offset" {
                return Err(bad("sweep", format!("`{sweep}` is not `flip` or `offset`")));
            }
        }
        if self.rabi_max.is_some() != self.rabi_min.is_some() {
            return Err(bad("rabi_max", "rabi_max and rabi_min must be given together".into()));
        }
        if let (Some(max), Some(min)) = (self.rabi_max, self.rabi_min) {
            if max <= min {
                return Err(bad("rabi_max", format!("{max} must exceed rabi_min {min}")));
            }
        }
        if self.t1_ms <= 0.0 {
            return Err(bad("t1_ms", format!("{} must be positive", self.t1_ms)));
        }
        if self.t_markov_ms.is_some_and(|t| t <= 0.0) {
            return Err(bad("t_markov_ms", "must be positive".into()));
        }
        if self.bath_samples == 0 {
            return Err(bad("bath_samples", "must be positive".into()));
        }
        if self.larmor_period_us.is_some_and(|t| t <= 0.0) {
            return Err(bad("larmor_period_us", "must be positive".into()));
        }
        Ok(())
    }

    pub fn family(&self) -> Result<SequenceFamily, ConfigError> {
        let name = self.sequence.as_deref().ok_or(ConfigError::MissingFields {
            command: self.command.name(),
            fields: vec!["sequence"],
        })?;
        Ok(SequenceFamily::parse(name)?)
    }

    /// Assemble the bath: an explicit file, the lattice sampler, or the
    /// empty bath. Returns the bath plus any consistency warnings.
    pub fn bath(&self) -> Result<(BathSpec, Vec<String>), ConfigError> {
        let b_field_t = self.b_field_mt * 1e-3;
        let mut warnings = Vec::new();
        let mut bath = if let Some(path) = &self.bath_file {
            read_bath_file(Path::new(path))?
        } else if self.sample_bath {
            let sampled = sample_bath(&self.sampler_config(), b_field_t)?;
            if sampled.empty {
                warnings.push("sampler produced an empty bath (noiseless limit)".into());
            }
            if sampled.truncated > 0 {
                warnings.push(format!(
                    "sampler dropped {} weakest in-band nuclei at the cap",
                    sampled.truncated
                ));
            }
            sampled.spec
        } else {
            BathSpec::empty(b_field_t)?
        };
        if let Some(period_us) = self.larmor_period_us {
            bath = bath.with_larmor_hz(1.0 / (period_us * 1e-6));
        }
        if let Some(w) = bath.larmor_consistency_warning() {
            warnings.push(w);
        }
        Ok((bath, warnings))
    }

    pub fn sampler_config(&self) -> LatticeSamplerConfig {
        LatticeSamplerConfig {
            abundance: self.abundance,
            radius_nm: self.radius_nm,
            min_coupling_cutoff_hz: self.min_coupling_khz * 1e3,
            max_coupling_cutoff_hz: self.max_coupling_khz * 1e3,
            seed: self.seed,
        }
    }

    pub fn error_model(&self) -> ErrorModel {
        ErrorModel {
            epsilon: self.epsilon,
            offset_hz: self.offset_mhz * 1e6,
            rabi_hz: self.rabi_mhz * 1e6,
            finite_duration: self.finite_duration,
        }
    }

    pub fn envelope(&self) -> EnvelopeParams {
        EnvelopeParams {
            t1_s: self.t1_ms * 1e-3,
            t_markov_s: self.t_markov_ms.map_or(f64::INFINITY, |t| t * 1e-3),
        }
    }

    pub fn initial(&self) -> Result<QubitState, ConfigError> {
        Ok(QubitState::from_angles(self.theta_rad, self.phi_rad)?)
    }

    pub fn engine_config(&self) -> EngineConfig {
        EngineConfig { bath_samples: self.bath_samples, seed: self.seed }
    }

    pub fn tau_list_s(&self) -> Option<Vec<f64>> {
        let (lo, hi, steps) = (self.tau_min_us?, self.tau_max_us?, self.tau_steps?);
        Some(
            (0..steps)
                .map(|i| (lo + (hi - lo) * i as f64 / (steps - 1) as f64) * 1e-6)
                .collect(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(kv: &str) -> PartialConfig {
        toml::from_str(kv).unwrap()
    }

    #[test]
    fn empty_config_for_decay_lists_missing_fields() {
        let err = resolve(Command::Decay, PartialConfig::default()).unwrap_err();
        let text = err.to_string();
        for field in ["sequence", "n_pulses", "tau_min_us", "tau_max_us", "tau_steps", "output"] {
            assert!(text.contains(field), "missing `{field}` in: {text}");
        }
    }

    #[test]
    fn unknown_key_is_rejected_by_name() {
        let err = toml::from_str::<PartialConfig>("tau_us = 0.8\nbogus_key = 3\n").unwrap_err();
        assert!(err.to_string().contains("bogus_key"));
    }

    #[test]
    fn flags_override_file_values() {
        let file = set("epsilon = 0.05\ntau_us = 1.0\n");
        let flags = set("epsilon = 0.016\n");
        let merged = flags.over(file);
        assert_eq!(merged.epsilon, Some(0.016));
        assert_eq!(merged.tau_us, Some(1.0));
    }

    #[test]
    fn defaults_echo_reference_conditions() {
        let p = set("sequence = \"cpmg\"\nn_pulses = 20\nsweep = \"flip\"\noutput = \"o.csv\"\n");
        let cfg = resolve(Command::ErrorSweep, p).unwrap();
        assert_eq!(cfg.tau_us, 0.8);
        assert_eq!(cfg.rabi_mhz, 12.5);
        assert_eq!(cfg.b_field_mt, 6.8);
        assert_eq!(cfg.t1_ms, 4.0);
        assert_eq!(cfg.theta_rad, FRAC_PI_2);
        assert_eq!(cfg.phi_rad, FRAC_PI_2);
        assert_eq!(cfg.error_model().pi_duration_s(), 40e-9);
    }

    #[test]
    fn sweep_kind_validated() {
        let p = set(
            "sequence = \"cpmg\"\nn_pulses = 20\nsweep = \"sideways\"\noutput = \"o.csv\"\n",
        );
        let err = resolve(Command::ErrorSweep, p).unwrap_err();
        assert!(err.to_string().contains("sweep"));
    }

    #[test]
    fn bloch_scan_defaults_twenty_pulses() {
        let p = set("sequence = \"kdd\"\noutput = \"map.csv\"\n");
        let cfg = resolve(Command::BlochScan, p).unwrap();
        assert_eq!(cfg.n_pulses, Some(20));
        assert_eq!(cfg.theta_steps, 19);
        assert_eq!(cfg.phi_steps, 37);
    }

    #[test]
    fn bath_source_exclusivity() {
        let p = set(
            "sequence = \"cpmg\"\nn_pulses = 2\nbath_file = \"b.txt\"\nsample_bath = true\n\
             tau_min_us = 1.0\ntau_max_us = 2.0\ntau_steps = 4\noutput = \"o.csv\"\n",
        );
        let err = resolve(Command::Decay, p).unwrap_err();
        assert!(err.to_string().contains("sample_bath"));
    }

    #[test]
    fn run_config_round_trips_through_toml() {
        let p = set(
            "sequence = \"xy4\"\nn_pulses = 8\ntau_min_us = 0.5\ntau_max_us = 7.25\n\
             tau_steps = 31\nepsilon = 0.016\noutput = \"out.csv\"\n",
        );
        let cfg = resolve(Command::Decay, p).unwrap();
        let text = toml::to_string(&cfg).unwrap();
        let back: RunConfig = toml::from_str(&text).unwrap();
        assert_eq!(cfg, back);
    }

    #[test]
    fn larmor_override_reaches_bath() {
        let p = set(
            "sequence = \"hahn\"\nn_pulses = 1\ntau_min_us = 1.0\ntau_max_us = 300.0\n\
             tau_steps = 10\nlarmor_period_us = 73.0\noutput = \"o.csv\"\n",
        );
        let cfg = resolve(Command::Decay, p).unwrap();
        let (bath, warnings) = cfg.bath().unwrap();
        assert!((bath.tau_larmor_s() - 73e-6).abs() < 1e-9);
        assert_eq!(warnings.len(), 1);
        assert!(warnings[0].contains("overrides"));
    }

    #[test]
    fn theta_range_enforced() {
        let p = set(
            "sequence = \"cpmg\"\nn_pulses = 2\ntheta_rad = 3.5\ntau_min_us = 1.0\n\
             tau_max_us = 2.0\ntau_steps = 4\noutput = \"o.csv\"\n",
        );
        let err = resolve(Command::Decay, p).unwrap_err();
        assert!(err.to_string().contains("theta_rad"));
    }
}
