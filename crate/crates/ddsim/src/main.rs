//! Thin command-line front end: parse flags, overlay them on the config
//! file, dispatch to [`ddsim::runner`], and map failure classes to exit
//! codes (2 config, 3 engine, 4 fit, 5 i/o).

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use ddsim::config::{self, Command, PartialConfig};
use ddsim::runner;

#[derive(Parser)]
#[command(
    name = "ddsim",
    version,
    about = "Dynamical-decoupling simulator for an electron-spin qubit in a nuclear-spin bath",
    after_help = "Flags override values from --config. All keys are unit-suffixed \
                  (tau_us, offset_mhz, b_field_mt); see README.md for the schema."
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,

    /// Config file (TOML, strict schema)
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Worker thread cap (default: DDSIM_THREADS or all cores); results are
    /// independent of the value
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Output file path
    #[arg(long, global = true)]
    output: Option<String>,

    /// Sequence family: hahn, cpmg, xy4, kdd
    #[arg(long, global = true)]
    sequence: Option<String>,

    /// Number of π pulses
    #[arg(long, global = true)]
    n_pulses: Option<u32>,

    /// Pulse counts for sweep-pulses, e.g. --n-list 1,2,4,8
    #[arg(long, global = true, value_delimiter = ',')]
    n_list: Option<Vec<u32>>,

    /// Interpulse delay (μs) for fixed-τ commands
    #[arg(long, global = true)]
    tau_us: Option<f64>,

    /// Decay-scan delay grid (μs)
    #[arg(long, global = true)]
    tau_min_us: Option<f64>,
    #[arg(long, global = true)]
    tau_max_us: Option<f64>,
    #[arg(long, global = true)]
    tau_steps: Option<usize>,

    /// Static field (mT)
    #[arg(long, global = true)]
    b_field_mt: Option<f64>,

    /// Override the ¹³C Larmor period (μs) derived from the field
    #[arg(long, global = true)]
    larmor_period_us: Option<f64>,

    /// Bath file path
    #[arg(long, global = true)]
    bath_file: Option<String>,

    /// Sample the bath from the diamond lattice instead of a file
    #[arg(long, global = true)]
    sample_bath: Option<bool>,

    /// ¹³C abundance for the sampler
    #[arg(long, global = true)]
    abundance: Option<f64>,

    /// Sampler sphere radius (nm)
    #[arg(long, global = true)]
    radius_nm: Option<f64>,

    /// Keep sampled nuclei with coupling magnitude in this band (kHz)
    #[arg(long, global = true)]
    min_coupling_khz: Option<f64>,
    #[arg(long, global = true)]
    max_coupling_khz: Option<f64>,

    /// Fractional flip-angle error
    #[arg(long, global = true)]
    epsilon: Option<f64>,

    /// Drive frequency offset (MHz)
    #[arg(long, global = true)]
    offset_mhz: Option<f64>,

    /// Rabi frequency (MHz)
    #[arg(long, global = true)]
    rabi_mhz: Option<f64>,

    /// Model the finite π-pulse duration 1/(2·rabi)
    #[arg(long, global = true)]
    finite_duration: Option<bool>,

    /// Initial state polar angle (rad)
    #[arg(long, global = true)]
    theta_rad: Option<f64>,

    /// Initial state azimuth (rad)
    #[arg(long, global = true)]
    phi_rad: Option<f64>,

    /// Longitudinal relaxation time (ms)
    #[arg(long, global = true)]
    t1_ms: Option<f64>,

    /// Non-refocusable Markovian coherence decay time (ms)
    #[arg(long, global = true)]
    t_markov_ms: Option<f64>,

    /// RNG seed (sampler and bath-state sampling)
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Nuclear basis states averaged when enumeration is not forced
    #[arg(long, global = true)]
    bath_samples: Option<usize>,

    /// Bloch-scan grid sizes
    #[arg(long, global = true)]
    theta_steps: Option<usize>,
    #[arg(long, global = true)]
    phi_steps: Option<usize>,

    /// Error-sweep axis: flip | offset
    #[arg(long, global = true)]
    sweep: Option<String>,

    /// Flip-angle sweep half-range (fractional)
    #[arg(long, global = true)]
    flip_max: Option<f64>,

    /// Offset sweep half-range (MHz)
    #[arg(long, global = true)]
    offset_max_mhz: Option<f64>,

    /// Points in an error sweep
    #[arg(long, global = true)]
    sweep_steps: Option<usize>,

    /// Input CSV for fit (total_time_us,survival or time_us,counts)
    #[arg(long, global = true)]
    input: Option<String>,

    /// Pin the fit baseline (otherwise free)
    #[arg(long, global = true)]
    fix_baseline: Option<f64>,

    /// Rabi-oscillation count references for normalizing ingested counts
    #[arg(long, global = true)]
    rabi_max: Option<f64>,
    #[arg(long, global = true)]
    rabi_min: Option<f64>,

    /// Ramsey detuning (MHz)
    #[arg(long, global = true)]
    detuning_mhz: Option<f64>,

    /// ¹⁴N hyperfine splitting (MHz)
    #[arg(long, global = true)]
    hyperfine_14n_mhz: Option<f64>,

    /// Ramsey dephasing time T₂* (μs)
    #[arg(long, global = true)]
    t2star_us: Option<f64>,

    /// Ramsey trace length (μs) and sample count
    #[arg(long, global = true)]
    t_max_us: Option<f64>,
    #[arg(long, global = true)]
    t_steps: Option<usize>,

    /// Also write the fringe spectrum to this path
    #[arg(long, global = true)]
    spectrum_output: Option<String>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Survival vs total time over a τ scan
    Decay,
    /// Survival vs pulse count at fixed τ
    SweepPulses,
    /// Survival map over initial states (θ, φ)
    BlochScan,
    /// Survival vs flip-angle or offset error
    ErrorSweep,
    /// Stretched-exponential fit of a decay CSV
    Fit,
    /// Ramsey fringe with the ¹⁴N triplet, plus optional spectrum
    Ramsey,
    /// Sample a ¹³C bath from the diamond lattice
    BathSample,
    /// Dump a sequence timeline as text
    DumpSequence,
}

impl Cli {
    fn command(&self) -> Command {
        match self.command {
            Cmd::Decay => Command::Decay,
            Cmd::SweepPulses => Command::SweepPulses,
            Cmd::BlochScan => Command::BlochScan,
            Cmd::ErrorSweep => Command::ErrorSweep,
            Cmd::Fit => Command::Fit,
            Cmd::Ramsey => Command::Ramsey,
            Cmd::BathSample => Command::BathSample,
            Cmd::DumpSequence => Command::DumpSequence,
        }
    }

    fn overrides(&self) -> PartialConfig {
        PartialConfig {
            sequence: self.sequence.clone(),
            n_pulses: self.n_pulses,
            n_list: self.n_list.clone(),
            tau_us: self.tau_us,
            tau_min_us: self.tau_min_us,
            tau_max_us: self.tau_max_us,
            tau_steps: self.tau_steps,
            b_field_mt: self.b_field_mt,
            larmor_period_us: self.larmor_period_us,
            bath_file: self.bath_file.clone(),
            sample_bath: self.sample_bath,
            abundance: self.abundance,
            radius_nm: self.radius_nm,
            min_coupling_khz: self.min_coupling_khz,
            max_coupling_khz: self.max_coupling_khz,
            epsilon: self.epsilon,
            offset_mhz: self.offset_mhz,
            rabi_mhz: self.rabi_mhz,
            finite_duration: self.finite_duration,
            theta_rad: self.theta_rad,
            phi_rad: self.phi_rad,
            t1_ms: self.t1_ms,
            t_markov_ms: self.t_markov_ms,
            seed: self.seed,
            bath_samples: self.bath_samples,
            theta_steps: self.theta_steps,
            phi_steps: self.phi_steps,
            sweep: self.sweep.clone(),
            flip_max: self.flip_max,
            offset_max_mhz: self.offset_max_mhz,
            sweep_steps: self.sweep_steps,
            input: self.input.clone(),
            fix_baseline: self.fix_baseline,
            rabi_max: self.rabi_max,
            rabi_min: self.rabi_min,
            detuning_mhz: self.detuning_mhz,
            hyperfine_14n_mhz: self.hyperfine_14n_mhz,
            t2star_us: self.t2star_us,
            t_max_us: self.t_max_us,
            t_steps: self.t_steps,
            spectrum_output: self.spectrum_output.clone(),
            output: self.output.clone(),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();

    let threads = cli.threads.or_else(|| {
        std::env::var("DDSIM_THREADS").ok().and_then(|v| v.parse().ok())
    });
    if let Some(n) = threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("ddsim: warning: thread pool setup failed: {e}");
        }
    }

    let file_config = match &cli.config {
        Some(path) => match config::load_config_file(path) {
            Ok(c) => c,
            Err(e) => {
                eprintln!("ddsim: {e}");
                return ExitCode::from(runner::EXIT_CONFIG as u8);
            }
        },
        None => PartialConfig::default(),
    };

    let merged = cli.overrides().over(file_config);
    let cfg = match config::resolve(cli.command(), merged) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("ddsim: {e}");
            return ExitCode::from(runner::EXIT_CONFIG as u8);
        }
    };

    match runner::run(&cfg) {
        Ok(result) => {
            for w in &result.warnings {
                eprintln!("ddsim: warning: {w}");
            }
            for path in &result.files {
                println!("wrote {}", path.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("ddsim: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
