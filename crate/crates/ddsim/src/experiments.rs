//! Experiment drivers: the sweeps that reproduce each figure-type of a DD
//! study — decay curves over the interpulse delay, survival versus pulse
//! count at fixed spacing, survival maps over the Bloch sphere, flip-angle
//! and offset robustness sweeps, and Ramsey fringes with the ¹⁴N hyperfine
//! triplet.
//!
//! Sweep points are independent and evaluated in parallel; results are
//! collected in index order, so outputs are identical regardless of the
//! worker count.

use rayon::prelude::*;
use rustfft::{num_complex::Complex, FftPlanner};
use thiserror::Error;

use crate::bath::BathSpec;
use crate::engines::{survival_for, EngineConfig, EngineError, EnvelopeParams};
use crate::quantum::QubitState;
use crate::sequence::{ErrorModel, SequenceError, SequenceFamily};

/// Default ¹⁴N hyperfine splitting (Hz); a literature constant, configurable
/// everywhere it is used.
pub const N14_HYPERFINE_HZ: f64 = 2.16e6;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("tau list must be positive and strictly ascending (index {index})")]
    InvalidTauList { index: usize },
    #[error("time list must be non-negative and strictly ascending (index {index})")]
    InvalidTimeList { index: usize },
    #[error("no admissible pulse counts for {family} in the requested list")]
    NoAdmissibleCounts { family: &'static str },
    #[error("grid needs at least 2 points per axis, got {theta_steps}×{phi_steps}")]
    GridTooSmall { theta_steps: usize, phi_steps: usize },
    #[error("sweep range must be positive, got {max}")]
    InvalidSweepRange { max: f64 },
    #[error("sweep needs at least 3 points, got {steps}")]
    TooFewSweepPoints { steps: usize },
    #[error("every sweep point failed; first error: {first}")]
    AllPointsFailed { first: String },
    #[error("spectrum requires a uniform time grid (spacing varies at index {index})")]
    NonUniformTimeGrid { index: usize },
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Sequence(#[from] SequenceError),
}

/// Descriptive metadata carried by every driver output.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveMeta {
    pub sequence: String,
    pub seed: u64,
    pub bath_descriptor: String,
    /// Sweep points whose engine call failed: (x value, error text).
    pub skipped: Vec<(f64, String)>,
}

fn describe_bath(bath: &BathSpec) -> String {
    if bath.is_empty() {
        format!("empty bath, B = {} mT", bath.b_field_t() * 1e3)
    } else {
        format!(
            "K = {}, B = {} mT, larmor = {:.3} kHz",
            bath.k(),
            bath.b_field_t() * 1e3,
            bath.larmor_hz() / 1e3
        )
    }
}

/// One survival sample of a decay or sweep curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayPoint {
    pub time_s: f64,
    pub survival: f64,
    pub n_pulses: u32,
}

/// (time, survival) series with provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct DecayCurve {
    pub points: Vec<DecayPoint>,
    pub meta: CurveMeta,
}

impl DecayCurve {
    /// Bare (t, p) pairs for the analysis layer.
    pub fn series(&self) -> Vec<(f64, f64)> {
        self.points.iter().map(|p| (p.time_s, p.survival)).collect()
    }
}

fn check_ascending_positive(list: &[f64]) -> Result<(), ExperimentError> {
    for (i, w) in list.windows(2).enumerate() {
        if w[1] <= w[0] {
            return Err(ExperimentError::InvalidTauList { index: i + 1 });
        }
    }
    if list.first().is_some_and(|&t| t <= 0.0) {
        return Err(ExperimentError::InvalidTauList { index: 0 });
    }
    Ok(())
}

/// Survival versus total evolution time: one point per interpulse delay in
/// `tau_list`, total time n·τ. Engine failures flag the point in the
/// metadata instead of aborting the curve.
#[allow(clippy::too_many_arguments)]
pub fn decay_curve(
    family: SequenceFamily,
    n_pulses: u32,
    tau_list: &[f64],
    bath: &BathSpec,
    err: &ErrorModel,
    initial: &QubitState,
    env: &EnvelopeParams,
    engine: &EngineConfig,
) -> Result<DecayCurve, ExperimentError> {
    check_ascending_positive(tau_list)?;
    let results: Vec<(f64, Result<f64, EngineError>)> = tau_list
        .par_iter()
        .map(|&tau| {
            let r = family
                .generate(n_pulses, tau)
                .map_err(EngineError::from)
                .and_then(|seq| survival_for(&seq, bath, err, initial, env, engine));
            (tau, r)
        })
        .collect();

    let mut points = Vec::with_capacity(results.len());
    let mut skipped = Vec::new();
    for (tau, r) in results {
        match r {
            Ok(s) => points.push(DecayPoint {
                time_s: tau * n_pulses as f64,
                survival: s,
                n_pulses,
            }),
            Err(e) => skipped.push((tau, e.to_string())),
        }
    }
    if points.is_empty() {
        return Err(ExperimentError::AllPointsFailed {
            first: skipped.first().map(|(_, e)| e.clone()).unwrap_or_default(),
        });
    }
    Ok(DecayCurve {
        points,
        meta: CurveMeta {
            sequence: format!("{}-{}", family.name(), n_pulses),
            seed: engine.seed,
            bath_descriptor: describe_bath(bath),
            skipped,
        },
    })
}

/// Survival versus pulse count at fixed interpulse delay (0.8 μs in the
/// reference conditions). Counts not admissible for the family are filtered
/// out; total time is n·τ per point.
#[allow(clippy::too_many_arguments)]
pub fn pulse_count_sweep(
    family: SequenceFamily,
    n_list: &[u32],
    tau_s: f64,
    bath: &BathSpec,
    err: &ErrorModel,
    initial: &QubitState,
    env: &EnvelopeParams,
    engine: &EngineConfig,
) -> Result<DecayCurve, ExperimentError> {
    let admissible: Vec<u32> = n_list.iter().copied().filter(|&n| family.admits(n)).collect();
    if admissible.is_empty() {
        return Err(ExperimentError::NoAdmissibleCounts { family: family.name() });
    }
    let results: Vec<(u32, Result<f64, EngineError>)> = admissible
        .par_iter()
        .map(|&n| {
            let r = family
                .generate(n, tau_s)
                .map_err(EngineError::from)
                .and_then(|seq| survival_for(&seq, bath, err, initial, env, engine));
            (n, r)
        })
        .collect();
    let mut points = Vec::new();
    let mut skipped = Vec::new();
    for (n, r) in results {
        match r {
            Ok(s) => points.push(DecayPoint {
                time_s: tau_s * n as f64,
                survival: s,
                n_pulses: n,
            }),
            Err(e) => skipped.push((n as f64, e.to_string())),
        }
    }
    Ok(DecayCurve {
        points,
        meta: CurveMeta {
            sequence: family.name().to_string(),
            seed: engine.seed,
            bath_descriptor: describe_bath(bath),
            skipped,
        },
    })
}

/// Survival probability over a grid of initial states.
#[derive(Debug, Clone, PartialEq)]
pub struct SurvivalMap {
    /// Polar angles, linspace over [0, π] inclusive.
    pub theta_grid: Vec<f64>,
    /// Azimuths, linspace over [0, 2π] inclusive of both endpoints (the 2π
    /// column duplicates 0, keeping symmetric grids like 10° steps exact).
    pub phi_grid: Vec<f64>,
    /// Row-major over (theta, phi).
    pub values: Vec<f64>,
    pub meta: CurveMeta,
}

impl SurvivalMap {
    pub fn at(&self, theta_idx: usize, phi_idx: usize) -> f64 {
        self.values[theta_idx * self.phi_grid.len() + phi_idx]
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    /// All grid indices within `tol` of the maximum — degenerate maxima
    /// (e.g. the flat errorless map) are reported in full rather than as a
    /// spurious unique argmax.
    pub fn max_points(&self, tol: f64) -> Vec<(usize, usize)> {
        let max = self.max_value();
        let cols = self.phi_grid.len();
        self.values
            .iter()
            .enumerate()
            .filter(|(_, &v)| v >= max - tol)
            .map(|(idx, _)| (idx / cols, idx % cols))
            .collect()
    }
}

fn linspace(lo: f64, hi: f64, steps: usize) -> Vec<f64> {
    (0..steps).map(|i| lo + (hi - lo) * i as f64 / (steps - 1) as f64).collect()
}

/// Survival map over initial states |ψ(θ, φ)⟩ after a DD block.
#[allow(clippy::too_many_arguments)]
pub fn bloch_scan(
    family: SequenceFamily,
    n_pulses: u32,
    tau_s: f64,
    bath: &BathSpec,
    err: &ErrorModel,
    theta_steps: usize,
    phi_steps: usize,
    env: &EnvelopeParams,
    engine: &EngineConfig,
) -> Result<SurvivalMap, ExperimentError> {
    if theta_steps < 2 || phi_steps < 2 {
        return Err(ExperimentError::GridTooSmall { theta_steps, phi_steps });
    }
    let seq = family.generate(n_pulses, tau_s)?;
    let theta_grid = linspace(0.0, std::f64::consts::PI, theta_steps);
    let phi_grid = linspace(0.0, std::f64::consts::TAU, phi_steps);
    let values: Vec<f64> = (0..theta_steps * phi_steps)
        .into_par_iter()
        .map(|idx| {
            let theta = theta_grid[idx / phi_steps];
            let phi = phi_grid[idx % phi_steps];
            let initial = QubitState::from_angles(theta, phi.rem_euclid(std::f64::consts::TAU))
                .expect("grid angles are in range");
            survival_for(&seq, bath, err, &initial, env, engine)
        })
        .collect::<Result<_, _>>()?;
    Ok(SurvivalMap {
        theta_grid,
        phi_grid,
        values,
        meta: CurveMeta {
            sequence: format!("{}-{}", family.name(), n_pulses),
            seed: engine.seed,
            bath_descriptor: describe_bath(bath),
            skipped: Vec::new(),
        },
    })
}

/// Which pulse imperfection an [`error_sweep`] varies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SweepKind {
    /// Fractional flip-angle error swept over [−max, max].
    FlipAngle { max_epsilon: f64 },
    /// Frequency offset (Hz) swept over [−max, max].
    Offset { max_offset_hz: f64 },
}

/// Survival versus one error magnitude, symmetric about zero.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorSweepCurve {
    /// (error value, survival); flip-angle values are dimensionless, offsets
    /// are in Hz.
    pub points: Vec<(f64, f64)>,
    pub n_pulses: u32,
    pub meta: CurveMeta,
}

/// Sweep one imperfection while the rest of the error model stays at its
/// base value.
#[allow(clippy::too_many_arguments)]
pub fn error_sweep(
    family: SequenceFamily,
    n_pulses: u32,
    tau_s: f64,
    sweep: SweepKind,
    steps: usize,
    base_err: &ErrorModel,
    initial: &QubitState,
    bath: &BathSpec,
    env: &EnvelopeParams,
    engine: &EngineConfig,
) -> Result<ErrorSweepCurve, ExperimentError> {
    if steps < 3 {
        return Err(ExperimentError::TooFewSweepPoints { steps });
    }
    let max = match sweep {
        SweepKind::FlipAngle { max_epsilon } => max_epsilon,
        SweepKind::Offset { max_offset_hz } => max_offset_hz,
    };
    if max <= 0.0 || !max.is_finite() {
        return Err(ExperimentError::InvalidSweepRange { max });
    }
    let seq = family.generate(n_pulses, tau_s)?;
    let xs = linspace(-max, max, steps);
    let values: Vec<f64> = xs
        .par_iter()
        .map(|&x| {
            let err = match sweep {
                SweepKind::FlipAngle { .. } => ErrorModel { epsilon: x, ..*base_err },
                SweepKind::Offset { .. } => ErrorModel { offset_hz: x, ..*base_err },
            };
            survival_for(&seq, bath, &err, initial, env, engine)
        })
        .collect::<Result<_, _>>()?;
    Ok(ErrorSweepCurve {
        points: xs.into_iter().zip(values).collect(),
        n_pulses,
        meta: CurveMeta {
            sequence: format!("{}-{}", family.name(), n_pulses),
            seed: engine.seed,
            bath_descriptor: describe_bath(bath),
            skipped: Vec::new(),
        },
    })
}

// ---------------------------------------------------------------------------
// Ramsey fringe and spectrum
// ---------------------------------------------------------------------------

/// Ramsey fringe with the nitrogen hyperfine triplet: the three ¹⁴N
/// projections detune the fringe by m·a for m ∈ {−1, 0, +1}, each with
/// weight 1/3, under a Gaussian T₂* envelope:
/// p(t) = (1 + fringe)/2, fringe = ⅓ Σ_m cos(2π(δ + m·a)t)·exp(−(t/T₂*)²).
pub fn ramsey(
    detuning_hz: f64,
    hyperfine_14n_hz: f64,
    t2star_s: f64,
    t_list: &[f64],
) -> Result<DecayCurve, ExperimentError> {
    for (i, w) in t_list.windows(2).enumerate() {
        if w[1] <= w[0] {
            return Err(ExperimentError::InvalidTimeList { index: i + 1 });
        }
    }
    if t_list.first().is_some_and(|&t| t < 0.0) {
        return Err(ExperimentError::InvalidTimeList { index: 0 });
    }
    let points = t_list
        .iter()
        .map(|&t| {
            let envelope = (-(t / t2star_s).powi(2)).exp();
            let fringe: f64 = [-1.0f64, 0.0, 1.0]
                .iter()
                .map(|m| {
                    (std::f64::consts::TAU * (detuning_hz + m * hyperfine_14n_hz) * t).cos()
                })
                .sum::<f64>()
                / 3.0
                * envelope;
            DecayPoint { time_s: t, survival: 0.5 * (1.0 + fringe), n_pulses: 0 }
        })
        .collect();
    Ok(DecayCurve {
        points,
        meta: CurveMeta {
            sequence: "ramsey".into(),
            seed: 0,
            bath_descriptor: format!(
                "detuning = {:.3} MHz, a(14N) = {:.3} MHz, T2* = {:.3} us",
                detuning_hz / 1e6,
                hyperfine_14n_hz / 1e6,
                t2star_s * 1e6
            ),
            skipped: Vec::new(),
        },
    })
}

/// Magnitude spectrum of a fringe curve: mean-removed discrete Fourier
/// transform, returned for the non-negative frequencies k/(N·dt).
pub fn ramsey_spectrum(curve: &DecayCurve) -> Result<Vec<(f64, f64)>, ExperimentError> {
    let ts: Vec<f64> = curve.points.iter().map(|p| p.time_s).collect();
    if ts.len() < 4 {
        return Err(ExperimentError::InvalidTimeList { index: 0 });
    }
    let dt = ts[1] - ts[0];
    for (i, w) in ts.windows(2).enumerate() {
        if ((w[1] - w[0]) - dt).abs() > 1e-9 * dt {
            return Err(ExperimentError::NonUniformTimeGrid { index: i + 1 });
        }
    }
    let n = ts.len();
    let mean = curve.points.iter().map(|p| p.survival).sum::<f64>() / n as f64;
    let mut buf: Vec<Complex<f64>> = curve
        .points
        .iter()
        .map(|p| Complex::new(p.survival - mean, 0.0))
        .collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let nyquist = n / 2;
    Ok((0..=nyquist)
        .map(|k| (k as f64 / (n as f64 * dt), buf[k].norm()))
        .collect())
}

/// Frequencies of local spectral maxima above `threshold_frac` of the global
/// maximum.
pub fn spectrum_peaks(spectrum: &[(f64, f64)], threshold_frac: f64) -> Vec<f64> {
    let max = spectrum.iter().map(|&(_, m)| m).fold(f64::NEG_INFINITY, f64::max);
    let floor = threshold_frac * max;
    let mut peaks = Vec::new();
    for i in 1..spectrum.len().saturating_sub(1) {
        let (f, m) = spectrum[i];
        if m >= floor && m >= spectrum[i - 1].1 && m >= spectrum[i + 1].1 {
            peaks.push(f);
        }
    }
    peaks
}
