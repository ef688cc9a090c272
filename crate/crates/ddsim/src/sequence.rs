//! Pulse-sequence intermediate representation.
//!
//! A [`SequenceSpec`] is a timeline of free delays and nominal π pulses. The
//! named generators share one timing convention — symmetric edges
//! τ/2, τ, …, τ, τ/2 — and differ only in their phase lists:
//!
//! - CPMG: every pulse about y (phase π/2); n = 1 is the Hahn echo.
//! - XY-4: phases cycle x, y, x, y; n must be a multiple of 4.
//! - KDD: 5-pulse Knill blocks (π/6, 0, π/2, 0, π/6) + φ with the block
//!   phase φ alternating 0, π/2; n must be a multiple of 10.
//!
//! [`apply_errors`] turns a nominal sequence plus an [`ErrorModel`] into the
//! concrete evolution segments the engines consume.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_6, PI};
use std::fmt::Write as _;

use thiserror::Error;

use crate::constants::hz_to_rad;

#[derive(Debug, Error)]
pub enum SequenceError {
    #[error("{family} requires a pulse count that is a multiple of {multiple}, got {got}")]
    PulseCountNotMultiple { family: &'static str, multiple: u32, got: u32 },
    #[error("pulse count must be at least {min}, got {got}")]
    PulseCountTooSmall { min: u32, got: u32 },
    #[error("interpulse delay must be positive, got {tau_s} s")]
    NonPositiveTau { tau_s: f64 },
    #[error(
        "schedule infeasible: pulse {pulse_index} needs {needed_s:.3e} s of the adjacent \
         delay but only {available_s:.3e} s is available"
    )]
    InfeasibleSchedule { pulse_index: usize, needed_s: f64, available_s: f64 },
    #[error("error model invalid: {reason}")]
    InvalidErrorModel { reason: String },
    #[error("unknown sequence family `{0}`")]
    UnknownFamily(String),
}

/// Whether a pulse occupies schedule time.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PulseKind {
    Instantaneous,
    Finite,
}

/// One nominal pulse: rotation by `nominal_angle` about the equatorial axis
/// at azimuth `phase`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseEvent {
    pub nominal_angle: f64,
    pub phase: f64,
    pub kind: PulseKind,
}

impl PulseEvent {
    pub fn pi(phase: f64) -> Self {
        Self { nominal_angle: PI, phase, kind: PulseKind::Instantaneous }
    }
}

/// Ordered timeline: (delay, pulse) pairs plus a trailing delay.
#[derive(Debug, Clone, PartialEq)]
pub struct SequenceSpec {
    pub name: String,
    pub events: Vec<(f64, PulseEvent)>,
    pub trailing_delay: f64,
}

impl SequenceSpec {
    pub fn n_pulses(&self) -> usize {
        self.events.len()
    }

    /// Sum of all delays; pulses carry no duration in the nominal timeline.
    pub fn total_time(&self) -> f64 {
        self.events.iter().map(|(d, _)| d).sum::<f64>() + self.trailing_delay
    }

    /// Times of the pulse centers measured from sequence start.
    pub fn pulse_centers(&self) -> Vec<f64> {
        let mut t = 0.0;
        let mut centers = Vec::with_capacity(self.events.len());
        for (delay, _) in &self.events {
            t += delay;
            centers.push(t);
        }
        centers
    }

    /// Text dump, one segment per line: `delay <seconds>` or
    /// `pulse <angle_rad> <phase_rad>`.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (delay, pulse) in &self.events {
            let _ = writeln!(out, "delay {delay}");
            let _ = writeln!(out, "pulse {} {}", pulse.nominal_angle, pulse.phase);
        }
        let _ = writeln!(out, "delay {}", self.trailing_delay);
        out
    }
}

fn check_timing(n: u32, tau_s: f64) -> Result<(), SequenceError> {
    if n < 1 {
        return Err(SequenceError::PulseCountTooSmall { min: 1, got: n });
    }
    if tau_s <= 0.0 || !tau_s.is_finite() {
        return Err(SequenceError::NonPositiveTau { tau_s });
    }
    Ok(())
}

fn from_phases(name: String, phases: &[f64], tau_s: f64) -> SequenceSpec {
    let events = phases
        .iter()
        .enumerate()
        .map(|(k, &phase)| {
            let delay = if k == 0 { 0.5 * tau_s } else { tau_s };
            (delay, PulseEvent::pi(phase))
        })
        .collect();
    SequenceSpec { name, events, trailing_delay: 0.5 * tau_s }
}

/// CPMG-n: equidistant π pulses about y. n = 1 reproduces the Hahn echo
/// timing τ/2 – π – τ/2.
pub fn make_cpmg(n: u32, tau_s: f64) -> Result<SequenceSpec, SequenceError> {
    check_timing(n, tau_s)?;
    let phases = vec![FRAC_PI_2; n as usize];
    Ok(from_phases(format!("cpmg-{n}"), &phases, tau_s))
}

/// Hahn echo: CPMG with a single pulse.
pub fn make_hahn(tau_s: f64) -> Result<SequenceSpec, SequenceError> {
    let mut seq = make_cpmg(1, tau_s)?;
    seq.name = "hahn".into();
    Ok(seq)
}

/// XY-4: CPMG timing with phases cycling x, y, x, y.
pub fn make_xy4(n: u32, tau_s: f64) -> Result<SequenceSpec, SequenceError> {
    check_timing(n, tau_s)?;
    if n % 4 != 0 {
        return Err(SequenceError::PulseCountNotMultiple { family: "xy4", multiple: 4, got: n });
    }
    let cycle = [0.0, FRAC_PI_2, 0.0, FRAC_PI_2];
    let phases: Vec<f64> = (0..n as usize).map(|k| cycle[k % 4]).collect();
    Ok(from_phases(format!("xy4-{n}"), &phases, tau_s))
}

/// KDD: composite 5-pulse Knill blocks on the CPMG timing grid. Blocks
/// alternate the overall phase between 0 and π/2; n must be a multiple of 10.
pub fn make_kdd(n: u32, tau_s: f64) -> Result<SequenceSpec, SequenceError> {
    check_timing(n, tau_s)?;
    if n % 10 != 0 {
        return Err(SequenceError::PulseCountNotMultiple { family: "kdd", multiple: 10, got: n });
    }
    let knill = [FRAC_PI_6, 0.0, FRAC_PI_2, 0.0, FRAC_PI_6];
    let phases: Vec<f64> = (0..n as usize)
        .map(|k| {
            let block = k / 5;
            let block_phase = if block % 2 == 0 { 0.0 } else { FRAC_PI_2 };
            knill[k % 5] + block_phase
        })
        .collect();
    Ok(from_phases(format!("kdd-{n}"), &phases, tau_s))
}

/// Named family, the unit the experiment drivers and CLI select by.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SequenceFamily {
    Hahn,
    Cpmg,
    Xy4,
    Kdd,
}

impl SequenceFamily {
    pub fn parse(s: &str) -> Result<Self, SequenceError> {
        match s.to_ascii_lowercase().as_str() {
            "hahn" => Ok(Self::Hahn),
            "cpmg" => Ok(Self::Cpmg),
            "xy4" | "xy-4" => Ok(Self::Xy4),
            "kdd" => Ok(Self::Kdd),
            other => Err(SequenceError::UnknownFamily(other.to_string())),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Hahn => "hahn",
            Self::Cpmg => "cpmg",
            Self::Xy4 => "xy4",
            Self::Kdd => "kdd",
        }
    }

    pub fn admits(&self, n: u32) -> bool {
        match self {
            Self::Hahn => n == 1,
            Self::Cpmg => n >= 1,
            Self::Xy4 => n >= 4 && n % 4 == 0,
            Self::Kdd => n >= 10 && n % 10 == 0,
        }
    }

    pub fn generate(&self, n: u32, tau_s: f64) -> Result<SequenceSpec, SequenceError> {
        match self {
            Self::Hahn => {
                if n != 1 {
                    return Err(SequenceError::PulseCountNotMultiple {
                        family: "hahn",
                        multiple: 1,
                        got: n,
                    });
                }
                make_hahn(tau_s)
            }
            Self::Cpmg => make_cpmg(n, tau_s),
            Self::Xy4 => make_xy4(n, tau_s),
            Self::Kdd => make_kdd(n, tau_s),
        }
    }
}

/// Pulse imperfection model.
///
/// `epsilon` is the fractional flip-angle error (α → α(1+ε)), `offset_hz`
/// the drive detuning, `rabi_hz` the nominal Rabi frequency. With
/// `finite_duration` each π pulse occupies 1/(2·rabi_hz) of schedule time
/// (40 ns at the default 12.5 MHz) carved symmetrically out of the adjacent
/// delays so pulse centers stay on the ideal grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorModel {
    pub epsilon: f64,
    pub offset_hz: f64,
    pub rabi_hz: f64,
    pub finite_duration: bool,
}

impl Default for ErrorModel {
    fn default() -> Self {
        Self { epsilon: 0.0, offset_hz: 0.0, rabi_hz: 12.5e6, finite_duration: false }
    }
}

impl ErrorModel {
    pub fn ideal() -> Self {
        Self::default()
    }

    pub fn validate(&self) -> Result<(), SequenceError> {
        if self.rabi_hz <= 0.0 || !self.rabi_hz.is_finite() {
            return Err(SequenceError::InvalidErrorModel {
                reason: format!("rabi_hz must be positive, got {}", self.rabi_hz),
            });
        }
        if self.epsilon.abs() >= 1.0 || !self.epsilon.is_finite() {
            return Err(SequenceError::InvalidErrorModel {
                reason: format!("|epsilon| must be < 1, got {}", self.epsilon),
            });
        }
        if !self.offset_hz.is_finite() {
            return Err(SequenceError::InvalidErrorModel {
                reason: "offset_hz must be finite".into(),
            });
        }
        Ok(())
    }

    pub fn is_ideal(&self) -> bool {
        self.epsilon == 0.0 && self.offset_hz == 0.0 && !self.finite_duration
    }

    /// Schedule duration of a nominal π pulse, seconds.
    pub fn pi_duration_s(&self) -> f64 {
        1.0 / (2.0 * self.rabi_hz)
    }
}

/// One concrete evolution segment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Segment {
    /// Free evolution under the offset and bath Hamiltonian.
    Free { duration_s: f64 },
    /// Drive pulse: actual rotation angle (flip-angle error applied), axis
    /// azimuth, and schedule duration (0 when instantaneous).
    Pulse { angle: f64, phase: f64, duration_s: f64 },
}

/// Sequence with an error model applied: the exact list of evolution
/// segments plus the drive parameters shared by every pulse.
#[derive(Debug, Clone, PartialEq)]
pub struct ConcreteSequence {
    pub segments: Vec<Segment>,
    /// Offset Δ in rad/s; acts during pulses and free evolution alike.
    pub offset_rad_s: f64,
    /// Actual drive amplitude Ω(1+ε) in rad/s.
    pub rabi_rad_s: f64,
    pub name: String,
}

impl ConcreteSequence {
    /// Total schedule time (free segments plus finite pulse durations).
    pub fn total_time(&self) -> f64 {
        self.segments
            .iter()
            .map(|s| match s {
                Segment::Free { duration_s } => *duration_s,
                Segment::Pulse { duration_s, .. } => *duration_s,
            })
            .sum()
    }

    pub fn n_pulses(&self) -> usize {
        self.segments.iter().filter(|s| matches!(s, Segment::Pulse { .. })).count()
    }

    /// True when every pulse is an exact instantaneous π rotation and both
    /// error channels vanish — the domain of the analytic engine.
    pub fn is_ideal_pi_train(&self) -> bool {
        self.offset_rad_s == 0.0
            && self.segments.iter().all(|s| match s {
                Segment::Free { .. } => true,
                Segment::Pulse { angle, duration_s, .. } => {
                    (*angle - PI).abs() < 1e-12 && *duration_s == 0.0
                }
            })
    }
}

/// Scale every nominal angle by (1+ε), attach the offset to all segments,
/// and, for finite-duration pulses, carve the pulse time out of the adjacent
/// delays so pulse centers stay on the ideal grid.
pub fn apply_errors(seq: &SequenceSpec, err: &ErrorModel) -> Result<ConcreteSequence, SequenceError> {
    err.validate()?;
    let n = seq.n_pulses();
    let mut delays: Vec<f64> = seq.events.iter().map(|(d, _)| *d).collect();
    delays.push(seq.trailing_delay);

    let omega_nominal = hz_to_rad(err.rabi_hz);
    let durations: Vec<f64> = seq
        .events
        .iter()
        .map(|(_, p)| if err.finite_duration { p.nominal_angle / omega_nominal } else { 0.0 })
        .collect();

    if err.finite_duration {
        for (k, &t_p) in durations.iter().enumerate() {
            // half the pulse length comes out of each neighboring delay
            let needed_before = 0.5 * t_p;
            let needed_after = 0.5 * t_p;
            delays[k] -= needed_before;
            delays[k + 1] -= needed_after;
            if delays[k] < 0.0 || delays[k + 1] < 0.0 {
                return Err(SequenceError::InfeasibleSchedule {
                    pulse_index: k,
                    needed_s: t_p,
                    available_s: delays[k].min(delays[k + 1]) + t_p,
                });
            }
        }
    }

    let mut segments = Vec::with_capacity(2 * n + 1);
    for (k, (_, pulse)) in seq.events.iter().enumerate() {
        segments.push(Segment::Free { duration_s: delays[k] });
        segments.push(Segment::Pulse {
            angle: pulse.nominal_angle * (1.0 + err.epsilon),
            phase: pulse.phase,
            duration_s: durations[k],
        });
    }
    segments.push(Segment::Free { duration_s: delays[n] });

    Ok(ConcreteSequence {
        segments,
        offset_rad_s: hz_to_rad(err.offset_hz),
        rabi_rad_s: omega_nominal * (1.0 + err.epsilon),
        name: seq.name.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    const TAU_S: f64 = 0.8e-6;

    #[test]
    fn cpmg_one_is_hahn_timing() {
        let seq = make_cpmg(1, TAU_S).unwrap();
        assert_eq!(seq.n_pulses(), 1);
        assert_abs_diff_eq!(seq.events[0].0, TAU_S / 2.0, epsilon = 1e-18);
        assert_abs_diff_eq!(seq.trailing_delay, TAU_S / 2.0, epsilon = 1e-18);
        assert_abs_diff_eq!(seq.events[0].1.phase, FRAC_PI_2, epsilon = 1e-15);
        assert_abs_diff_eq!(seq.events[0].1.nominal_angle, PI, epsilon = 1e-15);
    }

    #[test]
    fn cpmg_total_time_is_n_tau() {
        let seq = make_cpmg(2, TAU_S).unwrap();
        assert_abs_diff_eq!(seq.total_time(), 2.0 * TAU_S, epsilon = 1e-18);
    }

    #[test]
    fn cpmg_128_structure() {
        let seq = make_cpmg(128, TAU_S).unwrap();
        assert_eq!(seq.n_pulses(), 128);
        let interior: Vec<f64> = seq.events[1..].iter().map(|(d, _)| *d).collect();
        assert_eq!(interior.len(), 127);
        for d in interior {
            assert_abs_diff_eq!(d, TAU_S, epsilon = 1e-18);
        }
    }

    #[test]
    fn xy4_phase_cycle() {
        let seq = make_xy4(4, TAU_S).unwrap();
        let phases: Vec<f64> = seq.events.iter().map(|(_, p)| p.phase).collect();
        assert_eq!(phases, vec![0.0, FRAC_PI_2, 0.0, FRAC_PI_2]);
        let eight = make_xy4(8, TAU_S).unwrap();
        let phases8: Vec<f64> = eight.events.iter().map(|(_, p)| p.phase).collect();
        assert_eq!(&phases8[..4], &phases8[4..]);
    }

    #[test]
    fn xy4_rejects_bad_count() {
        assert!(matches!(
            make_xy4(6, TAU_S),
            Err(SequenceError::PulseCountNotMultiple { multiple: 4, .. })
        ));
    }

    #[test]
    fn kdd_phase_table() {
        let seq = make_kdd(10, TAU_S).unwrap();
        let phases: Vec<f64> = seq.events.iter().map(|(_, p)| p.phase).collect();
        let expect = [
            FRAC_PI_6,
            0.0,
            FRAC_PI_2,
            0.0,
            FRAC_PI_6,
            FRAC_PI_6 + FRAC_PI_2, // 2π/3
            FRAC_PI_2,
            PI,
            FRAC_PI_2,
            FRAC_PI_6 + FRAC_PI_2,
        ];
        for (got, want) in phases.iter().zip(expect.iter()) {
            assert_abs_diff_eq!(got, want, epsilon = 1e-15);
        }
        // 2π/3 check explicitly
        assert_abs_diff_eq!(phases[5], 2.0 * PI / 3.0, epsilon = 1e-15);
    }

    #[test]
    fn kdd_twenty_is_two_ten_units() {
        let ten = make_kdd(10, TAU_S).unwrap();
        let twenty = make_kdd(20, TAU_S).unwrap();
        assert_eq!(twenty.n_pulses(), 20);
        let p10: Vec<f64> = ten.events.iter().map(|(_, p)| p.phase).collect();
        let p20: Vec<f64> = twenty.events.iter().map(|(_, p)| p.phase).collect();
        assert_eq!(&p20[..10], &p10[..]);
        assert_eq!(&p20[10..], &p10[..]);
    }

    #[test]
    fn kdd_rejects_bad_count() {
        assert!(matches!(
            make_kdd(15, TAU_S),
            Err(SequenceError::PulseCountNotMultiple { multiple: 10, .. })
        ));
    }

    #[test]
    fn families_share_timing() {
        for n in [20u32, 40] {
            let cpmg = make_cpmg(n, TAU_S).unwrap();
            let xy4 = make_xy4(n, TAU_S).unwrap();
            let kdd = make_kdd(n, TAU_S).unwrap();
            for other in [&xy4, &kdd] {
                for (a, b) in cpmg.events.iter().zip(other.events.iter()) {
                    assert_abs_diff_eq!(a.0, b.0, epsilon = 1e-18);
                }
                assert_abs_diff_eq!(cpmg.trailing_delay, other.trailing_delay, epsilon = 1e-18);
            }
        }
    }

    #[test]
    fn pulse_centers_equidistant() {
        for seq in [
            make_cpmg(7, TAU_S).unwrap(),
            make_xy4(12, TAU_S).unwrap(),
            make_kdd(30, TAU_S).unwrap(),
        ] {
            let centers = seq.pulse_centers();
            for w in centers.windows(2) {
                assert_abs_diff_eq!(w[1] - w[0], TAU_S, epsilon = 1e-15);
            }
            assert_abs_diff_eq!(centers[0], TAU_S / 2.0, epsilon = 1e-15);
            assert_abs_diff_eq!(seq.total_time(), TAU_S * seq.n_pulses() as f64, epsilon = 1e-12);
        }
    }

    #[test]
    fn apply_errors_identity_for_ideal_model() {
        let seq = make_cpmg(4, TAU_S).unwrap();
        let conc = apply_errors(&seq, &ErrorModel::ideal()).unwrap();
        assert!(conc.is_ideal_pi_train());
        assert_eq!(conc.n_pulses(), 4);
        assert_abs_diff_eq!(conc.total_time(), seq.total_time(), epsilon = 1e-18);
        match conc.segments[1] {
            Segment::Pulse { angle, phase, duration_s } => {
                assert_abs_diff_eq!(angle, PI, epsilon = 1e-15);
                assert_abs_diff_eq!(phase, FRAC_PI_2, epsilon = 1e-15);
                assert_eq!(duration_s, 0.0);
            }
            _ => panic!("expected pulse segment"),
        }
    }

    #[test]
    fn apply_errors_scales_angles() {
        let seq = make_cpmg(3, TAU_S).unwrap();
        let err = ErrorModel { epsilon: 0.05, ..Default::default() };
        let conc = apply_errors(&seq, &err).unwrap();
        for s in &conc.segments {
            if let Segment::Pulse { angle, .. } = s {
                assert_abs_diff_eq!(*angle, 1.05 * PI, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn finite_duration_consumes_forty_ns() {
        let seq = make_cpmg(2, TAU_S).unwrap();
        let err = ErrorModel { finite_duration: true, ..Default::default() };
        assert_abs_diff_eq!(err.pi_duration_s(), 40e-9, epsilon = 1e-15);
        let conc = apply_errors(&seq, &err).unwrap();
        // total schedule time unchanged; pulse centers on the ideal grid
        assert_abs_diff_eq!(conc.total_time(), seq.total_time(), epsilon = 1e-15);
        let mut t = 0.0;
        let mut centers = Vec::new();
        for s in &conc.segments {
            match s {
                Segment::Free { duration_s } => t += duration_s,
                Segment::Pulse { duration_s, .. } => {
                    centers.push(t + duration_s / 2.0);
                    t += duration_s;
                }
            }
        }
        for (got, want) in centers.iter().zip(seq.pulse_centers().iter()) {
            assert_abs_diff_eq!(got, want, epsilon = 1e-15);
        }
        if let Segment::Pulse { duration_s, .. } = conc.segments[1] {
            assert_abs_diff_eq!(duration_s, 40e-9, epsilon = 1e-15);
        }
    }

    #[test]
    fn infeasible_schedule_rejected() {
        let seq = make_cpmg(4, 30e-9).unwrap(); // delays shorter than a 40 ns pulse
        let err = ErrorModel { finite_duration: true, ..Default::default() };
        assert!(matches!(
            apply_errors(&seq, &err),
            Err(SequenceError::InfeasibleSchedule { .. })
        ));
    }

    #[test]
    fn error_model_validation() {
        assert!(ErrorModel { rabi_hz: 0.0, ..Default::default() }.validate().is_err());
        assert!(ErrorModel { epsilon: 1.5, ..Default::default() }.validate().is_err());
        assert!(ErrorModel::ideal().validate().is_ok());
    }

    #[test]
    fn dump_golden_cpmg_2() {
        let seq = make_cpmg(2, 0.8e-6).unwrap();
        let dump = seq.dump();
        let expect = "delay 0.0000004\npulse 3.141592653589793 1.5707963267948966\n\
                      delay 0.0000008\npulse 3.141592653589793 1.5707963267948966\n\
                      delay 0.0000004\n";
        assert_eq!(dump, expect);
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn centers_equidistant_and_total_time_n_tau(
                family in 0..3usize,
                blocks in 1..12u32,
                tau_us in 0.05f64..50.0,
            ) {
                let tau = tau_us * 1e-6;
                let seq = match family {
                    0 => make_cpmg(blocks, tau).unwrap(),
                    1 => make_xy4(4 * blocks, tau).unwrap(),
                    _ => make_kdd(10 * blocks, tau).unwrap(),
                };
                let centers = seq.pulse_centers();
                for w in centers.windows(2) {
                    prop_assert!((w[1] - w[0] - tau).abs() < 1e-12 * tau.max(1.0));
                }
                let total = seq.total_time();
                let expect = tau * seq.n_pulses() as f64;
                prop_assert!((total - expect).abs() < 1e-9 * expect);
            }

            #[test]
            fn error_application_preserves_schedule(
                eps in -0.3f64..0.3,
                offset_mhz in -5.0f64..5.0,
                n in 1..40u32,
            ) {
                let seq = make_cpmg(n, 0.8e-6).unwrap();
                let err = ErrorModel {
                    epsilon: eps,
                    offset_hz: offset_mhz * 1e6,
                    finite_duration: true,
                    ..Default::default()
                };
                let conc = apply_errors(&seq, &err).unwrap();
                prop_assert!((conc.total_time() - seq.total_time()).abs() < 1e-15);
                prop_assert_eq!(conc.n_pulses(), n as usize);
            }
        }
    }

    #[test]
    fn family_admissibility() {
        assert!(SequenceFamily::Cpmg.admits(1));
        assert!(!SequenceFamily::Xy4.admits(6));
        assert!(SequenceFamily::Xy4.admits(8));
        assert!(SequenceFamily::Kdd.admits(20));
        assert!(!SequenceFamily::Kdd.admits(25));
        assert!(SequenceFamily::Hahn.admits(1));
        assert!(!SequenceFamily::Hahn.admits(2));
    }
}
