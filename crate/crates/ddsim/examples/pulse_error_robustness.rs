//! Robustness of the DD families to pulse imperfections: survival versus
//! fractional flip-angle error at 20 and 200 pulses, and versus the drive
//! frequency offset with finite 40 ns pulses over a weak nuclear bath.
//!
//! Run with: cargo run --release --example pulse_error_robustness

use ddsim::bath::{BathSpec, NucleusParams};
use ddsim::engines::{EngineConfig, EnvelopeParams};
use ddsim::experiments::{error_sweep, SweepKind};
use ddsim::quantum::QubitState;
use ddsim::sequence::{ErrorModel, SequenceFamily};

fn main() {
    let empty = BathSpec::empty(6.8e-3).unwrap();
    let env = EnvelopeParams::none();
    let engine = EngineConfig::default();

    println!("flip-angle sweeps on the CPMG rotation-axis state |y⟩, no bath:");
    for n in [20u32, 200] {
        println!("\n  n = {n}:");
        print!("  {:>7}", "ε");
        for family in [SequenceFamily::Cpmg, SequenceFamily::Xy4, SequenceFamily::Kdd] {
            print!(" {:>8}", family.name());
        }
        println!();
        let sweeps: Vec<_> = [SequenceFamily::Cpmg, SequenceFamily::Xy4, SequenceFamily::Kdd]
            .iter()
            .map(|&family| {
                error_sweep(
                    family,
                    n,
                    0.8e-6,
                    SweepKind::FlipAngle { max_epsilon: 0.10 },
                    21,
                    &ErrorModel::ideal(),
                    &QubitState::y(),
                    &empty,
                    &env,
                    &engine,
                )
                .unwrap()
            })
            .collect();
        for i in (0..21).step_by(2) {
            print!("  {:>7.3}", sweeps[0].points[i].0);
            for sweep in &sweeps {
                print!(" {:>8.4}", sweep.points[i].1);
            }
            println!();
        }
    }

    // offset sweeps: the bath makes offset errors bite, because imperfect π
    // pulses stop refocusing the hyperfine dephasing
    let bath = BathSpec::new(
        6.8e-3,
        vec![
            NucleusParams::new(8e3, 26e3, None).unwrap(),
            NucleusParams::new(-12e3, 22e3, None).unwrap(),
            NucleusParams::new(5e3, 28e3, None).unwrap(),
            NucleusParams::new(-7e3, 18e3, None).unwrap(),
            NucleusParams::new(15e3, 20e3, None).unwrap(),
            NucleusParams::new(-4e3, 24e3, None).unwrap(),
        ],
    )
    .unwrap();
    println!("\noffset sweeps on |x⟩, 20 pulses, 40 ns π pulses, K = 6 bath, τ = 2 μs:");
    print!("  {:>7}", "Δ/MHz");
    for family in [SequenceFamily::Cpmg, SequenceFamily::Xy4, SequenceFamily::Kdd] {
        print!(" {:>8}", family.name());
    }
    println!();
    let base = ErrorModel { finite_duration: true, ..Default::default() };
    let sweeps: Vec<_> = [SequenceFamily::Cpmg, SequenceFamily::Xy4, SequenceFamily::Kdd]
        .iter()
        .map(|&family| {
            error_sweep(
                family,
                20,
                2.0e-6,
                SweepKind::Offset { max_offset_hz: 5e6 },
                21,
                &base,
                &QubitState::x(),
                &bath,
                &env,
                &engine,
            )
            .unwrap()
        })
        .collect();
    for i in 0..21 {
        print!("  {:>7.2}", sweeps[0].points[i].0 / 1e6);
        for sweep in &sweeps {
            print!(" {:>8.4}", sweep.points[i].1);
        }
        println!();
    }
    println!("\nall three families lose fidelity once the offset exceeds ~2 MHz;");
    println!("KDD degrades most gracefully, CPMG's orthogonal state fastest.");
}
