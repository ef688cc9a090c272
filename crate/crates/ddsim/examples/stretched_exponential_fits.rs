//! Stretched-exponential analysis of CPMG decay: T₂ versus pulse count and
//! the exponent crossover.
//!
//! With a static weak bath plus a 2.2 ms Markovian channel (standing in for
//! the nuclear flip-flops and other non-refocusable processes), the revival
//! envelope is exponential at every pulse count with T₂ pinned near the
//! Markov time, while the bath-dominated initial decay of the single echo is
//! strongly stretched (exponent ≈ 3). Between the two fits this is the
//! crossover from slow correlated noise to the Markovian ceiling.
//!
//! Run with: cargo run --release --example stretched_exponential_fits

use ddsim::analysis::{fit_stretched_exp, initial_decay_segment, revival_maxima};
use ddsim::bath::{BathSpec, NucleusParams};
use ddsim::engines::{EngineConfig, EnvelopeParams};
use ddsim::experiments::decay_curve;
use ddsim::quantum::QubitState;
use ddsim::sequence::{ErrorModel, SequenceFamily};

fn main() {
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
    let tau_l = bath.tau_larmor_s();
    let env = EnvelopeParams { t1_s: f64::INFINITY, t_markov_s: 2.2e-3 };
    let engine = EngineConfig::default();

    println!("CPMG envelope fits (baseline pinned at 1/2), t_markov = 2.2 ms:\n");
    println!("{:>4} {:>12} {:>10} {:>14} {:>10}", "n", "T2_env/ms", "n_env", "T2_initial/ms", "n_initial");
    for n in [1u32, 4, 16, 64] {
        let period_us = 2.0 * n as f64 * tau_l * 1e6;
        let span_us = 5.2 * period_us;
        let lo_us = (0.002 * span_us / n as f64).max(0.2);
        let tau_list: Vec<f64> = (0..1600)
            .map(|i| (lo_us + (span_us / n as f64 - lo_us) * i as f64 / 1599.0) * 1e-6)
            .collect();
        let curve = decay_curve(
            SequenceFamily::Cpmg,
            n,
            &tau_list,
            &bath,
            &ErrorModel::ideal(),
            &QubitState::y(),
            &env,
            &engine,
        )
        .unwrap();
        let series = curve.series();

        let maxima = revival_maxima(&series, n, tau_l).unwrap();
        let env_fit = fit_stretched_exp(&maxima.maxima, Some(0.5)).unwrap();

        // initial decay: the falling flank of the first inter-revival segment
        let segment = initial_decay_segment(&series);
        let p0 = segment.first().unwrap().1;
        let p_min = segment.iter().map(|&(_, p)| p).fold(f64::INFINITY, f64::min);
        let cut = p_min + 0.25 * (p0 - p_min);
        let flank_end = segment.iter().position(|&(_, p)| p < cut).unwrap_or(segment.len());
        let initial = (flank_end >= 6)
            .then(|| fit_stretched_exp(&segment[..flank_end], Some(0.5)).ok())
            .flatten();

        match initial {
            Some(fit0) => println!(
                "{n:>4} {:>12.3} {:>10.3} {:>14.4} {:>10.3}",
                env_fit.t2_s * 1e3,
                env_fit.exponent_n,
                fit0.t2_s * 1e3,
                fit0.exponent_n
            ),
            None => println!(
                "{n:>4} {:>12.3} {:>10.3} {:>14} {:>10}",
                env_fit.t2_s * 1e3,
                env_fit.exponent_n,
                "-",
                "-"
            ),
        }
    }
    println!("\nthe envelope is pinned at the Markov ceiling for every n, while the");
    println!("initial-decay time climbs toward it and its exponent falls from ~3 to ~1:");
    println!("the crossover from slow correlated bath noise to the non-refocusable channel.");
}
