//! Coherence decay with Larmor revivals: sweep the interpulse delay for the
//! Hahn echo and CPMG-4 over a weak ¹³C bath and locate the revival maxima,
//! which sit on the k·2Nτ_L grid.
//!
//! Run with: cargo run --release --example decay_and_revivals

use ddsim::analysis::revival_maxima;
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
        ],
    )
    .unwrap();
    let tau_l = bath.tau_larmor_s();
    println!(
        "B = {} mT → ¹³C Larmor period τ_L = {:.2} μs",
        bath.b_field_t() * 1e3,
        tau_l * 1e6
    );

    for (family, n) in [(SequenceFamily::Hahn, 1u32), (SequenceFamily::Cpmg, 4)] {
        let period = 2.0 * n as f64 * tau_l;
        let tau_max = 4.4 * period / n as f64;
        let tau_list: Vec<f64> =
            (0..1000).map(|i| 0.5e-6 + (tau_max - 0.5e-6) * i as f64 / 999.0).collect();
        let curve = decay_curve(
            family,
            n,
            &tau_list,
            &bath,
            &ErrorModel::ideal(),
            &QubitState::y(),
            &EnvelopeParams::none(),
            &EngineConfig::default(),
        )
        .unwrap();

        let minimum = curve.points.iter().map(|p| p.survival).fold(f64::INFINITY, f64::min);
        println!("\n{} over {} delays: collapse floor ≈ {minimum:.3}", curve.meta.sequence, tau_list.len());
        println!("revival maxima vs the 2Nτ_L grid (period {:.2} μs):", period * 1e6);
        let envelope = revival_maxima(&curve.series(), n, tau_l).unwrap();
        for (k, (t, p)) in envelope.maxima.iter().enumerate() {
            let center = (k + 1) as f64 * period;
            println!(
                "  k = {}: detected {:7.2} μs, grid {:7.2} μs ({:+.2}%), survival {p:.4}",
                k + 1,
                t * 1e6,
                center * 1e6,
                100.0 * (t - center) / center
            );
        }
    }
}
