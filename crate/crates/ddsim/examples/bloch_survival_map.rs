//! Survival probability after 20 DD pulses as a function of the initial
//! state angles (θ, φ), for CPMG, XY-4 and KDD with a 5% flip-angle error —
//! printed as coarse ASCII maps of the Bloch sphere.
//!
//! Run with: cargo run --release --example bloch_survival_map

use ddsim::bath::BathSpec;
use ddsim::engines::{EngineConfig, EnvelopeParams};
use ddsim::experiments::bloch_scan;
use ddsim::sequence::{ErrorModel, SequenceFamily};

fn shade(v: f64) -> char {
    match v {
        v if v >= 0.95 => '#',
        v if v >= 0.80 => '+',
        v if v >= 0.60 => '-',
        v if v >= 0.40 => '.',
        _ => ' ',
    }
}

fn main() {
    let bath = BathSpec::empty(6.8e-3).unwrap();
    let err = ErrorModel { epsilon: 0.05, ..Default::default() };
    let (theta_steps, phi_steps) = (13, 25);

    for family in [SequenceFamily::Cpmg, SequenceFamily::Xy4, SequenceFamily::Kdd] {
        let map = bloch_scan(
            family,
            20,
            0.8e-6,
            &bath,
            &err,
            theta_steps,
            phi_steps,
            &EnvelopeParams::none(),
            &EngineConfig::default(),
        )
        .unwrap();
        println!(
            "\n{}-20, ε = 5%  (rows θ: 0 → π, columns φ: 0 → 2π; # ≥ 0.95, + ≥ 0.8, - ≥ 0.6, . ≥ 0.4)",
            family.name()
        );
        for i in 0..theta_steps {
            let row: String = (0..phi_steps).map(|j| shade(map.at(i, j))).collect();
            println!("  θ={:4.2} |{row}|", map.theta_grid[i]);
        }
        let peaks = map.max_points(1e-6);
        let (ti, pj) = peaks[0];
        println!(
            "  min {:.3}, max {:.3} at (θ, φ) = ({:.2}, {:.2}) among {} degenerate maxima",
            map.min_value(),
            map.max_value(),
            map.theta_grid[ti],
            map.phi_grid[pj],
            peaks.len()
        );
    }
    println!("\nCPMG peaks only on its rotation axis (θ = π/2, φ = π/2 and apex states);");
    println!("XY-4 and KDD stay near 1 over the whole sphere.");
}
