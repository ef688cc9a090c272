//! Ramsey fringe of the NV electron spin with the ¹⁴N hyperfine triplet and
//! its Fourier transform: three spectral lines at δ − a, δ, δ + a.
//!
//! Run with: cargo run --example ramsey_fringe

use ddsim::experiments::{ramsey, ramsey_spectrum, spectrum_peaks, N14_HYPERFINE_HZ};

fn main() {
    let detuning_hz = 5.0e6;
    let t2star_s = 1.0e-6;
    let t_list: Vec<f64> = (0..4096).map(|i| i as f64 * 20e-9).collect();

    let curve = ramsey(detuning_hz, N14_HYPERFINE_HZ, t2star_s, &t_list).unwrap();
    println!("Ramsey fringe, δ = 5 MHz, a(¹⁴N) = 2.16 MHz, T₂* = 1 μs");
    println!("\nfirst microseconds of the fringe:");
    for p in curve.points.iter().step_by(8).take(14) {
        let bar = "*".repeat((40.0 * p.survival) as usize);
        println!("  t = {:5.2} μs  p = {:.3} |{bar}", p.time_s * 1e6, p.survival);
    }

    let spectrum = ramsey_spectrum(&curve).unwrap();
    let peaks = spectrum_peaks(&spectrum, 0.3);
    println!("\nspectral peaks (≥ 30% of the strongest line):");
    for f in &peaks {
        println!("  {:.3} MHz", f / 1e6);
    }
    println!("\nthe triplet at δ ± a comes from the three ¹⁴N projections;");
    println!("with the hyperfine set to zero a single line at δ remains:");
    let single = ramsey(detuning_hz, 0.0, t2star_s, &t_list).unwrap();
    let peaks = spectrum_peaks(&ramsey_spectrum(&single).unwrap(), 0.3);
    for f in &peaks {
        println!("  {:.3} MHz", f / 1e6);
    }
}
