//! Generate the named pulse sequences and print their timelines.
//!
//! All families share the symmetric CPMG timing grid (edge delays τ/2,
//! interior delays τ) and differ only in the pulse phase pattern.
//!
//! Run with: cargo run --example sequence_timelines

use ddsim::sequence::{make_cpmg, make_hahn, make_kdd, make_xy4};

fn main() {
    let tau = 0.8e-6;

    let hahn = make_hahn(tau).unwrap();
    println!("Hahn echo (τ = 0.8 μs):");
    print!("{}", hahn.dump());

    let cpmg = make_cpmg(4, tau).unwrap();
    println!("\nCPMG-4 phases (all y):");
    for (k, (_, pulse)) in cpmg.events.iter().enumerate() {
        println!("  pulse {k}: phase = {:.4} rad", pulse.phase);
    }

    let xy4 = make_xy4(8, tau).unwrap();
    println!("\nXY-4 with 8 pulses (x y x y, twice):");
    let phases: Vec<String> =
        xy4.events.iter().map(|(_, p)| format!("{:.4}", p.phase)).collect();
    println!("  phases = [{}]", phases.join(", "));

    let kdd = make_kdd(20, tau).unwrap();
    println!("\nKDD with 20 pulses (two Knill-block pairs, block phase alternating 0, π/2):");
    for block in 0..4 {
        let phases: Vec<String> = kdd.events[5 * block..5 * (block + 1)]
            .iter()
            .map(|(_, p)| format!("{:.4}", p.phase))
            .collect();
        println!("  block {block}: [{}]", phases.join(", "));
    }

    println!("\ntiming identities:");
    println!("  total time of CPMG-4  = {:.3} μs (= 4τ)", cpmg.total_time() * 1e6);
    println!("  total time of KDD-20  = {:.3} μs (= 20τ)", kdd.total_time() * 1e6);
    let centers = kdd.pulse_centers();
    println!(
        "  KDD pulse spacing     = {:.3} μs (uniform)",
        (centers[1] - centers[0]) * 1e6
    );
}
