//! Sample a ¹³C nuclear-spin bath from the diamond lattice: random site
//! occupation at natural abundance, point-dipole hyperfine couplings
//! relative to the [111] NV axis, and a coupling band selecting the weakly
//! coupled shell (the strongly coupled nearest sites are excluded, matching
//! a center with no ¹³C in its immediate vicinity).
//!
//! Run with: cargo run --example sample_bath_lattice

use ddsim::bath::{
    hyperfine_point_dipole, parse_bath_string, sample_bath, write_sampled_bath_string,
    LatticeSamplerConfig,
};

fn main() {
    let cfg = LatticeSamplerConfig {
        abundance: 0.011,
        radius_nm: 2.5,
        min_coupling_cutoff_hz: 2e3,
        max_coupling_cutoff_hz: 60e3,
        seed: 12,
    };
    let sampled = sample_bath(&cfg, 6.8e-3).unwrap();
    println!(
        "sampled {} nuclei (dropped {} over-cap) within {} nm at abundance {}",
        sampled.spec.k(),
        sampled.truncated,
        cfg.radius_nm,
        cfg.abundance
    );
    println!("\n{:>5} {:>8} {:>8} {:>11} {:>11}", "label", "r/nm", "θ/rad", "a_par/kHz", "a_perp/kHz");
    for (site, nucleus) in sampled.sites.iter().zip(sampled.spec.nuclei()) {
        println!(
            "{:>5} {:>8.3} {:>8.3} {:>11.2} {:>11.2}",
            nucleus.label.as_deref().unwrap_or("-"),
            site.r_nm,
            site.theta_r,
            nucleus.a_par_hz / 1e3,
            nucleus.a_perp_hz / 1e3
        );
    }

    // the point-dipole scale: ~20 kHz at 1 nm, falling as 1/r³
    let (a_par, _) = hyperfine_point_dipole(1.0, 0.0).unwrap();
    println!("\naxial coupling at 1 nm: a_par = {:.2} kHz (∝ 1/r³)", a_par / 1e3);

    // the emitted file round-trips through the parser
    let text = write_sampled_bath_string(&sampled);
    let reparsed = parse_bath_string(&text).unwrap();
    assert_eq!(reparsed, sampled.spec);
    println!("\nbath file ({} lines, with placement provenance):\n", text.lines().count());
    for line in text.lines().take(12) {
        println!("  {line}");
    }
    println!("  ...");
}
