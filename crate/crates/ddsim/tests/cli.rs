//! End-to-end tests of the `ddsim` binary: golden sequence dumps, strict
//! config handling, flag precedence, per-class exit codes, and output
//! formats.

use std::path::Path;
use std::process::{Command, Output};

fn ddsim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ddsim"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn dump_sequence_golden() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("seq.txt");
    let run = ddsim(&[
        "dump-sequence",
        "--sequence",
        "cpmg",
        "--n-pulses",
        "2",
        "--output",
        out.to_str().unwrap(),
    ]);
    assert!(run.status.success(), "{}", stderr(&run));
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(
        text,
        "delay 0.0000004\npulse 3.141592653589793 1.5707963267948966\n\
         delay 0.0000008\npulse 3.141592653589793 1.5707963267948966\n\
         delay 0.0000004\n"
    );
}

#[test]
fn missing_fields_exit_config_class() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.csv");
    let run = ddsim(&["decay", "--output", out.to_str().unwrap()]);
    assert_eq!(run.status.code(), Some(2));
    let err = stderr(&run);
    for field in ["sequence", "n_pulses", "tau_min_us"] {
        assert!(err.contains(field), "stderr lacks `{field}`: {err}");
    }
    assert!(!out.exists(), "no output on failure");
}

#[test]
fn unknown_config_key_rejected_by_name() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "sequence = \"cpmg\"\nn_pulses = 2\nwibble_ms = 4\n").unwrap();
    let run = ddsim(&[
        "dump-sequence",
        "--config",
        cfg.to_str().unwrap(),
        "--output",
        dir.path().join("s.txt").to_str().unwrap(),
    ]);
    assert_eq!(run.status.code(), Some(2));
    assert!(stderr(&run).contains("wibble_ms"));
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    // file asks for a 4-pulse dump; the flag overrides to 1
    std::fs::write(&cfg, "sequence = \"cpmg\"\nn_pulses = 4\ntau_us = 1.0\n").unwrap();
    let out = dir.path().join("seq.txt");
    let run = ddsim(&[
        "dump-sequence",
        "--config",
        cfg.to_str().unwrap(),
        "--n-pulses",
        "1",
        "--output",
        out.to_str().unwrap(),
    ]);
    assert!(run.status.success(), "{}", stderr(&run));
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(text.matches("pulse").count(), 1);
    assert!(text.starts_with("delay 0.0000005\n")); // τ/2 from the file's tau_us
}

#[test]
fn engine_failure_exit_class() {
    let dir = tempfile::tempdir().unwrap();
    // xy4 with an inadmissible pulse count is an engine-class failure
    let run = ddsim(&[
        "dump-sequence",
        "--sequence",
        "xy4",
        "--n-pulses",
        "6",
        "--output",
        dir.path().join("s.txt").to_str().unwrap(),
    ]);
    assert_eq!(run.status.code(), Some(3));
    assert!(stderr(&run).contains("multiple of 4"));
}

#[test]
fn fit_failure_exit_class() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("flat.csv");
    std::fs::write(
        &data,
        "total_time_us,survival,sequence,n_pulses\n1,0.7,x,1\n2,0.7,x,1\n3,0.7,x,1\n4,0.7,x,1\n",
    )
    .unwrap();
    let run = ddsim(&[
        "fit",
        "--input",
        data.to_str().unwrap(),
        "--output",
        dir.path().join("fit.json").to_str().unwrap(),
    ]);
    assert_eq!(run.status.code(), Some(4));
    assert!(stderr(&run).contains("degenerate"));
}

#[test]
fn unwritable_output_exit_io_class() {
    let run = ddsim(&[
        "dump-sequence",
        "--sequence",
        "cpmg",
        "--n-pulses",
        "1",
        "--output",
        "/nonexistent-dir/deep/s.txt",
    ]);
    assert_eq!(run.status.code(), Some(5));
}

#[test]
fn decay_csv_format() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("decay.csv");
    let run = ddsim(&[
        "decay",
        "--sequence",
        "cpmg",
        "--n-pulses",
        "2",
        "--tau-min-us",
        "1",
        "--tau-max-us",
        "5",
        "--tau-steps",
        "5",
        "--output",
        out.to_str().unwrap(),
    ]);
    assert!(run.status.success(), "{}", stderr(&run));
    let text = std::fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("total_time_us,survival,sequence,n_pulses"));
    let first = lines.next().unwrap();
    let fields: Vec<&str> = first.split(',').collect();
    assert_eq!(fields.len(), 4);
    assert_eq!(fields[0], "2"); // τ = 1 μs × 2 pulses
    assert_eq!(fields[2], "cpmg-2");
    assert_eq!(fields[3], "2");
    // empty bath, ideal pulses, default envelope only decays populations
    let survival: f64 = fields[1].parse().unwrap();
    assert!(survival > 0.999);
}

#[test]
fn sweep_csv_offset_in_mhz() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sweep.csv");
    let run = ddsim(&[
        "error-sweep",
        "--sequence",
        "kdd",
        "--n-pulses",
        "20",
        "--sweep",
        "offset",
        "--offset-max-mhz",
        "5",
        "--sweep-steps",
        "5",
        "--output",
        out.to_str().unwrap(),
    ]);
    assert!(run.status.success(), "{}", stderr(&run));
    let text = std::fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("error_value,survival,sequence,n_pulses"));
    let first = lines.next().unwrap();
    assert!(first.starts_with("-5,"), "offset column in MHz: {first}");
}

#[test]
fn bloch_map_csv_format() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("map.csv");
    let run = ddsim(&[
        "bloch-scan",
        "--sequence",
        "cpmg",
        "--theta-steps",
        "3",
        "--phi-steps",
        "5",
        "--output",
        out.to_str().unwrap(),
    ]);
    assert!(run.status.success(), "{}", stderr(&run));
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().count(), 1 + 3 * 5);
    assert!(text.starts_with("theta_rad,phi_rad,survival\n"));
    assert!(text.lines().nth(1).unwrap().starts_with("0,0,"));
}

#[test]
fn ramsey_spectrum_peaks_near_triplet() {
    let dir = tempfile::tempdir().unwrap();
    let fringe = dir.path().join("fringe.csv");
    let spectrum = dir.path().join("spectrum.csv");
    let run = ddsim(&[
        "ramsey",
        "--detuning-mhz",
        "5",
        "--t-steps",
        "4096",
        "--t-max-us",
        "81.92",
        "--output",
        fringe.to_str().unwrap(),
        "--spectrum-output",
        spectrum.to_str().unwrap(),
    ]);
    assert!(run.status.success(), "{}", stderr(&run));
    let text = std::fs::read_to_string(&spectrum).unwrap();
    // locate the three largest local maxima
    let rows: Vec<(f64, f64)> = text
        .lines()
        .skip(1)
        .map(|l| {
            let mut it = l.split(',');
            (
                it.next().unwrap().parse().unwrap(),
                it.next().unwrap().parse().unwrap(),
            )
        })
        .collect();
    let max = rows.iter().map(|&(_, m)| m).fold(f64::NEG_INFINITY, f64::max);
    let peaks: Vec<f64> = (1..rows.len() - 1)
        .filter(|&i| {
            rows[i].1 >= 0.3 * max && rows[i].1 >= rows[i - 1].1 && rows[i].1 >= rows[i + 1].1
        })
        .map(|i| rows[i].0)
        .collect();
    assert_eq!(peaks.len(), 3, "{peaks:?}");
    for (peak, expect) in peaks.iter().zip([2.84, 5.0, 7.16]) {
        assert!((peak - expect).abs() < 0.1, "{peak} vs {expect}");
    }
}

#[test]
fn fit_from_counts_with_references() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("counts.csv");
    let mut text = String::from("time_us,counts\n");
    for i in 0..30 {
        let t_us = 10.0 + 100.0 * i as f64;
        let p = 0.5 + 0.5 * (-(t_us / 1500.0_f64).powf(1.0)).exp();
        let counts = 200.0 + 800.0 * p; // rabi_min 200, rabi_max 1000
        text.push_str(&format!("{t_us},{counts}\n"));
    }
    std::fs::write(&data, text).unwrap();
    let out = dir.path().join("fit.json");
    let run = ddsim(&[
        "fit",
        "--input",
        data.to_str().unwrap(),
        "--rabi-max",
        "1000",
        "--rabi-min",
        "200",
        "--fix-baseline",
        "0.5",
        "--output",
        out.to_str().unwrap(),
    ]);
    assert!(run.status.success(), "{}", stderr(&run));
    let record: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert!((record["t2_us"].as_f64().unwrap() - 1500.0).abs() < 1.0);
    assert!((record["exponent_n"].as_f64().unwrap() - 1.0).abs() < 1e-3);
}

#[test]
fn bath_sample_and_reuse_as_bath_file() {
    let dir = tempfile::tempdir().unwrap();
    let bath = dir.path().join("bath.txt");
    let run = ddsim(&[
        "bath-sample",
        "--abundance",
        "0.02",
        "--radius-nm",
        "2.0",
        "--min-coupling-khz",
        "2",
        "--max-coupling-khz",
        "60",
        "--seed",
        "3",
        "--output",
        bath.to_str().unwrap(),
    ]);
    assert!(run.status.success(), "{}", stderr(&run));
    // sidecar exists alongside
    assert!(Path::new(&format!("{}.meta.toml", bath.display())).exists());
    // the emitted file drives a decay run
    let out = dir.path().join("decay.csv");
    let run2 = ddsim(&[
        "decay",
        "--sequence",
        "hahn",
        "--n-pulses",
        "1",
        "--bath-file",
        bath.to_str().unwrap(),
        "--tau-min-us",
        "1",
        "--tau-max-us",
        "60",
        "--tau-steps",
        "30",
        "--output",
        out.to_str().unwrap(),
    ]);
    assert!(run2.status.success(), "{}", stderr(&run2));
    assert!(std::fs::read_to_string(&out).unwrap().lines().count() > 20);
}
