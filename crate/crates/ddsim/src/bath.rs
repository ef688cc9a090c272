//! The nuclear-spin environment of the electron qubit.
//!
//! A bath is a list of spin-1/2 ¹³C nuclei, each characterized by the secular
//! hyperfine components (a_par, a_perp) relative to the NV axis. Baths come
//! from an explicit list (bath file) or from random placement on the diamond
//! lattice with point-dipole couplings. The conditional nuclear Hamiltonians
//! assembled here are what the evolution engines propagate:
//!
//! - electron in |0⟩ (m_s = 0): h₀ = Σ_j ω_L I_z^j — bare Larmor precession,
//!   identical for every nucleus;
//! - electron in |1⟩ (m_s = −1): h₁ = Σ_j (ω_L + a_par,j) I_z^j + a_perp,j I_x^j.
//!
//! Frequencies are stored in Hz and converted to rad/s only where operators
//! are built.

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::Matrix2;
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::constants::{
    hz_to_rad, larmor_hz, DIAMOND_CELL_NM, GAMMA_C13_HZ_PER_T, GAMMA_E_HZ_PER_T, HBAR,
    MU0_OVER_4PI,
};
use crate::quantum::{kron_mat, CMat, HermitianOp, Mat2};

/// Hard cap on bath size; the joint Hilbert space is 2·2^K.
pub const MAX_NUCLEI: usize = 14;

/// Minimum physically meaningful electron–nucleus distance, nm.
pub const MIN_DISTANCE_NM: f64 = 0.1;

#[derive(Debug, Error)]
pub enum BathError {
    #[error("distance {r_nm} nm below the {MIN_DISTANCE_NM} nm floor")]
    UnphysicalDistance { r_nm: f64 },
    #[error("hyperfine component not finite or a_perp < 0: ({a_par_hz}, {a_perp_hz})")]
    InvalidCoupling { a_par_hz: f64, a_perp_hz: f64 },
    #[error("bath of {got} nuclei exceeds the cap of {MAX_NUCLEI} (joint dimension 2·2^{got})")]
    TooManyNuclei { got: usize },
    #[error("static field must be positive, got {b_field_t} T")]
    NonPositiveField { b_field_t: f64 },
    #[error("abundance {abundance} outside [0, 1]")]
    InvalidAbundance { abundance: f64 },
    #[error("sampling radius {radius_nm} nm must be positive")]
    InvalidRadius { radius_nm: f64 },
    #[error("coupling cutoffs not ordered: min {min_hz} > max {max_hz}")]
    UnorderedCutoffs { min_hz: f64, max_hz: f64 },
    #[error("bath file line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("bath file i/o: {0}")]
    Io(#[from] std::io::Error),
}

/// Hyperfine parameters of one bath nucleus.
#[derive(Debug, Clone, PartialEq)]
pub struct NucleusParams {
    pub a_par_hz: f64,
    pub a_perp_hz: f64,
    pub label: Option<String>,
}

impl NucleusParams {
    pub fn new(a_par_hz: f64, a_perp_hz: f64, label: Option<String>) -> Result<Self, BathError> {
        if !a_par_hz.is_finite() || !a_perp_hz.is_finite() || a_perp_hz < 0.0 {
            return Err(BathError::InvalidCoupling { a_par_hz, a_perp_hz });
        }
        Ok(Self { a_par_hz, a_perp_hz, label })
    }

    /// Total hyperfine magnitude √(a_par² + a_perp²), Hz.
    pub fn magnitude_hz(&self) -> f64 {
        self.a_par_hz.hypot(self.a_perp_hz)
    }
}

/// Static field plus nucleus list; the environment seen by the engines.
#[derive(Debug, Clone, PartialEq)]
pub struct BathSpec {
    b_field_t: f64,
    larmor_hz: f64,
    nuclei: Vec<NucleusParams>,
}

impl BathSpec {
    /// Larmor frequency derived from the field: ω_L/2π = γ_C·B.
    pub fn new(b_field_t: f64, nuclei: Vec<NucleusParams>) -> Result<Self, BathError> {
        if b_field_t <= 0.0 || !b_field_t.is_finite() {
            return Err(BathError::NonPositiveField { b_field_t });
        }
        if nuclei.len() > MAX_NUCLEI {
            return Err(BathError::TooManyNuclei { got: nuclei.len() });
        }
        Ok(Self { b_field_t, larmor_hz: larmor_hz(b_field_t), nuclei })
    }

    /// Empty bath: the noiseless limit.
    pub fn empty(b_field_t: f64) -> Result<Self, BathError> {
        Self::new(b_field_t, Vec::new())
    }

    /// Override the derived Larmor frequency.
    ///
    /// Quoted revival spacings are not always consistent with γ_C at the
    /// nominal field (73 μs is a commonly quoted ¹³C period, yet 6.8 mT
    /// gives ≈ 13.7 μs). Setting the Larmor frequency independently lets a
    /// measured spacing be treated as ground truth;
    /// [`Self::larmor_consistency_warning`] reports the mismatch.
    pub fn with_larmor_hz(mut self, larmor_hz: f64) -> Self {
        self.larmor_hz = larmor_hz;
        self
    }

    /// Warning text when the Larmor frequency does not match γ_C·B.
    pub fn larmor_consistency_warning(&self) -> Option<String> {
        let derived = larmor_hz(self.b_field_t);
        let rel = ((self.larmor_hz - derived) / derived).abs();
        (rel > 1e-9).then(|| {
            format!(
                "larmor frequency {:.3} kHz overrides the value {:.3} kHz derived from B = {:.4} mT",
                self.larmor_hz / 1e3,
                derived / 1e3,
                self.b_field_t * 1e3
            )
        })
    }

    pub fn b_field_t(&self) -> f64 {
        self.b_field_t
    }

    pub fn larmor_hz(&self) -> f64 {
        self.larmor_hz
    }

    /// Larmor period τ_L in seconds.
    pub fn tau_larmor_s(&self) -> f64 {
        1.0 / self.larmor_hz
    }

    pub fn nuclei(&self) -> &[NucleusParams] {
        &self.nuclei
    }

    pub fn k(&self) -> usize {
        self.nuclei.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nuclei.is_empty()
    }

    /// Per-nucleus 2×2 conditional Hamiltonian (rad/s) for one electron branch.
    pub fn nucleus_branch_h(&self, nucleus: &NucleusParams, branch: Branch) -> Mat2 {
        let iz = 0.5;
        match branch {
            Branch::Zero => {
                let wz = hz_to_rad(self.larmor_hz) * iz;
                Matrix2::new(
                    Complex64::new(wz, 0.0),
                    Complex64::new(0.0, 0.0),
                    Complex64::new(0.0, 0.0),
                    Complex64::new(-wz, 0.0),
                )
            }
            Branch::One => {
                let wz = hz_to_rad(self.larmor_hz + nucleus.a_par_hz) * iz;
                let wx = hz_to_rad(nucleus.a_perp_hz) * iz;
                Matrix2::new(
                    Complex64::new(wz, 0.0),
                    Complex64::new(wx, 0.0),
                    Complex64::new(wx, 0.0),
                    Complex64::new(-wz, 0.0),
                )
            }
        }
    }
}

/// Electron branch selecting the conditional nuclear Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// m_s = 0: hyperfine off.
    Zero,
    /// m_s = −1: hyperfine on.
    One,
}

/// Secular point-dipole hyperfine components at distance `r_nm` and polar
/// angle `theta_r` from the NV axis:
/// a_par = d(1 − 3cos²θ), a_perp = |3 d sinθ cosθ|, d = (μ0/4π)·γ_e γ_C ħ/r³
/// expressed in Hz.
pub fn hyperfine_point_dipole(r_nm: f64, theta_r: f64) -> Result<(f64, f64), BathError> {
    if r_nm < MIN_DISTANCE_NM || !r_nm.is_finite() {
        return Err(BathError::UnphysicalDistance { r_nm });
    }
    let r_m = r_nm * 1e-9;
    // γ in rad/s/T; the 1/2π at the end expresses the result in Hz.
    let gamma_e = hz_to_rad(GAMMA_E_HZ_PER_T);
    let gamma_c = hz_to_rad(GAMMA_C13_HZ_PER_T);
    let d_hz = MU0_OVER_4PI * gamma_e * gamma_c * HBAR / (r_m * r_m * r_m) / std::f64::consts::TAU;
    let (sin_t, cos_t) = theta_r.sin_cos();
    let a_par = d_hz * (1.0 - 3.0 * cos_t * cos_t);
    let a_perp = (3.0 * d_hz * sin_t * cos_t).abs();
    Ok((a_par, a_perp))
}

/// Parameters of the random lattice sampler.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeSamplerConfig {
    /// ¹³C isotopic abundance; natural abundance 0.011.
    pub abundance: f64,
    /// Sampling sphere radius around the electron, nm.
    pub radius_nm: f64,
    /// Keep only nuclei whose total coupling magnitude lies in this band.
    pub min_coupling_cutoff_hz: f64,
    pub max_coupling_cutoff_hz: f64,
    pub seed: u64,
}

impl Default for LatticeSamplerConfig {
    fn default() -> Self {
        Self {
            abundance: 0.011,
            radius_nm: 3.0,
            min_coupling_cutoff_hz: 0.0,
            max_coupling_cutoff_hz: 1e6,
            seed: 0,
        }
    }
}

impl LatticeSamplerConfig {
    fn validate(&self) -> Result<(), BathError> {
        if !(0.0..=1.0).contains(&self.abundance) {
            return Err(BathError::InvalidAbundance { abundance: self.abundance });
        }
        if self.radius_nm <= 0.0 {
            return Err(BathError::InvalidRadius { radius_nm: self.radius_nm });
        }
        if self.min_coupling_cutoff_hz > self.max_coupling_cutoff_hz {
            return Err(BathError::UnorderedCutoffs {
                min_hz: self.min_coupling_cutoff_hz,
                max_hz: self.max_coupling_cutoff_hz,
            });
        }
        Ok(())
    }
}

/// One occupied lattice site retained by the sampler.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledSite {
    /// Position in the crystal frame, nm.
    pub position_nm: [f64; 3],
    pub r_nm: f64,
    pub theta_r: f64,
}

/// Sampler output: the bath plus placement provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledBath {
    pub spec: BathSpec,
    pub sites: Vec<SampledSite>,
    pub config: LatticeSamplerConfig,
    /// True when no nucleus survived placement and filtering.
    pub empty: bool,
    /// Number of in-band nuclei dropped because the cap was reached
    /// (weakest couplings are dropped first).
    pub truncated: usize,
}

/// Place ¹³C nuclei on the diamond lattice and keep those whose coupling
/// magnitude falls inside the configured band.
///
/// Deterministic for a fixed seed: sites are visited in a canonical order
/// and each consumes exactly one RNG draw. If more than [`MAX_NUCLEI`]
/// survive the band filter, the strongest-coupled are kept.
pub fn sample_bath(cfg: &LatticeSamplerConfig, b_field_t: f64) -> Result<SampledBath, BathError> {
    cfg.validate()?;
    if b_field_t <= 0.0 || !b_field_t.is_finite() {
        return Err(BathError::NonPositiveField { b_field_t });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    // NV axis along [111].
    let axis = [1.0 / 3f64.sqrt(); 3];
    let a = DIAMOND_CELL_NM;
    let span = (cfg.radius_nm / a).ceil() as i64 + 1;
    // FCC translations plus the two-point basis of the diamond structure.
    let fcc = [[0.0, 0.0, 0.0], [0.0, 0.5, 0.5], [0.5, 0.0, 0.5], [0.5, 0.5, 0.0]];
    let basis = [[0.0, 0.0, 0.0], [0.25, 0.25, 0.25]];

    let mut kept: Vec<(f64, SampledSite, NucleusParams)> = Vec::new();
    for n1 in -span..=span {
        for n2 in -span..=span {
            for n3 in -span..=span {
                for f in &fcc {
                    for b in &basis {
                        let pos = [
                            a * (n1 as f64 + f[0] + b[0]),
                            a * (n2 as f64 + f[1] + b[1]),
                            a * (n3 as f64 + f[2] + b[2]),
                        ];
                        let r = (pos[0] * pos[0] + pos[1] * pos[1] + pos[2] * pos[2]).sqrt();
                        // Sites outside the sphere, and the origin site where
                        // the electron itself sits, consume no RNG draw.
                        if r > cfg.radius_nm || r < MIN_DISTANCE_NM {
                            continue;
                        }
                        let occupied = rng.random::<f64>() < cfg.abundance;
                        if !occupied {
                            continue;
                        }
                        let cos_t =
                            (pos[0] * axis[0] + pos[1] * axis[1] + pos[2] * axis[2]) / r;
                        let theta_r = cos_t.clamp(-1.0, 1.0).acos();
                        let (a_par, a_perp) = hyperfine_point_dipole(r, theta_r)?;
                        let mag = a_par.hypot(a_perp);
                        if mag < cfg.min_coupling_cutoff_hz || mag > cfg.max_coupling_cutoff_hz {
                            continue;
                        }
                        kept.push((
                            mag,
                            SampledSite { position_nm: pos, r_nm: r, theta_r },
                            NucleusParams { a_par_hz: a_par, a_perp_hz: a_perp, label: None },
                        ));
                    }
                }
            }
        }
    }

    // Strongest couplings first; stable order makes truncation deterministic.
    kept.sort_by(|x, y| y.0.total_cmp(&x.0));
    let truncated = kept.len().saturating_sub(MAX_NUCLEI);
    kept.truncate(MAX_NUCLEI);

    let mut sites = Vec::with_capacity(kept.len());
    let mut nuclei = Vec::with_capacity(kept.len());
    for (idx, (_, site, mut nucleus)) in kept.into_iter().enumerate() {
        nucleus.label = Some(format!("C{}", idx + 1));
        sites.push(site);
        nuclei.push(nucleus);
    }
    let empty = nuclei.is_empty();
    Ok(SampledBath {
        spec: BathSpec::new(b_field_t, nuclei)?,
        sites,
        config: cfg.clone(),
        empty,
        truncated,
    })
}

// ---------------------------------------------------------------------------
// Hamiltonian assembly
// ---------------------------------------------------------------------------

fn mat2_to_cmat(m: &Mat2) -> CMat {
    CMat::from_row_slice(2, 2, &[m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]])
}

/// Free-evolution nuclear Hamiltonian for one electron branch, over the
/// 2^K-dimensional nuclear space (rad/s). K = 0 gives the 1×1 zero operator.
///
/// Nucleus 0 is the most significant Kronecker factor.
pub fn free_hamiltonian(bath: &BathSpec, branch: Branch) -> HermitianOp {
    let k = bath.k();
    let dim = 1usize << k;
    let mut h = CMat::zeros(dim, dim);
    for (j, nucleus) in bath.nuclei().iter().enumerate() {
        let hj = mat2_to_cmat(&bath.nucleus_branch_h(nucleus, branch));
        let left = 1usize << j;
        let right = 1usize << (k - 1 - j);
        let term = kron_mat(
            &kron_mat(&CMat::identity(left, left), &hj),
            &CMat::identity(right, right),
        );
        h += term;
    }
    HermitianOp::new_unchecked(h)
}

/// Joint electron⊗nuclear Hamiltonian (rad/s) over dimension 2·2^K:
/// H = Δ·Sz ⊗ 1 + |1⟩⟨1| ⊗ (h₁ − h₀) + 1 ⊗ h₀. Block-diagonal in the
/// electron basis: the |0⟩ block is h₀ + Δ/2, the |1⟩ block h₁ − Δ/2.
pub fn full_hamiltonian(bath: &BathSpec, offset_rad_s: f64) -> HermitianOp {
    let k = bath.k();
    let m = 1usize << k;
    let h0 = free_hamiltonian(bath, Branch::Zero);
    let h1 = free_hamiltonian(bath, Branch::One);
    let mut h = CMat::zeros(2 * m, 2 * m);
    for i in 0..m {
        for j in 0..m {
            h[(i, j)] = h0.entries()[(i, j)];
            h[(m + i, m + j)] = h1.entries()[(i, j)];
        }
        h[(i, i)] += Complex64::new(0.5 * offset_rad_s, 0.0);
        h[(m + i, m + i)] -= Complex64::new(0.5 * offset_rad_s, 0.0);
    }
    HermitianOp::new_unchecked(h)
}

// ---------------------------------------------------------------------------
// Bath file format
// ---------------------------------------------------------------------------

/// Serialize a bath to the text format:
///
/// ```text
/// # optional comments
/// b_field_t = 0.0068
/// larmor_hz = 72817.1      (only when overridden)
/// [nuclei]
/// # a_par_hz a_perp_hz label
/// -12000.0 3400.0 C1
/// ```
pub fn write_bath_string(bath: &BathSpec, provenance: &[String]) -> String {
    let mut out = String::new();
    out.push_str("# ddsim bath file\n");
    for line in provenance {
        let _ = writeln!(out, "# {line}");
    }
    let _ = writeln!(out, "b_field_t = {}", bath.b_field_t());
    if bath.larmor_consistency_warning().is_some() {
        let _ = writeln!(out, "larmor_hz = {}", bath.larmor_hz());
    }
    out.push_str("[nuclei]\n# a_par_hz a_perp_hz label\n");
    for (idx, n) in bath.nuclei().iter().enumerate() {
        let label = n.label.clone().unwrap_or_else(|| format!("C{}", idx + 1));
        let _ = writeln!(out, "{} {} {}", n.a_par_hz, n.a_perp_hz, label);
    }
    out
}

/// Sampler output with placement provenance comments.
pub fn write_sampled_bath_string(sampled: &SampledBath) -> String {
    let cfg = &sampled.config;
    let mut provenance = vec![
        format!("sampler: seed = {}", cfg.seed),
        format!(
            "sampler: abundance = {}, radius_nm = {}, coupling band = [{}, {}] Hz",
            cfg.abundance, cfg.radius_nm, cfg.min_coupling_cutoff_hz, cfg.max_coupling_cutoff_hz
        ),
    ];
    if sampled.empty {
        provenance.push("sampler: no nuclei survived — empty bath (noiseless limit)".into());
    }
    if sampled.truncated > 0 {
        provenance.push(format!(
            "sampler: {} in-band nuclei dropped at the {MAX_NUCLEI}-nucleus cap",
            sampled.truncated
        ));
    }
    for (idx, site) in sampled.sites.iter().enumerate() {
        provenance.push(format!(
            "C{}: position_nm = ({:.4}, {:.4}, {:.4}), r_nm = {:.4}, theta_r = {:.4}",
            idx + 1,
            site.position_nm[0],
            site.position_nm[1],
            site.position_nm[2],
            site.r_nm,
            site.theta_r
        ));
    }
    write_bath_string(&sampled.spec, &provenance)
}

/// Parse the bath text format. Unknown keys are rejected.
pub fn parse_bath_string(text: &str) -> Result<BathSpec, BathError> {
    let mut b_field_t: Option<f64> = None;
    let mut larmor_override: Option<f64> = None;
    let mut nuclei = Vec::new();
    let mut in_table = false;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        let n = lineno + 1;
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if line == "[nuclei]" {
            in_table = true;
            continue;
        }
        if !in_table {
            let (key, value) = line.split_once('=').ok_or_else(|| BathError::Parse {
                line: n,
                reason: format!("expected `key = value`, got `{line}`"),
            })?;
            let key = key.trim();
            let value: f64 = value.trim().parse().map_err(|_| BathError::Parse {
                line: n,
                reason: format!("bad number `{}` for key `{key}`", value.trim()),
            })?;
            match key {
                "b_field_t" => b_field_t = Some(value),
                "larmor_hz" => larmor_override = Some(value),
                other => {
                    return Err(BathError::Parse {
                        line: n,
                        reason: format!("unknown key `{other}`"),
                    })
                }
            }
        } else {
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() < 2 || fields.len() > 3 {
                return Err(BathError::Parse {
                    line: n,
                    reason: format!("expected `a_par_hz a_perp_hz [label]`, got `{line}`"),
                });
            }
            let a_par: f64 = fields[0].parse().map_err(|_| BathError::Parse {
                line: n,
                reason: format!("bad a_par_hz `{}`", fields[0]),
            })?;
            let a_perp: f64 = fields[1].parse().map_err(|_| BathError::Parse {
                line: n,
                reason: format!("bad a_perp_hz `{}`", fields[1]),
            })?;
            let label = fields.get(2).map(|s| s.to_string());
            nuclei.push(NucleusParams::new(a_par, a_perp, label)?);
        }
    }
    let b = b_field_t.ok_or(BathError::Parse {
        line: 0,
        reason: "missing required key `b_field_t`".into(),
    })?;
    let mut bath = BathSpec::new(b, nuclei)?;
    if let Some(l) = larmor_override {
        bath = bath.with_larmor_hz(l);
    }
    Ok(bath)
}

pub fn read_bath_file(path: &Path) -> Result<BathSpec, BathError> {
    parse_bath_string(&std::fs::read_to_string(path)?)
}

pub fn write_bath_file(path: &Path, content: &str) -> Result<(), BathError> {
    std::fs::write(path, content)?;
    Ok(())
}
