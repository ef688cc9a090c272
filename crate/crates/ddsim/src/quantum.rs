//! States, operators and exact propagators on small dense Hilbert spaces.
//!
//! Everything here is a pure function of its inputs; values are immutable
//! after construction and safe to share across threads. Comparisons of
//! states are global-phase insensitive throughout (fidelities, never raw
//! amplitude equality).

use nalgebra::{DMatrix, Matrix2, Vector2};
use num_complex::Complex64;
use thiserror::Error;

/// Dense complex matrix used by all operator types.
pub type CMat = DMatrix<Complex64>;
/// Stack-allocated 2×2 complex matrix for single-qubit hot paths.
pub type Mat2 = Matrix2<Complex64>;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Error)]
pub enum QuantumError {
    #[error("matrix is not Hermitian: max |H - H†| element = {residual:.3e}")]
    NotHermitian { residual: f64 },
    #[error("matrix is not unitary: max |U†U - 1| element = {residual:.3e}")]
    NotUnitary { residual: f64 },
    #[error("density matrix invalid: {reason}")]
    InvalidDensity { reason: String },
    #[error("state vector has zero norm")]
    ZeroNorm,
    #[error("polar angle {theta} outside [0, π]")]
    ThetaOutOfRange { theta: f64 },
    #[error("Rabi frequency must be positive, got {rabi_rad_s} rad/s")]
    NonPositiveRabi { rabi_rad_s: f64 },
    #[error("expected dimension {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
}

/// Rotation axis label for [`pauli`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    Z,
}

// ---------------------------------------------------------------------------
// Qubit states
// ---------------------------------------------------------------------------

/// Pure qubit state cos(θ/2)|0⟩ + sin(θ/2) e^{iφ} |1⟩.
///
/// |0⟩ is the bright m_s = 0 level, |1⟩ the m_s = −1 level. θ ∈ [0, π] and
/// φ ∈ [0, 2π) are the usual Bloch-sphere spherical coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitState {
    theta: f64,
    phi: f64,
}

impl QubitState {
    pub fn from_angles(theta: f64, phi: f64) -> Result<Self, QuantumError> {
        if !(0.0..=std::f64::consts::PI).contains(&theta) || !theta.is_finite() {
            return Err(QuantumError::ThetaOutOfRange { theta });
        }
        Ok(Self {
            theta,
            phi: phi.rem_euclid(std::f64::consts::TAU),
        })
    }

    /// Build from a complex amplitude pair, normalizing and fixing the
    /// global phase so that the |0⟩ amplitude is real and non-negative.
    pub fn from_amplitudes(a0: Complex64, a1: Complex64) -> Result<Self, QuantumError> {
        let norm = (a0.norm_sqr() + a1.norm_sqr()).sqrt();
        if norm < 1e-300 {
            return Err(QuantumError::ZeroNorm);
        }
        let theta = 2.0 * (a1.norm() / norm).atan2(a0.norm() / norm);
        let phi = if a1.norm() < 1e-15 || a0.norm() < 1e-15 {
            0.0
        } else {
            (a1.arg() - a0.arg()).rem_euclid(std::f64::consts::TAU)
        };
        Self::from_angles(theta, phi)
    }

    /// |x⟩ = (|0⟩ + |1⟩)/√2.
    pub fn x() -> Self {
        Self { theta: std::f64::consts::FRAC_PI_2, phi: 0.0 }
    }

    /// |y⟩ = (|0⟩ + i|1⟩)/√2, the state along the CPMG rotation axis.
    pub fn y() -> Self {
        Self { theta: std::f64::consts::FRAC_PI_2, phi: std::f64::consts::FRAC_PI_2 }
    }

    /// |0⟩, the bright state.
    pub fn zero() -> Self {
        Self { theta: 0.0, phi: 0.0 }
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    /// Amplitudes (a0, a1) with the |0⟩ amplitude real non-negative.
    pub fn amplitudes(&self) -> (Complex64, Complex64) {
        let half = 0.5 * self.theta;
        (
            Complex64::new(half.cos(), 0.0),
            Complex64::from_polar(half.sin(), self.phi),
        )
    }

    pub fn as_vector(&self) -> Vector2<Complex64> {
        let (a0, a1) = self.amplitudes();
        Vector2::new(a0, a1)
    }

    /// Projector |ψ⟩⟨ψ| as a density matrix.
    pub fn projector(&self) -> DensityMatrix {
        let v = self.as_vector();
        let m = CMat::from_fn(2, 2, |i, j| v[i] * v[j].conj());
        DensityMatrix::new(m).expect("pure-state projector is a valid density matrix")
    }
}

// ---------------------------------------------------------------------------
// Operator newtypes
// ---------------------------------------------------------------------------

/// Hermitian operator; houses every Hamiltonian in the crate.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOp {
    entries: CMat,
}

impl HermitianOp {
    /// Validates H = H† within 1e−12 on the largest element.
    pub fn new(entries: CMat) -> Result<Self, QuantumError> {
        let residual = hermiticity_residual(&entries);
        if residual > 1e-12 {
            return Err(QuantumError::NotHermitian { residual });
        }
        Ok(Self { entries })
    }

    /// Skips validation; for internal construction where Hermiticity holds
    /// by assembly.
    pub fn new_unchecked(entries: CMat) -> Self {
        Self { entries }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &CMat {
        &self.entries
    }

    pub fn zero(dim: usize) -> Self {
        Self { entries: CMat::zeros(dim, dim) }
    }
}

/// Unitary operator, U†U = 1 within 1e−10.
#[derive(Debug, Clone, PartialEq)]
pub struct Unitary {
    entries: CMat,
}

impl Unitary {
    pub fn new(entries: CMat) -> Result<Self, QuantumError> {
        let residual = unitarity_residual(&entries);
        if residual > 1e-10 {
            return Err(QuantumError::NotUnitary { residual });
        }
        Ok(Self { entries })
    }

    pub fn identity(dim: usize) -> Self {
        Self { entries: CMat::identity(dim, dim) }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &CMat {
        &self.entries
    }

    /// 2×2 view for qubit-sized unitaries.
    pub fn as_mat2(&self) -> Result<Mat2, QuantumError> {
        if self.dim() != 2 {
            return Err(QuantumError::DimensionMismatch { expected: 2, got: self.dim() });
        }
        Ok(Mat2::new(
            self.entries[(0, 0)],
            self.entries[(0, 1)],
            self.entries[(1, 0)],
            self.entries[(1, 1)],
        ))
    }
}

/// Density matrix: Hermitian, unit trace, positive semidefinite.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    entries: CMat,
}

impl DensityMatrix {
    pub fn new(entries: CMat) -> Result<Self, QuantumError> {
        let h_res = hermiticity_residual(&entries);
        if h_res > 1e-10 {
            return Err(QuantumError::InvalidDensity {
                reason: format!("not Hermitian, residual {h_res:.3e}"),
            });
        }
        let trace = entries.diagonal().iter().map(|c| c.re).sum::<f64>();
        if (trace - 1.0).abs() > 1e-10 {
            return Err(QuantumError::InvalidDensity {
                reason: format!("trace {trace} ≠ 1"),
            });
        }
        let min_eig = hermitian_eigen(&entries)
            .0
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min);
        if min_eig < -1e-9 {
            return Err(QuantumError::InvalidDensity {
                reason: format!("negative eigenvalue {min_eig:.3e}"),
            });
        }
        Ok(Self { entries })
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        let p = Complex64::new(1.0 / dim as f64, 0.0);
        Self { entries: CMat::identity(dim, dim) * p }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &CMat {
        &self.entries
    }
}

// ---------------------------------------------------------------------------
// Elementary operations
// ---------------------------------------------------------------------------

/// The 2×2 Spin-1/2 operator S = σ/2 along `axis`.
pub fn spin_half(axis: Axis) -> HermitianOp {
    let m = pauli(axis);
    HermitianOp::new_unchecked(m.entries() * Complex64::new(0.5, 0.0))
}

/// The 2×2 Pauli matrix for `axis`.
pub fn pauli(axis: Axis) -> HermitianOp {
    let entries = match axis {
        Axis::X => CMat::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]),
        Axis::Y => CMat::from_row_slice(2, 2, &[ZERO, -I, I, ZERO]),
        Axis::Z => CMat::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE]),
    };
    HermitianOp::new_unchecked(entries)
}

/// Kronecker product; the left factor is the most significant subsystem.
pub fn kron_mat(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

/// Kronecker product of Hermitian operators.
pub fn kron(a: &HermitianOp, b: &HermitianOp) -> HermitianOp {
    HermitianOp::new_unchecked(kron_mat(a.entries(), b.entries()))
}

/// Kronecker product of unitaries.
pub fn kron_unitary(a: &Unitary, b: &Unitary) -> Unitary {
    Unitary { entries: kron_mat(a.entries(), b.entries()) }
}

/// Exact propagator U = exp(−i h t) of a Hermitian generator, by
/// eigendecomposition. `h` is in rad/s, `t` in seconds.
pub fn propagator(h: &HermitianOp, t_s: f64) -> Result<Unitary, QuantumError> {
    let residual = hermiticity_residual(h.entries());
    if residual > 1e-8 {
        return Err(QuantumError::NotHermitian { residual });
    }
    let (eigvals, eigvecs) = hermitian_eigen(h.entries());
    let phases: Vec<Complex64> = eigvals
        .iter()
        .map(|&w| Complex64::from_polar(1.0, -w * t_s))
        .collect();
    let dim = h.dim();
    // U = V diag(e^{−iλt}) V†
    let mut scaled = eigvecs.clone();
    for (j, phase) in phases.iter().enumerate() {
        for i in 0..dim {
            scaled[(i, j)] *= phase;
        }
    }
    let u = scaled * eigvecs.adjoint();
    Ok(Unitary { entries: u })
}

/// Pulse propagator for a resonant drive of amplitude `rabi_rad_s` about the
/// equatorial axis at azimuth `phase`, detuned by `offset_rad_s`:
/// U = exp(−i t_p [Ω(cos φ Sx + sin φ Sy) + Δ Sz]) with t_p = angle/Ω.
///
/// With zero offset this is the ideal rotation by `angle` about the φ axis,
/// independent of Ω.
pub fn rotation(
    angle: f64,
    phase: f64,
    offset_rad_s: f64,
    rabi_rad_s: f64,
) -> Result<Unitary, QuantumError> {
    if rabi_rad_s <= 0.0 {
        return Err(QuantumError::NonPositiveRabi { rabi_rad_s });
    }
    Ok(Unitary { entries: rotation_mat2(angle, phase, offset_rad_s, rabi_rad_s) })
}

/// 2×2 matrix form of [`rotation`], for engine hot paths.
pub fn rotation_mat2(angle: f64, phase: f64, offset_rad_s: f64, rabi_rad_s: f64) -> CMat {
    let t_p = angle / rabi_rad_s;
    let hx = 0.5 * rabi_rad_s * phase.cos();
    let hy = 0.5 * rabi_rad_s * phase.sin();
    let hz = 0.5 * offset_rad_s;
    let h = Mat2::new(
        Complex64::new(hz, 0.0),
        Complex64::new(hx, -hy),
        Complex64::new(hx, hy),
        Complex64::new(-hz, 0.0),
    );
    let u = propagator2(&h, t_p);
    CMat::from_row_slice(2, 2, &[u[(0, 0)], u[(0, 1)], u[(1, 0)], u[(1, 1)]])
}

/// Closed-form 2×2 propagator exp(−i h t) for Hermitian h.
///
/// Splits h into trace and deviator parts: exp(−i h t) =
/// e^{−i m t} [cos(ωt) 1 − i sin(ωt)/ω (h − m 1)], m = tr h / 2.
pub fn propagator2(h: &Mat2, t_s: f64) -> Mat2 {
    let m = 0.5 * (h[(0, 0)].re + h[(1, 1)].re);
    let dz = 0.5 * (h[(0, 0)].re - h[(1, 1)].re);
    let c = h[(1, 0)];
    let omega = (dz * dz + c.norm_sqr()).sqrt();
    let global = Complex64::from_polar(1.0, -m * t_s);
    let (cos_t, sinc_t) = if omega * t_s.abs() < 1e-12 {
        (1.0, t_s)
    } else {
        ((omega * t_s).cos(), (omega * t_s).sin() / omega)
    };
    let a = global * Complex64::new(cos_t, -sinc_t * dz);
    let d = global * Complex64::new(cos_t, sinc_t * dz);
    let off = global * Complex64::new(0.0, -sinc_t);
    Mat2::new(a, off * c.conj(), off * c, d)
}

/// Survival probability ⟨ψ_I| ρ_F |ψ_I⟩ of an initial pure state in a final
/// reduced qubit state.
pub fn survival(initial: &QubitState, final_reduced: &DensityMatrix) -> Result<f64, QuantumError> {
    if final_reduced.dim() != 2 {
        return Err(QuantumError::DimensionMismatch { expected: 2, got: final_reduced.dim() });
    }
    let v = initial.as_vector();
    let rho = final_reduced.entries();
    let mut acc = ZERO;
    for i in 0..2 {
        for j in 0..2 {
            acc += v[i].conj() * rho[(i, j)] * v[j];
        }
    }
    Ok(acc.re.clamp(0.0, 1.0))
}

/// Trace out the trailing `bath_dim`-dimensional factor of a joint density
/// matrix of dimension system_dim × bath_dim.
pub fn partial_trace_bath(
    joint: &CMat,
    bath_dim: usize,
) -> Result<CMat, QuantumError> {
    let total = joint.nrows();
    if bath_dim == 0 || total % bath_dim != 0 {
        return Err(QuantumError::DimensionMismatch { expected: bath_dim, got: total });
    }
    let sys = total / bath_dim;
    let mut out = CMat::zeros(sys, sys);
    for i in 0..sys {
        for j in 0..sys {
            let mut acc = ZERO;
            for k in 0..bath_dim {
                acc += joint[(i * bath_dim + k, j * bath_dim + k)];
            }
            out[(i, j)] = acc;
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Internals
// ---------------------------------------------------------------------------

fn hermiticity_residual(m: &CMat) -> f64 {
    let mut max = 0.0f64;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let d = (m[(i, j)] - m[(j, i)].conj()).norm();
            if d > max {
                max = d;
            }
        }
    }
    max
}

fn unitarity_residual(m: &CMat) -> f64 {
    let prod = m.adjoint() * m;
    let mut max = 0.0f64;
    for i in 0..prod.nrows() {
        for j in 0..prod.ncols() {
            let expect = if i == j { ONE } else { ZERO };
            let d = (prod[(i, j)] - expect).norm();
            if d > max {
                max = d;
            }
        }
    }
    max
}

/// Eigendecomposition of a Hermitian matrix: (real eigenvalues, column
/// eigenvector matrix).
fn hermitian_eigen(m: &CMat) -> (Vec<f64>, CMat) {
    let se = m.clone().symmetric_eigen();
    let vals: Vec<f64> = se.eigenvalues.iter().cloned().collect();
    (vals, se.eigenvectors)
}
