//! Decay-curve analysis: stretched-exponential fitting, Larmor-revival
//! envelope extraction, and photon-count normalization.
//!
//! The fit model is p(t) = baseline + amplitude · exp(−(t/T₂)^n), solved by
//! damped Gauss–Newton least squares with the initial guess taken from a
//! log–log linearization of −ln((p − baseline)/amplitude). T₂ and n are kept
//! positive by iterating in log space; n is clamped to [0.3, 8].

use thiserror::Error;

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("need at least {min} points, got {got}")]
    TooFewPoints { min: usize, got: usize },
    #[error("degenerate data: all survival values equal ({value})")]
    DegenerateData { value: f64 },
    #[error("times must be strictly increasing (violation at index {index})")]
    NonIncreasingTimes { index: usize },
    #[error("rabi_max ({rabi_max}) must exceed rabi_min ({rabi_min})")]
    BadRabiReferences { rabi_max: f64, rabi_min: f64 },
    #[error(
        "curve spans {spanned:.3} revival periods; at least 2 are needed \
         (period 2Nτ_L = {period_s:.3e} s)"
    )]
    TooFewRevivals { spanned: f64, period_s: f64 },
}

/// Exponent clamp range of the stretched-exponential fit.
pub const EXPONENT_RANGE: (f64, f64) = (0.3, 8.0);

const MAX_ITERATIONS: usize = 200;
const GRADIENT_TOL: f64 = 1e-9;

/// Stretched-exponential fit output.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitResult {
    pub t2_s: f64,
    pub exponent_n: f64,
    pub amplitude: f64,
    pub baseline: f64,
    /// Residual sum of squares at the returned parameters.
    pub rss: f64,
    pub n_iterations: usize,
    /// Set only when the gradient norm fell below tolerance.
    pub converged: bool,
}

struct Params {
    amplitude: f64,
    baseline: f64,
    ln_t2: f64,
    ln_n: f64,
    baseline_fixed: bool,
}

impl Params {
    fn model(&self, t: f64) -> f64 {
        let t2 = self.ln_t2.exp();
        let n = self.ln_n.exp();
        let s = if t <= 0.0 { 0.0 } else { (t / t2).powf(n) };
        self.baseline + self.amplitude * (-s).exp()
    }

    fn rss(&self, pts: &[(f64, f64)]) -> f64 {
        pts.iter().map(|&(t, p)| (self.model(t) - p).powi(2)).sum()
    }

    /// Jacobian row of the model at t: derivatives with respect to
    /// (amplitude, baseline?, ln T₂, ln n).
    fn jac_row(&self, t: f64, row: &mut Vec<f64>) {
        let t2 = self.ln_t2.exp();
        let n = self.ln_n.exp();
        let s = if t <= 0.0 { 0.0 } else { (t / t2).powf(n) };
        let e = (-s).exp();
        row.clear();
        row.push(e);
        if !self.baseline_fixed {
            row.push(1.0);
        }
        // ∂/∂(ln T₂): amplitude·e·n·s
        row.push(self.amplitude * e * n * s);
        // ∂/∂(ln n): −amplitude·e·s·ln(t/T₂)·n, with the t→0 limit 0
        let dv = if t <= 0.0 || s == 0.0 {
            0.0
        } else {
            -self.amplitude * e * s * (t / t2).ln() * n
        };
        row.push(dv);
    }

    fn apply_step(&mut self, step: &[f64], scale: f64) {
        let mut i = 0;
        self.amplitude += scale * step[i];
        i += 1;
        if !self.baseline_fixed {
            self.baseline += scale * step[i];
            i += 1;
        }
        self.ln_t2 = (self.ln_t2 + scale * step[i]).clamp(-60.0, 60.0);
        i += 1;
        self.ln_n =
            (self.ln_n + scale * step[i]).clamp(EXPONENT_RANGE.0.ln(), EXPONENT_RANGE.1.ln());
    }
}

/// Solve the symmetric system (JᵀJ + ridge)·δ = −Jᵀr by Gaussian elimination.
fn solve_normal_equations(jtj: &mut [Vec<f64>], rhs: &mut [f64]) -> Option<Vec<f64>> {
    let n = rhs.len();
    let ridge = 1e-12
        * (0..n).map(|i| jtj[i][i]).fold(0.0f64, f64::max).max(1e-300);
    for (i, row) in jtj.iter_mut().enumerate() {
        row[i] += ridge;
    }
    for col in 0..n {
        let pivot_row = (col..n).max_by(|&a, &b| jtj[a][col].abs().total_cmp(&jtj[b][col].abs()))?;
        if jtj[pivot_row][col].abs() < 1e-300 {
            return None;
        }
        jtj.swap(col, pivot_row);
        rhs.swap(col, pivot_row);
        for r in (col + 1)..n {
            let f = jtj[r][col] / jtj[col][col];
            for c in col..n {
                jtj[r][c] -= f * jtj[col][c];
            }
            rhs[r] -= f * rhs[col];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut acc = rhs[i];
        for j in (i + 1)..n {
            acc -= jtj[i][j] * x[j];
        }
        x[i] = acc / jtj[i][i];
    }
    Some(x)
}

/// One damped Gauss–Newton run from a given start.
fn gauss_newton(pts: &[(f64, f64)], mut params: Params) -> (Params, usize, bool) {
    let n_params = if params.baseline_fixed { 3 } else { 4 };
    let mut rss = params.rss(pts);
    let mut converged = false;
    let mut iterations = 0;
    let mut row = Vec::with_capacity(4);
    for iter in 0..MAX_ITERATIONS {
        iterations = iter + 1;
        // assemble JᵀJ and Jᵀr
        let mut jtj = vec![vec![0.0; n_params]; n_params];
        let mut jtr = vec![0.0; n_params];
        for &(t, p) in pts {
            params.jac_row(t, &mut row);
            let r = params.model(t) - p;
            for a in 0..n_params {
                jtr[a] += row[a] * r;
                for b in a..n_params {
                    jtj[a][b] += row[a] * row[b];
                }
            }
        }
        for a in 0..n_params {
            for b in 0..a {
                jtj[a][b] = jtj[b][a];
            }
        }
        let grad_norm = jtr.iter().map(|g| g * g).sum::<f64>().sqrt();
        if grad_norm < GRADIENT_TOL {
            converged = true;
            break;
        }
        let mut rhs: Vec<f64> = jtr.iter().map(|g| -g).collect();
        let Some(step) = solve_normal_equations(&mut jtj, &mut rhs) else {
            break;
        };
        // damping by step halving
        let mut scale = 1.0;
        let mut improved = false;
        for _ in 0..25 {
            let mut trial = Params {
                amplitude: params.amplitude,
                baseline: params.baseline,
                ln_t2: params.ln_t2,
                ln_n: params.ln_n,
                baseline_fixed: params.baseline_fixed,
            };
            trial.apply_step(&step, scale);
            let trial_rss = trial.rss(pts);
            if trial_rss < rss {
                params = trial;
                rss = trial_rss;
                improved = true;
                break;
            }
            scale *= 0.5;
        }
        if !improved {
            // stuck: the gradient may still be above tolerance
            break;
        }
    }
    (params, iterations, converged)
}

fn linearized_start(pts: &[(f64, f64)], baseline: f64, amplitude: f64, baseline_fixed: bool) -> Params {
    let mut xs = Vec::new();
    let mut zs = Vec::new();
    for &(t, p) in pts {
        if t <= 0.0 {
            continue;
        }
        let y = (p - baseline) / amplitude;
        if y > 0.001 && y < 0.999 {
            xs.push(t.ln());
            zs.push((-(y.ln())).ln());
        }
    }
    let (slope, intercept) = if xs.len() >= 2 {
        let mx = xs.iter().sum::<f64>() / xs.len() as f64;
        let mz = zs.iter().sum::<f64>() / zs.len() as f64;
        let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
        let sxz: f64 = xs.iter().zip(&zs).map(|(x, z)| (x - mx) * (z - mz)).sum();
        let slope = if sxx > 0.0 { sxz / sxx } else { 1.0 };
        (slope, mz - slope * mx)
    } else {
        (1.0, -(pts[pts.len() / 2].0.max(1e-12)).ln())
    };
    let n0 = slope.clamp(EXPONENT_RANGE.0, EXPONENT_RANGE.1);
    // z = n·ln t − n·ln T₂  ⇒  ln T₂ = −intercept/n
    let ln_t2 = (-intercept / n0).clamp(-60.0, 60.0);
    Params { amplitude, baseline, ln_t2, ln_n: n0.ln(), baseline_fixed }
}

/// Start with a fixed trial exponent: T₂ from the median of t/(−ln y)^{1/n}.
fn fixed_exponent_start(
    pts: &[(f64, f64)],
    baseline: f64,
    amplitude: f64,
    baseline_fixed: bool,
    n: f64,
) -> Params {
    let mut estimates: Vec<f64> = pts
        .iter()
        .filter_map(|&(t, p)| {
            if t <= 0.0 {
                return None;
            }
            let y = (p - baseline) / amplitude;
            if y > 0.001 && y < 0.999 {
                Some(t / (-(y.ln())).powf(1.0 / n))
            } else {
                None
            }
        })
        .collect();
    estimates.sort_by(f64::total_cmp);
    let t2 = if estimates.is_empty() {
        pts[pts.len() / 2].0.max(1e-12)
    } else {
        estimates[estimates.len() / 2]
    };
    Params { amplitude, baseline, ln_t2: t2.ln().clamp(-60.0, 60.0), ln_n: n.ln(), baseline_fixed }
}

/// Least-squares fit of p(t) = baseline + amplitude·exp(−(t/T₂)^n).
///
/// `fix_baseline` pins the baseline (0.5 is the natural choice for
/// simulated survival curves); otherwise it is a free parameter. Starting
/// values come from the log–log linearization; if that start does not
/// converge, fixed-exponent starts n ∈ {1, 2, 3} are tried and the best
/// residual wins. After 200 iterations without meeting the gradient
/// tolerance the best-so-far parameters are returned with
/// `converged = false`.
pub fn fit_stretched_exp(
    points: &[(f64, f64)],
    fix_baseline: Option<f64>,
) -> Result<FitResult, AnalysisError> {
    if points.len() < 4 {
        return Err(AnalysisError::TooFewPoints { min: 4, got: points.len() });
    }
    for (i, w) in points.windows(2).enumerate() {
        if w[1].0 <= w[0].0 {
            return Err(AnalysisError::NonIncreasingTimes { index: i + 1 });
        }
    }
    let p_min = points.iter().map(|&(_, p)| p).fold(f64::INFINITY, f64::min);
    let p_max = points.iter().map(|&(_, p)| p).fold(f64::NEG_INFINITY, f64::max);
    if p_max - p_min < 1e-12 {
        return Err(AnalysisError::DegenerateData { value: p_max });
    }

    let baseline_fixed = fix_baseline.is_some();
    let baseline0 = fix_baseline.unwrap_or(p_min - 0.02 * (p_max - p_min));
    let amplitude0 = (p_max - baseline0).max(1e-6);

    let mut best: Option<(Params, usize, bool, f64)> = None;
    let mut consider = |candidate: (Params, usize, bool), pts: &[(f64, f64)]| {
        let rss = candidate.0.rss(pts);
        let better = match &best {
            None => true,
            Some((_, _, best_conv, best_rss)) => {
                (candidate.2 && !best_conv) || ((candidate.2 == *best_conv) && rss < *best_rss)
            }
        };
        if better {
            best = Some((candidate.0, candidate.1, candidate.2, rss));
        }
    };

    let first = gauss_newton(
        points,
        linearized_start(points, baseline0, amplitude0, baseline_fixed),
    );
    let first_converged = first.2;
    consider(first, points);
    if !first_converged {
        for n in [1.0, 2.0, 3.0] {
            let start = fixed_exponent_start(points, baseline0, amplitude0, baseline_fixed, n);
            consider(gauss_newton(points, start), points);
        }
    }

    let (params, n_iterations, converged, rss) = best.expect("at least one start ran");
    Ok(FitResult {
        t2_s: params.ln_t2.exp(),
        exponent_n: params.ln_n.exp(),
        amplitude: params.amplitude,
        baseline: params.baseline,
        rss,
        n_iterations,
        converged,
    })
}

// ---------------------------------------------------------------------------
// Revival envelope extraction
// ---------------------------------------------------------------------------

/// Revival maxima of a decay curve plus the windows where none was found.
#[derive(Debug, Clone, PartialEq)]
pub struct RevivalEnvelope {
    /// (time, survival) of the detected maximum in each revival window.
    pub maxima: Vec<(f64, f64)>,
    /// Revival indices k whose window contained no samples.
    pub skipped_windows: Vec<usize>,
    /// Predicted revival period 2·N·τ_L.
    pub period_s: f64,
}

/// Locate revival maxima in windows of half-width 0.25·(2Nτ_L) centered on
/// the predicted revival times k·2Nτ_L, k ≥ 1.
///
/// Within each window the highest interior local maximum wins. When the
/// curve is monotone across a fully-sampled window (no interior peak) the
/// sample nearest the window center is used; windows without samples, or
/// peakless windows truncated by the ends of the curve, are skipped and
/// reported.
pub fn revival_maxima(
    points: &[(f64, f64)],
    n_pulses: u32,
    tau_larmor_s: f64,
) -> Result<RevivalEnvelope, AnalysisError> {
    let period = 2.0 * n_pulses as f64 * tau_larmor_s;
    let t_min = points.first().map(|&(t, _)| t).unwrap_or(0.0);
    let t_max = points.last().map(|&(t, _)| t).unwrap_or(0.0);
    let spanned = t_max / period;
    if spanned < 2.0 {
        return Err(AnalysisError::TooFewRevivals { spanned, period_s: period });
    }
    let half_width = 0.25 * period;
    let eps = 1e-9 * period;
    let mut maxima = Vec::new();
    let mut skipped = Vec::new();
    let mut k = 1usize;
    while k as f64 * period - half_width <= t_max {
        let center = k as f64 * period;
        let lo = center - half_width;
        let hi = center + half_width;
        let in_window: Vec<usize> = (0..points.len())
            .filter(|&i| points[i].0 >= lo && points[i].0 <= hi)
            .collect();
        if in_window.is_empty() {
            skipped.push(k);
            k += 1;
            continue;
        }
        // interior local maxima, judged against curve-wide neighbors
        let mut best: Option<(f64, f64)> = None;
        for &i in &in_window {
            if i == 0 || i + 1 >= points.len() {
                continue;
            }
            let (_, p) = points[i];
            if points[i - 1].1 <= p && p >= points[i + 1].1 && best.is_none_or(|(_, bp)| p > bp) {
                best = Some(points[i]);
            }
        }
        let fully_covered = lo >= t_min - eps && hi <= t_max + eps;
        match best {
            Some(peak) => maxima.push(peak),
            None if fully_covered => {
                // monotone across the window: take the sample nearest the center
                let i = *in_window
                    .iter()
                    .min_by(|&&a, &&b| {
                        (points[a].0 - center).abs().total_cmp(&(points[b].0 - center).abs())
                    })
                    .unwrap();
                maxima.push(points[i]);
            }
            None => skipped.push(k),
        }
        k += 1;
    }
    Ok(RevivalEnvelope { maxima, skipped_windows: skipped, period_s: period })
}

/// First inter-revival segment of a decay curve: the points from the start
/// up to the first local minimum (the initial-decay window used for T₂⁰
/// fits). Monotone curves are returned whole.
pub fn initial_decay_segment(points: &[(f64, f64)]) -> &[(f64, f64)] {
    if points.len() < 3 {
        return points;
    }
    let p0 = points[0].1;
    for i in 1..points.len() - 1 {
        let dip = points[i].1 < p0 - 1e-3;
        if dip && points[i].1 < points[i - 1].1 && points[i].1 <= points[i + 1].1 {
            return &points[..=i];
        }
    }
    points
}

// ---------------------------------------------------------------------------
// Count normalization
// ---------------------------------------------------------------------------

/// Normalized curve plus the number of points outside [0, 1] (kept, flagged).
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedCurve {
    pub points: Vec<(f64, f64)>,
    pub out_of_range: usize,
}

/// Map raw photon counts to bright-state probability using the Rabi
/// oscillation extrema as the p = 1 and p = 0 references.
pub fn normalize_counts(
    raw: &[(f64, f64)],
    rabi_max: f64,
    rabi_min: f64,
) -> Result<NormalizedCurve, AnalysisError> {
    if rabi_max <= rabi_min {
        return Err(AnalysisError::BadRabiReferences { rabi_max, rabi_min });
    }
    for (i, w) in raw.windows(2).enumerate() {
        if w[1].0 <= w[0].0 {
            return Err(AnalysisError::NonIncreasingTimes { index: i + 1 });
        }
    }
    let span = rabi_max - rabi_min;
    let mut out_of_range = 0;
    let points = raw
        .iter()
        .map(|&(t, counts)| {
            let p = (counts - rabi_min) / span;
            if !(0.0..=1.0).contains(&p) {
                out_of_range += 1;
            }
            (t, p)
        })
        .collect();
    Ok(NormalizedCurve { points, out_of_range })
}
