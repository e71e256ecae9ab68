//! The Wirtinger density bound and frame certification on `δℤ×ℤ`.
//!
//! For a window `g` and `ω ∈ [0, 1]`,
//!
//! ```text
//! δ_g(ω) = ½ · sqrt( N(ω) / D(ω) ),   N = Σ_k |ĝ(k+ω)|²,   D = Σ_k (k+ω)² |ĝ(k+ω)|²
//! ```
//!
//! and `𝒢(g, δℤ×ℤ)` is a frame whenever `δ < δ_g(ω)` for every ω. The test is
//! one-sided: failing it says nothing about the system.
//!
//! Sums run over `|k| ≤ K` with `K` grown until a closed-form geometric bound
//! on the omitted terms, derived from the window's envelope, drops below
//! `tail_tol` times the partial sum. Windows without an envelope fall back to
//! a heuristic stopping rule and every result built on them is marked
//! non-rigorous.

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{GaborError, Result};
use crate::summation::CompensatedSum;
use crate::window::{Envelope, Window};

pub const DEFAULT_TAIL_TOL: f64 = 1e-12;
pub const DEFAULT_GRID_POINTS: usize = 1001;
pub const MAX_TAIL_TOL: f64 = 1e-2;
/// Relative floor used in the stopping rule when a partial sum is tiny.
pub const FLOOR_GUARD: f64 = 1e-30;
/// Summation cap `K_max`.
pub const MAX_TERMS: usize = 1_000_000;
/// Relative allowance for floating-point error in the evaluated terms.
pub const ROUNDING_SLACK: f64 = 64.0 * f64::EPSILON;
const REFINEMENT_LEVELS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LatticeSumResult {
    pub value: f64,
    /// Bound on the omitted terms; only an estimate when `rigorous` is false.
    pub tail_bound: f64,
    /// Summation range `|k| ≤ terms_used`.
    pub terms_used: usize,
    pub rigorous: bool,
}

fn check_tail_tol(tail_tol: f64) -> Result<()> {
    if tail_tol > 0.0 && tail_tol <= MAX_TAIL_TOL {
        Ok(())
    } else {
        Err(GaborError::Precondition(format!(
            "tail tolerance must lie in (0, {MAX_TAIL_TOL}], got {tail_tol}"
        )))
    }
}

fn check_omega(omega: f64) -> Result<()> {
    if (0.0..=1.0).contains(&omega) {
        Ok(())
    } else {
        Err(GaborError::Domain(format!("omega must lie in [0, 1], got {omega}")))
    }
}

/// Bound on `Σ_{|k|>K} |k+ω|^{2p} |ĝ(k+ω)|²` from the envelope.
///
/// Every omitted node satisfies `|k+ω| ≥ K =: x₀`. With `f(x) = x^{2p} e^{-2αx²}`
/// decreasing on `[x₀, ∞)` and `f(x+1)/f(x) ≤ ρ = (1+1/x₀)^{2p} e^{-2α(2x₀+1)}`,
/// each side is at most `C² f(x₀) / (1 - ρ)`.
fn envelope_tail(env: &Envelope, power: u32, k: usize) -> f64 {
    let x0 = k as f64;
    let two_alpha = 2.0 * env.rate;
    let rho = (1.0 + 1.0 / x0).powi(2 * power as i32) * (-two_alpha * (2.0 * x0 + 1.0)).exp();
    if rho >= 1.0 {
        return f64::INFINITY;
    }
    let log_tail = (2.0 * env.constant * env.constant).ln() + 2.0 * power as f64 * x0.ln()
        - two_alpha * x0 * x0
        - (-rho).ln_1p();
    log_tail.exp()
}

/// Smallest K from which [`envelope_tail`] is valid.
fn first_certifiable_k(env: &Envelope, power: u32) -> usize {
    let monotone = (power as f64 / (2.0 * env.rate)).sqrt();
    1.max(env.threshold.ceil() as usize).max(monotone.ceil() as usize)
}

fn heuristic_cap(w: &Window) -> usize {
    (w.freq_radius().ceil() as usize + 1).min(MAX_TERMS)
}

/// Sums `Σ (k+ω)^{2p} |ĝ(k+ω)|²` for every requested power with a common K.
fn lattice_sums(w: &Window, omega: f64, powers: &[u32], tail_tol: f64) -> Vec<LatticeSumResult> {
    let envelope = w.envelope();
    let cap = if envelope.is_some() {
        MAX_TERMS
    } else {
        heuristic_cap(w)
    };
    let weight = |x: f64, p: u32| x.powi(2 * p as i32);
    let mut sums: Vec<CompensatedSum> = vec![CompensatedSum::new(); powers.len()];
    let mut last_shells = vec![[0.0f64; 2]; powers.len()];

    let x = omega;
    let density = w.freq_eval(x).norm_sqr();
    for (s, &p) in sums.iter_mut().zip(powers) {
        s.add(weight(x, p) * density);
    }

    let mut k = 0;
    while k < cap {
        k += 1;
        let xp = k as f64 + omega;
        let xm = -(k as f64) + omega;
        let dp = w.freq_eval(xp).norm_sqr();
        let dm = w.freq_eval(xm).norm_sqr();
        for (i, &p) in powers.iter().enumerate() {
            let shell = weight(xp, p) * dp + weight(xm, p) * dm;
            sums[i].add(shell);
            last_shells[i] = [last_shells[i][1], shell];
        }
        let done = powers.iter().enumerate().all(|(i, &p)| {
            let value = sums[i].value();
            if value <= 0.0 {
                return false;
            }
            match &envelope {
                Some(env) => {
                    k >= first_certifiable_k(env, p)
                        && envelope_tail(env, p, k) <= tail_tol * value.max(FLOOR_GUARD)
                }
                None => k >= 2 && last_shells[i].iter().all(|&s| s <= tail_tol * value),
            }
        });
        if done {
            break;
        }
    }

    powers
        .iter()
        .enumerate()
        .map(|(i, &p)| LatticeSumResult {
            value: sums[i].value(),
            tail_bound: match &envelope {
                Some(env) if k >= first_certifiable_k(env, p) => envelope_tail(env, p, k),
                Some(_) => f64::INFINITY,
                None => last_shells[i][1],
            },
            terms_used: k,
            rigorous: envelope.is_some(),
        })
        .collect()
}

/// `Σ_k (k+ω)^{2p} |ĝ(k+ω)|²` with a certified tail bound.
pub fn lattice_sum(w: &Window, omega: f64, power: u32, tail_tol: f64) -> Result<LatticeSumResult> {
    check_tail_tol(tail_tol)?;
    check_omega(omega)?;
    if power > 2 {
        return Err(GaborError::Domain(format!(
            "power must be 0, 1 or 2, got {power}"
        )));
    }
    let result = lattice_sums(w, omega, &[power], tail_tol)[0];
    if result.value == 0.0 {
        return Err(GaborError::ZeroSum {
            omega,
            terms: result.terms_used,
        });
    }
    Ok(result)
}

/// `δ_g(ω)` with a certified enclosure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeltaEstimate {
    pub omega: f64,
    pub value: f64,
    pub low: f64,
    pub high: f64,
    pub numerator: LatticeSumResult,
    pub denominator: LatticeSumResult,
    pub rigorous: bool,
}

pub fn delta_g(w: &Window, omega: f64, tail_tol: f64) -> Result<DeltaEstimate> {
    check_tail_tol(tail_tol)?;
    check_omega(omega)?;
    let sums = lattice_sums(w, omega, &[0, 1], tail_tol);
    let (num, den) = (sums[0], sums[1]);
    if num.value == 0.0 {
        return Err(GaborError::ZeroSum {
            omega,
            terms: num.terms_used,
        });
    }
    if den.value <= f64::EPSILON * num.value {
        return Err(GaborError::Degenerate {
            omega,
            numerator: num.value,
            denominator: den.value,
        });
    }
    let eta = ROUNDING_SLACK;
    let value = 0.5 * (num.value / den.value).sqrt();
    let low = 0.5 * (num.value * (1.0 - eta) / ((den.value + den.tail_bound) * (1.0 + eta))).sqrt();
    let high = 0.5 * ((num.value + num.tail_bound) * (1.0 + eta) / (den.value * (1.0 - eta))).sqrt();
    Ok(DeltaEstimate {
        omega,
        value,
        low,
        high,
        numerator: num,
        denominator: den,
        rigorous: num.rigorous && den.rigorous,
    })
}

/// Outcome of `δ_g` at one ω.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum ProfilePoint {
    Value(DeltaEstimate),
    /// `D(ω) = 0`: `δ_g(ω)` is infinite.
    Degenerate { omega: f64 },
    /// `N(ω) = 0`: `δ_g(ω)` is undefined.
    ZeroSum { omega: f64 },
}

impl ProfilePoint {
    fn evaluate(w: &Window, omega: f64, tail_tol: f64) -> Result<Self> {
        match delta_g(w, omega, tail_tol) {
            Ok(d) => Ok(ProfilePoint::Value(d)),
            Err(GaborError::Degenerate { .. }) => Ok(ProfilePoint::Degenerate { omega }),
            Err(GaborError::ZeroSum { .. }) => Ok(ProfilePoint::ZeroSum { omega }),
            Err(e) => Err(e),
        }
    }

    pub fn omega(&self) -> f64 {
        match self {
            ProfilePoint::Value(d) => d.omega,
            ProfilePoint::Degenerate { omega } | ProfilePoint::ZeroSum { omega } => *omega,
        }
    }

    pub fn estimate(&self) -> Option<&DeltaEstimate> {
        match self {
            ProfilePoint::Value(d) => Some(d),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MinimumKind {
    /// Minimum over the evaluated ω only.
    Grid,
    /// The window declares its minimizer and it was evaluated.
    DeclaredMinimizer,
}

/// `δ_g` sampled over `[0, 1]`.
#[derive(Debug, Clone, Serialize)]
pub struct DensityProfile {
    /// Uniform grid points in increasing ω.
    pub points: Vec<ProfilePoint>,
    /// Extra points from local bisection around the grid minimum.
    pub refinements: Vec<ProfilePoint>,
    /// Smallest certified lower enclosure over all evaluated points.
    pub min_value: f64,
    /// Grid index of the smallest lower enclosure.
    pub argmin: usize,
    /// ω of the smallest lower enclosure after refinement.
    pub argmin_omega: f64,
    pub tail_tol: f64,
    pub minimum: MinimumKind,
    /// False when some point is degenerate or has a vanishing numerator.
    pub certifying: bool,
    pub rigorous: bool,
}

impl DensityProfile {
    pub fn omegas(&self) -> Vec<f64> {
        self.points.iter().map(ProfilePoint::omega).collect()
    }

    /// The evaluated point whose lower enclosure is `min_value`.
    pub fn minimizer(&self) -> Option<&DeltaEstimate> {
        self.points
            .iter()
            .chain(&self.refinements)
            .filter_map(ProfilePoint::estimate)
            .find(|d| d.omega == self.argmin_omega)
    }

    pub fn deltas(&self) -> Vec<Option<f64>> {
        self.points
            .iter()
            .map(|p| p.estimate().map(|d| d.value))
            .collect()
    }

    /// Grid and refinement points merged in increasing ω.
    pub fn all_points(&self) -> Vec<ProfilePoint> {
        let mut all: Vec<ProfilePoint> = self
            .points
            .iter()
            .chain(&self.refinements)
            .copied()
            .collect();
        all.sort_by(|a, b| a.omega().total_cmp(&b.omega()));
        all.dedup_by(|a, b| a.omega() == b.omega());
        all
    }

    /// CSV with header `omega,delta_g_low,delta_g,delta_g_high,tail_bound_num,tail_bound_den`.
    ///
    /// Degenerate points print `inf` for δ and `nan` for the tails, vanishing
    /// numerators print `nan` throughout.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record([
            "omega",
            "delta_g_low",
            "delta_g",
            "delta_g_high",
            "tail_bound_num",
            "tail_bound_den",
        ])?;
        for p in self.all_points() {
            let row = match p {
                ProfilePoint::Value(d) => [
                    d.omega,
                    d.low,
                    d.value,
                    d.high,
                    d.numerator.tail_bound,
                    d.denominator.tail_bound,
                ],
                ProfilePoint::Degenerate { omega } => [
                    omega,
                    f64::INFINITY,
                    f64::INFINITY,
                    f64::INFINITY,
                    f64::NAN,
                    f64::NAN,
                ],
                ProfilePoint::ZeroSum { omega } => [omega, f64::NAN, f64::NAN, f64::NAN, f64::NAN, f64::NAN],
            };
            w.write_record(row.iter().map(|&v| crate::format_float(v)))?;
        }
        w.flush()?;
        Ok(())
    }
}

fn lowest(points: &[ProfilePoint]) -> Option<(usize, f64)> {
    points
        .iter()
        .enumerate()
        .filter_map(|(i, p)| p.estimate().map(|d| (i, d.low)))
        .min_by(|a, b| a.1.total_cmp(&b.1))
}

/// Evaluates `δ_g` on `grid_points` uniform ω in `[0, 1]` and refines around the minimum.
pub fn min_delta(w: &Window, grid_points: usize, tail_tol: f64) -> Result<DensityProfile> {
    if grid_points < 3 || grid_points % 2 == 0 {
        return Err(GaborError::InvalidGrid(grid_points));
    }
    check_tail_tol(tail_tol)?;
    let last = (grid_points - 1) as f64;
    let points = (0..grid_points)
        .into_par_iter()
        .map(|j| ProfilePoint::evaluate(w, j as f64 / last, tail_tol))
        .collect::<Result<Vec<_>>>()?;

    let certifying = points.iter().all(|p| p.estimate().is_some());
    let rigorous = points.iter().all(|p| p.estimate().is_none_or(|d| d.rigorous));

    let Some((argmin, grid_min)) = lowest(&points) else {
        return Ok(DensityProfile {
            points,
            refinements: Vec::new(),
            min_value: f64::NAN,
            argmin: 0,
            argmin_omega: f64::NAN,
            tail_tol,
            minimum: MinimumKind::Grid,
            certifying: false,
            rigorous,
        });
    };

    let mut refinements = Vec::new();
    let mut best = (points[argmin].omega(), grid_min);
    let mut step = 1.0 / last;
    for _ in 0..REFINEMENT_LEVELS {
        step /= 2.0;
        let center = best.0;
        for omega in [center - step, center + step] {
            if !(0.0..=1.0).contains(&omega) {
                continue;
            }
            let p = ProfilePoint::evaluate(w, omega, tail_tol)?;
            if let Some(d) = p.estimate() {
                if d.low < best.1 {
                    best = (omega, d.low);
                }
            }
            refinements.push(p);
        }
    }

    let minimum = match w.known_minimizer() {
        Some(m) if points.iter().any(|p| p.omega() == m) => MinimumKind::DeclaredMinimizer,
        _ => MinimumKind::Grid,
    };
    let certifying = certifying && refinements.iter().all(|p| p.estimate().is_some());
    let rigorous = rigorous && refinements.iter().all(|p| p.estimate().is_none_or(|d| d.rigorous));

    Ok(DensityProfile {
        points,
        refinements,
        min_value: best.1,
        argmin,
        argmin_omega: best.0,
        tail_tol,
        minimum,
        certifying,
        rigorous,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum VerdictStatus {
    Certified,
    Inconclusive,
}

/// Outcome of the criterion for `𝒢(g, δℤ×ℤ)`. There is deliberately no
/// "not a frame" status.
#[derive(Debug, Clone, Serialize)]
pub struct CriterionVerdict {
    pub window: String,
    pub status: VerdictStatus,
    pub delta_tested: f64,
    /// Certified lower bound on `min_ω δ_g(ω)` over the evaluated points.
    pub min_delta_g: f64,
    /// `min_delta_g - delta_tested`.
    pub margin: f64,
    pub argmin_omega: f64,
    /// Enclosure `[low, high]` of `δ_g` at `argmin_omega` and the value inside it.
    pub argmin_low: f64,
    pub argmin_value: f64,
    pub argmin_high: f64,
    pub minimum: MinimumKind,
    pub rigorous: bool,
}

fn first_failure(profile: &DensityProfile) -> GaborError {
    for p in profile.points.iter().chain(&profile.refinements) {
        match *p {
            ProfilePoint::Degenerate { omega } => {
                return GaborError::Degenerate {
                    omega,
                    numerator: f64::NAN,
                    denominator: 0.0,
                }
            }
            ProfilePoint::ZeroSum { omega } => return GaborError::ZeroSum { omega, terms: MAX_TERMS },
            ProfilePoint::Value(_) => {}
        }
    }
    GaborError::Numerical("profile has no evaluable point".into())
}

/// Certifies `𝒢(w, δℤ×ℤ)` when `δ` lies below the certified minimum of `δ_g`.
pub fn certify(w: &Window, delta: f64, grid_points: usize, tail_tol: f64) -> Result<CriterionVerdict> {
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(GaborError::Domain(format!("co-volume must be positive, got {delta}")));
    }
    let profile = min_delta(w, grid_points, tail_tol)?;
    if !profile.certifying {
        return Err(first_failure(&profile));
    }
    let margin = profile.min_value - delta;
    let at_min = *profile
        .minimizer()
        .ok_or_else(|| GaborError::Numerical("profile minimum was not evaluated".into()))?;
    Ok(CriterionVerdict {
        window: w.label().to_string(),
        status: if margin > 0.0 {
            VerdictStatus::Certified
        } else {
            VerdictStatus::Inconclusive
        },
        delta_tested: delta,
        min_delta_g: profile.min_value,
        margin,
        argmin_omega: profile.argmin_omega,
        argmin_low: at_min.low,
        argmin_value: at_min.value,
        argmin_high: at_min.high,
        minimum: profile.minimum,
        rigorous: profile.rigorous,
    })
}

/// Verdict for `𝒢(w, aℤ×bℤ)` through its unitary equivalent `𝒢(𝒟_b w, abℤ×ℤ)`.
pub fn certify_rect(w: &Window, a: f64, b: f64, grid_points: usize, tail_tol: f64) -> Result<CriterionVerdict> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(GaborError::Domain(format!("a must be positive, got {a}")));
    }
    certify(&w.dilate(b)?, a * b, grid_points, tail_tol)
}

/// Both sides of `∫₀¹|f|² ≤ (4/π²) ∫₀¹|f'|²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WirtingerSides {
    pub lhs: f64,
    pub rhs: f64,
}

/// Evaluates the Wirtinger inequality for `f` sampled uniformly on `[0, 1]`
/// (endpoints included), with `f(0)·f(1) = 0`.
pub fn wirtinger_residual(samples: &[f64]) -> Result<WirtingerSides> {
    let n = samples.len();
    if n < 101 {
        return Err(GaborError::Precondition(format!(
            "need at least 101 samples, got {n}"
        )));
    }
    if (samples[0] * samples[n - 1]).abs() > 1e-8 {
        return Err(GaborError::Precondition(format!(
            "boundary condition f(0)·f(1) = 0 violated: {}",
            samples[0] * samples[n - 1]
        )));
    }
    let h = 1.0 / (n - 1) as f64;
    let derivative: Vec<f64> = (0..n)
        .map(|j| match j {
            0 => (-3.0 * samples[0] + 4.0 * samples[1] - samples[2]) / (2.0 * h),
            j if j == n - 1 => (3.0 * samples[j] - 4.0 * samples[j - 1] + samples[j - 2]) / (2.0 * h),
            j => (samples[j + 1] - samples[j - 1]) / (2.0 * h),
        })
        .collect();
    let trapezoid = |v: &[f64]| {
        let s: CompensatedSum = v
            .iter()
            .enumerate()
            .map(|(j, x)| if j == 0 || j == n - 1 { 0.5 * x * x } else { x * x })
            .collect();
        s.value() * h
    };
    let four_over_pi_sq = 4.0 / (std::f64::consts::PI * std::f64::consts::PI);
    Ok(WirtingerSides {
        lhs: trapezoid(samples),
        rhs: four_over_pi_sq * trapezoid(&derivative),
    })
}
