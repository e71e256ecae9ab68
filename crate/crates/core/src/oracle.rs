//! Finite Gabor frames on `ℂ^N` as independent evidence for criterion verdicts.
//!
//! The continuous system `𝒢(g, aℤ×bℤ)` is modeled by sampling `g` at spacing
//! `h`, periodizing to length `N`, and using time shifts by `p = a/h` samples
//! and modulations by `q = bNh` frequency bins. Both must divide `N`. The
//! model's density `pq/N` equals `ab`. Its frame operator is assembled in
//! Walnut form,
//!
//! ```text
//! S[j, j'] = (N/q) Σ_{k < N/p} g[j - kp] conj(g[j' - kp])   when j ≡ j' mod N/q, else 0,
//! ```
//!
//! and its extreme eigenvalues are the frame bounds. Nothing here proves a
//! continuous statement; a finite model is evidence at the stated `N`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{GaborError, Result};
use crate::window::Window;

pub const DEFAULT_N: usize = 240;
pub const MAX_N: usize = 512;
/// Relative tolerance when snapping `(a, b)` to the discrete grid.
pub const SNAP_TOLERANCE: f64 = 0.01;
/// Periodization uses copies `m = -PERIODIZATION..=PERIODIZATION`.
const PERIODIZATION: i64 = 2;
const ASYMMETRY_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct FiniteGaborModel {
    n: usize,
    time_step: usize,
    freq_step: usize,
    window: Vec<Complex64>,
}

impl FiniteGaborModel {
    /// Model with the given window samples, normalized to unit norm.
    pub fn new(n: usize, time_step: usize, freq_step: usize, window: Vec<Complex64>) -> Result<Self> {
        if n == 0 || window.len() != n {
            return Err(GaborError::Domain(format!(
                "window must have N = {n} > 0 samples, got {}",
                window.len()
            )));
        }
        if time_step == 0 || n % time_step != 0 || freq_step == 0 || n % freq_step != 0 {
            return Err(GaborError::Domain(format!(
                "steps p = {time_step}, q = {freq_step} must divide N = {n}"
            )));
        }
        if time_step * freq_step > n {
            return Err(GaborError::Domain(format!(
                "density pq/N = {}/{n} exceeds 1; no frame is possible",
                time_step * freq_step
            )));
        }
        let norm = window.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(GaborError::Domain("window samples vanish".into()));
        }
        Ok(Self {
            n,
            time_step,
            freq_step,
            window: window.into_iter().map(|v| v / norm).collect(),
        })
    }

    /// Samples `w` at `t_j = j·h` (indices above `N/2` wrap to negative times),
    /// summing the copies shifted by multiples of `N·h`.
    pub fn from_window(w: &Window, n: usize, time_step: usize, freq_step: usize, h: f64) -> Result<Self> {
        let period = n as f64 * h;
        let samples = (0..n)
            .map(|j| {
                let t = if j < n.div_ceil(2) { j as f64 } else { j as f64 - n as f64 } * h;
                (-PERIODIZATION..=PERIODIZATION)
                    .map(|m| w.time_eval(t + m as f64 * period))
                    .sum()
            })
            .collect();
        Self::new(n, time_step, freq_step, samples)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn time_step(&self) -> usize {
        self.time_step
    }

    pub fn freq_step(&self) -> usize {
        self.freq_step
    }

    pub fn window(&self) -> &[Complex64] {
        &self.window
    }

    pub fn lattice_size(&self) -> usize {
        (self.n / self.time_step) * (self.n / self.freq_step)
    }

    pub fn frame_operator(&self) -> DMatrix<Complex64> {
        let n = self.n;
        let period = n / self.freq_step;
        let shifts = n / self.time_step;
        let factor = period as f64;
        let g = &self.window;
        let mut s = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
        for j in 0..n {
            for jp in (j % period..n).step_by(period) {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in 0..shifts {
                    let shift = k * self.time_step;
                    acc += g[(j + n - shift) % n] * g[(jp + n - shift) % n].conj();
                }
                s[(j, jp)] = acc * factor;
            }
        }
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FrameBounds {
    #[serde(rename = "A")]
    pub lower: f64,
    #[serde(rename = "B")]
    pub upper: f64,
}

impl FrameBounds {
    pub fn ratio(&self) -> f64 {
        self.lower / self.upper
    }
}

/// Extreme eigenvalues of the frame operator.
pub fn finite_frame_bounds(model: &FiniteGaborModel) -> Result<FrameBounds> {
    let s = model.frame_operator();
    let adjoint = s.adjoint();
    let asymmetry = (&s - &adjoint).iter().map(|v| v.norm()).fold(0.0, f64::max);
    let symmetric = (&s + adjoint) * Complex64::new(0.5, 0.0);
    let eigen = nalgebra::SymmetricEigen::try_new(symmetric, f64::EPSILON, 0)
        .ok_or_else(|| GaborError::Numerical("Hermitian eigensolver did not converge".into()))?;
    let upper = eigen.eigenvalues.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lower = eigen.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    if asymmetry > ASYMMETRY_TOLERANCE * upper {
        return Err(GaborError::Numerical(format!(
            "frame operator asymmetry {asymmetry:e} exceeds {ASYMMETRY_TOLERANCE:e}·B"
        )));
    }
    Ok(FrameBounds {
        lower: lower.max(0.0),
        upper,
    })
}

/// Discrete parameters chosen for a continuous pair `(a, b)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Snap {
    pub n: usize,
    pub time_step: usize,
    pub freq_step: usize,
    /// Sample spacing `h`.
    pub spacing: f64,
    pub snapped_a: f64,
    pub snapped_b: f64,
}

fn divisors(n: usize) -> impl Iterator<Item = usize> {
    (1..=n).filter(move |d| n % d == 0)
}

/// Picks `p | N`, `h = a/p` and `q = round(abN/p)` with `q | N` and `b` matched
/// within 1%, maximizing how well `N·h` covers the window in time and `1/h` in
/// frequency.
pub fn snap(w: &Window, a: f64, b: f64, n: usize) -> Result<Snap> {
    if !(a > 0.0 && b > 0.0) || !a.is_finite() || !b.is_finite() {
        return Err(GaborError::Domain(format!("a, b must be positive, got ({a}, {b})")));
    }
    if n == 0 || n > MAX_N {
        return Err(GaborError::Domain(format!("N must lie in [1, {MAX_N}], got {n}")));
    }
    let time_extent = w.time_radius().min(8.0);
    let freq_extent = w.freq_radius().min(8.0);
    let mut best: Option<(f64, Snap)> = None;
    for p in divisors(n) {
        let h = a / p as f64;
        let q = (a * b * n as f64 / p as f64).round() as usize;
        if q == 0 || n % q != 0 || p * q > n {
            continue;
        }
        let snapped_b = q as f64 / (n as f64 * h);
        if ((snapped_b - b) / b).abs() > SNAP_TOLERANCE {
            continue;
        }
        let coverage = (n as f64 * h / 2.0 / time_extent).min(1.0 / (2.0 * h) / freq_extent);
        let candidate = Snap {
            n,
            time_step: p,
            freq_step: q,
            spacing: h,
            snapped_a: a,
            snapped_b,
        };
        if best.is_none_or(|(c, _)| coverage > c) {
            best = Some((coverage, candidate));
        }
    }
    best.map(|(_, s)| s)
        .ok_or(GaborError::ParameterNotRepresentable { a, b, n })
}

/// Smallest `N` in `[min_n, MAX_N]` at which `(a, b)` can be snapped.
pub fn smallest_representable_n(w: &Window, a: f64, b: f64, min_n: usize) -> Option<usize> {
    (min_n.max(1)..=MAX_N).find(|&n| snap(w, a, b, n).is_ok())
}

/// Finite-model bounds for `𝒢(w, aℤ×bℤ)` at dimension `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleReport {
    #[serde(flatten)]
    pub bounds: FrameBounds,
    pub ratio: f64,
    #[serde(rename = "N")]
    pub n: usize,
    pub snapped_a: f64,
    pub snapped_b: f64,
}

pub fn oracle_bounds(w: &Window, a: f64, b: f64, n: usize) -> Result<OracleReport> {
    let s = snap(w, a, b, n)?;
    let model = FiniteGaborModel::from_window(w, n, s.time_step, s.freq_step, s.spacing)?;
    let bounds = finite_frame_bounds(&model)?;
    Ok(OracleReport {
        bounds,
        ratio: bounds.ratio(),
        n,
        snapped_a: s.snapped_a,
        snapped_b: s.snapped_b,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Equivalence {
    pub rect: OracleReport,
    pub square: OracleReport,
    /// `|A₁/B₁ - A₂/B₂|`
    pub rel_gap: f64,
}

/// Compares `𝒢(w, aℤ×bℤ)` with its unitary image `𝒢(𝒟_b w, abℤ×ℤ)`.
pub fn equivalence_check(w: &Window, a: f64, b: f64, n: usize) -> Result<Equivalence> {
    let rect = oracle_bounds(w, a, b, n)?;
    let square = oracle_bounds(&w.dilate(b)?, a * b, 1.0, n)?;
    Ok(Equivalence {
        rect,
        square,
        rel_gap: (rect.ratio - square.ratio).abs(),
    })
}
