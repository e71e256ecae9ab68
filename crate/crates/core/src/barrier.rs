//! The odd-window barrier: `δ_g(0) < 1/2` whenever `ĝ(0) = 0`.
//!
//! At `ω = 0` the numerator and denominator differ by
//! `Σ_k (k² - 1)|ĝ(k)|²`, whose only negative term is `-|ĝ(0)|²`. For an odd
//! window that term vanishes and every `|k| ≥ 2` contributes positively, so
//! `δ_g(0) < 1/2` and the criterion can never certify co-volume `≥ 1/2`.

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::criterion::{delta_g, ROUNDING_SLACK};
use crate::error::{GaborError, Result};
use crate::summation::{log_sum_exp, CompensatedSum};
use crate::window::{classify_parity, Parity, Window};

/// Below this `|ĝ(0)|²` an odd window counts as vanishing at the origin.
pub const ODD_ORIGIN_TOLERANCE: f64 = 1e-20;

#[derive(Debug, Clone, Serialize)]
pub struct BarrierReport {
    pub window: String,
    pub parity: Parity,
    /// `Σ_k |ĝ(k)|²`
    pub num0: f64,
    /// `Σ_k k² |ĝ(k)|²`
    pub den0: f64,
    pub delta0: f64,
    /// Certified upper enclosure of `δ_g(0)`, capped at 1/2 when `strict` holds.
    pub delta0_high: f64,
    /// True when `num0 < den0` is certified.
    pub strict: bool,
    /// `|ĝ(0)|²`
    pub ghat0: f64,
}

/// Certified lower bound on `Σ_k (k² - 1)|ĝ(k)|²`.
///
/// The `|k| ≥ 2` terms are nonnegative, so any partial sum bounds them from below.
fn certified_deficit(w: &Window, ghat0: f64, terms: usize) -> f64 {
    let positive: CompensatedSum = (2..=terms.max(2))
        .flat_map(|k| [k as f64, -(k as f64)])
        .map(|x| (x * x - 1.0) * w.freq_eval(x).norm_sqr())
        .collect();
    positive.value() * (1.0 - ROUNDING_SLACK) - ghat0 * (1.0 + ROUNDING_SLACK)
}

/// `δ_g(0)` together with the certified strict inequality between its sums.
pub fn delta_at_zero(w: &Window, tail_tol: f64) -> Result<BarrierReport> {
    if w.envelope().is_none() {
        return Err(GaborError::Precondition(format!(
            "window '{}' has no decay envelope",
            w.label()
        )));
    }
    let parity = classify_parity(w);
    let ghat0 = w.freq_eval(0.0).norm_sqr();
    if parity == Parity::Odd && ghat0 >= ODD_ORIGIN_TOLERANCE {
        return Err(GaborError::Precondition(format!(
            "odd window '{}' has |ĝ(0)|² = {ghat0:e}",
            w.label()
        )));
    }
    let d = delta_g(w, 0.0, tail_tol)?;
    let strict = certified_deficit(w, ghat0, d.numerator.terms_used) > 0.0;
    Ok(BarrierReport {
        window: w.label().to_string(),
        parity,
        num0: d.numerator.value,
        den0: d.denominator.value,
        delta0: d.value,
        delta0_high: if strict { d.high.min(0.5) } else { d.high },
        strict,
        ghat0,
    })
}

/// Reports for a corpus of odd windows.
pub fn odd_barrier_suite(corpus: &[Window], tail_tol: f64) -> Result<Vec<BarrierReport>> {
    if let Some(w) = corpus.iter().find(|w| classify_parity(w) != Parity::Odd) {
        return Err(GaborError::Precondition(format!(
            "window '{}' is not odd ({})",
            w.label(),
            classify_parity(w)
        )));
    }
    corpus.iter().map(|w| delta_at_zero(w, tail_tol)).collect()
}

/// One row of the dilated first-Hermite scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanRow {
    pub b: f64,
    pub delta0_low: f64,
    pub delta0: f64,
    /// `0.5 - 10^log10_margin`; rounds to 0.5 once the margin is below an ulp.
    pub delta0_high: f64,
    /// `log10` of a certified lower bound on `1/2 - δ(0)`.
    pub log10_margin: f64,
}

impl ScanRow {
    pub fn strict(&self) -> bool {
        self.log10_margin.is_finite()
    }
}

/// Terms `k^{2p} e^{-x(k²-1)}` for `k ≥ 2` until the geometric tail bound
/// falls below `tol` relative to `1 + partial`. Returns (partial, tail, last k).
fn reduced_sum(x: f64, power: i32, tol: f64) -> (f64, f64, usize) {
    let term = |k: f64| k.powi(2 * power) * (-x * (k * k - 1.0)).exp();
    let mut s = CompensatedSum::new();
    let mut k = 1usize;
    loop {
        k += 1;
        s.add(term(k as f64));
        let next = (k + 1) as f64;
        let rho = (next / k as f64).powi(2 * power) * (-x * (2.0 * next + 1.0)).exp();
        if rho < 1.0 {
            let tail = term(next) / (1.0 - rho);
            if tail <= tol * (1.0 + s.value()) || k >= crate::criterion::MAX_TERMS {
                return (s.value(), tail, k);
            }
        }
    }
}

/// `ln Σ_{k≥2} (k⁴ - k²) e^{-x(k²-1)}` summed to `k_max`, a lower bound on the full series.
fn log_gap(x: f64, k_max: usize) -> f64 {
    let logs: Vec<f64> = (2..=k_max)
        .map(|k| {
            let k = k as f64;
            (k.powi(4) - k * k).ln() - x * (k * k - 1.0)
        })
        .collect();
    log_sum_exp(&logs)
}

/// `δ(0)` for `𝒟_b h₁` from the sums `Σ k² e^{-2πb²k²}` and `Σ k⁴ e^{-2πb²k²}`.
///
/// Both are divided by their common `k = ±1` term `2e^{-2πb²}` so that large
/// `b` neither underflows nor loses the gap between them.
pub fn h1_delta_at_zero(b: f64, tail_tol: f64) -> Result<ScanRow> {
    if !(b > 0.0) || !b.is_finite() {
        return Err(GaborError::Domain(format!("dilation must be positive, got {b}")));
    }
    let x = 2.0 * std::f64::consts::PI * b * b;
    let (n_rest, n_tail, kn) = reduced_sum(x, 1, tail_tol);
    let (d_rest, d_tail, kd) = reduced_sum(x, 2, tail_tol);
    let (num, den) = (1.0 + n_rest, 1.0 + d_rest);
    let eta = ROUNDING_SLACK;
    let delta0 = 0.5 * (num / den).sqrt();
    let delta0_low = 0.5 * (num * (1.0 - eta) / ((den + d_tail) * (1.0 + eta))).sqrt();
    // 1/2 - δ = (1 - r)/2 with r² = num/den ≤ 1, and 1 - r ≥ (1 - r²)/2 = gap/(2 den).
    let ln_margin = log_gap(x, kn.min(kd)) + (1.0 - eta).ln()
        - (den + d_tail).ln()
        - (1.0 + eta).ln()
        - 4f64.ln();
    let log10_margin = ln_margin / std::f64::consts::LN_10;
    let enclosure_high = 0.5 * ((num + n_tail) * (1.0 + eta) / (den * (1.0 - eta))).sqrt();
    Ok(ScanRow {
        b,
        delta0_low,
        delta0,
        delta0_high: enclosure_high.min(0.5 - ln_margin.exp()),
        log10_margin,
    })
}

/// `steps` log-uniform dilations in `[b_min, b_max]`, endpoints included.
pub fn log_uniform_grid(b_min: f64, b_max: f64, steps: usize) -> Result<Vec<f64>> {
    if !(b_min > 0.0) || !b_max.is_finite() || b_min > b_max {
        return Err(GaborError::Domain(format!(
            "need 0 < b_min <= b_max, got [{b_min}, {b_max}]"
        )));
    }
    if steps == 0 {
        return Err(GaborError::Domain("scan needs at least one step".into()));
    }
    if steps == 1 {
        return Ok(vec![b_min]);
    }
    let (lo, hi) = (b_min.ln(), b_max.ln());
    Ok((0..steps)
        .map(|j| match j {
            0 => b_min,
            j if j == steps - 1 => b_max,
            j => (lo + (hi - lo) * j as f64 / (steps - 1) as f64).exp(),
        })
        .collect())
}

pub fn h1_barrier_scan(b_min: f64, b_max: f64, steps: usize, tail_tol: f64) -> Result<Vec<ScanRow>> {
    if !(tail_tol > 0.0 && tail_tol <= crate::criterion::MAX_TAIL_TOL) {
        return Err(GaborError::Precondition(format!("bad tail tolerance {tail_tol}")));
    }
    log_uniform_grid(b_min, b_max, steps)?
        .into_par_iter()
        .map(|b| h1_delta_at_zero(b, tail_tol))
        .collect()
}

/// CSV with header `b,delta0_low,delta0,delta0_high,log10_margin`.
pub fn write_scan_csv<W: Write>(rows: &[ScanRow], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["b", "delta0_low", "delta0", "delta0_high", "log10_margin"])?;
    for r in rows {
        w.write_record(
            [r.b, r.delta0_low, r.delta0, r.delta0_high, r.log10_margin]
                .iter()
                .map(|&v| crate::format_float(v)),
        )?;
    }
    w.flush()?;
    Ok(())
}
