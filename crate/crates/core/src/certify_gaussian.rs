//! Closed-form certificate for the Gaussian `e^{-πt²}` at `ω = 1/2`.
//!
//! With `|ĝ(ξ)|² = e^{-2πξ²}` the two nodes `ξ = ±1/2` give the numerator
//! bound `2e^{-π/2}` directly. For the denominator, the nodes `ξ = ±(k+1/2)`,
//! `k ≥ 1`, satisfy `x ≥ 3/2`, where `x² e^{-2πx²} ≤ x e^{-2πx}` because
//! `x ↦ x e^{-2π(x²-x)}` is decreasing on `[1, ∞)` with value 1 at `x = 1`. Hence
//!
//! ```text
//! Σ_k (k+1/2)² e^{-2π(k+1/2)²} ≤ e^{-π/2}/2 + 2 Σ_{k≥1} (k+1/2) e^{-2π(k+1/2)}
//!                              = e^{-π/2}/2 + 2·tail1 + tail0.
//! ```

use serde::Serialize;

use crate::error::{GaborError, Result};

/// Constants of the hand certificate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GaussianCertificate {
    /// `Σ_{k≥1} e^{-2π(k+1/2)} = e^{-π}/(e^{2π}-1)`.
    pub tail0: f64,
    /// `Σ_{k≥1} k e^{-2π(k+1/2)} = e^{π}/(e^{2π}-1)²`.
    pub tail1: f64,
    pub numerator_lb: f64,
    pub denominator_ub: f64,
    pub ratio_lb: f64,
    /// A co-volume strictly below `½·sqrt(ratio_lb)`.
    pub certified_delta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TailWeight {
    /// `Σ_{k≥m} e^{-c(k+1/2)}`
    Unit,
    /// `Σ_{k≥m} k e^{-c(k+1/2)}`
    Linear,
}

/// Geometric tails `Σ_{k≥m} w(k) e^{-c(k+1/2)}` in closed form.
///
/// With `r = e^{-c}`:
///
/// ```text
/// Unit:   e^{-c/2} r^m / (1 - r)                       = e^{-c(m+1/2)} / (1 - e^{-c})
/// Linear: e^{-c/2} r^m (m - (m-1) r) / (1 - r)²
/// ```
pub fn geometric_tail(c: f64, m: u32, weight: TailWeight) -> Result<f64> {
    if !(c > 0.0) || !c.is_finite() {
        return Err(GaborError::DivergentSeries { rate: c });
    }
    if m == 0 {
        return Err(GaborError::Domain("tail must start at m >= 1".into()));
    }
    let m = m as f64;
    let one_minus_r = -(-c).exp_m1();
    let r = (-c).exp();
    let head = (-c * (m + 0.5)).exp();
    Ok(match weight {
        TailWeight::Unit => head / one_minus_r,
        TailWeight::Linear => head * (m - (m - 1.0) * r) / (one_minus_r * one_minus_r),
    })
}

pub fn gaussian_certificate() -> GaussianCertificate {
    use std::f64::consts::PI;
    let two_pi = 2.0 * PI;
    let tail0 = geometric_tail(two_pi, 1, TailWeight::Unit).expect("positive rate");
    let tail1 = geometric_tail(two_pi, 1, TailWeight::Linear).expect("positive rate");
    let central = (-PI / 2.0).exp();
    let numerator_lb = 2.0 * central;
    let denominator_ub = central / 2.0 + 2.0 * tail1 + tail0;
    let ratio_lb = (4.0 * numerator_lb) / (4.0 * denominator_ub);
    // A few ulps of slack absorb the rounding in the operations above.
    let certified_delta = 0.5 * ratio_lb.sqrt() * (1.0 - 8.0 * f64::EPSILON);
    GaussianCertificate {
        tail0,
        tail1,
        numerator_lb,
        denominator_ub,
        ratio_lb,
        certified_delta,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::criterion::{lattice_sum, min_delta, DEFAULT_TAIL_TOL};
    use crate::summation::CompensatedSum;
    use crate::window::Window;
    use std::f64::consts::PI;

    fn brute(c: f64, m: u32, weight: TailWeight) -> f64 {
        let s: CompensatedSum = (m..m + 10_000)
            .map(|k| {
                let w = match weight {
                    TailWeight::Unit => 1.0,
                    TailWeight::Linear => k as f64,
                };
                w * (-c * (k as f64 + 0.5)).exp()
            })
            .collect();
        s.value()
    }

    #[test]
    fn tails_match_paper_closed_forms() {
        let c = 2.0 * PI;
        let t0 = geometric_tail(c, 1, TailWeight::Unit).unwrap();
        let t1 = geometric_tail(c, 1, TailWeight::Linear).unwrap();
        let e2p = (2.0 * PI).exp();
        assert!((t0 - (-PI).exp() / (e2p - 1.0)).abs() <= 1e-15 * t0);
        assert!((t1 - PI.exp() / ((e2p - 1.0) * (e2p - 1.0))).abs() <= 1e-15 * t1);
        assert!((t0 - 0.000_080_85).abs() < 1e-8);
        assert!((t1 - 0.000_081).abs() < 1e-6);
        let t = geometric_tail(1.0, 1, TailWeight::Unit).unwrap();
        let hand = (-1.5f64).exp() / (1.0 - (-1.0f64).exp());
        assert!((t - hand).abs() <= 1e-15 * hand);
    }

    #[test]
    fn tails_match_brute_force() {
        for c in [1.0, 2.0 * PI, 4.0 * PI] {
            for m in [1, 2, 5] {
                for w in [TailWeight::Unit, TailWeight::Linear] {
                    let closed = geometric_tail(c, m, w).unwrap();
                    let b = brute(c, m, w);
                    assert!((closed - b).abs() <= 1e-14 * b, "c={c} m={m} {w:?}");
                }
            }
        }
    }

    #[test]
    fn divergent_rates_rejected() {
        for c in [0.0, -1.0, f64::NAN] {
            assert!(matches!(
                geometric_tail(c, 1, TailWeight::Unit),
                Err(GaborError::DivergentSeries { .. })
            ));
        }
    }

    #[test]
    fn certificate_chain() {
        let cert = gaussian_certificate();
        assert!(cert.tail0 < 1e-4 && cert.tail1 < 1e-4);
        assert!(cert.certified_delta >= 0.9985);
        assert!(cert.certified_delta < 0.5 * cert.ratio_lb.sqrt());

        let g = Window::gaussian();
        let num = lattice_sum(&g, 0.5, 0, DEFAULT_TAIL_TOL).unwrap();
        let den = lattice_sum(&g, 0.5, 1, DEFAULT_TAIL_TOL).unwrap();
        assert!(cert.numerator_lb <= num.value);
        assert!(den.value + den.tail_bound <= cert.denominator_ub);

        let profile = min_delta(&g, 201, DEFAULT_TAIL_TOL).unwrap();
        assert!(cert.certified_delta <= profile.min_value);
    }

    #[test]
    fn denominator_bound_dominates_each_node() {
        // The termwise estimate x² e^{-2πx²} ≤ x e^{-2πx} on the half-integers ≥ 3/2.
        for k in 1..200 {
            let x = k as f64 + 0.5;
            assert!(x * x * (-2.0 * PI * x * x).exp() <= x * (-2.0 * PI * x).exp());
        }
    }
}
