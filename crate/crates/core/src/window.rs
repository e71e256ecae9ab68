//! Window functions with time and frequency evaluations.
//!
//! Fourier convention: `ĝ(ξ) = ∫ g(t) e^{-2πiξt} dt`. Under it the Gaussian
//! `e^{-πt²}` is its own transform and the Hermite functions
//! `h_n(t) = p_n(t) e^{-πt²}` used here satisfy `ĥ_n = (-i)ⁿ h_n`, where
//! `p_0 = 1`, `p_1 = t` and `p_{n+1} = t·p_n - n/(4π)·p_{n-1}`. This is the
//! physicists' `H_n(√(2π)t)` rescaled so that `h_1(t) = t e^{-πt²}` exactly.
//!
//! Closed-form windows carry an [`Envelope`] bounding `|ĝ|` by a Gaussian,
//! which is what makes lattice-sum truncation rigorous. Sampled and chirped
//! windows have none; sums over them are truncated heuristically and flagged.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{GaborError, Result};
use crate::sampled::SampledFunction;
use crate::summation::CompensatedSum;

/// Relative residual below which a window counts as even or odd.
pub const PARITY_TOLERANCE: f64 = 1e-10;

/// Half width of the region where closed-form Gaussian-type windows are not negligible.
const GAUSSIAN_RADIUS: f64 = 6.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Parity {
    Even,
    Odd,
    Neither,
    Unknown,
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
            Parity::Neither => "neither",
            Parity::Unknown => "unknown",
        };
        f.write_str(s)
    }
}

/// Gaussian decay bound `|ĝ(ξ)| ≤ constant · e^{-rate·ξ²}` for `|ξ| ≥ threshold`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Envelope {
    pub constant: f64,
    pub rate: f64,
    pub threshold: f64,
}

impl Envelope {
    pub fn bound(&self, xi: f64) -> f64 {
        self.constant * (-self.rate * xi * xi).exp()
    }

    /// Envelope of `√b · ĝ(b·ξ)`.
    fn dilated(&self, b: f64) -> Self {
        Envelope {
            constant: self.constant * b.sqrt(),
            rate: self.rate * b * b,
            threshold: self.threshold / b,
        }
    }

    /// Checks the bound at 200 probes with `|ξ|` spread over ten units above the threshold.
    pub fn verify(&self, window: &Window) -> Result<()> {
        let lo = self.threshold.max(1.0);
        let hi = lo + 9.0;
        for j in 0..100 {
            let x = lo + (hi - lo) * j as f64 / 99.0;
            for xi in [x, -x] {
                let actual = window.freq_eval(xi).norm();
                let bound = self.bound(xi);
                if actual > bound * (1.0 + 1e-9) + 1e-300 {
                    return Err(GaborError::Precondition(format!(
                        "envelope of {} fails at xi = {xi}: |ĝ| = {actual:e} > {bound:e}",
                        window.label()
                    )));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub enum WindowKind {
    Gaussian,
    Hermite { order: u32 },
    Sampled(Arc<SampledFunction>),
    Dilated { base: Arc<Window>, scale: f64 },
    Chirped { base: Arc<Window>, rate: f64 },
    /// Finite linear combination `Σ c_i g_i`.
    Combination(Vec<(Complex64, Window)>),
}

/// An immutable window function.
#[derive(Debug, Clone)]
pub struct Window {
    kind: WindowKind,
    parity: Parity,
    envelope: Option<Envelope>,
    label: String,
}

/// `p_n(t)` from the three-term recurrence.
fn hermite_polynomial(order: u32, t: f64) -> f64 {
    if order == 0 {
        return 1.0;
    }
    let (mut prev, mut cur) = (1.0, t);
    for k in 1..order {
        let next = t * cur - k as f64 / (4.0 * PI) * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Monomial coefficients of `p_n`, lowest degree first.
fn hermite_coefficients(order: u32) -> Vec<f64> {
    let mut prev = vec![1.0];
    if order == 0 {
        return prev;
    }
    let mut cur = vec![0.0, 1.0];
    for k in 1..order {
        let mut next = vec![0.0; cur.len() + 1];
        for (j, c) in cur.iter().enumerate() {
            next[j + 1] += c;
        }
        for (j, c) in prev.iter().enumerate() {
            next[j] -= k as f64 / (4.0 * PI) * c;
        }
        prev = cur;
        cur = next;
    }
    cur
}

/// `(-i)ⁿ`
fn minus_i_pow(n: u32) -> Complex64 {
    match n % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, -1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, 1.0),
    }
}

/// Envelope for `p_n(ξ) e^{-πξ²}` with rate π/2 on `|ξ| ≥ 1`.
///
/// Each monomial obeys `sup_{x≥1} x^j e^{-βx²} = e^{-β}` when `j ≤ 2β`, and
/// `(j/(2β))^{j/2} e^{-j/2}` otherwise; summing `|c_j|` times these gives the constant.
fn hermite_envelope(order: u32) -> Envelope {
    if order == 0 {
        return Envelope {
            constant: 1.0,
            rate: PI,
            threshold: 0.0,
        };
    }
    let beta = PI / 2.0;
    let constant = hermite_coefficients(order)
        .iter()
        .enumerate()
        .map(|(j, c)| {
            let j = j as f64;
            let sup = if j <= 2.0 * beta {
                (-beta).exp()
            } else {
                (j / (2.0 * beta)).powf(j / 2.0) * (-j / 2.0).exp()
            };
            c.abs() * sup
        })
        .sum::<f64>();
    Envelope {
        constant,
        rate: PI - beta,
        threshold: 1.0,
    }
}

fn fmt_coefficient(c: Complex64) -> String {
    if c.im == 0.0 {
        format!("{}", c.re)
    } else {
        format!("({}{:+}i)", c.re, c.im)
    }
}

impl Window {
    /// `e^{-πt²}`, its own Fourier transform.
    pub fn gaussian() -> Self {
        Window {
            kind: WindowKind::Gaussian,
            parity: Parity::Even,
            envelope: Some(Envelope {
                constant: 1.0,
                rate: PI,
                threshold: 0.0,
            }),
            label: "gaussian".into(),
        }
    }

    /// Hermite function of the given order; `hermite(1)` is `t e^{-πt²}`.
    pub fn hermite(order: u32) -> Self {
        Window {
            kind: WindowKind::Hermite { order },
            parity: if order % 2 == 0 {
                Parity::Even
            } else {
                Parity::Odd
            },
            envelope: Some(hermite_envelope(order)),
            label: format!("hermite:{order}"),
        }
    }

    /// Window given by samples; parity is classified from the samples.
    pub fn sampled(samples: SampledFunction) -> Self {
        let label = format!("sampled(n={},h={})", samples.len(), samples.step());
        let mut w = Window {
            kind: WindowKind::Sampled(Arc::new(samples)),
            parity: Parity::Unknown,
            envelope: None,
            label,
        };
        w.parity = classify_parity(&w);
        w
    }

    /// `𝒟_b w (t) = b^{-1/2} w(t/b)`.
    pub fn dilate(&self, b: f64) -> Result<Self> {
        if !(b > 0.0) || !b.is_finite() {
            return Err(GaborError::Domain(format!(
                "dilation must be a positive real, got {b}"
            )));
        }
        Ok(Window {
            kind: WindowKind::Dilated {
                base: Arc::new(self.clone()),
                scale: b,
            },
            parity: self.parity,
            envelope: self.envelope.map(|e| e.dilated(b)),
            label: format!("dilate({},{b})", self.label),
        })
    }

    /// `𝒱_q w (t) = e^{πiqt²} w(t)`.
    pub fn chirp(&self, rate: f64) -> Self {
        Window {
            kind: WindowKind::Chirped {
                base: Arc::new(self.clone()),
                rate,
            },
            parity: self.parity,
            envelope: None,
            label: format!("chirp({},{rate})", self.label),
        }
    }

    /// `Σ c_i g_i`. Parity is inherited when all terms agree and classified otherwise.
    pub fn combination(terms: Vec<(Complex64, Window)>) -> Result<Self> {
        if terms.is_empty() {
            return Err(GaborError::Domain("empty linear combination".into()));
        }
        let label = terms
            .iter()
            .map(|(c, w)| format!("{}*{}", fmt_coefficient(*c), w.label))
            .collect::<Vec<_>>()
            .join("+");
        let envelope = terms
            .iter()
            .map(|(c, w)| w.envelope.map(|e| (c.norm(), e)))
            .collect::<Option<Vec<_>>>()
            .map(|parts| Envelope {
                constant: parts.iter().map(|(c, e)| c * e.constant).sum(),
                rate: parts.iter().map(|(_, e)| e.rate).fold(f64::INFINITY, f64::min),
                threshold: parts.iter().map(|(_, e)| e.threshold).fold(0.0, f64::max),
            });
        let first = terms[0].1.parity;
        let shared = matches!(first, Parity::Even | Parity::Odd)
            && terms.iter().all(|(_, w)| w.parity == first);
        let mut w = Window {
            kind: WindowKind::Combination(terms),
            parity: first,
            envelope,
            label,
        };
        if !shared {
            w.parity = classify_parity(&w);
        }
        Ok(w)
    }

    /// `c · w`.
    pub fn scaled(&self, c: Complex64) -> Self {
        Window::combination(vec![(c, self.clone())]).expect("single term")
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn kind(&self) -> &WindowKind {
        &self.kind
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn envelope(&self) -> Option<Envelope> {
        self.envelope
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn time_eval(&self, t: f64) -> Complex64 {
        match &self.kind {
            WindowKind::Gaussian => Complex64::new((-PI * t * t).exp(), 0.0),
            WindowKind::Hermite { order } => {
                Complex64::new(hermite_polynomial(*order, t) * (-PI * t * t).exp(), 0.0)
            }
            WindowKind::Sampled(s) => s.interpolate(t),
            WindowKind::Dilated { base, scale } => base.time_eval(t / scale) / scale.sqrt(),
            WindowKind::Chirped { base, rate } => {
                Complex64::from_polar(1.0, PI * rate * t * t) * base.time_eval(t)
            }
            WindowKind::Combination(terms) => terms.iter().map(|(c, w)| c * w.time_eval(t)).sum(),
        }
    }

    pub fn freq_eval(&self, xi: f64) -> Complex64 {
        match &self.kind {
            WindowKind::Gaussian => Complex64::new((-PI * xi * xi).exp(), 0.0),
            WindowKind::Hermite { order } => {
                minus_i_pow(*order) * (hermite_polynomial(*order, xi) * (-PI * xi * xi).exp())
            }
            WindowKind::Sampled(s) => s.fourier(xi),
            WindowKind::Dilated { base, scale } => base.freq_eval(scale * xi) * scale.sqrt(),
            WindowKind::Chirped { base, rate } => self.quadrature_transform(base, *rate, xi),
            WindowKind::Combination(terms) => terms.iter().map(|(c, w)| c * w.freq_eval(xi)).sum(),
        }
    }

    /// Trapezoid quadrature of the chirped window's Fourier integral.
    fn quadrature_transform(&self, base: &Window, rate: f64, xi: f64) -> Complex64 {
        let radius = base.time_radius();
        let bandwidth = xi.abs() + rate.abs() * radius + base.freq_radius();
        let step = (0.25 / bandwidth).min(0.01);
        let m = (radius / step).ceil() as i64;
        let h = radius / m as f64;
        let mut re = CompensatedSum::new();
        let mut im = CompensatedSum::new();
        for j in -m..=m {
            let t = j as f64 * h;
            let weight = if j.abs() == m { 0.5 } else { 1.0 };
            let v = self.time_eval(t) * Complex64::from_polar(weight, -2.0 * PI * xi * t);
            re.add(v.re);
            im.add(v.im);
        }
        Complex64::new(re.value(), im.value()) * h
    }

    /// Half width outside of which the window is negligible (or zero, for samples).
    pub fn time_radius(&self) -> f64 {
        match &self.kind {
            WindowKind::Gaussian => GAUSSIAN_RADIUS,
            WindowKind::Hermite { order } => {
                GAUSSIAN_RADIUS + ((2 * order + 1) as f64 / (2.0 * PI)).sqrt()
            }
            WindowKind::Sampled(s) => s.half_width(),
            WindowKind::Dilated { base, scale } => base.time_radius() * scale,
            WindowKind::Chirped { base, .. } => base.time_radius(),
            WindowKind::Combination(terms) => {
                terms.iter().map(|(_, w)| w.time_radius()).fold(0.0, f64::max)
            }
        }
    }

    /// Frequency half width outside of which `ĝ` is negligible.
    pub fn freq_radius(&self) -> f64 {
        match &self.kind {
            WindowKind::Gaussian | WindowKind::Hermite { .. } => self.time_radius(),
            WindowKind::Sampled(s) => s.nyquist(),
            WindowKind::Dilated { base, scale } => base.freq_radius() / scale,
            WindowKind::Chirped { base, rate } => {
                base.freq_radius() + rate.abs() * base.time_radius()
            }
            WindowKind::Combination(terms) => {
                terms.iter().map(|(_, w)| w.freq_radius()).fold(0.0, f64::max)
            }
        }
    }

    /// True when `g` is real valued, so that `|ĝ|` is even.
    pub fn is_real(&self) -> bool {
        match &self.kind {
            WindowKind::Gaussian | WindowKind::Hermite { .. } => true,
            WindowKind::Sampled(s) => s.values().iter().all(|v| v.im == 0.0),
            WindowKind::Dilated { base, .. } => base.is_real(),
            WindowKind::Chirped { base, rate } => *rate == 0.0 && base.is_real(),
            WindowKind::Combination(terms) => terms.iter().all(|(c, w)| c.im == 0.0 && w.is_real()),
        }
    }

    /// A frequency offset at which `δ_g` is known to attain its minimum over `[0, 1]`.
    ///
    /// Only the plain Gaussian declares one (ω = 1/2).
    pub fn known_minimizer(&self) -> Option<f64> {
        match self.kind {
            WindowKind::Gaussian => Some(0.5),
            _ => None,
        }
    }

    /// Samples the window on `[-half_width, half_width]`.
    pub fn sample(&self, step: f64, half_width: f64) -> Result<SampledFunction> {
        SampledFunction::from_fn(step, half_width, |t| self.time_eval(t))
    }
}

/// Classifies parity from 201 probes on `[-5, 5]`.
pub fn classify_parity(w: &Window) -> Parity {
    let probes: Vec<(Complex64, Complex64)> = (0..=100)
        .map(|j| {
            let t = j as f64 * 0.05;
            (w.time_eval(t), w.time_eval(-t))
        })
        .collect();
    let peak = probes
        .iter()
        .map(|(a, b)| a.norm().max(b.norm()))
        .fold(0.0, f64::max);
    if peak == 0.0 {
        return Parity::Unknown;
    }
    let residual = |sign: f64| {
        probes
            .iter()
            .map(|(a, b)| (a - b * sign).norm())
            .fold(0.0, f64::max)
            / peak
    };
    if residual(-1.0) < PARITY_TOLERANCE {
        Parity::Odd
    } else if residual(1.0) < PARITY_TOLERANCE {
        Parity::Even
    } else {
        Parity::Neither
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const I: Complex64 = Complex64::new(0.0, 1.0);

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    fn trapezoid_transform(w: &Window, xi: f64) -> Complex64 {
        // 1024 points on [-8, 8]
        let n = 1024;
        let h = 16.0 / (n - 1) as f64;
        (0..n)
            .map(|j| {
                let t = -8.0 + j as f64 * h;
                let weight = if j == 0 || j == n - 1 { 0.5 } else { 1.0 };
                w.time_eval(t) * Complex64::from_polar(weight * h, -2.0 * PI * xi * t)
            })
            .sum()
    }

    fn corpus() -> Vec<Window> {
        vec![
            Window::gaussian(),
            Window::hermite(0),
            Window::hermite(1),
            Window::hermite(2),
            Window::hermite(3),
            Window::hermite(5),
            Window::hermite(1).dilate(0.7).unwrap(),
            Window::gaussian().dilate(1.3).unwrap(),
            Window::combination(vec![
                (Complex64::new(1.0, 0.0), Window::hermite(1)),
                (Complex64::new(0.2, 0.0), Window::hermite(3)),
            ])
            .unwrap(),
        ]
    }

    #[test]
    fn gaussian_values() {
        let g = Window::gaussian();
        assert_eq!(g.time_eval(0.0), Complex64::new(1.0, 0.0));
        assert!((g.time_eval(1.0).re - 0.043_213_918_263_772_25).abs() < 1e-15);
        for x in [0.3, 1.7] {
            assert_eq!(g.freq_eval(x), g.time_eval(x));
        }
        assert_eq!(g.parity(), Parity::Even);
        assert_eq!(classify_parity(&g), Parity::Even);
    }

    #[test]
    fn hermite_values_and_transform() {
        let h1 = Window::hermite(1);
        assert_eq!(h1.time_eval(0.0), Complex64::new(0.0, 0.0));
        for x in [0.5, 2.0] {
            assert!(close(h1.freq_eval(x), -I * h1.time_eval(x), 1e-16));
            let expected = x * (-PI * x * x).exp();
            assert!((h1.time_eval(x).re - expected).abs() < 1e-16);
        }
        assert_eq!(Window::hermite(3).parity(), Parity::Odd);
        assert_eq!(classify_parity(&Window::hermite(3)), Parity::Odd);
        assert_eq!(classify_parity(&Window::hermite(4)), Parity::Even);
        let h0 = Window::hermite(0);
        assert_eq!(h0.time_eval(0.37), Window::gaussian().time_eval(0.37));
    }

    #[test]
    fn hermite_coefficients_match_recurrence() {
        for n in 0..8 {
            let c = hermite_coefficients(n);
            for &t in &[-1.3f64, 0.2, 2.5] {
                let from_coeffs: f64 = c.iter().enumerate().map(|(j, c)| c * t.powi(j as i32)).sum();
                assert!((from_coeffs - hermite_polynomial(n, t)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn closed_forms_match_trapezoid_quadrature() {
        for w in corpus() {
            for xi in [0.0, 0.5, 1.0, 2.0] {
                let q = trapezoid_transform(&w, xi);
                assert!(
                    close(q, w.freq_eval(xi), 1e-8),
                    "{} at {xi}: {q} vs {}",
                    w.label(),
                    w.freq_eval(xi)
                );
            }
        }
    }

    #[test]
    fn envelopes_hold_on_probes() {
        for w in corpus() {
            w.envelope().unwrap().verify(&w).unwrap();
        }
        for b in [0.3, 0.5, 2.0, 4.0] {
            let w = Window::hermite(3).dilate(b).unwrap();
            w.envelope().unwrap().verify(&w).unwrap();
        }
    }

    #[test]
    fn dilation_properties() {
        let h1 = Window::hermite(1);
        let (b, xi) = (2.0, 0.7);
        let lhs = h1.dilate(b).unwrap().freq_eval(xi);
        let rhs = -I * h1.dilate(1.0 / b).unwrap().time_eval(xi);
        assert!(close(lhs, rhs, 1e-15));

        let g2 = Window::gaussian().dilate(2.0).unwrap();
        assert!((g2.time_eval(0.0).re - 2f64.powf(-0.5)).abs() < 1e-15);

        for w in corpus() {
            let same = w.dilate(1.0).unwrap();
            for b in [0.4, 1.0, 3.0] {
                let round = w.dilate(b).unwrap().dilate(1.0 / b).unwrap();
                assert_eq!(round.parity(), w.parity());
                assert_eq!(classify_parity(&w.dilate(b).unwrap()), classify_parity(&w));
                for j in 0..=40 {
                    let t = -4.0 + 0.2 * j as f64;
                    assert!(close(round.time_eval(t), w.time_eval(t), 1e-12));
                    assert!(close(same.time_eval(t), w.time_eval(t), 0.0));
                }
            }
        }
        assert!(h1.dilate(0.0).is_err());
        assert!(h1.dilate(-1.0).is_err());
    }

    #[test]
    fn odd_windows_vanish_at_zero_frequency() {
        for w in corpus().into_iter().filter(|w| w.parity() == Parity::Odd) {
            assert!(w.freq_eval(0.0).norm() <= 1e-12, "{}", w.label());
        }
    }

    #[test]
    fn sampled_mixed_window_is_neither() {
        let s = SampledFunction::standard(|t| Complex64::new(t * (-t * t).exp() + 0.3 * (-t * t).exp(), 0.0));
        let w = Window::sampled(s);
        assert_eq!(w.parity(), Parity::Neither);
        assert!(w.envelope().is_none());
        let zero = Window::sampled(SampledFunction::standard(|_| Complex64::new(0.0, 0.0)));
        assert_eq!(zero.parity(), Parity::Unknown);
    }

    #[test]
    fn chirp_transform_of_gaussian_matches_closed_form() {
        // e^{-π(1-iq)t²} has transform (1-iq)^{-1/2} e^{-πξ²/(1-iq)}
        let q = 0.8;
        let w = Window::gaussian().chirp(q);
        assert_eq!(w.parity(), Parity::Even);
        let z = Complex64::new(1.0, -q);
        for xi in [0.0, 0.4, 1.5] {
            let exact = (-PI * xi * xi / z).exp() / z.sqrt();
            assert!(close(w.freq_eval(xi), exact, 1e-10));
        }
    }

    #[test]
    fn combination_parity() {
        let mixed = Window::combination(vec![
            (Complex64::new(1.0, 0.0), Window::hermite(1)),
            (Complex64::new(0.3, 0.0), Window::gaussian()),
        ])
        .unwrap();
        assert_eq!(mixed.parity(), Parity::Neither);
        assert!(Window::combination(vec![]).is_err());
    }
}
