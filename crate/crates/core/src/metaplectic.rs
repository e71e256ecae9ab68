//! Metaplectic operators on sampled functions.
//!
//! Each operator is paired with the symplectic matrix it projects onto:
//!
//! ```text
//! fractional Fourier ℱ_r   R_r = [[cos r, sin r], [-sin r, cos r]]
//! chirp              𝒱_q   V_q = [[1, 0], [q, 1]]
//! dilation           𝒟_a   D_a = [[a, 0], [0, 1/a]]
//! ```
//!
//! `ℱ_{π/2}` is the Fourier transform, `ℱ_π f(t) = f(-t)`, and the Hermite
//! functions are eigenfunctions with `ℱ_r h_n = e^{-inr} h_n`. Outputs live on
//! the input grid.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{GaborError, Result};
use crate::sampled::SampledFunction;
use crate::window::{Parity, PARITY_TOLERANCE};

/// Angles this close to a multiple of π take the exact branches.
pub const EXACT_ANGLE_TOLERANCE: f64 = 1e-12;
/// Angles this close to a multiple of π (but not exact) are rejected.
pub const DEGENERATE_ANGLE_TOLERANCE: f64 = 1e-6;
/// Edge magnitude above which the kernel quadrature may see truncation.
pub const TRUNCATION_WARNING: f64 = 1e-10;

/// Shifts closer than this (in grid steps) to an integer are treated as grid aligned.
const ALIGNMENT_TOLERANCE: f64 = 1e-9;

/// Reduces an angle to `(-π, π]`.
pub fn reduce_angle(r: f64) -> f64 {
    let mut x = r.rem_euclid(2.0 * PI);
    if x > PI {
        x -= 2.0 * PI;
    }
    x
}

fn warn_on_truncation(f: &SampledFunction) {
    let edge = f.edge_magnitude();
    if edge > TRUNCATION_WARNING {
        log::warn!("truncation risk: relative edge magnitude {edge:e} exceeds {TRUNCATION_WARNING:e}");
    }
}

/// Trapezoid quadrature of `∫ f(t) k_r(s, t) dt` for `sin r ≠ 0`.
///
/// `k_r(s, t) = sqrt(1 - i cot r) exp(πi(cot r·s² - 2 csc r·st + cot r·t²))`
/// with the principal square root.
fn kernel_quadrature(f: &SampledFunction, r: f64) -> SampledFunction {
    let (sin, cos) = r.sin_cos();
    let cot = cos / sin;
    let csc = 1.0 / sin;
    let amplitude = Complex64::new(1.0, -cot).sqrt();
    let h = f.step();
    let last = f.len() - 1;
    let times: Vec<f64> = f.times().collect();
    let weighted: Vec<Complex64> = f
        .values()
        .iter()
        .zip(&times)
        .enumerate()
        .map(|(j, (v, &t))| {
            let w = if j == 0 || j == last { 0.5 } else { 1.0 };
            v * Complex64::from_polar(w * h, PI * cot * t * t)
        })
        .collect();
    let values = times
        .par_iter()
        .map(|&s| {
            let (mut re, mut im) = (0.0, 0.0);
            for (v, &t) in weighted.iter().zip(&times) {
                let z = v * Complex64::from_polar(1.0, -2.0 * PI * csc * s * t);
                re += z.re;
                im += z.im;
            }
            amplitude * Complex64::from_polar(1.0, PI * cot * s * s) * Complex64::new(re, im)
        })
        .collect();
    f.with_values(values)
}

/// `ℱ_r f`.
///
/// Angles with `|cot r| > 1` are split as `ℱ_{r∓π/2} ℱ_{±π/2}` so that every
/// quadrature stage has a kernel chirp no faster than the Fourier kernel itself.
pub fn frac_fourier(f: &SampledFunction, r: f64) -> Result<SampledFunction> {
    let r = reduce_angle(r);
    if r.abs() <= EXACT_ANGLE_TOLERANCE {
        return Ok(f.clone());
    }
    if (r.abs() - PI).abs() <= EXACT_ANGLE_TOLERANCE {
        return Ok(reflect(f));
    }
    if r.abs() < DEGENERATE_ANGLE_TOLERANCE || (r.abs() - PI).abs() < DEGENERATE_ANGLE_TOLERANCE {
        return Err(GaborError::DegenerateAngle { angle: r });
    }
    warn_on_truncation(f);
    if r.abs() < FRAC_PI_4 || r.abs() > 3.0 * FRAC_PI_4 {
        let quarter = if r >= 0.0 { FRAC_PI_2 } else { -FRAC_PI_2 };
        let first = kernel_quadrature(f, quarter);
        return Ok(kernel_quadrature(&first, r - quarter));
    }
    Ok(kernel_quadrature(f, r))
}

/// `f(-t)`.
pub fn reflect(f: &SampledFunction) -> SampledFunction {
    let mut values = f.values().to_vec();
    values.reverse();
    f.with_values(values)
}

/// `𝒱_q f(t) = e^{πiqt²} f(t)`.
pub fn chirp(f: &SampledFunction, q: f64) -> SampledFunction {
    if q == 0.0 {
        return f.clone();
    }
    f.map(|t, v| v * Complex64::from_polar(1.0, PI * q * t * t))
}

/// `𝒟_a f(t) = a^{-1/2} f(t/a)`, resampled by cubic interpolation.
pub fn dilation(f: &SampledFunction, a: f64) -> Result<SampledFunction> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(GaborError::Domain(format!("dilation must be positive, got {a}")));
    }
    if a == 1.0 {
        return Ok(f.clone());
    }
    let c = a.sqrt().recip();
    Ok(f.map(|t, _| f.interpolate(t / a) * c))
}

/// `π(x, ω) f(t) = e^{2πiωt} f(t - x)`.
///
/// Shifts by whole grid steps move samples exactly; other shifts interpolate linearly.
pub fn time_frequency_shift(f: &SampledFunction, x: f64, omega: f64) -> SampledFunction {
    let steps = x / f.step();
    let rounded = steps.round();
    let shifted = if (steps - rounded).abs() <= ALIGNMENT_TOLERANCE {
        let n = f.len() as i64;
        let k = rounded as i64;
        let values = (0..n)
            .map(|j| {
                let src = j - k;
                if (0..n).contains(&src) {
                    f.values()[src as usize]
                } else {
                    Complex64::new(0.0, 0.0)
                }
            })
            .collect();
        f.with_values(values)
    } else {
        f.map(|t, _| f.interpolate_linear(t - x))
    };
    if omega == 0.0 {
        return shifted;
    }
    shifted.map(|t, v| v * Complex64::from_polar(1.0, 2.0 * PI * omega * t))
}

/// A single metaplectic factor with its parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "op", content = "parameter", rename_all = "snake_case")]
pub enum MetaplecticOp {
    FracFourier(f64),
    Chirp(f64),
    Dilation(f64),
}

impl MetaplecticOp {
    pub fn apply(&self, f: &SampledFunction) -> Result<SampledFunction> {
        match *self {
            MetaplecticOp::FracFourier(r) => frac_fourier(f, r),
            MetaplecticOp::Chirp(q) => Ok(chirp(f, q)),
            MetaplecticOp::Dilation(a) => dilation(f, a),
        }
    }

    /// True when the operator involves no quadrature.
    pub fn is_exact(&self) -> bool {
        match *self {
            MetaplecticOp::FracFourier(r) => {
                let r = reduce_angle(r);
                r.abs() <= EXACT_ANGLE_TOLERANCE || (r.abs() - PI).abs() <= EXACT_ANGLE_TOLERANCE
            }
            MetaplecticOp::Chirp(_) | MetaplecticOp::Dilation(_) => true,
        }
    }

    /// The symplectic matrix in row-major order.
    pub fn matrix(&self) -> [[f64; 2]; 2] {
        match *self {
            MetaplecticOp::FracFourier(r) => {
                let (s, c) = r.sin_cos();
                [[c, s], [-s, c]]
            }
            MetaplecticOp::Chirp(q) => [[1.0, 0.0], [q, 1.0]],
            MetaplecticOp::Dilation(a) => [[a, 0.0], [0.0, 1.0 / a]],
        }
    }
}

/// Parity of a sampled function read off the grid itself.
pub fn sampled_parity(f: &SampledFunction) -> Parity {
    if f.max_abs() == 0.0 {
        Parity::Unknown
    } else if f.symmetry_residual(-1.0) < PARITY_TOLERANCE {
        Parity::Odd
    } else if f.symmetry_residual(1.0) < PARITY_TOLERANCE {
        Parity::Even
    } else {
        Parity::Neither
    }
}

/// Symmetry defect of `op f` relative to the parity of `f`.
pub fn parity_residual(op: MetaplecticOp, f: &SampledFunction) -> Result<f64> {
    let sign = match sampled_parity(f) {
        Parity::Even => 1.0,
        Parity::Odd => -1.0,
        p => {
            return Err(GaborError::Precondition(format!(
                "parity residual needs an even or odd input, got {p}"
            )))
        }
    };
    Ok(op.apply(f)?.symmetry_residual(sign))
}

/// Max-norm gap between `𝒟_a π(z) 𝒟_a⁻¹ f` and `π(D_a z) f`.
pub fn intertwining_residual(a: f64, z: (f64, f64), f: &SampledFunction) -> Result<f64> {
    let inner = dilation(f, 1.0 / a)?;
    let lhs = dilation(&time_frequency_shift(&inner, z.0, z.1), a)?;
    let rhs = time_frequency_shift(f, a * z.0, z.1 / a);
    Ok(lhs
        .values()
        .iter()
        .zip(rhs.values())
        .map(|(l, r)| (l - r).norm())
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::window::Window;

    fn gaussian() -> SampledFunction {
        Window::gaussian().sample(0.01, 8.0).unwrap()
    }

    fn h1() -> SampledFunction {
        Window::hermite(1).sample(0.01, 8.0).unwrap()
    }

    fn max_gap(a: &SampledFunction, b: &SampledFunction) -> f64 {
        a.values()
            .iter()
            .zip(b.values())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }

    #[test]
    fn special_angles() {
        let f = h1();
        assert_eq!(frac_fourier(&f, 0.0).unwrap(), f);
        assert_eq!(frac_fourier(&f, 2.0 * PI).unwrap(), f);
        assert_eq!(frac_fourier(&f, PI).unwrap(), reflect(&f));
        assert_eq!(frac_fourier(&f, -PI).unwrap(), reflect(&f));
        assert!(matches!(
            frac_fourier(&f, 1e-8),
            Err(GaborError::DegenerateAngle { .. })
        ));
        assert!(matches!(
            frac_fourier(&f, PI - 1e-7),
            Err(GaborError::DegenerateAngle { .. })
        ));
    }

    #[test]
    fn quarter_turn_is_fourier_transform() {
        let g = gaussian();
        assert!(max_gap(&frac_fourier(&g, FRAC_PI_2).unwrap(), &g) < 1e-6);
        let f = h1();
        let expected = f.map(|_, v| v * Complex64::new(0.0, -1.0));
        assert!(max_gap(&frac_fourier(&f, FRAC_PI_2).unwrap(), &expected) < 1e-6);
    }

    #[test]
    fn hermite_eigenvalues() {
        // ℱ_r h_n = e^{-inr} h_n
        for n in [0u32, 1, 2, 3] {
            let f = Window::hermite(n).sample(0.01, 8.0).unwrap();
            for r in [PI / 6.0, PI / 3.0, 2.0 * PI / 5.0, -PI / 5.0, 0.9 * PI, 0.1, -3.0] {
                let expected = f.map(|_, v| v * Complex64::from_polar(1.0, -(n as f64) * r));
                let got = frac_fourier(&f, r).unwrap();
                assert!(max_gap(&got, &expected) < 1e-6, "n={n} r={r}");
            }
        }
    }

    #[test]
    fn rotated_gaussian_is_fixed() {
        let g = gaussian();
        assert!(max_gap(&frac_fourier(&g, PI / 3.0).unwrap(), &g) < 1e-6);
    }

    #[test]
    fn group_law() {
        let g = gaussian().map(|t, v| v * Complex64::from_polar(1.0, 0.3 * t));
        for r1 in [PI / 6.0, PI / 4.0] {
            for r2 in [PI / 6.0, PI / 4.0] {
                let two = frac_fourier(&frac_fourier(&g, r1).unwrap(), r2).unwrap();
                let one = frac_fourier(&g, r1 + r2).unwrap();
                assert!(max_gap(&two, &one) < 1e-4, "{r1} {r2}");
            }
        }
    }

    #[test]
    fn unitarity() {
        let f = h1();
        let n = f.norm();
        assert_eq!(chirp(&f, 0.7).norm(), n);
        for r in [PI / 6.0, PI / 3.0, 2.5] {
            assert!((frac_fourier(&f, r).unwrap().norm() - n).abs() < 1e-4);
        }
        assert!((dilation(&f, 1.7).unwrap().norm() - n).abs() < 1e-6);
    }

    #[test]
    fn chirp_properties() {
        let f = h1();
        assert_eq!(chirp(&f, 0.0), f);
        let c = chirp(&f, 1.3);
        for (a, b) in c.values().iter().zip(f.values()) {
            assert!((a.norm() - b.norm()).abs() <= 1e-15);
        }
        assert!(max_gap(&chirp(&c, -1.3), &f) < 1e-14);
    }

    #[test]
    fn dilation_matches_closed_form() {
        let f = h1();
        let d = dilation(&f, 1.5).unwrap();
        let expected = Window::hermite(1).dilate(1.5).unwrap().sample(0.01, 8.0).unwrap();
        assert!(max_gap(&d, &expected) < 1e-7);
        assert!(dilation(&f, 0.0).is_err());
    }

    #[test]
    fn parity_is_preserved() {
        for f in [h1(), gaussian()] {
            for r in [PI / 6.0, PI / 3.0, 2.0 * PI / 5.0] {
                assert!(parity_residual(MetaplecticOp::FracFourier(r), &f).unwrap() < 1e-5);
            }
            assert!(parity_residual(MetaplecticOp::Chirp(0.7), &f).unwrap() < 1e-12);
            assert!(parity_residual(MetaplecticOp::Dilation(0.6), &f).unwrap() < 1e-12);
        }
        let mixed = gaussian().map(|t, v| v * (1.0 + t));
        assert!(matches!(
            parity_residual(MetaplecticOp::Chirp(1.0), &mixed),
            Err(GaborError::Precondition(_))
        ));
    }

    #[test]
    fn intertwining() {
        let g = gaussian();
        let f = h1();
        for z in [(0.3, 0.1), (0.123, -0.7)] {
            assert!(intertwining_residual(1.0, z, &f).unwrap() < 1e-12);
        }
        assert!(intertwining_residual(2.0, (0.5, 0.25), &g).unwrap() < 1e-5);
        assert!(intertwining_residual(0.5, (0.0, 1.0), &f).unwrap() < 1e-5);
        assert!(intertwining_residual(1.3, (0.237, 0.4), &g).unwrap() < 1e-3);
    }

    #[test]
    fn shift_matches_closed_form() {
        let g = gaussian();
        let s = time_frequency_shift(&g, 0.5, 0.25);
        let expected = g.map(|t, _| {
            Complex64::from_polar((-PI * (t - 0.5) * (t - 0.5)).exp(), 2.0 * PI * 0.25 * t)
        });
        assert!(max_gap(&s, &expected) < 1e-14);
    }

    #[test]
    fn matrices() {
        let m = MetaplecticOp::FracFourier(FRAC_PI_2).matrix();
        assert!((m[0][1] - 1.0).abs() < 1e-15 && (m[1][0] + 1.0).abs() < 1e-15);
        assert_eq!(MetaplecticOp::Chirp(0.3).matrix(), [[1.0, 0.0], [0.3, 1.0]]);
        assert_eq!(MetaplecticOp::Dilation(2.0).matrix(), [[2.0, 0.0], [0.0, 0.5]]);
        assert!(MetaplecticOp::Dilation(2.0).is_exact());
        assert!(!MetaplecticOp::FracFourier(1.0).is_exact());
    }

    #[test]
    fn angle_reduction() {
        assert_eq!(reduce_angle(PI), PI);
        assert_eq!(reduce_angle(-PI), PI);
        assert!((reduce_angle(3.0 * PI / 2.0) + FRAC_PI_2).abs() < 1e-15);
    }
}
