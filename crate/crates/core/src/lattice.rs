//! Planar lattices and their reduction to `δℤ×ℤ`.
//!
//! Every lattice is `s·R_r·V_q·D_a·ℤ²` with
//!
//! ```text
//! R_r = [[cos r, sin r], [-sin r, cos r]]   V_q = [[1, 0], [q, 1]]   D_a = [[a, 0], [0, 1/a]]
//! ```
//!
//! and co-volume `s²`. The metaplectic operator `𝒟_{s/a} 𝒱_{-q} ℱ_{-r}` maps
//! the lattice to `s²ℤ×ℤ` and the window to a unitarily equivalent one, so the
//! square-lattice criterion applies to the reduced pair.

use std::f64::consts::PI;

use nalgebra::Matrix2;
use serde::Serialize;

use crate::error::{GaborError, Result};
use crate::metaplectic::{self, reduce_angle, MetaplecticOp, EXACT_ANGLE_TOLERANCE};
use crate::sampled::{MAX_STEP, STANDARD_HALF_WIDTH};
use crate::window::{Parity, Window, WindowKind};

/// Widest grid used when sampling a closed-form window for quadrature.
const MAX_HALF_WIDTH: f64 = 32.0;

/// A full-rank lattice `B·ℤ²`; the columns of `B` generate it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lattice2D {
    basis: Matrix2<f64>,
}

impl Lattice2D {
    pub fn new(basis: Matrix2<f64>) -> Result<Self> {
        if basis.iter().any(|x| !x.is_finite()) {
            return Err(GaborError::Domain("lattice basis must be finite".into()));
        }
        let det = basis.determinant();
        let scale = basis.iter().map(|x| x.abs()).fold(0.0, f64::max);
        if det == 0.0 || det.abs() <= 1e-14 * scale * scale {
            return Err(GaborError::Domain(format!("singular lattice basis (det = {det:e})")));
        }
        Ok(Self { basis })
    }

    /// Basis from four numbers in row-major order `[b11, b12, b21, b22]`.
    pub fn from_row_major(entries: [f64; 4]) -> Result<Self> {
        Self::new(Matrix2::new(entries[0], entries[1], entries[2], entries[3]))
    }

    /// `aℤ × bℤ`.
    pub fn rect(a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0 && b > 0.0) || !a.is_finite() || !b.is_finite() {
            return Err(GaborError::Domain(format!(
                "rectangular lattice needs a, b > 0, got ({a}, {b})"
            )));
        }
        Self::new(Matrix2::new(a, 0.0, 0.0, b))
    }

    pub fn basis(&self) -> &Matrix2<f64> {
        &self.basis
    }

    /// Area of a fundamental domain.
    pub fn covolume(&self) -> f64 {
        self.basis.determinant().abs()
    }

    /// Same lattice with a positively oriented basis, and whether columns were swapped.
    fn oriented(&self) -> (Matrix2<f64>, bool) {
        if self.basis.determinant() < 0.0 {
            let mut b = self.basis;
            b.swap_columns(0, 1);
            (b, true)
        } else {
            (self.basis, false)
        }
    }

    pub fn iwasawa(&self) -> IwasawaFactors {
        let (b, swapped) = self.oriented();
        let scale = b.determinant().sqrt();
        let s = b / scale;
        let mut r = s[(0, 1)].atan2(s[(1, 1)]);
        if r == -PI {
            r = PI;
        }
        let lower = rotation(r).transpose() * s;
        let a = lower[(0, 0)];
        let q = lower[(1, 0)] / a;
        IwasawaFactors {
            scale,
            r,
            q,
            a,
            swapped,
        }
    }
}

fn rotation(r: f64) -> Matrix2<f64> {
    let (s, c) = r.sin_cos();
    Matrix2::new(c, s, -s, c)
}

/// `Λ = scale·R_r·V_q·D_a·ℤ²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IwasawaFactors {
    /// Square root of the co-volume.
    pub scale: f64,
    /// Rotation angle in `(-π, π]`.
    pub r: f64,
    pub q: f64,
    pub a: f64,
    /// The input basis had negative orientation and its columns were swapped.
    #[serde(skip)]
    pub swapped: bool,
}

impl IwasawaFactors {
    pub fn covolume(&self) -> f64 {
        self.scale * self.scale
    }

    /// `scale·R_r·V_q·D_a`
    pub fn compose(&self) -> Matrix2<f64> {
        let shear = Matrix2::new(1.0, 0.0, self.q, 1.0);
        let dilation = Matrix2::new(self.a, 0.0, 0.0, 1.0 / self.a);
        rotation(self.r) * shear * dilation * self.scale
    }
}

/// One step of a reduction, in the order applied.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ReductionStep {
    /// The basis was negatively oriented; the swapped basis spans the same lattice.
    ColumnSwap,
    /// A symbolic window was sampled before a quadrature stage.
    Sample { step: f64, half_width: f64 },
    Operator { op: MetaplecticOp },
}

#[derive(Debug, Clone)]
pub struct Reduction {
    pub window: Window,
    /// Co-volume of the input lattice; the reduced system lives on `covolume·ℤ × ℤ`.
    pub covolume: f64,
    pub factors: IwasawaFactors,
    pub steps: Vec<ReductionStep>,
}

impl Reduction {
    pub fn parity_preserved(&self, original: Parity) -> bool {
        self.window.parity() == original
    }
}

/// Reduces `𝒢(w, L)` to the unitarily equivalent `𝒢(w′, δℤ×ℤ)`, `δ = covolume(L)`.
///
/// Rotations need quadrature: the window is sampled first (closed forms on a
/// grid wide enough for both `w` and `ŵ`). Shears and dilations are applied
/// symbolically when no rotation occurs, so rectangular lattices keep
/// closed-form windows with rigorous envelopes.
pub fn reduce_general(w: &Window, lattice: &Lattice2D) -> Result<Reduction> {
    let factors = lattice.iwasawa();
    let mut steps = Vec::new();
    if factors.swapped {
        steps.push(ReductionStep::ColumnSwap);
    }
    let rotation = reduce_angle(-factors.r);
    let mut current = if rotation.abs() <= EXACT_ANGLE_TOLERANCE {
        let mut current = w.clone();
        if factors.q != 0.0 {
            current = current.chirp(-factors.q);
            steps.push(ReductionStep::Operator {
                op: MetaplecticOp::Chirp(-factors.q),
            });
        }
        current
    } else {
        let samples = match w.kind() {
            WindowKind::Sampled(s) => (**s).clone(),
            _ => {
                let half_width = STANDARD_HALF_WIDTH
                    .max(w.time_radius())
                    .max(w.freq_radius())
                    .min(MAX_HALF_WIDTH);
                let step = MAX_STEP.min(0.25 / w.freq_radius());
                let samples = w.sample(step, half_width)?;
                steps.push(ReductionStep::Sample {
                    step: samples.step(),
                    half_width: samples.half_width(),
                });
                samples
            }
        };
        let op = MetaplecticOp::FracFourier(rotation);
        let mut out = op.apply(&samples)?;
        steps.push(ReductionStep::Operator { op });
        if factors.q != 0.0 {
            out = metaplectic::chirp(&out, -factors.q);
            steps.push(ReductionStep::Operator {
                op: MetaplecticOp::Chirp(-factors.q),
            });
        }
        Window::sampled(out)
    };
    let dilation = factors.scale / factors.a;
    if dilation != 1.0 {
        current = current.dilate(dilation)?;
        steps.push(ReductionStep::Operator {
            op: MetaplecticOp::Dilation(dilation),
        });
    }
    let label = format!("reduce({})", w.label());
    Ok(Reduction {
        window: current.with_label(label),
        covolume: lattice.covolume(),
        factors,
        steps,
    })
}
