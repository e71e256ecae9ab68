//! Functions sampled on a uniform grid symmetric about the origin.
//!
//! The grid is `t_j = (j - m)·h`, `j = 0..=2m`, so `t_j = -t_{2m-j}` holds
//! bit for bit. Values off the grid are reconstructed by cubic Lagrange
//! interpolation and are zero outside `[-m·h, m·h]`.

use std::io::{Read, Write};
use std::path::Path;

use num_complex::Complex64;

use crate::error::{GaborError, Result};
use crate::summation::CompensatedSum;

/// Largest admissible grid spacing.
pub const MAX_STEP: f64 = 0.01;

/// Standard grid: spacing 0.01 on `[-8, 8]`.
pub const STANDARD_STEP: f64 = 0.01;
pub const STANDARD_HALF_WIDTH: f64 = 8.0;

#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction {
    step: f64,
    half_count: usize,
    values: Vec<Complex64>,
}

impl SampledFunction {
    /// Wraps `values` on the grid `(j - m)·step`; the number of values must be odd.
    pub fn new(step: f64, values: Vec<Complex64>) -> Result<Self> {
        if !(step > 0.0) || step > MAX_STEP * (1.0 + 1e-9) {
            return Err(GaborError::Domain(format!(
                "grid spacing must lie in (0, {MAX_STEP}], got {step}"
            )));
        }
        if values.len() % 2 == 0 {
            return Err(GaborError::Domain(format!(
                "a symmetric grid through 0 has an odd number of points, got {}",
                values.len()
            )));
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(GaborError::Domain("sampled values must be finite".into()));
        }
        Ok(Self {
            step,
            half_count: values.len() / 2,
            values,
        })
    }

    /// Samples `f` on `[-half_width, half_width]` with spacing at most `step`.
    ///
    /// The spacing is shrunk so that `half_width` is an exact multiple of it.
    pub fn from_fn(step: f64, half_width: f64, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        if !(half_width > 0.0) {
            return Err(GaborError::Domain(format!(
                "half width must be positive, got {half_width}"
            )));
        }
        let m = (half_width / step).ceil() as usize;
        let h = half_width / m as f64;
        let values = (0..=2 * m)
            .map(|j| f((j as f64 - m as f64) * h))
            .collect();
        Self::new(h, values)
    }

    /// The standard grid used for metaplectic operations: `h = 0.01`, `T = 8`.
    pub fn standard(f: impl Fn(f64) -> Complex64) -> Self {
        Self::from_fn(STANDARD_STEP, STANDARD_HALF_WIDTH, f).expect("standard grid is valid")
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn half_width(&self) -> f64 {
        self.half_count as f64 * self.step
    }

    pub fn half_count(&self) -> usize {
        self.half_count
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn time(&self, j: usize) -> f64 {
        (j as f64 - self.half_count as f64) * self.step
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.values.len()).map(|j| self.time(j))
    }

    /// New function on the same grid.
    pub fn with_values(&self, values: Vec<Complex64>) -> Self {
        assert_eq!(values.len(), self.values.len(), "grid length mismatch");
        Self {
            step: self.step,
            half_count: self.half_count,
            values,
        }
    }

    pub fn map(&self, f: impl Fn(f64, Complex64) -> Complex64) -> Self {
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(j, &v)| f(self.time(j), v))
            .collect();
        self.with_values(values)
    }

    fn node(&self, i: isize) -> Complex64 {
        if i < 0 || i as usize >= self.values.len() {
            Complex64::new(0.0, 0.0)
        } else {
            self.values[i as usize]
        }
    }

    /// Cubic Lagrange interpolation through the four nearest nodes.
    pub fn interpolate(&self, t: f64) -> Complex64 {
        let x = t / self.step + self.half_count as f64;
        let last = (self.values.len() - 1) as f64;
        if !(x >= 0.0 && x <= last) {
            return Complex64::new(0.0, 0.0);
        }
        let i = x.floor();
        let u = x - i;
        let i = i as isize;
        if u == 0.0 {
            return self.node(i);
        }
        let w0 = -u * (u - 1.0) * (u - 2.0) / 6.0;
        let w1 = (u + 1.0) * (u - 1.0) * (u - 2.0) / 2.0;
        let w2 = -(u + 1.0) * u * (u - 2.0) / 2.0;
        let w3 = (u + 1.0) * u * (u - 1.0) / 6.0;
        self.node(i - 1) * w0 + self.node(i) * w1 + self.node(i + 1) * w2 + self.node(i + 2) * w3
    }

    /// Linear interpolation between the two nearest nodes.
    pub fn interpolate_linear(&self, t: f64) -> Complex64 {
        let x = t / self.step + self.half_count as f64;
        let last = (self.values.len() - 1) as f64;
        if !(x >= 0.0 && x <= last) {
            return Complex64::new(0.0, 0.0);
        }
        let i = x.floor();
        let u = x - i;
        let i = i as isize;
        self.node(i) * (1.0 - u) + self.node(i + 1) * u
    }

    /// Trapezoid quadrature of `∫ f(t) e^{-2πiξt} dt` over the grid.
    ///
    /// The trapezoid sum is periodic in ξ with period `1/h`; it is only a
    /// Fourier transform below the Nyquist frequency `1/(2h)` and is reported
    /// as zero above it.
    pub fn fourier(&self, xi: f64) -> Complex64 {
        if xi.abs() >= self.nyquist() {
            return Complex64::new(0.0, 0.0);
        }
        let last = self.values.len() - 1;
        let mut re = CompensatedSum::new();
        let mut im = CompensatedSum::new();
        for (j, v) in self.values.iter().enumerate() {
            let weight = if j == 0 || j == last { 0.5 } else { 1.0 };
            let phase = -2.0 * std::f64::consts::PI * xi * self.time(j);
            let term = v * Complex64::from_polar(weight, phase);
            re.add(term.re);
            im.add(term.im);
        }
        Complex64::new(re.value(), im.value()) * self.step
    }

    pub fn nyquist(&self) -> f64 {
        0.5 / self.step
    }

    /// Discrete L² norm `sqrt(h Σ |f_j|²)`.
    pub fn norm(&self) -> f64 {
        let s: CompensatedSum = self.values.iter().map(|v| v.norm_sqr()).collect();
        (s.value() * self.step).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Largest magnitude at the two end points, relative to the peak.
    pub fn edge_magnitude(&self) -> f64 {
        let peak = self.max_abs();
        if peak == 0.0 {
            return 0.0;
        }
        let first = self.values[0].norm();
        let last = self.values[self.values.len() - 1].norm();
        first.max(last) / peak
    }

    /// `max_j |f(t_j) - sign·f(-t_j)| / max_j |f(t_j)|` on the grid itself.
    ///
    /// `sign = 1` measures evenness, `sign = -1` oddness.
    pub fn symmetry_residual(&self, sign: f64) -> f64 {
        let peak = self.max_abs();
        if peak == 0.0 {
            return 0.0;
        }
        let n = self.values.len();
        let worst = (0..n)
            .map(|j| (self.values[j] - self.values[n - 1 - j] * sign).norm())
            .fold(0.0, f64::max);
        worst / peak
    }

    /// Reads the `t,re,im` CSV format: strictly increasing, uniform, symmetric t.
    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let headers = rdr.headers()?.clone();
        let names: Vec<&str> = headers.iter().collect();
        if names != ["t", "re", "im"] {
            return Err(GaborError::Parse(format!(
                "expected header `t,re,im`, found `{}`",
                names.join(",")
            )));
        }
        let mut ts = Vec::new();
        let mut values = Vec::new();
        for (line, record) in rdr.records().enumerate() {
            let record = record?;
            let field = |i: usize| -> Result<f64> {
                record[i].parse::<f64>().map_err(|e| {
                    GaborError::Parse(format!("row {}: column {}: {e}", line + 2, i + 1))
                })
            };
            ts.push(field(0)?);
            values.push(Complex64::new(field(1)?, field(2)?));
        }
        if ts.len() < 3 {
            return Err(GaborError::Parse("need at least three samples".into()));
        }
        let h = (ts[ts.len() - 1] - ts[0]) / (ts.len() - 1) as f64;
        for (j, pair) in ts.windows(2).enumerate() {
            let d = pair[1] - pair[0];
            if !(d > 0.0) {
                return Err(GaborError::Parse(format!(
                    "t must be strictly increasing (rows {} and {})",
                    j + 2,
                    j + 3
                )));
            }
            if (d - h).abs() > 1e-6 * h {
                return Err(GaborError::Parse(format!(
                    "t must be uniformly spaced: step {d} at row {} differs from {h}",
                    j + 3
                )));
            }
        }
        if (ts[0] + ts[ts.len() - 1]).abs() > 1e-6 * h {
            return Err(GaborError::Parse(format!(
                "t must be symmetric about 0, got [{}, {}]",
                ts[0],
                ts[ts.len() - 1]
            )));
        }
        Self::new(h, values)
    }

    pub fn read_csv_path(path: impl AsRef<Path>) -> Result<Self> {
        let file = std::fs::File::open(path.as_ref())?;
        Self::read_csv(std::io::BufReader::new(file))
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["t", "re", "im"])?;
        for (j, v) in self.values.iter().enumerate() {
            w.write_record([
                crate::format_float(self.time(j)),
                crate::format_float(v.re),
                crate::format_float(v.im),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}
