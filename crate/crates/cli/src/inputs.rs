//! Parsing of window and lattice arguments.

use std::path::Path;

use gabor_wirtinger::lattice::Lattice2D;
use gabor_wirtinger::sampled::SampledFunction;
use gabor_wirtinger::window::Window;
use gabor_wirtinger::{GaborError, Result};

/// `gaussian`, `hermite:<n>` or `file:<path>` (CSV `t,re,im`).
pub fn parse_window(spec: &str) -> Result<Window> {
    let spec = spec.trim();
    if spec == "gaussian" {
        return Ok(Window::gaussian());
    }
    if let Some(order) = spec.strip_prefix("hermite:") {
        let n: u32 = order
            .parse()
            .map_err(|_| GaborError::Parse(format!("bad Hermite order '{order}'")))?;
        return Ok(Window::hermite(n));
    }
    if let Some(path) = spec.strip_prefix("file:") {
        let samples = SampledFunction::read_csv_path(Path::new(path))?;
        return Ok(Window::sampled(samples).with_label(spec.to_string()));
    }
    Err(GaborError::Parse(format!(
        "unknown window '{spec}' (expected gaussian, hermite:<n> or file:<path>)"
    )))
}

/// Four comma-separated numbers in row-major order, or `{"basis": [[..], [..]]}`.
pub fn parse_basis(text: &str) -> Result<Lattice2D> {
    let text = text.trim();
    let entries: [f64; 4] = if text.starts_with('{') {
        #[derive(serde::Deserialize)]
        struct Basis {
            basis: [[f64; 2]; 2],
        }
        let b: Basis = serde_json::from_str(text)
            .map_err(|e| GaborError::Parse(format!("bad basis JSON: {e}")))?;
        [b.basis[0][0], b.basis[0][1], b.basis[1][0], b.basis[1][1]]
    } else {
        let values = text
            .split(',')
            .map(|v| {
                v.trim()
                    .parse::<f64>()
                    .map_err(|_| GaborError::Parse(format!("bad basis entry '{v}'")))
            })
            .collect::<Result<Vec<f64>>>()?;
        values.try_into().map_err(|v: Vec<f64>| {
            GaborError::Parse(format!("basis needs 4 numbers, got {}", v.len()))
        })?
    };
    Lattice2D::from_row_major(entries)
}
