use thiserror::Error;

pub type Result<T> = std::result::Result<T, GaborError>;

/// Error kinds shared by every module of the crate.
#[derive(Debug, Error)]
pub enum GaborError {
    /// A parameter lies outside the domain of the operation (e.g. a nonpositive dilation).
    #[error("domain error: {0}")]
    Domain(String),

    /// An input violates an operation's precondition.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// Every lattice-sum term vanished up to the summation cap.
    #[error("lattice sum vanishes identically at omega = {omega} (checked |k| <= {terms})")]
    ZeroSum { omega: f64, terms: usize },

    /// The denominator lattice sum vanishes, so δ_g(ω) is not a finite number.
    #[error("degenerate denominator at omega = {omega}: numerator {numerator:e}, denominator {denominator:e}")]
    Degenerate {
        omega: f64,
        numerator: f64,
        denominator: f64,
    },

    #[error("fractional Fourier angle {angle} is within 1e-6 of a multiple of pi; use the exact special cases")]
    DegenerateAngle { angle: f64 },

    #[error("series with rate {rate} diverges")]
    DivergentSeries { rate: f64 },

    #[error("parameters a = {a}, b = {b} are not representable with N = {n} within 1%")]
    ParameterNotRepresentable { a: f64, b: f64, n: usize },

    #[error("grid must have an odd number of points >= 3, got {0}")]
    InvalidGrid(usize),

    #[error("eigensolver failed: {0}")]
    Numerical(String),

    #[error("malformed input: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl GaborError {
    /// True for failures caused by the caller's input rather than by the numerics.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            GaborError::Domain(_)
                | GaborError::Precondition(_)
                | GaborError::ParameterNotRepresentable { .. }
                | GaborError::InvalidGrid(_)
                | GaborError::Parse(_)
                | GaborError::Io(_)
                | GaborError::Csv(_)
        )
    }
}
