//! `gabor-wirtinger`: profiles, certificates, barrier scans, lattice reduction
//! and finite-model oracle runs as CSV or JSON.

mod inputs;

use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gabor_wirtinger::barrier::{h1_barrier_scan, write_scan_csv, ScanRow};
use gabor_wirtinger::certify_gaussian::gaussian_certificate;
use gabor_wirtinger::criterion::{
    certify, certify_rect, min_delta, CriterionVerdict, MinimumKind, ProfilePoint,
    DEFAULT_GRID_POINTS, DEFAULT_TAIL_TOL,
};
use gabor_wirtinger::lattice::{reduce_general, ReductionStep};
use gabor_wirtinger::oracle::{oracle_bounds, DEFAULT_N};
use gabor_wirtinger::sampled::{SampledFunction, STANDARD_HALF_WIDTH, STANDARD_STEP};
use gabor_wirtinger::window::{classify_parity, Parity, Window};
use gabor_wirtinger::GaborError;
use serde::Serialize;

const EXIT_INPUT: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;
const EXIT_USAGE: u8 = 64;

#[derive(Parser)]
#[command(name = "gabor-wirtinger", version, about = "Wirtinger criterion for Gabor frames")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample δ_g(ω) over [0, 1] (CSV by default)
    Profile {
        #[command(flatten)]
        window: WindowArgs,
        #[command(flatten)]
        numerics: NumericArgs,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Certify G(g, δZ×Z) or G(g, aZ×bZ)
    Certify {
        #[command(flatten)]
        window: WindowArgs,
        #[command(flatten)]
        numerics: NumericArgs,
        /// Co-volume of the square lattice δZ×Z
        #[arg(long, conflicts_with_all = ["a", "b"], required_unless_present_all = ["a", "b"])]
        delta: Option<f64>,
        #[arg(long, requires = "b")]
        a: Option<f64>,
        #[arg(long, requires = "a")]
        b: Option<f64>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// δ(0) for dilated first Hermite functions on a log-uniform grid of b
    BarrierScan {
        #[arg(long)]
        b_min: f64,
        #[arg(long)]
        b_max: f64,
        #[arg(long)]
        steps: usize,
        #[arg(long, env = "GABOR_TAIL_TOL", default_value_t = DEFAULT_TAIL_TOL)]
        tail_tol: f64,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Closed-form Gaussian certificate
    GaussianCert {
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Factor a lattice basis as scale·R_r·V_q·D_a
    Iwasawa {
        /// Row-major "b11,b12,b21,b22" or '{"basis": [[b11,b12],[b21,b22]]}'
        #[arg(long, allow_hyphen_values = true)]
        basis: String,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Reduce (g, Λ) to an equivalent window on δZ×Z
    Reduce {
        #[command(flatten)]
        window: WindowArgs,
        #[command(flatten)]
        numerics: NumericArgs,
        #[arg(long, allow_hyphen_values = true)]
        basis: String,
        /// Also run the criterion on the reduced pair
        #[arg(long)]
        certify: bool,
        /// Where to write the reduced window as CSV t,re,im
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Frame bounds of the finite Gabor model
    Oracle {
        #[command(flatten)]
        window: WindowArgs,
        #[arg(long)]
        a: f64,
        #[arg(long)]
        b: f64,
        #[arg(long = "N", default_value_t = DEFAULT_N)]
        n: usize,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args)]
struct WindowArgs {
    /// gaussian | hermite:<n> | file:<path>
    #[arg(long)]
    window: String,
    /// Apply the unitary dilation 𝒟_b to the window first
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    dilation: f64,
}

impl WindowArgs {
    fn build(&self) -> Result<Window, GaborError> {
        let w = inputs::parse_window(&self.window)?;
        if self.dilation == 1.0 {
            Ok(w)
        } else {
            w.dilate(self.dilation)
        }
    }
}

#[derive(Args)]
struct NumericArgs {
    /// Odd number of ω grid points
    #[arg(long, default_value_t = DEFAULT_GRID_POINTS)]
    grid_points: usize,
    #[arg(long, env = "GABOR_TAIL_TOL", default_value_t = DEFAULT_TAIL_TOL)]
    tail_tol: f64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

struct Failure {
    code: u8,
    message: String,
}

impl From<GaborError> for Failure {
    fn from(e: GaborError) -> Self {
        Failure {
            code: if e.is_input_error() {
                EXIT_INPUT
            } else {
                EXIT_NUMERICAL
            },
            message: e.to_string(),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure {
            code: EXIT_INPUT,
            message: e.to_string(),
        }
    }
}

fn emit(output: Option<&Path>, bytes: &[u8]) -> io::Result<()> {
    match output {
        Some(path) => File::create(path)?.write_all(bytes),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(bytes)?;
            out.flush()
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> Vec<u8> {
    let mut bytes = serde_json::to_vec_pretty(value).expect("serializable output");
    bytes.push(b'\n');
    bytes
}

#[derive(Serialize)]
struct ProfileRow {
    omega: f64,
    status: &'static str,
    delta_g_low: Option<f64>,
    delta_g: Option<f64>,
    delta_g_high: Option<f64>,
    tail_bound_num: Option<f64>,
    tail_bound_den: Option<f64>,
}

#[derive(Serialize)]
struct ProfileJson {
    window: String,
    grid_points: usize,
    tail_tol: f64,
    min_value: f64,
    argmin_omega: f64,
    minimum: MinimumKind,
    certifying: bool,
    rigorous: bool,
    points: Vec<ProfileRow>,
}

fn profile_row(p: &ProfilePoint) -> ProfileRow {
    match p {
        ProfilePoint::Value(d) => ProfileRow {
            omega: d.omega,
            status: "value",
            delta_g_low: Some(d.low),
            delta_g: Some(d.value),
            delta_g_high: Some(d.high),
            tail_bound_num: Some(d.numerator.tail_bound),
            tail_bound_den: Some(d.denominator.tail_bound),
        },
        ProfilePoint::Degenerate { omega } | ProfilePoint::ZeroSum { omega } => ProfileRow {
            omega: *omega,
            status: if matches!(p, ProfilePoint::Degenerate { .. }) {
                "degenerate"
            } else {
                "zero_sum"
            },
            delta_g_low: None,
            delta_g: None,
            delta_g_high: None,
            tail_bound_num: None,
            tail_bound_den: None,
        },
    }
}

#[derive(Serialize)]
struct CertifyJson {
    #[serde(flatten)]
    verdict: CriterionVerdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    a: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    b: Option<f64>,
}

#[derive(Serialize)]
struct ScanJson {
    rows: Vec<ScanRow>,
}

#[derive(Serialize)]
struct IwasawaJson {
    scale: f64,
    r: f64,
    q: f64,
    a: f64,
}

#[derive(Serialize)]
struct ReduceJson {
    window: String,
    covolume: f64,
    factors: IwasawaJson,
    steps: Vec<ReductionStep>,
    parity_in: Parity,
    parity_out: Parity,
    #[serde(skip_serializing_if = "Option::is_none")]
    samples: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    verdict: Option<CriterionVerdict>,
}

/// Turns `-0.0` into `0.0` so that signed zeros never reach the output.
fn unsigned_zero(x: f64) -> f64 {
    x + 0.0
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Profile {
            window,
            numerics,
            format,
            output,
        } => {
            let w = window.build()?;
            let profile = min_delta(&w, numerics.grid_points, numerics.tail_tol)?;
            let bytes = match format {
                Format::Csv => {
                    let mut buf = Vec::new();
                    profile.write_csv(&mut buf)?;
                    buf
                }
                Format::Json => to_json(&ProfileJson {
                    window: w.label().to_string(),
                    grid_points: numerics.grid_points,
                    tail_tol: profile.tail_tol,
                    min_value: profile.min_value,
                    argmin_omega: profile.argmin_omega,
                    minimum: profile.minimum,
                    certifying: profile.certifying,
                    rigorous: profile.rigorous,
                    points: profile.all_points().iter().map(profile_row).collect(),
                }),
            };
            emit(output.as_deref(), &bytes)?;
            eprintln!(
                "window={} min_value={} argmin_omega={} certifying={} rigorous={}",
                w.label(),
                profile.min_value,
                profile.argmin_omega,
                profile.certifying,
                profile.rigorous
            );
        }
        Command::Certify {
            window,
            numerics,
            delta,
            a,
            b,
            output,
        } => {
            let w = window.build()?;
            let verdict = match (delta, a, b) {
                (Some(d), _, _) => certify(&w, d, numerics.grid_points, numerics.tail_tol)?,
                (None, Some(a), Some(b)) => {
                    certify_rect(&w, a, b, numerics.grid_points, numerics.tail_tol)?
                }
                _ => unreachable!("clap enforces --delta or --a/--b"),
            };
            emit(output.as_deref(), &to_json(&CertifyJson { verdict, a, b }))?;
        }
        Command::BarrierScan {
            b_min,
            b_max,
            steps,
            tail_tol,
            format,
            output,
        } => {
            let rows = h1_barrier_scan(b_min, b_max, steps, tail_tol)?;
            let bytes = match format {
                Format::Csv => {
                    let mut buf = Vec::new();
                    write_scan_csv(&rows, &mut buf)?;
                    buf
                }
                Format::Json => to_json(&ScanJson { rows }),
            };
            emit(output.as_deref(), &bytes)?;
        }
        Command::GaussianCert { output } => {
            emit(output.as_deref(), &to_json(&gaussian_certificate()))?;
        }
        Command::Iwasawa { basis, output } => {
            let f = inputs::parse_basis(&basis)?.iwasawa();
            let json = IwasawaJson {
                scale: unsigned_zero(f.scale),
                r: unsigned_zero(f.r),
                q: unsigned_zero(f.q),
                a: unsigned_zero(f.a),
            };
            emit(output.as_deref(), &to_json(&json))?;
        }
        Command::Reduce {
            window,
            numerics,
            basis,
            certify: run_criterion,
            output,
        } => {
            let w = window.build()?;
            let lattice = inputs::parse_basis(&basis)?;
            let reduction = reduce_general(&w, &lattice)?;
            let samples = match &output {
                Some(path) => {
                    let half_width = STANDARD_HALF_WIDTH.max(reduction.window.time_radius()).min(32.0);
                    let s = SampledFunction::from_fn(STANDARD_STEP, half_width, |t| {
                        reduction.window.time_eval(t)
                    })?;
                    s.write_csv(File::create(path)?)?;
                    Some(path.display().to_string())
                }
                None => None,
            };
            let verdict = if run_criterion {
                Some(certify(
                    &reduction.window,
                    reduction.covolume,
                    numerics.grid_points,
                    numerics.tail_tol,
                )?)
            } else {
                None
            };
            let f = reduction.factors;
            let json = ReduceJson {
                window: reduction.window.label().to_string(),
                covolume: reduction.covolume,
                factors: IwasawaJson {
                    scale: unsigned_zero(f.scale),
                    r: unsigned_zero(f.r),
                    q: unsigned_zero(f.q),
                    a: unsigned_zero(f.a),
                },
                steps: reduction.steps,
                parity_in: w.parity(),
                parity_out: classify_parity(&reduction.window),
                samples,
                verdict,
            };
            emit(None, &to_json(&json))?;
        }
        Command::Oracle {
            window,
            a,
            b,
            n,
            output,
        } => {
            let w = window.build()?;
            emit(output.as_deref(), &to_json(&oracle_bounds(&w, a, b, n)?))?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
