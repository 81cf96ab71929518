//! `hypoindex`: classify complex matrices as continuous- or discrete-time
//! system generators, compute hypocoercivity / hypocontractivity indices,
//! map between the two worlds with Cayley transforms, solve Lyapunov/Stein
//! equations, and emit short-time decay data.

mod matfile;
mod report;
mod suite;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hypoindex_core::analysis::{discrete_power_report, shifted_decay_fit, short_time_exponent_fit};
use hypoindex_core::coercivity::{classify_continuous, hc_index, shifted_hc_index};
use hypoindex_core::contractivity::{classify_discrete, dhc_index, scaled_dhc_index};
use hypoindex_core::transforms::{
    cayley, index_preservation_check, inverse_cayley, lyapunov_cayley_map, scaled_cayley,
    solve_lyapunov_continuous, solve_lyapunov_discrete,
};
use hypoindex_core::{C64, ComplexMatrix, Error as CoreError, Tolerances};
use matfile::{KindHint, LoadedMatrix, MatrixFile};
use report::{exit_code_for, merge, section, ExitCode, InputStamp, Report};
use serde_json::{json, Value};
use std::path::PathBuf;
use std::process::ExitCode as ProcessExit;

#[derive(Parser)]
#[command(
    name = "hypoindex",
    version,
    about = "Stability, semi-dissipativity/semi-contractivity and hypocoercivity/hypocontractivity analysis for complex square matrices"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Pretty-print the JSON report.
    #[arg(long, global = true)]
    pretty: bool,
    #[command(flatten)]
    tol: TolArgs,
}

#[derive(Args, Clone)]
struct TolArgs {
    /// Relative singular-value cutoff for rank decisions (default n * 2^-40).
    #[arg(long, global = true)]
    tol_rank: Option<f64>,
    /// Relative definiteness margin.
    #[arg(long, global = true)]
    tol_psd: Option<f64>,
    /// Relative symmetry tolerance.
    #[arg(long, global = true)]
    tol_sym: Option<f64>,
    /// Relative reconstruction tolerance.
    #[arg(long, global = true)]
    tol_recon: Option<f64>,
    /// Unitarity tolerance.
    #[arg(long, global = true)]
    tol_unit: Option<f64>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ClassifyMode {
    Continuous,
    Discrete,
    Both,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum IndexKind {
    Hc,
    Shc,
    Dhc,
    Dshc,
    All,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Direction {
    C2d,
    D2c,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DecayMode {
    Continuous,
    Discrete,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum LyapunovKind {
    Continuous,
    Discrete,
    Map,
}

#[derive(Subcommand)]
enum Command {
    /// Stability / dissipativity / contractivity classification.
    Classify {
        input: PathBuf,
        #[arg(long, value_enum, default_value = "both")]
        mode: ClassifyMode,
    },
    /// Hypocoercivity / hypocontractivity indices with per-method tables.
    Index {
        input: PathBuf,
        #[arg(long, value_enum, default_value = "all")]
        which: IndexKind,
    },
    /// Cayley transform between continuous and discrete time.
    Cayley {
        input: PathBuf,
        #[arg(long, value_enum)]
        direction: Direction,
        /// Step size for the scaled continuous-to-discrete map (default 2,
        /// the plain transform).
        #[arg(long)]
        t: Option<f64>,
        /// Real part of the unit-modulus shift for d2c (default 1).
        #[arg(long, default_value_t = 1.0)]
        alpha_re: f64,
        /// Imaginary part of the unit-modulus shift for d2c.
        #[arg(long, default_value_t = 0.0)]
        alpha_im: f64,
        /// Write the image matrix to this path as a matrix file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Short-time decay data: CSV samples plus the fitted exponent.
    Decay {
        input: PathBuf,
        #[arg(long, value_enum)]
        mode: DecayMode,
        /// CSV output path (columns t,norm,shifted_norm).
        #[arg(long)]
        out_csv: PathBuf,
    },
    /// Dense Lyapunov / Stein solves and the transform correspondence.
    Lyapunov {
        input: PathBuf,
        #[arg(long, value_enum, default_value = "continuous")]
        kind: LyapunovKind,
        /// Right-hand side matrix file (defaults to the identity).
        #[arg(long)]
        q: Option<PathBuf>,
    },
    /// Batch-run a corpus directory and check embedded expectations.
    Suite { corpus_dir: PathBuf },
}

fn main() -> ProcessExit {
    let cli = Cli::parse();
    let tol = match resolve_tolerances(&cli.tol) {
        Ok(t) => t,
        Err(failure) => {
            eprintln!("hypoindex: {}", failure.message);
            return ProcessExit::from(failure.code as u8);
        }
    };
    let pretty = cli.pretty;
    match run(cli, &tol, pretty) {
        Ok(code) => ProcessExit::from(code as u8),
        Err(failure) => {
            eprintln!("hypoindex: {}", failure.message);
            ProcessExit::from(failure.code as u8)
        }
    }
}

struct Failure {
    code: ExitCode,
    message: String,
}

impl Failure {
    fn io(message: impl Into<String>) -> Self {
        Failure {
            code: ExitCode::Io,
            message: message.into(),
        }
    }
}

impl From<CoreError> for Failure {
    fn from(err: CoreError) -> Self {
        Failure {
            code: exit_code_for(&err),
            message: err.to_string(),
        }
    }
}

/// Named tolerance presets selected by HYPOINDEX_TOL_PROFILE; flags override.
fn resolve_tolerances(args: &TolArgs) -> Result<Tolerances, Failure> {
    let mut tol = Tolerances::default();
    match std::env::var("HYPOINDEX_TOL_PROFILE").as_deref() {
        Ok("strict") => {
            tol.tol_psd = 1e-12;
            tol.tol_sym = 1e-12;
            tol.tol_recon = 1e-12;
            tol.tol_unit = 1e-14;
        }
        Ok("loose") => {
            tol.tol_psd = 1e-8;
            tol.tol_sym = 1e-8;
            tol.tol_recon = 1e-8;
            tol.tol_unit = 1e-10;
        }
        _ => {}
    }
    if let Some(v) = args.tol_rank {
        tol.tol_rank = Some(v);
    }
    if let Some(v) = args.tol_psd {
        tol.tol_psd = v;
    }
    if let Some(v) = args.tol_sym {
        tol.tol_sym = v;
    }
    if let Some(v) = args.tol_recon {
        tol.tol_recon = v;
    }
    if let Some(v) = args.tol_unit {
        tol.tol_unit = v;
    }
    let values = [
        tol.tol_rank.unwrap_or(0.0),
        tol.tol_psd,
        tol.tol_sym,
        tol.tol_recon,
        tol.tol_unit,
    ];
    if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(Failure::io("tolerances must be finite and nonnegative"));
    }
    Ok(tol)
}

fn tol_value(tol: &Tolerances) -> Value {
    serde_json::to_value(tol).expect("tolerances serialize")
}

fn load_input(path: &PathBuf) -> Result<LoadedMatrix, Failure> {
    matfile::load(path).map_err(Failure::io)
}

fn stamp(loaded: &LoadedMatrix) -> InputStamp {
    InputStamp {
        name: loaded.file.name.clone(),
        n: loaded.file.n,
        content_hash: loaded.content_hash.clone(),
        kind_hint: loaded.file.kind_hint,
    }
}

fn run(cli: Cli, tol: &Tolerances, pretty: bool) -> Result<ExitCode, Failure> {
    match cli.command {
        Command::Classify { input, mode } => {
            let loaded = load_input(&input)?;
            let body = classify_body(&loaded.matrix, mode, tol)?;
            let report = Report::new("classify", stamp(&loaded), tol_value(tol), body);
            println!("{}", report.render(pretty));
            Ok(ExitCode::Ok)
        }
        Command::Index { input, which } => {
            let loaded = load_input(&input)?;
            let body = index_body(&loaded.matrix, which, tol)?;
            let report = Report::new("index", stamp(&loaded), tol_value(tol), body);
            println!("{}", report.render(pretty));
            Ok(ExitCode::Ok)
        }
        Command::Cayley {
            input,
            direction,
            t,
            alpha_re,
            alpha_im,
            out,
        } => {
            let loaded = load_input(&input)?;
            let body = cayley_body(&loaded, direction, t, C64::new(alpha_re, alpha_im), out, tol)?;
            let report = Report::new("cayley", stamp(&loaded), tol_value(tol), body);
            println!("{}", report.render(pretty));
            Ok(ExitCode::Ok)
        }
        Command::Decay {
            input,
            mode,
            out_csv,
        } => {
            let loaded = load_input(&input)?;
            let body = decay_body(&loaded.matrix, mode, &out_csv, tol)?;
            let report = Report::new("decay", stamp(&loaded), tol_value(tol), body);
            println!("{}", report.render(pretty));
            Ok(ExitCode::Ok)
        }
        Command::Lyapunov { input, kind, q } => {
            let loaded = load_input(&input)?;
            let q_matrix = match q {
                Some(path) => load_input(&path)?.matrix,
                None => ComplexMatrix::identity(loaded.matrix.nrows()),
            };
            let body = lyapunov_body(&loaded.matrix, &q_matrix, kind, tol)?;
            let report = Report::new("lyapunov", stamp(&loaded), tol_value(tol), body);
            println!("{}", report.render(pretty));
            Ok(ExitCode::Ok)
        }
        Command::Suite { corpus_dir } => suite::run_suite(&corpus_dir, tol, pretty),
    }
}

fn classify_body(
    matrix: &ComplexMatrix,
    mode: ClassifyMode,
    tol: &Tolerances,
) -> Result<Value, Failure> {
    let mut body = json!({});
    if mode != ClassifyMode::Discrete {
        let cont = classify_continuous(matrix, tol)?;
        body = merge(body, section("continuous", &cont));
    }
    if mode != ClassifyMode::Continuous {
        let disc = classify_discrete(matrix, tol)?;
        body = merge(body, section("discrete", &disc));
    }
    Ok(body)
}

fn index_body(
    matrix: &ComplexMatrix,
    which: IndexKind,
    tol: &Tolerances,
) -> Result<Value, Failure> {
    let mut body = json!({});
    // Index answers come with the classification they qualify.
    if matches!(which, IndexKind::Hc | IndexKind::Shc | IndexKind::All) {
        let cont = classify_continuous(matrix, tol)?;
        body = merge(body, section("continuous", &cont));
    }
    if matches!(which, IndexKind::Dhc | IndexKind::Dshc | IndexKind::All) {
        let disc = classify_discrete(matrix, tol)?;
        body = merge(body, section("discrete", &disc));
    }

    // For `all`, per-index precondition failures are collected instead of
    // aborting the report; consistency violations still abort.
    let mut run_one = |key: &str, value: Result<Value, CoreError>| match value {
        Ok(v) => {
            body = merge(
                body.clone(),
                Value::Object([(key.to_string(), v)].into_iter().collect()),
            );
            Ok(())
        }
        Err(e) if which == IndexKind::All => {
            let c = exit_code_for(&e);
            if matches!(c, ExitCode::Internal | ExitCode::Indeterminate) {
                return Err(Failure::from(e));
            }
            body = merge(
                body.clone(),
                Value::Object(
                    [(key.to_string(), json!({ "error": e.to_string() }))]
                        .into_iter()
                        .collect(),
                ),
            );
            Ok(())
        }
        Err(e) => Err(Failure::from(e)),
    };

    if matches!(which, IndexKind::Hc | IndexKind::All) {
        run_one(
            "hc",
            hc_index(matrix, tol).map(|r| serde_json::to_value(&r).unwrap()),
        )?;
    }
    if matches!(which, IndexKind::Shc | IndexKind::All) {
        run_one(
            "shc",
            shifted_hc_index(matrix, tol).map(|r| serde_json::to_value(&r).unwrap()),
        )?;
    }
    if matches!(which, IndexKind::Dhc | IndexKind::All) {
        run_one(
            "dhc",
            dhc_index(matrix, tol).map(|r| serde_json::to_value(&r).unwrap()),
        )?;
    }
    if matches!(which, IndexKind::Dshc | IndexKind::All) {
        run_one(
            "dshc",
            scaled_dhc_index(matrix, tol).map(|r| serde_json::to_value(&r).unwrap()),
        )?;
    }
    Ok(body)
}

fn cayley_body(
    loaded: &LoadedMatrix,
    direction: Direction,
    t: Option<f64>,
    alpha: C64,
    out: Option<PathBuf>,
    tol: &Tolerances,
) -> Result<Value, Failure> {
    let matrix = &loaded.matrix;
    let (result, image_kind) = match direction {
        Direction::C2d => {
            let r = match t {
                Some(step) => scaled_cayley(matrix, step, tol)?,
                None => cayley(matrix, tol)?,
            };
            (r, KindHint::Discrete)
        }
        Direction::D2c => (inverse_cayley(matrix, alpha, tol)?, KindHint::Continuous),
    };

    let mut body = section("cayley", &result);

    // Index preservation whenever the continuous side qualifies; for the
    // scaled map the half-step matrix carries the same index.
    let continuous_side = match direction {
        Direction::C2d => match t {
            Some(step) => matrix.scale_real(step * 0.5),
            None => matrix.clone(),
        },
        Direction::D2c => result.image.clone(),
    };
    if let Ok(p) = index_preservation_check(&continuous_side, tol) {
        body = merge(body, section("index_preservation", &p));
    }

    if let Some(path) = out {
        let name = format!("{}-{}", loaded.file.name, match direction {
            Direction::C2d => "c2d",
            Direction::D2c => "d2c",
        });
        let file = MatrixFile::from_matrix(&name, &result.image, Some(image_kind));
        matfile::save(&path, &file).map_err(Failure::io)?;
        body = merge(body, json!({ "image_written_to": path.display().to_string() }));
    }
    Ok(body)
}

fn decay_body(
    matrix: &ComplexMatrix,
    mode: DecayMode,
    out_csv: &std::path::Path,
    tol: &Tolerances,
) -> Result<Value, Failure> {
    match mode {
        DecayMode::Continuous => {
            // Accretive hypocoercive input takes the plain fit; anything else
            // goes through the shifted variant.
            let fit = match hc_index(matrix, tol) {
                Ok(idx) if idx.exists => {
                    short_time_exponent_fit(matrix, idx.m_hc.unwrap(), tol)?
                }
                _ => shifted_decay_fit(matrix, tol)?,
            };
            let mut csv = String::from("t,norm,shifted_norm\n");
            for (t, norm) in fit.t_samples.iter().zip(&fit.norms) {
                let shifted = (fit.lambda_shift * t).exp() * norm;
                csv.push_str(&format!("{t:.17e},{norm:.17e},{shifted:.17e}\n"));
            }
            std::fs::write(out_csv, csv)
                .map_err(|e| Failure::io(format!("{}: {e}", out_csv.display())))?;
            let verdict = (fit.a_est - fit.a_expected as f64).abs() <= 0.2;
            Ok(merge(
                section("decay_fit", &fit),
                json!({
                    "csv_written_to": out_csv.display().to_string(),
                    "exponent_matches_index": verdict,
                }),
            ))
        }
        DecayMode::Discrete => {
            let rep = discrete_power_report(matrix, tol)?;
            let mut csv = String::from("t,norm,shifted_norm\n");
            for &(j, norm) in &rep.profile {
                let shifted = norm / rep.sigma_max.powi(j as i32);
                csv.push_str(&format!("{j},{norm:.17e},{shifted:.17e}\n"));
            }
            std::fs::write(out_csv, csv)
                .map_err(|e| Failure::io(format!("{}: {e}", out_csv.display())))?;
            Ok(merge(
                section("power_report", &rep),
                json!({ "csv_written_to": out_csv.display().to_string() }),
            ))
        }
    }
}

fn lyapunov_body(
    matrix: &ComplexMatrix,
    q: &ComplexMatrix,
    kind: LyapunovKind,
    tol: &Tolerances,
) -> Result<Value, Failure> {
    match kind {
        LyapunovKind::Continuous => {
            let sol = solve_lyapunov_continuous(matrix, q, tol)?;
            Ok(section("lyapunov", &sol))
        }
        LyapunovKind::Discrete => {
            let sol = solve_lyapunov_discrete(matrix, q, tol)?;
            Ok(section("lyapunov", &sol))
        }
        LyapunovKind::Map => {
            let map = lyapunov_cayley_map(matrix, q, tol)?;
            Ok(section("lyapunov_map", &map))
        }
    }
}

