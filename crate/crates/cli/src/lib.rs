//! `steinlab` command-line front end.
//!
//! Exit codes: 0 success or definite verdict, 2 input error, 3 indeterminate
//! verdict, 4 certification failure, 1 internal or output error.

mod inputs;
pub mod report;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde_json::{json, Value};
use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use steinlab::analytic::{
    check_witness, gap_set, laurent_coefficient, monomial_section, witness_search_seeded,
    SeriesSpec, StripPoint, DEFAULT_WITNESS_SEED,
};
use steinlab::domain4::{
    build_polytope, decompose_seed, eigen_frame, example_seed, find_j, verify_reinhardt_instance,
};
use steinlab::intcore::{example_n, LatticeVector, TorusPoint};
use steinlab::steinness::{classify, critical_modulus, ModulusSpec, Verdict};
use steinlab::szenum::{sz_margin_with, SzOptions};

use inputs::{
    parse_complex, parse_complex_file, parse_int_list, parse_matrix, parse_point_file,
    parse_real_list, parse_turns, parse_vector_file, InputFile,
};
use report::{inputs_hash, render_report, to_payload, Format, Provenance, Report, SCHEMA_VERSION};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Core(#[from] steinlab::Error),
    #[error("schema violation: {0}")]
    SchemaViolation(String),
    #[error("certification failed: {0}")]
    Certification(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use steinlab::Error as E;
        match self {
            CliError::Input(_) => 2,
            CliError::Core(e) => match e {
                E::NotUnimodular { .. }
                | E::DimensionMismatch { .. }
                | E::ZeroCoordinate { .. }
                | E::DegenerateDegreeZero
                | E::NotMonic
                | E::ZeroConstantTerm
                | E::NonUnitConstantTerm
                | E::DegreeTooLarge { .. }
                | E::OutsideStrip { .. }
                | E::InvalidInput(_)
                | E::Io(_)
                | E::Json(_) => 2,
                _ => 4,
            },
            CliError::SchemaViolation(_) | CliError::Certification(_) => 4,
            CliError::Internal(_) => 1,
        }
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "steinlab",
    version,
    about = "Certified Steinness criteria and witnesses for flat bundles over annuli"
)]
struct Cli {
    /// Worker threads (default: STEINLAB_THREADS, else all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long, global = true, value_enum, default_value = "json")]
    format: Format,
    /// Write the report here instead of standard output.
    #[arg(long, short = 'o', global = true)]
    output: Option<PathBuf>,
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = DEFAULT_WITNESS_SEED)]
    seed: u64,
    /// Record wall time in the provenance block (breaks byte reproducibility).
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct SeriesArgs {
    #[arg(long)]
    matrix: PathBuf,
    /// Modulus: a positive real, `inf` or `2inf`.
    #[arg(short = 'm', long = "modulus")]
    modulus: ModulusSpec,
    /// Exponent covector, e.g. `1,0`.
    #[arg(short = 'k', long, allow_hyphen_values = true)]
    k: String,
    /// Anchor `w̃` as `re` or `re,im`.
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    anchor: String,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Stein verdict for `E_m(D, M)`.
    Classify {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        modulus: ModulusSpec,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
    },
    /// Critical modulus `2π²/log ρ(M)`.
    CriticalModulus {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
    },
    /// House margin `μ′(d)` by exhaustive enumeration.
    SzMargin {
        #[arg(long, short = 'd')]
        degree: usize,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        #[arg(long, default_value_t = 1)]
        shards: usize,
        #[arg(long)]
        checkpoint: Option<PathBuf>,
    },
    /// Log-polytope and Reinhardt-domain certificates for the 4-dimensional
    /// example (embedded matrix and seed unless overridden).
    BuildDomain4 {
        #[arg(long)]
        matrix: Option<PathBuf>,
        #[arg(long = "seed-vector")]
        seed_vector: Option<PathBuf>,
        #[arg(long, default_value_t = 8)]
        horizon: u64,
        #[arg(long, default_value_t = 4)]
        samples: usize,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
    },
    /// Evaluates the monomial-extension series at `(w, z)`.
    MonomialExtend {
        #[command(flatten)]
        series: SeriesArgs,
        /// `w.json z.json`.
        #[arg(long, num_args = 2, value_names = ["W", "Z"])]
        eval: Vec<PathBuf>,
    },
    /// Non-Steinness witness certificate.
    Witness {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long, default_value_t = 30)]
        horizon: u64,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
    },
    /// Return-time set of a torus rotation.
    Gaps {
        #[arg(long)]
        theta: PathBuf,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        horizon: u64,
    },
    /// A Laurent coefficient of the monomial-extension series by torus FFT.
    Laurent {
        #[command(flatten)]
        series: SeriesArgs,
        #[arg(long)]
        w: PathBuf,
        /// Coefficient index, e.g. `1,1`.
        #[arg(long, allow_hyphen_values = true)]
        coeff: String,
        /// Torus radii, default all ones.
        #[arg(long)]
        radii: Option<String>,
        #[arg(long, default_value_t = 16)]
        samples: usize,
    },
}

struct Outcome {
    kind: &'static str,
    payload: Value,
    params: Vec<(&'static str, String)>,
    files: Vec<InputFile>,
    /// Exit code once the report is written.
    code: i32,
}

fn positive(name: &str, x: f64) -> Result<f64, CliError> {
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(CliError::Input(format!(
            "--{name} must be positive, got {x}"
        )))
    }
}

fn series_spec(a: &SeriesArgs) -> Result<(SeriesSpec, InputFile), CliError> {
    let mf = InputFile::read("matrix", &a.matrix)?;
    let m = parse_matrix(&mf)?;
    let k = LatticeVector::from_i64(&parse_int_list(&a.k)?);
    let anchor = parse_complex(&a.anchor)?;
    positive("tol", a.tol)?;
    Ok((SeriesSpec::new(m, a.modulus, k, anchor)?, mf))
}

fn series_params(a: &SeriesArgs) -> Vec<(&'static str, String)> {
    vec![
        ("modulus", a.modulus.to_string()),
        ("k", a.k.clone()),
        ("anchor", a.anchor.clone()),
        ("tol", a.tol.to_string()),
    ]
}

fn execute(cmd: &Command, seed: u64) -> Result<Outcome, CliError> {
    match cmd {
        Command::Classify {
            matrix,
            modulus,
            tol,
        } => {
            let mf = InputFile::read("matrix", matrix)?;
            let m = parse_matrix(&mf)?;
            let v = classify(&m, *modulus, positive("tol", *tol)?)?;
            let code = if matches!(v.verdict, Verdict::Indeterminate { .. }) {
                3
            } else {
                0
            };
            Ok(Outcome {
                kind: "classify",
                payload: to_payload(&v)?,
                params: vec![("modulus", modulus.to_string()), ("tol", tol.to_string())],
                files: vec![mf],
                code,
            })
        }
        Command::CriticalModulus { matrix, tol } => {
            let mf = InputFile::read("matrix", matrix)?;
            let m = parse_matrix(&mf)?;
            let c = critical_modulus(&m, positive("tol", *tol)?)?;
            Ok(Outcome {
                kind: "critical-modulus",
                payload: json!({"critical_modulus": to_payload(&c)?, "matrix": to_payload(&m)?, "tol": tol}),
                params: vec![("tol", tol.to_string())],
                files: vec![mf],
                code: 0,
            })
        }
        Command::SzMargin {
            degree,
            tol,
            shards,
            checkpoint,
        } => {
            if *shards == 0 {
                return Err(CliError::Input("--shards must be at least 1".into()));
            }
            let opts = SzOptions {
                shards: *shards,
                checkpoint_dir: checkpoint.clone(),
            };
            let r = sz_margin_with(*degree, positive("tol", *tol)?, &opts)?;
            let rows: Vec<Value> = r
                .records
                .iter()
                .map(|h| {
                    json!({
                        "poly": h.poly.to_string(),
                        "house_lo": h.house.lo,
                        "house_hi": h.house.hi,
                        "reciprocal": h.is_reciprocal,
                        "cyclotomic": h.is_cyclotomic_product,
                    })
                })
                .collect();
            Ok(Outcome {
                kind: "sz-margin",
                payload: json!({
                    "d": r.d,
                    "mu_prime": to_payload(&r.mu_prime)?,
                    "argmin": to_payload(&r.argmin)?,
                    "argmin_text": r.argmin.to_string(),
                    "ceiling": r.ceiling,
                    "count": r.count,
                    "stragglers": to_payload(&r.stragglers)?,
                    "columns": ["poly", "house_lo", "house_hi", "reciprocal", "cyclotomic"],
                    "rows": rows,
                }),
                params: vec![("degree", degree.to_string()), ("tol", tol.to_string())],
                files: vec![],
                code: 0,
            })
        }
        Command::BuildDomain4 {
            matrix,
            seed_vector,
            horizon,
            samples,
            tol,
        } => {
            let mut files = vec![];
            let n = match matrix {
                Some(p) => {
                    let f = InputFile::read("matrix", p)?;
                    let m = parse_matrix(&f)?;
                    files.push(f);
                    m
                }
                None => example_n(),
            };
            let u = match seed_vector {
                Some(p) => {
                    let f = InputFile::read("seed-vector", p)?;
                    let v = parse_vector_file(&f)?;
                    files.push(f);
                    v
                }
                None => example_seed(),
            };
            let frame = eigen_frame(&n, positive("tol", *tol)?)?;
            let decomposition = decompose_seed(&u, &frame)?;
            let cert = find_j(&n, &u)?;
            let (poly, report) = build_polytope(&n, &u, &cert, *horizon)?;
            let reinhardt = verify_reinhardt_instance(&poly, *samples, seed)?;
            let ok = report.invariance
                && report.negativity
                && report.affine_rank_b == n.dim()
                && report.affine_rank_b_prime == n.dim()
                && reinhardt.all_inside
                && reinhardt.bounded;
            Ok(Outcome {
                kind: "build-domain4",
                payload: json!({
                    "frame": to_payload(&frame)?,
                    "decomposition": to_payload(&decomposition)?,
                    "j_certificate": to_payload(&cert)?,
                    "polytope": to_payload(&poly)?,
                    "polytope_report": to_payload(&report)?,
                    "reinhardt": to_payload(&reinhardt)?,
                    "certified": ok,
                }),
                params: vec![
                    ("horizon", horizon.to_string()),
                    ("samples", samples.to_string()),
                    ("tol", tol.to_string()),
                    ("embedded_matrix", matrix.is_none().to_string()),
                    ("embedded_seed", seed_vector.is_none().to_string()),
                ],
                files,
                code: if ok { 0 } else { 4 },
            })
        }
        Command::MonomialExtend { series, eval } => {
            let (spec, mf) = series_spec(series)?;
            let wf = InputFile::read("w", &eval[0])?;
            let zf = InputFile::read("z", &eval[1])?;
            let w = StripPoint::new(parse_complex_file(&wf)?, spec.modulus)?;
            let z = parse_point_file(&zf)?;
            let value = monomial_section(&spec, &w, &z, series.tol)?;
            Ok(Outcome {
                kind: "monomial-extend",
                payload: json!({
                    "spec": to_payload(&spec)?,
                    "w": to_payload(&w)?,
                    "z": to_payload(&z)?,
                    "section": to_payload(&value)?,
                    "tol": series.tol,
                }),
                params: series_params(series),
                files: vec![mf, wf, zf],
                code: 0,
            })
        }
        Command::Witness {
            matrix,
            horizon,
            tol,
        } => {
            let mf = InputFile::read("matrix", matrix)?;
            let m = parse_matrix(&mf)?;
            let cert = witness_search_seeded(&m, positive("tol", *tol)?, *horizon, seed)?;
            let check = check_witness(&cert)?;
            Ok(Outcome {
                kind: "witness",
                code: if check.valid { 0 } else { 4 },
                payload: json!({"certificate": to_payload(&cert)?, "check": to_payload(&check)?}),
                params: vec![("horizon", horizon.to_string()), ("tol", tol.to_string())],
                files: vec![mf],
            })
        }
        Command::Gaps {
            theta,
            eps,
            horizon,
        } => {
            let tf = InputFile::read("theta", theta)?;
            let turns = parse_turns(&tf)?;
            let g = gap_set(
                &TorusPoint::from_turns(&turns),
                positive("eps", *eps)?,
                *horizon,
            )?;
            Ok(Outcome {
                kind: "gaps",
                payload: json!({"gap_set": to_payload(&g)?, "turns": turns}),
                params: vec![("eps", eps.to_string()), ("horizon", horizon.to_string())],
                files: vec![tf],
                code: 0,
            })
        }
        Command::Laurent {
            series,
            w,
            coeff,
            radii,
            samples,
        } => {
            let (spec, mf) = series_spec(series)?;
            let wf = InputFile::read("w", w)?;
            let w = StripPoint::new(parse_complex_file(&wf)?, spec.modulus)?;
            let k = LatticeVector::from_i64(&parse_int_list(coeff)?);
            let radii = match radii {
                Some(s) => parse_real_list(s)?,
                None => vec![1.0; k.dim()],
            };
            let tol = series.tol;
            let g: Complex64 = laurent_coefficient(
                |w, z| monomial_section(&spec, w, z, tol).map(|s| s.value),
                &k,
                &w,
                &radii,
                *samples,
            )?;
            let mut params = series_params(series);
            params.extend([
                ("coeff", coeff.clone()),
                ("radii", format!("{radii:?}")),
                ("samples", samples.to_string()),
            ]);
            Ok(Outcome {
                kind: "laurent",
                payload: json!({
                    "coefficient": [g.re, g.im],
                    "index": to_payload(&k)?,
                    "w": to_payload(&w)?,
                    "radii": radii,
                    "samples_per_axis": samples,
                    "spec": to_payload(&spec)?,
                }),
                params,
                files: vec![mf, wf],
                code: 0,
            })
        }
    }
}

fn thread_count(flag: Option<usize>) -> Result<Option<usize>, CliError> {
    let n =
        match flag {
            Some(n) => Some(n),
            None => match std::env::var("STEINLAB_THREADS") {
                Ok(s) => Some(s.trim().parse::<usize>().map_err(|_| {
                    CliError::Input(format!("STEINLAB_THREADS={s:?} is not a count"))
                })?),
                Err(_) => None,
            },
        };
    match n {
        Some(0) => Err(CliError::Input("thread count must be at least 1".into())),
        other => Ok(other),
    }
}

fn run_parsed(cli: Cli) -> Result<i32, CliError> {
    let threads = thread_count(cli.threads)?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| CliError::Internal(e.to_string()))?;
    let start = Instant::now();
    let outcome = pool.install(|| execute(&cli.command, cli.seed))?;
    let mut params = vec![
        ("command", outcome.kind.to_string()),
        ("seed", cli.seed.to_string()),
    ];
    params.extend(outcome.params.iter().cloned());
    let files: Vec<&InputFile> = outcome.files.iter().collect();
    let report = Report {
        kind: outcome.kind.to_string(),
        schema_version: SCHEMA_VERSION,
        payload: outcome.payload,
        provenance: Provenance {
            inputs_sha256: inputs_hash(&params, &files),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            seed: cli.seed,
            wall_time_s: cli.timing.then(|| start.elapsed().as_secs_f64()),
        },
    };
    let bytes = render_report(&report, cli.format)?;
    let written = match &cli.output {
        Some(path) => std::fs::write(path, &bytes),
        None => std::io::stdout().write_all(&bytes),
    };
    written.map_err(|e| CliError::Internal(format!("cannot write report: {e}")))?;
    Ok(outcome.code)
}

/// Parses `argv` (program name first), runs the subcommand and returns the
/// process exit code. Diagnostics go to standard error.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run_parsed(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("steinlab: {e}");
            e.exit_code()
        }
    }
}
