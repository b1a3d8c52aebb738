//! Command-line front end: validate inputs, analyze weighted quotient
//! graphs, compute window homology, run the Mayer-Vietoris spectral
//! sequence, and fit scaling exponents. All reports are JSON on stdout;
//! `-` reads the input document from stdin.

use clap::{Parser, Subcommand, ValueEnum};
use periodic_homology::field::{F46337, Fp, Rational};
use periodic_homology::formats::{parse_input, FormatError, InputDocument};
use periodic_homology::periodic::{PeriodicTemplate, WindowFlavor};
use periodic_homology::report::{self, MvssReportKind, ValidateReport};
use periodic_homology::wqg::WeightedQuotientGraph;
use std::io::Read;

#[derive(Parser)]
#[command(
    name = "periodic-homology",
    version,
    about = "Homology of d-periodic cell complexes from finite descriptions"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum FlavorArg {
    /// X_n: periodic boundary conditions.
    Periodic,
    /// Y_n: truncated (a genuine finite piece of the infinite cover).
    Truncated,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ReportArg {
    Pages,
    Toroidal,
    All,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check a template or WQG file (structure and the boundary-square
    /// condition). Exit 0 when valid, 1 with a violation report otherwise.
    Validate { path: String },
    /// Weighted-quotient-graph analysis: weight lattices, beta_0, H_1
    /// generator construction, and window Betti formulas.
    WqgAnalyze {
        path: String,
        /// Window sizes n1,n2,... for the corollary Betti numbers.
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        window: Option<Vec<u64>>,
        /// Cross-check the window formulas against brute-force homology.
        #[arg(long)]
        verify: bool,
    },
    /// Betti numbers, Euler characteristic and homology generators of a
    /// finite window.
    Homology {
        path: String,
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        n: Vec<u64>,
        #[arg(long, value_enum, default_value_t = FlavorArg::Periodic)]
        flavor: FlavorArg,
        /// Coefficient field: `rational` or a supported prime.
        #[arg(long, default_value = "rational")]
        field: String,
        /// Cap on generator support lists per dimension.
        #[arg(long, default_value_t = 16)]
        max_generators: usize,
    },
    /// Mayer-Vietoris spectral sequence of a periodic window: page
    /// dimensions, the E-infinity grid, the Godement cross-check, and the
    /// toroidal-cycle report.
    Mvss {
        path: String,
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        n: Vec<u64>,
        #[arg(long, default_value = "rational")]
        field: String,
        #[arg(long, value_enum, default_value_t = ReportArg::All)]
        report: ReportArg,
        /// Also print a plain-text grid of each page to stderr.
        #[arg(long)]
        text_grid: bool,
    },
    /// Betti numbers and toroidal-candidate counts over a list of cubic
    /// window sizes, with fitted growth exponents.
    Scaling {
        path: String,
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        sizes: Vec<u64>,
        /// Homology degree to track.
        #[arg(long = "dim")]
        dim: usize,
        /// Coefficient field; defaults to the fast prime field.
        #[arg(long, default_value = "46337")]
        field: String,
    },
}

enum FieldChoice {
    Rational,
    Prime(u64),
}

const SUPPORTED_PRIMES: [u64; 5] = [2, 3, 5, 7, 46337];

fn parse_field(s: &str) -> Result<FieldChoice, String> {
    if s == "rational" {
        return Ok(FieldChoice::Rational);
    }
    let p: u64 = s
        .parse()
        .map_err(|_| format!("--field must be `rational` or a prime, got `{s}`"))?;
    if SUPPORTED_PRIMES.contains(&p) {
        Ok(FieldChoice::Prime(p))
    } else {
        Err(format!(
            "unsupported prime {p}; supported primes: {SUPPORTED_PRIMES:?} (or `rational`)"
        ))
    }
}

/// Exit codes: 0 success, 1 domain failure (validation or assertion),
/// 2 usage or I/O errors.
fn main() {
    std::process::exit(run());
}

fn run() -> i32 {
    if let Ok(threads) = std::env::var("PERIODIC_HOMOLOGY_THREADS") {
        if let Ok(t) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(t.max(1)).build_global();
        }
    }
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.exit_code
        }
    }
}

struct CliError {
    message: String,
    exit_code: i32,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        CliError { message: message.into(), exit_code: 2 }
    }
    fn domain(message: impl Into<String>) -> Self {
        CliError { message: message.into(), exit_code: 1 }
    }
}

fn read_input(path: &str) -> Result<String, CliError> {
    if path == "-" {
        let mut buf = String::new();
        std::io::stdin()
            .read_to_string(&mut buf)
            .map_err(|e| CliError::usage(format!("cannot read stdin: {e}")))?;
        Ok(buf)
    } else {
        std::fs::read_to_string(path)
            .map_err(|e| CliError::usage(format!("cannot read `{path}`: {e}")))
    }
}

fn load(path: &str) -> Result<InputDocument, CliError> {
    let text = read_input(path)?;
    parse_input(&text).map_err(|e| match e {
        FormatError::Parse(_) | FormatError::UnknownKind => CliError::usage(e.to_string()),
        other => CliError::domain(other.to_string()),
    })
}

/// Template from either input kind (a WQG is converted).
fn load_template(path: &str) -> Result<PeriodicTemplate, CliError> {
    match load(path)? {
        InputDocument::Template(doc) => {
            let t = doc.to_template().map_err(|e| CliError::domain(e.to_string()))?;
            t.validate().map_err(|e| CliError::domain(e.to_string()))?;
            Ok(t)
        }
        InputDocument::Wqg(doc) => {
            let g = doc.to_graph().map_err(|e| CliError::domain(e.to_string()))?;
            let (t, _, _) = g.to_template();
            t.validate().map_err(|e| CliError::domain(e.to_string()))?;
            Ok(t)
        }
    }
}

fn load_wqg(path: &str) -> Result<WeightedQuotientGraph, CliError> {
    match load(path)? {
        InputDocument::Wqg(doc) => doc.to_graph().map_err(|e| CliError::domain(e.to_string())),
        InputDocument::Template(_) => {
            Err(CliError::usage("wqg-analyze expects a WQG document, got a template"))
        }
    }
}

fn emit(value: &impl serde::Serialize) {
    println!("{}", serde_json::to_string_pretty(value).expect("reports serialize"));
}

fn check_sizes(n: &[u64]) -> Result<(), CliError> {
    if n.is_empty() {
        return Err(CliError::usage("window sizes must be nonempty"));
    }
    if n.iter().any(|&x| x == 0) {
        return Err(CliError::usage("window sizes must be positive"));
    }
    Ok(())
}

fn dispatch(cli: Cli) -> Result<i32, CliError> {
    match cli.cmd {
        Cmd::Validate { path } => {
            let report = match load(&path)? {
                InputDocument::Template(doc) => {
                    let outcome = doc.to_template().and_then(|t| t.validate().map(|_| t));
                    match outcome {
                        Ok(_) => ValidateReport { kind: "template", valid: true, errors: vec![] },
                        Err(e) => ValidateReport {
                            kind: "template",
                            valid: false,
                            errors: vec![e.to_string()],
                        },
                    }
                }
                InputDocument::Wqg(doc) => match doc.to_graph() {
                    Ok(_) => ValidateReport { kind: "wqg", valid: true, errors: vec![] },
                    Err(e) => {
                        ValidateReport { kind: "wqg", valid: false, errors: vec![e.to_string()] }
                    }
                },
            };
            let code = if report.valid { 0 } else { 1 };
            emit(&report);
            Ok(code)
        }
        Cmd::WqgAnalyze { path, window, verify } => {
            let g = load_wqg(&path)?;
            if let Some(n) = &window {
                if n.len() != g.d {
                    return Err(CliError::usage(format!(
                        "--window needs {} sizes for a {}-periodic graph",
                        g.d, g.d
                    )));
                }
                check_sizes(n)?;
            }
            let report = report::wqg_analyze::<Rational>(&g, window.as_deref(), verify);
            emit(&report);
            Ok(0)
        }
        Cmd::Homology { path, n, flavor, field, max_generators } => {
            let template = load_template(&path)?;
            if n.len() != template.d {
                return Err(CliError::usage(format!(
                    "--n needs {} sizes for this input",
                    template.d
                )));
            }
            check_sizes(&n)?;
            let flavor = match flavor {
                FlavorArg::Periodic => WindowFlavor::Periodic,
                FlavorArg::Truncated => WindowFlavor::Truncated,
            };
            let choice = parse_field(&field).map_err(CliError::usage)?;
            let rep = match choice {
                FieldChoice::Rational => {
                    report::homology::<Rational>(&template, &n, flavor, max_generators)
                }
                FieldChoice::Prime(2) => {
                    report::homology::<Fp<2>>(&template, &n, flavor, max_generators)
                }
                FieldChoice::Prime(3) => {
                    report::homology::<Fp<3>>(&template, &n, flavor, max_generators)
                }
                FieldChoice::Prime(5) => {
                    report::homology::<Fp<5>>(&template, &n, flavor, max_generators)
                }
                FieldChoice::Prime(7) => {
                    report::homology::<Fp<7>>(&template, &n, flavor, max_generators)
                }
                FieldChoice::Prime(_) => {
                    report::homology::<F46337>(&template, &n, flavor, max_generators)
                }
            };
            emit(&rep);
            Ok(0)
        }
        Cmd::Mvss { path, n, field, report: kind, text_grid } => {
            let template = load_template(&path)?;
            if n.len() != template.d {
                return Err(CliError::usage(format!(
                    "--n needs {} sizes for this input",
                    template.d
                )));
            }
            check_sizes(&n)?;
            let kind = match kind {
                ReportArg::Pages => MvssReportKind::Pages,
                ReportArg::Toroidal => MvssReportKind::Toroidal,
                ReportArg::All => MvssReportKind::All,
            };
            fn go<F: periodic_homology::Field>(
                t: &PeriodicTemplate,
                n: &[u64],
                kind: MvssReportKind,
                text_grid: bool,
            ) -> Result<report::MvssReport, CliError> {
                if text_grid {
                    let window = t.build_window::<F>(n, WindowFlavor::Periodic);
                    let cover = periodic_homology::mvss::Cover::from_translates(t, &window)
                        .map_err(|e| CliError::domain(e.to_string()))?;
                    let nerve = periodic_homology::mvss::nerve(&cover, &window, 32)
                        .map_err(|e| CliError::domain(e.to_string()))?;
                    let blowup = periodic_homology::mvss::BlowupComplex::new(&window, nerve)
                        .map_err(|e| CliError::domain(e.to_string()))?;
                    let seq =
                        periodic_homology::mvss::compute_pages(&blowup, &Default::default())
                            .map_err(|e| CliError::domain(e.to_string()))?;
                    eprint!("{}", report::render_page_grids(&seq));
                }
                report::mvss::<F>(t, n, kind).map_err(|e| CliError::domain(e.to_string()))
            }
            let choice = parse_field(&field).map_err(CliError::usage)?;
            let rep = match choice {
                FieldChoice::Rational => go::<Rational>(&template, &n, kind, text_grid)?,
                FieldChoice::Prime(2) => go::<Fp<2>>(&template, &n, kind, text_grid)?,
                FieldChoice::Prime(3) => go::<Fp<3>>(&template, &n, kind, text_grid)?,
                FieldChoice::Prime(5) => go::<Fp<5>>(&template, &n, kind, text_grid)?,
                FieldChoice::Prime(7) => go::<Fp<7>>(&template, &n, kind, text_grid)?,
                FieldChoice::Prime(_) => go::<F46337>(&template, &n, kind, text_grid)?,
            };
            let ok = rep.godement.iter().all(|g| g.ok) && rep.total_complex_ok.iter().all(|&b| b);
            emit(&rep);
            Ok(if ok { 0 } else { 1 })
        }
        Cmd::Scaling { path, sizes, dim, field } => {
            let template = load_template(&path)?;
            check_sizes(&sizes)?;
            fn go<F: periodic_homology::Field>(
                t: &PeriodicTemplate,
                sizes: &[u64],
                dim: usize,
            ) -> Result<report::ScalingJson, CliError> {
                report::scaling::<F>(t, sizes, dim).map_err(|e| CliError::domain(e.to_string()))
            }
            let choice = parse_field(&field).map_err(CliError::usage)?;
            let rep = match choice {
                FieldChoice::Rational => go::<Rational>(&template, &sizes, dim)?,
                FieldChoice::Prime(2) => go::<Fp<2>>(&template, &sizes, dim)?,
                FieldChoice::Prime(3) => go::<Fp<3>>(&template, &sizes, dim)?,
                FieldChoice::Prime(5) => go::<Fp<5>>(&template, &sizes, dim)?,
                FieldChoice::Prime(7) => go::<Fp<7>>(&template, &sizes, dim)?,
                FieldChoice::Prime(_) => go::<F46337>(&template, &sizes, dim)?,
            };
            emit(&rep);
            Ok(0)
        }
    }
}
