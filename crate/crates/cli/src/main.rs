//! `moyal`: compose symbols, apply the doubled-space transforms, compute modulation norms
//! and run the conformance suite.

use clap::{Args, Parser, Subcommand, ValueEnum};
use moyal::grid::{make_grid, PhaseGrid, SymbolField};
use moyal::io::{self, Field};
use moyal::laws::{self, CompositionLaw};
use moyal::magnetic;
use moyal::modulation::{self, Exponent, ModNormSpec, Window};
use moyal::testkit::{gaussian, FieldSampler};
use moyal::verify::{self, CheckReport};
use moyal::{MoyalError, C64};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_GRID: u8 = 3;
const EXIT_WINDOW: u8 = 4;

#[derive(Parser)]
#[command(name = "moyal", version, about = "Discrete phase-space composition workbench")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Args, Clone)]
struct GridArgs {
    /// Configuration dimension (default 1, or taken from input files).
    #[arg(long)]
    n: Option<usize>,
    /// Points per axis (default 16, or taken from input files).
    #[arg(long = "N")]
    points: Option<usize>,
    /// Seed for the `random` built-in field.
    #[arg(long, default_value_t = 7)]
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Compose two fields and report the integral-identity defect.
    Compose {
        /// Field id (gauss0, zero, random) or manifest path.
        f: String,
        g: String,
        #[arg(long, default_value = "weyl")]
        law: String,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Apply a doubled-space transform with a window.
    Transform {
        #[arg(value_enum)]
        kind: TransformKind,
        f: String,
        #[arg(long, default_value = "gauss0")]
        window: String,
        #[arg(long, default_value = "weyl")]
        law: String,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the mixed modulation norm as a CSV row.
    Modnorm {
        f: String,
        #[arg(long, default_value = "gauss0")]
        window: String,
        #[arg(long, default_value = "2")]
        p: String,
        #[arg(long, default_value = "2")]
        q: String,
        #[arg(long, default_value = "weyl")]
        law: String,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Run the conformance suite; exit 1 if a check fails unexpectedly.
    Verify {
        /// Positional form: LAW [n [N [SEED]]].
        #[arg(num_args = 0..=4)]
        positional: Vec<String>,
        #[arg(long)]
        law: Option<String>,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Diff two verify reports.
    Compare { a: PathBuf, b: PathBuf },
    /// Write a built-in field in the file format.
    Export {
        f: String,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the field and potential of a shipped magnetic law as JSON.
    ShowLaw { law: String },
}

#[derive(Clone, Copy, ValueEnum)]
enum TransformKind {
    #[value(name = "M")]
    M,
    #[value(name = "N")]
    N,
    #[value(name = "R")]
    R,
    #[value(name = "stft")]
    Stft,
}

/// Failure carrying its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<MoyalError> for Failure {
    fn from(e: MoyalError) -> Self {
        let code = match e {
            MoyalError::GridMismatch(_) => EXIT_GRID,
            MoyalError::Window(_) | MoyalError::IdempotencyFailure { .. } => EXIT_WINDOW,
            _ => EXIT_USAGE,
        };
        Failure { code, message: e.to_string() }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure { code: EXIT_USAGE, message: message.into() }
}

type CliResult<T> = Result<T, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => e.exit(),
    };
    match run(cli.cmd) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("moyal: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(cmd: Command) -> CliResult<u8> {
    match cmd {
        Command::Compose { f, g, law, grid, out } => {
            let law = resolve_law(&law)?;
            let seed = grid.seed;
            let grid = resolve_grid(&grid, &[&f, &g])?;
            check_law_dimension(law.as_ref(), &grid)?;
            let (f, g) = (load_symbol(&f, &grid, seed)?, load_symbol(&g, &grid, seed.wrapping_add(1))?);
            let h = law.compose(&f, &g)?;
            let defect = laws::check_integral_identity(law.as_ref(), &f, &g)?;
            if let Some(out) = out {
                io::write_field(&out, &Field::Symbol(h))?;
            }
            println!("{}", serde_json::json!({ "law": law.name(), "crichi_defect": defect }));
            Ok(0)
        }
        Command::Transform { kind, f, window, law, grid, out } => {
            let law = resolve_law(&law)?;
            if matches!(kind, TransformKind::Stft) && !law.weyl_closed_form() {
                return Err(usage(format!("stft is defined for the Weyl law only, not {}", law.name())));
            }
            let seed = grid.seed;
            let grid = resolve_grid(&grid, &[&f, &window])?;
            check_law_dimension(law.as_ref(), &grid)?;
            let f = load_symbol(&f, &grid, seed)?;
            let w = load_window(&window, law.as_ref(), &grid)?;
            let d = match kind {
                TransformKind::M => modulation::mod_map(law.as_ref(), &f, &w)?,
                TransformKind::N => modulation::map_n(law.as_ref(), &f, &w.h)?,
                TransformKind::R => modulation::map_r(law.as_ref(), &f, &w.h)?,
                TransformKind::Stft => modulation::stft(&f, &w.h)?,
            };
            if let Some(out) = out {
                io::write_field(&out, &Field::Double(d))?;
            }
            Ok(0)
        }
        Command::Modnorm { f, window, p, q, law, grid } => {
            let pe: Exponent = p.parse().map_err(|e: MoyalError| usage(e.to_string()))?;
            let qe: Exponent = q.parse().map_err(|e: MoyalError| usage(e.to_string()))?;
            let law = resolve_law(&law)?;
            let seed = grid.seed;
            let grid = resolve_grid(&grid, &[&f, &window])?;
            check_law_dimension(law.as_ref(), &grid)?;
            let field = load_symbol(&f, &grid, seed)?;
            let spec = ModNormSpec { p: pe, q: qe, window: load_window(&window, law.as_ref(), &grid)? };
            let value = modulation::modulation_norm(law.as_ref(), &field, &spec)?;
            let mut w = csv::Writer::from_writer(std::io::stdout());
            let row = [law.name().to_string(), pe.to_string(), qe.to_string(), window, f, format!("{value:.17e}")];
            w.write_record(["law", "p", "q", "window_id", "field_id", "norm_value"])
                .and_then(|_| w.write_record(&row))
                .and_then(|_| w.flush().map_err(csv::Error::from))
                .map_err(|e| Failure { code: EXIT_USAGE, message: e.to_string() })?;
            Ok(0)
        }
        Command::Verify { positional, law, grid, out } => {
            let mut pos = positional.iter();
            let law = pos.next().cloned().or(law).unwrap_or_else(|| "weyl".into());
            let mut num = |name: &str, flag: Option<u64>, default: u64| -> CliResult<u64> {
                match pos.next() {
                    Some(s) => s.parse().map_err(|_| usage(format!("{name} must be a non-negative integer, got {s:?}"))),
                    None => Ok(flag.unwrap_or(default)),
                }
            };
            let n = num("n", grid.n.map(|v| v as u64), 1)? as usize;
            let points = num("N", grid.points.map(|v| v as u64), 16)? as usize;
            let seed = num("seed", Some(grid.seed), 7)?;
            let report = verify::run_suite(&law, n, points, seed)?;
            let text = report.to_json();
            match out {
                Some(p) => std::fs::write(&p, text + "\n").map_err(|e| usage(e.to_string()))?,
                None => println!("{text}"),
            }
            Ok(if report.ok() { 0 } else { EXIT_FAIL })
        }
        Command::Compare { a, b } => {
            let read = |p: &Path| -> CliResult<CheckReport> {
                let text = std::fs::read_to_string(p).map_err(|e| usage(format!("{}: {e}", p.display())))?;
                Ok(CheckReport::from_json(&text)?)
            };
            let diff = verify::compare_reports(&read(&a)?, &read(&b)?)?;
            println!("{}", serde_json::to_string_pretty(&diff).expect("serializable"));
            Ok(0)
        }
        Command::Export { f, grid, out } => {
            let seed = grid.seed;
            let grid = resolve_grid(&grid, &[&f])?;
            let field = load_symbol(&f, &grid, seed)?;
            io::write_field(&out, &Field::Symbol(field))?;
            Ok(0)
        }
        Command::ShowLaw { law } => {
            let m = magnetic::magnetic_law_by_name(&law).ok_or_else(|| usage(format!("unknown magnetic law {law:?}")))?;
            let field: serde_json::Value = serde_json::from_str(&m.field().to_json()).expect("valid json");
            let pot: serde_json::Value = serde_json::from_str(&m.potential().to_json()).expect("valid json");
            println!("{}", serde_json::json!({ "law": law, "field": field, "potential": pot }));
            Ok(0)
        }
    }
}

fn resolve_law(id: &str) -> CliResult<Box<dyn CompositionLaw>> {
    laws::law_by_name(id).ok_or_else(|| usage(format!("unknown law {id:?}")))
}

fn check_law_dimension(law: &dyn CompositionLaw, grid: &PhaseGrid) -> CliResult<()> {
    if let Some(m) = magnetic::magnetic_law_by_name(law.name()) {
        if m.field().n() != grid.n() {
            return Err(MoyalError::Dimension { expected: m.field().n(), got: grid.n() }.into());
        }
    }
    Ok(())
}

fn is_builtin(id: &str) -> bool {
    matches!(id, "gauss0" | "zero" | "random" | "idempotent")
}

/// Grid from the first file argument, checked against explicit flags; else flags or defaults.
fn resolve_grid(args: &GridArgs, inputs: &[&str]) -> CliResult<PhaseGrid> {
    let mut found: Option<PhaseGrid> = None;
    for id in inputs.iter().filter(|s| !is_builtin(s)) {
        let text = std::fs::read_to_string(id).map_err(|e| usage(format!("{id}: {e}")))?;
        let g = io::parse_manifest(&text)?.grid()?;
        match found {
            Some(prev) if prev != g => {
                return Err(MoyalError::GridMismatch(format!(
                    "{id} has n = {}, N = {}; expected n = {}, N = {}",
                    g.n(),
                    g.points(),
                    prev.n(),
                    prev.points()
                ))
                .into())
            }
            _ => found = Some(g),
        }
    }
    let grid = match found {
        Some(g) => {
            if args.n.is_some_and(|n| n != g.n()) || args.points.is_some_and(|p| p != g.points()) {
                return Err(MoyalError::GridMismatch("input files do not match --n/--N".into()).into());
            }
            g
        }
        None => make_grid(args.n.unwrap_or(1), args.points.unwrap_or(16))?,
    };
    Ok(grid)
}

fn load_symbol(id: &str, grid: &PhaseGrid, seed: u64) -> CliResult<SymbolField> {
    let origin = vec![0.0; grid.axes()];
    Ok(match id {
        "gauss0" => gaussian(grid, 0.5, &origin, C64::new(1.0, 0.0)),
        "zero" => SymbolField::zeros(grid),
        "random" => FieldSampler::new(grid, seed).mix(),
        "idempotent" => modulation::idempotent_window(grid)?.h,
        path => io::read_symbol(Path::new(path))?,
    })
}

fn load_window(id: &str, law: &dyn CompositionLaw, grid: &PhaseGrid) -> CliResult<Window> {
    let w = match id {
        "idempotent" => modulation::idempotent_window(grid)?,
        "gauss0" => Window::new(law, gaussian(grid, 0.5, &vec![0.0; grid.axes()], C64::new(1.0, 0.0)))?,
        "zero" | "random" => return Err(usage(format!("{id} is not a window"))),
        path => {
            let h = io::read_symbol(Path::new(path))?;
            Window::new(law, h)?
        }
    };
    Ok(w)
}
