use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use normext_cli::{exit, run, Command, Options};

#[derive(Clone, Copy, ValueEnum)]
enum Cmd {
    /// Build the model and check its kernel identities.
    Validate,
    /// Seeded random Green-identity checks.
    GreenCheck,
    /// Decide normality of the extension given by `subspace`.
    CheckSubspace,
    /// One-dimensional classification: line family or canonical only.
    Classify,
    /// Grid search over γ for normal one-dimensional extensions.
    OracleScan,
    /// Every command above in one report.
    Report,
}

impl From<Cmd> for Command {
    fn from(c: Cmd) -> Self {
        match c {
            Cmd::Validate => Command::Validate,
            Cmd::GreenCheck => Command::GreenCheck,
            Cmd::CheckSubspace => Command::CheckSubspace,
            Cmd::Classify => Command::Classify,
            Cmd::OracleScan => Command::OracleScan,
            Cmd::Report => Command::Report,
        }
    }
}

#[derive(Parser)]
#[command(name = "normext", version, about = "Normal extensions of formally normal diagonal operators")]
struct Cli {
    command: Cmd,
    /// Model file (JSON).
    #[arg(long)]
    model: PathBuf,
    /// Inner-product tolerance; raises residual_tol if needed.
    #[arg(long)]
    tol: Option<f64>,
    /// RNG seed for green-check (overrides the model file).
    #[arg(long)]
    seed: Option<u64>,
    /// Exit with status 1 when a verdict fails.
    #[arg(long)]
    assert: bool,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write an SVG scatter of the atoms with the fitted line.
    #[arg(long)]
    figure: Option<PathBuf>,
    /// Number of atoms drawn in the figure.
    #[arg(long, default_value_t = 40)]
    figure_atoms: u64,
    /// Number of random pair couples for green-check.
    #[arg(long, default_value_t = 200)]
    pairs: usize,
    /// Points in the γ-grid of oracle-scan.
    #[arg(long, default_value_t = normext::onedim::DEFAULT_GRID)]
    grid: usize,
    /// Atoms summed explicitly by the oracle.
    #[arg(long, default_value_t = normext::onedim::DEFAULT_TERMS)]
    terms: u64,
    /// Extension subspace file: a JSON list of {"u": [...], "v": [...]}.
    #[arg(long)]
    subspace: Option<PathBuf>,
    /// Include wall-clock timings (the report is then not byte-reproducible).
    #[arg(long)]
    timings: bool,
    /// Run without the thread pool.
    #[arg(long)]
    sequential: bool,
}

fn fail(code: &str, message: &str) -> ExitCode {
    let err = serde_json::json!({ "error": code, "message": message });
    eprintln!("{err}");
    ExitCode::from(exit::INPUT_ERROR as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let text = match std::fs::read_to_string(&cli.model) {
        Ok(t) => t,
        Err(e) => return fail("IoError", &format!("{}: {e}", cli.model.display())),
    };
    let opts = Options {
        tol: cli.tol,
        seed: cli.seed,
        pairs: cli.pairs,
        grid: cli.grid,
        terms: cli.terms,
        subspace: cli.subspace,
        figure: cli.figure,
        figure_atoms: cli.figure_atoms,
        timings: cli.timings,
        sequential: cli.sequential,
    };
    let report = match run(cli.command.into(), &text, &opts) {
        Ok(r) => r,
        Err(e) => return fail(e.code(), &e.to_string()),
    };
    let json = report.to_json();
    match &cli.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &json) {
                return fail("IoError", &format!("{}: {e}", path.display()));
            }
        }
        None => print!("{json}"),
    }
    if cli.assert && !report.passed() {
        return ExitCode::from(exit::VERDICT_FAILED as u8);
    }
    ExitCode::from(exit::OK as u8)
}
