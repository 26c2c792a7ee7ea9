use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use posbasis_cli::{
    cm_report, compose, generate, normalize, read_basis_file, render_basis_file, render_table,
    to_json_line, verify_report, CliError, CmMethod, FileFormat,
};

/// Positive bases of R^n: generate optimal ones, verify spanning
/// properties, and compute cosine measures.
#[derive(Parser)]
#[command(name = "posbasis", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate an optimal structured positive basis with partition metadata.
    Generate {
        /// Ambient dimension.
        #[arg(long)]
        n: usize,
        /// Number of vectors (between n+1 and 2n).
        #[arg(long)]
        s: usize,
        /// Output format.
        #[arg(long, default_value = "json")]
        format: FileFormat,
        /// Output path; stdout when omitted.
        #[arg(long)]
        output: Option<PathBuf>,
        /// Comma-separated vector; the basis is rotated so its first
        /// column points this way (normalized first).
        #[arg(long, allow_hyphen_values = true)]
        align: Option<String>,
    },
    /// Compute the cosine measure of a basis file.
    Cm {
        /// Input basis file.
        #[arg(long)]
        input: PathBuf,
        /// Input format.
        #[arg(long, default_value = "json")]
        format: FileFormat,
        /// full: enumerate all bases; structured: use partition metadata;
        /// sampled: seeded Monte Carlo upper bound.
        #[arg(long, default_value = "full")]
        method: CmMethod,
        /// Sample count for the sampled method.
        #[arg(long)]
        samples: Option<u64>,
        /// RNG seed; required whenever sampling runs.
        #[arg(long)]
        seed: Option<u64>,
        /// Fall back to raw sampling when the input is not a positive
        /// spanning set.
        #[arg(long)]
        force: bool,
    },
    /// Check spanning, independence, and partition structure.
    Verify {
        /// Input basis file.
        #[arg(long)]
        input: PathBuf,
        /// Input format.
        #[arg(long, default_value = "json")]
        format: FileFormat,
    },
    /// Print the optimal block structure for every dimension and size.
    Table {
        /// Largest dimension to include.
        #[arg(long, default_value_t = 8)]
        max_n: usize,
    },
    /// Concatenate minimal blocks (with optional shift vectors) into a
    /// positive basis.
    Compose {
        /// Block files, one per sub-positive basis, in order.
        #[arg(long = "input", required = true)]
        inputs: Vec<PathBuf>,
        /// Input format of the block files.
        #[arg(long, default_value = "json")]
        format: FileFormat,
        /// Comma-separated shift vector for the matching block
        /// (repeatable; missing entries are zero).
        #[arg(long = "critical", allow_hyphen_values = true)]
        criticals: Vec<String>,
        /// Output path; stdout when omitted.
        #[arg(long)]
        output: Option<PathBuf>,
        /// Keep shifted columns at their raw lengths instead of
        /// normalizing them.
        #[arg(long)]
        no_normalize: bool,
    },
    /// Rescale every column of a basis file to unit length.
    Normalize {
        /// Input basis file.
        #[arg(long)]
        input: PathBuf,
        /// Input and output format.
        #[arg(long, default_value = "json")]
        format: FileFormat,
        /// Output path; stdout when omitted.
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

fn init_thread_pool() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("POSBASIS_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .parse()
        .map_err(|_| CliError::Parse(format!("POSBASIS_THREADS must be an integer, got '{raw}'")))?;
    if threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::Parse(format!("cannot configure thread pool: {e}")))?;
    }
    Ok(())
}

fn emit(text: &str, output: Option<&PathBuf>) -> Result<(), CliError> {
    match output {
        None => {
            print!("{text}");
            Ok(())
        }
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Parse(format!("cannot write {}: {e}", path.display()))),
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    init_thread_pool()?;
    match cli.command {
        Command::Generate {
            n,
            s,
            format,
            output,
            align,
        } => {
            let file = generate(n, s, align.as_deref())?;
            let text = render_basis_file(&file, format)?;
            emit(&text, output.as_ref())
        }
        Command::Cm {
            input,
            format,
            method,
            samples,
            seed,
            force,
        } => {
            let file = read_basis_file(&input, format)?;
            let report = cm_report(&file, method, samples, seed, force)?;
            emit(&to_json_line(&report), None)
        }
        Command::Verify { input, format } => {
            let file = read_basis_file(&input, format)?;
            let report = verify_report(&file)?;
            emit(&to_json_line(&report), None)
        }
        Command::Table { max_n } => {
            if max_n < 2 {
                return Err(CliError::Parse("--max-n must be at least 2".into()));
            }
            emit(&render_table(max_n), None)
        }
        Command::Compose {
            inputs,
            format,
            criticals,
            output,
            no_normalize,
        } => {
            let blocks = inputs
                .iter()
                .map(|path| read_basis_file(path, format))
                .collect::<Result<Vec<_>, _>>()?;
            let shifts = criticals
                .iter()
                .map(|text| {
                    text.split(',')
                        .map(|field| {
                            field.trim().parse::<f64>().map_err(|_| {
                                CliError::Parse(format!("cannot parse component '{field}'"))
                            })
                        })
                        .collect::<Result<Vec<f64>, _>>()
                        .map(Some)
                })
                .collect::<Result<Vec<_>, _>>()?;
            let file = compose(&blocks, &shifts, !no_normalize)?;
            let text = render_basis_file(&file, FileFormat::Json)?;
            emit(&text, output.as_ref())
        }
        Command::Normalize {
            input,
            format,
            output,
        } => {
            let file = read_basis_file(&input, format)?;
            let normalized = normalize(&file)?;
            let text = render_basis_file(&normalized, format)?;
            emit(&text, output.as_ref())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
