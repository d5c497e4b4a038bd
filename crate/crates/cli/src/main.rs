use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use hermsos::multiplier::DEFAULT_SIZE_CAP;
use hermsos_cli::commands::{self, AuditParams, CliError, Settings, Suite};
use hermsos_cli::files::{ModeName, FORMAT_VERSION};

/// Hermitian sums of squares: certificates, bounds on N, and audits.
///
/// Exit codes: 0 ok, 1 negative verdict, 2 input error, 3 resource cap,
/// 4 numerical non-convergence.
#[derive(Parser, Debug)]
#[command(name = "hermsos", version)]
struct Cli {
    /// Print the machine-readable JSON document instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Seed for every stochastic component.
    #[arg(long, global = true, default_value_t = 0x5eed_0001)]
    seed: u64,
    /// Relative tolerance of the sphere optimizer.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tolerance: f64,
    /// Largest multiplier basis dimension.
    #[arg(long = "size-cap", global = true, default_value_t = DEFAULT_SIZE_CAP)]
    size_cap: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sphere extrema and norms of a form.
    Analyze { form: PathBuf },
    /// Sum-of-squares certificate at shift N.
    Certify {
        form: PathBuf,
        #[arg(value_name = "N")]
        shift: u32,
        #[arg(long, value_enum, default_value_t = ModeName::Exact)]
        mode: ModeName,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-verify a certificate file.
    Verify { certificate: PathBuf },
    /// Smallest N with a PSD multiplier matrix.
    Search {
        form: PathBuf,
        #[arg(long = "n-max", default_value_t = 30)]
        n_max: u32,
    },
    /// Compare the sufficient bounds on N with the exact minimum.
    Bounds {
        form: PathBuf,
        #[arg(long = "C", default_value_t = 1.0)]
        c: f64,
        #[arg(long = "n-max", default_value_t = 30)]
        n_max: u32,
    },
    /// Numerical checks of the analytic estimates.
    Audit {
        #[arg(long, value_enum, default_value_t = Suite::All)]
        suite: Suite,
        /// Form for the laplacian and basic suites (default f_1).
        #[arg(long)]
        form: Option<PathBuf>,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long, default_value_t = 50.0)]
        rho: f64,
        #[arg(long, default_value_t = 0.2)]
        delta: f64,
        #[arg(long, default_value_t = 0.125)]
        h: f64,
        /// Polynomial degree M.
        #[arg(long = "M", default_value_t = 6)]
        degree: u32,
        #[arg(long, default_value_t = 2)]
        k: u32,
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 0.6)]
        epsilon: f64,
        /// Shift N for the basic suite; scans h when absent.
        #[arg(long = "N")]
        shift: Option<u32>,
        #[arg(long = "n-max", default_value_t = 30)]
        n_max: u32,
    },
}

fn run(cli: Cli) -> commands::CmdResult {
    let s = Settings {
        seed: cli.seed,
        tolerance: cli.tolerance,
        size_cap: cli.size_cap,
    };
    match cli.command {
        Command::Analyze { form } => commands::analyze(&form, &s),
        Command::Certify {
            form,
            shift,
            mode,
            out,
        } => commands::certify(&form, shift, mode, out.as_deref(), &s),
        Command::Verify { certificate } => commands::verify(&certificate, &s),
        Command::Search { form, n_max } => commands::search(&form, n_max, &s),
        Command::Bounds { form, c, n_max } => commands::bounds(&form, c, n_max, &s),
        Command::Audit {
            suite,
            form,
            samples,
            rho,
            delta,
            h,
            degree,
            k,
            n,
            epsilon,
            shift,
            n_max,
        } => {
            let p = AuditParams {
                form,
                samples,
                rho,
                delta,
                h,
                degree,
                k,
                n,
                epsilon,
                shift,
                n_max,
            };
            commands::audit(suite, &p, &s)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let json = cli.json;
    let code = match run(cli) {
        Ok(out) => {
            if json {
                println!("{}", serde_json::to_string_pretty(&out.json).unwrap_or_default());
            } else {
                println!("{}", out.text);
            }
            out.code
        }
        Err(CliError { code, message }) => {
            eprintln!("error: {message}");
            if json {
                let doc = serde_json::json!({
                    "format_version": FORMAT_VERSION,
                    "error": message,
                    "exit_code": code,
                });
                println!("{}", serde_json::to_string_pretty(&doc).unwrap_or_default());
            }
            code
        }
    };
    ExitCode::from(code as u8)
}
