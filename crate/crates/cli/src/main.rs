//! `zrd`: command-line front end for the realizable-dimension library.

mod commands;
mod report;
mod selftest;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use zrd_core::numeric::{Tol, DEFAULT_TOL};

use report::{exit_code, Report};

#[derive(Parser, Debug)]
#[command(name = "zrd", version, about = "Realizable dimension of Z-periodic graphs")]
struct Cli {
    /// Numerical tolerance for rank, signature and residual decisions.
    #[arg(long, global = true, default_value_t = DEFAULT_TOL)]
    tol: f64,
    /// Print one JSON object on stdout instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide 1- and 2-realizability, bound the realizable dimension and
    /// write certificate files.
    Classify {
        #[arg(required_unless_present = "batch", conflicts_with = "batch")]
        graph: Option<PathBuf>,
        /// Classify every `*.zg` file in a directory.
        #[arg(long)]
        batch: Option<PathBuf>,
        /// Where certificates go; defaults to the input's directory.
        #[arg(long)]
        cert_dir: Option<PathBuf>,
        #[arg(long)]
        no_certs: bool,
    },
    /// Search for a minor by exhaustive contraction and deletion.
    Minor {
        graph: PathBuf,
        /// k3-balanced, k2-bullet, k3-bulletbullet, k4-balanced or file:<path>
        #[arg(long)]
        pattern: String,
    },
    /// Balance test with a witness cycle or a normalizing switch sequence.
    Balance { graph: PathBuf },
    /// Stress kernel basis, or checks of supplied weights.
    Stress {
        framework: PathBuf,
        #[arg(long)]
        weights: Option<PathBuf>,
    },
    /// Equilibrium, signature and conic checks for a stress.
    Superstable {
        framework: PathBuf,
        #[arg(long)]
        weights: Option<PathBuf>,
    },
    /// Conic check; flattens the framework when it fails.
    Flatten {
        framework: PathBuf,
        /// Write the flattened framework here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Finite window of the periodic lift.
    Lift {
        graph: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        from: i64,
        #[arg(long, allow_negative_numbers = true)]
        to: i64,
        #[arg(long)]
        framework: Option<PathBuf>,
        /// Draw the lifted framework (2-dimensional only).
        #[arg(long, requires = "framework")]
        svg: Option<PathBuf>,
    },
    /// Randomized consistency checks.
    Selftest {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        cases: usize,
    },
    /// Replays a certificate written by `classify`.
    VerifyCert {
        certificate: PathBuf,
        /// Check the certificate against this graph instead of the embedded one.
        #[arg(long)]
        graph: Option<PathBuf>,
    },
}

fn run(cli: &Cli) -> anyhow::Result<Report> {
    if !(cli.tol.is_finite() && cli.tol > 0.0) {
        anyhow::bail!("--tol must be a positive number");
    }
    let tol = Tol(cli.tol);
    match &cli.command {
        Command::Classify { graph, batch, cert_dir, no_certs } => {
            let certs = (!no_certs).then_some(cert_dir.as_deref());
            match (graph, batch) {
                (_, Some(dir)) => commands::classify_batch(dir, certs),
                (Some(g), None) => commands::classify(g, certs),
                (None, None) => unreachable!("clap requires one"),
            }
        }
        Command::Minor { graph, pattern } => commands::minor(graph, pattern),
        Command::Balance { graph } => commands::balance(graph),
        Command::Stress { framework, weights } => commands::stress(framework, weights.as_deref(), tol),
        Command::Superstable { framework, weights } => commands::superstable(framework, weights.as_deref(), tol),
        Command::Flatten { framework, out } => commands::flatten(framework, out.as_deref(), tol),
        Command::Lift { graph, from, to, framework, svg } => {
            commands::lift(graph, *from, *to, framework.as_deref(), svg.as_deref())
        }
        Command::Selftest { seed, cases } => Ok(selftest::run(*seed, *cases)),
        Command::VerifyCert { certificate, graph } => commands::verify_cert(certificate, graph.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(report) => {
            report.print(cli.json);
            ExitCode::from(report.code)
        }
        Err(err) => {
            let code = exit_code(&err);
            if cli.json {
                let v = serde_json::json!({ "error": format!("{err:#}"), "exit": code });
                println!("{}", serde_json::to_string_pretty(&v).expect("json"));
            }
            eprintln!("error: {err:#}");
            ExitCode::from(code)
        }
    }
}
