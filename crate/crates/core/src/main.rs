use std::fs;
use std::path::Path;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use lisawave::config::{self, RunConfig};
use lisawave::runner::{self, Session};
use lisawave::{Error, Result};

#[derive(Parser)]
#[command(
    name = "lisawave",
    about = "2D acoustic wave propagation on sharp-interface media, with absorbing layers",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Force the single-threaded, bit-reproducible path.
    #[arg(long, global = true)]
    serial: bool,
    /// Worker threads (0 = config setting, then available parallelism).
    #[arg(long, global = true, default_value_t = 0)]
    workers: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Run a config file or named preset, writing snapshots and a run log.
    Run {
        /// Path to a TOML config, or a preset name (see `validate --help`).
        config: String,
        /// Output directory override.
        #[arg(long)]
        out: Option<String>,
    },
    /// Refinement study: run a preset over a resolution ladder and tabulate
    /// errors and observed orders.
    Convergence {
        /// Preset name or config path.
        preset: String,
        #[arg(long, value_delimiter = ',', default_value = "64,128,256,512")]
        resolutions: Vec<usize>,
        /// Fine reference resolution (pulse presets self-converge against it).
        #[arg(long)]
        reference: Option<usize>,
        /// Output directory override for the CSV table.
        #[arg(long)]
        out: Option<String>,
    },
    /// Parse and check a config or preset, reporting every violation.
    Validate {
        /// Path to a TOML config, or one of the presets: example1, example2,
        /// example3[-scaled], example4[-scaled], example5[-scaled].
        config: String,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // --help/--version land here too; only usage mistakes are errors
            let is_error = e.use_stderr();
            let _ = e.print();
            return if is_error { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e @ Error::Diverged { .. }) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn load_config(name_or_path: &str) -> Result<RunConfig> {
    let text = match config::preset(name_or_path) {
        Some(text) => text.to_string(),
        None if Path::new(name_or_path).exists() => fs::read_to_string(name_or_path)?,
        None => {
            return Err(Error::config(format!(
                "{name_or_path:?} is neither a readable file nor a preset ({})",
                config::PRESET_NAMES.join(", ")
            )))
        }
    };
    config::parse_config(&text)
}

fn init_workers(cli_serial: bool, cli_workers: usize, config_workers: usize) {
    let threads = if cli_serial {
        1
    } else if cli_workers > 0 {
        cli_workers
    } else {
        config_workers // 0 leaves rayon's default (available parallelism)
    };
    if threads > 0 {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run { config, out } => {
            let mut cfg = load_config(&config)?;
            if let Some(out) = out {
                cfg.output.directory = out;
            }
            init_workers(cli.serial, cli.workers, cfg.output.workers);
            let artifacts = runner::run_experiment(&cfg)?;
            if !artifacts.cfl.pass() {
                eprintln!(
                    "warning: tau = {} exceeds the stable limit {}; expect divergence",
                    artifacts.tau, artifacts.cfl.max_tau
                );
            }
            println!(
                "{}: {} steps at tau = {}, peak interior |u| = {}",
                config, artifacts.steps, artifacts.tau, artifacts.peak_interior
            );
            if let Some((l2, linf)) = artifacts.errors {
                println!("errors vs exact: l2 = {l2:.6e}, linf = {linf:.6e}");
            }
            println!(
                "{} snapshots and run.log in {}",
                artifacts.snapshots.len(),
                artifacts.out_dir.display()
            );
            Ok(())
        }
        Command::Convergence { preset, resolutions, reference, out } => {
            let cfg = load_config(&preset)?;
            init_workers(cli.serial, cli.workers, cfg.output.workers);
            let report = runner::convergence_study(&cfg, &resolutions, reference)?;
            println!("{:>6}  {:>12}  {:>9}  {:>12}  {:>10}", "N", "l2_err", "l2_order", "linf_err", "linf_order");
            for row in &report.rows {
                let fmt = |o: Option<f64>| o.map(|v| format!("{v:.4}")).unwrap_or_else(|| "-".to_string());
                println!(
                    "{:>6}  {:>12.6e}  {:>9}  {:>12.6e}  {:>10}",
                    row.n,
                    row.l2,
                    fmt(row.l2_order),
                    row.linf,
                    fmt(row.linf_order)
                );
            }
            let dir = out.unwrap_or_else(|| cfg.output.directory.clone());
            fs::create_dir_all(&dir)?;
            let csv_path = Path::new(&dir).join("convergence.csv");
            fs::write(&csv_path, report.to_csv())?;
            println!("table written to {}", csv_path.display());
            Ok(())
        }
        Command::Validate { config } => {
            let cfg = load_config(&config)?;
            let session = Session::new(&cfg)?;
            println!(
                "ok: {} x {} cells on [{}, {}] x [{}, {}], h = {}",
                cfg.domain.n_x,
                cfg.domain.n_y,
                cfg.domain.x_min,
                cfg.domain.x_max,
                cfg.domain.y_min,
                cfg.domain.y_max,
                session.interior.h
            );
            println!(
                "tau = {}, {} steps to t = {}",
                session.state.tau, session.total_steps, cfg.final_time
            );
            println!(
                "cfl ratio = {} ({})",
                session.cfl.ratio,
                if session.cfl.pass() { "pass" } else { "VIOLATED: expect divergence" }
            );
            Ok(())
        }
    }
}
