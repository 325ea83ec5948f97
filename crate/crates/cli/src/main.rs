//! `fluxrabi run --config path.json [--tasks a,b] [--out dir] [--workers N] [--seedless]`
//!
//! Exit codes: 0 success, 2 invalid config, 3 numerical non-convergence
//! (outputs are still written, with flags), 4 I/O failure.

mod config;
mod output;
mod tasks;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use fluxrabi_core::parallel::with_workers;
use serde_json::json;

use config::{RunConfig, Task};
use output::{task_paths, write_csv, write_json, Table};
use tasks::{run_task, TaskError};

const EXIT_VALIDATION: u8 = 2;
const EXIT_NONCONVERGENCE: u8 = 3;
const EXIT_IO: u8 = 4;

#[derive(Parser)]
#[command(name = "fluxrabi", version, about = "Flux qubit / LC oscillator spectra and Rabi-model fits")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the tasks of a JSON config.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Comma-separated task names; overrides the config's list.
        #[arg(long, value_delimiter = ',')]
        tasks: Option<Vec<String>>,
        /// Output directory; overrides the config.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads for sweep points.
        #[arg(long)]
        workers: Option<usize>,
        /// Accepted for interface compatibility; every computation is deterministic.
        #[arg(long)]
        seedless: bool,
    },
}

fn fail(code: u8, msg: &str) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_VALIDATION) } else { ExitCode::SUCCESS };
        }
    };
    let Command::Run {
        config,
        tasks,
        out,
        workers,
        seedless,
    } = cli.command;

    let text = match fs::read_to_string(&config) {
        Ok(t) => t,
        Err(e) => return fail(EXIT_IO, &format!("reading {}: {e}", config.display())),
    };
    let mut cfg: RunConfig = match serde_json::from_str(&text) {
        Ok(c) => c,
        Err(e) => return fail(EXIT_VALIDATION, &format!("parsing {}: {e}", config.display())),
    };
    if let Some(t) = tasks {
        cfg.tasks = t;
    }
    if let Some(dir) = out {
        cfg.output.dir = dir;
    }
    if workers == Some(0) {
        return fail(EXIT_VALIDATION, "--workers must be at least 1");
    }
    if let Err(e) = cfg.validate() {
        return fail(EXIT_VALIDATION, &e);
    }
    let task_list = cfg.tasks().expect("validated");
    if let Err(e) = fs::create_dir_all(&cfg.output.dir) {
        return fail(EXIT_IO, &format!("creating {}: {e}", cfg.output.dir.display()));
    }

    let run = || run_all(&cfg, &task_list, seedless);
    let status = match workers {
        Some(n) => with_workers(n, run),
        None => run(),
    };
    match status {
        Ok(code) => ExitCode::from(code),
        Err(msg) => fail(EXIT_IO, &msg),
    }
}

/// Run every task, writing its files; returns the exit code or an I/O error.
fn run_all(cfg: &RunConfig, tasks: &[Task], seedless: bool) -> Result<u8, String> {
    let mut code = 0;
    for &task in tasks {
        let name = task.name();
        eprintln!("running {name}");
        let (csv, meta) = task_paths(&cfg.output.dir, name);
        let (table, metadata, status, flags, warnings) = match run_task(task, cfg) {
            Ok(o) => {
                let status = if o.nonconverged.is_empty() { "ok" } else { "nonconverged" };
                (o.table, o.metadata, status, o.nonconverged, o.warnings)
            }
            Err(TaskError::Numeric(m)) => (Table::new(&[]), json!({ "error": m }), "nonconverged", vec![m], vec![]),
            Err(TaskError::Validation(m)) => (Table::new(&[]), json!({ "error": m }), "invalid", vec![m], vec![]),
        };
        match status {
            "nonconverged" => code = code.max(EXIT_NONCONVERGENCE),
            "invalid" => code = code.max(EXIT_VALIDATION),
            _ => {}
        }
        for f in &flags {
            eprintln!("{name}: {f}");
        }
        for w in &warnings {
            eprintln!("{name}: warning: {w}");
        }
        write_csv(&csv, &table).map_err(|e| format!("writing {}: {e}", csv.display()))?;
        let doc = json!({
            "tool": "fluxrabi",
            "version": env!("CARGO_PKG_VERSION"),
            "schema_version": config::SCHEMA_VERSION,
            "task": name,
            "status": status,
            "flags": flags,
            "warnings": warnings,
            "csv": csv.file_name().map(|f| f.to_string_lossy().into_owned()),
            "float_format": "17 significant digits, scientific notation",
            "row_order": "Lc, Phix, quantity",
            "deterministic": true,
            "seedless": seedless,
            "config": cfg,
            "defaults": defaults(),
            "task_metadata": metadata,
        });
        write_json(&meta, &doc).map_err(|e| format!("writing {}: {e}", meta.display()))?;
    }
    Ok(code)
}

/// Library defaults not exposed in the config.
fn defaults() -> serde_json::Value {
    use fluxrabi_core::{coupled, nelder_mead, perturbation, rabi, subsystem};
    let nm = nelder_mead::NelderMeadOptions::default();
    json!({
        "nelder_mead": {
            "f_tol": nm.f_tol,
            "x_tol": nm.x_tol,
            "initial_step": nm.initial_step,
            "restart_step": "halved each restart",
        },
        "rabi_fock_states": "60 when g/omega >= 0.2, otherwise 20",
        "rabi_convergence_tol_GHz": rabi::CONVERGENCE_TOL_GHZ,
        "coupled_convergence_tol_GHz": coupled::CONVERGENCE_TOL_GHZ,
        "coupled_convergence_levels": coupled::CONVERGENCE_LEVELS,
        "two_level_fit_grid_Phi0": { "start": 0.496, "stop": 0.504, "points": 41 },
        "phi2max": "mean of ground and excited diagonal-flux estimates",
        "q2max": "|<g|n|e>| at Phix = 0.5 in units of 2e",
        "eigenvector_phase": "largest-magnitude coefficient positive",
        "degeneracy_GHz": subsystem::DEGENERACY_GHZ,
        "perturbation_degeneracy_guard_GHz": perturbation::DEGENERACY_GUARD_GHZ,
        "level_labels": "energy order at each flux bias",
    })
}
